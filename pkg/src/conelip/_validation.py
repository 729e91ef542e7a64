"""Array coercion and small checks shared by every module."""

from fractions import Fraction

import numpy as np

from .exceptions import BadDimension, ValidationError

NORMS = ("l1", "l2", "linf")


def check_norm(tag):
    if tag not in NORMS:
        raise ValidationError(f"unknown norm {tag!r}; expected one of {NORMS}")
    return tag


def to_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(float(x))


def is_exact(a):
    return isinstance(a, np.ndarray) and a.dtype == object


def as_array(x, exact=False, ndim=None):
    """Coerce ``x`` to a float array, or to an object array of Fractions."""
    if exact:
        a = np.asarray(x, dtype=object)
        a = np.vectorize(to_fraction, otypes=[object])(a) if a.size else a
    else:
        a = np.asarray(x, dtype=object)
        if a.size and any(isinstance(v, str) for v in a.flat):
            a = np.vectorize(to_fraction, otypes=[object])(a)
        a = np.asarray(a, dtype=float)
    if ndim is not None and a.ndim != ndim:
        raise BadDimension(f"expected a {ndim}-d array, got shape {a.shape}")
    if not exact and a.size and not np.all(np.isfinite(a)):
        raise ValidationError("non-finite entries")
    return a


def vector_norm(x, tag, axis=-1):
    """The l1, l2 or l-infinity norm along ``axis``.

    Object (Fraction) arrays are supported for l1 and linf, and for l2 on
    one-dimensional vectors where all three norms coincide.
    """
    check_norm(tag)
    x = np.asarray(x)
    if tag == "l1":
        return np.sum(np.abs(x), axis=axis)
    if tag == "linf":
        if x.shape[axis] == 0:
            return np.zeros(np.delete(x.shape, axis % x.ndim)) if x.ndim > 1 else 0.0
        return np.max(np.abs(x), axis=axis)
    if x.dtype == object and x.ndim and x.shape[axis] == 1:
        return np.sum(np.abs(x), axis=axis)
    if x.dtype == object:
        raise ValidationError("the l2 norm has no exact rational mode")
    return np.sqrt(np.sum(x * x, axis=axis))


def fmt_number(x):
    """17 significant digits, the round-trip precision of a double."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return format(float(x), ".17g")
