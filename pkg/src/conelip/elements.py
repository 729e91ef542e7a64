"""Finitely supported elements of free spaces.

:class:`FreeElement` is a signed combination of point masses on a
:class:`~conelip.metric.PointedSpace`; :class:`PHFreeElement` is the
positively homogeneous analogue, supported on vectors of R^d.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._validation import as_array, check_norm, is_exact, vector_norm
from .exceptions import BadDimension, ValidationError

DIRECTION_TOL = 1e-9


@dataclass(frozen=True)
class FreeElement:
    """``sum a_i delta_{x_i}`` in canonical form.

    Indices are sorted and distinct; basepoint terms and zero coefficients
    are dropped because ``delta_0 = 0``.
    """

    indices: tuple = ()
    coefs: tuple = ()

    @classmethod
    def from_terms(cls, terms):
        acc = {}
        for i, a in terms:
            i = int(i)
            if isinstance(a, np.generic):
                a = a.item()
            if i < 0:
                raise ValidationError(f"negative point index {i}")
            acc[i] = acc.get(i, 0) + a
        items = sorted((i, a) for i, a in acc.items() if i != 0 and a != 0)
        return cls(tuple(i for i, _ in items), tuple(a for _, a in items))

    @classmethod
    def from_dense(cls, values):
        return cls.from_terms(enumerate(values))

    @classmethod
    def delta(cls, i, a=1.0):
        return cls.from_terms([(i, a)])

    def dense(self, n, exact=False):
        out = np.zeros(n, dtype=object if exact else float)
        if exact:
            out[:] = Fraction(0)
        for i, a in self.terms():
            if i >= n:
                raise ValidationError(f"index {i} outside a {n}-point space")
            out[i] = a
        return out

    def terms(self):
        return list(zip(self.indices, self.coefs))

    def __add__(self, other):
        return FreeElement.from_terms(self.terms() + other.terms())

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, alpha):
        return FreeElement.from_terms([(i, alpha * a) for i, a in self.terms()])

    def __len__(self):
        return len(self.indices)

    def to_dict(self):
        return {"terms": [{"point": i, "a": a} for i, a in self.terms()]}


@dataclass(frozen=True, eq=False)
class PHFreeElement:
    """``sum a_i delta^ph_{x_i}`` with ``x_i`` in (R^d, norm)."""

    points: np.ndarray
    coefs: np.ndarray
    norm: str = "l2"

    def __post_init__(self):
        check_norm(self.norm)
        exact = is_exact(np.asarray(self.points)) or is_exact(np.asarray(self.coefs))
        pts = as_array(self.points, exact=exact)
        if pts.ndim == 1 and pts.size == 0:
            pts = pts.reshape(0, 0)
        if pts.ndim != 2:
            raise BadDimension(f"points must be an (m, d) array, got shape {pts.shape}")
        coefs = as_array(self.coefs, exact=exact)
        if coefs.shape != (pts.shape[0],):
            raise BadDimension("one coefficient per point is required")
        keep = vector_norm(pts, self.norm, axis=1) > 0 if len(pts) else np.zeros(0, bool)
        keep = np.asarray(keep, dtype=bool)
        object.__setattr__(self, "points", pts[keep])
        object.__setattr__(self, "coefs", coefs[keep])

    @classmethod
    def from_terms(cls, terms, norm="l2", dim=None):
        terms = list(terms)
        if not terms:
            return cls(np.zeros((0, dim or 0)), np.zeros(0), norm)
        pts = [list(x) for x, _ in terms]
        return cls(pts, [a for _, a in terms], norm)

    @classmethod
    def delta(cls, x, a=1.0, norm="l2"):
        return cls.from_terms([(x, a)], norm)

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def exact(self):
        return is_exact(self.points) or is_exact(self.coefs)

    def terms(self):
        return list(zip(self.points, self.coefs))

    def __add__(self, other):
        if other.norm != self.norm:
            raise ValidationError("cannot add elements over different norms")
        return PHFreeElement.from_terms(self.terms() + other.terms(), self.norm, self.dim)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, alpha):
        return PHFreeElement(self.points, self.coefs * alpha, self.norm)

    def __len__(self):
        return len(self.coefs)

    def reduced(self, tol=DIRECTION_TOL):
        """Per-direction weights ``w_u = sum a * ||x||`` over terms on ray u.

        Directions are sorted lexicographically; zero weights are dropped.
        """
        if not len(self.coefs):
            return np.zeros((0, self.dim)), np.zeros(0)
        r = vector_norm(self.points, self.norm, axis=1)
        dirs = self.points / r[:, None]
        weights = self.coefs * r
        order = sorted(range(len(dirs)), key=lambda k: tuple(float(v) for v in dirs[k]))
        reps, acc, mag = [], [], []
        for k in order:
            for c, rep in enumerate(reps):
                if float(vector_norm(np.asarray(dirs[k] - rep, dtype=float), self.norm)) <= tol:
                    acc[c] = acc[c] + weights[k]
                    mag[c] += abs(float(weights[k]))
                    break
            else:
                reps.append(dirs[k])
                acc.append(weights[k])
                mag.append(abs(float(weights[k])))
        exact = self.exact
        keep = [
            c for c in range(len(reps))
            if (acc[c] != 0 if exact else abs(acc[c]) > 1e-12 * max(1.0, mag[c]))
        ]
        if not keep:
            return np.zeros((0, self.dim), dtype=dirs.dtype), np.zeros(0, dtype=weights.dtype)
        return np.array([reps[c] for c in keep]), np.array([acc[c] for c in keep])

    def to_dict(self):
        return {
            "norm": self.norm,
            "dim": int(self.dim),
            "terms": [{"x": list(x), "a": a} for x, a in self.terms()],
        }
