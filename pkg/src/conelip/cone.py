"""Positively homogeneous Lipschitz functions on finitely many rays.

A ph function is stored by its values on unit directions ``u_i``; the value
at ``r u_i`` (``r >= 0``) is ``r * values[i]`` and the value at 0 is 0, so
homogeneity holds by construction.
"""

from dataclasses import dataclass

import numpy as np

from . import _search
from ._validation import as_array, check_norm, is_exact, vector_norm
from .elements import DIRECTION_TOL, PHFreeElement
from .exceptions import (
    BadDimension,
    DegeneratePair,
    DirectionNotRepresented,
    EmptySubcone,
    MatrixSpaceUnsupported,
    NonUnitSupport,
    NonzeroAtBasepoint,
    RaySystemMismatch,
    ValidationError,
)
from .metric import METRIC_TOL, from_points

UNIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class RaySystem:
    """Distinct unit directions in (R^d, norm) generating a cone."""

    directions: np.ndarray
    norm: str = "l2"

    def __post_init__(self):
        check_norm(self.norm)
        exact = is_exact(np.asarray(self.directions))
        dirs = as_array(self.directions, exact=exact)
        if dirs.ndim == 1:
            dirs = dirs[:, None]
        if dirs.ndim != 2 or dirs.shape[1] == 0:
            raise BadDimension(f"directions must be a (k, d) array, got shape {dirs.shape}")
        lengths = vector_norm(dirs, self.norm, axis=1)
        bad = np.flatnonzero(np.abs(np.asarray(lengths, dtype=float) - 1.0) > UNIT_TOL)
        if len(bad):
            raise NonUnitSupport(f"direction {bad[0]} has norm {lengths[bad[0]]}, expected 1")
        k = len(dirs)
        for i in range(k):
            for j in range(i + 1, k):
                if float(vector_norm(dirs[i] - dirs[j], self.norm)) <= UNIT_TOL:
                    raise ValidationError(f"directions {i} and {j} coincide")
        dirs = dirs.copy()
        dirs.setflags(write=False)
        object.__setattr__(self, "directions", dirs)

    @classmethod
    def from_vectors(cls, vectors, norm="l2"):
        """Normalise nonzero ``vectors`` onto the unit sphere."""
        v = np.asarray(vectors, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        return cls(v / vector_norm(v, norm, axis=1)[:, None], norm)

    @property
    def dim(self):
        return self.directions.shape[1]

    def __len__(self):
        return len(self.directions)

    def match(self, x):
        """Index of the direction of nonzero ``x`` (tolerance 1e-9)."""
        x = np.asarray(x)
        r = vector_norm(x, self.norm)
        u = x / r
        gaps = np.asarray(vector_norm(np.asarray(self.directions - u, dtype=float), self.norm, axis=1))
        k = int(np.argmin(gaps))
        if gaps[k] > DIRECTION_TOL:
            raise DirectionNotRepresented(f"no ray through {x.tolist()}")
        return k

    def to_dict(self, values=None):
        out = {"norm": self.norm, "dim": int(self.dim), "directions": self.directions.tolist()}
        if values is not None:
            out["values"] = list(values)
        return out


def _values(rays, f, name="field"):
    f = as_array(f, exact=is_exact(np.asarray(f)))
    if f.ndim != 1 or len(f) != len(rays):
        raise RaySystemMismatch(f"{name} has {np.shape(f)} values for {len(rays)} rays")
    return f


def ph_eval(rays, f, x):
    """``||x|| * f(x / ||x||)``; 0 at the origin."""
    f = _values(rays, f)
    x = np.asarray(x)
    if x.shape != (rays.dim,):
        raise BadDimension(f"expected a vector of length {rays.dim}")
    r = vector_norm(x, rays.norm)
    if r == 0:
        return r * 0
    return r * f[rays.match(x)]


def pair_sup(u, v, a, b, norm="l2"):
    """``sup_{t in [0,1]} |(1-t) a - t b| / ||(1-t) u - t v||`` and its argmax.

    This is the largest slope of a ph function between the rays through
    ``u`` and ``v`` when it takes values ``a`` and ``b`` there.
    """
    check_norm(norm)
    u = np.asarray(u, dtype=float).reshape(-1)
    v = np.asarray(v, dtype=float).reshape(-1)
    if float(vector_norm(u - v, norm)) <= UNIT_TOL:
        raise DegeneratePair("u and v coincide")
    t, val = _search.pair_ratio_max(u[None], v[None], [a], [b], norm)
    return float(t[0]), float(val[0])


def _all_pairs(rays, f):
    k = len(rays)
    iu, ju = np.triu_indices(k, 1)
    D = np.asarray(rays.directions, dtype=float)
    f = np.asarray(f, dtype=float)
    t, val = _search.pair_ratio_max(D[iu], D[ju], f[iu], f[ju], rays.norm)
    return iu, ju, t, val


def cone_lip(rays, f, with_argmax=False):
    """Lipschitz constant of the ph function ``f`` on the cone of ``rays``.

    Maximum of ``|f(u_i)|`` (slope along each ray) and of the pairwise
    suprema from :func:`pair_sup`. With ``with_argmax`` also returns
    ``(i, j, t)`` for the maximising pair (``j is None`` for a single ray).
    """
    f = _values(rays, f)
    fa = np.abs(np.asarray(f, dtype=float))
    i0 = int(np.argmax(fa)) if len(fa) else 0
    best = float(fa[i0]) if len(fa) else 0.0
    arg = (i0, None, 0.0)
    if len(rays) > 1:
        iu, ju, t, val = _all_pairs(rays, f)
        k = int(np.argmax(val))
        if val[k] > best:
            best = float(val[k])
            arg = (int(iu[k]), int(ju[k]), float(t[k]))
    return (best, arg) if with_argmax else best


def sphere_space(rays):
    """The pointed space ``{0} u {u_i}`` with the restricted norm metric."""
    pts = np.vstack([np.zeros((1, rays.dim), dtype=rays.directions.dtype), rays.directions])
    return from_points(pts, rays.norm, exact=is_exact(rays.directions))


def lambda_restrict(rays, f):
    """Restriction to the sampled sphere: ``(space, field)`` with field ``(0, f...)``."""
    f = _values(rays, f)
    field = np.concatenate([np.zeros(1, dtype=f.dtype), f])
    if is_exact(f):
        field[0] = f[0] * 0
    return sphere_space(rays), field


def lambda_inverse(space, field):
    """Inverse of :func:`lambda_restrict`: ``(rays, values)`` with
    ``h(x) = ||x|| g(x / ||x||)``."""
    if space.points is None:
        raise MatrixSpaceUnsupported("the sphere space must be embedded")
    field = as_array(field, exact=is_exact(np.asarray(field)))
    if field.shape != (space.n_points,):
        raise RaySystemMismatch("field does not match the sphere space")
    if abs(field[0]) > METRIC_TOL:
        raise NonzeroAtBasepoint(f"field must vanish at 0, got {field[0]}")
    if np.any(space.points[0] != 0):
        raise ValidationError("the basepoint of a sphere space must be the origin")
    return RaySystem(space.points[1:], space.norm), field[1:].copy()


def odot(rays, f, g, raw=False):
    """Product ``(1/5) ||x|| f(x/||x||) g(x/||x||)``; ``raw`` drops the 1/5."""
    f = _values(rays, f, "f")
    g = _values(rays, g, "g")
    prod = f * g
    return prod if raw else prod / 5


def ph_mcshane_extend(rays, sub, f_sub, lip=None):
    """Extend a ph function from the sub-cone on ``sub`` to every ray.

    For a direction ``u`` outside ``sub`` the value is
    ``sup_{w in sub, r >= 0} (r f(w) - L ||u - r w||)`` with ``L`` the cone
    constant of the data; values on ``sub`` are copied unchanged.
    """
    sub = [int(i) for i in sub]
    if not sub:
        raise EmptySubcone("cannot extend from an empty set of rays")
    if len(set(sub)) != len(sub) or min(sub) < 0 or max(sub) >= len(rays):
        raise ValidationError("sub must list distinct ray indices")
    f_sub = np.asarray(f_sub, dtype=float)
    if f_sub.shape != (len(sub),):
        raise RaySystemMismatch("one value per sub-ray is required")
    sub_rays = RaySystem(np.asarray(rays.directions, dtype=float)[sub], rays.norm)
    L = cone_lip(sub_rays, f_sub)
    if lip is not None:
        if lip < L * (1 - 1e-12):
            raise ValidationError(f"supplied constant {lip} is below the data constant {L}")
        L = float(lip)
    out = np.empty(len(rays))
    W = np.asarray(sub_rays.directions, dtype=float)
    in_sub = set(sub)
    for k in range(len(rays)):
        if k in in_sub:
            continue
        u = np.asarray(rays.directions[k], dtype=float)
        out[k] = float(np.max(_search.ray_sup(u, W, f_sub, L, rays.norm)))
    out[sub] = f_sub
    return out


def ball_projection(x, norm="l2"):
    """``x`` if ``||x|| <= 1`` else ``x / ||x||``; rows of a 2-d array
    are projected independently."""
    check_norm(norm)
    x = np.asarray(x, dtype=float)
    r = vector_norm(x, norm, axis=-1)
    scale = np.where(r > 1.0, 1.0 / np.where(r > 1.0, r, 1.0), 1.0)
    return x * (scale[..., None] if x.ndim > 1 else scale)


@dataclass(frozen=True, eq=False)
class PHMap:
    """A positively homogeneous map into (R^e, codomain_norm).

    Either a linear ``matrix`` (e x d), or per-coordinate ph fields
    ``fields`` (e x k) on ``rays``.
    """

    matrix: np.ndarray | None = None
    rays: RaySystem | None = None
    fields: np.ndarray | None = None
    codomain_norm: str = "l2"

    def __post_init__(self):
        check_norm(self.codomain_norm)
        if (self.matrix is None) == (self.fields is None):
            raise ValidationError("give exactly one of matrix or fields")
        if self.fields is not None:
            if self.rays is None:
                raise ValidationError("field-backed maps need a ray system")
            fields = np.atleast_2d(np.asarray(self.fields, dtype=float))
            if fields.shape[1] != len(self.rays):
                raise RaySystemMismatch("each coordinate field needs one value per ray")
            object.__setattr__(self, "fields", fields)
        else:
            object.__setattr__(self, "matrix", np.atleast_2d(np.asarray(self.matrix, dtype=float)))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.matrix is not None:
            return self.matrix @ x
        r = vector_norm(x, self.rays.norm)
        if r == 0:
            return np.zeros(self.fields.shape[0])
        return r * self.fields[:, self.rays.match(x)]


def ph_pushforward(f, mu):
    """``sum a_i delta^ph_{x_i}  ->  sum a_i delta^ph_{f(x_i)}``."""
    if not len(mu):
        out_dim = f.matrix.shape[0] if f.matrix is not None else f.fields.shape[0]
        return PHFreeElement(np.zeros((0, out_dim)), np.zeros(0), f.codomain_norm)
    pts = np.array([f(x) for x in mu.points])
    return PHFreeElement(pts, np.asarray(mu.coefs, dtype=float), f.codomain_norm)


def ph_pairing(rays, f, mu):
    """``<f, mu> = sum a_i ||x_i|| f(x_i / ||x_i||)``."""
    f = _values(rays, f)
    if mu.norm != rays.norm:
        raise ValidationError("element and rays use different norms")
    total = 0
    for x, a in mu.terms():
        r = vector_norm(x, rays.norm)
        total = total + a * r * f[rays.match(x)]
    return total
