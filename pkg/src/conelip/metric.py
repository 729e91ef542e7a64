"""Finite pointed metric spaces and exact Lipschitz constants.

The basepoint is always index 0. A "field" on a space is a 1-d array with
one value per point and value 0 at the basepoint.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import as_array, check_norm, is_exact, vector_norm
from .exceptions import (
    BadDimension,
    BasepointMissing,
    DuplicatePoint,
    MisalignedField,
    NonzeroAtBasepoint,
    TriangleViolation,
    ValidationError,
)

METRIC_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PointedSpace:
    """A finite metric space with basepoint 0.

    ``dist`` is computed once and shared by every downstream operation.
    ``points`` and ``norm`` are set for spaces embedded in R^d.
    """

    dist: np.ndarray
    points: np.ndarray | None = None
    norm: str | None = None

    @property
    def kind(self):
        return "matrix" if self.points is None else "points"

    @property
    def n_points(self):
        return self.dist.shape[0]

    @property
    def dim(self):
        return None if self.points is None else self.points.shape[1]

    @property
    def exact(self):
        return is_exact(self.dist)

    def __len__(self):
        return self.n_points

    def to_dict(self):
        if self.points is None:
            return {"kind": "matrix", "dist": self.dist.tolist()}
        return {
            "kind": "points",
            "norm": self.norm,
            "dim": int(self.dim),
            "points": self.points.tolist(),
        }


def pairwise_distances(points, norm):
    points = np.asarray(points)
    return vector_norm(points[:, None, :] - points[None, :, :], norm)


def _validate_metric(d):
    n = d.shape[0]
    if d.ndim != 2 or d.shape != (n, n):
        raise BadDimension(f"distance matrix must be square, got shape {d.shape}")
    if n == 0:
        raise BadDimension("a pointed space needs at least the basepoint")
    tol = 0 if is_exact(d) else METRIC_TOL
    if any(d[i, i] != 0 for i in range(n)):
        raise ValidationError("distance matrix must have a zero diagonal")
    if np.any(d < 0):
        raise ValidationError("distances must be nonnegative")
    asym = np.argwhere(np.abs(d - d.T) > tol)
    if len(asym):
        i, j = asym[0]
        raise ValidationError(f"distance matrix not symmetric at ({i},{j})")
    iu, ju = np.triu_indices(n, 1)
    dup = np.flatnonzero(d[iu, ju] < METRIC_TOL) if not is_exact(d) else np.flatnonzero(d[iu, ju] == 0)
    if len(dup):
        raise DuplicatePoint(int(iu[dup[0]]), int(ju[dup[0]]))
    # excess[i, j, k] = d(i,j) - d(i,k) - d(k,j)
    excess = d[:, :, None] - d[:, None, :] - d.T[None, :, :]
    bad = np.argwhere(excess > tol)
    if len(bad):
        i, j, k = (int(v) for v in bad[0])
        raise TriangleViolation(i, j, k, float(excess[i, j, k]))


def from_points(points, norm="l2", exact=False):
    check_norm(norm)
    pts = as_array(points, exact=exact)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[1] == 0:
        raise BadDimension(f"points must form an (n, d) array, got shape {pts.shape}")
    d = pairwise_distances(pts, norm)
    _validate_metric(d)
    pts.setflags(write=False)
    d.setflags(write=False)
    return PointedSpace(dist=d, points=pts, norm=norm)


def from_matrix(dist, exact=False):
    d = as_array(dist, exact=exact)
    if d.ndim != 2:
        raise BadDimension(f"distance matrix must be 2-d, got shape {d.shape}")
    _validate_metric(d)
    d = d.copy()
    d.setflags(write=False)
    return PointedSpace(dist=d)


def build_space(data, exact=False):
    """Build a space from its JSON description (see ``conelip.io``)."""
    kind = data.get("kind")
    if kind == "points":
        pts = data["points"]
        dim = data.get("dim")
        if dim is not None and any(len(p) != dim for p in pts):
            raise BadDimension(f"every point must have dimension {dim}")
        return from_points(pts, data.get("norm", "l2"), exact=exact)
    if kind == "matrix":
        return from_matrix(data["dist"], exact=exact)
    raise ValidationError(f"unknown space kind {kind!r}")


def check_field(space, f, exact=None):
    """Validate a field against ``space`` and return it as an array."""
    exact = space.exact if exact is None else exact
    f = as_array(f, exact=exact)
    if f.ndim != 1 or f.shape[0] != space.n_points:
        raise MisalignedField(
            f"field has shape {f.shape}, space has {space.n_points} points"
        )
    if abs(f[0]) > (0 if exact else METRIC_TOL):
        raise NonzeroAtBasepoint(f"field must vanish at the basepoint, got {f[0]}")
    return f


def lip_const(space, f, with_pair=False):
    """Largest slope |f(i) - f(j)| / d(i, j) over all pairs.

    With ``with_pair=True`` also returns the first maximising pair in
    row-major order (``None`` when the maximum is 0 on a 1-point space).
    """
    f = check_field(space, f)
    n = space.n_points
    if n < 2:
        zero = f.dtype.type(0) if not is_exact(f) else f[0] * 0
        return (zero, None) if with_pair else zero
    iu, ju = np.triu_indices(n, 1)
    ratios = np.abs(f[iu] - f[ju]) / space.dist[iu, ju]
    k = int(np.argmax(ratios))
    value = ratios[k]
    if with_pair:
        return value, (int(iu[k]), int(ju[k]))
    return value


def restrict(space, subset):
    """Sub-space on ``subset`` (sorted; must contain the basepoint)."""
    idx = sorted({int(i) for i in subset})
    if not idx or idx[0] != 0:
        raise BasepointMissing("subset must contain the basepoint index 0")
    if idx[-1] >= space.n_points or idx[0] < 0:
        raise ValidationError(f"subset index out of range for {space.n_points} points")
    idx = np.asarray(idx)
    d = space.dist[np.ix_(idx, idx)].copy()
    d.setflags(write=False)
    if space.points is None:
        return PointedSpace(dist=d)
    pts = space.points[idx].copy()
    pts.setflags(write=False)
    return PointedSpace(dist=d, points=pts, norm=space.norm)
