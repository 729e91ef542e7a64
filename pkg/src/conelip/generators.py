"""Seeded random instances for the verification suites and the tests."""

from fractions import Fraction

import numpy as np

from ._validation import NORMS, vector_norm
from .cone import RaySystem
from .elements import FreeElement, PHFreeElement
from .metric import from_matrix, from_points

MIN_SEPARATION = 0.05


def random_points(rng, n, dim, norm, box=5.0, sep=MIN_SEPARATION):
    pts = []
    while len(pts) < n:
        x = rng.uniform(-box, box, size=(dim,))
        if all(vector_norm(x - p, norm) >= sep for p in pts):
            pts.append(x)
    return np.array(pts)


def random_space(rng, n_min=3, n_max=8, dim=None, norm=None):
    n = rng.integers(n_min, n_max + 1)
    dim = dim or rng.integers(1, 4)
    norm = norm or rng.choice(NORMS)
    return from_points(random_points(rng, n, dim, norm), norm)


def random_integer_metric(rng, n, max_weight=9):
    """Shortest-path metric of a complete graph with integer weights (exact)."""
    w = np.zeros((n, n), dtype=int)
    for i in range(n):
        for j in range(i + 1, n):
            w[i, j] = w[j, i] = rng.integers(1, max_weight + 1)
    for k in range(n):
        w = np.minimum(w, w[:, k : k + 1] + w[k : k + 1, :])
    return from_matrix([[Fraction(int(v)) for v in row] for row in w], exact=True)


def random_field(rng, n, scale=5.0):
    f = rng.uniform(-scale, scale, size=(n,))
    f[0] = 0.0
    return f


def random_integer_field(rng, n, lo=-6, hi=7):
    return [Fraction(0)] + [Fraction(int(rng.integers(lo, hi))) for _ in range(n - 1)]


def random_generators(rng, n, k, integer=False):
    """``k`` linearly independent fields on ``n`` points."""
    while True:
        if integer:
            gens = [random_integer_field(rng, n) for _ in range(k)]
            M = np.array(gens, dtype=float)
        else:
            gens = [random_field(rng, n) for _ in range(k)]
            M = np.array(gens)
        if k == 0 or np.linalg.matrix_rank(M) == k:
            return gens


def random_rays(rng, k, dim, norm, sep=MIN_SEPARATION):
    dirs = []
    while len(dirs) < k:
        v = rng.normal(size=(dim,))
        r = vector_norm(v, norm)
        if r < 1e-3:
            continue
        u = v / r
        if all(vector_norm(u - w, norm) >= sep for w in dirs):
            dirs.append(u)
    return RaySystem(np.array(dirs), norm)


def random_vector(rng, dim, box=5.0, min_norm=1e-3, norm="l2"):
    while True:
        x = rng.uniform(-box, box, size=(dim,))
        if vector_norm(x, norm) >= min_norm:
            return x


def random_sphere_element(rng, k_max=5, dim=2, norm="l2"):
    """A free element supported on random unit vectors, with its sphere space."""
    k = rng.integers(1, k_max + 1)
    rays = random_rays(rng, k, dim, norm)
    pts = np.vstack([np.zeros((1, dim)), rays.directions])
    space = from_points(pts, norm)
    coefs = rng.uniform(-3.0, 3.0, size=(k,))
    return space, FreeElement.from_terms((i + 1, coefs[i]) for i in range(k))


def random_free_element(rng, n, max_terms=None):
    """Random combination of point masses on ``n`` points (basepoint excluded)."""
    idx = rng.permutation(n - 1)
    m = rng.integers(1, (max_terms or n - 1) + 1)
    return FreeElement.from_terms((i + 1, rng.uniform(-3.0, 3.0)) for i in idx[:m])


def delta_pair(x, y, norm):
    return PHFreeElement(np.array([x, y]), np.array([1.0, -1.0]), norm)


__all__ = [
    "delta_pair",
    "random_field",
    "random_free_element",
    "random_generators",
    "random_integer_field",
    "random_integer_metric",
    "random_points",
    "random_rays",
    "random_space",
    "random_sphere_element",
    "random_vector",
]
