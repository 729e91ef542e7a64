"""McShane sup/inf extensions on finite pointed metric spaces."""

from dataclasses import dataclass

import numpy as np

from ._validation import as_array, is_exact
from .exceptions import BasepointMissing, NotAnExtension, SolverError, ValidationError
from .lp import LPProblem, solve_lp
from .metric import METRIC_TOL, check_field


@dataclass(frozen=True)
class PartialField:
    """Values of a function on the index subset ``domain`` (basepoint included)."""

    domain: tuple
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(int(i) for i in self.domain))
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.domain) != len(self.values):
            raise ValidationError("domain and values differ in length")
        if len(set(self.domain)) != len(self.domain):
            raise ValidationError("domain indices must be distinct")
        if 0 not in self.domain:
            raise BasepointMissing("the domain must contain the basepoint 0")

    def to_dict(self):
        return {"domain": list(self.domain), "values": list(self.values)}


def _checked(space, pf):
    n = space.n_points
    if any(i < 0 or i >= n for i in pf.domain):
        raise ValidationError(f"domain index out of range for {n} points")
    vals = as_array(pf.values, exact=space.exact)
    base = vals[pf.domain.index(0)]
    if abs(base) > (0 if space.exact else METRIC_TOL):
        raise ValidationError(f"partial field must vanish at the basepoint, got {base}")
    return np.asarray(pf.domain), vals


def domain_lip(space, pf):
    """Lipschitz constant of ``pf`` on its own domain."""
    dom, vals = _checked(space, pf)
    if len(dom) < 2:
        return vals[0] * 0
    iu, ju = np.triu_indices(len(dom), 1)
    return np.max(np.abs(vals[iu] - vals[ju]) / space.dist[dom[iu], dom[ju]])


def _resolve_lip(space, pf, lip):
    L = domain_lip(space, pf)
    if lip is None:
        return L
    lip = as_array([lip], exact=space.exact)[0]
    slack = 0 if space.exact else 1e-12 * max(1.0, float(L))
    if lip < L - slack:
        raise ValidationError(f"supplied constant {lip} is below the domain constant {L}")
    return lip


def _extend(space, pf, lip, kind):
    dom, vals = _checked(space, pf)
    L = _resolve_lip(space, pf, lip)
    d = space.dist[:, dom]
    if kind == "sup":
        out = np.max(vals[None, :] - L * d, axis=1)
    else:
        out = np.min(vals[None, :] + L * d, axis=1)
    out = np.array(out, dtype=object if space.exact else float)
    out[dom] = vals
    return out


def mcshane_sup(space, pf, lip=None):
    """Smallest extension: ``F(x) = max_{y in E} f(y) - L d(x, y)``.

    ``lip`` may raise the constant above the domain's own Lipschitz
    constant; by default the domain constant is used.
    """
    return _extend(space, pf, lip, "sup")


def mcshane_inf(space, pf, lip=None):
    """Largest extension: ``G(x) = min_{y in E} f(y) + L d(x, y)``."""
    return _extend(space, pf, lip, "inf")


def is_extremal_sandwich(space, pf, h, lip=None, tol=1e-12):
    """True iff ``mcshane_sup <= h <= mcshane_inf`` pointwise.

    ``h`` must already be an extension of ``pf`` with constant at most L;
    anything else raises :class:`NotAnExtension`.
    """
    dom, vals = _checked(space, pf)
    h = check_field(space, h)
    L = _resolve_lip(space, pf, lip)
    exact = space.exact
    t = 0 if exact else tol * max(1.0, float(np.max(np.abs(h))) if len(h) else 1.0)
    if np.any(np.abs(h[dom] - vals) > t):
        raise NotAnExtension("h disagrees with the partial field on its domain")
    n = space.n_points
    if n > 1:
        iu, ju = np.triu_indices(n, 1)
        lip_h = np.max(np.abs(h[iu] - h[ju]) / space.dist[iu, ju])
        if lip_h > L + (0 if exact else tol * max(1.0, float(L))):
            raise NotAnExtension(f"Lip(h) = {lip_h} exceeds L = {L}")
    F = mcshane_sup(space, pf, L)
    G = mcshane_inf(space, pf, L)
    return bool(np.all(F <= h + t) and np.all(h <= G + t))


def lp_extension(space, pf, objective, lip=None, exact=None):
    """A vertex of the polytope of L-Lipschitz extensions of ``pf``.

    Maximises ``objective . h`` over extensions; useful for sampling
    extensions other than the two extremal ones.
    """
    dom, vals = _checked(space, pf)
    L = _resolve_lip(space, pf, lip)
    n = space.n_points
    free = [i for i in range(n) if i not in set(dom.tolist())]
    if not free:
        out = np.empty(n, dtype=object if space.exact else float)
        out[dom] = vals
        return out
    pos = {v: k for k, v in enumerate(free)}
    fixed = dict(zip(dom.tolist(), vals))
    obj = np.asarray(objective, dtype=float)
    prob = LPProblem([float(obj[i]) for i in free], "max", bounds=[(None, None)] * len(free))
    for i in range(n):
        for j in range(i + 1, n):
            if i in fixed and j in fixed:
                continue
            dij = L * space.dist[i, j]
            row = [0] * len(free)
            rhs_shift = 0
            if i in pos:
                row[pos[i]] += 1
            else:
                rhs_shift -= fixed[i]
            if j in pos:
                row[pos[j]] -= 1
            else:
                rhs_shift += fixed[j]
            prob.add_row(row, "<=", dij + rhs_shift)
            prob.add_row([-c for c in row], "<=", dij - rhs_shift)
    sol = solve_lp(prob, exact=space.exact if exact is None else exact)
    if not sol.optimal:
        raise SolverError(f"extension LP returned {sol.status}")
    out = np.empty(n, dtype=object if is_exact(sol.x) else float)
    out[dom] = vals
    for k, i in enumerate(free):
        out[i] = sol.x[k]
    return out
