"""Free-space norms, quotient distances and their duals.

The Kantorovich-Rubinstein norm of a finitely supported element is computed
two independent ways (an LP over 1-Lipschitz test functions, and a
min-cost transport), and the norm of positively homogeneous elements by a
cutting-plane method over the semi-infinite family of cone constraints.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _search
from ._validation import as_array, is_exact, to_fraction, vector_norm
from .cone import UNIT_TOL, RaySystem
from .elements import DIRECTION_TOL, FreeElement, PHFreeElement
from .exceptions import (
    DependentGenerators,
    MatrixSpaceUnsupported,
    NoConvergence,
    NonUnitSupport,
    NotScalingClosed,
    NumericalFailure,
    SolverError,
    ValidationError,
)
from .lp import FlowNetwork, LPProblem, min_cost_flow, rational_mode_requested, solve_lp
from .metric import check_field, from_points

RESIDUAL_LIMIT = 1e-7
STALL_VIOLATION = 1e-7

KR_AGREEMENT_TOL = 1e-9


def _exact(exact):
    return rational_mode_requested() if exact is None else bool(exact)


def _check_support(space, mu):
    if mu.indices and max(mu.indices) >= space.n_points:
        raise ValidationError(f"element references point {max(mu.indices)} of {space.n_points}")


def _solve(problem, exact):
    sol = solve_lp(problem, exact=exact)
    if not sol.optimal:
        raise SolverError(f"LP returned status {sol.status}")
    if sol.primal_residual > RESIDUAL_LIMIT or sol.dual_residual > RESIDUAL_LIMIT:
        raise NumericalFailure(
            f"LP certificate residuals {sol.primal_residual:.3g}/{sol.dual_residual:.3g} exceed {RESIDUAL_LIMIT}"
        )
    return sol


def eval_pairing(space, f, mu):
    """``mu(f) = sum a_i f(x_i)``."""
    f = check_field(space, f)
    _check_support(space, mu)
    total = 0
    for i, a in mu.terms():
        total = total + a * f[i]
    return total


def barycenter(space, mu):
    """``sum a_i x_i`` for an embedded space."""
    if space.points is None:
        raise MatrixSpaceUnsupported("barycenter needs an embedded space")
    _check_support(space, mu)
    out = np.zeros(space.dim, dtype=space.points.dtype)
    for i, a in mu.terms():
        out = out + a * space.points[i]
    return out


def kr_lp_problem(space, mu):
    """The LP ``max sum a_i f(x_i)`` over 1-Lipschitz ``f`` with ``f(0) = 0``.

    Only the support and the basepoint enter: a 1-Lipschitz function on
    that subset extends to the whole space without raising its constant.
    Variables are the values of f on ``mu.indices``.
    """
    _check_support(space, mu)
    S = list(mu.indices)
    d = space.dist
    k = len(S)
    prob = LPProblem(list(mu.coefs), "max", bounds=[(None, None)] * k)
    for p in range(k):
        row = [0] * k
        row[p] = 1
        prob.add_row(row, "<=", d[S[p], 0])
        prob.add_row([-c for c in row], "<=", d[S[p], 0])
        for q in range(k):
            if q != p:
                row = [0] * k
                row[p], row[q] = 1, -1
                prob.add_row(row, "<=", d[S[p], S[q]])
    return prob


def kr_norm_lp(space, mu, exact=None):
    """LP route to the free-space norm: ``(value, witness)`` with the
    optimal test function on the support as witness."""
    exact = _exact(exact)
    if not len(mu):
        _check_support(space, mu)
        return (Fraction(0) if exact else 0.0), np.zeros(0)
    sol = _solve(kr_lp_problem(space, mu), exact)
    return sol.objective, sol.x


def kr_norm_flow(space, mu):
    """Minimum cost of transporting ``mu`` to the basepoint."""
    _check_support(space, mu)
    S = list(mu.indices)
    if not S:
        return 0.0, None
    nodes = [0] + S
    div = [-float(sum(mu.coefs))] + [float(a) for a in mu.coefs]
    cost = np.asarray(space.dist, dtype=float)[np.ix_(nodes, nodes)]
    res = min_cost_flow(FlowNetwork.complete(div, cost))
    return res.cost, res


def kr_norm(space, mu, method="lp", exact=None):
    """Free-space (Kantorovich-Rubinstein) norm of ``mu``.

    ``method`` is ``"lp"``, ``"flow"`` or ``"both"``; ``"both"`` raises
    :class:`NumericalFailure` if the routes disagree by more than 1e-9.
    """
    if method == "lp":
        return kr_norm_lp(space, mu, exact)[0]
    if method == "flow":
        return kr_norm_flow(space, mu)[0]
    if method == "both":
        v_lp = kr_norm_lp(space, mu, exact)[0]
        v_fl = kr_norm_flow(space, mu)[0]
        if abs(float(v_lp) - v_fl) > KR_AGREEMENT_TOL * max(1.0, abs(v_fl)):
            raise NumericalFailure(f"LP value {v_lp} and flow value {v_fl} disagree")
        return v_lp
    raise ValidationError(f"unknown method {method!r}")


def _rank_exact(rows):
    M = [list(r) for r in rows]
    rank, col = 0, 0
    n_cols = len(M[0]) if M else 0
    while rank < len(M) and col < n_cols:
        piv = next((i for i in range(rank, len(M)) if M[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for i in range(rank + 1, len(M)):
            fct = M[i][col] / M[rank][col]
            M[i] = [x - fct * y for x, y in zip(M[i], M[rank])]
        rank += 1
        col += 1
    return rank


def _prepare_quotient(space, g, gens, exact):
    exact = _exact(exact)
    g = check_field(space, g, exact=exact)
    G = [check_field(space, h, exact=exact) for h in gens]
    if G:
        rank = _rank_exact(G) if exact else np.linalg.matrix_rank(np.array(G, dtype=float))
        if rank < len(G):
            raise DependentGenerators(f"{len(G)} generators span only rank {rank}")
    d = space.dist
    if exact and not is_exact(d):
        d = np.vectorize(to_fraction, otypes=[object])(d)
    return exact, g, G, d


def quotient_dist_primal(space, g, gens, exact=None):
    """``min_c Lip(g - sum c_k gens_k)`` as one LP in ``(c, L)``.

    Returns ``(distance, c)``.
    """
    exact, g, G, d = _prepare_quotient(space, g, gens, exact)
    n, k = space.n_points, len(G)
    prob = LPProblem([0] * k + [1], "min", bounds=[(None, None)] * k + [(0, None)])
    for i in range(n):
        for j in range(i + 1, n):
            dg = g[i] - g[j]
            df = [h[i] - h[j] for h in G]
            for s in (1, -1):
                prob.add_row([-s * x for x in df] + [-d[i, j]], "<=", -s * dg)
    sol = _solve(prob, exact)
    return sol.objective, sol.x[:k]


def _flow_block(n, d):
    """Arc list and their costs for the complete graph on ``n`` nodes."""
    arcs = [(i, j) for i in range(n) for j in range(n) if i != j]
    return arcs, [d[i, j] for i, j in arcs]


def _kr_ball_lp(objective_mu, n_mu_vars, mu_of, n, d, extra_rows=()):
    """LP ``max objective . c`` with ``||mu(c)||_KR <= 1`` via explicit flows.

    ``mu_of[i]`` lists ``(var, coef)`` so that ``mu_i = sum coef * c_var``.
    """
    arcs, costs = _flow_block(n, d)
    nv = n_mu_vars + len(arcs)
    prob = LPProblem(
        list(objective_mu) + [0] * len(arcs),
        "max",
        bounds=[(None, None)] * n_mu_vars + [(0, None)] * len(arcs),
    )
    for i in range(1, n):
        row = [0] * nv
        for var, coef in mu_of[i]:
            row[var] -= coef
        for e, (a, b) in enumerate(arcs):
            if a == i:
                row[n_mu_vars + e] += 1
            elif b == i:
                row[n_mu_vars + e] -= 1
        prob.add_row(row, "==", 0)
    prob.add_row([0] * n_mu_vars + list(costs), "<=", 1)
    for coeffs, rel, rhs in extra_rows:
        prob.add_row(list(coeffs) + [0] * len(arcs), rel, rhs)
    return prob


def quotient_dist_dual(space, g, gens, exact=None):
    """``sup mu(g)`` over ``||mu|| <= 1`` annihilated by every generator.

    Returns ``(value, mu)``; by LP duality the value equals
    :func:`quotient_dist_primal`.
    """
    exact, g, G, d = _prepare_quotient(space, g, gens, exact)
    n = space.n_points
    nm = n - 1  # a_1 .. a_{n-1}
    mu_of = [[]] + [[(i - 1, 1)] for i in range(1, n)]
    extra = [([h[i] for i in range(1, n)], "==", 0) for h in G]
    prob = _kr_ball_lp([g[i] for i in range(1, n)], nm, mu_of, n, d, extra)
    sol = _solve(prob, exact)
    a = sol.x[:nm]
    if not exact:
        a = np.where(np.abs(a) < 1e-13, 0.0, a)
    mu = FreeElement.from_terms((i + 1, a[i]) for i in range(nm))
    return sol.objective, mu


@dataclass
class PHNormResult:
    """Cutting-plane outcome.

    ``value`` is the optimum of the final relaxation, an upper bound on the
    norm; ``witness / (1 + violation)`` is feasible, so
    ``value / (1 + violation)`` is a lower bound.
    """

    value: float
    violation: float
    rounds: int
    directions: np.ndarray
    weights: np.ndarray
    witness: np.ndarray
    n_cuts: int = 0
    cuts: list = field(default_factory=list, repr=False)

    @property
    def lower_bound(self):
        return self.value / (1.0 + max(0.0, self.violation))


def ph_norm_result(mu, tol=1e-9, max_rounds=500):
    """Norm of ``mu`` in the ph free space, by cutting planes.

    Maximises ``sum w_u f(u)`` over ph functions with cone constant at most
    1, where ``w`` is the reduced form of ``mu``. Starts from the cuts at
    ``t in {0, 1/2, 1}`` for every pair of directions and adds, per round,
    the most violated cut per pair until the cone constant of the LP
    solution is within ``1 + tol``.
    """
    dirs, w = mu.reduced()
    dirs = np.asarray(dirs, dtype=float)
    w = np.asarray(w, dtype=float)
    k = len(w)
    if k == 0:
        return PHNormResult(0.0, 0.0, 0, dirs, w, np.zeros(0))
    if k == 1:
        v = np.array([np.sign(w[0])])
        return PHNormResult(float(abs(w[0])), 0.0, 0, dirs, w, v)
    norm = mu.norm
    iu, ju = np.triu_indices(k, 1)

    def seg(p, t):
        return float(vector_norm((1 - t) * dirs[iu[p]] - t * dirs[ju[p]], norm))

    cuts = [(p, t, s) for p in range(len(iu)) for t in (0.0, 0.5, 1.0) for s in (1, -1)]
    seen = {(p, t, s) for p, t, s in cuts}
    for rnd in range(1, max_rounds + 1):
        prob = LPProblem(list(w), "max", bounds=[(-1.0, 1.0)] * k)
        for p, t, s in cuts:
            row = [0.0] * k
            row[iu[p]] += s * (1 - t)
            row[ju[p]] -= s * t
            prob.add_row(row, "<=", seg(p, t))
        sol = _solve(prob, False)
        v = sol.x
        t_star, ratio = _search.pair_ratio_max(dirs[iu], dirs[ju], v[iu], v[ju], norm)
        viol = max(0.0, float(np.max(ratio)) - 1.0, float(np.max(np.abs(v))) - 1.0)
        if viol <= tol:
            return PHNormResult(float(sol.objective), viol, rnd, dirs, w, v, len(cuts), cuts)
        added = 0
        for p in np.flatnonzero(ratio > 1.0 + tol):
            t = float(t_star[p])
            s = 1 if (1 - t) * v[iu[p]] - t * v[ju[p]] >= 0 else -1
            if (int(p), t, s) not in seen:
                seen.add((int(p), t, s))
                cuts.append((int(p), t, s))
                added += 1
        if not added:
            # the LP point sits on existing cuts up to the LP feasibility
            # tolerance; report it with its measured violation
            if viol <= STALL_VIOLATION:
                return PHNormResult(float(sol.objective), viol, rnd, dirs, w, v, len(cuts), cuts)
            raise NoConvergence(f"no new cut separates the LP point (violation {viol:.3g})")
    raise NoConvergence(f"cutting planes did not reach violation {tol} in {max_rounds} rounds")


def ph_norm(mu, tol=1e-9, max_rounds=500):
    return ph_norm_result(mu, tol, max_rounds).value


def _is_sphere_space(space):
    if space.points is None:
        raise MatrixSpaceUnsupported("a sphere space must be embedded")
    if np.any(space.points[0] != 0):
        raise ValidationError("the basepoint of a sphere space must be the origin")


def theta(space, mu):
    """Send ``sum a_i delta_{x_i}`` on a sphere space to ``sum a_i delta^ph_{x_i}``."""
    _is_sphere_space(space)
    _check_support(space, mu)
    pts = space.points[list(mu.indices)] if len(mu) else np.zeros((0, space.dim))
    if len(mu):
        lengths = np.asarray(vector_norm(pts, space.norm, axis=1), dtype=float)
        if np.any(np.abs(lengths - 1.0) > UNIT_TOL):
            raise NonUnitSupport("every support point must lie on the unit sphere")
    return PHFreeElement(pts, np.array(mu.coefs, dtype=object if space.exact else float), space.norm)


def phi(mu, space=None):
    """Inverse of :func:`theta` on data: returns ``(sphere_space, element)``.

    Without ``space`` the sphere space ``{0} u supp(mu)`` is built, ordered
    by first appearance.
    """
    pts = np.asarray(mu.points)
    if len(pts):
        lengths = np.asarray(vector_norm(pts, mu.norm, axis=1), dtype=float)
        if np.any(np.abs(lengths - 1.0) > UNIT_TOL):
            raise NonUnitSupport("every support point must lie on the unit sphere")
    if space is None:
        uniq = []
        for x in pts:
            if not any(float(vector_norm(np.asarray(x - y, dtype=float), mu.norm)) <= DIRECTION_TOL for y in uniq):
                uniq.append(x)
        dim = mu.dim
        space = from_points(
            np.vstack([np.zeros((1, dim), dtype=pts.dtype)] + [u[None] for u in uniq]) if uniq else np.zeros((1, dim)),
            mu.norm,
            exact=mu.exact,
        )
    else:
        _is_sphere_space(space)
    terms = []
    cand = np.asarray(space.points[1:], dtype=float)
    for x, a in mu.terms():
        gaps = np.asarray(vector_norm(cand - np.asarray(x, dtype=float), mu.norm, axis=1))
        i = int(np.argmin(gaps)) if len(gaps) else -1
        if i < 0 or gaps[i] > DIRECTION_TOL:
            raise NonUnitSupport(f"point {np.asarray(x).tolist()} is not in the sphere space")
        terms.append((i + 1, a))
    return space, FreeElement.from_terms(terms)


def q_functional(space, mu):
    """Total mass ``sum a_i``."""
    _check_support(space, mu)
    return sum(mu.coefs, 0 * space.dist[0, 0])


def _check_scalings(space, scalings, exact):
    if space.points is None:
        raise MatrixSpaceUnsupported("scaling relations need an embedded space")
    n = space.n_points
    out = []
    for i, j, r in scalings:
        i, j = int(i), int(j)
        if not (0 <= i < n and 0 <= j < n):
            raise NotScalingClosed(f"scaling ({i},{j}) references a missing point")
        r = to_fraction(r) if exact else float(r)
        if r < 0:
            raise NotScalingClosed("scaling factors must be nonnegative")
        gap = vector_norm(np.asarray(space.points[j] - r * space.points[i], dtype=float), space.norm)
        if float(gap) > 1e-12 * max(1.0, float(vector_norm(np.asarray(space.points[j], dtype=float), space.norm))):
            raise NotScalingClosed(f"point {j} is not {r} times point {i}")
        out.append((i, j, r))
    return out


def ph_quotient_check(space, g, scalings, exact=None, with_witness=False):
    """Distance from ``g`` to the fields obeying the declared scalings, twice.

    ``scalings`` lists ``(i, j, r)`` with ``points[j] = r * points[i]``.
    ``primal = min_h Lip(g - h)`` over fields with ``h(j) = r h(i)``;
    ``dual = sup mu(g)`` over ``||mu|| <= 1`` in the span of
    ``r delta_i - delta_j``. Returns ``(primal, dual)``, or with
    ``with_witness`` also ``h`` and the generator coefficients.
    """
    exact = _exact(exact)
    g = check_field(space, g, exact=exact)
    sc = _check_scalings(space, scalings, exact)
    d = space.dist
    if exact and not is_exact(d):
        d = np.vectorize(to_fraction, otypes=[object])(d)
    n = space.n_points
    nh = n - 1

    # primal: variables h_1..h_{n-1}, L
    prob = LPProblem([0] * nh + [1], "min", bounds=[(None, None)] * nh + [(0, None)])
    for i in range(n):
        for j in range(i + 1, n):
            dg = g[i] - g[j]
            for s in (1, -1):
                row = [0] * (nh + 1)
                if i:
                    row[i - 1] -= s
                if j:
                    row[j - 1] += s
                row[nh] = -d[i, j]
                prob.add_row(row, "<=", -s * dg)
    for i, j, r in sc:
        row = [0] * (nh + 1)
        if j:
            row[j - 1] += 1
        if i:
            row[i - 1] -= r
        if any(c != 0 for c in row):
            prob.add_row(row, "==", 0)
    psol = _solve(prob, exact)

    # dual: mu = sum_p c_p (r_p delta_{i_p} - delta_{j_p})
    mu_of = [[] for _ in range(n)]
    obj = []
    for p, (i, j, r) in enumerate(sc):
        mu_of[i].append((p, r))
        mu_of[j].append((p, -1))
        obj.append(r * g[i] - g[j])
    if sc:
        dsol = _solve(_kr_ball_lp(obj, len(sc), mu_of, n, d), exact)
        dual, coeffs = dsol.objective, dsol.x[: len(sc)]
    else:
        dual, coeffs = (Fraction(0) if exact else 0.0), np.zeros(0)
    if with_witness:
        h = np.concatenate([[0], psol.x[:nh]])
        return psol.objective, dual, h, coeffs
    return psol.objective, dual
