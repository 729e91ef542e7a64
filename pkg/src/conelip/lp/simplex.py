"""Dense two-phase simplex with Bland's anti-cycling rule.

Works on float arrays, or on object arrays of ``Fraction`` for exact
results on small problems. Problems are stated in a general form (rows with
``<=``, ``==`` or ``>=`` and per-variable bounds) and reduced internally to
``min c.y, A y = b, y >= 0``.
"""

import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .._validation import as_array, to_fraction
from ..exceptions import NumericalFailure, ValidationError

MAX_ITER = 10**6
EXACT_MAX_VARS = 50
REFRESH_EVERY = 50
PIVOT_TOL = 1e-9
FEAS_TOL = 1e-9
STALL_LIMIT = 50
RATIONAL_ENV = "CONELIP_RATIONAL"

_RELATIONS = {"<=": "<=", "le": "<=", "==": "==", "=": "==", "eq": "==", ">=": ">=", "ge": ">="}


def rational_mode_requested():
    return os.environ.get(RATIONAL_ENV, "").strip() not in ("", "0", "false", "no")


@dataclass
class LPProblem:
    """``sense`` ``c.x`` subject to ``rows`` and ``bounds``.

    ``bounds[j]`` is ``(lo, hi)`` with ``None`` for an infinite side; the
    default for every variable is ``(0, None)``.
    """

    c: list
    sense: str = "min"
    rows: list = field(default_factory=list)
    bounds: list | None = None

    @property
    def n_vars(self):
        return len(self.c)

    def add_row(self, coeffs, relation, rhs):
        rel = _RELATIONS.get(relation)
        if rel is None:
            raise ValidationError(f"unknown relation {relation!r}")
        if len(coeffs) != self.n_vars:
            raise ValidationError(
                f"row has {len(coeffs)} coefficients, problem has {self.n_vars} variables"
            )
        self.rows.append((coeffs, rel, rhs))
        return self

    def variable_bounds(self):
        if self.bounds is None:
            return [(0, None)] * self.n_vars
        if len(self.bounds) != self.n_vars:
            raise ValidationError("one (lo, hi) pair per variable is required")
        return list(self.bounds)


@dataclass
class LPSolution:
    status: str
    objective: object = None
    x: np.ndarray | None = None
    duals: np.ndarray | None = None
    dual_objective: object = None
    primal_residual: float = 0.0
    dual_residual: float = 0.0
    iterations: int = 0
    exact: bool = False

    @property
    def gap(self):
        if self.objective is None or self.dual_objective is None:
            return None
        diff = abs(self.objective - self.dual_objective)
        if self.exact:
            return diff
        return float(diff) / max(1.0, abs(float(self.objective)))

    @property
    def optimal(self):
        return self.status == "optimal"


class _Standard:
    """Map ``x = x0 + M y`` between user variables and y >= 0."""

    def __init__(self, problem, exact):
        self.exact = exact
        n = problem.n_vars
        conv = to_fraction if exact else float
        zero = Fraction(0) if exact else 0.0
        cols = []  # per y column: (user var, sign)
        x0 = [zero] * n
        extra_rows = []  # y_col <= ub
        for j, (lo, hi) in enumerate(problem.variable_bounds()):
            lo = None if lo is None or lo == -np.inf else conv(lo)
            hi = None if hi is None or hi == np.inf else conv(hi)
            if lo is not None and hi is not None and hi < lo:
                raise ValidationError(f"variable {j}: empty bound interval")
            if lo is not None:
                x0[j] = lo
                cols.append((j, 1))
                if hi is not None:
                    extra_rows.append((len(cols) - 1, hi - lo))
            elif hi is not None:
                x0[j] = hi
                cols.append((j, -1))
            else:
                cols.append((j, 1))
                cols.append((j, -1))
        self.n_user = n
        self.cols = cols
        self.x0 = as_array(x0, exact=exact)
        M = np.zeros((n, len(cols)), dtype=object if exact else float)
        if exact:
            M[:] = Fraction(0)
        for k, (j, s) in enumerate(cols):
            M[j, k] = conv(s)
        self.M = M
        self.extra_rows = extra_rows

    def to_user(self, y):
        return self.x0 + self.M @ y


def _pivot(T, r, j):
    T[r] = T[r] / T[r, j]
    col = T[:, j].copy()
    col[r] = 0
    nz = np.flatnonzero(col != 0)
    if len(nz):
        T[nz] -= np.outer(col[nz], T[r])


def _refactor(T, full, b, basis, cost):
    """Rebuild the float tableau from the original data and the basis."""
    m = T.shape[0] - 1
    B = full[:, basis]
    try:
        T[:m, :-1] = np.linalg.solve(B, full)
        T[:m, -1] = np.linalg.solve(B, b)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("singular basis") from exc
    cb = cost[basis]
    T[-1, :-1] = cost - cb @ T[:m, :-1]
    T[-1, -1] = -(cb @ T[:m, -1])
    # basic columns are unit vectors up to rounding; make them exact
    T[:m, basis] = np.eye(m)
    T[-1, basis] = 0.0


def _run_simplex(T, basis, allowed, eps, it0, refresh=None):
    """Minimise with the reduced-cost row T[-1].

    Exact mode uses Bland's rule throughout. Float mode prices by the most
    negative reduced cost, picks the leaving row with a two-pass (Harris)
    ratio test that prefers large pivots, falls back to Bland's rule after
    a run of degenerate pivots, and calls ``refresh`` to re-derive the
    tableau from the original data every ``REFRESH_EVERY`` pivots and
    before accepting a verdict.
    """
    m = T.shape[0] - 1
    it = it0
    allowed_idx = np.flatnonzero(allowed)
    fresh = False
    stall = 0
    while True:
        if it >= MAX_ITER:
            raise NumericalFailure(f"simplex iteration cap {MAX_ITER} reached")
        rc = T[-1, allowed_idx]
        cand = np.flatnonzero(rc < -eps)
        if not len(cand):
            if refresh is None or fresh:
                return "optimal", it
            refresh()
            fresh = True
            continue
        bland = not eps or stall > STALL_LIMIT
        k = cand[0] if bland else cand[np.argmin(rc[cand])]
        j = int(allowed_idx[k])
        colj = T[:m, j]
        rows = np.flatnonzero(colj > (PIVOT_TOL if eps else 0))
        if not len(rows):
            if refresh is None or fresh:
                return "unbounded", it
            refresh()
            fresh = True
            continue
        rhs = T[rows, -1]
        if not eps:
            ratios = rhs / colj[rows]
            tie = rows[ratios == ratios.min()]
            r = int(min(tie, key=lambda i: basis[i]))
        elif bland:
            ratios = np.maximum(rhs, 0) / colj[rows]
            best = ratios.min()
            tie = rows[ratios <= best + eps * max(1.0, best)]
            r = int(min(tie, key=lambda i: basis[i]))
        else:
            bound = ((np.maximum(rhs, 0) + FEAS_TOL) / colj[rows]).min()
            ok = rows[np.maximum(rhs, 0) / colj[rows] <= bound]
            r = int(ok[np.argmax(colj[ok])])
        step = max(float(T[r, -1]), 0.0) / float(colj[r]) if eps else T[r, -1]
        _pivot(T, r, j)
        basis[r] = j
        it += 1
        fresh = False
        stall = stall + 1 if eps and step * float(-rc[k]) <= eps else 0
        if refresh is not None and (it - it0) % REFRESH_EVERY == 0:
            refresh()
            fresh = True


def _want_exact(problem, exact):
    if exact is None:
        return rational_mode_requested() and problem.n_vars <= EXACT_MAX_VARS
    return bool(exact)


def solve_lp(problem, exact=None, eps=1e-10):
    """Solve ``problem``; returns an :class:`LPSolution`.

    ``exact=None`` defers to the ``CONELIP_RATIONAL`` environment variable
    (honoured for problems with at most 50 variables).
    """
    exact = _want_exact(problem, exact)
    if exact:
        eps = 0
    conv = to_fraction if exact else float
    std = _Standard(problem, exact)
    n_y = len(std.cols)

    # rows in y-space
    A_rows, rels, rhs = [], [], []
    for coeffs, rel, b in problem.rows:
        a = as_array(coeffs, exact=exact)
        A_rows.append(a @ std.M)
        rels.append(rel)
        rhs.append(conv(b) - a @ std.x0)
    n_user_rows = len(A_rows)
    for k, ub in std.extra_rows:
        a = np.zeros(n_y, dtype=object if exact else float)
        if exact:
            a[:] = Fraction(0)
        a[k] = conv(1)
        A_rows.append(a)
        rels.append("<=")
        rhs.append(ub)
    m = len(A_rows)

    c_user = as_array(problem.c, exact=exact)
    if problem.sense not in ("min", "max"):
        raise ValidationError(f"sense must be 'min' or 'max', got {problem.sense!r}")
    flip_obj = problem.sense == "max"
    c_y = c_user @ std.M
    if flip_obj:
        c_y = -c_y
    const = c_user @ std.x0

    n_slack = sum(1 for r in rels if r != "==")
    n_cols = n_y + n_slack + m
    dtype = object if exact else float
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0

    A = np.full((m, n_y + n_slack), zero, dtype=dtype)
    b = np.array(rhs, dtype=dtype) if m else np.zeros(0, dtype=dtype)
    s = n_y
    for i, (a, rel) in enumerate(zip(A_rows, rels)):
        A[i, :n_y] = a
        if rel == "<=":
            A[i, s] = one
            s += 1
        elif rel == ">=":
            A[i, s] = -one
            s += 1
    row_sign = np.array([-1 if bi < 0 else 1 for bi in b], dtype=dtype)
    if m:
        A = A * row_sign[:, None]
        b = b * row_sign

    art0 = n_y + n_slack
    T = np.full((m + 1, n_cols + 1), zero, dtype=dtype)
    T[:m, :art0] = A
    for i in range(m):
        T[i, art0 + i] = one
    T[:m, -1] = b
    basis = [art0 + i for i in range(m)]

    # phase I: minimise the sum of artificials
    T[-1, :art0] = -A.sum(axis=0) if m else T[-1, :art0]
    T[-1, -1] = -b.sum() if m else zero
    allowed = np.zeros(n_cols, dtype=bool)
    allowed[:art0] = True
    full = np.concatenate([A, _eye_exact(m) if exact else np.eye(m)], axis=1)
    cost1 = np.zeros(n_cols)
    cost1[art0:] = 1.0
    refresh = None if exact or not m else (lambda: _refactor(T, full, b, basis, cost1))
    _, it = _run_simplex(T, basis, allowed, eps, 0, refresh)
    scale = max([1.0] + [abs(float(v)) for v in b])
    if -T[-1, -1] > (0 if exact else 1e-9 * scale):
        return LPSolution(status="infeasible", iterations=it, exact=exact)

    # drive artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= art0:
            row = T[i, :art0]
            nz = np.flatnonzero(np.abs(row) > eps) if not exact else np.flatnonzero(row != 0)
            if len(nz):
                _pivot(T, i, int(nz[0]))
                basis[i] = int(nz[0])

    # phase II
    c_full = np.full(n_cols, zero, dtype=dtype)
    c_full[:n_y] = c_y
    T[-1, :] = zero
    T[-1, :n_cols] = c_full
    for i in range(m):
        cb = c_full[basis[i]]
        if cb != 0:
            T[-1] -= cb * T[i]
    refresh = None if exact or not m else (lambda: _refactor(T, full, b, basis, c_full))
    status, it = _run_simplex(T, basis, allowed, eps, it, refresh)
    if status == "unbounded":
        return LPSolution(status="unbounded", iterations=it, exact=exact)

    # recover primal and dual from the final basis
    if exact:
        xb = T[:m, -1]
        y = -T[-1, art0:art0 + m] if m else np.zeros(0, dtype=object)
    else:
        B = full[:, basis]
        try:
            xb = np.linalg.solve(B, b)
            y = np.linalg.solve(B.T, c_full[basis])
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure("singular final basis") from exc
    z = np.full(n_cols, zero, dtype=dtype)
    for i, bi in enumerate(basis):
        z[bi] = xb[i]
    y_vars = z[:n_y]
    x = std.to_user(y_vars)

    obj = c_user @ x
    dual_obj = (b @ y if m else zero)
    dual_obj = (-dual_obj if flip_obj else dual_obj) + const

    # certificates measured against the original data
    prim_res = 0.0
    for coeffs, rel, rhs_i in problem.rows:
        lhs = as_array(coeffs, exact=exact) @ x
        r = lhs - conv(rhs_i)
        viol = max(r, 0) if rel == "<=" else (max(-r, 0) if rel == ">=" else abs(r))
        prim_res = max(prim_res, float(viol))
    for j, (lo, hi) in enumerate(problem.variable_bounds()):
        if lo is not None and lo != -np.inf:
            prim_res = max(prim_res, float(conv(lo) - x[j]))
        if hi is not None and hi != np.inf:
            prim_res = max(prim_res, float(x[j] - conv(hi)))
    reduced = c_full[:art0] - (full[:, :art0].T @ y if m else 0)
    dual_res = float(max(0, -min(reduced))) if len(reduced) else 0.0

    user_duals = y[:n_user_rows] * row_sign[:n_user_rows] if m else y
    if flip_obj:
        user_duals = -user_duals
    if not exact:
        obj, dual_obj = float(obj), float(dual_obj)
    return LPSolution(
        status="optimal",
        objective=obj,
        x=x,
        duals=user_duals,
        dual_objective=dual_obj,
        primal_residual=prim_res,
        dual_residual=dual_res,
        iterations=it,
        exact=exact,
    )


def _eye_exact(m):
    e = np.full((m, m), Fraction(0), dtype=object)
    for i in range(m):
        e[i, i] = Fraction(1)
    return e
