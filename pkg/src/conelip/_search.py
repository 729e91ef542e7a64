"""Batched one-dimensional maximisation.

Every routine here works on a batch of ``P`` independent problems at once.
The generic maximiser evaluates a 1025-point grid and refines the best cell
by ternary search; the objective is not assumed unimodal, so the grid comes
first. The problem-specific helpers evaluate closed-form candidates first
(breakpoints of polyhedral norms, stationary points for l2), which contain
the maximiser for these objectives. The grid is still evaluated for every
problem as a guard, and the ternary refinement runs only where a grid
sample beats the best candidate.
"""

import numpy as np

GRID = 1025
WIDTH = 1e-12
# r = s / (1 - s); keeps r below ~1e6 so rounding stays below 1e-10
S_MAX = 1.0 - 2.0**-20
# grid values may beat an exact candidate by rounding alone
CANDIDATE_SLACK = 1e-12


def grid_ternary_max(fun, n_problems, lo=0.0, hi=1.0, grid=GRID, width=WIDTH):
    """Maximise ``fun`` on ``[lo, hi]`` for each of ``n_problems`` rows.

    ``fun`` maps a ``(P, K)`` array of abscissae to ``(P, K)`` values.
    Returns ``(argmax, max)``, each of shape ``(P,)``.
    """
    t = np.linspace(lo, hi, grid)
    vals = fun(np.broadcast_to(t, (n_problems, grid)))
    rows = np.arange(n_problems)
    k = np.argmax(vals, axis=1)
    best_t, best_v = t[k], vals[rows, k]
    left = t[np.maximum(k - 1, 0)]
    right = t[np.minimum(k + 1, grid - 1)]
    while n_problems and np.max(right - left) > width:
        third = (right - left) / 3.0
        m1, m2 = left + third, right - third
        f = fun(np.stack([m1, m2], axis=1))
        up = f[:, 0] < f[:, 1]
        left = np.where(up, m1, left)
        right = np.where(up, right, m2)
    mid = 0.5 * (left + right)
    vm = fun(mid[:, None])[:, 0] if n_problems else np.zeros(0)
    better = vm > best_v
    return np.where(better, mid, best_t), np.where(better, vm, best_v)


def guarded_max(fun, n_problems, v_cand, lo=0.0, hi=1.0, grid=GRID, width=WIDTH):
    """Grid-check candidate maxima ``v_cand`` and refine where they lose.

    ``fun(t, idx)`` evaluates the rows ``idx`` at abscissae ``t``. Returns
    ``(argmax, max, refined)``; ``argmax`` is NaN where the candidate value
    stands and ``refined`` marks the rows that needed the ternary stage.
    """
    t = np.linspace(lo, hi, grid)
    vals = fun(np.broadcast_to(t, (n_problems, grid)), slice(None))
    v_grid = vals.max(axis=1)
    refined = v_grid > v_cand + CANDIDATE_SLACK * np.maximum(1.0, np.abs(v_cand))
    t_out = np.full(n_problems, np.nan)
    v_out = np.array(v_cand, dtype=float)
    idx = np.flatnonzero(refined)
    if len(idx):
        t_r, v_r = grid_ternary_max(lambda x: fun(x, idx), len(idx), lo, hi, grid, width)
        t_out[idx], v_out[idx] = t_r, v_r
    return t_out, v_out, refined


def _norm(x, tag):
    if tag == "l1":
        return np.abs(x).sum(axis=-1)
    if tag == "linf":
        return np.abs(x).max(axis=-1)
    return np.sqrt((x * x).sum(axis=-1))


def _segment_norm(U, V, t, tag):
    """``||(1 - t) u - t v||`` for ``t`` of shape ``(P, K)``."""
    p = U[:, None, :] * (1.0 - t)[..., None] - V[:, None, :] * t[..., None]
    return _norm(p, tag)


def _pair_ratio(U, V, a, b, t, tag):
    num = np.abs(a[:, None] * (1.0 - t) - b[:, None] * t)
    return num / _segment_norm(U, V, t, tag)


def _polyhedral_breaks(P0, D, tag):
    """Abscissae where ``||P0 - s D||`` changes slope (any sign of s)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        cands = [P0 / D]
        if tag == "linf":
            d = P0.shape[1]
            for k in range(d):
                for l in range(k + 1, d):
                    for sgn in (1.0, -1.0):
                        cands.append(
                            ((P0[:, k] - sgn * P0[:, l]) / (D[:, k] - sgn * D[:, l]))[:, None]
                        )
    out = np.concatenate(cands, axis=1)
    return np.where(np.isfinite(out), out, np.nan)


def pair_ratio_max(U, V, a, b, tag):
    """Batched ``sup_{t in [0,1]} |(1-t)a - tb| / ||(1-t)u - tv||``.

    ``U, V`` are ``(P, d)`` unit vectors, ``a, b`` are ``(P,)``. Returns
    ``(t_star, value)``.
    """
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    P = len(a)
    if P == 0:
        return np.zeros(0), np.zeros(0)
    cands = [np.zeros((P, 1)), np.ones((P, 1))]
    S = U + V
    if tag == "l2":
        A = (S * S).sum(axis=1)
        B = -2.0 * (U * S).sum(axis=1)
        alpha, beta = a, -(a + b)
        with np.errstate(divide="ignore", invalid="ignore"):
            ts = (alpha * B - 2.0 * beta) / (beta * B - 2.0 * A * alpha)
        cands.append(ts[:, None])
    else:
        cands.append(_polyhedral_breaks(U, S, tag))
    C = np.concatenate(cands, axis=1)
    C = np.where((C >= 0.0) & (C <= 1.0), C, 0.0)
    vals = _pair_ratio(U, V, a, b, C, tag)
    k = np.argmax(vals, axis=1)
    t_c = C[np.arange(P), k]
    v_c = vals[np.arange(P), k]

    def fun(t, idx):
        return _pair_ratio(U[idx], V[idx], a[idx], b[idx], t, tag)

    t_g, v_g, refined = guarded_max(fun, P, v_c)
    return np.where(refined, t_g, t_c), v_g


def _ray_objective(u, W, a, L, r, tag):
    """``r a - L ||u - r w||`` for ``r`` of shape ``(P, K)``; stable for large r."""
    if tag == "l2":
        c = W @ u
        q = u[None, None, :] - r[..., None] * W[:, None, :]
        nq = _norm(q, tag)
        gain = (2.0 * r * c[:, None] - 1.0) / (r + nq)
        return r * (a - L)[:, None] + L * gain
    # polyhedral norms, coordinatewise: r |w_k| - |u_k - r w_k| rewritten
    # as a quotient so nothing of size r cancels
    rw = r[..., None] * W[:, None, :]
    q = np.abs(u[None, None, :] - rw)
    den = np.abs(rw) + q
    with np.errstate(invalid="ignore", divide="ignore"):
        part = np.where(den > 0, (2.0 * rw * u - u * u) / np.where(den > 0, den, 1.0), 0.0)
    if tag == "l1":
        gain = part.sum(axis=-1)
    else:
        gain = (r[..., None] * (1.0 - np.abs(W))[:, None, :] + part).min(axis=-1)
    return r * (a - L)[:, None] + L * gain


def _norm_slope(u, W, tag):
    """``lim_{r -> inf} (r - ||u - r w||)`` for each row w of ``W``."""
    if tag == "l2":
        return W @ u
    if tag == "l1":
        nz = W != 0
        return np.where(nz, np.sign(W) * u, -np.abs(u)).sum(axis=1)
    m = np.abs(W).max(axis=1, keepdims=True)
    active = np.abs(W) >= m
    vals = np.where(active, np.sign(W) * u, np.inf)
    return vals.min(axis=1)


def ray_sup(u, W, a, L, tag):
    """``sup_{r >= 0} (r a_k - L ||u - r w_k||)`` for each row ``w_k`` of ``W``.

    ``|a_k| <= L`` is assumed, which makes each objective concave in r.
    """
    u = np.asarray(u, dtype=float)
    W = np.asarray(W, dtype=float)
    a = np.asarray(a, dtype=float)
    P = len(a)
    if L == 0:
        return np.zeros(P)

    cands = [np.zeros((P, 1))]
    if tag == "l2":
        c = W @ u
        sn = np.sqrt(np.maximum(0.0, 1.0 - c * c))
        k = a / L
        with np.errstate(divide="ignore", invalid="ignore"):
            rs = c + k * sn / np.sqrt(1.0 - k * k)
        cands.append(np.where(np.abs(k) < 1.0, rs, 0.0)[:, None])
    else:
        cands.append(_polyhedral_breaks(np.broadcast_to(u, W.shape), W, tag))
    C = np.concatenate(cands, axis=1)
    C = np.where(np.isfinite(C) & (C >= 0.0), C, 0.0)
    v_c = _ray_objective(u, W, a, L, C, tag).max(axis=1)
    # a_k == L: the objective increases to its limit as r -> infinity
    at_limit = a >= L
    if np.any(at_limit):
        v_c = np.where(at_limit, np.maximum(v_c, L * _norm_slope(u, W, tag)), v_c)

    def in_s(s, idx):
        return _ray_objective(u, W[idx], a[idx], L, s / (1.0 - s), tag)

    _, best, _ = guarded_max(in_s, P, v_c, 0.0, S_MAX)
    return best
