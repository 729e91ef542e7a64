from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from conelip import (
    FreeElement,
    PHFreeElement,
    RaySystem,
    cone_lip,
    barycenter,
    eval_pairing,
    from_matrix,
    from_points,
    kr_norm,
    lip_const,
    ph_norm,
    ph_norm_result,
    ph_quotient_check,
    phi,
    q_functional,
    quotient_dist_dual,
    quotient_dist_primal,
    theta,
)
from conelip.exceptions import NonUnitSupport, NotScalingClosed, NumericalFailure
from conelip.free import kr_lp_problem, kr_norm_flow
from conelip.generators import delta_pair, random_free_element, random_generators, random_space, random_vector
from conelip.lp import solve_lp
from conelip.rng import SplitMix64


def _ord(norm):
    return {"l1": 1, "l2": 2, "linf": np.inf}[norm]


def dense_ph_norm(mu, grid=4096):
    """Independent lower bound: the same LP with cuts at every t = k / grid."""
    dirs, w = mu.reduced()
    dirs, w = np.asarray(dirs, float), np.asarray(w, float)
    k = len(w)
    t = np.arange(grid + 1) / grid
    A, b = [], []
    for i in range(k):
        for j in range(i + 1, k):
            seg = np.linalg.norm(np.outer(1 - t, dirs[i]) - np.outer(t, dirs[j]), ord=_ord(mu.norm), axis=1)
            for s in (1, -1):
                rows = np.zeros((len(t), k))
                rows[:, i] = s * (1 - t)
                rows[:, j] = -s * t
                A.append(rows)
                b.append(seg)
    res = linprog(-w, A_ub=np.vstack(A), b_ub=np.concatenate(b), bounds=[(-1, 1)] * k, method="highs")
    return -res.fun


def test_pairing_and_barycenter():
    sp = from_points([[0.0], [1.0], [2.0]], "l2")
    f = [0.0, -1.0, 0.0]
    assert eval_pairing(sp, f, FreeElement.from_terms([(1, 2.0), (2, -1.0)])) == -2
    assert eval_pairing(sp, f, FreeElement.delta(1)) == -1
    plane = from_points([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0]], "l2")
    assert list(barycenter(plane, FreeElement.from_terms([(1, 1.0), (2, 1.0)]))) == [0, 0]


def test_kr_examples():
    sp = from_points([[0.0], [1.0], [3.0]], "l2")
    mu = FreeElement.from_terms([(1, 1.0), (2, 1.0)])
    assert kr_norm(sp, mu) == pytest.approx(4)
    assert kr_norm(sp, mu, method="flow") == pytest.approx(4)
    m = from_matrix([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    assert kr_norm(m, FreeElement.from_terms([(1, 2.0), (2, -1.0)]), method="both") == pytest.approx(2)
    assert kr_norm(sp, FreeElement.from_terms([(1, 1.0), (2, -1.0)])) == pytest.approx(2)


def test_kr_exact():
    sp = from_points([[0], [1], [3]], "l1", exact=True)
    v = kr_norm(sp, FreeElement.from_terms([(1, Fraction(1, 3)), (2, Fraction(1))]), exact=True)
    assert v == Fraction(10, 3)


def test_kr_routes_agree(rng):
    for _ in range(40):
        sp = random_space(rng, 2, 8)
        mu = random_free_element(rng, sp.n_points)
        sol = solve_lp(kr_lp_problem(sp, mu))
        assert sol.objective == pytest.approx(kr_norm_flow(sp, mu)[0], abs=1e-9)
        assert sol.gap <= 1e-9


def test_kr_matches_scipy(rng):
    for _ in range(10):
        sp = random_space(rng, 3, 7)
        n = sp.n_points
        mu = random_free_element(rng, n)
        c = np.zeros(n)
        for i, a in mu.terms():
            c[i] += a
        A, b = [], []
        for i in range(n):
            for j in range(n):
                if i != j:
                    row = np.zeros(n)
                    row[i], row[j] = 1, -1
                    A.append(row)
                    b.append(sp.dist[i, j])
        ref = linprog(-c, A_ub=A, b_ub=b, bounds=[(0, 0)] + [(None, None)] * (n - 1))
        assert kr_norm(sp, mu) == pytest.approx(-ref.fun, abs=1e-9)


def test_quotient_hand_instance():
    sp = from_points([[0.0], [1.0], [2.0]], "l2")
    p, c = quotient_dist_primal(sp, [0.0, -1.0, 0.0], [[0.0, 1.0, 2.0]])
    d, mu = quotient_dist_dual(sp, [0.0, -1.0, 0.0], [[0.0, 1.0, 2.0]])
    assert p == pytest.approx(1) and c[0] == pytest.approx(0, abs=1e-12)
    assert d == pytest.approx(1)
    assert dict(mu.terms()) == {1: pytest.approx(-1), 2: pytest.approx(0.5)}


def test_quotient_exact_hand_instance():
    sp = from_points([[0], [1], [2]], "l2", exact=True)
    p, _ = quotient_dist_primal(sp, [0, -1, 0], [[0, 1, 2]], exact=True)
    d, mu = quotient_dist_dual(sp, [0, -1, 0], [[0, 1, 2]], exact=True)
    assert p == d == 1
    assert dict(mu.terms()) == {1: -1, 2: Fraction(1, 2)}


def test_quotient_trivial_cases(rng):
    sp = random_space(rng, 4, 6)
    n = sp.n_points
    g = rng.uniform(-1, 1, size=(n,))
    g[0] = 0
    assert quotient_dist_primal(sp, g, [g])[0] == pytest.approx(0, abs=1e-12)
    assert quotient_dist_dual(sp, g, [g])[0] == pytest.approx(0, abs=1e-12)
    assert quotient_dist_primal(sp, g, [])[0] == pytest.approx(lip_const(sp, g), rel=1e-12)
    assert quotient_dist_dual(sp, g, [])[0] == pytest.approx(lip_const(sp, g), rel=1e-12)


def test_quotient_duality_random(rng):
    for _ in range(30):
        sp = random_space(rng, 2, 8)
        n = sp.n_points
        g = rng.uniform(-3, 3, size=(n,))
        g[0] = 0
        gens = random_generators(rng, n, rng.integers(0, min(3, n - 1) + 1))
        p, _ = quotient_dist_primal(sp, g, gens)
        d, mu = quotient_dist_dual(sp, g, gens)
        assert abs(p - d) <= 1e-7
        # the witness annihilates every generator and has norm at most one
        for h in gens:
            assert abs(eval_pairing(sp, h, mu)) <= 1e-9
        assert kr_norm(sp, mu) <= 1 + 1e-9


def test_ph_norm_examples():
    mu = PHFreeElement([[2.0], [-1.0]], [1.0, -1.0])
    assert ph_norm(mu) == pytest.approx(3, abs=1e-12)
    assert ph_norm(PHFreeElement([[1.0, 2.0], [2.0, 4.0]], [2.0, -1.0])) == 0
    assert ph_norm(PHFreeElement.from_terms([], dim=2)) == 0


@pytest.mark.parametrize("norm", ["l1", "l2", "linf"])
def test_ph_isometry(norm, rng):
    for _ in range(15):
        x, y = random_vector(rng, 2, norm=norm), random_vector(rng, 2, norm=norm)
        target = np.linalg.norm(x - y, ord=_ord(norm))
        assert ph_norm(delta_pair(x, y, norm)) == pytest.approx(target, abs=1e-6)


@pytest.mark.parametrize("norm", ["l1", "l2", "linf"])
def test_ph_norm_against_dense_grid(norm, rng):
    for _ in range(4):
        k = rng.integers(2, 5)
        pts = np.array([random_vector(rng, 2, norm=norm) for _ in range(k)])
        mu = PHFreeElement(pts, rng.uniform(-2, 2, size=(k,)), norm)
        res = ph_norm_result(mu)
        dirs, _ = mu.reduced()
        # the scaled witness is feasible, so lower_bound <= true norm <= value
        assert cone_lip(RaySystem(np.asarray(dirs, float), norm), res.witness) <= 1 + res.violation + 1e-12
        assert res.violation <= 1e-7
        # a fixed t-grid keeps only some of the constraints: it bounds the
        # norm from above and tightens towards the cutting-plane value
        coarse, fine = dense_ph_norm(mu, 4096), dense_ph_norm(mu, 65536)
        assert res.value <= fine + 1e-9 and fine <= coarse + 1e-9
        assert coarse - res.value <= 1e-3 * max(1.0, res.value)
        assert fine - res.value <= 1e-5 * max(1.0, res.value)


def test_ph_quotient_hand_instance():
    sp = from_points([[0.0], [1.0], [2.0]], "l2")
    p, d = ph_quotient_check(sp, [0.0, 0.0, 1.0], [(1, 2, 2.0)])
    assert p == pytest.approx(0.5) and d == pytest.approx(0.5)
    spx = from_points([[0], [1], [2]], "l2", exact=True)
    assert ph_quotient_check(spx, [0, 0, 1], [(1, 2, 2)], exact=True) == (Fraction(1, 2), Fraction(1, 2))


def test_ph_quotient_cases():
    sp = from_points([[0.0, 0.0], [1.0, 1.0], [3.0, 3.0], [0.0, 1.0]], "l1")
    p, d = ph_quotient_check(sp, [0.0, 1.0, 3.0, 2.0], [(1, 2, 3.0)])
    assert p == pytest.approx(0, abs=1e-12) and d == pytest.approx(0, abs=1e-12)
    with pytest.raises(NotScalingClosed):
        ph_quotient_check(sp, [0.0, 1.0, 3.0, 2.0], [(1, 3, 2.0)])


def test_theta_phi():
    sp = from_points([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], "l2")
    mu = FreeElement.delta(1)
    t = theta(sp, mu)
    assert ph_norm(t) == pytest.approx(1) and kr_norm(sp, mu) == pytest.approx(1)
    _, back = phi(t, sp)
    assert back.terms() == mu.terms()
    assert len(theta(sp, FreeElement.from_terms([])).coefs) == 0
    with pytest.raises(NonUnitSupport):
        theta(from_points([[0.0, 0.0], [2.0, 0.0]], "l2"), FreeElement.delta(1))


def test_q_functional():
    sp = from_points([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], "l2")
    assert q_functional(sp, FreeElement.from_terms([(1, 1.0), (2, -1.0)])) == 0
    both = FreeElement.from_terms([(1, 1.0), (2, 1.0)])
    assert q_functional(sp, both) == 2
    assert kr_norm(sp, both) == pytest.approx(2)
    assert q_functional(sp, FreeElement.from_terms([])) == 0


def test_both_methods_flag_disagreement(monkeypatch):
    import conelip.free as free

    sp = from_points([[0.0], [1.0]], "l2")
    monkeypatch.setattr(free, "kr_norm_flow", lambda space, mu: (5.0, None))
    with pytest.raises(NumericalFailure):
        kr_norm(sp, FreeElement.delta(1), method="both")
