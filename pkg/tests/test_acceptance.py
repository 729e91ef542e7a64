"""Acceptance criteria: one test per criterion, each with a runtime budget.

Every test prints a ``[PASS]``/``[FAIL]`` line; the lines are collected and
repeated in the pytest terminal summary. Run this file directly
(``python tests/test_acceptance.py``) for the lines alone.
"""

import time
from fractions import Fraction

import numpy as np

from conelip import (
    FreeElement,
    PartialField,
    PHFreeElement,
    RaySystem,
    ball_projection,
    cone_lip,
    from_points,
    kr_norm,
    lambda_restrict,
    lip_const,
    lp_extension,
    mcshane_inf,
    mcshane_sup,
    odot,
    ph_mcshane_extend,
    ph_norm,
    q_functional,
    quotient_dist_dual,
    quotient_dist_primal,
    theta,
)
from conelip import generators as gen
from conelip.free import kr_lp_problem, kr_norm_flow
from conelip.lp import solve_lp
from conelip.mcshane import domain_lip
from conelip.rng import SplitMix64

NORMS = ("l1", "l2", "linf")
SEED = 20240
RESULTS = []


def _ord(norm):
    return {"l1": 1, "l2": 2, "linf": np.inf}[norm]


def report(number, title, ok, detail, elapsed, budget):
    ok = bool(ok) and elapsed < budget
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} | {detail} | {elapsed:.2f} s (< {budget} s)"
    RESULTS.append(line)
    print(line)
    return ok


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_c01_line_closed_form():
    rng = SplitMix64(SEED + 1)
    ab = [(rng.uniform(-10, 10), rng.uniform(-10, 10)) for _ in range(1000)]
    rays = RaySystem([[1.0], [-1.0]])
    with Clock() as c:
        err = max(abs(cone_lip(rays, [a, b]) - max(abs(a), abs(b))) for a, b in ab)
    assert report(1, "cone_lip on R = max(|a|,|b|), 1000 cases", err <= 1e-9, f"max error {err:.2e}", c.elapsed, 1)


def test_c02_ph_isometry():
    rng = SplitMix64(SEED + 2)
    worst = 0.0
    with Clock() as c:
        for norm in NORMS:
            for _ in range(200):
                x, y = gen.random_vector(rng, 2, norm=norm), gen.random_vector(rng, 2, norm=norm)
                err = abs(ph_norm(gen.delta_pair(x, y, norm)) - np.linalg.norm(x - y, ord=_ord(norm)))
                worst = max(worst, err)
    assert report(2, "ph-delta isometry, 200 pairs x 3 norms", worst <= 1e-6, f"max error {worst:.2e}", c.elapsed, 60)


def test_c03_preannihilator():
    rng = SplitMix64(SEED + 3)
    worst = 0.0
    rs = []
    with Clock() as c:
        for i in range(100):
            norm = NORMS[i % 3]
            r = 0.0 if i == 0 else 1.0 if i == 1 else rng.uniform(0.0, 5.0)
            rs.append(r)
            x = gen.random_vector(rng, 2, norm=norm)
            mu = PHFreeElement(np.array([x, r * x]), np.array([r, -1.0]), norm)
            worst = max(worst, abs(ph_norm(mu)))
    assert 0.0 in rs and 1.0 in rs
    assert report(3, "ph_norm(r delta_x - delta_rx) = 0, 100 cases", worst <= 1e-9, f"max value {worst:.2e}", c.elapsed, 10)


def test_c04_quotient_duality():
    rng = SplitMix64(SEED + 4)
    worst = 0.0
    exact_ok = True
    with Clock() as c:
        for _ in range(200):
            space = gen.random_space(rng, 2, 8)
            n = space.n_points
            g = gen.random_field(rng, n)
            gens = gen.random_generators(rng, n, rng.integers(0, min(3, n - 1) + 1))
            worst = max(worst, abs(quotient_dist_primal(space, g, gens)[0] - quotient_dist_dual(space, g, gens)[0]))
        for _ in range(20):
            n = rng.integers(2, 6)
            space = gen.random_integer_metric(rng, n)
            g = gen.random_integer_field(rng, n)
            gens = gen.random_generators(rng, n, rng.integers(0, min(3, n - 1) + 1), integer=True)
            p = quotient_dist_primal(space, g, gens, exact=True)[0]
            d = quotient_dist_dual(space, g, gens, exact=True)[0]
            exact_ok &= isinstance(p, Fraction) and p == d
        line = from_points([[0], [1], [2]], "l2", exact=True)
        hand_p = quotient_dist_primal(line, [0, -1, 0], [[0, 1, 2]], exact=True)[0]
        hand_d = quotient_dist_dual(line, [0, -1, 0], [[0, 1, 2]], exact=True)[0]
    ok = worst <= 1e-7 and exact_ok and hand_p == hand_d == 1
    detail = f"max gap {worst:.2e}; 20 rational cases equal: {exact_ok}; hand instance {hand_p}/{hand_d}"
    assert report(4, "quotient primal = dual", ok, detail, c.elapsed, 60)


def test_c05_mcshane():
    rng = SplitMix64(SEED + 5)
    worst_l, worst_order, worst_sand = 0.0, 0.0, 0.0
    exact_ok = True
    with Clock() as c:
        for i in range(1000):
            exact = i % 50 == 0
            if exact:
                n = rng.integers(3, 7)
                space = gen.random_integer_metric(rng, n)
                vals = gen.random_integer_field(rng, n)
            else:
                space = gen.random_space(rng, 2, 10)
                n = space.n_points
                vals = gen.random_field(rng, n)
            dom = [0] + [j for j in range(1, n) if rng.random() < 0.5]
            pf = PartialField(dom, [vals[j] for j in dom])
            L = domain_lip(space, pf)
            F, G = mcshane_sup(space, pf), mcshane_inf(space, pf)
            dl = max(abs(lip_const(space, F) - L), abs(lip_const(space, G) - L))
            if exact:
                exact_ok &= dl == 0
            else:
                worst_l = max(worst_l, float(dl) / max(1.0, float(L)))
            worst_order = max(worst_order, float(max(F - G)))
            h = lp_extension(space, pf, rng.normal(size=(n,)), exact=exact)
            worst_sand = max(worst_sand, float(max(max(F - h), max(h - G))))
    ok = worst_l <= 1e-12 and exact_ok and worst_order <= 1e-12 and worst_sand <= 1e-9
    detail = f"L drift {worst_l:.1e}, exact {exact_ok}, max(F-G) {worst_order:.1e}, sandwich slack {worst_sand:.1e}"
    assert report(5, "McShane extensions, 1000 cases", ok, detail, c.elapsed, 30)


def test_c06_ph_extension():
    rng = SplitMix64(SEED + 6)
    worst, agree = 0.0, True
    with Clock() as c:
        for i in range(200):
            norm = NORMS[i % 3]
            k = rng.integers(2, 9)
            rays = gen.random_rays(rng, k, rng.integers(1, 4) if k == 2 else rng.integers(2, 4), norm)
            m = rng.integers(1, min(4, k - 1) + 1)
            sub = sorted(rng.permutation(k)[:m])
            fs = rng.uniform(-3, 3, size=(m,))
            L = cone_lip(RaySystem(rays.directions[sub], norm), fs)
            ext = ph_mcshane_extend(rays, sub, fs)
            agree &= bool(np.array_equal(ext[sub], fs))
            worst = max(worst, abs(cone_lip(rays, ext) - L) / max(1.0, L))
    ok = agree and worst <= 1e-9
    assert report(6, "ph extension keeps cone_lip, 200 cases", ok, f"max drift {worst:.1e}, exact agreement {agree}", c.elapsed, 60)


def test_c07_algebra():
    rng = SplitMix64(SEED + 7)
    worst = -np.inf
    with Clock() as c:
        for i in range(1000):
            norm = NORMS[i % 3]
            dim = rng.integers(1, 4)
            if dim == 1:
                rays = RaySystem([[1.0], [-1.0]], norm)
            else:
                rays = gen.random_rays(rng, rng.integers(2, 11), dim, norm)
            f, g = rng.uniform(-3, 3, size=(len(rays),)), rng.uniform(-3, 3, size=(len(rays),))
            rhs = cone_lip(rays, f) * cone_lip(rays, g)
            lhs = cone_lip(rays, odot(rays, f, g))
            worst = max(worst, (lhs - rhs) / max(rhs, 1e-300))
    assert report(7, "cone_lip(f odot g) <= cone_lip(f) cone_lip(g), 1000 cases", worst <= 1e-9,
                  f"max relative excess {worst:.2e}", c.elapsed, 30)


def test_c08_lambda_constants():
    rng = SplitMix64(SEED + 8)
    worst_lo = worst_hi = -np.inf
    with Clock() as c:
        for i in range(500):
            norm = NORMS[i % 3]
            rays = gen.random_rays(rng, rng.integers(2, 13), rng.integers(2, 4), norm)
            f = rng.uniform(-3, 3, size=(len(rays),))
            space, field = lambda_restrict(rays, f)
            ls, lc = lip_const(space, field), cone_lip(rays, f)
            worst_lo = max(worst_lo, (ls - lc) / lc)
            worst_hi = max(worst_hi, (lc - 3 * ls) / lc)
        worst_radial = -np.inf
        for norm in NORMS:
            xs = rng.uniform(-5, 5, size=(10_000, 2))
            ys = rng.uniform(-5, 5, size=(10_000, 2))
            nx = np.linalg.norm(xs, ord=_ord(norm), axis=1)
            ny = np.linalg.norm(ys, ord=_ord(norm), axis=1)
            lhs = nx * np.linalg.norm(xs / nx[:, None] - ys / ny[:, None], ord=_ord(norm), axis=1)
            rhs = 2 * np.linalg.norm(xs - ys, ord=_ord(norm), axis=1)
            worst_radial = max(worst_radial, float(np.max(lhs - rhs)))
        worst_ball = 0.0
        for norm in NORMS:
            P = rng.uniform(-3, 3, size=(10_000, 2))
            Q = rng.uniform(-3, 3, size=(10_000, 2))
            num = np.linalg.norm(ball_projection(P, norm) - ball_projection(Q, norm), ord=_ord(norm), axis=1)
            worst_ball = max(worst_ball, float(np.max(num / np.linalg.norm(P - Q, ord=_ord(norm), axis=1))))
    ok = worst_lo <= 1e-9 and worst_hi <= 1e-9 and worst_radial <= 1e-12 and worst_ball <= 2 + 1e-9
    detail = (f"lip(Lf)/cone_lip excess {worst_lo:.1e}, cone_lip/3lip(Lf) excess {worst_hi:.1e}, "
              f"radial {worst_radial:.1e}, ball ratio {worst_ball:.6f}")
    assert report(8, "Lambda constants, radial bound, ball projection", ok, detail, c.elapsed, 30)


def test_c09_theta_phi():
    rng = SplitMix64(SEED + 9)
    worst_lo = worst_hi = -np.inf
    with Clock() as c:
        for i in range(200):
            space, mu = gen.random_sphere_element(rng, 5, 2, NORMS[i % 3])
            kn, pn = kr_norm(space, mu), ph_norm(theta(space, mu))
            worst_lo = max(worst_lo, pn - kn)
            worst_hi = max(worst_hi, kn - 3 * pn)
    ok = worst_lo <= 1e-6 and worst_hi <= 1e-6
    assert report(9, "ph_norm <= kr_norm <= 3 ph_norm, 200 cases", ok,
                  f"max excess {worst_lo:.1e} / {worst_hi:.1e}", c.elapsed, 60)


def test_c10_q_bound():
    rng = SplitMix64(SEED + 10)
    worst = -np.inf
    with Clock() as c:
        for i in range(200):
            space, mu = gen.random_sphere_element(rng, 5, 2, NORMS[i % 3])
            worst = max(worst, abs(q_functional(space, mu)) - kr_norm(space, mu))
        plane = from_points([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], "l2")
        both = FreeElement.from_terms([(1, 1.0), (2, 1.0)])
        q, kn = q_functional(plane, both), kr_norm(plane, both)
    ok = worst <= 1e-9 and q == 2 and abs(kn - 2) <= 1e-9
    assert report(10, "|Q(mu)| <= kr_norm(mu), 200 cases + equality case", ok,
                  f"max excess {worst:.1e}; Q = {q}, kr = {kn:.12g}", c.elapsed, 10)


def test_c11_solver_cross_validation():
    rng = SplitMix64(SEED + 11)
    worst_diff = worst_gap = 0.0
    with Clock() as c:
        for _ in range(500):
            space = gen.random_space(rng, 2, 8)
            mu = gen.random_free_element(rng, space.n_points)
            sol = solve_lp(kr_lp_problem(space, mu), exact=False)
            worst_diff = max(worst_diff, abs(sol.objective - kr_norm_flow(space, mu)[0]))
            worst_gap = max(worst_gap, sol.gap)
    ok = worst_diff <= 1e-9 and worst_gap <= 1e-9
    assert report(11, "kr_norm LP = flow, LP gap, 500 cases", ok,
                  f"max |lp - flow| {worst_diff:.1e}, max gap {worst_gap:.1e}", c.elapsed, 30)


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
