"""Seeded verification suites.

Each suite draws random finite instances and checks one family of
identities or inequalities on them. A case records every check with its
residual and tolerance; a failing case carries the instance in the
``conelip.io`` file formats so it can be reloaded and replayed.
"""

import csv
import hashlib
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from ._validation import NORMS, vector_norm
from .cone import (
    RaySystem,
    ball_projection,
    cone_lip,
    lambda_inverse,
    lambda_restrict,
    odot,
    ph_mcshane_extend,
    ph_pairing,
)
from .elements import FreeElement, PHFreeElement
from .free import (
    barycenter,
    kr_lp_problem,
    kr_norm,
    kr_norm_flow,
    ph_norm,
    phi,
    q_functional,
    quotient_dist_dual,
    quotient_dist_primal,
    theta,
)
from . import generators as gen
from .io import dumps, write_json
from .lp import solve_lp
from .mcshane import PartialField, domain_lip, lp_extension, mcshane_inf, mcshane_sup
from .metric import from_points, lip_const, restrict
from .rng import SplitMix64


@dataclass
class Check:
    relation: str
    residual: float
    tol: float

    @property
    def passed(self):
        return self.residual <= self.tol

    def to_dict(self):
        return {"relation": self.relation, "residual": self.residual, "tol": self.tol, "passed": self.passed}


@dataclass
class CaseRecord:
    suite: str
    index: int
    operation: str
    anchor: str
    digest: str
    measured: dict
    checks: list
    instance: dict = field(repr=False)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def residual(self):
        return max((c.residual for c in self.checks), default=0.0)

    @property
    def relation(self):
        return "; ".join(c.relation for c in self.checks)

    def to_dict(self):
        return {
            "suite": self.suite,
            "index": self.index,
            "operation": self.operation,
            "anchor": self.anchor,
            "inputs_digest": self.digest,
            "expected": self.relation,
            "measured": self.measured,
            "passed": self.passed,
            "residual": self.residual,
            "checks": [c.to_dict() for c in self.checks],
        }


@dataclass
class RunReport:
    suite: str
    seed: int
    cases: list
    wall_time: float = 0.0

    @property
    def n_failed(self):
        return sum(not c.passed for c in self.cases)

    @property
    def passed(self):
        return self.n_failed == 0

    def max_residual(self, suite=None):
        vals = [c.residual for c in self.cases if suite is None or c.suite == suite]
        return max(vals, default=0.0)

    def to_dict(self):
        # wall time is left out so reports are byte-identical across runs
        return {
            "suite": self.suite,
            "seed": self.seed,
            "version": __version__,
            "case_count": len(self.cases),
            "failures": self.n_failed,
            "max_residual": self.max_residual(),
            "cases": [c.to_dict() for c in self.cases],
        }


def _digest(instance):
    return hashlib.sha256(dumps(instance).encode()).hexdigest()[:16]


def _rel(x, scale):
    return float(x) / max(1.0, abs(float(scale)))


def _pos(x):
    return max(0.0, float(x))


# -- suites ------------------------------------------------------------------


def _case_lipschitz(rng, index):
    space = gen.random_space(rng, 2, 8)
    n = space.n_points
    f, g = gen.random_field(rng, n), gen.random_field(rng, n)
    alpha = rng.uniform(-3.0, 3.0)
    sub = [0] + [i for i in range(1, n) if rng.random() < 0.5]
    lf, lg = lip_const(space, f), lip_const(space, g)
    l_af, l_fg = lip_const(space, alpha * f), lip_const(space, f + g)
    l_sub = lip_const(restrict(space, sub), f[sub])
    scale = max(1.0, lf + lg)
    checks = [
        Check("lip(a f) = |a| lip(f)", _rel(abs(l_af - abs(alpha) * lf), scale), 1e-12),
        Check("lip(f + g) <= lip(f) + lip(g)", _rel(_pos(l_fg - lf - lg), scale), 1e-12),
        Check("lip(f|A) <= lip(f)", _rel(_pos(l_sub - lf), scale), 1e-12),
    ]
    inst = {"space": space.to_dict(), "f": {"values": f}, "g": {"values": g}, "alpha": alpha, "subset": sub}
    return "lip", "Lipschitz constant is a seminorm, monotone under restriction", {"lip_f": lf}, checks, inst


def _case_mcshane(rng, index):
    exact = index % 50 == 0
    if exact:
        n = rng.integers(3, 7)
        space = gen.random_integer_metric(rng, n)
        vals = gen.random_integer_field(rng, n)
    else:
        space = gen.random_space(rng, 2, 10)
        n = space.n_points
        vals = gen.random_field(rng, n)
    dom = [0] + sorted(i for i in range(1, n) if rng.random() < 0.5)
    if len(dom) == n and n > 1:
        dom = dom[:-1]
    pf = PartialField(dom, [vals[i] for i in dom])
    L = domain_lip(space, pf)
    F, G = mcshane_sup(space, pf), mcshane_inf(space, pf)
    tol = 0 if exact else 1e-12
    checks = [
        Check("F = f on E", float(max(abs(F[i] - v) for i, v in zip(dom, pf.values))), tol),
        Check("G = f on E", float(max(abs(G[i] - v) for i, v in zip(dom, pf.values))), tol),
        Check("lip(F) = L", _rel(abs(lip_const(space, F) - L), L), tol),
        Check("lip(G) = L", _rel(abs(lip_const(space, G) - L), L), tol),
        Check("F <= G", float(max(_pos(a - b) for a, b in zip(F, G))), tol),
    ]
    obj = rng.normal(size=(n,))
    h = lp_extension(space, pf, obj, exact=exact)
    sand = max(max(_pos(F[i] - h[i]), _pos(h[i] - G[i])) for i in range(n))
    checks.append(Check("F <= h <= G for an LP-sampled extension h", float(sand), 0 if exact else 1e-9))
    inst = {"space": space.to_dict(), "partial": pf.to_dict(), "objective": obj, "exact": exact}
    return "extend", "McShane extensions keep the Lipschitz constant and bracket every extension", {"L": L}, checks, inst


def _case_cone(rng, index):
    checks = []
    a, b = rng.uniform(-10, 10), rng.uniform(-10, 10)
    line = RaySystem([[1.0], [-1.0]], "l2")
    cl = cone_lip(line, [a, b])
    checks.append(Check("cone_lip on R = max(|f(1)|, |f(-1)|)", abs(cl - max(abs(a), abs(b))), 1e-9))

    norm = NORMS[index % 3]
    dim = rng.integers(2, 4)
    k = rng.integers(2, 13)
    rays = gen.random_rays(rng, k, dim, norm)
    f = rng.uniform(-3, 3, size=(k,))
    sp, fld = lambda_restrict(rays, f)
    ls, lc = lip_const(sp, fld), cone_lip(rays, f)
    checks.append(Check("lip(restriction) <= cone_lip", _rel(_pos(ls - lc), lc), 1e-9))
    checks.append(Check("cone_lip <= 3 lip(restriction)", _rel(_pos(lc - 3 * ls), lc), 1e-9))
    back_rays, back = lambda_inverse(sp, fld)
    checks.append(Check("lambda_inverse(lambda_restrict(f)) = f", float(np.max(np.abs(back - f))), 0.0))

    radii = rng.uniform(0.1, 5.0, size=(k,))
    sample = from_points(np.vstack([np.zeros((1, dim)), radii[:, None] * rays.directions]), norm)
    ls2 = lip_const(sample, np.concatenate([[0.0], radii * f]))
    checks.append(Check("lip(sample of cone) <= cone_lip", _pos(ls2 - lc), 1e-9))

    x, y = gen.random_vector(rng, dim, norm=norm), gen.random_vector(rng, dim, norm=norm)
    nx, ny = vector_norm(x, norm), vector_norm(y, norm)
    radial = nx * vector_norm(x / nx - y / ny, norm)
    checks.append(Check("||x|| ||x/||x|| - y/||y|| || <= 2 ||x - y||", _pos(radial - 2 * vector_norm(x - y, norm)), 1e-12))
    gx, gy = ball_projection(x, norm), ball_projection(y, norm)
    ratio = vector_norm(gx - gy, norm) / vector_norm(x - y, norm)
    checks.append(Check("ball projection is 2-Lipschitz", _pos(ratio - 2.0), 1e-9))

    kk = rng.integers(2, 9)
    rays2 = gen.random_rays(rng, kk, dim, norm)
    m = rng.integers(1, min(4, kk - 1) + 1)
    sub = sorted(rng.permutation(kk)[:m])
    fs = rng.uniform(-3, 3, size=(m,))
    L = cone_lip(RaySystem(rays2.directions[sub], norm), fs)
    ext = ph_mcshane_extend(rays2, sub, fs)
    checks.append(Check("ph extension agrees on the sub-cone", float(np.max(np.abs(ext[sub] - fs))), 0.0))
    checks.append(Check("ph extension keeps the cone constant", _rel(abs(cone_lip(rays2, ext) - L), L), 1e-9))
    inst = {
        "line_values": [a, b],
        "rays": rays.to_dict(f),
        "radii": radii,
        "x": x,
        "y": y,
        "extension": {"rays": rays2.to_dict(), "sub": sub, "values": fs},
    }
    return "cone-lip", "ph functions: closed form on R, restriction constants 1 and 3, ph McShane extension", {"cone_lip": lc}, checks, inst


def _case_algebra(rng, index):
    norm = NORMS[index % 3]
    dim = rng.integers(1, 4)
    k = 2 if dim == 1 else rng.integers(2, 11)
    rays = RaySystem([[1.0], [-1.0]], norm) if dim == 1 else gen.random_rays(rng, k, dim, norm)
    f, g = rng.uniform(-3, 3, size=(k,)), rng.uniform(-3, 3, size=(k,))
    lf, lg = cone_lip(rays, f), cone_lip(rays, g)
    lfg = cone_lip(rays, odot(rays, f, g))
    checks = [Check("cone_lip(f odot g) <= cone_lip(f) cone_lip(g)", _rel(_pos(lfg - lf * lg), lf * lg), 1e-9)]
    inst = {"rays": rays.to_dict(), "f": f, "g": g}
    return "odot", "the 1/5-scaled product is submultiplicative", {"lhs": lfg, "rhs": lf * lg}, checks, inst


def _case_freespace(rng, index):
    space = gen.random_space(rng, 2, 8)
    n = space.n_points
    mu, nu = gen.random_free_element(rng, n), gen.random_free_element(rng, n)
    sol = solve_lp(kr_lp_problem(space, mu), exact=False)
    v_lp = sol.objective
    v_fl = kr_norm_flow(space, mu)[0]
    alpha = rng.uniform(-3, 3)
    v_a = kr_norm(space, mu.scale(alpha))
    v_nu = kr_norm(space, nu)
    v_sum = kr_norm(space, mu + nu)
    i = rng.integers(1, n)
    j = rng.integers(0, n - 1)
    j = j + 1 if j >= i else j
    mol = kr_norm(space, FreeElement.from_terms([(i, 1.0), (j, -1.0)]))
    checks = [
        Check("KR norm: LP = min-cost flow", _rel(abs(v_lp - v_fl), v_fl), 1e-9),
        Check("LP primal/dual gap", float(sol.gap), 1e-9),
        Check("LP primal residual", sol.primal_residual, 1e-9),
        Check("||a mu|| = |a| ||mu||", _rel(abs(v_a - abs(alpha) * v_lp), v_lp), 1e-9),
        Check("||mu + nu|| <= ||mu|| + ||nu||", _rel(_pos(v_sum - v_lp - v_nu), v_lp + v_nu), 1e-9),
        Check("||delta_i - delta_j|| = d(i, j)", _rel(abs(mol - space.dist[i, j]), space.dist[i, j]), 1e-9),
    ]
    inst = {"space": space.to_dict(), "mu": mu.to_dict(), "nu": nu.to_dict(), "alpha": alpha, "pair": [i, j]}
    return "kr-norm", "free-space norm: LP and transport agree; norm axioms; molecules", {"lp": v_lp, "flow": v_fl}, checks, inst


def _case_ph_isometry(rng, index):
    norm = NORMS[index % 3]
    x, y = gen.random_vector(rng, 2, norm=norm), gen.random_vector(rng, 2, norm=norm)
    val = ph_norm(gen.delta_pair(x, y, norm))
    target = vector_norm(x - y, norm)
    checks = [Check("||delta^ph_x - delta^ph_y|| = ||x - y||", abs(val - target), 1e-6)]
    inst = {"element": gen.delta_pair(x, y, norm).to_dict()}
    return "ph-norm", "x -> delta^ph_x is an isometry", {"ph_norm": val, "distance": target}, checks, inst


def _case_duality(rng, index):
    exact = index % 10 == 0
    if exact:
        n = rng.integers(2, 6)
        space = gen.random_integer_metric(rng, n)
        k = rng.integers(0, min(3, n - 1) + 1)
        g = gen.random_integer_field(rng, n)
        gens = gen.random_generators(rng, n, k, integer=True)
    elif index % 10 == 1:
        n = rng.integers(3, 9)
        space = from_points(gen.random_points(rng, n, 1, "l2"), "l2")
        g = gen.random_field(rng, n)
        ident = space.points[:, 0] - space.points[0, 0]
        gens = [ident]
    else:
        space = gen.random_space(rng, 2, 8) if rng.random() < 0.7 else gen.random_integer_metric(rng, rng.integers(2, 9))
        n = space.n_points
        if space.exact:
            space = from_points_or_float(space)
        k = rng.integers(0, min(3, n - 1) + 1)
        g = gen.random_field(rng, n)
        gens = gen.random_generators(rng, n, k)
    p, c = quotient_dist_primal(space, g, gens, exact=exact)
    dv, mu = quotient_dist_dual(space, g, gens, exact=exact)
    gap = abs(p - dv)
    checks = [Check("primal quotient distance = dual supremum", float(gap), 0 if exact else 1e-7)]
    if index % 10 == 1:
        # annihilating the identity on R forces a zero barycenter
        shifted = from_points(space.points - space.points[0], "l2")
        bc = barycenter(shifted, mu)
        checks.append(Check("dual witness has zero barycenter", float(np.max(np.abs(bc))), 1e-9))
    inst = {
        "space": space.to_dict(),
        "field": {"values": list(g)},
        "generators": [{"values": list(h)} for h in gens],
        "exact": exact,
    }
    return "quotient", "quotient distance by finitely many generators equals the dual norm", {"primal": p, "dual": dv}, checks, inst


def from_points_or_float(space):
    from .metric import from_matrix

    return from_matrix(np.asarray(space.dist, dtype=float))


def _case_annihilator(rng, index):
    norm = NORMS[index % 3]
    r = 0.0 if index % 4 == 0 else (1.0 if index % 4 == 1 else rng.uniform(0.0, 5.0))
    x = gen.random_vector(rng, 2, norm=norm)
    f = rng.uniform(-3, 3)
    mu = PHFreeElement(np.array([x, r * x]), np.array([r, -1.0]), norm)
    val = ph_norm(mu)
    if norm == "l2":
        rays = RaySystem([x / vector_norm(x, norm)], norm)
        pair, tol = ph_pairing(rays, [f], mu), 1e-12 * max(1.0, abs(f) * vector_norm(x, norm) * (1 + r))
    else:
        # polyhedral norms allow an exact rational replay of the pairing
        xq = np.array([Fraction(v).limit_denominator(1000) for v in x], dtype=object)
        rq = Fraction(r).limit_denominator(1000)
        muq = PHFreeElement(np.array([xq, rq * xq]), np.array([rq, Fraction(-1)], dtype=object), norm)
        rays = RaySystem(np.array([xq / vector_norm(xq, norm)], dtype=object), norm)
        pair, tol = ph_pairing(rays, [Fraction(f)], muq), 0.0
    checks = [
        Check("ph_norm(r delta_x - delta_rx) = 0", float(val), 1e-9),
        Check("<f, r delta_x - delta_rx> = 0", abs(float(pair)), tol),
    ]
    inst = {"element": mu.to_dict(), "r": r, "f": f}
    return "ph-norm", "r delta_x - delta_rx annihilates every ph function", {"ph_norm": val, "pairing": pair}, checks, inst


def _case_theta_phi(rng, index):
    norm = NORMS[index % 3]
    space, mu = gen.random_sphere_element(rng, 5, 2, norm)
    kn = kr_norm(space, mu)
    t = theta(space, mu)
    pn = ph_norm(t)
    _, back = phi(t, space)
    same = max((abs(a - b) for (i, a), (j, b) in zip(back.terms(), mu.terms())), default=0.0)
    same = same if back.indices == mu.indices else float("inf")
    checks = [
        Check("ph_norm(theta mu) <= kr_norm(mu)", _pos(pn - kn), 1e-6),
        Check("kr_norm(mu) <= 3 ph_norm(theta mu)", _pos(kn - 3 * pn), 1e-6),
        Check("phi(theta(mu)) = mu", float(same), 0.0),
    ]
    inst = {"space": space.to_dict(), "mu": mu.to_dict()}
    return "theta", "theta/phi are mutually inverse with constants 1 and 3", {"kr": kn, "ph": pn}, checks, inst


def _case_q_bound(rng, index):
    norm = NORMS[index % 3]
    if index == 0:
        space = from_points([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], "l2")
        mu = FreeElement.from_terms([(1, 1.0), (2, 1.0)])
    else:
        space, mu = gen.random_sphere_element(rng, 5, 2, norm)
    q = q_functional(space, mu)
    kn = kr_norm(space, mu)
    checks = [Check("|Q(mu)| <= kr_norm(mu)", _pos(abs(q) - kn), 1e-9)]
    if index == 0:
        checks.append(Check("Q(delta_a + delta_b) = 2 = kr_norm", abs(q - 2) + abs(kn - 2), 1e-9))
    inst = {"space": space.to_dict(), "mu": mu.to_dict()}
    return "q", "total mass is bounded by the free-space norm", {"q": q, "kr": kn}, checks, inst


SUITES = {
    "lipschitz": (_case_lipschitz, 200),
    "mcshane": (_case_mcshane, 1000),
    "cone": (_case_cone, 200),
    "algebra": (_case_algebra, 1000),
    "freespace": (_case_freespace, 500),
    "ph-isometry": (_case_ph_isometry, 600),
    "duality": (_case_duality, 200),
    "annihilator": (_case_annihilator, 100),
    "theta-phi": (_case_theta_phi, 200),
    "q-bound": (_case_q_bound, 200),
}


def run_case(suite, seed, index):
    fn, _ = SUITES[suite]
    rng = SplitMix64.for_case(seed, suite, index)
    op, anchor, measured, checks, inst = fn(rng, index)
    return CaseRecord(suite, index, op, anchor, _digest(inst), measured, checks, inst)


def _run_case_args(args):
    return run_case(*args)


def run_suite(name, cases=None, seed=0, jobs=1):
    """Run one suite (or ``"all"``) and return a :class:`RunReport`."""
    names = list(SUITES) if name == "all" else [name]
    for nm in names:
        if nm not in SUITES:
            raise KeyError(f"unknown suite {nm!r}; choose from {sorted(SUITES)} or 'all'")
    start = time.perf_counter()
    jobs_list = [
        (nm, seed, i) for nm in names for i in range(SUITES[nm][1] if cases is None else cases)
    ]
    if jobs > 1 and len(jobs_list) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_case_args, jobs_list, chunksize=8))
    else:
        records = [run_case(*a) for a in jobs_list]
    return RunReport(name, seed, records, time.perf_counter() - start)


def emit_report(report, path):
    """Write ``path`` (JSON), a CSV summary next to it, and one loadable
    file per failing case under ``<stem>-counterexamples/``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(report.to_dict(), indent=2) + "\n")
    csv_path = path.with_suffix(".csv")
    with csv_path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["suite", "index", "operation", "inputs_digest", "passed", "residual", "expected"])
        for c in report.cases:
            w.writerow([c.suite, c.index, c.operation, c.digest, int(c.passed), format(c.residual, ".17g"), c.relation])
    failed = [c for c in report.cases if not c.passed]
    written = []
    if failed:
        cdir = path.parent / f"{path.stem}-counterexamples"
        cdir.mkdir(exist_ok=True)
        for c in failed:
            p = cdir / f"{c.suite}-{c.index}.json"
            write_json({"suite": c.suite, "index": c.index, "anchor": c.anchor, "checks": [k.to_dict() for k in c.checks], "instance": c.instance}, p)
            written.append(p)
    return path, csv_path, written
