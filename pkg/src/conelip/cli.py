"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 verification failure, 3 solver
failure. Diagnostics go to standard error.
"""

import argparse
import hashlib
import sys

import numpy as np

from . import __version__, io
from ._validation import fmt_number
from .cone import RaySystem, cone_lip, odot, ph_mcshane_extend
from .exceptions import ConelipError, RaySystemMismatch, SolverError, ValidationError
from .free import (
    kr_norm,
    kr_norm_flow,
    kr_norm_lp,
    ph_norm_result,
    ph_quotient_check,
    phi,
    q_functional,
    quotient_dist_dual,
    quotient_dist_primal,
    theta,
)
from .lp import rational_mode_requested
from .mcshane import domain_lip, mcshane_inf, mcshane_sup
from .metric import check_field, lip_const

EXIT_OK, EXIT_INVALID, EXIT_VERIFY, EXIT_SOLVER = 0, 1, 2, 3


def _hash(op, docs, extra=None):
    payload = io.dumps({"op": op, "inputs": docs, "args": extra or {}})
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _exact(args):
    return bool(getattr(args, "exact", False)) or rational_mode_requested()


class Result:
    def __init__(self, value, witness=None, tolerance=0.0, certificate=None, text=None):
        self.value = value
        self.witness = witness
        self.tolerance = tolerance
        self.certificate = certificate or {}
        self.text = text


def _show(value):
    if isinstance(value, (list, tuple, np.ndarray)):
        return io.dumps({"values": list(value)})
    return fmt_number(value)


# -- subcommands ---------------------------------------------------------------


def cmd_lip(args):
    exact = _exact(args)
    space = io.load_space(args.space, exact=exact)
    f = check_field(space, io.load_field(args.field, exact=exact), exact=exact)
    L, (i, j) = lip_const(space, f, with_pair=True)
    return Result(L, {"pair": [i, j]}, 0.0)


def cmd_extend(args):
    exact = _exact(args)
    space = io.load_space(args.space, exact=exact)
    pf = io.load_partial(args.partial, exact=exact)
    lip = None if args.lip is None else io._num(args.lip, exact)
    ext = (mcshane_sup if args.method == "sup" else mcshane_inf)(space, pf, lip=lip)
    L = domain_lip(space, pf) if lip is None else lip
    return Result(list(ext), {"lipschitz": L}, 0.0, {"lip_of_extension": lip_const(space, ext)})


def _rays_with_values(path, allow_missing=False):
    rays, values = io.load_rays(path)
    if values is None:
        raise ValidationError(f"{path}: ray file has no values")
    if not allow_missing and any(v is None for v in values):
        raise ValidationError(f"{path}: every ray needs a value")
    return rays, values


def cmd_cone_lip(args):
    rays, values = _rays_with_values(args.rays)
    L, (i, j, t) = cone_lip(rays, values, with_argmax=True)
    return Result(L, {"pair": [i, j], "t": t}, 1e-9)


def cmd_ph_extend(args):
    rays, values = _rays_with_values(args.rays, allow_missing=True)
    sub = args.sub if args.sub else [i for i, v in enumerate(values) if v is not None]
    if any(values[i] is None for i in sub):
        raise ValidationError("every index in --sub needs a value")
    f_sub = [values[i] for i in sub]
    lip = args.lip
    if lip is None:
        lip = cone_lip(RaySystem(rays.directions[sub], rays.norm), f_sub)
    ext = ph_mcshane_extend(rays, sub, f_sub, lip=lip)
    return Result(list(ext), {"sub": sub, "lipschitz": lip}, 1e-9, {"cone_lip_of_extension": cone_lip(rays, ext)},
                  text=io.dumps(rays.to_dict(list(ext))))


def cmd_odot(args):
    rays_f, f = _rays_with_values(args.f)
    rays_g, g = _rays_with_values(args.g)
    if rays_f.norm != rays_g.norm or not np.array_equal(rays_f.directions, rays_g.directions):
        raise RaySystemMismatch("both fields must live on the same ray system")
    prod = odot(rays_f, f, g, raw=args.raw)
    return Result(list(prod), {"raw": args.raw}, 0.0, text=io.dumps(rays_f.to_dict(list(prod))))


def cmd_kr_norm(args):
    exact = _exact(args)
    space = io.load_space(args.space, exact=exact)
    mu = io.load_free_element(args.element, exact=exact)
    cert = {}
    witness = None
    if args.method in ("lp", "both"):
        value, witness = kr_norm_lp(space, mu, exact=exact)
        cert["lp"] = value
    if args.method in ("flow", "both"):
        cost, res = kr_norm_flow(space, mu)
        cert["flow"] = cost
        if args.method == "flow":
            value, witness = cost, None
    if args.method == "both":
        value = kr_norm(space, mu, method="both", exact=exact)
    if witness is not None:
        witness = {"points": list(mu.indices), "test_function": list(witness)}
    return Result(value, witness, 1e-9, cert)


def cmd_ph_norm(args):
    mu = io.load_ph_element(args.element)
    res = ph_norm_result(mu, tol=args.tol)
    cert = {"violation": res.violation, "rounds": res.rounds, "cuts": res.n_cuts, "lower_bound": res.lower_bound}
    witness = {"directions": res.directions, "values": res.witness}
    return Result(res.value, witness, args.tol, cert)


def cmd_quotient(args):
    exact = _exact(args)
    space = io.load_space(args.space, exact=exact)
    g = io.load_field(args.field, exact=exact)
    gens = [io.load_field(p, exact=exact) for p in args.generators]
    primal, c = quotient_dist_primal(space, g, gens, exact=exact)
    dual, mu = quotient_dist_dual(space, g, gens, exact=exact)
    gap = abs(primal - dual)
    lines = [
        f"primal {fmt_number(primal)}",
        f"dual {fmt_number(dual)}",
        f"gap {fmt_number(gap)}",
        f"coefficients {io.dumps(list(c))}",
        f"measure {io.dumps(mu.to_dict())}",
    ]
    return Result(
        primal,
        {"coefficients": list(c), "measure": mu.to_dict()},
        0.0 if exact else 1e-7,
        {"primal": primal, "dual": dual, "gap": gap},
        text="\n".join(lines),
    )


def cmd_ph_quotient(args):
    exact = _exact(args)
    space = io.load_space(args.space, exact=exact)
    g = io.load_field(args.field, exact=exact)
    scalings = io.read_json(args.scalings)["scalings"]
    primal, dual, h, coefs = ph_quotient_check(space, g, scalings, exact=exact, with_witness=True)
    gap = abs(primal - dual)
    text = f"primal {fmt_number(primal)}\ndual {fmt_number(dual)}\ngap {fmt_number(gap)}"
    return Result(primal, {"h": list(h), "coefficients": list(coefs)}, 0.0 if exact else 1e-7,
                  {"primal": primal, "dual": dual, "gap": gap}, text=text)


def cmd_theta(args):
    exact = _exact(args)
    space = io.load_space(args.space, exact=exact)
    mu = io.load_free_element(args.element, exact=exact)
    out = theta(space, mu)
    doc = {"norm": out.norm, "dim": int(out.dim), "terms": [{"x": list(x), "a": a} for x, a in out.terms()]}
    return Result(doc, None, 0.0, text=io.dumps(doc))


def cmd_phi(args):
    mu = io.load_ph_element(args.element)
    space = io.load_space(args.space) if args.space else None
    space, out = phi(mu, space)
    doc = {"space": space.to_dict(), "element": out.to_dict()}
    return Result(doc, None, 0.0, text=io.dumps(doc))


def cmd_q(args):
    exact = _exact(args)
    space = io.load_space(args.space, exact=exact)
    mu = io.load_free_element(args.element, exact=exact)
    return Result(q_functional(space, mu), None, 0.0)


def cmd_verify(args):
    from .verify import emit_report, run_suite

    report = run_suite(args.suite, cases=args.cases, seed=args.seed, jobs=args.jobs)
    if args.report:
        _, csv_path, dumped = emit_report(report, args.report)
        for p in dumped:
            print(f"counterexample written to {p}", file=sys.stderr)
    for c in report.cases:
        if not c.passed:
            bad = "; ".join(k.relation for k in c.checks if not k.passed)
            print(f"FAIL {c.suite}[{c.index}] {c.anchor}: {bad} (residual {c.residual:.3g})", file=sys.stderr)
    print(f"suite {args.suite} seed {args.seed}: {len(report.cases) - report.n_failed}/{len(report.cases)} passed, "
          f"max residual {report.max_residual():.3g}")
    print(f"wall time {report.wall_time:.2f} s", file=sys.stderr)
    return report


COMMANDS = {
    "lip": cmd_lip,
    "extend": cmd_extend,
    "ph-extend": cmd_ph_extend,
    "cone-lip": cmd_cone_lip,
    "odot": cmd_odot,
    "kr-norm": cmd_kr_norm,
    "ph-norm": cmd_ph_norm,
    "quotient": cmd_quotient,
    "ph-quotient": cmd_ph_quotient,
    "theta": cmd_theta,
    "phi": cmd_phi,
    "q": cmd_q,
}


def build_parser():
    from .verify import SUITES

    p = argparse.ArgumentParser(prog="conelip", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, help_, exact=True):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--json", action="store_true", help="print a JSON record instead of plain text")
        if exact:
            sp.add_argument("--exact", action="store_true", help="exact rational arithmetic")
        return sp

    sp = cmd("lip", "Lipschitz constant of a field")
    sp.add_argument("space")
    sp.add_argument("field")

    sp = cmd("extend", "McShane extension of a partial field")
    sp.add_argument("space")
    sp.add_argument("partial")
    sp.add_argument("--method", choices=["sup", "inf"], default="sup")
    sp.add_argument("--lip", default=None, help="Lipschitz constant to use (default: that of the data)")

    sp = cmd("ph-extend", "extend a ph function from some rays to all", exact=False)
    sp.add_argument("rays", help="ray file; null values mark rays to fill in")
    sp.add_argument("--sub", type=int, nargs="+", help="indices of known rays (default: non-null values)")
    sp.add_argument("--lip", type=float, default=None)

    sp = cmd("cone-lip", "Lipschitz constant of a ph function on its rays", exact=False)
    sp.add_argument("rays")

    sp = cmd("odot", "product of two ph functions", exact=False)
    sp.add_argument("f")
    sp.add_argument("g")
    sp.add_argument("--raw", action="store_true", help="drop the 1/5 factor")

    sp = cmd("kr-norm", "norm of a finitely supported element of the free space")
    sp.add_argument("space")
    sp.add_argument("element")
    sp.add_argument("--method", choices=["lp", "flow", "both"], default="lp")

    sp = cmd("ph-norm", "norm in the ph free space (cutting planes)", exact=False)
    sp.add_argument("element")
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = cmd("quotient", "distance to the span of generators, primal and dual")
    sp.add_argument("space")
    sp.add_argument("field")
    sp.add_argument("--generators", nargs="*", default=[], metavar="FIELD")

    sp = cmd("ph-quotient", "distance to fields obeying declared scalings, primal and dual")
    sp.add_argument("space")
    sp.add_argument("field")
    sp.add_argument("--scalings", required=True, help='file {"scalings": [[i, j, r], ...]}')

    sp = cmd("theta", "sphere-space element to ph element")
    sp.add_argument("space")
    sp.add_argument("element")

    sp = cmd("phi", "ph element on the sphere to sphere-space element", exact=False)
    sp.add_argument("element")
    sp.add_argument("--space", default=None, help="sphere space to index into")

    sp = cmd("q", "total mass of an element")
    sp.add_argument("space")
    sp.add_argument("element")

    sp = sub.add_parser("verify", help="run seeded verification suites")
    sp.add_argument("--suite", default="all", choices=sorted(SUITES) + ["all"])
    sp.add_argument("--cases", type=int, default=None, help="cases per suite (default: suite size)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--report", default=None, help="JSON report path; a CSV is written next to it")
    sp.add_argument("--jobs", type=int, default=1)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            report = cmd_verify(args)
            return EXIT_OK if report.passed else EXIT_VERIFY
        res = COMMANDS[args.command](args)
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValidationError, ConelipError) as exc:
        print(f"invalid input: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, KeyError, TypeError, ValueError) as exc:
        print(f"invalid input: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.json:
        docs = {k: v for k, v in vars(args).items() if k not in ("json",)}
        record = {
            "op": args.command,
            "inputs_hash": _hash(args.command, _input_docs(args), docs),
            "value": res.value,
            "witness": res.witness,
            "tolerance": res.tolerance,
            "certificate": res.certificate,
        }
        print(io.dumps(record, indent=2))
    else:
        print(res.text if res.text is not None else _show(res.value))
    return EXIT_OK


def _input_docs(args):
    out = {}
    for key in ("space", "field", "partial", "rays", "f", "g", "element", "scalings"):
        path = getattr(args, key, None)
        if path:
            out[key] = io.read_json(path)
    gens = getattr(args, "generators", None)
    if gens:
        out["generators"] = [io.read_json(p) for p in gens]
    return out


if __name__ == "__main__":
    sys.exit(main())
