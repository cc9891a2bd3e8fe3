"""Command-line front end.

Exit codes: 0 success or consistent, 1 negative verdict, 2 input error,
3 generator failure.  All JSON output is indented with sorted keys.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from .errors import InconsistentSystem, InvalidAxis, QuatSylvError
from .quat_core import involution_from_axis
from .quat_linalg import Decomposition
from .quat_matrix import QuatMatrix, phi_transpose
from .sylvester import TOL_RES, SylvesterSystem, SystemSolution, check_system, residuals, solve_system

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_GENERATOR = 0, 1, 2, 3


class InputError(Exception):
    pass


def _dump(obj, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _load_instance(path: str):
    """A ``SylvesterSystem`` or, when the file carries an axis, a ``PhiSystem``."""
    from .phi_systems import PhiSystem

    obj = _load_json(path)
    if isinstance(obj, dict) and "axis" in obj:
        return PhiSystem.from_json(obj)
    return SylvesterSystem.from_json(obj)


def _is_phi(instance) -> bool:
    return not isinstance(instance, SylvesterSystem)


def _oracle_block(instance) -> dict:
    from .oracle import oracle_consistent, oracle_solve, oracle_tol, realify

    rls = realify(instance)
    _, res = oracle_solve(rls)
    return {"consistent": oracle_consistent(rls), "residual": res, "tol": oracle_tol(rls)}


# -- commands ------------------------------------------------------------

def cmd_check(args) -> int:
    from .phi_systems import check_phi_system, strict_disagreement

    instance = _load_instance(args.instance)
    out: dict = {}
    if _is_phi(instance):
        report = check_phi_system(instance, args.tol_rank, strict=args.strict_phi)
        out["kind"] = "phi"
        if args.strict_phi:
            listed, full = strict_disagreement(instance, args.tol_rank)
            out["listed_consistent"] = listed
            out["strict_disagreement"] = listed != full
    else:
        report = check_system(instance, args.tol_rank)
        out["kind"] = "general"
    out["consistent"] = report.consistent
    out["conditions"] = report.to_json()
    out["failures"] = [c.label() for c in report.failures]
    if args.oracle:
        out["oracle"] = _oracle_block(instance)
    _dump(out, args.output)
    return EXIT_OK if report.consistent else EXIT_NEGATIVE


def cmd_solve(args) -> int:
    from .phi_systems import solve_phi_system

    instance = _load_instance(args.instance)
    seed = args.seed if args.random_params else None
    try:
        if _is_phi(instance):
            sol = solve_phi_system(instance, seed=seed, tol_res=args.tol_res, tol_rank=args.tol_rank)
        else:
            sol = solve_system(instance, seed=seed, tol_res=args.tol_res, tol_rank=args.tol_rank)
    except InconsistentSystem as exc:
        failures = [c.label() for c in exc.report.failures] if exc.report is not None else []
        _dump({"consistent": False, "error": str(exc), "failures": failures, "level": exc.level},
              args.output)
        return EXIT_NEGATIVE
    out = sol.to_json()
    out["consistent"] = True
    if args.oracle:
        out["oracle"] = _oracle_block(instance)
    _dump(out, args.output)
    return EXIT_OK


def _verify(instance, solution_obj, tol_res: float) -> dict:
    if _is_phi(instance):
        from .phi_systems import PhiSolution, phi_residuals

        sol = PhiSolution.from_json(solution_obj)
        res = phi_residuals(instance, sol.X, sol.Z)
        defects = [(z - phi_transpose(instance.inv, z)).norm() for z in sol.Z]
        sym_ok = all(d <= tol_res * (1.0 + z.norm()) for d, z in zip(defects, sol.Z))
        extra = {"symmetry_defects": defects}
    else:
        sol = SystemSolution.from_json(solution_obj)
        res = residuals(instance, sol)
        sym_ok, extra = True, {}
    bounds = [tol_res * (1.0 + eq.E.norm()) for eq in instance]
    ok = sym_ok and all(r <= b for r, b in zip(res, bounds))
    return {"ok": ok, "residuals": res, "bounds": bounds, **extra}


def cmd_verify(args) -> int:
    instance = _load_instance(args.instance)
    obj = _load_json(args.solution)
    out = _verify(instance, obj, args.tol_res)
    _dump(out, args.output)
    return EXIT_OK if out["ok"] else EXIT_NEGATIVE


def _parse_axis(text: str):
    try:
        vals = [float(v) for v in text.split(",")]
        return involution_from_axis(vals)
    except (ValueError, InvalidAxis) as exc:
        raise InputError(f"--phi: {exc}") from None


def cmd_gen(args) -> int:
    from . import generate as g

    if args.k < 1:
        raise InputError("k must be at least 1")
    if args.dims < 0:
        raise InputError("dims must be nonnegative")
    rng = np.random.default_rng(args.seed)
    try:
        if args.phi is not None:
            inv = _parse_axis(args.phi)
            dims = g.PhiDims.uniform(args.k, args.dims)
            if args.mode == "consistent":
                instance, planted = g.planted_phi_system(rng, inv, dims, args.deficient)
            else:
                instance, planted = g.inconsistent_phi_system(rng, inv, dims, args.deficient), None
        else:
            dims = g.Dims.uniform(args.k, args.dims)
            if args.mode == "consistent":
                instance, planted = g.planted_system(rng, dims, args.deficient)
            else:
                instance, planted = g.inconsistent_system(rng, dims, args.deficient), None
    except g.GenerationFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERATOR
    _dump(instance.to_json(), args.output)
    if args.solution_out is not None:
        if planted is None:
            raise InputError("--solution-out needs --mode consistent")
        _dump(planted.to_json(), args.solution_out)
    return EXIT_OK


def cmd_rank(args) -> int:
    a = QuatMatrix.from_json(_load_json(args.matrix))
    rr = Decomposition(a, args.tol_rank).rank_result()
    _dump({
        "rank": rr.rank,
        "singular_values": list(rr.singular_values),
        "tol_used": rr.tol_used,
        "margin": rr.margin if np.isfinite(rr.margin) else None,
    }, args.output)
    return EXIT_OK


def cmd_pinv(args) -> int:
    a = QuatMatrix.from_json(_load_json(args.matrix))
    _dump(Decomposition(a, args.tol_rank).pinv().to_json(), args.output)
    return EXIT_OK


# -- argument parsing --------------------------------------------------------

def _positive(text: str) -> float:
    val = float(text)
    if not val > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return val


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quatsylv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol-rank", type=_positive, default=None,
                       help="absolute singular-value cutoff (default: scale aware)")
        p.add_argument("--tol-res", type=_positive, default=TOL_RES,
                       help="relative residual tolerance (default %(default)g)")
        p.add_argument("-o", "--output", default=None, help="output file (default stdout)")

    p = sub.add_parser("check", help="evaluate the rank conditions")
    p.add_argument("instance")
    p.add_argument("--oracle", action="store_true", help="add the real-linear oracle verdict")
    p.add_argument("--strict-phi", action="store_true", help="evaluate every family for phi systems")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="construct a solution")
    p.add_argument("instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random-params", action="store_true",
                   help="draw the free parameters from --seed instead of zero")
    p.add_argument("--oracle", action="store_true")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="recompute residuals of a solution")
    p.add_argument("instance")
    p.add_argument("solution")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--dims", type=int, default=3, help="every dimension (default %(default)s)")
    p.add_argument("--mode", choices=("consistent", "inconsistent"), default="consistent")
    p.add_argument("--phi", default=None, metavar="X,Y,Z", help="involution axis for a phi system")
    p.add_argument("--deficient", type=int, default=None, metavar="R",
                   help="cap the rank of every coefficient at R")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--solution-out", default=None, help="write the planted solution here")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_gen)

    for name, func in (("rank", cmd_rank), ("pinv", cmd_pinv)):
        p = sub.add_parser(name, help=f"{name} of a single matrix file")
        p.add_argument("matrix")
        common(p)
        p.set_defaults(func=func)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, QuatSylvError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
