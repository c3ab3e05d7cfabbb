"""Workbench for interpolation and rational functions over truncated Wick rings.

Exit codes: 0 success, 1 verification failed, 2 unreadable or invalid input,
3 Pick matrix not strictly positive (problem not solvable by this method).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .interpolation import (
    EPS_SCHUR,
    K_REPORT,
    RESIDUAL_TOL,
    SCHUR_GRID,
    SCHUR_RADIUS,
    InterpolationProblem,
    NotSchur,
    ProblemError,
    SchurParameter,
    check_theta_identity,
    random_problem,
    solve,
    verify_solution,
)
from .matrix import EPS_PD, NotStrictlyPositive
from .projection import project
from .rational import eval_rational_ring, eval_via_contour
from .ring import RingError, TruncationContext, norm_dual, norm_test, vage_constant
from .serialize import (
    OPTION_KEYS,
    PARAMETER_SCHEMA,
    PROBLEM_SCHEMA,
    FormatError,
    dumps,
    element_from_dict,
    element_to_dict,
    from_dict,
    matrix_to_dict,
    rational_from_dict,
    rational_to_dict,
    to_dict,
    validate,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_UNSOLVABLE = 0, 1, 2, 3

DEFAULTS = {
    "k_report": K_REPORT,
    "tol": RESIDUAL_TOL,
    "grid": SCHUR_GRID,
    "radius": SCHUR_RADIUS,
    "eps_schur": EPS_SCHUR,
    "eps_pd": EPS_PD,
    "nodes": 512,
}


class InputError(Exception):
    pass


def _read_json(path: str):
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return raw, json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _write(text: str, output: str | None):
    if output is None or output == "-":
        sys.stdout.write(text)
        return
    target = Path(output)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, target)


def _options(file_opts: dict, args) -> dict:
    opts = dict(DEFAULTS)
    opts.update(file_opts)
    for key in OPTION_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            opts[key] = val
    return opts


def load_problem(obj) -> tuple[InterpolationProblem, list, dict]:
    validate(obj, PROBLEM_SCHEMA, "problem file")
    ctx = TruncationContext(obj["context"]["m"], obj["context"]["d"])
    points = [element_from_dict(x, ctx) for x in obj["points"]]
    targets = [element_from_dict(x, ctx) for x in obj["targets"]]
    param = [element_from_dict(x, ctx) for x in obj.get("parameter", [[0, 0]])]
    return InterpolationProblem(points, targets), param, obj.get("options", {})


def _digest(*parts: bytes) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(hashlib.sha256(p).digest())
    return "sha256:" + h.hexdigest()


def _report_doc(command: str, digest: str, opts: dict, report, extra: dict) -> dict:
    return {
        "tool": "wickring",
        "version": __version__,
        "command": command,
        "input_digest": digest,
        "options": opts,
        "report": report.to_flat(),
        "status": "pass" if report.passed else "fail",
        **extra,
    }


def _verify_kwargs(opts: dict) -> dict:
    return dict(
        k_report=opts["k_report"],
        tol=opts["tol"],
        grid=opts["grid"],
        radius=opts["radius"],
        eps_schur=opts["eps_schur"],
    )


def cmd_solve(args) -> int:
    raw, obj = _read_json(args.problem)
    prob, param, file_opts = load_problem(obj)
    parts = [raw]
    if args.parameter:
        praw, pobj = _read_json(args.parameter)
        validate(pobj, PARAMETER_SCHEMA, "parameter file")
        param = [element_from_dict(x, prob.context) for x in pobj]
        parts.append(praw)
    opts = _options(file_opts, args)
    g = SchurParameter.of(prob.context, param, grid=opts["grid"], radius=opts["radius"], eps_schur=opts["eps_schur"])
    sol = solve(prob, g, eps_pd=opts["eps_pd"])
    report = verify_solution(prob, sol.f, sol.u, sol.v, parameter=g, **_verify_kwargs(opts))
    contour_gap = max(
        float(np.abs(eval_via_contour(sol.f, a, nodes=opts["nodes"]).array - eval_rational_ring(sol.f, a).array).max())
        for a in prob.points
    )
    extra = {
        "contour_max_abs_diff": contour_gap,
        "identity_residual": check_theta_identity(prob, sol.theta, opts["k_report"]),
        "solution": rational_to_dict(sol.f),
    }
    digest = _digest(*parts, dumps(opts).encode())
    _write(dumps(_report_doc("solve", digest, opts, report, extra)), args.output)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    raw, obj = _read_json(args.problem)
    prob, _, file_opts = load_problem(obj)
    craw, cobj = _read_json(args.candidate)
    if isinstance(cobj, dict) and "solution" in cobj:
        cobj = cobj["solution"]
    f = rational_from_dict(cobj)
    if f.context != prob.context:
        raise FormatError(f"candidate context {f.context} differs from problem context {prob.context}")
    if f.shape != (1, 1):
        raise FormatError("candidate solution must be scalar (1x1)")
    opts = _options(file_opts, args)
    report = verify_solution(prob, f, **_verify_kwargs(opts))
    digest = _digest(raw, craw, dumps(opts).encode())
    _write(dumps(_report_doc("verify", digest, opts, report, {})), args.output)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_const(args) -> int:
    print(f"{vage_constant(args.q):.12g}")
    return EXIT_OK


def cmd_norm(args) -> int:
    _, obj = _read_json(args.element)
    F = element_from_dict(obj)
    print(f"dual {norm_dual(F, args.k):.12g}")
    print(f"test {norm_test(F, args.k):.12g}")
    return EXIT_OK


def cmd_eval(args) -> int:
    _, fobj = _read_json(args.rational)
    _, robj = _read_json(args.element)
    F = rational_from_dict(fobj)
    r = element_from_dict(robj)
    value = eval_rational_ring(F, r)
    k = args.k_report if args.k_report is not None else K_REPORT
    offset = r - r.constant
    out = {
        "value": matrix_to_dict(value),
        "series_radius_proxy": {"level": k, "value": vage_constant(2) * norm_dual(offset, k)},
    }
    if args.nodes is not None:
        oracle = eval_via_contour(F, r, nodes=args.nodes)
        out["contour_nodes"] = args.nodes
        out["contour_max_abs_diff"] = float(np.abs(oracle.array - value.array).max())
    _write(dumps(out), args.output)
    return EXIT_OK


def cmd_project(args) -> int:
    _, obj = _read_json(args.object)
    if isinstance(obj, dict) and "solution" in obj:
        obj = obj["solution"]
    _write(dumps(to_dict(project(from_dict(obj)))), args.output)
    return EXIT_OK


def cmd_fixture(args) -> int:
    rng = np.random.default_rng(args.seed)
    ctx = TruncationContext(args.m, args.d)
    prob = random_problem(rng, args.n, ctx)
    doc = {
        "context": {"m": args.m, "d": args.d},
        "points": [{"terms": element_to_dict(x)["terms"]} for x in prob.points],
        "targets": [{"terms": element_to_dict(x)["terms"]} for x in prob.targets],
    }
    _write(dumps(doc), args.output)
    return EXIT_OK


def _add_tolerance_flags(p: argparse.ArgumentParser):
    p.add_argument("--k-report", dest="k_report", type=float, help="dual-norm level for residuals (default 4)")
    p.add_argument("--tol", type=float, help="residual tolerance (default 1e-8)")
    p.add_argument("--grid", type=int, help="sample count for the Schur check (default 200)")
    p.add_argument("--radius", type=float, help="radius of the Schur sampling circle (default 0.95)")
    p.add_argument("--eps-schur", dest="eps_schur", type=float, help="contractivity margin (default 1e-3)")
    p.add_argument("--eps-pd", dest="eps_pd", type=float, help="positive-definiteness floor (default 1e-10)")
    p.add_argument("--nodes", type=int, help="quadrature nodes for the contour cross-check (default 512)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wickring", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an interpolation problem and verify the result")
    p.add_argument("problem")
    p.add_argument("--parameter", help="JSON list of parameter coefficients (overrides the problem file)")
    p.add_argument("-o", "--output")
    _add_tolerance_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="verify a candidate solution against a problem")
    p.add_argument("problem")
    p.add_argument("candidate", help="rational JSON, or a report produced by 'solve'")
    p.add_argument("-o", "--output")
    _add_tolerance_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("const", help="print the constant A(q)")
    p.add_argument("q", type=float)
    p.set_defaults(func=cmd_const)

    p = sub.add_parser("norm", help="print dual and test norms of an element")
    p.add_argument("element")
    p.add_argument("--k", type=float, default=1.0)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("eval", help="evaluate a rational function at a ring point")
    p.add_argument("rational")
    p.add_argument("element")
    p.add_argument("--nodes", type=int, help="also run the contour-integral oracle with this many nodes")
    p.add_argument("--k-report", dest="k_report", type=float)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("project", help="emit the evaluation at the origin of a serialized object")
    p.add_argument("object")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("fixture", help="write a random solvable problem file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--d", type=int, default=4)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_fixture)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NotStrictlyPositive as exc:
        print(f"error: problem not solvable: {exc}", file=sys.stderr)
        return EXIT_UNSOLVABLE
    except (InputError, FormatError, ProblemError, NotSchur) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
