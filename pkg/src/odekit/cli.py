"""Command-line surface: symmetry solving, singularity test, corpus runner.

Exit codes: 0 success, 1 analysis-level failure (corpus mismatch, internal
verification failure), 2 usage or parse error.  Diagnostics go to stderr;
`--format json` emits a fixed schema documented in schema.md.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .corpus import CorpusError, run_corpus
from .expressions import ParseError, format_poly, ode_problem, parse_xy_poly
from .lie import VectorField, classify_pair, is_symmetry, lie_bracket, prolong
from .painleve import ARBITRARY, painleve_test
from .solver import default_degree, solve_point_symmetries

__all__ = ["main", "run_cli"]


def _rat(value) -> str:
    return str(value)


def _parse_params(pairs):
    params = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise ValueError(f"--param expects name=p/q, got {pair!r}")
        name, value = pair.split("=", 1)
        params[name.strip()] = Fraction(value.strip())
    return params


def _field_from_text(text: str) -> VectorField:
    depth = 0
    split = None
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            split = i
            break
    if split is None:
        raise ValueError(f"vector field needs 'xi,eta': {text!r}")
    return VectorField(
        parse_xy_poly(text[:split]), parse_xy_poly(text[split + 1:])
    )


def _emit(payload: dict, fmt: str, text_lines):
    if fmt == "json":
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines:
            print(line)


def _branch_payload(branch, dep: str, indep: str) -> dict:
    if isinstance(branch.a0, Fraction):
        a0 = _rat(branch.a0)
    elif branch.a0 == ARBITRARY:
        a0 = "arbitrary"
    else:
        a0 = "unresolved"
    constraint = None
    if not isinstance(branch.a0, Fraction) and branch.a0 != ARBITRARY:
        constraint = format_poly(branch.a0.poly, dep=dep, indep=indep)
    series = None
    if branch.series is not None:
        series = {
            "leading_exponent": _rat(branch.series.leading_exponent),
            "step": _rat(branch.series.step),
            "coefficients": [
                format_poly(c, dep=dep, indep=indep) for c in branch.series.coefficients
            ],
        }
    return {
        "p": "unresolved" if branch.p is None else _rat(branch.p),
        "a0": a0,
        "resonances": [
            _rat(value)
            for value, mult in branch.resonances
            for _ in range(mult)
        ],
        "direction": branch.direction or "none",
        "delta": None if branch.delta is None else _rat(branch.delta),
        "verdict": branch.verdict,
        "reason": branch.reason,
        "arbitrary_constants": branch.arbitrary_constants,
        "generic": branch.generic,
        "constraint": constraint,
        "series": series,
    }


def _cmd_symmetries(args, fmt: str) -> int:
    problem = ode_problem(args.equation, _parse_params(args.param))
    degree = args.degree if args.degree is not None else default_degree()
    basis = solve_point_symmetries(problem, degree)
    fields = []
    for g in basis.fields:
        holds, _ = is_symmetry(g, problem)
        fields.append(
            {
                "xi": format_poly(g.xi, dep=problem.dep, indep=problem.indep),
                "eta": format_poly(g.eta, dep=problem.dep, indep=problem.indep),
                "residual_zero": holds,
            }
        )
    payload = {
        "command": "symmetries",
        "equation": problem.format(),
        "degree": degree,
        "ansatz": f"polynomial, degree <= {degree} in each variable",
        "dimension": basis.dimension,
        "fields": fields,
    }
    lines = [
        f"equation: {problem.format()}",
        f"ansatz: polynomial coefficients, degree <= {degree} in each of "
        f"({problem.indep}, {problem.dep})",
        f"dimension: {basis.dimension} (within the stated ansatz; "
        "no claim is made beyond it)",
    ]
    for i, info in enumerate(fields, start=1):
        status = "residual 0" if info["residual_zero"] else "RESIDUAL NONZERO"
        lines.append(f"G{i}: xi = {info['xi']}, eta = {info['eta']}  [{status}]")
    _emit(payload, fmt, lines)
    return 0 if all(f["residual_zero"] for f in fields) else 1


def _cmd_painleve(args, fmt: str) -> int:
    problem = ode_problem(args.equation, _parse_params(args.param))
    report = painleve_test(problem, orders=args.orders, lenient=args.lenient)
    payload = {
        "command": "painleve",
        "equation": problem.format(),
        "overall": report.overall,
        "generic_branch_found": report.generic_branch_found,
        "branches": [
            _branch_payload(b, problem.dep, problem.indep) for b in report.branches
        ],
    }
    lines = [f"equation: {problem.format()}", "branches:"]
    if not report.branches:
        lines.append("  (none)")
    for b in payload["branches"]:
        res = "{" + ", ".join(b["resonances"]) + "}"
        extra = f" [{b['reason']}]" if b["reason"] else ""
        lines.append(
            f"  p = {b['p']}  a0 = {b['a0']}  resonances = {res}  "
            f"direction = {b['direction']}  verdict = {b['verdict']}{extra}"
        )
    lines.append(f"overall: {report.overall}")
    lines.append(
        "generic branch found: " + ("yes" if report.generic_branch_found else "no")
    )
    _emit(payload, fmt, lines)
    return 0


def _cmd_prolong(args, fmt: str) -> int:
    g = VectorField(parse_xy_poly(args.xi), parse_xy_poly(args.eta))
    ext = prolong(g, args.order)
    coeffs = [format_poly(c) for c in ext.coefficients]
    payload = {
        "command": "prolong",
        "xi": format_poly(g.xi),
        "eta": format_poly(g.eta),
        "order": args.order,
        "coefficients": coeffs,
    }
    lines = [f"eta[{k}] = {text}" for k, text in enumerate(coeffs, start=1)]
    _emit(payload, fmt, lines)
    return 0


def _cmd_bracket(args, fmt: str) -> int:
    g1 = _field_from_text(args.field1)
    g2 = _field_from_text(args.field2)
    b = lie_bracket(g1, g2)
    payload = {
        "command": "bracket",
        "result": {"xi": format_poly(b.xi), "eta": format_poly(b.eta)},
    }
    lines = [f"[G1, G2] = {format_poly(b.xi)}, {format_poly(b.eta)}"]
    _emit(payload, fmt, lines)
    return 0


def _cmd_classify(args, fmt: str) -> int:
    g1 = _field_from_text(args.field1)
    g2 = _field_from_text(args.field2)
    kind, (n1, n2) = classify_pair(g1, g2)
    payload = {
        "command": "classify",
        "type": kind,
        "normalized": [
            {"xi": format_poly(n1.xi), "eta": format_poly(n1.eta)},
            {"xi": format_poly(n2.xi), "eta": format_poly(n2.eta)},
        ],
    }
    lines = [
        f"Type {kind}",
        f"G1 = {n1.format()}",
        f"G2 = {n2.format()}",
    ]
    _emit(payload, fmt, lines)
    return 0


def _cmd_corpus(args, fmt: str) -> int:
    try:
        with open(args.file, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    passed, failed, lines = run_corpus(text)
    payload = {
        "command": "corpus",
        "passed": passed,
        "failed": failed,
        "lines": lines,
    }
    _emit(payload, fmt, lines)
    return 1 if failed else 0


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    # SUPPRESS so a value parsed at the top level survives subparser defaults
    shared.add_argument(
        "--format", choices=("text", "json"), default=argparse.SUPPRESS
    )
    shared.add_argument("--seed-order", choices=("grlex",), default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="odekit",
        description="Exact Lie point symmetries and Painleve (ARS) singularity test "
        "for polynomial nonlinear ODEs.",
        parents=[shared],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("symmetries", parents=[shared], help="solve the determining equations")
    p.add_argument("equation")
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--param", action="append", metavar="NAME=P/Q")
    p.set_defaults(func=_cmd_symmetries)

    p = sub.add_parser("painleve", parents=[shared], help="run the singularity test")
    p.add_argument("equation")
    p.add_argument("--orders", type=int, default=None)
    p.add_argument("--lenient", action="store_true")
    p.add_argument("--param", action="append", metavar="NAME=P/Q")
    p.set_defaults(func=_cmd_painleve)

    p = sub.add_parser("prolong", parents=[shared], help="prolongation coefficients")
    p.add_argument("xi")
    p.add_argument("eta")
    p.add_argument("--order", type=int, required=True)
    p.set_defaults(func=_cmd_prolong)

    p = sub.add_parser("bracket", parents=[shared], help="Lie bracket of two fields")
    p.add_argument("field1")
    p.add_argument("field2")
    p.set_defaults(func=_cmd_bracket)

    p = sub.add_parser("classify", parents=[shared], help="two-dimensional algebra type")
    p.add_argument("field1")
    p.add_argument("field2")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("corpus", parents=[shared], help="corpus regression runner")
    corpus_sub = p.add_subparsers(dest="corpus_command", required=True)
    runp = corpus_sub.add_parser("run", parents=[shared])
    runp.add_argument("file")
    runp.set_defaults(func=_cmd_corpus)

    return parser


def run_cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    fmt = getattr(args, "format", None) or "text"
    try:
        return args.func(args, fmt)
    except (ParseError, CorpusError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())
