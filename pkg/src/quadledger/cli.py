"""Command-line entry point.

Subcommands: ``verify`` (run the claim ledger), ``integrate`` (ad-hoc
one-dimensional integrals), ``sum`` (series over odd integers), ``claims``
(list the catalog with citations).

Exit codes: 0 success, 1 claim failure, 2 usage or manifest error,
3 non-convergence or evaluation failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Sequence

from . import expr as expr_mod
from .expr import EvalError, ParseError
from .ledger import ManifestError, Report, builtin_claims, load_manifest, run_all
from .quadcore import (
    EvaluationError,
    IntegrationDomain,
    InvalidDomain,
    NonConvergence,
    QuadConfig,
    integrate,
)
from .series import (
    SeriesFamily,
    SeriesSpec,
    ToleranceUnreachable,
    sum_series,
)

EXIT_OK = 0
EXIT_CLAIM_FAILURE = 1
EXIT_USAGE = 2
EXIT_NO_CONVERGENCE = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadledger",
        description="Numerically verify integral and series identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run the claim ledger")
    verify.add_argument("--tol", type=float, default=None,
                        help="override both claim tolerance and engine tolerances")
    verify.add_argument("--max-level", type=int, default=None,
                        help="quadrature refinement depth")
    verify.add_argument("--jobs", type=int, default=1,
                        help="number of concurrent claim workers")
    verify.add_argument("--json", action="store_true",
                        help="emit the JSON report instead of the table")
    verify.add_argument("--claim", action="append", default=None, metavar="ID",
                        help="run only the given claim id (repeatable)")
    verify.add_argument("--manifest", default=None, metavar="PATH",
                        help="load claims from a manifest file instead of the builtins")

    integ = sub.add_parser("integrate", help="integrate an expression")
    integ.add_argument("expression")
    integ.add_argument("--var", required=True, choices=expr_mod.VARIABLES,
                       help="integration variable")
    integ.add_argument("--from", dest="lower", required=True,
                       help="lower bound (finite real)")
    integ.add_argument("--to", dest="upper", required=True,
                       help="upper bound (real or 'inf')")
    integ.add_argument("--split", action="append", default=[], metavar="POINT",
                       help="interior singular/removable point (repeatable)")
    integ.add_argument("--tol", type=float, default=None)
    integ.add_argument("--max-level", type=int, default=None)
    integ.add_argument("--json", action="store_true")

    sum_cmd = sub.add_parser("sum", help="sum a series over odd integers")
    sum_cmd.add_argument("family", choices=[f.value for f in SeriesFamily])
    sum_cmd.add_argument("exponent", type=int)
    sum_cmd.add_argument("--tol", type=float, default=1e-12)

    sub.add_parser("claims", help="list the builtin claims with citations")
    return parser


def _engine_config(tol: float | None, max_level: int | None) -> QuadConfig:
    kwargs = {}
    if tol is not None:
        kwargs["abs_tol"] = tol
        kwargs["rel_tol"] = tol
    if max_level is not None:
        kwargs["max_level"] = max_level
    return QuadConfig(**kwargs)


def _fail_usage(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _cmd_verify(args: argparse.Namespace) -> int:
    try:
        config = _engine_config(args.tol, args.max_level)
    except ValueError as exc:
        return _fail_usage(str(exc))
    if args.jobs < 1:
        return _fail_usage("--jobs must be at least 1")

    if args.manifest is not None:
        try:
            with open(args.manifest, "r", encoding="utf-8") as fh:
                claims = load_manifest(fh.read())
        except OSError as exc:
            return _fail_usage(f"cannot read manifest: {exc}")
        except ManifestError as exc:
            return _fail_usage(f"manifest: {exc}")
    else:
        claims = list(builtin_claims())

    if args.claim:
        by_id = {c.id: c for c in claims}
        missing = [cid for cid in args.claim if cid not in by_id]
        if missing:
            return _fail_usage(f"unknown claim id: {', '.join(missing)}")
        claims = [by_id[cid] for cid in args.claim]

    if args.tol is not None:
        from dataclasses import replace
        claims = [replace(c, tolerance=args.tol) for c in claims]

    report = run_all(claims, config, parallelism=args.jobs)
    print(report.to_json() if args.json else report.to_table())
    if any(not r.converged for r in report.results):
        return EXIT_NO_CONVERGENCE
    if not report.all_passed:
        return EXIT_CLAIM_FAILURE
    return EXIT_OK


def _cmd_integrate(args: argparse.Namespace) -> int:
    try:
        tree = expr_mod.parse(args.expression)
    except ParseError as exc:
        return _fail_usage(f"bad expression: {exc}")
    free = expr_mod.free_variables(tree)
    if not free <= {args.var}:
        return _fail_usage(
            f"expression uses {sorted(free - {args.var})} besides --var {args.var}")

    def bound(text: str, allow_inf: bool) -> float:
        if text == "inf":
            if not allow_inf:
                raise ValueError("lower bound must be finite")
            return math.inf
        return float(text)

    try:
        lower = bound(args.lower, allow_inf=False)
        upper = bound(args.upper, allow_inf=True)
        splits = tuple(sorted(float(s) for s in args.split))
        domain = IntegrationDomain(lower, upper, splits)
        config = _engine_config(args.tol, args.max_level)
    except (ValueError, InvalidDomain) as exc:
        return _fail_usage(str(exc))

    fn = expr_mod.compile_expr(tree, (args.var,))
    try:
        result = integrate(fn, domain, config)
    except NonConvergence as exc:
        print(f"did not converge: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (EvaluationError, EvalError) as exc:
        print(f"evaluation failed: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE

    if args.json:
        import json
        print(json.dumps({
            "value": result.value,
            "error_estimate": result.error_estimate,
            "evaluations": result.evaluations,
            "converged": result.converged,
        }, indent=2))
    else:
        print(f"value          = {result.value!r}")
        print(f"error_estimate = {result.error_estimate:.3e}")
        print(f"evaluations    = {result.evaluations}")
        print(f"converged      = {'yes' if result.converged else 'no'}")
    return EXIT_OK


def _cmd_sum(args: argparse.Namespace) -> int:
    if args.exponent < 2:
        return _fail_usage("exponent must be at least 2 (the series diverges below)")
    if not args.tol > 0:
        return _fail_usage("--tol must be positive")
    spec = SeriesSpec(SeriesFamily(args.family), args.exponent)
    try:
        result = sum_series(spec, args.tol)
    except ToleranceUnreachable as exc:
        print(f"tolerance unreachable: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    print(f"value      = {result.value!r}")
    print(f"terms_used = {result.terms_used}")
    print(f"tail_bound = {result.tail_bound:.3e}")
    return EXIT_OK


def _cmd_claims(_args: argparse.Namespace) -> int:
    for claim in builtin_claims():
        print(f"{claim.id}  {claim.citation}")
        print(f"       {claim.description}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; normalize other codes
        return EXIT_USAGE if exc.code else EXIT_OK
    handlers = {
        "verify": _cmd_verify,
        "integrate": _cmd_integrate,
        "sum": _cmd_sum,
        "claims": _cmd_claims,
    }
    return handlers[args.command](args)


def console_main() -> None:
    raise SystemExit(main())
