"""``lassorank`` command line.

Exit codes: 0 success, 1 no argument found (or check failed),
2 input error, 3 stem followed by loop has no execution.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Sequence

from .core import Domain, Success, format_affine, format_rational
from .pipeline import (EXIT_INFEASIBLE, EXIT_INPUT_ERROR, AnalysisConfig, SelfCheckError,
                       analyze, check, result_document)

log = logging.getLogger("lassorank")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lassorank",
                                     description="Linear ranking functions for lasso programs.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="program in .lasso format")
        p.add_argument("--domain", choices=["real", "int"], help="override the file's domain")
        p.add_argument("--int-tighten", choices=["gcd", "none"], default="gcd",
                       help="integer preprocessing (default: gcd)")
        p.add_argument("--emit", choices=["text", "json"], default="text")

    a = sub.add_parser("analyze", help="synthesize a ranking function and supporting invariant")
    common(a)
    a.add_argument("--print-constraints", action="store_true",
                   help="also print the templates and the linear system")
    a.add_argument("--no-self-check", dest="self_check", action="store_false",
                   help="skip independent verification of the result")

    c = sub.add_parser("check", help="verify a ranking function and invariant")
    common(c)
    c.add_argument("--argument", required=True, help="JSON document with ranking/invariant/delta")
    return parser


def _config(args) -> AnalysisConfig:
    return AnalysisConfig(
        domain_override=Domain(args.domain) if args.domain else None,
        int_tighten=args.int_tighten,
        emit=args.emit,
        print_constraints=getattr(args, "print_constraints", False),
        self_check=getattr(args, "self_check", True),
    )


def _input_error(emit: str, message: str, **extra) -> int:
    if emit == "json":
        print(json.dumps({"status": "input_error", "message": message, **extra}), file=sys.stderr)
    else:
        print(f"error: {message}", file=sys.stderr)
    return EXIT_INPUT_ERROR


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _system_document(system) -> dict:
    return {
        "unknowns": [str(u) for u in system.unknowns],
        "nonneg": sorted(str(u) for u in system.nonneg),
        "constraints": [
            {"coeffs": {str(k): format_rational(v) for k, v in c.coeffs.items()},
             "relation": c.relation, "rhs": format_rational(c.rhs)}
            for c in system.constraints
        ],
    }


def _run_analyze(args, cfg: AnalysisConfig) -> int:
    analysis = analyze(_read(args.file), cfg)
    if analysis.error is not None:
        e = analysis.error
        return _input_error(cfg.emit, str(e), line=e.line, column=e.column)
    result = analysis.result
    if cfg.emit == "json":
        doc = result_document(result)
        if cfg.print_constraints:
            doc["constraints"] = {"templates": [str(t) for t in analysis.templates],
                                  "system": _system_document(analysis.system)}
        print(json.dumps(doc, indent=2))
        return analysis.exit_code

    if cfg.print_constraints:
        print("# Or-to-Plus constraints")
        for t in analysis.templates:
            print(t)
        print("# linear system after Farkas")
        for c in analysis.system.constraints:
            print(c)
        print("# nonneg:", ", ".join(sorted(str(u) for u in analysis.system.nonneg)))
    print(f"status: {result.status}")
    if isinstance(result, Success):
        print(f"ranking function: f = {format_affine(result.ranking.term())}")
        print(f"supporting invariant: {result.invariant}")
        print(f"delta: {result.delta}")
        if result.vacuous:
            print("note: stem or loop is unsatisfiable; the argument is vacuous")
        for i, cert in enumerate(result.certificates, 1):
            print(f"certificate phi{i}: [{', '.join(map(str, cert.lambdas))}]")
    elif result.reason:
        print(f"reason: {result.reason}")
    return analysis.exit_code


def _run_check(args, cfg: AnalysisConfig) -> int:
    try:
        document = json.loads(_read(args.argument))
    except json.JSONDecodeError as exc:
        return _input_error(cfg.emit, f"{args.argument}: {exc}")
    outcome = check(_read(args.file), document, cfg)
    if outcome.error is not None:
        return _input_error(cfg.emit, str(outcome.error))
    verdicts = dict(zip(("bms1", "bms2", "bms3", "bms4"), outcome.report.bms))
    if cfg.emit == "json":
        print(json.dumps({"valid": outcome.report.overall, "bms": verdicts,
                          "or_to_plus": dict(zip(("phi1", "phi2", "phi3", "phi4"),
                                                 outcome.or_to_plus))}, indent=2))
    else:
        for name, ok in verdicts.items():
            print(f"{name}: {'valid' if ok else 'INVALID'}")
        print(f"argument: {'accepted' if outcome.report.overall else 'rejected'}")
    return outcome.exit_code


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    cfg = _config(args)
    try:
        if args.command == "analyze":
            return _run_analyze(args, cfg)
        return _run_check(args, cfg)
    except (OSError, UnicodeDecodeError) as exc:
        return _input_error(cfg.emit, f"{args.file}: {exc}")
    except SelfCheckError as exc:
        log.error("%s", exc)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
