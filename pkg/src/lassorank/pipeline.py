"""End-to-end synthesis: parse, tighten, generate, eliminate, solve, self-check."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from . import checker
from .core import (Domain, Infeasible, LassoProgram, PreconditionViolated, RankingFunction,
                   Success, SupportingInvariant, SynthesisResult, parse_rational)
from .farkas import assemble_system, certificates_from
from .intprep import prepare_int
from .lp import EQ, LinearConstraint, LinearSystem, feasible, polyhedron_system
from .parser import ParseError, parse_program
from .transform import (R, R0, S, S0, TemplateImplication, build_or_to_plus,
                        coefficient_values)

log = logging.getLogger(__name__)

EXIT_SUCCESS, EXIT_INFEASIBLE, EXIT_INPUT_ERROR, EXIT_PRECONDITION = 0, 1, 2, 3
_EXIT_CODES = {"success": EXIT_SUCCESS, "infeasible": EXIT_INFEASIBLE,
               "precondition_violated": EXIT_PRECONDITION}


class SelfCheckError(RuntimeError):
    """A synthesized argument failed independent verification (a bug)."""


@dataclass(frozen=True)
class AnalysisConfig:
    domain_override: Domain | None = None
    int_tighten: str = "gcd"
    emit: str = "text"
    print_constraints: bool = False
    self_check: bool = True

    def __post_init__(self):
        if self.int_tighten not in ("gcd", "none"):
            raise ValueError("int_tighten must be 'gcd' or 'none'")
        if self.emit not in ("text", "json"):
            raise ValueError("emit must be 'text' or 'json'")


def prepare(program: LassoProgram, cfg: AnalysisConfig = AnalysisConfig()) -> LassoProgram:
    """Apply the domain override and, for integer programs, tightening."""
    if cfg.domain_override is not None:
        program = program.with_domain(cfg.domain_override)
    if program.domain is Domain.INT:
        program = prepare_int(program, cfg.int_tighten)
    return program


def check_precondition(p: LassoProgram) -> bool:
    """Is ``stem(x, x') /\\ loop(x', x'')`` satisfiable?"""
    stem = polyhedron_system(p.stem, lambda v: (v.name, 1 if v.primed else 0))
    loop = polyhedron_system(p.loop, lambda v: (v.name, 2 if v.primed else 1))
    return bool(feasible(stem + loop))


def _satisfiable(poly) -> bool:
    return bool(feasible(polyhedron_system(poly)))


def _vacuous(p: LassoProgram, stem_sat: bool) -> Success:
    # Loop empty: f = 0 with I: 0 >= 0.  Stem empty: I: -1 >= 0, which makes
    # every loop implication vacuous as well.
    f = RankingFunction({}, 0)
    inv = SupportingInvariant({}, 0 if stem_sat else -1)
    templates = build_or_to_plus(p)
    system = assemble_system(p, check_lhs=False, templates=templates)
    pins = tuple(LinearConstraint({u: 1}, EQ, v)
                 for u, v in coefficient_values(f, inv, p.program_vars).items())
    out = feasible(system.with_constraints(*pins))
    if not out:
        # Cannot happen: an empty polyhedron always has a multiplier vector
        # with lam.A == 0 and lam.b < 0, which can be scaled to any bound.
        raise SelfCheckError("no multipliers for the vacuous argument")
    return Success(f, inv, Fraction(1), certificates_from(out.assignment, templates),
                   vacuous=True, program=p)


def synthesize(program: LassoProgram, cfg: AnalysisConfig = AnalysisConfig()) -> SynthesisResult:
    p = prepare(program, cfg)
    stem_sat, loop_sat = _satisfiable(p.stem), _satisfiable(p.loop)
    if not (stem_sat and loop_sat):
        log.info("stem or loop unsatisfiable; returning a vacuous argument")
        result = _vacuous(p, stem_sat)
    elif not check_precondition(p):
        return PreconditionViolated("stem followed by loop has no execution")
    else:
        templates = build_or_to_plus(p)
        system = assemble_system(p, templates=templates)
        out = feasible(system)
        if not out:
            return Infeasible("Or-to-Plus constraints have no solution")
        a = out.assignment
        xs = p.program_vars
        result = Success(
            RankingFunction({v: a[R(v)] for v in xs}, a[R0]),
            SupportingInvariant({v: a[S(v)] for v in xs}, a[S0]),
            Fraction(1),
            certificates_from(a, templates),
            program=p,
        )
    if cfg.self_check:
        report = checker.check_result(p, result)
        if not report.overall:
            raise SelfCheckError(f"self-check failed: {report}")
    return result


@dataclass
class Analysis:
    exit_code: int
    result: SynthesisResult | None = None
    error: ParseError | None = None
    program: LassoProgram | None = None
    templates: list[TemplateImplication] = field(default_factory=list)
    system: LinearSystem | None = None


def analyze(source: str, cfg: AnalysisConfig = AnalysisConfig()) -> Analysis:
    try:
        program = parse_program(source)
    except ParseError as exc:
        return Analysis(EXIT_INPUT_ERROR, error=exc)
    result = synthesize(program, cfg)
    analysis = Analysis(_EXIT_CODES[result.status], result=result, program=prepare(program, cfg))
    if cfg.print_constraints:
        analysis.templates = build_or_to_plus(analysis.program)
        analysis.system = assemble_system(analysis.program, check_lhs=False,
                                          templates=analysis.templates)
    return analysis


# -- argument documents --------------------------------------------------------

ARGUMENT_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["ranking", "invariant", "delta"],
    "properties": {
        "ranking": {"$ref": "#/$defs/form"},
        "invariant": {"$ref": "#/$defs/form"},
        "delta": {"$ref": "#/$defs/rational"},
    },
    "$defs": {
        "rational": {"oneOf": [{"type": "string", "pattern": r"^\s*-?\d+\s*(/\s*\d+\s*)?$"},
                               {"type": "integer"}]},
        "form": {
            "type": "object",
            "required": ["coeffs", "const"],
            "properties": {
                "coeffs": {"type": "object",
                           "additionalProperties": {"$ref": "#/$defs/rational"}},
                "const": {"$ref": "#/$defs/rational"},
            },
        },
    },
}


class ArgumentError(ValueError):
    """The ranking/invariant document does not match the schema."""


def _form(doc: dict, cls, program_vars):
    unknown = set(doc["coeffs"]) - set(program_vars)
    if unknown:
        raise ArgumentError(f"unknown variable {sorted(unknown)[0]!r} in argument")
    return cls({k: parse_rational(v) for k, v in doc["coeffs"].items()},
               parse_rational(doc["const"]))


def load_argument(doc: Any, program_vars) -> tuple[RankingFunction, SupportingInvariant, Fraction]:
    import jsonschema

    try:
        jsonschema.validate(doc, ARGUMENT_SCHEMA)
        f = _form(doc["ranking"], RankingFunction, program_vars)
        inv = _form(doc["invariant"], SupportingInvariant, program_vars)
        delta = parse_rational(doc["delta"])
    except jsonschema.ValidationError as exc:
        raise ArgumentError(exc.message) from exc
    except (ValueError, ZeroDivisionError) as exc:
        raise ArgumentError(str(exc)) from exc
    if delta <= 0:
        raise ArgumentError("delta must be positive")
    return f, inv, delta


@dataclass
class Check:
    exit_code: int
    report: checker.CheckReport | None = None
    error: Exception | None = None
    or_to_plus: tuple[bool, ...] | None = None
    program: LassoProgram | None = None


def check(source: str, argument: Any, cfg: AnalysisConfig = AnalysisConfig()) -> Check:
    """Verify a user-supplied ranking function and invariant against the BMS constraints."""
    try:
        program = prepare(parse_program(source), cfg)
        f, inv, delta = load_argument(argument, program.program_vars)
    except (ParseError, ArgumentError) as exc:
        return Check(EXIT_INPUT_ERROR, error=exc)
    bms = checker.verify_bms(program, f, inv, delta).bms
    report = checker.CheckReport(bms, nondecreasing=None)
    return Check(EXIT_SUCCESS if report.overall else EXIT_INFEASIBLE, report,
                 or_to_plus=checker.verify_or_to_plus_ground(program, f, inv, delta),
                 program=program)


def result_document(result: SynthesisResult) -> dict[str, Any]:
    from .core import format_rational as fr

    doc: dict[str, Any] = {"status": result.status}
    if isinstance(result, Success):
        def form(x):
            return {"coeffs": {k: fr(v) for k, v in x.coeffs.items()}, "const": fr(x.constant)}
        doc.update(
            ranking=form(result.ranking),
            invariant=form(result.invariant),
            delta=fr(result.delta),
            certificates=[[fr(x) for x in c.lambdas] for c in result.certificates],
            vacuous=result.vacuous,
        )
    elif result.reason:
        doc["reason"] = result.reason
    return doc


__all__ = ["AnalysisConfig", "Analysis", "Check", "SelfCheckError", "ArgumentError",
           "prepare", "check_precondition", "synthesize", "analyze", "check",
           "load_argument", "result_document", "ARGUMENT_SCHEMA",
           "EXIT_SUCCESS", "EXIT_INFEASIBLE", "EXIT_INPUT_ERROR", "EXIT_PRECONDITION"]
