"""Synthesis of linear ranking functions with linear supporting invariants for lasso programs."""

from .core import (AffineTerm, Constraint, Domain, FarkasCertificate, Infeasible, LassoProgram,
                   Polyhedron, PreconditionViolated, RankingFunction, Success, SupportingInvariant,
                   SynthesisResult, VarRef)
from .parser import ParseError, format_program, parse_program
from .pipeline import AnalysisConfig, analyze, check, check_precondition, synthesize

__all__ = [
    "AffineTerm", "Constraint", "Domain", "FarkasCertificate", "Infeasible", "LassoProgram",
    "Polyhedron", "PreconditionViolated", "RankingFunction", "Success", "SupportingInvariant",
    "SynthesisResult", "VarRef", "ParseError", "format_program", "parse_program",
    "AnalysisConfig", "analyze", "check", "check_precondition", "synthesize",
]
