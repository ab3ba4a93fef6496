"""Integer-domain tightening of stem and loop relations.

Only per-row rounding is done here (one Chvatal-Gomory step per
inequality); the result has the same integer points as the input but is in
general still larger than the integer hull.
"""

from __future__ import annotations

import math

from .core import AffineTerm, Constraint, LassoProgram, Polyhedron, primitive_scale

FALSE_ROW = Constraint(AffineTerm.const(1))  # 0 <= -1


def strict_to_nonstrict_int(p: Polyhedron) -> Polyhedron:
    """Rewrite ``t < 0`` as ``t + 1 <= 0`` after scaling ``t`` to integers."""
    rows = []
    for c in p.constraints:
        if c.strict:
            term = c.term.scale(primitive_scale(c.term))
            rows.append(Constraint(term + 1))
        else:
            rows.append(c)
    return Polyhedron(p.variables, tuple(rows))


def _tighten_row(c: Constraint) -> Constraint:
    term = c.term
    if term.is_constant():
        return FALSE_ROW if term.constant > 0 else c
    # a.x + k <= 0 with a integral and coprime: a.x <= floor(-k).
    term = term.scale(primitive_scale(term, include_constant=False))
    bound = math.floor(-term.constant)
    return Constraint(AffineTerm(term.coeffs, -bound))


def gcd_tighten(p: Polyhedron) -> Polyhedron:
    """Divide each row by its coefficient gcd and round the bound down.

    An integer-infeasible row turns into the constant row ``0 <= -1``.
    """
    if p.has_strict:
        raise ValueError("gcd_tighten expects non-strict rows; run strict_to_nonstrict_int")
    return Polyhedron(p.variables, tuple(_tighten_row(c) for c in p.constraints))


def integer_infeasible(p: Polyhedron) -> bool:
    """True when tightening exposed a constant contradiction."""
    return any(c.term.is_constant() and c.term.constant > 0 for c in p.constraints)


def prepare_int(program: LassoProgram, tighten: str = "gcd") -> LassoProgram:
    if tighten not in ("gcd", "none"):
        raise ValueError(f"unknown tightening mode {tighten!r}")
    stem = strict_to_nonstrict_int(program.stem)
    loop = strict_to_nonstrict_int(program.loop)
    if tighten == "gcd":
        stem, loop = gcd_tighten(stem), gcd_tighten(loop)
    return program.with_relations(stem, loop)


__all__ = ["strict_to_nonstrict_int", "gcd_tighten", "integer_infeasible", "prepare_int",
           "FALSE_ROW"]
