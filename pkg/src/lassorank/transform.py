"""Constraint generation: Or-to-Plus templates and ground BMS implications.

A template implication reads ``forall v. lhs(v) -> rhs(v) >= bound`` where the
coefficients of ``rhs`` are affine in the unknown ranking/invariant
coefficients.  Ground implications are the same shape with numbers only.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .core import (AffineTerm, Constraint, LassoProgram, Number, Polyhedron,
                   RankingFunction, SupportingInvariant, VarRef, as_fraction,
                   format_affine, format_constraint)


@dataclass(frozen=True, order=True)
class UnknownRef:
    """A ranking (``r``/``r0``) or invariant (``s``/``s0``) coefficient."""

    kind: str
    var: str = ""

    def __post_init__(self):
        if self.kind not in ("r", "r0", "s", "s0"):
            raise ValueError(f"unknown coefficient kind {self.kind!r}")
        if (self.kind in ("r", "s")) != bool(self.var):
            raise ValueError("r and s need a variable; r0 and s0 take none")

    def __str__(self):
        return f"{self.kind}_{self.var}" if self.var else self.kind


def R(var: str) -> UnknownRef:
    return UnknownRef("r", var)


def S(var: str) -> UnknownRef:
    return UnknownRef("s", var)


R0 = UnknownRef("r0")
S0 = UnknownRef("s0")


def unknowns_for(program_vars: Sequence[str]) -> tuple[UnknownRef, ...]:
    return tuple(R(v) for v in program_vars) + (R0,) + tuple(S(v) for v in program_vars) + (S0,)


@dataclass(frozen=True)
class LinExpr:
    """Affine combination of unknowns, ``sum(w * u) + constant``."""

    weights: tuple = ()
    constant: Fraction = Fraction(0)

    def __post_init__(self):
        items = self.weights.items() if isinstance(self.weights, Mapping) else self.weights
        merged: dict = {}
        for u, w in items:
            merged[u] = merged.get(u, Fraction(0)) + as_fraction(w)
        object.__setattr__(self, "weights", tuple(sorted((u, w) for u, w in merged.items() if w)))
        object.__setattr__(self, "constant", as_fraction(self.constant))

    @classmethod
    def of(cls, u, weight: Number = 1) -> LinExpr:
        return cls(((u, weight),))

    def __add__(self, other: LinExpr) -> LinExpr:
        return LinExpr(self.weights + other.weights, self.constant + other.constant)

    def __neg__(self) -> LinExpr:
        return self.scale(-1)

    def __sub__(self, other: LinExpr) -> LinExpr:
        return self + (-other)

    def scale(self, k: Number) -> LinExpr:
        k = as_fraction(k)
        return LinExpr(tuple((u, w * k) for u, w in self.weights), self.constant * k)

    def as_dict(self) -> dict:
        return dict(self.weights)

    def is_zero(self) -> bool:
        return not self.weights and self.constant == 0

    def evaluate(self, values: Mapping) -> Fraction:
        return self.constant + sum((w * values[u] for u, w in self.weights), Fraction(0))

    def __str__(self):
        parts = [f"{w}*{u}" if w != 1 else str(u) for u, w in self.weights]
        if self.constant or not parts:
            parts.append(str(self.constant))
        return " + ".join(parts).replace("+ -", "- ")


_ZERO = LinExpr()


@dataclass(frozen=True)
class SymbolicAffine:
    """Affine form over program variables whose coefficients are :class:`LinExpr`."""

    coeffs: tuple = ()
    constant: LinExpr = _ZERO

    def __post_init__(self):
        items = self.coeffs.items() if isinstance(self.coeffs, Mapping) else self.coeffs
        merged: dict = {}
        for v, e in items:
            merged[v] = merged.get(v, _ZERO) + e
        object.__setattr__(self, "coeffs",
                           tuple(sorted((v, e) for v, e in merged.items() if not e.is_zero())))

    def coefficient(self, v: VarRef) -> LinExpr:
        for key, e in self.coeffs:
            if key == v:
                return e
        return _ZERO

    def __add__(self, other: SymbolicAffine) -> SymbolicAffine:
        return SymbolicAffine(self.coeffs + other.coeffs, self.constant + other.constant)

    def __neg__(self) -> SymbolicAffine:
        return SymbolicAffine(tuple((v, -e) for v, e in self.coeffs), -self.constant)

    def __sub__(self, other: SymbolicAffine) -> SymbolicAffine:
        return self + (-other)

    def evaluate(self, values: Mapping) -> AffineTerm:
        return AffineTerm(tuple((v, e.evaluate(values)) for v, e in self.coeffs),
                          self.constant.evaluate(values))

    @classmethod
    def ground(cls, term: AffineTerm) -> SymbolicAffine:
        return cls(tuple((v, LinExpr((), c)) for v, c in term.coeffs), LinExpr((), term.constant))

    def __str__(self):
        parts = [f"({e})*{v}" for v, e in self.coeffs]
        if not self.constant.is_zero() or not parts:
            parts.append(f"({self.constant})")
        return " + ".join(parts)


def template_term(program_vars: Sequence[str], kind: str, primed: bool = False,
                  with_constant: bool = True) -> SymbolicAffine:
    """``r.x + r0`` (kind ``"r"``) or ``s.x + s0`` (kind ``"s"``), optionally over ``x'``."""
    coeffs = tuple((VarRef(v, primed), LinExpr.of(UnknownRef(kind, v))) for v in program_vars)
    const = LinExpr.of(UnknownRef(kind + "0")) if with_constant else _ZERO
    return SymbolicAffine(coeffs, const)


class Bound(enum.Enum):
    ZERO = "0"
    DELTA = "delta"


@dataclass(frozen=True)
class TemplateImplication:
    """``forall v. lhs -> rhs >= bound`` with unknown coefficients in ``rhs``."""

    name: str
    lhs: Polyhedron
    rhs: SymbolicAffine
    bound: Bound = Bound.ZERO

    def __post_init__(self):
        if self.lhs.has_strict:
            raise ValueError("template left-hand sides must be non-strict")

    def instantiate(self, values: Mapping, delta: Number = 1) -> GroundImplication:
        bound = as_fraction(delta) if self.bound is Bound.DELTA else Fraction(0)
        return GroundImplication(self.name, self.lhs, self.rhs.evaluate(values), bound)

    def __str__(self):
        lhs = " /\\ ".join(format_constraint(c, self.lhs.variables) for c in self.lhs) or "true"
        return f"{self.name}: {lhs}  ->  {self.rhs} >= {self.bound.value}"


@dataclass(frozen=True)
class GroundImplication:
    """``forall v. lhs -> rhs >= bound`` with concrete numbers."""

    name: str
    lhs: Polyhedron
    rhs: AffineTerm
    bound: Fraction = Fraction(0)

    def __str__(self):
        lhs = " /\\ ".join(format_constraint(c, self.lhs.variables) for c in self.lhs) or "true"
        return f"{self.name}: {lhs}  ->  {format_affine(self.rhs, self.lhs.variables)} >= {self.bound}"


def build_or_to_plus(p: LassoProgram) -> list[TemplateImplication]:
    """The four Or-to-Plus implications, in order.

    Strict rows of a real-valued program are relaxed to their closure; the
    resulting implications are stronger, so solutions stay sound.
    """
    xs = p.program_vars
    stem = p.stem.closure()
    loop = p.loop.closure()
    rank_x = template_term(xs, "r")
    rank_x_lin = template_term(xs, "r", with_constant=False)
    rank_xp_lin = template_term(xs, "r", primed=True, with_constant=False)
    inv_x = template_term(xs, "s")
    inv_xp = template_term(xs, "s", primed=True)
    inv_x_lin = template_term(xs, "s", with_constant=False)
    inv_xp_lin = template_term(xs, "s", primed=True, with_constant=False)
    return [
        TemplateImplication("phi1", stem, inv_xp, Bound.ZERO),
        TemplateImplication("phi2", loop, inv_xp_lin - inv_x_lin, Bound.ZERO),
        TemplateImplication("phi3", loop, rank_x_lin - rank_xp_lin - inv_x, Bound.DELTA),
        TemplateImplication("phi4", loop, rank_x, Bound.ZERO),
    ]


def coefficient_values(f: RankingFunction, inv: SupportingInvariant,
                       program_vars: Sequence[str]) -> dict[UnknownRef, Fraction]:
    values = {R(v): f.coefficient(v) for v in program_vars}
    values[R0] = f.constant
    values.update({S(v): inv.coefficient(v) for v in program_vars})
    values[S0] = inv.constant
    return values


def ground_or_to_plus(p: LassoProgram, f: RankingFunction, inv: SupportingInvariant,
                      delta: Number = 1) -> list[GroundImplication]:
    values = coefficient_values(f, inv, p.program_vars)
    return [t.instantiate(values, delta) for t in build_or_to_plus(p)]


def invariant_constraint(inv: SupportingInvariant, primed: bool = False) -> Constraint:
    """``s.x + s0 >= 0`` as a row."""
    return Constraint.geq(inv.term(primed))


def build_bms_ground(p: LassoProgram, f: RankingFunction, inv: SupportingInvariant,
                     delta: Number) -> list[GroundImplication]:
    """The four Bradley-Manna-Sipma implications for concrete coefficients."""
    delta = as_fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    guarded = p.loop.conjoin(invariant_constraint(inv))
    f_x = f.term()
    f_xp = f.term(primed=True, with_constant=False)
    return [
        GroundImplication("bms1", p.stem, inv.term(primed=True), Fraction(0)),
        GroundImplication("bms2", guarded, inv.term(primed=True), Fraction(0)),
        GroundImplication("bms3", guarded, f.term(with_constant=False) - f_xp, delta),
        GroundImplication("bms4", guarded, f_x, Fraction(0)),
    ]
