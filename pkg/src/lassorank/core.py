"""Exact arithmetic helpers and the polyhedral data model for lasso programs.

Every number is a :class:`fractions.Fraction`.  Constraints are kept in a
single normal form, ``term <= 0`` or ``term < 0``, where the term is scaled
to coprime integer coefficients.  Equalities never appear as such; they are
two opposing non-strict constraints.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Number = Union[int, Fraction]


def as_fraction(value: Number | str) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"expected an exact number, got {type(value).__name__}")


def format_rational(value: Fraction) -> str:
    """Serialize as ``"num/den"``; integers keep the ``/1``."""
    value = as_fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str | int) -> Fraction:
    """Inverse of :func:`format_rational`; also accepts bare integers."""
    if isinstance(text, bool):
        raise ValueError("not a rational")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        if sep:
            value = Fraction(int(num), int(den))
        else:
            value = Fraction(int(num))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc
    return value


class Domain(enum.Enum):
    REAL = "real"
    INT = "int"


@dataclass(frozen=True, order=True)
class VarRef:
    name: str
    primed: bool = False

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be nonempty")

    def __str__(self):
        return self.name + ("'" if self.primed else "")


def _canonical_items(items) -> tuple:
    merged: dict = {}
    for key, coeff in items:
        merged[key] = merged.get(key, Fraction(0)) + as_fraction(coeff)
    return tuple(sorted((k, c) for k, c in merged.items() if c != 0))


@dataclass(frozen=True)
class AffineTerm:
    """Sparse affine form ``sum(c * v) + constant`` over :class:`VarRef`."""

    coeffs: tuple = ()
    constant: Fraction = Fraction(0)

    def __post_init__(self):
        items = self.coeffs.items() if isinstance(self.coeffs, Mapping) else self.coeffs
        object.__setattr__(self, "coeffs", _canonical_items(items))
        object.__setattr__(self, "constant", as_fraction(self.constant))

    @classmethod
    def var(cls, name: str, primed: bool = False, coeff: Number = 1) -> AffineTerm:
        return cls({VarRef(name, primed): coeff})

    @classmethod
    def const(cls, value: Number) -> AffineTerm:
        return cls((), value)

    def coefficient(self, v: VarRef) -> Fraction:
        for key, c in self.coeffs:
            if key == v:
                return c
        return Fraction(0)

    def as_dict(self) -> dict[VarRef, Fraction]:
        return dict(self.coeffs)

    @property
    def variables(self) -> tuple[VarRef, ...]:
        return tuple(k for k, _ in self.coeffs)

    def is_constant(self) -> bool:
        return not self.coeffs

    def __add__(self, other: AffineTerm | Number) -> AffineTerm:
        if not isinstance(other, AffineTerm):
            other = AffineTerm.const(other)
        return AffineTerm(self.coeffs + other.coeffs, self.constant + other.constant)

    __radd__ = __add__

    def __neg__(self) -> AffineTerm:
        return self.scale(-1)

    def __sub__(self, other: AffineTerm | Number) -> AffineTerm:
        if not isinstance(other, AffineTerm):
            other = AffineTerm.const(other)
        return self + (-other)

    def __rsub__(self, other: Number) -> AffineTerm:
        return AffineTerm.const(other) - self

    def scale(self, k: Number) -> AffineTerm:
        k = as_fraction(k)
        return AffineTerm(tuple((v, c * k) for v, c in self.coeffs), self.constant * k)

    def __mul__(self, k: Number) -> AffineTerm:
        return self.scale(k)

    __rmul__ = __mul__

    def evaluate(self, point: Mapping[VarRef, Fraction]) -> Fraction:
        return self.constant + sum((c * point[v] for v, c in self.coeffs), Fraction(0))

    def rename(self, mapping) -> AffineTerm:
        """Apply ``mapping(VarRef) -> key`` to every variable; returns a plain dict form."""
        return AffineTerm(tuple((mapping(v), c) for v, c in self.coeffs), self.constant)

    def __str__(self):
        return format_affine(self)


def format_affine(term: AffineTerm, order: Sequence[VarRef] | None = None,
                  with_constant: bool = True) -> str:
    coeffs = term.as_dict()
    keys = list(order) if order is not None else list(coeffs)
    keys = [k for k in keys if k in coeffs] + [k for k in coeffs if k not in keys]
    parts: list[str] = []
    for v in keys:
        c = coeffs[v]
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = str(v) if mag == 1 else f"{_format_number(mag)}*{v}"
        parts.append((sign, body))
    if with_constant and (term.constant != 0 or not parts):
        c = term.constant
        parts.append(("-" if c < 0 else "+", _format_number(abs(c))))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _format_number(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _lcm(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def primitive_scale(term: AffineTerm, include_constant: bool = True) -> Fraction:
    """Positive factor turning the term's numbers into coprime integers."""
    nums = [c for _, c in term.coeffs]
    if include_constant:
        nums.append(term.constant)
    nums = [q for q in nums if q != 0]
    if not nums:
        return Fraction(1)
    den = _lcm(q.denominator for q in nums)
    g = 0
    for q in nums:
        g = math.gcd(g, abs(q.numerator * (den // q.denominator)))
    return Fraction(den, g)


@dataclass(frozen=True)
class Constraint:
    """``term <= 0`` (or ``term < 0`` when ``strict``), stored normalized."""

    term: AffineTerm
    strict: bool = False

    def __post_init__(self):
        term = self.term
        if term.is_constant():
            c = term.constant
            term = AffineTerm.const((c > 0) - (c < 0))
        else:
            term = term.scale(primitive_scale(term))
        object.__setattr__(self, "term", term)

    @classmethod
    def leq(cls, lhs: AffineTerm | Number, rhs: AffineTerm | Number = 0) -> Constraint:
        return cls(_to_term(lhs) - _to_term(rhs))

    @classmethod
    def lt(cls, lhs: AffineTerm | Number, rhs: AffineTerm | Number = 0) -> Constraint:
        return cls(_to_term(lhs) - _to_term(rhs), strict=True)

    @classmethod
    def geq(cls, lhs: AffineTerm | Number, rhs: AffineTerm | Number = 0) -> Constraint:
        return cls.leq(rhs, lhs)

    @classmethod
    def gt(cls, lhs: AffineTerm | Number, rhs: AffineTerm | Number = 0) -> Constraint:
        return cls.lt(rhs, lhs)

    @staticmethod
    def eq(lhs: AffineTerm | Number, rhs: AffineTerm | Number = 0) -> tuple[Constraint, Constraint]:
        t = _to_term(lhs) - _to_term(rhs)
        return Constraint(t), Constraint(-t)

    def holds(self, point: Mapping[VarRef, Fraction]) -> bool:
        value = self.term.evaluate(point)
        return value < 0 if self.strict else value <= 0

    def relaxed(self) -> Constraint:
        return Constraint(self.term) if self.strict else self

    def __str__(self):
        return format_constraint(self)


def _to_term(x) -> AffineTerm:
    return x if isinstance(x, AffineTerm) else AffineTerm.const(x)


def format_constraint(c: Constraint, order: Sequence[VarRef] | None = None,
                      relation: str | None = None) -> str:
    lhs = format_affine(c.term, order, with_constant=False) if c.term.coeffs else "0"
    op = relation or ("<" if c.strict else "<=")
    return f"{lhs} {op} {_format_signed(-c.term.constant)}"


def _format_signed(q: Fraction) -> str:
    return ("-" if q < 0 else "") + _format_number(abs(q))


@dataclass(frozen=True)
class Polyhedron:
    """Conjunction of constraints over an ordered variable set."""

    variables: tuple[VarRef, ...]
    constraints: tuple[Constraint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable in polyhedron")
        known = set(self.variables)
        for c in self.constraints:
            missing = [v for v in c.term.variables if v not in known]
            if missing:
                raise ValueError(f"constraint {c} uses undeclared variable {missing[0]}")

    def __len__(self):
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)

    @property
    def has_strict(self) -> bool:
        return any(c.strict for c in self.constraints)

    def to_matrix(self) -> tuple[list[list[Fraction]], list[Fraction], list[bool]]:
        """Row ``i`` reads ``A[i] . variables <= b[i]`` (``<`` when ``strict[i]``)."""
        A, b, strict = [], [], []
        for c in self.constraints:
            coeffs = c.term.as_dict()
            A.append([coeffs.get(v, Fraction(0)) for v in self.variables])
            b.append(-c.term.constant)
            strict.append(c.strict)
        return A, b, strict

    @classmethod
    def from_matrix(cls, variables: Sequence[VarRef], A, b, strict=None) -> Polyhedron:
        strict = strict if strict is not None else [False] * len(A)
        rows = []
        for row, rhs, s in zip(A, b, strict):
            term = AffineTerm(tuple(zip(variables, row)), -as_fraction(rhs))
            rows.append(Constraint(term, s))
        return cls(tuple(variables), tuple(rows))

    def conjoin(self, *constraints: Constraint) -> Polyhedron:
        return Polyhedron(self.variables, self.constraints + tuple(constraints))

    def closure(self) -> Polyhedron:
        """Same rows with strictness dropped."""
        return Polyhedron(self.variables, tuple(c.relaxed() for c in self.constraints))

    def contains(self, point: Mapping[VarRef, Fraction]) -> bool:
        return all(c.holds(point) for c in self.constraints)


def transition_variables(program_vars: Sequence[str]) -> tuple[VarRef, ...]:
    """The universe ``x`` followed by ``x'`` in declaration order."""
    return tuple(VarRef(n) for n in program_vars) + tuple(VarRef(n, True) for n in program_vars)


@dataclass(frozen=True)
class LassoProgram:
    program_vars: tuple[str, ...]
    stem: Polyhedron
    loop: Polyhedron
    domain: Domain = Domain.REAL

    def __post_init__(self):
        object.__setattr__(self, "program_vars", tuple(self.program_vars))
        universe = self.variables
        for label, rel in (("stem", self.stem), ("loop", self.loop)):
            if rel.variables != universe:
                raise ValueError(f"{label} must range over {', '.join(map(str, universe))}")

    @property
    def variables(self) -> tuple[VarRef, ...]:
        return transition_variables(self.program_vars)

    @classmethod
    def build(cls, program_vars: Sequence[str], stem: Iterable[Constraint],
              loop: Iterable[Constraint], domain: Domain = Domain.REAL) -> LassoProgram:
        universe = transition_variables(program_vars)
        return cls(tuple(program_vars), Polyhedron(universe, tuple(stem)),
                   Polyhedron(universe, tuple(loop)), domain)

    def with_relations(self, stem: Polyhedron, loop: Polyhedron) -> LassoProgram:
        return LassoProgram(self.program_vars, stem, loop, self.domain)

    def with_domain(self, domain: Domain) -> LassoProgram:
        return LassoProgram(self.program_vars, self.stem, self.loop, domain)


def _coeff_map(coeffs: Mapping[str, Number]) -> dict[str, Fraction]:
    return {k: as_fraction(v) for k, v in coeffs.items() if as_fraction(v) != 0}


@dataclass(frozen=True)
class _LinearForm:
    coeffs: Mapping[str, Fraction] = field(default_factory=dict)
    constant: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _coeff_map(self.coeffs))
        object.__setattr__(self, "constant", as_fraction(self.constant))

    def coefficient(self, name: str) -> Fraction:
        return self.coeffs.get(name, Fraction(0))

    def term(self, primed: bool = False, with_constant: bool = True) -> AffineTerm:
        return AffineTerm({VarRef(n, primed): c for n, c in self.coeffs.items()},
                          self.constant if with_constant else 0)

    def scaled(self, k: Number):
        k = as_fraction(k)
        return type(self)({n: c * k for n, c in self.coeffs.items()}, self.constant * k)


class RankingFunction(_LinearForm):
    """``f(x) = coeffs . x + constant``."""

    def __str__(self):
        return "f = " + format_affine(self.term())


class SupportingInvariant(_LinearForm):
    """The predicate ``coeffs . x + constant >= 0``."""

    def __str__(self):
        return format_affine(self.term()) + " >= 0"


@dataclass(frozen=True)
class FarkasCertificate:
    """Multipliers, one per row of an implication's left-hand side.

    Nonnegativity is a property the checker verifies, not a constructor
    invariant, so tampered certificates can still be represented.
    """

    lambdas: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(as_fraction(x) for x in self.lambdas))

    def __len__(self):
        return len(self.lambdas)

    @property
    def nonnegative(self) -> bool:
        return all(x >= 0 for x in self.lambdas)


@dataclass(frozen=True)
class Success:
    ranking: RankingFunction
    invariant: SupportingInvariant
    delta: Fraction
    certificates: tuple[FarkasCertificate, ...]
    vacuous: bool = False
    # The (possibly tightened) program the certificates refer to.
    program: LassoProgram | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if len(self.certificates) != 4:
            raise ValueError("expected exactly four certificates")

    status = "success"


@dataclass(frozen=True)
class Infeasible:
    reason: str = ""
    status = "infeasible"


@dataclass(frozen=True)
class PreconditionViolated:
    reason: str = ""
    status = "precondition_violated"


SynthesisResult = Union[Success, Infeasible, PreconditionViolated]
