"""Reference lasso programs with known outcomes, and a random program generator."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from importlib import resources

from .core import (AffineTerm, Constraint, Domain, LassoProgram, RankingFunction,
                   SupportingInvariant, VarRef)
from .parser import parse_program

# Analysis modes used as keys of CorpusEntry.expected.
REAL, INT_GCD, INT_NONE = "real", "int+gcd", "int+none"


@dataclass(frozen=True)
class Witness:
    ranking: RankingFunction
    invariant: SupportingInvariant
    delta: int = 1
    mode: str = REAL
    nondecreasing: bool = False


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    filename: str
    expected: dict[str, str]
    witnesses: tuple[Witness, ...] = field(default=())

    @property
    def source(self) -> str:
        return (resources.files(__package__) / "corpus" / self.filename).read_text("utf-8")

    @property
    def program(self) -> LassoProgram:
        return parse_program(self.source)


def _w(rank: dict, rank0, inv: dict, inv0, **kw) -> Witness:
    return Witness(RankingFunction(rank, rank0), SupportingInvariant(inv, inv0), **kw)


_ENTRIES = (
    CorpusEntry("P_yPositive", "p_ypositive.lasso", {REAL: "success"},
                (_w({"x": 1}, 0, {"y": 1}, -1, nondecreasing=True),)),
    CorpusEntry("P_diff42", "p_diff42.lasso", {REAL: "success"},
                (_w({"x": 1}, 0, {"x": 1, "y": -1}, -42, nondecreasing=True),)),
    CorpusEntry("P_bound", "p_bound.lasso", {REAL: "success"},
                (_w({"x": 1, "y": -1}, 0, {}, 0, nondecreasing=True),
                 _w({"x": 1}, 0, {"y": 1}, -23, nondecreasing=True))),
    CorpusEntry("P_zeno", "p_zeno.lasso", {REAL: "infeasible"},
                (_w({"x": 1}, 0, {"y": 1}, -1),)),
    CorpusEntry("P_zeno_div", "p_zeno_div.lasso", {REAL: "infeasible"},
                (_w({"x": 1}, 0, {"y": 1}, -1),)),
    CorpusEntry("P_wild", "p_wild.lasso", {REAL: "infeasible"},
                (_w({"x": 1}, 0, {"y": 1}, -1),)),
    # The decreasing direction is aLength - i; i - aLength grows along the loop.
    CorpusEntry("P_array", "p_array.lasso", {REAL: "success"},
                (_w({"aLength": 1, "i": -1}, 0, {"offset": 1}, -1, nondecreasing=True),)),
    CorpusEntry("P_nonIntegral1", "p_nonintegral1.lasso",
                {REAL: "infeasible", INT_GCD: "success", INT_NONE: "infeasible"},
                (_w({"x": 1}, 0, {"y": 1}, -1, mode=INT_GCD, nondecreasing=True),)),
    CorpusEntry("P_nonIntegral2", "p_nonintegral2.lasso", {INT_GCD: "infeasible"}),
)


def corpus() -> list[CorpusEntry]:
    return list(_ENTRIES)


def entry(name: str) -> CorpusEntry:
    for e in _ENTRIES:
        if e.name == name:
            return e
    raise KeyError(name)


VAR_NAMES = ("x", "y", "z", "w")


def _random_form(rng: random.Random, names, primed: bool, lo: int = -2, hi: int = 2) -> AffineTerm:
    while True:
        term = AffineTerm({VarRef(n, primed): rng.randint(lo, hi) for n in names})
        if not term.is_constant():
            return term


def _draw(rng: random.Random, names, rows: int):
    stem: list[Constraint] = []
    for _ in range(rng.randint(0, rows)):
        n = rng.choice(names)
        kind = rng.random()
        if kind < 0.4:
            stem += Constraint.eq(AffineTerm.var(n, True), rng.randint(-3, 5))
        elif kind < 0.7:
            stem.append(Constraint.geq(AffineTerm.var(n, True), rng.randint(-2, 3)))
        else:
            stem.append(Constraint.geq(_random_form(rng, names, True), rng.randint(-3, 3)))

    loop: list[Constraint] = []
    for _ in range(rng.randint(1, max(1, rows - 1))):
        loop.append(Constraint.geq(_random_form(rng, names, False), rng.randint(-3, 3)))
    for n in names:
        kind = rng.random()
        target = AffineTerm.var(n, True)
        if kind < 0.45:
            # x' = x + c, the common counter update
            loop += Constraint.eq(target, AffineTerm.var(n) + rng.randint(-2, 2))
        elif kind < 0.75:
            loop += Constraint.eq(target, _random_form(rng, names, False, -1, 1)
                                  + rng.randint(-2, 2))
        elif kind < 0.9:
            loop.append(Constraint.geq(target, rng.randint(-1, 2)))
        # else: unconstrained (havoc)
    return stem, loop


def random_lasso(seed: int, dims: int = 2, rows: int = 3,
                 domain: Domain = Domain.REAL) -> LassoProgram:
    """Deterministic random program whose stem can be followed by the loop.

    ``rows`` bounds the number of stem atoms and guard atoms; the loop also
    gets at most one update atom per variable.  Draws that violate the
    precondition are rejected and redrawn from the same generator.
    """
    from .pipeline import check_precondition

    if not 1 <= dims <= len(VAR_NAMES):
        raise ValueError(f"dims must be in 1..{len(VAR_NAMES)}")
    rng = random.Random(seed)
    names = VAR_NAMES[:dims]
    while True:
        stem, loop = _draw(rng, names, rows)
        p = LassoProgram.build(names, stem, loop, domain)
        if check_precondition(p):
            return p
