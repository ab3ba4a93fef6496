"""Random instance generators shared by the property and acceptance tests."""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from lassorank.core import AffineTerm, Constraint, Polyhedron, VarRef
from lassorank.lp import EQ, LEQ, LT, LinearConstraint, LinearSystem, feasible, polyhedron_system
from lassorank.transform import GroundImplication

NAMES = ("x", "y", "z")


def small_fraction(rng: random.Random, lo: int = -3, hi: int = 3, dens=(1, 1, 1, 2, 3)) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.choice(dens))


def random_system(rng: random.Random, max_unknowns: int = 8, max_rows: int = 10,
                  strict_rate: float = 0.3) -> LinearSystem:
    n = rng.randint(1, max_unknowns)
    unknowns = tuple(f"u{i}" for i in range(n))
    rows = []
    for _ in range(rng.randint(1, max_rows)):
        k = rng.randint(1, min(n, 3))
        coeffs = {u: rng.choice((-2, -1, 1, 2, 3)) for u in rng.sample(unknowns, k)}
        roll = rng.random()
        rel = EQ if roll < 0.15 else LT if roll < 0.15 + strict_rate else LEQ
        rows.append(LinearConstraint(coeffs, rel, rng.randint(-4, 4)))
    nonneg = frozenset(u for u in unknowns if rng.random() < 0.4)
    return LinearSystem(unknowns, tuple(rows), nonneg)


def random_polyhedron(rng: random.Random, dims: int, rows: int, boxed: bool = False,
                      rational: bool = True) -> Polyhedron:
    xs = tuple(VarRef(n) for n in NAMES[:dims])
    cons = []
    for _ in range(rows):
        while True:
            coeffs = {v: (small_fraction(rng) if rational else rng.randint(-3, 3)) for v in xs}
            term = AffineTerm(coeffs)
            if not term.is_constant():
                break
        bound = small_fraction(rng, -6, 6) if rational else rng.randint(-6, 6)
        cons.append(Constraint.leq(term, bound))
    if boxed:
        for v in xs:
            cons.append(Constraint.leq(AffineTerm({v: 1}), 3))
            cons.append(Constraint.geq(AffineTerm({v: 1}), -3))
    return Polyhedron(xs, tuple(cons))


def satisfiable(poly: Polyhedron) -> bool:
    return bool(feasible(polyhedron_system(poly)))


def random_ground_implication(rng: random.Random) -> GroundImplication:
    """Small implication with satisfiable lhs; roughly half are valid."""
    while True:
        dims = rng.randint(1, 3)
        lhs = random_polyhedron(rng, dims, rng.randint(1, 4), rational=False)
        if satisfiable(lhs):
            break
    xs = lhs.variables
    if rng.random() < 0.5:
        # nonnegative combination of rows, loosened or tightened a little
        rhs = AffineTerm.const(rng.randint(-2, 2))
        for c in lhs.constraints:
            rhs = rhs - c.term.scale(rng.randint(0, 2))
    else:
        rhs = AffineTerm({v: rng.randint(-2, 2) for v in xs}, rng.randint(-4, 4))
    return GroundImplication("random", lhs, rhs, Fraction(0))


def integer_points(poly: Polyhedron, radius: int = 10) -> set[tuple[int, ...]]:
    """Grid enumeration of the integer points of ``poly`` in the box [-radius, radius]^n."""
    xs = poly.variables
    rows = []
    for c in poly.constraints:
        # scale to integers so the grid test is pure int arithmetic
        scale = math.lcm(c.term.constant.denominator, *(a.denominator for _, a in c.term.coeffs))
        rows.append(([int(c.term.coefficient(v) * scale) for v in xs],
                     int(c.term.constant * scale), c.strict))
    points = set()
    for p in itertools.product(range(-radius, radius + 1), repeat=len(xs)):
        ok = True
        for a, k, strict in rows:
            s = k + sum(ai * pi for ai, pi in zip(a, p))
            if s > 0 or (strict and s == 0):
                ok = False
                break
        if ok:
            points.add(p)
    return points

