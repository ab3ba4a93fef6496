import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gen import integer_points, random_polyhedron
from lassorank.checker import implication_valid
from lassorank.core import AffineTerm, Constraint, Domain, Polyhedron, VarRef
from lassorank.corpus import entry
from lassorank.intprep import (FALSE_ROW, gcd_tighten, integer_infeasible, prepare_int,
                               strict_to_nonstrict_int)
from lassorank.transform import GroundImplication

X, Y, YP = VarRef("x"), VarRef("y"), VarRef("y", True)
x, y = AffineTerm({X: 1}), AffineTerm({Y: 1})


def poly(*rows, variables=(X, Y)):
    return Polyhedron(variables, rows)


def test_strict_examples():
    assert strict_to_nonstrict_int(poly(Constraint.lt(x, 0))) == poly(Constraint.leq(x, -1))
    half_x = x.scale(Fraction(1, 2))
    assert strict_to_nonstrict_int(poly(Constraint.lt(half_x, Fraction(1, 3)))) == poly(
        Constraint.leq(x.scale(3), 1))
    p = poly(Constraint.leq(x + y, 4))
    assert strict_to_nonstrict_int(p) == p


def test_gcd_examples():
    yp = AffineTerm({YP: 1})
    assert gcd_tighten(poly(Constraint.geq(yp.scale(2), 1), variables=(YP,))) == poly(
        Constraint.geq(yp, 1), variables=(YP,))
    assert gcd_tighten(poly(Constraint.leq(x.scale(3), 7))) == poly(Constraint.leq(x, 2))
    assert gcd_tighten(poly(Constraint.leq(x + y, Fraction(5, 2)))) == poly(Constraint.leq(x + y, 2))


def test_integer_infeasible_row():
    # 2x == 1 has no integer solution; tightening exposes it as x <= 0 /\ x >= 1
    p = gcd_tighten(poly(*Constraint.eq(x.scale(2), 1)))
    assert p == poly(Constraint.leq(x, 0), Constraint.geq(x, 1))
    assert integer_points(p, 3) == set()
    assert FALSE_ROW.term == AffineTerm.const(1)
    assert integer_infeasible(gcd_tighten(poly(FALSE_ROW)))
    assert not integer_infeasible(p)


def test_gcd_rejects_strict_rows():
    with pytest.raises(ValueError):
        gcd_tighten(poly(Constraint.lt(x, 0)))


def test_prepare_int_modes():
    p = entry("P_nonIntegral1").program
    assert p.domain is Domain.INT
    tightened = prepare_int(p, "gcd")
    assert tightened.loop != p.loop or tightened.stem != p.stem
    assert prepare_int(p, "none") == p  # no strict rows to convert
    with pytest.raises(ValueError):
        prepare_int(p, "hull")


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 3))
def test_idempotence(seed, dims):
    p = random_polyhedron(random.Random(seed), dims, 4)
    once = gcd_tighten(p)
    assert gcd_tighten(once) == once


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 3))
def test_real_strengthening(seed, dims):
    p = random_polyhedron(random.Random(seed), dims, 3)
    tight = gcd_tighten(p)
    for original, row in zip(p.constraints, tight.constraints):
        # each output row implies its input row over the reals
        g = GroundImplication("row", Polyhedron(p.variables, (row,)), -original.term, Fraction(0))
        assert implication_valid(g)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 2))
def test_strict_conversion_preserves_integer_points(seed, dims):
    rng = random.Random(seed)
    p = random_polyhedron(rng, dims, 3)
    strict = Polyhedron(p.variables, tuple(Constraint(c.term, rng.random() < 0.5)
                                           for c in p.constraints))
    converted = strict_to_nonstrict_int(strict)
    assert not converted.has_strict
    assert integer_points(converted, 6) == integer_points(strict, 6)
