"""Independent verification of synthesized termination arguments.

Implications are decided by refutation: ``lhs -> rhs >= bound`` is valid iff
``lhs /\\ rhs < bound`` has no real solution.  This path shares no encoding
with the Farkas-based synthesis, so a bug in one shows up in the other.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (AffineTerm, LassoProgram, Number, Polyhedron, RankingFunction, Success,
                   SupportingInvariant, VarRef, as_fraction)
from .farkas import apply_farkas
from .lp import LEQ, LT, EQ, LinearConstraint, LinearSystem, feasible, polyhedron_system
from .transform import (Bound, GroundImplication, R, R0, TemplateImplication, build_bms_ground,
                        build_or_to_plus, coefficient_values, invariant_constraint,
                        template_term)


class CertificateShapeError(ValueError):
    """A certificate's length does not match its implication's row count."""


@dataclass(frozen=True)
class CheckReport:
    bms: tuple[bool, ...]
    certificates: tuple[bool, ...] | None = None
    nondecreasing: bool | None = None

    @property
    def overall(self) -> bool:
        verdicts = list(self.bms)
        if self.certificates is not None:
            verdicts += self.certificates
        if self.nondecreasing is not None:
            verdicts.append(self.nondecreasing)
        return all(verdicts)


def implication_valid(g: GroundImplication) -> bool:
    sys = polyhedron_system(g.lhs)
    coeffs = {v: c for v, c in g.rhs.coeffs}
    negated = LinearConstraint(coeffs, LT, g.bound - g.rhs.constant)
    return not feasible(sys.with_constraints(negated, unknowns=coeffs))


def verify_bms(p: LassoProgram, f: RankingFunction, inv: SupportingInvariant,
               delta: Number = 1) -> CheckReport:
    return CheckReport(tuple(implication_valid(g) for g in build_bms_ground(p, f, inv, delta)))


def verify_or_to_plus_ground(p: LassoProgram, f: RankingFunction, inv: SupportingInvariant,
                             delta: Number = 1) -> tuple[bool, ...]:
    """Per-implication truth of the ground Or-to-Plus constraints."""
    values = coefficient_values(f, inv, p.program_vars)
    return tuple(implication_valid(t.instantiate(values, delta)) for t in build_or_to_plus(p))


def verify_nondecreasing(p: LassoProgram, inv: SupportingInvariant) -> bool:
    """``loop -> s.x' >= s.x``, by refutation."""
    diff = inv.term(primed=True, with_constant=False) - inv.term(with_constant=False)
    return implication_valid(GroundImplication("nondecreasing", p.loop, diff, Fraction(0)))


def certificate_holds(t: TemplateImplication, values, lambdas: Sequence[Fraction],
                      delta: Number = 1) -> bool:
    """Pure arithmetic: ``lam >= 0``, ``lam.A == c`` and ``lam.b <= d``."""
    A, b, _ = t.lhs.to_matrix()
    if len(lambdas) != len(A):
        raise CertificateShapeError(
            f"{t.name}: {len(lambdas)} multipliers for {len(A)} rows")
    if any(x < 0 for x in lambdas):
        return False
    g = t.instantiate(values, delta)
    # lhs -> rhs >= bound is  (-rhs).v <= rhs.constant - bound
    for j, v in enumerate(t.lhs.variables):
        combo = sum((lam * A[i][j] for i, lam in enumerate(lambdas)), Fraction(0))
        if combo != -g.rhs.coefficient(v):
            return False
    combo = sum((lam * b[i] for i, lam in enumerate(lambdas)), Fraction(0))
    return combo <= g.rhs.constant - g.bound


def verify_certificates(p: LassoProgram, res: Success) -> bool:
    """Check the four multiplier vectors of ``res`` against ``p``'s templates.

    ``p`` must be the program the result was computed for, after any integer
    tightening (``res.program`` when set).
    """
    templates = build_or_to_plus(p)
    values = coefficient_values(res.ranking, res.invariant, p.program_vars)
    return all(certificate_holds(t, values, cert.lambdas, res.delta)
               for t, cert in zip(templates, res.certificates, strict=True))


def certificate_verdicts(p: LassoProgram, res: Success) -> tuple[bool, ...]:
    templates = build_or_to_plus(p)
    values = coefficient_values(res.ranking, res.invariant, p.program_vars)
    return tuple(certificate_holds(t, values, cert.lambdas, res.delta)
                 for t, cert in zip(templates, res.certificates, strict=True))


def check_result(p: LassoProgram, res: Success) -> CheckReport:
    return CheckReport(verify_bms(p, res.ranking, res.invariant, res.delta).bms,
                       certificate_verdicts(p, res))


def _affine_from(vec: Sequence[Number], const: Number, variables: Sequence) -> AffineTerm:
    return AffineTerm(tuple(zip(variables, map(as_fraction, vec))), const)


def lemma1_mu_search(A, b, g: tuple[Sequence[Number], Number],
                     h: tuple[Sequence[Number], Number]) -> Fraction | None:
    """Find ``mu >= 0`` with ``A x <= b -> g(x) + mu * h(x) >= 0``.

    ``g`` and ``h`` are ``(vector, constant)`` pairs.  Solves the multiplier
    system ``mu*h + lam.A == -g``, ``lam.b - mu*h0 <= g0``; returns None when
    it has no solution (the caller's premises did not hold).
    """
    (gv, g0), (hv, h0) = g, h
    n = len(gv)
    mu = "mu"
    lambdas = [("lam", i) for i in range(len(A))]
    cons = []
    for j in range(n):
        coeffs = {lam: as_fraction(A[i][j]) for i, lam in enumerate(lambdas)}
        coeffs[mu] = as_fraction(hv[j])
        cons.append(LinearConstraint(coeffs, EQ, -as_fraction(gv[j])))
    coeffs = {lam: as_fraction(b[i]) for i, lam in enumerate(lambdas)}
    coeffs[mu] = -as_fraction(h0)
    cons.append(LinearConstraint(coeffs, LEQ, as_fraction(g0)))
    out = feasible(LinearSystem((mu, *lambdas), tuple(cons), frozenset((mu, *lambdas))))
    return out.assignment[mu] if out else None


def weighted_halfspace_valid(A, b, g, h, mu: Number) -> bool:
    """Refutation check of ``A x <= b -> g(x) + mu * h(x) >= 0``."""
    (gv, g0), (hv, h0) = g, h
    xs = tuple(VarRef(f"x{j}") for j in range(len(gv)))
    poly = Polyhedron.from_matrix(xs, A, b)
    mu = as_fraction(mu)
    rhs = _affine_from(gv, g0, xs) + _affine_from(hv, h0, xs).scale(mu)
    return implication_valid(GroundImplication("weighted", poly, rhs, Fraction(0)))


def find_ranking_with_invariant(p: LassoProgram, inv: SupportingInvariant,
                                delta: Number = 1) -> RankingFunction | None:
    """Solve the BMS decrease/bound implications for ``f`` with ``inv`` fixed.

    With the invariant known the BMS system is linear; this gives a witness
    search that never goes through the Or-to-Plus templates.
    """
    xs = p.program_vars
    guarded = p.loop.closure().conjoin(invariant_constraint(inv).relaxed())
    if not feasible(polyhedron_system(guarded)):
        return RankingFunction({}, 0)
    rank = template_term(xs, "r")
    decrease = (template_term(xs, "r", with_constant=False)
                - template_term(xs, "r", primed=True, with_constant=False))
    system = (apply_farkas(TemplateImplication("bms3", guarded, decrease, Bound.DELTA), 3, delta)
              + apply_farkas(TemplateImplication("bms4", guarded, rank, Bound.ZERO), 4))
    out = feasible(system)
    if not out:
        return None
    a = out.assignment
    return RankingFunction({v: a.get(R(v), 0) for v in xs}, a.get(R0, 0))

