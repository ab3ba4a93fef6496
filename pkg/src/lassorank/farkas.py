"""Quantifier elimination for template implications via the affine Farkas lemma.

For ``forall v. A v <= b -> e(u).v + k(u) >= bound`` we emit, with fresh
multipliers ``lam >= 0`` (one per row of ``A``)::

    lam . A[:, j] + e_j(u) == 0          for every column j
    lam . b - k(u)         <= -bound

which is linear in ``(u, lam)`` because ``A`` and ``b`` are concrete.
``delta`` defaults to 1; the assembled system is positively homogeneous in
all unknowns together with ``delta``, so this loses no solutions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Mapping, Sequence

from .core import FarkasCertificate, LassoProgram, Number, as_fraction
from .lp import EQ, LEQ, LinearConstraint, LinearSystem, feasible, polyhedron_system
from .transform import Bound, TemplateImplication, build_or_to_plus, unknowns_for

__all__ = ["LambdaRef", "DeltaRef", "DELTA", "FarkasPreconditionError", "LinearSystem",
           "apply_farkas", "assemble_system", "certificates_from"]


class FarkasPreconditionError(ValueError):
    """The implication's left-hand side is unsatisfiable."""


@dataclass(frozen=True, order=True)
class LambdaRef:
    block: int
    row: int

    def __str__(self):
        return f"lambda{self.block}_{self.row}"


@dataclass(frozen=True, order=True)
class DeltaRef:
    def __str__(self):
        return "delta"


DELTA = DeltaRef()


def apply_farkas(t: TemplateImplication, block: int, delta: Number | Hashable = 1,
                 check_lhs: bool = True) -> LinearSystem:
    """Linear block equivalent to ``t`` (sufficient even when the lhs is empty).

    ``delta`` is either a positive number or an unknown key (for example
    :data:`DELTA`) to keep the decrease bound symbolic.
    """
    lhs = t.lhs
    if lhs.has_strict:
        raise ValueError("Farkas block needs a non-strict left-hand side")
    if check_lhs and not feasible(polyhedron_system(lhs)):
        raise FarkasPreconditionError(f"{t.name}: left-hand side is unsatisfiable")
    extra = [v for v, _ in t.rhs.coeffs if v not in lhs.variables]
    if extra:
        raise ValueError(f"{t.name}: rhs uses variable {extra[0]} not in the lhs")

    A, b, _ = lhs.to_matrix()
    lambdas = tuple(LambdaRef(block, i) for i in range(len(A)))
    template_unknowns = []
    rows = []
    for j, v in enumerate(lhs.variables):
        e = t.rhs.coefficient(v)
        coeffs: dict = {lam: A[i][j] for i, lam in enumerate(lambdas) if A[i][j]}
        for u, w in e.weights:
            coeffs[u] = coeffs.get(u, 0) + w
            template_unknowns.append(u)
        rows.append(LinearConstraint(coeffs, EQ, -e.constant))

    k = t.rhs.constant
    coeffs = {lam: b[i] for i, lam in enumerate(lambdas) if b[i]}
    for u, w in k.weights:
        coeffs[u] = coeffs.get(u, 0) - w
        template_unknowns.append(u)
    bound_rhs = k.constant
    unknowns = list(template_unknowns)
    if t.bound is Bound.DELTA:
        if isinstance(delta, (int, Fraction)) and not isinstance(delta, bool):
            bound_rhs -= as_fraction(delta)
        else:
            coeffs[delta] = coeffs.get(delta, 0) + 1
            unknowns.append(delta)
    rows.append(LinearConstraint(coeffs, LEQ, bound_rhs))
    return LinearSystem(tuple(unknowns) + lambdas, tuple(rows), frozenset(lambdas))


def assemble_system(p: LassoProgram, delta: Number | Hashable = 1,
                    check_lhs: bool = True,
                    templates: Sequence[TemplateImplication] | None = None) -> LinearSystem:
    """All four blocks over shared ranking/invariant unknowns."""
    templates = build_or_to_plus(p) if templates is None else templates
    system = LinearSystem(unknowns_for(p.program_vars))
    for block, t in enumerate(templates, start=1):
        system = system + apply_farkas(t, block, delta, check_lhs)
    return system


def certificates_from(assignment: Mapping, templates: Sequence[TemplateImplication]
                      ) -> tuple[FarkasCertificate, ...]:
    return tuple(
        FarkasCertificate(tuple(assignment[LambdaRef(block, i)] for i in range(len(t.lhs))))
        for block, t in enumerate(templates, start=1)
    )
