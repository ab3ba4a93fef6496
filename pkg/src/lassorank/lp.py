"""Exact-rational feasibility for linear systems.

:func:`feasible` is a two-phase simplex with Bland's rule over
:class:`~fractions.Fraction`.  Strict inequalities share one slack ``eps``
in ``[0, 1]``: ``t < b`` becomes ``t + eps <= b`` and the system is feasible
iff the maximum of ``eps`` is positive.

:func:`fourier_motzkin` decides the same question by variable elimination and
is kept deliberately separate so it can serve as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

from .core import Polyhedron, VarRef, as_fraction

LEQ, LT, EQ = "<=", "<", "=="
_RELATIONS = (LEQ, LT, EQ)


@dataclass(frozen=True)
class LinearConstraint:
    """``sum(coeffs[u] * u) <relation> rhs``."""

    coeffs: Mapping[Hashable, Fraction]
    relation: str
    rhs: Fraction = Fraction(0)

    def __post_init__(self):
        if self.relation not in _RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")
        clean = {}
        for k, c in dict(self.coeffs).items():
            c = as_fraction(c)
            if c != 0:
                clean[k] = clean.get(k, Fraction(0)) + c
        object.__setattr__(self, "coeffs", {k: c for k, c in clean.items() if c != 0})
        object.__setattr__(self, "rhs", as_fraction(self.rhs))

    def lhs_value(self, assignment: Mapping[Hashable, Fraction]) -> Fraction:
        return sum((c * assignment[k] for k, c in self.coeffs.items()), Fraction(0))

    def holds(self, assignment: Mapping[Hashable, Fraction]) -> bool:
        v = self.lhs_value(assignment)
        if self.relation == LEQ:
            return v <= self.rhs
        if self.relation == LT:
            return v < self.rhs
        return v == self.rhs

    def __str__(self):
        terms = " + ".join(f"{c}*{k}" for k, c in self.coeffs.items()) or "0"
        return f"{terms} {self.relation} {self.rhs}"


@dataclass(frozen=True)
class LinearSystem:
    """Constraints over ordered unknowns; ``nonneg`` unknowns are ``>= 0``."""

    unknowns: tuple = ()
    constraints: tuple[LinearConstraint, ...] = ()
    nonneg: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "unknowns", tuple(dict.fromkeys(self.unknowns)))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "nonneg", frozenset(self.nonneg))
        declared = set(self.unknowns)
        for c in self.constraints:
            for k in c.coeffs:
                if k not in declared:
                    raise ValueError(f"constraint references undeclared unknown {k!r}")
        if not self.nonneg <= declared:
            raise ValueError("nonneg marker on undeclared unknown")

    def __add__(self, other: LinearSystem) -> LinearSystem:
        return LinearSystem(self.unknowns + other.unknowns,
                            self.constraints + other.constraints,
                            self.nonneg | other.nonneg)

    def with_constraints(self, *constraints: LinearConstraint,
                         unknowns: Iterable = ()) -> LinearSystem:
        return LinearSystem(self.unknowns + tuple(unknowns),
                            self.constraints + constraints, self.nonneg)

    @property
    def has_strict(self) -> bool:
        return any(c.relation == LT for c in self.constraints)

    def satisfied_by(self, assignment: Mapping[Hashable, Fraction]) -> bool:
        if any(assignment[u] < 0 for u in self.nonneg):
            return False
        return all(c.holds(assignment) for c in self.constraints)


@dataclass(frozen=True)
class Sat:
    assignment: dict | None = None

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Unsat:
    def __bool__(self):
        return False


def polyhedron_system(poly: Polyhedron,
                      rename: Callable[[VarRef], Hashable] | None = None) -> LinearSystem:
    """View a polyhedron as a system whose unknowns are its (renamed) variables."""
    rename = rename or (lambda v: v)
    cons = []
    for c in poly.constraints:
        coeffs = {rename(v): k for v, k in c.term.coeffs}
        cons.append(LinearConstraint(coeffs, LT if c.strict else LEQ, -c.term.constant))
    return LinearSystem(tuple(rename(v) for v in poly.variables), tuple(cons))


# -- simplex -----------------------------------------------------------------


class _Tableau:
    """Dense-by-row, sparse-by-entry tableau; every row has one basic column."""

    def __init__(self, rows: list[dict[int, Fraction]], rhs: list[Fraction], basis: list[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.obj: dict[int, Fraction] = {}
        self.obj_value = Fraction(0)

    def pivot(self, r: int, col: int) -> None:
        row = self.rows[r]
        p = row[col]
        if p != 1:
            inv = 1 / p
            for j in row:
                row[j] *= inv
            self.rhs[r] *= inv
        for k, other in enumerate(self.rows):
            if k == r:
                continue
            f = other.get(col)
            if f:
                self._eliminate(other, row, f)
                self.rhs[k] -= f * self.rhs[r]
        f = self.obj.get(col)
        if f:
            self._eliminate(self.obj, row, f)
            self.obj_value += f * self.rhs[r]
        self.basis[r] = col

    @staticmethod
    def _eliminate(target: dict[int, Fraction], row: dict[int, Fraction], f: Fraction) -> None:
        for j, a in row.items():
            v = target.get(j, 0) - f * a
            if v:
                target[j] = v
            else:
                target.pop(j, None)

    def set_objective(self, costs: Mapping[int, Fraction]) -> None:
        """Minimize ``sum(costs[j] * x_j)``, expressed over the non-basic columns."""
        obj = {j: as_fraction(c) for j, c in costs.items() if c}
        value = Fraction(0)
        for r, b in enumerate(self.basis):
            cb = obj.pop(b, None)
            if cb:
                value += cb * self.rhs[r]
                for j, a in self.rows[r].items():
                    if j != b:
                        v = obj.get(j, 0) - cb * a
                        if v:
                            obj[j] = v
                        else:
                            obj.pop(j, None)
        self.obj = obj
        self.obj_value = value

    def minimize(self, allowed: Callable[[int], bool] = lambda j: True) -> bool:
        """Bland's rule; returns False iff the objective is unbounded below."""
        while True:
            entering = min((j for j, d in self.obj.items() if d < 0 and allowed(j)), default=None)
            if entering is None:
                return True
            best = None
            for r, row in enumerate(self.rows):
                a = row.get(entering)
                if a is not None and a > 0:
                    key = (self.rhs[r] / a, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return False
            self.pivot(best[1], entering)


def feasible(sys: LinearSystem) -> Sat | Unsat:
    """Decide the system exactly; ``Sat`` carries a witness for every unknown."""
    for c in sys.constraints:
        if not c.coeffs and not c.holds({}):
            return Unsat()

    # Column layout: one column per nonneg unknown, two (pos, neg) per free one.
    columns: dict[Hashable, tuple[int, ...]] = {}
    ncols = 0
    for u in sys.unknowns:
        if u in sys.nonneg:
            columns[u] = (ncols,)
            ncols += 1
        else:
            columns[u] = (ncols, ncols + 1)
            ncols += 2
    strict = sys.has_strict
    eps = None
    if strict:
        eps = ncols
        ncols += 1

    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    basis: list[int] = []
    artificial_rows = []

    def add_row(entries: dict[int, Fraction], b: Fraction, relation: str) -> None:
        nonlocal ncols
        row = dict(entries)
        slack = None
        if relation in (LEQ, LT):
            slack = ncols
            ncols += 1
            row[slack] = Fraction(1)
            if relation == LT:
                row[eps] = row.get(eps, 0) + 1
        if b < 0:
            row = {j: -a for j, a in row.items()}
            b = -b
        rows.append({j: a for j, a in row.items() if a})
        rhs.append(b)
        if slack is not None and row[slack] == 1:
            basis.append(slack)
        else:
            basis.append(-1)
            artificial_rows.append(len(rows) - 1)

    for c in sys.constraints:
        if not c.coeffs:
            continue
        entries: dict[int, Fraction] = {}
        for u, a in c.coeffs.items():
            cols = columns[u]
            entries[cols[0]] = entries.get(cols[0], 0) + a
            if len(cols) == 2:
                entries[cols[1]] = entries.get(cols[1], 0) - a
        add_row(entries, c.rhs, c.relation)
    if strict:
        add_row({eps: Fraction(1)}, Fraction(1), LEQ)

    first_artificial = ncols
    for r in artificial_rows:
        col = ncols
        ncols += 1
        rows[r][col] = Fraction(1)
        basis[r] = col

    tab = _Tableau(rows, rhs, basis)
    if artificial_rows:
        tab.set_objective({j: Fraction(1) for j in range(first_artificial, ncols)})
        tab.minimize()
        if tab.obj_value > 0:
            return Unsat()
        # Drive zero-level artificials out of the basis, dropping redundant rows.
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] >= first_artificial:
                col = min((j for j, a in tab.rows[r].items() if j < first_artificial and a),
                          default=None)
                if col is None:
                    del tab.rows[r], tab.rhs[r], tab.basis[r]
                    continue
                tab.pivot(r, col)
            r += 1
        for row in tab.rows:
            for j in [j for j in row if j >= first_artificial]:
                del row[j]

    if strict:
        tab.set_objective({eps: Fraction(-1)})
        tab.minimize(lambda j: j < first_artificial)
        if -tab.obj_value <= 0:
            return Unsat()

    values = [Fraction(0)] * ncols
    for r, b in enumerate(tab.basis):
        values[b] = tab.rhs[r]
    assignment = {}
    for u, cols in columns.items():
        assignment[u] = values[cols[0]] - (values[cols[1]] if len(cols) == 2 else 0)
    return Sat(assignment)


# -- Fourier-Motzkin -----------------------------------------------------------


def _normalize_row(coeffs: dict, rhs: Fraction, strict: bool):
    if not coeffs:
        return (), rhs, strict
    scale = abs(next(iter(sorted(coeffs.items(), key=lambda kv: repr(kv[0]))))[1])
    items = tuple(sorted(((k, c / scale) for k, c in coeffs.items()), key=lambda kv: repr(kv[0])))
    return items, rhs / scale, strict


def fourier_motzkin(sys: LinearSystem, order: Sequence | None = None) -> Sat | Unsat:
    """Feasibility by elimination; returns ``Sat()`` without a witness.

    Exponential in the worst case; intended for small systems.
    """
    # Equalities are eliminated by substitution, everything else becomes <=/<.
    eqs = [dict(c.coeffs) | {None: c.rhs} for c in sys.constraints if c.relation == EQ]
    ineqs: list[tuple[dict, Fraction, bool]] = [
        (dict(c.coeffs), c.rhs, c.relation == LT) for c in sys.constraints if c.relation != EQ
    ]
    ineqs += [({u: Fraction(-1)}, Fraction(0), False) for u in sys.unknowns if u in sys.nonneg]

    while eqs:
        eq = eqs.pop()
        rhs = eq.pop(None)
        if not eq:
            if rhs != 0:
                return Unsat()
            continue
        pivot = next(iter(eq))
        a = eq[pivot]
        # pivot = (rhs - sum(others)) / a
        sub = {k: -c / a for k, c in eq.items() if k != pivot}
        sub_rhs = rhs / a

        def substitute(coeffs: dict, b: Fraction) -> tuple[dict, Fraction]:
            f = coeffs.pop(pivot, None)
            if f is None:
                return coeffs, b
            for k, c in sub.items():
                coeffs[k] = coeffs.get(k, 0) + f * c
            return {k: c for k, c in coeffs.items() if c != 0}, b - f * sub_rhs

        new_eqs = []
        for other in eqs:
            b = other.pop(None)
            coeffs, b = substitute(other, b)
            coeffs[None] = b
            new_eqs.append(coeffs)
        eqs = new_eqs
        ineqs = [(*substitute(coeffs, b), s) for coeffs, b, s in ineqs]

    rows = { _normalize_row(c, b, s) for c, b, s in ineqs }
    remaining = list(order) if order is not None else list(sys.unknowns)
    while True:
        for items, b, s in rows:
            if not items and (b < 0 or (s and b <= 0)):
                return Unsat()
        rows = {r for r in rows if r[0]}
        present = {k for items, _, _ in rows for k, _ in items}
        candidates = [u for u in remaining if u in present]
        if not candidates:
            return Sat()
        # Cheapest elimination first keeps intermediate growth down.
        def cost(u):
            pos = sum(1 for items, _, _ in rows if dict(items).get(u, 0) > 0)
            neg = sum(1 for items, _, _ in rows if dict(items).get(u, 0) < 0)
            return pos * neg - pos - neg
        u = min(candidates, key=cost)
        remaining.remove(u)
        pos, neg, rest = [], [], set()
        for r in rows:
            c = dict(r[0]).get(u, 0)
            if c > 0:
                pos.append(r)
            elif c < 0:
                neg.append(r)
            else:
                rest.add(r)
        for pitems, pb, ps in pos:
            pc = dict(pitems)
            ap = pc[u]
            for nitems, nb, ns in neg:
                nc = dict(nitems)
                an = -nc[u]
                combined: dict[Any, Fraction] = {}
                for k, c in pc.items():
                    combined[k] = combined.get(k, 0) + c / ap
                for k, c in nc.items():
                    combined[k] = combined.get(k, 0) + c / an
                combined = {k: c for k, c in combined.items() if c != 0 and k != u}
                rest.add(_normalize_row(combined, pb / ap + nb / an, ps or ns))
        rows = rest
