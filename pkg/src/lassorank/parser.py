"""Reader and printer for the ``.lasso`` text format.

Example::

    # P_yPositive
    vars: x, y;
    domain: real;
    stem: y' == 23;
    loop: x >= 0, x' == x - y, y' == y + 1;

Sections end with ``;``.  ``vars``, ``stem`` and ``loop`` are required,
``domain`` defaults to ``real``.  Relations are affine comparisons using
``<= < >= > ==`` and may be chained (``0 <= x <= 10``).  Primed variables not
mentioned in a relation are unconstrained.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .core import (AffineTerm, Constraint, Domain, LassoProgram, Polyhedron, VarRef,
                   format_constraint, transition_variables)

KEYWORDS = ("vars", "domain", "stem", "loop")


class ParseError(Exception):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|>=|==|<|>|[-+*/(),;:'])
""", re.VERBOSE)


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(line, pos - line_start + 1, f"unexpected character {source[pos]!r}")
        kind = m.lastgroup
        text = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, text, line, pos - line_start + 1))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.i = 0
        self.uses: list[tuple[VarRef, _Token]] = []

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.tok
        raise ParseError(tok.line, tok.column, message)

    def advance(self) -> _Token:
        tok = self.tok
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("op", "ident") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Token:
        if self.tok.text != text or self.tok.kind not in ("op", "ident"):
            found = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def program(self) -> LassoProgram:
        sections: dict[str, object] = {}
        while self.tok.kind != "eof":
            head = self.tok
            if head.kind != "ident" or head.text not in KEYWORDS:
                self.error(f"expected a section ({', '.join(KEYWORDS)}), found {head.text!r}")
            if head.text in sections:
                self.error(f"duplicate section {head.text!r}")
            self.advance()
            self.expect(":")
            if head.text == "vars":
                sections["vars"] = self.var_list()
            elif head.text == "domain":
                tok = self.advance()
                try:
                    sections["domain"] = Domain(tok.text)
                except ValueError:
                    self.error(f"unknown domain {tok.text!r} (expected real or int)", tok)
            else:
                sections[head.text] = self.relations()
            self.expect(";")
        for name in ("vars", "stem", "loop"):
            if name not in sections:
                self.error(f"missing section {name!r}")
        names = sections["vars"]
        declared = set(names)
        for v, tok in self.uses:
            if v.name not in declared:
                self.error(f"unknown variable {v.name!r}", tok)
        universe = transition_variables(names)
        return LassoProgram(tuple(names), Polyhedron(universe, tuple(sections["stem"])),
                            Polyhedron(universe, tuple(sections["loop"])),
                            sections.get("domain", Domain.REAL))

    def var_list(self) -> list[str]:
        names: list[str] = []
        while True:
            tok = self.tok
            if tok.kind != "ident":
                self.error("expected a variable name")
            if tok.text in KEYWORDS:
                self.error(f"{tok.text!r} is reserved", tok)
            if tok.text in names:
                self.error(f"variable {tok.text!r} declared twice", tok)
            names.append(self.advance().text)
            if not self.accept(","):
                return names

    def relations(self) -> list[Constraint]:
        rows: list[Constraint] = []
        if self.tok.text == ";":
            return rows
        while True:
            rows.extend(self.relation())
            if not self.accept(","):
                return rows

    def relation(self) -> list[Constraint]:
        left = self.expr()
        rows = []
        chained = False
        while self.tok.kind == "op" and self.tok.text in ("<=", "<", ">=", ">", "=="):
            op = self.advance().text
            right = self.expr()
            if op == "<=":
                rows.append(Constraint.leq(left, right))
            elif op == "<":
                rows.append(Constraint.lt(left, right))
            elif op == ">=":
                rows.append(Constraint.geq(left, right))
            elif op == ">":
                rows.append(Constraint.gt(left, right))
            else:
                rows.extend(Constraint.eq(left, right))
            left = right
            chained = True
        if not chained:
            self.error("expected a comparison (<=, <, >=, >, ==)")
        return rows

    def expr(self) -> AffineTerm:
        value = self.term()
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            op = self.advance().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> AffineTerm:
        value = self.unary()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            op_tok = self.advance()
            rhs = self.unary()
            if op_tok.text == "*":
                if value.is_constant():
                    value = rhs.scale(value.constant)
                elif rhs.is_constant():
                    value = value.scale(rhs.constant)
                else:
                    self.error("nonlinear term: product of two variables", op_tok)
            else:
                if not rhs.is_constant():
                    self.error("division by a non-constant expression", op_tok)
                if rhs.constant == 0:
                    self.error("division by zero", op_tok)
                value = value.scale(1 / rhs.constant)
        return value

    def unary(self) -> AffineTerm:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.atom()

    def atom(self) -> AffineTerm:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return AffineTerm.const(Fraction(int(tok.text)))
        if tok.kind == "ident":
            if tok.text in KEYWORDS:
                self.error(f"{tok.text!r} is reserved", tok)
            self.advance()
            primed = self.accept("'")
            v = VarRef(tok.text, primed)
            self.uses.append((v, tok))
            return AffineTerm({v: 1})
        if self.accept("("):
            value = self.expr()
            self.expect(")")
            return value
        self.error(f"expected a number, variable or '(', found {tok.text or 'end of input'!r}")


def parse_program(source: str) -> LassoProgram:
    """Parse ``.lasso`` text; raises :class:`ParseError` with a 1-based position."""
    return _Parser(source).program()


def _format_relation(poly: Polyhedron) -> str:
    rows = list(poly.constraints)
    out = []
    i = 0
    while i < len(rows):
        c = rows[i]
        nxt = rows[i + 1] if i + 1 < len(rows) else None
        if (nxt is not None and not c.strict and not nxt.strict
                and nxt.term == -c.term and c.term.coeffs):
            out.append(format_constraint(c, poly.variables, "=="))
            i += 2
        else:
            out.append(format_constraint(c, poly.variables))
            i += 1
    return ", ".join(out)


def format_program(p: LassoProgram) -> str:
    """Canonical text; ``parse_program(format_program(p)) == p``."""
    lines = [
        f"vars: {', '.join(p.program_vars)};",
        f"domain: {p.domain.value};",
        f"stem: {_format_relation(p.stem)};",
        f"loop: {_format_relation(p.loop)};",
    ]
    return "\n".join(lines) + "\n"
