"""Ideal descriptions and their text format.

File format::

    # comment
    vars: x, y, z
    x^2*y - 1/2
    x + y + z

The first non-comment line names the variables, greatest first (``x > y >
z``); every further non-empty line is one polynomial.  Variable ``k`` in the
list occupies monomial slot ``k`` (slot 0 is the total degree).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence

from .monomial import MAX_VARS, SLOT_MAX, DegreeOverflow, TooManyVariables, exponents_from_key, pack
from .poly import QQ, Polynomial, normalize, primitive_part

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f"line {line}, column {col}: " if line else (f"column {col}: " if col else "")
        super().__init__(where + message)


class ExponentOverflow(ParseError, DegreeOverflow):
    """A partial degree above the 16-bit slot limit, with its position."""


@dataclass
class IdealSpec:
    variables: List[str]
    generators: List[Polynomial]

    def __post_init__(self):
        if len(self.variables) > MAX_VARS:
            raise TooManyVariables(f"{len(self.variables)} variables, at most {MAX_VARS}")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def integer_generators(self) -> List[Polynomial]:
        """Non-zero generators as primitive integer polynomials."""
        return [primitive_part(g) for g in self.generators if g]


# ---------------------------------------------------------------------------
# parsing


class _Parser:
    """Recursive descent over ``+ - * ^ ( )``, integers, ``a/b`` and names."""

    def __init__(self, text: str, variables: Sequence[str], line: int = 0):
        self.s = text
        self.pos = 0
        self.line = line
        self.index = {v: i for i, v in enumerate(variables)}
        self.nvars = len(variables)

    def error(self, msg):
        raise ParseError(msg, self.line, self.pos + 1)

    def skip(self):
        while self.pos < len(self.s) and self.s[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.s[self.pos] if self.pos < len(self.s) else ""

    def parse(self) -> Polynomial:
        try:
            f = self.expr()
        except DegreeOverflow as exc:
            if isinstance(exc, ParseError):
                raise
            raise ExponentOverflow(str(exc), self.line, self.pos + 1) from exc
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return f

    def expr(self) -> Polynomial:
        sign = 1
        if self.peek() in "+-" and self.peek():
            sign = -1 if self.s[self.pos] == "-" else 1
            self.pos += 1
        f = self.term()
        if sign < 0:
            f = -f
        while self.peek() and self.peek() in "+-":
            op = self.s[self.pos]
            self.pos += 1
            t = self.term()
            f = f + t if op == "+" else f - t
        return f

    def term(self) -> Polynomial:
        f = self.factor()
        while self.peek() == "*":
            self.pos += 1
            f = f * self.factor()
        return f

    def factor(self) -> Polynomial:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            self.skip()
            m = re.compile(r"\d+").match(self.s, self.pos)
            if not m:
                self.error("expected a non-negative integer exponent")
            e = int(m.group())
            start = self.pos
            self.pos = m.end()
            if len(base) == 1 and base.coeffs[0] == 1:
                exps = tuple(x * e for x in exponents_from_key(base.monos[0], self.nvars))
                try:
                    return Polynomial(self.nvars, QQ, [pack(exps, self.nvars).key], [Fraction(1)])
                except DegreeOverflow as exc:
                    self.pos = start
                    raise ExponentOverflow(str(exc), self.line, start + 1) from exc
            if e > SLOT_MAX and len(base) > 1:
                raise ExponentOverflow(f"exponent {e} exceeds {SLOT_MAX}", self.line, start + 1)
            out = Polynomial.constant(1, self.nvars, QQ)
            for _ in range(e):
                out = out * base
            return out
        return base

    def atom(self) -> Polynomial:
        c = self.peek()
        if c == "(":
            self.pos += 1
            f = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return f
        if c.isdigit():
            m = re.compile(r"(\d+)(?:\s*/\s*(\d+))?").match(self.s, self.pos)
            num = int(m.group(1))
            den = int(m.group(2)) if m.group(2) else 1
            if den == 0:
                self.error("zero denominator")
            self.pos = m.end()
            return Polynomial.constant(Fraction(num, den), self.nvars, QQ)
        m = _NAME.match(self.s, self.pos)
        if m:
            name = m.group()
            if name not in self.index:
                self.error(f"unknown variable {name!r}")
            self.pos = m.end()
            exps = [0] * self.nvars
            exps[self.index[name]] = 1
            return Polynomial(self.nvars, QQ, [pack(exps, self.nvars).key], [Fraction(1)])
        if not c:
            self.error("unexpected end of input")
        self.error(f"unexpected {c!r}")


def parse_polynomial(text: str, variables: Sequence[str], line: int = 0) -> Polynomial:
    return _Parser(text, variables, line).parse()


def parse_ideal(text: str) -> IdealSpec:
    variables = None
    gens = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if variables is None:
            head = body.strip()
            if not head.startswith("vars:"):
                raise ParseError("first line must be 'vars: ...'", lineno, 1)
            variables = [v.strip() for v in head[5:].split(",") if v.strip()]
            for v in variables:
                if not _NAME.fullmatch(v):
                    raise ParseError(f"bad variable name {v!r}", lineno, 1)
            if len(variables) > MAX_VARS:
                raise TooManyVariables(f"{len(variables)} variables, at most {MAX_VARS}")
            continue
        gens.append(parse_polynomial(body, variables, lineno))
    if variables is None:
        raise ParseError("missing 'vars:' line")
    return IdealSpec(variables, gens)


# ---------------------------------------------------------------------------
# printing


def format_monomial(exps: Sequence[int], variables: Sequence[str]) -> str:
    parts = []
    for v, e in zip(variables, exps):
        if e == 1:
            parts.append(v)
        elif e:
            parts.append(f"{v}^{e}")
    return "*".join(parts)


def format_polynomial(f: Polynomial, variables: Sequence[str]) -> str:
    if not f:
        return "0"
    out = []
    for m, c in zip(f.monos, f.coeffs):
        mono = format_monomial(exponents_from_key(m, len(variables)), variables)
        c = Fraction(c)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if not out:
            out.append(body if sign == "+" else "-" + body)
        else:
            out.append(f"{sign} {body}")
    return " ".join(out)


def print_basis(basis: Sequence[Polynomial], variables: Sequence[str]) -> str:
    lines = ["vars: " + ", ".join(variables)]
    lines.extend(format_polynomial(f, variables) for f in basis)
    return "\n".join(lines) + "\n"


def to_rational(f: Polynomial) -> Polynomial:
    return normalize(zip(f.monos, (Fraction(c) for c in f.coeffs)), f.nvars, QQ)
