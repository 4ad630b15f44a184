"""Sparse distributed polynomials over Z/pZ, Z and Q.

Terms are kept as two parallel tuples, ``monos`` (degrevlex order keys, see
:mod:`modgb.monomial`) in strictly decreasing order and ``coeffs`` with no
zero entries.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, List, Sequence, Tuple

from . import arith
from .monomial import (
    BORROW_MASK,
    SLOT_MAX,
    DegreeOverflow,
    Monomial,
    bits_from_key,
    exponents_from_key,
    key_degree,
    key_from_exponents,
    lcm_exponents,
)


class ZeroInput(ValueError):
    pass


@dataclass(frozen=True)
class Domain:
    """Coefficient domain: ``ZZ``, ``QQ`` or ``GF(p)``."""

    kind: str
    p: int = 0

    def __repr__(self):
        return f"GF({self.p})" if self.kind == "GF" else self.kind

    @property
    def is_field(self) -> bool:
        return self.kind != "ZZ"

    def convert(self, c):
        if self.kind == "GF":
            if isinstance(c, Fraction):
                return c.numerator * arith.inv(c.denominator, self.p) % self.p
            return c % self.p
        if self.kind == "QQ":
            return Fraction(c)
        if isinstance(c, Fraction):
            if c.denominator != 1:
                raise ValueError(f"{c} is not an integer")
            return c.numerator
        return int(c)

    def div(self, a, b):
        if self.kind == "GF":
            return a * arith.inv(b, self.p) % self.p
        if self.kind == "QQ":
            return a / b
        q, r = divmod(a, b)
        if r:
            raise ArithmeticError(f"{b} does not divide {a} in ZZ")
        return q


ZZ = Domain("ZZ")
QQ = Domain("QQ")


def GF(p: int) -> Domain:
    return Domain("GF", p)


class Polynomial:
    """Immutable sparse polynomial; build it with :func:`normalize`."""

    __slots__ = ("nvars", "domain", "monos", "coeffs")

    def __init__(self, nvars: int, domain: Domain, monos=(), coeffs=()):
        self.nvars = nvars
        self.domain = domain
        self.monos = tuple(monos)
        self.coeffs = tuple(coeffs)

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, nvars: int, domain: Domain) -> "Polynomial":
        return cls(nvars, domain)

    @classmethod
    def constant(cls, c, nvars: int, domain: Domain) -> "Polynomial":
        return normalize([(0, c)], nvars, domain)

    @classmethod
    def from_dict(cls, d: dict, nvars: int, domain: Domain) -> "Polynomial":
        """Build from ``{exponent tuple: coefficient}``."""
        return normalize(
            [(key_from_exponents(e), c) for e, c in d.items()], nvars, domain
        )

    # -- accessors --------------------------------------------------------

    def __bool__(self):
        return bool(self.monos)

    def __len__(self):
        return len(self.monos)

    @property
    def terms(self) -> List[Tuple[Monomial, object]]:
        return [
            (Monomial.from_key(m, self.nvars), c)
            for m, c in zip(self.monos, self.coeffs)
        ]

    @property
    def lm(self) -> int:
        return self.monos[0]

    @property
    def lc(self):
        return self.coeffs[0]

    def lead_exponents(self) -> tuple:
        return exponents_from_key(self.monos[0], self.nvars)

    def to_dict(self) -> dict:
        return {
            exponents_from_key(m, self.nvars): c
            for m, c in zip(self.monos, self.coeffs)
        }

    def support(self) -> Tuple[int, ...]:
        return self.monos

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (
            self.nvars == other.nvars
            and self.domain == other.domain
            and self.monos == other.monos
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.nvars, self.domain, self.monos, self.coeffs))

    def __repr__(self):
        body = " + ".join(
            f"{c}*{exponents_from_key(m, self.nvars)}"
            for m, c in zip(self.monos, self.coeffs)
        )
        return f"Polynomial[{self.domain}]({body or '0'})"

    # -- arithmetic -------------------------------------------------------

    def _like(self, monos, coeffs) -> "Polynomial":
        return Polynomial(self.nvars, self.domain, monos, coeffs)

    def __neg__(self):
        if self.domain.kind == "GF":
            p = self.domain.p
            return self._like(self.monos, [(-c) % p for c in self.coeffs])
        return self._like(self.monos, [-c for c in self.coeffs])

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return normalize(
            list(zip(self.monos, self.coeffs)) + list(zip(other.monos, other.coeffs)),
            self.nvars,
            self.domain,
        )

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def _max_exponents(self) -> tuple:
        out = [0] * (self.nvars + 1)
        for m in self.monos:
            for i, e in enumerate((key_degree(m),) + exponents_from_key(m, self.nvars)):
                out[i] = max(out[i], e)
        return tuple(out)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if self.monos and other.monos:
            worst = [a + b for a, b in zip(self._max_exponents(), other._max_exponents())]
            if max(worst) > SLOT_MAX:
                raise DegreeOverflow(f"product degree {max(worst)} exceeds {SLOT_MAX}")
        acc = {}
        for m1, c1 in zip(self.monos, self.coeffs):
            for m2, c2 in zip(other.monos, other.coeffs):
                k = m1 + m2
                acc[k] = acc.get(k, 0) + c1 * c2
        return normalize(acc.items(), self.nvars, self.domain)

    def scale(self, c) -> "Polynomial":
        c = self.domain.convert(c)
        if not c:
            return self._like((), ())
        if self.domain.kind == "GF":
            p = self.domain.p
            return self._like(self.monos, [x * c % p for x in self.coeffs])
        return self._like(self.monos, [x * c for x in self.coeffs])

    def shift(self, mono: int, c=1) -> "Polynomial":
        """Multiply by the term ``c * mono`` (``mono`` an order key)."""
        scaled = self.scale(c) if c != 1 else self
        return self._like([m + mono for m in scaled.monos], scaled.coeffs)

    def monic(self) -> "Polynomial":
        if not self.monos:
            return self
        return self.scale(self.domain.div(self.domain.convert(1), self.lc))

    def change_domain(self, domain: Domain) -> "Polynomial":
        return normalize(
            [(m, domain.convert(c)) for m, c in zip(self.monos, self.coeffs)],
            self.nvars,
            domain,
        )


def normalize(raw: Iterable, nvars: int, domain: Domain) -> Polynomial:
    """Sort, merge and drop zero terms of ``(order key, coefficient)`` pairs.

    Monomials may also be given as :class:`Monomial` instances.
    """
    acc = {}
    for m, c in raw:
        if isinstance(m, Monomial):
            m = m.key
        acc[m] = acc.get(m, 0) + c
    monos = []
    coeffs = []
    for m in sorted(acc, reverse=True):
        c = domain.convert(acc[m])
        if c:
            monos.append(m)
            coeffs.append(c)
    return Polynomial(nvars, domain, monos, coeffs)


# ---------------------------------------------------------------------------
# s-polynomials and division


def _lcm_key(f: Polynomial, g: Polynomial) -> int:
    return key_from_exponents(lcm_exponents(f.lead_exponents(), g.lead_exponents()))


def spoly(f: Polynomial, g: Polynomial) -> Polynomial:
    """S-polynomial of ``f`` and ``g``; fraction-free over ``ZZ``."""
    if not f or not g:
        raise ZeroInput("s-polynomial of a zero polynomial")
    L = _lcm_key(f, g)
    uf, ug = L - f.lm, L - g.lm
    if f.domain.kind == "ZZ":
        a, b = f.lc, g.lc
        d = gcd(a, b)
        cf, cg = b // d, a // d
    else:
        dom = f.domain
        one = dom.convert(1)
        cf, cg = dom.div(one, f.lc), dom.div(one, g.lc)
    return f.shift(uf, cf) - g.shift(ug, cg)


@dataclass
class DivisionResult:
    """``multiplier * f == sum(q * d) + remainder`` (multiplier is 1 over a field)."""

    quotients: List[Polynomial]
    remainder: Polynomial
    multiplier: object = 1


def heap_divide(f: Polynomial, divisors: Sequence[Polynomial]) -> DivisionResult:
    """Multivariate division of ``f`` by ``divisors`` using a max-heap.

    Every quotient term opens a stream ``q * tail(d)``; the heap merges the
    streams with the terms of ``f`` so each output monomial is produced once,
    largest first.  A term is reduced by the first divisor whose leading
    monomial divides it; otherwise it goes to the remainder.  Over ``ZZ`` the
    division is fraction-free and the accumulated multiplier is returned.
    """
    dom = f.domain
    nv = f.nvars
    k = len(divisors)
    if any(not d for d in divisors):
        raise ZeroInput("division by a zero polynomial")
    if not f:
        return DivisionResult([Polynomial.zero(nv, dom) for _ in range(k)], f, 1)

    lead_bits = [bits_from_key(d.lm) for d in divisors]
    lead_coeffs = [d.lc for d in divisors]
    is_gf = dom.kind == "GF"
    is_zz = dom.kind == "ZZ"
    p = dom.p
    lead_invs = [arith.inv(c, p) for c in lead_coeffs] if is_gf else None

    # streams: 0 -> f, s >= 1 -> (divisor, quotient mono, quotient coeff, scale-at-birth)
    streams = [None]
    heap = [(-f.monos[0], 0, 0)]  # (-mono, stream, index of next term)
    q_terms = [[] for _ in range(k)]  # (mono, coeff, scale-at-birth)
    r_terms = []  # (mono, coeff, scale-at-birth)
    scale = 1  # fraction-free multiplier (ZZ only)
    fm, fc = f.monos, f.coeffs

    dmonos = [d.monos for d in divisors]
    dcoeffs = [d.coeffs for d in divisors]
    dlens = [len(d.monos) for d in divisors]
    nf = len(fm)
    push, pop, replace = heapq.heappush, heapq.heappop, heapq.heapreplace

    while heap:
        negm = heap[0][0]
        m = -negm
        c = 0
        # consume every stream currently sitting on monomial m
        while heap and heap[0][0] == negm:
            _, s, i = heap[0]
            i1 = i + 1
            if s == 0:
                c += fc[i] * scale
                if i1 < nf:
                    replace(heap, (-fm[i1], 0, i1))
                else:
                    pop(heap)
            else:
                j, qm, qc, born = streams[s]
                factor = qc * (scale // born) if is_zz else qc
                c -= factor * dcoeffs[j][i]
                if i1 < dlens[j]:
                    replace(heap, (-(qm + dmonos[j][i1]), s, i1))
                else:
                    pop(heap)
        if is_gf:
            c %= p
        if not c:
            continue
        mb = bits_from_key(m)
        for j, lb in enumerate(lead_bits):
            diff = mb - lb
            if diff >= 0 and not (diff ^ mb ^ lb) & BORROW_MASK:
                break
        else:
            r_terms.append((m, c, scale))
            continue
        qm = m - dmonos[j][0]
        if is_gf:
            qc = c * lead_invs[j] % p
        elif is_zz:
            lc = lead_coeffs[j]
            if c % lc:
                extra = lc // gcd(c, lc)
                if extra < 0:
                    extra = -extra
                scale *= extra
                c *= extra
            qc = c // lc
        else:
            qc = c / lead_coeffs[j]
        q_terms[j].append((qm, qc, scale))
        if dlens[j] > 1:
            streams.append((j, qm, qc, scale))
            push(heap, (-(qm + dmonos[j][1]), len(streams) - 1, 1))

    def finish(terms):
        if is_zz:
            return Polynomial(nv, dom, [t[0] for t in terms],
                              [t[1] * (scale // t[2]) for t in terms])
        return Polynomial(nv, dom, [t[0] for t in terms], [t[1] for t in terms])

    return DivisionResult([finish(t) for t in q_terms], finish(r_terms), scale)


# ---------------------------------------------------------------------------
# coefficient maps


def map_mod(f: Polynomial, p: int) -> Tuple[Polynomial, bool]:
    """Reduce an integer (or rational) polynomial modulo ``p``.

    The flag reports that the leading coefficient vanished (or a denominator
    was divisible by ``p``), i.e. that ``p`` is unlucky for ``f``.
    """
    dom = GF(p)
    monos, coeffs = [], []
    flag = False
    for m, c in zip(f.monos, f.coeffs):
        if isinstance(c, Fraction):
            if c.denominator % p == 0:
                flag = True
                continue
            c = c.numerator * arith.inv(c.denominator, p)
        c %= p
        if c:
            monos.append(m)
            coeffs.append(c)
    if f.monos and (not monos or monos[0] != f.monos[0]):
        flag = True
    return Polynomial(f.nvars, dom, monos, coeffs), flag


def content(f: Polynomial) -> int:
    g = 0
    for c in f.coeffs:
        g = gcd(g, c)
    return g


def primitive_part(f: Polynomial) -> Polynomial:
    """Integer primitive part with positive leading coefficient."""
    if not f:
        return Polynomial.zero(f.nvars, ZZ)
    coeffs = [Fraction(c) for c in f.coeffs]
    den = 1
    for c in coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    g = 0
    for c in ints:
        g = gcd(g, c)
    if ints[0] < 0:
        g = -g
    return Polynomial(f.nvars, ZZ, f.monos, [c // g for c in ints])


def lift_symmetric(f: Polynomial) -> Polynomial:
    """Map a GF(p) polynomial to ZZ with coefficients in (-p/2, p/2]."""
    p = f.domain.p
    half = p // 2
    return Polynomial(
        f.nvars, ZZ, f.monos, [c - p if c > half else c for c in f.coeffs]
    )


def max_norm(f: Polynomial) -> int:
    return max((abs(c) for c in f.coeffs), default=0)


def one_norm(f: Polynomial) -> int:
    return sum(abs(c) for c in f.coeffs)

