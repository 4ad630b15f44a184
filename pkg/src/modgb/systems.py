"""Benchmark ideals: Cyclic-n, Katsura-n and alea6."""

from __future__ import annotations

from .ideal import IdealSpec, parse_polynomial
from .monomial import key_from_exponents
from .poly import QQ, normalize


def cyclic(n: int) -> IdealSpec:
    """Sums of the ``n`` cyclic products of ``k`` consecutive variables, plus
    ``x0*...*x(n-1) - 1``."""
    if not 2 <= n <= 9:
        raise ValueError("cyclic(n) needs 2 <= n <= 9")
    variables = [f"x{i}" for i in range(n)]
    gens = []
    for k in range(1, n):
        terms = []
        for i in range(n):
            e = [0] * n
            for j in range(k):
                e[(i + j) % n] += 1
            terms.append((key_from_exponents(e), 1))
        gens.append(normalize(terms, n, QQ))
    gens.append(normalize([(key_from_exponents([1] * n), 1), (0, -1)], n, QQ))
    return IdealSpec(variables, gens)


def katsura(n: int) -> IdealSpec:
    """Katsura-n in the ``n + 1`` variables ``u0..un``.

    With ``u(-m) = u(m)`` and ``u(m) = 0`` for ``|m| > n``::

        sum_{k=-n..n} u(k) u(m-k) - u(m) = 0      for m = 0..n-1
        sum_{k=-n..n} u(k) - 1 = 0
    """
    if not 1 <= n <= 12:
        raise ValueError("katsura(n) needs 1 <= n <= 12")
    nv = n + 1
    variables = [f"u{i}" for i in range(nv)]

    def var(i):
        i = abs(i)
        if i > n:
            return None
        e = [0] * nv
        e[i] = 1
        return e

    gens = []
    for m in range(n):
        terms = []
        for k in range(-n, n + 1):
            a, b = var(k), var(m - k)
            if a is None or b is None:
                continue
            terms.append((key_from_exponents([x + y for x, y in zip(a, b)]), 1))
        terms.append((key_from_exponents(var(m)), -1))
        gens.append(normalize(terms, nv, QQ))
    lin = [(key_from_exponents(var(k)), 1) for k in range(-n, n + 1)]
    lin.append((0, -1))
    gens.append(normalize(lin, nv, QQ))
    return IdealSpec(variables, gens)


ALEA6_TEXT = (
    "5*x^2*t+37*y*t*u+32*y*t*v+21*t*v+55*u*v",
    "39*x*y*v+23*y^2*u+57*y*z*u+56*y*u^2+10*z^2+52*t*u*v",
    "33*x^2*t+51*x^2+42*x*t*v+51*y^2*u+32*y*t^2+v^3",
    "44*x*t^2+42*y*t+47*y*u^2+12*z*t+2*z*u*v+43*t*u^2",
    "49*x^2*z+11*x*y*z+39*x*t*u+44*x*t*u+54*x*t+45*y^2*u",
    "48*x*z*t+2*z^2*t+59*z^2*v+17*z+36*t^3+45*u",
)
ALEA6_VARS = ["x", "y", "z", "t", "u", "v"]


def alea6_terms():
    """Raw ``(coefficient, exponents)`` terms of alea6, before merging."""
    out = []
    for text in ALEA6_TEXT:
        row = []
        for term in text.split("+"):
            factors = term.split("*")
            coeff = 1
            exps = [0] * 6
            for fct in factors:
                if fct.isdigit():
                    coeff *= int(fct)
                    continue
                name, _, e = fct.partition("^")
                exps[ALEA6_VARS.index(name)] += int(e) if e else 1
            row.append((coeff, tuple(exps)))
        out.append(row)
    return out


def alea6() -> IdealSpec:
    gens = [parse_polynomial(t, ALEA6_VARS) for t in ALEA6_TEXT]
    return IdealSpec(list(ALEA6_VARS), gens)


GENERATORS = {"cyclic": cyclic, "katsura": katsura}


def by_name(name: str, n: int = 0) -> IdealSpec:
    if name == "alea6":
        return alea6()
    if name not in GENERATORS:
        raise ValueError(f"unknown system {name!r}")
    return GENERATORS[name](n)
