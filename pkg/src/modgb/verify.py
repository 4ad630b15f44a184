"""Checking a reconstructed basis.

A candidate is accepted when (a) every input generator reduces to zero
modulo it and (b) every s-polynomial of the candidate reduces to zero.  The
s-polynomial check comes in three flavours:

``probabilistic``
    reduce modulo check primes until their product exceeds ``1/epsilon``;
``integer``
    fraction-free reduction over the integers;
``modular``
    reduce modulo primes recording quotients, reconstruct the quotients by
    CRT + Farey and prove the identity ``s = sum(q_k * g_k)`` over Q.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from . import arith, f4gb
from .poly import QQ, ZZ, Polynomial, heap_divide, map_mod, max_norm, primitive_part, spoly
from .reconstruct import RationalCandidate, crt_pair, lift_polynomial

log = logging.getLogger(__name__)

PROBABILISTIC = "probabilistic"
INTEGER = "integer"
MODULAR = "modular"
MODES = (PROBABILISTIC, INTEGER, MODULAR)

CERTIFIED = "certified"
PROBABLE = "probably-correct"
REJECTED = "rejected"

# quotient reconstruction gives up and expands over ZZ after this many primes
MAX_QUOTIENT_PRIMES = 200


@dataclass
class CheckReport:
    mode: str
    result: str
    primes: List[int] = field(default_factory=list)
    bound: Optional[Fraction] = None
    witness: object = None
    skipped_primes: int = 0
    pairs_checked: int = 0
    shortcut_used: int = 0
    expanded: int = 0

    @property
    def accepted(self) -> bool:
        return self.result != REJECTED


def default_primes() -> Iterator[int]:
    return arith.primes_below(1 << 29)


def critical_pairs(basis: Sequence[Polynomial]) -> List[Tuple[int, int]]:
    """Index pairs whose leads are not coprime."""
    out = []
    exps = [f.lead_exponents() for f in basis]
    for j in range(len(basis)):
        for i in range(j):
            if any(a and b for a, b in zip(exps[i], exps[j])):
                out.append((i, j))
    return out


def _usable(p: int, integer_basis: Sequence[Polynomial]) -> bool:
    return all(f.lc % p for f in integer_basis)


def _images(integer_basis, p):
    return [map_mod(f, p)[0].monic() for f in integer_basis]


# ---------------------------------------------------------------------------
# inclusion


def check_inclusion(
    generators: Sequence[Polynomial],
    candidate: RationalCandidate,
    mode: str = INTEGER,
    primes: Optional[Iterable[int]] = None,
) -> CheckReport:
    """Do all generators reduce to zero modulo the candidate?

    ``mode`` is ``"rational"`` (division over Q), ``"integer"``
    (fraction-free division), ``"modular"`` (quotient reconstruction, exact)
    or ``"probabilistic"`` (division modulo each prime in ``primes``).
    """
    gens = [g for g in generators if g]
    if mode == "rational":
        for i, g in enumerate(gens):
            if heap_divide(g.change_domain(candidate.basis[0].domain), candidate.basis).remainder:
                return CheckReport(mode, REJECTED, witness=i)
        return CheckReport(mode, CERTIFIED)
    ints = [_as_integer(g) for g in gens]
    if mode == INTEGER:
        for i, g in enumerate(ints):
            if heap_divide(g, candidate.integer_basis).remainder:
                return CheckReport(mode, REJECTED, witness=i)
        return CheckReport(mode, CERTIFIED)
    if mode == MODULAR:
        report = CheckReport(mode, CERTIFIED)
        for i, g in enumerate(ints):
            if not _zero_reduction_certified(g, candidate.integer_basis, report):
                report.result = REJECTED
                report.witness = i
                return report
        return report
    if mode == PROBABILISTIC:
        report = CheckReport(mode, PROBABLE)
        for p in primes:
            report.primes.append(p)
            basis = _images(candidate.integer_basis, p)
            rems = f4gb.normal_forms([map_mod(g, p)[0] for g in ints], basis, p)
            for i, r in enumerate(rems):
                if r:
                    report.result = REJECTED
                    report.witness = (i, p)
                    return report
        return report
    raise ValueError(f"unknown inclusion mode {mode!r}")


def _as_integer(g: Polynomial) -> Polynomial:
    return g if g.domain == ZZ else primitive_part(g)


# ---------------------------------------------------------------------------
# s-polynomial checks


def check_gb_probabilistic(
    candidate: RationalCandidate, epsilon: float, primes: Optional[Iterable[int]] = None
) -> CheckReport:
    """S-polynomials reduce to zero modulo primes whose product exceeds ``1/epsilon``."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    eps = Fraction(epsilon)
    src = iter(primes if primes is not None else default_primes())
    report = CheckReport(PROBABILISTIC, PROBABLE)
    G = candidate.integer_basis
    pairs = critical_pairs(G)
    prod = 1
    while prod * eps < 1:
        p = next(src)
        if not _usable(p, G):
            report.skipped_primes += 1
            continue
        basis = _images(G, p)
        spolys = [spoly(basis[i], basis[j]) for i, j in pairs]
        for (i, j), r in zip(pairs, f4gb.normal_forms(spolys, basis, p)):
            if r:
                report.primes.append(p)
                report.result = REJECTED
                report.witness = ((i, j), p)
                return report
        report.primes.append(p)
        prod *= p
    report.pairs_checked = len(pairs)
    report.bound = Fraction(1, prod)
    return report


def check_gb_deterministic_integer(candidate: RationalCandidate) -> CheckReport:
    """Every s-polynomial fraction-free reduces to zero over ZZ."""
    G = candidate.integer_basis
    report = CheckReport(INTEGER, CERTIFIED)
    for i, j in critical_pairs(G):
        report.pairs_checked += 1
        if heap_divide(spoly(G[i], G[j]), G).remainder:
            report.result = REJECTED
            report.witness = (i, j)
            return report
    return report


def check_gb_deterministic_modular(
    candidate: RationalCandidate, primes: Optional[Iterable[int]] = None
) -> CheckReport:
    """Every s-polynomial is proven to be a combination of the basis over Q.

    Quotients of the division modulo successive primes are reconstructed
    until they stabilize; the identity is then confirmed either by the
    coefficient-bound argument or by direct expansion.
    """
    G = candidate.integer_basis
    report = CheckReport(MODULAR, CERTIFIED)
    for i, j in critical_pairs(G):
        report.pairs_checked += 1
        if not _zero_reduction_certified(spoly(G[i], G[j]), G, report, primes):
            report.result = REJECTED
            report.witness = (i, j)
            return report
    return report


def quotient_bound(f: Polynomial, quotients: Sequence[Polynomial], G: Sequence[Polynomial]) -> int:
    """Bound on the coefficients of ``L*f - sum(L*q_k*g_k)``, ``L`` the
    common denominator of the quotients."""
    L = 1
    for q in quotients:
        for c in q.coeffs:
            L = L * c.denominator // gcd(L, c.denominator)
    bound = L * max_norm(f)
    for q, g in zip(quotients, G):
        if q:
            bound += sum(abs(c * L) for c in q.coeffs) * max_norm(g)
    return int(bound)


def _zero_reduction_certified(
    f: Polynomial,
    G: Sequence[Polynomial],
    report: CheckReport,
    primes: Optional[Iterable[int]] = None,
) -> bool:
    """Prove ``f`` lies in the ideal of the integer basis ``G`` via modular quotients."""
    if not f:
        return True
    src = iter(primes if primes is not None else default_primes())
    residues = [dict() for _ in G]
    modulus = 1
    used = []
    previous = None
    while len(used) < MAX_QUOTIENT_PRIMES:
        p = next(src)
        if not _usable(p, G):
            report.skipped_primes += 1
            continue
        fp, _ = map_mod(f, p)
        Gp = [map_mod(g, p)[0] for g in G]
        div = heap_divide(fp, Gp)
        if div.remainder:
            if p not in report.primes:
                report.primes.append(p)
            return False
        if previous is not None and _matches(previous, div.quotients, p):
            used.append(p)
            for q in used:
                if q not in report.primes:
                    report.primes.append(q)
            M = modulus * p
            if M > 2 * quotient_bound(f, previous, G):
                report.shortcut_used += 1
                return True
            report.expanded += 1
            return _expand_identity(f, previous, G)
        for acc, q in zip(residues, div.quotients):
            new = dict(zip(q.monos, q.coeffs))
            for mono in new.keys() - acc.keys():
                acc[mono] = 0
            for mono in acc:
                acc[mono], _ = crt_pair(acc[mono], modulus, new.get(mono, 0), p)
        modulus *= p
        used.append(p)
        previous = _lift_quotients(residues, modulus, f.nvars)
    log.info("quotients did not stabilize; expanding over ZZ")
    report.expanded += 1
    return not heap_divide(f, G).remainder


def _lift_quotients(residues, modulus, nvars):
    out = []
    for acc in residues:
        q = lift_polynomial(acc, modulus, nvars)
        if q is None:
            return None
        out.append(q)
    return out


def _matches(quotients: Sequence[Polynomial], modp: Sequence[Polynomial], p: int) -> bool:
    for q, qp in zip(quotients, modp):
        have = dict(zip(qp.monos, qp.coeffs))
        for mono, c in zip(q.monos, q.coeffs):
            if c.denominator % p == 0:
                return False
            if have.pop(mono, 0) != c.numerator * pow(c.denominator, -1, p) % p:
                return False
        if any(have.values()):
            return False
    return True


def _expand_identity(f: Polynomial, quotients, G) -> bool:
    total = Polynomial.zero(f.nvars, QQ)
    for q, g in zip(quotients, G):
        if q:
            total = total + q * g.change_domain(QQ)
    return total == f.change_domain(QQ)


# ---------------------------------------------------------------------------
# composition


def certify(
    generators: Sequence[Polynomial],
    candidate: RationalCandidate,
    mode: str = INTEGER,
    epsilon: float = 0.0,
    primes: Optional[Iterable[int]] = None,
) -> CheckReport:
    """Inclusion check followed by the s-polynomial check of ``mode``."""
    if mode not in MODES:
        raise ValueError(f"unknown check mode {mode!r}")
    if mode == PROBABILISTIC:
        src = iter(primes if primes is not None else default_primes())
        gb = check_gb_probabilistic(candidate, epsilon, src)
        if not gb.accepted:
            return gb
        inc = check_inclusion(generators, candidate, PROBABILISTIC, gb.primes)
        if not inc.accepted:
            inc.mode = PROBABILISTIC
            inc.witness = ("generator",) + tuple(inc.witness)
            return inc
        return gb
    inc = check_inclusion(generators, candidate, mode, primes)
    if not inc.accepted:
        inc.witness = ("generator", inc.witness)
        return inc
    if mode == INTEGER:
        gb = check_gb_deterministic_integer(candidate)
    else:
        gb = check_gb_deterministic_modular(candidate, primes)
    gb.primes = sorted(set(inc.primes) | set(gb.primes), reverse=True)
    gb.shortcut_used += inc.shortcut_used
    gb.expanded += inc.expanded
    return gb
