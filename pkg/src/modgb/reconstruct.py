"""Chinese remaindering and Farey reconstruction of bases modulo primes."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Dict, List, Optional, Sequence, Tuple

from .poly import QQ, Polynomial, primitive_part


class NonCoprimeModuli(ValueError):
    pass


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> Tuple[int, int]:
    """Residue modulo ``m1*m2`` congruent to ``r1`` mod ``m1`` and ``r2`` mod ``m2``."""
    if gcd(m1, m2) != 1:
        raise NonCoprimeModuli(f"gcd({m1}, {m2}) != 1")
    m = m1 * m2
    if m2 == 1:
        return r1 % m1, m
    t = (r2 - r1) * pow(m1, -1, m2) % m2
    return (r1 + m1 * t) % m, m


def farey(a: int, m: int) -> Optional[Fraction]:
    """Rational ``n/d`` with ``n = a*d (mod m)`` and ``|n|, d <= sqrt((m-1)/2)``.

    Returns ``None`` when no such fraction exists (more primes are needed).
    """
    a %= m
    bound = isqrt((m - 1) // 2)
    r0, r1 = m, a
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    n, d = r1, t1
    if d < 0:
        n, d = -n, -d
    if d == 0 or d > bound or gcd(d, m) != 1:
        return None
    if gcd(n, d) != 1:
        return None
    return Fraction(n, d)


@dataclass
class ReconstructionBranch:
    """CRT accumulators for every mod-p basis sharing one leading-monomial signature.

    ``supports[k]`` maps each monomial of element ``k`` (union over the
    primes seen) to its residue modulo ``modulus``.
    """

    signature: Tuple[int, ...]
    nvars: int
    supports: List[Dict[int, int]]
    modulus: int = 1
    primes: List[int] = field(default_factory=list)
    trace: object = None
    candidate: object = None  # cached lift of the current residues (or None)
    candidate_modulus: int = 0

    @property
    def prime_count(self) -> int:
        return len(self.primes)

    def combine(self, basis: Sequence[Polynomial], p: int) -> None:
        m = self.modulus
        if m % p == 0:
            raise NonCoprimeModuli(f"prime {p} already absorbed")
        inv = pow(m, -1, p) if m > 1 else 0
        mp = m * p
        for acc, f in zip(self.supports, basis):
            new = dict(zip(f.monos, f.coeffs))
            for mono in new.keys() - acc.keys():
                acc[mono] = 0
            for mono, r in acc.items():
                r2 = new.get(mono, 0)
                if m == 1:
                    acc[mono] = r2
                else:
                    acc[mono] = (r + m * ((r2 - r) * inv % p)) % mp
        self.modulus = mp
        self.primes.append(p)

    def residues(self, k: int) -> Dict[int, int]:
        return self.supports[k]


def signature_of(basis: Sequence[Polynomial]) -> Tuple[int, ...]:
    return tuple(f.lm for f in basis)


def absorb(
    branches: List[ReconstructionBranch], basis: Sequence[Polynomial], p: int
) -> Tuple[List[ReconstructionBranch], int]:
    """CRT-combine a reduced monic mod-p basis into the matching branch.

    Returns the branch list and the index of the branch that received the
    basis (a new branch is appended when no signature matches).  Branches
    that fall three or more primes behind another are dropped.
    """
    sig = signature_of(basis)
    nvars = basis[0].nvars if basis else 0
    idx = next((i for i, b in enumerate(branches) if b.signature == sig), None)
    if idx is None:
        branches.append(
            ReconstructionBranch(sig, nvars, [dict() for _ in basis])
        )
        idx = len(branches) - 1
    branches[idx].combine(basis, p)
    target = branches[idx]
    best = max(b.prime_count for b in branches)
    kept = [b for b in branches if best - b.prime_count < 3]
    branches[:] = kept
    return branches, (kept.index(target) if target in kept else -1)


@dataclass
class RationalCandidate:
    """Monic basis over ``QQ`` with its primitive integer form."""

    basis: List[Polynomial]
    integer_basis: List[Polynomial]
    modulus: int


def lift_polynomial(residues: Dict[int, int], m: int, nvars: int) -> Optional[Polynomial]:
    monos, coeffs = [], []
    for mono in sorted(residues, reverse=True):
        r = residues[mono]
        if r == 0:
            continue
        q = farey(r, m)
        if q is None:
            return None
        monos.append(mono)
        coeffs.append(q)
    return Polynomial(nvars, QQ, monos, coeffs)


def lift_candidate(branch: ReconstructionBranch) -> Optional[RationalCandidate]:
    """Farey-lift every coefficient of the branch; ``None`` if any fails."""
    basis = []
    for acc in branch.supports:
        f = lift_polynomial(acc, branch.modulus, branch.nvars)
        if f is None or not f or f.lc != 1:
            return None
        basis.append(f)
    return RationalCandidate(basis, [primitive_part(f) for f in basis], branch.modulus)


def candidate_from_basis(basis: Sequence[Polynomial], modulus: int = 0) -> RationalCandidate:
    """Wrap a known rational basis (made monic) as a candidate."""
    monic = [f.change_domain(QQ).monic() for f in basis if f]
    return RationalCandidate(monic, [primitive_part(f) for f in monic], modulus)


def stabilized(
    branch: Optional[ReconstructionBranch],
    previous: Optional[RationalCandidate],
    last_basis: Sequence[Polynomial],
    p_last: int,
) -> bool:
    """Does the candidate lifted without ``p_last`` agree with the basis mod ``p_last``?"""
    if previous is None or len(previous.basis) != len(last_basis):
        return False
    for f, g in zip(previous.basis, last_basis):
        have = dict(zip(g.monos, g.coeffs))
        for mono, c in zip(f.monos, f.coeffs):
            if c.denominator % p_last == 0:
                return False
            v = c.numerator * pow(c.denominator, -1, p_last) % p_last
            if have.pop(mono, 0) != v:
                return False
        if any(have.values()):
            return False
    return True
