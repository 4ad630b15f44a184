"""Word-size prime fields, prime search and delayed-reduction accumulators."""

from __future__ import annotations

from typing import Iterator, Sequence

import numpy as np

PRIME_CLASSES = {
    31: "learning",
    29: "working",
    24: "compact",
}

# deterministic Miller-Rabin witnesses for every n < 3.3e24
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class ZeroInverse(ZeroDivisionError):
    pass


class NoPrime(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_near(bound: int, direction: str = "below") -> int:
    """Nearest prime strictly below or above ``bound``."""
    if direction == "below":
        if bound <= 2:
            raise NoPrime(f"no prime below {bound}")
        n = bound - 1
        while not is_prime(n):
            n -= 1
        return n
    if direction == "above":
        n = max(bound + 1, 2)
        while not is_prime(n):
            n += 1
        return n
    raise ValueError(f"direction must be 'below' or 'above', got {direction!r}")


def primes_below(bound: int) -> Iterator[int]:
    """Descending consecutive primes strictly below ``bound``."""
    n = bound
    while n > 2:
        n = prime_near(n, "below")
        yield n


def class_top(bits: int) -> int:
    if bits not in PRIME_CLASSES:
        raise ValueError(f"prime class must be one of {sorted(PRIME_CLASSES)}")
    return 1 << bits


def inv(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroInverse(f"0 has no inverse modulo {p}")
    return pow(a, -1, p)


class PrimeField:
    """Z/pZ for a prime 2 < p < 2**31, elements canonical in [0, p)."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not (2 < p < 1 << 31) or not is_prime(p):
            raise ValueError(f"{p} is not a prime in (2, 2^31)")
        self.p = p

    def __call__(self, a) -> int:
        return a % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def inv(self, a: int) -> int:
        return inv(a, self.p)

    def symmetric(self, a: int) -> int:
        return a - self.p if a > self.p // 2 else a

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


# ---------------------------------------------------------------------------
# accumulators

SIGNED63 = "signed63"
WIDE128 = "wide128"


class Accumulator:
    """Delayed-reduction contract for sums of products modulo ``p``.

    Primes below 2**24 use a signed 63-bit accumulator: each product is below
    2**48, and a reduction is forced once 2**15 addends are pending.  Larger
    primes use a 128-bit accumulator (products below 2**62, 2**64 addends of
    headroom) that is reduced only once at the end.
    """

    def __init__(self, p: int):
        self.p = p
        if p < 1 << 24:
            self.kind = SIGNED63
            self.budget = 1 << 15
            self.limit = 1 << 63
        else:
            self.kind = WIDE128
            self.budget = 1 << 64
            self.limit = 1 << 128

    def dot(self, u: Sequence[int], v: Sequence[int]) -> int:
        p = self.p
        acc = 0
        pending = 0
        for a, b in zip(u, v):
            acc += (a % p) * (b % p)
            pending += 1
            if pending == self.budget:
                acc %= p
                pending = 0
        return acc % p

    def max_partial(self, u: Sequence[int], v: Sequence[int]) -> int:
        """Largest intermediate magnitude reached by :meth:`dot`."""
        p = self.p
        acc = 0
        pending = 0
        peak = 0
        for a, b in zip(u, v):
            acc += (a % p) * (b % p)
            peak = max(peak, acc)
            pending += 1
            if pending == self.budget:
                acc %= p
                pending = 0
        return peak


class DenseBlock:
    """Columns of dense rows modulo ``p`` with delayed reduction.

    The block is stored transposed: ``rows x ncols`` becomes an
    ``ncols x rows`` int64 array so a sparse reductor touches whole array
    rows.  For the wide class the 128-bit accumulator is emulated by two
    int64 limbs: ``value = lo + hi * 2**31``.
    """

    LIMB = 31
    LIMB_MASK = (1 << 31) - 1

    def __init__(self, p: int, ncols: int, nrows: int):
        self.p = p
        self.acc = Accumulator(p)
        self.lo = np.zeros((ncols, nrows), dtype=np.int64)
        self.wide = self.acc.kind == WIDE128
        self.hi = np.zeros_like(self.lo) if self.wide else None
        self.pending = 0
        self.radix = (1 << self.LIMB) % p

    def column(self, c: int) -> np.ndarray:
        """Canonical values of column ``c`` across all rows."""
        p = self.p
        if self.wide:
            return (self.lo[c] % p + (self.hi[c] % p) * self.radix) % p
        return self.lo[c] % p

    def clear(self, c: int) -> None:
        self.lo[c] = 0
        if self.wide:
            self.hi[c] = 0

    def submul(self, cols: np.ndarray, coeffs: np.ndarray, factor: np.ndarray) -> None:
        """Subtract ``coeffs[k] * factor`` from column ``cols[k]``."""
        prod = np.multiply.outer(coeffs, factor)
        if self.wide:
            self.lo[cols] -= prod & self.LIMB_MASK
            self.hi[cols] -= prod >> self.LIMB
        else:
            self.lo[cols] -= prod
            self.pending += 1
            if self.pending == self.acc.budget:
                self.lo %= self.p
                self.pending = 0

    def reduced(self) -> np.ndarray:
        p = self.p
        if self.wide:
            return (self.lo % p + (self.hi % p) * self.radix) % p
        return self.lo % p
