"""Packed exponent vectors under the degree reverse lexicographic order.

A monomial in at most 15 variables is stored in one integer made of sixteen
16-bit slots.  Slot 0 holds the total degree and occupies the most
significant bits (240..255); slot ``i`` (``1 <= i <= 15``) holds the partial
degree of variable ``x_i`` and occupies bits ``16*(i-1) .. 16*i - 1``.
Variable ``x_1`` is the greatest variable (``x_1 > x_2 > ... > x_n``).

Besides the packed ``bits`` form there is an *order key*::

    key = (deg << 240) - (bits with the degree slot cleared)

The key is a linear function of the exponent vector, so multiplying
monomials adds keys, and ordinary integer comparison of keys is exactly
degrevlex.  The Groebner engine works on keys; ``bits`` are recovered only
for divisibility tests.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

MAX_VARS = 15
SLOT_BITS = 16
SLOT_MAX = (1 << SLOT_BITS) - 1
DEG_SHIFT = SLOT_BITS * MAX_VARS  # 240
LOW_MASK = (1 << DEG_SHIFT) - 1
# bit 16*i is where a borrow out of variable slot i lands
BORROW_MASK = sum(1 << (SLOT_BITS * i) for i in range(1, MAX_VARS + 1))


class TooManyVariables(ValueError):
    pass


class DegreeOverflow(OverflowError):
    pass


# ---------------------------------------------------------------------------
# integer-level helpers (hot paths)


def key_from_bits(bits: int) -> int:
    return ((bits >> DEG_SHIFT) << (DEG_SHIFT + 1)) - bits


def bits_from_key(key: int) -> int:
    deg = -((-key) >> DEG_SHIFT)
    return (deg << (DEG_SHIFT + 1)) - key


def key_degree(key: int) -> int:
    return -((-key) >> DEG_SHIFT)


def bits_divides(d: int, m: int) -> bool:
    """True iff the monomial packed as ``d`` divides the one packed as ``m``."""
    diff = m - d
    return diff >= 0 and not ((diff ^ m ^ d) & BORROW_MASK)


def key_from_exponents(exps: Sequence[int]) -> int:
    low = 0
    for i, e in enumerate(exps):
        low |= e << (SLOT_BITS * i)
    return (sum(exps) << DEG_SHIFT) - low


def exponents_from_key(key: int, nvars: int) -> tuple:
    return exponents_from_bits(bits_from_key(key), nvars)


def exponents_from_bits(bits: int, nvars: int) -> tuple:
    return tuple((bits >> (SLOT_BITS * i)) & SLOT_MAX for i in range(nvars))


def lcm_exponents(a: Sequence[int], b: Sequence[int]) -> tuple:
    return tuple(x if x > y else y for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# value type


def _check_exponents(exps: Sequence[int], nvars: int) -> None:
    if nvars > MAX_VARS:
        raise TooManyVariables(f"{nvars} variables, at most {MAX_VARS} supported")
    if len(exps) > nvars:
        raise ValueError(f"{len(exps)} exponents for {nvars} variables")
    for e in exps:
        if e < 0:
            raise ValueError(f"negative exponent {e}")
        if e > SLOT_MAX:
            raise DegreeOverflow(f"partial degree {e} exceeds {SLOT_MAX}")
    if sum(exps) > SLOT_MAX:
        raise DegreeOverflow(f"total degree {sum(exps)} exceeds {SLOT_MAX}")


class Monomial:
    """Immutable packed monomial; compares in degrevlex."""

    __slots__ = ("bits", "nvars")

    def __init__(self, bits: int, nvars: int):
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "nvars", nvars)

    def __setattr__(self, name, value):
        raise AttributeError("Monomial is immutable")

    @classmethod
    def from_key(cls, key: int, nvars: int) -> "Monomial":
        return cls(bits_from_key(key), nvars)

    @classmethod
    def one(cls, nvars: int) -> "Monomial":
        return cls(0, nvars)

    @property
    def key(self) -> int:
        return key_from_bits(self.bits)

    @property
    def degree(self) -> int:
        return self.bits >> DEG_SHIFT

    @property
    def slots(self) -> tuple:
        return (self.degree,) + exponents_from_bits(self.bits, MAX_VARS)

    @property
    def exponents(self) -> tuple:
        return exponents_from_bits(self.bits, self.nvars)

    def is_one(self) -> bool:
        return self.bits == 0

    def __eq__(self, other):
        if not isinstance(other, Monomial):
            return NotImplemented
        return self.bits == other.bits and self.nvars == other.nvars

    def __hash__(self):
        return hash((self.bits, self.nvars))

    def __lt__(self, other: "Monomial") -> bool:
        return self.key < other.key

    def __le__(self, other: "Monomial") -> bool:
        return self.key <= other.key

    def __gt__(self, other: "Monomial") -> bool:
        return self.key > other.key

    def __ge__(self, other: "Monomial") -> bool:
        return self.key >= other.key

    def __mul__(self, other: "Monomial") -> "Monomial":
        return mul(self, other)

    def __repr__(self):
        return f"Monomial({self.exponents})"


def pack(exponents: Iterable[int], nvars: Optional[int] = None) -> Monomial:
    exps = tuple(exponents)
    if nvars is None:
        nvars = len(exps)
    _check_exponents(exps, nvars)
    bits = sum(exps) << DEG_SHIFT
    for i, e in enumerate(exps):
        bits |= e << (SLOT_BITS * i)
    return Monomial(bits, nvars)


def cmp_degrevlex(a: Monomial, b: Monomial) -> int:
    """Return -1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``."""
    ka, kb = a.key, b.key
    return (ka > kb) - (ka < kb)


def mul(a: Monomial, b: Monomial) -> Monomial:
    ea, eb = a.exponents, b.exponents
    exps = tuple(x + y for x, y in zip(ea, eb))
    _check_exponents(exps, a.nvars)
    return Monomial(a.bits + b.bits, a.nvars)


def try_divide(a: Monomial, b: Monomial) -> Optional[Monomial]:
    """Return ``a / b`` if ``b`` divides ``a``, else ``None``."""
    if bits_divides(b.bits, a.bits):
        return Monomial(a.bits - b.bits, a.nvars)
    return None


def lcm(a: Monomial, b: Monomial) -> Monomial:
    return pack(lcm_exponents(a.exponents, b.exponents), a.nvars)
