"""Bit strings and GF(2^n) arithmetic.

Conventions: bit index 0 is the least-significant coefficient of the
polynomial (and the least-significant bit of byte 0 in serialized form).
Trailing pad bits in the last byte are zero; the length is carried
out-of-band.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import InvalidArgumentError

# Low-weight irreducible polynomials over GF(2), value includes the x^n term.
IRREDUCIBLE_POLY = {
    2: 0b111,                          # x^2 + x + 1
    3: 0b1011,                         # x^3 + x + 1
    4: 0b10011,                        # x^4 + x + 1
    6: 0b1000011,                      # x^6 + x + 1
    8: 0b1_0001_1011,                  # x^8 + x^4 + x^3 + x + 1
    16: (1 << 16) | (1 << 12) | 0b1011,  # x^16 + x^12 + x^3 + x + 1
    64: (1 << 64) | 0b11011,           # x^64 + x^4 + x^3 + x + 1
}


@dataclass(frozen=True)
class BitString:
    """An n-bit string stored as a non-negative integer, bit i = coefficient of 2^i."""

    value: int
    length: int

    def __post_init__(self):
        if self.length < 0:
            raise InvalidArgumentError("length must be non-negative")
        if self.value < 0 or self.value >> self.length:
            raise InvalidArgumentError(
                f"value {self.value:#x} does not fit in {self.length} bits"
            )

    def bit(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise InvalidArgumentError(f"bit index {i} out of range for length {self.length}")
        return (self.value >> i) & 1

    def __iter__(self) -> Iterator[int]:
        return ((self.value >> i) & 1 for i in range(self.length))

    def __xor__(self, other: "BitString") -> "BitString":
        if self.length != other.length:
            raise InvalidArgumentError("length mismatch in xor")
        return BitString(self.value ^ other.value, self.length)

    def truncate(self, m: int) -> "BitString":
        """The m least-significant bits."""
        if not 0 <= m <= self.length:
            raise InvalidArgumentError(f"cannot truncate length {self.length} to {m}")
        return BitString(self.value & ((1 << m) - 1), m)

    def concat(self, other: "BitString") -> "BitString":
        """self occupies the low bits, other the high bits."""
        return BitString(self.value | (other.value << self.length), self.length + other.length)

    def to_bytes(self) -> bytes:
        """Packed little-endian bit order; pad bits of the last byte are zero."""
        nbytes = (self.length + 7) // 8
        return self.value.to_bytes(nbytes, "little")

    @classmethod
    def from_bytes(cls, data: bytes, length: int) -> "BitString":
        if len(data) * 8 < length:
            raise InvalidArgumentError(f"{len(data)} bytes supply fewer than {length} bits")
        value = int.from_bytes(data, "little") & ((1 << length) - 1)
        return cls(value, length)

    @classmethod
    def from_bits(cls, bits) -> "BitString":
        bits = list(bits)
        value = 0
        for i, b in enumerate(bits):
            if b not in (0, 1):
                raise InvalidArgumentError("bits must be 0 or 1")
            value |= b << i
        return cls(value, len(bits))


@dataclass(frozen=True)
class FieldElement:
    """Element of GF(2^n) in polynomial basis, reduced modulo IRREDUCIBLE_POLY[n]."""

    coefficients: BitString

    def __post_init__(self):
        n = self.coefficients.length
        if n not in IRREDUCIBLE_POLY:
            raise InvalidArgumentError(f"no fixed modulus for degree {n}")

    @property
    def n(self) -> int:
        return self.coefficients.length

    @property
    def value(self) -> int:
        return self.coefficients.value

    @classmethod
    def of(cls, value: int, n: int) -> "FieldElement":
        return cls(BitString(value, n))


def clmul(a: int, b: int) -> int:
    """Carry-less (polynomial) multiplication over GF(2)."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def poly_mod(p: int, modulus: int) -> int:
    """Remainder of polynomial p modulo `modulus` over GF(2)."""
    d = modulus.bit_length() - 1
    for i in range(p.bit_length() - 1, d - 1, -1):
        if (p >> i) & 1:
            p ^= modulus << (i - d)
    return p


def gf_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    """Product in GF(2^n); both operands must live in the same field."""
    if a.n != b.n:
        raise InvalidArgumentError(f"field degree mismatch: {a.n} vs {b.n}")
    mod = IRREDUCIBLE_POLY[a.n]
    return FieldElement.of(poly_mod(clmul(a.value, b.value), mod), a.n)


def gf_pow(a: FieldElement, e: int) -> FieldElement:
    """a^e by square-and-multiply; a^0 = 1."""
    if e < 0:
        raise InvalidArgumentError("exponent must be non-negative")
    result = FieldElement.of(1, a.n)
    base = a
    while e:
        if e & 1:
            result = gf_mul(result, base)
        base = gf_mul(base, base)
        e >>= 1
    return result


def inner_product_mod2(a: BitString, b: BitString) -> int:
    """XOR over i of a_i * b_i."""
    if a.length != b.length:
        raise InvalidArgumentError(f"length mismatch: {a.length} vs {b.length}")
    return (a.value & b.value).bit_count() & 1


def is_irreducible(poly: int) -> bool:
    """Exhaustive trial division; intended for degrees up to ~16."""
    d = poly.bit_length() - 1
    if d < 1:
        return False
    if d == 1:
        return True
    for q in range(2, 1 << (d // 2 + 1)):
        if q.bit_length() - 1 < 1:
            continue
        if poly_mod(poly, q) == 0:
            return False
    return True
