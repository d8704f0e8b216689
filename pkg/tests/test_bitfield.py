import random

import pytest

from markovext.bitfield import (
    IRREDUCIBLE_POLY,
    BitString,
    FieldElement,
    clmul,
    gf_mul,
    gf_pow,
    inner_product_mod2,
    is_irreducible,
    poly_mod,
)
from markovext.errors import InvalidArgumentError


# ---------------------------------------------------------------------------
# BitString
# ---------------------------------------------------------------------------

def test_bitstring_construction_and_bits():
    b = BitString(0b1011, 4)
    assert [b.bit(i) for i in range(4)] == [1, 1, 0, 1]
    assert list(b) == [1, 1, 0, 1]
    with pytest.raises(InvalidArgumentError):
        BitString(16, 4)  # does not fit
    with pytest.raises(InvalidArgumentError):
        BitString(-1, 4)
    with pytest.raises(InvalidArgumentError):
        b.bit(4)


def test_bitstring_xor_truncate_concat():
    a = BitString(0b1100, 4)
    b = BitString(0b1010, 4)
    assert (a ^ b).value == 0b0110
    assert a.truncate(2).value == 0b00
    assert b.truncate(3) == BitString(0b010, 3)
    c = BitString(0b01, 2).concat(BitString(0b11, 2))
    assert c == BitString(0b1101, 4)
    with pytest.raises(InvalidArgumentError):
        a ^ BitString(0, 3)


def test_bitstring_bytes_roundtrip_little_endian():
    # bit 0 of the string is the least-significant bit of byte 0
    b = BitString(0x1234, 13)
    assert b.to_bytes() == bytes([0x34, 0x12])
    assert BitString.from_bytes(b.to_bytes(), 13) == b
    # pad bits beyond the length are masked off on load
    assert BitString.from_bytes(bytes([0xFF]), 3).value == 0b111
    assert BitString.from_bytes(bytes([0xF8]), 3).value == 0b000
    with pytest.raises(InvalidArgumentError):
        BitString.from_bytes(b"\x00", 9)


def test_bitstring_from_bits():
    assert BitString.from_bits([1, 0, 1]).value == 0b101
    assert BitString.from_bits([]).length == 0
    with pytest.raises(InvalidArgumentError):
        BitString.from_bits([0, 2])


# ---------------------------------------------------------------------------
# Field arithmetic
# ---------------------------------------------------------------------------

def test_gf4_multiplication_example():
    # in GF(2^4) with modulus x^4+x+1: 0b0011 * 0b0110 = 0b1010
    a = FieldElement.of(0b0011, 4)
    b = FieldElement.of(0b0110, 4)
    assert gf_mul(a, b).value == 0b1010


def test_gf4_power_example():
    # x^4 = x + 1 modulo x^4+x+1
    x = FieldElement.of(0b0010, 4)
    assert gf_pow(x, 4).value == 0b0011
    assert gf_pow(x, 0).value == 1


def test_gf_mul_degree_mismatch():
    with pytest.raises(InvalidArgumentError):
        gf_mul(FieldElement.of(1, 4), FieldElement.of(1, 8))
    with pytest.raises(InvalidArgumentError):
        FieldElement.of(0, 5)  # no fixed modulus for degree 5


def _schoolbook_mul(a: int, b: int, n: int) -> int:
    """Naive polynomial multiply then long-division reduction."""
    prod = 0
    for i in range(n):
        if (a >> i) & 1:
            for j in range(n):
                if (b >> j) & 1:
                    prod ^= 1 << (i + j)
    mod = IRREDUCIBLE_POLY[n]
    while prod.bit_length() > n:
        prod ^= mod << (prod.bit_length() - n - 1)
    return prod


@pytest.mark.parametrize("n", [2, 3, 4])
def test_gf_mul_matches_schoolbook_exhaustive(n):
    for a in range(1 << n):
        for b in range(1 << n):
            got = gf_mul(FieldElement.of(a, n), FieldElement.of(b, n)).value
            assert got == _schoolbook_mul(a, b, n)


def test_gf_mul_matches_schoolbook_random_n8():
    rnd = random.Random(11)
    for _ in range(2000):
        a, b = rnd.randrange(256), rnd.randrange(256)
        got = gf_mul(FieldElement.of(a, 8), FieldElement.of(b, 8)).value
        assert got == _schoolbook_mul(a, b, 8)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_field_axioms_exhaustive(n):
    els = [FieldElement.of(v, n) for v in range(1 << n)]
    one = FieldElement.of(1, n)
    for a in els:
        assert gf_mul(a, one) == a
        for b in els:
            assert gf_mul(a, b) == gf_mul(b, a)
    # associativity and distributivity on the full cube is cubic; keep n small
    for a in els:
        for b in els:
            for c in els:
                assert gf_mul(gf_mul(a, b), c) == gf_mul(a, gf_mul(b, c))
                lhs = gf_mul(a, FieldElement.of(b.value ^ c.value, n))
                rhs = FieldElement.of(gf_mul(a, b).value ^ gf_mul(a, c).value, n)
                assert lhs == rhs


@pytest.mark.parametrize("n", [8, 16, 64])
def test_field_axioms_random(n):
    rnd = random.Random(n)
    one = FieldElement.of(1, n)
    for _ in range(300):
        a = FieldElement.of(rnd.randrange(1 << n), n)
        b = FieldElement.of(rnd.randrange(1 << n), n)
        c = FieldElement.of(rnd.randrange(1 << n), n)
        assert gf_mul(a, b) == gf_mul(b, a)
        assert gf_mul(gf_mul(a, b), c) == gf_mul(a, gf_mul(b, c))
        lhs = gf_mul(a, FieldElement.of(b.value ^ c.value, n))
        assert lhs.value == gf_mul(a, b).value ^ gf_mul(a, c).value
        assert gf_mul(a, one) == a


@pytest.mark.parametrize("n", [2, 3, 4, 8, 16])
def test_nonzero_elements_have_unique_inverses(n):
    # a * a^(2^n - 2) = 1 for a != 0
    one = FieldElement.of(1, n)
    rnd = random.Random(n + 1)
    vals = range(1, 1 << n) if n <= 8 else [rnd.randrange(1, 1 << n) for _ in range(200)]
    for v in vals:
        a = FieldElement.of(v, n)
        inv = gf_pow(a, (1 << n) - 2)
        assert gf_mul(a, inv) == one


# ---------------------------------------------------------------------------
# Inner product, irreducibility
# ---------------------------------------------------------------------------

def test_inner_product_examples():
    zero = BitString(0, 4)
    b = BitString(0b1011, 4)
    assert inner_product_mod2(zero, b) == 0
    assert inner_product_mod2(b, b) == b.value.bit_count() & 1
    # (1011, 1110): bitwise and = 1010, parity 0
    assert inner_product_mod2(BitString(0b1011, 4), BitString(0b1110, 4)) == 0
    with pytest.raises(InvalidArgumentError):
        inner_product_mod2(BitString(0, 3), BitString(0, 4))


def test_modulus_table_entries_are_irreducible():
    for n, poly in IRREDUCIBLE_POLY.items():
        assert poly.bit_length() - 1 == n
        if n <= 16:
            assert is_irreducible(poly), f"degree {n} modulus is reducible"


def test_is_irreducible_rejects_square():
    # x^4 + x^2 + 1 = (x^2 + x + 1)^2
    assert not is_irreducible(0b10101)
    assert is_irreducible(0b111)


def test_clmul_poly_mod_basics():
    assert clmul(0b11, 0b11) == 0b101  # (x+1)^2 = x^2+1 over GF(2)
    assert poly_mod(0b10000, 0b10011) == 0b0011  # x^4 mod (x^4+x+1) = x+1
