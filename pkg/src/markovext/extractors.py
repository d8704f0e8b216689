"""Concrete extractor constructions.

* DEOR: GF(2^n) multiplication truncated to the m low-order bits; strong in
  both inputs, with classical error 2^{-(k1+k2+1-n-m)/2}.
* A Trevisan-style seeded extractor built from a block weak design and a
  Reed-Solomon-Hadamard one-bit extractor.
* The strong-extractor composition combinator
  Ext''(x1, x2) = Ext'(x1, Ext(x1, x2)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

from mpmath import mp

from .bitfield import (
    IRREDUCIBLE_POLY,
    BitString,
    FieldElement,
    gf_mul,
    inner_product_mod2,
)
from .errors import CompositionError, ConstructionError, DomainError, InvalidArgumentError

WEAK_DESIGN_OVERLAP = 2 * math.e  # declared overlap parameter r


class ExtractorFamily(str, Enum):
    DEOR = "DEOR"
    INNER_PRODUCT = "InnerProduct"
    TREVISAN_SEEDED = "TrevisanSeeded"
    PARITY_SEEDED = "ParitySeeded"
    COMPOSED = "Composed"


@dataclass(frozen=True)
class ExtractorDescriptor:
    """Identity, dimensions and error law of a concrete extractor.

    ``error_law`` maps (k1, k2) -> epsilon for two-source families and
    k -> epsilon for seeded ones. ``strong_in`` lists the inputs in which the
    extractor is strong (1 and/or 2); input 2 of a seeded extractor is its seed.
    """

    family: ExtractorFamily
    n1: int
    n2: int
    m: int
    strong_in: frozenset = frozenset()
    error_law: Optional[Callable] = None
    fn: Optional[Callable] = field(default=None, compare=False)
    params: dict = field(default_factory=dict)

    def extract(self, x1: BitString, x2: BitString) -> BitString:
        if x1.length != self.n1 or x2.length != self.n2:
            raise InvalidArgumentError(
                f"input lengths ({x1.length}, {x2.length}) do not match ({self.n1}, {self.n2})"
            )
        if self.fn is None:
            raise InvalidArgumentError(f"{self.family} descriptor is not executable")
        return self.fn(x1, x2)

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "n1": self.n1,
            "n2": self.n2,
            "m": self.m,
            "strong_in": sorted(self.strong_in),
            "params": dict(self.params),
        }


# ---------------------------------------------------------------------------
# DEOR
# ---------------------------------------------------------------------------

def deor_extract(x1: BitString, x2: BitString, m: int) -> BitString:
    """The m low-order bits of x1 * x2 in GF(2^n)."""
    n = x1.length
    if x2.length != n:
        raise InvalidArgumentError(f"input lengths differ: {n} vs {x2.length}")
    if n not in IRREDUCIBLE_POLY:
        raise InvalidArgumentError(f"unsupported input length {n}")
    if not 1 <= m <= n:
        raise InvalidArgumentError(f"output length {m} out of range [1, {n}]")
    prod = gf_mul(FieldElement(x1), FieldElement(x2))
    return prod.coefficients.truncate(m)


def deor_error(n: int, k1: float, k2: float, m: int) -> float:
    """Classical error 2^{-(k1+k2+1-n-m)/2}, clamped to 1."""
    return min(1.0, float(mp.mpf(2) ** (-(mp.mpf(k1) + k2 + 1 - n - m) / 2)))


def deor_descriptor(n: int, m: int) -> ExtractorDescriptor:
    if n not in IRREDUCIBLE_POLY:
        raise InvalidArgumentError(f"unsupported input length {n}")
    if not 1 <= m <= n:
        raise InvalidArgumentError(f"output length {m} out of range [1, {n}]")
    return ExtractorDescriptor(
        family=ExtractorFamily.DEOR,
        n1=n,
        n2=n,
        m=m,
        strong_in=frozenset({1, 2}),
        error_law=lambda k1, k2: deor_error(n, k1, k2, m),
        fn=lambda x1, x2: deor_extract(x1, x2, m),
        params={"n": n, "m": m},
    )


def inner_product_descriptor(n: int) -> ExtractorDescriptor:
    """One-bit inner-product extractor over GF(2)^n."""
    return ExtractorDescriptor(
        family=ExtractorFamily.INNER_PRODUCT,
        n1=n,
        n2=n,
        m=1,
        strong_in=frozenset({1, 2}),
        error_law=lambda k1, k2: deor_error(n, k1, k2, 1),
        fn=lambda x1, x2: BitString(inner_product_mod2(x1, x2), 1),
        params={"n": n},
    )


# ---------------------------------------------------------------------------
# Weak designs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeakDesign:
    """m subsets of [d_universe], each of size t, with bounded pairwise overlap.

    The declared bound is: for every i, sum_{j<i} 2^{|S_i n S_j|} <= r * (m - 1).
    """

    m: int
    t: int
    d_universe: int
    sets: tuple
    r: float = WEAK_DESIGN_OVERLAP

    def overlap_statistic(self, i: int) -> float:
        return float(sum(2 ** len(self.sets[i] & self.sets[j]) for j in range(i)))


def _gf_t_params(t: int):
    if t < 4 or t & (t - 1):
        raise ConstructionError(f"set size t={t} must be a power of 2, at least 4")
    s = t.bit_length() - 1
    if s not in IRREDUCIBLE_POLY:
        raise ConstructionError(f"no GF(2^{s}) modulus available for t={t}")
    return s


def weak_design_build(m: int, t: int, universe_blocks: Optional[int] = None) -> WeakDesign:
    """Block weak design from polynomial designs over GF(t).

    Block b occupies universe indices [b*t^2, (b+1)*t^2); set i assigned to a
    block is the graph {(x, p_i(x))} of a polynomial over GF(t). Distinct
    polynomials of degree < c intersect in at most c-1 points, and sets in
    different blocks are disjoint, which yields the declared overlap bound
    r = 2e. Infeasible (m, t) combinations raise ConstructionError.
    """
    if m < 1:
        raise ConstructionError("need at least one set")
    s = _gf_t_params(t)

    def degree_for(count: int) -> int:
        c = 1
        while t ** c < count:
            c += 1
        return c

    def sound(blocks: int) -> bool:
        per = -(-m // blocks)
        if per <= 1:
            return True
        c = degree_for(per)
        # within-block worst case plus one per cross-block pair must stay under r*(m-1)
        return 2 ** (c - 1) * (per - 1) <= (WEAK_DESIGN_OVERLAP - 1) * (m - 1)

    if universe_blocks is None:
        n_blocks = 1
        while n_blocks < m and not sound(n_blocks):
            n_blocks += 1
    else:
        n_blocks = universe_blocks
    if not sound(n_blocks):
        raise ConstructionError(f"no sound block layout for m={m}, t={t}, blocks={n_blocks}")

    per_block = -(-m // n_blocks)
    mul = lambda a, b: gf_mul(FieldElement.of(a, s), FieldElement.of(b, s)).value
    sets = []
    for i in range(m):
        b, idx = divmod(i, per_block)
        c = degree_for(per_block)
        coeffs = []
        v = idx
        for _ in range(c):
            v, r = divmod(v, t)
            coeffs.append(r)
        base = b * t * t
        members = []
        for x in range(t):
            acc = 0
            for coef in reversed(coeffs):  # Horner
                acc = mul(acc, x) ^ coef
            members.append(base + x * t + acc)
        sets.append(frozenset(members))
    design = WeakDesign(m=m, t=t, d_universe=n_blocks * t * t, sets=tuple(sets))
    for st in design.sets:
        assert len(st) == t
    return design


# ---------------------------------------------------------------------------
# Trevisan parameters and extraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrevisanParams:
    """Closed-form seeded-extractor parameters, after the documented rounding.

    Rounding rule: t is the exact value rounded up to the next even integer;
    a is kept exact (as a real); k is rounded up to an integer; d = a*t^2 is
    rounded up to the next integer multiple of t.
    """

    t: int
    a: float
    k: int
    d: int
    t_exact: float
    k_exact: float


def trevisan_params(n: int, m: int, eps: float) -> TrevisanParams:
    if not (n >= m >= 1):
        raise DomainError(f"need n >= m >= 1, got n={n}, m={m}")
    if not 0 < eps < 1:
        raise DomainError(f"need 0 < eps < 1, got {eps}")
    if m <= math.e:
        raise DomainError(f"m={m} <= e leaves log(m - e) undefined")
    with mp.workprec(120):
        t_exact = 2 * mp.log(2 * mp.mpf(n) * m * m / (mp.mpf(eps) ** 2), 2)
        t = int(mp.ceil(t_exact))
        t += t % 2
        if t <= math.e:
            raise DomainError(f"t={t} <= e leaves log(t - e) undefined")
        ratio = (mp.log(m - mp.e, 2) - mp.log(t - mp.e, 2)) / (
            mp.log(mp.e, 2) - mp.log(mp.e - 1, 2)
        )
        a = 1 + max(mp.mpf(0), ratio)
        k_exact = m + 4 * mp.log(mp.mpf(m) / eps, 2) + 6
        k = int(mp.ceil(k_exact))
        d_raw = a * t * t
        d = int(mp.ceil(d_raw / t)) * t
        return TrevisanParams(
            t=t, a=float(a), k=k, d=d, t_exact=float(t_exact), k_exact=float(k_exact)
        )


def rsh_one_bit(x: BitString, seed: BitString) -> int:
    """Reed-Solomon-Hadamard one-bit extractor.

    The seed splits into a field element alpha (low t/2 bits) and a Hadamard
    mask beta (high t/2 bits); x is parsed as Reed-Solomon coefficients over
    GF(2^{t/2}), evaluated at alpha, and the output is <encode(x)(alpha), beta>.
    """
    t = seed.length
    if t % 2:
        raise InvalidArgumentError(f"seed length {t} must be even")
    s = t // 2
    if s not in IRREDUCIBLE_POLY:
        raise InvalidArgumentError(f"no GF(2^{s}) modulus for seed length {t}")
    alpha = FieldElement(seed.truncate(s))
    beta = BitString(seed.value >> s, s)
    n_chunks = -(-x.length // s)
    mask = (1 << s) - 1
    acc = FieldElement.of(0, s)
    for j in reversed(range(n_chunks)):  # Horner on coefficients c_0..c_{L-1}
        chunk = FieldElement.of((x.value >> (j * s)) & mask, s)
        acc = gf_mul(acc, alpha)
        acc = FieldElement.of(acc.value ^ chunk.value, s)
    return inner_product_mod2(acc.coefficients, beta.truncate(s))


def trevisan_extract(
    x: BitString, seed: BitString, params: TrevisanParams, design: WeakDesign
) -> BitString:
    """Output bit i = one-bit RSH extractor on x with seed bits seed|_{S_i}."""
    if seed.length != design.d_universe:
        raise InvalidArgumentError(
            f"seed length {seed.length} != design universe {design.d_universe}"
        )
    if design.t != params.t:
        raise InvalidArgumentError("design set size does not match params.t")
    bits = []
    for st in design.sets:
        sub = BitString.from_bits(seed.bit(j) for j in sorted(st))
        bits.append(rsh_one_bit(x, sub))
    return BitString.from_bits(bits)


def trevisan_descriptor(n: int, m: int, eps: float) -> ExtractorDescriptor:
    """Seeded descriptor with a design whose universe covers params.d."""
    params = trevisan_params(n, m, eps)
    blocks = -(-params.d // (params.t * params.t))
    design = weak_design_build(m, params.t, universe_blocks=blocks)
    return ExtractorDescriptor(
        family=ExtractorFamily.TREVISAN_SEEDED,
        n1=n,
        n2=design.d_universe,
        m=m,
        strong_in=frozenset({2}),
        error_law=lambda k: eps if k >= params.k else 1.0,
        fn=lambda x, seed: trevisan_extract(x, seed, params, design),
        params={"n": n, "m": m, "eps": eps, "t": params.t, "d": params.d},
    )


def _parity_flat_error(n: int, d: int, k: float) -> float:
    """Exact worst-case strong error of the parity seeded extractor on flat sources.

    The extractor is <low-d-bits(x), seed> with a uniform d-bit seed. Over a
    flat source of size ceil(2^k) the distance (seed revealed) equals
    (1/2^d) sum_s |q_hat(s)| / 2 where q is the distribution of the low d bits;
    the worst case is a vertex of the occupancy polytope, found exactly by
    maximizing over all sign patterns with a greedy fill.
    """
    if not 1 <= d <= 4 or d > n:
        raise DomainError(f"parity extractor supports 1 <= d <= 4, d <= n; got d={d}, n={n}")
    size = math.ceil(2.0 ** k - 1e-12)
    if not 1 <= size <= 1 << n:
        raise DomainError(f"entropy k={k} out of range for n={n}")
    D = 1 << d
    cap = 1 << (n - d)
    best = 0.0
    for sigma in range(1 << D):
        vals = sorted(
            (
                sum(
                    (1 if (sigma >> s) & 1 else -1) * (-1 if (v & s).bit_count() & 1 else 1)
                    for s in range(D)
                )
                for v in range(D)
            ),
            reverse=True,
        )
        remaining, acc = size, 0
        for val in vals:
            take = min(cap, remaining)
            acc += take * val
            remaining -= take
            if not remaining:
                break
        best = max(best, acc)
    return min(1.0, best / (2.0 * D * size))


def parity_seeded_descriptor(n: int, d: int) -> ExtractorDescriptor:
    """One-bit seeded extractor <low-d-bits(x), seed> with an exact error law.

    Deliberately tiny; it exists to exercise the composition combinator at
    enumerable sizes. Strong in the seed by construction of the error law.
    """
    if not 1 <= d <= 4 or d > n:
        raise InvalidArgumentError(f"need 1 <= d <= 4 and d <= n, got d={d}, n={n}")
    return ExtractorDescriptor(
        family=ExtractorFamily.PARITY_SEEDED,
        n1=n,
        n2=d,
        m=1,
        strong_in=frozenset({2}),
        error_law=lambda k: _parity_flat_error(n, d, k),
        fn=lambda x, seed: BitString(inner_product_mod2(x.truncate(d), seed), 1),
        params={"n": n, "d": d},
    )


# ---------------------------------------------------------------------------
# Composition
# ---------------------------------------------------------------------------

def compose(
    outer_seeded: ExtractorDescriptor, inner_two_source: ExtractorDescriptor
) -> ExtractorDescriptor:
    """Ext''(x1, x2) = Ext'(x1, Ext(x1, x2)); errors add."""
    if 1 not in inner_two_source.strong_in:
        raise CompositionError("inner extractor must be strong in input 1")
    if inner_two_source.m != outer_seeded.n2:
        raise CompositionError(
            f"inner output length {inner_two_source.m} != outer seed length {outer_seeded.n2}"
        )
    if outer_seeded.n1 != inner_two_source.n1:
        raise CompositionError(
            f"outer source length {outer_seeded.n1} != inner n1 {inner_two_source.n1}"
        )

    def fn(x1: BitString, x2: BitString) -> BitString:
        return outer_seeded.extract(x1, inner_two_source.extract(x1, x2))

    def law(k1, k2):
        return min(1.0, inner_two_source.error_law(k1, k2) + outer_seeded.error_law(k1))

    return ExtractorDescriptor(
        family=ExtractorFamily.COMPOSED,
        n1=inner_two_source.n1,
        n2=inner_two_source.n2,
        m=outer_seeded.m,
        strong_in=frozenset(),
        error_law=law if (inner_two_source.error_law and outer_seeded.error_law) else None,
        fn=fn,
        params={
            "outer": outer_seeded.to_dict(),
            "inner": inner_two_source.to_dict(),
        },
    )
