"""Classical weak-source models and exact brute-force distance oracles.

All oracles enumerate the full support; when the enumeration budget would be
exceeded they raise ResourceBudgetError instead of sampling. Probabilities
are double-precision with a 1e-12 row-sum tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .bitfield import BitString
from .errors import ConstructionError, InvalidArgumentError, ResourceBudgetError
from .extractors import ExtractorDescriptor

ROW_SUM_TOL = 1e-12
ENUMERATION_BUDGET_BITS = 26


@dataclass(frozen=True)
class FlatSource:
    """Uniform distribution over a support set of n-bit strings."""

    n: int
    support: tuple

    def __post_init__(self):
        if len(self.support) == 0:
            raise InvalidArgumentError("support must be non-empty")
        if len(set(self.support)) != len(self.support):
            raise InvalidArgumentError("support contains duplicates")
        if any(not 0 <= x < (1 << self.n) for x in self.support):
            raise InvalidArgumentError("support element out of range")

    @property
    def hmin(self) -> float:
        return math.log2(len(self.support))

    def distribution(self) -> np.ndarray:
        p = np.zeros(1 << self.n)
        p[list(self.support)] = 1.0 / len(self.support)
        return p


class MarkovSourceTable:
    """Joint distribution p(z) * p(x1|z) * p(x2|z); conditionally independent by construction."""

    def __init__(self, pz: np.ndarray, px1_given_z: np.ndarray, px2_given_z: np.ndarray):
        self.pz = np.asarray(pz, dtype=float)
        self.px1_given_z = np.asarray(px1_given_z, dtype=float)
        self.px2_given_z = np.asarray(px2_given_z, dtype=float)
        zc = self.pz.shape[0]
        if self.px1_given_z.shape[0] != zc or self.px2_given_z.shape[0] != zc:
            raise InvalidArgumentError("conditional tables must have one row per z")
        if zc == 0:
            raise InvalidArgumentError("empty table")
        for name, arr in (
            ("pz", self.pz[None, :]),
            ("px1_given_z", self.px1_given_z),
            ("px2_given_z", self.px2_given_z),
        ):
            if np.any(arr < -ROW_SUM_TOL):
                raise InvalidArgumentError(f"{name} has negative entries")
            if np.any(np.abs(arr.sum(axis=1) - 1.0) > ROW_SUM_TOL):
                raise InvalidArgumentError(f"{name} rows must sum to 1 within {ROW_SUM_TOL}")
        self.n1 = int(math.log2(self.px1_given_z.shape[1]))
        self.n2 = int(math.log2(self.px2_given_z.shape[1]))
        if (1 << self.n1) != self.px1_given_z.shape[1] or (1 << self.n2) != self.px2_given_z.shape[1]:
            raise InvalidArgumentError("conditional rows must have power-of-two width")

    @property
    def z_card(self) -> int:
        return self.pz.shape[0]

    @classmethod
    def from_flat_pair(cls, s1: FlatSource, s2: FlatSource) -> "MarkovSourceTable":
        """Two independent flat sources as a table with trivial side information."""
        return cls(np.ones(1), s1.distribution()[None, :], s2.distribution()[None, :])

    def to_dict(self) -> dict:
        return {
            "pz": self.pz.tolist(),
            "px1_given_z": self.px1_given_z.tolist(),
            "px2_given_z": self.px2_given_z.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MarkovSourceTable":
        return cls(np.array(d["pz"]), np.array(d["px1_given_z"]), np.array(d["px2_given_z"]))


def hmin_conditional(table: MarkovSourceTable, source: int) -> float:
    """-log2 sum_z p(z) max_x p(x_i|z), the conditional min-entropy given Z."""
    if source not in (1, 2):
        raise InvalidArgumentError("source index must be 1 or 2")
    cond = table.px1_given_z if source == 1 else table.px2_given_z
    p_guess = float(np.dot(table.pz, cond.max(axis=1)))
    return -math.log2(p_guess)


_output_table_cache: dict = {}


def extractor_output_table(ext: ExtractorDescriptor, n1: int, n2: int) -> np.ndarray:
    """Dense table T[x1, x2] = Ext(x1, x2) as integers; cached per descriptor."""
    if ext.n1 != n1 or ext.n2 != n2:
        raise InvalidArgumentError("extractor dimensions do not match the table")
    if n1 + n2 > ENUMERATION_BUDGET_BITS:
        raise ResourceBudgetError(f"output table of {n1}+{n2} bits exceeds the budget")
    key = (id(ext), n1, n2)
    cached = _output_table_cache.get(key)
    if cached is not None and cached[0] is ext:
        return cached[1]
    T = np.empty((1 << n1, 1 << n2), dtype=np.int64)
    for x1 in range(1 << n1):
        b1 = BitString(x1, n1)
        for x2 in range(1 << n2):
            T[x1, x2] = ext.extract(b1, BitString(x2, n2)).value
    _output_table_cache[key] = (ext, T)
    return T


def statistical_distance_from_uniform(
    ext: ExtractorDescriptor,
    table: MarkovSourceTable,
    conditioned_on: Iterable[str] = ("Z",),
) -> float:
    """Exact variational distance (1/2)||Ext(X1,X2) cond - U_m o cond|| by enumeration."""
    cond = set(conditioned_on)
    if not cond <= {"Z", "X1", "X2"}:
        raise InvalidArgumentError(f"unknown conditioning registers: {cond}")
    n1, n2 = table.n1, table.n2
    if n1 + n2 + math.log2(table.z_card) > ENUMERATION_BUDGET_BITS:
        raise ResourceBudgetError("joint support exceeds the enumeration budget")
    T = extractor_output_table(ext, n1, n2)
    M = 1 << ext.m

    x1_idx = np.repeat(np.arange(1 << n1), 1 << n2)
    x2_idx = np.tile(np.arange(1 << n2), 1 << n1)
    y_idx = T.ravel()

    per_z = "Z" in cond
    kdims = []
    if "X1" in cond:
        kdims.append((x1_idx, 1 << n1))
    if "X2" in cond:
        kdims.append((x2_idx, 1 << n2))
    key = np.zeros_like(y_idx)
    ksize = 1
    for idx, size in kdims:
        key = key * size + idx
        ksize *= size

    total = 0.0
    acc = np.zeros((ksize, M))
    for z in range(table.z_card):
        w = table.pz[z] * np.outer(table.px1_given_z[z], table.px2_given_z[z]).ravel()
        hist = np.bincount(key * M + y_idx, weights=w, minlength=ksize * M).reshape(ksize, M)
        if per_z:
            total += 0.5 * np.abs(hist - hist.sum(axis=1, keepdims=True) / M).sum()
        else:
            acc += hist
    if not per_z:
        total = 0.5 * np.abs(acc - acc.sum(axis=1, keepdims=True) / M).sum()
    return float(total)


def distinguishing_event_statistic(ext: ExtractorDescriptor, joint: np.ndarray) -> float:
    """sum over {Ext(x1,x2) = Ext(z1,z2)} of p(x1,x2,z1,z2), minus 1/M."""
    joint = np.asarray(joint, dtype=float)
    n1, n2 = ext.n1, ext.n2
    if joint.shape != (1 << n1, 1 << n2, 1 << n1, 1 << n2):
        raise InvalidArgumentError("joint shape must be (2^n1, 2^n2, 2^n1, 2^n2)")
    if 2 * (n1 + n2) > ENUMERATION_BUDGET_BITS:
        raise ResourceBudgetError("joint exceeds the enumeration budget")
    if abs(joint.sum() - 1.0) > ROW_SUM_TOL:
        raise InvalidArgumentError("joint must sum to 1")
    T = extractor_output_table(ext, n1, n2)
    eq = T[:, :, None, None] == T[None, None, :, :]
    M = 1 << ext.m
    return float(joint[eq].sum() - 1.0 / M)


def conditional_distance_given_guess(ext: ExtractorDescriptor, joint: np.ndarray) -> float:
    """(1/2)||Ext(X1,X2) Z1 Z2 - U_m o Z1 Z2|| for an arbitrary enumerable joint."""
    joint = np.asarray(joint, dtype=float)
    n1, n2 = ext.n1, ext.n2
    if joint.shape != (1 << n1, 1 << n2, 1 << n1, 1 << n2):
        raise InvalidArgumentError("joint shape must be (2^n1, 2^n2, 2^n1, 2^n2)")
    T = extractor_output_table(ext, n1, n2)
    M = 1 << ext.m
    # p(y, z1, z2)
    p_yz = np.zeros((M, 1 << n1, 1 << n2))
    for x1 in range(1 << n1):
        for x2 in range(1 << n2):
            p_yz[T[x1, x2]] += joint[x1, x2]
    p_z = p_yz.sum(axis=0)
    return float(0.5 * np.abs(p_yz - p_z[None, :, :] / M).sum())


def build_markov_table(
    n1: int,
    n2: int,
    z_card: int,
    target_k1: float,
    target_k2: float,
    seed: int,
) -> MarkovSourceTable:
    """Per-z flat conditionals whose supports are random and large enough that
    hmin_conditional meets the targets (exactly when 2^target is integral)."""
    if target_k1 > n1 or target_k2 > n2:
        raise ConstructionError("entropy target exceeds the source length")
    if target_k1 < 0 or target_k2 < 0 or z_card < 1:
        raise ConstructionError("invalid targets")
    rng = np.random.default_rng(seed)
    pz = rng.random(z_card) + 0.1
    pz /= pz.sum()

    def conditionals(n: int, target: float) -> np.ndarray:
        size = math.ceil(2.0 ** target - 1e-12)
        rows = np.zeros((z_card, 1 << n))
        for z in range(z_card):
            support = rng.choice(1 << n, size=size, replace=False)
            rows[z, support] = 1.0 / size
        return rows

    return MarkovSourceTable(pz, conditionals(n1, target_k1), conditionals(n2, target_k2))


def random_flat_source(n: int, k: int, rng: np.random.Generator) -> FlatSource:
    """Uniformly random support of size 2^k."""
    if not 0 <= k <= n:
        raise InvalidArgumentError(f"need 0 <= k <= n, got k={k}, n={n}")
    support = rng.choice(1 << n, size=1 << k, replace=False)
    return FlatSource(n, tuple(int(x) for x in support))


def random_joint(n1: int, n2: int, rng: np.random.Generator) -> np.ndarray:
    """Random enumerable joint p(x1, x2, z1, z2) (flat Dirichlet)."""
    shape = (1 << n1, 1 << n2, 1 << n1, 1 << n2)
    j = rng.exponential(size=shape)
    return j / j.sum()
