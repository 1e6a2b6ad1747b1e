"""Partition and cycle-type combinatorics of the symmetric group.

Conjugacy classes of the symmetric group on n points are labelled by the
partitions of n (the cycle types).  This module provides the exact
combinatorial substrate used everywhere else: enumeration of partitions,
centralizer orders, class weights as exact rationals, cycle-count
multiplicities, signatures, and literal small-n permutation enumeration for
oracle checks.

Weights are kept in exact integer/rational arithmetic; callers convert to
float only at the moment they weight complex values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .errors import SizeLimitError

ENUMERATION_CAP = 200
EXHAUSTIVE_SN_CAP = 8


@dataclass(frozen=True)
class Partition:
    """A weakly decreasing tuple of positive parts; the empty partition is allowed."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        prev = None
        for p in self.parts:
            if not isinstance(p, int) or p < 1:
                raise ValueError(f"parts must be positive integers, got {self.parts!r}")
            if prev is not None and p > prev:
                raise ValueError(f"parts must be weakly decreasing, got {self.parts!r}")
            prev = p

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __repr__(self) -> str:
        return f"Partition{self.parts!r}"


@dataclass(frozen=True)
class CycleCounts:
    """Multiplicities m -> C_m of the parts of a partition of n (zero counts omitted)."""

    counts: dict[int, int]
    n: int

    def __post_init__(self) -> None:
        if any(c < 1 for c in self.counts.values()):
            raise ValueError("stored multiplicities must be positive")
        if sum(m * c for m, c in self.counts.items()) != self.n:
            raise ValueError("sum of m * C_m must equal n")

    def get(self, m: int) -> int:
        return self.counts.get(m, 0)


def iter_partitions(n: int) -> Iterator[Partition]:
    """Yield all partitions of n in descending lexicographic order."""
    if n < 0:
        raise ValueError("n must be non-negative")

    def rec(remaining: int, max_part: int, prefix: tuple[int, ...]) -> Iterator[Partition]:
        if remaining == 0:
            yield Partition(prefix)
            return
        for part in range(min(max_part, remaining), 0, -1):
            yield from rec(remaining - part, part, prefix + (part,))

    yield from rec(n, n, ())


def enumerate_partitions(n: int, cap: int = ENUMERATION_CAP) -> list[Partition]:
    """All partitions of n, descending lexicographic.  Refuses n beyond ``cap``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > cap:
        raise SizeLimitError(f"partition enumeration capped at n <= {cap}, got n = {n}")
    return list(iter_partitions(n))


def centralizer_order(la: Partition) -> int:
    """z = prod_r r^{c_r} c_r!  (order of the centralizer of a permutation of this type).

    The class of cycle type ``la`` in the symmetric group on n points has
    exactly n!/z elements.  Exact integer arithmetic throughout.
    """
    z = 1
    mult: dict[int, int] = {}
    for p in la.parts:
        mult[p] = mult.get(p, 0) + 1
    for r, c in mult.items():
        z *= r**c
        for i in range(2, c + 1):
            z *= i
    return z


def cycle_counts(la: Partition) -> CycleCounts:
    """Multiplicities C_m = #{parts equal to m}."""
    counts: dict[int, int] = {}
    for p in la.parts:
        counts[p] = counts.get(p, 0) + 1
    return CycleCounts(counts, la.size)


def signature(la: Partition) -> int:
    """Sign of any permutation with this cycle type: prod_m (-1)^(part_m + 1)."""
    sign = 1
    for p in la.parts:
        if p % 2 == 0:
            sign = -sign
    return sign


def class_weight(la: Partition) -> Fraction:
    """Exact Haar weight 1/z of the conjugacy class with this cycle type."""
    return Fraction(1, centralizer_order(la))


def cycle_type_of(perm: tuple[int, ...]) -> Partition:
    """Cycle type of a permutation given in one-line notation on {0, ..., n-1}."""
    n = len(perm)
    seen = [False] * n
    parts: list[int] = []
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        parts.append(length)
    parts.sort(reverse=True)
    return Partition(tuple(parts))


@lru_cache(maxsize=None)
def conjugacy_classes_by_enumeration(n: int) -> tuple[tuple[Partition, int], ...]:
    """Literal enumeration of all n! permutations, bucketed by cycle type.

    Returns (cycle type, class size) pairs.  This is the brute-force oracle
    substrate: class sizes come from counting actual permutations, not from
    the z formula.  Capped at n <= EXHAUSTIVE_SN_CAP.
    """
    if n > EXHAUSTIVE_SN_CAP:
        raise SizeLimitError(f"exhaustive enumeration capped at n <= {EXHAUSTIVE_SN_CAP}")
    buckets: dict[Partition, int] = {}
    for perm in itertools.permutations(range(n)):
        la = cycle_type_of(perm)
        buckets[la] = buckets.get(la, 0) + 1
    return tuple(sorted(buckets.items(), key=lambda kv: kv[0].parts, reverse=True))
