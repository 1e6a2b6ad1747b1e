import itertools
from fractions import Fraction
from functools import lru_cache

import pytest

from perm_moments import (
    Partition,
    SizeLimitError,
    centralizer_order,
    class_weight,
    cycle_counts,
    enumerate_partitions,
    iter_partitions,
    signature,
)


@lru_cache(maxsize=None)
def partition_count_oracle(n: int, max_part: int | None = None) -> int:
    """Independent recursive count: partitions of n with parts <= max_part."""
    if max_part is None:
        max_part = n
    if n == 0:
        return 1
    if max_part == 0:
        return 0
    total = 0
    for first in range(min(max_part, n), 0, -1):
        total += partition_count_oracle(n - first, first)
    return total


def literal_cycle_type(perm):
    n = len(perm)
    seen = [False] * n
    parts = []
    for s in range(n):
        if seen[s]:
            continue
        ln, j = 0, s
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            ln += 1
        parts.append(ln)
    return tuple(sorted(parts, reverse=True))


def test_enumerate_small_cases():
    assert [p.parts for p in enumerate_partitions(0)] == [()]
    assert [p.parts for p in enumerate_partitions(4)] == [
        (4,),
        (3, 1),
        (2, 2),
        (2, 1, 1),
        (1, 1, 1, 1),
    ]
    assert len(enumerate_partitions(10)) == 42


def test_enumeration_is_descending_lex_and_complete():
    for n in range(13):
        parts = [p.parts for p in enumerate_partitions(n)]
        assert parts == sorted(parts, reverse=True)
        assert len(parts) == len(set(parts)) == partition_count_oracle(n)
        assert all(sum(p) == n for p in parts)


@pytest.mark.parametrize("n", [20, 35, 60])
def test_count_matches_recurrence_oracle(n):
    assert sum(1 for _ in iter_partitions(n)) == partition_count_oracle(n)


def test_enumeration_cap():
    with pytest.raises(SizeLimitError):
        enumerate_partitions(201)
    assert enumerate_partitions(9, cap=9)
    with pytest.raises(SizeLimitError):
        enumerate_partitions(10, cap=9)


def test_centralizer_order_examples():
    assert centralizer_order(Partition((1, 1, 1))) == 6
    assert centralizer_order(Partition((3,))) == 3
    assert centralizer_order(Partition((2, 1))) == 2


def test_cycle_counts_examples():
    assert cycle_counts(Partition((2, 2, 1))).counts == {1: 1, 2: 2}
    assert cycle_counts(Partition((9, 3, 2, 2, 1))).counts == {1: 1, 2: 2, 3: 1, 9: 1}
    assert cycle_counts(Partition(())).counts == {}
    with pytest.raises(ValueError):
        # multiplicity bookkeeping must stay consistent with n
        from perm_moments import CycleCounts

        CycleCounts({2: 1}, 3)


def test_signature_examples():
    assert signature(Partition((1, 1, 1))) == 1
    assert signature(Partition((2, 1))) == -1
    assert signature(Partition((3,))) == 1


def test_class_weight_examples():
    assert class_weight(Partition((2, 1))) == Fraction(1, 2)
    assert class_weight(Partition((1,) * 6)) == Fraction(1, 720)
    assert sum(class_weight(la) for la in iter_partitions(5)) == 1


def test_class_equation_exact_up_to_12():
    for n in range(13):
        assert sum(class_weight(la) for la in iter_partitions(n)) == Fraction(1)


@pytest.mark.parametrize("n", range(1, 9))
def test_class_sizes_match_literal_bucketing(n):
    buckets = {}
    for perm in itertools.permutations(range(n)):
        t = literal_cycle_type(perm)
        buckets[t] = buckets.get(t, 0) + 1
    order = 1
    for k in range(2, n + 1):
        order *= k
    assert set(buckets) == {la.parts for la in iter_partitions(n)}
    for la in iter_partitions(n):
        assert buckets[la.parts] * centralizer_order(la) == order


@pytest.mark.parametrize("n", range(13))
def test_signature_closed_form(n):
    for la in iter_partitions(n):
        assert signature(la) == (-1) ** (n - la.length)


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition((1, 2))
    with pytest.raises(ValueError):
        Partition((0,))
    assert Partition(()).size == 0
