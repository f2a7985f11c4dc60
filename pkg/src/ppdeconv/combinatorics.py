"""Subsets, set partitions and multisets.

Every sum in the product/quotient rules runs either over the subsets of a
labelled increment set or over the set partitions of such a subset.  This
module enumerates both in a fixed, reproducible order and provides the
canonical multiset key used to store symmetric densities.

Subsets are plain tuples of strictly increasing indices.  A set partition is a
tuple of blocks (each a subset), ordered by smallest element.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Iterable, Iterator, Sequence

from .errors import ConfigurationError

DEFAULT_MAX_ORDER = 10

IndexSubset = tuple[int, ...]
SetPartition = tuple[IndexSubset, ...]


def _check_size(n: int, max_order: int) -> None:
    if n < 0:
        raise ValueError(f"ground-set size must be non-negative, got {n}")
    if n > max_order:
        raise ConfigurationError(
            f"ground-set size {n} exceeds max_order={max_order}; "
            "raise max_order explicitly to opt in"
        )


def enumerate_subsets(n: int, *, max_order: int = DEFAULT_MAX_ORDER) -> list[IndexSubset]:
    """All subsets of ``{0..n-1}``, ordered by bit mask (bit i <-> index i).

    >>> enumerate_subsets(2)
    [(), (0,), (1,), (0, 1)]
    """
    _check_size(n, max_order)
    return list(_subsets(n))


@lru_cache(maxsize=None)
def _subsets(n: int) -> tuple[IndexSubset, ...]:
    return tuple(
        tuple(i for i in range(n) if mask >> i & 1) for mask in range(1 << n)
    )


def restricted_growth_strings(n: int) -> Iterator[list[int]]:
    """Yield restricted growth strings of length ``n`` in lexicographic order.

    ``a[0] == 0`` and ``a[i] <= 1 + max(a[:i])``.  The same list object is
    mutated between yields; copy it if you keep it.
    """
    if n == 0:
        yield []
        return
    a = [0] * n
    # m[i] = max(a[:i+1]), kept alongside so the successor step is O(1) amortised
    m = [0] * n
    while True:
        yield a
        i = n - 1
        while i > 0 and a[i] > m[i - 1]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        m[i] = max(m[i - 1], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            m[j] = m[i]


def _blocks_from_rgs(rgs: Sequence[int], ground: Sequence[int]) -> SetPartition:
    blocks: list[list[int]] = []
    for label, elem in zip(rgs, ground):
        if label == len(blocks):
            blocks.append([])
        blocks[label].append(elem)
    return tuple(tuple(b) for b in blocks)


@lru_cache(maxsize=None)
def _partitions_of_range(n: int) -> tuple[SetPartition, ...]:
    ground = range(n)
    return tuple(_blocks_from_rgs(a, ground) for a in restricted_growth_strings(n))


def enumerate_partitions(
    ground: Iterable[int], *, max_order: int = DEFAULT_MAX_ORDER
) -> list[SetPartition]:
    """Every set partition of ``ground`` exactly once, in canonical order.

    The order follows restricted growth strings, so for ``(0, 1, 2)`` it is
    ``{012}, {01|2}, {02|1}, {0|12}, {0|1|2}``.  The empty ground set has a
    single partition with no blocks.
    """
    ground = tuple(ground)
    if any(b <= a for a, b in zip(ground, ground[1:])):
        raise ValueError(f"ground set must be strictly increasing, got {ground}")
    _check_size(len(ground), max_order)
    base = _partitions_of_range(len(ground))
    if ground == tuple(range(len(ground))):
        return list(base)
    return [tuple(tuple(ground[i] for i in block) for block in p) for p in base]


@lru_cache(maxsize=None)
def block_signature_counts(n: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Group the partitions of ``{0..n-1}`` by their multiset of block sizes.

    Returns ``((sizes, count), ...)`` where ``sizes`` is a non-increasing tuple
    of block sizes and ``count`` the number of partitions having them.  The
    counts come from literally enumerating every partition; when all
    increments are equal, every partition with the same block sizes
    contributes the same term, so this is all a scalar rule needs.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    tally: Counter[tuple[int, ...]] = Counter()
    for p in _partitions_of_range(n):
        tally[tuple(sorted((len(b) for b in p), reverse=True))] += 1
    return tuple(sorted(tally.items(), key=lambda kv: (len(kv[0]), kv[0])))


@lru_cache(maxsize=None)
def bell_number(n: int) -> int:
    """Bell number B_n via the Bell triangle."""
    if n < 0:
        raise ValueError("n must be non-negative")
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


@dataclass(frozen=True, order=True)
class Multiset:
    """A finite multiset of state indices.

    ``entries`` holds ``(state, multiplicity)`` pairs with strictly increasing
    states and multiplicities >= 1.
    """

    entries: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        prev = -1
        for state, mult in self.entries:
            if state <= prev or mult < 1:
                raise ValueError(f"malformed multiset entries {self.entries}")
            prev = state

    @classmethod
    def from_points(cls, points: Iterable[int]) -> Multiset:
        return cls(tuple(sorted(Counter(points).items())))

    @property
    def size(self) -> int:
        return sum(m for _, m in self.entries)

    def points(self) -> tuple[int, ...]:
        """Expanded sorted tuple, e.g. ``{0:2, 3:1} -> (0, 0, 3)``."""
        return tuple(s for s, m in self.entries for _ in range(m))

    def permutation_count(self) -> int:
        """Number of distinct orderings, ``n! / prod(m_i!)``."""
        out = math.factorial(self.size)
        for _, m in self.entries:
            out //= math.factorial(m)
        return out

    def __len__(self) -> int:
        return self.size


EMPTY = Multiset()


def canonicalize(points: Sequence[int]) -> tuple[Multiset, int]:
    ms = Multiset.from_points(points)
    return ms, ms.permutation_count()


def multisets_of_size(n_states: int, size: int) -> Iterator[Multiset]:
    """All multisets of ``size`` points drawn from ``n_states`` states, sorted."""
    for pts in combinations_with_replacement(range(n_states), size):
        yield Multiset.from_points(pts)
