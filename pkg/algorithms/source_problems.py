"""Partition and 3-Partition source instances: seeded generation and exhaustive solvers."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from core.errors import PreconditionError

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 1000


class SourceKind(str, Enum):
    PARTITION = "partition"
    THREE_PARTITION = "threepartition"


@dataclass
class SourceProblem:
    kind: SourceKind
    a: List[int]
    m: int = 2
    solution: Optional[List[List[int]]] = field(default=None, compare=False)

    @property
    def t(self) -> int:
        return sum(self.a) // self.m


def solve_partition(a: Sequence[int]) -> Optional[List[int]]:
    """A 1-based index set summing to half the total, or None.  Smallest subsets first."""
    total = sum(a)
    if total % 2:
        return None
    indices = range(1, len(a) + 1)
    for size in range(len(a) + 1):
        for subset in combinations(indices, size):
            if sum(a[i - 1] for i in subset) * 2 == total:
                return list(subset)
    return None


def solve_three_partition(a: Sequence[int], m: int) -> Optional[List[List[int]]]:
    """m groups of 1-based indices with equal sums, found by labelling every element."""
    if m < 1 or sum(a) % m:
        return None
    t = sum(a) // m
    n = len(a)
    order = sorted(range(n), key=lambda index: -a[index])
    loads = [0] * m
    labels = [0] * n

    def place(position: int) -> bool:
        if position == n:
            return all(load == t for load in loads)
        index = order[position]
        tried = set()
        for group in range(m):
            if loads[group] in tried or loads[group] + a[index] > t:
                continue
            tried.add(loads[group])
            loads[group] += a[index]
            labels[index] = group
            if place(position + 1):
                return True
            loads[group] -= a[index]
        return False

    if not place(0):
        return None
    groups = [[] for _ in range(m)]
    for index, group in enumerate(labels):
        groups[group].append(index + 1)
    return sorted(groups)


def is_valid_partition(a: Sequence[int], subset: Sequence[int]) -> bool:
    return 2 * sum(a[i - 1] for i in subset) == sum(a)


def is_valid_three_partition(a: Sequence[int], groups: Sequence[Sequence[int]]) -> bool:
    m = len(groups)
    flat = sorted(index for group in groups for index in group)
    if m == 0 or flat != list(range(1, len(a) + 1)):
        return False
    return all(m * sum(a[i - 1] for i in group) == sum(a) for group in groups)


def _planted_groups(rng: random.Random, sizes: Sequence[int], low: int, high: int) -> Optional[List[List[int]]]:
    """Values for groups of the given sizes that all share one sum."""
    first = [rng.randint(low, high) for _ in range(sizes[0])]
    target = sum(first)
    groups = [first]
    for size in sizes[1:]:
        head = [rng.randint(low, high) for _ in range(size - 1)]
        last = target - sum(head)
        if not low <= last <= high:
            return None
        groups.append(head + [last])
    return groups


def generate_source(
    kind: SourceKind,
    n: int,
    value_range: Tuple[int, int],
    planted: bool,
    seed: int,
    m: int = 2,
) -> SourceProblem:
    """Seeded source instance; planted instances record the solution they were built from."""
    low, high = value_range
    if low < 1 or high < low:
        raise PreconditionError(f"value range must satisfy 1 <= low <= high, got {value_range}")
    if kind == SourceKind.PARTITION:
        m = 2
    if n < m:
        raise PreconditionError(f"need at least m = {m} values, got n = {n}")

    rng = random.Random(seed)
    for attempt in range(MAX_ATTEMPTS):
        if planted:
            sizes = [n // m + (1 if group < n % m else 0) for group in range(m)]
            groups = _planted_groups(rng, sizes, low, high)
            if groups is None:
                continue
            labelled = [(value, group) for group, values in enumerate(groups) for value in values]
            rng.shuffle(labelled)
            a = [value for value, _ in labelled]
            solution = [[index + 1 for index, (_, group) in enumerate(labelled) if group == g] for g in range(m)]
            if kind == SourceKind.PARTITION:
                solution = [solution[0]]
            logger.info(f"Planted {kind.value} instance after {attempt + 1} attempts")
            return SourceProblem(kind, a, m, solution)

        a = [rng.randint(low, high) for _ in range(n)]
        remainder = sum(a) % m
        if remainder:
            adjusted = a[-1] + (m - remainder)
            if adjusted > high:
                continue
            a[-1] = adjusted
        return SourceProblem(kind, a, m)

    raise PreconditionError(f"no {kind.value} instance with n={n}, m={m} in {value_range} after {MAX_ATTEMPTS} attempts")

