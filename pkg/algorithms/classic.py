"""
Polynomial-time building blocks: EDD, Moore-Hodgson, canonical schedules,
EDD restricted to a chosen set, and minimum T_max under a mandatory early set.

A canonical schedule for an early set E and a bound ell orders jobs by the
modified due date (d for jobs in E, d + ell otherwise).  Some schedule keeps
E early with T_max <= ell exactly when the canonical one does, so the
feasibility test below is exact.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from operator import attrgetter
from typing import Collection, Dict, List, Optional, Sequence, Tuple

from core.sched_core import Instance, Job, Schedule, TagKind, evaluate

logger = logging.getLogger(__name__)

DEFAULT_TAG_RANKS: Dict[TagKind, int] = {
    # J*_{i,1} before F_i^1 on equal modified due dates
    TagKind.NUMBER_STAR: 0,
    TagKind.FILLER_FIRST: 2,
    # J_n before J*_n, and J*_i before the fillers of group i
    TagKind.WEAK_MAIN: 0,
    TagKind.WEAK_STAR: 1,
    TagKind.WEAK_FILLER: 2,
}


@dataclass(frozen=True)
class TieBreakRule:
    """Order applied after the modified due date: tag rank, then job id."""

    ranks: Dict[TagKind, int] = field(default_factory=lambda: dict(DEFAULT_TAG_RANKS))
    default_rank: int = 3

    def rank(self, job: Job) -> int:
        return self.ranks.get(job.tag.kind, self.default_rank)


DEFAULT_TIES = TieBreakRule()
ID_ONLY_TIES = TieBreakRule(ranks={}, default_rank=0)


def edd_schedule(instance: Instance) -> Tuple[Schedule, int]:
    """Jackson's rule: (due, id) ascending minimizes the maximum tardiness."""
    ordered = sorted(instance.jobs, key=attrgetter("due", "id"))
    schedule = Schedule(job.id for job in ordered)
    return schedule, evaluate(instance, schedule).tmax


def moore_hodgson(instance: Instance) -> Tuple[Schedule, int]:
    """Minimum number of tardy jobs.

    Jobs are added in EDD order; whenever the current job would finish late
    the longest job admitted so far is rejected (largest proc, then largest
    id).  Early jobs keep their EDD order, rejected jobs follow in id order.
    """
    admitted: List[Tuple[int, int]] = []
    clock = 0
    rejected = []
    for job in sorted(instance.jobs, key=attrgetter("due", "id")):
        heapq.heappush(admitted, (-job.proc, -job.id))
        clock += job.proc
        if clock > job.due:
            neg_proc, neg_id = heapq.heappop(admitted)
            clock += neg_proc
            rejected.append(-neg_id)

    rejected_set = set(rejected)
    early = [job for job in sorted(instance.jobs, key=attrgetter("due", "id")) if job.id not in rejected_set]
    order = [job.id for job in early] + sorted(rejected_set)
    logger.debug(f"Moore-Hodgson rejected {len(rejected_set)} of {instance.n} jobs")
    return Schedule(order), len(rejected_set)


def max_early_count_from(jobs_in_edd_order: Sequence[Job], start: int) -> int:
    """Largest number of the given jobs that can all be early when processing starts at `start`."""
    admitted: List[int] = []
    clock = start
    for job in jobs_in_edd_order:
        heapq.heappush(admitted, -job.proc)
        clock += job.proc
        if clock > job.due:
            clock += heapq.heappop(admitted)
    return len(admitted)


class CanonicalChecker:
    """Precomputed view of an instance for repeated canonical-schedule queries."""

    def __init__(self, instance: Instance, ties: TieBreakRule = DEFAULT_TIES):
        self.instance = instance
        self.ties = ties
        self._rows = [(job.due, ties.rank(job), job.id, job.proc) for job in instance.jobs]

    def _keyed(self, early: Collection[int], ell: int) -> List[Tuple[int, int, int, int, int]]:
        keyed = []
        for due, rank, job_id, proc in self._rows:
            modified = due if job_id in early else due + ell
            keyed.append((modified, rank, job_id, proc, due))
        keyed.sort()
        return keyed

    def order(self, early: Collection[int], ell: int) -> Schedule:
        return Schedule(row[2] for row in self._keyed(early, ell))

    def fits(self, early: Collection[int], ell: int) -> bool:
        """Every job completes by its modified due date."""
        clock = 0
        for modified, _, _, proc, _ in self._keyed(early, ell):
            clock += proc
            if clock > modified:
                return False
        return True


def canonical_schedule(
    instance: Instance,
    early_set: Collection[int],
    ell: int,
    ties: TieBreakRule = DEFAULT_TIES,
) -> Schedule:
    return CanonicalChecker(instance, ties).order(set(early_set), ell)


def canonical_feasible(
    instance: Instance,
    early_set: Collection[int],
    ell: int,
    ties: TieBreakRule = DEFAULT_TIES,
) -> bool:
    """True iff some schedule keeps `early_set` early with T_max <= ell."""
    return CanonicalChecker(instance, ties).fits(set(early_set), ell)


def min_tmax_given_early(
    instance: Instance,
    early_set: Collection[int],
    checker: Optional[CanonicalChecker] = None,
) -> Tuple[Optional[int], Schedule]:
    """Least ell keeping `early_set` early with T_max <= ell, by binary search on [0, sum p].

    Returns (None, schedule) when the set cannot be early at all; the schedule
    is then the canonical one for the upper bound.
    """
    checker = checker or CanonicalChecker(instance)
    early = set(early_set)
    high = instance.total_proc
    if not checker.fits(early, high):
        return None, checker.order(early, high)

    low = 0
    while low < high:
        middle = (low + high) // 2
        if checker.fits(early, middle):
            high = middle
        else:
            low = middle + 1
    return low, checker.order(early, low)


def edd_for_set(instance: Instance, chosen: Collection[int]) -> Tuple[Schedule, bool]:
    """Chosen jobs first in (due, id) order, the rest after them in id order."""
    chosen = set(chosen)
    first = sorted((job for job in instance.jobs if job.id in chosen), key=attrgetter("due", "id"))
    rest = sorted(job.id for job in instance.jobs if job.id not in chosen)

    clock = 0
    all_early = True
    for job in first:
        clock += job.proc
        if clock > job.due:
            all_early = False
    return Schedule([job.id for job in first] + rest), all_early
