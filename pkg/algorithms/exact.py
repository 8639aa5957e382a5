"""
Exact solvers for the four T_max / number-of-tardy-jobs variants.

The primary engine enumerates early sets and asks the canonical schedule
whether the set can be kept early under a T_max bound, which is exact and
needs 2^n checks instead of n! orders.  The permutation brute force is kept
as the independent oracle the solvers are certified against.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from itertools import combinations, permutations
from operator import attrgetter
from typing import FrozenSet, Iterator, List, Optional, Sequence, Tuple, Union

from algorithms.classic import (
    CanonicalChecker,
    edd_schedule,
    max_early_count_from,
    min_tmax_given_early,
    moore_hodgson,
)
from core.config import DEFAULT_SETTINGS
from core.errors import BudgetExceededError, PreconditionError
from core.sched_core import Instance, Schedule, Variant, VariantKind, evaluate

logger = logging.getLogger(__name__)

Objective = Union[int, Tuple[int, int]]


class SolveStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    BUDGET_EXCEEDED = "BudgetExceeded"


@dataclass(frozen=True)
class OptResult:
    status: SolveStatus
    schedule: Optional[Schedule] = None
    tmax: Optional[int] = None
    num_tardy: Optional[int] = None
    objective: Optional[Objective] = None
    explored: int = 0
    early_set: FrozenSet[int] = frozenset()

    @property
    def is_optimal(self) -> bool:
        return self.status == SolveStatus.OPTIMAL


@dataclass(frozen=True)
class ParetoPoint:
    tmax: int
    num_tardy: int
    schedule: Schedule


def _subset_budget_exceeded(instance: Instance, budget: Optional[int]) -> bool:
    cap = budget if budget is not None else DEFAULT_SETTINGS.budget_subsets
    if 2 ** instance.n > cap:
        logger.warning(f"2^{instance.n} early sets exceed the subset budget {cap}")
        return True
    return False


def _realized(instance: Instance, schedule: Schedule, objective_of, explored: int) -> OptResult:
    evaluation = evaluate(instance, schedule)
    return OptResult(
        status=SolveStatus.OPTIMAL,
        schedule=schedule,
        tmax=evaluation.tmax,
        num_tardy=evaluation.num_tardy,
        objective=objective_of(evaluation.tmax, evaluation.num_tardy),
        explored=explored,
        early_set=evaluation.early_set,
    )


def _first_fit_with_head(instance: Instance, ell: int, size: int, head: int) -> Tuple[Optional[Tuple[int, ...]], int]:
    """Lexicographically first feasible early set of `size` whose smallest id is ids[head]."""
    checker = CanonicalChecker(instance)
    ids = sorted(instance.ids)
    explored = 0
    for tail in combinations(ids[head + 1:], size - 1):
        explored += 1
        combo = (ids[head],) + tail
        if checker.fits(set(combo), ell):
            return combo, explored
    return None, explored


def _first_fit_parallel(instance: Instance, ell: int, size: int, workers: int) -> Tuple[Optional[Tuple[int, ...]], int]:
    heads = range(instance.n - size + 1)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_first_fit_with_head, [instance] * len(heads), [ell] * len(heads), [size] * len(heads), heads))
    explored = sum(count for _, count in results)
    found = [combo for combo, _ in results if combo is not None]
    return (min(found) if found else None), explored


def solve_constraint(
    instance: Instance,
    ell: int,
    budget: Optional[int] = None,
    workers: int = 1,
) -> OptResult:
    """Fewest tardy jobs subject to T_max <= ell.

    Early sets are tried by descending size (lexicographic within a size);
    the first one the canonical schedule can honour is optimal.
    """
    if _subset_budget_exceeded(instance, budget):
        return OptResult(SolveStatus.BUDGET_EXCEEDED)

    checker = CanonicalChecker(instance)
    ids = sorted(instance.ids)
    explored = 0
    for size in range(instance.n, -1, -1):
        if workers > 1 and size > 0:
            combo, count = _first_fit_parallel(instance, ell, size, workers)
            explored += count
        else:
            combo = None
            for candidate in combinations(ids, size):
                explored += 1
                if checker.fits(set(candidate), ell):
                    combo = candidate
                    break
        if combo is not None:
            schedule = checker.order(set(combo), ell)
            logger.info(f"Constraint optimum at ell={ell}: {instance.n - size} tardy after {explored} early sets")
            return _realized(instance, schedule, lambda tmax, tardy: tardy, explored)

    logger.info(f"No schedule meets T_max <= {ell}")
    return OptResult(SolveStatus.INFEASIBLE, explored=explored)


def decision_constraint(instance: Instance, ell: int, k: int, budget: Optional[int] = None) -> bool:
    """Is there a schedule with T_max <= ell and at most k tardy jobs?"""
    if _subset_budget_exceeded(instance, budget):
        cap = budget if budget is not None else DEFAULT_SETTINGS.budget_subsets
        raise BudgetExceededError("early sets", 2 ** instance.n, cap)

    checker = CanonicalChecker(instance)
    ids = sorted(instance.ids)
    smallest = max(instance.n - k, 0)
    for size in range(instance.n, smallest - 1, -1):
        for candidate in combinations(ids, size):
            if checker.fits(set(candidate), ell):
                return True
    return False


def solve_lex_tmax_then_u(instance: Instance, budget: Optional[int] = None, workers: int = 1) -> OptResult:
    _, ell_star = edd_schedule(instance)
    result = solve_constraint(instance, ell_star, budget=budget, workers=workers)
    if not result.is_optimal:
        return result
    return OptResult(
        status=result.status,
        schedule=result.schedule,
        tmax=result.tmax,
        num_tardy=result.num_tardy,
        objective=(ell_star, result.num_tardy),
        explored=result.explored,
        early_set=result.early_set,
    )


def maximum_early_sets(instance: Instance, target: int, budget: Optional[int] = None) -> Iterator[FrozenSet[int]]:
    """Every set of `target` jobs that can all be early, assuming no larger set can.

    Depth-first over the jobs in (due, id) order; a branch is cut as soon as
    the jobs chosen so far plus the best the remaining jobs could add (by
    Moore-Hodgson from the current time) falls short of `target`.
    """
    cap = budget if budget is not None else DEFAULT_SETTINGS.budget_subsets
    jobs = sorted(instance.jobs, key=attrgetter("due", "id"))
    visited = 0
    stack: List[Tuple[int, int, Tuple[int, ...]]] = [(0, 0, ())]
    while stack:
        index, clock, chosen = stack.pop()
        visited += 1
        if visited > cap:
            raise BudgetExceededError("search nodes", visited, cap)
        if len(chosen) + max_early_count_from(jobs[index:], clock) < target:
            continue
        if index == len(jobs):
            yield frozenset(chosen)
            continue
        job = jobs[index]
        stack.append((index + 1, clock, chosen))
        if clock + job.proc <= job.due:
            stack.append((index + 1, clock + job.proc, chosen + (job.id,)))


def solve_lex_u_then_tmax(instance: Instance, budget: Optional[int] = None) -> OptResult:
    """Fewest tardy jobs first, then the smallest T_max among those schedules.

    Unlike the subset solvers there is no 2^n check up front: the budget caps
    the nodes visited by maximum_early_sets, so gadgets with hundreds of jobs
    stay solvable when the pruned search is small.  BudgetExceeded is returned
    once the search visits more nodes than the cap.
    """
    _, k_star = moore_hodgson(instance)
    target = instance.n - k_star
    checker = CanonicalChecker(instance)

    best: Optional[Tuple[int, Tuple[int, ...], Schedule]] = None
    explored = 0
    try:
        for early in maximum_early_sets(instance, target, budget):
            explored += 1
            ell, schedule = min_tmax_given_early(instance, early, checker)
            if ell is None:
                continue
            key = (ell, tuple(sorted(early)))
            if best is None or key < best[:2]:
                best = (ell, key[1], schedule)
    except BudgetExceededError as exc:
        logger.warning(str(exc))
        return OptResult(SolveStatus.BUDGET_EXCEEDED, explored=explored)

    if best is None:
        return OptResult(SolveStatus.INFEASIBLE, explored=explored)
    logger.info(f"Lex(U, T_max) optimum: {k_star} tardy, T_max {best[0]} over {explored} maximum early sets")
    return _realized(instance, best[2], lambda tmax, tardy: (tardy, tmax), explored)


def solve_weighted_sum(instance: Instance, w1: int, w2: int, budget: Optional[int] = None) -> OptResult:
    """Minimize w1 * T_max + w2 * (number of tardy jobs), scoring realized schedules."""
    if w1 < 0 or w2 < 0:
        raise PreconditionError(f"weights must be nonnegative, got w1={w1}, w2={w2}")
    if _subset_budget_exceeded(instance, budget):
        return OptResult(SolveStatus.BUDGET_EXCEEDED)

    checker = CanonicalChecker(instance)
    ids = sorted(instance.ids)
    best: Optional[Tuple[int, Tuple[int, ...], Schedule]] = None
    explored = 0
    for size in range(instance.n + 1):
        for combo in combinations(ids, size):
            explored += 1
            ell, schedule = min_tmax_given_early(instance, combo, checker)
            if ell is None:
                continue
            evaluation = evaluate(instance, schedule)
            score = w1 * evaluation.tmax + w2 * evaluation.num_tardy
            if best is None or (score, combo) < best[:2]:
                best = (score, combo, schedule)

    return _realized(instance, best[2], lambda tmax, tardy: w1 * tmax + w2 * tardy, explored)


def pareto_front(instance: Instance, budget: Optional[int] = None) -> List[ParetoPoint]:
    """Non-dominated (T_max, tardy count) pairs, with a schedule for each."""
    if _subset_budget_exceeded(instance, budget):
        cap = budget if budget is not None else DEFAULT_SETTINGS.budget_subsets
        raise BudgetExceededError("early sets", 2 ** instance.n, cap)

    checker = CanonicalChecker(instance)
    ids = sorted(instance.ids)
    points = []
    for size in range(instance.n + 1):
        best = None
        for combo in combinations(ids, size):
            ell, schedule = min_tmax_given_early(instance, combo, checker)
            if ell is not None and (best is None or ell < best[0]):
                best = (ell, schedule)
        if best is not None:
            evaluation = evaluate(instance, best[1])
            points.append(ParetoPoint(evaluation.tmax, evaluation.num_tardy, best[1]))

    points.sort(key=lambda point: (point.num_tardy, point.tmax))
    front: List[ParetoPoint] = []
    for point in points:
        if not front or point.tmax < front[-1].tmax:
            front.append(point)
    return front


def _objective_for(variant: Variant):
    kind = variant.kind
    if kind in (VariantKind.CONSTRAINT_OPT, VariantKind.CONSTRAINT_DECISION):
        ell = variant.ell
        return (lambda tmax, tardy: tardy), (lambda tmax, tardy: tmax <= ell)
    if kind == VariantKind.LEX_TMAX_THEN_U:
        return (lambda tmax, tardy: (tmax, tardy)), None
    if kind == VariantKind.LEX_U_THEN_TMAX:
        return (lambda tmax, tardy: (tardy, tmax)), None
    if kind == VariantKind.WEIGHTED_SUM:
        w1, w2 = variant.w1, variant.w2
        return (lambda tmax, tardy: w1 * tmax + w2 * tardy), None
    raise PreconditionError(f"variant {kind.value} has no objective")


def brute_force_permutations(instance: Instance, objective: Variant, budget: Optional[int] = None) -> OptResult:
    """Exact optimum over all n! orders; the oracle for every other solver."""
    cap = budget if budget is not None else DEFAULT_SETTINGS.budget_perms
    if math.factorial(instance.n) > cap:
        return OptResult(SolveStatus.BUDGET_EXCEEDED)

    score_of, admissible = _objective_for(objective)
    jobs = sorted(instance.jobs, key=attrgetter("id"))
    procs = [job.proc for job in jobs]
    dues = [job.due for job in jobs]

    best = None
    explored = 0
    for order in permutations(range(len(jobs))):
        explored += 1
        clock = tmax = tardy = 0
        for index in order:
            clock += procs[index]
            late_by = clock - dues[index]
            if late_by > 0:
                tardy += 1
                if late_by > tmax:
                    tmax = late_by
        if admissible is not None and not admissible(tmax, tardy):
            continue
        score = score_of(tmax, tardy)
        if best is None or score < best[0]:
            best = (score, order)

    if best is None:
        return OptResult(SolveStatus.INFEASIBLE, explored=explored)
    schedule = Schedule(jobs[index].id for index in best[1])
    return _realized(instance, schedule, score_of, explored)


def solve_variant(instance: Instance, variant: Variant, budget: Optional[int] = None, workers: int = 1) -> OptResult:
    """Dispatch on the instance's variant kind."""
    kind = variant.kind
    if kind in (VariantKind.CONSTRAINT_OPT, VariantKind.CONSTRAINT_DECISION):
        return solve_constraint(instance, variant.ell, budget=budget, workers=workers)
    if kind == VariantKind.LEX_TMAX_THEN_U:
        return solve_lex_tmax_then_u(instance, budget=budget, workers=workers)
    if kind == VariantKind.LEX_U_THEN_TMAX:
        return solve_lex_u_then_tmax(instance, budget=budget)
    if kind == VariantKind.WEIGHTED_SUM:
        return solve_weighted_sum(instance, variant.w1, variant.w2, budget=budget)
    raise PreconditionError("instance has no variant; choose one explicitly")
