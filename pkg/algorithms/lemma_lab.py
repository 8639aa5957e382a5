"""
Mechanical checks of the structural claims behind the two gadgets.

Predictions say which jobs a candidate's canonical schedule keeps early and
whether it respects the T_max bound; the comparisons evaluate that schedule
directly and report every disagreement.  The sweeps enumerate candidate sets
exhaustively to decide small source instances through the gadget.
"""

from __future__ import annotations

import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from algorithms.classic import CanonicalChecker
from algorithms.reductions import (
    CandidateSet,
    Choice,
    InvalidEncoding,
    StrongCandidate,
    StrongMeta,
    WeakCandidate,
    WeakMeta,
    early_set,
    strong_candidate_from_partition,
    strong_extract_partition,
    table_one_row,
    table_two_row,
    weak_candidate_from_subset,
    weak_extract_subset,
)
from core.config import DEFAULT_SETTINGS
from core.errors import BudgetExceededError
from core.sched_core import Evaluation, Instance, JobTag, TagKind, evaluate, is_feasible_tmax

logger = logging.getLogger(__name__)


class Status(str, Enum):
    EARLY = "Early"
    TARDY = "Tardy"


@dataclass
class PredictedStatus:
    status: Dict[int, Status]
    predicted_feasible: bool
    rule_trace: Dict[int, str]


@dataclass(frozen=True)
class NotApplicable:
    reason: str


@dataclass(frozen=True)
class Mismatch:
    job_id: Optional[int]
    subject: str
    predicted: str
    actual: str
    rule: str


@dataclass(frozen=True)
class IdentityFailure:
    observation: str
    j: int
    lhs: int
    rhs: int


@dataclass
class DiscrepancyReport:
    mismatches: List[Mismatch] = field(default_factory=list)
    identity_failures: List[IdentityFailure] = field(default_factory=list)
    checked_candidates: int = 0
    checked_jobs: int = 0
    skipped: int = 0

    @property
    def empty(self) -> bool:
        return not self.mismatches and not self.identity_failures

    def merge(self, other: "DiscrepancyReport") -> "DiscrepancyReport":
        self.mismatches.extend(other.mismatches)
        self.identity_failures.extend(other.identity_failures)
        self.checked_candidates += other.checked_candidates
        self.checked_jobs += other.checked_jobs
        self.skipped += other.skipped
        return self


# ---------------------------------------------------------------------------
# Arithmetic identities
# ---------------------------------------------------------------------------


def _expect(report: DiscrepancyReport, holds: bool, observation: str, j: int, lhs: int, rhs: int) -> None:
    if not holds:
        report.identity_failures.append(IdentityFailure(observation, j, lhs, rhs))


def check_strong_identities(instance: Instance, meta: Optional[StrongMeta] = None) -> DiscrepancyReport:
    """Deadline gaps and prefix volumes of the strong gadget, summed over the actual jobs."""
    meta = meta or instance.meta
    report = DiscrepancyReport()
    n, m, t, alpha = meta.n, meta.m, meta.t, meta.alpha
    cube, square = alpha ** 3, alpha ** 2

    def job(kind: TagKind, i: Optional[int] = None, j: Optional[int] = None):
        return instance.job(meta.job_index[JobTag(kind, i, j)])

    for tag, job_id in meta.job_index.items():
        expected = table_one_row(meta, tag)
        actual = instance.job(job_id)
        _expect(report, actual.proc == expected[0], f"table-proc {tag}", tag.j or tag.i or 0, actual.proc, expected[0])
        _expect(report, actual.due == expected[1], f"table-due {tag}", tag.j or tag.i or 0, actual.due, expected[1])

    _expect(report, alpha == 10 * n * n * t, "alpha", 0, alpha, 10 * n * n * t)
    _expect(report, sum(meta.a) == m * t, "sum-a", 0, sum(meta.a), m * t)

    level = [job(TagKind.FILLER_ZERO)] + [job(TagKind.FILLER_FIRST, i) for i in range(1, n + 1)]
    for j in range(1, m + 1):
        previous_volume = sum(x.proc for x in level)
        _expect(
            report,
            previous_volume == meta.half_period_end_at(j) - (n * cube + square + (m - j) * t * alpha + (m - j) * t),
            "prefix-volume-half-period",
            j,
            previous_volume,
            meta.half_period_end_at(j) - (n * cube + square + (m - j) * t * alpha + (m - j) * t),
        )
        _expect(
            report,
            previous_volume == meta.period_end_at(j - 1) + n * cube + (m - j + 1) * t * alpha,
            "prefix-volume-period",
            j,
            previous_volume,
            meta.period_end_at(j - 1) + n * cube + (m - j + 1) * t * alpha,
        )

        delimiter_star = job(TagKind.DELIMITER_STAR, j)
        level = level + [
            job(kind, i, j) for i in range(1, n + 1) for kind in (TagKind.NUMBER_STAR, TagKind.NEG_NUMBER_STAR)
        ] + [delimiter_star]

        latest = max(x.due for x in level if x.id != delimiter_star.id)
        _expect(
            report,
            latest + meta.ell < meta.period_end_at(j),
            "star-deadline-gap",
            j,
            latest + meta.ell,
            meta.period_end_at(j),
        )
        volume = sum(x.proc for x in level)
        _expect(
            report,
            volume == meta.period_end_at(j) - (n * cube + square + 2 * j * t * alpha),
            "star-volume-period",
            j,
            volume,
            meta.period_end_at(j) - (n * cube + square + 2 * j * t * alpha),
        )
        _expect(
            report,
            volume == meta.half_period_end_at(j) + n * cube + j * t,
            "star-volume-half-period",
            j,
            volume,
            meta.half_period_end_at(j) + n * cube + j * t,
        )

        delimiter = job(TagKind.DELIMITER, j)
        level = level + [
            job(kind, i, j) for i in range(1, n + 1) for kind in (TagKind.NUMBER, TagKind.NEG_NUMBER)
        ] + [delimiter]
        latest = max(x.due for x in level if x.id != delimiter.id)
        _expect(
            report,
            latest + meta.ell < meta.half_period_end_at(j + 1),
            "main-deadline-gap",
            j,
            latest + meta.ell,
            meta.half_period_end_at(j + 1),
        )

    if report.identity_failures:
        logger.warning(f"{len(report.identity_failures)} strong identity failures")
    return report


def check_weak_identities(instance: Instance, meta: Optional[WeakMeta] = None) -> DiscrepancyReport:
    meta = meta or instance.meta
    report = DiscrepancyReport()
    n = meta.n

    for tag, job_id in meta.job_index.items():
        expected = table_two_row(meta, tag)
        actual = instance.job(job_id)
        _expect(report, actual.proc == expected[0], f"table-proc {tag}", tag.i, actual.proc, expected[0])
        _expect(report, actual.due == expected[1], f"table-due {tag}", tag.i, actual.due, expected[1])
    for i, ids in meta.filler_ids.items():
        expected = table_two_row(meta, JobTag(TagKind.WEAK_FILLER, i))
        for job_id in ids:
            actual = instance.job(job_id)
            _expect(report, (actual.proc, actual.due) == expected, "table-filler", i, actual.proc, expected[0])
        volume = sum(instance.job(job_id).proc for job_id in ids)
        _expect(report, volume == meta.W, "filler-volume", i, volume, meta.W)

    _expect(report, meta.W % meta.X == 0, "W-divisible", 0, meta.W, meta.X)
    _expect(report, meta.X % 2 == 0, "X-even", 0, meta.X, 2)
    _expect(report, sum(meta.a) == 2 * meta.t, "sum-a", 0, sum(meta.a), 2 * meta.t)
    slack = meta.D1_star + meta.prefix_y(n) + meta.t * meta.Z
    _expect(report, meta.ell == slack, "ell", 0, meta.ell, slack)

    # every star-side due date is at most D1*
    latest_star_side = max(
        instance.job(meta.id_of(kind, i)).due
        for i in range(1, n + 1)
        for kind in (TagKind.WEAK_STAR, TagKind.WEAK_NEG_STAR)
    )
    _expect(report, latest_star_side <= meta.D1_star, "star-side-deadline", 0, latest_star_side, meta.D1_star)

    for choice in (Choice.POS, Choice.NEG):
        _check_weak_phase_boundaries(report, instance, meta, WeakCandidate(star=[choice] * n, main=[choice] * n))
    return report


def _weak_phases(meta: WeakMeta, candidate: WeakCandidate) -> Tuple[List[int], List[int], List[int]]:
    """Job ids of the star phase, the interleaved phase and the trailing tardy phase."""
    first, second, third = [], [], []
    for i in range(1, meta.n + 1):
        star_pos = candidate.star_at(i) == Choice.POS
        main_pos = candidate.main_at(i) == Choice.POS
        first.append(meta.id_of(TagKind.WEAK_STAR if star_pos else TagKind.WEAK_NEG_STAR, i))
        first.extend(meta.filler_ids[i])
        second.append(meta.id_of(TagKind.WEAK_NEG_STAR if star_pos else TagKind.WEAK_STAR, i))
        second.append(meta.id_of(TagKind.WEAK_MAIN if main_pos else TagKind.WEAK_NEG_MAIN, i))
        third.append(meta.id_of(TagKind.WEAK_NEG_MAIN if main_pos else TagKind.WEAK_MAIN, i))
    return first, second, third


def _check_weak_phase_boundaries(
    report: DiscrepancyReport, instance: Instance, meta: WeakMeta, candidate: WeakCandidate
) -> None:
    early = early_set(meta, candidate)

    def modified(job_id: int) -> int:
        due = instance.job(job_id).due
        return due if job_id in early else due + meta.ell

    label = "pos" if candidate.star_at(1) == Choice.POS else "neg"
    first, second, third = (list(map(modified, phase)) for phase in _weak_phases(meta, candidate))
    _expect(report, max(first) <= min(second), f"phase-boundary first/second ({label})", 1, max(first), min(second))
    _expect(report, max(second) <= min(third), f"phase-boundary second/third ({label})", 2, max(second), min(third))


# ---------------------------------------------------------------------------
# Predictions
# ---------------------------------------------------------------------------


def has_forbidden_pair(candidate: StrongCandidate) -> bool:
    """J_{i,j} with the negated star job of period j + 1, or J*_{i,j} without J_{i,j}."""
    for i in range(1, candidate.n + 1):
        for j in range(1, candidate.m + 1):
            if candidate.star_at(i, j) == Choice.POS and candidate.main_at(i, j) == Choice.NEG:
                return True
            if j < candidate.m and candidate.main_at(i, j) == Choice.POS and candidate.star_at(i, j + 1) == Choice.NEG:
                return True
    return False


# Named clauses cited by the prediction traces; a mismatch report names the clause that failed.
RULES = {
    "strong-filler": "filler jobs are early",
    "strong-number": "number job early iff chosen",
    "strong-delimiter-star": "star delimiter early iff the chosen star sum reaches j*t",
    "strong-delimiter": "main delimiter early iff the chosen main sum stays within j*t",
    "weak-filler": "filler jobs are early",
    "weak-star-chosen": "chosen star job is early",
    "weak-star-unchosen": "unchosen star job is tardy",
    "weak-main-after-star": "main job after its star job: early iff the prefix stays within t",
    "weak-neg-main-after-star": "negated main job after its star job is tardy",
    "weak-main-before-star": "main job before its star job is early",
    "weak-neg-main-before-star": "negated main job before its star job: early iff the prefix stays within t",
    "weak-main-unchosen": "unchosen main job is tardy",
}


def _cite(rule: str, detail: str = "") -> str:
    return f"[{rule}] {RULES[rule]}" + (f" ({detail})" if detail else "")


def predict_strong(meta: StrongMeta, candidate: StrongCandidate) -> PredictedStatus:
    status: Dict[int, Status] = {}
    trace: Dict[int, str] = {}
    star_sums = {
        j: sum(meta.a[i - 1] for i in range(1, meta.n + 1) if candidate.star_at(i, j) == Choice.POS)
        for j in range(1, meta.m + 1)
    }
    main_sums = {
        j: sum(meta.a[i - 1] for i in range(1, meta.n + 1) if candidate.main_at(i, j) == Choice.POS)
        for j in range(1, meta.m + 1)
    }

    for tag, job_id in meta.job_index.items():
        kind = tag.kind
        if kind in (TagKind.FILLER_ZERO, TagKind.FILLER_FIRST, TagKind.FILLER_LAST):
            status[job_id], trace[job_id] = Status.EARLY, _cite("strong-filler")
        elif kind in (TagKind.NUMBER_STAR, TagKind.NEG_NUMBER_STAR):
            chosen = (candidate.star_at(tag.i, tag.j) == Choice.POS) == (kind == TagKind.NUMBER_STAR)
            status[job_id] = Status.EARLY if chosen else Status.TARDY
            trace[job_id] = _cite("strong-number")
        elif kind in (TagKind.NUMBER, TagKind.NEG_NUMBER):
            chosen = (candidate.main_at(tag.i, tag.j) == Choice.POS) == (kind == TagKind.NUMBER)
            status[job_id] = Status.EARLY if chosen else Status.TARDY
            trace[job_id] = _cite("strong-number")
        elif kind == TagKind.DELIMITER_STAR:
            j = tag.i
            status[job_id] = Status.EARLY if star_sums[j] >= j * meta.t else Status.TARDY
            trace[job_id] = _cite("strong-delimiter-star", f"j={j}, sum {star_sums[j]}, bound {j * meta.t}")
        elif kind == TagKind.DELIMITER:
            j = tag.i
            status[job_id] = Status.EARLY if main_sums[j] <= j * meta.t else Status.TARDY
            trace[job_id] = _cite("strong-delimiter", f"j={j}, sum {main_sums[j]}, bound {j * meta.t}")

    return PredictedStatus(status, not has_forbidden_pair(candidate), trace)


def predict_weak(meta: WeakMeta, candidate: WeakCandidate) -> Union[PredictedStatus, NotApplicable]:
    negated = sum(meta.a[i - 1] for i in range(1, meta.n + 1) if candidate.star_at(i) == Choice.NEG)
    if negated > meta.t:
        return NotApplicable(f"negated star jobs carry {negated} > t = {meta.t}")

    status: Dict[int, Status] = {}
    trace: Dict[int, str] = {}
    for ids in meta.filler_ids.values():
        for job_id in ids:
            status[job_id], trace[job_id] = Status.EARLY, _cite("weak-filler")

    prefix = 0
    for i in range(1, meta.n + 1):
        star_pos = candidate.star_at(i) == Choice.POS
        main_pos = candidate.main_at(i) == Choice.POS
        chosen_star = meta.id_of(TagKind.WEAK_STAR if star_pos else TagKind.WEAK_NEG_STAR, i)
        other_star = meta.id_of(TagKind.WEAK_NEG_STAR if star_pos else TagKind.WEAK_STAR, i)
        status[chosen_star], trace[chosen_star] = Status.EARLY, _cite("weak-star-chosen")
        status[other_star], trace[other_star] = Status.TARDY, _cite("weak-star-unchosen")

        if main_pos:
            prefix += meta.a[i - 1]
        chosen_main = meta.id_of(TagKind.WEAK_MAIN if main_pos else TagKind.WEAK_NEG_MAIN, i)
        other_main = meta.id_of(TagKind.WEAK_NEG_MAIN if main_pos else TagKind.WEAK_MAIN, i)
        within = prefix <= meta.t
        if star_pos and main_pos:
            status[chosen_main] = Status.EARLY if within else Status.TARDY
            trace[chosen_main] = _cite("weak-main-after-star", f"i={i}, prefix {prefix}")
        elif star_pos:
            status[chosen_main] = Status.TARDY
            trace[chosen_main] = _cite("weak-neg-main-after-star", f"i={i}")
        elif main_pos:
            status[chosen_main] = Status.EARLY
            trace[chosen_main] = _cite("weak-main-before-star", f"i={i}")
        else:
            status[chosen_main] = Status.EARLY if within else Status.TARDY
            trace[chosen_main] = _cite("weak-neg-main-before-star", f"i={i}, prefix {prefix}")
        status[other_main], trace[other_main] = Status.TARDY, _cite("weak-main-unchosen")

    feasible = candidate.star_at(meta.n) == Choice.POS or prefix <= meta.t
    return PredictedStatus(status, feasible, trace)


# ---------------------------------------------------------------------------
# Comparisons
# ---------------------------------------------------------------------------


def compare_with_prediction(
    instance: Instance,
    ell: int,
    early: set,
    prediction: PredictedStatus,
    checker: Optional[CanonicalChecker] = None,
) -> Tuple[DiscrepancyReport, Evaluation]:
    checker = checker or CanonicalChecker(instance)
    evaluation = evaluate(instance, checker.order(early, ell))
    report = DiscrepancyReport(checked_candidates=1)

    actual_feasible = is_feasible_tmax(evaluation, ell)
    if actual_feasible != prediction.predicted_feasible:
        report.mismatches.append(
            Mismatch(None, "tmax <= ell", str(prediction.predicted_feasible), str(actual_feasible), "feasibility")
        )
    if prediction.predicted_feasible:
        for job_id, predicted in prediction.status.items():
            actual = Status.EARLY if evaluation.is_early(job_id) else Status.TARDY
            report.checked_jobs += 1
            if actual != predicted:
                report.mismatches.append(
                    Mismatch(
                        job_id,
                        str(instance.job(job_id).tag),
                        predicted.value,
                        actual.value,
                        prediction.rule_trace.get(job_id, ""),
                    )
                )
    return report, evaluation


def compare_strong(
    instance: Instance,
    meta: StrongMeta,
    candidate: StrongCandidate,
    checker: Optional[CanonicalChecker] = None,
) -> DiscrepancyReport:
    prediction = predict_strong(meta, candidate)
    report, _ = compare_with_prediction(instance, meta.ell, early_set(meta, candidate), prediction, checker)
    return report


def compare_weak(
    instance: Instance,
    meta: WeakMeta,
    candidate: WeakCandidate,
    checker: Optional[CanonicalChecker] = None,
) -> DiscrepancyReport:
    prediction = predict_weak(meta, candidate)
    if isinstance(prediction, NotApplicable):
        return DiscrepancyReport(skipped=1)
    report, _ = compare_with_prediction(instance, meta.ell, early_set(meta, candidate), prediction, checker)
    return report


def random_strong_candidate(n: int, m: int, rng: random.Random, monotone: bool = False) -> StrongCandidate:
    if monotone:
        patterns = strong_patterns(m)
        rows = [patterns[rng.randrange(len(patterns))] for _ in range(n)]
        return StrongCandidate(star=[row[0] for row in rows], main=[row[1] for row in rows])
    return StrongCandidate(
        star=[[Choice.of(rng.random() < 0.5) for _ in range(m)] for _ in range(n)],
        main=[[Choice.of(rng.random() < 0.5) for _ in range(m)] for _ in range(n)],
    )


def random_weak_candidate(n: int, rng: random.Random) -> WeakCandidate:
    return WeakCandidate(
        star=[Choice.of(rng.random() < 0.5) for _ in range(n)],
        main=[Choice.of(rng.random() < 0.5) for _ in range(n)],
    )


def run_lemma_samples(instance: Instance, samples: int, seed: int) -> DiscrepancyReport:
    """Compare predictions on `samples` seeded candidates; half of the strong ones are monotone."""
    meta = instance.meta
    rng = random.Random(seed)
    checker = CanonicalChecker(instance)
    report = DiscrepancyReport()
    for sample in range(samples):
        if isinstance(meta, StrongMeta):
            candidate = random_strong_candidate(meta.n, meta.m, rng, monotone=sample % 2 == 0)
            report.merge(compare_strong(instance, meta, candidate, checker))
        else:
            report.merge(compare_weak(instance, meta, random_weak_candidate(meta.n, rng), checker))
    logger.info(
        f"Compared {report.checked_candidates} candidates ({report.skipped} skipped), "
        f"{len(report.mismatches)} mismatches"
    )
    return report


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepResult:
    explored: int
    best_tardy: Optional[int]
    achievable: bool
    witness: Optional[CandidateSet] = None
    extracted: Optional[Union[List[FrozenSet[int]], FrozenSet[int], InvalidEncoding]] = None


def strong_patterns(m: int) -> List[Tuple[Tuple[Choice, ...], Tuple[Choice, ...]]]:
    """Per-index (star row, main row) that switch from Neg to Pos once over the 2m half-periods."""
    patterns = []
    for switch in range(2 * m, -1, -1):
        halves = [Choice.of(h >= switch) for h in range(2 * m)]
        patterns.append((tuple(halves[0::2]), tuple(halves[1::2])))
    return patterns


def all_strong_candidates(n: int, m: int):
    """Every raw encoding of an n x m strong candidate (2^(2nm) of them)."""
    cells = n * m
    for bits in product((Choice.NEG, Choice.POS), repeat=2 * cells):
        star = [bits[i * m:(i + 1) * m] for i in range(n)]
        main = [bits[cells + i * m:cells + (i + 1) * m] for i in range(n)]
        yield StrongCandidate(star=star, main=main)


def _strong_slice(instance: Instance, meta: StrongMeta, head: int) -> Tuple[Optional[int], Optional[Tuple[int, ...]], int]:
    patterns = strong_patterns(meta.m)
    checker = CanonicalChecker(instance)
    best: Optional[Tuple[int, Tuple[int, ...]]] = None
    explored = 0
    for tail in product(range(len(patterns)), repeat=meta.n - 1):
        choice = (head,) + tail
        explored += 1
        candidate = StrongCandidate(
            star=[patterns[c][0] for c in choice], main=[patterns[c][1] for c in choice]
        )
        evaluation = evaluate(instance, checker.order(early_set(meta, candidate), meta.ell))
        if evaluation.tmax <= meta.ell and (best is None or (evaluation.num_tardy, choice) < best):
            best = (evaluation.num_tardy, choice)
    if best is None:
        return None, None, explored
    return best[0], best[1], explored


def _run_slices(function, instance, meta, heads: Sequence[int], workers: int):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(function, [instance] * len(heads), [meta] * len(heads), heads))
    return [function(instance, meta, head) for head in heads]


def _merge(results) -> Tuple[Optional[int], Optional[tuple], int]:
    explored = sum(result[2] for result in results)
    found = [(result[0], result[1]) for result in results if result[0] is not None]
    if not found:
        return None, None, explored
    best = min(found)
    return best[0], best[1], explored


def sweep_strong(
    instance: Instance,
    meta: Optional[StrongMeta] = None,
    budget: Optional[int] = None,
    workers: int = 1,
) -> SweepResult:
    """Best tardy count over every candidate without a forbidden pair."""
    meta = meta or instance.meta
    cap = budget if budget is not None else DEFAULT_SETTINGS.budget_sweep
    patterns = strong_patterns(meta.m)
    size = len(patterns) ** meta.n
    if size > cap:
        raise BudgetExceededError("strong candidate sets", size, cap)

    best, choice, explored = _merge(_run_slices(_strong_slice, instance, meta, range(len(patterns)), workers))
    achievable = best is not None and best <= meta.k
    witness = extracted = None
    if achievable:
        witness = StrongCandidate(star=[patterns[c][0] for c in choice], main=[patterns[c][1] for c in choice])
        extracted = strong_extract_partition(meta, witness)
    logger.info(f"Strong sweep: {explored} candidates, best tardy {best}, k={meta.k}")
    return SweepResult(explored, best, achievable, witness, extracted)


def _weak_candidate_from_code(n: int, code: Tuple[int, ...]) -> WeakCandidate:
    return WeakCandidate(star=[Choice.of(bit) for bit in code[:n]], main=[Choice.of(bit) for bit in code[n:]])


def _weak_slice(instance: Instance, meta: WeakMeta, head: int) -> Tuple[Optional[int], Optional[Tuple[int, ...]], int]:
    checker = CanonicalChecker(instance)
    best: Optional[Tuple[int, Tuple[int, ...]]] = None
    explored = 0
    for tail in product((0, 1), repeat=2 * meta.n - 1):
        code = (head,) + tail
        explored += 1
        candidate = _weak_candidate_from_code(meta.n, code)
        evaluation = evaluate(instance, checker.order(early_set(meta, candidate), meta.ell))
        if evaluation.tmax <= meta.ell and (best is None or (evaluation.num_tardy, code) < best):
            best = (evaluation.num_tardy, code)
    if best is None:
        return None, None, explored
    return best[0], best[1], explored


def sweep_weak(
    instance: Instance,
    meta: Optional[WeakMeta] = None,
    budget: Optional[int] = None,
    workers: int = 1,
) -> SweepResult:
    """Does any candidate's canonical schedule reach 2n tardy jobs within the bound?"""
    meta = meta or instance.meta
    cap = budget if budget is not None else DEFAULT_SETTINGS.budget_sweep
    size = 2 ** (2 * meta.n)
    if size > cap:
        raise BudgetExceededError("weak candidate sets", size, cap)

    best, code, explored = _merge(_run_slices(_weak_slice, instance, meta, (0, 1), workers))
    achievable = best is not None and best <= meta.k
    witness = extracted = None
    if achievable:
        witness = _weak_candidate_from_code(meta.n, code)
        extracted = weak_extract_subset(meta, witness)
    logger.info(f"Weak sweep: {explored} candidates, best tardy {best}, k={meta.k}")
    return SweepResult(explored, best, achievable, witness, extracted)


# ---------------------------------------------------------------------------
# Round trips
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RoundTrip:
    candidate: CandidateSet
    tmax: int
    num_tardy: int
    within_bound: bool
    extracted: Union[List[FrozenSet[int]], FrozenSet[int], InvalidEncoding]
    ok: bool


def roundtrip_strong(instance: Instance, meta: StrongMeta, groups: Sequence[Sequence[int]]) -> RoundTrip:
    candidate = strong_candidate_from_partition(meta, groups)
    evaluation = evaluate(instance, CanonicalChecker(instance).order(early_set(meta, candidate), meta.ell))
    extracted = strong_extract_partition(meta, candidate)
    within = evaluation.tmax <= meta.ell
    ok = within and evaluation.num_tardy == meta.k and extracted == [frozenset(group) for group in groups]
    return RoundTrip(candidate, evaluation.tmax, evaluation.num_tardy, within, extracted, ok)


def roundtrip_weak(instance: Instance, meta: WeakMeta, subset: Sequence[int]) -> RoundTrip:
    candidate = weak_candidate_from_subset(meta, set(subset))
    evaluation = evaluate(instance, CanonicalChecker(instance).order(early_set(meta, candidate), meta.ell))
    extracted = weak_extract_subset(meta, candidate)
    within = evaluation.tmax <= meta.ell
    ok = within and evaluation.num_tardy == meta.k and extracted == frozenset(subset)
    return RoundTrip(candidate, evaluation.tmax, evaluation.num_tardy, within, extracted, ok)
