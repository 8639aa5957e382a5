#!/usr/bin/env python3
"""
Integration tests for the 3-Partition gadget: construction, closed-form
identities, the worked four-element schedule, the backward map and the
exact solvers on the smallest gadget.
"""

import sys
import os
import random
from dataclasses import replace

import pytest

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from algorithms.classic import canonical_schedule
from algorithms.exact import decision_constraint, solve_constraint
from algorithms.lemma_lab import check_strong_identities, roundtrip_strong, sweep_strong
from algorithms.reductions import (
    Choice,
    EncodingViolation,
    InvalidEncoding,
    StrongCandidate,
    early_set,
    gen_strong,
    strong_candidate_from_partition,
    strong_extract_partition,
)
from algorithms.source_problems import SourceKind, generate_source, solve_three_partition
from core.errors import DivisibilityError, PreconditionError
from core.sched_core import Instance, JobTag, TagKind, evaluate

WORKED_ORDER = [
    "FillerZero", "NumberStar(1,1)", "FillerFirst(1)", "NegNumberStar(2,1)", "FillerFirst(2)",
    "NegNumberStar(3,1)", "FillerFirst(3)", "NumberStar(4,1)", "FillerFirst(4)", "DelimiterStar(1)",
    "NegNumberStar(1,1)", "Number(1,1)", "NegNumber(2,1)", "NumberStar(2,1)", "NegNumber(3,1)",
    "NumberStar(3,1)", "NegNumberStar(4,1)", "Number(4,1)", "Delimiter(1)",
    "NegNumber(1,1)", "NumberStar(1,2)", "NumberStar(2,2)", "Number(2,1)", "NumberStar(3,2)",
    "Number(3,1)", "NegNumber(4,1)", "NumberStar(4,2)", "DelimiterStar(2)",
    "NegNumberStar(1,2)", "Number(1,2)", "NegNumberStar(2,2)", "Number(2,2)", "NegNumberStar(3,2)",
    "Number(3,2)", "NegNumberStar(4,2)", "Number(4,2)", "Delimiter(2)",
    "NegNumber(1,2)", "FillerLast(1)", "NegNumber(2,2)", "FillerLast(2)", "NegNumber(3,2)",
    "FillerLast(3)", "NegNumber(4,2)", "FillerLast(4)",
]


def random_source(rng: random.Random):
    m = rng.randint(1, 3)
    n = rng.randint(max(m, 2), 7)
    a = [rng.randint(1, 9) for _ in range(n)]
    a[-1] += (-sum(a)) % m
    return a, m


class TestConstruction:
    """Job counts, constants and closed-form rows."""

    def test_smallest_gadget(self):
        instance, meta = gen_strong([1, 1, 1], 1)
        assert instance.n == 21
        assert meta.t == 3
        assert meta.alpha == 270
        assert meta.k == 6
        assert instance.variant.k == 6
        assert instance.variant.ell == meta.ell

    def test_job_count_formula(self):
        """1 + m(4n + 2) + 2n jobs."""
        instance, _ = gen_strong([1, 1, 2, 2], 2)
        assert instance.n == 1 + 2 * (4 * 4 + 2) + 2 * 4 == 45

    def test_m_must_divide_the_sum(self):
        with pytest.raises(DivisibilityError):
            gen_strong([1, 1, 1], 2)

    def test_strict_mode(self):
        with pytest.raises(PreconditionError):
            gen_strong([1, 1, 2, 2], 2, strict=True)
        instance, meta = gen_strong([4, 5, 6], 1, strict=True)
        assert meta.strict
        assert instance.n == 21

    def test_rejects_nonpositive_values(self):
        with pytest.raises(PreconditionError):
            gen_strong([0, 3], 1)

    def test_filler_and_star_rows_share_due_dates(self):
        instance, meta = gen_strong([1, 1, 2, 2], 2)
        for i in range(1, meta.n + 1):
            filler = instance.job(meta.id_of(TagKind.FILLER_FIRST, i))
            star = instance.job(meta.id_of(TagKind.NUMBER_STAR, i, 1))
            assert filler.due == star.due

    def test_first_filler_and_periods(self):
        instance, meta = gen_strong([1, 1, 2, 2], 2)
        first = instance.job(meta.id_of(TagKind.FILLER_ZERO))
        assert first.proc == first.due == meta.m * meta.t * meta.alpha
        for j in range(meta.m + 1):
            assert meta.period_end_at(j) == j * meta.delta

    def test_total_volume_ends_the_last_period(self):
        """All jobs together fill exactly Delta_m plus both filler rows."""
        instance, meta = gen_strong([1, 1, 2, 2], 2)
        assert instance.total_proc == meta.period_end_at(meta.m) + 2 * meta.n * meta.alpha ** 3


class TestIdentities:
    """Closed-form identities hold for arbitrary sources and catch corrupted instances."""

    def test_random_sources(self):
        rng = random.Random(101)
        for _ in range(50):
            a, m = random_source(rng)
            instance, meta = gen_strong(a, m)
            report = check_strong_identities(instance, meta)
            assert report.empty, report.identity_failures[:3]

    def test_corrupted_due_date_is_reported(self):
        instance, meta = gen_strong([1, 1, 2, 2], 2)
        target = meta.id_of(TagKind.NUMBER, 2, 1)
        jobs = [replace(job, due=job.due + 1) if job.id == target else job for job in instance.jobs]
        report = check_strong_identities(Instance(jobs, instance.variant, meta), meta)
        assert not report.empty
        assert any("Number(2,1)" in failure.observation for failure in report.identity_failures)


class TestWorkedSchedule:
    """The canonical schedule of the partition {1,4}, {2,3} of (1,1,2,2)."""

    def setup_method(self):
        self.instance, self.meta = gen_strong([1, 1, 2, 2], 2)
        self.candidate = strong_candidate_from_partition(self.meta, [{1, 4}, {2, 3}])

    def test_order(self):
        schedule = canonical_schedule(self.instance, early_set(self.meta, self.candidate), self.meta.ell)
        expected = [self.meta.job_index[JobTag.parse(text)] for text in WORKED_ORDER]
        assert list(schedule) == expected

    def test_feasible_with_k_tardy(self):
        schedule = canonical_schedule(self.instance, early_set(self.meta, self.candidate), self.meta.ell)
        evaluation = evaluate(self.instance, schedule)
        assert evaluation.tmax <= self.meta.ell
        assert evaluation.num_tardy == self.meta.k == 16

    def test_roundtrip(self):
        trip = roundtrip_strong(self.instance, self.meta, [[1, 4], [2, 3]])
        assert trip.ok
        assert trip.extracted == [frozenset({1, 4}), frozenset({2, 3})]


class TestBackwardMap:
    """Candidate encodings back to partitions."""

    def setup_method(self):
        _, self.meta = gen_strong([1, 1, 2, 2], 2)

    def test_valid_partition(self):
        candidate = strong_candidate_from_partition(self.meta, [[2, 4], [1, 3]])
        assert strong_extract_partition(self.meta, candidate) == [frozenset({2, 4}), frozenset({1, 3})]

    def test_chain_violation(self):
        candidate = strong_candidate_from_partition(self.meta, [[1, 4], [2, 3]])
        main = [list(row) for row in candidate.main]
        main[0][0] = Choice.NEG
        result = strong_extract_partition(self.meta, StrongCandidate(candidate.star, main))
        assert isinstance(result, InvalidEncoding)
        assert result.reason == EncodingViolation.CHAIN_VIOLATION

    def test_sum_violation(self):
        candidate = strong_candidate_from_partition(self.meta, [[1, 2], [3, 4]])
        result = strong_extract_partition(self.meta, candidate)
        assert result.reason == EncodingViolation.SUM_VIOLATION

    def test_shape_mismatch(self):
        row = (Choice.POS, Choice.POS)
        result = strong_extract_partition(self.meta, StrongCandidate([row] * 3, [row] * 3))
        assert result.reason == EncodingViolation.SHAPE_MISMATCH

    def test_group_count_is_checked(self):
        with pytest.raises(PreconditionError):
            strong_candidate_from_partition(self.meta, [[1, 2, 3, 4]])


class TestSmallestGadgetSolvers:
    """On (1,1,1) with one group the exact solvers and the gadget agree."""

    def setup_method(self):
        self.instance, self.meta = gen_strong([1, 1, 1], 1)

    @pytest.mark.parametrize("a", [(1, 1, 1), (1, 2, 3), (2, 2, 5), (4, 1, 1), (3, 3, 3)])
    def test_decision_at_k_and_below(self, a):
        """With one group every instance is a yes-instance: exactly k tardy jobs, never fewer."""
        instance, meta = gen_strong(a, 1)
        assert solve_three_partition(a, 1) is not None
        assert sweep_strong(instance, meta).achievable
        assert decision_constraint(instance, meta.ell, meta.k)
        assert not decision_constraint(instance, meta.ell, meta.k - 1)

    def test_constraint_optimum(self):
        result = solve_constraint(self.instance, self.meta.ell)
        assert result.is_optimal
        assert result.num_tardy == self.meta.k
        assert result.tmax <= self.meta.ell


class TestSeededSources:
    """Generated 3-Partition instances pushed through the gadget and back."""

    @pytest.mark.parametrize("n,m", [(3, 1), (4, 2), (5, 1), (5, 2), (6, 2), (6, 3), (8, 4)])
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_planted_roundtrip(self, n, m, seed):
        problem = generate_source(SourceKind.THREE_PARTITION, n, (1, 6), planted=True, seed=seed, m=m)
        instance, meta = gen_strong(problem.a, m)
        trip = roundtrip_strong(instance, meta, problem.solution)
        assert trip.within_bound
        assert trip.num_tardy == meta.k
        assert trip.ok

    def test_no_instances_have_no_candidate(self):
        """Unsolvable instances with every value at most t: no candidate reaches k within the bound."""
        found = []
        for seed in range(2000):
            problem = generate_source(SourceKind.THREE_PARTITION, 6, (1, 6), planted=False, seed=seed, m=2)
            if max(problem.a) <= problem.t and solve_three_partition(problem.a, 2) is None:
                found.append(problem.a)
            if len(found) == 5:
                break
        assert len(found) == 5
        for a in found:
            instance, meta = gen_strong(a, 2)
            sweep = sweep_strong(instance, meta)
            assert not sweep.achievable, a
            assert sweep.witness is None
