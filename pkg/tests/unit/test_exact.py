#!/usr/bin/env python3
"""
Unit tests for the exact solvers: every variant against the permutation oracle.
"""

import sys
import os

import pytest

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from algorithms.classic import edd_schedule, moore_hodgson
from algorithms.exact import (
    SolveStatus,
    brute_force_permutations,
    decision_constraint,
    maximum_early_sets,
    pareto_front,
    solve_constraint,
    solve_lex_tmax_then_u,
    solve_lex_u_then_tmax,
    solve_variant,
    solve_weighted_sum,
)
from core.errors import BudgetExceededError, PreconditionError
from core.sched_core import Instance, Job, Variant, evaluate
from tests.oracles import all_outcomes, corpus


def three_jobs() -> Instance:
    return Instance([Job(0, 2, 2), Job(1, 3, 4), Job(2, 2, 5)])


class TestBruteForce:
    """The permutation oracle itself."""

    def test_single_job(self):
        result = brute_force_permutations(Instance([Job(4, 3, 1)]), Variant.lex_tmax_then_u())
        assert list(result.schedule) == [4]
        assert result.objective == (2, 1)

    def test_three_jobs_tardy_count_first(self):
        """One tardy job at best; keeping 0 and 2 early leaves job 1 late by 3."""
        result = brute_force_permutations(three_jobs(), Variant.lex_u_then_tmax())
        assert (result.num_tardy, result.tmax) == (1, 3)

    def test_three_jobs_tmax_first(self):
        result = brute_force_permutations(three_jobs(), Variant.lex_tmax_then_u())
        assert result.objective == (2, 2)

    def test_budget(self):
        result = brute_force_permutations(three_jobs(), Variant.lex_tmax_then_u(), budget=5)
        assert result.status == SolveStatus.BUDGET_EXCEEDED

    def test_variant_without_objective(self):
        with pytest.raises(PreconditionError):
            brute_force_permutations(three_jobs(), Variant())


class TestConstraint:
    """Fewest tardy jobs under a T_max bound."""

    def test_loose_bound_gives_moore_count(self):
        instance = three_jobs()
        result = solve_constraint(instance, instance.total_proc)
        assert result.is_optimal
        assert result.num_tardy == moore_hodgson(instance)[1]

    def test_everything_early(self):
        result = solve_constraint(Instance([Job(0, 1, 5), Job(1, 2, 5)]), 0)
        assert (result.num_tardy, result.tmax) == (0, 0)

    def test_bound_below_edd_is_infeasible(self):
        result = solve_constraint(three_jobs(), 1)
        assert result.status == SolveStatus.INFEASIBLE

    def test_matches_brute_force(self):
        for instance in corpus(seed=31, count=120):
            outcomes = all_outcomes(instance)
            for ell in (0, 2, 5, 10):
                admissible = [tardy for tmax, tardy, _ in outcomes if tmax <= ell]
                result = solve_constraint(instance, ell)
                if admissible:
                    assert result.is_optimal
                    assert result.num_tardy == min(admissible)
                    assert result.tmax <= ell
                else:
                    assert result.status == SolveStatus.INFEASIBLE

    def test_parallel_workers_agree(self):
        for instance in corpus(seed=32, count=5):
            _, ell = edd_schedule(instance)
            assert solve_constraint(instance, ell, workers=2).num_tardy == solve_constraint(instance, ell).num_tardy

    def test_budget_exceeded(self):
        assert solve_constraint(three_jobs(), 10, budget=4).status == SolveStatus.BUDGET_EXCEEDED


class TestDecision:
    """Is there a schedule with T_max <= ell and at most k tardy jobs?"""

    def test_all_tardy_allowed(self):
        instance = three_jobs()
        assert decision_constraint(instance, instance.total_proc, instance.n)

    def test_matches_brute_force(self):
        for instance in corpus(seed=33, count=80):
            outcomes = all_outcomes(instance)
            for ell in (0, 3, 8):
                for k in range(instance.n + 1):
                    expected = any(tmax <= ell and tardy <= k for tmax, tardy, _ in outcomes)
                    assert decision_constraint(instance, ell, k) == expected

    def test_monotone_in_both_bounds(self):
        for instance in corpus(seed=34, count=40):
            for ell in range(0, 8):
                for k in range(instance.n):
                    if decision_constraint(instance, ell, k):
                        assert decision_constraint(instance, ell + 1, k)
                        assert decision_constraint(instance, ell, k + 1)

    def test_budget_raises(self):
        with pytest.raises(BudgetExceededError):
            decision_constraint(three_jobs(), 3, 1, budget=2)


class TestLexicographic:
    """Both lexicographic orders."""

    def test_single_job(self):
        result = solve_lex_tmax_then_u(Instance([Job(0, 4, 1)]))
        assert result.objective == (3, 1)

    def test_all_early(self):
        result = solve_lex_u_then_tmax(Instance([Job(0, 1, 3), Job(1, 1, 3)]))
        assert (result.num_tardy, result.tmax) == (0, 0)

    def test_tmax_first_matches_brute_force(self):
        for instance in corpus(seed=35, count=150):
            expected = brute_force_permutations(instance, Variant.lex_tmax_then_u())
            assert solve_lex_tmax_then_u(instance).objective == expected.objective

    def test_tardy_first_matches_brute_force(self):
        for instance in corpus(seed=36, count=150):
            expected = brute_force_permutations(instance, Variant.lex_u_then_tmax())
            result = solve_lex_u_then_tmax(instance)
            assert result.objective == expected.objective
            assert (result.num_tardy, result.tmax) == expected.objective

    def test_maximum_early_sets_are_exactly_the_largest(self):
        """Every enumerated set has the maximum size and can be early; every such set is enumerated."""
        for instance in corpus(seed=37, count=60):
            _, tardy = moore_hodgson(instance)
            target = instance.n - tardy
            found = set(maximum_early_sets(instance, target))
            feasible = {kept for _, _, kept in all_outcomes(instance)}
            expected = set()
            for kept in feasible:
                if len(kept) == target:
                    expected.add(kept)
            assert found == expected

    def test_budget_counts_search_nodes_not_subsets(self):
        """Thirty jobs that all fit: 2^30 exceeds the subset cap, the pruned search does not."""
        instance = Instance([Job(i, 1, 100) for i in range(30)])
        assert solve_constraint(instance, 0).status == SolveStatus.BUDGET_EXCEEDED
        result = solve_lex_u_then_tmax(instance)
        assert result.is_optimal
        assert (result.num_tardy, result.tmax) == (0, 0)
        assert solve_lex_u_then_tmax(instance, budget=10).status == SolveStatus.BUDGET_EXCEEDED

    def test_search_budget(self):
        instance = Instance([Job(i, 1, 10) for i in range(6)])
        with pytest.raises(BudgetExceededError):
            list(maximum_early_sets(instance, 6, budget=3))
        assert solve_lex_u_then_tmax(instance, budget=3).status == SolveStatus.BUDGET_EXCEEDED


class TestWeightedSum:
    """w1 * T_max + w2 * tardy count."""

    def test_pure_tmax(self):
        instance = three_jobs()
        result = solve_weighted_sum(instance, 3, 0)
        assert result.objective == 3 * edd_schedule(instance)[1]

    @pytest.mark.parametrize("weights", [(1, 1), (2, 3), (1, 5), (0, 1)])
    def test_matches_brute_force(self, weights):
        w1, w2 = weights
        for instance in corpus(seed=38 + w1 + 10 * w2, count=80):
            expected = brute_force_permutations(instance, Variant.weighted_sum(w1, w2))
            result = solve_weighted_sum(instance, w1, w2)
            assert result.objective == expected.objective
            evaluation = evaluate(instance, result.schedule)
            assert w1 * evaluation.tmax + w2 * evaluation.num_tardy == result.objective

    def test_negative_weight(self):
        with pytest.raises(PreconditionError):
            solve_weighted_sum(three_jobs(), -1, 1)


class TestParetoFront:
    """Non-dominated (T_max, tardy count) pairs."""

    def test_front_against_brute_force(self):
        for instance in corpus(seed=39, count=80):
            outcomes = all_outcomes(instance)
            pairs = {(tmax, tardy) for tmax, tardy, _ in outcomes}
            expected = sorted(
                (tmax, tardy)
                for tmax, tardy in pairs
                if not any(t2 <= tmax and u2 <= tardy and (t2, u2) != (tmax, tardy) for t2, u2 in pairs)
            )
            front = pareto_front(instance)
            assert sorted((point.tmax, point.num_tardy) for point in front) == expected
            for point in front:
                evaluation = evaluate(instance, point.schedule)
                assert (evaluation.tmax, evaluation.num_tardy) == (point.tmax, point.num_tardy)

    def test_endpoints(self):
        instance = three_jobs()
        front = pareto_front(instance)
        assert front[0].num_tardy == moore_hodgson(instance)[1]
        assert front[-1].tmax == edd_schedule(instance)[1]


class TestDispatch:
    """solve_variant follows the instance's variant."""

    def test_dispatch(self):
        instance = three_jobs()
        assert solve_variant(instance, Variant.constraint_opt(2)).num_tardy == 2
        assert solve_variant(instance, Variant.lex_u_then_tmax()).objective == (1, 3)
        assert solve_variant(instance, Variant.weighted_sum(1, 1)).objective == 4

    def test_no_variant(self):
        with pytest.raises(PreconditionError):
            solve_variant(three_jobs(), Variant())


class TestOracleAgreement:
    """Every solver against one permutation enumeration, on instances of up to eight jobs."""

    def test_all_solvers_against_permutations(self):
        checked = 0
        for instance in corpus(seed=40, count=500, max_n=8):
            pairs = {(tmax, tardy) for tmax, tardy, _ in all_outcomes(instance)}
            best_tmax = min(tmax for tmax, _ in pairs)
            best_tardy = min(tardy for _, tardy in pairs)

            assert edd_schedule(instance)[1] == best_tmax
            assert moore_hodgson(instance)[1] == best_tardy
            assert solve_lex_tmax_then_u(instance).objective == (
                best_tmax,
                min(tardy for tmax, tardy in pairs if tmax == best_tmax),
            )
            assert solve_lex_u_then_tmax(instance).objective == (
                best_tardy,
                min(tmax for tmax, tardy in pairs if tardy == best_tardy),
            )
            assert solve_weighted_sum(instance, 1, 1).objective == min(tmax + tardy for tmax, tardy in pairs)

            front = sorted((point.tmax, point.num_tardy) for point in pareto_front(instance))
            assert front == sorted(
                (tmax, tardy)
                for tmax, tardy in pairs
                if not any(t2 <= tmax and u2 <= tardy and (t2, u2) != (tmax, tardy) for t2, u2 in pairs)
            )

            for ell in (0, 3, 8):
                admissible = [tardy for tmax, tardy in pairs if tmax <= ell]
                result = solve_constraint(instance, ell)
                if admissible:
                    assert result.num_tardy == min(admissible)
                else:
                    assert result.status == SolveStatus.INFEASIBLE
                for k in (0, 2, 4):
                    expected = any(tardy <= k for tardy in admissible)
                    assert decision_constraint(instance, ell, k) == expected
            checked += 1
        assert checked == 500
