#!/usr/bin/env python3
"""
End-to-end tests of the tardylab command line through click's CliRunner.

JSON goes to stdout and the rich summaries to stderr, so every test parses
result.stdout directly.
"""

import sys
import os
import json

import pytest
from click.testing import CliRunner

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from algorithms.source_problems import is_valid_three_partition
from core.cli import EXIT_BAD_INPUT, EXIT_BUDGET, EXIT_INFEASIBLE, EXIT_OK, EXIT_VERIFICATION, cli
from core.instance_io import solution_from_json, source_from_json

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")


def fixture(name: str) -> str:
    return os.path.join(FIXTURES, name)


def invoke(*args, input=None):
    return CliRunner().invoke(cli, list(args), input=input)


def reduced(tmp_path, kind: str, source: str) -> str:
    path = str(tmp_path / f"{kind}.json")
    result = invoke("reduce", "--kind", kind, "--input", source, "--output", path)
    assert result.exit_code == EXIT_OK, result.stderr
    return path


class TestGenSource:
    """Seeded source instances."""

    def test_planted_writes_sidecar(self, tmp_path):
        output = tmp_path / "source.json"
        result = invoke("gen-source", "--kind", "threepartition", "--n", "6", "--m", "2",
                        "--max-value", "6", "--planted", "--seed", "3", "--output", str(output))
        assert result.exit_code == EXIT_OK
        problem = source_from_json(output.read_text())
        groups = solution_from_json((tmp_path / "source.solution.json").read_text())
        assert is_valid_three_partition(problem.a, groups)

    def test_same_seed_same_output(self):
        args = ("gen-source", "--kind", "partition", "--n", "8", "--seed", "11")
        assert invoke(*args).stdout == invoke(*args).stdout

    def test_values_are_decimal_strings(self):
        result = invoke("gen-source", "--kind", "threepartition", "--n", "3", "--m", "1",
                        "--min-value", "1", "--max-value", "1")
        payload = json.loads(result.stdout)
        assert payload == {"kind": "threepartition", "a": ["1", "1", "1"], "m": "1"}

    def test_impossible_request(self):
        result = invoke("gen-source", "--kind", "threepartition", "--n", "2", "--m", "3")
        assert result.exit_code == EXIT_BAD_INPUT


class TestReduce:
    """Gadget construction from files."""

    def test_strong_smallest(self, tmp_path):
        source = tmp_path / "one_group.json"
        source.write_text('{"kind": "threepartition", "a": ["1", "1", "1"], "m": "1"}')
        result = invoke("reduce", "--kind", "strong", "--input", str(source))
        assert result.exit_code == EXIT_OK
        payload = json.loads(result.stdout)
        assert len(payload["jobs"]) == 21
        assert payload["variant"]["kind"] == "ConstraintDecision"
        assert payload["variant"]["k"] == "6"
        assert payload["meta"]["kind"] == "strong3p"

    def test_strong_divisibility(self, tmp_path):
        source = tmp_path / "bad.json"
        source.write_text('{"kind": "threepartition", "a": ["1", "1", "1"], "m": "2"}')
        assert invoke("reduce", "--kind", "strong", "--input", str(source)).exit_code == EXIT_BAD_INPUT

    def test_weak(self):
        result = invoke("reduce", "--kind", "weak", "--input", fixture("partition_yes.json"))
        payload = json.loads(result.stdout)
        assert len(payload["jobs"]) == 120
        assert payload["variant"]["kind"] == "LexUThenTmax"

    def test_weak_constant_override(self):
        result = invoke("reduce", "--kind", "weak", "--input", fixture("partition_yes.json"),
                        "--weak-constants", "5,25,2400,4800")
        assert len(json.loads(result.stdout)["jobs"]) == 24

    def test_lexgadget(self):
        result = invoke("reduce", "--kind", "lexgadget", "--input", fixture("three_jobs.json"), "--ell", "3")
        payload = json.loads(result.stdout)
        assert payload["jobs"][-1] == {"id": "3", "p": "7", "d": "11", "tag": "GadgetStar"}

    def test_lexgadget_bound_too_large(self):
        result = invoke("reduce", "--kind", "lexgadget", "--input", fixture("three_jobs.json"), "--ell", "7")
        assert result.exit_code == EXIT_BAD_INPUT

    def test_apriori_needs_weight(self):
        result = invoke("reduce", "--kind", "apriori", "--input", fixture("three_jobs.json"))
        assert result.exit_code == EXIT_BAD_INPUT


class TestSolve:
    """Exact solvers through the command line."""

    def test_instance_variant(self):
        result = invoke("solve", "--input", fixture("three_jobs.json"))
        assert result.exit_code == EXIT_OK
        payload = json.loads(result.stdout)
        assert payload["variant"] == "LexUThenTmax"
        assert payload["objective"] == ["1", "3"]

    def test_tmax_first_and_brute_force(self):
        fast = json.loads(invoke("solve", "--input", fixture("three_jobs.json"), "--variant", "lex-tu").stdout)
        brute = json.loads(invoke("solve", "--input", fixture("three_jobs.json"), "--variant", "brute").stdout)
        assert fast["objective"] == ["2", "2"]
        assert brute["objective"] == ["1", "3"]

    def test_loose_constraint_gives_moore_count(self):
        result = invoke("solve", "--input", fixture("three_jobs.json"), "--variant", "constraint", "--ell", "7")
        assert json.loads(result.stdout)["num_tardy"] == "1"

    def test_infeasible_constraint(self):
        result = invoke("solve", "--input", fixture("three_jobs.json"), "--variant", "constraint", "--ell", "1")
        assert result.exit_code == EXIT_INFEASIBLE
        assert json.loads(result.stdout)["status"] == "Infeasible"

    def test_decision_no(self):
        result = invoke("solve", "--input", fixture("three_jobs.json"), "--variant", "decision",
                        "--ell", "1", "--k", "3")
        assert result.exit_code == EXIT_INFEASIBLE
        assert json.loads(result.stdout)["answer"] is False

    def test_weighted(self):
        result = invoke("solve", "--input", fixture("three_jobs.json"), "--variant", "weighted",
                        "--w1", "1", "--w2", "1")
        assert json.loads(result.stdout)["objective"] == ["4"]

    def test_missing_parameter(self):
        result = invoke("solve", "--input", fixture("three_jobs.json"), "--variant", "weighted", "--w1", "1")
        assert result.exit_code == EXIT_BAD_INPUT

    def test_budget(self):
        result = invoke("solve", "--input", fixture("three_jobs.json"), "--variant", "constraint",
                        "--ell", "7", "--budget-subsets", "2")
        assert result.exit_code == EXIT_BUDGET
        assert json.loads(result.stdout)["status"] == "BudgetExceeded"

    def test_pareto(self):
        result = invoke("solve", "--input", fixture("three_jobs.json"), "--variant", "pareto")
        points = json.loads(result.stdout)["points"]
        assert [(p["tmax"], p["num_tardy"]) for p in points] == [("3", "1"), ("2", "2")]

    def test_stdin(self):
        with open(fixture("three_jobs.json")) as handle:
            text = handle.read()
        result = invoke("solve", "--variant", "lex-tu", input=text)
        assert json.loads(result.stdout)["tmax"] == "2"

    def test_malformed_input(self):
        result = invoke("solve", input='{"jobs": [{"id": "0", "p": 1.5, "d": "1"}]}')
        assert result.exit_code == EXIT_BAD_INPUT


class TestVerify:
    """Verification suites against gadget instances."""

    def test_identities(self, tmp_path):
        path = reduced(tmp_path, "strong", fixture("threepartition_yes.json"))
        result = invoke("verify", "--input", path, "--suite", "identities")
        assert result.exit_code == EXIT_OK
        assert json.loads(result.stdout)["passed"] is True

    def test_lemmas(self, tmp_path):
        path = reduced(tmp_path, "strong", fixture("threepartition_yes.json"))
        result = invoke("verify", "--input", path, "--suite", "lemmas", "--samples", "40", "--seed", "5")
        payload = json.loads(result.stdout)
        assert result.exit_code == EXIT_OK
        assert payload["checked_candidates"] == "40"

    def test_sweep_no_instance(self, tmp_path):
        path = reduced(tmp_path, "weak", fixture("partition_no.json"))
        result = invoke("verify", "--input", path, "--suite", "sweep")
        assert result.exit_code == EXIT_OK
        assert json.loads(result.stdout)["sweep"]["achievable"] is False

    def test_sweep_yes_instance(self, tmp_path):
        path = reduced(tmp_path, "strong", fixture("threepartition_yes.json"))
        result = invoke("verify", "--input", path, "--suite", "sweep")
        sweep = json.loads(result.stdout)["sweep"]
        assert result.exit_code == EXIT_OK
        assert sweep["achievable"] is True
        assert sweep["best_tardy"] == "16"

    def test_roundtrip_with_planted_solution(self, tmp_path):
        source = tmp_path / "planted.json"
        invoke("gen-source", "--kind", "threepartition", "--n", "4", "--m", "2", "--max-value", "6",
               "--planted", "--seed", "9", "--output", str(source))
        path = reduced(tmp_path, "strong", str(source))
        result = invoke("verify", "--input", path, "--suite", "roundtrip",
                        "--solution", str(tmp_path / "planted.solution.json"))
        assert result.exit_code == EXIT_OK
        assert json.loads(result.stdout)["roundtrip"]["ok"] is True

    def test_roundtrip_without_solution_is_skipped(self, tmp_path):
        path = reduced(tmp_path, "weak", fixture("partition_no.json"))
        result = invoke("verify", "--input", path, "--suite", "roundtrip")
        payload = json.loads(result.stdout)
        assert result.exit_code == EXIT_OK
        assert payload["skipped"] == "1"
        assert "roundtrip" not in payload

    def test_corrupted_instance_fails(self, tmp_path):
        path = reduced(tmp_path, "strong", fixture("threepartition_yes.json"))
        with open(path) as handle:
            payload = json.load(handle)
        payload["jobs"][5]["d"] = str(int(payload["jobs"][5]["d"]) + 1)
        with open(path, "w") as handle:
            json.dump(payload, handle)
        result = invoke("verify", "--input", path, "--suite", "identities")
        assert result.exit_code == EXIT_VERIFICATION
        assert json.loads(result.stdout)["passed"] is False

    def test_plain_instance_is_rejected(self):
        result = invoke("verify", "--input", fixture("three_jobs.json"), "--suite", "identities")
        assert result.exit_code == EXIT_BAD_INPUT


class TestInspect:
    """Tabulated instances."""

    def test_edd_order(self):
        result = invoke("inspect", "--input", fixture("three_jobs.json"))
        assert result.exit_code == EXIT_OK
        assert "T_max: 2" in result.stdout
        assert "EDD order" in result.stdout

    def test_result_schedule(self, tmp_path):
        output = tmp_path / "result.json"
        invoke("solve", "--input", fixture("three_jobs.json"), "--output", str(output))
        result = invoke("inspect", "--input", fixture("three_jobs.json"), "--schedule", str(output))
        assert "T_max: 3" in result.stdout
        assert "tardy: 1" in result.stdout


class TestManifest:
    """Run manifests record what produced an artifact."""

    def test_gen_source_manifest(self, tmp_path):
        manifest = tmp_path / "run.json"
        output = tmp_path / "source.json"
        result = invoke("--manifest", str(manifest), "gen-source", "--kind", "partition", "--n", "5",
                        "--seed", "7", "--output", str(output))
        assert result.exit_code == EXIT_OK
        data = json.loads(manifest.read_text())
        assert data["argv"][1:] == ["--manifest", str(manifest), "gen-source", "--kind", "partition", "--n", "5",
                                    "--seed", "7", "--output", str(output)]
        assert data["seed"] == "7"
        assert data["prng"] == "MT19937"
        assert data["parameters"]["n"] == "5"
        assert data["outputs"] == [str(output)]
        assert data["exit_code"] == 0

    def test_failed_run_records_exit_code(self, tmp_path):
        manifest = tmp_path / "run.json"
        invoke("--manifest", str(manifest), "solve", "--input", fixture("three_jobs.json"),
               "--variant", "constraint", "--ell", "7", "--budget-subsets", "2")
        data = json.loads(manifest.read_text())
        assert data["exit_code"] == EXIT_BUDGET
        assert data["budgets"]["subsets"] == "2"


@pytest.mark.parametrize("command", ["gen-source", "reduce", "solve", "verify", "inspect"])
def test_help(command):
    result = invoke(command, "--help")
    assert result.exit_code == 0
    assert "Usage" in result.stdout
