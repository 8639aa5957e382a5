"""
tardylab command line.

Commands compose through files or pipes ("-" is stdin/stdout): gen-source
writes a Partition or 3-Partition instance, reduce turns it into a
scheduling instance, solve runs the exact solvers and verify runs the
mechanical checks against a gadget instance.  Human-readable summaries go
to stderr so that stdout stays machine-readable.

Exit codes: 0 ok, 2 bad input, 3 infeasible, 4 budget exceeded,
5 verification failure.
"""

import functools
import logging
import time
from dataclasses import dataclass, field
from typing import Any, List, Optional, Tuple

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from algorithms.classic import edd_schedule
from algorithms.exact import (
    SolveStatus,
    brute_force_permutations,
    decision_constraint,
    pareto_front,
    solve_variant,
)
from algorithms.lemma_lab import (
    DiscrepancyReport,
    Mismatch,
    RoundTrip,
    SweepResult,
    check_strong_identities,
    check_weak_identities,
    roundtrip_strong,
    roundtrip_weak,
    run_lemma_samples,
    sweep_strong,
    sweep_weak,
)
from algorithms.reductions import (
    InvalidEncoding,
    StrongMeta,
    WeakConstants,
    WeakMeta,
    gen_apriori_scaled,
    gen_lex_gadget,
    gen_strong,
    gen_weak,
)
from algorithms.source_problems import (
    SourceKind,
    generate_source,
    is_valid_partition,
    is_valid_three_partition,
    solve_partition,
    solve_three_partition,
)
from core.config import PRNG_ALGORITHM, LabSettings
from core.errors import BudgetExceededError, LabError, PreconditionError
from core.instance_io import (
    RunManifest,
    decision_to_json,
    pareto_to_json,
    read_instance,
    read_text,
    report_to_json,
    result_to_json,
    roundtrip_to_dict,
    schedule_from_result_json,
    solution_from_json,
    solution_path_for,
    solution_to_json,
    source_from_json,
    source_to_json,
    sweep_to_dict,
    write_instance,
    write_text,
)
from core.sched_core import Instance, Variant, VariantKind, evaluate, lateness_profile

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_BUDGET = 4
EXIT_VERIFICATION = 5

VARIANT_CHOICES = ["auto", "constraint", "lex-tu", "lex-ut", "weighted", "decision", "brute", "pareto"]
REDUCTION_CHOICES = ["strong", "weak", "lexgadget", "apriori"]
SUITE_CHOICES = ["identities", "lemmas", "sweep", "roundtrip"]
LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]

console = Console(stderr=True)


@dataclass
class LabContext:
    settings: LabSettings
    manifest_path: Optional[str] = None
    run: RunManifest = field(default_factory=RunManifest)

    def with_overrides(self, **overrides: Optional[int]) -> LabSettings:
        update = {name: value for name, value in overrides.items() if value is not None}
        return self.settings.model_copy(update=update)


def _configure_logging(level: int) -> None:
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


def _manifest_value(value: Any) -> Any:
    if isinstance(value, bool) or value is None:
        return value
    return str(value)


class LabGroup(click.Group):
    """Keeps the raw command-line arguments for the run manifest."""

    def parse_args(self, ctx: click.Context, args: List[str]) -> List[str]:
        ctx.meta["tardylab.argv"] = list(args)
        return super().parse_args(ctx, args)


def lab_command(function):
    """Map LabError onto exit codes, time the run and write the manifest."""

    @functools.wraps(function)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        lab: LabContext = ctx.obj
        started = time.perf_counter()
        try:
            code = function(lab, *args, **kwargs)
        except BudgetExceededError as exc:
            console.print(f"[red]Budget exceeded:[/red] {exc}")
            lab.run.summary["error"] = str(exc)
            code = EXIT_BUDGET
        except LabError as exc:
            console.print(f"[red]Error:[/red] {exc}")
            lab.run.summary["error"] = str(exc)
            code = EXIT_BAD_INPUT

        lab.run.argv = [ctx.find_root().info_name or "tardylab"] + ctx.meta.get("tardylab.argv", [])
        lab.run.parameters = {name: _manifest_value(value) for name, value in ctx.params.items()}
        lab.run.wall_time_seconds = round(time.perf_counter() - started, 3)
        lab.run.exit_code = code
        if lab.manifest_path:
            lab.run.save(lab.manifest_path)
            logger.info(f"Run manifest written to {lab.manifest_path}")
        ctx.exit(code)

    return wrapper


@click.group(cls=LabGroup)
@click.option("--log-level", type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None,
              help="Overrides TARDYLAB_LOG_LEVEL.")
@click.option("--manifest", "manifest_path", type=click.Path(dir_okay=False), default=None,
              help="Write a JSON run manifest (parameters, seed, budgets, paths, timing) here.")
@click.pass_context
def cli(ctx: click.Context, log_level: Optional[str], manifest_path: Optional[str]):
    """Bicriteria single-machine scheduling: T_max versus number of tardy jobs."""
    settings = LabSettings.from_env()
    if log_level:
        settings = settings.model_copy(update={"log_level": log_level.upper()})
    _configure_logging(settings.numeric_log_level())
    ctx.obj = LabContext(settings=settings, manifest_path=manifest_path)


# ---------------------------------------------------------------------------
# gen-source
# ---------------------------------------------------------------------------


@cli.command("gen-source")
@click.option("--kind", type=click.Choice([kind.value for kind in SourceKind]), required=True)
@click.option("--n", "n", type=click.IntRange(min=1), required=True, help="Number of values.")
@click.option("--m", "m", type=click.IntRange(min=1), default=2, show_default=True,
              help="Number of groups (threepartition only).")
@click.option("--min-value", type=int, default=1, show_default=True)
@click.option("--max-value", type=int, default=20, show_default=True)
@click.option("--planted/--no-planted", default=False, show_default=True,
              help="Build a solution first; it is written to <output>.solution.json.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", "-o", default="-", show_default=True)
@lab_command
def gen_source(lab: LabContext, kind, n, m, min_value, max_value, planted, seed, output) -> int:
    """Generate a seeded Partition or 3-Partition instance."""
    problem = generate_source(SourceKind(kind), n, (min_value, max_value), planted, seed, m)
    write_text(output, source_to_json(problem))
    outputs = [output]
    if problem.solution is not None:
        if output == "-":
            logger.warning("Planted solution not written: standard output has no sidecar path")
        else:
            sidecar = solution_path_for(output)
            write_text(sidecar, solution_to_json(problem))
            outputs.append(sidecar)

    lab.run.seed = str(seed)
    lab.run.prng = PRNG_ALGORITHM
    lab.run.outputs = outputs
    lab.run.summary.update({"kind": kind, "n": str(n), "m": str(problem.m), "t": str(problem.t)})
    console.print(f"[green]{kind}[/green] instance: n={n}, m={problem.m}, t={problem.t}, planted={planted}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# reduce
# ---------------------------------------------------------------------------


def _parse_weak_constants(text: Optional[str]) -> Optional[WeakConstants]:
    if text is None:
        return None
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != 4 or not all(part.lstrip("-").isdigit() for part in parts):
        raise PreconditionError(f"--weak-constants expects four integers Z,Y,X,W, got {text!r}")
    z, y, x, w = (int(part) for part in parts)
    return WeakConstants(Z=z, Y=y, X=x, W=w)


def _reduce_source(kind: str, input_path: str, strict: bool, weak_constants: Optional[str]) -> Instance:
    problem = source_from_json(read_text(input_path))
    if kind == "strong":
        instance, _ = gen_strong(problem.a, problem.m, strict=strict)
    else:
        instance, _ = gen_weak(problem.a, _parse_weak_constants(weak_constants))
    return instance


@cli.command("reduce")
@click.option("--kind", type=click.Choice(REDUCTION_CHOICES), required=True)
@click.option("--input", "-i", "input_path", default="-", show_default=True,
              help="Source file (strong, weak) or instance file (lexgadget, apriori).")
@click.option("--output", "-o", default="-", show_default=True)
@click.option("--strict-3partition", "strict", is_flag=True, help="Require n = 3m and t/4 < a_i < t/2.")
@click.option("--ell", type=int, default=None, help="T_max bound for lexgadget (default: the input's ell).")
@click.option("--weight", type=int, default=None, help="Tardy-count weight for apriori.")
@click.option("--weak-constants", default=None, help="Z,Y,X,W override for the weak gadget.")
@lab_command
def reduce_instance(lab: LabContext, kind, input_path, output, strict, ell, weight, weak_constants) -> int:
    """Build a scheduling instance from a source problem or another instance."""
    if kind in ("strong", "weak"):
        instance = _reduce_source(kind, input_path, strict, weak_constants)
    elif kind == "lexgadget":
        source = read_instance(input_path)
        ell = ell if ell is not None else source.variant.ell
        if ell is None:
            raise PreconditionError("lexgadget needs --ell (the input instance carries none)")
        instance = gen_lex_gadget(source, ell)
    else:
        if weight is None:
            raise PreconditionError("apriori needs --weight")
        instance = gen_apriori_scaled(read_instance(input_path), weight)

    write_instance(output, instance)
    lab.run.inputs = [input_path]
    lab.run.outputs = [output]

    variant = instance.variant
    meta = instance.meta
    bound = getattr(meta, "ell", None) if variant.ell is None else variant.ell
    k = getattr(meta, "k", None) if variant.k is None else variant.k
    lab.run.summary.update({
        "kind": kind,
        "jobs": str(instance.n),
        "variant": variant.kind.value,
        "ell": None if bound is None else str(bound),
        "k": None if k is None else str(k),
    })
    console.print(
        Panel(
            f"[bold]{kind}[/bold] instance with {instance.n} jobs\n"
            f"variant: {variant.kind.value}\n"
            f"ell: {bound if bound is not None else '-'}   k: {k if k is not None else '-'}",
            title="Reduction",
            border_style="blue",
        )
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def _resolve_variant(name: str, instance: Instance, ell, k, w1, w2) -> Variant:
    base = instance.variant
    ell = ell if ell is not None else base.ell
    k = k if k is not None else base.k
    w1 = w1 if w1 is not None else base.w1
    w2 = w2 if w2 is not None else base.w2

    def need(flag: str, value) -> None:
        if value is None:
            raise PreconditionError(f"--variant {name} needs --{flag}")

    if name == "constraint":
        need("ell", ell)
        return Variant.constraint_opt(ell)
    if name == "decision":
        need("ell", ell)
        need("k", k)
        return Variant.constraint_decision(ell, k)
    if name == "lex-tu":
        return Variant.lex_tmax_then_u()
    if name == "lex-ut":
        return Variant.lex_u_then_tmax(ell=base.ell, k=base.k)
    if name == "weighted":
        need("w1", w1)
        need("w2", w2)
        return Variant.weighted_sum(w1, w2)
    if base.kind == VariantKind.NONE:
        raise PreconditionError(f"--variant {name} needs an instance that names its variant")
    return base


def _status_exit(status: SolveStatus) -> int:
    return {
        SolveStatus.OPTIMAL: EXIT_OK,
        SolveStatus.INFEASIBLE: EXIT_INFEASIBLE,
        SolveStatus.BUDGET_EXCEEDED: EXIT_BUDGET,
    }[status]


@cli.command()
@click.option("--input", "-i", "input_path", default="-", show_default=True)
@click.option("--output", "-o", default="-", show_default=True)
@click.option("--variant", "variant_name", type=click.Choice(VARIANT_CHOICES), default="auto", show_default=True,
              help="auto solves the variant named in the instance; brute uses the permutation oracle.")
@click.option("--ell", type=int, default=None)
@click.option("--k", "k", type=int, default=None)
@click.option("--w1", type=int, default=None)
@click.option("--w2", type=int, default=None)
@click.option("--budget-subsets", type=click.IntRange(min=1), default=None)
@click.option("--budget-perms", type=click.IntRange(min=1), default=None)
@click.option("--workers", type=click.IntRange(min=1), default=None)
@lab_command
def solve(lab: LabContext, input_path, output, variant_name, ell, k, w1, w2,
          budget_subsets, budget_perms, workers) -> int:
    """Solve an instance exactly and write the result."""
    settings = lab.with_overrides(budget_subsets=budget_subsets, budget_perms=budget_perms, workers=workers)
    lab.run.budgets = {"subsets": str(settings.budget_subsets), "perms": str(settings.budget_perms)}
    lab.run.inputs = [input_path]
    lab.run.outputs = [output]
    instance = read_instance(input_path)

    if variant_name == "pareto":
        points = pareto_front(instance, budget=settings.budget_subsets)
        write_text(output, pareto_to_json(points))
        table = Table(title="Pareto front", show_header=True)
        table.add_column("T_max", style="cyan", justify="right")
        table.add_column("Tardy", style="magenta", justify="right")
        for point in points:
            table.add_row(str(point.tmax), str(point.num_tardy))
        console.print(table)
        lab.run.summary["points"] = str(len(points))
        return EXIT_OK

    variant = _resolve_variant(variant_name, instance, ell, k, w1, w2)
    if variant_name == "decision" or (variant_name == "auto" and variant.kind == VariantKind.CONSTRAINT_DECISION):
        answer = decision_constraint(instance, variant.ell, variant.k, budget=settings.budget_subsets)
        write_text(output, decision_to_json(answer))
        lab.run.summary["answer"] = answer
        verdict = "[green]yes[/green]" if answer else "[yellow]no[/yellow]"
        console.print(f"T_max <= {variant.ell} with at most {variant.k} tardy jobs: {verdict}")
        return EXIT_OK if answer else EXIT_INFEASIBLE

    if variant_name == "brute":
        result = brute_force_permutations(instance, variant, budget=settings.budget_perms)
    else:
        result = solve_variant(instance, variant, budget=settings.budget_subsets, workers=settings.workers)

    label = variant.kind.value if variant_name in ("auto", "brute") else variant_name
    write_text(output, result_to_json(label, result))
    lab.run.summary.update({
        "variant": label,
        "status": result.status.value,
        "tmax": None if result.tmax is None else str(result.tmax),
        "num_tardy": None if result.num_tardy is None else str(result.num_tardy),
    })
    console.print(
        Panel(
            f"status: [bold]{result.status.value}[/bold]\n"
            f"T_max: {result.tmax if result.tmax is not None else '-'}   "
            f"tardy: {result.num_tardy if result.num_tardy is not None else '-'}\n"
            f"objective: {result.objective if result.objective is not None else '-'}   "
            f"explored: {result.explored}",
            title=f"Solve ({label})",
            border_style="green" if result.is_optimal else "yellow",
        )
    )
    return _status_exit(result.status)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _extracted_is_valid(meta, extracted) -> bool:
    if isinstance(extracted, InvalidEncoding):
        return False
    if isinstance(meta, StrongMeta):
        return is_valid_three_partition(meta.a, [sorted(group) for group in extracted])
    return is_valid_partition(meta.a, sorted(extracted))


def _verify_sweep(instance: Instance, meta, settings: LabSettings) -> Tuple[DiscrepancyReport, SweepResult]:
    if isinstance(meta, StrongMeta):
        sweep = sweep_strong(instance, meta, budget=settings.budget_sweep, workers=settings.workers)
        solvable = solve_three_partition(meta.a, meta.m) is not None
    else:
        sweep = sweep_weak(instance, meta, budget=settings.budget_sweep, workers=settings.workers)
        solvable = solve_partition(meta.a) is not None

    report = DiscrepancyReport(checked_candidates=sweep.explored)
    if sweep.achievable != solvable:
        report.mismatches.append(
            Mismatch(None, "sweep", f"solvable={solvable}", f"achievable={sweep.achievable}", "exhaustive source solver")
        )
    if sweep.achievable and not _extracted_is_valid(meta, sweep.extracted):
        report.mismatches.append(
            Mismatch(None, "sweep witness", "valid solution", str(sweep.extracted), "backward map")
        )
    return report, sweep


def _source_solution(meta) -> Optional[List[List[int]]]:
    if isinstance(meta, StrongMeta):
        return solve_three_partition(meta.a, meta.m)
    subset = solve_partition(meta.a)
    return None if subset is None else [subset]


def _verify_roundtrip(instance: Instance, meta, solution_path: Optional[str]) -> Tuple[DiscrepancyReport, Optional[RoundTrip]]:
    groups = solution_from_json(read_text(solution_path)) if solution_path else _source_solution(meta)
    if not groups:
        logger.info("Source instance has no solution; nothing to round-trip")
        return DiscrepancyReport(skipped=1), None

    if isinstance(meta, StrongMeta):
        trip = roundtrip_strong(instance, meta, groups)
    else:
        trip = roundtrip_weak(instance, meta, groups[0])
    report = DiscrepancyReport(checked_candidates=1)
    if not trip.ok:
        report.mismatches.append(
            Mismatch(
                None,
                "roundtrip",
                f"T_max <= {meta.ell}, {meta.k} tardy, same solution back",
                f"T_max {trip.tmax}, {trip.num_tardy} tardy, extracted {trip.extracted}",
                "forward and backward maps",
            )
        )
    return report, trip


def _print_report(suite: str, report: DiscrepancyReport) -> None:
    style = "green" if report.empty else "red"
    console.print(
        Panel(
            f"checked candidates: {report.checked_candidates}   jobs: {report.checked_jobs}   "
            f"skipped: {report.skipped}\n"
            f"identity failures: {len(report.identity_failures)}   mismatches: {len(report.mismatches)}",
            title=f"Verify ({suite})",
            border_style=style,
        )
    )
    if report.empty:
        return
    table = Table(title="Discrepancies", show_header=True)
    table.add_column("Check", style="cyan")
    table.add_column("Expected", style="white")
    table.add_column("Actual", style="red")
    for failure in report.identity_failures[:20]:
        table.add_row(f"{failure.observation} (j={failure.j})", str(failure.rhs), str(failure.lhs))
    for mismatch in report.mismatches[:20]:
        subject = mismatch.subject if mismatch.job_id is None else f"job {mismatch.job_id} {mismatch.subject}"
        table.add_row(subject, mismatch.predicted, mismatch.actual)
    console.print(table)


@cli.command()
@click.option("--input", "-i", "input_path", default="-", show_default=True, help="Gadget instance file.")
@click.option("--output", "-o", default="-", show_default=True, help="Report file.")
@click.option("--suite", type=click.Choice(SUITE_CHOICES), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--samples", type=click.IntRange(min=0), default=1000, show_default=True)
@click.option("--solution", "solution_path", default=None,
              help="Solution sidecar for roundtrip (default: solve the source exhaustively).")
@click.option("--budget-sweep", type=click.IntRange(min=1), default=None)
@click.option("--workers", type=click.IntRange(min=1), default=None)
@lab_command
def verify(lab: LabContext, input_path, output, suite, seed, samples, solution_path, budget_sweep, workers) -> int:
    """Check a gadget instance against its predicted structure."""
    settings = lab.with_overrides(budget_sweep=budget_sweep, workers=workers)
    lab.run.budgets = {"sweep": str(settings.budget_sweep)}
    lab.run.inputs = [input_path] + ([solution_path] if solution_path else [])
    lab.run.outputs = [output]
    instance = read_instance(input_path)
    meta = instance.meta
    if not isinstance(meta, (StrongMeta, WeakMeta)):
        raise PreconditionError("verification needs a strong or weak gadget instance carrying its meta")

    sections = {}
    if suite == "identities":
        if isinstance(meta, StrongMeta):
            report = check_strong_identities(instance, meta)
        else:
            report = check_weak_identities(instance, meta)
    elif suite == "lemmas":
        lab.run.seed = str(seed)
        lab.run.prng = PRNG_ALGORITHM
        report = run_lemma_samples(instance, samples, seed)
    elif suite == "sweep":
        report, sweep = _verify_sweep(instance, meta, settings)
        sections["sweep"] = sweep_to_dict(sweep)
        lab.run.summary["achievable"] = sweep.achievable
    else:
        report, trip = _verify_roundtrip(instance, meta, solution_path)
        sections["roundtrip"] = roundtrip_to_dict(trip) if trip is not None else None

    write_text(output, report_to_json(suite, report, **sections))
    lab.run.summary.update({
        "suite": suite,
        "passed": report.empty,
        "checked_candidates": str(report.checked_candidates),
        "discrepancies": str(len(report.mismatches) + len(report.identity_failures)),
    })
    _print_report(suite, report)
    return EXIT_OK if report.empty else EXIT_VERIFICATION


# ---------------------------------------------------------------------------
# inspect
# ---------------------------------------------------------------------------


@cli.command("inspect")
@click.option("--input", "-i", "input_path", default="-", show_default=True)
@click.option("--schedule", "schedule_path", default=None,
              help="Result file whose schedule to show (default: EDD order).")
@click.option("--limit", type=click.IntRange(min=1), default=50, show_default=True, help="Rows to print.")
@lab_command
def inspect_instance(lab: LabContext, input_path, schedule_path, limit) -> int:
    """Tabulate an instance and the completion times of a schedule."""
    instance = read_instance(input_path)
    if schedule_path:
        schedule = schedule_from_result_json(read_text(schedule_path))
        source = schedule_path
    else:
        schedule, _ = edd_schedule(instance)
        source = "EDD order"
    evaluation = evaluate(instance, schedule)
    lab.run.inputs = [input_path] + ([schedule_path] if schedule_path else [])

    output = Console()
    meta_kind = type(instance.meta).__name__ if instance.meta is not None else "none"
    output.print(
        Panel(
            f"jobs: {instance.n}   total processing: {instance.total_proc}\n"
            f"variant: {instance.variant.kind.value}   meta: {meta_kind}\n"
            f"schedule: {source}\n"
            f"T_max: {evaluation.tmax}   tardy: {evaluation.num_tardy}",
            title="Instance",
            border_style="blue",
        )
    )

    table = Table(show_header=True)
    table.add_column("#", style="dim", justify="right")
    table.add_column("Job", style="cyan", justify="right")
    table.add_column("Tag", style="white")
    table.add_column("p", justify="right")
    table.add_column("d", justify="right")
    table.add_column("C", justify="right")
    table.add_column("Lateness", justify="right")
    for position, (job_id, completion, lateness) in enumerate(lateness_profile(instance, schedule)[:limit], 1):
        job = instance.job(job_id)
        style = "red" if lateness > 0 else None
        table.add_row(
            str(position), str(job_id), str(job.tag), str(job.proc), str(job.due), str(completion), str(lateness),
            style=style,
        )
    output.print(table)
    if instance.n > limit:
        output.print(f"[dim]... {instance.n - limit} more jobs[/dim]")

    lab.run.summary.update({"tmax": str(evaluation.tmax), "num_tardy": str(evaluation.num_tardy)})
    return EXIT_OK
