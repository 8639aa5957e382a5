"""
File formats: instances, source problems, solver results, verification
reports and run manifests.

Every integer is written as a decimal string so that gadget values far
beyond the 53-bit JSON number range survive a round trip; readers accept
decimal strings or JSON integers and reject floats.  A path of "-" means
standard input or output.
"""

from __future__ import annotations

import json
import os
import re
import sys
import logging
from dataclasses import asdict
from typing import Any, Dict, List, Literal, Optional, Sequence, Union

from pydantic import BaseModel, BeforeValidator, Field, PlainSerializer, ValidationError
from typing_extensions import Annotated

from algorithms.exact import OptResult, ParetoPoint
from algorithms.lemma_lab import DiscrepancyReport, RoundTrip, SweepResult
from algorithms.reductions import (
    AprioriMeta,
    Choice,
    InvalidEncoding,
    LexGadgetMeta,
    StrongCandidate,
    StrongMeta,
    WeakCandidate,
    WeakMeta,
)
from algorithms.source_problems import SourceKind, SourceProblem
from core.errors import FileFormatError, InstanceError
from core.sched_core import Instance, Job, JobTag, Schedule, Variant, VariantKind, validate_instance

logger = logging.getLogger(__name__)

_DECIMAL = re.compile(r"-?\d+")


def _parse_decimal(value: Any) -> int:
    if isinstance(value, bool):
        raise ValueError(f"expected a decimal integer, got boolean {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, str) and _DECIMAL.fullmatch(value.strip()):
        return int(value.strip())
    raise ValueError(f"expected a decimal integer string, got {value!r}")


DecimalInt = Annotated[int, BeforeValidator(_parse_decimal), PlainSerializer(str, return_type=str, when_used="json")]


class JobRecord(BaseModel):
    id: DecimalInt
    p: DecimalInt
    d: DecimalInt
    tag: str = "Plain"


class VariantRecord(BaseModel):
    kind: VariantKind = VariantKind.NONE
    ell: Optional[DecimalInt] = None
    k: Optional[DecimalInt] = None
    w1: Optional[DecimalInt] = None
    w2: Optional[DecimalInt] = None


class StrongMetaRecord(BaseModel):
    kind: Literal["strong3p"] = "strong3p"
    a: List[DecimalInt]
    m: DecimalInt
    t: DecimalInt
    alpha: DecimalInt
    delta: DecimalInt
    delta_star: List[DecimalInt]
    period_end: List[DecimalInt]
    half_period_end: List[DecimalInt]
    k: DecimalInt
    ell: DecimalInt
    job_index: Dict[str, DecimalInt]
    strict: bool = False


class WeakMetaRecord(BaseModel):
    kind: Literal["weakpart"] = "weakpart"
    a: List[DecimalInt]
    t: DecimalInt
    Z: DecimalInt
    Y: DecimalInt
    X: DecimalInt
    W: DecimalInt
    D1_star: DecimalInt
    filler_multiplicity: DecimalInt
    k: DecimalInt
    ell: DecimalInt
    job_index: Dict[str, DecimalInt]
    filler_ids: Dict[str, List[DecimalInt]]


class LexGadgetMetaRecord(BaseModel):
    kind: Literal["lexgadget"] = "lexgadget"
    ell: DecimalInt
    total_proc: DecimalInt
    star_id: DecimalInt
    k: Optional[DecimalInt] = None


class AprioriMetaRecord(BaseModel):
    kind: Literal["apriori"] = "apriori"
    weight: DecimalInt
    factor: DecimalInt


MetaRecord = Annotated[
    Union[StrongMetaRecord, WeakMetaRecord, LexGadgetMetaRecord, AprioriMetaRecord],
    Field(discriminator="kind"),
]


class InstanceRecord(BaseModel):
    jobs: List[JobRecord]
    variant: VariantRecord = Field(default_factory=VariantRecord)
    meta: Optional[MetaRecord] = None


def _meta_to_record(meta: Any) -> Optional[BaseModel]:
    if meta is None:
        return None
    if isinstance(meta, StrongMeta):
        return StrongMetaRecord(
            a=list(meta.a),
            m=meta.m,
            t=meta.t,
            alpha=meta.alpha,
            delta=meta.delta,
            delta_star=list(meta.delta_star),
            period_end=list(meta.period_end),
            half_period_end=list(meta.half_period_end),
            k=meta.k,
            ell=meta.ell,
            job_index={str(tag): job_id for tag, job_id in meta.job_index.items()},
            strict=meta.strict,
        )
    if isinstance(meta, WeakMeta):
        return WeakMetaRecord(
            a=list(meta.a),
            t=meta.t,
            Z=meta.Z,
            Y=meta.Y,
            X=meta.X,
            W=meta.W,
            D1_star=meta.D1_star,
            filler_multiplicity=meta.filler_multiplicity,
            k=meta.k,
            ell=meta.ell,
            job_index={str(tag): job_id for tag, job_id in meta.job_index.items()},
            filler_ids={str(i): list(ids) for i, ids in meta.filler_ids.items()},
        )
    if isinstance(meta, LexGadgetMeta):
        return LexGadgetMetaRecord(ell=meta.ell, total_proc=meta.total_proc, star_id=meta.star_id, k=meta.k)
    if isinstance(meta, AprioriMeta):
        return AprioriMetaRecord(weight=meta.weight, factor=meta.factor)
    raise FileFormatError(f"cannot serialize metadata of type {type(meta).__name__}")


def _meta_from_record(record: Optional[BaseModel]) -> Any:
    if record is None:
        return None
    if isinstance(record, StrongMetaRecord):
        return StrongMeta(
            a=tuple(record.a),
            m=record.m,
            t=record.t,
            alpha=record.alpha,
            delta=record.delta,
            delta_star=tuple(record.delta_star),
            period_end=tuple(record.period_end),
            half_period_end=tuple(record.half_period_end),
            k=record.k,
            ell=record.ell,
            job_index={JobTag.parse(text): job_id for text, job_id in record.job_index.items()},
            strict=record.strict,
        )
    if isinstance(record, WeakMetaRecord):
        return WeakMeta(
            a=tuple(record.a),
            t=record.t,
            Z=record.Z,
            Y=record.Y,
            X=record.X,
            W=record.W,
            D1_star=record.D1_star,
            filler_multiplicity=record.filler_multiplicity,
            k=record.k,
            ell=record.ell,
            job_index={JobTag.parse(text): job_id for text, job_id in record.job_index.items()},
            filler_ids={int(i): tuple(ids) for i, ids in record.filler_ids.items()},
        )
    if isinstance(record, LexGadgetMetaRecord):
        return LexGadgetMeta(ell=record.ell, total_proc=record.total_proc, star_id=record.star_id, k=record.k)
    return AprioriMeta(weight=record.weight, factor=record.factor)


def instance_to_json(instance: Instance) -> str:
    record = InstanceRecord(
        jobs=[JobRecord(id=job.id, p=job.proc, d=job.due, tag=str(job.tag)) for job in instance.jobs],
        variant=VariantRecord(**asdict(instance.variant)),
        meta=_meta_to_record(instance.meta),
    )
    return record.model_dump_json(indent=2, exclude_none=True) + "\n"


def instance_from_json(text: str) -> Instance:
    try:
        record = InstanceRecord.model_validate_json(text)
    except ValidationError as exc:
        raise FileFormatError(f"not a valid instance file: {exc}") from exc

    try:
        jobs = [Job(job.id, job.p, job.d, JobTag.parse(job.tag)) for job in record.jobs]
        variant = Variant(**record.variant.model_dump())
        instance = Instance(jobs, variant, _meta_from_record(record.meta))
    except InstanceError as exc:
        raise FileFormatError(f"not a valid instance file: {exc}") from exc
    report = validate_instance(instance)
    if not report.ok:
        raise FileFormatError("; ".join(f"{f.code}: {f.message}" for f in report.errors))
    for warning in report.warnings:
        logger.warning(f"{warning.code}: {warning.message}")
    return instance


# ---------------------------------------------------------------------------
# Source problems
# ---------------------------------------------------------------------------


class SourceRecord(BaseModel):
    kind: SourceKind
    a: List[DecimalInt]
    m: Optional[DecimalInt] = None


class SolutionRecord(BaseModel):
    kind: SourceKind
    groups: List[List[DecimalInt]]


def source_to_json(problem: SourceProblem) -> str:
    m = problem.m if problem.kind == SourceKind.THREE_PARTITION else None
    return SourceRecord(kind=problem.kind, a=problem.a, m=m).model_dump_json(indent=2, exclude_none=True) + "\n"


def solution_to_json(problem: SourceProblem) -> str:
    return SolutionRecord(kind=problem.kind, groups=problem.solution or []).model_dump_json(indent=2) + "\n"


def source_from_json(text: str) -> SourceProblem:
    try:
        record = SourceRecord.model_validate_json(text)
    except ValidationError as exc:
        raise FileFormatError(f"not a valid source file: {exc}") from exc
    m = record.m if record.m is not None else 2
    return SourceProblem(record.kind, list(record.a), m)


def solution_from_json(text: str) -> List[List[int]]:
    try:
        return SolutionRecord.model_validate_json(text).groups
    except ValidationError as exc:
        raise FileFormatError(f"not a valid solution file: {exc}") from exc


def solution_path_for(output: str) -> str:
    """Sidecar path holding a planted solution next to a source file."""
    root, _ = os.path.splitext(output)
    return f"{root}.solution.json"


# ---------------------------------------------------------------------------
# Candidates, results and reports
# ---------------------------------------------------------------------------


def candidate_to_dict(candidate: Union[StrongCandidate, WeakCandidate, None]) -> Optional[Dict[str, Any]]:
    if candidate is None:
        return None
    if isinstance(candidate, StrongCandidate):
        return {
            "star": [[choice.value for choice in row] for row in candidate.star],
            "main": [[choice.value for choice in row] for row in candidate.main],
        }
    return {"star": [c.value for c in candidate.star], "main": [c.value for c in candidate.main]}


def candidate_from_dict(data: Dict[str, Any]) -> Union[StrongCandidate, WeakCandidate]:
    star, main = data["star"], data["main"]
    if star and isinstance(star[0], list):
        return StrongCandidate(
            star=[[Choice(value) for value in row] for row in star],
            main=[[Choice(value) for value in row] for row in main],
        )
    return WeakCandidate(star=[Choice(value) for value in star], main=[Choice(value) for value in main])


def extracted_to_json(extracted: Any) -> Any:
    if extracted is None:
        return None
    if isinstance(extracted, InvalidEncoding):
        return {"invalid": extracted.reason.value, "detail": extracted.detail}
    if isinstance(extracted, frozenset):
        return [str(i) for i in sorted(extracted)]
    return [[str(i) for i in sorted(group)] for group in extracted]


class ResultRecord(BaseModel):
    variant: str
    status: str
    schedule: Optional[List[DecimalInt]] = None
    tmax: Optional[DecimalInt] = None
    num_tardy: Optional[DecimalInt] = None
    objective: Optional[List[DecimalInt]] = None
    explored: DecimalInt = 0
    early_set: List[DecimalInt] = Field(default_factory=list)
    answer: Optional[bool] = None


class ParetoPointRecord(BaseModel):
    tmax: DecimalInt
    num_tardy: DecimalInt
    schedule: List[DecimalInt]


class ParetoRecord(BaseModel):
    variant: str = "pareto"
    points: List[ParetoPointRecord]


def result_to_json(variant: str, result: OptResult) -> str:
    objective = result.objective
    if isinstance(objective, int):
        objective = [objective]
    record = ResultRecord(
        variant=variant,
        status=result.status.value,
        schedule=list(result.schedule) if result.schedule is not None else None,
        tmax=result.tmax,
        num_tardy=result.num_tardy,
        objective=list(objective) if objective is not None else None,
        explored=result.explored,
        early_set=sorted(result.early_set),
    )
    return record.model_dump_json(indent=2, exclude_none=True) + "\n"


def decision_to_json(answer: bool) -> str:
    return ResultRecord(variant="decision", status="Decided", answer=answer).model_dump_json(
        indent=2, exclude_none=True
    ) + "\n"


def pareto_to_json(points: Sequence[ParetoPoint]) -> str:
    record = ParetoRecord(
        points=[ParetoPointRecord(tmax=p.tmax, num_tardy=p.num_tardy, schedule=list(p.schedule)) for p in points]
    )
    return record.model_dump_json(indent=2) + "\n"


def schedule_from_result_json(text: str) -> Schedule:
    try:
        record = ResultRecord.model_validate_json(text)
    except ValidationError as exc:
        raise FileFormatError(f"not a valid result file: {exc}") from exc
    if record.schedule is None:
        raise FileFormatError(f"result with status {record.status} carries no schedule")
    return Schedule(record.schedule)


def report_to_json(suite: str, report: DiscrepancyReport, **sections: Any) -> str:
    payload: Dict[str, Any] = {
        "suite": suite,
        "passed": report.empty,
        "checked_candidates": str(report.checked_candidates),
        "checked_jobs": str(report.checked_jobs),
        "skipped": str(report.skipped),
        "identity_failures": [
            {"observation": f.observation, "j": str(f.j), "lhs": str(f.lhs), "rhs": str(f.rhs)}
            for f in report.identity_failures
        ],
        "mismatches": [
            {
                "job_id": decimal(mismatch.job_id),
                "subject": mismatch.subject,
                "predicted": mismatch.predicted,
                "actual": mismatch.actual,
                "rule": mismatch.rule,
            }
            for mismatch in report.mismatches
        ],
    }
    payload.update({name: value for name, value in sections.items() if value is not None})
    return json.dumps(payload, indent=2) + "\n"


def sweep_to_dict(sweep: SweepResult) -> Dict[str, Any]:
    return {
        "explored": str(sweep.explored),
        "best_tardy": decimal(sweep.best_tardy),
        "achievable": sweep.achievable,
        "witness": candidate_to_dict(sweep.witness),
        "extracted": extracted_to_json(sweep.extracted),
    }


def roundtrip_to_dict(trip: RoundTrip) -> Dict[str, Any]:
    return {
        "candidate": candidate_to_dict(trip.candidate),
        "tmax": str(trip.tmax),
        "num_tardy": str(trip.num_tardy),
        "within_bound": trip.within_bound,
        "extracted": extracted_to_json(trip.extracted),
        "ok": trip.ok,
    }


def decimal(value: Optional[int]) -> Optional[str]:
    return None if value is None else str(value)


class RunManifest(BaseModel):
    """What produced an artifact: argv, parsed parameters, seed, budgets, paths and timing."""

    argv: List[str] = Field(default_factory=list)
    parameters: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[str] = None
    prng: Optional[str] = None
    budgets: Dict[str, str] = Field(default_factory=dict)
    inputs: List[str] = Field(default_factory=list)
    outputs: List[str] = Field(default_factory=list)
    wall_time_seconds: float = 0.0
    exit_code: int = 0
    summary: Dict[str, Any] = Field(default_factory=dict)

    def save(self, path: str) -> None:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w") as handle:
            handle.write(self.model_dump_json(indent=2) + "\n")


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------


def read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r") as handle:
            return handle.read()
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc


def write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w") as handle:
        handle.write(text)


def read_instance(path: str) -> Instance:
    return instance_from_json(read_text(path))


def write_instance(path: str, instance: Instance) -> None:
    write_text(path, instance_to_json(instance))
