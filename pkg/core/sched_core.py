"""
Domain model for single-machine scheduling with two criteria.

Jobs carry a processing time, a due date and a structural tag naming the role
they play inside a reduction gadget.  A schedule is a permutation of job ids;
evaluating it yields completion times, tardiness, the maximum tardiness and
the number of tardy jobs.  All arithmetic uses Python integers, so gadget
values far beyond 64 bits are exact.
"""

from __future__ import annotations

import re
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple

from core.errors import InstanceError, PermutationError

logger = logging.getLogger(__name__)


class TagKind(str, Enum):
    PLAIN = "Plain"
    NUMBER_STAR = "NumberStar"
    NEG_NUMBER_STAR = "NegNumberStar"
    NUMBER = "Number"
    NEG_NUMBER = "NegNumber"
    DELIMITER_STAR = "DelimiterStar"
    DELIMITER = "Delimiter"
    FILLER_ZERO = "FillerZero"
    FILLER_FIRST = "FillerFirst"
    FILLER_LAST = "FillerLast"
    WEAK_STAR = "WeakStar"
    WEAK_NEG_STAR = "WeakNegStar"
    WEAK_MAIN = "WeakMain"
    WEAK_NEG_MAIN = "WeakNegMain"
    WEAK_FILLER = "WeakFiller"
    GADGET_STAR = "GadgetStar"


_TAG_ARITY = {
    TagKind.PLAIN: 0,
    TagKind.NUMBER_STAR: 2,
    TagKind.NEG_NUMBER_STAR: 2,
    TagKind.NUMBER: 2,
    TagKind.NEG_NUMBER: 2,
    TagKind.DELIMITER_STAR: 1,
    TagKind.DELIMITER: 1,
    TagKind.FILLER_ZERO: 0,
    TagKind.FILLER_FIRST: 1,
    TagKind.FILLER_LAST: 1,
    TagKind.WEAK_STAR: 1,
    TagKind.WEAK_NEG_STAR: 1,
    TagKind.WEAK_MAIN: 1,
    TagKind.WEAK_NEG_MAIN: 1,
    TagKind.WEAK_FILLER: 1,
    TagKind.GADGET_STAR: 0,
}

_TAG_PATTERN = re.compile(r"^([A-Za-z]+)(?:\((\d+)(?:,(\d+))?\))?$")


@dataclass(frozen=True)
class JobTag:
    """Structural role of a job; indices are 1-based."""

    kind: TagKind
    i: Optional[int] = None
    j: Optional[int] = None

    def __post_init__(self):
        given = sum(index is not None for index in (self.i, self.j))
        if given != _TAG_ARITY[self.kind] or (self.i is None and self.j is not None):
            raise InstanceError(f"tag {self.kind.value} takes {_TAG_ARITY[self.kind]} indices")

    def __str__(self) -> str:
        if self.i is None:
            return self.kind.value
        if self.j is None:
            return f"{self.kind.value}({self.i})"
        return f"{self.kind.value}({self.i},{self.j})"

    @classmethod
    def parse(cls, text: str) -> "JobTag":
        match = _TAG_PATTERN.match(text.replace(" ", ""))
        if not match:
            raise InstanceError(f"unreadable tag: {text!r}")
        name, first, second = match.groups()
        try:
            kind = TagKind(name)
        except ValueError:
            raise InstanceError(f"unknown tag kind: {name!r}") from None
        return cls(
            kind,
            int(first) if first is not None else None,
            int(second) if second is not None else None,
        )


PLAIN = JobTag(TagKind.PLAIN)


def _require_int(value: Any, what: str) -> None:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceError(f"{what} must be an integer, got {value!r}")


@dataclass(frozen=True)
class Job:
    id: int
    proc: int
    due: int
    tag: JobTag = PLAIN

    def __post_init__(self):
        _require_int(self.id, "job id")
        _require_int(self.proc, f"proc of job {self.id}")
        _require_int(self.due, f"due of job {self.id}")


class VariantKind(str, Enum):
    CONSTRAINT_DECISION = "ConstraintDecision"
    CONSTRAINT_OPT = "ConstraintOpt"
    LEX_TMAX_THEN_U = "LexTmaxThenU"
    LEX_U_THEN_TMAX = "LexUThenTmax"
    WEIGHTED_SUM = "WeightedSum"
    NONE = "None"


_VARIANT_PARAMETERS = {
    VariantKind.CONSTRAINT_DECISION: ("ell", "k"),
    VariantKind.CONSTRAINT_OPT: ("ell",),
    VariantKind.LEX_TMAX_THEN_U: (),
    VariantKind.LEX_U_THEN_TMAX: (),
    VariantKind.WEIGHTED_SUM: ("w1", "w2"),
    VariantKind.NONE: (),
}


@dataclass(frozen=True)
class Variant:
    """Which bicriteria question an instance poses, with its parameters.

    LexUThenTmax may carry reference values (ell, k) that a reduction
    guarantees for yes-instances; they are informational.
    """

    kind: VariantKind = VariantKind.NONE
    ell: Optional[int] = None
    k: Optional[int] = None
    w1: Optional[int] = None
    w2: Optional[int] = None

    @classmethod
    def constraint_decision(cls, ell: int, k: int) -> "Variant":
        return cls(VariantKind.CONSTRAINT_DECISION, ell=ell, k=k)

    @classmethod
    def constraint_opt(cls, ell: int) -> "Variant":
        return cls(VariantKind.CONSTRAINT_OPT, ell=ell)

    @classmethod
    def lex_tmax_then_u(cls) -> "Variant":
        return cls(VariantKind.LEX_TMAX_THEN_U)

    @classmethod
    def lex_u_then_tmax(cls, ell: Optional[int] = None, k: Optional[int] = None) -> "Variant":
        return cls(VariantKind.LEX_U_THEN_TMAX, ell=ell, k=k)

    @classmethod
    def weighted_sum(cls, w1: int, w2: int) -> "Variant":
        return cls(VariantKind.WEIGHTED_SUM, w1=w1, w2=w2)

    def required_parameters(self) -> Tuple[str, ...]:
        return _VARIANT_PARAMETERS[self.kind]


@dataclass(frozen=True)
class Instance:
    jobs: Tuple[Job, ...]
    variant: Variant = field(default_factory=Variant)
    meta: Optional[Any] = None
    _by_id: Dict[int, Job] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))
        object.__setattr__(self, "_by_id", {job.id: job for job in self.jobs})

    @property
    def n(self) -> int:
        return len(self.jobs)

    @property
    def ids(self) -> List[int]:
        return [job.id for job in self.jobs]

    @property
    def total_proc(self) -> int:
        return sum(job.proc for job in self.jobs)

    def job(self, job_id: int) -> Job:
        try:
            return self._by_id[job_id]
        except KeyError:
            raise InstanceError(f"no job with id {job_id}") from None

    def has_job(self, job_id: int) -> bool:
        return job_id in self._by_id

    def with_variant(self, variant: Variant) -> "Instance":
        return replace(self, variant=variant)

    def with_meta(self, meta: Any) -> "Instance":
        return replace(self, meta=meta)


@dataclass(frozen=True)
class Schedule:
    order: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))

    def __iter__(self) -> Iterator[int]:
        return iter(self.order)

    def __len__(self) -> int:
        return len(self.order)

    def position_of(self, job_id: int) -> int:
        return self.order.index(job_id)


@dataclass(frozen=True)
class Evaluation:
    completion: Dict[int, int]
    tardiness: Dict[int, int]
    tmax: int
    num_tardy: int
    tardy_set: FrozenSet[int]

    @property
    def early_set(self) -> FrozenSet[int]:
        return frozenset(job_id for job_id in self.completion if job_id not in self.tardy_set)

    def is_early(self, job_id: int) -> bool:
        return job_id not in self.tardy_set


def _check_permutation(instance: Instance, order: Iterable[int]) -> None:
    order = list(order)
    ids = instance.ids
    if len(order) != len(ids) or set(order) != set(ids) or len(set(order)) != len(order):
        missing = sorted(set(ids) - set(order))
        extra = sorted(set(order) - set(ids))
        raise PermutationError(
            f"schedule is not a permutation of the job ids (missing={missing}, unknown={extra}, "
            f"length={len(order)} vs {len(ids)})"
        )


def evaluate(instance: Instance, schedule: Schedule) -> Evaluation:
    """Completion times, tardiness, T_max and tardy count of a schedule."""
    _check_permutation(instance, schedule.order)

    completion: Dict[int, int] = {}
    tardiness: Dict[int, int] = {}
    tardy = set()
    clock = 0
    for job_id in schedule.order:
        job = instance.job(job_id)
        clock += job.proc
        completion[job_id] = clock
        late_by = clock - job.due
        tardiness[job_id] = late_by if late_by > 0 else 0
        if late_by > 0:
            tardy.add(job_id)

    return Evaluation(
        completion=completion,
        tardiness=tardiness,
        tmax=max(tardiness.values(), default=0),
        num_tardy=len(tardy),
        tardy_set=frozenset(tardy),
    )


def is_feasible_tmax(evaluation: Evaluation, ell: int) -> bool:
    return evaluation.tmax <= ell


def lateness_profile(instance: Instance, schedule: Schedule) -> List[Tuple[int, int, int]]:
    """(job id, completion, lateness) in processing order."""
    evaluation = evaluate(instance, schedule)
    return [
        (job_id, evaluation.completion[job_id], evaluation.completion[job_id] - instance.job(job_id).due)
        for job_id in schedule.order
    ]


class Severity(str, Enum):
    ERROR = "Error"
    WARNING = "Warning"


@dataclass(frozen=True)
class Finding:
    severity: Severity
    code: str
    message: str
    job_id: Optional[int] = None


@dataclass
class ValidationReport:
    findings: List[Finding] = field(default_factory=list)

    @property
    def errors(self) -> List[Finding]:
        return [f for f in self.findings if f.severity == Severity.ERROR]

    @property
    def warnings(self) -> List[Finding]:
        return [f for f in self.findings if f.severity == Severity.WARNING]

    @property
    def ok(self) -> bool:
        return not self.errors

    def codes(self) -> List[str]:
        return [f.code for f in self.findings]

    def add(self, severity: Severity, code: str, message: str, job_id: Optional[int] = None):
        self.findings.append(Finding(severity, code, message, job_id))


def validate_instance(instance: Instance) -> ValidationReport:
    report = ValidationReport()

    if not instance.jobs:
        report.add(Severity.ERROR, "EmptyInstance", "instance has no jobs")

    seen = set()
    for job in instance.jobs:
        if job.id < 0:
            report.add(Severity.ERROR, "NegativeValue", f"job id {job.id} is negative", job.id)
        if job.id in seen:
            report.add(Severity.ERROR, "DuplicateId", f"job id {job.id} occurs more than once", job.id)
        seen.add(job.id)
        if job.proc < 0:
            report.add(Severity.ERROR, "NegativeValue", f"job {job.id} has proc {job.proc}", job.id)
        if job.due < 0:
            report.add(Severity.ERROR, "NegativeValue", f"job {job.id} has due {job.due}", job.id)

    variant = instance.variant
    for name in variant.required_parameters():
        value = getattr(variant, name)
        if value is None:
            report.add(Severity.ERROR, "MissingVariantParameter", f"{variant.kind.value} needs {name}")
        elif name in ("ell", "k") and value < 0:
            report.add(Severity.ERROR, "NegativeValue", f"{name} = {value} is negative")
        elif name in ("w1", "w2") and value <= 0:
            report.add(Severity.ERROR, "NonPositiveWeight", f"{name} = {value} must be positive")

    if variant.kind == VariantKind.CONSTRAINT_DECISION and variant.k is not None and variant.k > instance.n:
        report.add(
            Severity.WARNING,
            "kExceedsJobCount",
            f"k = {variant.k} exceeds the {instance.n} jobs; the tardy-count bound is vacuous",
        )

    if report.findings:
        logger.debug(f"Validation produced {len(report.findings)} findings: {report.codes()}")
    return report
