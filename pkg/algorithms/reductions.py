"""
Reduction gadgets and their solution mappings.

- Strong gadget: a 3-Partition instance (a, m) becomes a constraint instance
  "T_max <= ell, at most k tardy jobs" whose yes-answers correspond to
  partitions into m groups of sum t.
- Weak gadget: a Partition instance becomes a Lex(tardy count, T_max)
  instance whose optimum has 2n tardy jobs and T_max <= ell iff a subset
  sums to t.
- Lex gadget: one appended job turns a constraint instance into a
  Lex(T_max, tardy count) instance with the same answer plus one tardy job.
- A-priori scaling: multiplying every time by 2n*weight makes the weighted
  sum T_max + weight * tardy behave lexicographically.

Every index i (element of a) and j (period) is 1-based.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Collection, Dict, FrozenSet, List, Optional, Sequence, Set, Tuple, Union

from core.errors import DivisibilityError, ParityError, PreconditionError
from core.sched_core import Instance, Job, JobTag, Schedule, TagKind, Variant

logger = logging.getLogger(__name__)


class Choice(str, Enum):
    POS = "Pos"
    NEG = "Neg"

    @classmethod
    def of(cls, flag: bool) -> "Choice":
        return cls.POS if flag else cls.NEG


class EncodingViolation(str, Enum):
    SHAPE_MISMATCH = "ShapeMismatch"
    CHAIN_VIOLATION = "ChainViolation"
    SUM_VIOLATION = "SumViolation"
    STAR_MAIN_MISMATCH = "StarMainMismatch"


@dataclass(frozen=True)
class InvalidEncoding:
    reason: EncodingViolation
    detail: str


# ---------------------------------------------------------------------------
# Strong gadget
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StrongMeta:
    a: Tuple[int, ...]
    m: int
    t: int
    alpha: int
    delta: int
    delta_star: Tuple[int, ...]  # delta*_1 .. delta*_m
    period_end: Tuple[int, ...]  # Delta_0 .. Delta_m
    half_period_end: Tuple[int, ...]  # Delta*_1 .. Delta*_m
    k: int
    ell: int
    job_index: Dict[JobTag, int]
    strict: bool = False

    @property
    def n(self) -> int:
        return len(self.a)

    def delta_star_at(self, j: int) -> int:
        """delta*_j; also defined at j = m + 1 by the same closed form."""
        alpha, t, m = self.alpha, self.t, self.m
        return 2 * self.n * alpha ** 3 + alpha ** 2 + (2 * m - 2 * j + 1) * t * alpha + (m - j) * t

    def period_end_at(self, j: int) -> int:
        return self.period_end[j]

    def half_period_end_at(self, j: int) -> int:
        """Delta*_j for 1 <= j <= m + 1, with Delta*_{m+1} = Delta_m + delta*_{m+1}."""
        if j == self.m + 1:
            return self.period_end[self.m] + self.delta_star_at(j)
        return self.half_period_end[j - 1]

    def id_of(self, kind: TagKind, i: Optional[int] = None, j: Optional[int] = None) -> int:
        return self.job_index[JobTag(kind, i, j)]


def _strong_tags(n: int, m: int) -> List[JobTag]:
    tags = [JobTag(TagKind.FILLER_ZERO)]
    for j in range(1, m + 1):
        for i in range(1, n + 1):
            tags.append(JobTag(TagKind.NUMBER_STAR, i, j))
            tags.append(JobTag(TagKind.NEG_NUMBER_STAR, i, j))
        tags.append(JobTag(TagKind.DELIMITER_STAR, j))
        for i in range(1, n + 1):
            tags.append(JobTag(TagKind.NUMBER, i, j))
            tags.append(JobTag(TagKind.NEG_NUMBER, i, j))
        tags.append(JobTag(TagKind.DELIMITER, j))
    for i in range(1, n + 1):
        tags.append(JobTag(TagKind.FILLER_FIRST, i))
        tags.append(JobTag(TagKind.FILLER_LAST, i))
    return tags


def table_one_row(meta: StrongMeta, tag: JobTag) -> Tuple[int, int]:
    """(processing time, due date) of a strong-gadget job from the closed forms."""
    alpha, t, m = meta.alpha, meta.t, meta.m
    cube = alpha ** 3
    square = alpha ** 2
    tenth = square // 10
    i, j = tag.i, tag.j
    kind = tag.kind

    if kind == TagKind.NUMBER_STAR:
        return cube, meta.period_end_at(j - 1) + 2 * i * cube + tenth
    if kind == TagKind.NEG_NUMBER_STAR:
        return cube + meta.a[i - 1], meta.period_end_at(j - 1) + (2 * i - 1) * cube + tenth
    if kind == TagKind.DELIMITER_STAR:
        return square + (m - i) * t * alpha, meta.half_period_end_at(i)
    if kind == TagKind.NUMBER:
        return cube + meta.a[i - 1] * alpha, meta.half_period_end_at(j) + 2 * i * cube + tenth
    if kind == TagKind.NEG_NUMBER:
        return cube, meta.half_period_end_at(j) + (2 * i - 1) * cube + tenth
    if kind == TagKind.DELIMITER:
        return square + i * t * alpha, meta.period_end_at(i)
    if kind == TagKind.FILLER_ZERO:
        return m * t * alpha, m * t * alpha
    if kind == TagKind.FILLER_FIRST:
        return cube, 2 * i * cube + tenth
    if kind == TagKind.FILLER_LAST:
        return cube, meta.period_end_at(m) + 2 * i * cube + tenth
    raise PreconditionError(f"tag {tag} does not belong to the strong gadget")


def _check_strict_three_partition(a: Sequence[int], m: int, t: int) -> None:
    if len(a) != 3 * m:
        raise PreconditionError(f"strict 3-Partition needs n = 3m, got n={len(a)}, m={m}")
    outside = [value for value in a if not (t < 4 * value and 2 * value < t)]
    if outside:
        raise PreconditionError(f"strict 3-Partition needs t/4 < a_i < t/2 (t={t}); offending values {outside}")


def gen_strong(a: Sequence[int], m: int, strict: bool = False) -> Tuple[Instance, StrongMeta]:
    """Constraint-decision instance encoding the 3-Partition instance (a, m)."""
    a = tuple(a)
    if not a:
        raise PreconditionError("a must be nonempty")
    if m < 1:
        raise PreconditionError(f"m must be positive, got {m}")
    if any(value < 1 for value in a):
        raise PreconditionError("every a_i must be at least 1")
    if sum(a) % m:
        raise DivisibilityError(f"m = {m} does not divide sum(a) = {sum(a)}")

    n = len(a)
    t = sum(a) // m
    if strict:
        _check_strict_three_partition(a, m, t)
    if n * n <= 2 * n + m + 1:
        logger.warning(f"n={n}, m={m}: construction margins are too small for the candidate-set analysis")

    alpha = 10 * n * n * t
    assert alpha % 10 == 0
    cube, square = alpha ** 3, alpha ** 2
    delta = 4 * n * cube + 2 * square + (2 * m + 1) * t * alpha + m * t
    delta_star = tuple(
        2 * n * cube + square + (2 * m - 2 * j + 1) * t * alpha + (m - j) * t for j in range(1, m + 1)
    )
    period_end = [0]
    half_period_end = []
    for j in range(1, m + 1):
        half_period_end.append(period_end[j - 1] + delta_star[j - 1])
        period_end.append(period_end[j - 1] + delta)

    tags = _strong_tags(n, m)
    meta = StrongMeta(
        a=a,
        m=m,
        t=t,
        alpha=alpha,
        delta=delta,
        delta_star=delta_star,
        period_end=tuple(period_end),
        half_period_end=tuple(half_period_end),
        k=2 * m * n,
        ell=2 * n * cube + square + square // 10,
        job_index={tag: job_id for job_id, tag in enumerate(tags)},
        strict=strict,
    )

    jobs = []
    for job_id, tag in enumerate(tags):
        proc, due = table_one_row(meta, tag)
        jobs.append(Job(job_id, proc, due, tag))

    instance = Instance(jobs, Variant.constraint_decision(meta.ell, meta.k), meta)
    logger.info(f"Strong gadget: n={n}, m={m}, t={t}, {len(jobs)} jobs, k={meta.k}")
    return instance, meta


@dataclass(frozen=True)
class StrongCandidate:
    """star[i-1][j-1] is Pos when J*_{i,j} is chosen, main[i-1][j-1] when J_{i,j} is."""

    star: Tuple[Tuple[Choice, ...], ...]
    main: Tuple[Tuple[Choice, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "star", tuple(tuple(row) for row in self.star))
        object.__setattr__(self, "main", tuple(tuple(row) for row in self.main))

    @property
    def n(self) -> int:
        return len(self.star)

    @property
    def m(self) -> int:
        return len(self.star[0]) if self.star else 0

    def star_at(self, i: int, j: int) -> Choice:
        return self.star[i - 1][j - 1]

    def main_at(self, i: int, j: int) -> Choice:
        return self.main[i - 1][j - 1]


def strong_candidate_from_partition(meta: StrongMeta, groups: Sequence[Collection[int]]) -> StrongCandidate:
    """Pos at (i, j) exactly when i lies in groups 1..j."""
    if len(groups) != meta.m:
        raise PreconditionError(f"expected {meta.m} groups, got {len(groups)}")
    for group in groups:
        for index in group:
            if not 1 <= index <= meta.n:
                raise IndexError(f"index {index} outside [1, {meta.n}]")

    covered: Set[int] = set()
    columns = []
    for group in groups:
        covered |= set(group)
        columns.append(frozenset(covered))
    rows = tuple(
        tuple(Choice.of(i in columns[j - 1]) for j in range(1, meta.m + 1)) for i in range(1, meta.n + 1)
    )
    return StrongCandidate(star=rows, main=rows)


def strong_extract_partition(
    meta: StrongMeta, candidate: StrongCandidate
) -> Union[List[FrozenSet[int]], InvalidEncoding]:
    """Groups (I*_1, I*_2 - I*_1, ...) when the encoding is a valid solution."""
    if candidate.n != meta.n or candidate.m != meta.m or any(len(row) != meta.m for row in candidate.main):
        return InvalidEncoding(EncodingViolation.SHAPE_MISMATCH, f"expected an {meta.n}x{meta.m} encoding")

    indices = range(1, meta.n + 1)
    star_sets = [
        frozenset(i for i in indices if candidate.star_at(i, j) == Choice.POS) for j in range(1, meta.m + 1)
    ]
    main_sets = [
        frozenset(i for i in indices if candidate.main_at(i, j) == Choice.POS) for j in range(1, meta.m + 1)
    ]

    for j in range(1, meta.m + 1):
        if not star_sets[j - 1] <= main_sets[j - 1]:
            return InvalidEncoding(EncodingViolation.CHAIN_VIOLATION, f"I*_{j} is not contained in I_{j}")
        if j < meta.m and not main_sets[j - 1] <= star_sets[j]:
            return InvalidEncoding(EncodingViolation.CHAIN_VIOLATION, f"I_{j} is not contained in I*_{j + 1}")

    for j in range(1, meta.m + 1):
        total = sum(meta.a[i - 1] for i in star_sets[j - 1])
        if total != j * meta.t:
            return InvalidEncoding(
                EncodingViolation.SUM_VIOLATION, f"sum over I*_{j} is {total}, expected {j * meta.t}"
            )

    groups = [star_sets[0]]
    for j in range(1, meta.m):
        groups.append(star_sets[j] - star_sets[j - 1])
    return groups


def strong_early_set(meta: StrongMeta, candidate: StrongCandidate) -> Set[int]:
    early = set()
    for tag, job_id in meta.job_index.items():
        kind = tag.kind
        if kind == TagKind.NUMBER_STAR:
            chosen = candidate.star_at(tag.i, tag.j) == Choice.POS
        elif kind == TagKind.NEG_NUMBER_STAR:
            chosen = candidate.star_at(tag.i, tag.j) == Choice.NEG
        elif kind == TagKind.NUMBER:
            chosen = candidate.main_at(tag.i, tag.j) == Choice.POS
        elif kind == TagKind.NEG_NUMBER:
            chosen = candidate.main_at(tag.i, tag.j) == Choice.NEG
        else:
            chosen = True
        if chosen:
            early.add(job_id)
    return early


# ---------------------------------------------------------------------------
# Weak gadget
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeakConstants:
    Z: int
    Y: int
    X: int
    W: int

    @classmethod
    def default(cls, n: int, t: int) -> "WeakConstants":
        Z = 2 * t + 1
        Y = (2 * t + 1) * Z
        X = n * 2 ** (n + 2) * Y
        return cls(Z=Z, Y=Y, X=X, W=2 * n * n * X)

    def validate(self) -> None:
        if min(self.Z, self.Y, self.X, self.W) <= 0:
            raise PreconditionError("weak constants must be positive")
        if self.X % 2:
            raise PreconditionError(f"X = {self.X} must be even")
        if self.W % self.X:
            raise PreconditionError(f"X = {self.X} must divide W = {self.W}")


@dataclass(frozen=True)
class WeakMeta:
    a: Tuple[int, ...]
    t: int
    Z: int
    Y: int
    X: int
    W: int
    D1_star: int
    filler_multiplicity: int
    k: int
    ell: int
    job_index: Dict[JobTag, int]
    filler_ids: Dict[int, Tuple[int, ...]]

    @property
    def n(self) -> int:
        return len(self.a)

    def prefix_x(self, i: int) -> int:
        """sum of i0 * X for i0 = 1..i"""
        return self.X * i * (i + 1) // 2

    def prefix_y(self, i: int) -> int:
        """sum of 2^i0 * Y for i0 = 1..i"""
        return self.Y * (2 ** (i + 1) - 2)

    def id_of(self, kind: TagKind, i: int) -> int:
        return self.job_index[JobTag(kind, i)]


def table_two_row(meta: WeakMeta, tag: JobTag) -> Tuple[int, int]:
    """(processing time, due date) of a weak-gadget job from the closed forms."""
    i = tag.i
    W, X, Y, Z, t = meta.W, meta.X, meta.Y, meta.Z, meta.t
    kind = tag.kind
    if kind == TagKind.WEAK_STAR:
        return i * X, i * W + meta.prefix_x(i) + t
    if kind == TagKind.WEAK_NEG_STAR:
        return i * X + meta.a[i - 1], (i - 1) * W + meta.prefix_x(i) + t
    if kind == TagKind.WEAK_FILLER:
        return X // 2, i * W + meta.prefix_x(i) + t
    if kind == TagKind.WEAK_MAIN:
        return (
            W + 2 ** i * Y + meta.a[i - 1] * Z,
            meta.D1_star + i * W + meta.prefix_x(i) + meta.prefix_y(i) + t * Z + t,
        )
    if kind == TagKind.WEAK_NEG_MAIN:
        return (
            W + 2 ** i * Y,
            meta.D1_star + i * W + meta.prefix_x(i - 1) + meta.prefix_y(i) + t * Z + t,
        )
    raise PreconditionError(f"tag {tag} does not belong to the weak gadget")


def gen_weak(a: Sequence[int], constants: Optional[WeakConstants] = None) -> Tuple[Instance, WeakMeta]:
    """Lex(tardy count, T_max) instance encoding the Partition instance a."""
    a = tuple(a)
    if not a:
        raise PreconditionError("a must be nonempty")
    if any(value < 1 for value in a):
        raise PreconditionError("every a_i must be at least 1")
    if sum(a) % 2:
        raise ParityError(f"sum(a) = {sum(a)} is odd")

    n = len(a)
    t = sum(a) // 2
    constants = constants or WeakConstants.default(n, t)
    constants.validate()
    W, X, Y, Z = constants.W, constants.X, constants.Y, constants.Z
    multiplicity = 2 * W // X

    layout: List[JobTag] = []
    filler_ids: Dict[int, List[int]] = {}
    job_index: Dict[JobTag, int] = {}
    for i in range(1, n + 1):
        for kind in (TagKind.WEAK_STAR, TagKind.WEAK_NEG_STAR):
            job_index[JobTag(kind, i)] = len(layout)
            layout.append(JobTag(kind, i))
        filler_ids[i] = []
        for _ in range(multiplicity):
            filler_ids[i].append(len(layout))
            layout.append(JobTag(TagKind.WEAK_FILLER, i))
        for kind in (TagKind.WEAK_MAIN, TagKind.WEAK_NEG_MAIN):
            job_index[JobTag(kind, i)] = len(layout)
            layout.append(JobTag(kind, i))

    sum_x = X * n * (n + 1) // 2
    sum_y = Y * (2 ** (n + 1) - 2)
    meta = WeakMeta(
        a=a,
        t=t,
        Z=Z,
        Y=Y,
        X=X,
        W=W,
        D1_star=n * W + sum_x + t,
        filler_multiplicity=multiplicity,
        k=2 * n,
        ell=n * W + sum_x + sum_y + t * Z + t,
        job_index=job_index,
        filler_ids={i: tuple(ids) for i, ids in filler_ids.items()},
    )

    jobs = []
    for job_id, tag in enumerate(layout):
        proc, due = table_two_row(meta, tag)
        jobs.append(Job(job_id, proc, due, tag))

    instance = Instance(jobs, Variant.lex_u_then_tmax(ell=meta.ell, k=meta.k), meta)
    logger.info(f"Weak gadget: n={n}, t={t}, {len(jobs)} jobs ({multiplicity} fillers per group)")
    return instance, meta


@dataclass(frozen=True)
class WeakCandidate:
    """star[i-1] is Pos when J*_i is chosen, main[i-1] when J_i is."""

    star: Tuple[Choice, ...]
    main: Tuple[Choice, ...]

    def __post_init__(self):
        object.__setattr__(self, "star", tuple(self.star))
        object.__setattr__(self, "main", tuple(self.main))

    @property
    def n(self) -> int:
        return len(self.star)

    def star_at(self, i: int) -> Choice:
        return self.star[i - 1]

    def main_at(self, i: int) -> Choice:
        return self.main[i - 1]


CandidateSet = Union[StrongCandidate, WeakCandidate]


def weak_candidate_from_subset(meta: WeakMeta, subset: Collection[int]) -> WeakCandidate:
    for index in subset:
        if not 1 <= index <= meta.n:
            raise IndexError(f"index {index} outside [1, {meta.n}]")
    row = tuple(Choice.of(i in subset) for i in range(1, meta.n + 1))
    return WeakCandidate(star=row, main=row)


def weak_extract_subset(meta: WeakMeta, candidate: WeakCandidate) -> Union[FrozenSet[int], InvalidEncoding]:
    if candidate.n != meta.n or len(candidate.main) != meta.n:
        return InvalidEncoding(EncodingViolation.SHAPE_MISMATCH, f"expected {meta.n} choices per side")

    star_side = frozenset(i for i in range(1, meta.n + 1) if candidate.star_at(i) == Choice.POS)
    main_side = frozenset(i for i in range(1, meta.n + 1) if candidate.main_at(i) == Choice.POS)
    if star_side != main_side:
        return InvalidEncoding(
            EncodingViolation.STAR_MAIN_MISMATCH, f"star side {sorted(star_side)} vs main side {sorted(main_side)}"
        )
    total = sum(meta.a[i - 1] for i in star_side)
    if total != meta.t:
        return InvalidEncoding(EncodingViolation.SUM_VIOLATION, f"subset sums to {total}, expected {meta.t}")
    return star_side


def weak_early_set(meta: WeakMeta, candidate: WeakCandidate) -> Set[int]:
    early = {job_id for ids in meta.filler_ids.values() for job_id in ids}
    for i in range(1, meta.n + 1):
        star_pos = candidate.star_at(i) == Choice.POS
        main_pos = candidate.main_at(i) == Choice.POS
        early.add(meta.id_of(TagKind.WEAK_STAR if star_pos else TagKind.WEAK_NEG_STAR, i))
        early.add(meta.id_of(TagKind.WEAK_MAIN if main_pos else TagKind.WEAK_NEG_MAIN, i))
    return early


def early_set(meta: Union[StrongMeta, WeakMeta], candidate: CandidateSet) -> Set[int]:
    """Job ids a candidate asks to be early: its chosen pair jobs plus every filler and delimiter."""
    if isinstance(meta, StrongMeta):
        return strong_early_set(meta, candidate)
    return weak_early_set(meta, candidate)


def weak_phase_order(meta: WeakMeta, candidate: WeakCandidate) -> Schedule:
    """The canonical order of a weak candidate written out phase by phase."""
    order: List[int] = []
    n = meta.n
    for i in range(1, n + 1):
        star_pos = candidate.star_at(i) == Choice.POS
        order.append(meta.id_of(TagKind.WEAK_STAR if star_pos else TagKind.WEAK_NEG_STAR, i))
        order.extend(meta.filler_ids[i])

    for i in range(1, n + 1):
        chosen_main = meta.id_of(
            TagKind.WEAK_MAIN if candidate.main_at(i) == Choice.POS else TagKind.WEAK_NEG_MAIN, i
        )
        if candidate.star_at(i) == Choice.POS:
            order.extend([meta.id_of(TagKind.WEAK_NEG_STAR, i), chosen_main])
        else:
            order.extend([chosen_main, meta.id_of(TagKind.WEAK_STAR, i)])

    for i in range(1, n + 1):
        order.append(
            meta.id_of(TagKind.WEAK_NEG_MAIN if candidate.main_at(i) == Choice.POS else TagKind.WEAK_MAIN, i)
        )
    return Schedule(order)


# ---------------------------------------------------------------------------
# Lex gadget and a-priori scaling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LexGadgetMeta:
    ell: int
    total_proc: int
    star_id: int
    k: Optional[int] = None


@dataclass(frozen=True)
class AprioriMeta:
    weight: int
    factor: int


def gen_lex_gadget(instance: Instance, ell: int) -> Instance:
    """Append J* with p = P and d = 2P - ell, where P is the total processing time."""
    total = instance.total_proc
    if ell < 1:
        raise PreconditionError(f"ell must be at least 1 so that the appended job is tardy, got {ell}")
    if ell >= total:
        raise PreconditionError(f"ell = {ell} must be smaller than the total processing time P = {total}")
    late = [job.id for job in instance.jobs if job.due > total]
    if late:
        raise PreconditionError(f"due dates must not exceed P = {total}; jobs {late} do")

    star_id = max(instance.ids) + 1
    star = Job(star_id, total, 2 * total - ell, JobTag(TagKind.GADGET_STAR))
    meta = LexGadgetMeta(ell=ell, total_proc=total, star_id=star_id, k=instance.variant.k)
    logger.info(f"Lex gadget: appended job {star_id} with p={total}, d={2 * total - ell}")
    return Instance(instance.jobs + (star,), Variant.lex_tmax_then_u(), meta)


def gen_apriori_scaled(instance: Instance, weight: int) -> Instance:
    """Scale every p and d by 2n * weight; the weighted sum then orders schedules lexicographically."""
    if weight < 1:
        raise PreconditionError(f"weight must be at least 1, got {weight}")
    factor = 2 * instance.n * weight
    jobs = [Job(job.id, job.proc * factor, job.due * factor, job.tag) for job in instance.jobs]
    return Instance(jobs, Variant.weighted_sum(1, weight), AprioriMeta(weight=weight, factor=factor))
