"""Score, rank, and diversity mathematics for combinatorial fusion.

A scoring system assigns one real score to every label of a document.
This module normalizes those scores, converts them to ranks, builds the
rank-score characteristic (RSC) curve that profiles how a system spreads
its scores over rank positions, and measures pairwise cognitive diversity
between systems.  Everything operates per document: normalization and
ranking never mix values from different documents.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .errors import DomainError, ValidationError

TIE_POLICIES = ("fractional", "ordinal")

# Cognitive diversity divides by n - 2, so fewer labels have no defined
# diversity and are rejected outright.
MIN_LABELS = 3


def _freeze(values: Iterable[float] | np.ndarray) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


def _as_vector(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{what} must form a one-dimensional vector")
    if arr.size == 0:
        raise ValidationError(f"{what} vector is empty")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        i = int(bad[0])
        raise ValidationError(f"{what} at index {i} is not finite: {arr[i]!r}")
    return arr


@dataclass(frozen=True)
class LabelSet:
    """Ordered, fixed set of label identifiers scored for each document."""

    labels: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        seen: set[str] = set()
        for label in labels:
            if not isinstance(label, str) or not label:
                raise ValidationError("labels must be non-empty strings")
            if "|" in label:
                raise ValidationError(f"label {label!r} must not contain '|'")
            if label in seen:
                raise ValidationError(f"duplicate label {label!r}")
            seen.add(label)
        if len(labels) < MIN_LABELS:
            raise DomainError(
                f"label set needs at least {MIN_LABELS} labels, got {len(labels)}"
            )
        object.__setattr__(self, "_index", {l: i for i, l in enumerate(labels)})

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ValidationError(f"unknown label {label!r}") from None


def normalize_scores(raw) -> np.ndarray:
    """Min-max normalize a raw score vector to [0, 1].

    A constant vector carries no ordering information, so every entry maps
    to 0.5; callers mark such systems degenerate rather than failing.
    """
    arr = _as_vector(raw, "raw score")
    lo = float(arr.min())
    hi = float(arr.max())
    if hi == lo:
        return np.full(arr.shape, 0.5)
    return (arr - lo) / (hi - lo)


def scores_degenerate(raw) -> bool:
    """True when the raw vector is constant and normalization collapses."""
    arr = _as_vector(raw, "raw score")
    return bool(arr.max() == arr.min())


def rank_from_scores(scores, tie_policy: str = "fractional") -> np.ndarray:
    """Assign ranks so rank 1 goes to the highest score.

    Under the fractional policy tied scores share the average of the rank
    positions they span; under the ordinal policy the tie goes to the
    lower label index.
    """
    if tie_policy not in TIE_POLICIES:
        raise ValidationError(
            f"unknown tie policy {tie_policy!r}; expected one of {TIE_POLICIES}"
        )
    arr = _as_vector(scores, "score")
    method = "average" if tie_policy == "fractional" else "ordinal"
    return rankdata(-arr, method=method).astype(float)


@dataclass(frozen=True, eq=False)
class SystemScores:
    """One system's raw scores with their normalized values and ranks."""

    system_id: str
    raw: np.ndarray
    normalized: np.ndarray
    ranks: np.ndarray
    degenerate: bool = False

    @property
    def n(self) -> int:
        return int(self.raw.size)

    @classmethod
    def from_raw(cls, system_id: str, raw, tie_policy: str = "fractional") -> "SystemScores":
        arr = _as_vector(raw, f"raw score for system {system_id!r}")
        normalized = normalize_scores(arr)
        ranks = rank_from_scores(arr, tie_policy)
        degenerate = bool(arr.max() == arr.min())
        return cls(
            system_id=system_id,
            raw=_freeze(arr),
            normalized=_freeze(normalized),
            ranks=_freeze(ranks),
            degenerate=degenerate,
        )


@dataclass(frozen=True, eq=False)
class RscCurve:
    """Rank-score characteristic: normalized score at each rank position.

    values[i - 1] is the normalized score of the label holding rank i, so
    the curve is non-increasing by construction.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_vector(self.values, "curve value")
        if float(arr.min()) < 0.0 or float(arr.max()) > 1.0:
            raise ValidationError("curve values must lie in [0, 1]")
        if np.any(np.diff(arr) > 0):
            raise ValidationError("curve values must be non-increasing")
        object.__setattr__(self, "values", _freeze(arr))

    @property
    def n(self) -> int:
        return int(self.values.size)


def rsc_curve(normalized, ranks) -> RscCurve:
    """Build the RSC curve pairing each rank position with its score.

    With fractional tie ranks this equals the normalized scores sorted in
    non-increasing order; tied labels hold equal scores, so the shared
    rank is unambiguous.
    """
    norm = _as_vector(normalized, "normalized score")
    rk = _as_vector(ranks, "rank")
    if norm.size != rk.size:
        raise ValidationError(
            f"normalized scores ({norm.size}) and ranks ({rk.size}) differ in length"
        )
    order = np.argsort(rk, kind="stable")
    return RscCurve(norm[order])


def cognitive_diversity(curve_a, curve_b) -> float:
    """Cognitive diversity between two RSC curves.

    sqrt(sum_i (f_A(i) - f_B(i))^2 / (n - 2)) over rank positions
    i = 1..n.  The divisor requires at least three labels.  The value is
    symmetric, non-negative, and zero for identical curves.
    """
    a = _curve_values(curve_a)
    b = _curve_values(curve_b)
    if a.size != b.size:
        raise ValidationError(
            f"curves differ in length: {a.size} versus {b.size}"
        )
    n = int(a.size)
    if n < MIN_LABELS:
        raise DomainError(
            f"cognitive diversity needs at least {MIN_LABELS} labels, got {n}"
        )
    # Accumulated in rank order: the reduction order is part of the output
    # contract, so the value is bit-reproducible from the formula alone.
    total = 0.0
    for d in (a - b).tolist():
        total += d * d
    return float(np.sqrt(total / (n - 2)))


def _curve_values(curve) -> np.ndarray:
    if isinstance(curve, RscCurve):
        return curve.values
    return _as_vector(curve, "curve value")


def _as_cd_matrix(cd) -> np.ndarray:
    m = np.asarray(cd, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError("cognitive diversity matrix must be square")
    if m.shape[0] < 2:
        raise DomainError("diversity strength needs at least two systems")
    if not np.isfinite(m).all():
        raise ValidationError("cognitive diversity matrix contains non-finite values")
    return m


def _strength_row(row: Sequence[float], j: int) -> float:
    # summed in system order, skipping self; see cognitive_diversity on
    # why the reduction order is fixed
    total = 0.0
    for k, value in enumerate(row):
        if k != j:
            total += value
    return total / (len(row) - 1)


def diversity_strength(cd, j: int) -> float:
    """Mean cognitive diversity between system j and every other system."""
    m = _as_cd_matrix(cd)
    t = m.shape[0]
    if not 0 <= j < t:
        raise ValidationError(f"system index {j} out of range for {t} systems")
    return _strength_row(m[j].tolist(), j)


def diversity_strength_vector(cd) -> np.ndarray:
    """Diversity strength of every system at once."""
    m = _as_cd_matrix(cd)
    return np.array([_strength_row(row, j) for j, row in enumerate(m.tolist())])


@dataclass(frozen=True, eq=False)
class DiversityProfile:
    """Pairwise cognitive diversities and per-system diversity strengths."""

    system_ids: tuple[str, ...]
    cd: np.ndarray
    ds: np.ndarray

    @classmethod
    def from_curves(cls, system_ids: Sequence[str], curves: Sequence[RscCurve]) -> "DiversityProfile":
        ids = tuple(system_ids)
        if len(ids) != len(curves):
            raise ValidationError("system ids and curves differ in length")
        t = len(ids)
        if t < 2:
            raise DomainError("a diversity profile needs at least two systems")
        cd = np.zeros((t, t))
        for j in range(t):
            for k in range(j + 1, t):
                value = cognitive_diversity(curves[j], curves[k])
                cd[j, k] = value
                cd[k, j] = value
        ds = diversity_strength_vector(cd)
        return cls(system_ids=ids, cd=_freeze(cd), ds=_freeze(ds))

    @property
    def t(self) -> int:
        return len(self.system_ids)

    def pair(self, id_a: str, id_b: str) -> float:
        return float(self.cd[self._pos(id_a), self._pos(id_b)])

    def strength(self, system_id: str) -> float:
        return float(self.ds[self._pos(system_id)])

    def subset_strength(self, subset: Sequence[str]) -> np.ndarray:
        """Diversity strengths recomputed within a subset of systems.

        Weights for weighted combination are taken relative to the systems
        actually being combined, not the full roster.
        """
        idx = [self._pos(s) for s in subset]
        if len(idx) < 2:
            raise DomainError("subset diversity strength needs at least two systems")
        if len(set(idx)) != len(idx):
            raise ValidationError("subset contains a repeated system id")
        sub = self.cd[np.ix_(idx, idx)]
        return np.array([_strength_row(row, j) for j, row in enumerate(sub.tolist())])

    def _pos(self, system_id: str) -> int:
        try:
            return self.system_ids.index(system_id)
        except ValueError:
            raise ValidationError(f"unknown system id {system_id!r}") from None


@dataclass(frozen=True, eq=False)
class FusionInstance:
    """Everything known about one document: scores, ranks, curves, diversity.

    diversity is None when the instance holds a single system.
    """

    doc_id: str
    label_set: LabelSet
    systems: tuple[SystemScores, ...]
    curves: tuple[RscCurve, ...]
    diversity: DiversityProfile | None

    @property
    def system_ids(self) -> tuple[str, ...]:
        return tuple(s.system_id for s in self.systems)

    @property
    def t(self) -> int:
        return len(self.systems)

    @property
    def degenerate_systems(self) -> tuple[str, ...]:
        return tuple(s.system_id for s in self.systems if s.degenerate)

    def system_index(self, system_id: str) -> int:
        for i, s in enumerate(self.systems):
            if s.system_id == system_id:
                return i
        raise ValidationError(f"unknown system id {system_id!r}")

    def system(self, system_id: str) -> SystemScores:
        return self.systems[self.system_index(system_id)]


def build_instance(
    doc_id: str,
    label_set: LabelSet,
    system_scores,
    tie_policy: str = "fractional",
) -> FusionInstance:
    """Assemble a fusion instance from raw per-system label scores.

    system_scores maps system id to either a score vector aligned with the
    label set or a mapping from label to score.  Every system must supply
    exactly one finite score per label.
    """
    if isinstance(system_scores, Mapping):
        items = list(system_scores.items())
    else:
        items = [tuple(item) for item in system_scores]
        for item in items:
            if len(item) != 2:
                raise ValidationError("system scores must be (system_id, scores) pairs")
    if not items:
        raise ValidationError("at least one scoring system is required")

    seen: set[str] = set()
    systems: list[SystemScores] = []
    for system_id, scores in items:
        if not isinstance(system_id, str) or not system_id:
            raise ValidationError("system ids must be non-empty strings")
        if system_id in seen:
            raise ValidationError(f"duplicate system id {system_id!r}")
        seen.add(system_id)
        vector = _vector_for_labels(system_id, scores, label_set)
        systems.append(SystemScores.from_raw(system_id, vector, tie_policy))

    curves = tuple(rsc_curve(s.normalized, s.ranks) for s in systems)
    diversity = None
    if len(systems) >= 2:
        diversity = DiversityProfile.from_curves(
            [s.system_id for s in systems], curves
        )
    return FusionInstance(
        doc_id=doc_id,
        label_set=label_set,
        systems=tuple(systems),
        curves=curves,
        diversity=diversity,
    )


def _vector_for_labels(system_id: str, scores, label_set: LabelSet) -> list[float]:
    if isinstance(scores, Mapping):
        for label in scores:
            if label not in label_set:
                raise ValidationError(
                    f"system {system_id!r} scored unknown label {label!r}"
                )
        missing = [label for label in label_set.labels if label not in scores]
        if missing:
            raise ValidationError(
                f"system {system_id!r} is missing a score for label {missing[0]!r}"
            )
        return [float(scores[label]) for label in label_set.labels]
    vector = list(scores)
    if len(vector) != label_set.n:
        raise ValidationError(
            f"system {system_id!r} supplied {len(vector)} scores for {label_set.n} labels"
        )
    return [float(v) for v in vector]
