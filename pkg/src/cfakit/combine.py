"""Combination strategies over subsets of scoring systems.

Four strategies fuse the per-label outputs of a system subset into one
combined vector per document:

  asc  average of normalized scores, higher is better
  arc  average of ranks, lower is better
  wsc  weighted average of normalized scores, weights w_j, higher better
  wrc  rank average weighted by the reciprocals 1/w_j, lower better

Weights default to diversity strengths recomputed within the subset;
performance weights can be supplied instead.  The grid runner enumerates
every subset of size min_size..t crossed with the chosen strategies.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, replace
from itertools import combinations

import numpy as np

from .core import FusionInstance, _freeze
from .errors import DomainError, ValidationError

STRATEGIES = ("asc", "arc", "wsc", "wrc")
WEIGHT_SOURCES = ("ds", "perf")

# Weights at or below this threshold are treated as vanishing; weighted
# strategies fall back to their unweighted versions instead of dividing
# by (nearly) zero.
EPSILON = 1e-12


@dataclass(frozen=True)
class CombinedModel:
    """A subset of at least two systems paired with a combination strategy."""

    systems: tuple[str, ...]
    strategy: str
    weight_source: str | None = None

    def __post_init__(self) -> None:
        systems = tuple(sorted(self.systems))
        object.__setattr__(self, "systems", systems)
        if len(systems) < 2:
            raise ValidationError("a combined model needs at least two systems")
        if len(set(systems)) != len(systems):
            raise ValidationError("a combined model cannot repeat a system")
        if self.strategy not in STRATEGIES:
            raise ValidationError(
                f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}"
            )
        weighted = self.strategy in ("wsc", "wrc")
        if weighted:
            if self.weight_source not in WEIGHT_SOURCES:
                raise ValidationError(
                    f"strategy {self.strategy!r} needs a weight source from {WEIGHT_SOURCES}"
                )
        elif self.weight_source is not None:
            raise ValidationError(
                f"strategy {self.strategy!r} does not take a weight source"
            )

    @property
    def tag(self) -> str:
        if self.weight_source is None:
            return self.strategy
        return f"{self.strategy}-{self.weight_source}"

    @property
    def combo_id(self) -> str:
        return "+".join(self.systems) + ":" + self.tag


@dataclass(frozen=True, eq=False)
class FusedRanking:
    """Combined values and the resulting label ranking for one document.

    combined_values follows the label-set order.  ranking lists labels
    from best to worst with value ties broken by label order, so top1 is
    always deterministic.  tied_top lists every label sharing the best
    combined value, in label order; tie_at_top is true when there is more
    than one.  weight_fallback marks results where a weighted strategy
    fell back to its unweighted counterpart because of vanishing weights.
    """

    doc_id: str
    combined_values: np.ndarray
    ranking: tuple[str, ...]
    top1: str
    tie_at_top: bool
    tied_top: tuple[str, ...]
    weight_fallback: bool = False


def enumerate_combinations(system_ids: Sequence[str], min_size: int = 2) -> list[tuple[str, ...]]:
    """All system subsets from min_size up to the full roster.

    Subsets are listed smallest size first, lexicographically within each
    size, so the enumeration is deterministic.
    """
    ids = sorted(system_ids)
    if len(set(ids)) != len(ids):
        raise ValidationError("system ids must be unique")
    t = len(ids)
    if t < 2:
        raise DomainError(f"a combination grid needs at least two systems, got {t}")
    if min_size < 2:
        raise ValidationError(f"minimum subset size is 2, got {min_size}")
    if min_size > t:
        raise ValidationError(
            f"minimum subset size {min_size} exceeds the system count {t}"
        )
    return [
        subset
        for size in range(min_size, t + 1)
        for subset in combinations(ids, size)
    ]


def _subset_rows(instance: FusionInstance, subset: Sequence[str], attr: str) -> np.ndarray:
    ids = list(subset)
    if not ids:
        raise ValidationError("subset must name at least one system")
    if len(set(ids)) != len(ids):
        raise ValidationError("subset contains a repeated system id")
    rows = [getattr(instance.system(system_id), attr) for system_id in ids]
    return np.vstack(rows)


def _finalize(
    instance: FusionInstance,
    values: np.ndarray,
    higher_is_better: bool,
    weight_fallback: bool = False,
) -> FusedRanking:
    vals = np.asarray(values, dtype=float)
    labels = instance.label_set.labels
    keys = -vals if higher_is_better else vals
    order = np.lexsort((np.arange(vals.size), keys))
    ranking = tuple(labels[i] for i in order)
    best = float(vals.max() if higher_is_better else vals.min())
    tied = tuple(labels[i] for i in range(vals.size) if vals[i] == best)
    return FusedRanking(
        doc_id=instance.doc_id,
        combined_values=_freeze(vals),
        ranking=ranking,
        top1=ranking[0],
        tie_at_top=len(tied) > 1,
        tied_top=tied,
        weight_fallback=weight_fallback,
    )


def _column_sum(matrix: np.ndarray) -> np.ndarray:
    # Summed first system to last with plain elementwise adds: the
    # reduction order is part of the output contract, so combined values
    # and their exact tie groups are bit-reproducible from the formulas.
    acc = matrix[0].copy()
    for row in matrix[1:]:
        acc += row
    return acc


def _ordered_sum(values) -> float:
    total = 0.0
    for value in values:
        total += value
    return total


def average_score_combination(instance: FusionInstance, subset: Sequence[str]) -> FusedRanking:
    """Mean of the subset's normalized scores per label; higher is better."""
    matrix = _subset_rows(instance, subset, "normalized")
    return _finalize(instance, _column_sum(matrix) / len(matrix), higher_is_better=True)


def average_rank_combination(instance: FusionInstance, subset: Sequence[str]) -> FusedRanking:
    """Mean of the subset's ranks per label; lower is better."""
    matrix = _subset_rows(instance, subset, "ranks")
    return _finalize(instance, _column_sum(matrix) / len(matrix), higher_is_better=False)


def _resolve_weights(
    instance: FusionInstance, subset: Sequence[str], weights
) -> np.ndarray:
    if weights is None:
        if instance.diversity is None:
            raise DomainError(
                "diversity-strength weights need an instance with at least two systems"
            )
        return np.asarray(instance.diversity.subset_strength(subset), dtype=float)
    if isinstance(weights, Mapping):
        try:
            resolved = [float(weights[system_id]) for system_id in subset]
        except KeyError as exc:
            raise ValidationError(f"missing weight for system {exc.args[0]!r}") from None
    else:
        resolved = [float(w) for w in weights]
        if len(resolved) != len(subset):
            raise ValidationError(
                f"got {len(resolved)} weights for {len(subset)} systems"
            )
    arr = np.asarray(resolved, dtype=float)
    if not np.isfinite(arr).all():
        raise ValidationError("weights must be finite")
    return arr


def weighted_score_combination(
    instance: FusionInstance, subset: Sequence[str], weights=None
) -> FusedRanking:
    """Weighted mean of normalized scores: sum(w_j * s_j) / sum(w_j).

    Weights default to diversity strengths recomputed within the subset.
    When the weights sum to (nearly) zero, for example when all subset
    systems are identical, the result falls back to the plain score
    average and is flagged via weight_fallback.
    """
    matrix = _subset_rows(instance, subset, "normalized")
    w = _resolve_weights(instance, subset, weights)
    if np.any(w < 0):
        raise ValidationError("score combination weights must be non-negative")
    total = _ordered_sum(w.tolist())
    if total <= EPSILON:
        base = average_score_combination(instance, subset)
        return replace(base, weight_fallback=True)
    combined = _column_sum(w[:, None] * matrix) / total
    return _finalize(instance, combined, higher_is_better=True)


def weighted_rank_combination(
    instance: FusionInstance, subset: Sequence[str], weights=None
) -> FusedRanking:
    """Rank average weighted by reciprocals: sum(r_j / w_j) / sum(1 / w_j).

    The reciprocal form keeps the combined value on the rank scale while
    letting larger weights count for more.  Any weight at or below the
    vanishing threshold would blow up its reciprocal, so the result falls
    back to the plain rank average and is flagged via weight_fallback.
    """
    matrix = _subset_rows(instance, subset, "ranks")
    w = _resolve_weights(instance, subset, weights)
    if np.any(w <= EPSILON):
        base = average_rank_combination(instance, subset)
        return replace(base, weight_fallback=True)
    inv = 1.0 / w
    combined = _column_sum(inv[:, None] * matrix) / _ordered_sum(inv.tolist())
    return _finalize(instance, combined, higher_is_better=False)


def run_grid(
    instances: Sequence[FusionInstance],
    strategies: Sequence[str] = STRATEGIES,
    min_size: int = 2,
    weight_source: str = "ds",
    performance: Mapping[str, float] | None = None,
) -> dict[str, list[FusedRanking]]:
    """Fuse every document under every (subset, strategy) combination.

    Returns a mapping from combo_id to the per-document results in input
    order.  All instances must share one label set and one system roster.
    Performance weights apply globally per system and require the
    performance mapping; diversity-strength weights are recomputed per
    document and subset.
    """
    instances = list(instances)
    if not instances:
        raise ValidationError("at least one fusion instance is required")
    first = instances[0]
    roster = set(first.system_ids)
    for inst in instances[1:]:
        if inst.label_set.labels != first.label_set.labels:
            raise ValidationError(
                f"document {inst.doc_id!r} uses a different label set"
            )
        if set(inst.system_ids) != roster:
            raise ValidationError(
                f"document {inst.doc_id!r} has systems {sorted(inst.system_ids)}, "
                f"expected {sorted(roster)}"
            )

    requested = set(strategies)
    unknown = requested - set(STRATEGIES)
    if unknown:
        raise ValidationError(
            f"unknown strategies {sorted(unknown)}; expected a subset of {STRATEGIES}"
        )
    chosen = [s for s in STRATEGIES if s in requested]
    if not chosen:
        raise ValidationError("at least one strategy is required")

    if weight_source not in WEIGHT_SOURCES:
        raise ValidationError(
            f"unknown weight source {weight_source!r}; expected one of {WEIGHT_SOURCES}"
        )
    needs_weights = any(s in ("wsc", "wrc") for s in chosen)
    perf: dict[str, float] | None = None
    if needs_weights and weight_source == "perf":
        if performance is None:
            raise ValidationError("performance weighting requires per-system performances")
        missing = sorted(roster - set(performance))
        if missing:
            raise ValidationError(f"missing performance weights for systems {missing}")
        perf = {system_id: float(performance[system_id]) for system_id in roster}
        values = np.array(list(perf.values()))
        if not np.isfinite(values).all() or np.any(values < 0):
            raise ValidationError("performance weights must be finite and non-negative")

    grid: dict[str, list[FusedRanking]] = {}
    for subset in enumerate_combinations(sorted(roster), min_size):
        subset_perf = None if perf is None else [perf[s] for s in subset]
        for strategy in chosen:
            source = weight_source if strategy in ("wsc", "wrc") else None
            model = CombinedModel(systems=subset, strategy=strategy, weight_source=source)
            results: list[FusedRanking] = []
            for inst in instances:
                if strategy == "asc":
                    fused = average_score_combination(inst, subset)
                elif strategy == "arc":
                    fused = average_rank_combination(inst, subset)
                elif strategy == "wsc":
                    fused = weighted_score_combination(inst, subset, weights=subset_perf)
                else:
                    fused = weighted_rank_combination(inst, subset, weights=subset_perf)
                results.append(fused)
            grid[model.combo_id] = results
    return grid
