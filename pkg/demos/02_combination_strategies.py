"""The four ways to fuse a subset of systems into one ranking.

Score combination averages normalized scores (higher wins); rank
combination averages rank positions (lower wins).  Each comes plain or
weighted by diversity strength.  The demo fuses one document three ways
over every subset of three systems, then shows the degenerate case
where identical systems force the weighted strategies to fall back.

Run:  python demos/02_combination_strategies.py
"""

from __future__ import annotations

from cfakit import (
    LabelSet,
    build_instance,
    enumerate_combinations,
    run_grid,
    weighted_rank_combination,
    weighted_score_combination,
)

LABELS = LabelSet(("SDG4", "SDG6", "SDG13", "SDG14", "SDG15"))

RAW = {
    "model_a": [0.05, 0.92, 0.40, 0.20, 0.10],
    "model_b": [0.45, 0.60, 0.55, 0.50, 0.48],
    "model_c": [0.30, 0.35, 0.90, 0.25, 0.20],
}


def main() -> None:
    instance = build_instance("doc-01", LABELS, RAW)

    subsets = enumerate_combinations(sorted(RAW))
    print(f"{len(RAW)} systems give {len(subsets)} subsets of size 2 or more:")
    for subset in subsets:
        print(f"  {'+'.join(subset)}")

    print("\nfused rankings for every (subset, strategy) combination")
    grid = run_grid([instance])
    print(f"  grid size: {len(grid)} combined models")
    for combo_id, results in sorted(grid.items()):
        fused = results[0]
        marker = " (tie at top)" if fused.tie_at_top else ""
        print(f"  {combo_id:28s} top1={fused.top1:6s} ranking={'>'.join(fused.ranking)}{marker}")

    print("\nthe same math, called directly with explicit weights")
    wsc = weighted_score_combination(instance, ("model_a", "model_c"), [2.0, 1.0])
    print(f"  score combination of model_a (w=2) and model_c (w=1): top1={wsc.top1}")
    wrc = weighted_rank_combination(instance, ("model_a", "model_c"), [2.0, 1.0])
    print(f"  rank combination, reciprocal weights:                 top1={wrc.top1}")

    print("\ndegenerate case: two identical systems have zero diversity,")
    print("so diversity-strength weights vanish and the weighted strategies")
    print("fall back to the plain averages (flagged, never NaN)")
    twins = build_instance(
        "doc-02", LABELS, {"x": [0.3, 0.8, 0.1, 0.5, 0.2], "y": [0.3, 0.8, 0.1, 0.5, 0.2]}
    )
    fallback = weighted_score_combination(twins, ("x", "y"))
    print(f"  weight_fallback={fallback.weight_fallback}, top1={fallback.top1}")


if __name__ == "__main__":
    main()
