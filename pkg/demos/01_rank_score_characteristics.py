"""How scoring behavior becomes a curve, and how curves measure diversity.

Three toy systems score the same document over five labels.  Min-max
normalization puts them on a shared [0, 1] scale, ranking orders the
labels, and sorting the normalized scores by rank gives each system a
rank-score characteristic curve.  The distance between two curves is the
pair's cognitive diversity; a system's mean distance to the others is
its diversity strength.

Run:  python demos/01_rank_score_characteristics.py
"""

from __future__ import annotations

from cfakit import LabelSet, build_instance

LABELS = LabelSet(("SDG4", "SDG6", "SDG13", "SDG14", "SDG15"))

# model_a is confident, model_b is flat, model_c disagrees on the winner
RAW = {
    "model_a": [0.05, 0.92, 0.40, 0.20, 0.10],
    "model_b": [0.45, 0.60, 0.55, 0.50, 0.48],
    "model_c": [0.30, 0.35, 0.90, 0.25, 0.20],
}


def main() -> None:
    instance = build_instance("doc-01", LABELS, RAW)

    print("normalized scores and ranks (rank 1 = highest score)")
    for system in instance.systems:
        normalized = ", ".join(f"{v:.3f}" for v in system.normalized)
        ranks = ", ".join(f"{r:g}" for r in system.ranks)
        print(f"  {system.system_id}:")
        print(f"    normalized: [{normalized}]")
        print(f"    ranks:      [{ranks}]")

    print("\nrank-score characteristic curves (normalized score at rank 1..n)")
    for system_id, curve in zip(instance.system_ids, instance.curves):
        values = ", ".join(f"{v:.3f}" for v in curve.values)
        print(f"  {system_id}: [{values}]")
    print("  a steep curve concentrates confidence at the top;")
    print("  a flat curve barely separates the labels")

    profile = instance.diversity
    print("\npairwise cognitive diversity")
    ids = profile.system_ids
    for j in range(len(ids)):
        for k in range(j + 1, len(ids)):
            print(f"  CD({ids[j]}, {ids[k]}) = {profile.cd[j, k]:.6f}")

    print("\ndiversity strength (mean distance to the other systems)")
    for system_id in ids:
        print(f"  ds({system_id}) = {profile.strength(system_id):.6f}")
    print("\nhigh-strength systems behave unlike the rest; the weighted")
    print("combination strategies in demo 02 use these values as weights")


if __name__ == "__main__":
    main()
