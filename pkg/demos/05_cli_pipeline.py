"""The whole toolkit as a command line pipeline, start to finish.

Builds a small labeled corpus in a temporary directory, then walks the
CLI through scoring it with both built-in systems, reporting diversity,
fusing the combination grid, and evaluating against the expert labels.
Every command reads one JSON config; outputs are deterministic CSV and
JSON files under the configured output directory.

Run:  python demos/05_cli_pipeline.py
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from cfakit.cli import main

LABELS = ["SDG4", "SDG6", "SDG13"]

DOCS = [
    ("d01", "Clean water and sanitation for every village.", "SDG6"),
    ("d02", "Water infrastructure needs investment, water first.", "SDG6"),
    ("d03", "Education opens doors; every school counts.", "SDG4"),
    ("d04", "Learning outcomes improve with trained teachers.", "SDG4"),
    ("d05", "Climate change accelerates; emissions keep rising.", "SDG13"),
    ("d06", "Warming oceans disturb climate patterns.", "SDG13"),
    ("d07", "Schools teach climate literacy and learning.", "SDG4"),
    ("d08", "Sanitation systems fail under warming stress.", "SDG6"),
]

TRAIN = [
    ("t1", "clean water sanitation wells pipes", "SDG6"),
    ("t2", "drinking water hygiene sanitation", "SDG6"),
    ("t3", "education school learning teachers", "SDG4"),
    ("t4", "school curriculum learning literacy", "SDG4"),
    ("t5", "climate emissions warming carbon", "SDG13"),
    ("t6", "climate adaptation warming seas", "SDG13"),
]

LEXICON = {
    "SDG4": ["education", "school", "learning"],
    "SDG6": ["water", "sanitation", "clean water"],
    "SDG13": ["climate", "emissions", "warming"],
}


def write_inputs(root: Path) -> Path:
    for name, rows in (("corpus.jsonl", DOCS), ("train.jsonl", TRAIN)):
        lines = [
            json.dumps({"doc_id": d, "text": t, "label": lab})
            for d, t, lab in rows
        ]
        (root / name).write_text("".join(line + "\n" for line in lines))
    (root / "lexicon.json").write_text(json.dumps(LEXICON, indent=2))
    (root / "expert.csv").write_text(
        "doc_id,label\n" + "".join(f"{d},{lab}\n" for d, _, lab in DOCS)
    )
    config = root / "config.json"
    config.write_text(json.dumps({
        "labels": LABELS,
        "systems": [
            {"id": "kw", "path": "out/scores_keyword.csv"},
            {"id": "tf", "path": "out/scores_tfidf.csv"},
        ],
        "expert_labels": "expert.csv",
        "out_dir": "out",
    }, indent=2))
    return config


def run(*argv: object) -> None:
    argv = [str(a) for a in argv]
    print(f"\n$ cfakit {' '.join(argv)}")
    code = main(argv)
    if code != 0:
        raise SystemExit(f"command failed with exit code {code}")


def main_demo() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        config = write_inputs(root)
        print(f"working directory: {root}")

        run("corpus-stats", "--config", config, "--corpus", root / "corpus.jsonl")
        run("score", "--config", config, "--scorer", "keyword",
            "--corpus", root / "corpus.jsonl", "--lexicon", root / "lexicon.json")
        run("score", "--config", config, "--scorer", "tfidf",
            "--corpus", root / "corpus.jsonl", "--train", root / "train.jsonl")
        run("diversity", "--config", config, "--doc", "d01")
        run("fuse", "--config", config)
        run("evaluate", "--config", config)

        report = json.loads((root / "out" / "report.json").read_text())
        best = report["best_combined"]["model"]
        overall = report["combined"][best]["overall"]
        print(f"\nbest combined model: {best} "
              f"({overall['correct']}/{overall['total']} correct)")
        print("\nfiles produced under out/:")
        for path in sorted((root / "out").iterdir()):
            print(f"  {path.name}")


if __name__ == "__main__":
    main_demo()
