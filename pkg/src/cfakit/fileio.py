"""File formats and configuration.

Score files are long-format CSV with header doc_id,label,score, one row
per document and label.  Scores round-trip at full precision; the
6-decimal formatting is reserved for report tables.  All writers go
through an atomic write-then-rename so a crash never leaves a partial
file, and all output bytes are deterministic for identical inputs.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .core import LabelSet
from .corpus import Document, KeywordLexicon, PromptSpec
from .errors import DataAccessError, ValidationError

SCORE_HEADER = ("doc_id", "label", "score")
EXPERT_HEADER = ("doc_id", "label")
FUSED_HEADER = ("combo_id", "doc_id", "top1", "tie_at_top", "tied_top", "ranking")

# Characters with structural meaning in combo ids and output tables.
RESERVED_ID_CHARS = "+:|"


def format_float(value: float) -> str:
    """Shortest decimal string that parses back to the same float."""
    return repr(float(value))


def format_table(value: float) -> str:
    """Fixed 6-decimal formatting for report tables."""
    return f"{value:.6f}"


def atomic_write_text(path: Path | str, text: str) -> None:
    """Write text to path via a temporary file and an atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    try:
        with tmp.open("w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def write_csv(path: Path | str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    atomic_write_text(path, buffer.getvalue())


def write_json(path: Path | str, payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)
    atomic_write_text(path, text + "\n")


def _open_rows(path: Path) -> list[list[str]]:
    if not path.exists():
        raise DataAccessError(f"file not found: {path}")
    try:
        with path.open(encoding="utf-8", newline="") as handle:
            return list(csv.reader(handle))
    except OSError as exc:
        raise DataAccessError(f"cannot read {path}: {exc}") from exc


def _check_header(path: Path, rows: list[list[str]], expected: Sequence[str]) -> None:
    if not rows or tuple(rows[0]) != tuple(expected):
        found = rows[0] if rows else []
        raise ValidationError(
            f"{path}: expected header {','.join(expected)}, found {','.join(found)}"
        )


def write_score_file(
    path: Path | str,
    scores: Mapping[str, Mapping[str, float]],
    label_set: LabelSet,
) -> None:
    """Write one system's scores, documents in mapping order, labels in
    label-set order, at full float precision."""
    rows = []
    for doc_id, label_scores in scores.items():
        for label in label_set.labels:
            rows.append((doc_id, label, format_float(label_scores[label])))
    write_csv(path, SCORE_HEADER, rows)


def load_score_file(path: Path | str, label_set: LabelSet | None = None) -> dict[str, dict[str, float]]:
    """Parse a score file into doc_id -> label -> score.

    Validates the header, one finite score per (doc_id, label) row, no
    duplicate rows, and, when a label set is given, that every document
    covers exactly that label set.
    """
    path = Path(path)
    rows = _open_rows(path)
    _check_header(path, rows, SCORE_HEADER)
    out: dict[str, dict[str, float]] = {}
    for line_no, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ValidationError(f"{path}:{line_no}: expected 3 columns, found {len(row)}")
        doc_id, label, text = row
        if not doc_id or not label:
            raise ValidationError(f"{path}:{line_no}: empty doc_id or label")
        try:
            score = float(text)
        except ValueError:
            raise ValidationError(f"{path}:{line_no}: score {text!r} is not a number") from None
        if not math.isfinite(score):
            raise ValidationError(f"{path}:{line_no}: score {text!r} is not finite")
        doc = out.setdefault(doc_id, {})
        if label in doc:
            raise ValidationError(
                f"{path}:{line_no}: duplicate row for document {doc_id!r} label {label!r}"
            )
        doc[label] = score
    if not out:
        raise ValidationError(f"{path}: no score rows")
    if label_set is not None:
        wanted = set(label_set.labels)
        for doc_id, label_scores in out.items():
            missing = sorted(wanted - set(label_scores))
            if missing:
                raise ValidationError(
                    f"{path}: document {doc_id!r} lacks scores for labels {missing}"
                )
            extra = sorted(set(label_scores) - wanted)
            if extra:
                raise ValidationError(
                    f"{path}: document {doc_id!r} scores unknown labels {extra}"
                )
    return out


def load_expert_labels(path: Path | str) -> dict[str, str]:
    path = Path(path)
    rows = _open_rows(path)
    _check_header(path, rows, EXPERT_HEADER)
    out: dict[str, str] = {}
    for line_no, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ValidationError(f"{path}:{line_no}: expected 2 columns, found {len(row)}")
        doc_id, label = row
        if not doc_id or not label:
            raise ValidationError(f"{path}:{line_no}: empty doc_id or label")
        if doc_id in out:
            raise ValidationError(f"{path}:{line_no}: duplicate document {doc_id!r}")
        out[doc_id] = label
    if not out:
        raise ValidationError(f"{path}: no expert labels")
    return out


def write_fused_file(path: Path | str, grid: Mapping[str, Sequence]) -> None:
    """Persist a combination grid, sorted by combo_id then doc_id."""
    rows = []
    for combo_id in sorted(grid):
        for fused in sorted(grid[combo_id], key=lambda f: f.doc_id):
            rows.append(
                (
                    combo_id,
                    fused.doc_id,
                    fused.top1,
                    "true" if fused.tie_at_top else "false",
                    "|".join(fused.tied_top),
                    "|".join(fused.ranking),
                )
            )
    write_csv(path, FUSED_HEADER, rows)


def load_fused_file(path: Path | str) -> dict[str, dict[str, dict]]:
    """Parse a fused predictions file into combo_id -> doc_id -> fields."""
    path = Path(path)
    rows = _open_rows(path)
    _check_header(path, rows, FUSED_HEADER)
    out: dict[str, dict[str, dict]] = {}
    for line_no, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(FUSED_HEADER):
            raise ValidationError(
                f"{path}:{line_no}: expected {len(FUSED_HEADER)} columns, found {len(row)}"
            )
        combo_id, doc_id, top1, tie_text, tied_text, ranking_text = row
        if tie_text not in ("true", "false"):
            raise ValidationError(f"{path}:{line_no}: tie_at_top must be true or false")
        docs = out.setdefault(combo_id, {})
        if doc_id in docs:
            raise ValidationError(
                f"{path}:{line_no}: duplicate row for {combo_id!r} / {doc_id!r}"
            )
        docs[doc_id] = {
            "top1": top1,
            "tie_at_top": tie_text == "true",
            "tied_top": tuple(tied_text.split("|")),
            "ranking": tuple(ranking_text.split("|")),
        }
    if not out:
        raise ValidationError(f"{path}: no fused predictions")
    return out


def load_corpus(path: Path | str) -> list[Document]:
    """Load a document corpus.

    A directory is read as one subdirectory per label holding .txt files;
    a file is read as JSON lines with doc_id, text, and optional label.
    """
    path = Path(path)
    if path.is_dir():
        return _load_corpus_dir(path)
    if path.is_file():
        return _load_corpus_jsonl(path)
    raise DataAccessError(f"corpus not found: {path}")


def _load_corpus_dir(path: Path) -> list[Document]:
    docs: list[Document] = []
    for label_dir in sorted(p for p in path.iterdir() if p.is_dir()):
        for text_file in sorted(label_dir.glob("*.txt")):
            try:
                text = text_file.read_text(encoding="utf-8")
            except OSError as exc:
                raise DataAccessError(f"cannot read {text_file}: {exc}") from exc
            docs.append(Document(doc_id=text_file.stem, text=text, label=label_dir.name))
    if not docs:
        raise ValidationError(f"{path}: no label directories with .txt documents")
    return docs


def _load_corpus_jsonl(path: Path) -> list[Document]:
    docs: list[Document] = []
    seen: set[str] = set()
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataAccessError(f"cannot read {path}: {exc}") from exc
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}:{line_no}: malformed JSON: {exc}") from exc
        if not isinstance(record, dict) or "doc_id" not in record or "text" not in record:
            raise ValidationError(f"{path}:{line_no}: record needs doc_id and text")
        doc_id = record["doc_id"]
        if doc_id in seen:
            raise ValidationError(f"{path}:{line_no}: duplicate document {doc_id!r}")
        seen.add(doc_id)
        docs.append(
            Document(doc_id=doc_id, text=record["text"], label=record.get("label"))
        )
    if not docs:
        raise ValidationError(f"{path}: no documents")
    return docs


PROMPT_HEADER = ("prompt_id", "label", "publication_type", "source", "prompt_text")


def write_prompt_file(path: Path | str, prompts: Sequence) -> None:
    rows = [
        (p.prompt_id, p.label, p.publication_type, p.source, p.text)
        for p in prompts
    ]
    write_csv(path, PROMPT_HEADER, rows)


def load_prompt_file(path: Path | str) -> list:
    from .corpus import Prompt

    path = Path(path)
    rows = _open_rows(path)
    _check_header(path, rows, PROMPT_HEADER)
    prompts = []
    seen: set[str] = set()
    for line_no, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(PROMPT_HEADER):
            raise ValidationError(
                f"{path}:{line_no}: expected {len(PROMPT_HEADER)} columns, found {len(row)}"
            )
        prompt_id, label, publication_type, source, text = row
        if prompt_id in seen:
            raise ValidationError(f"{path}:{line_no}: duplicate prompt id {prompt_id!r}")
        seen.add(prompt_id)
        prompts.append(
            Prompt(
                prompt_id=prompt_id,
                label=label,
                publication_type=publication_type,
                source=source,
                text=text,
            )
        )
    if not prompts:
        raise ValidationError(f"{path}: no prompts")
    return prompts


def load_lexicon(path: Path | str) -> KeywordLexicon:
    raw = _load_json(Path(path))
    if not isinstance(raw, dict):
        raise ValidationError(f"{path}: lexicon must be a JSON object of label -> phrases")
    return KeywordLexicon.from_dict(raw)


def load_prompt_specs(path: Path | str) -> list[PromptSpec]:
    raw = _load_json(Path(path))
    if not isinstance(raw, list):
        raise ValidationError(f"{path}: prompt specs must be a JSON array")
    specs: list[PromptSpec] = []
    for index, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise ValidationError(f"{path}: prompt spec {index} must be an object")
        try:
            specs.append(
                PromptSpec(
                    publication_type=entry["publication_type"],
                    template=entry["template"],
                    sources=tuple(entry["sources"]),
                )
            )
        except KeyError as exc:
            raise ValidationError(
                f"{path}: prompt spec {index} lacks field {exc.args[0]!r}"
            ) from None
    return specs


def _load_json(path: Path):
    if not path.exists():
        raise DataAccessError(f"file not found: {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataAccessError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON: {exc}") from exc


@dataclass(frozen=True)
class RunConfig:
    """Parsed configuration; flags override individual fields.

    Path checks happen when a command actually uses the field, so a
    config can name score files that an earlier command has yet to write.
    """

    labels: tuple[str, ...] = ()
    systems: tuple[tuple[str, Path], ...] = ()
    expert_labels: Path | None = None
    tie_policy: str = "fractional"
    tie_mode: str = "strict"
    strategies: tuple[str, ...] = ("asc", "arc", "wsc", "wrc")
    min_subset: int = 2
    weights: str = "ds"
    out_dir: Path = field(default_factory=lambda: Path("."))
    endpoint_url: str | None = None
    auth_token: str | None = None
    max_concurrency: int = 4
    base_dir: Path = field(default_factory=lambda: Path("."))

    def label_set(self) -> LabelSet:
        if not self.labels:
            raise ValidationError("config must list the label set under 'labels'")
        return LabelSet(tuple(self.labels))

    def require_systems(self) -> tuple[tuple[str, Path], ...]:
        if not self.systems:
            raise ValidationError("config must list at least one system under 'systems'")
        for _, path in self.systems:
            if not path.exists():
                raise DataAccessError(f"score file not found: {path}")
        return self.systems

    def require_experts(self) -> Path:
        if self.expert_labels is None:
            raise ValidationError("config must name the expert labels file")
        if not self.expert_labels.exists():
            raise DataAccessError(f"expert labels file not found: {self.expert_labels}")
        return self.expert_labels


def load_config(path: Path | str) -> RunConfig:
    path = Path(path)
    raw = _load_json(path)
    if not isinstance(raw, dict):
        raise ValidationError(f"{path}: config must be a JSON object")
    known = {
        "labels", "systems", "expert_labels", "tie_policy", "tie_mode",
        "strategies", "min_subset", "weights", "out_dir", "generation",
    }
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValidationError(f"{path}: unknown config fields {unknown}")

    base = path.parent
    systems: list[tuple[str, Path]] = []
    seen: set[str] = set()
    for index, entry in enumerate(raw.get("systems", [])):
        if not isinstance(entry, dict) or "id" not in entry or "path" not in entry:
            raise ValidationError(f"{path}: system {index} needs 'id' and 'path'")
        system_id = entry["id"]
        if not system_id or any(c in system_id for c in RESERVED_ID_CHARS):
            raise ValidationError(
                f"{path}: system id {system_id!r} is empty or uses a reserved "
                f"character from {RESERVED_ID_CHARS!r}"
            )
        if system_id in seen:
            raise ValidationError(f"{path}: duplicate system id {system_id!r}")
        seen.add(system_id)
        systems.append((system_id, base / entry["path"]))

    generation = raw.get("generation", {})
    if not isinstance(generation, dict):
        raise ValidationError(f"{path}: 'generation' must be an object")

    config = RunConfig(
        labels=tuple(raw.get("labels", ())),
        systems=tuple(systems),
        expert_labels=(base / raw["expert_labels"]) if "expert_labels" in raw else None,
        tie_policy=raw.get("tie_policy", "fractional"),
        tie_mode=raw.get("tie_mode", "strict"),
        strategies=tuple(raw.get("strategies", ("asc", "arc", "wsc", "wrc"))),
        min_subset=int(raw.get("min_subset", 2)),
        weights=raw.get("weights", "ds"),
        out_dir=base / raw.get("out_dir", "."),
        endpoint_url=generation.get("endpoint_url"),
        auth_token=generation.get("auth_token"),
        max_concurrency=int(generation.get("max_concurrency", 4)),
        base_dir=base,
    )
    _check_config(config)
    return config


def _check_config(config: RunConfig) -> None:
    from .combine import STRATEGIES, WEIGHT_SOURCES
    from .core import TIE_POLICIES
    from .evaluate import TIE_MODES

    if config.tie_policy not in TIE_POLICIES:
        raise ValidationError(
            f"unknown tie policy {config.tie_policy!r}; expected one of {TIE_POLICIES}"
        )
    if config.tie_mode not in TIE_MODES:
        raise ValidationError(
            f"unknown tie mode {config.tie_mode!r}; expected one of {TIE_MODES}"
        )
    unknown = sorted(set(config.strategies) - set(STRATEGIES))
    if unknown:
        raise ValidationError(
            f"unknown strategies {unknown}; expected a subset of {STRATEGIES}"
        )
    if not config.strategies:
        raise ValidationError("at least one strategy is required")
    if config.weights not in WEIGHT_SOURCES:
        raise ValidationError(
            f"unknown weight source {config.weights!r}; expected one of {WEIGHT_SOURCES}"
        )
    if config.min_subset < 2:
        raise ValidationError(f"minimum subset size is 2, got {config.min_subset}")
