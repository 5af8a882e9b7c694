"""Tabular datasets, their context metadata, and ground-truth labels.

A dataset on disk is a delimiter-separated file with a header row plus a
``<name>.meta.json`` sidecar holding ``title`` and ``description``. Labels
live in ``<name>.labels.json`` as ``{column: bool}`` (true = personal).
Every cell is kept as text; missing cells become the empty string.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping

from pdd.errors import (
    DuplicateColumn,
    EmptyColumn,
    MalformedLabels,
    MalformedMetadata,
    MissingHeader,
    UnknownColumn,
    UnreadableFile,
)

DEFAULT_SAMPLE_SIZE = 10
MAX_DESCRIPTION_CHARS = 2000
TRUNCATION_MARKER = " [...]"


@dataclass(frozen=True)
class Column:
    name: str
    values: tuple[str, ...]
    position: int = 0

    def non_empty(self) -> list[str]:
        return [v for v in self.values if v != ""]


@dataclass(frozen=True)
class Dataset:
    title: str
    description: str
    columns: tuple[Column, ...]
    source_path: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for col in self.columns:
            key = col.name.strip()
            if key in seen:
                raise DuplicateColumn(key)
            seen.add(key)
        if not self.columns:
            raise MissingHeader("dataset has no columns")
        n = len(self.columns[0].values)
        for col in self.columns:
            if len(col.values) != n:
                raise ValueError(
                    f"column {col.name!r} has {len(col.values)} values, expected {n}"
                )
            if not col.non_empty():
                raise EmptyColumn(f"column {col.name!r} has no non-empty values")

    @property
    def n_rows(self) -> int:
        return len(self.columns[0].values)

    @property
    def feature_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column(self, name: str) -> Column:
        for col in self.columns:
            if col.name == name:
                return col
        raise UnknownColumn(name)

    def row(self, index: int) -> list[str]:
        return [c.values[index] for c in self.columns]

    def __iter__(self) -> Iterator[Column]:
        return iter(self.columns)

    def __len__(self) -> int:
        return len(self.columns)


@dataclass(frozen=True)
class ValueSample:
    values: tuple[str, ...]
    k: int


@dataclass(frozen=True)
class AnnotationSet:
    labels: Mapping[str, bool]

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, name: str) -> bool:
        return self.labels[name]

    def __contains__(self, name: object) -> bool:
        return name in self.labels

    @property
    def n_personal(self) -> int:
        return sum(1 for v in self.labels.values() if v)


def build_dataset(
    title: str,
    description: str,
    header: list[str],
    rows: list[list[str]],
    source_path: str = "",
) -> Dataset:
    """Build a Dataset from a header and row-major cells.

    Header names are trimmed. Short rows are padded with empty cells.
    """
    names = [h.strip() for h in header]
    width = len(names)
    grid: list[list[str]] = []
    for lineno, row in enumerate(rows, start=2):
        if len(row) > width:
            raise UnreadableFile(
                f"{source_path or '<memory>'}:{lineno}: {len(row)} cells, header has {width}"
            )
        grid.append([str(c) for c in row] + [""] * (width - len(row)))
    columns = tuple(
        Column(name=name, values=tuple(r[i] for r in grid), position=i)
        for i, name in enumerate(names)
    )
    return Dataset(title=title, description=description, columns=columns, source_path=source_path)


def read_metadata(meta_path: str | Path) -> tuple[str, str]:
    try:
        raw = Path(meta_path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UnreadableFile(f"cannot read metadata {meta_path}: {exc}") from exc
    try:
        meta = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedMetadata(f"{meta_path}: invalid JSON ({exc})") from exc
    if not isinstance(meta, dict):
        raise MalformedMetadata(f"{meta_path}: expected a JSON object")
    for key in ("title", "description"):
        if not isinstance(meta.get(key), str):
            raise MalformedMetadata(f"{meta_path}: field {key!r} must be a string")
    return meta["title"], meta["description"]


def load_dataset(
    csv_path: str | Path,
    meta_path: str | Path | None,
    delimiter: str = ",",
) -> Dataset:
    """Load a dataset file and its metadata sidecar.

    ``meta_path=None`` is allowed for callers that need no context (the rule
    engine); the title then defaults to the file stem and the description
    is empty.
    """
    csv_path = Path(csv_path)
    try:
        with csv_path.open(newline="", encoding="utf-8") as fh:
            records = list(csv.reader(fh, delimiter=delimiter))
    except (OSError, UnicodeDecodeError, csv.Error) as exc:
        raise UnreadableFile(f"cannot read {csv_path}: {exc}") from exc
    if not records or not any(h.strip() for h in records[0]):
        raise MissingHeader(f"{csv_path}: no header row")

    if meta_path is None:
        title, description = csv_path.stem, ""
    else:
        title, description = read_metadata(meta_path)
    return build_dataset(title, description, records[0], records[1:], source_path=str(csv_path))


def save_dataset(
    ds: Dataset, csv_path: str | Path, meta_path: str | Path, delimiter: str = ","
) -> None:
    with Path(csv_path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerow(ds.feature_names)
        for i in range(ds.n_rows):
            writer.writerow(ds.row(i))
    Path(meta_path).write_text(
        json.dumps({"title": ds.title, "description": ds.description}, ensure_ascii=False, indent=2)
        + "\n",
        encoding="utf-8",
    )


def load_annotations(labels_path: str | Path, ds: Dataset | None = None) -> AnnotationSet:
    """Read a ``{column: bool}`` labels file, checking names against *ds*."""
    try:
        raw = Path(labels_path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UnreadableFile(f"cannot read labels {labels_path}: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedLabels(f"{labels_path}: invalid JSON ({exc})") from exc
    return annotations_from_mapping(data, ds, source=str(labels_path))


def annotations_from_mapping(
    data: object, ds: Dataset | None = None, source: str = "<labels>"
) -> AnnotationSet:
    if not isinstance(data, dict):
        raise MalformedLabels(f"{source}: expected a JSON object")
    labels: dict[str, bool] = {}
    known = set(ds.feature_names) if ds is not None else None
    for name, value in data.items():
        if not isinstance(value, bool):
            raise MalformedLabels(f"{source}: label for {name!r} is not a boolean")
        if known is not None and name not in known:
            raise UnknownColumn(name)
        labels[name] = value
    return AnnotationSet(labels=labels)


def sample_top_k(col: Column, k: int = DEFAULT_SAMPLE_SIZE) -> ValueSample:
    """Return up to *k* distinct non-empty values, most frequent first.

    Ties keep the order of first appearance in the column.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    counts = Counter(v for v in col.values if v != "")
    if not counts:
        raise EmptyColumn(f"column {col.name!r} has no non-empty values")
    # Counter preserves insertion (first-occurrence) order and sorted() is stable.
    ranked = sorted(counts, key=lambda v: -counts[v])
    return ValueSample(values=tuple(ranked[:k]), k=k)


def truncate_description(text: str, limit: int = MAX_DESCRIPTION_CHARS) -> str:
    """Shorten *text* to at most *limit* characters, cutting at a word boundary."""
    if len(text) <= limit:
        return text
    budget = limit - len(TRUNCATION_MARKER)
    head = text[: budget + 1]
    cut = max(head.rfind(" "), head.rfind("\n"), head.rfind("\t"))
    if cut <= 0:
        cut = budget
    return text[:cut].rstrip() + TRUNCATION_MARKER
