"""Column verdicts from entity hits.

Tables are turned into text first, either one text per column (column
name plus its values) or one text per row. Hits are then tallied per
column and filtered by two thresholds: a minimum confidence per hit and a
minimum number of qualifying hits per entity kind. A column is personal
iff some surviving kind maps to personal.
"""

from __future__ import annotations

import bisect
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

from pdd.corpus import Column, Dataset
from pdd.errors import EmptyColumn, RowOutOfRange
from pdd.rules.recognizers import (
    ENTITY_CLASS,
    EntityHit,
    EntityKind,
    Recognizer,
    build_recognizers,
    recognize,
)
from pdd.verdicts import ColumnVerdict

DETECTOR_ID = "rules"
HEADER_CELL = -1

Strategy = Literal["columnwise", "rowwise"]


@dataclass(frozen=True)
class AggregationPolicy:
    min_hits: int = 3
    min_confidence: float = 0.4
    strategy: Strategy = "columnwise"

    def __post_init__(self) -> None:
        if self.min_hits < 1:
            raise ValueError("min_hits must be >= 1")
        if not 0.0 <= self.min_confidence <= 1.0:
            raise ValueError("min_confidence must lie in [0, 1]")
        if self.strategy not in ("columnwise", "rowwise"):
            raise ValueError(f"unknown strategy {self.strategy!r}")


def _one_line(value: str) -> str:
    return value.replace("\r\n", " ").replace("\n", " ").replace("\r", " ")


def serialize_columnwise(col: Column) -> str:
    values = col.non_empty()
    if not values:
        raise EmptyColumn(f"column {col.name!r} has no non-empty values")
    return "\n".join([_one_line(col.name)] + [_one_line(v) for v in values])


def serialize_rowwise(ds: Dataset, row: int) -> str:
    if not 0 <= row < ds.n_rows:
        raise RowOutOfRange(f"row {row} outside 0..{ds.n_rows - 1}")
    return " ".join(v for v in ds.row(row) if v != "")


def _verdict(name: str, hits: Iterable[EntityHit], policy: AggregationPolicy) -> ColumnVerdict:
    counts = Counter(h.kind for h in hits if h.confidence >= policy.min_confidence)
    surviving = sorted((k for k, n in counts.items() if n >= policy.min_hits), key=lambda k: k.value)
    personal = any(ENTITY_CLASS[k] for k in surviving)
    evidence = {
        "counts": {k.value: counts[k] for k in sorted(counts, key=lambda k: k.value)},
        "entities": [k.value for k in surviving],
    }
    return ColumnVerdict(column=name, personal=personal, detector=DETECTOR_ID, evidence=evidence)


def column_hits(col: Column, recognizers: Sequence[Recognizer] | None = None) -> list[EntityHit]:
    """Hits over the column-wise text; the name line gets cell index -1."""
    lines = serialize_columnwise(col).split("\n")
    rows = [i for i, v in enumerate(col.values) if v != ""]
    hits = recognize(lines[0], HEADER_CELL, recognizers)
    for row, line in zip(rows, lines[1:]):
        hits.extend(recognize(line, row, recognizers))
    return hits


def classify_column_rules(
    col: Column,
    policy: AggregationPolicy | None = None,
    recognizers: Sequence[Recognizer] | None = None,
) -> ColumnVerdict:
    policy = policy or AggregationPolicy()
    return _verdict(col.name, column_hits(col, recognizers), policy)


def rowwise_hits(
    ds: Dataset, recognizers: Sequence[Recognizer] | None = None
) -> list[list[EntityHit]]:
    """Per-column hits from row-wise recognition.

    A hit belongs to the column whose cell contains the start of its
    span; spans running into the next cell are clipped to the cell.
    """
    recs = build_recognizers() if recognizers is None else recognizers
    per_column: list[list[EntityHit]] = [[] for _ in ds.columns]
    for r in range(ds.n_rows):
        cells = [(c, v) for c, v in enumerate(ds.row(r)) if v != ""]
        if not cells:
            continue
        starts, pos = [], 0
        for _, v in cells:
            starts.append(pos)
            pos += len(v) + 1
        text = serialize_rowwise(ds, r)
        for hit in recognize(text, r, recs):
            i = bisect.bisect_right(starts, hit.span[0]) - 1
            col_idx, value = cells[i]
            lo = hit.span[0] - starts[i]
            if lo >= len(value):  # hit starts on the separator
                continue
            hi = min(hit.span[1] - starts[i], len(value))
            per_column[col_idx].append(EntityHit(hit.kind, hit.confidence, r, (lo, hi)))
    return per_column


def classify_dataset_rules(
    ds: Dataset,
    policy: AggregationPolicy | None = None,
    recognizers: Sequence[Recognizer] | None = None,
) -> list[ColumnVerdict]:
    """Verdicts for every column, in column order, under either strategy."""
    policy = policy or AggregationPolicy()
    if policy.strategy == "rowwise":
        per_column = rowwise_hits(ds, recognizers)
        return [_verdict(col.name, hits, policy) for col, hits in zip(ds.columns, per_column)]
    return [classify_column_rules(col, policy, recognizers) for col in ds.columns]


__all__ = [
    "AggregationPolicy",
    "EntityKind",
    "classify_column_rules",
    "classify_dataset_rules",
    "column_hits",
    "rowwise_hits",
    "serialize_columnwise",
    "serialize_rowwise",
]
