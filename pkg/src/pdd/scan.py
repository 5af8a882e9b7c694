"""Run a detector over every column of a dataset and write predictions.

Columns are processed by a bounded thread pool; results always come back
in dataset column order, so output files do not depend on the number of
workers.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

from pdd.corpus import DEFAULT_SAMPLE_SIZE, Column, Dataset
from pdd.errors import PddError
from pdd.llm import classify_column_llm, to_column_verdict
from pdd.llm.transport import Transport
from pdd.rules import AggregationPolicy, classify_column_rules, classify_dataset_rules
from pdd.rules.recognizers import Recognizer
from pdd.verdicts import ColumnVerdict

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScanResult:
    column: str
    detector: str
    verdict: ColumnVerdict | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_json(self) -> dict[str, Any]:
        if self.verdict is not None:
            return self.verdict.to_json()
        return {"column": self.column, "personal": None, "detector": self.detector, "error": self.error}


def _run(
    ds: Dataset, detector: str, fn: Callable[[Column], ColumnVerdict], workers: int
) -> list[ScanResult]:
    if workers < 1:
        raise ValueError("workers must be >= 1")

    def one(col: Column) -> ScanResult:
        try:
            return ScanResult(col.name, detector, verdict=fn(col))
        except PddError as exc:
            log.error("column %r: %s", col.name, exc)
            return ScanResult(col.name, detector, error=f"{type(exc).__name__}: {exc}")

    if workers == 1:
        return [one(col) for col in ds.columns]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, ds.columns))


def scan_rules(
    ds: Dataset,
    policy: AggregationPolicy | None = None,
    workers: int = 1,
    recognizers: Sequence[Recognizer] | None = None,
) -> list[ScanResult]:
    policy = policy or AggregationPolicy()
    if policy.strategy == "rowwise":
        # Row texts span all columns, so there is nothing to split per column.
        return [
            ScanResult(v.column, "rules", verdict=v)
            for v in classify_dataset_rules(ds, policy, recognizers)
        ]
    return _run(ds, "rules", lambda col: classify_column_rules(col, policy, recognizers), workers)


def scan_llm(
    ds: Dataset, transport: Transport, k: int = DEFAULT_SAMPLE_SIZE, workers: int = 1
) -> list[ScanResult]:
    return _run(
        ds, "llm", lambda col: to_column_verdict(classify_column_llm(ds, col, transport, k)), workers
    )


def predictions_json(results: Sequence[ScanResult]) -> str:
    return json.dumps([r.to_json() for r in results], indent=2, ensure_ascii=False) + "\n"


def write_predictions(results: Sequence[ScanResult], path: str | Path) -> None:
    Path(path).write_text(predictions_json(results), encoding="utf-8")


def run_sidecar_path(preds_path: str | Path) -> Path:
    """``x.preds.json`` -> ``x.run.json``; ``x.json`` -> ``x.run.json``."""
    p = Path(preds_path)
    name = p.name
    for suffix in (".preds.json", ".json"):
        if name.endswith(suffix):
            name = name[: -len(suffix)]
            break
    return p.with_name(name + ".run.json")
