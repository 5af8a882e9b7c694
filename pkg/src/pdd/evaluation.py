"""Binary evaluation of column verdicts: confusion matrix, macro/micro F1,
balanced accuracy, the DeSSI class mapping, and comparison reports.

Personal is the positive class throughout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from pdd.corpus import AnnotationSet
from pdd.errors import (
    EmptyEvaluation,
    MalformedInput,
    MissingLabel,
    SingleClassTruth,
    UnknownClass,
)
from pdd.verdicts import ColumnVerdict


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def transposed(self) -> "ConfusionMatrix":
        """The same matrix with non-personal taken as the positive class."""
        return ConfusionMatrix(tp=self.tn, fp=self.fn, fn=self.fp, tn=self.tp)

    def to_json(self) -> dict[str, int]:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


def _pairs(preds: Iterable[ColumnVerdict | tuple[str, bool]] | Mapping[str, bool]):
    if isinstance(preds, Mapping):
        return list(preds.items())
    out = []
    for p in preds:
        if isinstance(p, ColumnVerdict):
            out.append((p.column, p.personal))
        else:
            name, personal = p
            out.append((name, bool(personal)))
    return out


def confusion(
    preds: Iterable[ColumnVerdict | tuple[str, bool]] | Mapping[str, bool],
    truth: AnnotationSet | Mapping[str, bool],
) -> ConfusionMatrix:
    tp = fp = fn = tn = 0
    for name, predicted in _pairs(preds):
        if name not in truth:
            raise MissingLabel(name)
        actual = truth[name]
        if predicted and actual:
            tp += 1
        elif predicted:
            fp += 1
        elif actual:
            fn += 1
        else:
            tn += 1
    return ConfusionMatrix(tp, fp, fn, tn)


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def _f1(tp: int, fp: int, fn: int) -> float:
    # Count form of 2PR/(P+R); zero when the class never occurs on either side.
    return _ratio(2 * tp, 2 * tp + fp + fn)


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float

    def to_json(self) -> dict[str, float]:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


def class_scores(cm: ConfusionMatrix) -> dict[str, ClassScores]:
    return {
        "personal": ClassScores(
            _ratio(cm.tp, cm.tp + cm.fp), _ratio(cm.tp, cm.tp + cm.fn), _f1(cm.tp, cm.fp, cm.fn)
        ),
        "non_personal": ClassScores(
            _ratio(cm.tn, cm.tn + cm.fn), _ratio(cm.tn, cm.tn + cm.fp), _f1(cm.tn, cm.fn, cm.fp)
        ),
    }


def _require_rows(cm: ConfusionMatrix) -> None:
    if cm.n == 0:
        raise EmptyEvaluation("no evaluated columns")


def macro_f1(cm: ConfusionMatrix) -> float:
    _require_rows(cm)
    return (_f1(cm.tp, cm.fp, cm.fn) + _f1(cm.tn, cm.fn, cm.fp)) / 2


def micro_f1(cm: ConfusionMatrix) -> float:
    """F1 over counts pooled across both classes.

    Every wrong column is a false positive of one class and a false
    negative of the other, so this equals accuracy.
    """
    _require_rows(cm)
    pooled_tp = cm.tp + cm.tn
    pooled_fp = cm.fp + cm.fn
    pooled_fn = cm.fn + cm.fp
    score = _f1(pooled_tp, pooled_fp, pooled_fn)
    assert score == (cm.tp + cm.tn) / cm.n
    return score


def balanced_accuracy(cm: ConfusionMatrix) -> float:
    if cm.tp + cm.fn == 0 or cm.tn + cm.fp == 0:
        raise SingleClassTruth("balanced accuracy needs both classes in the ground truth")
    return (cm.tp / (cm.tp + cm.fn) + cm.tn / (cm.tn + cm.fp)) / 2


# DeSSI semantic class -> personal (True) / non-personal (False)
DESSI_CLASSES: dict[str, bool] = {
    "Phone number": True,
    "Address": True,
    "Person": True,
    "Email": True,
    "NIN": True,
    "Date": True,
    "Passport": True,
    "CCN": True,
    "ID Card": True,
    "Sexuality": True,
    "Gender": True,
    "Nationality": True,
    "Race": True,
    "Religion": True,
    "IBAN": True,
    "Other data": False,
    "Organization": False,
    "GPE": False,
    "SWIFT/BIC": False,
    "Geolocation": False,
}


def map_dessi(labels: Iterable[str]) -> bool:
    """Personal iff at least one of the column's DeSSI classes is personal."""
    personal = False
    for name in labels:
        try:
            personal = DESSI_CLASSES[name] or personal
        except KeyError:
            raise UnknownClass(name) from None
    return personal


@dataclass
class MetricsReport:
    detector_id: str
    dataset_id: str
    macro_f1: float
    micro_f1: float
    balanced_accuracy: float | None
    n_columns: int
    per_class: dict[str, ClassScores] = field(default_factory=dict)
    confusion: ConfusionMatrix | None = None
    errors: int = 0
    config: dict[str, Any] | None = None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "detector_id": self.detector_id,
            "dataset_id": self.dataset_id,
            "n_columns": self.n_columns,
            "macro_f1": self.macro_f1,
            "micro_f1": self.micro_f1,
            "balanced_accuracy": self.balanced_accuracy,
            "per_class": {k: v.to_json() for k, v in self.per_class.items()},
            "errors": self.errors,
        }
        if self.confusion is not None:
            out["confusion"] = self.confusion.to_json()
        if self.config is not None:
            out["config"] = self.config
        return out

    @classmethod
    def from_json(cls, data: Any, source: str = "<metrics>") -> "MetricsReport":
        if not isinstance(data, dict):
            raise MalformedInput(f"{source}: expected a JSON object")
        try:
            per_class = {
                k: ClassScores(float(v["precision"]), float(v["recall"]), float(v["f1"]))
                for k, v in (data.get("per_class") or {}).items()
            }
            cm = data.get("confusion")
            ba = data.get("balanced_accuracy")
            report = cls(
                detector_id=str(data["detector_id"]),
                dataset_id=str(data["dataset_id"]),
                macro_f1=float(data["macro_f1"]),
                micro_f1=float(data["micro_f1"]),
                balanced_accuracy=None if ba is None else float(ba),
                n_columns=int(data.get("n_columns", 0)),
                per_class=per_class,
                confusion=ConfusionMatrix(**cm) if cm is not None else None,
                errors=int(data.get("errors", 0)),
                config=data.get("config"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"{source}: {exc}") from exc
        for name in ("macro_f1", "micro_f1", "balanced_accuracy"):
            value = getattr(report, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise MalformedInput(f"{source}: {name}={value} outside [0, 1]")
        return report


def evaluate(
    cm: ConfusionMatrix,
    detector_id: str,
    dataset_id: str,
    errors: int = 0,
    config: dict[str, Any] | None = None,
) -> MetricsReport:
    """All metrics for one (detector, dataset) pair.

    Balanced accuracy is None when the ground truth holds a single class.
    """
    try:
        ba: float | None = balanced_accuracy(cm)
    except SingleClassTruth:
        ba = None
    return MetricsReport(
        detector_id=detector_id,
        dataset_id=dataset_id,
        macro_f1=macro_f1(cm),
        micro_f1=micro_f1(cm),
        balanced_accuracy=ba,
        n_columns=cm.n,
        per_class=class_scores(cm),
        confusion=cm,
        errors=errors,
        config=config,
    )


# -- predictions and metrics files -----------------------------------------


@dataclass(frozen=True)
class PredictionRecord:
    column: str
    personal: bool | None
    detector: str
    evidence: Any = None
    error: str | None = None


def read_predictions(path: str | Path) -> list[PredictionRecord]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"cannot read predictions {path}: {exc}") from exc
    if not isinstance(data, list):
        raise MalformedInput(f"{path}: expected a JSON array")
    records = []
    for i, item in enumerate(data):
        if not isinstance(item, dict) or not isinstance(item.get("column"), str):
            raise MalformedInput(f"{path}[{i}]: entry needs a 'column' string")
        personal = item.get("personal")
        error = item.get("error")
        if personal is None and error is None:
            raise MalformedInput(f"{path}[{i}]: entry has neither 'personal' nor 'error'")
        if personal is not None and not isinstance(personal, bool):
            raise MalformedInput(f"{path}[{i}]: 'personal' must be a boolean")
        records.append(
            PredictionRecord(
                column=item["column"],
                personal=personal,
                detector=str(item.get("detector", "")),
                evidence=item.get("evidence"),
                error=error,
            )
        )
    return records


def evaluate_predictions(
    records: Sequence[PredictionRecord],
    truth: AnnotationSet | Mapping[str, bool],
    detector_id: str | None = None,
    dataset_id: str = "",
    config: dict[str, Any] | None = None,
) -> MetricsReport:
    """Score prediction records; error entries are counted, not scored."""
    scored = [(r.column, r.personal) for r in records if r.error is None]
    errors = len(records) - len(scored)
    cm = confusion(scored, truth)
    if detector_id is None:
        detector_id = next((r.detector for r in records if r.detector), "unknown")
    return evaluate(cm, detector_id, dataset_id, errors=errors, config=config)


def write_json(data: Any, path: str | Path) -> None:
    Path(path).write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def read_metrics(path: str | Path) -> MetricsReport:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"cannot read metrics {path}: {exc}") from exc
    return MetricsReport.from_json(data, source=str(path))


# -- comparison grid ---------------------------------------------------------

METRIC_ROWS = (
    ("macro_f1", "Macro F1"),
    ("micro_f1", "Micro F1"),
    ("balanced_accuracy", "Balanced Acc."),
)


def _dec(value: float) -> Decimal:
    # repr() gives the shortest decimal that round-trips, e.g. 0.793 not 0.79300000000000003.
    return Decimal(repr(value))


def _fmt(value: Decimal | None) -> str:
    if value is None:
        return "n/a"
    return str(value.quantize(Decimal("0.001"), rounding=ROUND_HALF_UP))


@dataclass
class ReportGrid:
    detectors: list[str]
    datasets: list[str]
    # cells[dataset][metric][detector]
    cells: dict[str, dict[str, dict[str, Decimal | None]]]
    average: dict[str, dict[str, Decimal | None]] | None


def build_grid(reports: Sequence[MetricsReport]) -> ReportGrid:
    """Group reports by dataset; add an unweighted per-detector mean over
    datasets when there is more than one dataset."""
    if not reports:
        raise MalformedInput("no metrics reports given")
    detectors: list[str] = []
    datasets: list[str] = []
    cells: dict[str, dict[str, dict[str, Decimal | None]]] = {}
    for r in reports:
        if r.detector_id not in detectors:
            detectors.append(r.detector_id)
        if r.dataset_id not in datasets:
            datasets.append(r.dataset_id)
            cells[r.dataset_id] = {m: {} for m, _ in METRIC_ROWS}
        block = cells[r.dataset_id]
        if r.detector_id in block["macro_f1"]:
            raise MalformedInput(f"duplicate report for {r.detector_id!r} on {r.dataset_id!r}")
        for metric, _ in METRIC_ROWS:
            value = getattr(r, metric)
            block[metric][r.detector_id] = None if value is None else _dec(value)

    average = None
    if len(datasets) > 1:
        average = {}
        for metric, _ in METRIC_ROWS:
            average[metric] = {}
            for det in detectors:
                vals = [cells[d][metric].get(det) for d in datasets]
                vals = [v for v in vals if v is not None]
                average[metric][det] = sum(vals, Decimal(0)) / len(vals) if vals else None
    return ReportGrid(detectors, datasets, cells, average)


def _grid_json(grid: ReportGrid) -> dict[str, Any]:
    def conv(row: Mapping[str, Decimal | None]) -> dict[str, float | None]:
        return {det: (None if row.get(det) is None else float(row[det])) for det in grid.detectors}

    out: dict[str, Any] = {
        "detectors": grid.detectors,
        "datasets": [
            {"dataset": d, **{m: conv(grid.cells[d][m]) for m, _ in METRIC_ROWS}}
            for d in grid.datasets
        ],
    }
    if grid.average is not None:
        out["average"] = {m: conv(grid.average[m]) for m, _ in METRIC_ROWS}
    return out


def _grid_markdown(grid: ReportGrid) -> str:
    lines = [
        "| Dataset | Metric | " + " | ".join(grid.detectors) + " |",
        "|---|---|" + "---:|" * len(grid.detectors),
    ]
    blocks = [(d, grid.cells[d]) for d in grid.datasets]
    if grid.average is not None:
        blocks.append(("Average", grid.average))
    for name, block in blocks:
        for i, (metric, label) in enumerate(METRIC_ROWS):
            values = " | ".join(_fmt(block[metric].get(det)) for det in grid.detectors)
            lines.append(f"| {name if i == 0 else ''} | {label} | {values} |")
    return "\n".join(lines) + "\n"


def render_report(reports: Sequence[MetricsReport], format: str = "markdown") -> str:
    grid = build_grid(reports)
    if format == "markdown":
        return _grid_markdown(grid)
    if format == "json":
        return json.dumps(_grid_json(grid), indent=2, ensure_ascii=False) + "\n"
    raise ValueError(f"unknown report format {format!r}")
