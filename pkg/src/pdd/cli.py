"""``pdd`` command line: scan, eval, prompt, report.

Exit codes: 0 success, 1 usage or configuration error, 2 scan finished
but at least one column failed.

Settings resolve as flags > ``--config`` file > built-in defaults. The
config file is JSON with ``scan``, ``rules`` and ``llm`` sections. API keys
are only ever read from the environment variable named by
``llm.api_key_source`` (default ``PDD_API_KEY``).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Sequence

from pdd import __version__
from pdd.corpus import DEFAULT_SAMPLE_SIZE, load_annotations, load_dataset
from pdd.errors import ColumnNotInDataset, ConfigError, PddError, UnknownColumn
from pdd.evaluation import (
    evaluate_predictions,
    read_metrics,
    read_predictions,
    render_report,
    write_json,
)
from pdd.llm import HttpTransport, MockTransport, TransportConfig, build_conversation
from pdd.rules import AggregationPolicy
from pdd.rules.recognizers import build_recognizers
from pdd.scan import run_sidecar_path, scan_llm, scan_rules, write_predictions

log = logging.getLogger("pdd")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARTIAL = 2

_SECRET_KEYS = {"api_key", "key", "token", "secret", "password"}


@dataclass
class RunConfig:
    detector: str = "rules"
    values_per_column: int = DEFAULT_SAMPLE_SIZE
    workers: int = 1
    policy: AggregationPolicy = field(default_factory=AggregationPolicy)
    transport: TransportConfig = field(default_factory=TransportConfig)
    names_path: str | None = None
    locations_path: str | None = None
    dataset: str = ""
    meta: str | None = None
    mock: str | None = None
    out: str = ""
    delimiter: str = ","

    def validate(self) -> None:
        if self.detector not in ("rules", "llm"):
            raise ConfigError(f"unknown detector {self.detector!r}")
        if self.values_per_column < 1:
            raise ConfigError("values-per-column must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.detector == "llm":
            if not self.mock and not self.transport.endpoint_url:
                raise ConfigError("llm detector needs --endpoint or --mock")
            if not self.meta or not Path(self.meta).is_file():
                raise ConfigError("llm detector needs a readable --meta sidecar (title and description)")

    def public(self) -> dict[str, Any]:
        """Effective configuration for run records; holds no secrets."""
        out = asdict(self)
        out["transport"] = self.transport.to_public_dict()
        return out


def _read_config_file(path: str | None) -> dict[str, dict[str, Any]]:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict) or not all(isinstance(v, dict) for v in data.values()):
        raise ConfigError(f"{path}: expected an object of sections")
    unknown = set(data) - {"scan", "rules", "llm"}
    if unknown:
        raise ConfigError(f"{path}: unknown sections {sorted(unknown)}")
    for section in data.values():
        leaked = _SECRET_KEYS & {k.lower() for k in section}
        if leaked:
            raise ConfigError(f"{path}: secrets belong in the environment, not {sorted(leaked)}")
    return data


def _pick(flag: Any, section: dict[str, Any], key: str, default: Any) -> Any:
    if flag is not None:
        return flag
    return section.get(key, default)


def build_run_config(args: argparse.Namespace) -> RunConfig:
    cfg_file = _read_config_file(args.config)
    scan = cfg_file.get("scan", {})
    rules = cfg_file.get("rules", {})
    llm = cfg_file.get("llm", {})

    policy_defaults = AggregationPolicy()
    try:
        policy = AggregationPolicy(
            min_hits=_pick(args.min_hits, rules, "min_hits", policy_defaults.min_hits),
            min_confidence=_pick(args.min_conf, rules, "min_confidence", policy_defaults.min_confidence),
            strategy=_pick(args.strategy, rules, "strategy", policy_defaults.strategy),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    known = {f.name for f in fields(TransportConfig)}
    bad = set(llm) - known
    if bad:
        raise ConfigError(f"unknown llm settings {sorted(bad)}")
    t = dict(llm)
    for key, flag in (
        ("endpoint_url", args.endpoint),
        ("model_id", args.model),
        ("api_key_source", args.api_key_env),
        ("temperature", args.temperature),
        ("seed", args.seed),
        ("timeout", args.timeout),
        ("max_retries", args.max_retries),
        ("max_inflight", args.max_inflight),
    ):
        if flag is not None:
            t[key] = flag
    transport = TransportConfig(**t)

    cfg = RunConfig(
        detector=_pick(args.detector, scan, "detector", "rules"),
        values_per_column=_pick(args.values_per_column, scan, "values_per_column", DEFAULT_SAMPLE_SIZE),
        workers=_pick(args.workers, scan, "workers", 1),
        policy=policy,
        transport=transport,
        names_path=_pick(args.names, rules, "names_path", None),
        locations_path=_pick(args.locations, rules, "locations_path", None),
        dataset=args.dataset,
        meta=args.meta,
        mock=args.mock,
        out=args.out,
        delimiter=_pick(args.delimiter, scan, "delimiter", ","),
    )
    cfg.validate()
    return cfg


def cmd_scan(args: argparse.Namespace) -> int:
    cfg = build_run_config(args)
    ds = load_dataset(cfg.dataset, cfg.meta, delimiter=cfg.delimiter)
    requests = 0
    if cfg.detector == "rules":
        recognizers = build_recognizers(cfg.names_path, cfg.locations_path)
        results = scan_rules(ds, cfg.policy, workers=cfg.workers, recognizers=recognizers)
    else:
        if cfg.mock:
            transport: MockTransport | HttpTransport = MockTransport.from_file(cfg.mock, cfg.transport)
        else:
            transport = HttpTransport(cfg.transport)
        results = scan_llm(ds, transport, k=cfg.values_per_column, workers=cfg.workers)
        requests = transport.request_count

    write_predictions(results, cfg.out)
    errors = sum(1 for r in results if not r.ok)
    write_json(
        {
            "dataset_id": ds.title,
            "dataset_path": cfg.dataset,
            "detector": cfg.detector,
            "columns": len(results),
            "errors": errors,
            "requests": requests,
            "config": cfg.public(),
        },
        run_sidecar_path(cfg.out),
    )
    personal = sum(1 for r in results if r.verdict is not None and r.verdict.personal)
    print(f"{len(results)} columns scanned: {personal} personal, {errors} errors -> {cfg.out}")
    return EXIT_PARTIAL if errors else EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    records = read_predictions(args.preds)
    truth = load_annotations(args.labels)
    sidecar: dict[str, Any] = {}
    run_path = run_sidecar_path(args.preds)
    if run_path.exists():
        try:
            sidecar = json.loads(run_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            log.warning("ignoring unreadable run record %s", run_path)
    dataset_id = args.dataset_id or sidecar.get("dataset_id") or Path(args.labels).name.split(".")[0]
    report = evaluate_predictions(
        records,
        truth,
        detector_id=args.detector_id,
        dataset_id=dataset_id,
        config=sidecar.get("config"),
    )
    write_json(report.to_json(), args.out)
    ba = "n/a" if report.balanced_accuracy is None else f"{report.balanced_accuracy:.3f}"
    print(f"macro F1:          {report.macro_f1:.3f}")
    print(f"micro F1:          {report.micro_f1:.3f}")
    print(f"balanced accuracy: {ba}")
    if report.errors:
        print(f"({report.errors} errored columns excluded)")
    return EXIT_OK


def cmd_prompt(args: argparse.Namespace) -> int:
    ds = load_dataset(args.dataset, args.meta, delimiter=args.delimiter)
    try:
        col = ds.column(args.column)
    except UnknownColumn:
        raise ColumnNotInDataset(args.column) from None
    conv = build_conversation(ds, col, args.values_per_column)
    if args.format == "json":
        sys.stdout.write(json.dumps(conv.to_wire(), indent=2, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write(conv.render())
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    reports = [read_metrics(p) for p in args.metrics]
    text = render_report(reports, args.format)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdd", description="Personal-data detection for tabular datasets.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", help="classify every column of a dataset")
    scan.add_argument("dataset", help="CSV file with a header row")
    scan.add_argument("--meta", help="metadata sidecar with title and description")
    scan.add_argument("--detector", choices=("rules", "llm"))
    scan.add_argument("--values-per-column", type=int, help="top-k values shown to the LLM (default 10)")
    scan.add_argument("--min-hits", type=int, help="entity hits needed per column (default 3)")
    scan.add_argument("--min-conf", type=float, help="minimum hit confidence (default 0.4)")
    scan.add_argument("--strategy", choices=("columnwise", "rowwise"))
    scan.add_argument("--names", help="override the given-name word list")
    scan.add_argument("--locations", help="override the location word list")
    scan.add_argument("--endpoint", help="chat-completion URL")
    scan.add_argument("--model", help="model id sent to the endpoint")
    scan.add_argument("--api-key-env", help="environment variable holding the API key")
    scan.add_argument("--temperature", type=float)
    scan.add_argument("--seed", type=int)
    scan.add_argument("--timeout", type=float, help="per-request timeout in seconds")
    scan.add_argument("--max-retries", type=int)
    scan.add_argument("--max-inflight", type=int)
    scan.add_argument("--mock", help="offline mock script {column: reply|bool}")
    scan.add_argument("--workers", type=int)
    scan.add_argument("--delimiter")
    scan.add_argument("--config", help="JSON config file with scan/rules/llm sections")
    scan.add_argument("--out", required=True, help="predictions file to write")
    scan.set_defaults(func=cmd_scan)

    ev = sub.add_parser("eval", help="score predictions against labels")
    ev.add_argument("--preds", required=True)
    ev.add_argument("--labels", required=True)
    ev.add_argument("--out", required=True)
    ev.add_argument("--dataset-id")
    ev.add_argument("--detector-id")
    ev.set_defaults(func=cmd_eval)

    pr = sub.add_parser("prompt", help="print the conversation sent for one column")
    pr.add_argument("dataset")
    pr.add_argument("--meta", required=True)
    pr.add_argument("--column", required=True)
    pr.add_argument("--values-per-column", type=int, default=DEFAULT_SAMPLE_SIZE)
    pr.add_argument("--format", choices=("text", "json"), default="text")
    pr.add_argument("--delimiter", default=",")
    pr.set_defaults(func=cmd_prompt)

    rep = sub.add_parser("report", help="render a detector x dataset comparison grid")
    rep.add_argument("metrics", nargs="+")
    rep.add_argument("--format", choices=("markdown", "json"), default="markdown")
    rep.add_argument("--out")
    rep.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except PddError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
