from __future__ import annotations

import json
from pathlib import Path

import pytest

from pdd.cli import EXIT_OK, EXIT_PARTIAL, EXIT_USAGE, main
from tests.conftest import DATA, GOLDEN


@pytest.fixture
def small_csv(tmp_path) -> Path:
    rows = ["contact,homepage,age"]
    for i in range(6):
        rows.append(f"user{i}@example.org,https://site{i}.com/about,{30 + i}")
    path = tmp_path / "small.csv"
    path.write_text("\n".join(rows) + "\n")
    return path


def _preds(path: Path) -> dict[str, bool | None]:
    return {e["column"]: e["personal"] for e in json.loads(path.read_text())}


def test_scan_rules(tmp_path, small_csv, capsys) -> None:
    out = tmp_path / "small.preds.json"
    assert main(["scan", str(small_csv), "--out", str(out)]) == EXIT_OK
    assert _preds(out) == {"contact": True, "homepage": False, "age": False}
    run = json.loads((tmp_path / "small.run.json").read_text())
    assert run["dataset_id"] == "small" and run["errors"] == 0
    assert run["config"]["policy"]["min_hits"] == 3
    assert "3 columns scanned" in capsys.readouterr().out


def test_scan_llm_mock(tmp_path, absenteeism_paths) -> None:
    out = tmp_path / "abs.preds.json"
    code = main([
        "scan", str(absenteeism_paths["csv"]), "--meta", str(absenteeism_paths["meta"]),
        "--detector", "llm", "--mock", str(absenteeism_paths["mock"]), "--workers", "4",
        "--out", str(out),
    ])
    assert code == EXIT_OK
    preds = _preds(out)
    assert preds["ID"] is True and preds["Seasons"] is False
    assert len(preds) == 21
    run = json.loads((tmp_path / "abs.run.json").read_text())
    assert run["requests"] == 21 and run["dataset_id"] == "Absenteeism at Work"


def test_scan_llm_needs_meta(tmp_path, absenteeism_paths, capsys) -> None:
    code = main([
        "scan", str(absenteeism_paths["csv"]), "--detector", "llm",
        "--mock", str(absenteeism_paths["mock"]), "--out", str(tmp_path / "x.json"),
    ])
    assert code == EXIT_USAGE
    assert "--meta" in capsys.readouterr().err
    assert not (tmp_path / "x.json").exists()


def test_scan_llm_needs_transport(tmp_path, absenteeism_paths) -> None:
    code = main([
        "scan", str(absenteeism_paths["csv"]), "--meta", str(absenteeism_paths["meta"]),
        "--detector", "llm", "--out", str(tmp_path / "x.json"),
    ])
    assert code == EXIT_USAGE


def test_scan_partial_failure(tmp_path, absenteeism_paths) -> None:
    script = json.loads(absenteeism_paths["mock"].read_text())
    script["Age"] = "It depends on the context."
    mock = tmp_path / "mock.json"
    mock.write_text(json.dumps(script))
    out = tmp_path / "abs.preds.json"
    code = main([
        "scan", str(absenteeism_paths["csv"]), "--meta", str(absenteeism_paths["meta"]),
        "--detector", "llm", "--mock", str(mock), "--max-retries", "1", "--out", str(out),
    ])
    assert code == EXIT_PARTIAL
    assert _preds(out)["Age"] is None
    run = json.loads((tmp_path / "abs.run.json").read_text())
    # one first attempt per column plus one retry for the unparseable column
    assert run["errors"] == 1 and run["requests"] == 22

    metrics = tmp_path / "m.json"
    assert main(["eval", "--preds", str(out), "--labels", str(absenteeism_paths["labels"]),
                 "--out", str(metrics)]) == EXIT_OK
    report = json.loads(metrics.read_text())
    assert report["errors"] == 1 and report["n_columns"] == 20 and report["macro_f1"] == 1.0


def test_eval_perfect(tmp_path, absenteeism_paths, capsys) -> None:
    preds = tmp_path / "p.preds.json"
    labels = json.loads(absenteeism_paths["labels"].read_text())
    preds.write_text(json.dumps([{"column": c, "personal": v, "detector": "llm"} for c, v in labels.items()]))
    out = tmp_path / "m.json"
    assert main(["eval", "--preds", str(preds), "--labels", str(absenteeism_paths["labels"]), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["macro_f1"] == report["micro_f1"] == report["balanced_accuracy"] == 1.0
    assert report["dataset_id"] == "absenteeism" and report["detector_id"] == "llm"
    assert "macro F1:          1.000" in capsys.readouterr().out


def test_eval_four_columns(tmp_path) -> None:
    preds = tmp_path / "p.json"
    preds.write_text(json.dumps([
        {"column": "a", "personal": True, "detector": "rules"},
        {"column": "b", "personal": True, "detector": "rules"},
        {"column": "c", "personal": False, "detector": "rules"},
        {"column": "d", "personal": False, "detector": "rules"},
    ]))
    labels = tmp_path / "l.json"
    labels.write_text(json.dumps({"a": True, "b": False, "c": True, "d": False}))
    out = tmp_path / "m.json"
    assert main(["eval", "--preds", str(preds), "--labels", str(labels), "--out", str(out),
                 "--dataset-id", "toy"]) == EXIT_OK
    report = json.loads(out.read_text())
    assert report["confusion"] == {"tp": 1, "fp": 1, "fn": 1, "tn": 1}
    assert report["macro_f1"] == report["micro_f1"] == report["balanced_accuracy"] == 0.5
    assert report["dataset_id"] == "toy"


def test_eval_missing_label(tmp_path, capsys) -> None:
    preds = tmp_path / "p.json"
    preds.write_text(json.dumps([{"column": "zz", "personal": True, "detector": "rules"}]))
    labels = tmp_path / "l.json"
    labels.write_text(json.dumps({"a": True}))
    assert main(["eval", "--preds", str(preds), "--labels", str(labels), "--out", str(tmp_path / "m.json")]) == EXIT_USAGE
    assert "zz" in capsys.readouterr().err


def test_prompt_golden(absenteeism_paths, capsys) -> None:
    code = main(["prompt", str(absenteeism_paths["csv"]), "--meta", str(absenteeism_paths["meta"]), "--column", "ID"])
    assert code == EXIT_OK
    assert capsys.readouterr().out == (GOLDEN / "absenteeism_id.transcript.txt").read_text(encoding="utf-8")


def test_prompt_json(absenteeism_paths, capsys) -> None:
    main(["prompt", str(absenteeism_paths["csv"]), "--meta", str(absenteeism_paths["meta"]),
          "--column", "Age", "--format", "json"])
    wire = json.loads(capsys.readouterr().out)
    assert [m["role"] for m in wire] == ["system", "user", "assistant", "user"]
    assert "\n'Age': [" in wire[3]["content"]


def test_prompt_unknown_column(absenteeism_paths, capsys) -> None:
    code = main(["prompt", str(absenteeism_paths["csv"]), "--meta", str(absenteeism_paths["meta"]), "--column", "Nope"])
    assert code == EXIT_USAGE
    assert "Nope" in capsys.readouterr().err


def test_report(tmp_path, capsys) -> None:
    files = sorted(str(p) for p in (DATA / "published_grid").glob("dessi__*.json"))
    out = tmp_path / "r.md"
    assert main(["report", *files, "--out", str(out)]) == EXIT_OK
    assert out.read_text() == capsys.readouterr().out
    assert "Average" not in out.read_text()


def test_config_file_precedence(tmp_path, small_csv) -> None:
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"rules": {"min_hits": 50}, "scan": {"workers": 2}}))
    out = tmp_path / "a.preds.json"
    assert main(["scan", str(small_csv), "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    # only six rows, so 50 hits can never be reached
    assert _preds(out)["contact"] is False
    run = json.loads((tmp_path / "a.run.json").read_text())
    assert run["config"]["workers"] == 2 and run["config"]["policy"]["min_hits"] == 50

    out2 = tmp_path / "b.preds.json"
    assert main(["scan", str(small_csv), "--config", str(cfg), "--min-hits", "3", "--out", str(out2)]) == EXIT_OK
    assert _preds(out2)["contact"] is True


@pytest.mark.parametrize("section", [{"llm": {"api_key": "sk-123"}}, {"scan": {"Token": "x"}}])
def test_config_rejects_secrets(tmp_path, small_csv, section, capsys) -> None:
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(section))
    assert main(["scan", str(small_csv), "--config", str(cfg), "--out", str(tmp_path / "o.json")]) == EXIT_USAGE
    assert "environment" in capsys.readouterr().err


def test_config_unknown_section(tmp_path, small_csv) -> None:
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"extra": {}}))
    assert main(["scan", str(small_csv), "--config", str(cfg), "--out", str(tmp_path / "o.json")]) == EXIT_USAGE


def test_api_key_never_recorded(tmp_path, small_csv, monkeypatch) -> None:
    monkeypatch.setenv("PDD_API_KEY", "sk-very-secret")
    out = tmp_path / "k.preds.json"
    main(["scan", str(small_csv), "--out", str(out)])
    assert "sk-very-secret" not in (tmp_path / "k.run.json").read_text()


def test_usage_errors() -> None:
    assert main([]) == EXIT_USAGE
    assert main(["scan", "x.csv"]) == EXIT_USAGE
    assert main(["scan", "missing.csv", "--out", "o.json", "--workers", "0"]) == EXIT_USAGE
