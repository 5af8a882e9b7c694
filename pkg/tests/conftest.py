from __future__ import annotations

from pathlib import Path

import pytest

from pdd.corpus import Dataset, build_dataset

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"
ABSENTEEISM = DATA / "absenteeism"


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")
    config._acceptance = {}  # type: ignore[attr-defined]


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item: pytest.Item, call: pytest.CallInfo):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when not in ("setup", "call"):
        return
    if rep.when == "setup" and rep.passed:
        return
    results = item.config._acceptance  # type: ignore[attr-defined]
    number, text = marker.args
    ok = rep.passed
    prev = results.get(number, (text, True))
    results[number] = (text, prev[1] and ok)


def pytest_terminal_summary(terminalreporter, exitstatus, config: pytest.Config) -> None:
    results = getattr(config, "_acceptance", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        text, ok = results[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {text}")


@pytest.fixture
def absenteeism_paths() -> dict[str, Path]:
    return {
        "csv": ABSENTEEISM / "absenteeism.csv",
        "meta": ABSENTEEISM / "absenteeism.meta.json",
        "labels": ABSENTEEISM / "absenteeism.labels.json",
        "mock": ABSENTEEISM / "absenteeism.mock.json",
    }


@pytest.fixture
def absenteeism(absenteeism_paths) -> Dataset:
    from pdd.corpus import load_dataset

    return load_dataset(absenteeism_paths["csv"], absenteeism_paths["meta"])


def make_dataset(grid: dict[str, list[str]], title: str = "T", description: str = "D") -> Dataset:
    header = list(grid)
    n = len(next(iter(grid.values())))
    rows = [[grid[h][r] for h in header] for r in range(n)]
    return build_dataset(title, description, header, rows)
