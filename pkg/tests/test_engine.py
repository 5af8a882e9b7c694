from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdd.corpus import Column
from pdd.errors import EmptyColumn, RowOutOfRange
from pdd.rules import (
    AggregationPolicy,
    classify_column_rules,
    classify_dataset_rules,
    serialize_columnwise,
    serialize_rowwise,
)
from pdd.rules.engine import rowwise_hits
from tests.conftest import make_dataset

EMAILS = [f"user{i}@example.org" for i in range(10)]
URLS = [f"https://site{i}.com/page" for i in range(10)]


def test_serialize_columnwise() -> None:
    assert serialize_columnwise(Column("Email", ("a@b.c", "d@e.f"))) == "Email\na@b.c\nd@e.f"
    assert serialize_columnwise(Column("x", ("", "v"))) == "x\nv"
    with pytest.raises(EmptyColumn):
        serialize_columnwise(Column("x", ("", "")))


def test_serialize_columnwise_absenteeism(absenteeism) -> None:
    assert serialize_columnwise(absenteeism.column("ID")).startswith("ID\n")


def test_serialize_columnwise_flattens_newlines() -> None:
    assert serialize_columnwise(Column("x", ("a\nb",))) == "x\na b"


def test_serialize_rowwise() -> None:
    ds = make_dataset({"a": ["p", "r"], "b": ["q", "s"]})
    assert serialize_rowwise(ds, 0) == "p q"
    assert [serialize_rowwise(ds, r) for r in range(ds.n_rows)] == ["p q", "r s"]
    ds3 = make_dataset({"a": ["p", "x"], "b": ["", "y"], "c": ["s", "z"]})
    assert serialize_rowwise(ds3, 0) == "p s"
    with pytest.raises(RowOutOfRange):
        serialize_rowwise(ds, 2)


def test_email_column_personal() -> None:
    policy = AggregationPolicy(min_hits=3, min_confidence=0.5)
    v = classify_column_rules(Column("contact", tuple(EMAILS)), policy)
    assert v.personal
    assert v.evidence["counts"]["EMAIL_ADDRESS"] == 10
    assert v.evidence["entities"] == ["EMAIL_ADDRESS"]


def test_url_column_non_personal() -> None:
    policy = AggregationPolicy(min_hits=3, min_confidence=0.5)
    v = classify_column_rules(Column("link", tuple(URLS)), policy)
    assert not v.personal
    assert v.evidence["entities"] == ["URL"]


def test_min_hits_boundary() -> None:
    col = Column("c", tuple(EMAILS[:2] + ["1", "2", "3"]))
    assert not classify_column_rules(col, AggregationPolicy(min_hits=3)).personal
    assert classify_column_rules(col, AggregationPolicy(min_hits=2)).personal


def test_min_confidence_filters_weak_kinds() -> None:
    col = Column("who", ("Tom", "Mia", "Lena", "Walter"))
    assert classify_column_rules(col, AggregationPolicy(min_confidence=0.4)).personal
    assert not classify_column_rules(col, AggregationPolicy(min_confidence=0.5)).personal


def test_header_counts_as_a_cell() -> None:
    hits_col = Column("Tom", ("Mia", "Lena", "1"))
    assert classify_column_rules(hits_col, AggregationPolicy(min_hits=3)).personal


def test_policy_validation() -> None:
    with pytest.raises(ValueError):
        AggregationPolicy(min_hits=0)
    with pytest.raises(ValueError):
        AggregationPolicy(min_confidence=1.5)
    with pytest.raises(ValueError):
        AggregationPolicy(strategy="diagonal")  # type: ignore[arg-type]


def test_rowwise_attributes_hits_to_cell_columns() -> None:
    ds = make_dataset(
        {
            "mail": EMAILS[:4],
            "site": URLS[:4],
            "num": ["1", "2", "3", "4"],
        }
    )
    verdicts = classify_dataset_rules(ds, AggregationPolicy(strategy="rowwise"))
    assert [(v.column, v.personal) for v in verdicts] == [("mail", True), ("site", False), ("num", False)]
    per_col = rowwise_hits(ds)
    for col, hits in zip(ds.columns, per_col):
        for h in hits:
            assert 0 <= h.span[0] < h.span[1] <= len(col.values[h.cell_index])


def test_rowwise_span_across_cells_goes_to_first_cell() -> None:
    ds = make_dataset({"first": ["Sao"] * 3, "second": ["Paulo"] * 3})
    per_col = rowwise_hits(ds)
    assert [h.kind.value for h in per_col[0]] == ["LOCATION"] * 3
    assert all(h.span == (0, 3) for h in per_col[0])
    assert per_col[1] == []


def test_rowwise_and_columnwise_agree_on_isolated_entities() -> None:
    ds = make_dataset({"mail": EMAILS, "site": URLS, "ip": [f"10.0.0.{i}" for i in range(10)]})
    col = classify_dataset_rules(ds, AggregationPolicy(strategy="columnwise"))
    row = classify_dataset_rules(ds, AggregationPolicy(strategy="rowwise"))
    assert [v.personal for v in col] == [v.personal for v in row] == [True, False, False]


_CELL = st.sampled_from(EMAILS[:3] + URLS[:3] + ["Tom", "Mia", "10.0.0.1", "2020-01-01", "5", "", "x"])


@settings(max_examples=150, deadline=None)
@given(
    st.lists(_CELL, min_size=1, max_size=25).filter(any),
    st.integers(1, 6),
    st.floats(0.0, 1.0),
    st.integers(0, 5),
    st.floats(0.0, 0.6),
)
def test_threshold_monotonicity(values, min_hits, min_conf, extra_hits, extra_conf) -> None:
    col = Column("c", tuple(values))
    base = classify_column_rules(col, AggregationPolicy(min_hits, min_conf))
    raised = classify_column_rules(
        col, AggregationPolicy(min_hits + extra_hits, min(1.0, min_conf + extra_conf))
    )
    if not base.personal:
        assert not raised.personal


@settings(max_examples=100, deadline=None)
@given(st.lists(_CELL, min_size=1, max_size=25).filter(any), st.randoms(use_true_random=False))
def test_columnwise_verdict_invariant_under_row_permutation(values, rnd) -> None:
    shuffled = list(values)
    rnd.shuffle(shuffled)
    a = classify_column_rules(Column("c", tuple(values)))
    b = classify_column_rules(Column("c", tuple(shuffled)))
    assert a.personal == b.personal
    assert a.evidence == b.evidence


def test_synthetic_three_columns() -> None:
    rng = random.Random(3)
    ds = make_dataset(
        {
            "email": EMAILS,
            "homepage": URLS,
            "age": [str(rng.randint(18, 90)) for _ in range(10)],
        }
    )
    assert [v.personal for v in classify_dataset_rules(ds)] == [True, False, False]
