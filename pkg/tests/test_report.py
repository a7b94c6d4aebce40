"""Tests for CSV/JSON/SVG report emission."""

import json

import pytest

from holdervar.core.config import build_config
from holdervar.experiments.common import make_table
from holdervar.models import SCHEMA_VERSION, Command, ExperimentResult, ReportTable
from holdervar.report import emit_report, summary_document


@pytest.fixture
def result(tmp_path):
    config = build_config(
        {"command": "norms", "lower": [0.0], "upper": [1.0], "seed": 3, "out_dir": str(tmp_path / "ignored")}
    )
    return ExperimentResult(
        command=Command.NORMS,
        config=config,
        tables=[
            ReportTable(name="empty", columns=["level", "value", "paper_ref"]),
            ReportTable(
                name="values",
                columns=["level", "value"],
                rows=[{"level": 9, "value": 1.0 / 3.0}, {"level": 17, "value": 0.25}],
            ),
        ],
        summary={"drift_percent": 4.5, "passed": True},
        curves={"convergence": {"x": [0.125, 0.0625], "value": [0.1, 0.025]}},
    )


def test_empty_table_still_writes_its_header(result, tmp_path):
    emit_report(result, tmp_path, formats=("csv",))
    assert (tmp_path / "empty.csv").read_text(encoding="utf-8") == "level,value,paper_ref\n"


def test_csv_uses_twelve_significant_digits(result, tmp_path):
    emit_report(result, tmp_path, formats=("csv",))
    lines = (tmp_path / "values.csv").read_text(encoding="utf-8").splitlines()
    assert lines == ["level,value", "9,0.333333333333", "17,0.25"]


def test_summary_document_echoes_config_without_out_dir(result):
    document = summary_document(result)
    assert document["schema_version"] == SCHEMA_VERSION
    assert document["seed"] == 3
    assert document["command"] == "norms"
    assert "out_dir" not in document["config"]
    assert document["tables"] == ["empty", "values"]


def test_reruns_are_byte_identical(result, tmp_path):
    """Test that CSV and JSON output carries no timestamps or other run-dependent state."""
    first = emit_report(result, tmp_path / "a")
    second = emit_report(result, tmp_path / "b")
    assert [p.name for p in first] == [p.name for p in second]
    for a, b in zip(first, second):
        if a.suffix in (".csv", ".json"):
            assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a" / "convergence.svg").exists()
    summary = json.loads((tmp_path / "a" / "summary.json").read_text(encoding="utf-8"))
    assert summary["summary"] == {"drift_percent": 4.5, "passed": True}


def test_unknown_format_is_rejected(result, tmp_path):
    with pytest.raises(ValueError, match="Unknown report format"):
        emit_report(result, tmp_path, formats=("csv", "xlsx"))


def test_make_table_labels_every_row_with_its_theorem(tmp_path):
    """Test that a runner's table gains a trailing paper_ref column that rows may override."""
    # GIVEN
    rows = [{"level": 9, "value": 0.5}, {"level": 17, "value": 0.25, "paper_ref": "Theorem 3.2"}]

    # WHEN
    table = make_table("values", ["level", "value"], rows, "Lemma 6.3")

    # THEN
    assert table.columns == ["level", "value", "paper_ref"]
    assert [row["paper_ref"] for row in table.rows] == ["Lemma 6.3", "Theorem 3.2"]
    config = build_config({"command": "norms", "lower": [0.0], "upper": [1.0]})
    emit_report(ExperimentResult(command=Command.NORMS, config=config, tables=[table]), tmp_path, formats=("csv",))
    lines = (tmp_path / "values.csv").read_text(encoding="utf-8").splitlines()
    assert lines == ["level,value,paper_ref", "9,0.5,Lemma 6.3", "17,0.25,Theorem 3.2"]
