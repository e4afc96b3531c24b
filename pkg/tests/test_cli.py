import re

from click.testing import CliRunner

from conftest import FIXTURES, GOLDEN
from faircompass.cli import main

TIMESTAMP = re.compile(r"\d{4}-\d{2}-\d{2}T[0-9:.]+\+00:00")


def normalize(text: str) -> str:
    return TIMESTAMP.sub("<TIMESTAMP>", text)


ADULT_ARGS = [
    "audit",
    "--data", str(FIXTURES / "adult.csv"),
    "--label", "income",
    "--pred", "prediction",
    "--pred-file", str(FIXTURES / "adult_predictions.csv"),
    "--groups", "sex",
    "--definition", "conditional_statistical_parity",
    "--favourable", "0",
    "--sensitive", "sex",
    "--legitimate", "occupation",
    "--threshold", "0.1",
    "--seed", "42",
    "--label-map", "<=50K=1,>50K=0",
    "--numeric", "age,fnlwgt,education-num,capital-gain,capital-loss,hours-per-week",
]


def test_audit_golden_report(tmp_path):
    out = tmp_path / "report.md"
    result = CliRunner().invoke(main, ADULT_ARGS + ["--out", str(out)])
    assert result.exit_code == 1, result.output  # violation
    produced = normalize(out.read_text(encoding="utf-8"))
    golden = (GOLDEN / "audit_report.md").read_text(encoding="utf-8")
    assert produced == golden


def test_audit_satisfied_exits_zero(tmp_path):
    data = tmp_path / "fair.csv"
    data.write_text(
        "sex,y,yh\nM,1,1\nM,0,0\nF,1,1\nF,0,0\n", encoding="utf-8"
    )
    out = tmp_path / "report.md"
    result = CliRunner().invoke(main, [
        "audit", "--data", str(data), "--label", "y", "--pred", "yh",
        "--groups", "sex", "--definition", "demographic_parity",
        "--favourable", "1", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    assert "satisfied" in result.output
    assert out.exists()


def test_audit_error_exits_two(tmp_path):
    out = tmp_path / "report.md"
    result = CliRunner().invoke(main, [
        "audit", "--data", str(FIXTURES / "adult.csv"), "--label", "income",
        "--pred", "prediction",          # column missing without --pred-file
        "--groups", "sex", "--definition", "demographic_parity",
        "--label-map", "<=50K=1,>50K=0",
        "--out", str(out),
    ])
    assert result.exit_code == 2
    assert "error" in result.output


def test_audit_writes_structured_document_too(tmp_path):
    import json

    data = tmp_path / "fair.csv"
    data.write_text("sex,y,yh\nM,1,1\nF,0,0\n", encoding="utf-8")
    out = tmp_path / "r.md"
    doc = tmp_path / "r.json"
    result = CliRunner().invoke(main, [
        "audit", "--data", str(data), "--label", "y", "--pred", "yh",
        "--groups", "sex", "--definition", "demographic_parity",
        "--favourable", "1", "--out", str(out), "--json-out", str(doc),
    ])
    assert result.exit_code in (0, 1)
    payload = json.loads(doc.read_text(encoding="utf-8"))
    assert payload["session"]["id"] == "audit"
    assert payload["session"]["evaluations"]
