import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from faircompass.data import IngestConfig, load_dataset
from faircompass.walkthrough import load_fixture_dataset

REPO_ROOT = Path(__file__).parent.parent
FIXTURES = REPO_ROOT / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def adult_dataset():
    return load_fixture_dataset(FIXTURES / "adult.csv", FIXTURES / "adult_predictions.csv")


@pytest.fixture()
def tiny_dataset():
    text = (
        "sex,occ,income,pred\n"
        "M,A,1,1\n"
        "M,A,1,0\n"
        "F,B,0,1\n"
        "M,B,0,0\n"
        "F,A,1,1\n"
        "F,B,1,0\n"
    )
    return load_dataset(text, IngestConfig(label_column="income", prediction_column="pred"))


def rows_from_csv(text, label_column="income", prediction_column="pred"):
    """Raw python rows (for the oracle) from a CSV fixture."""
    import csv
    import io

    reader = csv.DictReader(io.StringIO(text))
    rows = []
    for raw in reader:
        row = dict(raw)
        row["label"] = int(raw[label_column])
        row["prediction"] = int(raw[prediction_column])
        rows.append(row)
    return rows
