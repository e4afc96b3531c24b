#!/usr/bin/env python3
"""Replay the scripted income-prediction audit and write its reports.

Produces `walkthrough_report.md` and `walkthrough_session.json` in the
chosen output directory.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from faircompass.report import render_markdown
from faircompass.walkthrough import run_income_audit


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data", default="fixtures/adult.csv", type=Path)
    parser.add_argument("--predictions", default="fixtures/adult_predictions.csv", type=Path)
    parser.add_argument("--out-dir", default="reports", type=Path)
    args = parser.parse_args()

    session = run_income_audit(args.data, args.predictions)
    export = session.export()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    (args.out_dir / "walkthrough_report.md").write_text(
        render_markdown(export), encoding="utf-8")
    (args.out_dir / "walkthrough_session.json").write_text(
        json.dumps(export, indent=2, sort_keys=True), encoding="utf-8")

    print(f"loop iterations: {export['iterations']}")
    print(f"decision path: {export['session']['tree_path']}")
    for evaluation in export["session"]["evaluations"]:
        result = evaluation["result"]
        print(f"{evaluation['definition_id']}: "
              f"{'satisfied' if result['satisfied'] else 'VIOLATED'}")
    print(f"reports written to {args.out_dir}/")


if __name__ == "__main__":
    main()
