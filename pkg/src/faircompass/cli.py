"""Command line interface: serve the HTTP API, or run a one-shot audit."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .compass import DEFINITIONS
from .data import IngestConfig, attach_predictions, load_dataset
from .errors import FairCompassError
from .report import render_markdown
from .session import EXPLORATION, INFORMED_ANALYSIS, AuditSession
from .compass import load_default_tree, load_tree_file

EXIT_SATISFIED = 0
EXIT_VIOLATED = 1
EXIT_ERROR = 2


@click.group()
def main():
    """Fairness auditing for binary classifiers."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True),
              help="JSON service configuration file.")
def serve(config_path):
    """Run the audit HTTP service."""
    import uvicorn

    from .service import AuditService, ServiceConfig, create_app

    config = ServiceConfig.from_file(config_path)
    app = create_app(AuditService(config))
    uvicorn.run(app, host=config.host, port=config.port)


def _parse_label_map(text: str | None) -> dict[str, int]:
    if not text:
        return {}
    aliases = {}
    for part in text.split(","):
        raw, sep, target = part.rpartition("=")
        if not sep or target not in ("0", "1"):
            raise click.BadParameter(f"label mapping {part!r} must end in =0 or =1")
        aliases[raw] = int(target)
    return aliases


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path(exists=True),
              help="CSV file with features, label, and prediction columns.")
@click.option("--label", required=True, help="Label column name.")
@click.option("--pred", required=True, help="Prediction column name.")
@click.option("--pred-file", type=click.Path(exists=True), default=None,
              help="Optional row-aligned CSV holding the prediction column "
                   "when it is not part of --data.")
@click.option("--groups", required=True,
              help="Comma-separated features whose value combinations form "
                   "the active subgroups.")
@click.option("--definition", "definition_id", required=True,
              type=click.Choice(sorted(DEFINITIONS)), help="Fairness definition to evaluate.")
@click.option("--favourable", type=click.Choice(["0", "1"]), default="1",
              help="Class treated as the favourable outcome.")
@click.option("--sensitive", default=None, help="Sensitive attribute (stratified checks).")
@click.option("--legitimate", default=None,
              help="Comma-separated legitimate attributes (stratified checks).")
@click.option("--threshold", type=float, default=0.1,
              help="Maximum tolerated absolute rate difference.")
@click.option("--seed", type=int, default=42, help="Seed for any randomized step.")
@click.option("--label-map", default=None,
              help="Comma-separated raw=class aliases, e.g. '<=50K=1,>50K=0'.")
@click.option("--numeric", "numeric_columns", default=None,
              help="Comma-separated names of numeric feature columns.")
@click.option("--tree", "tree_path", type=click.Path(exists=True), default=None,
              help="Alternative decision-tree schema file.")
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Where to write the markdown report.")
@click.option("--json-out", "json_path", type=click.Path(), default=None,
              help="Optionally also write the structured report document.")
def audit(data_path, label, pred, pred_file, groups, definition_id, favourable,
          sensitive, legitimate, threshold, seed, label_map, numeric_columns,
          tree_path, out_path, json_path):
    """One-shot audit: exit 0 if the definition is satisfied, 1 if violated."""
    try:
        text = Path(data_path).read_text(encoding="utf-8")
        if pred_file:
            text = attach_predictions(text, Path(pred_file).read_text(encoding="utf-8"),
                                      prediction_column=pred)
        config = IngestConfig(
            label_column=label,
            prediction_column=pred,
            numeric_columns=tuple(
                f for f in (numeric_columns.split(",") if numeric_columns else []) if f
            ),
            class_aliases=_parse_label_map(label_map),
        )
        dataset = load_dataset(text, config)
        tree = load_tree_file(tree_path) if tree_path else load_default_tree()
        session = AuditSession("audit", dataset, tree)
        session.log(EXPLORATION, "load_dataset",
                    {"rows": dataset.row_count, "features": len(dataset.features),
                     "dataset_id": dataset.id})
        selections = [(feature, None) for feature in groups.split(",") if feature]
        session.generate_groups(selections, stage=EXPLORATION)
        session.select_definition(definition_id)
        inputs = {"favourable_class": int(favourable), "threshold": threshold,
                  "seed": seed}
        if sensitive:
            inputs["sensitive_attribute"] = sensitive
        if legitimate:
            inputs["legitimate_attributes"] = [f for f in legitimate.split(",") if f]
        result = session.evaluate(inputs)
        verdict = "satisfied" if result.satisfied else "violated"
        session.log(INFORMED_ANALYSIS, "verdict", {"satisfied": result.satisfied},
                    note=f"{definition_id} {verdict} at threshold {threshold}")
        export = session.export()
        Path(out_path).write_text(render_markdown(export), encoding="utf-8")
        if json_path:
            Path(json_path).write_text(json.dumps(export, indent=2, sort_keys=True),
                                       encoding="utf-8")
        click.echo(f"{definition_id}: {verdict} (report: {out_path})")
        sys.exit(EXIT_SATISFIED if result.satisfied else EXIT_VIOLATED)
    except (FairCompassError, OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_ERROR)


if __name__ == "__main__":
    main()
