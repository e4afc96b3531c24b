"""Markdown rendering of exported audit sessions.

The renderer is a pure function of the export document, so two exports of an
unchanged session produce byte-identical markdown (timestamps included are
the ones recorded in the stage log).
"""

from __future__ import annotations


def _rate(value) -> str:
    if value is None:
        return "undefined"
    return f"{value:.4f}"


def _assessment_lines(assessment: dict, heading: str | None = None) -> list[str]:
    lines = []
    verdict = "satisfied" if assessment["satisfied"] else "VIOLATED"
    title = heading or f"{assessment['rate_kind']} parity"
    lines.append(
        f"- {title}: **{verdict}** "
        f"(max difference {_rate(assessment['max_abs_difference'])}, "
        f"threshold {_rate(assessment['threshold'])}, "
        f"min ratio {_rate(assessment['min_ratio'])})"
    )
    for group_id, rate in assessment["per_group"]:
        lines.append(f"  - {group_id}: {_rate(rate)}")
    return lines


def _result_lines(result: dict, subgroup_names: dict[str, str]) -> list[str]:
    kind = result["kind"]
    if kind == "parity":
        named = dict(result)
        named["per_group"] = [
            [subgroup_names.get(gid, gid), rate] for gid, rate in result["per_group"]
        ]
        return _assessment_lines(named)
    if kind == "composite_parity":
        lines = [f"- combined verdict: **{'satisfied' if result['satisfied'] else 'VIOLATED'}**"]
        for part in result["parts"]:
            named = dict(part)
            named["per_group"] = [
                [subgroup_names.get(gid, gid), rate] for gid, rate in part["per_group"]
            ]
            lines.extend(_assessment_lines(named))
        return lines
    if kind == "stratified_parity":
        lines = [
            f"- combined verdict over {len(result['strata'])} strata: "
            f"**{'satisfied' if result['satisfied'] else 'VIOLATED'}**"
        ]
        for entry in result["strata"]:
            stratum = ", ".join(
                f"{p['feature']}={p['category'] if p['category'] is not None else 'bin ' + str(p['bin_index'])}"
                for p in entry["predicates"]
            )
            lines.extend(_assessment_lines(entry["assessment"], heading=f"stratum [{stratum}]"))
        for message in result.get("warnings", []):
            lines.append(f"- note: {message}")
        return lines
    return [f"- unrenderable result kind {kind!r}"]


def render_markdown(export: dict) -> str:
    """Render an exported session document as a markdown audit report."""
    state = export["session"]
    dataset = state["dataset"]
    subgroup_names = {
        gid: doc["display_name"] for gid, doc in state["subgroup_registry"].items()
    }

    lines: list[str] = []
    lines.append("# Fairness audit report")
    lines.append("")
    lines.append(f"Session `{state['id']}` on dataset `{dataset['id'][:16]}`.")
    lines.append("")

    lines.append("## Dataset")
    lines.append("")
    lines.append(f"- rows: {dataset['row_count']}")
    lines.append(f"- features: {len(dataset['features'])}")
    lines.append(f"- label column: `{dataset['label_column']}`; "
                 f"prediction column: `{dataset['prediction_column']}`")
    lines.append("")
    lines.append("| feature | kind | values |")
    lines.append("| --- | --- | --- |")
    for feature in dataset["features"]:
        if feature["kind"] == "categorical":
            values = f"{len(feature['categories'])} categories"
        elif feature["bin_edges"]:
            values = f"{len(feature['bin_edges']) - 1} bins"
        else:
            values = "numeric (unbinned)"
        lines.append(f"| {feature['name']} | {feature['kind']} | {values} |")
    lines.append("")

    lines.append("## Active subgroups")
    lines.append("")
    if state["active_subgroups"]:
        lines.append("| subgroup | size |")
        lines.append("| --- | --- |")
        for doc in state["active_subgroups"]:
            pin = " (pinned)" if doc["id"] == state["pinned_subgroup"] else ""
            lines.append(f"| {doc['display_name']}{pin} | {doc['size']} |")
    else:
        lines.append("_none_")
    lines.append("")

    lines.append("## Saved group sets")
    lines.append("")
    if state["saved_group_sets"]:
        for gs in state["saved_group_sets"]:
            members = ", ".join(subgroup_names.get(gid, gid) for gid in gs["subgroup_ids"])
            lines.append(f"- `{gs['id']}` **{gs['name']}** ({gs['created_at']}): {members}")
    else:
        lines.append("_none_")
    lines.append("")

    lines.append("## Decision path")
    lines.append("")
    if export["tree_path_details"]:
        for i, step in enumerate(export["tree_path_details"], start=1):
            lines.append(f"{i}. `{step['node_id']}` answered **{step['answer']}**")
            lines.append(f"   > {step['text']}")
    else:
        lines.append("_no tree navigation recorded_")
    if state["selected_definition"]:
        lines.append("")
        lines.append(f"Selected definition: **{state['selected_definition']}**")
    lines.append("")

    lines.append("## Evaluations")
    lines.append("")
    if state["evaluations"]:
        for evaluation in state["evaluations"]:
            lines.append(f"### {evaluation['definition_id']} ({evaluation['timestamp']})")
            lines.append("")
            inputs = ", ".join(f"{k}={v!r}" for k, v in sorted(evaluation["inputs"].items()))
            lines.append(f"- inputs: {inputs if inputs else 'none'}")
            lines.extend(_result_lines(evaluation["result"], subgroup_names))
            lines.append("")
    else:
        lines.append("_none_")
        lines.append("")

    lines.append(f"## Stage log ({export['iterations']} loop iteration(s))")
    lines.append("")
    if state["stage_log"]:
        lines.append("| timestamp | stage | action | note |")
        lines.append("| --- | --- | --- | --- |")
        for entry in state["stage_log"]:
            note = entry["note"] or ""
            lines.append(
                f"| {entry['timestamp']} | {entry['stage']} | {entry['action']} | {note} |"
            )
    else:
        lines.append("_empty_")
    lines.append("")
    return "\n".join(lines)
