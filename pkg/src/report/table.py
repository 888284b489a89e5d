"""Fixed-width text rendering for corpus summaries and single images."""

from typing import List, Sequence

from detectors.model import Feature, FeatureMatrix, Verdict

from .summary import CorpusSummary, GroupSummary, format_percentage

TOTAL = "Total"
FOOTNOTE = "* percentage over firmware where the feature applies (e.g. only firmware that uses an RTOS)"

_VERDICT_MARKS = {Verdict.PRESENT: "yes", Verdict.ABSENT: "no", Verdict.INDETERMINATE: "?"}


def _cell(group: GroupSummary, feature: Feature) -> str:
    row = group.rows[feature]
    applicable = row.applicable(feature)
    if applicable == 0:
        return format_percentage(None)
    return f"{row.present}/{applicable} {format_percentage(row.percentage(feature))}"


def _render(rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = []
    for n, row in enumerate(rows):
        cells = [row[0].ljust(widths[0])] + [cell.rjust(width) for cell, width in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def to_table(summary: CorpusSummary) -> str:
    columns = [(group_id, summary.groups[group_id]) for group_id in summary.group_ids]
    columns.append((TOTAL, summary.total))

    rows: List[List[str]] = [["Security Feature"] + [name for name, _ in columns]]
    rows.append(["#F (firmware)"] + [str(group.images) for _, group in columns])
    rows.append(["#D (devices)"] + [str(len(group.devices)) for _, group in columns])
    for feature in Feature:
        rows.append([feature.label] + [_cell(group, feature) for _, group in columns])

    return _render(rows) + "\n" + FOOTNOTE + "\n"


def matrix_summary(matrix: FeatureMatrix) -> str:
    """Human-readable result of a single analysis."""
    base = f"0x{matrix.base:08x}" if matrix.base is not None else "unknown"
    lines = [
        f"image:   {matrix.image_id}",
        f"profile: {matrix.profile_id}",
        f"base:    {base}",
        "",
    ]
    width = max(len(f.feature.label) for f in matrix.findings)
    for finding in matrix.findings:
        mark = _VERDICT_MARKS[finding.verdict]
        if not finding.applicable:
            mark += " (n/a)"
        lines.append(f"  {finding.feature.label.ljust(width)}  {mark}")
        for evidence in finding.evidence[:3]:
            lines.append(f"  {'':{width}}    {evidence}")
        if len(finding.evidence) > 3:
            lines.append(f"  {'':{width}}    ... {len(finding.evidence) - 3} more")
    if matrix.errors:
        lines.append("")
        lines.extend(f"error: {e}" for e in matrix.errors)
    return "\n".join(lines) + "\n"
