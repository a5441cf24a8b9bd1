from __future__ import annotations

import json
from pathlib import Path

from homcalc.models import CheckResult, RunReport


def _check_lines(check: CheckResult, include_timings: bool) -> list[str]:
    mark = "ok" if check.matched else "UNEXPECTED"
    head = f"  [{mark}] {check.name} ({check.kind}): {check.outcome.value}, expected {check.expected.value}"
    if include_timings and check.elapsed is not None:
        head += f" [{check.elapsed:.3f}s]"
    lines = [head, f"      {check.anchor}"]
    if check.error:
        lines.append(f"      error: {check.error}")
    if check.report is not None:
        for axiom in check.report.axioms:
            line = f"      {axiom.name}: {axiom.outcome.value}"
            if axiom.verdict.residual:
                line += f"  residual {axiom.verdict.residual}"
            lines.append(line)
        lines.extend(f"      note: {note}" for note in check.report.notes)
    return lines


def render_text(report: RunReport, include_timings: bool = False) -> str:
    lines = [
        f"Scenario: {report.scenario_id}",
        f"Seed: {report.seed}",
        f"Checks: {len(report.checks)}",
        "",
    ]
    for check in report.checks:
        lines.extend(_check_lines(check, include_timings))
    unexpected = sum(1 for c in report.checks if not c.matched)
    lines.append("")
    lines.append("All expectations met." if unexpected == 0 else f"{unexpected} unexpected verdict(s).")
    return "\n".join(lines)


def render_json(report: RunReport, include_timings: bool = False) -> str:
    return json.dumps(report.to_dict(include_timings), indent=2, ensure_ascii=False)


def render_runs_json(reports: list[RunReport], include_timings: bool = False) -> str:
    payload = {"schema": 1, "runs": [r.to_dict(include_timings) for r in reports]}
    return json.dumps(payload, indent=2, ensure_ascii=False)


def render_runs_text(reports: list[RunReport], include_timings: bool = False) -> str:
    return "\n\n".join(render_text(r, include_timings) for r in reports)


def export_report(file_path: Path, text: str) -> None:
    file_path.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def default_report_filename(scenario_id: str, fmt: str = "json") -> Path:
    suffix = "json" if fmt == "json" else "txt"
    return Path(f"homcalc_report_{scenario_id}.{suffix}")
