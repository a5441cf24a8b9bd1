"""Command-line entry point: run scenario files or the built-in gallery."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from homcalc.config import load_settings
from homcalc.errors import ScenarioError
from homcalc.gallery import gallery, gallery_ids
from homcalc.logging_config import setup_logging
from homcalc.models import RunReport
from homcalc.reporting import (
    default_report_filename,
    export_report,
    render_json,
    render_runs_json,
    render_runs_text,
    render_text,
)
from homcalc.runner import run
from homcalc.scenario import load_scenario

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homcalc",
        description="Check Jacobi, Poisson, contact, Nijenhuis and multiplicative structures in coordinates",
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--scenario", type=Path, help="TOML scenario file")
    source.add_argument("--gallery", action="store_true", help="Run every built-in scenario")
    source.add_argument("--list", action="store_true", help="Print the built-in scenario ids")
    parser.add_argument("--seed", type=int, default=None, help="Sampling seed (default 42)")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--only", default=None, help="Run only checks whose name matches this glob")
    parser.add_argument("--config", type=Path, default=None, help="JSON settings file")
    parser.add_argument("--workers", type=int, default=None, help="Parallel workers per scenario")
    parser.add_argument("--log-level", default="INFO")
    parser.add_argument("--no-log-file", action="store_true", help="Log to stderr only")
    parser.add_argument("--timings", action="store_true", help="Include wall-clock timings in the report")
    parser.add_argument(
        "--output",
        nargs="?",
        const="",
        default=None,
        help="Also write the report to a file (default homcalc_report_<scenario>.json|txt)",
    )
    return parser


def _render(reports: list[RunReport], fmt: str, include_timings: bool, single: bool) -> str:
    if fmt == "json":
        return render_json(reports[0], include_timings) if single else render_runs_json(reports, include_timings)
    return render_text(reports[0], include_timings) if single else render_runs_text(reports, include_timings)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.list:
        print("\n".join(gallery_ids()))
        return 0

    try:
        settings = load_settings(args.config).with_overrides(seed=args.seed, workers=args.workers)
    except ScenarioError as exc:
        print(f"homcalc: {exc}", file=sys.stderr)
        return 2
    setup_logging(args.log_level, None if args.no_log_file else Path(settings.log_dir))

    try:
        scenarios = gallery() if args.gallery else [load_scenario(args.scenario)]
    except ScenarioError as exc:
        logger.error("Invalid scenario: %s", exc)
        print(f"homcalc: {exc}", file=sys.stderr)
        return 2

    reports = [run(scenario, settings, only=args.only) for scenario in scenarios]
    single = not args.gallery
    text = _render(reports, args.format, args.timings, single)
    print(text)

    if args.output is not None:
        target = Path(args.output) if args.output else default_report_filename(
            reports[0].scenario_id if single else "gallery", args.format
        )
        export_report(target, text)
        logger.info("Report written to %s", target)

    return 0 if all(r.all_matched for r in reports) else 1
