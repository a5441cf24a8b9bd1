from __future__ import annotations

import fnmatch
import logging
import time
from concurrent.futures import ThreadPoolExecutor

from homcalc.checks import CHECKS, CheckContext
from homcalc.config import DEFAULT_SETTINGS, Settings
from homcalc.models import CheckResult, Outcome, RunReport
from homcalc.scenario import CheckSpec, Scenario

logger = logging.getLogger(__name__)


def run_check(scenario: Scenario, spec: CheckSpec, settings: Settings = DEFAULT_SETTINGS) -> CheckResult:
    registered = CHECKS[spec.kind]
    started = time.perf_counter()
    try:
        ctx = CheckContext(
            chart=scenario.chart,
            objects={key: scenario.objects[name] for key, name in spec.args.items()},
            params=registered.context_params(spec.params),
            seed=settings.seed,
            settings=settings,
            groupoid=scenario.groupoids.get(spec.groupoid) if spec.groupoid else None,
        )
        report = registered.run(ctx)
        result = CheckResult(spec.name, spec.kind, registered.anchor, report.overall, spec.expect, report=report)
    except Exception as exc:
        logger.exception("Check %s in scenario %s raised", spec.name, scenario.id)
        result = CheckResult(spec.name, spec.kind, registered.anchor, Outcome.ERROR, spec.expect, error=f"{type(exc).__name__}: {exc}")
    result.elapsed = time.perf_counter() - started
    level = logging.INFO if result.matched else logging.WARNING
    logger.log(level, "%s/%s: %s (expected %s)", scenario.id, spec.name, result.outcome.value, spec.expect.value)
    return result


def select_checks(scenario: Scenario, only: str | None = None) -> list[CheckSpec]:
    if not only:
        return list(scenario.checks)
    return [spec for spec in scenario.checks if fnmatch.fnmatchcase(spec.name, only)]


def run(scenario: Scenario, settings: Settings = DEFAULT_SETTINGS, only: str | None = None) -> RunReport:
    """Run the scenario's checks; results keep declaration order whatever the worker count."""
    specs = select_checks(scenario, only)
    logger.info("Scenario %s: %d checks, seed %s", scenario.id, len(specs), settings.seed)
    if settings.workers > 1 and len(specs) > 1:
        with ThreadPoolExecutor(max_workers=settings.workers) as pool:
            results = list(pool.map(lambda spec: run_check(scenario, spec, settings), specs))
    else:
        results = [run_check(scenario, spec, settings) for spec in specs]
    report = RunReport(scenario.id, settings.seed, results)
    logger.info("Scenario %s finished: %s", scenario.id, "all expectations met" if report.all_matched else "unexpected verdicts")
    return report
