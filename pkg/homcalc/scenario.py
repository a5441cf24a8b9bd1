"""Scenario files: a chart, named objects, optional groupoids and a list of checks.

    id = "so3"
    [chart]
    vars = ["x", "y", "z"]
    [bivector.pi]
    components = { "yz" = "x", "zx" = "y", "xy" = "z" }
    [[check]]
    kind = "verify_poisson"
    pi = "pi"
    expect = "pass"
"""
from __future__ import annotations

import logging
import re

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from homcalc.atiyah import AtiyahForm, AtiyahTensor11, Derivation, JetSection, Multiderivation
from homcalc.checks import CHECKS
from homcalc.errors import HomcalcError, ScenarioError
from homcalc.expr import ONE, ZERO, Chart, Expr, parse_expression
from homcalc.groupoid import ChartGroupoid, pair_groupoid, scaling_extension, vb_addition_groupoid
from homcalc.models import Outcome
from homcalc.tensor import Form, Multivector, Tensor11, VectorField

logger = logging.getLogger(__name__)

OBJECT_SECTIONS = (
    "function",
    "vector",
    "form",
    "bivector",
    "multivector",
    "tensor11",
    "derivation",
    "jet",
    "atiyah_form",
    "multiderivation",
    "jacobi",
    "atiyah_tensor11",
)
RESERVED_KEYS = {"kind", "name", "expect", "groupoid"}
_TOML_POSITION = re.compile(r"at line (\d+), column (\d+)")


@dataclass(frozen=True)
class CheckSpec:
    name: str
    kind: str
    args: Mapping[str, str]
    params: Mapping[str, Any]
    expect: Outcome = Outcome.PASS
    groupoid: str | None = None


@dataclass
class Scenario:
    id: str
    chart: Chart
    description: str = ""
    objects: dict[str, Any] = field(default_factory=dict)
    groupoids: dict[str, ChartGroupoid] = field(default_factory=dict)
    checks: list[CheckSpec] = field(default_factory=list)


class _Locator:
    """Maps scenario snippets back to 1-based source lines for error messages."""

    def __init__(self, text: str) -> None:
        self.lines = text.splitlines()

    def line_of(self, needle: str, occurrence: int = 0) -> int | None:
        seen = 0
        for number, line in enumerate(self.lines, start=1):
            if needle in line:
                if seen == occurrence:
                    return number
                seen += 1
        return None

    def error(self, message: str, needle: str | None = None, occurrence: int = 0, **kw) -> ScenarioError:
        line = self.line_of(needle, occurrence) if needle else None
        if line is not None and kw.get("column") is None:
            kw["column"] = self.lines[line - 1].find(needle) + 1
        return ScenarioError(message, line=line, **kw)


def split_key(key: str, chart: Chart) -> tuple[int, ...]:
    """'x,y' or concatenated 'xy' -> variable indices; '' is the empty index."""
    if key == "":
        return ()
    if "," in key:
        names = [part.strip() for part in key.split(",")]
        for name in names:
            if name not in chart.vars:
                raise ScenarioError(f"Unknown variable {name!r} in component key {key!r}", symbol=name)
        return tuple(chart.index(name) for name in names)
    out: list[int] = []
    rest = key
    by_length = sorted(chart.vars, key=len, reverse=True)
    while rest:
        match = next((v for v in by_length if rest.startswith(v)), None)
        if match is None:
            raise ScenarioError(f"Cannot split component key {key!r} into variables of {chart.vars}", symbol=rest)
        out.append(chart.index(match))
        rest = rest[len(match):]
    return tuple(out)


class _Builder:
    def __init__(self, text: str, chart: Chart, groupoids: Mapping[str, ChartGroupoid]) -> None:
        self.loc = _Locator(text)
        self.chart = chart
        self.groupoids = groupoids

    def expr(self, value, chart: Chart, where: str) -> Expr:
        text = str(value)
        try:
            return parse_expression(text, chart)
        except ScenarioError as exc:
            line = self.loc.line_of(f'"{text}"') or self.loc.line_of(where)
            column = exc.column
            if line is not None:
                start = self.loc.lines[line - 1].find(text)
                column = start + (exc.column or 1) if start >= 0 else exc.column
            raise ScenarioError(f"{where}: {exc.args[0]}", line=line, column=column, symbol=exc.symbol) from exc

    def chart_for(self, decl: Mapping, where: str) -> Chart:
        on = decl.get("on", "base")
        if on == "base":
            return self.chart
        if on == "extended":
            return self.chart.extend("r")
        name, _, part = str(on).partition(".")
        if name not in self.groupoids:
            raise self.loc.error(f"{where}: unknown chart {on!r}", f"[{where}]", symbol=str(on))
        gpd = self.groupoids[name]
        if part == "":
            return gpd.G
        if part == "W":
            return gpd.W
        if part == "M":
            return gpd.M
        raise self.loc.error(f"{where}: unknown chart {on!r}", f"[{where}]", symbol=str(on))

    def components(self, raw: Mapping, chart: Chart, where: str) -> dict[tuple[int, ...], Expr]:
        if not isinstance(raw, Mapping):
            raise self.loc.error(f"{where}: components must be a table", f"[{where}]")
        out = {}
        for key, value in raw.items():
            try:
                idx = split_key(str(key), chart)
            except ScenarioError as exc:
                raise self.loc.error(exc.args[0], f'"{key}"', symbol=exc.symbol) from exc
            out[idx] = self.expr(value, chart, where)
        return out

    def alternating(self, cls, raw: Mapping, chart: Chart, where: str, degree: int | None = None):
        comps = self.components(raw, chart, where)
        if degree is None:
            lengths = {len(idx) for idx in comps}
            if len(lengths) > 1:
                raise self.loc.error(f"{where}: components of mixed degree", f"[{where}]")
            degree = lengths.pop() if lengths else 0
        return cls(chart, degree, comps)

    def vector(self, raw: Mapping, chart: Chart, where: str) -> VectorField:
        comps = [ZERO] * chart.dim
        for idx, value in self.components(raw, chart, where).items():
            if len(idx) != 1:
                raise self.loc.error(f"{where}: vector components are keyed by one variable", f"[{where}]")
            comps[idx[0]] = value
        return VectorField(chart, tuple(comps))

    def matrix(self, raw, chart: Chart, size: int, where: str) -> list[list[Expr]]:
        if raw == "identity":
            return [[ONE if i == j else ZERO for j in range(size)] for i in range(size)]
        if not isinstance(raw, list) or len(raw) != size or any(not isinstance(row, list) or len(row) != size for row in raw):
            raise self.loc.error(f"{where}: matrix must be {size}x{size} or \"identity\"", f"[{where}]")
        return [[self.expr(c, chart, where) for c in row] for row in raw]

    def build(self, section: str, name: str, decl: Mapping) -> Any:
        where = f"{section}.{name}"
        if not isinstance(decl, Mapping):
            raise self.loc.error(f"{where} must be a table", f"[{where}]")
        chart = self.chart_for(decl, where)
        degree = decl.get("degree")
        if section == "function":
            return self.expr(decl.get("expr", "0"), chart, where)
        if section == "vector":
            return self.vector(decl.get("components", {}), chart, where)
        if section == "form":
            return self.alternating(Form, decl.get("components", {}), chart, where, degree)
        if section == "bivector":
            return self.alternating(Multivector, decl.get("components", {}), chart, where, 2)
        if section == "multivector":
            return self.alternating(Multivector, decl.get("components", {}), chart, where, degree)
        if section == "tensor11":
            return Tensor11.from_matrix(chart, self.matrix(decl.get("matrix"), chart, chart.dim, where))
        if section == "atiyah_tensor11":
            return AtiyahTensor11.from_matrix(chart, self.matrix(decl.get("matrix"), chart, chart.dim + 1, where))
        if section == "derivation":
            return Derivation(self.vector(decl.get("X", {}), chart, where), self.expr(decl.get("f", "0"), chart, where))
        if section == "jet":
            alpha = self.alternating(Form, decl.get("alpha", {}), chart, where, 1)
            return JetSection(alpha, self.expr(decl.get("g", "0"), chart, where))
        if section == "atiyah_form":
            if degree is None:
                raise self.loc.error(f"{where}: atiyah_form needs a degree", f"[{where}]")
            beta = self.alternating(Form, decl.get("beta", {}), chart, where, degree)
            if degree == 0:
                return AtiyahForm(beta)
            return AtiyahForm(beta, self.alternating(Form, decl.get("gamma", {}), chart, where, degree - 1))
        arity = 2 if section == "jacobi" else decl.get("arity")
        if arity is None:
            raise self.loc.error(f"{where}: multiderivation needs an arity", f"[{where}]")
        P = self.alternating(Multivector, decl.get("P", {}), chart, where, arity)
        if arity == 0:
            return Multiderivation(P)
        return Multiderivation(P, self.alternating(Multivector, decl.get("Q", {}), chart, where, arity - 1))


def _parse_chart(data: Mapping, loc: _Locator) -> Chart:
    raw = data.get("chart")
    if not isinstance(raw, Mapping) or not isinstance(raw.get("vars"), list):
        raise loc.error("Scenario needs a [chart] table with a vars list", "[chart]")
    names = [str(v) for v in raw["vars"]]
    for v in names:
        if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", v):
            raise loc.error(f"Invalid variable name {v!r}", f'"{v}"', symbol=v)
    try:
        return Chart(str(raw.get("name", "M")), tuple(names))
    except HomcalcError as exc:
        raise loc.error(str(exc), "[chart]") from exc


def _parse_groupoids(data: Mapping, chart: Chart, loc: _Locator) -> dict[str, ChartGroupoid]:
    out: dict[str, ChartGroupoid] = {}
    for name, decl in dict(data.get("groupoid", {})).items():
        where = f"[groupoid.{name}]"
        kind = decl.get("kind")
        if kind == "pair":
            gpd = pair_groupoid(chart)
        elif kind == "vb_addition":
            gpd = vb_addition_groupoid(chart, int(decl.get("fiber_rank", chart.dim)))
        else:
            raise loc.error(f"groupoid.{name}: unknown kind {kind!r}", where, symbol=str(kind))
        if decl.get("scaling", False):
            gpd = scaling_extension(gpd)
        out[name] = gpd
    return out


def _parse_checks(data: Mapping, scenario: Scenario, loc: _Locator) -> list[CheckSpec]:
    raw_checks = data.get("check", [])
    if not isinstance(raw_checks, list):
        raise loc.error("check must be an array of tables ([[check]])", "check")
    specs = []
    names: set[str] = set()
    for position, raw in enumerate(raw_checks):
        needle = "[[check]]"
        kind = raw.get("kind")
        if kind not in CHECKS:
            raise loc.error(f"Unknown check kind {kind!r}", needle, occurrence=position, symbol=str(kind))
        registered = CHECKS[kind]
        name = str(raw.get("name", f"{kind}#{position + 1}"))
        if name in names:
            raise loc.error(f"Duplicate check name {name!r}", needle, occurrence=position, symbol=name)
        names.add(name)
        expect_raw = str(raw.get("expect", "pass"))
        try:
            expect = Outcome(expect_raw)
        except ValueError as exc:
            raise loc.error(f"{name}: expect must be pass, fail, unknown or error", needle, occurrence=position) from exc
        groupoid = raw.get("groupoid")
        if registered.needs_groupoid:
            if groupoid not in scenario.groupoids:
                raise loc.error(f"{name}: undeclared groupoid {groupoid!r}", needle, occurrence=position, symbol=str(groupoid))
        args, params = {}, {}
        for key, value in raw.items():
            if key in RESERVED_KEYS:
                continue
            if key in registered.objects or key in registered.optional:
                if value not in scenario.objects:
                    raise loc.error(f"{name}: undeclared object {value!r}", f'"{value}"', symbol=str(value))
                expected = registered.objects.get(key) or registered.optional[key]
                if not isinstance(scenario.objects[value], expected):
                    raise loc.error(
                        f"{name}: {key} = {value!r} is a {type(scenario.objects[value]).__name__}",
                        f'"{value}"',
                        symbol=str(value),
                    )
                args[key] = value
            elif key in registered.params:
                expected_type, _ = registered.params[key]
                if not isinstance(value, expected_type) or (expected_type is int and isinstance(value, bool)):
                    raise loc.error(
                        f"{name}: {key} must be a {expected_type.__name__}", needle, occurrence=position, symbol=key
                    )
                params[key] = value
            else:
                raise loc.error(f"{name}: unexpected argument {key!r} for {kind}", needle, occurrence=position, symbol=key)
        missing = [key for key in registered.objects if key not in args]
        missing += [key for key, (_, default) in registered.params.items() if default is ... and key not in params]
        if missing:
            raise loc.error(f"{name}: missing argument {missing[0]!r}", needle, occurrence=position, symbol=missing[0])
        specs.append(CheckSpec(name, kind, args, params, expect, groupoid))
    return specs


def parse_scenario(text: str, default_id: str = "scenario") -> Scenario:
    loc = _Locator(text)
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        match = _TOML_POSITION.search(str(exc))
        line, column = (int(match.group(1)), int(match.group(2))) if match else (None, None)
        raise ScenarioError(f"Malformed scenario: {exc}", line=line, column=column) from exc

    chart = _parse_chart(data, loc)
    scenario = Scenario(
        id=str(data.get("id", default_id)),
        chart=chart,
        description=str(data.get("description", "")),
    )
    scenario.groupoids = _parse_groupoids(data, chart, loc)
    builder = _Builder(text, chart, scenario.groupoids)
    for section in OBJECT_SECTIONS:
        for name, decl in dict(data.get(section, {})).items():
            if name in scenario.objects:
                raise loc.error(f"Object {name!r} declared twice", f"{section}.{name}", symbol=name)
            try:
                scenario.objects[name] = builder.build(section, name, decl)
            except ScenarioError:
                raise
            except HomcalcError as exc:
                raise loc.error(f"{section}.{name}: {exc}", f"{section}.{name}", symbol=name) from exc
    unknown = sorted(set(data) - set(OBJECT_SECTIONS) - {"id", "description", "chart", "groupoid", "check"})
    if unknown:
        raise loc.error(f"Unknown top-level key {unknown[0]!r}", unknown[0], symbol=unknown[0])
    scenario.checks = _parse_checks(data, scenario, loc)
    logger.debug("Parsed scenario %s: %d objects, %d checks", scenario.id, len(scenario.objects), len(scenario.checks))
    return scenario


def load_scenario(path: Path) -> Scenario:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"Could not read scenario {path}: {exc}") from exc
    return parse_scenario(text, default_id=path.stem)
