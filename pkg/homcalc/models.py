from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum


class Verdict(str, Enum):
    ZERO = "zero"
    NONZERO = "nonzero"
    UNKNOWN = "unknown"


class Outcome(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    UNKNOWN = "unknown"
    ERROR = "error"


@dataclass(frozen=True)
class ZeroVerdict:
    status: Verdict
    seed: int
    witness: dict[str, float] | None = None
    value: float | None = None
    residual: str | None = None

    @property
    def is_zero(self) -> bool:
        return self.status is Verdict.ZERO

    @property
    def outcome(self) -> Outcome:
        if self.status is Verdict.ZERO:
            return Outcome.PASS
        if self.status is Verdict.NONZERO:
            return Outcome.FAIL
        return Outcome.UNKNOWN

    def to_dict(self) -> dict:
        data: dict = {"status": self.status.value, "seed": self.seed}
        if self.residual is not None:
            data["residual"] = self.residual
        if self.witness is not None:
            data["witness"] = {k: round(v, 12) for k, v in sorted(self.witness.items())}
        if self.value is not None:
            data["value"] = float(f"{self.value:.12g}")
        return data


def combine_outcomes(outcomes: list[Outcome]) -> Outcome:
    if any(o is Outcome.ERROR for o in outcomes):
        return Outcome.ERROR
    if any(o is Outcome.FAIL for o in outcomes):
        return Outcome.FAIL
    if any(o is Outcome.UNKNOWN for o in outcomes):
        return Outcome.UNKNOWN
    return Outcome.PASS


@dataclass(frozen=True)
class AxiomResult:
    name: str
    anchor: str
    verdict: ZeroVerdict
    expect_zero: bool = True

    @property
    def outcome(self) -> Outcome:
        outcome = self.verdict.outcome
        if self.expect_zero or outcome is Outcome.UNKNOWN:
            return outcome
        # nonvanishing axioms: a nonzero sample is conclusive, an identically zero residual fails
        return Outcome.PASS if outcome is Outcome.FAIL else Outcome.FAIL

    def to_dict(self) -> dict:
        data = {
            "name": self.name,
            "anchor": self.anchor,
            "outcome": self.outcome.value,
            "verdict": self.verdict.to_dict(),
        }
        if not self.expect_zero:
            data["expect"] = "nonzero"
        return data


@dataclass
class StructureReport:
    kind: str
    axioms: list[AxiomResult] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    data: dict[str, str] = field(default_factory=dict)

    @property
    def overall(self) -> Outcome:
        return combine_outcomes([a.outcome for a in self.axioms])

    @property
    def passed(self) -> bool:
        return self.overall is Outcome.PASS

    @property
    def sampled(self) -> bool:
        """True when the overall pass rests on numeric sampling only."""
        return self.overall is Outcome.UNKNOWN

    def axiom(self, name: str) -> AxiomResult:
        for axiom in self.axioms:
            if axiom.name == name:
                return axiom
        raise KeyError(name)

    def outcome_of(self, *names: str) -> Outcome:
        return combine_outcomes([self.axiom(n).outcome for n in names])

    def extend(self, other: StructureReport, prefix: str = "") -> None:
        for axiom in other.axioms:
            self.axioms.append(replace(axiom, name=prefix + axiom.name))
        self.notes.extend(n for n in other.notes if n not in self.notes)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "overall": self.overall.value,
            "axioms": [a.to_dict() for a in self.axioms],
            "notes": list(self.notes),
            "data": dict(sorted(self.data.items())),
        }


@dataclass(frozen=True)
class HomogeneityCertificate:
    kind: str
    m: int
    weight: ZeroVerdict
    parity: ZeroVerdict
    convention: str = "lambda~ = r*lambda; 1~ = +Z"

    @property
    def outcome(self) -> Outcome:
        return combine_outcomes([self.weight.outcome, self.parity.outcome])

    @property
    def passed(self) -> bool:
        return self.outcome is Outcome.PASS

    def to_report(self) -> StructureReport:
        return StructureReport(
            kind="homogeneity",
            axioms=[
                AxiomResult("euler_weight", "L_Z T = (1 - m) T", self.weight),
                AxiomResult("parity", "h_{-1}^* T = (-1)^(1-m) T", self.parity),
            ],
            notes=[f"convention: {self.convention}"],
            data={"kind": self.kind, "m": str(self.m)},
        )


@dataclass
class CheckResult:
    name: str
    kind: str
    anchor: str
    outcome: Outcome
    expected: Outcome
    report: StructureReport | None = None
    error: str | None = None
    elapsed: float | None = None

    @property
    def matched(self) -> bool:
        return self.outcome is self.expected

    def to_dict(self, include_timings: bool = False) -> dict:
        data: dict = {
            "name": self.name,
            "kind": self.kind,
            "anchor": self.anchor,
            "outcome": self.outcome.value,
            "expected": self.expected.value,
            "matched": self.matched,
        }
        if self.report is not None:
            data["report"] = self.report.to_dict()
        if self.error is not None:
            data["error"] = self.error
        if include_timings and self.elapsed is not None:
            data["elapsed"] = round(self.elapsed, 6)
        return data


@dataclass
class RunReport:
    scenario_id: str
    seed: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def all_matched(self) -> bool:
        return all(c.matched for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.all_matched else 1

    def to_dict(self, include_timings: bool = False) -> dict:
        return {
            "schema": 1,
            "scenario": self.scenario_id,
            "seed": self.seed,
            "matched": self.all_matched,
            "checks": [c.to_dict(include_timings) for c in self.checks],
        }
