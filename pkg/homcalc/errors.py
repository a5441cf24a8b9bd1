from __future__ import annotations


class HomcalcError(Exception):
    """Base class for every error raised by homcalc."""


class ChartMismatch(HomcalcError):
    pass


class DivisionByZero(HomcalcError):
    pass


class UnboundVariable(HomcalcError):
    pass


class DegreeError(HomcalcError):
    """Degree, slot or arity out of range."""


class KindMismatch(HomcalcError):
    pass


class NotHomogeneous(HomcalcError):
    pass


class NotContact(HomcalcError):
    pass


class NotNondegenerate(HomcalcError):
    pass


class DegenerateForm(NotNondegenerate):
    pass


class DegenerateJacobi(NotNondegenerate):
    pass


class MissingRepresentation(HomcalcError):
    pass


class ShapeMismatch(HomcalcError):
    pass


class MissingRightInvariantRule(HomcalcError):
    pass


class LiftMismatch(HomcalcError):
    pass


class ScenarioError(HomcalcError):
    """Parse or validation error in a scenario file."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None, symbol: str | None = None) -> None:
        self.line = line
        self.column = column
        self.symbol = symbol
        where = ""
        if line is not None:
            where = f" (line {line}, column {column or 0})"
        elif column is not None:
            where = f" (position {column})"
        super().__init__(f"{message}{where}")
