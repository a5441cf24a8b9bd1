from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Mapping, Sequence

import numpy as np
import sympy as sp

from homcalc.config import DEFAULT_SETTINGS, Settings
from homcalc.errors import DegreeError, MissingRepresentation, ShapeMismatch
from homcalc.expr import ONE, ZERO, Chart, Expr, all_zero, as_expr, normalize, random_polynomial
from homcalc.models import AxiomResult, StructureReport
from homcalc.tensor import (
    Form,
    Index,
    Multivector,
    VectorField,
    ext_d,
    interior,
    lie_bracket,
    lie_derivative,
    residuals_of,
    sort_index,
    wedge,
)

logger = logging.getLogger(__name__)

Section = tuple[Expr, ...]


@dataclass(frozen=True)
class AlgebroidSpec:
    """Frame presentation: rho(e_a) = sum_i anchor[i][a] d_i, [e_a, e_b] = sum_c structure[c][a][b] e_c."""

    name: str
    base: Chart
    rank: int
    anchor: tuple[tuple[Expr, ...], ...]
    structure: tuple[tuple[tuple[Expr, ...], ...], ...]
    rep: tuple[Expr, ...] | None = None
    labels: tuple[str, ...] = ()
    frame_anchors: tuple[VectorField, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n, k = self.base.dim, self.rank
        anchor = tuple(tuple(normalize(c) for c in row) for row in self.anchor)
        if len(anchor) != n or any(len(row) != k for row in anchor):
            raise ShapeMismatch(f"Anchor of {self.name} must be {n}x{k}")
        structure = tuple(tuple(tuple(normalize(c) for c in row) for row in plane) for plane in self.structure)
        if len(structure) != k or any(len(plane) != k or any(len(row) != k for row in plane) for plane in structure):
            raise ShapeMismatch(f"Structure functions of {self.name} must be {k}x{k}x{k}")
        for c in range(k):
            for a in range(k):
                for b in range(a, k):
                    if normalize(structure[c][a][b] + structure[c][b][a]) != 0:
                        raise ShapeMismatch(f"Structure functions of {self.name} are not antisymmetric at {(c, a, b)}")
        rep = None
        if self.rep is not None:
            rep = tuple(normalize(c) for c in self.rep)
            if len(rep) != k:
                raise ShapeMismatch(f"Representation of {self.name} needs {k} entries")
        labels = tuple(self.labels) or tuple(f"e{a}" for a in range(k))
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "structure", structure)
        object.__setattr__(self, "rep", rep)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(
            self,
            "frame_anchors",
            tuple(VectorField(self.base, tuple(anchor[i][a] for i in range(n))) for a in range(k)),
        )

    def frame(self, a: int) -> Section:
        return tuple(ONE if b == a else ZERO for b in range(self.rank))

    def zero_section(self) -> Section:
        return (ZERO,) * self.rank

    def anchor_of(self, s: Sequence) -> VectorField:
        out = VectorField.zero(self.base)
        for a, coeff in enumerate(s):
            if coeff != 0:
                out = out + self.frame_anchors[a].scale(coeff)
        return out

    def bracket(self, s: Sequence, t: Sequence) -> Section:
        k = self.rank
        out = [ZERO] * k
        for a in range(k):
            if s[a] == 0:
                continue
            for b in range(k):
                if t[b] == 0:
                    continue
                for c in range(k):
                    if self.structure[c][a][b] != 0:
                        out[c] += s[a] * t[b] * self.structure[c][a][b]
                out[b] += s[a] * self.frame_anchors[a](t[b])
                out[a] -= t[b] * self.frame_anchors[b](s[a])
        return tuple(normalize(c) for c in out)

    def connection(self, s: Sequence, f) -> Expr:
        """nabla_s f = rho(s) f + phi(s) f."""
        if self.rep is None:
            raise MissingRepresentation(f"{self.name} carries no line representation")
        f = as_expr(f)
        return normalize(self.anchor_of(s)(f) + sum((c * p for c, p in zip(s, self.rep)), ZERO) * f)


def add_sections(*sections: Sequence) -> Section:
    return tuple(normalize(sum(parts, ZERO)) for parts in zip(*sections))


def scale_section(f, s: Sequence) -> Section:
    f = as_expr(f)
    return tuple(normalize(f * c) for c in s)


@dataclass(frozen=True)
class Cochain:
    """Alternating k-linear map on an algebroid frame, stored on increasing index tuples."""

    base: Chart
    rank: int
    degree: int
    components: Mapping[Index, Expr] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise DegreeError(f"Negative cochain degree {self.degree}")
        clean: dict[Index, Expr] = {}
        for idx, value in dict(self.components).items():
            idx = tuple(idx)
            if len(idx) != self.degree or any(not 0 <= i < self.rank for i in idx):
                raise ShapeMismatch(f"Cochain index {idx} does not fit degree {self.degree}, rank {self.rank}")
            sign, key = sort_index(idx)
            if sign == 0:
                raise ShapeMismatch(f"Repeated cochain index {idx}")
            clean[key] = clean.get(key, ZERO) + sign * as_expr(value)
        normalized = {k: normalize(v) for k, v in sorted(clean.items())}
        object.__setattr__(self, "components", {k: v for k, v in normalized.items() if v != 0})

    def indices(self) -> Iterator[Index]:
        return combinations(range(self.rank), self.degree)

    def value(self, idx: Sequence[int]) -> Expr:
        sign, key = sort_index(idx)
        if sign == 0:
            return ZERO
        return sign * self.components.get(key, ZERO)

    def evaluate(self, *sections: Sequence) -> Expr:
        if len(sections) != self.degree:
            raise DegreeError(f"Cochain of degree {self.degree} takes {self.degree} sections")
        if self.degree == 0:
            return self.value(())
        total = ZERO
        for idx, coeff in self.components.items():
            minor = sp.Matrix([[sections[b][i] for b in range(self.degree)] for i in idx])
            total += coeff * minor.det(method="berkowitz")
        return normalize(total)

    def interior(self, s: Sequence) -> Cochain:
        if self.degree < 1:
            raise DegreeError("Interior product of a 0-cochain")
        out = {}
        for rest in combinations(range(self.rank), self.degree - 1):
            out[rest] = sum((s[a] * self.value((a,) + rest) for a in range(self.rank) if s[a] != 0), ZERO)
        return Cochain(self.base, self.rank, self.degree - 1, out)

    def __add__(self, other: Cochain) -> Cochain:
        data = dict(self.components)
        for k, v in other.components.items():
            data[k] = data.get(k, ZERO) + v
        return Cochain(self.base, self.rank, self.degree, data)

    def __sub__(self, other: Cochain) -> Cochain:
        return self + other.scale(-1)

    def scale(self, f) -> Cochain:
        f = as_expr(f)
        return Cochain(self.base, self.rank, self.degree, {k: f * v for k, v in self.components.items()})

    def residuals(self) -> list[Expr]:
        return list(self.components.values())


def algebroid_differential(A: AlgebroidSpec, c: Cochain, twisted: bool = False) -> Cochain:
    if twisted and A.rep is None:
        raise MissingRepresentation(f"{A.name} carries no line representation")
    if c.rank != A.rank:
        raise ShapeMismatch(f"Cochain of rank {c.rank} on algebroid of rank {A.rank}")
    k = A.rank
    out = {}
    for idx in combinations(range(k), c.degree + 1):
        total = ZERO
        for i, a in enumerate(idx):
            val = c.value(idx[:i] + idx[i + 1 :])
            if val == 0:
                continue
            term = A.frame_anchors[a](val)
            if twisted:
                term += A.rep[a] * val
            total += (-1) ** i * term
        for i, j in combinations(range(len(idx)), 2):
            a, b = idx[i], idx[j]
            rest = idx[:i] + idx[i + 1 : j] + idx[j + 1 :]
            for cc in range(k):
                coeff = A.structure[cc][a][b]
                if coeff != 0:
                    total += (-1) ** (i + j) * coeff * c.value((cc,) + rest)
        out[idx] = total
    return Cochain(A.base, k, c.degree + 1, out)


def _axiom(name: str, anchor: str, exprs, seed: int, settings: Settings) -> AxiomResult:
    return AxiomResult(name, anchor, all_zero(exprs, seed, settings))


def verify_algebroid(A: AlgebroidSpec, seed: int = DEFAULT_SETTINGS.seed, settings: Settings = DEFAULT_SETTINGS) -> StructureReport:
    k = A.rank
    frames = [A.frame(a) for a in range(k)]
    anchor_residuals = []
    for a, b in combinations(range(k), 2):
        lhs = A.anchor_of(A.bracket(frames[a], frames[b]))
        rhs = lie_bracket(A.frame_anchors[a], A.frame_anchors[b])
        anchor_residuals.extend((lhs - rhs).residuals())
    jacobi_residuals = []
    for a, b, c in combinations(range(k), 3):
        jacobiator = add_sections(
            A.bracket(A.bracket(frames[a], frames[b]), frames[c]),
            A.bracket(A.bracket(frames[b], frames[c]), frames[a]),
            A.bracket(A.bracket(frames[c], frames[a]), frames[b]),
        )
        jacobi_residuals.extend(jacobiator)
    report = StructureReport(
        kind="algebroid",
        axioms=[
            _axiom("anchor_bracket", "rho[a, b] = [rho a, rho b]", anchor_residuals, seed, settings),
            _axiom("jacobi", "frame Jacobi identity", jacobi_residuals, seed, settings),
        ],
        data={"name": A.name, "rank": str(k)},
    )
    if A.rep is not None:
        flat = []
        for a, b in combinations(range(k), 2):
            curvature = A.frame_anchors[a](A.rep[b]) - A.frame_anchors[b](A.rep[a])
            curvature -= sum((A.structure[c][a][b] * A.rep[c] for c in range(k)), ZERO)
            flat.append(curvature)
        report.axioms.append(_axiom("representation_flat", "nabla is flat", flat, seed, settings))
    logger.debug("verify_algebroid(%s) -> %s", A.name, report.overall.value)
    return report


def _zero_structure(k: int) -> tuple:
    return tuple(tuple(tuple(ZERO for _ in range(k)) for _ in range(k)) for _ in range(k))


def gauge_algebroid(chart: Chart) -> AlgebroidSpec:
    """Derivations of the trivial line bundle in the frame {d_1, ..., d_n, 1}."""
    n = chart.dim
    anchor = tuple(tuple(ONE if a == i else ZERO for a in range(n + 1)) for i in range(n))
    rep = tuple(ZERO for _ in range(n)) + (ONE,)
    labels = tuple(f"D{v}" for v in chart.vars) + ("1",)
    return AlgebroidSpec("gauge", chart, n + 1, anchor, _zero_structure(n + 1), rep, labels)


def abelian_algebroid(chart: Chart, rank: int) -> AlgebroidSpec:
    anchor = tuple(tuple(ZERO for _ in range(rank)) for _ in range(chart.dim))
    return AlgebroidSpec("abelian", chart, rank, anchor, _zero_structure(rank))


def tangent_algebroid(chart: Chart) -> AlgebroidSpec:
    n = chart.dim
    anchor = tuple(tuple(ONE if a == i else ZERO for a in range(n)) for i in range(n))
    return AlgebroidSpec("tangent", chart, n, anchor, _zero_structure(n), labels=tuple(f"D{v}" for v in chart.vars))


def cotangent_algebroid(pi: Multivector) -> AlgebroidSpec:
    """Frame {dx_a}; [dx_a, dx_b]_pi = d pi^{ab}, rho(dx_a) = pi^sharp dx_a."""
    chart = pi.chart
    n = chart.dim
    syms = chart.symbols
    anchor = tuple(tuple(pi.value((a, i)) for a in range(n)) for i in range(n))
    structure = tuple(
        tuple(tuple(sp.diff(pi.value((a, b)), syms[c]) for b in range(n)) for a in range(n)) for c in range(n)
    )
    return AlgebroidSpec("cotangent", chart, n, anchor, structure, labels=tuple(f"d{v}" for v in chart.vars))


def jet_algebroid(J) -> AlgebroidSpec:
    """Frame {(dx_i, 0), (0, 1)} of first jets with the bracket of a Jacobi biderivation."""
    from homcalc.atiyah import JetSection, jet_bracket, sharp as jet_sharp

    chart = J.chart
    n = chart.dim
    frames = [JetSection.frame(chart, a) for a in range(n + 1)]
    images = [jet_sharp(J, psi) for psi in frames]
    anchor = tuple(tuple(images[a].symbol.components[i] for a in range(n + 1)) for i in range(n))
    rep = tuple(img.f for img in images)
    table = {}
    for a, b in combinations(range(n + 1), 2):
        table[(a, b)] = jet_bracket(J, frames[a], frames[b]).frame_components()
    structure = tuple(
        tuple(
            tuple(
                ZERO if a == b else (table[(a, b)][c] if a < b else -table[(b, a)][c])
                for b in range(n + 1)
            )
            for a in range(n + 1)
        )
        for c in range(n + 1)
    )
    labels = tuple(f"d{v}" for v in chart.vars) + ("j1",)
    return AlgebroidSpec("jet", chart, n + 1, anchor, structure, rep, labels)


@dataclass(frozen=True)
class SpencerData:
    """Frame values of D and of its Leibniz defect ell; D(f e_a) = f D(e_a) + df ^ ell(e_a)."""

    base: Chart
    degree: int
    D: tuple[Form, ...]
    ell: tuple[Form, ...]

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise DegreeError("Spencer operators need degree >= 1")
        if len(self.D) != len(self.ell):
            raise ShapeMismatch("D and ell need the same number of frame values")
        for form in self.D:
            if form.degree != self.degree:
                raise ShapeMismatch(f"D values must be {self.degree}-forms")
        for form in self.ell:
            if form.degree != self.degree - 1:
                raise ShapeMismatch(f"ell values must be {self.degree - 1}-forms")
        object.__setattr__(self, "D", tuple(self.D))
        object.__setattr__(self, "ell", tuple(self.ell))

    @property
    def rank(self) -> int:
        return len(self.D)

    def apply_ell(self, s: Sequence) -> Form:
        out = Form.zero(self.base, self.degree - 1)
        for coeff, form in zip(s, self.ell):
            if coeff != 0:
                out = out + form.scale(coeff)
        return out

    def apply_D(self, s: Sequence) -> Form:
        out = Form.zero(self.base, self.degree)
        for coeff, d_form, l_form in zip(s, self.D, self.ell):
            if coeff == 0:
                continue
            out = out + d_form.scale(coeff) + wedge(ext_d(Form.scalar(self.base, coeff)), l_form)
        return out


SPENCER_SIGN_NOTE = "second Spencer identity evaluated as L_rho(a) ell(b) - i_rho(b) D(a) - ell[a, b] = 0"


def random_section(A: AlgebroidSpec, rng: np.random.Generator) -> Section:
    return tuple(random_polynomial(A.base, rng, degree=1, terms=2) for _ in range(A.rank))


def module_pairs(A: AlgebroidSpec, seed: int, count: int) -> list[tuple[Section, Section]]:
    """Ordered frame pairs followed by seeded function-multiplied pairs."""
    frames = [A.frame(a) for a in range(A.rank)]
    pairs = [(frames[a], frames[b]) for a in range(A.rank) for b in range(A.rank)]
    rng = np.random.default_rng(seed)
    pairs.extend((random_section(A, rng), random_section(A, rng)) for _ in range(count))
    return pairs


def verify_spencer(
    A: AlgebroidSpec,
    S: SpencerData,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
) -> StructureReport:
    if S.rank != A.rank:
        raise ShapeMismatch(f"Spencer data of rank {S.rank} on algebroid of rank {A.rank}")
    A.base.require_same(S.base)
    first, second, third = [], [], []
    for alpha, beta in module_pairs(A, seed, settings.random_pairs):
        rho_a, rho_b = A.anchor_of(alpha), A.anchor_of(beta)
        bracket = A.bracket(alpha, beta)
        d_a, d_b = S.apply_D(alpha), S.apply_D(beta)
        l_a, l_b = S.apply_ell(alpha), S.apply_ell(beta)
        first.extend(residuals_of([lie_derivative(rho_a, d_b) - lie_derivative(rho_b, d_a) - S.apply_D(bracket)]))
        second.extend(residuals_of([lie_derivative(rho_a, l_b) - interior(rho_b, d_a) - S.apply_ell(bracket)]))
        if S.degree >= 2:
            third.extend(residuals_of([interior(rho_a, l_b) + interior(rho_b, l_a)]))
    report = StructureReport(
        kind="spencer",
        axioms=[
            _axiom("spencer_bracket", "L_rho(a) D(b) - L_rho(b) D(a) - D[a, b] = 0", first, seed, settings),
            _axiom("spencer_mixed", "L_rho(a) ell(b) - i_rho(b) D(a) - ell[a, b] = 0", second, seed, settings),
            _axiom("spencer_symmetric", "i_rho(a) ell(b) + i_rho(b) ell(a) = 0", third, seed, settings),
        ],
        notes=[SPENCER_SIGN_NOTE],
        data={"algebroid": A.name, "degree": str(S.degree)},
    )
    logger.debug("verify_spencer(%s) -> %s", A.name, report.overall.value)
    return report


@dataclass(frozen=True)
class AlgebroidDerivation:
    """delta(sum f_a e_a) = sum f_a delta(e_a) + symbol(f_a) e_a."""

    frame_values: tuple[Section, ...]
    symbol: VectorField

    def apply(self, A: AlgebroidSpec, s: Sequence) -> Section:
        parts = [scale_section(coeff, value) for coeff, value in zip(s, self.frame_values) if coeff != 0]
        parts.append(tuple(self.symbol(coeff) for coeff in s))
        return add_sections(*parts)


def verify_algebroid_derivation(
    A: AlgebroidSpec,
    delta: AlgebroidDerivation,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
) -> StructureReport:
    if len(delta.frame_values) != A.rank or any(len(v) != A.rank for v in delta.frame_values):
        raise ShapeMismatch(f"Derivation needs {A.rank} frame values of rank {A.rank}")
    A.base.require_same(delta.symbol.chart)
    frames = [A.frame(a) for a in range(A.rank)]
    bracket_residuals = []
    for a, b in combinations(range(A.rank), 2):
        lhs = delta.apply(A, A.bracket(frames[a], frames[b]))
        rhs = add_sections(
            A.bracket(delta.apply(A, frames[a]), frames[b]),
            A.bracket(frames[a], delta.apply(A, frames[b])),
        )
        bracket_residuals.extend(normalize(x - y) for x, y in zip(lhs, rhs))
    anchor_residuals = []
    for a in range(A.rank):
        lhs = lie_bracket(delta.symbol, A.frame_anchors[a])
        rhs = A.anchor_of(delta.apply(A, frames[a]))
        anchor_residuals.extend((lhs - rhs).residuals())
    return StructureReport(
        kind="algebroid_derivation",
        axioms=[
            _axiom("derivation_bracket", "delta[a, b] = [delta a, b] + [a, delta b]", bracket_residuals, seed, settings),
            _axiom("derivation_anchor", "[sigma(delta), rho(a)] = rho(delta a)", anchor_residuals, seed, settings),
        ],
        data={"algebroid": A.name},
    )


def homogeneity_derivation(pi: Multivector, zeta: VectorField) -> AlgebroidDerivation:
    """delta = L_zeta - 1 on the cotangent algebroid: delta(dx_a) = d(zeta^a) - dx_a."""
    chart = pi.chart
    syms = chart.symbols
    n = chart.dim
    values = tuple(
        tuple(normalize(sp.diff(zeta.components[a], syms[c]) - (ONE if a == c else ZERO)) for c in range(n))
        for a in range(n)
    )
    return AlgebroidDerivation(values, zeta)


def check_homogeneity_derivation(
    pi: Multivector,
    zeta: VectorField,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
) -> StructureReport:
    pi.chart.require_same(zeta.chart)
    A = cotangent_algebroid(pi)
    report = verify_algebroid_derivation(A, homogeneity_derivation(pi, zeta), seed, settings)
    report.kind = "homogeneity_derivation"
    weight = lie_derivative(zeta, pi) + pi
    report.axioms.append(_axiom("homogeneity", "L_zeta pi = -pi", weight.residuals(), seed, settings))
    derivation = report.outcome_of("derivation_bracket", "derivation_anchor")
    homogeneous = report.outcome_of("homogeneity")
    report.data["agree"] = str(derivation is homogeneous).lower()
    return report
