"""Calculus on the trivial line bundle L = R_M.

Derivations are written (X, f) and act by X(lambda) + f*lambda.  Jets are (alpha, g)
and pair with derivations by alpha(X) + g*f.  Atiyah k-forms are stored as (beta, gamma)
and, equivalently, as cochains on the gauge frame {d_1, ..., d_n, 1} with c(I) = beta_I
and c(J, 1) = gamma_J.  Multiderivations (P, Q) are alternating maps on the jet frame
{(dx_i, 0), (0, 1)} with D(I) = P^I and D(J, (0, 1)) = (-1)^(m+1) Q^J.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

import sympy as sp

from homcalc.algebroid import Cochain, algebroid_differential, gauge_algebroid
from homcalc.config import DEFAULT_SETTINGS, Settings
from homcalc.errors import DegreeError, KindMismatch, ShapeMismatch
from homcalc.expr import ONE, ZERO, Chart, Expr, as_expr, normalize
from homcalc.tensor import Form, Multivector, VectorField, covector, ext_d, invert_matrix, lie_bracket, split_positions

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Derivation:
    symbol: VectorField
    f: Expr = ZERO

    def __post_init__(self) -> None:
        object.__setattr__(self, "f", normalize(self.f))

    @property
    def chart(self) -> Chart:
        return self.symbol.chart

    @classmethod
    def from_frame(cls, chart: Chart, comps: Sequence) -> Derivation:
        if len(comps) != chart.dim + 1:
            raise ShapeMismatch(f"Derivation frame components need {chart.dim + 1} entries")
        return cls(VectorField(chart, tuple(comps[: chart.dim])), as_expr(comps[chart.dim]))

    @classmethod
    def frame(cls, chart: Chart, a: int) -> Derivation:
        return cls.from_frame(chart, [ONE if b == a else ZERO for b in range(chart.dim + 1)])

    @classmethod
    def coordinate(cls, chart: Chart, var: str) -> Derivation:
        return cls(VectorField.coordinate(chart, var))

    @classmethod
    def identity(cls, chart: Chart) -> Derivation:
        return cls(VectorField.zero(chart), ONE)

    def __call__(self, lam) -> Expr:
        lam = as_expr(lam)
        return normalize(self.symbol(lam) + self.f * lam)

    def frame_components(self) -> tuple[Expr, ...]:
        return self.symbol.components + (self.f,)

    def __add__(self, other: Derivation) -> Derivation:
        return Derivation(self.symbol + other.symbol, self.f + other.f)

    def __sub__(self, other: Derivation) -> Derivation:
        return Derivation(self.symbol - other.symbol, self.f - other.f)

    def scale(self, g) -> Derivation:
        g = as_expr(g)
        return Derivation(self.symbol.scale(g), g * self.f)

    def residuals(self) -> list[Expr]:
        return [c for c in self.frame_components() if c != 0]

    def __str__(self) -> str:
        return f"({self.symbol}; {self.f})"


def identity_derivation(chart: Chart) -> Derivation:
    return Derivation.identity(chart)


@dataclass(frozen=True)
class JetSection:
    alpha: Form
    g: Expr = ZERO

    def __post_init__(self) -> None:
        if self.alpha.degree != 1:
            raise DegreeError("Jet sections carry a 1-form")
        object.__setattr__(self, "g", normalize(self.g))

    @property
    def chart(self) -> Chart:
        return self.alpha.chart

    @classmethod
    def from_frame(cls, chart: Chart, comps: Sequence) -> JetSection:
        if len(comps) != chart.dim + 1:
            raise ShapeMismatch(f"Jet frame components need {chart.dim + 1} entries")
        return cls(covector(chart, comps[: chart.dim]), as_expr(comps[chart.dim]))

    @classmethod
    def frame(cls, chart: Chart, a: int) -> JetSection:
        return cls.from_frame(chart, [ONE if b == a else ZERO for b in range(chart.dim + 1)])

    def frame_components(self) -> tuple[Expr, ...]:
        return tuple(self.alpha.value((i,)) for i in range(self.chart.dim)) + (self.g,)

    def as_atiyah_form(self) -> AtiyahForm:
        return AtiyahForm(self.alpha, Form.scalar(self.chart, self.g))

    def __add__(self, other: JetSection) -> JetSection:
        return JetSection(self.alpha + other.alpha, self.g + other.g)

    def __sub__(self, other: JetSection) -> JetSection:
        return JetSection(self.alpha - other.alpha, self.g - other.g)

    def scale(self, h) -> JetSection:
        h = as_expr(h)
        return JetSection(self.alpha.scale(h), h * self.g)

    def residuals(self) -> list[Expr]:
        return [c for c in self.frame_components() if c != 0]


def jet_prolongation(lam, chart: Chart) -> JetSection:
    lam = as_expr(lam)
    return JetSection(ext_d(Form.scalar(chart, lam)), lam)


def pair(psi: JetSection, delta: Derivation) -> Expr:
    psi.chart.require_same(delta.chart)
    return normalize(psi.alpha(delta.symbol) + psi.g * delta.f)


@dataclass(frozen=True)
class AtiyahForm:
    beta: Form
    gamma: Form | None = None

    def __post_init__(self) -> None:
        k = self.beta.degree
        if self.gamma is None:
            if k >= 1:
                object.__setattr__(self, "gamma", Form.zero(self.beta.chart, k - 1))
            return
        if k == 0:
            if self.gamma.residuals():
                raise DegreeError("Atiyah 0-forms have no gamma part")
            object.__setattr__(self, "gamma", None)
            return
        self.beta.chart.require_same(self.gamma.chart)
        if self.gamma.degree != k - 1:
            raise DegreeError(f"gamma of an Atiyah {k}-form must have degree {k - 1}")

    @property
    def chart(self) -> Chart:
        return self.beta.chart

    @property
    def degree(self) -> int:
        return self.beta.degree

    @classmethod
    def scalar(cls, chart: Chart, lam) -> AtiyahForm:
        return cls(Form.scalar(chart, lam))

    @classmethod
    def zero(cls, chart: Chart, k: int) -> AtiyahForm:
        return cls(Form.zero(chart, k))

    def to_cochain(self) -> Cochain:
        n = self.chart.dim
        data = dict(self.beta.components)
        if self.gamma is not None:
            for idx, value in self.gamma.components.items():
                data[idx + (n,)] = value
        return Cochain(self.chart, n + 1, self.degree, data)

    @classmethod
    def from_cochain(cls, chart: Chart, c: Cochain) -> AtiyahForm:
        n = chart.dim
        beta = {idx: v for idx, v in c.components.items() if n not in idx}
        gamma = {idx[:-1]: v for idx, v in c.components.items() if n in idx}
        if c.degree == 0:
            return cls(Form(chart, 0, beta))
        return cls(Form(chart, c.degree, beta), Form(chart, c.degree - 1, gamma))

    def __call__(self, *derivations: Derivation) -> Expr:
        return self.to_cochain().evaluate(*[d.frame_components() for d in derivations])

    def __add__(self, other: AtiyahForm) -> AtiyahForm:
        return AtiyahForm.from_cochain(self.chart, self.to_cochain() + other.to_cochain())

    def __sub__(self, other: AtiyahForm) -> AtiyahForm:
        return AtiyahForm.from_cochain(self.chart, self.to_cochain() - other.to_cochain())

    def scale(self, h) -> AtiyahForm:
        return AtiyahForm.from_cochain(self.chart, self.to_cochain().scale(h))

    def residuals(self) -> list[Expr]:
        return self.to_cochain().residuals()

    def __str__(self) -> str:
        return f"(beta: {self.beta}; gamma: {self.gamma if self.gamma is not None else 0})"


@dataclass(frozen=True)
class Multiderivation:
    P: Multivector
    Q: Multivector | None = None

    def __post_init__(self) -> None:
        m = self.P.degree
        if self.Q is None:
            if m >= 1:
                object.__setattr__(self, "Q", Multivector.zero(self.P.chart, m - 1))
            return
        if m == 0:
            if self.Q.residuals():
                raise DegreeError("Sections have no Q part")
            object.__setattr__(self, "Q", None)
            return
        self.P.chart.require_same(self.Q.chart)
        if self.Q.degree != m - 1:
            raise DegreeError(f"Q of an {m}-multiderivation must have degree {m - 1}")

    @property
    def chart(self) -> Chart:
        return self.P.chart

    @property
    def arity(self) -> int:
        return self.P.degree

    @classmethod
    def zero(cls, chart: Chart, m: int) -> Multiderivation:
        return cls(Multivector.zero(chart, m))

    @classmethod
    def from_derivation(cls, delta: Derivation) -> Multiderivation:
        return cls(delta.symbol.as_multivector(), Multivector.scalar(delta.chart, delta.f))

    @classmethod
    def section(cls, chart: Chart, lam) -> Multiderivation:
        return cls(Multivector.scalar(chart, lam))

    def to_cochain(self) -> Cochain:
        n = self.chart.dim
        m = self.arity
        data = dict(self.P.components)
        if self.Q is not None:
            sign = (-1) ** (m + 1)
            for idx, value in self.Q.components.items():
                data[idx + (n,)] = sign * value
        return Cochain(self.chart, n + 1, m, data)

    @classmethod
    def from_cochain(cls, chart: Chart, c: Cochain) -> Multiderivation:
        n = chart.dim
        m = c.degree
        P = Multivector(chart, m, {idx: v for idx, v in c.components.items() if n not in idx})
        if m == 0:
            return cls(P)
        sign = (-1) ** (m + 1)
        Q = Multivector(chart, m - 1, {idx[:-1]: sign * v for idx, v in c.components.items() if n in idx})
        return cls(P, Q)

    def as_derivation(self) -> Derivation:
        if self.arity != 1:
            raise DegreeError(f"Arity {self.arity} multiderivation is not a derivation")
        return Derivation(self.P.as_vector_field(), self.Q.function())

    def __call__(self, *jets: JetSection) -> Expr:
        return self.to_cochain().evaluate(*[psi.frame_components() for psi in jets])

    def __add__(self, other: Multiderivation) -> Multiderivation:
        return Multiderivation.from_cochain(self.chart, self.to_cochain() + other.to_cochain())

    def __sub__(self, other: Multiderivation) -> Multiderivation:
        return Multiderivation.from_cochain(self.chart, self.to_cochain() - other.to_cochain())

    def scale(self, h) -> Multiderivation:
        return Multiderivation.from_cochain(self.chart, self.to_cochain().scale(h))

    def residuals(self) -> list[Expr]:
        return self.to_cochain().residuals()

    def __str__(self) -> str:
        return f"(P: {self.P}; Q: {self.Q if self.Q is not None else 0})"


@dataclass(frozen=True)
class AtiyahTensor11:
    """Endomorphism of derivations: U(e_b) = sum_a matrix[a][b] e_a on {d_1, ..., d_n, 1}."""

    chart: Chart
    matrix: tuple[tuple[Expr, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(normalize(c) for c in row) for row in self.matrix)
        k = self.chart.dim + 1
        if len(rows) != k or any(len(r) != k for r in rows):
            raise ShapeMismatch(f"Atiyah (1,1)-tensor on {self.chart.vars} needs a {k}x{k} matrix")
        object.__setattr__(self, "matrix", rows)

    @property
    def size(self) -> int:
        return self.chart.dim + 1

    @classmethod
    def identity(cls, chart: Chart) -> AtiyahTensor11:
        k = chart.dim + 1
        return cls(chart, tuple(tuple(ONE if a == b else ZERO for b in range(k)) for a in range(k)))

    @classmethod
    def from_matrix(cls, chart: Chart, matrix) -> AtiyahTensor11:
        m = sp.Matrix(matrix)
        return cls(chart, tuple(tuple(m[i, j] for j in range(m.cols)) for i in range(m.rows)))

    def as_matrix(self) -> sp.Matrix:
        return sp.Matrix(self.matrix)

    def apply(self, delta: Derivation) -> Derivation:
        self.chart.require_same(delta.chart)
        comps = delta.frame_components()
        k = self.size
        return Derivation.from_frame(self.chart, [sum((self.matrix[a][b] * comps[b] for b in range(k)), ZERO) for a in range(k)])

    def dagger(self, psi: JetSection) -> JetSection:
        """<U^dagger psi, D> = <psi, U D>."""
        self.chart.require_same(psi.chart)
        comps = psi.frame_components()
        k = self.size
        return JetSection.from_frame(self.chart, [sum((comps[a] * self.matrix[a][b] for a in range(k)), ZERO) for b in range(k)])

    def compose(self, other: AtiyahTensor11) -> AtiyahTensor11:
        return AtiyahTensor11.from_matrix(self.chart, self.as_matrix() * other.as_matrix())

    def power(self, k: int) -> AtiyahTensor11:
        out = AtiyahTensor11.identity(self.chart)
        for _ in range(k):
            out = out.compose(self)
        return out

    def __sub__(self, other: AtiyahTensor11) -> AtiyahTensor11:
        return AtiyahTensor11.from_matrix(self.chart, self.as_matrix() - other.as_matrix())

    def scale(self, h) -> AtiyahTensor11:
        return AtiyahTensor11.from_matrix(self.chart, as_expr(h) * self.as_matrix())

    def residuals(self) -> list[Expr]:
        return [c for row in self.matrix for c in row if c != 0]

    def __str__(self) -> str:
        return "[" + "; ".join(", ".join(str(c) for c in row) for row in self.matrix) + "]"


def dagger(T: AtiyahTensor11, psi: JetSection) -> JetSection:
    return T.dagger(psi)


@dataclass(frozen=True)
class AtiyahVectorValued2Form:
    chart: Chart
    components: Mapping[tuple[int, int], Derivation] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {}
        for (a, b), v in dict(self.components).items():
            if a >= b:
                raise ShapeMismatch(f"Keys must be increasing, got {(a, b)}")
            if v.residuals():
                clean[(a, b)] = v
        object.__setattr__(self, "components", dict(sorted(clean.items())))

    def value(self, a: int, b: int) -> Derivation:
        zero = Derivation(VectorField.zero(self.chart))
        if a == b:
            return zero
        if a < b:
            return self.components.get((a, b), zero)
        return self.value(b, a).scale(-1)

    def __sub__(self, other: AtiyahVectorValued2Form) -> AtiyahVectorValued2Form:
        keys = set(self.components) | set(other.components)
        return AtiyahVectorValued2Form(self.chart, {k: self.value(*k) - other.value(*k) for k in keys})

    def scale(self, h) -> AtiyahVectorValued2Form:
        return AtiyahVectorValued2Form(self.chart, {k: v.scale(h) for k, v in self.components.items()})

    def residuals(self) -> list[Expr]:
        return [c for v in self.components.values() for c in v.residuals()]

    def __str__(self) -> str:
        if not self.components:
            return "0"
        labels = self.chart.vars + ("1",)
        return "; ".join(f"({labels[a]},{labels[b]}): {v}" for (a, b), v in self.components.items())


def derivation_bracket(d1: Derivation, d2: Derivation) -> Derivation:
    d1.chart.require_same(d2.chart)
    return Derivation(lie_bracket(d1.symbol, d2.symbol), d1.symbol(d2.f) - d2.symbol(d1.f))


def d_D(omega: AtiyahForm) -> AtiyahForm:
    """Gauge-algebroid differential with coefficients in L."""
    A = gauge_algebroid(omega.chart)
    return AtiyahForm.from_cochain(omega.chart, algebroid_differential(A, omega.to_cochain(), twisted=True))


def atiyah_interior(delta: Derivation, omega: AtiyahForm) -> AtiyahForm:
    delta.chart.require_same(omega.chart)
    if omega.degree < 1:
        raise DegreeError("Interior product of an Atiyah 0-form")
    return AtiyahForm.from_cochain(omega.chart, omega.to_cochain().interior(delta.frame_components()))


def atiyah_lie_derivative(delta: Derivation, omega: AtiyahForm) -> AtiyahForm:
    if omega.degree == 0:
        return AtiyahForm.scalar(omega.chart, delta(omega.beta.function()))
    return atiyah_interior(delta, d_D(omega)) + d_D(atiyah_interior(delta, omega))


def apply_multiderivation(D: Multiderivation, *sections) -> Expr:
    if len(sections) != D.arity:
        raise DegreeError(f"Multiderivation of arity {D.arity} applied to {len(sections)} sections")
    if D.arity == 0:
        return D.P.function()
    return D(*[jet_prolongation(lam, D.chart) for lam in sections])


def _gerstenhaber(D1: Multiderivation, D2: Multiderivation, sections: Sequence[Expr]) -> Expr:
    m1, m2 = D1.arity, D2.arity
    m = len(sections)
    total = ZERO
    if m1 >= 1:
        for first, second, sign in split_positions(m, m2):
            inner = apply_multiderivation(D2, *[sections[i] for i in first])
            total += sign * apply_multiderivation(D1, inner, *[sections[i] for i in second])
    if m2 >= 1:
        outer = (-1) ** ((m1 + 1) * (m2 + 1))
        for first, second, sign in split_positions(m, m1):
            inner = apply_multiderivation(D1, *[sections[i] for i in first])
            total -= outer * sign * apply_multiderivation(D2, inner, *[sections[i] for i in second])
    return normalize(total)


def sj_bracket(D1: Multiderivation, D2: Multiderivation) -> Multiderivation:
    """Schouten-Jacobi bracket: evaluate the Gerstenhaber formula, then read off (P, Q)."""
    D1.chart.require_same(D2.chart)
    chart = D1.chart
    n = chart.dim
    m = D1.arity + D2.arity - 1
    if m < 0 or m > n + 1:
        raise DegreeError(f"Bracket arity {m} out of range for dimension {n}")
    xs = chart.symbols
    if m == 0:
        return Multiderivation.section(chart, _gerstenhaber(D1, D2, []))
    Q = {J: _gerstenhaber(D1, D2, [ONE] + [xs[j] for j in J]) for J in combinations(range(n), m - 1)}
    P = {}
    for I in combinations(range(n), m):
        value = _gerstenhaber(D1, D2, [xs[i] for i in I])
        for k, i in enumerate(I):
            value -= (-1) ** k * xs[i] * Q[I[:k] + I[k + 1 :]]
        P[I] = value
    return Multiderivation(Multivector(chart, m, P), Multivector(chart, m - 1, Q))


def fnd_bracket(U: AtiyahTensor11, V: AtiyahTensor11) -> AtiyahVectorValued2Form:
    U.chart.require_same(V.chart)
    chart = U.chart
    frames = [Derivation.frame(chart, a) for a in range(chart.dim + 1)]
    out = {}
    for a, b in combinations(range(len(frames)), 2):
        x, y = frames[a], frames[b]

        def half(S: AtiyahTensor11, T: AtiyahTensor11) -> Derivation:
            return (
                derivation_bracket(S.apply(x), T.apply(y))
                - S.apply(derivation_bracket(T.apply(x), y))
                - S.apply(derivation_bracket(x, T.apply(y)))
            )

        out[(a, b)] = half(U, V) + half(V, U)
    return AtiyahVectorValued2Form(chart, out)


def atiyah_torsion(U: AtiyahTensor11) -> AtiyahVectorValued2Form:
    chart = U.chart
    frames = [Derivation.frame(chart, a) for a in range(chart.dim + 1)]
    out = {}
    for a, b in combinations(range(len(frames)), 2):
        x, y = frames[a], frames[b]
        out[(a, b)] = (
            derivation_bracket(U.apply(x), U.apply(y))
            - U.apply(derivation_bracket(U.apply(x), y))
            - U.apply(derivation_bracket(x, U.apply(y)))
        )
    return AtiyahVectorValued2Form(chart, out)


def _inserted(T: AtiyahTensor11, c: Cochain, slot: int, idx: Sequence[int], covariant: bool) -> Expr:
    total = ZERO
    for b in range(T.size):
        coeff = T.matrix[b][idx[slot]] if covariant else T.matrix[idx[slot]][b]
        if coeff != 0:
            total += coeff * c.value(tuple(idx[:slot]) + (b,) + tuple(idx[slot + 1 :]))
    return total


def atiyah_contract(T: AtiyahTensor11, U, slot: int = 0):
    """Insert T into a slot of an Atiyah form, or T^dagger into a slot of a multiderivation."""
    T.chart.require_same(U.chart)
    if isinstance(U, AtiyahForm):
        covariant = True
    elif isinstance(U, Multiderivation):
        covariant = False
    else:
        raise KindMismatch("atiyah_contract needs an Atiyah form or a multiderivation")
    c = U.to_cochain()
    if not 0 <= slot < c.degree:
        raise DegreeError(f"Slot {slot} out of range for degree {c.degree}")
    out = Cochain(U.chart, c.rank, c.degree, {idx: _inserted(T, c, slot, idx, covariant) for idx in c.indices()})
    return type(U).from_cochain(U.chart, out)


def atiyah_skewness_residuals(T: AtiyahTensor11, U) -> list[Expr]:
    """Symmetric part of U(T-, -) for a degree 2 Atiyah form or biderivation."""
    c = U.to_cochain()
    if c.degree != 2:
        raise DegreeError("Skewness is checked on degree 2 tensors")
    covariant = isinstance(U, AtiyahForm)
    return [
        normalize(_inserted(T, c, 0, (a, b), covariant) + _inserted(T, c, 0, (b, a), covariant))
        for a in range(c.rank)
        for b in range(a, c.rank)
    ]


def biderivation_value(J: Multiderivation, psi: JetSection, chi: JetSection) -> Expr:
    if J.arity != 2:
        raise DegreeError("biderivation_value needs arity 2")
    return J(psi, chi)


def sharp(J: Multiderivation, psi: JetSection) -> Derivation:
    """J^sharp psi, fixed by <chi, J^sharp psi> = J(psi, chi)."""
    chart = J.chart
    return Derivation.from_frame(chart, [J(psi, JetSection.frame(chart, a)) for a in range(chart.dim + 1)])


def jet_bracket(J: Multiderivation, psi: JetSection, chi: JetSection) -> JetSection:
    """[psi, chi]_J = L_{J#psi} chi - L_{J#chi} psi - d_D J(psi, chi)."""
    value = (
        atiyah_lie_derivative(sharp(J, psi), chi.as_atiyah_form())
        - atiyah_lie_derivative(sharp(J, chi), psi.as_atiyah_form())
        - d_D(AtiyahForm.scalar(J.chart, J(psi, chi)))
    )
    return JetSection(value.beta, value.gamma.function())


def atiyah_form_matrix(omega: AtiyahForm) -> sp.Matrix:
    """W[a][b] = omega(e_a, e_b) on the gauge frame."""
    if omega.degree != 2:
        raise DegreeError("Matrix view needs an Atiyah 2-form")
    c = omega.to_cochain()
    return sp.Matrix(c.rank, c.rank, lambda a, b: c.value((a, b)))


def biderivation_matrix(J: Multiderivation) -> sp.Matrix:
    """P[a][b] = J(eps_a, eps_b) on the jet frame."""
    if J.arity != 2:
        raise DegreeError("Matrix view needs a biderivation")
    c = J.to_cochain()
    return sp.Matrix(c.rank, c.rank, lambda a, b: c.value((a, b)))


def invert_atiyah_form(omega: AtiyahForm, settings: Settings = DEFAULT_SETTINGS) -> Multiderivation:
    """J = -W^(-1); raises NotNondegenerate on a singular form."""
    inverse = -invert_matrix(atiyah_form_matrix(omega), settings)
    chart = omega.chart
    data = {(a, b): inverse[a, b] for a, b in combinations(range(chart.dim + 1), 2)}
    return Multiderivation.from_cochain(chart, Cochain(chart, chart.dim + 1, 2, data))


def invert_biderivation(J: Multiderivation, settings: Settings = DEFAULT_SETTINGS) -> AtiyahForm:
    inverse = -invert_matrix(biderivation_matrix(J), settings)
    chart = J.chart
    data = {(a, b): inverse[a, b] for a, b in combinations(range(chart.dim + 1), 2)}
    return AtiyahForm.from_cochain(chart, Cochain(chart, chart.dim + 1, 2, data))
