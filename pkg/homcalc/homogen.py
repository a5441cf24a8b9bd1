from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np
import sympy as sp

from homcalc.atiyah import (
    AtiyahForm,
    AtiyahTensor11,
    AtiyahVectorValued2Form,
    Derivation,
    JetSection,
    Multiderivation,
    apply_multiderivation,
    atiyah_form_matrix,
    atiyah_interior,
    d_D,
    fnd_bracket,
    identity_derivation,
    invert_biderivation,
    jet_bracket,
    pair,
    sj_bracket,
)
from homcalc.config import DEFAULT_SETTINGS, Settings
from homcalc.errors import ChartMismatch, DegreeError, KindMismatch, NotContact, NotHomogeneous
from homcalc.expr import ONE, ZERO, Chart, Expr, all_zero, as_expr, normalize, random_polynomial
from homcalc.models import AxiomResult, HomogeneityCertificate, Outcome, StructureReport, Verdict
from homcalc.tensor import (
    Form,
    Multivector,
    Tensor11,
    VectorField,
    VectorValued2Form,
    bivector_matrix,
    ext_d,
    fn_bracket,
    form_matrix,
    invert_matrix,
    koszul_bracket,
    lie_derivative,
    residuals_of,
    schouten,
    wedge,
)

logger = logging.getLogger(__name__)

EULER_CONVENTION = "lambda~ = r*lambda; 1~ = +Z"
EULER_NOTE = "the identity derivation homogenizes to +Z = r*Dr"


@dataclass(frozen=True)
class HomogChart:
    base: Chart
    r: str = "r"

    def __post_init__(self) -> None:
        if self.r in self.base.vars:
            raise ChartMismatch(f"{self.r!r} is already a variable of {self.base.vars}")

    @property
    def extended(self) -> Chart:
        return self.base.extend(self.r, f"{self.base.name}~")

    @property
    def r_symbol(self) -> sp.Symbol:
        return sp.Symbol(self.r)

    @property
    def r_index(self) -> int:
        return self.base.dim

    @property
    def euler(self) -> VectorField:
        return VectorField(self.extended, (ZERO,) * self.base.dim + (self.r_symbol,))

    def at_one(self, e) -> Expr:
        return normalize(as_expr(e).xreplace({self.r_symbol: ONE}))

    def lift(self, T):
        """View a base-chart object on the extended chart."""
        ext = self.extended
        if isinstance(T, VectorField):
            return VectorField(ext, T.components + (ZERO,))
        if isinstance(T, (Form, Multivector)):
            return type(T)(ext, T.degree, dict(T.components))
        return as_expr(T)


def homogenize_section(hc: HomogChart, lam) -> Expr:
    return normalize(hc.r_symbol * as_expr(lam))


def homogenize_derivation(hc: HomogChart, delta: Derivation) -> VectorField:
    hc.base.require_same(delta.chart)
    return VectorField(hc.extended, delta.symbol.components + (hc.r_symbol * delta.f,))


def homogenize_jet(hc: HomogChart, psi: JetSection) -> Form:
    hc.base.require_same(psi.chart)
    r = hc.r_symbol
    comps = {(i,): r * c for (i,), c in psi.alpha.components.items()}
    comps[(hc.r_index,)] = psi.g
    return Form(hc.extended, 1, comps)


def homogenize_form(hc: HomogChart, omega: AtiyahForm) -> Form:
    """(beta, gamma) -> r*beta + gamma ^ dr."""
    hc.base.require_same(omega.chart)
    r = hc.r_symbol
    comps = {idx: r * v for idx, v in omega.beta.components.items()}
    if omega.gamma is not None:
        for idx, v in omega.gamma.components.items():
            comps[idx + (hc.r_index,)] = v
    return Form(hc.extended, omega.degree, comps)


def homogenize_multiderivation(hc: HomogChart, D: Multiderivation) -> Multivector:
    """(P, Q) -> r^(1-m) P + r^(2-m) Dr ^ Q."""
    hc.base.require_same(D.chart)
    r = hc.r_symbol
    m = D.arity
    comps = {idx: r ** (1 - m) * v for idx, v in D.P.components.items()}
    if D.Q is not None:
        sign = (-1) ** (m + 1)
        for idx, v in D.Q.components.items():
            comps[idx + (hc.r_index,)] = sign * r ** (2 - m) * v
    return Multivector(hc.extended, m, comps)


def homogenize_tensor11(hc: HomogChart, U: AtiyahTensor11) -> Tensor11:
    hc.base.require_same(U.chart)
    n = hc.base.dim
    r = hc.r_symbol
    M = U.matrix
    rows = []
    for i in range(n + 1):
        row = []
        for j in range(n + 1):
            value = M[i][j]
            if i == n and j < n:
                value = r * value
            elif j == n and i < n:
                value = value / r
            row.append(value)
        rows.append(tuple(row))
    return Tensor11(hc.extended, tuple(rows))


def homogenize_vector_valued(hc: HomogChart, V: AtiyahVectorValued2Form) -> VectorValued2Form:
    n = hc.base.dim
    out = {}
    for (a, b), value in V.components.items():
        field = homogenize_derivation(hc, value)
        out[(a, b)] = field.scale(1 / hc.r_symbol) if b == n else field
    return VectorValued2Form(hc.extended, out)


def homogenize_tensor(hc: HomogChart, T):
    if isinstance(T, AtiyahForm):
        return homogenize_form(hc, T)
    if isinstance(T, Multiderivation):
        return homogenize_multiderivation(hc, T)
    if isinstance(T, AtiyahTensor11):
        return homogenize_tensor11(hc, T)
    if isinstance(T, AtiyahVectorValued2Form):
        return homogenize_vector_valued(hc, T)
    if isinstance(T, Derivation):
        return homogenize_derivation(hc, T)
    if isinstance(T, JetSection):
        return homogenize_jet(hc, T)
    if isinstance(T, sp.Basic):
        return homogenize_section(hc, T)
    raise KindMismatch(f"Cannot homogenize {type(T).__name__}")


def parity_transform(hc: HomogChart, T):
    """h_{-1}^*: substitute r -> -r and flip the sign of every r slot."""
    sub = {hc.r_symbol: -hc.r_symbol}
    n = hc.r_index
    if isinstance(T, sp.Basic):
        return normalize(T.xreplace(sub))
    if isinstance(T, VectorField):
        return VectorField(T.chart, tuple((-1 if i == n else 1) * c.xreplace(sub) for i, c in enumerate(T.components)))
    if isinstance(T, (Form, Multivector)):
        return type(T)(T.chart, T.degree, {idx: (-1 if n in idx else 1) * v.xreplace(sub) for idx, v in T.components.items()})
    if isinstance(T, Tensor11):
        rows = tuple(
            tuple((-1) ** ((i == n) + (j == n)) * c.xreplace(sub) for j, c in enumerate(row))
            for i, row in enumerate(T.matrix)
        )
        return Tensor11(T.chart, rows)
    raise KindMismatch(f"No parity action on {type(T).__name__}")


def _kind_label(T) -> str:
    if isinstance(T, sp.Basic):
        return "function"
    if isinstance(T, VectorField):
        return "vector_field"
    if isinstance(T, Form):
        return f"form({T.degree})"
    if isinstance(T, Multivector):
        return f"multivector({T.degree})"
    if isinstance(T, Tensor11):
        return "tensor11"
    raise KindMismatch(f"Cannot certify {type(T).__name__}")


def certify_homogeneous(
    hc: HomogChart,
    T,
    m: int,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
) -> HomogeneityCertificate:
    kind = _kind_label(T)
    if not isinstance(T, sp.Basic):
        hc.extended.require_same(T.chart)
    Z = hc.euler
    weight = 1 - m
    parity_sign = -1 if (1 - m) % 2 else 1
    if isinstance(T, sp.Basic):
        weight_res = [Z(T) - weight * T]
        parity_res = [parity_transform(hc, T) - parity_sign * T]
    else:
        weight_res = residuals_of([lie_derivative(Z, T) - T.scale(weight)])
        parity_res = residuals_of([parity_transform(hc, T) - T.scale(parity_sign)])
    cert = HomogeneityCertificate(
        kind=kind,
        m=m,
        weight=all_zero(weight_res, seed, settings),
        parity=all_zero(parity_res, seed, settings),
        convention=EULER_CONVENTION,
    )
    logger.debug("certify_homogeneous(%s, m=%s) -> %s", kind, m, cert.outcome.value)
    return cert


_KIND_WEIGHT = {"section": 0, "derivation": 1, "jet": 0, "form": 0, "tensor11": 1}


def dehomogenize(
    hc: HomogChart,
    T,
    kind: str,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
):
    expected = {
        "section": sp.Basic,
        "derivation": VectorField,
        "jet": Form,
        "form": Form,
        "multiderivation": Multivector,
        "tensor11": Tensor11,
    }
    if kind not in expected:
        raise KindMismatch(f"Unknown homogeneous kind {kind!r}")
    if not isinstance(T, expected[kind]):
        raise KindMismatch(f"{kind} expects {expected[kind].__name__}, got {type(T).__name__}")
    if kind == "jet" and T.degree != 1:
        raise KindMismatch("A homogenized jet is a 1-form")
    m = T.degree if kind == "multiderivation" else _KIND_WEIGHT[kind]
    cert = certify_homogeneous(hc, T, m, seed, settings)
    if cert.outcome is Outcome.FAIL:
        raise NotHomogeneous(f"{kind} fails the homogeneity certificate: {cert.weight.residual or cert.parity.residual}")

    base = hc.base
    n = hc.r_index
    one = hc.at_one
    if kind == "section":
        return one(T)
    if kind == "derivation":
        return Derivation.from_frame(base, [one(c) for c in T.components])
    if kind == "jet":
        return JetSection.from_frame(base, [one(T.value((i,))) for i in range(n + 1)])
    if kind == "form":
        beta = {idx: one(v) for idx, v in T.components.items() if n not in idx}
        if T.degree == 0:
            return AtiyahForm(Form(base, 0, beta))
        gamma = {idx[:-1]: one(v) for idx, v in T.components.items() if n in idx}
        return AtiyahForm(Form(base, T.degree, beta), Form(base, T.degree - 1, gamma))
    if kind == "multiderivation":
        mm = T.degree
        P = Multivector(base, mm, {idx: one(v) for idx, v in T.components.items() if n not in idx})
        if mm == 0:
            return Multiderivation(P)
        sign = (-1) ** (mm + 1)
        Q = Multivector(base, mm - 1, {idx[:-1]: sign * one(v) for idx, v in T.components.items() if n in idx})
        return Multiderivation(P, Q)
    rows = [[one(T.matrix[i][j]) for j in range(n + 1)] for i in range(n + 1)]
    return AtiyahTensor11.from_matrix(base, rows)


def poissonize(J: Multiderivation, hc: HomogChart | None = None) -> tuple[Multivector, VectorField]:
    if J.arity != 2:
        raise DegreeError(f"Poissonization needs a biderivation, got arity {J.arity}")
    hc = hc or HomogChart(J.chart)
    return homogenize_multiderivation(hc, J), hc.euler


def coordinate_sections(chart: Chart) -> list[Expr]:
    return [ONE] + list(chart.symbols)


def hom_bracket_residuals(
    J: Multiderivation,
    sections: Sequence[Expr] | None = None,
    hc: HomogChart | None = None,
) -> list[Expr]:
    """{lambda~, mu~}_{pi~} - ({lambda, mu}_J)~ on all pairs of the given sections."""
    hc = hc or HomogChart(J.chart)
    pi_tilde, _ = poissonize(J, hc)
    ext = hc.extended
    sections = list(sections) if sections is not None else coordinate_sections(J.chart)
    out = []
    for lam, mu in combinations(sections, 2):
        d_lam = ext_d(Form.scalar(ext, homogenize_section(hc, lam)))
        d_mu = ext_d(Form.scalar(ext, homogenize_section(hc, mu)))
        out.append(normalize(pi_tilde(d_lam, d_mu) - homogenize_section(hc, apply_multiderivation(J, lam, mu))))
    return out


def random_sections(chart: Chart, seed: int, count: int = 10) -> list[Expr]:
    rng = np.random.default_rng(seed)
    return [random_polynomial(chart, rng) for _ in range(count)]


def contact_top_form(theta: Form) -> Form:
    """theta ^ (d theta)^k on a (2k+1)-dimensional chart."""
    chart = theta.chart
    if theta.degree != 1:
        raise DegreeError("A contact form is a 1-form")
    if chart.dim % 2 == 0:
        raise NotContact(f"Contact forms need odd dimension, chart has {chart.dim}")
    top = theta
    d_theta = ext_d(theta)
    for _ in range(chart.dim // 2):
        top = wedge(top, d_theta)
    return top


def require_contact(theta: Form, seed: int = DEFAULT_SETTINGS.seed, settings: Settings = DEFAULT_SETTINGS) -> None:
    verdict = all_zero(contact_top_form(theta).residuals(), seed, settings)
    if verdict.status is Verdict.ZERO:
        raise NotContact(f"theta ^ (d theta)^k vanishes identically for theta = {theta}")


def symplectize_contact(theta: Form, hc: HomogChart | None = None, seed: int = DEFAULT_SETTINGS.seed) -> Form:
    require_contact(theta, seed)
    hc = hc or HomogChart(theta.chart)
    return homogenize_form(hc, d_D(AtiyahForm(theta)))


def contact_from_symplectic_atiyah(omega: AtiyahForm, settings: Settings = DEFAULT_SETTINGS) -> Form:
    """Read theta = i_1 omega, i.e. minus the gamma part."""
    if omega.degree != 2:
        raise DegreeError("Symplectic Atiyah forms have degree 2")
    invert_matrix(atiyah_form_matrix(omega), settings)
    return atiyah_interior(identity_derivation(omega.chart), omega).beta


def symplectization_matches_poissonization(
    J: Multiderivation,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
) -> StructureReport:
    """The homogenized inverse of J inverts the Poissonization of J."""
    hc = HomogChart(J.chart)
    omega = invert_biderivation(J, settings)
    pi_tilde, _ = poissonize(J, hc)
    omega_tilde = homogenize_form(hc, omega)
    product = bivector_matrix(pi_tilde) * form_matrix(omega_tilde) + sp.eye(hc.extended.dim)
    return StructureReport(
        kind="symplectization",
        axioms=[AxiomResult("inverse", "J~^(-1) = (J^(-1))~", all_zero(list(product), seed, settings))],
        notes=[EULER_NOTE],
    )


def jet_intertwining_residuals(J: Multiderivation) -> list[Expr]:
    """([psi, chi]_J)~ - [psi~, chi~]_{pi~} on the jet frame."""
    hc = HomogChart(J.chart)
    pi_tilde, _ = poissonize(J, hc)
    frames = [JetSection.frame(J.chart, a) for a in range(J.chart.dim + 1)]
    out = []
    for a, b in combinations(range(len(frames)), 2):
        lhs = homogenize_jet(hc, jet_bracket(J, frames[a], frames[b]))
        rhs = koszul_bracket(pi_tilde, homogenize_jet(hc, frames[a]), homogenize_jet(hc, frames[b]))
        out.extend((lhs - rhs).residuals())
    return out


_ROUNDTRIP_KIND = (
    (AtiyahForm, "form"),
    (Multiderivation, "multiderivation"),
    (AtiyahTensor11, "tensor11"),
    (Derivation, "derivation"),
    (JetSection, "jet"),
    (sp.Basic, "section"),
)


def homogenization_roundtrip(
    T,
    chart: Chart | None = None,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
) -> StructureReport:
    """Homogenize, certify, dehomogenize and compare with the input; sections need an explicit chart."""
    kind = next((label for cls, label in _ROUNDTRIP_KIND if isinstance(T, cls)), None)
    if kind is None:
        raise KindMismatch(f"Cannot homogenize {type(T).__name__}")
    if kind != "section":
        chart = T.chart
    elif chart is None:
        raise KindMismatch("Homogenizing a section needs its chart")
    hc = HomogChart(chart)
    lifted = homogenize_tensor(hc, T)
    m = T.arity if kind == "multiderivation" else _KIND_WEIGHT[kind]
    cert = certify_homogeneous(hc, lifted, m, seed, settings)
    back = dehomogenize(hc, lifted, kind, seed, settings)
    report = cert.to_report()
    report.kind = "homogenization_roundtrip"
    residuals = [normalize(back - T)] if kind == "section" else (back - T).residuals()
    report.axioms.append(AxiomResult("roundtrip", "(T~)|_{r=1} = T", all_zero(residuals, seed, settings)))
    report.data.update({"kind": kind, "homogenized": str(lifted)})
    return report


def random_atiyah_form(chart: Chart, rng: np.random.Generator, k: int) -> AtiyahForm:
    n = chart.dim
    beta = Form(chart, k, {idx: random_polynomial(chart, rng, terms=2) for idx in combinations(range(n), k)})
    if k == 0:
        return AtiyahForm(beta)
    gamma = Form(chart, k - 1, {idx: random_polynomial(chart, rng, terms=2) for idx in combinations(range(n), k - 1)})
    return AtiyahForm(beta, gamma)


def random_multivector(chart: Chart, rng: np.random.Generator, degree: int) -> Multivector:
    return Multivector(
        chart, degree, {idx: random_polynomial(chart, rng, terms=2) for idx in combinations(range(chart.dim), degree)}
    )


def random_multiderivation(chart: Chart, rng: np.random.Generator, m: int) -> Multiderivation:
    P = random_multivector(chart, rng, m)
    if m == 0:
        return Multiderivation(P)
    return Multiderivation(P, random_multivector(chart, rng, m - 1))


def random_jet(chart: Chart, rng: np.random.Generator) -> JetSection:
    return JetSection.from_frame(chart, [random_polynomial(chart, rng, terms=2) for _ in range(chart.dim + 1)])


def random_derivation(chart: Chart, rng: np.random.Generator) -> Derivation:
    return Derivation.from_frame(chart, [random_polynomial(chart, rng, terms=2) for _ in range(chart.dim + 1)])


def random_atiyah_tensor11(chart: Chart, rng: np.random.Generator) -> AtiyahTensor11:
    size = chart.dim + 1
    return AtiyahTensor11.from_matrix(
        chart, [[random_polynomial(chart, rng, terms=2) for _ in range(size)] for _ in range(size)]
    )


def naturality_report(
    chart: Chart,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
    count: int = 21,
) -> StructureReport:
    """Homogenization intertwines the jet/derivation pairing, d_D with d, [,]^SJ with [,]^S
    and [,]^FN_D with [,]^FN on random objects."""
    hc = HomogChart(chart)
    rng = np.random.default_rng(seed)
    n = chart.dim
    d_res, sj_res, fn_res, pair_res = [], [], [], []
    for i in range(count):
        if i % 3 == 0:
            omega = random_atiyah_form(chart, rng, int(rng.integers(0, min(n, 2) + 1)))
            d_res.extend((homogenize_form(hc, d_D(omega)) - ext_d(homogenize_form(hc, omega))).residuals())
        elif i % 3 == 1:
            D1 = random_multiderivation(chart, rng, int(rng.integers(0, min(n, 2) + 1)))
            D2 = random_multiderivation(chart, rng, int(rng.integers(1, min(n, 2) + 1)))
            lhs = homogenize_multiderivation(hc, sj_bracket(D1, D2))
            rhs = schouten(homogenize_multiderivation(hc, D1), homogenize_multiderivation(hc, D2))
            sj_res.extend((lhs - rhs).residuals())
        else:
            U, V = random_atiyah_tensor11(chart, rng), random_atiyah_tensor11(chart, rng)
            lhs = homogenize_vector_valued(hc, fnd_bracket(U, V))
            rhs = fn_bracket(homogenize_tensor11(hc, U), homogenize_tensor11(hc, V))
            fn_res.extend((lhs - rhs).residuals())
        logger.debug("naturality sample %s on %s done", i, chart.name)
    for _ in range(max(count // 3, 1)):
        psi, delta = random_jet(chart, rng), random_derivation(chart, rng)
        lhs = homogenize_jet(hc, psi)(homogenize_derivation(hc, delta))
        pair_res.append(normalize(lhs - homogenize_section(hc, pair(psi, delta))))
    return StructureReport(
        kind="naturality",
        axioms=[
            AxiomResult("pairing", "<psi~, D~> = (<psi, D>)~", all_zero(pair_res, seed, settings)),
            AxiomResult("exterior_differential", "(d_D w)~ = d w~", all_zero(d_res, seed, settings)),
            AxiomResult("schouten_jacobi", "([D1, D2]^SJ)~ = [D1~, D2~]^S", all_zero(sj_res, seed, settings)),
            AxiomResult("froelicher_nijenhuis", "([U, V]^FN_D)~ = [U~, V~]^FN", all_zero(fn_res, seed, settings)),
        ],
        notes=[EULER_NOTE],
        data={"samples": str(count)},
    )
