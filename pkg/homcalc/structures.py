from __future__ import annotations

import logging

import numpy as np

from homcalc.algebroid import SpencerData, cotangent_algebroid, verify_spencer
from homcalc.atiyah import (
    AtiyahForm,
    AtiyahTensor11,
    JetSection,
    Multiderivation,
    atiyah_contract,
    atiyah_lie_derivative,
    atiyah_skewness_residuals,
    atiyah_torsion,
    biderivation_value,
    d_D,
    invert_atiyah_form,
    invert_biderivation,
    jet_bracket,
    sharp as jet_sharp,
    sj_bracket,
)
from homcalc.config import DEFAULT_SETTINGS, Settings
from homcalc.errors import DegenerateForm, DegenerateJacobi, DegreeError, NotNondegenerate
from homcalc.expr import ONE, Chart, all_zero, random_polynomial
from homcalc.homogen import (
    EULER_NOTE,
    HomogChart,
    certify_homogeneous,
    contact_from_symplectic_atiyah,
    hom_bracket_residuals,
    homogenize_form,
    homogenize_tensor11,
    jet_intertwining_residuals,
    poissonize,
    random_sections,
    require_contact,
)
from homcalc.models import AxiomResult, StructureReport
from homcalc.tensor import (
    Form,
    Multivector,
    Tensor11,
    VectorField,
    bivector_from_matrix,
    contract11,
    coordinate_form,
    covector,
    ext_d,
    form_matrix,
    interior,
    invert_matrix,
    koszul_bracket,
    lie_derivative,
    nijenhuis_torsion,
    schouten,
    sharp,
    skewness_residuals,
    wedge,
)

logger = logging.getLogger(__name__)

PN_NAMING_NOTE = "compatibility is evaluated with one covector pair (alpha, beta) in every term"


def _axiom(name: str, anchor: str, exprs, seed: int, settings: Settings) -> AxiomResult:
    return AxiomResult(name, anchor, all_zero(exprs, seed, settings))


def _covector_pairs(chart: Chart, seed: int, count: int) -> list[tuple[Form, Form]]:
    frames = [coordinate_form(chart, i) for i in range(chart.dim)]
    pairs = [(a, b) for a in frames for b in frames]
    rng = np.random.default_rng(seed)
    for _ in range(count):
        alpha = covector(chart, [random_polynomial(chart, rng, degree=1, terms=2) for _ in range(chart.dim)])
        beta = covector(chart, [random_polynomial(chart, rng, degree=1, terms=2) for _ in range(chart.dim)])
        pairs.append((alpha, beta))
    return pairs


def _jet_pairs(chart: Chart, seed: int, count: int) -> list[tuple[JetSection, JetSection]]:
    frames = [JetSection.frame(chart, a) for a in range(chart.dim + 1)]
    pairs = [(a, b) for a in frames for b in frames]
    rng = np.random.default_rng(seed)
    for _ in range(count):
        psi = JetSection.from_frame(chart, [random_polynomial(chart, rng, degree=1, terms=2) for _ in range(chart.dim + 1)])
        chi = JetSection.from_frame(chart, [random_polynomial(chart, rng, degree=1, terms=2) for _ in range(chart.dim + 1)])
        pairs.append((psi, chi))
    return pairs


def verify_poisson(pi: Multivector, seed: int = DEFAULT_SETTINGS.seed, settings: Settings = DEFAULT_SETTINGS) -> StructureReport:
    if pi.degree != 2:
        raise DegreeError("Poisson structures are bivectors")
    return StructureReport(
        kind="poisson",
        axioms=[_axiom("poisson", "[pi, pi] = 0", schouten(pi, pi).residuals(), seed, settings)],
    )


def verify_jacobi(J: Multiderivation, seed: int = DEFAULT_SETTINGS.seed, settings: Settings = DEFAULT_SETTINGS) -> StructureReport:
    if J.arity != 2:
        raise DegreeError("Jacobi structures are biderivations")
    return StructureReport(
        kind="jacobi",
        axioms=[_axiom("jacobi", "[J, J]^SJ = 0", sj_bracket(J, J).residuals(), seed, settings)],
    )


def verify_homogeneous_poisson(
    pi: Multivector,
    zeta: VectorField,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
) -> StructureReport:
    report = verify_poisson(pi, seed, settings)
    report.kind = "homogeneous_poisson"
    report.axioms.append(_axiom("homogeneity", "L_zeta pi = -pi", (lie_derivative(zeta, pi) + pi).residuals(), seed, settings))
    return report


def pn_compatibility_residuals(pi: Multivector, N: Tensor11, alpha: Form, beta: Form) -> list:
    """L_{pi#a} N*b - L_{pi#b} N*a - d pi(N*a, b) - N*[a, b]_pi."""
    chart = pi.chart
    lhs = (
        lie_derivative(sharp(pi, alpha), N.dual_apply(beta))
        - lie_derivative(sharp(pi, beta), N.dual_apply(alpha))
        - ext_d(Form.scalar(chart, pi(N.dual_apply(alpha), beta)))
    )
    return (lhs - N.dual_apply(koszul_bracket(pi, alpha, beta))).residuals()


def pn_axioms(pi: Multivector, N: Tensor11, seed: int, settings: Settings) -> list[AxiomResult]:
    pi.chart.require_same(N.chart)
    compatibility = []
    for alpha, beta in _covector_pairs(pi.chart, seed, settings.random_pairs):
        compatibility.extend(pn_compatibility_residuals(pi, N, alpha, beta))
    return [
        _axiom("poisson", "[pi, pi] = 0", schouten(pi, pi).residuals(), seed, settings),
        _axiom("torsion", "T_N = 0", nijenhuis_torsion(N).residuals(), seed, settings),
        _axiom("skew", "pi(a, N*b) + pi(b, N*a) = 0", skewness_residuals(N, pi), seed, settings),
        _axiom("compatibility", "L_{pi#a} N*b - L_{pi#b} N*a - d pi(N*a, b) = N*[a, b]_pi", compatibility, seed, settings),
    ]


def verify_pn(pi: Multivector, N: Tensor11, seed: int = DEFAULT_SETTINGS.seed, settings: Settings = DEFAULT_SETTINGS) -> StructureReport:
    return StructureReport(kind="poisson_nijenhuis", axioms=pn_axioms(pi, N, seed, settings), notes=[PN_NAMING_NOTE])


def verify_homogeneous_pn(
    pi: Multivector,
    N: Tensor11,
    zeta: VectorField,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
) -> StructureReport:
    report = verify_pn(pi, N, seed, settings)
    report.kind = "homogeneous_poisson_nijenhuis"
    report.axioms.append(_axiom("homogeneity", "L_zeta pi = -pi", (lie_derivative(zeta, pi) + pi).residuals(), seed, settings))
    report.axioms.append(_axiom("nijenhuis_invariance", "L_zeta N = 0", lie_derivative(zeta, N).residuals(), seed, settings))
    return report


def pn_spencer_data(pi: Multivector, N: Tensor11) -> SpencerData:
    """(d o N*, N*) on the frame {dx_a}."""
    chart = pi.chart
    ell = tuple(N.dual_apply(coordinate_form(chart, a)) for a in range(chart.dim))
    return SpencerData(chart, 2, tuple(ext_d(form) for form in ell), ell)


def pn_spencer(pi: Multivector, N: Tensor11, seed: int = DEFAULT_SETTINGS.seed, settings: Settings = DEFAULT_SETTINGS) -> StructureReport:
    return verify_spencer(cotangent_algebroid(pi), pn_spencer_data(pi, N), seed, settings)


def symplectic_inverse(omega: Form, settings: Settings = DEFAULT_SETTINGS) -> Multivector:
    """pi = -W^(-1) for W[a][b] = omega(d_a, d_b)."""
    if omega.degree != 2:
        raise DegreeError("Symplectic forms have degree 2")
    try:
        inverse = invert_matrix(form_matrix(omega), settings)
    except NotNondegenerate as exc:
        raise DegenerateForm(f"2-form is degenerate: {omega}") from exc
    return bivector_from_matrix(omega.chart, -inverse)


def magri_morosi(
    omega: Form,
    N: Tensor11,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
) -> StructureReport:
    """Both branches: (1) d omega_N = d omega_{N^2} = 0; (2) T_N = 0 and compatibility for pi = omega^(-1)."""
    omega.chart.require_same(N.chart)
    pi = symplectic_inverse(omega, settings)
    closed = _axiom("closed", "d omega = 0", ext_d(omega).residuals(), seed, settings)
    skew = _axiom("skew", "omega(N-, -) is skew", skewness_residuals(N, omega), seed, settings)
    omega_n = contract11(N, omega, 0)
    omega_n2 = contract11(N.power(2), omega, 0)
    branch1 = [
        closed,
        skew,
        _axiom("closed_N", "d omega_N = 0", ext_d(omega_n).residuals(), seed, settings),
        _axiom("closed_N2", "d omega_{N^2} = 0", ext_d(omega_n2).residuals(), seed, settings),
    ]
    compatibility = []
    for alpha, beta in _covector_pairs(omega.chart, seed, settings.random_pairs):
        compatibility.extend(pn_compatibility_residuals(pi, N, alpha, beta))
    branch2 = [
        closed,
        skew,
        _axiom("torsion", "T_N = 0", nijenhuis_torsion(N).residuals(), seed, settings),
        _axiom("compatibility", "L_{pi#a} N*b - L_{pi#b} N*a - d pi(N*a, b) = N*[a, b]_pi", compatibility, seed, settings),
    ]
    report = StructureReport(kind="magri_morosi", notes=[PN_NAMING_NOTE])
    for axiom in branch1:
        report.axioms.append(AxiomResult(f"branch1.{axiom.name}", axiom.anchor, axiom.verdict))
    for axiom in branch2:
        report.axioms.append(AxiomResult(f"branch2.{axiom.name}", axiom.anchor, axiom.verdict))
    first = report.outcome_of(*[f"branch1.{a.name}" for a in branch1])
    second = report.outcome_of(*[f"branch2.{a.name}" for a in branch2])
    report.data.update({"branch1": first.value, "branch2": second.value, "agree": str(first is second).lower()})
    if first is not second:
        logger.warning("Magri-Morosi branches disagree: %s vs %s", first.value, second.value)
        report.notes.append("branch verdicts disagree")
    return report


def jn_compatibility_residuals(J: Multiderivation, N: AtiyahTensor11, psi: JetSection, chi: JetSection) -> list:
    """L_{J#psi} N'chi - L_{J#chi} N'psi - d_D J(N'psi, chi) - N'[psi, chi]_J, N' = N^dagger."""
    n_psi, n_chi = N.dagger(psi), N.dagger(chi)
    lhs = (
        atiyah_lie_derivative(jet_sharp(J, psi), n_chi.as_atiyah_form())
        - atiyah_lie_derivative(jet_sharp(J, chi), n_psi.as_atiyah_form())
        - d_D(AtiyahForm.scalar(J.chart, biderivation_value(J, n_psi, chi)))
    )
    return (lhs - N.dagger(jet_bracket(J, psi, chi)).as_atiyah_form()).residuals()


def verify_jn(
    J: Multiderivation,
    N: AtiyahTensor11,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
) -> StructureReport:
    J.chart.require_same(N.chart)
    compatibility = []
    for psi, chi in _jet_pairs(J.chart, seed, settings.random_pairs):
        compatibility.extend(jn_compatibility_residuals(J, N, psi, chi))
    report = StructureReport(
        kind="jacobi_nijenhuis",
        axioms=[
            _axiom("jacobi", "[J, J]^SJ = 0", sj_bracket(J, J).residuals(), seed, settings),
            _axiom("torsion", "T_N = 0", atiyah_torsion(N).residuals(), seed, settings),
            _axiom("skew", "J(psi, N'chi) + J(chi, N'psi) = 0", atiyah_skewness_residuals(N, J), seed, settings),
            _axiom(
                "compatibility",
                "L_{J#psi} N'chi - L_{J#chi} N'psi - d_D J(N'psi, chi) = N'[psi, chi]_J",
                compatibility,
                seed,
                settings,
            ),
        ],
        notes=[PN_NAMING_NOTE],
    )
    report.data["J_N_skew"] = str(report.axiom("skew").verdict.is_zero).lower()
    return report


# verify_jn axiom -> axiom of the homogenized PN pair
JN_TO_PN_AXIOMS = {"jacobi": "poisson", "torsion": "torsion", "skew": "skew", "compatibility": "compatibility"}


def jn_homogenization_report(
    J: Multiderivation,
    N: AtiyahTensor11,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
) -> StructureReport:
    """(J, N) Jacobi-Nijenhuis iff (J~, N~) homogeneous Poisson-Nijenhuis, compared axiom by axiom."""
    hc = HomogChart(J.chart)
    pi_tilde, euler = poissonize(J, hc)
    report = verify_jn(J, N, seed, settings)
    report.kind = "jn_homogenization"
    homogenized = verify_homogeneous_pn(pi_tilde, homogenize_tensor11(hc, N), euler, seed, settings)
    report.extend(homogenized, prefix="homogenized.")
    mismatched = [
        jn_name
        for jn_name, pn_name in JN_TO_PN_AXIOMS.items()
        if report.axiom(jn_name).outcome is not homogenized.axiom(pn_name).outcome
    ]
    jn_outcome = report.outcome_of(*JN_TO_PN_AXIOMS)
    pn_outcome = homogenized.outcome_of(*JN_TO_PN_AXIOMS.values())
    report.data.update(
        {
            "jn": jn_outcome.value,
            "homogenized_pn": pn_outcome.value,
            "agree": str(not mismatched).lower(),
        }
    )
    if mismatched:
        logger.warning("JN and homogenized PN verdicts differ on %s", ", ".join(mismatched))
        report.notes.append(f"verdicts differ on {', '.join(mismatched)}")
    report.notes.append(EULER_NOTE)
    return report


def verify_holomorphic_poisson(
    pi: Multivector,
    N: Tensor11,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
) -> StructureReport:
    chart = pi.chart
    if chart.dim % 2:
        raise DegreeError(f"Holomorphic Poisson structures need even dimension, chart has {chart.dim}")
    report = verify_pn(pi, N, seed, settings)
    report.kind = "holomorphic_poisson"
    square = N.power(2) + Tensor11.identity(chart)
    report.axioms.append(_axiom("almost_complex", "N^2 + 1 = 0", square.residuals(), seed, settings))
    pi_n = compatible_poisson(pi, N)
    report.axioms.append(_axiom("imaginary_part_poisson", "[pi_N, pi_N] = 0", schouten(pi_n, pi_n).residuals(), seed, settings))
    report.data.update({"real_part": str(pi), "imaginary_part": str(pi_n)})
    return report


def compatible_poisson(pi: Multivector, N: Tensor11) -> Multivector:
    return contract11(N, pi, 0)


def compatible_jacobi(J: Multiderivation, N: AtiyahTensor11) -> Multiderivation:
    return atiyah_contract(N, J, 0)


def contact_atiyah_form(theta: Form) -> AtiyahForm:
    return d_D(AtiyahForm(theta))


def jacobi_from_contact(theta: Form, seed: int = DEFAULT_SETTINGS.seed, settings: Settings = DEFAULT_SETTINGS) -> Multiderivation:
    require_contact(theta, seed, settings)
    omega = contact_atiyah_form(theta)
    try:
        return invert_atiyah_form(omega, settings)
    except NotNondegenerate as exc:
        raise DegenerateForm(f"d_D theta is degenerate for theta = {theta}") from exc


def atiyah_form_from_jacobi(J: Multiderivation, settings: Settings = DEFAULT_SETTINGS) -> AtiyahForm:
    if J.arity != 2:
        raise DegreeError("Only biderivations are inverted")
    try:
        return invert_biderivation(J, settings)
    except NotNondegenerate as exc:
        raise DegenerateJacobi(f"Jacobi biderivation is degenerate: {J}") from exc


def _top_power(omega: Form) -> Form:
    top = omega
    for _ in range(omega.chart.dim // 2 - 1):
        top = wedge(top, omega)
    return top


def contact_roundtrip(theta: Form, seed: int = DEFAULT_SETTINGS.seed, settings: Settings = DEFAULT_SETTINGS) -> StructureReport:
    """theta -> d_D theta -> J -> back, plus Reeb conditions and the symplectization."""
    chart = theta.chart
    omega = contact_atiyah_form(theta)
    J = jacobi_from_contact(theta, seed, settings)
    reeb = J.Q.as_vector_field()
    hc = HomogChart(chart)
    r = hc.r_symbol
    omega_tilde = homogenize_form(hc, omega)
    expected = ext_d(hc.lift(theta).scale(r))
    report = StructureReport(
        kind="contact_roundtrip",
        axioms=[
            _axiom("d_D_closed", "d_D omega = 0", d_D(omega).residuals(), seed, settings),
            _axiom("reeb_theta", "i_E theta = 1", [theta(reeb) - ONE], seed, settings),
            _axiom("reeb_dtheta", "i_E d theta = 0", interior(reeb, ext_d(theta)).residuals(), seed, settings),
            _axiom("inverse_roundtrip", "J^(-1) = d_D theta", (atiyah_form_from_jacobi(J, settings) - omega).residuals(), seed, settings),
            _axiom("contact_recovered", "i_1 d_D theta = theta", (contact_from_symplectic_atiyah(omega, settings) - theta).residuals(), seed, settings),
            _axiom("symplectization", "(d_D theta)~ = d(r theta)", (omega_tilde - expected).residuals(), seed, settings),
            _axiom("euler_weight", "L_Z omega~ = omega~", (lie_derivative(hc.euler, omega_tilde) - omega_tilde).residuals(), seed, settings),
            AxiomResult(
                "symplectization_nondegenerate",
                "omega~ ^ ... ^ omega~ != 0",
                all_zero(_top_power(omega_tilde).residuals(), seed, settings),
                expect_zero=False,
            ),
        ],
        notes=[EULER_NOTE],
        data={"reeb": str(reeb), "lambda": str(J.P), "symplectization": str(omega_tilde)},
    )
    return report


def poissonization_report(J: Multiderivation, seed: int = DEFAULT_SETTINGS.seed, settings: Settings = DEFAULT_SETTINGS) -> StructureReport:
    """Jacobi <=> homogeneous Poisson, plus the bracket identity on coordinate sections."""
    hc = HomogChart(J.chart)
    pi_tilde, euler = poissonize(J, hc)
    report = verify_jacobi(J, seed, settings)
    report.kind = "poissonization"
    report.extend(verify_homogeneous_poisson(pi_tilde, euler, seed, settings), prefix="poissonized.")
    cert = certify_homogeneous(hc, pi_tilde, 2, seed, settings)
    report.axioms.append(AxiomResult("parity", "h_{-1}^* pi~ = -pi~", cert.parity))
    sections = [ONE] + list(J.chart.symbols) + random_sections(J.chart, seed)
    report.axioms.append(
        _axiom("hom_bracket", "{l~, m~}_{pi~} = ({l, m}_J)~", hom_bracket_residuals(J, sections, hc), seed, settings)
    )
    report.axioms.append(
        _axiom("jet_intertwining", "([psi, chi]_J)~ = [psi~, chi~]_{pi~}", jet_intertwining_residuals(J), seed, settings)
    )
    report.notes.append(EULER_NOTE)
    report.data["poissonization"] = str(pi_tilde)
    return report
