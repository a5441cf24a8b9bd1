from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import sympy as sp

from homcalc.algebroid import (
    check_homogeneity_derivation,
    cotangent_algebroid,
    gauge_algebroid,
    jet_algebroid,
    tangent_algebroid,
    verify_algebroid,
    verify_spencer,
)
from homcalc.atiyah import AtiyahForm, AtiyahTensor11, Derivation, JetSection, Multiderivation, atiyah_torsion
from homcalc.config import Settings
from homcalc.errors import KindMismatch, MissingRightInvariantRule
from homcalc.expr import Chart, all_zero
from homcalc.groupoid import (
    ChartGroupoid,
    groupoid_axioms,
    is_multiplicative_form,
    is_multiplicative_function,
    is_multiplicative_vf,
    multiplicative_contact_check,
    spencer_leibniz_check,
    spencer_of_form,
)
from homcalc.homogen import (
    HomogChart,
    certify_homogeneous,
    homogenization_roundtrip,
    naturality_report,
    symplectization_matches_poissonization,
)
from homcalc.models import AxiomResult, StructureReport
from homcalc.structures import (
    contact_roundtrip,
    jn_homogenization_report,
    magri_morosi,
    pn_axioms,
    pn_spencer,
    poissonization_report,
    verify_holomorphic_poisson,
    verify_homogeneous_pn,
    verify_homogeneous_poisson,
    verify_jacobi,
    verify_jn,
    verify_pn,
    verify_poisson,
)
from homcalc.tensor import Form, Multivector, Tensor11, VectorField, coordinate_form, ext_d, nijenhuis_torsion

logger = logging.getLogger(__name__)

REQUIRED = ...


@dataclass(frozen=True)
class CheckContext:
    chart: Chart
    objects: Mapping[str, Any]
    params: Mapping[str, Any]
    seed: int
    settings: Settings
    groupoid: ChartGroupoid | None = None


@dataclass(frozen=True)
class CheckKind:
    kind: str
    anchor: str
    run: Callable[[CheckContext], StructureReport]
    objects: Mapping[str, tuple[type, ...]] = field(default_factory=dict)
    optional: Mapping[str, tuple[type, ...]] = field(default_factory=dict)
    params: Mapping[str, tuple[type, Any]] = field(default_factory=dict)
    needs_groupoid: bool = False

    def context_params(self, given: Mapping[str, Any]) -> dict[str, Any]:
        out = {key: default for key, (_, default) in self.params.items() if default is not REQUIRED}
        out.update(given)
        return out


CHECKS: dict[str, CheckKind] = {}

_POISSON = (Multivector,)
_JACOBI = (Multiderivation,)
_VECTOR = (VectorField,)
_TENSOR = (Tensor11,)
_FORM = (Form,)


def register(kind: str, anchor: str, objects=None, optional=None, params=None, needs_groupoid: bool = False):
    def decorator(fn: Callable[[CheckContext], StructureReport]):
        CHECKS[kind] = CheckKind(
            kind=kind,
            anchor=anchor,
            run=fn,
            objects=objects or {},
            optional=optional or {},
            params=params or {},
            needs_groupoid=needs_groupoid,
        )
        return fn

    return decorator


@register("verify_poisson", "[pi, pi] = 0", {"pi": _POISSON})
def _verify_poisson(ctx: CheckContext) -> StructureReport:
    return verify_poisson(ctx.objects["pi"], ctx.seed, ctx.settings)


@register("verify_jacobi", "[J, J]^SJ = 0", {"J": _JACOBI})
def _verify_jacobi(ctx: CheckContext) -> StructureReport:
    return verify_jacobi(ctx.objects["J"], ctx.seed, ctx.settings)


@register("verify_homogeneous_poisson", "[pi, pi] = 0, L_zeta pi = -pi", {"pi": _POISSON, "zeta": _VECTOR})
def _verify_homogeneous_poisson(ctx: CheckContext) -> StructureReport:
    return verify_homogeneous_poisson(ctx.objects["pi"], ctx.objects["zeta"], ctx.seed, ctx.settings)


@register("verify_pn", "Poisson-Nijenhuis axioms", {"pi": _POISSON, "N": _TENSOR})
def _verify_pn(ctx: CheckContext) -> StructureReport:
    return verify_pn(ctx.objects["pi"], ctx.objects["N"], ctx.seed, ctx.settings)


@register("verify_homogeneous_pn", "PN axioms, L_zeta pi = -pi, L_zeta N = 0", {"pi": _POISSON, "N": _TENSOR, "zeta": _VECTOR})
def _verify_homogeneous_pn(ctx: CheckContext) -> StructureReport:
    o = ctx.objects
    return verify_homogeneous_pn(o["pi"], o["N"], o["zeta"], ctx.seed, ctx.settings)


@register("magri_morosi", "omega_N, omega_N^2 closed <=> (omega^-1, N) PN", {"omega": _FORM, "N": _TENSOR})
def _magri_morosi(ctx: CheckContext) -> StructureReport:
    return magri_morosi(ctx.objects["omega"], ctx.objects["N"], ctx.seed, ctx.settings)


@register("verify_jn", "Jacobi-Nijenhuis axioms", {"J": _JACOBI, "N": (AtiyahTensor11,)})
def _verify_jn(ctx: CheckContext) -> StructureReport:
    return verify_jn(ctx.objects["J"], ctx.objects["N"], ctx.seed, ctx.settings)


@register("jn_homogenization", "(J, N) JN <=> (J~, N~) homogeneous PN", {"J": _JACOBI, "N": (AtiyahTensor11,)})
def _jn_homogenization(ctx: CheckContext) -> StructureReport:
    return jn_homogenization_report(ctx.objects["J"], ctx.objects["N"], ctx.seed, ctx.settings)


@register("verify_holomorphic_poisson", "PN with N^2 = -1", {"pi": _POISSON, "N": _TENSOR})
def _verify_holomorphic_poisson(ctx: CheckContext) -> StructureReport:
    return verify_holomorphic_poisson(ctx.objects["pi"], ctx.objects["N"], ctx.seed, ctx.settings)


@register("contact_roundtrip", "theta -> d_D theta -> J -> theta", {"theta": _FORM})
def _contact_roundtrip(ctx: CheckContext) -> StructureReport:
    return contact_roundtrip(ctx.objects["theta"], ctx.seed, ctx.settings)


@register(
    "poissonization",
    "J Jacobi <=> J~ homogeneous Poisson",
    {"J": _JACOBI},
    params={"symplectization": (bool, False)},
)
def _poissonization(ctx: CheckContext) -> StructureReport:
    J = ctx.objects["J"]
    report = poissonization_report(J, ctx.seed, ctx.settings)
    if ctx.params["symplectization"]:
        report.extend(symplectization_matches_poissonization(J, ctx.seed, ctx.settings), prefix="symplectization.")
    return report


@register(
    "certify_homogeneous",
    "L_Z T = (1 - m) T",
    {"T": (Form, Multivector, Tensor11, VectorField, sp.Expr)},
    params={"m": (int, REQUIRED)},
)
def _certify_homogeneous(ctx: CheckContext) -> StructureReport:
    hc = HomogChart(ctx.chart)
    return certify_homogeneous(hc, ctx.objects["T"], int(ctx.params["m"]), ctx.seed, ctx.settings).to_report()


@register(
    "homogenization_roundtrip",
    "(T~)|_{r=1} = T",
    {"T": (AtiyahForm, Multiderivation, AtiyahTensor11, Derivation, JetSection, sp.Expr)},
)
def _homogenization_roundtrip(ctx: CheckContext) -> StructureReport:
    return homogenization_roundtrip(ctx.objects["T"], ctx.chart, ctx.seed, ctx.settings)


@register("naturality", "homogenization intertwines <,>, d_D, [,]^SJ, [,]^FN_D", params={"count": (int, 21)})
def _naturality(ctx: CheckContext) -> StructureReport:
    return naturality_report(ctx.chart, ctx.seed, ctx.settings, int(ctx.params["count"]))


@register(
    "verify_algebroid",
    "anchor and Jacobi identities of a Lie algebroid",
    optional={"pi": _POISSON, "J": _JACOBI},
    params={"algebroid": (str, REQUIRED)},
)
def _verify_algebroid(ctx: CheckContext) -> StructureReport:
    which = ctx.params["algebroid"]
    if which == "tangent":
        A = tangent_algebroid(ctx.chart)
    elif which == "gauge":
        A = gauge_algebroid(ctx.chart)
    elif which == "cotangent" and "pi" in ctx.objects:
        A = cotangent_algebroid(ctx.objects["pi"])
    elif which == "jet" and "J" in ctx.objects:
        A = jet_algebroid(ctx.objects["J"])
    else:
        raise KindMismatch(f"Unknown algebroid {which!r} or missing structure argument")
    return verify_algebroid(A, ctx.seed, ctx.settings)


@register("pn_spencer", "(d o N*, N*) is a Spencer operator on T*M_pi", {"pi": _POISSON, "N": _TENSOR})
def _pn_spencer(ctx: CheckContext) -> StructureReport:
    pi, N = ctx.objects["pi"], ctx.objects["N"]
    report = pn_spencer(pi, N, ctx.seed, ctx.settings)
    pn = StructureReport(kind="poisson_nijenhuis", axioms=pn_axioms(pi, N, ctx.seed, ctx.settings))
    pn_outcome = pn.outcome_of("skew", "compatibility")
    report.data.update(
        {"pn_skew_compatibility": pn_outcome.value, "agree": str(pn_outcome is report.overall).lower()}
    )
    return report


@register("homogeneity_derivation", "L_zeta - 1 derivation <=> L_zeta pi = -pi", {"pi": _POISSON, "zeta": _VECTOR})
def _homogeneity_derivation(ctx: CheckContext) -> StructureReport:
    return check_homogeneity_derivation(ctx.objects["pi"], ctx.objects["zeta"], ctx.seed, ctx.settings)


@register("groupoid_axioms", "groupoid structure maps", needs_groupoid=True)
def _groupoid_axioms(ctx: CheckContext) -> StructureReport:
    return groupoid_axioms(ctx.groupoid, ctx.seed, ctx.settings)


@register("multiplicative_function", "f(g1 g2) = f(g1) + f(g2)", {"f": (sp.Expr,)}, needs_groupoid=True)
def _multiplicative_function(ctx: CheckContext) -> StructureReport:
    return is_multiplicative_function(ctx.groupoid, ctx.objects["f"], ctx.seed, ctx.settings)


@register("multiplicative_form", "m^* w = pr1^* w + pr2^* w", {"omega": _FORM}, needs_groupoid=True)
def _multiplicative_form(ctx: CheckContext) -> StructureReport:
    omega = ctx.objects["omega"]
    report = is_multiplicative_form(ctx.groupoid, omega, ctx.seed, ctx.settings)
    report.extend(is_multiplicative_form(ctx.groupoid, ext_d(omega), ctx.seed, ctx.settings), prefix="d.")
    return report


@register(
    "multiplicative_vf",
    "dm(Z_W) = Z o m",
    optional={"Z": _VECTOR, "Z_W": _VECTOR},
    params={"strict": (bool, False)},
    needs_groupoid=True,
)
def _multiplicative_vf(ctx: CheckContext) -> StructureReport:
    gpd = ctx.groupoid
    Z = ctx.objects.get("Z", gpd.euler)
    Z_W = ctx.objects.get("Z_W", gpd.euler_lift)
    if Z is None or Z_W is None:
        raise KindMismatch(f"{gpd.name} has no Euler field; pass Z and Z_W")
    return is_multiplicative_vf(gpd, Z, Z_W, ctx.seed, ctx.settings, strict=bool(ctx.params["strict"]))


@register(
    "spencer_of_form",
    "D(a) = 1^*(L_{->a} w), ell(a) = 1^*(i_{->a} w)",
    {"omega": _FORM},
    params={"identity": (bool, False)},
    needs_groupoid=True,
)
def _spencer_of_form(ctx: CheckContext) -> StructureReport:
    gpd, omega = ctx.groupoid, ctx.objects["omega"]
    if gpd.algebroid is None:
        raise MissingRightInvariantRule(f"Groupoid {gpd.name} has no algebroid")
    S = spencer_of_form(gpd, omega)
    report = verify_spencer(gpd.algebroid, S, ctx.seed, ctx.settings)
    report.extend(spencer_leibniz_check(gpd, omega, ctx.seed, ctx.settings), prefix="leibniz.")
    if ctx.params["identity"]:
        residuals = []
        for a, value in enumerate(S.ell):
            residuals.extend((value - coordinate_form(gpd.M, a)).residuals())
        report.axioms.append(AxiomResult("ell_identity", "ell(dx_a) = dx_a", all_zero(residuals, ctx.seed, ctx.settings)))
    report.data.update({f"ell[{label}]": str(value) for label, value in zip(gpd.algebroid.labels, S.ell)})
    report.data.update({f"D[{label}]": str(value) for label, value in zip(gpd.algebroid.labels, S.D)})
    return report


@register("multiplicative_contact", "Theta = i_Z omega, both multiplicative", {"theta": _FORM}, needs_groupoid=True)
def _multiplicative_contact(ctx: CheckContext) -> StructureReport:
    return multiplicative_contact_check(ctx.groupoid, ctx.objects["theta"], ctx.seed, ctx.settings)


@register("nijenhuis", "T_N = 0", {"N": (Tensor11, AtiyahTensor11)})
def _nijenhuis(ctx: CheckContext) -> StructureReport:
    N = ctx.objects["N"]
    torsion = atiyah_torsion(N) if isinstance(N, AtiyahTensor11) else nijenhuis_torsion(N)
    return StructureReport(
        kind="nijenhuis",
        axioms=[AxiomResult("torsion", "T_N = 0", all_zero(torsion.residuals(), ctx.seed, ctx.settings))],
        data={"torsion": str(torsion)},
    )
