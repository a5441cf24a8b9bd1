"""Lie groupoids presented on coordinate charts.

A ChartGroupoid carries its structure maps as SmoothMaps together with an
explicit parametrization W of the composable pairs, so pullbacks along
m, pr1 and pr2 are plain substitutions.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from homcalc.algebroid import AlgebroidSpec, SpencerData, abelian_algebroid, random_section, tangent_algebroid
from homcalc.config import DEFAULT_SETTINGS, Settings
from homcalc.errors import DegreeError, LiftMismatch, MissingRightInvariantRule
from homcalc.expr import ONE, ZERO, Chart, Expr, all_zero, as_expr, normalize
from homcalc.models import AxiomResult, StructureReport, Verdict
from homcalc.tensor import (
    Form,
    SmoothMap,
    VectorField,
    ext_d,
    interior,
    lie_derivative,
    pullback,
    pullback_fn,
    pushforward,
    residuals_of,
)

logger = logging.getLogger(__name__)

RightInvariantRule = Callable[[int], VectorField]


@dataclass(frozen=True)
class TripleLocus:
    """Composable triples (g1, g2, g3) with the two bracketings as maps into W."""

    chart: Chart
    left: SmoothMap
    right: SmoothMap


@dataclass(frozen=True)
class ChartGroupoid:
    name: str
    G: Chart
    M: Chart
    s: SmoothMap
    t: SmoothMap
    unit: SmoothMap
    inv: SmoothMap
    W: Chart
    p1: SmoothMap
    p2: SmoothMap
    mul: SmoothMap
    triple: TripleLocus | None = None
    right_invariant: RightInvariantRule | None = None
    algebroid: AlgebroidSpec | None = None
    euler: VectorField | None = None
    euler_lift: VectorField | None = None

    def __post_init__(self) -> None:
        for f in (self.s, self.t):
            f.source.require_same(self.G)
            f.target.require_same(self.M)
        self.unit.source.require_same(self.M)
        self.unit.target.require_same(self.G)
        self.inv.source.require_same(self.G)
        self.inv.target.require_same(self.G)
        for f in (self.p1, self.p2, self.mul):
            f.source.require_same(self.W)
            f.target.require_same(self.G)
        if self.triple is not None:
            for f in (self.triple.left, self.triple.right):
                f.source.require_same(self.triple.chart)
                f.target.require_same(self.W)
        if self.algebroid is not None:
            self.algebroid.base.require_same(self.M)

    def right_invariant_section(self, section) -> VectorField:
        """Right-invariant field of sum_a f_a e_a: sum_a (t^* f_a) ->e_a."""
        rule = self._rule()
        out = VectorField.zero(self.G)
        for a, coeff in enumerate(section):
            coeff = as_expr(coeff)
            if coeff != 0:
                out = out + rule(a).scale(pullback_fn(self.t, coeff))
        return out

    def _rule(self) -> RightInvariantRule:
        if self.right_invariant is None or self.algebroid is None:
            raise MissingRightInvariantRule(f"Groupoid {self.name} has no right-invariant rule")
        return self.right_invariant


def _copy_names(base: Chart, suffix: str) -> tuple[str, ...]:
    return tuple(f"{v}_{suffix}" for v in base.vars)


def pair_groupoid(M: Chart) -> ChartGroupoid:
    """M x M with t(x, y) = x and s(x, y) = y; right-invariant fields move the target."""
    n = M.dim
    first, second, third, fourth = (_copy_names(M, str(i)) for i in range(1, 5))
    G = Chart(f"{M.name}x{M.name}", first + second)
    W = Chart(f"{M.name}^(2)", first + second + third)
    T = Chart(f"{M.name}^(3)", first + second + third + fourth)
    s = SmoothMap.from_names(G, M, second)
    t = SmoothMap.from_names(G, M, first)
    unit = SmoothMap(M, G, M.symbols + M.symbols)
    inv = SmoothMap.from_names(G, G, second + first)
    p1 = SmoothMap.from_names(W, G, first + second)
    p2 = SmoothMap.from_names(W, G, second + third)
    mul = SmoothMap.from_names(W, G, first + third)
    triple = TripleLocus(
        T,
        left=SmoothMap.from_names(T, W, first + third + fourth),
        right=SmoothMap.from_names(T, W, first + second + fourth),
    )

    def right_invariant(a: int) -> VectorField:
        return VectorField(G, tuple(ZERO if i != a else ONE for i in range(2 * n)))

    return ChartGroupoid(
        name=f"pair({M.name})",
        G=G,
        M=M,
        s=s,
        t=t,
        unit=unit,
        inv=inv,
        W=W,
        p1=p1,
        p2=p2,
        mul=mul,
        triple=triple,
        right_invariant=right_invariant,
        algebroid=tangent_algebroid(M),
    )


def _fiber_names(k: int, letter: str) -> tuple[str, ...]:
    return (letter,) if k == 1 else tuple(f"{letter}{i}" for i in range(1, k + 1))


def vb_addition_groupoid(base: Chart, fiber_rank: int) -> ChartGroupoid:
    """base x R^k with s = t = projection and fiberwise addition."""
    if fiber_rank < 1:
        raise DegreeError(f"Fiber rank must be >= 1, got {fiber_rank}")
    k = fiber_rank
    xs = base.vars
    ps, qs, us = _fiber_names(k, "p"), _fiber_names(k, "q"), _fiber_names(k, "u")
    G = Chart(f"{base.name}xR{k}", xs + ps)
    W = Chart(f"{base.name}xR{k}^(2)", xs + ps + qs)
    T = Chart(f"{base.name}xR{k}^(3)", xs + ps + qs + us)
    proj = SmoothMap.from_names(G, base, xs)
    unit = SmoothMap(base, G, base.symbols + (ZERO,) * k)
    inv = SmoothMap(G, G, G.symbols[: base.dim] + tuple(-G.symbol(p) for p in ps))
    p1 = SmoothMap.from_names(W, G, xs + ps)
    p2 = SmoothMap.from_names(W, G, xs + qs)
    mul = SmoothMap(W, G, W.symbols[: base.dim] + tuple(W.symbol(p) + W.symbol(q) for p, q in zip(ps, qs)))
    sym = T.symbol
    x_part = tuple(sym(x) for x in xs)
    triple = TripleLocus(
        T,
        left=SmoothMap(T, W, x_part + tuple(sym(p) + sym(q) for p, q in zip(ps, qs)) + tuple(sym(u) for u in us)),
        right=SmoothMap(T, W, x_part + tuple(sym(p) for p in ps) + tuple(sym(q) + sym(u) for q, u in zip(qs, us))),
    )

    def right_invariant(a: int) -> VectorField:
        comps = [ZERO] * G.dim
        comps[base.dim + a] = ONE
        return VectorField(G, tuple(comps))

    return ChartGroupoid(
        name=f"vb_addition({base.name}, {k})",
        G=G,
        M=base,
        s=proj,
        t=proj,
        unit=unit,
        inv=inv,
        W=W,
        p1=p1,
        p2=p2,
        mul=mul,
        triple=triple,
        right_invariant=right_invariant,
        algebroid=abelian_algebroid(base, k),
    )


def _extend_map(f: SmoothMap, source: Chart, target: Chart, r) -> SmoothMap:
    return SmoothMap(source, target, tuple(f.components) + (r,))


def scaling_extension(Gpd: ChartGroupoid, r: str = "r") -> ChartGroupoid:
    """G x R^x over M x R^x with the trivial action; r rides along every structure map."""
    G, M, W = Gpd.G.extend(r), Gpd.M.extend(r), Gpd.W.extend(r)
    rg, rm, rw = G.symbol(r), M.symbol(r), W.symbol(r)
    triple = None
    if Gpd.triple is not None:
        T = Gpd.triple.chart.extend(r)
        rt = T.symbol(r)
        triple = TripleLocus(
            T,
            left=_extend_map(Gpd.triple.left, T, W, rt),
            right=_extend_map(Gpd.triple.right, T, W, rt),
        )
    euler = VectorField(G, (ZERO,) * Gpd.G.dim + (rg,))
    euler_lift = VectorField(W, (ZERO,) * Gpd.W.dim + (rw,))
    return ChartGroupoid(
        name=f"scaling({Gpd.name})",
        G=G,
        M=M,
        s=_extend_map(Gpd.s, G, M, rg),
        t=_extend_map(Gpd.t, G, M, rg),
        unit=_extend_map(Gpd.unit, M, G, rm),
        inv=_extend_map(Gpd.inv, G, G, rg),
        W=W,
        p1=_extend_map(Gpd.p1, W, G, rw),
        p2=_extend_map(Gpd.p2, W, G, rw),
        mul=_extend_map(Gpd.mul, W, G, rw),
        triple=triple,
        euler=euler,
        euler_lift=euler_lift,
    )


def lift_to_extension(ext: ChartGroupoid, form: Form) -> Form:
    """View a form on G as a form on G x R^x."""
    return Form(ext.G, form.degree, dict(form.components))


def _axiom(name: str, anchor: str, exprs, seed: int, settings: Settings) -> AxiomResult:
    return AxiomResult(name, anchor, all_zero(exprs, seed, settings))


def groupoid_axioms(Gpd: ChartGroupoid, seed: int = DEFAULT_SETTINGS.seed, settings: Settings = DEFAULT_SETTINGS) -> StructureReport:
    id_M, id_G = SmoothMap.identity(Gpd.M), SmoothMap.identity(Gpd.G)
    checks = [
        ("composable", "s o pr1 = t o pr2", Gpd.s.compose(Gpd.p1).residuals_against(Gpd.t.compose(Gpd.p2))),
        ("source_unit", "s o 1 = id", Gpd.s.compose(Gpd.unit).residuals_against(id_M)),
        ("target_unit", "t o 1 = id", Gpd.t.compose(Gpd.unit).residuals_against(id_M)),
        ("source_mul", "s o m = s o pr2", Gpd.s.compose(Gpd.mul).residuals_against(Gpd.s.compose(Gpd.p2))),
        ("target_mul", "t o m = t o pr1", Gpd.t.compose(Gpd.mul).residuals_against(Gpd.t.compose(Gpd.p1))),
        ("inverse_involution", "inv o inv = id", Gpd.inv.compose(Gpd.inv).residuals_against(id_G)),
        ("source_inverse", "s o inv = t", Gpd.s.compose(Gpd.inv).residuals_against(Gpd.t)),
    ]
    if Gpd.triple is not None:
        left = Gpd.mul.compose(Gpd.triple.left)
        right = Gpd.mul.compose(Gpd.triple.right)
        checks.append(("associativity", "(g1 g2) g3 = g1 (g2 g3)", left.residuals_against(right)))
    report = StructureReport(
        kind="groupoid",
        axioms=[_axiom(name, anchor, exprs, seed, settings) for name, anchor, exprs in checks],
        data={"groupoid": Gpd.name},
    )
    logger.debug("groupoid_axioms(%s) -> %s", Gpd.name, report.overall.value)
    return report


def is_multiplicative_function(
    Gpd: ChartGroupoid,
    f,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
) -> StructureReport:
    f = as_expr(f)
    defect = pullback_fn(Gpd.mul, f) - pullback_fn(Gpd.p1, f) - pullback_fn(Gpd.p2, f)
    return StructureReport(
        kind="multiplicative_function",
        axioms=[_axiom("multiplicative", "f(g1 g2) = f(g1) + f(g2)", [defect], seed, settings)],
        data={"groupoid": Gpd.name},
    )


def multiplicativity_defect(Gpd: ChartGroupoid, omega: Form) -> Form:
    Gpd.G.require_same(omega.chart)
    return pullback(Gpd.mul, omega) - pullback(Gpd.p1, omega) - pullback(Gpd.p2, omega)


def is_multiplicative_form(
    Gpd: ChartGroupoid,
    omega: Form,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
) -> StructureReport:
    defect = multiplicativity_defect(Gpd, omega)
    return StructureReport(
        kind="multiplicative_form",
        axioms=[_axiom("multiplicative", "m^* w = pr1^* w + pr2^* w", defect.residuals(), seed, settings)],
        data={"groupoid": Gpd.name, "defect": str(defect)},
    )


def _composed(Z: VectorField, f: SmoothMap) -> tuple[Expr, ...]:
    return tuple(pullback_fn(f, c) for c in Z.components)


def _related_residuals(f: SmoothMap, Z_W: VectorField, Z: VectorField) -> list[Expr]:
    return [normalize(a - b) for a, b in zip(pushforward(f, Z_W), _composed(Z, f))]


def is_multiplicative_vf(
    Gpd: ChartGroupoid,
    Z: VectorField,
    Z_W: VectorField,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
    strict: bool = False,
) -> StructureReport:
    """dm(Z_W) = Z o m, given a lift Z_W on W that is pr_i-related to Z."""
    Gpd.G.require_same(Z.chart)
    Gpd.W.require_same(Z_W.chart)
    lift1 = _axiom("lift_pr1", "d pr1 (Z_W) = Z o pr1", _related_residuals(Gpd.p1, Z_W, Z), seed, settings)
    lift2 = _axiom("lift_pr2", "d pr2 (Z_W) = Z o pr2", _related_residuals(Gpd.p2, Z_W, Z), seed, settings)
    if strict:
        for lift in (lift1, lift2):
            if lift.verdict.status is Verdict.NONZERO:
                raise LiftMismatch(f"{lift.anchor} fails: {lift.verdict.residual}")
    mult = _axiom("multiplicative", "dm (Z_W) = Z o m", _related_residuals(Gpd.mul, Z_W, Z), seed, settings)
    return StructureReport(kind="multiplicative_vf", axioms=[lift1, lift2, mult], data={"groupoid": Gpd.name})


def spencer_of_form(Gpd: ChartGroupoid, omega: Form) -> SpencerData:
    """D(a) = 1^*(L_{->a} w), ell(a) = 1^*(i_{->a} w) on the algebroid frame."""
    Gpd.G.require_same(omega.chart)
    rule = Gpd._rule()
    if omega.degree < 1:
        raise DegreeError("Only forms of degree >= 1 differentiate to Spencer data")
    D, ell = [], []
    for a in range(Gpd.algebroid.rank):
        field = rule(a)
        D.append(pullback(Gpd.unit, lie_derivative(field, omega)))
        ell.append(pullback(Gpd.unit, interior(field, omega)))
    return SpencerData(Gpd.M, omega.degree, tuple(D), tuple(ell))


def spencer_leibniz_check(
    Gpd: ChartGroupoid,
    omega: Form,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
) -> StructureReport:
    """The frame reconstruction of spencer_of_form agrees with the direct formulas on f-multiplied sections."""
    S = spencer_of_form(Gpd, omega)
    rng = np.random.default_rng(seed)
    d_res, ell_res = [], []
    for _ in range(settings.random_pairs):
        section = random_section(Gpd.algebroid, rng)
        field = Gpd.right_invariant_section(section)
        d_res.extend(residuals_of([pullback(Gpd.unit, lie_derivative(field, omega)) - S.apply_D(section)]))
        ell_res.extend(residuals_of([pullback(Gpd.unit, interior(field, omega)) - S.apply_ell(section)]))
    return StructureReport(
        kind="spencer_leibniz",
        axioms=[
            _axiom("leibniz_D", "1^*(L_{->fa} w) = f D(a) + df ^ ell(a)", d_res, seed, settings),
            _axiom("leibniz_ell", "1^*(i_{->fa} w) = f ell(a)", ell_res, seed, settings),
        ],
        data={"groupoid": Gpd.name},
    )


def multiplicative_contact_check(
    Gpd: ChartGroupoid,
    theta: Form,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
) -> StructureReport:
    """On G x R^x: Theta = r theta, omega = d Theta; Theta = i_Z omega and both are multiplicative together."""
    if theta.degree != 1:
        raise DegreeError("Contact data is a 1-form")
    Gpd.G.require_same(theta.chart)
    ext = scaling_extension(Gpd)
    r = ext.G.symbols[-1]
    big_theta = lift_to_extension(ext, theta).scale(r)
    big_omega = ext_d(big_theta)
    theta_report = is_multiplicative_form(ext, big_theta, seed, settings)
    omega_report = is_multiplicative_form(ext, big_omega, seed, settings)
    report = StructureReport(
        kind="multiplicative_contact",
        axioms=[
            _axiom("euler_contraction", "Theta = i_Z omega", (big_theta - interior(ext.euler, big_omega)).residuals(), seed, settings),
            AxiomResult("theta_multiplicative", "m^* Theta = pr1^* Theta + pr2^* Theta", theta_report.axioms[0].verdict),
            AxiomResult("omega_multiplicative", "m^* omega = pr1^* omega + pr2^* omega", omega_report.axioms[0].verdict),
        ],
        data={"groupoid": ext.name, "Theta": str(big_theta), "omega": str(big_omega)},
    )
    report.extend(is_multiplicative_vf(ext, ext.euler, ext.euler_lift, seed, settings), prefix="euler.")
    return report
