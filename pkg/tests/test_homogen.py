from __future__ import annotations

import numpy as np
import pytest

from homcalc.atiyah import AtiyahForm, Derivation, Multiderivation, d_D, pair
from homcalc.errors import ChartMismatch, KindMismatch, NotContact, NotHomogeneous
from homcalc.expr import Chart, normalize
from homcalc.homogen import (
    HomogChart,
    certify_homogeneous,
    contact_top_form,
    dehomogenize,
    hom_bracket_residuals,
    homogenization_roundtrip,
    homogenize_derivation,
    homogenize_form,
    homogenize_jet,
    homogenize_section,
    jet_intertwining_residuals,
    naturality_report,
    parity_transform,
    poissonize,
    random_derivation,
    random_jet,
    random_multiderivation,
    random_sections,
    symplectization_matches_poissonization,
    symplectize_contact,
)
from homcalc.models import Outcome, Verdict
from homcalc.tensor import Form, Multivector, VectorField, ext_d, schouten


def test_homog_chart_rejects_clashing_variable():
    with pytest.raises(ChartMismatch):
        HomogChart(Chart("M", ("x", "r")))


def test_section_and_identity_derivation(r2):
    hc = HomogChart(r2)
    x = r2.symbol("x")
    assert homogenize_section(hc, x + 1) == hc.r_symbol * x + hc.r_symbol
    lifted = homogenize_derivation(hc, Derivation.identity(r2))
    assert (lifted - hc.euler).residuals() == []


def test_contact_symplectization_is_d_of_r_theta(contact_theta):
    hc = HomogChart(contact_theta.chart)
    omega_tilde = homogenize_form(hc, d_D(AtiyahForm(contact_theta)))
    expected = ext_d(hc.lift(contact_theta).scale(hc.r_symbol))
    assert (omega_tilde - expected).residuals() == []
    assert (symplectize_contact(contact_theta) - expected).residuals() == []


def test_symplectize_rejects_non_contact(r3):
    with pytest.raises(NotContact):
        symplectize_contact(Form(r3, 1, {(0,): 1}))


def test_contact_top_form_is_volume(contact_theta):
    assert contact_top_form(contact_theta).components == {(0, 1, 2): 1}


def test_poissonization_of_contact_jacobi(contact_jacobi):
    hc = HomogChart(contact_jacobi.chart)
    pi_tilde, euler = poissonize(contact_jacobi, hc)
    assert schouten(pi_tilde, pi_tilde).residuals() == []
    cert = certify_homogeneous(hc, pi_tilde, 2)
    assert cert.outcome is Outcome.PASS
    assert (euler - hc.euler).residuals() == []


def test_hom_bracket_on_coordinate_and_random_sections(contact_jacobi):
    sections = [1, *contact_jacobi.chart.symbols, *random_sections(contact_jacobi.chart, seed=42, count=4)]
    assert all(r == 0 for r in hom_bracket_residuals(contact_jacobi, sections))


def test_jet_brackets_intertwine(contact_jacobi):
    assert jet_intertwining_residuals(contact_jacobi) == []


def test_symplectization_inverts_poissonization(contact_jacobi):
    assert symplectization_matches_poissonization(contact_jacobi).overall is Outcome.PASS


def test_certificate_detects_wrong_weight(r2):
    hc = HomogChart(r2)
    ext = hc.extended
    r = hc.r_symbol
    weighted = Multivector(ext, 2, {(0, 1): 1 / r})
    flat = Multivector(ext, 2, {(0, 1): 1})
    assert certify_homogeneous(hc, weighted, 2).outcome is Outcome.PASS
    cert = certify_homogeneous(hc, flat, 2)
    assert cert.outcome is Outcome.FAIL
    assert cert.weight.outcome is Outcome.FAIL


def test_certificate_for_functions(r2):
    hc = HomogChart(r2)
    r = hc.r_symbol
    x = r2.symbol("x")
    assert certify_homogeneous(hc, r * x, 0).outcome is Outcome.PASS
    assert certify_homogeneous(hc, r**2 * x, 0).outcome is Outcome.FAIL


def test_parity_flips_r_slots(r2):
    hc = HomogChart(r2)
    r = hc.r_symbol
    Z = hc.euler
    assert (parity_transform(hc, Z) - Z).residuals() == []
    X = VectorField(hc.extended, (r, 0, 0))
    assert (parity_transform(hc, X) + X).residuals() == []


def test_dehomogenize_rejects_inhomogeneous(r2):
    hc = HomogChart(r2)
    flat = Multivector(hc.extended, 2, {(0, 1): 1})
    with pytest.raises(NotHomogeneous):
        dehomogenize(hc, flat, "multiderivation")


def test_dehomogenize_kind_mismatch(r2):
    hc = HomogChart(r2)
    with pytest.raises(KindMismatch):
        dehomogenize(hc, hc.euler, "form")


def test_roundtrip_random_multiderivations(r2):
    rng = np.random.default_rng(8)
    for m in (0, 1, 2, 3):
        report = homogenization_roundtrip(random_multiderivation(r2, rng, m))
        assert report.overall is Outcome.PASS
        assert report.data["kind"] == "multiderivation"


def test_roundtrip_section_needs_chart(r2):
    x = r2.symbol("x")
    with pytest.raises(KindMismatch):
        homogenization_roundtrip(x * 2)
    assert homogenization_roundtrip(x * 2, r2).overall is Outcome.PASS


def test_roundtrip_of_jacobi(contact_jacobi):
    assert homogenization_roundtrip(contact_jacobi).overall is Outcome.PASS


def test_naturality_on_random_objects(r2):
    report = naturality_report(r2, seed=42, count=9)
    assert report.overall is Outcome.PASS
    assert [a.name for a in report.axioms] == [
        "pairing",
        "exterior_differential",
        "schouten_jacobi",
        "froelicher_nijenhuis",
    ]
    assert report.axiom("pairing").verdict.status is Verdict.ZERO


@pytest.mark.parametrize("seed", [0, 5, 11])
def test_pairing_commutes_with_homogenization(r3, seed):
    hc = HomogChart(r3)
    rng = np.random.default_rng(seed)
    for _ in range(4):
        psi, delta = random_jet(r3, rng), random_derivation(r3, rng)
        lifted = homogenize_jet(hc, psi)(homogenize_derivation(hc, delta))
        assert normalize(lifted - homogenize_section(hc, pair(psi, delta))) == 0
        assert normalize(lifted - hc.r_symbol * (psi.alpha(delta.symbol) + psi.g * delta.f)) == 0


def test_naturality_is_seed_independent_for_polynomials(r2):
    for seed in (1, 2):
        assert naturality_report(r2, seed=seed, count=6).overall is Outcome.PASS


def test_section_multiderivation_has_weight_one(r2):
    x = r2.symbol("x")
    D = Multiderivation.section(r2, x)
    report = homogenization_roundtrip(D)
    assert report.overall is Outcome.PASS
    assert report.axiom("euler_weight").outcome is Outcome.PASS
