from __future__ import annotations

import numpy as np
import pytest
import sympy as sp

from homcalc.algebroid import (
    AlgebroidSpec,
    Cochain,
    SpencerData,
    abelian_algebroid,
    algebroid_differential,
    check_homogeneity_derivation,
    cotangent_algebroid,
    gauge_algebroid,
    jet_algebroid,
    tangent_algebroid,
    verify_algebroid,
    verify_spencer,
)
from homcalc.errors import MissingRepresentation, ShapeMismatch
from homcalc.expr import random_polynomial
from homcalc.models import Outcome
from homcalc.tensor import Form, Multivector, VectorField, coordinate_form


def test_standard_algebroids_pass(r3):
    for A in (tangent_algebroid(r3), gauge_algebroid(r3), abelian_algebroid(r3, 2)):
        assert verify_algebroid(A).overall is Outcome.PASS


def test_gauge_algebroid_has_flat_representation(r2):
    report = verify_algebroid(gauge_algebroid(r2))
    assert report.axiom("representation_flat").outcome is Outcome.PASS


def test_cotangent_algebroid_of_poisson(so3_pi):
    assert verify_algebroid(cotangent_algebroid(so3_pi)).overall is Outcome.PASS


def test_cotangent_algebroid_of_non_poisson(r3):
    y = r3.symbol("y")
    pi = Multivector(r3, 2, {(0, 1): 1, (1, 2): y})
    assert verify_algebroid(cotangent_algebroid(pi)).overall is Outcome.FAIL


def test_jet_algebroid_of_contact_jacobi(contact_jacobi):
    A = jet_algebroid(contact_jacobi)
    assert A.rank == 4
    assert verify_algebroid(A).overall is Outcome.PASS


def test_cotangent_bracket_of_coordinates(so3_pi, r3):
    A = cotangent_algebroid(so3_pi)
    x = r3.symbol("x")
    # [dy, dz]_pi = d pi^{yz} = dx
    assert A.bracket(A.frame(1), A.frame(2)) == (1, 0, 0)
    assert A.anchor_of(A.frame(1)).components == (-r3.symbol("z"), 0, x)


def test_differential_squares_to_zero(so3_pi, r3):
    A = cotangent_algebroid(so3_pi)
    rng = np.random.default_rng(4)
    for degree in (0, 1):
        c = Cochain(r3, 3, degree, {idx: random_polynomial(r3, rng) for idx in Cochain(r3, 3, degree).indices()})
        assert algebroid_differential(A, algebroid_differential(A, c)).residuals() == []


def test_twisted_differential_needs_representation(r2):
    with pytest.raises(MissingRepresentation):
        algebroid_differential(tangent_algebroid(r2), Cochain(r2, 2, 0, {(): 1}), twisted=True)


def test_anchor_shape_is_validated(r2):
    with pytest.raises(ShapeMismatch):
        AlgebroidSpec("bad", r2, 1, ((1,),), (((0,),),))


@pytest.mark.parametrize(
    ("which", "expected"),
    [
        ("linear_euler", Outcome.PASS),
        ("flat_euler", Outcome.FAIL),
        ("flat_half_euler", Outcome.PASS),
        ("zero_euler", Outcome.PASS),
    ],
)
def test_homogeneity_derivation_matches_weight(r3, so3_pi, which, expected):
    x, y, z = r3.symbols
    euler = VectorField(r3, (x, y, z))
    flat = Multivector(r3, 2, {(0, 1): 1})
    cases = {
        "linear_euler": (so3_pi, euler),
        "flat_euler": (flat, euler),
        "flat_half_euler": (flat, euler.scale(sp.Rational(1, 2))),
        "zero_euler": (Multivector.zero(r3, 2), euler),
    }
    pi, zeta = cases[which]
    report = check_homogeneity_derivation(pi, zeta)
    assert report.overall is expected
    assert report.data["agree"] == "true"


def test_identity_spencer_operator_on_cotangent(so3_pi, r3):
    S = SpencerData(
        r3,
        2,
        D=tuple(Form.zero(r3, 2) for _ in range(3)),
        ell=tuple(coordinate_form(r3, a) for a in range(3)),
    )
    assert verify_spencer(cotangent_algebroid(so3_pi), S).overall is Outcome.PASS


def test_spencer_data_shapes(r2):
    with pytest.raises(ShapeMismatch):
        SpencerData(r2, 2, D=(Form.zero(r2, 1),), ell=(Form.zero(r2, 1),))
