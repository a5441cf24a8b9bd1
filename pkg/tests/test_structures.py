from __future__ import annotations

import numpy as np
import pytest
import sympy as sp

from homcalc.atiyah import AtiyahTensor11, Multiderivation
from homcalc.errors import DegenerateForm, DegreeError, NotContact
from homcalc.expr import Chart
from homcalc.homogen import random_atiyah_tensor11
from homcalc.models import Outcome
from homcalc.structures import (
    JN_TO_PN_AXIOMS,
    compatible_poisson,
    contact_roundtrip,
    jacobi_from_contact,
    jn_homogenization_report,
    magri_morosi,
    pn_spencer,
    poissonization_report,
    symplectic_inverse,
    verify_holomorphic_poisson,
    verify_homogeneous_pn,
    verify_homogeneous_poisson,
    verify_jacobi,
    verify_jn,
    verify_pn,
    verify_poisson,
)
from homcalc.tensor import Form, Multivector, Tensor11, VectorField


@pytest.fixture
def r4():
    return Chart("R4", ("x1", "y1", "x2", "y2"))


@pytest.fixture
def area(r2):
    return Multivector(r2, 2, {(0, 1): 1})


@pytest.fixture
def omega4(r4):
    return Form(r4, 2, {(0, 1): 1, (2, 3): 1})


def test_poisson_verdicts(so3_pi, r3):
    assert verify_poisson(so3_pi).overall is Outcome.PASS
    y = r3.symbol("y")
    bad = Multivector(r3, 2, {(0, 1): 1, (1, 2): y})
    report = verify_poisson(bad)
    assert report.overall is Outcome.FAIL
    assert report.axiom("poisson").verdict.witness is not None


def test_poisson_needs_bivector(r3):
    with pytest.raises(DegreeError):
        verify_poisson(Multivector(r3, 1, {(0,): 1}))


def test_jacobi_verdicts(contact_jacobi, r3):
    assert verify_jacobi(contact_jacobi).overall is Outcome.PASS
    not_jacobi = Multiderivation(Multivector(r3, 2, {(0, 1): 1}), Multivector(r3, 1, {(2,): 1}))
    assert verify_jacobi(not_jacobi).overall is Outcome.FAIL
    flat = Multiderivation(Multivector(r3, 2, {(0, 2): 1}), Multivector(r3, 1, {(2,): 1}))
    assert verify_jacobi(flat).overall is Outcome.PASS


def test_homogeneous_poisson(so3_pi, euler_r3, r3):
    assert verify_homogeneous_poisson(so3_pi, euler_r3).overall is Outcome.PASS
    flat = Multivector(r3, 2, {(0, 1): 1})
    report = verify_homogeneous_poisson(flat, euler_r3)
    assert report.axiom("poisson").outcome is Outcome.PASS
    assert report.axiom("homogeneity").outcome is Outcome.FAIL


@pytest.mark.parametrize(
    ("matrix", "expected"),
    [
        ("identity", Outcome.PASS),
        ("shear", Outcome.FAIL),
        ("scaled", Outcome.PASS),
    ],
)
def test_pn_pairs_on_the_plane(r2, area, matrix, expected):
    x = r2.symbol("x")
    tensors = {
        "identity": Tensor11.identity(r2),
        "shear": Tensor11.from_matrix(r2, [[1, x], [0, 1]]),
        "scaled": Tensor11.diagonal(r2, [x, x]),
    }
    N = tensors[matrix]
    assert verify_pn(area, N).overall is expected
    assert pn_spencer(area, N).overall is expected


def test_shear_fails_on_skewness(r2, area):
    x = r2.symbol("x")
    report = verify_pn(area, Tensor11.from_matrix(r2, [[1, x], [0, 1]]))
    assert report.axiom("skew").outcome is Outcome.FAIL
    assert report.axiom("torsion").outcome is Outcome.PASS


def test_homogeneous_pn_identity(so3_pi, euler_r3, r3):
    report = verify_homogeneous_pn(so3_pi, Tensor11.identity(r3), euler_r3)
    assert report.overall is Outcome.PASS
    assert report.axiom("nijenhuis_invariance").outcome is Outcome.PASS


def test_symplectic_inverse_convention(r2):
    pi = symplectic_inverse(Form(r2, 2, {(0, 1): 1}))
    assert pi.components == {(0, 1): 1}
    with pytest.raises(DegenerateForm):
        symplectic_inverse(Form.zero(r2, 2))


@pytest.mark.parametrize(
    ("diagonal", "expected"),
    [
        (("1", "1", "1", "1"), Outcome.PASS),
        (("1", "1", "2", "2"), Outcome.PASS),
        (("x1", "x1", "x2", "x2"), Outcome.PASS),
        (("x2", "x2", "x2", "x2"), Outcome.FAIL),
    ],
)
def test_magri_morosi_branches_agree(r4, omega4, diagonal, expected):
    N = Tensor11.diagonal(r4, [sp.sympify(d, locals={v: r4.symbol(v) for v in r4.vars}) for d in diagonal])
    report = magri_morosi(omega4, N)
    assert report.overall is expected
    assert report.data["agree"] == "true"
    assert report.data["branch1"] == report.data["branch2"]


def test_magri_morosi_shear(r4, omega4):
    x1 = r4.symbol("x1")
    N = Tensor11.from_matrix(r4, [[1, x1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    report = magri_morosi(omega4, N)
    assert report.overall is Outcome.FAIL
    assert report.data["agree"] == "true"


def test_jn_pairs(contact_jacobi, r3):
    x = r3.symbol("x")
    identity = verify_jn(contact_jacobi, AtiyahTensor11.identity(r3))
    assert identity.overall is Outcome.PASS
    assert identity.data["J_N_skew"] == "true"
    assert verify_jn(contact_jacobi, AtiyahTensor11.identity(r3).scale(2)).overall is Outcome.PASS
    shear = [[1, x, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    assert verify_jn(contact_jacobi, AtiyahTensor11.from_matrix(r3, shear)).overall is Outcome.FAIL


def test_holomorphic_poisson(r4):
    quarter = sp.Rational(1, 4)
    pi = Multivector(r4, 2, {(0, 2): quarter, (1, 3): -quarter})
    j = Tensor11.from_matrix(r4, [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
    report = verify_holomorphic_poisson(pi, j)
    assert report.overall is Outcome.PASS
    assert report.axiom("almost_complex").outcome is Outcome.PASS
    bad = Multivector(r4, 2, {(0, 1): 1})
    assert verify_holomorphic_poisson(bad, j).overall is Outcome.FAIL


def test_holomorphic_needs_even_dimension(so3_pi, r3):
    with pytest.raises(DegreeError):
        verify_holomorphic_poisson(so3_pi, Tensor11.identity(r3))


def test_compatible_poisson_of_identity(so3_pi, r3):
    assert (compatible_poisson(so3_pi, Tensor11.identity(r3)) - so3_pi).residuals() == []


def test_jacobi_from_contact(contact_theta, contact_jacobi):
    assert (jacobi_from_contact(contact_theta) - contact_jacobi).residuals() == []


def test_jacobi_from_non_contact_form(r3):
    with pytest.raises(NotContact):
        jacobi_from_contact(Form(r3, 1, {(2,): 1}))


def test_contact_roundtrip(contact_theta):
    report = contact_roundtrip(contact_theta)
    assert report.overall is Outcome.PASS
    assert report.axiom("symplectization_nondegenerate").outcome is Outcome.PASS
    assert report.axiom("reeb_theta").outcome is Outcome.PASS


def test_reeb_field_of_contact_form(contact_theta, contact_jacobi):
    assert contact_jacobi.Q.as_vector_field().components == VectorField.coordinate(contact_theta.chart, "z").components


def test_poissonization_report(contact_jacobi):
    report = poissonization_report(contact_jacobi)
    assert report.overall is Outcome.PASS
    assert report.axiom("poissonized.homogeneity").outcome is Outcome.PASS


def test_poissonization_of_non_jacobi(r3):
    J = Multiderivation(Multivector(r3, 2, {(0, 1): 1}), Multivector(r3, 1, {(2,): 1}))
    report = poissonization_report(J)
    assert report.axiom("jacobi").outcome is Outcome.FAIL
    assert report.axiom("poissonized.poisson").outcome is Outcome.FAIL


def _atiyah_tensor(r3, name):
    x = r3.symbol("x")
    if name == "identity":
        return AtiyahTensor11.identity(r3)
    if name == "double":
        return AtiyahTensor11.identity(r3).scale(2)
    if name == "shear":
        return AtiyahTensor11.from_matrix(r3, [[1, x, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    if name == "rescaled_unit":
        return AtiyahTensor11.from_matrix(r3, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 3]])
    return random_atiyah_tensor11(r3, np.random.default_rng(3))


@pytest.mark.parametrize("jacobi", ["contact", "lie_poisson"])
@pytest.mark.parametrize("tensor", ["identity", "double", "shear", "rescaled_unit", "random"])
def test_homogenization_equivalence(contact_jacobi, so3_pi, r3, jacobi, tensor):
    J = contact_jacobi if jacobi == "contact" else Multiderivation(so3_pi)
    N = _atiyah_tensor(r3, tensor)
    report = jn_homogenization_report(J, N)
    for jn_name, pn_name in JN_TO_PN_AXIOMS.items():
        assert report.axiom(jn_name).outcome is report.axiom(f"homogenized.{pn_name}").outcome, jn_name
    assert report.axiom("homogenized.homogeneity").outcome is Outcome.PASS
    assert report.axiom("homogenized.nijenhuis_invariance").outcome is Outcome.PASS
    assert report.data["agree"] == "true"
    assert report.data["jn"] == report.data["homogenized_pn"]


@pytest.mark.parametrize(("tensor", "expected"), [("identity", "pass"), ("double", "pass"), ("shear", "fail")])
def test_homogenization_equivalence_verdicts(contact_jacobi, r3, tensor, expected):
    report = jn_homogenization_report(contact_jacobi, _atiyah_tensor(r3, tensor))
    assert report.data["jn"] == expected
    assert verify_jn(contact_jacobi, _atiyah_tensor(r3, tensor)).overall.value == expected
