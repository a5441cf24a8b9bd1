from __future__ import annotations

import numpy as np
import pytest
import sympy as sp

from homcalc.errors import ChartMismatch, DegreeError, KindMismatch, NotNondegenerate, ShapeMismatch
from homcalc.expr import Chart
from homcalc.homogen import random_multivector
from homcalc.tensor import (
    Form,
    Multivector,
    SmoothMap,
    Tensor11,
    VectorField,
    coordinate_form,
    ext_d,
    fn_bracket,
    form_matrix,
    interior,
    invert_matrix,
    lie_bracket,
    lie_derivative,
    nijenhuis_torsion,
    pullback,
    pushforward,
    schouten,
    sharp,
    skewness_residuals,
    sort_index,
    wedge,
)


def test_sort_index_sign():
    assert sort_index((1, 0)) == (-1, (0, 1))
    assert sort_index((0, 2, 1)) == (-1, (0, 1, 2))
    assert sort_index((2, 0, 1)) == (1, (0, 1, 2))
    assert sort_index((1, 1))[0] == 0


def test_alternating_storage_is_antisymmetric(r2):
    omega = Form(r2, 2, {("y", "x"): 3})
    assert omega.components == {(0, 1): -3}
    assert omega.value((1, 0)) == 3


def test_alternating_rejects_repeated_index(r2):
    with pytest.raises(ShapeMismatch):
        Form(r2, 2, {(0, 0): 1})


def test_form_evaluation_is_determinant(r2):
    omega = Form(r2, 2, {(0, 1): 1})
    X = VectorField(r2, (1, 2))
    Y = VectorField(r2, (3, 4))
    assert omega(X, Y) == 1 * 4 - 2 * 3


def test_ext_d_squares_to_zero(r3):
    x, y, z = r3.symbols
    alpha = Form(r3, 1, {(0,): x * y * z, (1,): sp.sin(x) * z, (2,): y**2})
    assert ext_d(ext_d(alpha)).residuals() == []


def test_ext_d_of_contact_form(contact_theta):
    d_theta = ext_d(contact_theta)
    # d(-y dx) = dx ^ dy
    assert d_theta.components == {(0, 1): 1}


def test_interior_and_wedge(r3):
    dx, dy = coordinate_form(r3, "x"), coordinate_form(r3, "y")
    area = wedge(dx, dy)
    assert area.components == {(0, 1): 1}
    assert interior(VectorField.coordinate(r3, "y"), area).components == {(0,): -1}


def test_wedge_kind_mismatch(r2):
    with pytest.raises(KindMismatch):
        wedge(coordinate_form(r2, 0), Multivector(r2, 1, {(0,): 1}))


def test_schouten_of_vector_fields_is_lie_bracket(r2):
    x, y = r2.symbols
    X = VectorField(r2, (x * y, 1))
    Y = VectorField(r2, (y, x**2))
    bracket = schouten(X.as_multivector(), Y.as_multivector()).as_vector_field()
    assert (bracket - lie_bracket(X, Y)).residuals() == []


def test_schouten_of_vector_and_function(r2):
    x, y = r2.symbols
    X = VectorField(r2, (y, 0))
    f = Multivector.scalar(r2, x**2)
    assert schouten(X.as_multivector(), f).function() == 2 * x * y


def test_lie_poisson_is_poisson(so3_pi):
    assert schouten(so3_pi, so3_pi).residuals() == []


def test_non_poisson_bivector(r3):
    y = r3.symbol("y")
    pi = Multivector(r3, 2, {(0, 1): 1, (1, 2): y})
    assert schouten(pi, pi).residuals() != []


def test_lie_derivative_of_linear_bivector_along_euler(so3_pi, euler_r3):
    assert (lie_derivative(euler_r3, so3_pi) + so3_pi).residuals() == []


def test_lie_derivative_form_cartan(r2):
    x, y = r2.symbols
    X = VectorField(r2, (x, y))
    area = Form(r2, 2, {(0, 1): 1})
    assert (lie_derivative(X, area) - area.scale(2)).residuals() == []


def test_tensor11_action_conventions(r2):
    N = Tensor11.from_matrix(r2, [[1, 2], [3, 4]])
    dx = coordinate_form(r2, "x")
    assert N.apply(VectorField.coordinate(r2, "x")).components == (1, 3)
    assert N.dual_apply(dx).components == {(0,): 1, (1,): 2}


def test_tensor11_shape():
    chart = Chart("R2", ("x", "y"))
    with pytest.raises(ShapeMismatch):
        Tensor11.from_matrix(chart, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])


def test_nijenhuis_torsion_constant_and_integrable(r2):
    x = r2.symbol("x")
    assert nijenhuis_torsion(Tensor11.from_matrix(r2, [[0, -1], [1, 0]])).residuals() == []
    assert nijenhuis_torsion(Tensor11.diagonal(r2, [x, x])).residuals() == []


def test_nijenhuis_torsion_nonzero(r2):
    N = Tensor11.diagonal(r2, [r2.symbol("y"), 0])
    assert nijenhuis_torsion(N).residuals() != []


def test_fn_bracket_is_twice_torsion(r3):
    x, y, z = r3.symbols
    N = Tensor11.from_matrix(r3, [[y, 0, 0], [x, z, 0], [0, 1, x]])
    torsion = nijenhuis_torsion(N)
    assert (fn_bracket(N, N) - torsion.scale(2)).residuals() == []


def test_pullback_and_pushforward():
    src = Chart("W", ("a", "b"))
    tgt = Chart("G", ("u",))
    a, b = src.symbols
    phi = SmoothMap(src, tgt, (a + b,))
    du = coordinate_form(tgt, "u")
    assert pullback(phi, du).components == {(0,): 1, (1,): 1}
    assert pushforward(phi, VectorField(src, (a, b))) == (a + b,)


def test_smooth_map_rejects_foreign_symbols():
    src = Chart("A", ("a",))
    tgt = Chart("B", ("b",))
    with pytest.raises(ChartMismatch):
        SmoothMap(src, tgt, (sp.Symbol("q"),))


def test_sharp_convention(r2):
    pi = Multivector(r2, 2, {(0, 1): 1})
    assert sharp(pi, coordinate_form(r2, "x")).components == (0, 1)


def test_skewness_residuals(r2):
    x = r2.symbol("x")
    pi = Multivector(r2, 2, {(0, 1): 1})
    assert all(r == 0 for r in skewness_residuals(Tensor11.identity(r2), pi))
    shear = Tensor11.from_matrix(r2, [[1, x], [0, 1]])
    assert any(r != 0 for r in skewness_residuals(shear, pi))


def test_invert_matrix(r2):
    omega = Form(r2, 2, {(0, 1): r2.symbol("x")})
    inverse = invert_matrix(form_matrix(omega))
    assert inverse[0, 1] == -1 / r2.symbol("x")
    with pytest.raises(NotNondegenerate):
        invert_matrix(sp.zeros(2, 2))


def test_multivector_evaluation_needs_one_forms(r2):
    pi = Multivector(r2, 2, {(0, 1): 1})
    with pytest.raises(DegreeError):
        pi(Form(r2, 2, {(0, 1): 1}), coordinate_form(r2, 0))


def _graded_sign(p, q):
    return (-1) ** ((p - 1) * (q - 1))


@pytest.mark.parametrize(("p", "q"), [(0, 1), (1, 1), (1, 2), (2, 2), (0, 3), (1, 3)])
def test_schouten_graded_antisymmetry(r3, p, q):
    rng = np.random.default_rng(10 * p + q)
    P, Q = random_multivector(r3, rng, p), random_multivector(r3, rng, q)
    assert (schouten(P, Q) + schouten(Q, P).scale(_graded_sign(p, q))).residuals() == []


@pytest.mark.parametrize("degrees", [(0, 1, 2), (1, 1, 1), (1, 1, 2), (1, 2, 2), (0, 2, 2)])
def test_schouten_graded_jacobi(r3, degrees):
    rng = np.random.default_rng(sum(degrees))
    p, q, r = degrees
    P, Q, R = (random_multivector(r3, rng, k) for k in degrees)
    total = (
        schouten(P, schouten(Q, R)).scale(_graded_sign(p, r))
        + schouten(Q, schouten(R, P)).scale(_graded_sign(q, p))
        + schouten(R, schouten(P, Q)).scale(_graded_sign(r, q))
    )
    assert total.residuals() == []
