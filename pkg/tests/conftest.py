from __future__ import annotations

import pytest

from homcalc.atiyah import Multiderivation
from homcalc.expr import Chart
from homcalc.tensor import Form, Multivector, VectorField


@pytest.fixture
def r2() -> Chart:
    return Chart("R2", ("x", "y"))


@pytest.fixture
def r3() -> Chart:
    return Chart("R3", ("x", "y", "z"))


@pytest.fixture
def so3_pi(r3: Chart) -> Multivector:
    return Multivector(r3, 2, {("y", "z"): r3.symbol("x"), ("z", "x"): r3.symbol("y"), ("x", "y"): r3.symbol("z")})


@pytest.fixture
def euler_r3(r3: Chart) -> VectorField:
    return VectorField(r3, r3.symbols)


@pytest.fixture
def contact_theta(r3: Chart) -> Form:
    """dz - y dx."""
    return Form(r3, 1, {("x",): -r3.symbol("y"), ("z",): 1})


@pytest.fixture
def contact_jacobi(r3: Chart) -> Multiderivation:
    """Inverse of d_D(dz - y dx): Lambda = Dx^Dy - y Dy^Dz, E = Dz."""
    y = r3.symbol("y")
    P = Multivector(r3, 2, {("x", "y"): 1, ("y", "z"): -y})
    Q = Multivector(r3, 1, {("z",): 1})
    return Multiderivation(P, Q)
