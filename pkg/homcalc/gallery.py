"""Built-in scenarios, run by `homcalc --gallery`."""
from __future__ import annotations

import logging

from homcalc.scenario import Scenario, parse_scenario

logger = logging.getLogger(__name__)

CONTACT_R3 = """
id = "contact_r3"
description = "theta = dz - y dx on R^3, its Jacobi structure and Poissonization"

[chart]
name = "R3"
vars = ["x", "y", "z"]

[form.theta]
components = { "x" = "-y", "z" = "1" }

[jacobi.J]
P = { "xy" = "1", "yz" = "-y" }
Q = { "z" = "1" }

[[check]]
name = "contact"
kind = "contact_roundtrip"
theta = "theta"

[[check]]
name = "jacobi"
kind = "verify_jacobi"
J = "J"

[[check]]
name = "poissonization"
kind = "poissonization"
J = "J"
symplectization = true

[[check]]
name = "homogenization"
kind = "homogenization_roundtrip"
T = "J"

[[check]]
name = "jet_algebroid"
kind = "verify_algebroid"
algebroid = "jet"
J = "J"
"""

SO3_LIE_POISSON = """
id = "so3_lie_poisson"
description = "Lie-Poisson structure on so(3)* and the homogeneity derivation"

[chart]
name = "so3"
vars = ["x", "y", "z"]

[bivector.pi]
components = { "yz" = "x", "zx" = "y", "xy" = "z" }

[bivector.pi_flat]
components = { "xy" = "1" }

[bivector.pi_zero]
components = {}

[vector.euler]
components = { "x" = "x", "y" = "y", "z" = "z" }

[vector.half_euler]
components = { "x" = "x/2", "y" = "y/2", "z" = "z/2" }

[tensor11.N]
matrix = "identity"

[[check]]
name = "poisson"
kind = "verify_poisson"
pi = "pi"

[[check]]
name = "homogeneous_poisson"
kind = "verify_homogeneous_poisson"
pi = "pi"
zeta = "euler"

[[check]]
name = "derivation_linear"
kind = "homogeneity_derivation"
pi = "pi"
zeta = "euler"

[[check]]
name = "derivation_flat_euler"
kind = "homogeneity_derivation"
pi = "pi_flat"
zeta = "euler"
expect = "fail"

[[check]]
name = "derivation_flat_half_euler"
kind = "homogeneity_derivation"
pi = "pi_flat"
zeta = "half_euler"

[[check]]
name = "derivation_zero"
kind = "homogeneity_derivation"
pi = "pi_zero"
zeta = "euler"

[[check]]
name = "pn_identity"
kind = "verify_pn"
pi = "pi"
N = "N"

[[check]]
name = "homogeneous_pn_identity"
kind = "verify_homogeneous_pn"
pi = "pi"
N = "N"
zeta = "euler"

[[check]]
name = "pn_spencer_identity"
kind = "pn_spencer"
pi = "pi"
N = "N"

[[check]]
name = "cotangent_algebroid"
kind = "verify_algebroid"
algebroid = "cotangent"
pi = "pi"
"""

C2_HOLOMORPHIC = """
id = "c2_holomorphic"
description = "Constant holomorphic Poisson structure on C^2 as a PN pair"

[chart]
name = "C2"
vars = ["x1", "y1", "x2", "y2"]

[bivector.pi]
components = { "x1,x2" = "1/4", "y1,y2" = "-1/4" }

[bivector.pi_bad]
components = { "x1,y1" = "1" }

[tensor11.j]
matrix = [["0", "-1", "0", "0"], ["1", "0", "0", "0"], ["0", "0", "0", "-1"], ["0", "0", "1", "0"]]

[[check]]
name = "holomorphic"
kind = "verify_holomorphic_poisson"
pi = "pi"
N = "j"

[[check]]
name = "holomorphic_bad"
kind = "verify_holomorphic_poisson"
pi = "pi_bad"
N = "j"
expect = "fail"

[[check]]
name = "complex_structure_integrable"
kind = "nijenhuis"
N = "j"
"""

PN_IDENTITY = """
id = "pn_identity"
description = "Poisson-Nijenhuis pairs on the plane against their Spencer operators"

[chart]
name = "R2"
vars = ["x", "y"]

[bivector.pi]
components = { "xy" = "1" }

[tensor11.N_id]
matrix = "identity"

[tensor11.N_shear]
matrix = [["1", "x"], ["0", "1"]]

[tensor11.N_scaled]
matrix = [["x", "0"], ["0", "x"]]

[[check]]
name = "pn_id"
kind = "verify_pn"
pi = "pi"
N = "N_id"

[[check]]
name = "spencer_id"
kind = "pn_spencer"
pi = "pi"
N = "N_id"

[[check]]
name = "pn_shear"
kind = "verify_pn"
pi = "pi"
N = "N_shear"
expect = "fail"

[[check]]
name = "spencer_shear"
kind = "pn_spencer"
pi = "pi"
N = "N_shear"
expect = "fail"

[[check]]
name = "pn_scaled"
kind = "verify_pn"
pi = "pi"
N = "N_scaled"

[[check]]
name = "spencer_scaled"
kind = "pn_spencer"
pi = "pi"
N = "N_scaled"
"""

MAGRI_MOROSI_SUITE = """
id = "magri_morosi_suite"
description = "omega_N closedness against the PN conditions of the inverse Poisson structure"

[chart]
name = "R4"
vars = ["x1", "y1", "x2", "y2"]

[form.omega]
components = { "x1,y1" = "1", "x2,y2" = "1" }

[tensor11.N_id]
matrix = "identity"

[tensor11.N_const]
matrix = [["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "2", "0"], ["0", "0", "0", "2"]]

[tensor11.N_action]
matrix = [["x1", "0", "0", "0"], ["0", "x1", "0", "0"], ["0", "0", "x2", "0"], ["0", "0", "0", "x2"]]

[tensor11.N_mixed]
matrix = [["x2", "0", "0", "0"], ["0", "x2", "0", "0"], ["0", "0", "x2", "0"], ["0", "0", "0", "x2"]]

[tensor11.N_shear]
matrix = [["1", "x1", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]]

[[check]]
name = "identity"
kind = "magri_morosi"
omega = "omega"
N = "N_id"

[[check]]
name = "constant_eigenvalues"
kind = "magri_morosi"
omega = "omega"
N = "N_const"

[[check]]
name = "action_eigenvalues"
kind = "magri_morosi"
omega = "omega"
N = "N_action"

[[check]]
name = "mixed_eigenvalue"
kind = "magri_morosi"
omega = "omega"
N = "N_mixed"
expect = "fail"

[[check]]
name = "shear"
kind = "magri_morosi"
omega = "omega"
N = "N_shear"
expect = "fail"
"""

JACOBI_NIJENHUIS_SUITE = """
id = "jacobi_nijenhuis_suite"
description = "Jacobi-Nijenhuis pairs over the contact Jacobi structure and more Jacobi pairs"

[chart]
name = "R3"
vars = ["x", "y", "z"]

[jacobi.J]
P = { "xy" = "1", "yz" = "-y" }
Q = { "z" = "1" }

[jacobi.J_lie]
P = { "yz" = "x", "zx" = "y", "xy" = "z" }
Q = {}

[jacobi.J_flat]
P = { "xz" = "1" }
Q = { "z" = "1" }

[atiyah_tensor11.N_id]
matrix = "identity"

[atiyah_tensor11.N_double]
matrix = [["2", "0", "0", "0"], ["0", "2", "0", "0"], ["0", "0", "2", "0"], ["0", "0", "0", "2"]]

[atiyah_tensor11.N_shear]
matrix = [["1", "x", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]]

[[check]]
name = "jacobi"
kind = "verify_jacobi"
J = "J"

[[check]]
name = "jn_identity"
kind = "verify_jn"
J = "J"
N = "N_id"

[[check]]
name = "jn_double"
kind = "verify_jn"
J = "J"
N = "N_double"

[[check]]
name = "jn_shear"
kind = "verify_jn"
J = "J"
N = "N_shear"
expect = "fail"

[[check]]
name = "homogenized_identity"
kind = "jn_homogenization"
J = "J"
N = "N_id"

[[check]]
name = "homogenized_double"
kind = "jn_homogenization"
J = "J"
N = "N_double"

[[check]]
name = "homogenized_shear"
kind = "jn_homogenization"
J = "J"
N = "N_shear"
expect = "fail"

[[check]]
name = "homogenized_lie_double"
kind = "jn_homogenization"
J = "J_lie"
N = "N_double"

[[check]]
name = "torsion_double"
kind = "nijenhuis"
N = "N_double"

[[check]]
name = "jacobi_lie"
kind = "verify_jacobi"
J = "J_lie"

[[check]]
name = "poissonization_lie"
kind = "poissonization"
J = "J_lie"

[[check]]
name = "jacobi_flat"
kind = "verify_jacobi"
J = "J_flat"

[[check]]
name = "poissonization_flat"
kind = "poissonization"
J = "J_flat"
"""

PAIR_GROUPOID_SYMPLECTIC = """
id = "pair_groupoid_symplectic"
description = "The pair groupoid of the plane with the difference of the area forms"

[chart]
name = "R2"
vars = ["x", "y"]

[groupoid.P]
kind = "pair"

[form.Omega]
on = "P"
components = { "x_1,y_1" = "1", "x_2,y_2" = "-1" }

[form.Omega_sum]
on = "P"
components = { "x_1,y_1" = "1", "x_2,y_2" = "1" }

[function.f]
on = "P"
expr = "x_1 - x_2"

[vector.Z]
on = "P"
components = { "x_1" = "x_1", "x_2" = "x_2" }

[vector.Z_W]
on = "P.W"
components = { "x_1" = "x_1", "x_2" = "x_2", "x_3" = "x_3" }

[vector.Z_bad]
on = "P"
components = { "x_1" = "x_1" }

[vector.Z_bad_W]
on = "P.W"
components = { "x_1" = "x_1" }

[[check]]
name = "axioms"
kind = "groupoid_axioms"
groupoid = "P"

[[check]]
name = "difference_form"
kind = "multiplicative_form"
groupoid = "P"
omega = "Omega"

[[check]]
name = "sum_form"
kind = "multiplicative_form"
groupoid = "P"
omega = "Omega_sum"
expect = "fail"

[[check]]
name = "spencer"
kind = "spencer_of_form"
groupoid = "P"
omega = "Omega"

[[check]]
name = "function"
kind = "multiplicative_function"
groupoid = "P"
f = "f"

[[check]]
name = "vector_field"
kind = "multiplicative_vf"
groupoid = "P"
Z = "Z"
Z_W = "Z_W"

[[check]]
name = "vector_field_bad"
kind = "multiplicative_vf"
groupoid = "P"
Z = "Z_bad"
Z_W = "Z_bad_W"
expect = "fail"
"""

COTANGENT_GROUPOID_ZERO_POISSON = """
id = "cotangent_groupoid_zero_poisson"
description = "T*R^3 as a bundle of abelian groups with the canonical symplectic form"

[chart]
name = "R3"
vars = ["x1", "x2", "x3"]

[groupoid.C]
kind = "vb_addition"
fiber_rank = 3

[form.omega]
on = "C"
components = { "p1,x1" = "1", "p2,x2" = "1", "p3,x3" = "1" }

[form.theta]
on = "C"
components = { "x1" = "p1", "x2" = "p2", "x3" = "p3" }

[[check]]
name = "axioms"
kind = "groupoid_axioms"
groupoid = "C"

[[check]]
name = "canonical_form"
kind = "multiplicative_form"
groupoid = "C"
omega = "omega"

[[check]]
name = "spencer_identity"
kind = "spencer_of_form"
groupoid = "C"
omega = "omega"
identity = true

[[check]]
name = "contact"
kind = "multiplicative_contact"
groupoid = "C"
theta = "theta"
"""

SCALING_EXTENSION_EULER = """
id = "scaling_extension_euler"
description = "Euler field of the scaling extension of a pair groupoid"

[chart]
name = "R"
vars = ["x"]

[groupoid.S]
kind = "pair"
scaling = true

[groupoid.Q]
kind = "pair"

[form.theta]
on = "Q"
components = { "x_1" = "1", "x_2" = "-1" }

[[check]]
name = "axioms"
kind = "groupoid_axioms"
groupoid = "S"

[[check]]
name = "euler"
kind = "multiplicative_vf"
groupoid = "S"
strict = true

[[check]]
name = "contact"
kind = "multiplicative_contact"
groupoid = "Q"
theta = "theta"
"""

HOMOGENIZATION_ROUNDTRIP = """
id = "homogenization_roundtrip"
description = "Homogenize, certify and dehomogenize Atiyah tensors on the plane"

[chart]
name = "R2"
vars = ["x", "y"]

[atiyah_form.omega]
degree = 2
beta = { "xy" = "x*y" }
gamma = { "x" = "y^2", "y" = "1" }

[multiderivation.J]
arity = 2
P = { "xy" = "x" }
Q = { "x" = "y" }

[atiyah_tensor11.N]
matrix = [["x", "0", "1"], ["0", "y", "0"], ["1", "x", "2"]]

[derivation.Delta]
X = { "x" = "y" }
f = "x"

[jet.psi]
alpha = { "x" = "y" }
g = "x^2"

[function.u]
expr = "x*y + 1"

[bivector.pi_weighted]
on = "extended"
components = { "xy" = "r^(-1)" }

[bivector.pi_unweighted]
on = "extended"
components = { "xy" = "1" }

[vector.X_basic]
on = "extended"
components = { "x" = "x" }

[[check]]
name = "atiyah_form"
kind = "homogenization_roundtrip"
T = "omega"

[[check]]
name = "multiderivation"
kind = "homogenization_roundtrip"
T = "J"

[[check]]
name = "atiyah_tensor11"
kind = "homogenization_roundtrip"
T = "N"

[[check]]
name = "derivation"
kind = "homogenization_roundtrip"
T = "Delta"

[[check]]
name = "jet"
kind = "homogenization_roundtrip"
T = "psi"

[[check]]
name = "section"
kind = "homogenization_roundtrip"
T = "u"

[[check]]
name = "naturality"
kind = "naturality"

[[check]]
name = "gauge_algebroid"
kind = "verify_algebroid"
algebroid = "gauge"

[[check]]
name = "weighted_bivector"
kind = "certify_homogeneous"
T = "pi_weighted"
m = 2

[[check]]
name = "unweighted_bivector"
kind = "certify_homogeneous"
T = "pi_unweighted"
m = 2
expect = "fail"

[[check]]
name = "basic_vector"
kind = "certify_homogeneous"
T = "X_basic"
m = 1
"""

GALLERY_SOURCES: dict[str, str] = {
    "contact_r3": CONTACT_R3,
    "so3_lie_poisson": SO3_LIE_POISSON,
    "c2_holomorphic": C2_HOLOMORPHIC,
    "pn_identity": PN_IDENTITY,
    "magri_morosi_suite": MAGRI_MOROSI_SUITE,
    "jacobi_nijenhuis_suite": JACOBI_NIJENHUIS_SUITE,
    "pair_groupoid_symplectic": PAIR_GROUPOID_SYMPLECTIC,
    "cotangent_groupoid_zero_poisson": COTANGENT_GROUPOID_ZERO_POISSON,
    "scaling_extension_euler": SCALING_EXTENSION_EULER,
    "homogenization_roundtrip": HOMOGENIZATION_ROUNDTRIP,
}


def gallery_ids() -> list[str]:
    return list(GALLERY_SOURCES)


def gallery() -> list[Scenario]:
    scenarios = [parse_scenario(text, default_id=key) for key, text in GALLERY_SOURCES.items()]
    logger.debug("Loaded %d gallery scenarios", len(scenarios))
    return scenarios


def gallery_scenario(scenario_id: str) -> Scenario:
    if scenario_id not in GALLERY_SOURCES:
        raise KeyError(scenario_id)
    return parse_scenario(GALLERY_SOURCES[scenario_id], default_id=scenario_id)
