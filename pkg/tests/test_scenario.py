from __future__ import annotations

from textwrap import dedent

import pytest

from homcalc.errors import ScenarioError
from homcalc.expr import Chart
from homcalc.gallery import gallery_ids, gallery_scenario
from homcalc.models import Outcome
from homcalc.scenario import load_scenario, parse_scenario, split_key
from homcalc.tensor import Form, Multivector

HEADER = dedent(
    """\
    id = "demo"

    [chart]
    name = "R3"
    vars = ["x", "y", "z"]

    [bivector.pi]
    components = { "yz" = "x", "zx" = "y", "xy" = "z" }
    """
)


def scenario_with(extra: str):
    return parse_scenario(HEADER + dedent(extra))


def test_parse_minimal_scenario():
    scenario = scenario_with(
        """
        [[check]]
        name = "poisson"
        kind = "verify_poisson"
        pi = "pi"
        """
    )
    assert scenario.id == "demo"
    assert scenario.chart.vars == ("x", "y", "z")
    pi = scenario.objects["pi"]
    assert isinstance(pi, Multivector)
    assert pi.value((2, 0)) == scenario.chart.symbol("y")
    [check] = scenario.checks
    assert check.kind == "verify_poisson"
    assert check.args == {"pi": "pi"}
    assert check.expect is Outcome.PASS


def test_check_name_defaults_to_kind_and_position():
    scenario = scenario_with(
        """
        [[check]]
        kind = "verify_poisson"
        pi = "pi"
        expect = "fail"
        """
    )
    assert scenario.checks[0].name == "verify_poisson#1"
    assert scenario.checks[0].expect is Outcome.FAIL


def test_split_key_forms():
    chart = Chart("R4", ("x1", "y1", "x2", "y2"))
    assert split_key("x1y1", chart) == (0, 1)
    assert split_key("x2, y2", chart) == (2, 3)
    assert split_key("", chart) == ()
    with pytest.raises(ScenarioError) as info:
        split_key("x1,w", chart)
    assert info.value.symbol == "w"


def test_malformed_toml_reports_position():
    with pytest.raises(ScenarioError) as info:
        parse_scenario('id = "x"\n[chart\n')
    assert info.value.line == 2


def test_missing_chart():
    with pytest.raises(ScenarioError):
        parse_scenario('id = "x"\n')


def test_unknown_check_kind_points_at_check():
    with pytest.raises(ScenarioError) as info:
        scenario_with(
            """
            [[check]]
            kind = "verify_everything"
            """
        )
    assert info.value.symbol == "verify_everything"
    assert info.value.line == 10


def test_undeclared_object():
    with pytest.raises(ScenarioError) as info:
        scenario_with(
            """
            [[check]]
            kind = "verify_poisson"
            pi = "sigma"
            """
        )
    assert info.value.symbol == "sigma"
    assert info.value.line == 12


def test_object_of_wrong_type():
    with pytest.raises(ScenarioError, match="is a VectorField"):
        scenario_with(
            """
            [vector.v]
            components = { "x" = "1" }

            [[check]]
            kind = "verify_poisson"
            pi = "v"
            """
        )


def test_duplicate_check_name():
    with pytest.raises(ScenarioError, match="Duplicate check name"):
        scenario_with(
            """
            [[check]]
            name = "a"
            kind = "verify_poisson"
            pi = "pi"

            [[check]]
            name = "a"
            kind = "verify_poisson"
            pi = "pi"
            """
        )


def test_object_declared_twice():
    with pytest.raises(ScenarioError) as info:
        scenario_with(
            """
            [function.pi]
            expr = "x"
            """
        )
    assert info.value.symbol == "pi"


@pytest.mark.parametrize("value", ['"yes"', "1"])
def test_bool_param_type(value):
    with pytest.raises(ScenarioError, match="symplectization must be a bool"):
        parse_scenario(
            HEADER
            + dedent(
                f"""
                [jacobi.J]
                P = {{ "xy" = "1" }}
                Q = {{}}

                [[check]]
                kind = "poissonization"
                J = "J"
                symplectization = {value}
                """
            )
        )


def test_int_param_rejects_bool():
    with pytest.raises(ScenarioError, match="m must be a int"):
        scenario_with(
            """
            [[check]]
            kind = "certify_homogeneous"
            T = "pi"
            m = true
            """
        )


def test_missing_required_param():
    with pytest.raises(ScenarioError, match="missing argument 'm'"):
        scenario_with(
            """
            [[check]]
            kind = "certify_homogeneous"
            T = "pi"
            """
        )


def test_unexpected_argument():
    with pytest.raises(ScenarioError, match="unexpected argument 'colour'"):
        scenario_with(
            """
            [[check]]
            kind = "verify_poisson"
            pi = "pi"
            colour = "blue"
            """
        )


def test_bad_expression_points_at_line():
    with pytest.raises(ScenarioError) as info:
        scenario_with(
            """
            [function.f]
            expr = "x + w"
            """
        )
    assert info.value.symbol == "w"
    assert info.value.line == 11


def test_unknown_top_level_key():
    with pytest.raises(ScenarioError, match="Unknown top-level key 'frobnicate'"):
        scenario_with(
            """
            [frobnicate.a]
            value = 1
            """
        )


def test_objects_on_groupoid_charts():
    scenario = scenario_with(
        """
        [groupoid.P]
        kind = "pair"

        [form.Omega]
        on = "P"
        components = { "x_1,y_1" = "1", "x_2,y_2" = "-1" }

        [vector.Z_W]
        on = "P.W"
        components = { "x_3" = "x_3" }

        [[check]]
        kind = "multiplicative_form"
        groupoid = "P"
        omega = "Omega"
        """
    )
    omega = scenario.objects["Omega"]
    assert isinstance(omega, Form)
    assert omega.chart == scenario.groupoids["P"].G
    assert scenario.objects["Z_W"].chart == scenario.groupoids["P"].W
    assert scenario.checks[0].groupoid == "P"


def test_groupoid_check_needs_declared_groupoid():
    with pytest.raises(ScenarioError, match="undeclared groupoid"):
        scenario_with(
            """
            [[check]]
            kind = "groupoid_axioms"
            groupoid = "G"
            """
        )


def test_unknown_groupoid_kind():
    with pytest.raises(ScenarioError, match="unknown kind"):
        scenario_with(
            """
            [groupoid.G]
            kind = "action"
            """
        )


def test_extended_chart_objects():
    scenario = scenario_with(
        """
        [bivector.pi_weighted]
        on = "extended"
        components = { "xy" = "z/r" }
        """
    )
    assert scenario.objects["pi_weighted"].chart.vars == ("x", "y", "z", "r")


def test_load_scenario_from_file(tmp_path):
    path = tmp_path / "so3.toml"
    path.write_text(HEADER.replace('id = "demo"\n', ""), encoding="utf-8")
    assert load_scenario(path).id == "so3"
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / "missing.toml")


@pytest.mark.parametrize("scenario_id", gallery_ids())
def test_gallery_scenarios_parse(scenario_id):
    scenario = gallery_scenario(scenario_id)
    assert scenario.id == scenario_id
    assert scenario.checks
