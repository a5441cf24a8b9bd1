from __future__ import annotations

import json
from textwrap import dedent

import pytest

from homcalc.cli import build_parser, main
from homcalc.gallery import gallery_ids

SO3 = dedent(
    """\
    id = "so3"

    [chart]
    vars = ["x", "y", "z"]

    [bivector.pi]
    components = { "yz" = "x", "zx" = "y", "xy" = "z" }

    [bivector.pi_flat]
    components = { "xy" = "1" }

    [vector.euler]
    components = { "x" = "x", "y" = "y", "z" = "z" }

    [[check]]
    name = "poisson"
    kind = "verify_poisson"
    pi = "pi"

    [[check]]
    name = "homogeneous_flat"
    kind = "verify_homogeneous_poisson"
    pi = "pi_flat"
    zeta = "euler"
    expect = "fail"
    """
)


@pytest.fixture
def so3_file(tmp_path):
    path = tmp_path / "so3.toml"
    path.write_text(SO3, encoding="utf-8")
    return path


def test_parser_requires_a_source():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_list_prints_gallery_ids(capsys):
    assert main(["--list"]) == 0
    assert capsys.readouterr().out.split() == gallery_ids()


def test_text_report(so3_file, capsys):
    assert main(["--scenario", str(so3_file), "--no-log-file"]) == 0
    out = capsys.readouterr().out
    assert "Scenario: so3" in out
    assert "[ok] poisson (verify_poisson): pass, expected pass" in out
    assert "All expectations met." in out


def test_json_report_is_deterministic(so3_file, capsys):
    assert main(["--scenario", str(so3_file), "--format", "json", "--no-log-file"]) == 0
    first = capsys.readouterr().out
    assert main(["--scenario", str(so3_file), "--format", "json", "--no-log-file", "--workers", "2"]) == 0
    second = capsys.readouterr().out
    assert first == second
    data = json.loads(first)
    assert data["schema"] == 1
    assert data["seed"] == 42
    assert [c["name"] for c in data["checks"]] == ["poisson", "homogeneous_flat"]
    assert data["checks"][1]["outcome"] == "fail"


def test_unmet_expectation_exits_one(tmp_path, capsys):
    path = tmp_path / "bad_expect.toml"
    path.write_text(SO3.replace('expect = "fail"', 'expect = "pass"'), encoding="utf-8")
    assert main(["--scenario", str(path), "--no-log-file"]) == 1
    assert "[UNEXPECTED] homogeneous_flat" in capsys.readouterr().out


def test_invalid_scenario_exits_two(tmp_path, capsys):
    path = tmp_path / "broken.toml"
    path.write_text(SO3.replace('pi = "pi"', 'pi = "rho"', 1), encoding="utf-8")
    assert main(["--scenario", str(path), "--no-log-file"]) == 2
    assert "undeclared object 'rho'" in capsys.readouterr().err


def test_invalid_config_exits_two(so3_file, tmp_path, capsys):
    config = tmp_path / "settings.json"
    config.write_text('{"samples": 5, "colour": "blue"}', encoding="utf-8")
    assert main(["--scenario", str(so3_file), "--config", str(config), "--no-log-file"]) == 2
    assert "Unknown settings: colour" in capsys.readouterr().err


def test_only_filters_checks(so3_file, capsys):
    assert main(["--scenario", str(so3_file), "--format", "json", "--only", "homog*", "--no-log-file"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert [c["name"] for c in data["checks"]] == ["homogeneous_flat"]


def test_seed_is_reported(so3_file, capsys):
    main(["--scenario", str(so3_file), "--format", "json", "--seed", "7", "--no-log-file"])
    assert json.loads(capsys.readouterr().out)["seed"] == 7


def test_output_default_filename(so3_file, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(["--scenario", str(so3_file), "--format", "json", "--output", "--no-log-file"]) == 0
    written = (tmp_path / "homcalc_report_so3.json").read_text(encoding="utf-8")
    assert written.endswith("\n")
    assert json.loads(written)["scenario"] == "so3"
    capsys.readouterr()


def test_output_explicit_path_and_timings(so3_file, tmp_path, capsys):
    target = tmp_path / "report.json"
    main(["--scenario", str(so3_file), "--format", "json", "--timings", "--output", str(target), "--no-log-file"])
    data = json.loads(target.read_text(encoding="utf-8"))
    assert all("elapsed" in c for c in data["checks"])
    capsys.readouterr()


def test_log_file_is_written(so3_file, tmp_path, capsys):
    config = tmp_path / "settings.json"
    config.write_text(json.dumps({"log_dir": str(tmp_path / "logs")}), encoding="utf-8")
    main(["--scenario", str(so3_file), "--config", str(config)])
    assert (tmp_path / "logs" / "homcalc.log").exists()
    capsys.readouterr()


def test_empty_check_list_exits_zero(tmp_path, capsys):
    path = tmp_path / "empty.toml"
    path.write_text('[chart]\nvars = ["x"]\n', encoding="utf-8")
    assert main(["--scenario", str(path), "--format", "json", "--no-log-file"]) == 0
    assert json.loads(capsys.readouterr().out)["checks"] == []
