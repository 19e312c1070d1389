import json

import pytest
from click.testing import CliRunner

from metalgeom.cli import main
from metalgeom.demos import builtin, expected_report


@pytest.fixture
def runner():
    return CliRunner()


def write(tmp_path, data, name="s.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_list_checks(runner):
    result = runner.invoke(main, ["list-checks"])
    assert result.exit_code == 0
    assert "schouten_parallel" in result.output and "obata_parallel" in result.output


def test_demo_text(runner):
    result = runner.invoke(main, ["demo", "family2d"])
    assert result.exit_code == 0
    assert "PASS  metallic" in result.output
    assert result.output.rstrip().endswith("overall: PASS")


def test_demo_structured_matches_pinned(runner):
    result = runner.invoke(main, ["demo", "triple", "--report", "structured"])
    assert result.exit_code == 0
    assert result.output == expected_report("triple")


def test_demo_failure_exit_code(runner):
    result = runner.invoke(main, ["demo", "nonintegrable3d"])
    assert result.exit_code == 1
    assert "FAIL  nijenhuis_integrability" in result.output


def test_demo_with_other_parameters(runner):
    result = runner.invoke(main, ["demo", "r2_example", "--a", "2", "--b", "1", "--samples", "10", "--report", "structured"])
    assert result.exit_code == 0
    d = json.loads(result.output)
    assert d["params"] == {"a": 2, "b": 1} and d["samples"] == 10


def test_unknown_demo(runner):
    result = runner.invoke(main, ["demo", "nope"])
    assert result.exit_code == 2


def test_verify_pass_and_overrides(runner, tmp_path):
    path = write(tmp_path, builtin("clifford"))
    result = runner.invoke(main, ["verify", path, "--samples", "3", "--seed", "9", "--report", "structured"])
    assert result.exit_code == 0, result.output
    d = json.loads(result.output)
    assert d["seed"] == 9 and d["samples"] == 3


def test_verify_tolerance_flag_fails(runner, tmp_path):
    data = builtin("r2_example")
    data["checks"] = ["metallic"]
    path = write(tmp_path, data)
    assert runner.invoke(main, ["verify", path, "--tol", "1e-20"]).exit_code == 1


def test_verify_output_file(runner, tmp_path):
    path = write(tmp_path, builtin("family2d"))
    out = tmp_path / "report.json"
    result = runner.invoke(main, ["verify", path, "--report", "structured", "-o", str(out)])
    assert result.exit_code == 0
    assert json.loads(out.read_text())["pass"] is True


@pytest.mark.parametrize(
    "data",
    [
        {"coords": ["x"], "params": {"a": 1, "b": 1}, "sampling": {"box": [[0, 1]]}, "checks": ["unknown_check"]},
        {"coords": ["x"], "params": {"a": 1, "b": 1}, "sampling": {"box": [[0, 1]], "count": 0}, "checks": []},
        {"coords": ["x", "y"], "params": {"a": 1, "b": 1}, "sampling": {"box": [[0, 1], [0, 1]]}, "checks": ["schouten_parallel"]},
    ],
)
def test_verify_input_errors(runner, tmp_path, data):
    result = runner.invoke(main, ["verify", write(tmp_path, data)])
    assert result.exit_code == 2
    assert "error:" in result.output


def test_verify_missing_file(runner, tmp_path):
    assert runner.invoke(main, ["verify", str(tmp_path / "none.json")]).exit_code == 2


def test_verify_real_params_flag(runner, tmp_path):
    data = {
        "coords": ["x", "y"],
        "params": {"a": 1.5, "b": 1},
        "fields": {"F": [["1", "0"], ["0", "-1"]]},
        "sampling": {"box": [[0, 1], [0, 1]], "count": 3},
        "checks": ["metallic"],
    }
    path = write(tmp_path, data)
    assert runner.invoke(main, ["verify", path]).exit_code == 2
    assert runner.invoke(main, ["verify", path, "--allow-real-params"]).exit_code == 0


def test_family_command(runner):
    result = runner.invoke(main, ["family", "--a", "2", "--b", "1", "--r", "0", "--s", "1"])
    assert result.exit_code == 0
    assert "[ 0,  1]" in result.output and "[ 1,  2]" in result.output
    assert "residual" in result.output


def test_family_variants(runner):
    result = runner.invoke(main, ["family", "--a", "1", "--b", "1", "--s", "0", "--variant", "diagonal", "--r", "1.6180339887498949"])
    assert result.exit_code == 0, result.output
    result = runner.invoke(main, ["family", "--a", "1", "--b", "1", "--s", "0"])
    assert result.exit_code == 2
    assert "triangular" in result.output
    result = runner.invoke(main, ["family", "--a", "1", "--b", "1", "--variant", "generic-s-t", "--t", "2", "--s", "3"])
    assert result.exit_code == 0


def test_version(runner):
    result = runner.invoke(main, ["--version"])
    assert result.exit_code == 0 and "metalgeom" in result.output
