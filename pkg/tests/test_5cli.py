"""
Tests the command line tool.
"""
import json

import numpy as np
import pytest
from click.testing import CliRunner

from banachsvd import DenseOperator, NormSpec
from banachsvd.cli import cli
from banachsvd.serialization import dump_operator, dumps


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def write(path, document) -> str:
    path.write_text(dumps(document) if not isinstance(document, str) else document,
                    encoding="utf-8")
    return str(path)


@pytest.fixture
def diag31_file(tmp_path, diag31) -> str:
    return write(tmp_path / "diag31.json", dump_operator(diag31))


def test_decompose(runner, diag31_file):
    result = runner.invoke(cli, ["decompose", diag31_file, "--restarts", "2"])
    assert result.exit_code == 0, result.output
    document = json.loads(result.stdout)
    assert document["kind"] == "deflation"
    assert [step["norm"] for step in document["steps"]] == pytest.approx([3, 1])
    assert document["config"]["restarts"] == 2


def test_decompose_eigen(runner, tmp_path):
    space = NormSpec.mixed_k1(1, 3)
    path = write(tmp_path / "op.json",
                 dump_operator(DenseOperator(np.diag([0.2, -0.9, 0.5]), space, space)))
    result = runner.invoke(cli, ["decompose", path, "--eigen"])
    assert result.exit_code == 0, result.output
    document = json.loads(result.stdout)
    assert document["kind"] == "eigen"
    assert [step["lambda"] for step in document["steps"]] == pytest.approx([-0.9, 0.5, 0.2])


def test_malformed_input(runner, tmp_path):
    result = runner.invoke(cli, ["decompose", write(tmp_path / "bad.json", "{not json")])
    assert result.exit_code == 2

    bad_norm = {"rows": 1, "cols": 1, "data": [1], "source": {"kind": "lp", "p": 0.5, "d": 1},
                "target": {"kind": "lp", "p": 2, "d": 1}}
    result = runner.invoke(cli, ["decompose", write(tmp_path / "norm.json", bad_norm)])
    assert result.exit_code == 2

    short = {"rows": 2, "cols": 2, "data": [1, 2, 3], "source": {"kind": "lp", "p": 2, "d": 2},
             "target": {"kind": "lp", "p": 2, "d": 2}}
    result = runner.invoke(cli, ["decompose", write(tmp_path / "short.json", short)])
    assert result.exit_code == 2


def test_bad_config(runner, tmp_path, diag31_file):
    config = write(tmp_path / "config.json", {"restarts": 2, "unknown": 1})
    result = runner.invoke(cli, ["decompose", diag31_file, "--config", config])
    assert result.exit_code == 2

    result = runner.invoke(cli, ["decompose", diag31_file, "--tol", "-1"])
    assert result.exit_code == 2


@pytest.mark.parametrize("values", [{"tol": "abc"}, {"restarts": "many"}, {"seed": [1, 2]}])
def test_config_of_the_wrong_type(runner, tmp_path, diag31_file, values):
    config = write(tmp_path / "config.json", values)
    result = runner.invoke(cli, ["decompose", diag31_file, "--config", config])
    assert result.exit_code == 2
    assert "Invalid input" in result.stderr


def test_non_finite_entries(runner, tmp_path):
    document = ('{"rows": 1, "cols": 1, "data": [NaN], "source": {"kind": "lp", "p": 2, "d": 1},'
                ' "target": {"kind": "lp", "p": 2, "d": 1}}')
    result = runner.invoke(cli, ["decompose", write(tmp_path / "nan.json", document)])
    assert result.exit_code == 2


def test_errors_inside_a_computation(runner, diag31_file, monkeypatch):
    def broken(*args, **kwargs):
        raise ValueError("array must not contain infs or NaNs")

    monkeypatch.setattr("banachsvd.deflation.construction.run_deflation", broken)
    result = runner.invoke(cli, ["decompose", diag31_file])
    assert result.exit_code == 3
    assert "Numerical failure" in result.stderr


def test_zero_operator_is_a_numerical_failure(runner, tmp_path):
    space = NormSpec.lp(2, 2)
    path = write(tmp_path / "zero.json",
                 dump_operator(DenseOperator(np.zeros((2, 2)), space, space)))
    assert runner.invoke(cli, ["decompose", path]).exit_code == 3


def test_verify(runner, tmp_path, diag31_file):
    decomposed = runner.invoke(cli, ["decompose", diag31_file])
    path = write(tmp_path / "D.json", decomposed.stdout)

    result = runner.invoke(cli, ["verify", path, diag31_file])
    assert result.exit_code == 0, result.output
    assert json.loads(result.stdout)["passed"]

    document = json.loads(decomposed.stdout)
    document["xi"][0] = [1.0, 0.3]
    broken = write(tmp_path / "broken.json", document)
    result = runner.invoke(cli, ["verify", broken, diag31_file])
    assert result.exit_code == 1
    report = json.loads(result.stdout)
    assert not report["passed"]
    failed = {p["name"] for p in report["properties"] if not p["passed"]}
    assert "biorthogonality" in failed

    space = NormSpec.lp(2, 3)
    other = write(tmp_path / "other.json",
                  dump_operator(DenseOperator(np.eye(3), space, space)))
    assert runner.invoke(cli, ["verify", path, other]).exit_code == 2


def test_example(runner):
    result = runner.invoke(cli, ["example", "--d", "4", "--k", "1", "--alpha", ".1,.4,.2,.3"])
    assert result.exit_code == 0, result.output
    document = json.loads(result.stdout)
    assert document["ground_truth"]["order"] == [2, 4, 3, 1]
    assert document["verification"]["passed"]

    steps = document["decomposition"]["steps"]
    assert [step["lambda"] for step in steps] == pytest.approx([0.4, 0.3, 0.2, 0.1])
    order = [int(np.argmax(np.abs(step["x"]))) + 1 for step in steps]
    assert order == [2, 4, 3, 1]


def test_example_with_a_kernel(runner):
    result = runner.invoke(cli, ["example", "--d", "4", "--k", "1", "--alpha", "0.5,0,0.25,0.8"])
    assert result.exit_code == 0, result.output
    document = json.loads(result.stdout)
    assert document["ground_truth"]["order"] == [4, 1, 3]
    assert document["verification"]["passed"]

    decomposition = document["decomposition"]
    assert len(decomposition["steps"]) == 3
    kernel = np.array(decomposition["kernel_basis"]["data"]).reshape(
        decomposition["kernel_basis"]["rows"], decomposition["kernel_basis"]["cols"])
    assert kernel.shape == (4, 1)
    assert np.allclose(np.abs(kernel[:, 0]) / np.abs(kernel[:, 0]).max(), [0, 1, 0, 0],
                       atol=1e-7)


def test_example_random_alpha(runner):
    result = runner.invoke(cli, ["example", "--d", "3", "--k", "2", "--seed", "9"])
    assert result.exit_code == 0, result.output
    document = json.loads(result.stdout)
    magnitudes = sorted(abs(a) for a in document["alpha"])
    assert magnitudes == pytest.approx([1 / 3, 2 / 3, 1])


@pytest.mark.parametrize("args", [
    ["--d", "4", "--k", "4"],
    ["--d", "1"],
    ["--d", "3", "--alpha", "1,2"],
    ["--alpha", "1,x,2,3"],
])
def test_example_bad_arguments(runner, args):
    assert runner.invoke(cli, ["example"] + args).exit_code == 2


def test_norm(runner, tmp_path):
    A = [[1.0, -2.0], [0.5, 3.0]]
    T = DenseOperator(A, NormSpec.lp(1, 2), NormSpec.lp(2, 2))
    path = write(tmp_path / "T.json", dump_operator(T))
    result = runner.invoke(cli, ["norm", path, "--oracle"])
    assert result.exit_code == 0, result.output
    document = json.loads(result.stdout)
    expected = np.linalg.norm([-2.0, 3.0])
    assert document["value"] == pytest.approx(expected)
    assert document["oracle"] == pytest.approx(expected)
    assert document["maximizer"] == pytest.approx([0, 1])


def test_norm_without_oracle(runner, tmp_path):
    space = NormSpec.lp(3, 4)
    matrix = np.eye(4) + np.diag([1.0, 1.0, 1.0], 1)
    path = write(tmp_path / "T.json", dump_operator(DenseOperator(matrix, space, space)))
    result = runner.invoke(cli, ["norm", path, "--oracle"])
    assert result.exit_code == 0, result.output
    assert json.loads(result.stdout)["oracle"] is None


def test_output_is_deterministic(runner, tmp_path):
    rng = np.random.default_rng(1)
    T = DenseOperator(rng.standard_normal((3, 3)), NormSpec.lp(3, 3), NormSpec.lp(1.5, 3))
    path = write(tmp_path / "T.json", dump_operator(T))
    first = runner.invoke(cli, ["decompose", path, "--seed", "4", "--restarts", "2"])
    second = runner.invoke(cli, ["decompose", path, "--seed", "4", "--restarts", "2"])
    assert first.exit_code == 0, first.output
    assert first.stdout == second.stdout
