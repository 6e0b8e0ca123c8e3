"""Tests for the command-line interface."""

import json

import numpy as np
from click.testing import CliRunner

from slicefourier import __version__
from slicefourier.cli import main


def _run(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def test_version():
    result = _run("--version")
    assert result.exit_code == 0
    assert __version__ in result.output


def test_moments_csv(configs_dir):
    result = _run("moments", "--config", configs_dir / "cantor.json", "--nmax", 3, "-q")
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[0] == "n,re,im,error"
    assert len(lines) == 1 + 7


def test_progress_goes_to_stderr(configs_dir):
    result = _run("moments", "--config", configs_dir / "cantor.json", "--nmax", 1)
    assert result.exit_code == 0
    assert "[1/2] Loading cantor.json" in result.output


def test_aux_needs_one_dimension(configs_dir):
    result = _run("aux", "--config", configs_dir / "cantor2.json", "-q")
    assert result.exit_code == 2
    assert '"error": "validation"' in result.output


def test_aux_json_file(configs_dir, tmp_path):
    out = tmp_path / "aux.json"
    result = _run("aux", "--config", configs_dir / "half_atomic.json", "--nmax", 4, "--out", out, "-q")
    assert result.exit_code == 0
    data = json.loads(out.read_text())
    assert data["order"] == 4
    assert len(data["matrix"]) == 5
    assert data["consistency_residual"] <= 1e-12
    # half_atomic has b(w) = w²
    assert data["inner_function"]["order"] == 4
    coefficients = np.array(data["inner_function"]["coefficients"])
    assert np.allclose(coefficients[:, 0], [0, 0, 1, 0, 0], atol=1e-12)
    assert np.allclose(coefficients[:, 1], 0, atol=1e-12)


def test_classify_json(configs_dir):
    result = _run("classify", "--config", configs_dir / "menger.json", "-q")
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data["overall"] is True
    assert len(data["coordinates"]) == 3
    assert data["warnings"] == []


def test_expand_json(configs_dir):
    result = _run("expand", "--config", configs_dir / "cantor2.json", "--orders", 2, "-q")
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data["orders"] == [2, 2]
    assert data["quadrature"]["mode"] == "exact"
    re, im = data["values"][0][0]
    assert abs(re - 1) < 1e-12 and abs(im) < 1e-12


def test_expand_csv_file(configs_dir, tmp_path):
    out = tmp_path / "coefficients.csv"
    result = _run(
        "expand", "--config", configs_dir / "symmetric2.json",
        "--orders", "2,3", "--quad", "prefix:6", "--out", out, "-q",
    )
    assert result.exit_code == 0
    assert result.output == ""
    lines = out.read_text().splitlines()
    assert lines[0] == "n1,n2,re,im"
    assert len(lines) == 1 + 3 * 4


def test_expand_rejects_lebesgue(configs_dir):
    result = _run("expand", "--config", configs_dir / "lebesgue2.json", "-q")
    assert result.exit_code == 2
    assert "unsupported-measure" in result.output


def test_bad_quadrature_spec(configs_dir):
    result = _run("expand", "--config", configs_dir / "cantor2.json", "--quad", "prefix:x", "-q")
    assert result.exit_code == 2
    assert '"error": "config"' in result.output


def test_quadrature_budget_exit_code(configs_dir):
    result = _run(
        "expand", "--config", configs_dir / "symmetric2.json",
        "--orders", 2, "--quad", "prefix:22", "-q",
    )
    assert result.exit_code == 3
    assert "quadrature-budget-exceeded" in result.output


def test_reconstruct_four_point_product(configs_dir):
    f = '{"frequencies": [[1, 1]], "coefficients": [[1, 0]]}'
    result = _run("reconstruct", "--config", configs_dir / "half_atomic2.json", "--f", f, "--orders", 2, "-q")
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[0] == "N1,N2,error"
    assert len(lines) == 1 + 5
    assert float(lines[-1].split(",")[-1]) <= 1e-12


def test_nct_grid(configs_dir):
    result = _run(
        "nct", "--config", configs_dir / "cantor2.json",
        "--orders", 4, "--grid", "0.5,4", "-q",
    )
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[0] == "re_z1,im_z1,re_z2,im_z2,re,im"
    assert len(lines) == 1 + 16


def test_verify_classify_suite(configs_dir, tmp_path):
    out = tmp_path / "report.json"
    result = _run("verify", "--config", configs_dir / "cantor.json", "--suite", "classify", "--out", out)
    assert result.exit_code == 0
    assert "All checks passed" in result.output
    data = json.loads(out.read_text())
    assert data["passed"] is True
    assert data["suites"][0]["suite"] == "classify"


def test_verify_bytes_do_not_depend_on_workers(configs_dir, tmp_path):
    # prefix:12 on symmetric2 spans two worker chunks
    reports = []
    for workers in (1, 4, 8):
        out = tmp_path / f"workers-{workers}.json"
        result = _run(
            "verify", "--config", configs_dir / "symmetric2.json", "--suite", "expansion",
            "--quad", "prefix:12", "--workers", workers, "--out", out, "-q",
        )
        assert result.exit_code == 0
        reports.append(out.read_bytes())
    assert reports[0] == reports[1] == reports[2]
    checks = {c["name"]: c for c in json.loads(reports[0])["suites"][0]["checks"]}
    assert checks["worker_determinism"]["passed"] is True


def test_missing_config_file(tmp_path):
    result = _run("classify", "--config", tmp_path / "absent.json")
    assert result.exit_code == 2


def test_invalid_config_file(tmp_path):
    path = tmp_path / "spiral.json"
    path.write_text('{"kind": "spiral"}')
    result = _run("classify", "--config", path, "-q")
    assert result.exit_code == 2
    assert '"error": "config"' in result.output
