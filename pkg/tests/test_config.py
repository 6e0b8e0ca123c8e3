"""Tests for measure configs, f-specs and run settings."""

import json

import numpy as np
import pytest

from slicefourier.config import (
    RunConfig,
    load_measure,
    measure_from_dict,
    parse_f_spec,
    parse_grid,
    parse_orders,
)
from slicefourier.errors import ConfigError, UnsupportedMeasureError, ValidationError
from slicefourier.measures import AtomicMeasure, DigitIFS, ProductMeasure, is_swap_symmetric, menger


@pytest.mark.parametrize(
    "name, kind, dim",
    [
        ("cantor", DigitIFS, 1),
        ("cantor2", ProductMeasure, 2),
        ("carpet", DigitIFS, 2),
        ("menger", DigitIFS, 3),
        ("lebesgue2", DigitIFS, 2),
        ("symmetric2", DigitIFS, 2),
        ("half_atomic", AtomicMeasure, 1),
        ("half_atomic2", ProductMeasure, 2),
        ("delta0", AtomicMeasure, 1),
    ],
)
def test_bundled_configs_load(configs_dir, name, kind, dim):
    m = load_measure(configs_dir / f"{name}.json")
    assert isinstance(m, kind)
    assert m.dim == dim
    assert m.name == name


def test_menger_config_matches_builder(configs_dir):
    m = load_measure(configs_dir / "menger.json")
    assert np.array_equal(m.digits, menger().digits)
    assert np.allclose(m.weights, 1 / 20)


def test_symmetric_config_is_symmetric(configs_dir):
    assert is_swap_symmetric(load_measure(configs_dir / "symmetric2.json"))


def test_fraction_weights():
    m = measure_from_dict({"kind": "digit_ifs", "base": 3, "digits": [0, 2], "weights": ["1/3", "2/3"]})
    assert np.allclose(m.weights, [1 / 3, 2 / 3])


def test_yaml_spelling(tmp_path):
    path = tmp_path / "cantor.yaml"
    path.write_text("kind: digit_ifs\nbase: 3\ndigits: [0, 2]\nweights: [0.5, 0.5]\n")
    assert load_measure(path).base == 3


class TestErrors:
    def test_density_is_unsupported(self):
        with pytest.raises(UnsupportedMeasureError):
            measure_from_dict({"kind": "density", "density": "1+cos"})

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            measure_from_dict({"kind": "spiral"})

    def test_missing_key(self):
        with pytest.raises(ConfigError, match="weights"):
            measure_from_dict({"kind": "digit_ifs", "base": 3, "digits": [0, 2]})

    def test_bad_number(self):
        with pytest.raises(ConfigError):
            measure_from_dict({"kind": "atomic", "points": [0], "weights": ["half"]})

    def test_atomic_dim_mismatch(self):
        with pytest.raises(ConfigError):
            measure_from_dict({"kind": "atomic", "dim": 2, "points": [0.5], "weights": [1]})

    def test_digit_dim_mismatch(self):
        # two 2-vectors must not be read as one 4-dim digit
        config = {"kind": "digit_ifs", "base": 3, "dim": 4, "digits": [[0, 2], [2, 0]], "weights": [1]}
        with pytest.raises(ConfigError, match="dim 4"):
            measure_from_dict(config)
        with pytest.raises(ConfigError):
            measure_from_dict({"kind": "digit_ifs", "base": 3, "digits": [[0, 2], [2]], "weights": [0.5, 0.5]})
        with pytest.raises(ValidationError):
            DigitIFS(3, 4, [[0, 2], [2, 0]], [1.0])

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            measure_from_dict({"kind": "atomic", "points": [0, 0.5], "weights": [0.5, 0.6]})

    def test_invalid_yaml(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("kind: [unclosed\n")
        with pytest.raises(ConfigError):
            load_measure(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_measure(tmp_path / "absent.json")


class TestFSpec:
    def test_default_is_constant(self):
        f = parse_f_spec(None, 2)
        assert f.coefficient((0, 0)) == 1
        assert len(f) == 1

    def test_inline_json(self):
        spec = json.dumps({"frequencies": [[1, 1], [0, -2]], "coefficients": [[1, 0], [0, 2]]})
        f = parse_f_spec(spec, 2)
        assert f.coefficient((1, 1)) == 1
        assert f.coefficient((0, -2)) == 2j

    def test_file(self, tmp_path):
        path = tmp_path / "f.json"
        path.write_text(json.dumps({"frequencies": [3], "coefficients": ["1/2"]}))
        assert parse_f_spec(str(path), 1).coefficient(3) == 0.5

    def test_rejects_wrong_dimension(self):
        with pytest.raises(ConfigError):
            parse_f_spec('{"frequencies": [[1, 1]], "coefficients": [1]}', 1)

    def test_rejects_fractional_frequency(self):
        with pytest.raises(ConfigError):
            parse_f_spec('{"frequencies": [0.5], "coefficients": [1]}', 1)


class TestArguments:
    def test_orders(self):
        assert parse_orders("8", 2) == (8, 8)
        assert parse_orders("4,6", 2) == (4, 6)
        assert parse_orders(None, 3, default=5) == (5, 5, 5)
        with pytest.raises(ConfigError):
            parse_orders("1,2,3", 2)
        with pytest.raises(ConfigError):
            parse_orders("a,b", 2)

    def test_grid(self):
        assert parse_grid("0.9,16", 2) == (0.9, (16, 16))
        assert parse_grid("0.5,4,8", 2) == (0.5, (4, 8))
        with pytest.raises(ConfigError):
            parse_grid("1.5,4", 1)

    def test_run_config(self, configs_dir):
        run = RunConfig(config=configs_dir / "cantor.json", command="moments")
        assert run.nmax == 16
        assert run.quadrature.depth == 12
        with pytest.raises(ConfigError):
            RunConfig(config=configs_dir / "cantor.json", command="expand", workers=0)
        with pytest.raises(ConfigError):
            RunConfig(config=configs_dir / "cantor.json", command="expand", orders=(2, -1))
