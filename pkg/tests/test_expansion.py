"""Tests for slice expansions: coefficients, synthesis and reconstruction sweeps."""

import numpy as np
import pytest

from slicefourier.errors import UnsupportedMeasureError, ValidationError
from slicefourier.expansion import (
    CoeffTensor,
    analyze,
    analyze_staged,
    reconstruction_error,
    sweep_orders,
    synthesize,
)
from slicefourier.measures import cantor, l2_norm
from slicefourier.quadrature import EXACT, MONTE_CARLO, PREFIX_EXACT, QuadratureSpec
from slicefourier.trigpoly import TrigPoly
from slicefourier.verify import random_trigpolys

Q8 = QuadratureSpec(depth=8)


def _delta(shape):
    expected = np.zeros(shape, dtype=complex)
    expected[(0,) * len(shape)] = 1.0
    return expected


def _sample_f(dim):
    if dim == 2:
        return TrigPoly.from_mapping(2, {(1, 0): 1.0, (0, 2): 0.5 - 0.5j, (-1, 1): 0.25})
    return TrigPoly.from_mapping(3, {(1, 0, 0): 1.0, (0, 1, -1): 0.5j, (1, 1, 1): -0.25})


@pytest.mark.parametrize("name", ["cantor2", "symmetric2", "carpet", "half_atomic2", "atoms2"])
def test_constant_function_has_one_coefficient(request, name):
    m = request.getfixturevalue(name)
    c = analyze(m, TrigPoly.constant(2), (4, 4), Q8)
    assert np.abs(c.values - _delta((5, 5))).max() <= 1e-9


def test_one_dimensional_exact():
    c = analyze(cantor(), TrigPoly.constant(1), (6,))
    assert c.quadrature["mode"] == EXACT
    assert np.allclose(c.values, _delta((7,)), atol=1e-12)


def test_gate_rejects_lebesgue(lebesgue2):
    with pytest.raises(UnsupportedMeasureError):
        analyze(lebesgue2, TrigPoly.constant(2), (2, 2))


def test_lebesgue_gives_ordinary_fourier_coefficients(lebesgue2):
    f = TrigPoly.from_mapping(2, {(1, 2): 1.0, (0, 1): 2.0})
    c = analyze(lebesgue2, f, (3, 3), Q8, require_slice_singular=False)
    assert c.values[1, 2] == pytest.approx(1.0)
    assert c.values[0, 1] == pytest.approx(2.0)
    assert c.energy() == pytest.approx(5.0)
    assert c.quadrature["error_estimate"] == 0.0


def test_four_point_product_is_exact(half_atomic2):
    report = reconstruction_error(half_atomic2, TrigPoly.exponential((1, 1)), (4, 4))
    assert report.error <= 1e-12
    assert report.coefficients.values[1, 1] == pytest.approx(1.0)


def test_linearity(symmetric2):
    f = _sample_f(2)
    g = TrigPoly.exponential((2, 1), 1j)
    cf = analyze(symmetric2, f, (4, 4), Q8)
    cg = analyze(symmetric2, g, (4, 4), Q8)
    combined = analyze(symmetric2, f * 2.0 + g * (0.5 - 1j), (4, 4), Q8)
    assert np.abs(combined.values - (2.0 * cf.values + (0.5 - 1j) * cg.values)).max() <= 1e-10


@pytest.mark.parametrize("name", ["cantor2", "symmetric2", "carpet"])
def test_bessel(request, name):
    m = request.getfixturevalue(name)
    c = analyze(m, _sample_f(2), (6, 6))
    slack = c.quadrature["error_estimate"]
    assert c.energy() <= c.norm_squared * (1 + 1e-8) + slack
    assert c.bessel_defect() >= -slack - 1e-8


@pytest.mark.parametrize("name", ["cantor2", "symmetric2", "carpet", "atoms2"])
def test_staged_matches_direct(request, name):
    m = request.getfixturevalue(name)
    f = _sample_f(2)
    direct = analyze(m, f, (5, 4), Q8)
    staged = analyze_staged(m, f, (5, 4), Q8)
    assert np.abs(direct.values - staged.values).max() <= 1e-9


def test_menger_staged_matches_direct(menger_measure):
    q = QuadratureSpec(depth=10)
    f = _sample_f(3)
    direct = analyze(menger_measure, f, (6, 6, 6), q)
    staged = analyze_staged(menger_measure, f, (6, 6, 6), q)
    assert direct.values.shape == (7, 7, 7)
    assert np.abs(direct.values - staged.values).max() <= 1e-6


def test_workers_do_not_change_results(symmetric2):
    f = _sample_f(2)
    q = QuadratureSpec(depth=12)
    single = analyze(symmetric2, f, (4, 4), q)
    threaded = analyze(symmetric2, f, (4, 4), q, workers=4)
    assert np.array_equal(single.values, threaded.values)


def test_prefix_metadata(symmetric2):
    c = analyze(symmetric2, _sample_f(2), (3, 3), Q8)
    assert c.quadrature["mode"] == PREFIX_EXACT
    assert c.quadrature["groups"] == 2**8
    assert c.quadrature["depth"] == 8
    assert c.quadrature["error_estimate"] > 0


class TestMonteCarlo:
    def test_close_to_exact(self, symmetric2):
        q = QuadratureSpec(MONTE_CARLO, depth=8, samples=20000, seed=1)
        c = analyze(symmetric2, TrigPoly.constant(2), (2, 2), q)
        assert c.quadrature["mode"] == MONTE_CARLO
        assert c.quadrature["samples"] == 20000
        stderr = c.quadrature["error_estimate"]
        assert np.abs(c.values - _delta((3, 3))).max() <= 6 * stderr + 1e-12

    def test_deterministic_across_workers(self, symmetric2):
        q = QuadratureSpec(MONTE_CARLO, depth=6, samples=9000, seed=5)
        f = _sample_f(2)
        single = analyze(symmetric2, f, (2, 2), q)
        threaded = analyze(symmetric2, f, (2, 2), q, workers=3)
        assert np.array_equal(single.values, threaded.values)

    def test_products(self, cantor2):
        q = QuadratureSpec(MONTE_CARLO, depth=8, samples=4096, seed=2)
        c = analyze(cantor2, TrigPoly.constant(2), (2, 2), q)
        assert np.abs(c.values - _delta((3, 3))).max() <= 6 * c.quadrature["error_estimate"] + 1e-12


class TestCoeffTensor:
    def test_truncate_and_transpose(self, cantor2):
        c = analyze(cantor2, _sample_f(2), (4, 3))
        small = c.truncate((2, 1))
        assert small.values.shape == (3, 2)
        assert np.array_equal(small.values, c.values[:3, :2])
        flipped = c.transpose()
        assert flipped.orders == (3, 4)
        assert np.array_equal(flipped.values, c.values.T)
        with pytest.raises(ValidationError):
            c.truncate((5, 1))

    def test_synthesize_evaluates_partial_sum(self):
        values = np.array([[1.0, 2.0], [0.5j, 0.0]])
        c = CoeffTensor((1, 1), values)
        x = np.array([[0.25, 0.5]])
        expected = 1.0 + 2.0 * np.exp(2j * np.pi * 0.5) + 0.5j * np.exp(2j * np.pi * 0.25)
        assert synthesize(c, x)[0] == pytest.approx(expected)

    def test_zero_function(self, cantor2):
        c = analyze(cantor2, TrigPoly.zero(2), (2, 2))
        assert not c.values.any()
        assert c.norm_squared == 0.0

    def test_input_checks(self, cantor2):
        with pytest.raises(ValidationError):
            analyze(cantor2, TrigPoly.constant(1), (2, 2))
        with pytest.raises(ValidationError):
            analyze(cantor2, TrigPoly.constant(2), (2, 2, 2))
        with pytest.raises(ValidationError):
            analyze(cantor2, TrigPoly.constant(2), (2, -1))


class TestSweep:
    def test_sweep_orders(self):
        assert sweep_orders((2, 1)) == [(0, 0), (1, 0), (2, 0), (2, 1)]
        assert sweep_orders((0,)) == [(0,)]

    def test_one_dimensional_identity(self):
        m = cantor()
        f = TrigPoly.from_mapping(1, {1: 1.0, -2: 0.5})
        report = reconstruction_error(m, f, (10,))
        coeffs = report.coefficients.values
        remaining = report.coefficients.norm_squared - np.cumsum(np.abs(coeffs) ** 2)
        errors = np.array([e for _, e in report.rows])
        assert np.abs(errors**2 - remaining).max() <= 1e-9

    def test_first_leg_nonincreasing(self, cantor2, symmetric2):
        for m in (cantor2, symmetric2):
            report = reconstruction_error(m, TrigPoly.exponential((1, 1)), (6, 6), Q8)
            slack = 1e-9 + report.coefficients.quadrature["error_estimate"]
            first_leg = [e for orders, e in report.rows if orders[1] == 0]
            assert all(b <= a + slack for a, b in zip(first_leg, first_leg[1:]))
            assert report.error < report.rows[0][1]

    def test_outer_leg_is_not_monotone(self, cantor2):
        # with N_1 fixed short of the limit, raising N_2 can overshoot
        report = reconstruction_error(cantor2, TrigPoly.exponential((1, 1)), (8, 8))
        assert report.coefficients.quadrature["error_estimate"] == 0.0
        errors = [e for _, e in report.rows]
        second_leg = [e for orders, e in report.rows if orders[0] == 8]
        assert max(b - a for a, b in zip(second_leg, second_leg[1:])) > 1e-4
        assert max(errors[1:]) <= errors[0]
        assert report.error < errors[0]

    def test_rows_start_from_constant_term(self, cantor2):
        f = TrigPoly.exponential((1, 1))
        report = reconstruction_error(cantor2, f, (3, 3))
        assert len(report.rows) == 7
        assert report.rows[0][0] == (0, 0)
        assert report.rows[0][1] <= l2_norm(cantor2, f) + 1e-12
        assert report.to_dict()["rows"][-1]["orders"] == [3, 3]


@pytest.mark.parametrize("nu", [(0, 0), (1, 0), (0, 1), (1, 1)])
def test_four_point_product_basis_is_complete(half_atomic2, nu):
    # L²(μ) is spanned by e_ν, ν ∈ {0,1}², so orders (1, 1) already reconstruct
    report = reconstruction_error(half_atomic2, TrigPoly.exponential(nu), (1, 1))
    assert report.error <= 1e-12
    c = report.coefficients
    assert abs(c.energy() - c.norm_squared) <= 1e-12
    assert c.norm_squared == pytest.approx(1.0)


class TestBesselDefect:
    def test_shrinks_with_order_on_product(self, cantor2):
        basket = random_trigpolys(2, 10, seed=0)
        short = [analyze(cantor2, f, (4, 4)) for f in basket]
        long = [analyze(cantor2, f, (16, 16)) for f in basket]
        for a, b in zip(short, long):
            assert a.quadrature["error_estimate"] == b.quadrature["error_estimate"] == 0.0
            assert b.bessel_defect() <= a.bessel_defect() + 1e-12
            assert b.bessel_defect() >= -1e-9
        assert sum(b.bessel_defect() for b in long) < sum(a.bessel_defect() for a in short)

    def test_shrinks_with_order_on_cantor(self):
        basket = random_trigpolys(1, 10, seed=1)
        short = sum(analyze(cantor(), f, (8,)).bessel_defect() for f in basket)
        long = sum(analyze(cantor(), f, (32,)).bessel_defect() for f in basket)
        assert -1e-9 <= long < short
