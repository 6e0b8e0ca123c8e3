"""Tests for the auxiliary recursion and the Kaczmarz diagnostics."""

import numpy as np
import pytest

from slicefourier.errors import DimensionTooSmallError, MissingMomentError, ValidationError
from slicefourier.kaczmarz import (
    aux_coefficients,
    aux_matrix,
    forward_substitute,
    kaczmarz_iterates,
    operator_kaczmarz_report,
    parseval_defect,
    slice_aux,
    table_for,
)
from slicefourier.measures import cantor, dirac, lebesgue, moment_table, slice_law, trig_inner
from slicefourier.transforms import inner_function
from slicefourier.trigpoly import TrigPoly


def test_toeplitz_consistency_at_order_64():
    aux = aux_matrix(moment_table(cantor(), nmax=64), 64)
    assert aux.order == 65
    assert aux.consistency_residual() <= 1e-10


def test_matrix_is_unit_lower_triangular():
    a = aux_matrix(moment_table(cantor(), nmax=8), 8).matrix
    assert np.allclose(np.diag(a), 1.0)
    assert not np.triu(a, k=1).any()


def test_lebesgue_sequence_is_the_exponentials():
    a = aux_matrix(moment_table(lebesgue(), nmax=8), 8).matrix
    assert np.allclose(a, np.eye(9), atol=1e-12)


def test_dirac_sequence_is_differences():
    # g_n = e_n - e_{n-1} when every moment is 1
    a = aux_matrix(moment_table(dirac(), nmax=5), 5).matrix
    expected = np.eye(6) - np.eye(6, k=-1)
    assert np.allclose(a, expected)


def test_forward_substitute_batches():
    tables = [moment_table(m, nmax=4) for m in (cantor(), dirac())]
    batch = forward_substitute(np.stack([t.sequence(4) for t in tables]), 4)
    assert batch.shape == (2, 5, 5)
    assert np.allclose(batch[1], aux_matrix(tables[1], 4).matrix)


def test_missing_moment():
    with pytest.raises(MissingMomentError):
        aux_matrix(moment_table(cantor(), nmax=2), 4)


def test_row_norms_at_most_one():
    aux = aux_matrix(moment_table(cantor(), nmax=16), 16)
    norms = aux.row_norms()
    assert norms[0] == pytest.approx(1.0)
    assert norms.max() <= 1 + 1e-10


def test_row_returns_polynomial():
    aux = aux_matrix(moment_table(dirac(), nmax=3), 3)
    g2 = aux.row(2)
    assert g2.coefficient(2) == 1
    assert g2.coefficient(1) == -1


def test_to_dict_carries_checks():
    aux = aux_matrix(moment_table(dirac(), nmax=3), 3)
    data = aux.to_dict()
    assert data["order"] == 3
    assert data["matrix"].shape == (4, 4)
    assert data["consistency_residual"] <= 1e-12
    assert np.allclose(data["row_norms"], [1, 0, 0, 0], atol=1e-12)


class TestCoefficients:
    f = TrigPoly.from_mapping(1, {1: 1.0, -2: 0.5j, 3: -0.25})

    def test_constant_function(self):
        one = TrigPoly.constant(1)
        c = aux_coefficients(table_for(cantor(), one, 12), one, 12)
        expected = np.zeros(13)
        expected[0] = 1.0
        assert np.allclose(c, expected, atol=1e-12)

    def test_row_action_iterates_match(self):
        table = table_for(cantor(), self.f, 20)
        iterates = kaczmarz_iterates(table, self.f, 20)
        coeffs = aux_coefficients(table, self.f, 20)
        assert np.abs(iterates[-1] - coeffs).max() <= 1e-10
        # earlier iterates agree on the coefficients they have fixed
        assert np.allclose(iterates[5][:6], coeffs[:6])
        assert not iterates[5][6:].any()

    def test_bessel_and_monotone_partial_sums(self):
        table = table_for(cantor(), self.f, 32)
        defect = parseval_defect(table, self.f, 32)
        assert np.all(np.diff(defect.partial_sums) >= -1e-12)
        assert defect.partial_sums[-1] <= defect.norm_squared * (1 + 1e-8)
        assert defect.defect >= -1e-8

    def test_one_dimensional_only(self):
        with pytest.raises(ValueError):
            aux_coefficients(moment_table(cantor(), nmax=2), TrigPoly.constant(2), 2)


def test_slice_aux_of_digit_slice(symmetric2):
    law = slice_law(symmetric2, [[0], [2]])
    aux = slice_aux(law, 6)
    assert aux.consistency_residual() <= 1e-10


class TestOperatorReport:
    def test_product_identity(self, cantor2):
        report = operator_kaczmarz_report(cantor2, 16)
        assert report.slice_count == 1
        assert report.residual <= 1e-10

    def test_sampled_slices(self, symmetric2):
        report = operator_kaczmarz_report(symmetric2, 12, prefixes=6, seed=3)
        assert report.slice_count == 6
        assert report.residual <= 1e-10
        assert report.to_dict()["order"] == 13

    def test_atomic_slices(self, atoms2):
        report = operator_kaczmarz_report(atoms2, 4)
        assert report.slice_count == 2

    def test_isometry_defect_is_inner_function_truncation(self, cantor2):
        n = 16
        report = operator_kaczmarz_report(cantor2, n)
        kept = n - (report.test_size - 1)
        b = inner_function(cantor(), kept).coefficients
        assert report.isometry_defect == pytest.approx(1 - np.sum(np.abs(b) ** 2), abs=1e-9)
        assert 0 < report.tail_estimate <= report.isometry_defect + 1e-12
        assert report.to_dict()["tail_estimate"] == report.tail_estimate

    def test_isometry_defect_shrinks_with_order(self, cantor2):
        short = operator_kaczmarz_report(cantor2, 16)
        long = operator_kaczmarz_report(cantor2, 64)
        assert long.isometry_defect < short.isometry_defect

    def test_lebesgue_slices_are_not_isometric(self, lebesgue2):
        report = operator_kaczmarz_report(lebesgue2, 4, prefixes=4)
        assert report.residual <= 1e-10
        assert report.isometry_defect == pytest.approx(1.0, abs=1e-12)
        assert report.tail_estimate <= 1e-12

    def test_four_point_product_is_isometric(self, half_atomic2):
        report = operator_kaczmarz_report(half_atomic2, 16)
        assert report.residual <= 1e-12
        assert report.isometry_defect <= 1e-12
        assert report.tail_estimate <= 1e-12

    def test_needs_two_dimensions(self):
        with pytest.raises(DimensionTooSmallError):
            operator_kaczmarz_report(cantor(), 8)

    def test_order_limit(self, cantor2):
        with pytest.raises(ValidationError):
            operator_kaczmarz_report(cantor2, 65)


def test_norm_matches_inner_product():
    f = TrigPoly.exponential(2)
    defect = parseval_defect(table_for(cantor(), f, 4), f, 4)
    assert defect.norm_squared == pytest.approx(trig_inner(cantor(), f, f)[0].real)
