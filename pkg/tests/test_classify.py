"""Tests for the slice-singularity classifier."""

import numpy as np
import pytest

from slicefourier.classify import LEBESGUE, SINGULAR, classify, slice_singularity_gate
from slicefourier.errors import PrecisionWarning, UnsupportedMeasureError
from slicefourier.measures import DigitIFS, ProductMeasure, cantor, half_atomic, lebesgue


def test_cantor_is_singular():
    report = classify(cantor())
    assert report.overall
    record = report.coordinates[0]
    assert record.verdict == SINGULAR
    assert not record.full
    assert record.digits == (0, 2)


def test_lebesgue_coordinates(lebesgue2):
    report = classify(lebesgue2)
    assert not report.overall
    assert [r.verdict for r in report.coordinates] == [LEBESGUE, LEBESGUE]


def test_menger_has_full_but_nonuniform_rows(menger_measure):
    report = classify(menger_measure)
    assert report.overall
    for record in report.coordinates:
        assert record.full
        assert record.weights == pytest.approx((0.4, 0.2, 0.4))


def test_carpet_is_slice_singular(carpet):
    assert classify(carpet).overall


def test_one_lebesgue_coordinate_fails_the_gate():
    # x uniform in base 2, y confined to digit 0
    m = DigitIFS(2, 2, [[0, 0], [1, 0]], [0.5, 0.5])
    report = classify(m)
    assert [r.verdict for r in report.coordinates] == [LEBESGUE, SINGULAR]
    assert not report.overall
    assert not slice_singularity_gate(m)


def test_near_miss_warns():
    m = DigitIFS(2, 1, [[0], [1]], [0.5 + 5e-10, 0.5 - 5e-10])
    with pytest.warns(PrecisionWarning):
        report = classify(m)
    assert report.coordinates[0].verdict == SINGULAR
    assert report.coordinates[0].near_miss


def test_gate_for_other_kinds(cantor2):
    assert slice_singularity_gate(half_atomic())
    assert slice_singularity_gate(cantor2)
    assert not slice_singularity_gate(ProductMeasure((cantor(), lebesgue())))
    with pytest.raises(UnsupportedMeasureError):
        slice_singularity_gate("cantor")


def test_classify_needs_digit_system():
    with pytest.raises(UnsupportedMeasureError):
        classify(half_atomic())


def test_report_serialization(symmetric2):
    report = classify(symmetric2)
    data = report.to_dict()
    assert data["name"] == "symmetric2"
    assert data["base"] == 3
    assert data["coordinates"][1]["digits"] == [0, 2]
    assert report.to_table().endswith("slice singular in any variable order: True")


@pytest.mark.parametrize("name", ["menger_measure", "carpet", "lebesgue2"])
def test_digit_order_does_not_matter(request, name):
    m = request.getfixturevalue(name)
    order = np.random.default_rng(5).permutation(len(m.digits))
    shuffled = DigitIFS(m.base, m.dim, m.digits[order], m.weights[order])
    before, after = classify(m), classify(shuffled)
    assert after.overall == before.overall
    for a, b in zip(after.coordinates, before.coordinates):
        assert (a.verdict, a.digits, a.full) == (b.verdict, b.digits, b.full)
        assert a.weights == pytest.approx(b.weights, abs=1e-15)
