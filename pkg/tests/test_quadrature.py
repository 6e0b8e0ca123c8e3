"""Tests for quadrature specs, slice classes and plans."""

import numpy as np
import pytest

from slicefourier.errors import ConfigError, QuadratureBudgetError, UnsupportedMeasureError
from slicefourier.quadrature import (
    CHUNK_GROUPS,
    MONTE_CARLO,
    PREFIX_EXACT,
    PrefixPlan,
    ProductPlan,
    QuadratureSpec,
    SliceChain,
    prefix_plan,
)
from slicefourier.measures import cantor, marginal


class TestQuadratureSpec:
    def test_parse_prefix(self):
        q = QuadratureSpec.parse("prefix:8", seed=3)
        assert q.mode == PREFIX_EXACT
        assert q.depth == 8
        assert q.seed == 3
        assert q.describe() == "prefix:8"

    def test_parse_monte_carlo(self):
        q = QuadratureSpec.parse("mc:5000")
        assert q.mode == MONTE_CARLO
        assert q.samples == 5000
        assert q.describe() == "mc:5000"

    @pytest.mark.parametrize("text", ["prefix", "prefix:x", "grid:4", "mc:0", "prefix:0"])
    def test_rejects_bad_specs(self, text):
        with pytest.raises(ConfigError):
            QuadratureSpec.parse(text)

    def test_negative_seed(self):
        with pytest.raises(ConfigError):
            QuadratureSpec(seed=-1)


class TestSliceChain:
    def test_product_digit_system(self, lebesgue2):
        chain = SliceChain(lebesgue2)
        assert chain.is_product()
        assert chain.joint_count == 1

    def test_symmetric_has_two_classes(self, symmetric2):
        chain = SliceChain(symmetric2)
        assert not chain.is_product()
        assert chain.joint_count == 2
        assert chain.group_count(5) == 32
        # every digit's weight lands in exactly one joint class
        assert np.allclose(chain.joint_tables.sum(axis=0), symmetric2.weights)

    def test_menger_classes(self, menger_measure):
        chain = SliceChain(menger_measure)
        assert chain.joint_count == 3
        assert [len(laws) for laws in chain.stage_laws] == [2, 2]

    def test_stage_tables_are_probability_splits(self, carpet):
        chain = SliceChain(carpet)
        first = marginal(carpet, [0])
        # the first-stage rows split the x marginal across joint classes
        assert np.allclose(chain.stage_tables[0].sum(axis=0)[first.digits[:, 0]], first.weights)
        assert np.allclose(chain.stage_tables[1].sum(axis=1), 1.0)

    def test_needs_two_dimensions(self):
        with pytest.raises(ValueError):
            SliceChain(cantor())


class TestPlans:
    def test_groups_enumerate_lexicographically(self, symmetric2):
        plan = PrefixPlan(symmetric2, (2, 2), depth=2)
        assert plan.groups(0, 4).tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]

    def test_chunks_cover_all_groups(self, symmetric2):
        plan = PrefixPlan(symmetric2, (2, 2), depth=12)
        chunks = list(plan.chunks())
        assert chunks[0] == (0, CHUNK_GROUPS)
        assert chunks[-1][1] == plan.group_count() == 2**12

    def test_budget(self, symmetric2):
        with pytest.raises(QuadratureBudgetError):
            prefix_plan(symmetric2, (2, 2), 22)

    def test_group_masses_sum_to_moments(self, symmetric2):
        from slicefourier.measures import moments

        plan = PrefixPlan(symmetric2, (2, 2), depth=4)
        eta = np.array([[1.0, 0.0], [2.0, -1.0], [0.0, 3.0]])
        total = plan.joint_factor(plan.groups(0, plan.group_count()), eta).sum(axis=0)
        exact, _ = moments(symmetric2, -eta)
        # μ_K differs from μ beyond level K only
        assert np.abs(total - exact).max() <= 4 * np.pi * 3 * 3.0**-4

    def test_aux_rows_are_unit_triangular(self, symmetric2):
        plan = PrefixPlan(symmetric2, (3, 3), depth=3)
        aux = plan.aux(1, plan.groups(0, 8))
        assert aux.shape == (8, 4, 4)
        assert np.allclose(aux[:, np.arange(4), np.arange(4)], 1.0)

    def test_error_estimate(self, symmetric2, lebesgue2):
        assert PrefixPlan(lebesgue2, (2, 2), depth=4).error_estimate(1.0, 4) == 0.0
        estimate = PrefixPlan(symmetric2, (2, 2), depth=4).error_estimate(2.0, 5)
        assert estimate == pytest.approx(4 * np.pi * 5 * 3.0**-4 * 2.0)

    def test_products_use_one_group(self, cantor2):
        plan = prefix_plan(cantor2, (4, 4), 12)
        assert isinstance(plan, ProductPlan)
        assert plan.group_count() == 1
        assert list(plan.chunks()) == [(0, 1)]

    def test_one_dimensional_digit_system_is_unsupported(self):
        with pytest.raises(UnsupportedMeasureError):
            prefix_plan(cantor(), (4,), 8)
