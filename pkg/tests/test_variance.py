import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrselect import (
    CompositionMatrix,
    DegenerateDataError,
    InputDataError,
    PartWeights,
    close,
    explained_percentage,
    total_logratio_variance,
    variance_population,
)

from .conftest import random_composition


def toy_two_sample():
    """Two samples, two parts: hand-derived total logratio variance 0.25.

    The single pairwise logratio is [0, -2]: variance 1, weight product
    1/4, total 0.25. The CLR columns are [0, 1] and [0, -1] up to sign:
    variance 0.25 each, weights 1/2, total 0.25 again.
    """
    return CompositionMatrix(
        [[1.0, 1.0], [1.0, math.e**2]], ("a", "b"), ("1", "2")
    )


class TestVariancePopulation:
    def test_two_values(self):
        assert variance_population([0.0, -2.0]) == pytest.approx(1.0)

    def test_constant(self):
        assert variance_population([3.0, 3.0, 3.0]) == 0.0

    def test_divisor_is_count(self):
        # mean 2, squared deviations 1+0+1, divided by 3 not 2
        assert variance_population([1.0, 2.0, 3.0]) == pytest.approx(2.0 / 3.0)

    def test_empty_rejected(self):
        with pytest.raises(InputDataError):
            variance_population([])


class TestTotalLogratioVariance:
    def test_toy_both_methods(self):
        m = toy_two_sample()
        for method in ("clr", "pairs"):
            report = total_logratio_variance(m, method=method)
            assert report.total == pytest.approx(0.25, abs=1e-12)

    def test_identical_rows_zero(self):
        m = CompositionMatrix([[1, 2, 3]] * 4, ("a", "b", "c"), tuple("1234"))
        assert total_logratio_variance(m).total == 0.0

    def test_pairs_equals_clr_on_random_matrix(self):
        rng = np.random.default_rng(42)
        m = random_composition(rng, 10, 6)
        a = total_logratio_variance(m, method="pairs").total
        b = total_logratio_variance(m, method="clr").total
        assert a == pytest.approx(b, rel=1e-10)

    def test_pair_count_and_keys(self):
        rng = np.random.default_rng(1)
        m = random_composition(rng, 5, 4)
        report = total_logratio_variance(m, method="pairs")
        items = list(report.pair_items())
        assert len(items) == 6
        assert [jk for jk, _ in items][:3] == [(0, 1), (0, 2), (0, 3)]
        # each pair variance is the population variance of that logratio
        logs = np.log(m.values)
        for (j, k), var in items:
            assert var == pytest.approx(
                variance_population(logs[:, j] - logs[:, k])
            )

    def test_clr_method_has_no_pairs(self):
        rng = np.random.default_rng(2)
        report = total_logratio_variance(random_composition(rng, 4, 3))
        assert report.per_pair is None
        with pytest.raises(InputDataError):
            list(report.pair_items())

    def test_weighted_decomposition(self):
        rng = np.random.default_rng(3)
        m = random_composition(rng, 8, 5)
        w = PartWeights.proportional(rng.uniform(0.2, 3.0, size=5))
        report = total_logratio_variance(m, w)
        assert report.total == pytest.approx(
            float(np.sum(w.weights * report.per_clr)), rel=1e-12
        )

    def test_scale_invariance(self):
        rng = np.random.default_rng(4)
        m = random_composition(rng, 6, 5)
        scaled = m.with_values(m.values * rng.uniform(0.1, 10.0, size=(6, 1)))
        assert total_logratio_variance(scaled).total == pytest.approx(
            total_logratio_variance(m).total, rel=1e-10
        )

    def test_nonpositive_rejected(self):
        m = CompositionMatrix([[0, 1], [1, 1]], ("a", "b"), ("1", "2"))
        with pytest.raises(InputDataError):
            total_logratio_variance(m)

    def test_nonnegative_variances(self):
        rng = np.random.default_rng(5)
        report = total_logratio_variance(
            random_composition(rng, 12, 7), method="pairs"
        )
        assert report.total >= 0
        assert np.all(report.per_clr >= 0)
        assert np.all(report.per_pair >= 0)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(2, 9),
    st.integers(2, 7),
    st.integers(0, 10_000),
)
def test_pairs_clr_equivalence_property(n_samples, n_parts, seed):
    rng = np.random.default_rng(seed)
    m = random_composition(rng, n_samples, n_parts)
    w = PartWeights.proportional(rng.uniform(0.1, 5.0, size=n_parts))
    pairs = total_logratio_variance(m, w, method="pairs").total
    clr = total_logratio_variance(m, w, method="clr").total
    assert pairs == pytest.approx(clr, rel=1e-10)


class TestExplainedPercentage:
    def test_full_and_zero(self):
        m = toy_two_sample()
        report = total_logratio_variance(m)
        assert explained_percentage(report.total, report) == pytest.approx(100.0)
        assert explained_percentage(0.0, report) == 0.0

    def test_degenerate_total(self):
        m = CompositionMatrix([[1, 2], [1, 2]], ("a", "b"), ("1", "2"))
        report = total_logratio_variance(m)
        with pytest.raises(DegenerateDataError):
            explained_percentage(0.0, report)

    def test_out_of_range_rejected(self):
        report = total_logratio_variance(toy_two_sample())
        with pytest.raises(InputDataError):
            explained_percentage(report.total * 1.5, report)

    def test_closure_does_not_change_report(self):
        rng = np.random.default_rng(6)
        m = random_composition(rng, 6, 4)
        a = total_logratio_variance(m).total
        b = total_logratio_variance(close(m, 100.0)).total
        assert a == pytest.approx(b, rel=1e-12)
