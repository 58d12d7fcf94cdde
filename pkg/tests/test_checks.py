import pytest
from scipy.stats import binom

from relmargin import InputError, verify_binomial_lemma, verify_monotone_ratio
from relmargin.checks import deviation_ratio


def test_binomial_spot_values():
    # m=10, p=0.5: P[X >= 5] computed by exact sum
    assert binom.sf(4, 10, 0.5) == pytest.approx(0.623046875)
    # m=2, p=0.9: E X = 1.8, P[X >= 1.8] = P[X = 2] = 0.81
    assert binom.sf(1, 2, 0.9) == pytest.approx(0.81)


def test_binomial_lemma_small_range():
    rep = verify_binomial_lemma(50, grid_size=60)
    assert rep["passed"]
    assert rep["min_upper_tail"] > 0.25
    assert rep["min_lower_tail"] > 0.25
    # the binding cases sit just past the excluded boundaries
    assert rep["min_upper_tail_at"]["p"] > 1.0 / rep["min_upper_tail_at"]["m"]
    assert rep["min_lower_tail_at"]["p"] < 1.0 - 1.0 / rep["min_lower_tail_at"]["m"]


def test_binomial_lemma_caps():
    with pytest.raises(InputError):
        verify_binomial_lemma(0)
    with pytest.raises(InputError):
        verify_binomial_lemma(5000)


def test_deviation_ratio_shape():
    assert deviation_ratio(2.0, 1.0, 1.0, 2.0) == pytest.approx(1.0 / 2.0)


def test_monotone_ratio_check_passes():
    rep = verify_monotone_ratio(n_points=5000, delta=1e-6, seed=42)
    assert rep["passed"]
    assert rep["increasing_in_x_failures"] == 0
    assert rep["decreasing_in_y_failures"] == 0
    assert rep["min_x_gap"] > 0
    assert rep["max_y_gap"] < 0
