import json

import numpy as np
import pytest

from relmargin import (
    CapabilityError,
    InputError,
    LabeledSample,
    LinearHypothesis,
    MarginSeparable,
    TwoGaussianMixture,
    generate,
    make_distribution,
    margins,
    true_risk,
)


def test_sample_validation():
    with pytest.raises(InputError):
        LabeledSample(points=np.zeros((2, 2)), labels=np.array([1.0, 0.5]))
    with pytest.raises(InputError):
        LabeledSample(points=np.zeros((2, 2)), labels=np.array([1.0]))


def test_generate_is_deterministic():
    dist = TwoGaussianMixture(dim=3, separation=1.0, sigma=1.0)
    a = generate(dist, 50, seed=11)
    b = generate(dist, 50, seed=11)
    assert np.array_equal(a.points, b.points)
    assert np.array_equal(a.labels, b.labels)
    c = generate(dist, 50, seed=12)
    assert not np.array_equal(a.points, c.points)


def test_generated_points_respect_radius():
    dist = TwoGaussianMixture(dim=4, separation=2.0, sigma=1.0, radius=2.5)
    s = generate(dist, 400, seed=0)
    assert np.linalg.norm(s.points, axis=1).max() <= 2.5 + 1e-9


def test_separable_margins_at_least_gap():
    dist = MarginSeparable(dim=3, gap=0.3, noise_rate=0.0)
    s = generate(dist, 500, seed=2)
    u = margins(dist.planted, s)
    assert u.min() >= 0.3 - 1e-12


def test_noise_rate_within_three_stderr():
    rate = 0.1
    m = 100_000
    dist = MarginSeparable(dim=2, gap=0.2, noise_rate=rate)
    s = generate(dist, m, seed=5)
    flipped = (margins(dist.planted, s) < 0).mean()
    stderr = np.sqrt(rate * (1 - rate) / m)
    assert abs(flipped - rate) <= 3 * stderr


def test_analytic_risk_matches_holdout():
    dist = TwoGaussianMixture(dim=3, separation=1.0, sigma=1.0)
    h = LinearHypothesis(np.array([1.0, 0.0, 0.0]))  # aligned with the class mean
    exact = true_risk(h, dist, mode="analytic")
    mc = true_risk(h, dist, mode="holdout", n=10**6, seed=3)
    assert exact.stderr == 0.0
    assert abs(exact.value - mc.value) <= 3 * mc.stderr


def test_analytic_risk_closed_form_value():
    from scipy.stats import norm

    dist = TwoGaussianMixture(dim=2, separation=1.5, sigma=0.75)
    h = LinearHypothesis(np.array([0.6, 0.8]))
    # margin is N(w1 * separation, sigma^2), risk = Phi(-w1 * sep / sigma)
    assert dist.analytic_risk(h) == pytest.approx(norm.cdf(-0.6 * 1.5 / 0.75))


def test_wrong_sign_hypothesis_has_risk_near_one():
    dist = MarginSeparable(dim=2, gap=0.5, noise_rate=0.0)
    wrong = LinearHypothesis(np.array([-1.0, 0.0]))
    est = true_risk(wrong, dist, mode="holdout", n=2000, seed=9)
    assert est.value == 1.0


def test_holdout_single_point_is_zero_or_one():
    dist = TwoGaussianMixture(dim=2)
    h = LinearHypothesis(np.array([1.0, 0.0]))
    est = true_risk(h, dist, mode="holdout", n=1, seed=4)
    assert est.value in (0.0, 1.0)


def test_analytic_mode_rejected_when_unavailable():
    dist = MarginSeparable(dim=2, gap=0.1)
    with pytest.raises(CapabilityError):
        true_risk(LinearHypothesis(np.array([1.0, 0.0])), dist, mode="analytic")


def test_sample_json_round_trip_and_schema():
    jsonschema = pytest.importorskip("jsonschema")
    from pathlib import Path

    dist = TwoGaussianMixture(dim=2)
    s = generate(dist, 5, seed=1)
    data = json.loads(json.dumps(s.to_json()))
    back = LabeledSample.from_json(data)
    assert np.allclose(back.points, s.points)
    assert np.array_equal(back.labels, s.labels)
    schema = json.loads(
        (Path(__file__).parent.parent / "src/relmargin/schemas/sample.v1.json").read_text()
    )
    jsonschema.validate(data, schema)


def test_make_distribution_rejects_unknown():
    with pytest.raises(InputError):
        make_distribution({"kind": "mystery"})
    with pytest.raises(InputError):
        make_distribution({"kind": "two-gaussian-mixture", "bogus": 1})
