import numpy as np
import pytest

from levybridge.laws import DefaultTimeLaw, LevyLaw, PayoffDistribution
from levybridge.sampling import rng_for


def test_levy_law_validation():
    with pytest.raises(ValueError):
        LevyLaw("weird")
    with pytest.raises(ValueError):
        LevyLaw.poisson(0.0)
    assert LevyLaw.standard_gamma().mean(0.3) == 0.3
    assert LevyLaw.poisson(2.0).variance(0.5) == 1.0
    assert LevyLaw.degenerate().mean(1.0) == 0.0
    assert LevyLaw.standard_gamma().tail_quantile(0.5) > 10.0


def test_payoff_validation():
    with pytest.raises(ValueError):
        PayoffDistribution([0.0, 0.0], [0.5, 0.5])  # duplicate support
    with pytest.raises(ValueError):
        PayoffDistribution([0.0, 1.0], [0.6, 0.6])  # mass != 1
    with pytest.raises(ValueError):
        PayoffDistribution([0.0, 1.0], [1.1, -0.1])
    p = PayoffDistribution.binary(0.0, 1.0, 0.25)
    assert p.mean() == 0.25
    assert p.is_binary


def test_payoff_truncation_renormalizes():
    # geometric tail gets cut once cumulative mass reaches the coverage target
    probs = 0.5 ** np.arange(1, 81)
    support = np.arange(80, dtype=float)
    p = PayoffDistribution.from_weights(support, probs)
    assert p.n_atoms < 80
    assert p.probs.sum() == pytest.approx(1.0, abs=1e-15)
    assert p.n_atoms >= 40  # keeps everything needed for 1 - 1e-12 coverage


def test_payoff_sampling_deterministic():
    p = PayoffDistribution.binary(0.0, 1.0, 0.5)
    a = p.sample(rng_for(5), 100)
    b = p.sample(rng_for(5), 100)
    np.testing.assert_array_equal(a, b)


def test_default_law_atoms():
    law = DefaultTimeLaw.atoms([0.7, 0.8], [0.5, 0.5], horizon=1.0)
    assert law.cdf(0.5) == 0.0
    assert law.cdf(0.7) == 0.5
    assert law.cdf(1.0) == 1.0
    assert law.integrate(lambda r: r, 0.0, 1.0) == pytest.approx(0.75)
    assert law.integrate(lambda r: 1.0, 0.7, 0.8) == pytest.approx(0.5)  # (lo, hi] excludes 0.7
    taus = law.sample(rng_for(9), 1000)
    assert set(np.unique(taus)) == {0.7, 0.8}


def test_default_law_validation():
    with pytest.raises(ValueError):
        DefaultTimeLaw.atoms([0.0, 0.5], [0.5, 0.5], horizon=1.0)  # atom at 0
    with pytest.raises(ValueError):
        DefaultTimeLaw.atoms([0.5, 1.5], [0.5, 0.5], horizon=1.0)  # beyond horizon
    with pytest.raises(ValueError):
        DefaultTimeLaw.atoms([0.5, 0.8], [0.5, 0.6], horizon=1.0)  # mass != 1
    with pytest.raises(ValueError):
        DefaultTimeLaw.from_density(lambda r: 0.5, 1.0)  # mass 0.5


def test_default_law_exponential_conditioned():
    law = DefaultTimeLaw.exponential_conditioned(0.1, 1.0)
    assert law.cdf(1.0) == pytest.approx(1.0, abs=1e-12)
    assert law.cdf(0.0) == 0.0
    # conditioned cdf at t: (1 - e^{-0.1 t}) / (1 - e^{-0.1})
    assert law.cdf(0.5) == pytest.approx((1 - np.exp(-0.05)) / (1 - np.exp(-0.1)), abs=1e-12)
    assert law.integrate(lambda r: 1.0, 0.0, 1.0) == pytest.approx(1.0, rel=1e-9)
    taus = law.sample(rng_for(11), 50_000)
    assert np.all((taus > 0.0) & (taus <= 1.0))
    emp = np.mean(taus <= 0.5)
    assert abs(emp - law.cdf(0.5)) < 4 * np.sqrt(0.25 / 50_000)


def test_default_law_uniform():
    law = DefaultTimeLaw.uniform(0.2, 0.6, horizon=1.0)
    assert law.cdf(0.4) == pytest.approx(0.5)
    assert law.integrate(lambda r: r, 0.0, 1.0) == pytest.approx(0.4, rel=1e-9)
    taus = law.sample(rng_for(3), 100)
    assert np.all((taus > 0.2) & (taus <= 0.6))


def test_default_law_generic_density_sampling():
    law = DefaultTimeLaw.from_density(lambda r: 2.0 * r, 1.0)  # triangular on (0, 1]
    taus = law.sample(rng_for(4), 50_000)
    assert abs(taus.mean() - 2.0 / 3.0) < 4 * taus.std() / np.sqrt(taus.size)
