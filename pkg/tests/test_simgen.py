# -*- coding: utf-8 -*-
import numpy as np
import pytest
from numpy.testing import assert_allclose

from services.errors import DomainError
from services.segmentation import PiecewiseConstant, design
from services.simgen import (FixedSetting, RandomFrameworkSpec, draw_random_framework,
                             make_fixed_signal, make_rng, mean_noise_variance, noise_level,
                             pair_difference_energy, regression_function, simulate_sample,
                             substreams)


def test_regression_function_jump_counts():
    assert regression_function("s1").jumps == 4
    assert regression_function("s2").jumps == 4
    assert regression_function("s3").jumps == 9
    for s_id in ("s1", "s2", "s3"):
        steps = np.abs(np.diff(regression_function(s_id).levels))
        assert np.all((steps >= 0.1) & (steps <= 1.0))


def test_noise_levels_on_the_regular_design():
    assert_allclose(mean_noise_variance(noise_level("c"), 100), 0.0625)
    assert_allclose(mean_noise_variance(noise_level("pc1"), 100), 0.014875)
    assert round(mean_noise_variance(noise_level("pc1"), 100), 3) == 0.015
    assert_allclose(mean_noise_variance(noise_level("pc3"), 100), 0.09296875)
    assert round(mean_noise_variance(noise_level("pc3"), 100), 3) == 0.093
    assert_allclose(mean_noise_variance(noise_level("pc3"), 100)
                    / mean_noise_variance(noise_level("pc1"), 100), 6.25)
    assert_allclose(mean_noise_variance(noise_level("pc2"), 100),
                    4 * mean_noise_variance(noise_level("pc1"), 100))
    assert_allclose(noise_level("s").evaluate(1.0), 0.5 * np.sin(np.pi / 4))


def test_s1_pair_difference_artefact():
    assert_allclose(pair_difference_energy(regression_function("s1"), 100), 0.04)


def test_fixed_setting_parsing():
    setting = FixedSetting.parse("s2:pc3")
    assert setting.label == "s2:pc3" and setting.n == 100
    s, sigma = make_fixed_signal(setting)
    assert s.jumps == 4 and isinstance(sigma, PiecewiseConstant)
    for bad in ("s4:c", "s1:pc4", "s1"):
        with pytest.raises(DomainError):
            FixedSetting.parse(bad)


def test_noiseless_sample_is_the_signal():
    s = regression_function("s3")
    sim = simulate_sample(s, PiecewiseConstant.constant(0.0), 50, make_rng(1))
    assert_allclose(sim.sample.t, design(50))
    assert_allclose(sim.sample.y, s.evaluate(design(50)))


def test_replicate_moments(rng):
    s = regression_function("s2")
    sigma = noise_level("pc3")
    n, N = 20, 4000
    ys = np.vstack([simulate_sample(s, sigma, n, make_rng(ss)).sample.y for ss in substreams(5, N)])
    sd = sigma.evaluate(design(n))
    assert np.all(np.abs(ys.mean(axis=0) - s.evaluate(design(n))) <= 4 * sd / np.sqrt(N))
    # variance of a Gaussian sample variance: 2 sigma^4 / (N - 1)
    assert np.all(np.abs(ys.var(axis=0, ddof=1) - sd ** 2) <= 5 * sd ** 2 * np.sqrt(2.0 / (N - 1)))


def test_same_seed_same_sample():
    s, sigma = make_fixed_signal(FixedSetting("s1", "pc1"))
    a = simulate_sample(s, sigma, 100, make_rng(42)).sample.y
    b = simulate_sample(s, sigma, 100, make_rng(42)).sample.y
    assert np.array_equal(a, b)


def _check_framework_draw(drawn, n):
    s_cuts = drawn.s.cut_positions
    assert np.all(np.diff(s_cuts) > 0) and 0.0 < s_cuts[0] and s_cuts[-1] < 1.0
    assert np.all(drawn.s_gaps >= drawn.s_floors - 1e-15)
    assert abs(drawn.s_gaps.sum() - 1.0) <= 1e-12
    steps = np.abs(np.diff(drawn.s.levels))
    assert np.all((steps >= 0.1) & (steps <= 1.0))
    assert 3 <= s_cuts.size <= int(np.sqrt(n)) or drawn.framework == "C"
    b_cuts = drawn.sigma.cut_positions
    assert np.all(np.diff(b_cuts) > 0)
    assert np.all(drawn.sigma_gaps >= drawn.sigma_floors - 1e-15)
    assert abs(drawn.sigma_gaps.sum() - 1.0) <= 1e-12
    assert 5 <= b_cuts.size <= int(np.sqrt(n))
    beta = drawn.sigma.levels
    assert np.all(beta > 0)
    if drawn.framework == "C":
        k1 = drawn.k_s1
        assert s_cuts[k1] == 0.5
        assert abs(drawn.s_gaps[:k1 + 1].sum() - 0.5) <= 1e-12
        left = np.concatenate(([0.0], b_cuts))
        low = left < 0.5
        assert np.all((beta[low] >= 0.025) & (beta[low] <= 0.2))
        assert np.all((beta[~low] >= 0.1) & (beta[~low] <= 0.8))
    else:
        assert np.all((beta >= 0.05) & (beta <= 0.5))


@pytest.mark.parametrize("framework", ["A", "B", "C"])
def test_framework_invariants(framework):
    spec = RandomFrameworkSpec(framework, 100)
    rng = make_rng(11)
    for _ in range(300):
        _check_framework_draw(draw_random_framework(spec, rng), 100)


@pytest.mark.bench
@pytest.mark.parametrize("framework", ["A", "B", "C"])
def test_framework_invariants_10000_draws(framework):
    spec = RandomFrameworkSpec(framework, 100)
    rng = make_rng(12)
    for _ in range(10000):
        _check_framework_draw(draw_random_framework(spec, rng), 100)


def test_framework_guards():
    with pytest.raises(DomainError):
        draw_random_framework(RandomFrameworkSpec("A", 30), make_rng(0))
    with pytest.raises(DomainError):
        RandomFrameworkSpec("D")
    assert RandomFrameworkSpec("b").framework == "B"
