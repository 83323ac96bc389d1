# -*- coding: utf-8 -*-
import numpy as np
import pytest

from services.segmentation import Sample


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def make_sample(rng):
    """Gaussian sample on t_i = i/n with a step in the mean and in the variance."""
    def _make(n, jump=1.0, sd=(0.3, 0.1)):
        t = np.arange(1, n + 1) / n
        mean = np.where(t > 0.5, jump, 0.0)
        scale = np.where(t > 0.5, sd[1], sd[0])
        return Sample(t, mean + scale * rng.standard_normal(n))
    return _make
