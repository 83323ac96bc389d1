# -*- coding: utf-8 -*-
"""
services/criteria.py

Empirical risk, quadratic loss against a known truth, the bias/variance
decomposition of a fixed segmentation, and the exact oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from services.dp import bellman, build_cost_matrix
from services.segmentation import DimensionGrid, Sample, Segmentation, Signal


def empirical_risk(sample: Sample, f: Signal) -> float:
    return float(np.mean((sample.y - f.evaluate(sample.t)) ** 2))


def quadratic_loss(s_true: Signal, f: Signal, t) -> float:
    t = np.asarray(t, dtype=float)
    return float(np.mean((f.evaluate(t) - s_true.evaluate(t)) ** 2))


@dataclass(frozen=True)
class RiskDecomposition:
    bias: float           # loss of the design projection s_m
    variance_term: float  # V(m) = sum over segments of mean sigma^2, divided by n
    mean_noise: float     # (1/n) sum sigma(t_i)^2
    n: int

    @property
    def expected_empirical_risk(self) -> float:
        return self.bias - self.variance_term + self.mean_noise

    @property
    def expected_loss(self) -> float:
        return self.bias + self.variance_term

    def expected_lpo_risk(self, p: int) -> float:
        """Large-segment approximation of the Leave-p-out expectation."""
        return self.bias + self.n / (self.n - p) * self.variance_term + self.mean_noise


def risk_decomposition(s_true: Signal, sigma: Signal, t, seg: Segmentation) -> RiskDecomposition:
    t = np.asarray(t, dtype=float)
    sv = np.asarray(s_true.evaluate(t), dtype=float)
    var = np.asarray(sigma.evaluate(t), dtype=float) ** 2
    n = t.size
    bias = 0.0
    v_sum = 0.0
    for start, stop in seg.segments():
        block = sv[start:stop]
        bias += float(np.sum((block - block.mean()) ** 2))
        v_sum += float(var[start:stop].mean())
    return RiskDecomposition(bias / n, v_sum / n, float(var.mean()), n)


def oracle_loss_per_dimension(s_true: Signal, sample: Sample,
                              grid: DimensionGrid) -> List[Tuple[float, Segmentation]]:
    """inf over M_n(D) of the loss of the regressogram, for D = 1..d_max."""
    bm = bellman(build_cost_matrix(sample, "true_loss", s_true=s_true), grid.d_max)
    n = sample.n
    return [(bm.value(d) / n, bm.segmentation(d)) for d in grid.dims]


def oracle_loss(s_true: Signal, sample: Sample, grid: DimensionGrid) -> Tuple[float, Segmentation]:
    path = oracle_loss_per_dimension(s_true, sample, grid)
    best = int(np.argmin([v for v, _ in path]))
    return path[best]
