# -*- coding: utf-8 -*-
"""
services/simgen.py

Simulated signals and samples.
- Fixed settings (s1, s2, s3) x (c, pc1, pc2, pc3, s) on the design t_i = i/n
- Random frameworks A, B, C (random piecewise constant s and sigma)
- simulate_sample: y_i = s(t_i) + sigma(t_i) * eps_i, eps_i standard Gaussian

The regression functions s1, s2, s3 are fixed step functions with 4, 4 and 9
jumps, all jump sizes in [0.1, 1]. s1 jumps by 1 between design
points 2i-1 and 2i at n=100, so (1/n) sum (s(t_2i) - s(t_2i-1))^2 = 0.04.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy.special import ndtri

from services.errors import DomainError
from services.segmentation import PiecewiseConstant, Sample, Signal, SmoothFunction, design

FRAMEWORK_MIN_N = 36

# cut positions, levels
REGRESSION_FUNCTIONS: Dict[str, Tuple[Tuple[float, ...], Tuple[float, ...]]] = {
    "s1": ((0.155, 0.335, 0.595, 0.795),
           (0.0, 1.0, 0.0, 1.0, 0.0)),
    "s2": ((0.2, 0.45, 0.6, 0.8),
           (0.0, 0.6, 0.2, 0.9, 0.3)),
    "s3": ((0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9),
           (0.0, 0.5, 0.2, 1.0, 0.4, 0.8, 0.1, 0.6, 0.3, 0.9)),
}

SIGMA_C = 0.25
SIGMA_PC1 = (0.2, 0.05)
SIGMA_PC_FACTORS = {"pc1": 1.0, "pc2": 2.0, "pc3": 2.5}
SIGMA_IDS = ("c", "pc1", "pc2", "pc3", "s")


# --- RNG ---------------------------------------------------------------------------

def make_rng(seed: Union[int, np.random.SeedSequence, None]) -> np.random.Generator:
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return np.random.Generator(np.random.PCG64(ss))


def substreams(seed: int, count: int) -> list:
    """Independent child seeds, one per replicate."""
    return np.random.SeedSequence(seed).spawn(count)


def standard_normal(rng: np.random.Generator, size: int) -> np.ndarray:
    # 53-bit uniforms strictly inside (0,1), inverse-CDF transform
    u = (rng.integers(0, 2 ** 53, size=size, dtype=np.int64) + 0.5) / 2.0 ** 53
    return ndtri(u)


# --- Fixed settings --------------------------------------------------------------

@dataclass(frozen=True)
class FixedSetting:
    s_id: str
    sigma_id: str
    n: int = 100

    def __post_init__(self):
        if self.s_id not in REGRESSION_FUNCTIONS:
            raise DomainError(f"unknown regression function {self.s_id!r}")
        if self.sigma_id not in SIGMA_IDS:
            raise DomainError(f"unknown noise level {self.sigma_id!r}")
        if self.n < 4:
            raise DomainError(f"sample size too small: {self.n}")

    @classmethod
    def parse(cls, text: str, n: int = 100) -> "FixedSetting":
        s_id, sep, sigma_id = text.strip().lower().partition(":")
        if not sep:
            raise DomainError(f"invalid setting {text!r} (expected s{{1,2,3}}:{{{','.join(SIGMA_IDS)}}})")
        return cls(s_id, sigma_id, n)

    @property
    def label(self) -> str:
        return f"{self.s_id}:{self.sigma_id}"


def regression_function(s_id: str) -> PiecewiseConstant:
    cuts, levels = REGRESSION_FUNCTIONS[s_id]
    return PiecewiseConstant(np.array(cuts), np.array(levels))


def noise_level(sigma_id: str) -> Signal:
    if sigma_id == "c":
        return PiecewiseConstant.constant(SIGMA_C)
    if sigma_id == "s":
        return SmoothFunction(lambda t: 0.5 * np.sin(t * np.pi / 4.0), name="sigma_s")
    f = SIGMA_PC_FACTORS[sigma_id]
    return PiecewiseConstant(np.array([1.0 / 3.0]), f * np.array(SIGMA_PC1))


def make_fixed_signal(setting: FixedSetting) -> Tuple[PiecewiseConstant, Signal]:
    return regression_function(setting.s_id), noise_level(setting.sigma_id)


# --- Random frameworks -----------------------------------------------------------

@dataclass(frozen=True)
class RandomFrameworkSpec:
    framework: str
    n: int = 100
    seed: int = 0

    def __post_init__(self):
        fw = self.framework.strip().upper()
        if fw not in ("A", "B", "C"):
            raise DomainError(f"unknown framework {self.framework!r}")
        object.__setattr__(self, "framework", fw)

    @property
    def label(self) -> str:
        return f"framework:{self.framework}"


@dataclass(frozen=True, eq=False)
class RandomSignal:
    s: PiecewiseConstant
    sigma: PiecewiseConstant
    s_gaps: np.ndarray
    s_floors: np.ndarray      # per-gap lower bound
    sigma_gaps: np.ndarray
    sigma_floors: np.ndarray
    framework: str
    k_s1: Optional[int] = None
    details: Dict[str, float] = field(default_factory=dict)


def _gaps(k: int, u: np.ndarray, n: int) -> Tuple[np.ndarray, float]:
    """k+1 gaps summing to 1, each >= min(5/n, 1/(k+1))."""
    floor = min(5.0 / n, 1.0 / (k + 1))
    return floor + (1.0 - (k + 1) * floor) * u / np.sum(u), floor


def _cuts(gaps: np.ndarray) -> np.ndarray:
    return np.cumsum(gaps)[:-1]


def _bimodal_weights(rng: np.random.Generator, size: int) -> np.ndarray:
    # |10 Z1 + Z2|, Z1 ~ Bernoulli(1/2), Z2 ~ N(0,1)
    z1 = rng.integers(0, 2, size=size)
    return np.abs(10.0 * z1 + standard_normal(rng, size))


def _levels(rng: np.random.Generator, k: int) -> np.ndarray:
    # cumulative jumps, |jump| ~ U[0.1, 1] with random sign
    mag = rng.uniform(0.1, 1.0, size=k + 1)
    sign = np.where(rng.integers(0, 2, size=k + 1) == 1, 1.0, -1.0)
    return np.cumsum(sign * mag)


def draw_random_framework(spec: RandomFrameworkSpec, rng: np.random.Generator) -> RandomSignal:
    n = spec.n
    if n < FRAMEWORK_MIN_N:
        raise DomainError(f"random frameworks need n >= {FRAMEWORK_MIN_N}, got n={n}")
    root = math.isqrt(n)
    fw = spec.framework
    k_s1 = None

    if fw in ("A", "B"):
        k_s = int(rng.integers(3, root + 1))
        u = rng.uniform(0.0, 1.0, size=k_s + 1) if fw == "A" else _bimodal_weights(rng, k_s + 1)
        s_gaps, floor = _gaps(k_s, u, n)
        s_floors = np.full(k_s + 1, floor)
        s_cuts = _cuts(s_gaps)
    else:
        k_max2 = (root - 1) // 3
        k_max1 = root - 1 - k_max2
        k_s1 = int(rng.integers(2, k_max1 + 1))
        k_s2 = int(rng.integers(0, k_max2 + 1))
        k_s = k_s1 + k_s2 + 1
        u = _bimodal_weights(rng, k_s + 1)
        # each half's recipe sums to 1; halves are rescaled to 1/2 so that a_{K_s1+1} = 1/2
        g1, f1 = _gaps(k_s1, u[:k_s1 + 1], n)
        g2, f2 = _gaps(k_s2, u[k_s1 + 1:], n)
        s_gaps = 0.5 * np.concatenate((g1, g2))
        s_floors = 0.5 * np.concatenate((np.full(k_s1 + 1, f1), np.full(k_s2 + 1, f2)))
        s_cuts = np.concatenate((0.5 * _cuts(g1), [0.5], 0.5 + 0.5 * _cuts(g2)))
    alpha = _levels(rng, k_s)

    k_sigma = int(rng.integers(5, root + 1))
    sigma_gaps, sfloor = _gaps(k_sigma, rng.uniform(0.0, 1.0, size=k_sigma + 1), n)
    b_cuts = _cuts(sigma_gaps)
    if fw == "C":
        left = np.concatenate(([0.0], b_cuts))
        beta = np.where(left < 0.5,
                        rng.uniform(0.025, 0.2, size=k_sigma + 1),
                        rng.uniform(0.1, 0.8, size=k_sigma + 1))
    else:
        beta = rng.uniform(0.05, 0.5, size=k_sigma + 1)

    return RandomSignal(
        s=PiecewiseConstant(s_cuts, alpha),
        sigma=PiecewiseConstant(b_cuts, beta),
        s_gaps=s_gaps,
        s_floors=s_floors,
        sigma_gaps=sigma_gaps,
        sigma_floors=np.full(k_sigma + 1, sfloor),
        framework=fw,
        k_s1=k_s1,
        details={"K_s": k_s, "K_sigma": k_sigma},
    )


# --- Sampling ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SimulatedSample:
    sample: Sample
    s_values: np.ndarray
    sigma_values: np.ndarray


def simulate_sample(s: Signal, sigma: Signal, n: int, rng: np.random.Generator) -> SimulatedSample:
    t = design(n)
    sv = np.asarray(s.evaluate(t), dtype=float)
    sd = np.asarray(sigma.evaluate(t), dtype=float) * np.ones(n)
    y = sv + sd * standard_normal(rng, n)
    return SimulatedSample(Sample(t, y), sv, sd)


def mean_noise_variance(sigma: Signal, n: int) -> float:
    """(1/n) sum sigma(t_i)^2 on t_i = i/n."""
    return float(np.mean(np.asarray(sigma.evaluate(design(n))) ** 2 * np.ones(n)))


def pair_difference_energy(s: Signal, n: int) -> float:
    """(1/n) sum_i (s(t_2i) - s(t_2i-1))^2, the bias of the paired-difference variance estimate."""
    sv = np.asarray(s.evaluate(design(n)), dtype=float)
    m = n - n % 2
    return float(np.sum((sv[1:m:2] - sv[0:m:2]) ** 2) / n)
