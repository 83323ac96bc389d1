# -*- coding: utf-8 -*-
"""
services/lpo.py

Leave-p-out risk of regressograms.
- hyper_trunc_moment(k, n, p, n_seg)   E[Z^k 1{Z>0}], Z ~ Hypergeometric(n, n-p, n_seg)
- lpo_terms / lpo_segment_cost         per-segment closed form
- lpo_risk                             closed form, O(n) per segmentation
- lpo_risk_bruteforce                  enumeration over all C(n,p) validation sets (test oracle)
- lpo_select                           exact argmin over M_n(D) via dynamic programming

Empty-training convention ("conditional", default): each segment's validation
error is averaged over the splits in which the segment keeps at least one
training point; this is what the 1/N_lambda factor of the closed form encodes.
"strict": a split leaving a segment with validation points but no training
point makes the whole risk +inf. Singleton segments are +inf in both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Tuple

import numpy as np
from scipy.special import gammaln

from services.errors import DomainError, GuardError
from services.segmentation import Sample, Segmentation

BRUTEFORCE_MAX_SPLITS = 10 ** 6
EMPTY_CONVENTIONS = ("conditional", "strict")


def _log_comb(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return gammaln(a + 1.0) - gammaln(b + 1.0) - gammaln(a - b + 1.0)


def _check_p(n: int, p: int) -> None:
    if not 1 <= p <= n - 1:
        raise DomainError(f"p={p} out of range 1..{n - 1}")


def _check_empty(empty: str) -> None:
    if empty not in EMPTY_CONVENTIONS:
        raise DomainError(f"unknown empty-training convention {empty!r}")


def _support(n: int, p: int, n_seg: int) -> np.ndarray:
    # Z counts training points in the segment: Z >= n_seg - p, Z <= n - p
    lo = max(1, n_seg - p)
    hi = min(n_seg, n - p)
    return np.arange(lo, hi + 1, dtype=float)


def _weights(n: int, p: int, n_seg: int, r: np.ndarray) -> np.ndarray:
    return np.exp(_log_comb(n - p, r) + _log_comb(p, n_seg - r) - _log_comb(n, n_seg))


def hyper_trunc_moment(k: int, n: int, p: int, n_seg: int) -> float:
    if k not in (-1, 0, 1):
        raise DomainError(f"moment order k={k} not in {{-1, 0, 1}}")
    _check_p(n, p)
    if not 1 <= n_seg <= n:
        raise DomainError(f"segment size {n_seg} out of range 1..{n}")
    r = _support(n, p, n_seg)
    if r.size == 0:
        return 0.0
    return float(np.sum(r ** k * _weights(n, p, n_seg, r)))


def hyper_pmf(n: int, p: int, n_seg: int) -> Tuple[np.ndarray, np.ndarray]:
    """Full support (including 0) and pmf of the training count Z."""
    _check_p(n, p)
    r = np.arange(max(0, n_seg - p), min(n_seg, n - p) + 1, dtype=float)
    return r, _weights(n, p, n_seg, r)


@dataclass(frozen=True)
class LpoTerms:
    n_seg: int
    N: float
    A: float
    B: float
    v_minus: float
    v0: float
    v1: float


def lpo_terms(n: int, p: int, n_seg: int) -> LpoTerms:
    v_minus = hyper_trunc_moment(-1, n, p, n_seg)
    v0 = hyper_trunc_moment(0, n, p, n_seg)
    v1 = hyper_trunc_moment(1, n, p, n_seg)
    if p >= n_seg:
        N = 1.0 - math.exp(float(_log_comb(n - n_seg, p - n_seg) - _log_comb(n, p)))
    else:
        N = 1.0
    m = n_seg
    if m == 1:
        return LpoTerms(m, N, math.nan, math.nan, v_minus, v0, v1)
    big = 1.0 if m >= 3 else 0.0
    A = v0 * (1.0 - 1.0 / m) - v1 / m + v_minus
    B = (v1 * (2.0 - big) / (m * (m - 1))
         + v0 / (m - 1) * ((1.0 + 1.0 / m) * big - 2.0)
         - v_minus * big / (m - 1))
    return LpoTerms(m, N, A, B, v_minus, v0, v1)


@lru_cache(maxsize=64)
def _coefficients(n: int, p: int, empty: str) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per segment length L = 0..n: term(L, S1, S2) = c2[L]*S2 + c1[L]*S1^2.
    Infinite lengths carry c2 = +inf (c1 = 0).
    """
    c2 = np.full(n + 1, np.inf)
    c1 = np.zeros(n + 1)
    for m in range(2, n + 1):
        if empty == "strict" and p >= m:
            continue
        terms = lpo_terms(n, p, m)
        scale = 1.0 / (p * terms.N)
        c2[m] = (terms.A - terms.B) * scale
        c1[m] = terms.B * scale
    c2.setflags(write=False)
    c1.setflags(write=False)
    return c2, c1


def lpo_coefficients(n: int, p: int, empty: str = "conditional") -> Tuple[np.ndarray, np.ndarray]:
    _check_p(n, p)
    _check_empty(empty)
    return _coefficients(int(n), int(p), empty)


def lpo_segment_cost(n: int, p: int, count: int, s1: float, s2: float,
                     empty: str = "conditional") -> float:
    c2, c1 = lpo_coefficients(n, p, empty)
    if math.isinf(c2[count]):
        return math.inf
    return float(c2[count] * s2 + c1[count] * s1 * s1)


def lpo_risk(sample: Sample, seg: Segmentation, p: int, empty: str = "conditional") -> float:
    n = sample.n
    _check_p(n, p)
    if seg.n != n:
        raise DomainError(f"segmentation is for n={seg.n}, sample has n={n}")
    c2, c1 = lpo_coefficients(n, p, empty)
    y = sample.y
    total = 0.0
    for start, stop in seg.segments():
        count = stop - start
        if math.isinf(c2[count]):
            return math.inf
        # centred on the segment mean: S1 ~ 0, S2 is the within-segment sum of squares
        r = y[start:stop] - np.mean(y[start:stop])
        s1 = float(np.sum(r))
        total += float(c2[count] * np.dot(r, r) + c1[count] * s1 * s1)
    return total


@lru_cache(maxsize=32)
def _validation_masks(n: int, p: int) -> np.ndarray:
    """Boolean (C(n,p), n) array, one row per validation set."""
    held_out = np.array(list(combinations(range(n), p)), dtype=np.int64)
    masks = np.zeros((held_out.shape[0], n), dtype=bool)
    masks[np.arange(held_out.shape[0])[:, None], held_out] = True
    masks.setflags(write=False)
    return masks


def lpo_risk_bruteforce(sample: Sample, seg: Segmentation, p: int,
                        empty: str = "conditional") -> float:
    n = sample.n
    _check_p(n, p)
    _check_empty(empty)
    if math.comb(n, p) > BRUTEFORCE_MAX_SPLITS:
        raise GuardError(f"C({n},{p}) validation sets exceed {BRUTEFORCE_MAX_SPLITS}")
    if min(seg.sizes()) == 1:
        return math.inf

    masks = _validation_masks(n, p)
    total = 0.0
    for start, stop in seg.segments():
        val = masks[:, start:stop]
        train = ~val
        n_train = train.sum(axis=1)
        kept = n_train > 0
        if empty == "strict" and not kept.all():
            return math.inf
        y = sample.y[start:stop] - np.mean(sample.y[start:stop])
        level = (train[kept].astype(float) @ y) / n_train[kept]
        err = np.sum(np.where(val[kept], (y[None, :] - level[:, None]) ** 2, 0.0), axis=1)
        total += float(np.sum(err)) / int(np.count_nonzero(kept))
    return total / p


def lpo_select(sample: Sample, d: int, p: int, empty: str = "conditional") -> Segmentation:
    from services.dp import best_partition, build_cost_matrix

    costs = build_cost_matrix(sample, "lpo", p=p, empty=empty)
    _, seg = best_partition(costs, d)
    return seg
