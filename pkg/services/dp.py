# -*- coding: utf-8 -*-
"""
services/dp.py

Exact dynamic programming over segment-additive costs.

Cost kinds (per segment of consecutive indices; sums are accumulated per end
point, re-centred on the last observation of the segment):
- "erm"        sum (y_k - mean)^2                     (unnormalised; divide by n to report)
- "lpo"        closed-form Leave-p-out term            (already on the risk scale)
- "true_loss"  sum (mean_y - s(t_k))^2                 (unnormalised)
- "pml"        n_seg * log(max(var_seg, eps_var))

Bellman recursion F_d(j) = min_i F_{d-1}(i) + c(i, j) in O(n^2 d); ties go to
the smallest start of the last segment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from services.errors import DomainError, InfeasibleError
from services.lpo import lpo_coefficients
from services.segmentation import MIN_SEGMENT_SIZE, Sample, Segmentation, Signal

COST_KINDS = ("erm", "lpo", "true_loss", "pml")
DENSE_MAX_N = 5000        # above: columns computed on the fly
MATRIX_DP_MAX_N = 1000    # above: column-wise recursion instead of full-matrix steps
PML_EPS_REL = 1e-12


@dataclass(frozen=True, eq=False)
class CostMatrix:
    kind: str
    n: int
    min_size: int
    y: np.ndarray
    s: Optional[np.ndarray] = None      # s(t_k) (true_loss)
    c2: Optional[np.ndarray] = None     # lpo coefficients per segment length
    c1: Optional[np.ndarray] = None
    eps_var: float = 0.0
    dense: Optional[np.ndarray] = field(default=None, repr=False)

    def _from_sums(self, length, s1, s2, m1=None, m2=None) -> np.ndarray:
        if self.kind == "erm":
            return np.maximum(s2 - s1 * s1 / length, 0.0)
        if self.kind == "lpo":
            c2 = self.c2[length]
            finite = np.isfinite(c2)
            return np.where(finite, np.where(finite, c2, 0.0) * s2 + self.c1[length] * s1 * s1, np.inf)
        if self.kind == "true_loss":
            return np.maximum(s1 * s1 / length - 2.0 * s1 * m1 / length + m2, 0.0)
        var = np.maximum(s2 - s1 * s1 / length, 0.0) / length
        return length * np.log(np.maximum(var, self.eps_var))

    def _column(self, stop: int) -> np.ndarray:
        out = np.full(self.n + 1, np.inf)
        last = stop - self.min_size          # largest admissible 0-based start
        if last < 0:
            return out
        # sums of [i, stop) re-centred on y[stop-1], accumulated from the right
        anchor = self.y[stop - 1]
        r = self.y[:stop] - anchor
        s1 = np.cumsum(r[::-1])[::-1]
        s2 = np.cumsum((r * r)[::-1])[::-1]
        m1 = m2 = None
        if self.s is not None:
            q = self.s[:stop] - anchor
            m1 = np.cumsum(q[::-1])[::-1]
            m2 = np.cumsum((q * q)[::-1])[::-1]
            m1, m2 = m1[:last + 1], m2[:last + 1]
        length = stop - np.arange(last + 1)
        out[:last + 1] = self._from_sums(length, s1[:last + 1], s2[:last + 1], m1, m2)
        return out

    def column(self, stop: int) -> np.ndarray:
        """Costs c(i, stop) for every 0-based start i = 0..n (inf when inadmissible)."""
        if self.dense is not None:
            return self.dense[:, stop]
        return self._column(stop)

    def segment_cost(self, i: int, j: int) -> float:
        """Cost of the segment of 1-based indices i..j inclusive."""
        if not 1 <= i <= j <= self.n:
            raise DomainError(f"segment [{i},{j}] outside 1..{self.n}")
        return float(self.column(j)[i - 1])

    def total(self, seg: Segmentation) -> float:
        return float(sum(self.column(b)[a] for a, b in seg.segments()))


def build_cost_matrix(sample: Sample, kind: str, p: Optional[int] = None,
                      s_true: Optional[Signal] = None, min_size: int = MIN_SEGMENT_SIZE,
                      empty: str = "conditional") -> CostMatrix:
    if kind not in COST_KINDS:
        raise DomainError(f"unknown cost kind {kind!r}")
    n = sample.n
    extra = {}
    if kind == "lpo":
        if p is None:
            raise DomainError("lpo costs need p")
        extra["c2"], extra["c1"] = lpo_coefficients(n, p, empty)
    elif kind == "true_loss":
        if s_true is None:
            raise DomainError("true_loss costs need the true signal")
        sv = np.array(s_true.evaluate(sample.t), dtype=float) * np.ones(n)
        sv.setflags(write=False)
        extra["s"] = sv
    elif kind == "pml":
        extra["eps_var"] = PML_EPS_REL * (float(np.var(sample.y)) + 1e-300)

    costs = CostMatrix(kind, n, int(min_size), sample.y, **extra)
    if n <= DENSE_MAX_N:
        dense = np.column_stack([costs._column(j) for j in range(n + 1)])
        dense.setflags(write=False)
        object.__setattr__(costs, "dense", dense)
    return costs


@dataclass(frozen=True, eq=False)
class Bellman:
    costs: CostMatrix
    table: np.ndarray     # table[d, j]: best cost of [0, j) in d segments
    arg: np.ndarray       # arg[d, j]: start of the last segment, -1 if none

    @property
    def d_max(self) -> int:
        return self.table.shape[0] - 1

    def value(self, d: int) -> float:
        return float(self.table[d, self.costs.n])

    def segmentation(self, d: int) -> Segmentation:
        n = self.costs.n
        if not np.isfinite(self.table[d, n]):
            # every admissible partition is +inf; return the lexicographically first
            m = self.costs.min_size
            return Segmentation(tuple(1 + k * m for k in range(1, d)), n)
        bounds = [n]
        end = n
        for level in range(d, 0, -1):
            end = int(self.arg[level, end])
            bounds.append(end)
        return Segmentation.from_bounds(bounds[::-1])


def _check_dimension(costs: CostMatrix, d: int) -> None:
    if d < 1 or d * costs.min_size > costs.n:
        raise InfeasibleError(
            f"dimension {d} infeasible for n={costs.n} with segments of >= {costs.min_size} points")


def bellman(costs: CostMatrix, d_max: int) -> Bellman:
    _check_dimension(costs, d_max)
    n = costs.n
    table = np.full((d_max + 1, n + 1), np.inf)
    arg = np.full((d_max + 1, n + 1), -1, dtype=np.int64)
    table[0, 0] = 0.0
    use_matrix = costs.dense is not None and n <= MATRIX_DP_MAX_N
    for d in range(1, d_max + 1):
        prev = table[d - 1]
        if use_matrix:
            cand = prev[:, None] + costs.dense
            best = np.argmin(cand, axis=0)
            vals = cand[best, np.arange(n + 1)]
        else:
            best = np.full(n + 1, -1, dtype=np.int64)
            vals = np.full(n + 1, np.inf)
            for j in range(d * costs.min_size, n + 1):
                cand = prev[:j] + costs.column(j)[:j]
                k = int(np.argmin(cand))
                best[j], vals[j] = k, cand[k]
        finite = np.isfinite(vals)
        table[d] = np.where(finite, vals, np.inf)
        arg[d] = np.where(finite, best, -1)
    return Bellman(costs, table, arg)


def best_partition(costs: CostMatrix, d: int) -> Tuple[float, Segmentation]:
    bm = bellman(costs, d)
    return bm.value(d), bm.segmentation(d)


def best_partition_all(costs: CostMatrix, d_max: int) -> List[Tuple[float, Segmentation]]:
    """Optimal value and argmin for every d = 1..d_max (index 0 is d = 1)."""
    bm = bellman(costs, d_max)
    return [(bm.value(d), bm.segmentation(d)) for d in range(1, d_max + 1)]
