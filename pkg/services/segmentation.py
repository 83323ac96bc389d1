# -*- coding: utf-8 -*-
"""
services/segmentation.py

Data model for change-point detection on a fixed design:
- Sample              ordered design points t_1 < ... < t_n in [0,1] with observations y
- Segmentation        breakpoints alpha_1 < ... < alpha_{D-1} (1-based, alpha_0 = 1 implicit)
- PiecewiseConstant   step function on [0,1]; first interval extended to 0, last closed at 1
- SmoothFunction      vectorised callable on [0,1] (smooth noise levels)
- DimensionGrid       the dimensions 1..d_max explored by model selection

All objects are immutable once built; arrays are stored read-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterator, List, NamedTuple, Sequence, Tuple, Union

import numpy as np

from services.errors import DomainError, GuardError, InfeasibleError

MIN_SEGMENT_SIZE = 2
ENUMERATION_MAX_N = 16


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


# --- Sample -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Sample:
    t: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        t = _frozen(self.t)
        y = _frozen(self.y)
        if t.ndim != 1 or y.ndim != 1:
            raise DomainError("t and y must be one-dimensional")
        if t.size != y.size:
            raise DomainError(f"t and y lengths differ ({t.size} != {y.size})")
        if t.size < 2:
            raise DomainError("a sample needs at least 2 observations")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(y))):
            raise DomainError("t and y must be finite")
        if np.any(np.diff(t) <= 0.0):
            raise DomainError("design points must be strictly increasing")
        if t[0] < 0.0 or t[-1] > 1.0:
            raise DomainError("design points must lie in [0,1]")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return int(self.y.size)

    @classmethod
    def regular(cls, y: Sequence[float]) -> "Sample":
        """Sample on the regular design t_i = i/n."""
        y = np.asarray(y, dtype=float)
        return cls(design(y.size), y)

    def subset(self, index: np.ndarray) -> "Sample":
        return Sample(self.t[index], self.y[index])

    def with_y(self, y: Sequence[float]) -> "Sample":
        return Sample(self.t, y)


def design(n: int) -> np.ndarray:
    """Regular design t_i = i/n, i = 1..n."""
    return np.arange(1, n + 1, dtype=float) / float(n)


# --- Segmentation ---------------------------------------------------------------

class SegmentStats(NamedTuple):
    count: int
    s1: float
    s2: float


@dataclass(frozen=True)
class Segmentation:
    breakpoints: Tuple[int, ...]
    n: int

    def __post_init__(self):
        bps = tuple(int(b) for b in self.breakpoints)
        n = int(self.n)
        if n < 1:
            raise DomainError(f"invalid sample size n={n}")
        prev = 1
        for b in bps:
            if b <= prev or b > n:
                raise DomainError(
                    f"breakpoints must be strictly increasing within 2..{n}: {bps}")
            prev = b
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "n", n)

    @property
    def dimension(self) -> int:
        return len(self.breakpoints) + 1

    def bounds(self) -> List[int]:
        """0-based segment boundaries [0, alpha_1 - 1, ..., n]."""
        return [0] + [b - 1 for b in self.breakpoints] + [self.n]

    def segments(self) -> Iterator[Tuple[int, int]]:
        """0-based half-open (start, stop) index ranges."""
        b = self.bounds()
        return zip(b[:-1], b[1:])

    def sizes(self) -> List[int]:
        return [stop - start for start, stop in self.segments()]

    def is_admissible(self, min_size: int = MIN_SEGMENT_SIZE) -> bool:
        return min(self.sizes()) >= min_size

    def to_string(self) -> str:
        return ",".join(str(b) for b in self.breakpoints)

    @classmethod
    def from_string(cls, text: str, n: int) -> "Segmentation":
        text = text.strip()
        if not text:
            return cls((), n)
        try:
            bps = tuple(int(tok) for tok in text.split(","))
        except ValueError:
            raise DomainError(f"invalid breakpoint list: {text!r}")
        return cls(bps, n)

    @classmethod
    def from_bounds(cls, bounds: Sequence[int]) -> "Segmentation":
        """Inverse of bounds(): 0-based boundaries incl. 0 and n."""
        return cls(tuple(int(b) + 1 for b in bounds[1:-1]), int(bounds[-1]))


# --- Functions on [0,1] ---------------------------------------------------------

def _check_unit(t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0) or not np.all(np.isfinite(arr)):
        raise DomainError("evaluation points must lie in [0,1]")
    return arr


@dataclass(frozen=True, eq=False)
class PiecewiseConstant:
    """
    Step function with K cut positions and K+1 levels:
    [0,c_1), [c_1,c_2), ..., [c_K,1]. Cuts lie in (0,1].
    """
    cut_positions: np.ndarray
    levels: np.ndarray

    def __post_init__(self):
        cuts = _frozen(self.cut_positions).reshape(-1)
        levels = _frozen(self.levels).reshape(-1)
        if levels.size != cuts.size + 1:
            raise DomainError(
                f"expected {cuts.size + 1} levels for {cuts.size} cuts, got {levels.size}")
        if cuts.size and (cuts[0] <= 0.0 or cuts[-1] > 1.0 or np.any(np.diff(cuts) <= 0.0)):
            raise DomainError("cut positions must be strictly increasing in (0,1]")
        object.__setattr__(self, "cut_positions", cuts)
        object.__setattr__(self, "levels", levels)

    @classmethod
    def constant(cls, value: float) -> "PiecewiseConstant":
        return cls(np.empty(0), np.array([value]))

    @property
    def jumps(self) -> int:
        return int(np.count_nonzero(np.diff(self.levels)))

    def evaluate(self, t):
        arr = _check_unit(t)
        idx = np.searchsorted(self.cut_positions, arr, side="right")
        out = self.levels[idx]
        return float(out) if np.ndim(out) == 0 else out

    __call__ = evaluate


@dataclass(frozen=True, eq=False)
class SmoothFunction:
    func: Callable[[np.ndarray], np.ndarray]
    name: str = "smooth"

    def evaluate(self, t):
        arr = _check_unit(t)
        out = np.asarray(self.func(arr), dtype=float)
        return float(out) if out.ndim == 0 else out

    __call__ = evaluate


Signal = Union[PiecewiseConstant, SmoothFunction]


def evaluate(f: Signal, t):
    """Value of f at t (scalar or array); t outside [0,1] is a domain error."""
    return f.evaluate(t)


# --- Dimension grid -------------------------------------------------------------

@dataclass(frozen=True)
class DimensionGrid:
    n: int
    d_max: int = field(default=-1)

    def __post_init__(self):
        n = int(self.n)
        d_max = int(self.d_max)
        if d_max < 0:
            d_max = max(1, min((4 * n) // 10, n // MIN_SEGMENT_SIZE))
        if not 1 <= d_max <= n // MIN_SEGMENT_SIZE:
            raise InfeasibleError(
                f"d_max={d_max} infeasible for n={n} (need 1 <= d_max <= {n // MIN_SEGMENT_SIZE})")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "d_max", d_max)

    @property
    def dims(self) -> range:
        return range(1, self.d_max + 1)


# --- Operations -----------------------------------------------------------------

def _check_match(sample: Sample, seg: Segmentation) -> None:
    if seg.n != sample.n:
        raise DomainError(f"segmentation is for n={seg.n}, sample has n={sample.n}")


def segment_stats(sample: Sample, seg: Segmentation) -> List[SegmentStats]:
    _check_match(sample, seg)
    y = sample.y
    return [SegmentStats(stop - start,
                         float(np.sum(y[start:stop])),
                         float(np.sum(y[start:stop] ** 2)))
            for start, stop in seg.segments()]


def fit_regressogram(sample: Sample, seg: Segmentation) -> PiecewiseConstant:
    """Least-squares fit on seg: the per-segment mean, cuts at t_{alpha_j}."""
    _check_match(sample, seg)
    levels = [float(np.mean(sample.y[start:stop])) for start, stop in seg.segments()]
    cuts = [float(sample.t[b - 1]) for b in seg.breakpoints]
    return PiecewiseConstant(np.array(cuts), np.array(levels))


def enumerate_segmentations(n: int, d: int,
                            min_size: int = MIN_SEGMENT_SIZE) -> List[Segmentation]:
    """All segmentations of 1..n into d segments of >= min_size points, lexicographic."""
    if n > ENUMERATION_MAX_N:
        raise GuardError(f"enumeration refused for n={n} > {ENUMERATION_MAX_N}")
    if d < 1 or d * min_size > n:
        raise InfeasibleError(f"no segmentation of n={n} into d={d} segments of size >= {min_size}")
    out = []
    for bps in combinations(range(2, n + 1), d - 1):
        bounds = (1,) + bps + (n + 1,)
        if all(b - a >= min_size for a, b in zip(bounds[:-1], bounds[1:])):
            out.append(Segmentation(bps, n))
    return out
