# -*- coding: utf-8 -*-
"""
services/select.py

Dimension selection and the two-step procedure family.

Step 1 (crit1) localizes one segmentation per dimension D:
    erm      empirical risk minimisation
    lpo:p    closed-form Leave-p-out (lpo:1 is Loo)
    ideal    true quadratic loss (simulation only)
Step 2 (crit2) picks D:
    bm:<cal>  Birge-Massart penalty C*(D/n)(5 + 2 ln(n/D)), C calibrated by
              jump | thresh | sigmahat | sigmatrue (slope heuristics or variance)
    vf:V      V-fold cross-validation of the whole crit1 localization rule
    pml       penalized log-variance likelihood (standalone: its own localization)
    ideal     true loss of each localized segmentation (simulation only)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from services.dp import Bellman, bellman, build_cost_matrix
from services.errors import DomainError, InfeasibleError
from services.segmentation import (MIN_SEGMENT_SIZE, DimensionGrid, PiecewiseConstant, Sample,
                                   Segmentation, Signal, fit_regressogram)

BM_C1 = 5.0
BM_C2 = 2.0

CALIBRATIONS = {
    "jump": "jump", "max_jump": "jump",
    "thresh": "thresh", "threshold": "thresh",
    "sigmahat": "sigmahat", "sigma_hat": "sigmahat",
    "sigmatrue": "sigmatrue", "sigma_true": "sigmatrue",
}


# --- Specs ------------------------------------------------------------------------

@dataclass(frozen=True)
class Crit1Spec:
    kind: str = "lpo"
    p: int = 1

    def __post_init__(self):
        if self.kind not in ("erm", "lpo", "ideal"):
            raise DomainError(f"unknown localization criterion {self.kind!r}")
        if self.kind == "lpo" and self.p < 1:
            raise DomainError(f"lpo needs p >= 1, got {self.p}")

    @classmethod
    def parse(cls, text: str) -> "Crit1Spec":
        head, _, arg = text.strip().lower().partition(":")
        if head == "lpo":
            try:
                return cls("lpo", int(arg) if arg else 1)
            except ValueError:
                raise DomainError(f"invalid p in {text!r}")
        if head == "loo" and not arg:
            return cls("lpo", 1)
        if head in ("erm", "ideal") and not arg:
            return cls(head)
        raise DomainError(f"invalid crit1 selector {text!r} (erm | lpo:P | ideal)")

    @property
    def needs_truth(self) -> bool:
        return self.kind == "ideal"

    @property
    def label(self) -> str:
        if self.kind == "lpo":
            return "Loo" if self.p == 1 else f"Lpo{self.p}"
        return {"erm": "ERM", "ideal": "Id"}[self.kind]

    def selector(self) -> str:
        return f"lpo:{self.p}" if self.kind == "lpo" else self.kind


@dataclass(frozen=True)
class Crit2Spec:
    kind: str = "vf"
    calibration: str = "thresh"
    V: int = 5
    overpen: float = 1.0

    def __post_init__(self):
        if self.kind not in ("bm", "vf", "pml", "ideal"):
            raise DomainError(f"unknown dimension criterion {self.kind!r}")
        if self.calibration not in CALIBRATIONS:
            raise DomainError(f"unknown calibration {self.calibration!r}")
        object.__setattr__(self, "calibration", CALIBRATIONS[self.calibration])
        if self.overpen <= 0.0:
            raise DomainError(f"overpenalization multiplier must be > 0, got {self.overpen}")

    @classmethod
    def parse(cls, text: str, overpen: float = 1.0) -> "Crit2Spec":
        head, _, arg = text.strip().lower().partition(":")
        if head == "bm":
            return cls("bm", calibration=arg or "thresh", overpen=overpen)
        if head == "vf":
            try:
                return cls("vf", V=int(arg) if arg else 5)
            except ValueError:
                raise DomainError(f"invalid V in {text!r}")
        if head in ("pml", "ideal") and not arg:
            return cls(head, overpen=overpen)
        raise DomainError(f"invalid crit2 selector {text!r} (bm:CAL | vf:V | pml | ideal)")

    @property
    def needs_truth(self) -> bool:
        return self.kind == "ideal" or (self.kind == "bm" and self.calibration == "sigmatrue")

    @property
    def label(self) -> str:
        if self.kind == "bm":
            tags = [] if self.calibration == "thresh" else [self.calibration]
            if self.overpen != 1.0:
                tags.append(f"x{self.overpen:g}")
            return "BM" + (f"[{','.join(tags)}]" if tags else "")
        if self.kind == "vf":
            return f"VF{self.V}"
        return {"pml": "PML", "ideal": "Id"}[self.kind]

    def selector(self) -> str:
        if self.kind == "bm":
            return f"bm:{self.calibration}"
        if self.kind == "vf":
            return f"vf:{self.V}"
        return self.kind


@dataclass(frozen=True)
class ProcedureSpec:
    crit1: Crit1Spec = field(default_factory=Crit1Spec)
    crit2: Crit2Spec = field(default_factory=Crit2Spec)
    d_max: Optional[int] = None

    @property
    def needs_truth(self) -> bool:
        return self.crit1.needs_truth or self.crit2.needs_truth

    @property
    def label(self) -> str:
        if self.crit2.kind == "pml":
            return self.crit2.label
        return f"{self.crit1.label} x {self.crit2.label}"

    def grid(self, n: int) -> DimensionGrid:
        return DimensionGrid(n, -1 if self.d_max is None else self.d_max)


# --- BM penalty ------------------------------------------------------------------

def bm_shape(d, n: int) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    return d / n * (BM_C1 + BM_C2 * np.log(n / d))


@dataclass(frozen=True)
class PenaltySpec:
    c_hat: float
    n: int
    overpen: float = 1.0

    def __post_init__(self):
        if self.c_hat < 0.0:
            raise DomainError(f"penalty constant must be >= 0, got {self.c_hat}")

    def shape(self, d) -> np.ndarray:
        return bm_shape(d, self.n)

    def penalty(self, d) -> np.ndarray:
        return self.overpen * self.c_hat * self.shape(d)


def bm_dimension_criterion(erm_risks: Sequence[float], pen: PenaltySpec) -> np.ndarray:
    risks = np.asarray(erm_risks, dtype=float)
    return risks + pen.penalty(np.arange(1, risks.size + 1))


# --- Slope heuristics -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SlopePath:
    """D_hat(K) = dims[i] for K in [knots[i], knots[i+1]); knots[0] = 0."""
    knots: np.ndarray
    dims: np.ndarray

    def dimension_at(self, K: float) -> int:
        i = int(np.searchsorted(self.knots, K, side="right")) - 1
        return int(self.dims[max(i, 0)])

    @property
    def jumps(self) -> np.ndarray:
        return self.dims[:-1] - self.dims[1:]


def slope_heuristic_path(risks: Sequence[float], shape: Sequence[float],
                         dims: Optional[Sequence[int]] = None) -> SlopePath:
    """Exact lower envelope of D -> risk(D) + K*shape(D) over K >= 0 (no K grid)."""
    risks = np.asarray(risks, dtype=float)
    shape = np.asarray(shape, dtype=float)
    dims = np.arange(1, risks.size + 1) if dims is None else np.asarray(dims)
    keep = np.isfinite(risks) & np.isfinite(shape)
    risks, shape, dims = risks[keep], shape[keep], dims[keep]
    if risks.size == 0:
        raise InfeasibleError("slope heuristic needs at least one finite risk")

    best = np.flatnonzero(risks == risks.min())
    cur = int(best[np.argmin(shape[best])])
    knots, path = [0.0], [int(dims[cur])]
    while True:
        lower = np.flatnonzero(shape < shape[cur])
        if lower.size == 0:
            break
        cross = (risks[lower] - risks[cur]) / (shape[cur] - shape[lower])
        k_next = max(float(cross.min()), knots[-1])
        tol = 1e-12 * max(1.0, abs(k_next))
        tied = lower[cross <= k_next + tol]
        cur = int(tied[np.argmin(shape[tied])])
        if k_next <= knots[-1]:
            path[-1] = int(dims[cur])
        else:
            knots.append(k_next)
            path.append(int(dims[cur]))
    return SlopePath(np.array(knots), np.array(path, dtype=np.int64))


def d_thresh(n: int) -> int:
    return int(math.floor(n / math.log(n)))


def paired_difference_variance(y: np.ndarray) -> float:
    """(1/m) sum_i (y_2i - y_2i-1)^2 over the first m = 2*floor(n/2) points."""
    y = np.asarray(y, dtype=float)
    m = y.size - y.size % 2
    return float(np.sum((y[1:m:2] - y[0:m:2]) ** 2) / m)


@dataclass(frozen=True)
class CHat:
    value: float
    method: str
    k_hat: Optional[float] = None
    flagged: str = ""


def calibrate_c_hat(method: str, path: Optional[SlopePath] = None, n: Optional[int] = None,
                    sample: Optional[Sample] = None, sigma: Optional[Signal] = None) -> CHat:
    if method not in CALIBRATIONS:
        raise DomainError(f"unknown calibration {method!r}")
    method = CALIBRATIONS[method]

    if method == "sigmahat":
        if sample is None:
            raise DomainError("sigmahat calibration needs the sample")
        if sample.n % 2:
            raise DomainError(f"sigmahat calibration needs even n, got n={sample.n}")
        return CHat(paired_difference_variance(sample.y), method)

    if method == "sigmatrue":
        if sigma is None or sample is None:
            raise DomainError("sigmatrue calibration needs the true noise level (simulation only)")
        return CHat(float(np.mean(np.asarray(sigma.evaluate(sample.t)) ** 2)), method)

    if path is None or n is None:
        raise DomainError(f"{method} calibration needs the slope path and n")
    jumps = path.jumps
    if method == "jump" and jumps.size:
        i = int(np.argmax(jumps)) + 1
        k = float(path.knots[i])
        return CHat(2.0 * k, method, k)

    flagged = "" if jumps.size else "flat slope path"
    if method == "jump":
        flagged = "flat slope path, threshold rule used"
    limit = d_thresh(n)
    if jumps.size and path.dims[0] <= limit:
        # K = 0 already gives D <= D_thresh: the threshold rule would switch the penalty off
        head = f"slope path starts at D={int(path.dims[0])} <= D_thresh={limit}"
        if sample is not None:
            return CHat(paired_difference_variance(sample.y), method, None,
                        f"{head}, paired-difference variance used")
        i = int(np.argmax(jumps)) + 1
        k = float(path.knots[i])
        return CHat(2.0 * k, method, k, f"{head}, max-jump rule used")
    below = np.flatnonzero(path.dims <= limit)
    if below.size == 0:
        k = float(path.knots[-1])
        flagged = flagged or f"path never reaches D <= {limit}"
    else:
        k = float(path.knots[below[0]])
    return CHat(2.0 * k, method, k, flagged)


# --- V-fold -----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FoldAssignment:
    blocks: np.ndarray   # block id 1..V per index
    V: int

    def validation(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.blocks == k)

    def training(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.blocks != k)

    @property
    def max_block_size(self) -> int:
        return int(np.bincount(self.blocks).max())

    def max_dimension(self, min_size: int = MIN_SEGMENT_SIZE) -> int:
        return (self.blocks.size - self.max_block_size) // min_size


def vf_folds(n: int, V: int) -> FoldAssignment:
    if not 2 <= V <= n:
        raise DomainError(f"V={V} out of range 2..{n}")
    blocks = np.arange(n) % V + 1
    blocks.setflags(write=False)
    return FoldAssignment(blocks, V)


def _localize(sample: Sample, crit1: Crit1Spec, d_max: int,
              s_true: Optional[Signal] = None) -> Bellman:
    if crit1.kind == "erm":
        costs = build_cost_matrix(sample, "erm")
    elif crit1.kind == "lpo":
        if crit1.p > sample.n - 1:
            raise DomainError(f"p={crit1.p} too large for a sample of size {sample.n}")
        costs = build_cost_matrix(sample, "lpo", p=crit1.p)
    else:
        if s_true is None:
            raise DomainError("ideal localization needs the true signal (simulation only)")
        costs = build_cost_matrix(sample, "true_loss", s_true=s_true)
    return bellman(costs, d_max)


def vfcv_curve(sample: Sample, folds: FoldAssignment, d_max: int, crit1: Crit1Spec,
               s_true: Optional[Signal] = None) -> np.ndarray:
    """VFCV risk estimate for D = 1..d_max; NaN where D is infeasible on some fold."""
    out = np.full(d_max, np.nan)
    d_top = min(d_max, folds.max_dimension())
    if d_top < 1:
        return out
    acc = np.zeros(d_top)
    for k in range(1, folds.V + 1):
        train = sample.subset(folds.training(k))
        val = folds.validation(k)
        t_val, y_val = sample.t[val], sample.y[val]
        bm = _localize(train, crit1, d_top, s_true)
        for d in range(1, d_top + 1):
            fit = fit_regressogram(train, bm.segmentation(d))
            acc[d - 1] += float(np.mean((y_val - fit.evaluate(t_val)) ** 2))
    out[:d_top] = acc / folds.V
    return out


def vfcv_dimension_criterion(sample: Sample, folds: FoldAssignment, d: int, crit1: Crit1Spec,
                             s_true: Optional[Signal] = None) -> Optional[float]:
    """VFCV criterion at dimension d, or None when d is infeasible on some fold."""
    if d < 1:
        raise DomainError(f"invalid dimension {d}")
    value = vfcv_curve(sample, folds, d, crit1, s_true)[d - 1]
    return None if np.isnan(value) else float(value)


# --- PML --------------------------------------------------------------------------

def pml_path(sample: Sample, d_max: int) -> Bellman:
    return bellman(build_cost_matrix(sample, "pml"), d_max)


def pml_criterion(sample: Sample, d: int) -> Tuple[float, Segmentation]:
    bm = pml_path(sample, d)
    return bm.value(d), bm.segmentation(d)


# --- Procedure --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProcedureResult:
    spec: ProcedureSpec
    segmentation: Segmentation
    fitted: PiecewiseConstant
    d_hat: int
    path: List[Segmentation]
    curves: Dict[str, np.ndarray]
    diagnostics: Dict[str, object]


def _argmin_dimension(crit: np.ndarray) -> int:
    if not np.any(np.isfinite(crit)):
        raise InfeasibleError("no feasible dimension for the selection criterion")
    return int(np.nanargmin(np.where(np.isfinite(crit), crit, np.nan))) + 1


def localization_path(sample: Sample, crit1: Crit1Spec, grid: DimensionGrid,
                      s_true: Optional[Signal] = None) -> Tuple[List[Segmentation], np.ndarray]:
    """Step 1: one segmentation per D = 1..d_max and the crit1 value reached."""
    bm = _localize(sample, crit1, grid.d_max, s_true)
    scale = 1.0 if crit1.kind == "lpo" else 1.0 / sample.n
    values = np.array([bm.value(d) * scale for d in grid.dims])
    return [bm.segmentation(d) for d in grid.dims], values


def run_procedure(spec: ProcedureSpec, sample: Sample, s_true: Optional[Signal] = None,
                  sigma: Optional[Signal] = None) -> ProcedureResult:
    if (spec.crit1.needs_truth or spec.crit2.kind == "ideal") and s_true is None:
        raise DomainError(f"procedure {spec.label} is only available in simulation mode")
    grid = spec.grid(sample.n)
    n = sample.n
    dims = np.arange(1, grid.d_max + 1)
    crit2 = spec.crit2
    curves: Dict[str, np.ndarray] = {}
    diagnostics: Dict[str, object] = {"d_max": grid.d_max, "label": spec.label}

    if crit2.kind == "pml":
        bm = pml_path(sample, grid.d_max)
        path = [bm.segmentation(d) for d in grid.dims]
        risks = np.array([bm.value(d) for d in grid.dims]) / n
        slope = slope_heuristic_path(risks, dims / n)
        c_hat = calibrate_c_hat("thresh", slope, n)
        crit = risks + crit2.overpen * c_hat.value * dims / n
        curves["pml_risk"] = risks
        diagnostics.update(c_hat=c_hat.value, calibration="thresh", flagged=c_hat.flagged)
    else:
        path, values = localization_path(sample, spec.crit1, grid, s_true)
        curves[f"crit1:{spec.crit1.label}"] = values
        if crit2.kind == "bm":
            risks = np.array([np.mean((sample.y - fit_regressogram(sample, m).evaluate(sample.t)) ** 2)
                              for m in path])
            shape = bm_shape(dims, n)
            slope = slope_heuristic_path(risks, shape) if crit2.calibration in ("jump", "thresh") else None
            c_hat = calibrate_c_hat(crit2.calibration, slope, n, sample, sigma)
            crit = bm_dimension_criterion(risks, PenaltySpec(c_hat.value, n, crit2.overpen))
            curves["risk"] = risks
            diagnostics.update(c_hat=c_hat.value, calibration=c_hat.method, flagged=c_hat.flagged)
        elif crit2.kind == "vf":
            crit = vfcv_curve(sample, vf_folds(n, crit2.V), grid.d_max, spec.crit1, s_true)
        else:
            sv = s_true.evaluate(sample.t)
            crit = np.array([np.mean((fit_regressogram(sample, m).evaluate(sample.t) - sv) ** 2)
                             for m in path])
    curves[f"crit2:{crit2.label}"] = crit

    d_hat = _argmin_dimension(crit)
    seg = path[d_hat - 1]
    return ProcedureResult(spec, seg, fit_regressogram(sample, seg), d_hat, path, curves, diagnostics)
