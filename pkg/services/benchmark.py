# -*- coding: utf-8 -*-
"""
services/benchmark.py

Monte-Carlo harness.
- run_benchmark: loss-ratio indices (Cor1, Cor2, Cor, CorRand) of selection
  procedures against the exact oracle, on common random numbers
- risk_curves: replicate-averaged loss and criterion curves as a function of D
- check_risk_expectations / check_sigma_hat: Monte-Carlo checks of the
  expectation formulas of a fixed segmentation

Each replicate r draws from its own child SeedSequence; replicates run on a
thread pool and are gathered in replicate order, then reduced with fsum, so
reports do not depend on the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from services.criteria import (empirical_risk, oracle_loss, oracle_loss_per_dimension,
                               quadratic_loss, risk_decomposition)
from services.errors import DomainError, InvariantError
from services.lpo import lpo_risk
from services.segmentation import DimensionGrid, Segmentation, Signal, fit_regressogram
from services.select import ProcedureSpec, calibrate_c_hat, run_procedure
from services.simgen import (FixedSetting, RandomFrameworkSpec, draw_random_framework,
                             make_fixed_signal, make_rng, mean_noise_variance,
                             pair_difference_energy, simulate_sample, substreams)

try:
    import paths
except Exception:
    paths = None

ORACLE = "oracle"
ORACLE_TOL = 1e-12

Procedure = Union[ProcedureSpec, str]
Setting = Union[FixedSetting, RandomFrameworkSpec]

BENCH_COLUMNS = ("procedure", "setting", "index_kind", "value", "stderr", "N", "seed",
                 "numerator_stderr", "mean_loss", "mean_oracle_loss")
CURVE_COLUMNS = ("procedure", "curve", "D", "mean", "stderr")


def procedure_label(proc: Procedure) -> str:
    return ORACLE if proc == ORACLE else proc.label


def index_kind(proc: Procedure, setting: Setting) -> str:
    if isinstance(setting, RandomFrameworkSpec):
        return "CorRand"
    if proc == ORACLE:
        return "Cor"
    if proc.crit2.kind == "ideal":
        return "Cor1"
    if proc.crit1.kind == "erm":
        return "Cor2"
    return "Cor"


def _draw(setting: Setting, rng: np.random.Generator) -> Tuple[Signal, Signal]:
    if isinstance(setting, RandomFrameworkSpec):
        drawn = draw_random_framework(setting, rng)
        return drawn.s, drawn.sigma
    return make_fixed_signal(setting)


def _mean(values: np.ndarray) -> float:
    return math.fsum(values.tolist()) / values.size


def _check_unique(labels: List[str]) -> None:
    seen = set()
    for label in labels:
        if label in seen:
            raise DomainError(f"procedure {label!r} listed twice")
        seen.add(label)


# --- Report -----------------------------------------------------------------------

@dataclass(frozen=True)
class BenchRow:
    procedure: str
    setting: str
    index_kind: str
    value: float
    stderr: float
    N: int
    seed: int
    numerator_stderr: float
    mean_loss: float
    mean_oracle_loss: float

    def as_csv_row(self) -> list:
        return [self.procedure, self.setting, self.index_kind, repr(self.value), repr(self.stderr),
                self.N, self.seed, repr(self.numerator_stderr), repr(self.mean_loss),
                repr(self.mean_oracle_loss)]


@dataclass(frozen=True, eq=False)
class BenchReport:
    setting: str
    N: int
    seed: int
    rows: Tuple[BenchRow, ...]
    losses: np.ndarray    # (N, procedures)
    oracle: np.ndarray    # (N,)

    def row(self, procedure: str) -> BenchRow:
        for r in self.rows:
            if r.procedure == procedure:
                return r
        raise KeyError(procedure)

    def index(self, procedure: str) -> float:
        return self.row(procedure).value


def ratio_index(losses: np.ndarray, oracle: np.ndarray) -> Tuple[float, float, float]:
    """mean(losses)/mean(oracle), its delta-method stderr and the numerator SD/sqrt(N) on the same scale."""
    N = losses.size
    m_l = _mean(losses)
    m_o = _mean(oracle)
    ratio = m_l / m_o
    dl = losses - m_l
    do = oracle - m_o
    var_l = math.fsum((dl * dl).tolist()) / (N - 1)
    var_o = math.fsum((do * do).tolist()) / (N - 1)
    cov = math.fsum((dl * do).tolist()) / (N - 1)
    delta = max(var_l - 2.0 * ratio * cov + ratio * ratio * var_o, 0.0)
    return ratio, math.sqrt(delta / N) / m_o, math.sqrt(var_l / N) / m_o


@dataclass(frozen=True)
class CurveRow:
    procedure: str
    curve: str
    D: int
    mean: float
    stderr: float

    def as_csv_row(self) -> list:
        return [self.procedure, self.curve, self.D, repr(self.mean), repr(self.stderr)]


@dataclass(frozen=True, eq=False)
class CurveReport:
    setting: str
    N: int
    seed: int
    rows: Tuple[CurveRow, ...]

    def curve(self, procedure: str, name: str = "loss") -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        sel = [r for r in self.rows if r.procedure == procedure and r.curve == name]
        if not sel:
            raise KeyError(f"{procedure}/{name}")
        return (np.array([r.D for r in sel]), np.array([r.mean for r in sel]),
                np.array([r.stderr for r in sel]))


# --- Harness ----------------------------------------------------------------------

class BenchmarkHarness:
    def __init__(self, on_log: Optional[Callable[[str], None]] = None,
                 workers: Optional[int] = None):
        self._on_log = on_log or (lambda s: None)
        if workers is None:
            workers = paths.worker_count() if paths is not None else 1
        self.workers = max(1, int(workers))

    def _emit(self, msg: str):
        try:
            self._on_log(msg)
        except Exception:
            pass

    def _map(self, fn, items: list) -> list:
        if self.workers == 1:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(fn, items))

    # -- indices --

    def run(self, procedures: Sequence[Procedure], setting: Setting, N: int, seed: int = 0) -> BenchReport:
        if N < 2:
            raise DomainError(f"a benchmark needs N >= 2 replicates, got N={N}")
        procs = list(procedures)
        if not procs:
            raise DomainError("no procedure to benchmark")
        labels = [procedure_label(p) for p in procs]
        _check_unique(labels)
        n = setting.n
        full = DimensionGrid(n, n // 2)
        self._emit(f"[BENCH] {setting.label} n={n} N={N} seed={seed} workers={self.workers} "
                   f"procedures: {', '.join(labels)}")

        def replicate(ss) -> Tuple[np.ndarray, float]:
            rng = make_rng(ss)
            s, sigma = _draw(setting, rng)
            sample = simulate_sample(s, sigma, n, rng).sample
            best, _ = oracle_loss(s, sample, full)
            out = np.empty(len(procs))
            for k, proc in enumerate(procs):
                if proc == ORACLE:
                    out[k] = best
                    continue
                res = run_procedure(proc, sample, s_true=s, sigma=sigma)
                out[k] = quadratic_loss(s, res.fitted, sample.t)
                if out[k] < best - ORACLE_TOL * max(1.0, best):
                    raise InvariantError(
                        f"oracle dominance violated: {labels[k]} loss {out[k]!r} < oracle {best!r}")
            return out, best

        results = self._map(replicate, substreams(seed, N))
        losses = np.vstack([r[0] for r in results])
        oracle = np.array([r[1] for r in results])

        rows = []
        for k, proc in enumerate(procs):
            value, se, num_se = ratio_index(losses[:, k], oracle)
            row = BenchRow(labels[k], setting.label, index_kind(proc, setting), value, se, N, seed,
                           num_se, _mean(losses[:, k]), _mean(oracle))
            rows.append(row)
            self._emit(f"[BENCH] {row.procedure:<16} {row.index_kind:<7} {row.value:.4f} +/- {row.stderr:.4f}")
        return BenchReport(setting.label, N, seed, tuple(rows), losses, oracle)

    # -- curves --

    def curves(self, procedures: Sequence[ProcedureSpec], setting: Setting, N: int, seed: int = 0,
               d_max: Optional[int] = None) -> CurveReport:
        if N < 2:
            raise DomainError(f"risk curves need N >= 2 replicates, got N={N}")
        procs = [p for p in procedures if p != ORACLE]
        labels = [p.label for p in procs]
        _check_unique(labels)
        n = setting.n
        grid = DimensionGrid(n, -1 if d_max is None else d_max)
        procs = [ProcedureSpec(p.crit1, p.crit2, grid.d_max) for p in procs]
        self._emit(f"[CURVE] {setting.label} n={n} N={N} seed={seed} d_max={grid.d_max} "
                   f"procedures: {', '.join(labels)}")

        def replicate(ss) -> Dict[Tuple[str, str], np.ndarray]:
            rng = make_rng(ss)
            s, sigma = _draw(setting, rng)
            sample = simulate_sample(s, sigma, n, rng).sample
            out = {(ORACLE, "loss"): np.array([v for v, _ in oracle_loss_per_dimension(s, sample, grid)])}
            for label, proc in zip(labels, procs):
                res = run_procedure(proc, sample, s_true=s, sigma=sigma)
                out[(label, "loss")] = np.array([quadratic_loss(s, fit_regressogram(sample, m), sample.t)
                                                 for m in res.path])
                for name, values in res.curves.items():
                    out[(label, name)] = np.asarray(values, dtype=float)
            return out

        results = self._map(replicate, substreams(seed, N))
        rows = []
        for key in results[0]:
            stack = np.vstack([r[key] for r in results])
            for d in range(stack.shape[1]):
                col = stack[:, d]
                if np.all(np.isfinite(col)):
                    m = _mean(col)
                    dc = col - m
                    se = math.sqrt(math.fsum((dc * dc).tolist()) / (N - 1) / N)
                else:
                    m, se = math.nan, math.nan
                rows.append(CurveRow(key[0], key[1], d + 1, m, se))
        self._emit(f"[CURVE] done: {len(results[0])} curves x {grid.d_max} dimensions")
        return CurveReport(setting.label, N, seed, tuple(rows))


def run_benchmark(procedures: Sequence[Procedure], setting: Setting, N: int, seed: int = 0,
                  workers: Optional[int] = None,
                  on_log: Optional[Callable[[str], None]] = None) -> BenchReport:
    return BenchmarkHarness(on_log, workers).run(procedures, setting, N, seed)


def risk_curves(procedures: Sequence[ProcedureSpec], setting: Setting, N: int, seed: int = 0,
                d_max: Optional[int] = None, workers: Optional[int] = None,
                on_log: Optional[Callable[[str], None]] = None) -> CurveReport:
    return BenchmarkHarness(on_log, workers).curves(procedures, setting, N, seed, d_max)


# --- Expectation checks -----------------------------------------------------------

@dataclass(frozen=True)
class MonteCarloCheck:
    name: str
    mean: float
    stderr: float
    expected: float

    @property
    def z(self) -> float:
        if self.stderr == 0.0:
            return 0.0 if self.mean == self.expected else math.inf
        return (self.mean - self.expected) / self.stderr

    def passes(self, k: float = 4.0) -> bool:
        return abs(self.z) <= k


def _check(name: str, values: List[float], expected: float) -> MonteCarloCheck:
    arr = np.asarray(values, dtype=float)
    m = _mean(arr)
    d = arr - m
    se = math.sqrt(math.fsum((d * d).tolist()) / (arr.size - 1) / arr.size)
    return MonteCarloCheck(name, m, se, expected)


def check_risk_expectations(s: Signal, sigma: Signal, seg: Segmentation, N: int, seed: int = 0,
                            p_values: Sequence[int] = (1, 5)) -> Dict[str, MonteCarloCheck]:
    """
    Replicate averages for a fixed segmentation against the bias/variance decomposition:
    empirical risk, loss and Leave-p-out risk (large-segment form) for each p.
    """
    n = seg.n
    if N < 2:
        raise DomainError(f"N >= 2 required, got N={N}")
    dec = None
    emp, loss = [], []
    lpo = {p: [] for p in p_values}
    for ss in substreams(seed, N):
        sim = simulate_sample(s, sigma, n, make_rng(ss))
        sample = sim.sample
        if dec is None:
            dec = risk_decomposition(s, sigma, sample.t, seg)
        fit = fit_regressogram(sample, seg)
        emp.append(empirical_risk(sample, fit))
        loss.append(quadratic_loss(s, fit, sample.t))
        for p in p_values:
            lpo[p].append(lpo_risk(sample, seg, p))
    out = {"empirical_risk": _check("empirical_risk", emp, dec.expected_empirical_risk),
           "loss": _check("loss", loss, dec.expected_loss)}
    for p in p_values:
        out[f"lpo:{p}"] = _check(f"lpo:{p}", lpo[p], dec.expected_lpo_risk(p))
    return out


def check_sigma_hat(s: Signal, sigma: Signal, n: int, N: int, seed: int = 0) -> MonteCarloCheck:
    """E[sigma_hat^2] = mean sigma^2 + (1/n) sum (s(t_2i) - s(t_2i-1))^2."""
    values = []
    for ss in substreams(seed, N):
        sample = simulate_sample(s, sigma, n, make_rng(ss)).sample
        values.append(calibrate_c_hat("sigmahat", sample=sample).value)
    return _check("sigma_hat", values, mean_noise_variance(sigma, n) + pair_difference_energy(s, n))
