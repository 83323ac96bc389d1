# -*- coding: utf-8 -*-
"""
controllers/bench_controller.py

bench:      procedures x setting → Cor indices CSV
riskcurve:  procedures x setting → mean loss / criterion per D CSV

Worker count: --workers, else HETSEG_THREADS, else 1. Output files do not
depend on it.
"""

from pathlib import Path
from typing import Callable, Optional, Tuple

from controllers.run_config import RunConfig, exit_status
from services.benchmark import (BENCH_COLUMNS, CURVE_COLUMNS, ORACLE, BenchReport, CurveReport,
                                risk_curves, run_benchmark)
from services.csvio import write_rows_csv
from services.errors import EXIT_OK, InputError

try:
    import paths
except Exception:
    paths = None


class BenchController:
    def __init__(self, on_log: Optional[Callable[[str], None]] = None):
        self._on_log = on_log or (lambda s: None)

    def _emit(self, msg: str):
        try:
            self._on_log(msg)
        except Exception:
            pass

    def _workers(self, cfg: RunConfig) -> int:
        if cfg.workers is not None:
            if cfg.workers < 1:
                raise InputError(f"--workers must be >= 1, got {cfg.workers}")
            return cfg.workers
        return paths.worker_count(self._on_log) if paths is not None else 1

    def bench(self, cfg: RunConfig) -> Tuple[BenchReport, Path]:
        setting = cfg.simulation_setting()
        procs = list(cfg.procedures())
        if cfg.oracle:
            procs.append(ORACLE)
        report = run_benchmark(procs, setting, cfg.N, cfg.seed,
                               workers=self._workers(cfg), on_log=self._on_log)
        out = write_rows_csv(cfg.out_file("bench.csv"), BENCH_COLUMNS, report.rows)
        self._emit(f"[BENCH] wrote {out}")
        return report, out

    def riskcurve(self, cfg: RunConfig) -> Tuple[CurveReport, Path]:
        setting = cfg.simulation_setting()
        report = risk_curves(cfg.procedures(), setting, cfg.N, cfg.seed, d_max=cfg.d_max,
                             workers=self._workers(cfg), on_log=self._on_log)
        out = write_rows_csv(cfg.out_file("riskcurve.csv"), CURVE_COLUMNS, report.rows)
        self._emit(f"[CURVE] wrote {out}")
        return report, out


@exit_status("BENCH")
def cmd_bench(cfg: RunConfig, on_log: Optional[Callable[[str], None]] = None) -> int:
    BenchController(on_log).bench(cfg)
    return EXIT_OK


@exit_status("CURVE")
def cmd_riskcurve(cfg: RunConfig, on_log: Optional[Callable[[str], None]] = None) -> int:
    BenchController(on_log).riskcurve(cfg)
    return EXIT_OK
