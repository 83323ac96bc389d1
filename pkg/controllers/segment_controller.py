# -*- coding: utf-8 -*-
"""
controllers/segment_controller.py

Flow: CSV `t,y` → procedure (crit1 localization, crit2 dimension choice) → outputs
- <out>             one row per segment (D_hat, index range, t range, mean)
- <out>_curves.csv  per-D criterion values with the localized breakpoints
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

from controllers.run_config import RunConfig, exit_status
from services.csvio import read_sample_csv, write_curves_csv, write_segmentation_csv
from services.errors import EXIT_OK, InputError
from services.segmentation import Sample
from services.select import ProcedureResult, run_procedure

try:
    import paths
except Exception:
    paths = None


@dataclass
class SegmentOutcome:
    sample: Sample
    result: ProcedureResult
    summary_path: Path
    curves_path: Path


class SegmentController:
    def __init__(self, on_log: Optional[Callable[[str], None]] = None):
        self._on_log = on_log or (lambda s: None)

    def _emit(self, msg: str):
        try:
            self._on_log(msg)
        except Exception:
            pass

    def run(self, cfg: RunConfig) -> SegmentOutcome:
        if not cfg.input:
            raise InputError("segment needs --input")
        spec = cfg.procedure()
        sample = read_sample_csv(cfg.input)
        self._emit(f"[SEG] {cfg.input}: n={sample.n}, procedure {spec.label}")

        result = run_procedure(spec, sample)
        seg = result.segmentation
        bps = seg.to_string() or "-"
        self._emit(f"[SEG] D_hat={result.d_hat} breakpoints={bps} (d_max={result.diagnostics['d_max']})")
        if "c_hat" in result.diagnostics:
            self._emit(f"[SEG] C_hat={result.diagnostics['c_hat']:.6g} "
                       f"({result.diagnostics['calibration']})")
        if result.diagnostics.get("flagged"):
            self._emit(f"[SEG][WARN] {result.diagnostics['flagged']}")

        summary = cfg.out_file("segment.csv")
        curves = (paths.sibling_path(summary, "_curves") if paths is not None
                  else summary.with_name(summary.stem + "_curves.csv"))
        write_segmentation_csv(summary, sample, seg, result.fitted)
        write_curves_csv(curves, result.curves, result.path)
        self._emit(f"[SEG] wrote {summary} and {curves}")
        return SegmentOutcome(sample, result, summary, curves)


@exit_status("SEG")
def cmd_segment(cfg: RunConfig, on_log: Optional[Callable[[str], None]] = None) -> int:
    SegmentController(on_log).run(cfg)
    return EXIT_OK
