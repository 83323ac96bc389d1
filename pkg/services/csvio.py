# -*- coding: utf-8 -*-
"""
services/csvio.py

CSV reading/writing for the command line.
- read_sample_csv: header `t,y`, one observation per line, t strictly increasing in [0,1]
- writers for segmentation summaries, per-D curves, benchmark reports and risk curves

Floats are written with repr() so files are byte-identical for identical inputs.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Union

import numpy as np

from services.errors import DomainError, InputError
from services.segmentation import PiecewiseConstant, Sample, Segmentation

PathLike = Union[str, Path]


def _float(text: str, line: int, name: str) -> float:
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise InputError(f"{name}={text!r} is not a number", line) from None
    if not math.isfinite(value):
        raise InputError(f"{name}={text!r} is not finite", line)
    return value


def read_sample_csv(path: PathLike) -> Sample:
    p = Path(path)
    try:
        fh = p.open(newline="", encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot open {p}: {e.strerror or e}") from None
    t: List[float] = []
    y: List[float] = []
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise InputError("empty file", 1)
        if [h.strip().lower() for h in header] != ["t", "y"]:
            raise InputError(f"expected header 't,y', got {','.join(header)!r}", 1)
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise InputError(f"expected 2 fields, got {len(row)}", line)
            tv = _float(row[0].strip(), line, "t")
            yv = _float(row[1].strip(), line, "y")
            if not 0.0 <= tv <= 1.0:
                raise InputError(f"t={tv!r} outside [0,1]", line)
            if t and tv <= t[-1]:
                raise InputError(f"t={tv!r} not strictly increasing (previous {t[-1]!r})", line)
            t.append(tv)
            y.append(yv)
    if len(t) < 2:
        raise InputError(f"need at least 2 observations, got {len(t)}")
    try:
        return Sample(np.array(t), np.array(y))
    except DomainError as e:
        raise InputError(e.message) from None


def _write(path: PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with p.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)
    return p


def write_sample_csv(path: PathLike, sample: Sample) -> Path:
    return _write(path, ("t", "y"), ([repr(float(a)), repr(float(b))] for a, b in zip(sample.t, sample.y)))


def write_truth_csv(path: PathLike, t: np.ndarray, s: np.ndarray, sigma: np.ndarray) -> Path:
    return _write(path, ("t", "s", "sigma"),
                  ([repr(float(a)), repr(float(b)), repr(float(c))] for a, b, c in zip(t, s, sigma)))


def write_segmentation_csv(path: PathLike, sample: Sample, seg: Segmentation,
                           fitted: PiecewiseConstant) -> Path:
    """One row per segment: D_hat, segment index, first/last index, t range, mean."""
    d_hat = seg.dimension
    rows = []
    for k, ((start, stop), level) in enumerate(zip(seg.segments(), fitted.levels), 1):
        rows.append([d_hat, k, start + 1, stop, repr(float(sample.t[start])),
                     repr(float(sample.t[stop - 1])), repr(float(level))])
    return _write(path, ("D_hat", "segment", "first", "last", "t_first", "t_last", "mean"), rows)


def read_segmentation_csv(path: PathLike, n: int) -> Segmentation:
    """Breakpoints back from a segmentation summary (the `first` column past the first row)."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        firsts = [int(r["first"]) for r in reader]
    return Segmentation(tuple(firsts[1:]), n)


def write_curves_csv(path: PathLike, curves: Dict[str, np.ndarray], path_segs: Sequence[Segmentation]) -> Path:
    rows = []
    for name, values in curves.items():
        for d, v in enumerate(np.asarray(values, dtype=float), 1):
            rows.append([name, d, repr(float(v)), path_segs[d - 1].to_string()])
    return _write(path, ("criterion", "D", "crit_value", "breakpoints"), rows)


def write_rows_csv(path: PathLike, header: Sequence[str], rows: Iterable) -> Path:
    """Rows exposing as_csv_row() (benchmark and curve reports)."""
    return _write(path, header, (r.as_csv_row() for r in rows))
