# -*- coding: utf-8 -*-
"""
paths.py
- Centralized path helpers and environment knobs.
- No hard-coded absolute paths.
- HETSEG_HOME    base directory for outputs (default: the app root)
- HETSEG_THREADS worker count for Monte-Carlo replicates (default: 1)
"""

import os
import sys
from pathlib import Path
from typing import Callable, Optional


# --- App root ---------------------------------------------------------------

def app_root() -> Path:
    """Project root (the directory holding this file)."""
    return Path(__file__).resolve().parent


# --- Output directories ------------------------------------------------------

def _user_base() -> Path:
    """Writable base for outputs."""
    return Path(os.getenv("HETSEG_HOME", str(app_root())))

def dir_out() -> Path:
    p = _user_base() / "out"
    p.mkdir(parents=True, exist_ok=True)
    return p

def out_path(name: str) -> Path:
    """Bare file names land in dir_out(); anything with a directory part is kept as given."""
    p = Path(name)
    if p.is_absolute() or p.parent != Path("."):
        return p
    return dir_out() / p

def sibling_path(path: Path, suffix: str) -> Path:
    """out/report.csv + '_curves' -> out/report_curves.csv"""
    return path.with_name(path.stem + suffix + (path.suffix or ".csv"))


# --- Workers -----------------------------------------------------------------

def worker_count(on_log: Optional[Callable[[str], None]] = None) -> int:
    raw = os.getenv("HETSEG_THREADS", "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
        if value >= 1:
            return value
    except ValueError:
        pass
    msg = f"[CLI][WARN] HETSEG_THREADS={raw!r} is not a positive integer, using 1 worker"
    if on_log is not None:
        on_log(msg)
    else:
        print(msg, file=sys.stderr, flush=True)
    return 1
