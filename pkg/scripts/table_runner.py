# scripts/table_runner.py
#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Comparative table over fixed settings: every (s, sigma) pair x a list of
procedures, one benchmark per setting on the same seed, rows appended to a
single CSV (benchmark columns).
"""

import sys
import argparse
import traceback
from pathlib import Path
from typing import Callable, List, Optional, Sequence

# project root on sys.path when launched as a file
ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from services.benchmark import BENCH_COLUMNS, ORACLE, BenchReport, run_benchmark  # noqa: E402
from services.csvio import write_rows_csv  # noqa: E402
from services.errors import HetsegError  # noqa: E402
from services.select import Crit1Spec, Crit2Spec, ProcedureSpec  # noqa: E402
from services.simgen import REGRESSION_FUNCTIONS, SIGMA_IDS, FixedSetting  # noqa: E402

DEFAULT_PROCEDURES = (
    ("erm", "bm:thresh"),
    ("erm", "vf:5"),
    ("lpo:1", "bm:thresh"),
    ("lpo:1", "vf:5"),
    ("lpo:20", "vf:5"),
    ("erm", "pml"),
)


def all_settings(n: int = 100) -> List[FixedSetting]:
    return [FixedSetting(s_id, sigma_id, n) for s_id in REGRESSION_FUNCTIONS for sigma_id in SIGMA_IDS]


def default_procedures() -> List[ProcedureSpec]:
    return [ProcedureSpec(Crit1Spec.parse(c1), Crit2Spec.parse(c2)) for c1, c2 in DEFAULT_PROCEDURES]


def run_table(settings: Sequence[FixedSetting], procedures: Sequence, N: int, seed: int = 0,
              workers: Optional[int] = None,
              on_log: Optional[Callable[[str], None]] = None) -> List[BenchReport]:
    reports = []
    for setting in settings:
        reports.append(run_benchmark(procedures, setting, N, seed, workers=workers, on_log=on_log))
    return reports


def parse_args(argv=None):
    ap = argparse.ArgumentParser(description="Comparative table over the fixed settings")
    ap.add_argument("--out",      required=True, help="CSV output path")
    ap.add_argument("--settings", type=str, default="", help="comma list, e.g. s1:c,s2:pc3 (default: all 15)")
    ap.add_argument("--n",        type=int, default=100)
    ap.add_argument("--N",        type=int, default=300)
    ap.add_argument("--seed",     type=int, default=0)
    ap.add_argument("--workers",  type=int, default=None)
    ap.add_argument("--oracle",   action="store_true")
    return ap.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    log = lambda s: print(s, file=sys.stderr, flush=True)  # noqa: E731
    try:
        if args.settings:
            settings = [FixedSetting.parse(tok, args.n) for tok in args.settings.split(",") if tok.strip()]
        else:
            settings = all_settings(args.n)
        procs = default_procedures() + ([ORACLE] if args.oracle else [])
        reports = run_table(settings, procs, args.N, args.seed, args.workers, log)
        rows = [row for rep in reports for row in rep.rows]
        out = write_rows_csv(args.out, BENCH_COLUMNS, rows)
        log(f"[BENCH] table: {len(settings)} settings x {len(procs)} procedures -> {out}")
        return 0
    except HetsegError as e:
        log(f"[BENCH][ERROR] {e}")
        return e.code
    except Exception:
        log("[BENCH] FATAL ERROR:\n" + traceback.format_exc())
        return 1


if __name__ == "__main__":
    sys.exit(main())
