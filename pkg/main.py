# -*- coding: utf-8 -*-
"""
main.py: hetseg command line

• segment    CSV `t,y` → chosen segmentation + per-D criterion curves
• simulate   one sample from a fixed setting or random framework
• bench      Cor indices of procedures against the exact oracle
• riskcurve  replicate-averaged loss / criterion curves per dimension

Exit codes: 0 OK, 2 input error, 3 infeasible configuration,
4 internal invariant violation, 1 unexpected error (traceback on stderr).
"""

import argparse
import sys
import traceback
from typing import Callable, List, Optional

from controllers.bench_controller import cmd_bench, cmd_riskcurve
from controllers.run_config import COMMANDS, RunConfig
from controllers.segment_controller import cmd_segment
from controllers.simulate_controller import cmd_simulate
from services.errors import EXIT_UNEXPECTED

HANDLERS = {
    "segment": cmd_segment,
    "simulate": cmd_simulate,
    "bench": cmd_bench,
    "riskcurve": cmd_riskcurve,
}


def _common() -> argparse.ArgumentParser:
    d = RunConfig()
    ap = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    ap.add_argument("--input",     type=str,   default=None, help="CSV file with header t,y (segment)")
    ap.add_argument("--setting",   type=str,   default=None, help="s{1,2,3}:{c,pc1,pc2,pc3,s}")
    ap.add_argument("--framework", type=str,   default=None, choices=["a", "b", "c", "A", "B", "C"])
    ap.add_argument("--n",         type=int,   default=d.n, help="sample size of simulated data")
    ap.add_argument("--N",         type=int,   default=d.N, help="Monte-Carlo replicates")
    ap.add_argument("--crit1",     type=str,   default=d.crit1, help="erm | lpo:P | ideal (comma list)")
    ap.add_argument("--crit2",     type=str,   default=d.crit2,
                    help="bm:{jump,thresh,sigmahat,sigmatrue} | vf:V | pml | ideal (comma list)")
    ap.add_argument("--dmax",      type=int,   default=None, dest="d_max", help="largest dimension (default 4n/10)")
    ap.add_argument("--overpen",   type=float, default=d.overpen, help="penalty multiplier (bm, pml)")
    ap.add_argument("--seed",      type=int,   default=d.seed)
    ap.add_argument("--out",       type=str,   default=None, help="output CSV (bare names go to $HETSEG_HOME/out)")
    ap.add_argument("--oracle",    action="store_true", help="bench: add the exact-oracle pseudo-procedure")
    ap.add_argument("--quiet",     action="store_true", help="no log lines on stderr")
    ap.add_argument("--workers",   type=int,   default=None, help="replicate workers (overrides HETSEG_THREADS)")
    return ap


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hetseg", description="Change-point detection with heteroscedastic noise",
                                 allow_abbrev=False)
    sub = ap.add_subparsers(dest="command", required=True)
    common = _common()
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], allow_abbrev=False)
    return ap


def parse_args(argv: Optional[List[str]] = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    fw = ns.framework.lower() if ns.framework else None
    return RunConfig(command=ns.command, input=ns.input, setting=ns.setting, framework=fw,
                     n=ns.n, N=ns.N, crit1=ns.crit1, crit2=ns.crit2, d_max=ns.d_max,
                     overpen=ns.overpen, seed=ns.seed, out=ns.out, oracle=ns.oracle,
                     quiet=ns.quiet, workers=ns.workers)


def stderr_sink(quiet: bool = False) -> Callable[[str], None]:
    if quiet:
        return lambda s: None
    return lambda s: print(s, file=sys.stderr, flush=True)


def install_excepthook():
    """Uncaught exceptions: traceback on stderr and exit 1."""
    def _hook(etype, value, tb):
        text = "".join(traceback.format_exception(etype, value, tb))
        try:
            print("[CLI][FATAL]\n" + text, file=sys.stderr, flush=True)
        except Exception:
            pass
        sys.exit(EXIT_UNEXPECTED)

    sys.excepthook = _hook


def run(cfg: RunConfig, on_log: Optional[Callable[[str], None]] = None) -> int:
    return HANDLERS[cfg.command](cfg, on_log)


def main(argv: Optional[List[str]] = None) -> int:
    install_excepthook()
    cfg = parse_args(argv)
    try:
        return run(cfg, stderr_sink(cfg.quiet))
    except Exception:
        print("[CLI][FATAL]\n" + traceback.format_exc(), file=sys.stderr, flush=True)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
