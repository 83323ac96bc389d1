# -*- coding: utf-8 -*-
"""
controllers/simulate_controller.py

Draws one sample from a fixed setting or a random framework.
- <out>            `t,y` (readable by the segment command)
- <out>_truth.csv  `t,s,sigma`
"""

from typing import Callable, Optional

from controllers.run_config import RunConfig, exit_status
from services.csvio import write_sample_csv, write_truth_csv
from services.errors import EXIT_OK
from services.simgen import RandomFrameworkSpec, SimulatedSample, draw_random_framework, \
    make_fixed_signal, make_rng, simulate_sample

try:
    import paths
except Exception:
    paths = None


class SimulateController:
    def __init__(self, on_log: Optional[Callable[[str], None]] = None):
        self._on_log = on_log or (lambda s: None)

    def _emit(self, msg: str):
        try:
            self._on_log(msg)
        except Exception:
            pass

    def run(self, cfg: RunConfig) -> SimulatedSample:
        setting = cfg.simulation_setting()
        rng = make_rng(cfg.seed)
        if isinstance(setting, RandomFrameworkSpec):
            drawn = draw_random_framework(setting, rng)
            s, sigma = drawn.s, drawn.sigma
            self._emit(f"[SIM] {setting.label}: K_s={drawn.details['K_s']} "
                       f"K_sigma={drawn.details['K_sigma']}")
        else:
            s, sigma = make_fixed_signal(setting)
        sim = simulate_sample(s, sigma, setting.n, rng)

        out = cfg.out_file("sample.csv")
        truth = (paths.sibling_path(out, "_truth") if paths is not None
                 else out.with_name(out.stem + "_truth.csv"))
        write_sample_csv(out, sim.sample)
        write_truth_csv(truth, sim.sample.t, sim.s_values, sim.sigma_values)
        self._emit(f"[SIM] {setting.label} n={setting.n} seed={cfg.seed}: wrote {out} and {truth}")
        return sim


@exit_status("SIM")
def cmd_simulate(cfg: RunConfig, on_log: Optional[Callable[[str], None]] = None) -> int:
    SimulateController(on_log).run(cfg)
    return EXIT_OK
