# -*- coding: utf-8 -*-
"""
controllers/run_config.py

RunConfig: every command-line option with its default, plus the helpers
that turn selector strings into procedure specs.
- build_args() renders a config back to argv (parse_args(build_args()) == config)
- --crit1 / --crit2 accept comma-separated lists; bench/riskcurve run the
  product of both lists on common random numbers
"""

from dataclasses import dataclass
from functools import wraps
from pathlib import Path
from typing import Callable, List, Optional, Union

from services.errors import DomainError, HetsegError, InputError, exit_message
from services.select import Crit1Spec, Crit2Spec, ProcedureSpec
from services.simgen import FixedSetting, RandomFrameworkSpec

try:
    import paths
except Exception:
    paths = None

COMMANDS = ("segment", "simulate", "bench", "riskcurve")


@dataclass
class RunConfig:
    command: str = "segment"
    input: Optional[str] = None
    setting: Optional[str] = None        # s{1,2,3}:{c,pc1,pc2,pc3,s}
    framework: Optional[str] = None      # a | b | c
    n: int = 100
    N: int = 100
    crit1: str = "lpo:1"
    crit2: str = "vf:5"
    d_max: Optional[int] = None
    overpen: float = 1.0
    seed: int = 0
    out: Optional[str] = None
    oracle: bool = False
    quiet: bool = False
    workers: Optional[int] = None

    def build_args(self) -> List[str]:
        a: List[str] = [self.command]
        if self.input is not None:
            a += ["--input", self.input]
        if self.setting is not None:
            a += ["--setting", self.setting]
        if self.framework is not None:
            a += ["--framework", self.framework]
        a += [
            "--n", str(self.n),
            "--N", str(self.N),
            "--crit1", self.crit1,
            "--crit2", self.crit2,
        ]
        if self.d_max is not None:
            a += ["--dmax", str(self.d_max)]
        a += [
            "--overpen", repr(self.overpen),
            "--seed", str(self.seed),
        ]
        if self.out is not None:
            a += ["--out", self.out]
        if self.oracle:
            a += ["--oracle"]
        if self.quiet:
            a += ["--quiet"]
        if self.workers is not None:
            a += ["--workers", str(self.workers)]
        return a

    # --- derived ---

    def crit1_specs(self) -> List[Crit1Spec]:
        return [parse_crit1(tok) for tok in _split(self.crit1, "--crit1")]

    def crit2_specs(self) -> List[Crit2Spec]:
        return [parse_crit2(tok, self.overpen) for tok in _split(self.crit2, "--crit2")]

    def procedures(self) -> List[ProcedureSpec]:
        """Product of the crit1 and crit2 lists, first occurrence of each label kept."""
        out, seen = [], set()
        for c2 in self.crit2_specs():
            for c1 in self.crit1_specs():
                spec = ProcedureSpec(c1, c2, self.d_max)
                if spec.label not in seen:
                    seen.add(spec.label)
                    out.append(spec)
        return out

    def procedure(self) -> ProcedureSpec:
        procs = self.procedures()
        if len(procs) != 1:
            raise InputError(f"{self.command} takes a single procedure, got {len(procs)}")
        return procs[0]

    def simulation_setting(self) -> Union[FixedSetting, RandomFrameworkSpec]:
        if (self.setting is None) == (self.framework is None):
            raise InputError("give exactly one of --setting and --framework")
        try:
            if self.setting is not None:
                return FixedSetting.parse(self.setting, self.n)
            return RandomFrameworkSpec(self.framework, self.n, self.seed)
        except DomainError as e:
            raise InputError(e.message) from None

    def out_file(self, default_name: str) -> Path:
        name = self.out or default_name
        if paths is not None:
            return paths.out_path(name)
        return Path(name)


def _split(text: str, flag: str) -> List[str]:
    toks = [t.strip() for t in text.split(",") if t.strip()]
    if not toks:
        raise InputError(f"{flag}: empty selector")
    return toks


def parse_crit1(text: str) -> Crit1Spec:
    try:
        return Crit1Spec.parse(text)
    except DomainError as e:
        raise InputError(f"--crit1: {e.message}") from None


def parse_crit2(text: str, overpen: float = 1.0) -> Crit2Spec:
    try:
        return Crit2Spec.parse(text, overpen)
    except DomainError as e:
        raise InputError(f"--crit2: {e.message}") from None


def exit_status(tag: str):
    """Wrap cmd_*(config, on_log): HetsegError -> its code with a '[TAG][ERROR]' line."""
    def deco(fn: Callable[..., int]) -> Callable[..., int]:
        @wraps(fn)
        def wrapper(cfg: RunConfig, on_log: Optional[Callable[[str], None]] = None) -> int:
            try:
                return fn(cfg, on_log)
            except HetsegError as e:
                if on_log is not None:
                    try:
                        on_log(f"[{tag}][ERROR] {e} ({exit_message(e.code)})")
                    except Exception:
                        pass
                return e.code
        return wrapper
    return deco
