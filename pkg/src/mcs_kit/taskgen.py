"""Random taskset generation with utilization-bound targeting.

Tasks are drawn one at a time (period, criticality, low utilization and
the pessimistic/optimistic budget ratio all uniform) and integerized onto
the tick grid with round-half-up; drawing stops at the first task whose
addition would push ``max(U_ll + U_hl, U_hh)`` past the target bound, and
that task is discarded.  All HC tasks land in one component, all LC tasks
in another; deadlines are implicit and virtual deadlines start untightened
(the tightening search assigns them downstream).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import Component, CriticalityLevel, MCTask, SystemSpec, validate_system

HC = CriticalityLevel.HC
LC = CriticalityLevel.LC


class GenerationError(ValueError):
    """The configured bound cannot accommodate a single drawable task."""


@dataclass(frozen=True, slots=True)
class GenConfig:
    target_bound: Fraction | float
    u_lo_range: tuple[float, float] = (0.02, 0.1)
    ratio_range: tuple[float, float] = (2.0, 3.0)
    period_range: tuple[int, int] = (10, 150)
    hc_probability: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0 < Fraction(self.target_bound) <= 1):
            raise ValueError("target_bound must be in (0, 1]")
        if not (0.0 <= self.hc_probability <= 1.0):
            raise ValueError("hc_probability must be in [0, 1]")
        for name in ("u_lo_range", "ratio_range", "period_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} is empty")
        if self.period_range[0] < 1:
            raise ValueError("periods must be positive")


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def generate(cfg: GenConfig) -> SystemSpec:
    """Draw one taskset; deterministic given the config."""
    rng = np.random.default_rng(cfg.seed)
    bound = Fraction(cfg.target_bound)
    u_ll = Fraction(0)
    u_hl = Fraction(0)
    u_hh = Fraction(0)
    hc_tasks: list[MCTask] = []
    lc_tasks: list[MCTask] = []
    index = 0
    while True:
        period = int(rng.integers(cfg.period_range[0], cfg.period_range[1] + 1))
        is_hc = bool(rng.random() < cfg.hc_probability)
        u = float(rng.uniform(*cfg.u_lo_range))
        ratio = float(rng.uniform(*cfg.ratio_range))
        c_lo = max(1, _round_half_up(u * period))
        if is_hc:
            c_hi = min(period, max(c_lo + 1, _round_half_up(ratio * c_lo)))
        else:
            c_hi = c_lo
        new_ll = u_ll + (Fraction(c_lo, period) if not is_hc else 0)
        new_hl = u_hl + (Fraction(c_lo, period) if is_hc else 0)
        new_hh = u_hh + (Fraction(c_hi, period) if is_hc else 0)
        if max(new_ll + new_hl, new_hh) > bound:
            break
        u_ll, u_hl, u_hh = new_ll, new_hl, new_hh
        task = MCTask(
            id=f"t{index:03d}",
            period=period,
            criticality=HC if is_hc else LC,
            wcet_lo=c_lo,
            wcet_hi=c_hi,
            deadline=period,
            virtual_deadline=period,
        )
        (hc_tasks if is_hc else lc_tasks).append(task)
        index += 1
    if not hc_tasks and not lc_tasks:
        raise GenerationError(
            f"target bound {bound} is below the smallest drawable task utilization"
        )
    comps = []
    if hc_tasks:
        comps.append(Component("hc", tuple(hc_tasks), tolerance_limit=0))
    if lc_tasks:
        comps.append(Component("lc", tuple(lc_tasks), tolerance_limit=0))
    return validate_system(SystemSpec(components=tuple(comps), framework="flat"))
