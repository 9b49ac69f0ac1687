"""Seeded random construction of small valid task systems for tests."""

from __future__ import annotations

import random

from mcs_kit.model import HC, LC, Component, MCTask, SystemSpec, validate_system


def random_task(rng: random.Random, idx: int, period_max: int = 8, hc_prob: float = 0.5) -> MCTask:
    period = rng.randint(2, period_max)
    deadline = rng.randint(1, period)
    if rng.random() < hc_prob and deadline >= 2:
        wcet_lo = rng.randint(1, max(1, deadline - 1))
        wcet_hi = rng.randint(wcet_lo + 1, deadline)
        vdl = rng.randint(wcet_lo, deadline)
        return MCTask(f"t{idx}", period, HC, wcet_lo, wcet_hi, deadline, vdl)
    wcet = rng.randint(1, deadline)
    return MCTask(f"t{idx}", period, LC, wcet, wcet, deadline, deadline)


def random_component(
    rng: random.Random,
    comp_id: str,
    n_tasks: int,
    idx0: int = 0,
    period_max: int = 8,
    hc_prob: float = 0.5,
) -> Component:
    tasks = tuple(random_task(rng, idx0 + i, period_max, hc_prob) for i in range(n_tasks))
    hc_count = sum(1 for t in tasks if t.is_hc)
    tl = rng.randint(0, hc_count)
    return Component(id=comp_id, workload=tasks, tolerance_limit=tl)


def random_small_spec(
    rng: random.Random,
    max_tasks: int = 3,
    period_max: int = 8,
    hc_prob: float = 0.5,
    framework: str = "flat",
) -> SystemSpec:
    total = rng.randint(1, max_tasks)
    n_comps = rng.randint(1, min(2, total))
    split = rng.randint(1, total - 1) if n_comps == 2 else total
    comps = [random_component(rng, "c0", split, 0, period_max, hc_prob)]
    if n_comps == 2:
        comps.append(random_component(rng, "c1", total - split, split, period_max, hc_prob))
    return validate_system(SystemSpec(components=tuple(comps), framework=framework))
