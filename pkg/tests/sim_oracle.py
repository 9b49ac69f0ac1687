"""Naive one-tick-at-a-time interpreter of the simulator's semantic contract.

Independent of the event-driven engine: advances time a single tick per
step and re-derives every decision from scratch.  Used to check that the
engine's multi-tick leaps change nothing observable.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil

import numpy as np

from mcs_kit.model import SystemSpec, validate_system
from mcs_kit.simulator import SimConfig, SimReport


def tick_simulate(spec: SystemSpec, cfg: SimConfig) -> SimReport:
    spec = validate_system(spec)
    tasks = list(spec.tasks)
    comps = list(spec.components)
    comp_of = []
    for ci, comp in enumerate(comps):
        comp_of.extend([ci] * len(comp.workload))
    rngs = [
        np.random.Generator(np.random.PCG64(np.random.SeedSequence((cfg.seed, i))))
        for i in range(len(tasks))
    ]
    next_release = [0] * len(tasks)
    hc_mode = [False] * len(tasks)
    hc_count = [0] * len(comps)
    ims = [False] * len(comps)
    ems = [False] * len(comps)
    lc_dropped = [False] * len(comps)
    system_ems = False
    pending: list[dict] = []
    finished_lc = 0
    released_lc = 0
    misses: list[tuple[str, int, str]] = []
    timeline: list[tuple[int, str, str]] = []

    def eff_deadline(job):
        task = tasks[job["pos"]]
        if task.is_hc and (hc_mode[job["pos"]] or system_ems):
            return job["release"] + task.deadline
        return job["release"] + task.virtual_deadline

    def switch(now, pos):
        nonlocal system_ems, pending
        hc_mode[pos] = True
        ci = comp_of[pos]
        hc_count[ci] += 1
        if not ims[ci]:
            ims[ci] = True
            timeline.append((now, comps[ci].id, "IMS"))
            if cfg.drop_policy_on_ims == "drop_lc_in_component":
                lc_dropped[ci] = True
                pending = [
                    j
                    for j in pending
                    if tasks[j["pos"]].is_hc or comp_of[j["pos"]] != ci
                ]
        if not ems[ci] and hc_count[ci] > comps[ci].tolerance_limit:
            ems[ci] = True
            timeline.append((now, comps[ci].id, "EMS"))
            system_ems = True
            for i in range(len(comps)):
                lc_dropped[i] = True
            pending = [j for j in pending if tasks[j["pos"]].is_hc]

    now = 0
    while True:
        # deadline misses
        still = []
        for job in pending:
            task = tasks[job["pos"]]
            if job["release"] + task.deadline <= now:
                misses.append((task.id, job["release"], "HC" if task.is_hc else "LC"))
            else:
                still.append(job)
        pending = still
        # idle reset
        if not pending and (system_ems or any(ims) or any(hc_mode)):
            for ci, comp in enumerate(comps):
                if ims[ci] or ems[ci]:
                    timeline.append((now, comp.id, "RESET"))
            hc_mode = [False] * len(tasks)
            hc_count = [0] * len(comps)
            ims = [False] * len(comps)
            ems = [False] * len(comps)
            lc_dropped = [False] * len(comps)
            system_ems = False
        # releases
        if now < cfg.horizon:
            for pos, task in enumerate(tasks):
                while next_release[pos] == now:
                    rng = rngs[pos]
                    if cfg.release_policy == "sporadic_min_separation":
                        gap = int(rng.integers(0, task.period + 1))
                        next_release[pos] = now + task.period + gap
                    else:
                        next_release[pos] = now + task.period
                    flagged = False
                    exec_total = task.wcet_lo
                    if task.is_hc:
                        flagged = bool(rng.random() < cfg.hc_switch_probability)
                        if flagged:
                            if cfg.hc_exec_policy == "uniform_between":
                                exec_total = int(
                                    rng.integers(task.wcet_lo + 1, task.wcet_hi + 1)
                                )
                            else:
                                exec_total = task.wcet_hi
                    else:
                        released_lc += 1
                    if not task.is_hc and lc_dropped[comp_of[pos]]:
                        continue
                    pending.append(
                        {
                            "pos": pos,
                            "release": now,
                            "total": exec_total,
                            "done": 0,
                            "flagged": flagged,
                        }
                    )
        if not pending:
            if not any(r < cfg.horizon for r in next_release):
                break
            now += 1
            continue
        # run the earliest-deadline job for one tick
        job = min(pending, key=lambda j: (eff_deadline(j), tasks[j["pos"]].id))
        job["done"] += 1
        now += 1
        task = tasks[job["pos"]]
        if (
            job["flagged"]
            and not hc_mode[job["pos"]]
            and job["done"] == task.wcet_lo
            and job["done"] < job["total"]
        ):
            switch(now, job["pos"])
        if job["done"] == job["total"]:
            pending.remove(job)
            if not task.is_hc:
                finished_lc += 1

    if cfg.release_policy == "strictly_periodic":
        max_lc = sum(ceil(cfg.horizon / t.period) for t in tasks if not t.is_hc)
    else:
        max_lc = released_lc
    pfj = Fraction(finished_lc, max_lc) if max_lc else Fraction(1)
    return SimReport(
        finished_lc=finished_lc,
        max_lc=max_lc,
        pfj=pfj,
        deadline_misses=misses,
        mode_timeline=timeline,
        seed=cfg.seed,
    )
