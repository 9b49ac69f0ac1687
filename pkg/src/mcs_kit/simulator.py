"""Deterministic discrete-event EDF simulator for component-based
mixed-criticality systems.

Execution semantics.  Jobs are released per task (strictly periodic or
sporadic with seeded extra gaps) and scheduled EDF by effective deadline:
the tightened deadline while the owning task is in LC mode, the real
deadline once the task has overrun or the system has seen an external
mode switch.  Each HC job is flagged independently at release (one
Bernoulli draw per job); a flagged job switches its task to HC mode the
moment it has consumed its optimistic budget.  The first switch inside a
component is its internal mode switch (its LC tasks may be dropped, per
policy); the switch that makes ``tolerance_limit + 1`` of its tasks
simultaneously HC is the external mode switch, after which every LC job
in the system is dropped and every HC task is scheduled by its real
deadline.  When no pending jobs remain, all tasks and components return
to LC mode.

Event ordering at one instant is fixed and documented so that an
independent tick-by-tick interpreter can reproduce runs bit for bit:
first execution boundaries (mode switch, then completion), then deadline
misses (missed jobs are recorded and aborted), then the idle reset, then
releases.  Ties anywhere break by task position in the spec.

Randomness comes from one named generator (PCG64) per task, seeded from
``(seed, task index)``, so runs with identical seeds see identical draws
regardless of scheduling differences; flags are drawn by comparing one
uniform variate per HC job against the switch probability, which couples
runs across mechanisms and probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil

import numpy as np

from .model import SystemSpec, validate_system, with_tolerance_limits

HC_EXEC_POLICIES = ("full_hi", "uniform_between")
RELEASE_POLICIES = ("strictly_periodic", "sporadic_min_separation")
DROP_POLICIES = ("drop_lc_in_component", "keep_lc_best_effort")


@dataclass(frozen=True, slots=True)
class SimConfig:
    horizon: int = 10_000
    seed: int = 0
    hc_switch_probability: float = 0.0
    hc_exec_policy: str = "full_hi"
    release_policy: str = "strictly_periodic"
    drop_policy_on_ims: str = "drop_lc_in_component"
    record_events: bool = False

    def __post_init__(self) -> None:
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if not (0.0 <= self.hc_switch_probability <= 1.0):
            raise ValueError("hc_switch_probability must be in [0, 1]")
        if self.hc_exec_policy not in HC_EXEC_POLICIES:
            raise ValueError(f"hc_exec_policy must be one of {HC_EXEC_POLICIES}")
        if self.release_policy not in RELEASE_POLICIES:
            raise ValueError(f"release_policy must be one of {RELEASE_POLICIES}")
        if self.drop_policy_on_ims not in DROP_POLICIES:
            raise ValueError(f"drop_policy_on_ims must be one of {DROP_POLICIES}")


@dataclass(slots=True)
class SimReport:
    finished_lc: int
    max_lc: int
    pfj: Fraction
    deadline_misses: list[tuple[str, int, str]]
    mode_timeline: list[tuple[int, str, str]]
    seed: int
    events: list[dict] | None = None


class _Job:
    __slots__ = ("task_pos", "release", "exec_total", "consumed", "flagged")

    def __init__(self, task_pos: int, release: int, exec_total: int, flagged: bool):
        self.task_pos = task_pos
        self.release = release
        self.exec_total = exec_total
        self.consumed = 0
        self.flagged = flagged


class _Sim:
    def __init__(self, spec: SystemSpec, cfg: SimConfig):
        self.spec = validate_system(spec)
        self.cfg = cfg
        self.tasks = list(self.spec.tasks)
        self.comp_of: list[int] = []
        self.comps = list(self.spec.components)
        for ci, comp in enumerate(self.comps):
            self.comp_of.extend([ci] * len(comp.workload))
        self.rngs = [
            np.random.Generator(np.random.PCG64(np.random.SeedSequence((cfg.seed, i))))
            for i in range(len(self.tasks))
        ]
        self.next_release = [0] * len(self.tasks)
        self.task_hc_mode = [False] * len(self.tasks)
        self.comp_hc_count = [0] * len(self.comps)
        self.comp_ims = [False] * len(self.comps)
        self.comp_ems = [False] * len(self.comps)
        self.comp_lc_dropped = [False] * len(self.comps)
        self.system_ems = False
        self.pending: list[_Job] = []
        self.finished_lc = 0
        self.released_lc = 0
        self.misses: list[tuple[str, int, str]] = []
        self.timeline: list[tuple[int, str, str]] = []
        self.events: list[dict] | None = [] if cfg.record_events else None

    # -- bookkeeping helpers -------------------------------------------

    def _log(self, tick: int, event: str, **kw) -> None:
        if self.events is not None:
            self.events.append({"tick": tick, "event": event, **kw})

    def _effective_deadline(self, job: _Job) -> int:
        task = self.tasks[job.task_pos]
        if task.is_hc and (self.task_hc_mode[job.task_pos] or self.system_ems):
            return job.release + task.deadline
        return job.release + task.virtual_deadline

    def _drop_lc_jobs(self, now: int, comp_idx: int | None) -> None:
        """Remove pending LC jobs of one component (or of everyone)."""
        kept = []
        for job in self.pending:
            task = self.tasks[job.task_pos]
            if not task.is_hc and (comp_idx is None or self.comp_of[job.task_pos] == comp_idx):
                self._log(now, "drop", task=task.id, release=job.release)
            else:
                kept.append(job)
        self.pending = kept

    def _task_switch(self, now: int, pos: int) -> None:
        """A job of task ``pos`` has exhausted its optimistic budget."""
        self.task_hc_mode[pos] = True
        ci = self.comp_of[pos]
        self.comp_hc_count[ci] += 1
        self._log(now, "switch", task=self.tasks[pos].id)
        comp = self.comps[ci]
        if not self.comp_ims[ci]:
            self.comp_ims[ci] = True
            self.timeline.append((now, comp.id, "IMS"))
            self._log(now, "IMS", component=comp.id)
            if self.cfg.drop_policy_on_ims == "drop_lc_in_component":
                self.comp_lc_dropped[ci] = True
                self._drop_lc_jobs(now, ci)
        if not self.comp_ems[ci] and self.comp_hc_count[ci] > comp.tolerance_limit:
            self.comp_ems[ci] = True
            self.timeline.append((now, comp.id, "EMS"))
            self._log(now, "EMS", component=comp.id)
            self.system_ems = True
            for i in range(len(self.comps)):
                self.comp_lc_dropped[i] = True
            self._drop_lc_jobs(now, None)

    def _reset_if_idle(self, now: int) -> None:
        if self.pending:
            return
        if not (self.system_ems or any(self.comp_ims) or any(self.task_hc_mode)):
            return
        for ci, comp in enumerate(self.comps):
            if self.comp_ims[ci] or self.comp_ems[ci]:
                self.timeline.append((now, comp.id, "RESET"))
                self._log(now, "RESET", component=comp.id)
        self.task_hc_mode = [False] * len(self.tasks)
        self.comp_hc_count = [0] * len(self.comps)
        self.comp_ims = [False] * len(self.comps)
        self.comp_ems = [False] * len(self.comps)
        self.comp_lc_dropped = [False] * len(self.comps)
        self.system_ems = False

    def _release(self, now: int, pos: int) -> None:
        task = self.tasks[pos]
        rng = self.rngs[pos]
        if self.cfg.release_policy == "sporadic_min_separation":
            gap = int(rng.integers(0, task.period + 1))
            self.next_release[pos] = now + task.period + gap
        else:
            self.next_release[pos] = now + task.period
        flagged = False
        exec_total = task.wcet_lo
        if task.is_hc:
            flagged = bool(rng.random() < self.cfg.hc_switch_probability)
            if flagged:
                if self.cfg.hc_exec_policy == "uniform_between":
                    exec_total = int(rng.integers(task.wcet_lo + 1, task.wcet_hi + 1))
                else:
                    exec_total = task.wcet_hi
        else:
            self.released_lc += 1
        self._log(now, "release", task=task.id, flagged=flagged)
        if not task.is_hc and self.comp_lc_dropped[self.comp_of[pos]]:
            self._log(now, "drop", task=task.id, release=now)
            return
        self.pending.append(_Job(pos, now, exec_total, flagged))

    def _process_misses(self, now: int) -> None:
        kept = []
        for job in self.pending:
            task = self.tasks[job.task_pos]
            if job.release + task.deadline <= now:
                kind = "HC" if task.is_hc else "LC"
                self.misses.append((task.id, job.release, kind))
                self._log(now, "miss", task=task.id, release=job.release, kind=kind)
            else:
                kept.append(job)
        self.pending = kept

    def _pick(self) -> _Job:
        return min(
            self.pending,
            key=lambda j: (self._effective_deadline(j), self.tasks[j.task_pos].id),
        )

    def run(self) -> SimReport:
        cfg = self.cfg
        now = 0
        while True:
            self._process_misses(now)
            self._reset_if_idle(now)
            if now < cfg.horizon:
                for pos in range(len(self.tasks)):
                    while self.next_release[pos] == now:
                        self._release(now, pos)
            upcoming = min(
                (r for r in self.next_release if r < cfg.horizon), default=None
            )
            if not self.pending:
                if upcoming is None:
                    break
                now = upcoming
                continue
            job = self._pick()
            task = self.tasks[job.task_pos]
            quantum = job.exec_total - job.consumed
            if (
                job.flagged
                and not self.task_hc_mode[job.task_pos]
                and job.consumed < task.wcet_lo
            ):
                quantum = min(quantum, task.wcet_lo - job.consumed)
            if upcoming is not None:
                quantum = min(quantum, upcoming - now)
            deadline_cap = min(
                j.release + self.tasks[j.task_pos].deadline for j in self.pending
            )
            quantum = min(quantum, deadline_cap - now)
            job.consumed += quantum
            now += quantum
            if (
                job.flagged
                and not self.task_hc_mode[job.task_pos]
                and job.consumed == task.wcet_lo
                and job.consumed < job.exec_total
            ):
                self._task_switch(now, job.task_pos)
            if job.consumed == job.exec_total:
                self.pending.remove(job)
                self._log(now, "finish", task=task.id, release=job.release)
                if not task.is_hc:
                    self.finished_lc += 1
        if cfg.release_policy == "strictly_periodic":
            max_lc = sum(
                ceil(cfg.horizon / t.period) for t in self.tasks if not t.is_hc
            )
            assert max_lc == self.released_lc
        else:
            max_lc = self.released_lc
        pfj = Fraction(self.finished_lc, max_lc) if max_lc else Fraction(1)
        return SimReport(
            finished_lc=self.finished_lc,
            max_lc=max_lc,
            pfj=pfj,
            deadline_misses=self.misses,
            mode_timeline=self.timeline,
            seed=cfg.seed,
            events=self.events,
        )


def simulate(spec: SystemSpec, cfg: SimConfig) -> SimReport:
    """Run one deterministic simulation of ``spec`` under ``cfg``.

    The spec must have virtual deadlines assigned (the tightening search
    does that); identical inputs produce bit-identical reports.
    """
    return _Sim(spec, cfg).run()


def compare_mechanisms(
    spec: SystemSpec,
    cfg: SimConfig,
    mechanisms: tuple[str, ...] = ("proposed", "classical"),
) -> dict[str, SimReport]:
    """Coupled-randomness comparison of isolation mechanisms.

    ``proposed`` runs the spec with its own tolerance limits, ``classical``
    with every limit forced to zero (drop all LC work at the first
    overrun).  Identical seeds and per-task draw streams mean the runs see
    the same releases and overruns, so report differences isolate the
    mechanism.  Every requested mechanism must pass the flat test.
    """
    from .analysis import flat_test

    variants: dict[str, SystemSpec] = {}
    for mech in mechanisms:
        if mech == "proposed":
            variants[mech] = spec
        elif mech == "classical":
            variants[mech] = with_tolerance_limits(spec, 0)
        else:
            raise ValueError(f"unknown mechanism {mech!r}")
    for mech, variant in variants.items():
        if not flat_test(variant).schedulable:
            raise ValueError(f"unschedulable mechanism requested: {mech}")
    return {mech: simulate(variant, cfg) for mech, variant in variants.items()}
