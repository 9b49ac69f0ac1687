"""Demand bound functions for mixed-criticality workloads.

Demand is always measured over an interval [0, t) on the integer tick
grid, for a given per-task mode-switch (or drop) instant.  The task-level
bound dispatches on where the switch instant falls relative to the task's
deadlines; the component-level bound additionally chooses which HC tasks
switch early, limited by the component's tolerance limit.

The scalar functions are the reference implementations; ``dbf_rows`` and
``dbf_split_rows`` compute the same values vectorized over all switch
instants at once and are what the schedulability search uses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Component, CriticalityLevel, MCTask

HC = CriticalityLevel.HC
LC = CriticalityLevel.LC


@dataclass(frozen=True, slots=True)
class ModeSwitchInstants:
    """Interval length plus the external/internal mode-switch instants."""

    t: int
    ems: int
    ims: int

    def __post_init__(self) -> None:
        if not (0 <= self.ims <= self.ems <= self.t):
            raise ValueError(
                f"need 0 <= ims <= ems <= t, got ims={self.ims} ems={self.ems} t={self.t}"
            )


@dataclass(frozen=True, slots=True)
class DemandSplit:
    """Demand split at the external switch: ``dl`` before it, ``dh`` after."""

    dl: int
    dh: int

    @property
    def total(self) -> int:
        return self.dl + self.dh


def dbf_carryover_job(task: MCTask, t: int, switch: int, release: int) -> int:
    """Demand of the HC job that spans the task's switch to HC mode.

    The job released at ``release`` is the last one before the task
    switches at ``switch``; four cases apply depending on whether its
    virtual deadline falls before the switch and whether its real deadline
    fits in the interval.  ``release`` may exceed ``switch`` (a job
    arriving after the switch simply demands its pessimistic budget),
    but the job must still be the one spanning the switch, i.e.
    ``switch < release + period``.
    """
    if task.criticality is not HC:
        raise ValueError(f"task {task.id!r} is not HC")
    if switch >= release + task.period:
        raise ValueError("job does not span the switch instant")
    vdl = release + task.virtual_deadline
    if vdl < switch:
        return task.wcet_lo
    if release + task.deadline <= t:
        return task.wcet_hi
    if vdl <= t:
        return max(0, min(switch - release, task.wcet_lo))
    return 0


def dbf_dropped_job(task: MCTask, t: int, drop: int, release: int) -> int:
    """Demand of the LC job in flight when its task is dropped at ``drop``."""
    if task.criticality is not LC:
        raise ValueError(f"task {task.id!r} is not LC")
    if not (release <= drop < release + task.period):
        raise ValueError("job does not span the drop instant")
    if release + task.virtual_deadline <= t:
        return min(drop - release, task.wcet_lo)
    return 0


def _demand_from_zero(task: MCTask, t: int, switch: int) -> int:
    """Worst demand when the first job is released at 0, successors asap."""
    jobs_before = switch // task.period
    release = jobs_before * task.period
    if task.is_hc:
        return jobs_before * task.wcet_lo + dbf_carryover_job(task, t, switch, release)
    return jobs_before * task.wcet_lo + dbf_dropped_job(task, t, switch, release)


def _anchor(task: MCTask, t: int) -> int:
    # first release placed so the last deadline in the interval lands on t
    return (t - task.deadline) % task.period


def _anchored_counts(task: MCTask, t: int, switch: int) -> tuple[int, int, int]:
    r0 = _anchor(task, t)
    before = (switch - r0) // task.period
    release = r0 + before * task.period
    after = (t - task.deadline) // task.period - before
    return before, release, after


def _demand_anchored(task: MCTask, t: int, switch: int) -> int:
    """Worst demand for the deadline-aligned release pattern (HC only).

    Zero when the interval is shorter than one deadline: no job of the
    pattern has its deadline inside the interval.
    """
    if t < task.deadline:
        return 0
    before, release, after = _anchored_counts(task, t, switch)
    return (
        before * task.wcet_lo
        + dbf_carryover_job(task, t, switch, release)
        + after * task.wcet_hi
    )


def dbf_task(task: MCTask, t: int, switch: int) -> int:
    """Maximum demand of one task over [0, t) with mode switch at ``switch``.

    For an LC task ``switch`` is the drop instant.  For an HC task the
    dominating release pattern depends on how much of the interval remains
    after the switch: with less than the tightening slack left no job can
    draw its pessimistic budget (from-zero pattern), with at least a full
    deadline left the deadline-aligned pattern dominates, and in between
    the two patterns must both be considered.
    """
    if not (0 <= switch <= t):
        raise ValueError(f"need 0 <= switch <= t, got switch={switch} t={t}")
    if not task.is_hc:
        return _demand_from_zero(task, t, switch)
    remaining = t - switch
    if remaining < task.deadline - task.virtual_deadline:
        return _demand_from_zero(task, t, switch)
    if remaining >= task.deadline:
        return _demand_anchored(task, t, switch)
    return max(_demand_from_zero(task, t, switch), _demand_anchored(task, t, switch))


def dbf_task_split(task: MCTask, t: int, switch: int, ems: int) -> DemandSplit:
    """Split ``dbf_task`` into demand before and after the external switch.

    The split maximizes the post-switch share: the spanning job is assumed
    to run as late as its virtual deadline allows, so only the part that
    cannot be pushed past ``ems`` counts as early demand.  HC tasks are
    evaluated at ``switch == ems``; LC tasks at their drop instant with the
    whole demand before the external switch.
    """
    if not (0 <= switch <= ems <= t):
        raise ValueError("need 0 <= switch <= ems <= t")
    total = dbf_task(task, t, switch)
    if not task.is_hc:
        return DemandSplit(dl=total, dh=0)
    if switch != ems:
        raise ValueError("HC tasks split at the external switch instant itself")
    remaining = t - switch
    if remaining < task.deadline - task.virtual_deadline or t < task.deadline:
        return DemandSplit(dl=total, dh=0)
    # late demand of the deadline-aligned pattern
    before, release, after = _anchored_counts(task, t, switch)
    slack = task.virtual_deadline - task.wcet_lo
    early_min = min(max(0, ems - release - slack), task.wcet_lo)
    anchored = (
        before * task.wcet_lo
        + dbf_carryover_job(task, t, switch, release)
        + after * task.wcet_hi
    )
    dh_raw = anchored - early_min - before * task.wcet_lo
    dh = min(total, max(0, dh_raw))
    return DemandSplit(dl=total - dh, dh=dh)


def _delta_selection(comp: Component, t: int, ems: int, ims: int) -> int:
    """Sum of the TL largest demand increases from switching early."""
    deltas = []
    for task in comp.workload:
        if task.is_hc:
            gain = dbf_task(task, t, ims) - dbf_task(task, t, ems)
            deltas.append((max(0, gain), task.id))
    deltas.sort(key=lambda p: (-p[0], p[1]))
    return sum(d for d, _ in deltas[: comp.tolerance_limit])


def dbf_component(comp: Component, msi: ModeSwitchInstants) -> int:
    """Maximum demand of a component for the given mode-switch instants.

    With a zero tolerance limit the internal and external switches
    coincide, so every task is evaluated at the external instant.
    Otherwise each HC task contributes its demand when switching at the
    external instant, the tolerance limit's worth of largest increases
    from switching at the internal instant instead is added (ties broken
    by task id for determinism), and LC tasks are dropped at the internal
    instant.
    """
    t, ems, ims = msi.t, msi.ems, msi.ims
    if comp.tolerance_limit == 0:
        return sum(dbf_task(task, t, ems) for task in comp.workload)
    total = 0
    for task in comp.workload:
        total += dbf_task(task, t, ems if task.is_hc else ims)
    return total + _delta_selection(comp, t, ems, ims)


def dbf_component_optimized(comp: Component, msi: ModeSwitchInstants) -> int:
    """Component demand with the early share capped at the switch instant.

    Demand that must be served before the external switch cannot exceed
    the length of that prefix without contradicting the assumption that
    the interval ends at the first deadline miss, so the pre-switch share
    is capped at ``ems``.  Coincides with :func:`dbf_component` whenever
    the cap is inactive, and returns it unchanged for ``ems == t``.
    """
    t, ems, ims = msi.t, msi.ems, msi.ims
    if ems == t:
        return dbf_component(comp, msi)
    dl_sum = 0
    dh_sum = 0
    coinciding = comp.tolerance_limit == 0
    for task in comp.workload:
        instant = ems if (task.is_hc or coinciding) else ims
        part = dbf_task_split(task, t, instant, ems)
        dl_sum += part.dl
        dh_sum += part.dh
    total = min(ems, dl_sum) + dh_sum
    if not coinciding:
        total += _delta_selection(comp, t, ems, ims)
    return total


# ---------------------------------------------------------------------------
# Vectorized evaluation over all switch instants
# ---------------------------------------------------------------------------


def _task_params(tasks: tuple[MCTask, ...]):
    col = lambda vals: np.asarray(vals, dtype=np.int64).reshape(-1, 1)
    return (
        col([tk.period for tk in tasks]),
        col([tk.wcet_lo for tk in tasks]),
        col([tk.wcet_hi for tk in tasks]),
        col([tk.deadline for tk in tasks]),
        col([tk.virtual_deadline for tk in tasks]),
        np.asarray([tk.is_hc for tk in tasks], dtype=bool).reshape(-1, 1),
    )


def _carryover_vec(r, x, t, c_lo, c_hi, d, d_lo):
    vdl = r + d_lo
    ran_early = np.maximum(0, np.minimum(x - r, c_lo))
    out = np.where(
        vdl < x,
        c_lo,
        np.where(r + d <= t, c_hi, np.where(vdl <= t, ran_early, 0)),
    )
    return out


def _pattern_arrays(tasks, t, x):
    p, c_lo, c_hi, d, d_lo, is_hc = _task_params(tasks)
    q = x // p
    r_zero = q * p
    carry_zero = _carryover_vec(r_zero, x, t, c_lo, c_hi, d, d_lo)
    dropped = np.where(r_zero + d_lo <= t, np.minimum(x - r_zero, c_lo), 0)
    from_zero = q * c_lo + np.where(is_hc, carry_zero, dropped)

    r0 = (t - d) % p
    before = (x - r0) // p
    r_anchor = r0 + before * p
    after = (t - d) // p - before
    carry_anchor = _carryover_vec(r_anchor, x, t, c_lo, c_hi, d, d_lo)
    anchored = before * c_lo + carry_anchor + after * c_hi
    anchored = np.where(t >= d, anchored, 0)  # no deadline fits a shorter interval
    return (p, c_lo, c_hi, d, d_lo, is_hc, from_zero, anchored,
            before, r_anchor, carry_anchor)


def _dbf_values(tasks: tuple[MCTask, ...], t, x) -> np.ndarray:
    """Elementwise ``dbf_task`` over broadcastable arrays ``t`` and ``x``."""
    (p, c_lo, c_hi, d, d_lo, is_hc, from_zero, anchored, *_rest) = _pattern_arrays(tasks, t, x)
    remaining = t - x
    cond_b = remaining < d - d_lo
    cond_c = remaining >= d
    hc_rows = np.where(cond_b, from_zero,
                       np.where(cond_c, anchored, np.maximum(from_zero, anchored)))
    return np.where(is_hc, hc_rows, from_zero)


def dbf_rows(tasks: tuple[MCTask, ...], t: int) -> np.ndarray:
    """Matrix of ``dbf_task(task, t, x)`` for every task and ``x in [0, t]``.

    Row order follows ``tasks``; column ``x`` is the switch instant.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    x = np.arange(t + 1, dtype=np.int64).reshape(1, -1)
    return _dbf_values(tasks, t, x)


def dbf_endpoint_rows(tasks: tuple[MCTask, ...], horizon: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-task demand at the two extreme switch instants for every t.

    Returns ``(at_zero, at_end)`` where column ``t`` holds
    ``dbf_task(task, t, 0)`` and ``dbf_task(task, t, t)``.  Their maximum
    dominates the demand at any switch instant, which makes the pair a
    cheap per-interval upper bound for pruning the schedulability sweep.
    """
    tv = np.arange(horizon + 1, dtype=np.int64).reshape(1, -1)
    return _dbf_values(tasks, tv, np.zeros_like(tv)), _dbf_values(tasks, tv, tv)


def dbf_split_rows(tasks: tuple[MCTask, ...], t: int) -> tuple[np.ndarray, np.ndarray]:
    """Matrices of the demand split evaluated at ``switch == ems == x``.

    Returns ``(dl, dh)`` with ``dl + dh == dbf_rows(tasks, t)``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    x = np.arange(t + 1, dtype=np.int64).reshape(1, -1)
    (p, c_lo, c_hi, d, d_lo, is_hc, from_zero, anchored,
     before, r_anchor, _carry) = _pattern_arrays(tasks, t, x)
    remaining = t - x
    cond_b = remaining < d - d_lo
    cond_c = remaining >= d
    total = np.where(is_hc,
                     np.where(cond_b, from_zero,
                              np.where(cond_c, anchored, np.maximum(from_zero, anchored))),
                     from_zero)

    slack = d_lo - c_lo
    early_min = np.minimum(np.maximum(0, x - r_anchor - slack), c_lo)
    dh_raw = anchored - early_min - before * c_lo
    dh = np.clip(dh_raw, 0, total)
    dh = np.where(is_hc & ~cond_b & (t >= d), dh, 0)
    return total - dh, dh
