"""Schedulability decisions: flat test, tolerance maximization, deadline
tightening, interface generation and the hierarchical test.

The flat test quantifies demand over every interval length up to a
pseudo-polynomial horizon, every external-switch instant inside it and
every per-component internal-switch instant.  Three structural facts keep
that tractable:

* per-component internal instants maximize independently, so the joint
  internal quantifier decomposes into per-component maxima;
* for a component whose workload is purely HC, the demand increase from an
  early switch is largest when the internal instant is 0 (the task-level
  demand over a switch window peaks at one of its endpoints), so the
  internal sweep collapses;
* a cheap per-interval bound (every task at its individually worst
  instant) prunes interval lengths that cannot possibly violate.

Components that mix HC and LC tasks under a positive tolerance limit fall
back to the full internal sweep and stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .demand import (
    ModeSwitchInstants,
    dbf_component,
    dbf_component_optimized,
    dbf_endpoint_rows,
    dbf_rows,
    dbf_split_rows,
)
from .model import (
    Component,
    CriticalityLevel,
    MCTask,
    SystemSpec,
    UtilizationSummary,
    utilization,
    validate_system,
)
from .supply import DELTA, MCPRInterface, sbf_array, sbf_lc_array

LC = CriticalityLevel.LC
HC = CriticalityLevel.HC


class InfeasibleTightening(RuntimeError):
    """No feasible virtual-deadline assignment found by the search."""


@dataclass(frozen=True, slots=True)
class FlatWitness:
    """A point of the quantified space where demand exceeds the interval."""

    t: int
    ems: int
    ims_by_component: dict[str, int]
    demand: int


@dataclass(frozen=True, slots=True)
class FlatVerdict:
    schedulable: bool
    witness: FlatWitness | None
    t_max_used: int
    horizon_finite: bool
    utilization: UtilizationSummary

    def __post_init__(self) -> None:
        if self.horizon_finite:
            assert self.schedulable == (self.witness is None)


@dataclass(frozen=True, slots=True)
class ToleranceResult:
    schedulable: bool
    tl: int | None
    hc_component: str | None
    hc_count: int


@dataclass(frozen=True, slots=True)
class InterfaceResult:
    feasible: bool
    iface: MCPRInterface | None
    c_lo_minimal: Fraction | None
    c_hi_minimal: Fraction | None
    horizon_used: int


@dataclass(frozen=True, slots=True)
class HierarchicalResult:
    schedulable: bool
    interfaces: dict[str, InterfaceResult]
    parent_spec: SystemSpec | None
    parent_verdict: FlatVerdict | None
    failing_component: str | None = None
    reason: str | None = None


# ---------------------------------------------------------------------------
# Horizon
# ---------------------------------------------------------------------------


def t_max(spec: SystemSpec) -> int | None:
    """Pseudo-polynomial sweep horizon; ``None`` when it is unbounded.

    Bounds the latest possible first violation from per-component linear
    demand envelopes.  Components whose low-mode rate is below their
    high-mode rate contribute that high-mode rate to the slope (their
    envelope peaks with an immediate switch); the rest contribute their
    low-mode rate.  A non-positive residual slope means the envelope never
    dips back under the supply line, i.e. the necessary utilization
    condition fails.
    """
    numerator = Fraction(0)
    denominator = Fraction(1)
    for comp in spec.components:
        u = utilization(comp)
        span = max((2 * tk.period - tk.deadline for tk in comp.workload), default=0)
        numerator += span * u.u_hh + sum(tk.wcet_lo for tk in comp.lc_tasks)
        if u.u_ll + u.u_hl - u.u_hh < 0:
            denominator -= u.u_hh
        else:
            denominator -= u.u_ll + u.u_hl
    if denominator <= 0:
        return None
    return math.ceil(numerator / denominator)


# ---------------------------------------------------------------------------
# Flat demand evaluation
# ---------------------------------------------------------------------------

_SINGLE = "single"  # every task at the external instant (LC comps, TL = 0)
_PURE_HC = "pure_hc"  # HC-only workload, TL > 0: internal max at 0
_MIXED = "mixed"  # HC and LC under TL > 0: exact internal sweep


@dataclass(slots=True)
class _Group:
    comp: Component
    kind: str
    idx: np.ndarray  # all task row indices
    hc_idx: np.ndarray
    lc_idx: np.ndarray


class _FlatEvaluator:
    """Vectorized max-demand curves for one validated system."""

    def __init__(self, spec: SystemSpec, optimized: bool = False):
        self.spec = spec
        self.optimized = optimized
        self.tasks = spec.tasks
        offsets = {}
        pos = 0
        for comp in spec.components:
            offsets[comp.id] = pos
            pos += len(comp.workload)
        self.groups: list[_Group] = []
        for comp in spec.components:
            base = offsets[comp.id]
            idx = np.arange(base, base + len(comp.workload))
            hc_mask = np.array([tk.is_hc for tk in comp.workload], dtype=bool)
            hc_idx = idx[hc_mask]
            lc_idx = idx[~hc_mask]
            if comp.tolerance_limit == 0 or len(hc_idx) == 0:
                kind = _SINGLE
            elif len(lc_idx) == 0:
                kind = _PURE_HC
            else:
                kind = _MIXED
            self.groups.append(_Group(comp, kind, idx, hc_idx, lc_idx))

    # -- cheap per-interval upper bound --------------------------------

    def bound_curve(self, horizon: int) -> np.ndarray:
        """Every task at its individually worst switch instant, per t."""
        if not self.tasks:
            return np.zeros(horizon + 1, dtype=np.int64)
        at_zero, at_end = dbf_endpoint_rows(self.tasks, horizon)
        return np.maximum(at_zero, at_end).sum(axis=0)

    # -- exact curves ---------------------------------------------------

    def _top_deltas(self, at_ems: np.ndarray, tl: int, at_ims: np.ndarray) -> np.ndarray:
        """Sum of the ``tl`` largest demand gains from switching early."""
        deltas = np.maximum(0, at_ims - at_ems)
        if tl >= deltas.shape[0]:
            return deltas.sum(axis=0)
        return np.sort(deltas, axis=0)[::-1][:tl].sum(axis=0)

    def _group_curve(self, g: _Group, t: int, rows, dl, dh) -> np.ndarray:
        ems = np.arange(t + 1, dtype=np.int64)
        if g.kind == _SINGLE:
            plain = rows[g.idx].sum(axis=0)
            if not self.optimized:
                return plain
            curve = np.minimum(ems, dl[g.idx].sum(axis=0)) + dh[g.idx].sum(axis=0)
            curve[t] = plain[t]
            return curve
        if g.kind == _PURE_HC:
            hc_rows = rows[g.hc_idx]
            top = self._top_deltas(hc_rows, g.comp.tolerance_limit, hc_rows[:, :1])
            plain = hc_rows.sum(axis=0) + top
            if not self.optimized:
                return plain
            curve = (
                np.minimum(ems, dl[g.hc_idx].sum(axis=0))
                + dh[g.hc_idx].sum(axis=0)
                + top
            )
            curve[t] = plain[t]
            return curve
        return self._mixed_curve(g, t, rows, dl, dh)[0]

    def _mixed_curve(self, g: _Group, t: int, rows, dl, dh):
        """Exact internal sweep; also returns the smallest maximizing ims."""
        hc_rows = rows[g.hc_idx]
        lc_rows = rows[g.lc_idx]
        lc_sum = lc_rows.sum(axis=0)
        hc_base = hc_rows.sum(axis=0)
        tl = g.comp.tolerance_limit
        curve = np.empty(t + 1, dtype=np.int64)
        arg = np.empty(t + 1, dtype=np.int64)
        for e in range(t + 1):
            tops = self._top_deltas(hc_rows[:, e : e + 1], tl, hc_rows[:, : e + 1])
            if not self.optimized or e == t:
                vals = hc_base[e] + tops + lc_sum[: e + 1]
            else:
                early = np.minimum(
                    e, dl[g.hc_idx, e].sum() + dl[g.lc_idx][:, : e + 1].sum(axis=0)
                )
                vals = (
                    early
                    + dh[g.hc_idx, e].sum()
                    + dh[g.lc_idx][:, : e + 1].sum(axis=0)
                    + tops
                )
            k = int(vals.argmax())
            curve[e] = vals[k]
            arg[e] = k
        return curve, arg

    def _matrices(self, t: int):
        rows = dbf_rows(self.tasks, t)
        if self.optimized:
            dl, dh = dbf_split_rows(self.tasks, t)
        else:
            dl = dh = None
        return rows, dl, dh

    def demand_curve(self, t: int) -> np.ndarray:
        """Max total demand over internal instants, per external instant."""
        rows, dl, dh = self._matrices(t)
        total = np.zeros(t + 1, dtype=np.int64)
        for g in self.groups:
            total += self._group_curve(g, t, rows, dl, dh)
        return total

    def witness_ims(self, t: int, e: int) -> dict[str, int]:
        """Smallest demand-maximizing internal instant per component."""
        rows, dl, dh = self._matrices(t)
        out = {}
        for g in self.groups:
            if g.kind == _SINGLE:
                out[g.comp.id] = e
            elif g.kind == _PURE_HC:
                out[g.comp.id] = 0
            else:
                _, arg = self._mixed_curve(g, t, rows, dl, dh)
                out[g.comp.id] = int(arg[e])
        return out


def _count_hc_components(spec: SystemSpec) -> int:
    return sum(1 for c in spec.components if c.is_hc_component)


def flat_test(
    spec: SystemSpec,
    use_optimized_dbf: bool = False,
    fallback_horizon: int = 0,
    max_hc_components: int | None = None,
) -> FlatVerdict:
    """Flat-framework schedulability: total demand fits every interval.

    Scans interval lengths ascending and external instants ascending and
    reports the first violating point, with per-component internal
    instants chosen as the smallest demand maximizers.  An unbounded
    horizon fails the necessary utilization condition: the verdict is
    unschedulable immediately, with a witness attached only if one is
    found within ``fallback_horizon``.
    """
    spec = validate_system(spec)
    if max_hc_components is not None and _count_hc_components(spec) > max_hc_components:
        raise ValueError(
            f"{_count_hc_components(spec)} HC components exceed the configured "
            f"limit of {max_hc_components}"
        )
    u = utilization(spec)
    horizon = t_max(spec)
    finite = horizon is not None
    if not finite:
        if not any(tk.is_hc for tk in spec.tasks) and u.u_ll == 1:
            # switch-free workload at exact full utilization: the demand
            # margin repeats every hyperperiod, so one hyperperiod decides
            horizon = math.lcm(*(tk.period for tk in spec.tasks))
            finite = True
        else:
            horizon = fallback_horizon
    ev = _FlatEvaluator(spec, use_optimized_dbf)
    if horizon > 0:
        bound = ev.bound_curve(horizon)
        t_values = np.flatnonzero(bound[1:] > np.arange(1, horizon + 1)) + 1
        for t in map(int, t_values):
            curve = ev.demand_curve(t)
            bad = np.flatnonzero(curve > t)
            if bad.size:
                e = int(bad[0])
                witness = FlatWitness(
                    t=t,
                    ems=e,
                    ims_by_component=ev.witness_ims(t, e),
                    demand=int(curve[e]),
                )
                return FlatVerdict(False, witness, horizon, finite, u)
    if not finite:
        return FlatVerdict(False, None, horizon, False, u)
    return FlatVerdict(True, None, horizon, True, u)


# ---------------------------------------------------------------------------
# Tolerance limits
# ---------------------------------------------------------------------------


def _single_hc_component(spec: SystemSpec) -> Component:
    hc_comps = [c for c in spec.components if c.is_hc_component]
    if len(hc_comps) != 1:
        raise ValueError(
            f"tolerance maximization expects exactly one HC component, found {len(hc_comps)}"
        )
    return hc_comps[0]


def max_tolerance(spec: SystemSpec, use_optimized_dbf: bool = False) -> ToleranceResult:
    """Largest tolerance limit of the HC component that stays schedulable.

    Demand is nondecreasing in the tolerance limit, so the verdict is
    monotone and binary search over it is sound.
    """
    spec = validate_system(spec)
    comp = _single_hc_component(spec)
    hc_count = len(comp.hc_tasks)

    def passes(tl: int) -> bool:
        candidate = replace(
            spec,
            components=tuple(
                replace(c, tolerance_limit=tl) if c.id == comp.id else c
                for c in spec.components
            ),
        )
        return flat_test(candidate, use_optimized_dbf).schedulable

    if not passes(0):
        return ToleranceResult(False, None, comp.id, hc_count)
    if passes(hc_count):
        return ToleranceResult(True, hc_count, comp.id, hc_count)
    lo, hi = 0, hc_count  # passes(lo), not passes(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if passes(mid):
            lo = mid
        else:
            hi = mid
    return ToleranceResult(True, lo, comp.id, hc_count)


def max_schedulable_tl(spec: SystemSpec, use_optimized_dbf: bool = False) -> ToleranceResult:
    """Single-sweep tolerance frontier for the HC component.

    Computes, per quantified point, the largest tolerance limit whose
    demand still fits, and takes the minimum over the sweep.  Produces the
    same result as probing every limit with :func:`flat_test` (the delta
    prefix sums are nondecreasing) at the cost of one sweep; the sweep
    commands use this, :func:`max_tolerance` is the standalone operation.
    Requires the HC component to have no LC tasks.
    """
    spec = validate_system(spec)
    comp = _single_hc_component(spec)
    if comp.lc_tasks:
        # exact fallback: linear probing via the flat test
        best = None
        for tl in range(len(comp.hc_tasks) + 1):
            candidate = replace(
                spec,
                components=tuple(
                    replace(c, tolerance_limit=tl) if c.id == comp.id else c
                    for c in spec.components
                ),
            )
            if flat_test(candidate, use_optimized_dbf).schedulable:
                best = tl
            else:
                break
        if best is None:
            return ToleranceResult(False, None, comp.id, len(comp.hc_tasks))
        return ToleranceResult(True, best, comp.id, len(comp.hc_tasks))

    hc_count = len(comp.hc_tasks)
    horizon = t_max(spec)  # tolerance limits do not enter the horizon
    if horizon is None:
        return ToleranceResult(False, None, comp.id, hc_count)
    base = replace(
        spec,
        components=tuple(
            replace(c, tolerance_limit=0) if c.id == comp.id else c
            for c in spec.components
        ),
    )
    ev = _FlatEvaluator(base, use_optimized_dbf)
    group = next(g for g in ev.groups if g.comp.id == comp.id)
    others = [g for g in ev.groups if g.comp.id != comp.id]
    frontier = hc_count
    if horizon > 0:
        bound = ev.bound_curve(horizon)
        t_values = np.flatnonzero(bound[1:] > np.arange(1, horizon + 1)) + 1
        for t in map(int, t_values):
            rows, dl, dh = ev._matrices(t)
            ems = np.arange(t + 1, dtype=np.int64)
            rest = np.zeros(t + 1, dtype=np.int64)
            for g in others:
                rest += ev._group_curve(g, t, rows, dl, dh)
            hc_rows = rows[group.idx]
            if not ev.optimized:
                base_curve = hc_rows.sum(axis=0)
            else:
                base_curve = np.minimum(ems, dl[group.idx].sum(axis=0)) + dh[
                    group.idx
                ].sum(axis=0)
                base_curve[t] = hc_rows.sum(axis=0)[t]
            deltas = np.sort(np.maximum(0, hc_rows[:, :1] - hc_rows), axis=0)[::-1]
            prefix = np.vstack(
                [np.zeros((1, t + 1), dtype=np.int64), np.cumsum(deltas, axis=0)]
            )
            slack = t - rest - base_curve
            allowed = (prefix <= slack).sum(axis=0) - 1  # rows are nondecreasing
            frontier = min(frontier, int(allowed.min()))
            if frontier < 0:
                return ToleranceResult(False, None, comp.id, hc_count)
    return ToleranceResult(True, frontier, comp.id, hc_count)


# ---------------------------------------------------------------------------
# Virtual-deadline tightening
# ---------------------------------------------------------------------------


def _point_demand(spec: SystemSpec, w: FlatWitness, optimized: bool) -> int:
    total = 0
    for comp in spec.components:
        ims = w.ims_by_component.get(comp.id, w.ems)
        if comp.tolerance_limit == 0 or not comp.is_hc_component:
            ims = w.ems
        msi = ModeSwitchInstants(t=w.t, ems=w.ems, ims=ims)
        fn = dbf_component_optimized if optimized else dbf_component
        total += fn(comp, msi)
    return total


def _with_virtual_deadline(spec: SystemSpec, task_id: str, d_lo: int) -> SystemSpec:
    comps = []
    for comp in spec.components:
        tasks = tuple(
            replace(tk, virtual_deadline=d_lo) if tk.id == task_id else tk
            for tk in comp.workload
        )
        comps.append(replace(comp, workload=tasks))
    return replace(spec, components=tuple(comps))


def tighten_deadlines(
    spec: SystemSpec,
    use_optimized_dbf: bool = False,
    max_rounds: int = 64,
) -> SystemSpec:
    """Search virtual-deadline assignments until the flat test passes.

    Greedy and deterministic: while the test fails, re-evaluate the
    failing point's demand for every candidate virtual deadline of every
    HC task, apply the single change that lowers that demand the most
    (ties resolved by scan order, preferring the mildest tightening), and
    repeat.
    Gives up when no change improves the current failure point or after
    ``max_rounds`` iterations, raising :class:`InfeasibleTightening`.
    All-LC systems pass through unchanged.
    """
    spec = validate_system(spec)
    if not any(tk.is_hc for tk in spec.tasks):
        return spec
    current = spec
    for _ in range(max_rounds):
        verdict = flat_test(current, use_optimized_dbf)
        if verdict.schedulable:
            return current
        if not verdict.horizon_finite:
            raise InfeasibleTightening(
                "necessary utilization condition violated; tightening cannot help"
            )
        w = verdict.witness
        best: tuple[int, str, int] | None = None  # (demand, task_id, new_d_lo)
        for comp in current.components:
            for tk in comp.workload:
                if not tk.is_hc or tk.virtual_deadline <= tk.wcet_lo:
                    continue
                for cand in range(tk.virtual_deadline - 1, tk.wcet_lo - 1, -1):
                    trial = _with_virtual_deadline(current, tk.id, cand)
                    demand = _point_demand(trial, w, use_optimized_dbf)
                    if best is None or demand < best[0]:
                        best = (demand, tk.id, cand)
        if best is None or best[0] >= w.demand:
            raise InfeasibleTightening("no feasible tightening found")
        current = _with_virtual_deadline(current, best[1], best[2])
    raise InfeasibleTightening("no feasible tightening found within the round limit")


# ---------------------------------------------------------------------------
# Interface generation and the hierarchical test
# ---------------------------------------------------------------------------


def _interface_horizon(comp: Component, cap_lo: Fraction) -> int | None:
    """Sweep horizon for supply-side checks at one probed low capacity.

    The component's demand envelope is linear, ``slope * t + offset`` with
    the per-component slope and offset of the flat-test horizon; the worst
    supply pattern delivers at least the low capacity once per period after
    a bounded prefix, ``rate * (t - 2T)``.  A violation therefore cannot
    occur past their crossing point.  ``None`` when the probed rate does
    not exceed the demand slope (no finite horizon exists; the capacity
    cannot sustain the workload except at exact rate balance, which is
    handled separately).
    """
    u = utilization(comp)
    span = max((2 * tk.period - tk.deadline for tk in comp.workload), default=0)
    offset = span * u.u_hh + sum(tk.wcet_lo for tk in comp.lc_tasks)
    if u.u_ll + u.u_hl - u.u_hh < 0:
        slope = u.u_hh
    else:
        slope = u.u_ll + u.u_hl
    rate = Fraction(cap_lo, comp.interface_period)
    if rate <= slope:
        return None
    return math.ceil((offset + 2 * comp.interface_period * rate) / (rate - slope))


class _ComponentDemand:
    """Cached max-demand curves of a single component."""

    _CACHE_LIMIT = 2048  # cache only short columns; longer ones are recomputed

    def __init__(self, comp: Component):
        self.spec = validate_system(SystemSpec(components=(comp,), framework="flat"))
        self.ev = _FlatEvaluator(self.spec)
        self._curves: dict[int, np.ndarray] = {}
        self._flat_curve: np.ndarray | None = None

    def curve(self, t: int) -> np.ndarray:
        if t in self._curves:
            return self._curves[t]
        curve = self.ev.demand_curve(t)
        if t <= self._CACHE_LIMIT:
            self._curves[t] = curve
        return curve

    def lc_mode_curve(self, horizon: int) -> np.ndarray:
        """Max demand with the external switch at the interval end, per t."""
        if self._flat_curve is None or len(self._flat_curve) <= horizon:
            tasks = self.spec.tasks
            g = self.ev.groups[0]
            if not tasks:
                self._flat_curve = np.zeros(horizon + 1, dtype=np.int64)
            else:
                at_zero, at_end = dbf_endpoint_rows(tasks, horizon)
                if g.kind == _SINGLE:
                    self._flat_curve = at_end.sum(axis=0)
                elif g.kind == _PURE_HC:
                    deltas = np.maximum(0, at_zero - at_end)
                    tl = g.comp.tolerance_limit
                    if tl >= deltas.shape[0]:
                        top = deltas.sum(axis=0)
                    else:
                        top = np.sort(deltas, axis=0)[::-1][:tl].sum(axis=0)
                    self._flat_curve = at_end.sum(axis=0) + top
                else:
                    self._flat_curve = np.array(
                        [int(self.curve(t)[t]) for t in range(horizon + 1)],
                        dtype=np.int64,
                    )
        return self._flat_curve


def generate_interface(comp: Component, delta: Fraction = DELTA) -> InterfaceResult:
    """Minimal interface capacities for a component, by binary search.

    Searches the low capacity against the LC-mode supply bound first, then
    the high capacity against the mode-switch supply bound, both on the
    ``delta`` grid; monotonicity of supply in each capacity makes binary
    search sound (and it is cross-checked against linear scans in tests).
    """
    if comp.interface_period is None:
        raise ValueError(f"component {comp.id!r}: missing interface_period")
    period = comp.interface_period
    crit = HC if comp.is_hc_component else LC
    if not comp.workload:
        iface = MCPRInterface(period, crit, Fraction(0), Fraction(0))
        return InterfaceResult(True, iface, Fraction(0), Fraction(0), 0)

    steps = int(period / delta)
    demand = _ComponentDemand(comp)
    if _interface_horizon(comp, Fraction(period)) is None:
        # even the full processor does not outpace the demand slope; only
        # exact rate balance of a switch-free workload is decidable (the
        # demand-supply margin then repeats every hyperperiod)
        if crit is LC and utilization(comp).u_ll == 1:
            horizon = math.lcm(*(tk.period for tk in comp.workload)) + period
            curve = demand.lc_mode_curve(horizon)
            if all(curve[t] <= t for t in range(1, horizon + 1)):
                cap = Fraction(period)
                iface = MCPRInterface(period, LC, cap, cap)
                return InterfaceResult(True, iface, cap, cap, horizon)
        return InterfaceResult(False, None, None, None, 0)

    def check_lo(k: int) -> bool:
        cap = k * delta
        horizon = _interface_horizon(comp, cap)
        if horizon is None:
            return False  # supply rate cannot sustain the demand slope
        iface = MCPRInterface(period, HC, cap, cap)
        nums, d = sbf_lc_array(iface, horizon)
        curve = demand.lc_mode_curve(horizon)
        return bool(np.all(curve[1 : horizon + 1] * d <= nums[1 : horizon + 1]))

    if not check_lo(steps):
        return InterfaceResult(False, None, None, None, 0)
    lo, hi = 0, steps  # check_lo(0) always fails: zero rate sustains nothing
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if check_lo(mid):
            hi = mid
        else:
            lo = mid
    k_lo = hi
    cap_lo = k_lo * delta
    horizon = int(_interface_horizon(comp, cap_lo))

    if crit is LC:
        iface = MCPRInterface(period, LC, cap_lo, cap_lo)
        return InterfaceResult(True, iface, cap_lo, cap_lo, horizon)

    cap_hi = _search_cap_hi(demand, period, delta, cap_lo, horizon)
    if cap_hi is None:
        return InterfaceResult(False, None, None, None, horizon)
    iface = MCPRInterface(period, HC, cap_lo, cap_hi)
    return InterfaceResult(True, iface, cap_lo, cap_hi, horizon)


def _search_cap_hi(
    demand: "_ComponentDemand",
    period: int,
    delta: Fraction,
    cap_lo: Fraction,
    horizon: int,
) -> Fraction | None:
    """Least high capacity passing the mode-switch supply check.

    Interval lengths whose cheap demand bound stays under the guaranteed
    low-rate supply envelope cannot violate for any high capacity and are
    skipped; the rest are checked exactly, vectorized over the switch
    instant.
    """
    steps = int(period / delta)
    k_lo = int(cap_lo / delta)
    bound = demand.ev.bound_curve(horizon)
    t_all = np.arange(horizon + 1, dtype=np.int64)
    # bound[t] > cap_lo * (t - 2*period) / period, exactly in integers
    num, den = cap_lo.numerator, cap_lo.denominator
    mask = bound * den * period > num * (t_all - 2 * period)
    candidates = [int(t) for t in np.flatnonzero(mask) if t >= 1]

    def check_hi(k: int) -> bool:
        iface = MCPRInterface(period, HC, cap_lo, k * delta)
        for t in candidates:
            curve = demand.curve(t)
            nums, d = sbf_array(iface, t, np.arange(t, dtype=np.int64))
            if np.any(curve[:t] * d > nums):
                return False
        return True

    if not check_hi(steps):
        return None
    if check_hi(k_lo):
        return k_lo * delta
    lo, hi = k_lo, steps
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if check_hi(mid):
            hi = mid
        else:
            lo = mid
    return hi * delta


def interface_task(comp_id: str, iface: MCPRInterface, scale: int) -> MCTask | None:
    """Lift an interface to a task in the parent workload, time scaled up.

    Capacities live on a sub-tick grid, so the parent analysis runs on a
    clock scaled by ``scale`` (the grid denominator).  An HC interface
    whose capacities coincide is bumped by one grid step to respect the
    strict WCET ordering; a zero-capacity interface represents an empty
    component and lifts to nothing.
    """
    c_lo = int(iface.cap_lo * scale)
    c_hi = int(iface.cap_hi * scale)
    period = iface.period * scale
    if c_hi == 0:
        return None
    if iface.criticality is HC and c_hi == c_lo:
        c_hi = min(c_lo + 1, period)
    crit = iface.criticality if c_hi > c_lo else LC
    return MCTask(
        id=f"iface:{comp_id}",
        period=period,
        criticality=crit,
        wcet_lo=c_lo,
        wcet_hi=c_hi,
        deadline=period,
        virtual_deadline=period,
    )


def hierarchical_test(spec: SystemSpec, delta: Fraction = DELTA) -> HierarchicalResult:
    """Compositional test: interfaces per component, then a flat parent test.

    Each component is abstracted by its minimal interface; the interfaces
    become the parent workload (one task per component, each its own
    zero-tolerance singleton since an interface mode switch already means
    the component's external switch) and the parent is tested flat, with
    parent-level virtual deadlines assigned by the same tightening search.
    """
    spec = validate_system(spec)
    interfaces: dict[str, InterfaceResult] = {}
    for comp in spec.components:
        res = generate_interface(comp, delta)
        interfaces[comp.id] = res
        if not res.feasible:
            return HierarchicalResult(
                False, interfaces, None, None, comp.id, "no feasible interface"
            )
    scale = delta.denominator
    parent_tasks = []
    for comp in spec.components:
        task = interface_task(comp.id, interfaces[comp.id].iface, scale)
        if task is not None:
            parent_tasks.append(task)
    if not parent_tasks:
        return HierarchicalResult(True, interfaces, None, None)
    parent = SystemSpec(
        components=tuple(
            Component(id=tk.id, workload=(tk,), tolerance_limit=0) for tk in parent_tasks
        ),
        framework="flat",
    )
    try:
        parent = tighten_deadlines(parent)
    except InfeasibleTightening as exc:
        return HierarchicalResult(
            False, interfaces, parent, None, None, f"parent infeasible: {exc}"
        )
    verdict = flat_test(parent)
    return HierarchicalResult(verdict.schedulable, interfaces, parent, verdict)
