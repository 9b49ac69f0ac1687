"""Domain types for mixed-criticality task systems.

Time lives on a discrete integer grid (1 time unit = 1 tick), which keeps
every demand/supply formula exact and every quantifier enumerable.
Utilizations are exact rationals so that horizon denominators can be
sign-tested without rounding doubt.  All types are immutable after
validation and safe to share across threads.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Union


class CriticalityLevel(enum.IntEnum):
    """Two-level criticality designation, totally ordered LC < HC."""

    LC = 0
    HC = 1

    def __str__(self) -> str:  # canonical wire form
        return self.name


LC = CriticalityLevel.LC
HC = CriticalityLevel.HC


class SpecValidationError(ValueError):
    """Raised when a task system violates a structural invariant.

    Carries one diagnostic string per broken rule in ``errors``.
    """

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


@dataclass(frozen=True, slots=True)
class MCTask:
    """A constrained-deadline sporadic task with dual WCET estimates.

    ``wcet_lo`` is the optimistic (low-confidence) execution budget and
    ``wcet_hi`` the pessimistic one; they coincide for LC tasks.
    ``virtual_deadline`` is the tightened deadline used while the task runs
    in LC mode; the tightening procedure writes it back, it is never
    recomputed implicitly.
    """

    id: str
    period: int
    criticality: CriticalityLevel
    wcet_lo: int
    wcet_hi: int
    deadline: int
    virtual_deadline: int

    @property
    def is_hc(self) -> bool:
        return self.criticality is HC


@dataclass(frozen=True, slots=True)
class Component:
    """A named task set with a high-criticality tolerance limit.

    ``tolerance_limit`` is the number of in-component tasks that may
    simultaneously overrun their optimistic WCET before the rest of the
    system loses its LC-mode guarantees.  ``interface_period`` is only
    needed when the component is abstracted by a periodic interface for
    hierarchical analysis.
    """

    id: str
    workload: tuple[MCTask, ...]
    tolerance_limit: int
    interface_period: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "workload", tuple(self.workload))

    @property
    def hc_tasks(self) -> tuple[MCTask, ...]:
        return tuple(t for t in self.workload if t.is_hc)

    @property
    def lc_tasks(self) -> tuple[MCTask, ...]:
        return tuple(t for t in self.workload if not t.is_hc)

    @property
    def is_hc_component(self) -> bool:
        return any(t.is_hc for t in self.workload)


@dataclass(frozen=True, slots=True)
class SystemSpec:
    """An ordered list of components forming one single-core system."""

    components: tuple[Component, ...]
    framework: str = "flat"

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def tasks(self) -> tuple[MCTask, ...]:
        return tuple(t for c in self.components for t in c.workload)


@dataclass(frozen=True, slots=True)
class UtilizationSummary:
    """Exact utilization totals of a task set.

    ``u_ll`` sums C^L/T over LC tasks, ``u_hl`` sums C^L/T over HC tasks
    and ``u_hh`` sums C^H/T over HC tasks.
    """

    u_ll: Fraction
    u_hl: Fraction
    u_hh: Fraction
    scope: str = "component"


FRAMEWORKS = ("flat", "hierarchical")


def _task_errors(task: MCTask, where: str) -> list[str]:
    errs = []
    e = lambda rule: errs.append(f"task {task.id!r} ({where}): {rule}")
    for name in ("period", "wcet_lo", "wcet_hi", "deadline", "virtual_deadline"):
        v = getattr(task, name)
        if not isinstance(v, int) or isinstance(v, bool) or v <= 0:
            e(f"{name} must be a positive integer, got {v!r}")
    if not isinstance(task.criticality, CriticalityLevel):
        e(f"criticality must be LC or HC, got {task.criticality!r}")
        return errs
    if errs:
        return errs
    if task.deadline > task.period:
        e("constrained deadline violated (D > T)")
    if task.is_hc and task.wcet_lo >= task.wcet_hi:
        e("HC wcet ordering violated (needs C_lo < C_hi)")
    if not task.is_hc and task.wcet_lo != task.wcet_hi:
        e("LC wcet mismatch (needs C_lo = C_hi)")
    if task.virtual_deadline > task.deadline:
        e("virtual deadline exceeds real deadline")
    if not task.is_hc and task.virtual_deadline != task.deadline:
        e("LC task must keep virtual deadline equal to deadline")
    if task.wcet_lo > task.virtual_deadline:
        e("trivially infeasible: C_lo > virtual deadline")
    if task.wcet_hi > task.deadline:
        e("trivially infeasible: C_hi > deadline")
    return errs


def validation_errors(spec: SystemSpec) -> list[str]:
    """Collect every invariant violation in ``spec`` (empty list if valid)."""
    errs: list[str] = []
    if spec.framework not in FRAMEWORKS:
        errs.append(f"framework must be one of {FRAMEWORKS}, got {spec.framework!r}")
    if not spec.components:
        errs.append("system needs at least one component")
    seen_comp: set[str] = set()
    seen_task: set[str] = set()
    for comp in spec.components:
        if comp.id in seen_comp:
            errs.append(f"duplicate component id {comp.id!r}")
        seen_comp.add(comp.id)
        if comp.interface_period is not None and (
            not isinstance(comp.interface_period, int) or comp.interface_period <= 0
        ):
            errs.append(f"component {comp.id!r}: interface_period must be a positive integer")
        hc_count = sum(1 for t in comp.workload if t.is_hc)
        if not isinstance(comp.tolerance_limit, int) or comp.tolerance_limit < 0:
            errs.append(f"component {comp.id!r}: tolerance limit must be a non-negative integer")
        elif comp.tolerance_limit > hc_count:
            errs.append(
                f"component {comp.id!r}: TL exceeds HC count "
                f"({comp.tolerance_limit} > {hc_count})"
            )
        if hc_count == 0 and comp.tolerance_limit != 0:
            errs.append(f"component {comp.id!r}: all-LC component must have TL = 0")
        for task in comp.workload:
            if task.id in seen_task:
                errs.append(f"duplicate task id {task.id!r}")
            seen_task.add(task.id)
            errs.extend(_task_errors(task, comp.id))
    return errs


def validate_system(spec: SystemSpec) -> SystemSpec:
    """Validate every invariant and return the normalized system.

    Normalization orders components HC-first, ties broken by id; nothing
    else is rewritten.  Idempotent.  Raises :class:`SpecValidationError`
    listing one diagnostic per violation.
    """
    errs = validation_errors(spec)
    if errs:
        raise SpecValidationError(errs)
    ordered = tuple(sorted(spec.components, key=lambda c: (not c.is_hc_component, c.id)))
    return replace(spec, components=ordered)


def utilization(scope: Union[Component, SystemSpec]) -> UtilizationSummary:
    """Exact rational utilization sums of a component or a whole system."""
    if isinstance(scope, SystemSpec):
        tasks: Iterable[MCTask] = scope.tasks
        kind = "system"
    else:
        tasks = scope.workload
        kind = "component"
    u_ll = Fraction(0)
    u_hl = Fraction(0)
    u_hh = Fraction(0)
    for t in tasks:
        if t.is_hc:
            u_hl += Fraction(t.wcet_lo, t.period)
            u_hh += Fraction(t.wcet_hi, t.period)
        else:
            u_ll += Fraction(t.wcet_lo, t.period)
    return UtilizationSummary(u_ll=u_ll, u_hl=u_hl, u_hh=u_hh, scope=kind)


# ---------------------------------------------------------------------------
# Canonical serialized form
# ---------------------------------------------------------------------------

_TASK_KEYS = {"id", "T", "L", "C_lo", "C_hi", "D", "D_lo"}
_COMP_KEYS = {"id", "tl", "interface_period", "tasks"}
_SPEC_KEYS = {"framework", "components"}


def _reject_unknown(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise SpecValidationError(
            [f"{where}: unknown field(s) {sorted(unknown)}"]
        )


def task_from_dict(obj: dict) -> MCTask:
    _reject_unknown(obj, _TASK_KEYS, f"task {obj.get('id', '?')!r}")
    try:
        crit = CriticalityLevel[obj["L"]]
    except KeyError:
        raise SpecValidationError([f"task {obj.get('id', '?')!r}: L must be 'LC' or 'HC'"])
    deadline = obj["D"]
    return MCTask(
        id=obj["id"],
        period=obj["T"],
        criticality=crit,
        wcet_lo=obj["C_lo"],
        wcet_hi=obj["C_hi"],
        deadline=deadline,
        virtual_deadline=obj.get("D_lo", deadline),
    )


def task_to_dict(task: MCTask) -> dict:
    return {
        "id": task.id,
        "T": task.period,
        "L": str(task.criticality),
        "C_lo": task.wcet_lo,
        "C_hi": task.wcet_hi,
        "D": task.deadline,
        "D_lo": task.virtual_deadline,
    }


def spec_from_dict(obj: dict) -> SystemSpec:
    """Parse the canonical taskset mapping; unknown fields are rejected."""
    if not isinstance(obj, dict):
        raise SpecValidationError(["top level must be a JSON object"])
    _reject_unknown(obj, _SPEC_KEYS, "taskset")
    comps = []
    for cobj in obj.get("components", []):
        _reject_unknown(cobj, _COMP_KEYS, f"component {cobj.get('id', '?')!r}")
        comps.append(
            Component(
                id=cobj["id"],
                workload=tuple(task_from_dict(t) for t in cobj.get("tasks", [])),
                tolerance_limit=cobj["tl"],
                interface_period=cobj.get("interface_period"),
            )
        )
    return SystemSpec(components=tuple(comps), framework=obj.get("framework", "flat"))


def spec_to_dict(spec: SystemSpec) -> dict:
    comps = []
    for comp in spec.components:
        cobj: dict = {"id": comp.id, "tl": comp.tolerance_limit}
        if comp.interface_period is not None:
            cobj["interface_period"] = comp.interface_period
        cobj["tasks"] = [task_to_dict(t) for t in comp.workload]
        comps.append(cobj)
    return {"framework": spec.framework, "components": comps}


def loads_spec(text: str) -> SystemSpec:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecValidationError([f"invalid JSON: {exc}"]) from exc
    return spec_from_dict(obj)


def dumps_spec(spec: SystemSpec, indent: int | None = 2) -> str:
    return json.dumps(spec_to_dict(spec), indent=indent)


def load_spec(path: str) -> SystemSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_spec(fh.read())


def save_spec(spec: SystemSpec, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_spec(spec) + "\n")


def with_tolerance_limits(spec: SystemSpec, tl: Union[int, dict[str, int]]) -> SystemSpec:
    """Copy of ``spec`` with HC components' tolerance limits replaced.

    ``tl`` is either a single value applied to every HC component (clamped
    to the component's HC count) or a mapping component id -> TL.
    """
    comps = []
    for comp in spec.components:
        hc_count = sum(1 for t in comp.workload if t.is_hc)
        if hc_count == 0:
            comps.append(comp)
            continue
        if isinstance(tl, dict):
            value = tl.get(comp.id, comp.tolerance_limit)
        else:
            value = min(tl, hc_count)
        comps.append(replace(comp, tolerance_limit=value))
    return replace(spec, components=tuple(comps))
