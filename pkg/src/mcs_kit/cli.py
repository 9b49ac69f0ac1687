"""Command-line interface: analyze, tighten, maximize-tl, generate-interface,
generate-tasksets, simulate, sweep-schedulability, sweep-pfj, dump-curves.

Output contract: machine-readable first (JSON verdicts, CSV tables with a
``# schema:`` comment line); human-oriented text behind ``--pretty``.
Exit codes: 0 schedulable / success, 1 unschedulable or infeasible
(witness printed), 2 input error.  Every command is deterministic given
its flags and ``--seed``, and the seed is echoed in all outputs.  Sweeps
fan out over a worker pool (``--jobs`` or ``MCS_KIT_JOBS``) and render a
figure next to the CSV unless ``--no-plot``.
"""

from __future__ import annotations

import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction

import click
import numpy as np

from .analysis import (
    FlatVerdict,
    InfeasibleTightening,
    flat_test,
    generate_interface,
    hierarchical_test,
    max_schedulable_tl,
    max_tolerance,
    tighten_deadlines,
)
from .demand import ModeSwitchInstants, dbf_component, dbf_component_optimized
from .model import (
    SpecValidationError,
    SystemSpec,
    dumps_spec,
    load_spec,
    save_spec,
    validate_system,
    with_tolerance_limits,
)
from .simulator import SimConfig, SimReport, compare_mechanisms, simulate
from .supply import MCPRInterface, sbf, sbf_lc, sbf_pattern_a, sbf_pattern_b
from .taskgen import GenConfig, GenerationError, generate
from . import plotting
from .model import CriticalityLevel

DEFAULT_TL_FRACTIONS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
DEFAULT_PROBABILITIES = (0.005, 0.02, 0.05, 0.2, 0.5)
DEFAULT_PFJ_BOUNDS = (0.8, 0.85, 0.9)


@dataclass(frozen=True, slots=True)
class SweepConfig:
    """Grid and scale of one experiment sweep."""

    bounds: tuple[float, ...]
    tasksets_per_point: int = 100
    tl_fractions: tuple[float, ...] = DEFAULT_TL_FRACTIONS
    probabilities: tuple[float, ...] = DEFAULT_PROBABILITIES
    framework: str = "flat"
    seed: int = 0
    horizon: int = 10_000
    exec_policy: str = "full_hi"
    interface_period: int = 5
    delta: str = "1/100"
    optimized_dbf: bool = False
    jobs: int = 1
    max_attempts_factor: int = 50

    def __post_init__(self) -> None:
        if self.tasksets_per_point <= 0:
            raise ValueError("tasksets_per_point must be positive")
        if not all(0.0 <= f <= 1.0 for f in self.tl_fractions):
            raise ValueError("tl_fractions must lie in [0, 1]")
        if self.framework not in ("flat", "hierarchical"):
            raise ValueError("framework must be flat or hierarchical")


def _fail(msg: str) -> None:
    click.echo(f"error: {msg}", err=True)
    sys.exit(2)


def _load(path: str) -> SystemSpec:
    try:
        return validate_system(load_spec(path))
    except (OSError, SpecValidationError) as exc:
        _fail(str(exc))


def _emit(obj: dict, pretty: bool) -> None:
    click.echo(json.dumps(obj, indent=2 if pretty else None))


def _frac(value: Fraction | None):
    if value is None:
        return None
    return {"exact": str(value), "float": float(value)}


def _verdict_json(v: FlatVerdict, seed: int | None = None) -> dict:
    out = {
        "schedulable": v.schedulable,
        "t_max_used": v.t_max_used,
        "horizon_finite": v.horizon_finite,
        "utilization": {
            "u_ll": _frac(v.utilization.u_ll),
            "u_hl": _frac(v.utilization.u_hl),
            "u_hh": _frac(v.utilization.u_hh),
        },
        "witness": None,
    }
    if v.witness is not None:
        out["witness"] = {
            "t": v.witness.t,
            "t_E": v.witness.ems,
            "t_I": dict(v.witness.ims_by_component),
            "demand": v.witness.demand,
        }
    if seed is not None:
        out["seed"] = seed
    return out


def _write_rows(out, schema: str, seed, header: list[str], rows: list[list]) -> None:
    def dump(fh):
        fh.write(f"# schema: {schema} seed={seed}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)

    if out is None:
        dump(sys.stdout)
    else:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            dump(fh)


def _figure_target(out: str | None, plot: str | None, no_plot: bool) -> str | None:
    if no_plot:
        return None
    if plot:
        return plot
    if out:
        return os.path.splitext(out)[0] + ".png"
    return None


def _jobs_option(value: int | None) -> int:
    if value is not None:
        return max(1, value)
    env = os.environ.get("MCS_KIT_JOBS")
    return max(1, int(env)) if env else 1


def _pool_map(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=1))


def _derive_seed(*parts: int) -> int:
    return int(np.random.SeedSequence(parts).generate_state(1)[0])


def _parse_floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip() != ""]


@click.group()
@click.version_option(package_name="mcs-kit")
def main() -> None:
    """Schedulability analysis and simulation for mixed-criticality systems."""


# ---------------------------------------------------------------------------
# analyze / tighten / maximize-tl / generate-interface
# ---------------------------------------------------------------------------


@main.command()
@click.argument("taskset", type=click.Path())
@click.option("--framework", type=click.Choice(["flat", "hierarchical"]), default=None,
              help="Override the framework recorded in the file.")
@click.option("--tl", type=int, default=None, help="Force this tolerance limit on every HC component.")
@click.option("--optimized-dbf", is_flag=True, help="Apply the demand-split optimization.")
@click.option("--max-hc-components", type=int, default=1, show_default=True,
              help="Refuse systems with more HC components than this (cost guard).")
@click.option("--fallback-horizon", type=int, default=0, show_default=True,
              help="Witness hunt horizon when the utilization condition fails.")
@click.option("--delta", default="1/100", show_default=True, help="Capacity grid resolution (hierarchical).")
@click.option("--pretty", is_flag=True)
def analyze(taskset, framework, tl, optimized_dbf, max_hc_components, fallback_horizon, delta, pretty):
    """Schedulability verdict for a taskset file (exit 0 yes, 1 no, 2 error)."""
    spec = _load(taskset)
    if framework:
        spec = validate_system(SystemSpec(spec.components, framework=framework))
    if tl is not None:
        spec = with_tolerance_limits(spec, tl)
    if spec.framework == "hierarchical":
        try:
            res = hierarchical_test(spec, Fraction(delta))
        except (ValueError, SpecValidationError) as exc:
            _fail(str(exc))
        out = {
            "schedulable": res.schedulable,
            "framework": "hierarchical",
            "interfaces": {
                cid: {
                    "feasible": r.feasible,
                    "period": r.iface.period if r.iface else None,
                    "cap_lo": _frac(r.c_lo_minimal),
                    "cap_hi": _frac(r.c_hi_minimal),
                }
                for cid, r in res.interfaces.items()
            },
            "failing_component": res.failing_component,
            "parent_verdict": _verdict_json(res.parent_verdict)
            if res.parent_verdict
            else None,
        }
        _emit(out, pretty)
        sys.exit(0 if res.schedulable else 1)
    try:
        verdict = flat_test(
            spec,
            use_optimized_dbf=optimized_dbf,
            fallback_horizon=fallback_horizon,
            max_hc_components=max_hc_components,
        )
    except ValueError as exc:
        _fail(str(exc))
    out = _verdict_json(verdict)
    out["framework"] = "flat"
    _emit(out, pretty)
    sys.exit(0 if verdict.schedulable else 1)


@main.command()
@click.argument("taskset", type=click.Path())
@click.option("--out", "-o", type=click.Path(), default=None, help="Write the tightened taskset here.")
@click.option("--optimized-dbf", is_flag=True)
def tighten(taskset, out, optimized_dbf):
    """Assign virtual deadlines so the flat test passes (exit 1 if impossible)."""
    spec = _load(taskset)
    try:
        result = tighten_deadlines(spec, use_optimized_dbf=optimized_dbf)
    except InfeasibleTightening as exc:
        click.echo(f"infeasible: {exc}", err=True)
        sys.exit(1)
    if out:
        save_spec(result, out)
    else:
        click.echo(dumps_spec(result))
    sys.exit(0)


@main.command("maximize-tl")
@click.argument("taskset", type=click.Path())
@click.option("--optimized-dbf", is_flag=True)
@click.option("--pretty", is_flag=True)
def maximize_tl(taskset, optimized_dbf, pretty):
    """Largest tolerance limit of the HC component that stays schedulable."""
    spec = _load(taskset)
    try:
        res = max_tolerance(spec, use_optimized_dbf=optimized_dbf)
    except ValueError as exc:
        _fail(str(exc))
    _emit(
        {
            "schedulable": res.schedulable,
            "tl": res.tl,
            "hc_component": res.hc_component,
            "hc_count": res.hc_count,
        },
        pretty,
    )
    sys.exit(0 if res.schedulable else 1)


@main.command("generate-interface")
@click.argument("taskset", type=click.Path())
@click.option("--component", "component_id", default=None, help="Only this component.")
@click.option("--delta", default="1/100", show_default=True)
@click.option("--pretty", is_flag=True)
def generate_interface_cmd(taskset, component_id, delta, pretty):
    """Minimal interface capacities per component (exit 1 if any infeasible)."""
    spec = _load(taskset)
    try:
        resolution = Fraction(delta)
    except (ValueError, ZeroDivisionError):
        _fail(f"bad --delta {delta!r}")
    comps = [c for c in spec.components if component_id in (None, c.id)]
    if not comps:
        _fail(f"no component named {component_id!r}")
    results = {}
    all_ok = True
    for comp in comps:
        try:
            res = generate_interface(comp, resolution)
        except ValueError as exc:
            _fail(str(exc))
        all_ok &= res.feasible
        results[comp.id] = {
            "feasible": res.feasible,
            "period": comp.interface_period,
            "criticality": "HC" if comp.is_hc_component else "LC",
            "cap_lo": _frac(res.c_lo_minimal),
            "cap_hi": _frac(res.c_hi_minimal),
            "horizon_used": res.horizon_used,
        }
    _emit({"delta": str(resolution), "interfaces": results}, pretty)
    sys.exit(0 if all_ok else 1)


# ---------------------------------------------------------------------------
# generate-tasksets / simulate
# ---------------------------------------------------------------------------


@main.command("generate-tasksets")
@click.option("--bound", type=float, required=True, help="Target for max(U_ll+U_hl, U_hh).")
@click.option("--count", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--hc-probability", type=float, default=0.5, show_default=True)
@click.option("--tighten", "do_tighten", is_flag=True, help="Fill virtual deadlines before writing.")
@click.option("--out-dir", type=click.Path(), default=None,
              help="Write taskset_<k>.json files here instead of stdout.")
def generate_tasksets(bound, count, seed, hc_probability, do_tighten, out_dir):
    """Draw random tasksets with the documented generation protocol."""
    specs = []
    for k in range(count):
        cfg = GenConfig(
            target_bound=bound,
            hc_probability=hc_probability,
            seed=_derive_seed(seed, k),
        )
        try:
            spec = generate(cfg)
        except GenerationError as exc:
            _fail(str(exc))
        if do_tighten:
            try:
                spec = tighten_deadlines(spec)
            except InfeasibleTightening as exc:
                click.echo(f"infeasible: taskset {k}: {exc}", err=True)
                sys.exit(1)
        specs.append(spec)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        for k, spec in enumerate(specs):
            save_spec(spec, os.path.join(out_dir, f"taskset_{k:04d}.json"))
        click.echo(json.dumps({"written": count, "dir": out_dir, "seed": seed}))
    else:
        for spec in specs:
            click.echo(dumps_spec(spec, indent=None))
    sys.exit(0)


@main.command("simulate")
@click.argument("taskset", type=click.Path())
@click.option("--horizon", type=int, default=10_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--probability", type=float, default=0.0, show_default=True,
              help="Per-job probability of exceeding the optimistic budget.")
@click.option("--exec-policy", type=click.Choice(["full_hi", "uniform_between"]), default="full_hi")
@click.option("--release-policy", type=click.Choice(["strictly_periodic", "sporadic_min_separation"]),
              default="strictly_periodic")
@click.option("--drop-policy", type=click.Choice(["drop_lc_in_component", "keep_lc_best_effort"]),
              default="drop_lc_in_component")
@click.option("--tl", type=int, default=None, help="Force this tolerance limit on every HC component.")
@click.option("--compare", is_flag=True, help="Coupled run of proposed vs classical mechanism.")
@click.option("--trace", type=click.Path(), default=None, help="Write a JSON-lines event log here.")
@click.option("--pretty", is_flag=True)
def simulate_cmd(taskset, horizon, seed, probability, exec_policy, release_policy,
                 drop_policy, tl, compare, trace, pretty):
    """Run the discrete-event simulator and report deadline misses and PFJ."""
    spec = _load(taskset)
    if tl is not None:
        spec = with_tolerance_limits(spec, tl)
    cfg = SimConfig(
        horizon=horizon,
        seed=seed,
        hc_switch_probability=probability,
        hc_exec_policy=exec_policy,
        release_policy=release_policy,
        drop_policy_on_ims=drop_policy,
        record_events=trace is not None,
    )

    def report_json(rep: SimReport) -> dict:
        return {
            "finished_lc": rep.finished_lc,
            "max_lc": rep.max_lc,
            "pfj": _frac(rep.pfj),
            "deadline_misses": [
                {"task": t, "release": r, "kind": k} for (t, r, k) in rep.deadline_misses
            ],
            "mode_timeline": [
                {"tick": t, "component": c, "event": e} for (t, c, e) in rep.mode_timeline
            ],
            "seed": rep.seed,
        }

    try:
        if compare:
            reports = compare_mechanisms(spec, cfg)
            _emit({m: report_json(r) for m, r in reports.items()}, pretty)
            rep = reports["proposed"]
        else:
            rep = simulate(spec, cfg)
            _emit(report_json(rep), pretty)
    except ValueError as exc:
        _fail(str(exc))
    if trace:
        with open(trace, "w", encoding="utf-8") as fh:
            for ev in rep.events or []:
                fh.write(json.dumps(ev) + "\n")
    sys.exit(0)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


def _sched_point(args) -> list[bool]:
    bound, seed, fractions, optimized, framework, iface_period, delta = args
    try:
        spec = generate(GenConfig(target_bound=bound, seed=seed))
    except GenerationError:
        return [False] * len(fractions)
    try:
        tight = tighten_deadlines(spec, use_optimized_dbf=optimized)
    except InfeasibleTightening:
        return [False] * len(fractions)
    hc_comps = [c for c in tight.components if c.is_hc_component]
    if framework == "hierarchical":
        tight = SystemSpec(
            tuple(replace(c, interface_period=iface_period) for c in tight.components),
            framework="hierarchical",
        )
        out = []
        for frac in fractions:
            tls = {c.id: math.floor(frac * len(c.hc_tasks)) for c in hc_comps}
            out.append(
                hierarchical_test(
                    with_tolerance_limits(tight, tls), Fraction(delta)
                ).schedulable
            )
        return out
    if not hc_comps:
        ok = flat_test(tight, use_optimized_dbf=optimized).schedulable
        return [ok] * len(fractions)
    res = max_schedulable_tl(tight, use_optimized_dbf=optimized)
    if not res.schedulable:
        return [False] * len(fractions)
    return [math.floor(frac * res.hc_count) <= res.tl for frac in fractions]


@main.command("sweep-schedulability")
@click.option("--bounds", default="0.4:0.9:0.05", show_default=True,
              help="Utilization bounds, 'start:stop:step' or comma list.")
@click.option("--fractions", default=",".join(str(f) for f in DEFAULT_TL_FRACTIONS),
              show_default=True, help="Tolerance-limit fractions of the HC task count.")
@click.option("--per-point", type=int, default=100, show_default=True)
@click.option("--full", is_flag=True, help="Full-scale 1000 tasksets per point.")
@click.option("--framework", type=click.Choice(["flat", "hierarchical"]), default="flat")
@click.option("--interface-period", type=int, default=5, show_default=True)
@click.option("--delta", default="1/100", show_default=True,
              help="Capacity resolution for hierarchical points (coarser is much faster).")
@click.option("--optimized-dbf", is_flag=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=None, help="Worker processes (or MCS_KIT_JOBS).")
@click.option("--out", type=click.Path(), default=None, help="CSV path (stdout if omitted).")
@click.option("--plot", type=click.Path(), default=None, help="Figure path.")
@click.option("--no-plot", is_flag=True)
def sweep_schedulability(bounds, fractions, per_point, full, framework, interface_period,
                         delta, optimized_dbf, seed, jobs, out, plot, no_plot):
    """Schedulability ratio per (utilization bound, tolerance fraction)."""
    if ":" in bounds:
        try:
            start, stop, step = (float(x) for x in bounds.split(":"))
        except ValueError:
            _fail(f"bad --bounds {bounds!r}")
        values = []
        b = start
        while b <= stop + 1e-9:
            values.append(round(b, 10))
            b += step
    else:
        values = _parse_floats(bounds)
    try:
        cfg = SweepConfig(
            bounds=tuple(values),
            tasksets_per_point=1000 if full else per_point,
            tl_fractions=tuple(_parse_floats(fractions)),
            framework=framework,
            seed=seed,
            interface_period=interface_period,
            delta=delta,
            optimized_dbf=optimized_dbf,
            jobs=_jobs_option(jobs),
        )
    except ValueError as exc:
        _fail(str(exc))
    rows = run_schedulability_sweep(cfg)
    _write_rows(out, "sched_sweep.v1", seed,
                ["bound", "tl_fraction", "framework", "schedulable_ratio"], rows)
    fig = _figure_target(out, plot, no_plot)
    if fig:
        plotting.plot_schedulability(
            [dict(zip(["bound", "tl_fraction", "framework", "schedulable_ratio"], r)) for r in rows],
            fig,
        )
    sys.exit(0)


def run_schedulability_sweep(cfg: SweepConfig) -> list[list]:
    """Rows of (bound, tl_fraction, framework, schedulable_ratio), sorted."""
    rows = []
    for bi, bound in enumerate(cfg.bounds):
        tasks = [
            (bound, _derive_seed(cfg.seed, bi, k), list(cfg.tl_fractions),
             cfg.optimized_dbf, cfg.framework, cfg.interface_period, cfg.delta)
            for k in range(cfg.tasksets_per_point)
        ]
        results = _pool_map(_sched_point, tasks, cfg.jobs)
        for fi, frac in enumerate(cfg.tl_fractions):
            ratio = sum(1 for r in results if r[fi]) / cfg.tasksets_per_point
            rows.append([bound, frac, cfg.framework, ratio])
    rows.sort(key=lambda r: (r[0], r[1]))
    return rows


def _pfj_point(args):
    bound, seed, probabilities, horizon, exec_policy = args
    try:
        spec = generate(GenConfig(target_bound=bound, seed=seed))
    except GenerationError:
        return None
    try:
        tight = tighten_deadlines(spec)
    except InfeasibleTightening:
        return None
    hc_comps = [c for c in tight.components if c.is_hc_component]
    if hc_comps:
        res = max_schedulable_tl(tight)
        if not res.schedulable:
            return None
        star = with_tolerance_limits(tight, {hc_comps[0].id: res.tl})
    else:
        if not flat_test(tight).schedulable:
            return None
        star = tight
    out = []
    for prob in probabilities:
        cfg = SimConfig(
            horizon=horizon,
            seed=seed,
            hc_switch_probability=prob,
            hc_exec_policy=exec_policy,
        )
        reports = compare_mechanisms(star, cfg)
        out.append((prob, float(reports["proposed"].pfj), float(reports["classical"].pfj)))
    return out


def run_pfj_sweep(cfg: SweepConfig) -> list[list]:
    """Rows of (bound, probability, mechanism, mean_pfj, stddev, n), sorted.

    Per bound, tasksets are drawn in seed order until
    ``tasksets_per_point`` of them qualify (classically schedulable), so
    the result does not depend on the worker pool size.
    """
    rows = []
    for bi, bound in enumerate(cfg.bounds):
        collected: list[list] = []
        attempt = 0
        limit = cfg.tasksets_per_point * cfg.max_attempts_factor
        while len(collected) < cfg.tasksets_per_point and attempt < limit:
            batch = min(max(cfg.jobs * 8, 16), limit - attempt)
            tasks = [
                (bound, _derive_seed(cfg.seed, bi, attempt + j),
                 list(cfg.probabilities), cfg.horizon, cfg.exec_policy)
                for j in range(batch)
            ]
            for res in _pool_map(_pfj_point, tasks, cfg.jobs):
                if res is not None and len(collected) < cfg.tasksets_per_point:
                    collected.append(res)
            attempt += batch
        n = len(collected)
        if n == 0:
            continue
        for pi, prob in enumerate(cfg.probabilities):
            for mi, mech in enumerate(("proposed", "classical")):
                vals = [point[pi][1 + mi] for point in collected]
                mean = sum(vals) / n
                std = math.sqrt(sum((v - mean) ** 2 for v in vals) / n)
                rows.append([bound, prob, mech, round(mean, 6), round(std, 6), n])
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    return rows


@main.command("sweep-pfj")
@click.option("--bounds", default=",".join(str(b) for b in DEFAULT_PFJ_BOUNDS), show_default=True)
@click.option("--probabilities", default=",".join(str(p) for p in DEFAULT_PROBABILITIES),
              show_default=True)
@click.option("--per-point", type=int, default=100, show_default=True,
              help="Classically schedulable tasksets per bound.")
@click.option("--full", is_flag=True, help="Full-scale 1000 tasksets per point.")
@click.option("--horizon", type=int, default=10_000, show_default=True)
@click.option("--exec-policy", type=click.Choice(["full_hi", "uniform_between"]), default="full_hi")
@click.option("--max-attempts-factor", type=int, default=50, show_default=True,
              help="Give up after this many draws per qualifying taskset.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--plot", type=click.Path(), default=None)
@click.option("--no-plot", is_flag=True)
def sweep_pfj(bounds, probabilities, per_point, full, horizon, exec_policy,
              max_attempts_factor, seed, jobs, out, plot, no_plot):
    """Coupled-seed mean PFJ of the proposed mechanism vs the classical model.

    Tasksets are drawn until the requested number passes the classical
    test (the tolerance-limit mechanism is then granted its largest
    schedulable value), mirroring the online-evaluation protocol.
    """
    try:
        cfg = SweepConfig(
            bounds=tuple(_parse_floats(bounds)),
            tasksets_per_point=1000 if full else per_point,
            probabilities=tuple(_parse_floats(probabilities)),
            seed=seed,
            horizon=horizon,
            exec_policy=exec_policy,
            jobs=_jobs_option(jobs),
            max_attempts_factor=max_attempts_factor,
        )
    except ValueError as exc:
        _fail(str(exc))
    rows = run_pfj_sweep(cfg)
    _write_rows(out, "pfj_sweep.v1", seed,
                ["bound", "probability", "mechanism", "mean_pfj", "stddev", "n"], rows)
    fig = _figure_target(out, plot, no_plot)
    if fig:
        plotting.plot_pfj(
            [dict(zip(["bound", "probability", "mechanism", "mean_pfj"], r[:4])) for r in rows],
            fig,
        )
    sys.exit(0)


# ---------------------------------------------------------------------------
# curve dumps
# ---------------------------------------------------------------------------


@main.command("dump-curves")
@click.option("--what", type=click.Choice(["dbf", "sbf"]), required=True)
@click.option("--taskset", type=click.Path(), default=None, help="Required for dbf curves.")
@click.option("--t-end", type=int, required=True, help="Largest interval length.")
@click.option("--t-e", "t_e", type=int, default=None, help="External switch instant (dbf: default t).")
@click.option("--t-i", "t_i", type=int, default=None, help="Internal switch instant (default t_E).")
@click.option("--optimized", is_flag=True, help="Use the demand-split optimization (dbf).")
@click.option("--iface-period", type=int, default=None, help="Interface period (sbf).")
@click.option("--cap-lo", default=None, help="Low capacity, e.g. 7/2 (sbf).")
@click.option("--cap-hi", default=None, help="High capacity (sbf).")
@click.option("--out", type=click.Path(), default=None)
@click.option("--plot", type=click.Path(), default=None)
@click.option("--no-plot", is_flag=True)
def dump_curves(what, taskset, t_end, t_e, t_i, optimized, iface_period, cap_lo, cap_hi,
                out, plot, no_plot):
    """Dump demand or supply curves as CSV rows matching the library exactly."""
    if t_end < 0:
        _fail("--t-end must be non-negative")
    fig = _figure_target(out, plot, no_plot)
    if what == "dbf":
        if taskset is None:
            _fail("dbf curves need --taskset")
        spec = _load(taskset)
        fn = dbf_component_optimized if optimized else dbf_component
        rows = []
        for comp in spec.components:
            for t in range(t_end + 1):
                ems = min(t_e, t) if t_e is not None else t
                ims = min(t_i, ems) if t_i is not None else ems
                value = fn(comp, ModeSwitchInstants(t=t, ems=ems, ims=ims))
                rows.append([comp.id, t, ems, ims, value])
        _write_rows(out, "dbf_curves.v1", "-", ["component", "t", "t_E", "t_I", "dbf"], rows)
        if fig:
            plotting.plot_demand_curves(
                [dict(zip(["component", "t", "t_E", "t_I", "dbf"], r)) for r in rows], fig
            )
    else:
        if iface_period is None or cap_lo is None or cap_hi is None:
            _fail("sbf curves need --iface-period, --cap-lo and --cap-hi")
        try:
            lo, hi = Fraction(cap_lo), Fraction(cap_hi)
            iface = MCPRInterface(iface_period, CriticalityLevel.HC, lo, hi)
        except (ValueError, ZeroDivisionError) as exc:
            _fail(str(exc))
        rows = []
        for ems in range(t_end + 1):
            if ems < t_end:
                a = float(sbf_pattern_a(iface, ems, t_end))
                b = float(sbf_pattern_b(iface, ems, t_end))
            else:
                a = b = float(sbf_lc(iface, t_end))
            rows.append([ems, t_end, a, b, float(sbf(iface, ems, t_end))])
        _write_rows(out, "sbf_curves.v1", "-", ["t_E", "t", "sbf_A", "sbf_B", "sbf"], rows)
        if fig:
            plotting.plot_supply_curves(
                [dict(zip(["t_E", "t", "sbf_A", "sbf_B", "sbf"], r)) for r in rows], fig
            )
    sys.exit(0)


if __name__ == "__main__":
    main()
