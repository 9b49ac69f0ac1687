import random
from fractions import Fraction

import pytest

from gen import random_small_spec
from sim_oracle import tick_simulate
from mcs_kit.analysis import flat_test, max_tolerance, tighten_deadlines
from mcs_kit.model import (
    HC,
    LC,
    Component,
    MCTask,
    SystemSpec,
    validate_system,
    with_tolerance_limits,
)
from mcs_kit.simulator import SimConfig, SimReport, compare_mechanisms, simulate


def demo_spec(tl=1):
    return validate_system(
        SystemSpec(
            (
                Component(
                    "hc",
                    (
                        MCTask("h1", 10, HC, 1, 3, 10, 4),
                        MCTask("h2", 14, HC, 2, 4, 14, 6),
                    ),
                    tl,
                ),
                Component("lc", (MCTask("l1", 8, LC, 1, 1, 8, 8),), 0),
            )
        )
    )


def report_key(r: SimReport):
    return (r.finished_lc, r.max_lc, r.pfj, r.deadline_misses, r.mode_timeline)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            SimConfig(horizon=0)
        with pytest.raises(ValueError):
            SimConfig(hc_switch_probability=1.5)
        with pytest.raises(ValueError):
            SimConfig(hc_exec_policy="bogus")
        with pytest.raises(ValueError):
            SimConfig(release_policy="bogus")
        with pytest.raises(ValueError):
            SimConfig(drop_policy_on_ims="bogus")


class TestDeterminism:
    def test_identical_runs(self):
        cfg = SimConfig(horizon=500, seed=7, hc_switch_probability=0.3)
        a = simulate(demo_spec(), cfg)
        b = simulate(demo_spec(), cfg)
        assert report_key(a) == report_key(b)
        assert a.seed == 7

    def test_seed_changes_trace(self):
        cfg1 = SimConfig(horizon=500, seed=1, hc_switch_probability=0.3)
        cfg2 = SimConfig(horizon=500, seed=2, hc_switch_probability=0.3)
        assert report_key(simulate(demo_spec(), cfg1)) != report_key(
            simulate(demo_spec(), cfg2)
        )


class TestAgainstTickOracle:
    def test_full_trace_equality_fixed_case(self):
        cfg = SimConfig(horizon=300, seed=42, hc_switch_probability=0.2)
        assert report_key(simulate(demo_spec(), cfg)) == report_key(
            tick_simulate(demo_spec(), cfg)
        )

    @pytest.mark.parametrize("release", ["strictly_periodic", "sporadic_min_separation"])
    @pytest.mark.parametrize("policy", ["full_hi", "uniform_between"])
    @pytest.mark.parametrize("drop", ["drop_lc_in_component", "keep_lc_best_effort"])
    def test_trace_equality_across_policies(self, release, policy, drop):
        cfg = SimConfig(
            horizon=240,
            seed=11,
            hc_switch_probability=0.4,
            hc_exec_policy=policy,
            release_policy=release,
            drop_policy_on_ims=drop,
        )
        assert report_key(simulate(demo_spec(), cfg)) == report_key(
            tick_simulate(demo_spec(), cfg)
        )

    def test_trace_equality_random_specs(self):
        rng = random.Random(99)
        checked = 0
        while checked < 12:
            spec = random_small_spec(rng, max_tasks=3)
            cfg = SimConfig(
                horizon=120,
                seed=rng.randint(0, 10**6),
                hc_switch_probability=rng.choice([0.0, 0.2, 0.7, 1.0]),
            )
            assert report_key(simulate(spec, cfg)) == report_key(
                tick_simulate(spec, cfg)
            )
            checked += 1


class TestSemantics:
    def test_no_switch_run_is_clean(self):
        spec = tighten_deadlines(demo_spec(0))
        assert flat_test(spec).schedulable
        rep = simulate(spec, SimConfig(horizon=2000, seed=3, hc_switch_probability=0.0))
        assert rep.deadline_misses == []
        assert rep.pfj == 1
        assert rep.mode_timeline == []

    def test_ems_fires_after_tolerance_exceeded(self):
        spec = demo_spec(1)
        rep = simulate(
            spec,
            SimConfig(
                horizon=2000, seed=5, hc_switch_probability=1.0, record_events=True
            ),
        )
        switches_since_reset = 0
        ems_seen = []
        for ev in rep.events:
            if ev["event"] == "switch":
                switches_since_reset += 1
            elif ev["event"] == "EMS":
                ems_seen.append(switches_since_reset)
            elif ev["event"] == "RESET":
                switches_since_reset = 0
        assert ems_seen and all(n == 2 for n in ems_seen)  # TL + 1 switches

    def test_no_lc_execution_between_ems_and_reset(self):
        spec = demo_spec(1)
        rep = simulate(
            spec,
            SimConfig(
                horizon=3000, seed=6, hc_switch_probability=0.8, record_events=True
            ),
        )
        lc_ids = {t.id for t in spec.tasks if not t.is_hc}
        in_hc_window = False
        for ev in rep.events:
            if ev["event"] == "EMS":
                in_hc_window = True
            elif ev["event"] == "RESET":
                in_hc_window = False
            elif in_hc_window and ev["event"] == "finish":
                assert ev["task"] not in lc_ids

    def test_mode_cycles_reset_and_recur(self):
        spec = demo_spec(1)
        rep = simulate(spec, SimConfig(horizon=4000, seed=8, hc_switch_probability=1.0))
        kinds = [k for (_, _, k) in rep.mode_timeline]
        assert kinds.count("RESET") >= 2
        assert kinds.count("IMS") >= 2

    def test_sporadic_max_counts_actual_releases(self):
        cfg = SimConfig(
            horizon=1000, seed=9, release_policy="sporadic_min_separation"
        )
        rep = simulate(demo_spec(), cfg)
        periodic = simulate(demo_spec(), SimConfig(horizon=1000, seed=9))
        assert rep.max_lc <= periodic.max_lc == 125  # ceil(1000/8)

    def test_overloaded_system_records_misses(self):
        spec = validate_system(
            SystemSpec(
                (
                    Component("a", (MCTask("x", 4, LC, 3, 3, 4, 4),), 0),
                    Component("b", (MCTask("y", 4, LC, 3, 3, 4, 4),), 0),
                )
            )
        )
        rep = simulate(spec, SimConfig(horizon=40, seed=0))
        assert any(kind == "LC" for (_, _, kind) in rep.deadline_misses)
        assert rep.pfj < 1


class TestSafetyCoupling:
    def test_schedulable_specs_never_miss_hc(self):
        rng = random.Random(17)
        checked = 0
        while checked < 10:
            spec = with_tolerance_limits(random_small_spec(rng), rng.randint(0, 3))
            try:
                spec = tighten_deadlines(spec)
            except Exception:
                continue
            if not flat_test(spec).schedulable:
                continue
            for seed in (1, 2, 3):
                rep = simulate(
                    spec,
                    SimConfig(horizon=3000, seed=seed, hc_switch_probability=0.5),
                )
                assert not any(k == "HC" for (_, _, k) in rep.deadline_misses)
                first_ems = min(
                    (tick for (tick, _, kind) in rep.mode_timeline if kind == "EMS"),
                    default=None,
                )
                for task_id, release, kind in rep.deadline_misses:
                    if kind == "LC":
                        task = next(t for t in spec.tasks if t.id == task_id)
                        assert first_ems is not None
                        assert release + task.deadline > first_ems
            checked += 1


class TestCompareMechanisms:
    def test_zero_probability_equal_and_perfect(self):
        spec = tighten_deadlines(demo_spec(1))
        reports = compare_mechanisms(spec, SimConfig(horizon=2000, seed=1))
        assert reports["proposed"].pfj == reports["classical"].pfj == 1

    def test_zero_tolerance_mechanisms_coincide(self):
        spec = tighten_deadlines(demo_spec(0))
        reports = compare_mechanisms(
            spec, SimConfig(horizon=2000, seed=4, hc_switch_probability=1.0)
        )
        assert report_key(reports["proposed"]) == report_key(reports["classical"])

    def test_unschedulable_mechanism_rejected(self):
        spec = validate_system(
            SystemSpec(
                (
                    Component("a", (MCTask("x", 4, LC, 3, 3, 4, 4),), 0),
                    Component("b", (MCTask("y", 4, LC, 3, 3, 4, 4),), 0),
                )
            )
        )
        with pytest.raises(ValueError, match="unschedulable"):
            compare_mechanisms(spec, SimConfig(horizon=100, seed=0))

    def test_reservation_schedulable_spec_dominates_every_run(self):
        spec = tighten_deadlines(demo_spec(2))  # full tolerance passes
        assert flat_test(spec).schedulable
        for seed in range(100):
            reports = compare_mechanisms(
                spec, SimConfig(horizon=800, seed=seed, hc_switch_probability=0.3)
            )
            assert reports["proposed"].pfj >= reports["classical"].pfj
            assert reports["proposed"].pfj == 1  # never drops anything

    def test_mean_dominance_on_partial_tolerance(self):
        spec = tighten_deadlines(demo_spec(1))
        res = max_tolerance(spec)
        assert res.schedulable
        spec = with_tolerance_limits(spec, {"hc": res.tl})
        totals = {"proposed": Fraction(0), "classical": Fraction(0)}
        for seed in range(40):
            reports = compare_mechanisms(
                spec, SimConfig(horizon=1500, seed=seed, hc_switch_probability=0.4)
            )
            for mech, rep in reports.items():
                totals[mech] += rep.pfj
        assert totals["proposed"] >= totals["classical"]
