import csv
import io
import json
import os

import pytest
from click.testing import CliRunner

from mcs_kit.cli import main
from mcs_kit.analysis import flat_test
from mcs_kit.demand import ModeSwitchInstants, dbf_component
from mcs_kit.model import loads_spec, validate_system
from mcs_kit.supply import MCPRInterface, sbf_lc
from mcs_kit.model import CriticalityLevel
from fractions import Fraction


SCHEDULABLE = {
    "framework": "flat",
    "components": [
        {
            "id": "hc",
            "tl": 1,
            "tasks": [
                {"id": "h1", "T": 10, "L": "HC", "C_lo": 1, "C_hi": 3, "D": 10, "D_lo": 4},
                {"id": "h2", "T": 14, "L": "HC", "C_lo": 2, "C_hi": 4, "D": 14, "D_lo": 6},
            ],
        },
        {
            "id": "lc",
            "tl": 0,
            "tasks": [{"id": "l1", "T": 8, "L": "LC", "C_lo": 1, "C_hi": 1, "D": 8, "D_lo": 8}],
        },
    ],
}

UNSCHEDULABLE = {
    "framework": "flat",
    "components": [
        {
            "id": "a",
            "tl": 0,
            "tasks": [{"id": "x", "T": 8, "L": "LC", "C_lo": 3, "C_hi": 3, "D": 4, "D_lo": 4}],
        },
        {
            "id": "b",
            "tl": 0,
            "tasks": [{"id": "y", "T": 8, "L": "LC", "C_lo": 3, "C_hi": 3, "D": 4, "D_lo": 4}],
        },
    ],
}


@pytest.fixture
def runner():
    return CliRunner()


def write(tmp_path, obj, name="ts.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def parse_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# schema:")
    reader = csv.DictReader(io.StringIO("\n".join(lines[1:])))
    return lines[0], list(reader)


class TestAnalyze:
    def test_schedulable_exit_zero(self, runner, tmp_path):
        res = runner.invoke(main, ["analyze", write(tmp_path, SCHEDULABLE)])
        assert res.exit_code == 0, res.output
        out = json.loads(res.output)
        assert out["schedulable"] is True and out["witness"] is None

    def test_unschedulable_exit_one_with_witness(self, runner, tmp_path):
        res = runner.invoke(main, ["analyze", write(tmp_path, UNSCHEDULABLE)])
        assert res.exit_code == 1
        out = json.loads(res.output)
        assert out["schedulable"] is False
        w = out["witness"]
        assert w is not None and w["demand"] > w["t"]

    def test_witness_matches_rerun(self, runner, tmp_path):
        res = runner.invoke(main, ["analyze", write(tmp_path, UNSCHEDULABLE)])
        w = json.loads(res.output)["witness"]
        spec = validate_system(loads_spec(json.dumps(UNSCHEDULABLE)))
        total = sum(
            dbf_component(c, ModeSwitchInstants(w["t"], w["t_E"], w["t_I"][c.id]))
            for c in spec.components
        )
        assert total == w["demand"]
        v = flat_test(spec)
        assert (v.witness.t, v.witness.ems) == (w["t"], w["t_E"])

    def test_malformed_json_exit_two(self, runner, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{nope")
        res = runner.invoke(main, ["analyze", str(path)])
        assert res.exit_code == 2

    def test_unknown_field_exit_two(self, runner, tmp_path):
        obj = dict(SCHEDULABLE)
        obj["surprise"] = 1
        res = runner.invoke(main, ["analyze", write(tmp_path, obj)])
        assert res.exit_code == 2

    def test_tl_override(self, runner, tmp_path):
        path = write(tmp_path, SCHEDULABLE)
        res = runner.invoke(main, ["analyze", path, "--tl", "0"])
        assert res.exit_code == 0

    def test_hierarchical_framework(self, runner, tmp_path):
        obj = json.loads(json.dumps(SCHEDULABLE))
        for comp in obj["components"]:
            comp["interface_period"] = 5
        obj["framework"] = "hierarchical"
        res = runner.invoke(main, ["analyze", write(tmp_path, obj), "--delta", "1/4"])
        out = json.loads(res.output)
        assert set(out["interfaces"]) == {"hc", "lc"}
        assert res.exit_code in (0, 1)


class TestTightenAndTl:
    def test_tighten_roundtrip(self, runner, tmp_path):
        path = write(tmp_path, SCHEDULABLE)
        out_path = str(tmp_path / "tight.json")
        res = runner.invoke(main, ["tighten", path, "-o", out_path])
        assert res.exit_code == 0
        spec = loads_spec(open(out_path).read())
        assert flat_test(spec).schedulable

    def test_tighten_infeasible_exit_one(self, runner, tmp_path):
        hopeless = {
            "framework": "flat",
            "components": [
                {
                    "id": "a",
                    "tl": 0,
                    "tasks": [
                        {"id": "x", "T": 8, "L": "HC", "C_lo": 3, "C_hi": 4, "D": 4, "D_lo": 4}
                    ],
                },
                {
                    "id": "b",
                    "tl": 0,
                    "tasks": [
                        {"id": "y", "T": 8, "L": "LC", "C_lo": 3, "C_hi": 3, "D": 4, "D_lo": 4}
                    ],
                },
            ],
        }
        res = runner.invoke(main, ["tighten", write(tmp_path, hopeless)])
        assert res.exit_code == 1

    def test_maximize_tl(self, runner, tmp_path):
        res = runner.invoke(main, ["maximize-tl", write(tmp_path, SCHEDULABLE)])
        assert res.exit_code == 0
        out = json.loads(res.output)
        assert out["schedulable"] and 0 <= out["tl"] <= out["hc_count"] == 2


class TestInterfaces:
    def test_generate_interface(self, runner, tmp_path):
        obj = json.loads(json.dumps(SCHEDULABLE))
        for comp in obj["components"]:
            comp["interface_period"] = 5
        res = runner.invoke(
            main, ["generate-interface", write(tmp_path, obj), "--delta", "1/4"]
        )
        assert res.exit_code in (0, 1)
        out = json.loads(res.output)
        assert out["delta"] == "1/4"
        assert set(out["interfaces"]) == {"hc", "lc"}

    def test_missing_period_exit_two(self, runner, tmp_path):
        res = runner.invoke(main, ["generate-interface", write(tmp_path, SCHEDULABLE)])
        assert res.exit_code == 2


class TestGenerateTasksets:
    def test_stdout_stream_deterministic(self, runner):
        args = ["generate-tasksets", "--bound", "0.6", "--count", "3", "--seed", "9"]
        a = runner.invoke(main, args)
        b = runner.invoke(main, args)
        assert a.exit_code == 0 and a.output == b.output
        specs = [loads_spec(line) for line in a.output.strip().splitlines()]
        assert len(specs) == 3

    def test_out_dir(self, runner, tmp_path):
        res = runner.invoke(
            main,
            ["generate-tasksets", "--bound", "0.5", "--count", "2", "--seed", "1",
             "--out-dir", str(tmp_path / "sets")],
        )
        assert res.exit_code == 0
        files = sorted(os.listdir(tmp_path / "sets"))
        assert files == ["taskset_0000.json", "taskset_0001.json"]


class TestSimulateCommand:
    def test_simulate_report(self, runner, tmp_path):
        path = write(tmp_path, SCHEDULABLE)
        res = runner.invoke(
            main,
            ["simulate", path, "--horizon", "500", "--seed", "2", "--probability", "0.3"],
        )
        assert res.exit_code == 0
        out = json.loads(res.output)
        assert out["seed"] == 2
        assert 0 <= out["pfj"]["float"] <= 1

    def test_trace_export(self, runner, tmp_path):
        path = write(tmp_path, SCHEDULABLE)
        trace = str(tmp_path / "trace.jsonl")
        res = runner.invoke(
            main,
            ["simulate", path, "--horizon", "200", "--probability", "1.0", "--trace", trace],
        )
        assert res.exit_code == 0
        events = [json.loads(line) for line in open(trace)]
        assert any(ev["event"] == "release" for ev in events)
        assert all("tick" in ev for ev in events)

    def test_compare_requires_schedulable(self, runner, tmp_path):
        res = runner.invoke(
            main, ["simulate", write(tmp_path, UNSCHEDULABLE), "--compare"]
        )
        assert res.exit_code == 2


class TestSweeps:
    def test_sweep_schedulability_csv_and_plot(self, runner, tmp_path):
        out = str(tmp_path / "sched.csv")
        res = runner.invoke(
            main,
            ["sweep-schedulability", "--bounds", "0.4,0.6", "--fractions", "0,1.0",
             "--per-point", "6", "--seed", "5", "--out", out],
        )
        assert res.exit_code == 0, res.output
        header, rows = parse_csv(open(out).read())
        assert "sched_sweep.v1" in header and "seed=5" in header
        assert len(rows) == 4
        by_key = {(r["bound"], r["tl_fraction"]): float(r["schedulable_ratio"]) for r in rows}
        for bound in ("0.4", "0.6"):
            assert by_key[(bound, "0.0")] >= by_key[(bound, "1.0")]
        assert os.path.exists(str(tmp_path / "sched.png"))

    def test_sweep_schedulability_deterministic(self, runner, tmp_path):
        args = ["sweep-schedulability", "--bounds", "0.5", "--fractions", "0,0.5",
                "--per-point", "5", "--seed", "3", "--no-plot"]
        a = runner.invoke(main, args)
        b = runner.invoke(main, args)
        assert a.exit_code == 0 and a.output == b.output

    def test_sweep_schedulability_golden(self, runner):
        res = runner.invoke(
            main,
            ["sweep-schedulability", "--bounds", "0.5,0.75", "--fractions",
             "0,0.6,1.0", "--per-point", "8", "--seed", "11", "--no-plot"],
        )
        assert res.output == (
            "# schema: sched_sweep.v1 seed=11\n"
            "bound,tl_fraction,framework,schedulable_ratio\n"
            "0.5,0.0,flat,1.0\n"
            "0.5,0.6,flat,1.0\n"
            "0.5,1.0,flat,1.0\n"
            "0.75,0.0,flat,0.625\n"
            "0.75,0.6,flat,0.5\n"
            "0.75,1.0,flat,0.5\n"
        )

    def test_sweep_pfj_csv(self, runner, tmp_path):
        out = str(tmp_path / "pfj.csv")
        res = runner.invoke(
            main,
            ["sweep-pfj", "--bounds", "0.5", "--probabilities", "0,0.5",
             "--per-point", "4", "--horizon", "600", "--seed", "1", "--out", out],
        )
        assert res.exit_code == 0, res.output
        header, rows = parse_csv(open(out).read())
        assert "pfj_sweep.v1" in header
        assert {r["mechanism"] for r in rows} == {"proposed", "classical"}
        zero_rows = [r for r in rows if float(r["probability"]) == 0.0]
        assert zero_rows and all(float(r["mean_pfj"]) == 1.0 for r in zero_rows)
        for r in rows:
            assert int(r["n"]) == 4
        assert os.path.exists(str(tmp_path / "pfj.png"))


class TestProtocolDefaults:
    def test_experiment_grids_default_to_protocol_values(self):
        from mcs_kit.cli import DEFAULT_PFJ_BOUNDS, DEFAULT_PROBABILITIES, DEFAULT_TL_FRACTIONS

        assert DEFAULT_PROBABILITIES == (0.005, 0.02, 0.05, 0.2, 0.5)
        assert DEFAULT_PFJ_BOUNDS == (0.8, 0.85, 0.9)
        assert DEFAULT_TL_FRACTIONS == (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)

    def test_simulator_default_horizon(self):
        from mcs_kit.simulator import SimConfig

        assert SimConfig().horizon == 10_000


class TestDumpCurves:
    def test_dbf_rows_match_library(self, runner, tmp_path):
        path = write(tmp_path, SCHEDULABLE)
        res = runner.invoke(
            main, ["dump-curves", "--what", "dbf", "--taskset", path, "--t-end", "12", "--no-plot"]
        )
        assert res.exit_code == 0
        _, rows = parse_csv(res.output)
        spec = validate_system(loads_spec(json.dumps(SCHEDULABLE)))
        comp = {c.id: c for c in spec.components}
        assert rows[0]["dbf"] == "0"  # t = 0
        for r in rows[:20]:
            m = ModeSwitchInstants(int(r["t"]), int(r["t_E"]), int(r["t_I"]))
            assert int(r["dbf"]) == dbf_component(comp[r["component"]], m)

    def test_sbf_rows_match_library(self, runner):
        res = runner.invoke(
            main,
            ["dump-curves", "--what", "sbf", "--iface-period", "5", "--cap-lo", "2",
             "--cap-hi", "4", "--t-end", "14", "--no-plot"],
        )
        assert res.exit_code == 0
        _, rows = parse_csv(res.output)
        iface = MCPRInterface(5, CriticalityLevel.HC, Fraction(2), Fraction(4))
        last = rows[-1]
        assert int(last["t_E"]) == 14
        assert float(last["sbf"]) == float(sbf_lc(iface, 14))
        assert float(rows[2]["sbf_A"]) == 8.0  # worked reference point

    def test_bad_flags_exit_two(self, runner):
        res = runner.invoke(main, ["dump-curves", "--what", "sbf", "--t-end", "5"])
        assert res.exit_code == 2
