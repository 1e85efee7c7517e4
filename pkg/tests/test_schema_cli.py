import csv
import io
import json
import math

import pytest

from fenton_minimax.battery import battery_problem
from fenton_minimax.cli import main, read_report
from fenton_minimax.core import NodeSystem
from fenton_minimax.schema import (ConfigError, config_from_json,
                                   decode_value, encode_value, load_config,
                                   options_from_json, options_to_json,
                                   problem_from_json, problem_to_json,
                                   solve_report_to_json)
from fenton_minimax.solvers import SolveOptions, solve_equioscillation

FLAT = {"pieces": [{"interval": {"a": 0.0, "b": 1.0},
                    "formula": {"type": "constant", "c": 0.0}}]}
RAMP = {"pieces": [{"interval": {"a": 0.0, "b": 0.5, "closed_right": False},
                    "formula": {"type": "affine", "alpha": 1.0, "beta": 0.0}}]}

LOG_N2 = {"n": 2, "field": FLAT, "kernel": {"family": "log"}}
RAMP_ZERO = {"n": 1, "field": RAMP, "kernel": {"family": "zero"}}


def write_cfg(tmp_path, name, problem, **extra):
    doc = {"schema": 1, "problem": problem, **extra}
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


class TestValueCodec:
    def test_round_trip(self):
        for v in (0.0, -1.5, -math.inf):
            assert decode_value(encode_value(v)) == v

    def test_plus_inf_has_no_place_here(self):
        # values live in R + {-inf}; a +inf is always a bug upstream
        with pytest.raises(ValueError):
            encode_value(math.inf)

    def test_neg_inf_is_a_string(self):
        assert encode_value(-math.inf) == "-inf"
        assert decode_value("-inf") == -math.inf

    def test_document_stays_json_clean(self):
        json.dumps({"v": encode_value(-math.inf)}, allow_nan=False)


class TestProblemCodec:
    @pytest.mark.parametrize("name", ["log-n2-flat", "log-n2-bump",
                                      "zero-n1-ramp", "log-n2-bands",
                                      "power05-n1-flat", "sqrt-n2-flat"])
    def test_battery_round_trips(self, name):
        p = battery_problem(name)
        q = problem_from_json(problem_to_json(p))
        assert q == p

    def test_weights_preserved(self):
        d = dict(LOG_N2)
        d["weights"] = [2.0, 3.0]
        p = problem_from_json(d)
        assert p.weights == (2.0, 3.0)
        assert problem_to_json(p)["weights"] == [2.0, 3.0]

    def test_bad_problem_is_config_error(self):
        with pytest.raises(ConfigError):
            problem_from_json({"n": 1, "field": FLAT})  # no kernel
        with pytest.raises(ConfigError):
            problem_from_json({"n": 0, "field": FLAT,
                               "kernel": {"family": "log"}})


class TestOptionsCodec:
    def test_round_trip(self):
        o = SolveOptions(tol_residual=1e-7, multistarts=3, seed=11)
        assert options_from_json(options_to_json(o)) == o

    def test_defaults_when_missing(self):
        assert options_from_json(None) == SolveOptions()

    def test_unknown_option_rejected(self):
        with pytest.raises(ConfigError):
            options_from_json({"tol_residul": 1e-7})


class TestConfig:
    def test_schema_version_required(self):
        with pytest.raises(ConfigError, match="schema"):
            config_from_json({"problem": LOG_N2})

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError, match="unknown config keys"):
            config_from_json({"schema": 1, "problem": LOG_N2, "probelm": {}})

    def test_nodes_length_must_match(self):
        with pytest.raises(ConfigError, match="nodes length"):
            config_from_json({"schema": 1, "problem": LOG_N2,
                              "nodes": [0.5]})

    def test_sweep_range_expansion(self):
        cfg = config_from_json({
            "schema": 1, "problem": RAMP_ZERO,
            "nodes": [0.25],
            "sweep": {"path": "nodes.1",
                      "values": {"start": 0.0, "stop": 1.0, "count": 5}}})
        assert cfg.sweep[0]["values"] == [0.0, 0.25, 0.5, 0.75, 1.0]

    def test_output_with_format(self, tmp_path):
        cfg = config_from_json({
            "schema": 1, "problem": LOG_N2,
            "output": {"path": "out.json", "format": "csv"}})
        assert cfg.output == "out.json" and cfg.fmt == "csv"
        with pytest.raises(ConfigError):
            config_from_json({"schema": 1, "problem": LOG_N2,
                              "output": {"path": "x", "format": "yaml"}})

    def test_load_config_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(str(tmp_path / "absent.json"))


class TestSolveReportJson:
    def test_trace_and_infinities_encode(self):
        rep = solve_equioscillation(battery_problem("zero-n1-gate"))
        d = solve_report_to_json(rep)
        json.dumps(d, allow_nan=False)
        assert d["status"] == rep.status


class TestCliSolve:
    def test_flat_log_two_nodes(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "c.json", LOG_N2,
                        options={"multistarts": 4})
        rc = main(["solve", "--config", cfg])
        out = capsys.readouterr().out
        assert rc == 0
        doc = json.loads(out)
        assert doc["schema"] == 1 and doc["command"] == "solve"
        v = doc["equioscillation"]["value"]
        assert v == pytest.approx(-math.log(8.0), abs=1e-6)
        assert doc["minimax"]["status"] == "converged"

    def test_ramp_has_no_equioscillation(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "c.json", RAMP_ZERO)
        rc = main(["solve", "--config", cfg])
        out = capsys.readouterr().out
        assert rc == 1
        doc = json.loads(out)
        assert doc["equioscillation"]["status"] == "stalled"
        assert doc["equioscillation"]["note"].startswith("none-found")
        assert doc["minimax"]["value"] == pytest.approx(0.5, abs=1e-6)

    def test_usc_regularize_flag_recovers(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "c.json", RAMP_ZERO)
        rc = main(["solve", "--config", cfg, "--usc-regularize"])
        out = capsys.readouterr().out
        assert rc == 0
        doc = json.loads(out)
        eq = doc["equioscillation"]
        assert eq["x"] == [0.5]
        assert eq["residual"] == 0.0
        assert eq["value"] == 0.5

    def test_output_file_round_trip(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "c.json", LOG_N2,
                        options={"multistarts": 2})
        out_path = tmp_path / "report.json"
        rc = main(["solve", "--config", cfg, "--output", str(out_path)])
        assert rc == 0
        assert capsys.readouterr().out == ""
        doc = read_report(str(out_path))
        assert doc["command"] == "solve"
        # writing and re-reading must not lose precision
        again = tmp_path / "again.json"
        rc = main(["solve", "--config", cfg, "--output", str(again)])
        assert read_report(str(again)) == doc

    def test_csv_trace(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "c.json", RAMP_ZERO)
        main(["solve", "--config", cfg, "--format", "csv",
              "--usc-regularize"])
        out = capsys.readouterr().out
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["phase", "iteration", "residual", "value", "x1"]
        assert {r[0] for r in rows[1:]} <= {"equioscillation", "minimax",
                                            "maximin"}

    def test_missing_config(self, capsys):
        assert main(["solve"]) == 2
        assert "solve requires --config" in capsys.readouterr().err

    def test_bad_json_config(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["solve", "--config", str(path)]) == 2


class TestCliOracle:
    def test_single_node_landscape_csv(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "c.json",
                        {"n": 1, "field": FLAT, "kernel": {"family": "log"}})
        rc = main(["oracle", "--config", cfg, "--h", "0.125",
                   "--format", "csv"])
        out = capsys.readouterr().out
        assert rc == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["x1", "m0", "m1", "mbar", "mlow"]
        assert len(rows) == 10  # 9 grid values plus the header
        first = rows[1]
        assert first[0] == "0.0"
        assert first[1] == "-inf"  # m_0 over the point interval [0, 0]

    def test_json_values(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "c.json", LOG_N2)
        rc = main(["oracle", "--config", cfg, "--h", str(1 / 64)])
        doc = json.loads(capsys.readouterr().out)
        assert rc == 0
        # coarse grid: the x restriction biases the minimax upward a few 1e-2
        assert doc["minimax"]["value"] == pytest.approx(-math.log(8.0),
                                                        abs=5e-2)
        assert doc["maximin"]["value"] <= doc["minimax"]["value"] + 1e-12

    def test_node_count_cap(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "c.json",
                        {"n": 5, "field": FLAT, "kernel": {"family": "log"}})
        assert main(["oracle", "--config", cfg]) == 2
        assert "n <= 4" in capsys.readouterr().err

    def test_h_bounds(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "c.json", LOG_N2)
        assert main(["oracle", "--config", cfg, "--h", "1.5"]) == 2


class TestCliVerify:
    def test_single_check_passes(self, capsys):
        rc = main(["verify", "--check", "lem2.4/c", "--trials", "50"])
        out = capsys.readouterr().out
        assert rc == 0
        doc = json.loads(out)
        assert doc["passed"] is True
        assert doc["checks"][0]["check_id"] == "lem2.4/c"

    def test_unknown_check_is_usage_error(self, capsys):
        assert main(["verify", "--check", "nope/never"]) == 2

    def test_checks_from_config(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "c.json", LOG_N2,
                        checks=["lem2.4/a", "lem2.4/b"])
        rc = main(["verify", "--config", cfg, "--trials", "40"])
        doc = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert [c["check_id"] for c in doc["checks"]] == ["lem2.4/a",
                                                          "lem2.4/b"]

    def test_needs_some_selection(self, capsys):
        assert main(["verify"]) == 2

    def test_csv_form(self, capsys):
        rc = main(["verify", "--check", "lem2.4/c", "--trials", "20",
                   "--format", "csv"])
        out = capsys.readouterr().out
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0][0] == "check_id"
        assert rows[1][0] == "lem2.4/c" and rows[1][4] == "True"
        assert rc == 0


class TestCliSweep:
    def test_node_sweep_csv(self, tmp_path, capsys):
        cfg = write_cfg(
            tmp_path, "c.json",
            {"n": 1, "field": FLAT, "kernel": {"family": "log"}},
            nodes=[0.5],
            sweep={"path": "nodes.1",
                   "values": {"start": 0.0, "stop": 1.0, "count": 101}})
        rc = main(["sweep", "--config", cfg])
        out = capsys.readouterr().out
        assert rc == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["nodes.1", "m0", "m1", "mbar", "mlow"]
        assert len(rows) == 102
        # at x1 = 0 the left interval degenerates to the singular node
        assert rows[1][1] == "-inf"
        # m_0 = log(x1) along the way
        x, m0 = float(rows[51][0]), float(rows[51][1])
        assert m0 == pytest.approx(math.log(x), abs=1e-12)

    def test_eta_sweep_monotone(self, tmp_path, capsys):
        cfg = write_cfg(
            tmp_path, "c.json", LOG_N2, nodes=[0.3, 0.7],
            sweep={"path": "problem.kernel.strictify_eta",
                   "values": [0.4, 0.2, 0.1, 0.05]})
        rc = main(["sweep", "--config", cfg, "--format", "json"])
        doc = json.loads(capsys.readouterr().out)
        assert rc == 0
        mbar = [row[-2] for row in doc["rows"]]
        # a smaller cusp term only lowers the maxima
        assert all(a >= b - 1e-12 for a, b in zip(mbar, mbar[1:]))

    def test_two_axis_cross_product(self, tmp_path, capsys):
        cfg = write_cfg(
            tmp_path, "c.json", LOG_N2, nodes=[0.3, 0.7],
            sweep=[{"path": "nodes.1", "values": [0.2, 0.3]},
                   {"path": "problem.weights.2", "values": [1.0, 2.0, 3.0]}])
        rc = main(["sweep", "--config", cfg])
        rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
        assert rc == 0
        assert len(rows) == 7  # header + 2 x 3 points
        assert rows[0][:2] == ["nodes.1", "problem.weights.2"]

    def test_empty_sweep_rejected(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "c.json", LOG_N2)
        assert main(["sweep", "--config", cfg]) == 2

    def test_unresolvable_path(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "c.json", LOG_N2, nodes=[0.3, 0.7],
                        sweep={"path": "problem.kernel.colour",
                               "values": [1.0]})
        assert main(["sweep", "--config", cfg]) == 2


class TestCliUsage:
    def test_unknown_command_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["replumb"])
        assert exc.value.code == 2

    def test_seed_override_changes_report(self, capsys):
        main(["verify", "--check", "lem2.4/a", "--trials", "30",
              "--seed", "1"])
        a = json.loads(capsys.readouterr().out)
        main(["verify", "--check", "lem2.4/a", "--trials", "30",
              "--seed", "2"])
        b = json.loads(capsys.readouterr().out)
        assert a["checks"][0]["worst_margin"] != b["checks"][0]["worst_margin"]
        assert a["seed"] == 1 and b["seed"] == 2
