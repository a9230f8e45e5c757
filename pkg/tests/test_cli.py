import csv
import io
import json
import math
import subprocess
import sys

import pytest

from qewlab import cli
from qewlab.bound import BoundParams, V
from qewlab.lattice import laplacian


def write_cfg(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return p


def run(tmp_path, command, cfg, *extra, out=None):
    out = out or tmp_path / "out"
    out.mkdir(exist_ok=True)
    code = cli.main([command, "--config", str(write_cfg(tmp_path, cfg)), "--out", str(out), *extra])
    return code, out


def rows(path):
    return list(csv.DictReader(io.StringIO(path.read_text())))


SMALL_ORACLE = {
    "resamples": 200, "disorders": 2, "k_values": [1], "A_values": [2], "F_values": [1, 2],
    "identity_cases": [[1, 1, 2], [2, 1, 1]], "identity_instances": 2,
    "extension_cases": [[1, 1, 2], [2, 1, 1]], "divergence_fields": 30,
}


def test_defaults_are_filled_and_echoed():
    cfg = cli.parse_config({})
    d = cfg.to_dict()
    assert d["disorder"] == {"kind": "exponential", "rate": 2.0}
    assert d["simulation"]["dt"] is None and d["bound"]["lambda"] == 1.0
    assert d["oracle"]["resamples"] == 5000


@pytest.mark.parametrize("raw,field", [
    ({"simulation": {"N": 2}}, "simulation.N"),
    ({"simulation": {"F": -1}}, "simulation.F"),
    ({"simulation": {"T": 10, "interval": 3}}, "simulation.T"),
    ({"simulation": {"dt": 0.3}}, "simulation.dt"),
    ({"simulation": {"d": 1.5}}, "simulation.d"),
    ({"disorder": {"kind": "gaussian"}}, "disorder.kind"),
    ({"disorder": {"kind": "exponential", "rate": 0.5}}, "bound.lambda"),
    ({"disorder": {"kind": "uniform", "low": 2, "high": 1}}, "disorder.high"),
    ({"disorder": {"kind": "bernoulli-scaled", "p": 2}}, "disorder.p"),
    ({"bound": {"beta": 0.5}}, "bound.beta"),
    ({"bound": {"F_grid": []}}, "bound.F_grid"),
    ({"oracle": {"mu": 0.5}}, "oracle.mu"),
    ({"oracle": {"resamples": 10}}, "oracle.resamples"),
    ({"oracle": {"identity_cases": [[1, 1]]}}, "oracle.identity_cases"),
    ({"seeds": [-1]}, "seeds"),
    ({"simulation": "fast"}, "simulation"),
])
def test_field_level_config_errors(raw, field):
    with pytest.raises(cli.ConfigError) as e:
        cli.parse_config(raw)
    assert e.value.path == field


def test_config_error_exit_code(tmp_path, capsys):
    code, out = run(tmp_path, "bound", {"bound": {"lambda": -1}})
    assert code == 2
    assert "bound.lambda" in capsys.readouterr().err
    assert not any(out.iterdir())


def test_bad_json_and_missing_file(tmp_path):
    (tmp_path / "bad.json").write_text("{oops")
    (tmp_path / "o").mkdir()
    assert cli.main(["bound", "--config", str(tmp_path / "bad.json"), "--out", str(tmp_path / "o")]) == 2
    assert cli.main(["bound", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path / "o")]) == 2


def test_missing_output_directory(tmp_path):
    cfg = write_cfg(tmp_path, {"simulation": {"N": 8, "T": 2}})
    missing = tmp_path / "nowhere"
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(missing)]) == 2
    assert not missing.exists()
    assert sorted(p.name for p in tmp_path.iterdir()) == ["cfg.json"]


def test_usage_errors_exit_2(tmp_path):
    with pytest.raises(SystemExit) as e:
        cli.main(["launch", "--config", "x", "--out", "y"])
    assert e.value.code == 2
    code, _ = run(tmp_path, "bound", {}, "--workers", "0")
    assert code == 2


def test_simulate_zero_disorder(tmp_path):
    cfg = {"seeds": [0, 1], "disorder": {"kind": "zero"},
           "simulation": {"d": 1, "N": 16, "F": 3.0, "T": 5.0, "interval": 1.0}}
    code, out = run(tmp_path, "simulate", cfg)
    assert code == 0
    table = rows(out / "velocity.csv")
    assert len(table) == 2 * 5
    assert list(table[0]) == cli.VELOCITY_COLUMNS
    summary = json.loads((out / "summary.json").read_text())
    assert summary["mean_velocity"] == pytest.approx(3.0, abs=1e-12)
    assert summary["V_reference"] == V(BoundParams(1.0, 1.0, 1, 3.0))
    assert summary["config"]["simulation"]["dt"] is None
    assert summary["config"]["disorder"] == {"kind": "zero"}


def test_simulate_is_byte_deterministic(tmp_path):
    cfg = {"seeds": [3, 4, 5], "simulation": {"d": 1, "N": 32, "F": 4.0, "T": 3.0}}
    outs = []
    for w in ("1", "2", "8"):
        o = tmp_path / f"o{w}"
        o.mkdir()
        assert cli.main(["simulate", "--config", str(write_cfg(tmp_path, cfg)), "--out", str(o),
                         "--workers", w]) == 0
        outs.append(((o / "velocity.csv").read_bytes(), (o / "summary.json").read_bytes()))
    assert outs[0] == outs[1] == outs[2]


def test_csv_format(tmp_path):
    code, out = run(tmp_path, "simulate", {"seeds": [1], "simulation": {"N": 16, "T": 2, "F": 1.3}})
    raw = (out / "velocity.csv").read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    raw.decode("utf-8")
    for r in rows(out / "velocity.csv"):
        x = r["mean_u_over_t"]
        assert repr(float(x)) == x


def test_seed_override(tmp_path):
    code, out = run(tmp_path, "simulate", {"seeds": [0, 1, 2], "simulation": {"N": 8, "T": 2}},
                    "--seed-override", "42")
    assert code == 0
    assert {r["seed"] for r in rows(out / "velocity.csv")} == {"42"}
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["seeds"] == [42] and summary["config"]["oracle"]["seed"] == 42


def test_bound_curve(tmp_path):
    cfg = {"bound": {"lambda": 1.0, "beta": 1.0, "d": 1, "F_grid": {"start": 0, "stop": 20, "step": 1}}}
    code, out = run(tmp_path, "bound", cfg)
    assert code == 0
    table = rows(out / "bound.csv")
    assert list(table[0]) == cli.BOUND_COLUMNS and len(table) == 21
    vals = [float(r["V"]) for r in table]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    for r in table:
        if float(r["F"]) < 3:
            assert float(r["V"]) == 0.0 and r["branch"] == "limit"


def test_bound_from_distribution_matches_direct_beta(tmp_path):
    grid = [0, 5, 10, 20]
    code, a = run(tmp_path, "bound", {"disorder": {"kind": "exponential", "rate": 2.0},
                                      "bound": {"lambda": 1.0, "F_grid": grid}}, out=tmp_path / "a")
    code2, b = run(tmp_path, "bound", {"bound": {"lambda": 1.0, "beta": math.e + 1, "F_grid": grid}},
                   out=tmp_path / "b")
    assert code == code2 == 0
    va = [float(r["V"]) for r in rows(a / "bound.csv")]
    vb = [float(r["V"]) for r in rows(b / "bound.csv")]
    assert va == pytest.approx(vb, abs=1e-12)


def test_enumerate(tmp_path):
    cfg = {"disorder": {"kind": "zero"}, "oracle": {"d": 1, "k": 1, "A": 1, "F": 2}}
    code, out = run(tmp_path, "enumerate", cfg)
    assert code == 0
    summary = json.loads((out / "enumerate.json").read_text())
    assert summary["count"] == 8
    assert summary["Y_k"] == pytest.approx(0.2874953439246462, rel=1e-14)
    assert len(rows(out / "profiles.csv")) == 8


def test_budget_exit_code(tmp_path):
    code, out = run(tmp_path, "enumerate", {"oracle": {"d": 3, "k": 2, "A": 1}})
    assert code == 3
    assert not any(out.iterdir())


def test_verify_small_config_passes(tmp_path):
    code, out = run(tmp_path, "verify", {"oracle": SMALL_ORACLE})
    assert code == 0
    report = json.loads((out / "verify.json").read_text())
    assert report["passed"]
    assert {c["status"] for c in report["checks"].values()} == {"pass"}
    ext = report["checks"]["extension_count_bound"]["cases"]
    assert {"d": 2, "k": 1, "A": 1} == {k: ext[-1][k] for k in ("d", "k", "A")}


def test_verify_detects_corrupted_laplacian():
    cfg = cli.parse_config({"oracle": SMALL_ORACLE})

    def broken(field, site):
        return laplacian(field, site) + (1 if all(x == 0 for x in site) else 0)

    check = cli.check_divergence(cfg, broken)
    assert check["status"] == "fail" and check["margin"] < 0
    code, files = cli.cmd_verify(cfg, laplacian=broken)
    assert code == 1
    assert json.loads(files["verify.json"])["passed"] is False


def test_verify_reports_budget_as_skipped():
    cfg = cli.parse_config({"oracle": {**SMALL_ORACLE, "identity_cases": [[3, 2, 1]],
                                       "extension_cases": [[3, 3, 3]]}})
    assert cli.check_y_identity(cfg)["status"] == "skipped"
    assert cli.check_extension_bound(cfg)["status"] == "skipped"


def test_sweep_zero_disorder(tmp_path):
    cfg = {"disorder": {"kind": "zero"}, "seeds": [0],
           "simulation": {"N": 8, "T": 4}, "sweep": {"F_grid": {"start": 0, "stop": 20, "step": 1}}}
    code, out = run(tmp_path, "sweep", cfg)
    assert code == 0
    table = rows(out / "sweep.csv")
    assert list(table[0]) == cli.SWEEP_COLUMNS and len(table) == 21
    for r in table:
        assert float(r["mean_velocity"]) == pytest.approx(float(r["F"]), abs=1e-12)


def test_sweep_disordered_respects_bound(tmp_path):
    cfg = {"seeds": [0, 1, 2, 3], "simulation": {"N": 64, "T": 10},
           "sweep": {"F_grid": [2, 6, 10, 14]}}
    code, out = run(tmp_path, "sweep", cfg, "--workers", "2")
    assert code == 0
    for r in rows(out / "sweep.csv"):
        assert float(r["mean_velocity"]) >= float(r["V"]) - 3 * float(r["se"])


def test_sweep_pinned_by_strong_obstacles(tmp_path):
    cfg = {"disorder": {"kind": "constant", "strength": 6.0}, "bound": {"lambda": 1.0},
           "simulation": {"N": 8, "T": 40}, "sweep": {"F_grid": [1, 2, 4]}}
    code, out = run(tmp_path, "sweep", cfg)
    for r in rows(out / "sweep.csv"):
        assert float(r["mean_velocity"]) * 40 < 1.0


def test_module_entry_point(tmp_path):
    cfg = write_cfg(tmp_path, {"bound": {"F_grid": [0, 10]}})
    out = tmp_path / "o"
    out.mkdir()
    res = subprocess.run([sys.executable, "-m", "qewlab", "bound", "--config", str(cfg), "--out", str(out)],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert (out / "bound.csv").exists()
