from __future__ import annotations

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from fracfujita.cli_io import (
    EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, ConfigError, FileDatum, config_from_dict,
    config_to_dict, emit_results, load_state, main, parse_config, save_state)
from fracfujita.criteria import calibration_hash
from fracfujita.spectral_solver import continue_run, solve

MINIMAL = {"alpha": 0.5, "beta": 0.25, "p": 2.0, "dim": 1, "L": 32.0, "n": 128,
           "dt": 0.05, "T_max": 2.0, "q_list": [1, 2, "inf"],
           "datum": {"kind": "gaussian", "amplitude": 0.5, "width": 1.0}}


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return path


# {{{ configuration


def test_minimal_round_trip(tmp_path):
    cfg = parse_config(_write(tmp_path / "run.json", MINIMAL))
    assert cfg.grid.n == 128 and cfg.q_list == (1.0, 2.0, math.inf)
    again = config_from_dict(json.loads(json.dumps(config_to_dict(cfg))))
    assert again == cfg


def _violations(raw):
    with pytest.raises(ConfigError) as err:
        config_from_dict(raw)
    return dict(err.value.violations)


def test_grid_n_not_power_of_two():
    assert "grid.n" in _violations({**MINIMAL, "n": 100})


def test_q_below_one():
    bad = _violations({**MINIMAL, "q_list": [0.5, 2]})
    assert any("q >= 1" in msg for path, msg in bad.items() if path.startswith("q_list"))


def test_every_violation_reported():
    bad = _violations({**MINIMAL, "n": 100, "alpha": 1.5, "dt": -1, "bogus": 1,
                       "datum": {"kind": "sphere"}})
    assert {"grid.n", "params.alpha", "dt", "bogus", "datum.kind"} <= set(bad)


def test_step_budget():
    assert "20000" in _violations({**MINIMAL, "dt": 1e-3, "T_max": 100.0})["T_max"]


def test_file_datum(tmp_path):
    values = np.exp(-np.linspace(-32, 32, 128, endpoint=False) ** 2)
    np.save(tmp_path / "u0.npy", values)
    values.astype("<f8").tofile(tmp_path / "u0.f64")
    for name in ("u0.npy", "u0.f64"):
        raw = {**MINIMAL, "datum": {"kind": "file", "path": name, "amplitude": 2.0}}
        cfg = config_from_dict(raw, base_dir=tmp_path)
        assert isinstance(cfg.datum, FileDatum)
        np.testing.assert_array_equal(cfg.initial_field().values, 2.0 * values)


def test_parse_errors(tmp_path):
    with pytest.raises(OSError):
        parse_config(tmp_path / "missing.json")
    (tmp_path / "broken.json").write_text("{")
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "broken.json")

# }}}


# {{{ emission


@pytest.fixture(scope="module")
def config():
    return config_from_dict({**MINIMAL, "snapshot_every": 10})


def test_byte_identical(tmp_path, config):
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        emit_results(solve(config), {"note": 1.0}, d)
    for name in ("norms.csv", "outcome.json", "criteria.json", "snapshots.f64",
                 "snapshots.json"):
        assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()
    assert not list(dirs[0].glob("*.tmp*"))


def test_snapshot_sidecar(tmp_path, config):
    emit_results(solve(config), None, tmp_path)
    meta = json.loads((tmp_path / "snapshots.json").read_text())
    data = np.fromfile(tmp_path / "snapshots.f64", dtype="<f8")
    assert data.size == np.prod(meta["shape"])
    assert meta["shape"][0] == len(meta["times"])
    assert meta["endianness"] == "little" and meta["order"] == "row-major"


def test_header_only_csv(tmp_path, config):
    outcome = solve(config)
    outcome.times = np.zeros(0)
    outcome.norm_traces = {}
    emit_results(outcome, None, tmp_path)
    assert (tmp_path / "norms.csv").read_text() == "t,q,norm\n"


def test_norms_csv_layout(tmp_path, config):
    outcome = solve(config)
    emit_results(outcome, None, tmp_path)
    lines = (tmp_path / "norms.csv").read_text().splitlines()
    assert lines[0] == "t,q,norm"
    assert len(lines) == 1 + 3 * len(outcome.times)
    t, q, value = lines[-1].split(",")
    assert q == "inf" and float(value) == outcome.norm_traces[math.inf][-1]

# }}}


# {{{ state persistence


def test_state_round_trip_continues_bitwise(tmp_path, config):
    half = solve(config)
    save_state(half.state, tmp_path / "state.npz")
    restored = load_state(tmp_path / "state.npz")
    a = continue_run(half.state, 2.0)
    b = continue_run(restored, 2.0)
    np.testing.assert_array_equal(a.state.current, b.state.current)
    for q in a.norm_traces:
        np.testing.assert_array_equal(a.norm_traces[q], b.norm_traces[q])

# }}}


# {{{ command line


def test_version(capsys):
    with pytest.raises(SystemExit) as err:
        main(["--version"])
    assert err.value.code == 0
    assert calibration_hash() in capsys.readouterr().out


def test_version_script():
    out = subprocess.run([sys.executable, "-m", "fracfujita.cli_io", "--version"],
                         capture_output=True, text=True, check=True).stdout
    assert out.startswith("fracfujita ") and "sha256:" in out


def test_usage_exit_code(capsys):
    with pytest.raises(SystemExit) as err:
        main(["simulate"])
    assert err.value.code == EXIT_USAGE
    assert main(["ml-eval"]) == EXIT_USAGE


def test_validation_exit_code(tmp_path, capsys):
    path = _write(tmp_path / "bad.json", {**MINIMAL, "n": 100})
    assert main(["simulate", "--config", str(path), "--out", str(tmp_path / "o")]) \
        == EXIT_VALIDATION
    assert "grid.n" in capsys.readouterr().err
    assert main(["ml-eval", "--a", "0.5", "--b", "1", "--z", "1"]) == EXIT_VALIDATION


def test_io_exit_code(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "none.json"),
                 "--out", str(tmp_path / "o")]) == EXIT_IO


def test_ml_eval_cli(capsys):
    assert main(["ml-eval", "--a", "1", "--b", "1", "--z", "-1"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "a,b,z,value"
    assert float(out[1].split(",")[3]) == pytest.approx(math.exp(-1), rel=1e-14)


def test_simulate_continue_cli(tmp_path, capsys):
    raw = {**MINIMAL, "T_max": 1.0}
    path = _write(tmp_path / "run.json", raw)
    assert main(["simulate", "--config", str(path), "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(["continue", "--state", str(tmp_path / "a" / "state.npz"), "--extra-T", "1",
                 "--out", str(tmp_path / "b")]) == EXIT_OK
    path2 = _write(tmp_path / "run2.json", {**MINIMAL, "T_max": 2.0})
    assert main(["simulate", "--config", str(path2), "--out", str(tmp_path / "c")]) == EXIT_OK
    assert (tmp_path / "b" / "norms.csv").read_bytes() == \
        (tmp_path / "c" / "norms.csv").read_bytes()
    crit = json.loads((tmp_path / "c" / "criteria.json").read_text())
    assert {"exponents", "range_class", "mass_report", "certificate"} <= set(crit)


def test_criteria_cli(tmp_path):
    path = _write(tmp_path / "run.json", {**MINIMAL, "datum": {"kind": "indicator",
                                                               "amplitude": 4.0,
                                                               "radius": 1.0}})
    out = tmp_path / "criteria.json"
    assert main(["criteria", "--config", str(path), "--R-max", "20", "--out", str(out)]) == 0
    crit = json.loads(out.read_text())
    assert crit["exponents"]["p_f"] == 1.5
    assert crit["certificate"]["R_star"] is not None

# }}}

# vim: foldmethod=marker
