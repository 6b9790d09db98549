from __future__ import annotations

import math

import numpy as np
import pytest

from fracfujita.cli_io import SimulationConfig
from fracfujita.criteria import GaussianDatum, IndicatorDatum, load_calibration
from fracfujita.experiments import (
    bisect_critical_amplitude, blowup_time_study, convergence_study, decay_rate,
    phase_diagram)
from fracfujita.kernels import FractionalParams
from fracfujita.spectral_solver import BLOWUP, GLOBAL, Field, Grid, linear_evolve, lq_norm

PARAMS = FractionalParams(0.5, 0.25, 2.0, 1)


def _config(**changes):
    base = dict(params=PARAMS, grid=Grid(1, 32.0, 128), dt=0.05, T_max=50.0,
                q_list=(1.0, 2.0, 3.0, math.inf), datum=GaussianDatum(1.0))
    base.update(changes)
    return SimulationConfig(**base)


# {{{ decay rate


def test_constant_trace_slope():
    t = np.linspace(1, 10, 50)
    assert decay_rate((t, np.full_like(t, 3.0)), 2, (2, 8)) == pytest.approx(0, abs=1e-14)


@pytest.mark.parametrize("alpha", [0.5, 0.7])
def test_single_mode_slope(alpha):
    # E_a(-x) ~ x^-1 / Gamma(1 - a), so ||u(t)|| ~ t^-a
    params = FractionalParams(alpha, 0.5, 2.0, 1)
    grid = Grid(1, math.pi, 32)
    u0 = np.cos(grid.axis())
    coeffs = grid.forward(u0)
    times = np.geomspace(1e2, 1e4, 40)
    norms = [lq_norm(Field(grid, grid.inverse(linear_evolve(coeffs, t, params, grid))), 2)
             for t in times]
    slope = decay_rate((times, norms), 2, (1e3, 1e4))
    assert slope == pytest.approx(-alpha, rel=0.02)


@pytest.mark.parametrize("window", [(0, 5), (5, 5), (6, 5), (4.0, 4.05), (1, 20)])
def test_degenerate_windows(window):
    t = np.linspace(1, 10, 50)
    with pytest.raises(ValueError):
        decay_rate((t, np.exp(-t)), 2, window)


def test_nonpositive_trace():
    t = np.linspace(1, 10, 50)
    with pytest.raises(ValueError):
        decay_rate((t, np.zeros_like(t)), 2, (2, 8))

# }}}


# {{{ phase diagram


@pytest.fixture(scope="module")
def subcritical_table():
    cfg = SimulationConfig(params=FractionalParams(0.5, 0.25, 1.2, 1),
                           grid=Grid(1, 64.0, 256), dt=0.02, T_max=200.0,
                           q_list=(math.inf,), datum=GaussianDatum(1.0))
    return phase_diagram(cfg, [1.2], [0.01, 0.1, 1.0])


def test_subcritical_all_blow_up(subcritical_table):
    assert [row.signal for row in subcritical_table.rows] == [BLOWUP] * 3
    assert subcritical_table.critical[1.2] is None
    assert subcritical_table.monotonicity_violations == []


@pytest.fixture(scope="module")
def supercritical_table():
    return phase_diagram(_config(), [2.0], [0.0, 0.3, 3.0])


def test_supercritical_flip(supercritical_table):
    table = supercritical_table
    grid_rows = table.rows[:3]
    assert [r.signal for r in grid_rows] == [GLOBAL, GLOBAL, BLOWUP]
    low, high = table.brackets[2.0]
    assert 0.3 <= low < table.critical[2.0] < high <= 3.0
    assert high / low - 1 <= 0.05
    # the bracket ends were both run and classified
    by_amp = {r.amplitude: r.signal for r in table.rows}
    assert by_amp[low] == GLOBAL and by_amp[high] == BLOWUP
    assert sum(r.critical_amplitude_flag for r in table.rows) == 2
    assert len(table.rows) - 3 <= 12


def test_phase_csv(supercritical_table):
    lines = supercritical_table.to_csv().splitlines()
    assert lines[0] == "p,amplitude,status,t_detect,critical_amplitude_flag"
    assert lines[1].startswith("2.0,0.0,GlobalUpToTmax,,0")


def test_worker_pool_deterministic(supercritical_table):
    again = phase_diagram(_config(), [2.0], [0.0, 0.3, 3.0], workers=2)
    assert again.to_csv() == supercritical_table.to_csv()


def test_phase_diagram_validation():
    with pytest.raises(ValueError):
        phase_diagram(_config(), [], [1.0])
    with pytest.raises(ValueError):
        phase_diagram(_config(), [1.0], [1.0])


def test_bisection_bracket():
    seen = []
    low, high = bisect_critical_amplitude(
        _config(refine_detection=False), 0.3, 3.0, max_calls=4,
        record=lambda a, status, signal, t: seen.append((a, signal)))
    assert len(seen) == 4
    assert low in [a for a, s in seen if s == GLOBAL] + [0.3]
    assert high in [a for a, s in seen if s == BLOWUP] + [3.0]

# }}}


# {{{ blow-up times


@pytest.fixture(scope="module")
def threshold():
    return load_calibration()["entries"]["N=1,alpha=0.5,beta=0.25,p=2"]["C"]


def test_certified_indicator_bound(threshold):
    cfg = _config(datum=IndicatorDatum(1.0, 1.0), dt=0.01, T_max=20.0)
    # sup M = 2 * amplitude, so 0.5 C is uncertified
    amplitudes = [0.5 * threshold, 1.0 * threshold, 2.0 * threshold, 4.0 * threshold]
    rows, violations = blowup_time_study(cfg, amplitudes, threshold)
    assert [r.amplitude for r in rows] == amplitudes[1:]
    assert violations == []
    assert all(r.bound_holds for r in rows)
    t = [r.t_detect for r in rows]
    assert t == sorted(t, reverse=True)

# }}}


# {{{ convergence


def test_linear_convergence_exact():
    study = convergence_study(_config(nonlinearity="zero", T_max=2.0, datum=GaussianDatum(0.5)),
                              [0.1, 0.05, 0.025])
    assert study.errors[-1] == 0
    assert np.all(study.errors <= 1e-12)
    if np.any(study.errors[:-1] == 0):
        assert math.isnan(study.order)


def test_nonlinear_convergence_order():
    study = convergence_study(_config(T_max=2.0, datum=GaussianDatum(0.5)),
                              [0.08, 0.04, 0.02, 0.005])
    assert study.errors[-1] == 0
    assert study.order >= 0.8
    lines = study.to_csv().splitlines()
    assert lines[0] == "dt,error,status" and lines[-1].startswith("order,")


def test_convergence_validation():
    with pytest.raises(ValueError):
        convergence_study(_config(), [0.1, 0.05])
    with pytest.raises(ValueError):
        convergence_study(_config(datum=GaussianDatum(3.0), T_max=5.0), [0.1, 0.05, 0.025])

# }}}

# vim: foldmethod=marker
