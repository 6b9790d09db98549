from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import erfc

from fracfujita.cli_io import SimulationConfig
from fracfujita.criteria import GaussianDatum
from fracfujita.kernels import FractionalParams
from fracfujita.spectral_solver import (
    BLOWUP, GLOBAL, CannotContinueError, Field, Grid, NonContractionError, continue_run,
    linear_evolve, lq_norm, picard_iterate, picard_time, run, solve, start, step)

PARAMS = FractionalParams(0.5, 0.25, 2.0, 1)


@pytest.fixture(scope="module")
def gaussian():
    grid = Grid(1, 32.0, 128)
    return Field(grid, 0.5 * np.exp(-grid.axis() ** 2))


# {{{ grid and norms


@pytest.mark.parametrize("kwargs", [dict(dim=1, half_width=1.0, n=100),
                                    dict(dim=1, half_width=1.0, n=16),
                                    dict(dim=1, half_width=0.0, n=64),
                                    dict(dim=4, half_width=1.0, n=64)])
def test_grid_validation(kwargs):
    with pytest.raises(ValueError):
        Grid(**kwargs)


def test_field_must_be_finite():
    grid = Grid(1, 1.0, 32)
    values = np.zeros(32)
    values[3] = np.nan
    with pytest.raises(ValueError):
        Field(grid, values)


def test_lq_indicator_half_box():
    grid = Grid(1, 1.0, 64)
    x = grid.axis()
    fld = Field(grid, np.where((x >= -0.5) & (x < 0.5), 1.0, 0.0))
    assert lq_norm(fld, 1) == 1.0
    assert lq_norm(fld, math.inf) == 1.0


def test_lq_gaussian_closed_form():
    grid = Grid(1, 16.0, 1024)
    fld = Field(grid, np.exp(-grid.axis() ** 2))
    assert lq_norm(fld, 2) == pytest.approx((math.pi / 2) ** 0.25, rel=1e-4)


def test_lq_exact_on_constants():
    grid = Grid(2, 3.0, 32)
    fld = Field(grid, np.full(grid.shape, 2.0))
    assert lq_norm(fld, 3) == pytest.approx(2.0 * 36.0 ** (1 / 3), rel=1e-14)


@settings(max_examples=30, deadline=None)
@given(c=st.floats(-1e3, 1e3), q=st.one_of(st.floats(1.0, 10.0), st.just(math.inf)))
def test_lq_homogeneous(c, q):
    grid = Grid(1, 4.0, 32)
    values = np.sin(grid.axis()) + 0.3
    assert lq_norm(Field(grid, c * values), q) == pytest.approx(
        abs(c) * lq_norm(Field(grid, values), q), rel=1e-12, abs=1e-300)

# }}}


# {{{ linear evolution


def test_linear_identity_at_zero(gaussian):
    coeffs = gaussian.grid.forward(gaussian.values)
    np.testing.assert_array_equal(linear_evolve(coeffs, 0.0, PARAMS, gaussian.grid), coeffs)
    with pytest.raises(ValueError):
        linear_evolve(coeffs, -1.0, PARAMS, gaussian.grid)


def test_constant_field_unchanged():
    grid = Grid(2, 5.0, 32)
    coeffs = grid.forward(np.full(grid.shape, 3.0))
    out = linear_evolve(coeffs, 7.0, PARAMS, grid)
    np.testing.assert_allclose(grid.inverse(out), 3.0, rtol=1e-14)


def test_classical_heat_factor(gaussian):
    grid = gaussian.grid
    params = FractionalParams(1.0, 1.0, 1.0, 1)
    coeffs = grid.forward(gaussian.values)
    t = 0.7
    factor = np.exp(-grid.wavenumbers()[0] ** 2 * t)
    out = linear_evolve(coeffs, t, params, grid)
    nz = np.abs(coeffs) > 0
    np.testing.assert_allclose(out[nz] / coeffs[nz], factor[nz], rtol=1e-12)

# }}}


# {{{ stepping


def test_zero_nonlinearity_is_linear(gaussian):
    outcome = run(gaussian, PARAMS, 0.05, 5.0, nonlinearity="zero")
    expected = linear_evolve(gaussian.grid.forward(gaussian.values), 5.0, PARAMS,
                             gaussian.grid)
    got = outcome.state.current_hat
    nz = expected != 0
    assert np.max(np.abs(got[nz] - expected[nz]) / np.abs(expected[nz])) <= 1e-12
    assert np.all(got[~nz] == 0)


def _mean_mode(outcome):
    return outcome.state.current_hat.flat[0].real


def test_linear_reaction_first_order(gaussian):
    # p = 1: the mean obeys d^a m = m, so m(t) = m0 E_a(t^a) = m0 e^t erfc(-sqrt t)
    params = FractionalParams(0.5, 0.25, 1.0, 1)
    m0 = gaussian.grid.forward(gaussian.values).flat[0].real
    T = 1.6
    exact = m0 * math.exp(T) * erfc(-math.sqrt(T))
    dts = [0.08, 0.04, 0.02, 0.01]
    errors = [abs(_mean_mode(run(gaussian, params, dt, T)) - exact) / exact for dt in dts]
    order = np.polyfit(np.log(dts), np.log(errors), 1)[0]
    assert order >= 0.9
    assert errors[-1] < 0.03


def test_linear_reaction_continuation(gaussian):
    params = FractionalParams(0.5, 0.25, 1.0, 1)
    m0 = gaussian.grid.forward(gaussian.values).flat[0].real
    first = run(gaussian, params, 0.01, 0.8)
    out = continue_run(first.state, 0.8)
    exact = m0 * math.exp(1.6) * erfc(-math.sqrt(1.6))
    fresh = run(gaussian, params, 0.01, 1.6)
    assert _mean_mode(out) == _mean_mode(fresh)
    assert abs(_mean_mode(out) - exact) / exact < 0.03


def _exponential_euler(u0, grid, dt, nsteps):
    """Classical first-order exponential integrator for u_t = u_xx + u^2."""
    lam = grid.symbol(1.0)
    decay = np.exp(-lam * dt)
    phi = np.where(lam > 0, -np.expm1(-lam * dt) / np.where(lam > 0, lam, 1.0), dt)
    mask = grid.dealias_mask()
    coeffs = grid.forward(u0)
    for _ in range(nsteps):
        u = grid.inverse(coeffs)
        f_hat = grid.forward(u * np.abs(u)) * mask
        coeffs = decay * coeffs + phi * f_hat
    return grid.inverse(coeffs)


def test_classical_exponential_integrator():
    grid = Grid(1, 16.0, 128)
    u0 = np.exp(-grid.axis() ** 2)
    params = FractionalParams(1.0, 1.0, 2.0, 1)
    T = 1.0
    ours = run(Field(grid, u0), params, 0.01, T).state.current
    reference = _exponential_euler(u0, grid, 0.01, 100)
    # at alpha = 1 the product-integration weights are those of exponential Euler
    np.testing.assert_allclose(ours, reference, rtol=1e-9, atol=1e-12)

    fine = _exponential_euler(u0, grid, 0.01 / 16, 1600)
    errs = [np.linalg.norm(run(Field(grid, u0), params, dt, T).state.current - fine)
            for dt in (0.04, 0.02, 0.01)]
    order = np.polyfit(np.log([0.04, 0.02, 0.01]), np.log(errs), 1)[0]
    assert order == pytest.approx(1.0, abs=0.15)


def test_step_interface(gaussian):
    state = start(gaussian, PARAMS, 0.05)
    step(state)
    step(state, 0.05)
    assert state.steps == 2
    with pytest.raises(ValueError):
        step(state, 0.1)
    with pytest.raises(ValueError):
        step(state, nonlinearity="zero")
    with pytest.raises(ValueError):
        start(gaussian, PARAMS, 0.0)


def test_mean_mode_nondecreasing(gaussian):
    outcome = run(gaussian, PARAMS, 0.05, 5.0, snapshot_every=1)
    means = [np.sum(u) for _, u in outcome.state.snapshots]
    assert np.all(np.diff(means) >= -1e-12 * abs(means[0]))


def test_positivity_preserved(gaussian):
    outcome = run(gaussian, PARAMS, 0.05, 5.0, snapshot_every=1)
    assert outcome.signal == GLOBAL
    for _, u in outcome.state.snapshots:
        assert u.min() >= -1e-6 * u.max()


def test_mode_order_does_not_matter(gaussian):
    a = run(gaussian, PARAMS, 0.05, 4.0)
    b = run(gaussian, PARAMS, 0.05, 4.0, mode_order="reversed")
    for q in a.norm_traces:
        np.testing.assert_allclose(a.norm_traces[q], b.norm_traces[q], rtol=1e-12)

# }}}


# {{{ runs


def _config(amplitude, **changes):
    base = dict(params=PARAMS, grid=Grid(1, 32.0, 128), dt=0.05, T_max=5.0,
                q_list=(1.0, 2.0, math.inf), datum=GaussianDatum(amplitude))
    base.update(changes)
    return SimulationConfig(**base)


def test_zero_datum_is_global():
    outcome = solve(_config(0.0))
    assert outcome.status == GLOBAL
    for trace in outcome.norm_traces.values():
        assert np.all(trace == 0)


def test_blowup_signal_and_cap():
    outcome = solve(_config(3.0))
    assert outcome.signal == BLOWUP
    last = outcome.norm_traces[math.inf][-1]
    assert not np.isfinite(last) or last > outcome.diagnostics["cap"]
    assert outcome.t_detect == pytest.approx(outcome.times[-1])
    assert "refinement_shift" in outcome.diagnostics


def test_subcritical_small_datum_blows_up():
    params = FractionalParams(0.5, 0.25, 1.2, 1)
    outcome = solve(_config(0.1, params=params, grid=Grid(1, 64.0, 256), dt=0.02,
                            T_max=200.0, refine_detection=False))
    assert outcome.signal == BLOWUP
    assert outcome.t_detect < 200.0


def test_nonnegative_global_run_exempt_from_monitor():
    outcome = solve(_config(0.3))
    assert outcome.diagnostics["shell_ratio_max"] > outcome.diagnostics["boundary_tol"]
    assert outcome.status == GLOBAL


def test_signed_datum_monitored():
    grid = Grid(1, 32.0, 128)
    x = grid.axis()
    u0 = Field(grid, 0.3 * x * np.exp(-x**2))
    outcome = run(u0, PARAMS, 0.05, 5.0)
    assert outcome.signal == GLOBAL
    assert outcome.status == "Inconclusive"
    assert "boundary" in outcome.reason


def test_lipschitz_demo_is_global():
    outcome = solve(_config(5.0, nonlinearity="lipschitz_demo", T_max=20.0))
    assert outcome.signal == GLOBAL


def test_continuation_bitwise(gaussian):
    single = run(gaussian, PARAMS, 0.05, 2.0)
    half = run(gaussian, PARAMS, 0.05, 1.0)
    cont = continue_run(half.state, 1.0)
    np.testing.assert_array_equal(single.state.current, cont.state.current)
    for q in single.norm_traces:
        np.testing.assert_array_equal(single.norm_traces[q], cont.norm_traces[q])


def test_cannot_continue_blowup():
    outcome = solve(_config(3.0))
    with pytest.raises(CannotContinueError):
        continue_run(outcome.state, 1.0)

# }}}


# {{{ Picard iteration


def test_picard_zero_datum(gaussian):
    zero = Field(gaussian.grid, np.zeros(gaussian.grid.shape))
    res = picard_iterate(zero, 0.5, 5, PARAMS, 0.05)
    assert np.all(res.distances == 0)
    for it in res.iterates:
        assert np.all(it == 0)


def test_picard_contraction(gaussian):
    t0 = picard_time(PARAMS, float(gaussian.values.max()))
    dt = t0 / 50
    res = picard_iterate(gaussian, 50 * dt, 30, PARAMS, dt)
    assert len(res.ratios) >= 3
    assert np.all(res.ratios[1:] <= 0.6)
    direct = run(gaussian, PARAMS, dt, 50 * dt).state.current
    limit = res.iterates[-1][-1]
    assert np.linalg.norm(limit - direct) <= 1e-8 * np.linalg.norm(direct)


def test_picard_non_contraction(gaussian):
    with pytest.raises(NonContractionError) as err:
        picard_iterate(Field(gaussian.grid, 3 * gaussian.values), 2.0, 8, PARAMS, 0.05,
                       raise_on_growth=True)
    assert np.any(np.asarray(err.value.ratios) >= 1)

# }}}

# vim: foldmethod=marker
