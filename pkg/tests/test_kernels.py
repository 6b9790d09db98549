from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate

from fracfujita.kernels import (
    FractionalParams, IntegrabilityError, build_profile, eval_Y, eval_Z,
    load_profile_csv, lr_norm, save_profile_csv, verify_estimates)
from fracfujita.special_functions import ml_weight


# {{{ profiles


def test_heat_kernel(profile):
    prof = profile("F", 1.0, 1.0, 1)
    exact = np.exp(-prof.nodes**2 / 4) / math.sqrt(4 * math.pi)
    assert np.max(np.abs(prof.values - exact)) <= 1e-6 * exact.max()
    # the table keeps only values resolved above quadrature noise
    np.testing.assert_allclose(prof.values, exact, rtol=1e-6, atol=1e-14)


@pytest.mark.parametrize("kind, alpha, beta, dim",
                         [("F", 0.5, 0.2, 1), ("G", 0.5, 0.2, 1),
                          ("F", 0.5, 0.5, 3), ("G", 0.5, 0.5, 3)])
def test_positive_and_decreasing(profile, kind, alpha, beta, dim):
    prof = profile(kind, alpha, beta, dim)
    assert np.all(prof.values > 0)
    assert np.all(np.diff(prof.values) < 0)
    assert prof.tail_exponent == pytest.approx(dim + 2 * beta)


def test_oracle_values(profile, kernel_oracle):
    worst = {}
    for rec in kernel_oracle:
        prof = profile(rec["kind"], rec["alpha"], rec["beta"], rec["dim"])
        exact = float(rec["value"])
        rel = abs(float(prof(rec["r"])) - exact) / exact
        key = (rec["kind"], rec["alpha"], rec["beta"], rec["dim"])
        worst[key] = max(worst.get(key, 0.0), rel)
    assert worst
    for key, rel in worst.items():
        assert rel <= 1e-6, (key, rel)


def test_head_singularity_of_G(profile):
    prof = profile("G", 0.5, 0.5, 3)
    slopes = np.diff(np.log(prof.values[:3])) / np.diff(np.log(prof.nodes[:3]))
    # r^{4 beta - N}
    assert np.all(np.abs(slopes - (-1.0)) <= 0.1)


def test_classical_limit(profile):
    prof = profile("F", 0.999, 1.0, 1)
    r = np.linspace(0, 20, 401)
    gauss = np.exp(-r**2 / 4) / math.sqrt(4 * math.pi)
    assert np.max(np.abs(prof(r) - gauss)) <= 2e-2


def test_build_preconditions():
    params = FractionalParams(0.5, 0.5, 1.0, 1)
    with pytest.raises(ValueError):
        build_profile("F", params, resolution=32)
    with pytest.raises(ValueError):
        build_profile("F", params, r_max=5.0)
    with pytest.raises(ValueError):
        build_profile("H", params)


def test_csv_round_trip(profile, tmp_path):
    prof = profile("G", 0.5, 0.5, 3)
    path = tmp_path / "g.csv"
    save_profile_csv(prof, path)
    back = load_profile_csv(path)
    np.testing.assert_array_equal(back.nodes, prof.nodes)
    np.testing.assert_array_equal(back.values, prof.values)
    r = np.geomspace(1e-4, 1e3, 50)
    np.testing.assert_allclose(back(r), prof(r), rtol=1e-15)

# }}}


# {{{ kernels in space-time


def test_unit_time_is_profile(profile):
    F = profile("F", 0.5, 0.2, 1)
    G = profile("G", 0.5, 0.2, 1)
    np.testing.assert_allclose(eval_Z(F.nodes, 1.0, F), F.values, rtol=1e-14)
    np.testing.assert_allclose(eval_Y(G.nodes, 1.0, G), G.values, rtol=1e-14)


@pytest.mark.parametrize("kind, alpha, beta, dim",
                         [("F", 0.5, 0.2, 1), ("G", 0.5, 0.2, 1),
                          ("F", 0.5, 0.5, 3), ("G", 0.5, 0.5, 3)])
def test_self_similar_collapse(profile, kind, alpha, beta, dim):
    prof = profile(kind, alpha, beta, dim)
    params = prof.params
    evaluate, decay = (eval_Z, params.z_decay) if kind == "F" else (eval_Y, params.y_decay)
    r = prof.nodes
    scaled = [t**decay * evaluate(r * t**params.kappa, t, prof) for t in (0.5, 2.0)]
    assert np.max(np.abs(scaled[0] - scaled[1]) / scaled[1]) <= 1e-6


def test_Y_positive(profile):
    G = profile("G", 0.5, 0.2, 1)
    r, t = np.meshgrid(np.geomspace(1e-4, 1e4, 60), np.geomspace(1e-3, 1e3, 30))
    assert np.all(eval_Y(r, t, G) > 0)


def test_kind_checked(profile):
    with pytest.raises(ValueError):
        eval_Z(1.0, 1.0, profile("G", 0.5, 0.2, 1))
    with pytest.raises(ValueError):
        eval_Y(1.0, 0.0, profile("G", 0.5, 0.2, 1))


@pytest.mark.parametrize("lam", [0.3, 1.0, 4.0])
def test_time_integrated_symbol(profile, lam):
    # the cosine transform of Y(., s) integrated over (0, T) is the step weight
    prof = profile("G", 0.5, 0.5, 1)
    alpha, kappa = 0.5, prof.params.kappa
    xi = lam ** (1 / (2 * prof.params.beta))
    T = 2.0

    def g_hat(k):
        head, _ = integrate.quad(lambda r: float(prof(r)), 0, 1, weight="cos", wvar=k,
                                 epsabs=1e-14, limit=200)
        tail, _ = integrate.quad(lambda r: float(prof(r)), 1, np.inf, weight="cos",
                                 wvar=k, epsabs=1e-14, limit=200)
        return 2 * (head + tail)

    # Y^(xi, s) = s^{alpha - 1} G^(xi s^kappa); substitute s = v^{1/alpha}
    def integrand(v):
        s = v ** (1 / alpha)
        return g_hat(xi * s**kappa) / alpha

    total, _ = integrate.quad(integrand, 0, T**alpha, epsabs=1e-12, epsrel=1e-10,
                              limit=100)
    assert total == pytest.approx(float(ml_weight(lam, alpha, T)), rel=1e-6)

# }}}


# {{{ norms


@pytest.mark.parametrize("alpha, beta, dim", [(0.5, 0.2, 1), (0.5, 0.5, 3)])
@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_mass(profile, alpha, beta, dim, t):
    assert lr_norm(profile("F", alpha, beta, dim), 1.0, t) == pytest.approx(1.0, abs=1e-5)


def test_G_mass(profile):
    # ||Y(t)||_1 = t^{alpha - 1} / Gamma(alpha)
    G = profile("G", 0.5, 0.2, 1)
    assert lr_norm(G, 1.0, 1.0) == pytest.approx(1 / math.gamma(0.5), rel=1e-5)


@pytest.mark.parametrize("r", [1.0, 1.2, 1.4, math.inf])
def test_norm_scaling(profile, r):
    F = profile("F", 0.5, 0.5, 3)
    if r == math.inf:
        with pytest.raises(IntegrabilityError):
            lr_norm(F, r, 1.0)
        return
    gain = F.params.z_decay * (1 - 1 / r)
    values = [lr_norm(F, r, t) * t**gain for t in (0.3, 1.0, 7.0)]
    np.testing.assert_allclose(values, values[1], rtol=1e-8)


def test_integrability_frontier(profile):
    F = profile("F", 0.5, 0.2, 1)
    G = profile("G", 0.5, 0.2, 1)
    p_c = 1 / (1 - 0.4)
    assert math.isfinite(lr_norm(F, p_c * (1 - 1e-3), 1.0))
    with pytest.raises(IntegrabilityError) as err:
        lr_norm(F, p_c, 1.0)
    assert err.value.critical_exponent == pytest.approx(p_c)
    assert math.isfinite(lr_norm(G, 4.99, 1.0))
    with pytest.raises(IntegrabilityError):
        lr_norm(G, 5.0, 1.0)


def test_norm_refinement_stable(profile):
    # r = 2 lies beyond p_c = 5/3 for Z but inside N/(N - 4 beta) = 5 for Y
    with pytest.raises(IntegrabilityError):
        lr_norm(profile("F", 0.5, 0.2, 1), 2.0, 1.0)
    coarse = lr_norm(profile("G", 0.5, 0.2, 1), 2.0, 1.0)
    fine = lr_norm(profile("G", 0.5, 0.2, 1, 1024), 2.0, 1.0)
    assert math.isfinite(fine)
    assert abs(fine - coarse) <= 0.05 * fine

# }}}


# {{{ bound verification


def test_verify_refuses_low_dimension():
    with pytest.raises(ValueError):
        verify_estimates(FractionalParams(0.5, 0.5, 1.0, 1))


@pytest.mark.parametrize("case", [(1, 0.2), (3, 0.5)])
def test_estimates_stable(estimate_reports, case):
    report = estimate_reports[case]
    assert {row.bound_id for row in report.rows} >= {"Z", "Z_t", "Y", "Y_t", "Z_Lr",
                                                     "Z_diff", "Y_Lr", "Y_diff"}
    for row in report.rows:
        assert math.isfinite(row.fitted_K)
        assert row.refinement_drift < 0.05, row
        assert row.infimum <= row.fitted_K


@pytest.mark.parametrize("case", [(1, 0.2), (3, 0.5)])
def test_inner_sharpness(estimate_reports, case):
    report = estimate_reports[case]
    assert report.row("Z", "inner").infimum > 0
    assert report.row("Y", "inner").infimum > 0


def test_report_csv(estimate_reports, tmp_path):
    report = estimate_reports[(1, 0.2)]
    path = tmp_path / "report.csv"
    report.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "bound_id,regime,fitted_K,refinement_drift,infimum,samples"
    assert len(lines) == len(report.rows) + 1

# }}}

# vim: foldmethod=marker
