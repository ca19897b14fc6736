"""Smoke tests of the python bindings against known operating points."""

import math

import cvqkd


def test_xi_normalization():
    xi = cvqkd.xi_closed_form(1.0)
    assert len(xi) == 4
    assert abs(sum(xi) - 1.0) < 1e-12
    series = cvqkd.xi_series_oracle(1.0, 40)
    for a, b in zip(xi, series):
        assert abs(a / b - 1.0) < 1e-10


def test_correlation_bound():
    assert cvqkd.correlation_z(0.29) < cvqkd.z_epr(0.29)
    assert abs(cvqkd.z_epr(0.29) - math.sqrt(0.6641)) < 1e-12


def test_entropy_g():
    assert cvqkd.entropy_g(1.0) == 0.0
    assert abs(cvqkd.entropy_g(3.0) - 2.0) < 1e-12


def test_key_rate_operating_point():
    r = cvqkd.key_rate(v_a=0.29, t0=0.1, eta=0.8, upsilon=0.12, beta=0.8)
    assert r["positive"]
    assert abs(r["key_rate_per_symbol"] / 4.68e-3 - 1.0) < 0.05
    assert abs(r["key_rate_per_second"] / 46800.0 - 1.0) < 0.05


def test_optimum():
    o = cvqkd.optimal_modulation(t0=0.1, eta=0.8, upsilon=0.12, beta=0.8)
    assert abs(o["v_a_star"] - 0.29) < 0.05
    assert abs(o["key_rate_star"] / 4.68e-3 - 1.0) < 0.10


def test_sinc_kernel_symmetry():
    s = cvqkd.sinc_coefficients(1.0, 0, 5)
    assert abs(s[0] - s[5]) < 1e-12
    assert abs(s[2] - s[3]) < 1e-12


def test_simulate_estimate_loop():
    recs = cvqkd.symbol_level_run(
        n_symbols=50000, seed=1, v_a=18.0, t0=1.0, eta=0.8, upsilon=0.12
    )
    est = cvqkd.estimate_channel(
        recs["alice_x"], recs["alice_p"], recs["bob_x"], recs["bob_p"],
        v_a=18.0, eta=0.8,
    )
    assert abs(est["chi_t_hat"] - 1.8) < 0.1
    ups = cvqkd.backout_detector_noise(est["chi_t_hat"], 1.0, 0.0, 0.8)
    assert abs(ups - 0.12) < 0.02
