import math

import numpy as np
import pytest

from tightcs.frames import build_frame
from tightcs.noise import (
    NoiseSpec,
    ads_lambda,
    alasso_mu,
    correlation_threshold,
    draw_noise,
    l2_noise_bound,
    threshold_report,
)

# 30-digit evaluations of the closed forms (mpmath), frozen
LAMBDA_05_256 = 3.33021844463079102541
MU_05_256 = 6.66043688926158205083
FLOOR_D100 = 0.99814096646678393381
GN_M100 = 11.9548868888746473490


def test_zero_sigma_gives_zero_noise():
    draw = draw_noise(NoiseSpec("gaussian", sigma=0.0), 10, seed=1)
    assert np.array_equal(draw.z, np.zeros(10))


def test_sparse_identity_omega_has_s_prime_entries():
    draw = draw_noise(NoiseSpec("sparse", s_prime=3, amplitude=2.0), 12, seed=4)
    assert np.count_nonzero(draw.e) == 3
    assert set(np.abs(draw.e[draw.e != 0])) == {2.0}
    assert draw.analysis_sparsity == 3 and draw.warning == ""


def test_sparse_onb_omega_is_exactly_analysis_sparse():
    omega = build_frame("random_onb", 8, seed=2)
    draw = draw_noise(NoiseSpec("sparse", omega=omega, s_prime=2), 8, seed=5)
    assert np.count_nonzero(np.abs(omega.D.T @ draw.e) > 1e-12) == 2
    assert draw.warning == ""


def test_redundant_omega_reports_achieved_sparsity():
    omega = build_frame("union_of_onb", 6, 12, seed=1)
    draw = draw_noise(NoiseSpec("sparse", omega=omega, s_prime=2), 6, seed=3)
    assert draw.analysis_sparsity > 2
    assert "redundant" in draw.warning


def test_gaussian_sample_variance():
    z = draw_noise(NoiseSpec("gaussian", sigma=2.0), 10_000, seed=7).z
    assert abs(z.var() - 4.0) <= 0.05 * 4.0


def test_bounded_noise_on_sphere():
    z = draw_noise(NoiseSpec("bounded", epsilon=0.3), 20, seed=1).z
    assert np.isclose(np.linalg.norm(z), 0.3)


def test_composite_has_both_parts():
    d = draw_noise(NoiseSpec("composite", sigma=0.1, s_prime=2), 15, seed=2)
    assert np.count_nonzero(d.e) == 2 and np.linalg.norm(d.z) > 0


def test_draw_noise_deterministic():
    spec = NoiseSpec("composite", sigma=0.5, s_prime=3)
    a, b = draw_noise(spec, 30, seed=11), draw_noise(spec, 30, seed=11)
    assert np.array_equal(a.z, b.z) and np.array_equal(a.e, b.e)


def test_noise_spec_validation():
    with pytest.raises(ValueError):
        NoiseSpec("laplace")
    with pytest.raises(ValueError):
        NoiseSpec("gaussian", sigma=-1.0)
    with pytest.raises(ValueError):
        NoiseSpec("sparse", omega=build_frame("identity", 3), s_prime=4)


def test_ads_lambda_values():
    assert ads_lambda(0.0, 50) == 0.0
    assert abs(ads_lambda(0.5, 256) - LAMBDA_05_256) <= 1e-14


def test_alasso_mu_values():
    assert alasso_mu(0.0, 50) == 0.0
    assert abs(alasso_mu(0.5, 256) - MU_05_256) <= 1e-14
    for sigma, d in [(0.1, 2), (1.3, 999), (7.0, 64)]:
        assert alasso_mu(sigma, d) == 2.0 * ads_lambda(sigma, d)


def test_lambda_rejects_small_d():
    with pytest.raises(ValueError):
        ads_lambda(1.0, 1)


def test_threshold_relaxed_form_is_ads_lambda():
    t, _ = correlation_threshold(0.7, 300, alpha=1.0, delta1=1.0)
    assert math.isclose(t, ads_lambda(0.7, 300), rel_tol=1e-15)


def test_threshold_floor_d100():
    _, p = correlation_threshold(1.0, 100, alpha=1.0, delta1=0.0)
    assert abs(p - FLOOR_D100) <= 1e-14
    assert round(p, 6) == 0.998141


def test_threshold_rejects_alpha_zero():
    with pytest.raises(ValueError):
        correlation_threshold(1.0, 100, alpha=0.0, delta1=0.5)


def test_l2_bound_boundary_m1():
    assert l2_noise_bound(2.5, 1) == (2.5, 0.0)


def test_l2_bound_m100():
    b, p = l2_noise_bound(1.0, 100)
    assert abs(b - GN_M100) <= 1e-12
    assert abs(b - 11.9551) <= 1e-3
    assert p == 0.99


def test_l2_bound_linear_in_sigma():
    assert math.isclose(l2_noise_bound(3.0, 57)[0], 3.0 * l2_noise_bound(1.0, 57)[0])


def test_threshold_report_ratio():
    r = threshold_report(0.2, 128, 64)
    assert r.mu_alasso == 2 * r.lambda_ads
    assert 0 < r.lambda_probability_floor < 1
