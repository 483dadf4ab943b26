import math

import numpy as np
import pytest

from hintedls import analysis, hints
from hintedls.exceptions import DegenerateFitError, LengthMismatchError
from hintedls.systems import NoiseModel, get_system, simulate, zero_noise


def test_regret_identical_streams():
    preds = np.random.default_rng(0).uniform(-1, 1, (20, 2))
    y = preds + 0.1
    report = analysis.luenberger_regret(preds, preds, y)
    np.testing.assert_allclose(report.cumulative_regret, np.zeros(20), atol=1e-15)


def test_regret_perfect_learner_is_negative():
    y = np.ones((10, 1))
    comp = np.zeros((10, 1))
    report = analysis.luenberger_regret(y, comp, y)
    np.testing.assert_allclose(report.cumulative_regret,
                               -np.cumsum(np.ones(10)), atol=1e-15)


def test_regret_hand_arithmetic():
    y = np.zeros((2, 1))
    learner = np.array([[1.0], [2.0]])
    comp = np.array([[2.0], [1.0]])
    report = analysis.luenberger_regret(learner, comp, y)
    np.testing.assert_allclose(report.cumulative_regret, [-3.0, 0.0])


def test_regret_length_mismatch():
    with pytest.raises(LengthMismatchError):
        analysis.luenberger_regret(np.zeros((3, 1)), np.zeros((2, 1)), np.zeros((3, 1)))


def test_theorem2_bound_unit_constants():
    b = analysis.BoundInputs(norm_C=1.0, p=1, r=1, kappa_A=1.0, kappa=1.0, gamma=1.0,
                             C_w=1.0, C_v=1.0, C_y=1.0, lam=1.0, H=1, T=1,
                             delta_max=1.0)
    assert analysis.truncation_constant(b) == pytest.approx(1.0)
    assert analysis.prediction_error_constant(b) == pytest.approx(3.0)
    # 1 (bias) + log(1 + 2^3) (regression) + 1 (trunc^2) + 6 (cross)
    assert analysis.theorem2_bound(b) == pytest.approx(8.0 + math.log(9.0))


def test_theorem2_bound_zero_residual_limit():
    b = analysis.BoundInputs(norm_C=1.0, p=1, r=1, kappa_A=1.0, kappa=1.0, gamma=1.0,
                             C_w=1.0, C_v=1.0, C_y=1.0, lam=1e-15, H=1, T=1,
                             delta_max=0.0)
    c_trun = analysis.truncation_constant(b)
    c_pred = analysis.prediction_error_constant(b)
    assert analysis.theorem2_bound(b) == pytest.approx(
        c_trun**2 + 2 * c_pred * c_trun, abs=1e-10)


def test_theorem2_bound_residual_scaling():
    base = analysis.BoundInputs(norm_C=1.0, p=1, r=2, kappa_A=1.0, kappa=2.0,
                                gamma=0.5, C_w=0.3, C_v=0.3, C_y=1.0, lam=1.0,
                                H=15, T=2000, delta_max=1.0)
    doubled = analysis.BoundInputs(**{**base.__dict__, "delta_max": 2.0})
    middle_1 = analysis.theorem2_bound(base) - analysis.theorem2_bound(
        analysis.BoundInputs(**{**base.__dict__, "delta_max": 0.0}))
    middle_2 = analysis.theorem2_bound(doubled) - analysis.theorem2_bound(
        analysis.BoundInputs(**{**base.__dict__, "delta_max": 0.0}))
    assert middle_2 == pytest.approx(4.0 * middle_1, rel=1e-12)


def test_residual_bound_two_lag_arithmetic():
    b = analysis.BoundInputs(norm_C=1.0, n=2, kappa_A=1.0, C_w=0.1, C_v=0.1)
    assert analysis.residual_bound("two_lag", b) == pytest.approx(0.8)


def test_residual_bound_luenberger_arithmetic():
    b = analysis.BoundInputs(norm_C=1.0, C_w=1.0, C_v=0.0,
                             kappa_tilde=1.0, gamma_tilde=1.0)
    assert analysis.residual_bound("luenberger_hint", b) == pytest.approx(1.0)


def test_residual_bound_diff_looser_than_two_lag():
    b = analysis.BoundInputs(norm_C=1.0, n=2, r=1, kappa_A=1.0, C_w=0.1, C_v=0.1)
    assert analysis.residual_bound("high_order_diff", b) \
        > analysis.residual_bound("two_lag", b)
    with pytest.raises(ValueError):
        analysis.residual_bound("unknown", b)


def test_filtered_power_sums_geometric_oracle():
    sums, last = analysis.filtered_power_sums(np.diag([0.5, 1.0]), 1, 200)
    # stable eigenvalue contributes (1 - 0.25) / (1 - 0.5) = 1.5, marginal 0
    assert sums[-1] == pytest.approx(1.5, abs=1e-9)
    assert last <= 1e-12
    assert np.all(np.diff(sums) >= -1e-15)


def test_filtered_power_sums_identity_annihilated():
    sums, last = analysis.filtered_power_sums(np.eye(3), 2, 50)
    assert sums[-1] == 0.0 and last == 0.0


def test_filtered_power_sums_marginal_jordan_annihilated():
    block = np.array([[1.0, 1.0], [0.0, 1.0]])
    sums, _ = analysis.filtered_power_sums(block, 2, 50)
    assert sums[-1] <= 1e-12


def test_filtered_power_sums_diagonalizable_bound():
    rng = np.random.default_rng(1)
    for _ in range(5):
        n = int(rng.integers(2, 6))
        basis, _ = np.linalg.qr(rng.standard_normal((n, n)))
        eigs = rng.uniform(-1, 1, n)
        a = basis @ np.diag(eigs) @ basis.T
        sums, _ = analysis.filtered_power_sums(a, 1, 400)
        assert sums[-1] <= 2.0 * n * 1.0000001


def test_filtered_power_sums_jordan3_bound():
    system = get_system("jordan3")
    sums, last = analysis.filtered_power_sums(system.a, 3, 200)
    k_r = 3 * (2 * math.e**2) ** 3
    assert sums[-1] <= k_r * system.n * system.kappa_a
    assert last <= 1e-12


def test_decomposition_zero_noise():
    system = get_system("symmetric_swap")
    traj = simulate(system, zero_noise(2, 1), 50)
    assert analysis.residual_decomposition_check(system, hints.diff_coeffs(1), traj) == 0.0


def test_decomposition_two_lag_swap():
    system = get_system("symmetric_swap")
    model = NoiseModel(bias_w=[0.1, 0.1], amp_w=[0.1, 0.1], freq_w=0.05, uniform_w=0.01,
                       bias_v=[0.1], amp_v=[0.1], freq_v=0.08, uniform_v=0.01, seed=2)
    traj = simulate(system, model, 200)
    gap = analysis.residual_decomposition_check(system, hints.diff_coeffs(1), traj)
    assert gap <= 1e-8


def test_decomposition_order_zero_reduces_to_output():
    system = get_system("double_integrator")
    model = NoiseModel(bias_w=[0.0, 0.05], amp_w=[0.02, 0.02], freq_w=0.1,
                       uniform_w=0.1, bias_v=[0.01], amp_v=[0.01], freq_v=0.2,
                       uniform_v=0.1, seed=4)
    traj = simulate(system, model, 100)
    gap = analysis.residual_decomposition_check(system, np.array([1.0]), traj)
    assert gap <= 1e-9


def test_log_fit_exact():
    ts = np.arange(1, 301)
    fit = analysis.log_fit(3.0 * np.log(ts) + 1.0, t_min=1)
    assert fit.slope == pytest.approx(3.0, abs=1e-10)
    assert fit.intercept == pytest.approx(1.0, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)


def test_log_fit_constant_series_convention():
    fit = analysis.log_fit(np.full(50, 7.0), t_min=1)
    assert fit.slope == pytest.approx(0.0, abs=1e-12)
    assert fit.r_squared == 1.0


def test_log_fit_linear_data_poor_fit():
    ts = np.arange(1, 2001, dtype=float)
    fit = analysis.log_fit(ts, t_min=100)
    assert fit.r_squared < 0.95


def test_log_fit_degenerate():
    with pytest.raises(DegenerateFitError):
        analysis.log_fit(np.ones(5), t_min=1)
    with pytest.raises(DegenerateFitError):
        analysis.log_fit(np.ones(100), t_min=95)


def test_linear_fit_r2():
    ts = np.arange(1, 500, dtype=float)
    assert analysis.linear_fit_r2(2.0 * ts + 3.0, t_min=1) == pytest.approx(1.0)
    assert analysis.linear_fit_r2(np.log(ts), t_min=10) < 1.0
