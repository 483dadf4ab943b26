import numpy as np
import pytest

from hintedls import linalg
from hintedls.exceptions import NotApplicableError, TrajectoryOverflowError
from hintedls.systems import (
    NoiseModel,
    SystemSpec,
    get_system,
    growth_envelope,
    sample_noise,
    simulate,
    system_names,
    zero_noise,
)


def constant_noise(w, v):
    w = np.atleast_1d(np.asarray(w, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    return NoiseModel(bias_w=w, amp_w=np.zeros_like(w), freq_w=0.0, uniform_w=0.0,
                      bias_v=v, amp_v=np.zeros_like(v), freq_v=0.0, uniform_v=0.0)


def test_sample_noise_constant_bias():
    model = constant_noise([0.0, 1.0], [0.0])
    for t in (0, 1, 17):
        w, v = sample_noise(model, t)
        np.testing.assert_allclose(w, [0.0, 1.0])
        np.testing.assert_allclose(v, [0.0])


def test_sample_noise_uniform_bounds():
    model = NoiseModel(bias_w=[0.0, 0.0], amp_w=[0.0, 0.0], freq_w=0.0, uniform_w=0.3,
                       bias_v=[0.0], amp_v=[0.0], freq_v=0.0, uniform_v=0.3, seed=42)
    for t in range(200):
        w, v = sample_noise(model, t)
        assert np.all(np.abs(w) <= 0.3)
        assert np.all(np.abs(v) <= 0.3)


def test_sample_noise_effective_norm_bounds():
    model = NoiseModel(bias_w=[0.1, -0.2], amp_w=[0.3, 0.1], freq_w=0.7, uniform_w=0.25,
                       bias_v=[0.05], amp_v=[0.1], freq_v=0.3, uniform_v=0.15, seed=99)
    c_w, c_v = model.effective_bounds()
    for t in range(300):
        w, v = sample_noise(model, t)
        assert np.linalg.norm(w) <= c_w + 1e-12
        assert np.linalg.norm(v) <= c_v + 1e-12


def test_sample_noise_deterministic():
    model = NoiseModel(bias_w=[0.1], amp_w=[0.2], freq_w=0.3, uniform_w=0.5,
                       bias_v=[0.0], amp_v=[0.1], freq_v=0.2, uniform_v=0.4, seed=7)
    for t in (0, 3, 99):
        w1, v1 = sample_noise(model, t)
        w2, v2 = sample_noise(model, t)
        np.testing.assert_array_equal(w1, w2)
        np.testing.assert_array_equal(v1, v2)


def test_simulate_zero_noise():
    system = get_system("double_integrator")
    traj = simulate(system, zero_noise(2, 1), 10)
    np.testing.assert_array_equal(traj.states, np.zeros((11, 2)))
    np.testing.assert_array_equal(traj.outputs, np.zeros((10, 1)))


def test_simulate_double_integrator_triangular():
    system = get_system("double_integrator")
    traj = simulate(system, constant_noise([0.0, 1.0], [0.0]), 4)
    np.testing.assert_allclose(traj.outputs.ravel(), [0.0, 1.0, 3.0, 6.0])


def test_simulate_swap_hand_recursion():
    system = get_system("symmetric_swap")
    traj = simulate(system, constant_noise([1.0, 0.0], [0.0]), 3)
    np.testing.assert_allclose(traj.outputs.ravel(), [1.0, 1.5, 2.5])


def test_simulate_replay_bit_identical():
    system = get_system("jordan3")
    model = NoiseModel(bias_w=[0.01, 0.0, 0.0], amp_w=[0.0, 0.02, 0.0], freq_w=0.3,
                       uniform_w=0.1, bias_v=[0.0], amp_v=[0.05], freq_v=0.2,
                       uniform_v=0.1, seed=123)
    a = simulate(system, model, 150)
    b = simulate(system, model, 150)
    np.testing.assert_array_equal(a.states, b.states)
    np.testing.assert_array_equal(a.outputs, b.outputs)
    np.testing.assert_array_equal(a.process_noise, b.process_noise)
    np.testing.assert_array_equal(a.measurement_noise, b.measurement_noise)


def test_simulate_overflow_guard():
    system = get_system("jordan3")
    model = constant_noise([6e11, 0.0, 0.0], [0.0])
    with pytest.raises(TrajectoryOverflowError):
        simulate(system, model, 10)


def test_growth_envelope_values():
    # kappa=1, C_w_eff=1, |C|=1, C_v_eff=0 -> (1, 1)
    sys_a = SystemSpec(a=[[0.5]], c=[[1.0]], jordan_r=1, kappa_a=1.0,
                       spectrum_tag="stable")
    c_x, c_y = growth_envelope(sys_a, constant_noise([1.0], [0.0]))
    assert (c_x, c_y) == (1.0, 1.0)
    # kappa=2, C_w_eff=0.5, |C|=3, C_v_eff=0.1 -> (1.0, 3.1)
    sys_b = SystemSpec(a=[[0.5]], c=[[3.0]], jordan_r=1, kappa_a=2.0,
                       spectrum_tag="stable")
    c_x, c_y = growth_envelope(sys_b, constant_noise([0.5], [0.1]))
    assert c_x == pytest.approx(1.0)
    assert c_y == pytest.approx(3.1, abs=1e-9)


def test_growth_envelope_gaussian_not_applicable():
    model = NoiseModel(bias_w=[0.0], amp_w=[0.0], freq_w=0.0, uniform_w=0.1,
                       bias_v=[0.0], amp_v=[0.0], freq_v=0.0, uniform_v=0.1,
                       kind="gaussian")
    with pytest.raises(NotApplicableError):
        growth_envelope(SystemSpec(a=[[0.5]], c=[[1.0]], jordan_r=1, kappa_a=1.0,
                                   spectrum_tag="stable"), model)


@pytest.mark.parametrize("name", system_names())
def test_registry_power_bounds(name):
    system = get_system(name)
    powers = linalg.mat_power_seq(system.a, 200)
    cumulative = 0.0
    for k, mat in enumerate(powers):
        norm = linalg.operator_norm(mat)
        assert norm <= system.kappa_a * (1.0 + k) ** (system.jordan_r - 1) * (1 + 1e-9)
        cumulative += norm
        assert cumulative <= system.kappa_a * (1.0 + k) ** system.jordan_r * (1 + 1e-9)


@pytest.mark.parametrize("name", ["double_integrator", "symmetric_swap", "jordan3"])
def test_pathwise_growth_envelope(name):
    system = get_system(name)
    model = NoiseModel(
        bias_w=np.full(system.n, 0.05), amp_w=np.full(system.n, 0.05), freq_w=0.2,
        uniform_w=0.3, bias_v=np.full(system.p, 0.05), amp_v=np.full(system.p, 0.05),
        freq_v=0.15, uniform_v=0.3, seed=77,
    )
    c_x, c_y = growth_envelope(system, model)
    traj = simulate(system, model, 300)
    ts = np.arange(1, 301)
    state_norm = np.linalg.norm(traj.states[1:], axis=1)
    out_norm = np.linalg.norm(traj.outputs, axis=1)
    assert np.all(state_norm <= c_x * (1.0 + ts) ** system.jordan_r + 1e-12)
    assert np.all(out_norm <= c_y * (1.0 + ts) ** system.jordan_r + 1e-12)


def test_spectral_radius_validation():
    with pytest.raises(ValueError):
        SystemSpec(a=[[1.1]], c=[[1.0]], jordan_r=1, kappa_a=1.0)


def test_declared_metadata_validation():
    # jordan structure with understated block size must be rejected
    spec = SystemSpec(a=[[1.0, 1.0], [0.0, 1.0]], c=[[1.0, 0.0]],
                      jordan_r=1, kappa_a=1.0, spectrum_tag="real_jordan")
    with pytest.raises(ValueError):
        spec.validate_power_growth()


def test_expected_trajectory_identities():
    system = get_system("symmetric_swap")
    model = NoiseModel(bias_w=[0.1, 0.1], amp_w=[0.1, 0.1], freq_w=0.05, uniform_w=0.01,
                       bias_v=[0.1], amp_v=[0.1], freq_v=0.08, uniform_v=0.01, seed=5)
    traj = simulate(system, model, 50)
    for t in range(1, 51):
        np.testing.assert_allclose(
            traj.states[t], system.a @ traj.states[t - 1] + traj.w(t - 1), atol=1e-14
        )
        np.testing.assert_allclose(
            traj.outputs[t - 1], system.c @ traj.states[t] + traj.v(t), atol=1e-14
        )
