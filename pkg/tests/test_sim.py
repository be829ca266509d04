import math
from dataclasses import replace

import numpy as np
import pytest

from expdrem import (NoiseSpec, RegressorSpec, ScenarioConfig, SystemState,
                     TruthSpec, initial_state, per_step_noise, rk4_step,
                     run_scenario, system_derivative)
from expdrem.drem import DremBank, extended_regression, mix
from expdrem.sim import (IDX_BANK, IDX_DELTA_F, IDX_PHI_F, IDX_THETA_GRAD,
                         IDX_THETA_NEW, IDX_Y, STATE_DIM, TRAJECTORY_COLUMNS)
from expdrem.transform import RegressionRow


def make_cfg(**over):
    base = dict(
        truth=TruthSpec(theta=2.0, theta_hat0=1.8),
        regressor=RegressorSpec(kind="sinusoid"),
        noise=NoiseSpec(kind="sinusoid", amplitude=0.5, angular_frequency=10.0),
        kappa=100.0, gamma=10.0, t_end=2.0, dt=1e-3, sample_stride=10)
    base.update(over)
    return ScenarioConfig(**base)


@pytest.mark.parametrize("bad", [
    dict(dt=0.0), dict(dt=-1e-4), dict(t_end=0.0005), dict(k=0.0),
    dict(beta1=-3.0), dict(beta1=5.0, beta2=5.0), dict(kappa=-1.0),
    dict(gamma=math.nan), dict(sample_stride=0),
    dict(steady_state_fraction=0.0), dict(steady_state_fraction=1.0),
])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        make_cfg(**bad)


def test_state_array_round_trip():
    arr = np.arange(STATE_DIM, dtype=float)
    s = SystemState.from_array(arr)
    assert s.y == 0.0 and s.phi_f == 1.0 and s.delta_f == 2.0
    np.testing.assert_array_equal(s.drem_states, np.arange(3.0, 11.0))
    assert s.theta_hat_new == 11.0 and s.theta_hat_gradient == 12.0
    np.testing.assert_array_equal(s.as_array(), arr)


def test_initial_state():
    cfg = make_cfg()
    s0 = initial_state(cfg)
    assert s0.shape == (STATE_DIM,)
    np.testing.assert_array_equal(s0[:11], np.zeros(11))
    assert s0[IDX_THETA_NEW] == 1.8
    assert s0[IDX_THETA_GRAD] == 1.8


def test_origin_is_equilibrium_with_zero_input():
    # at t=0 the sinusoid regressor and zero noise leave every subsystem at rest
    cfg = make_cfg(noise=NoiseSpec(kind="zero"))
    d = system_derivative(cfg, 0.0, np.zeros(STATE_DIM))
    np.testing.assert_array_equal(d, np.zeros(STATE_DIM))


def test_derivative_wiring():
    """Spot-check each block of the stacked derivative on a crafted state."""
    cfg = make_cfg(noise=NoiseSpec(kind="constant", constant_value=0.5),
                   k=2.0, beta1=3.0, beta2=5.0, kappa=7.0, gamma=11.0)
    s = np.linspace(0.1, 1.3, STATE_DIM)
    t = 0.4
    d = system_derivative(cfg, t, s)

    phi_bar = math.sin(t)
    y_bar = phi_bar * 2.0 + 0.5
    assert d[IDX_Y] == pytest.approx(2.0 * (y_bar - s[IDX_Y]), rel=1e-14)
    assert d[IDX_PHI_F] == pytest.approx(2.0 * (phi_bar - s[IDX_PHI_F]), rel=1e-14)
    assert d[IDX_DELTA_F] == pytest.approx(2.0 * (0.5 - s[IDX_DELTA_F]), rel=1e-14)

    # bank block: beta * (current row signal - state), row rebuilt independently
    from expdrem.transform import FilteredPoint, regression_row
    row = regression_row(FilteredPoint(
        y=s[IDX_Y], phi=s[IDX_PHI_F],
        y_dot=2.0 * (y_bar - s[IDX_Y]), phi_dot=2.0 * (phi_bar - s[IDX_PHI_F])))
    u = np.array([row.q, *row.psi])
    np.testing.assert_allclose(d[3:7], 3.0 * (u - s[3:7]), rtol=1e-13)
    np.testing.assert_allclose(d[7:11], 5.0 * (u - s[7:11]), rtol=1e-13)

    mixed = mix(extended_regression(DremBank(3.0, 5.0, s[IDX_BANK]), row))
    expect_new = 7.0 * mixed.delta * (mixed.z1 - mixed.delta * s[IDX_THETA_NEW])
    assert d[IDX_THETA_NEW] == pytest.approx(expect_new, rel=1e-13)
    expect_grad = 11.0 * s[IDX_PHI_F] * (s[IDX_Y] - s[IDX_PHI_F] * s[IDX_THETA_GRAD])
    assert d[IDX_THETA_GRAD] == pytest.approx(expect_grad, rel=1e-13)


def test_rk4_scalar_exponential_oracle():
    got = rk4_step(lambda t, s: -s, 0.0, 1.0, 0.1)
    assert got == pytest.approx(0.9048375, abs=1e-12)  # 1 - h + h^2/2 - h^3/6 + h^4/24
    assert abs(got - math.exp(-0.1)) < 1e-7


def test_rk4_observed_order_at_least_four():
    def integrate(h):
        s, n = 1.0, int(round(1.0 / h))
        for i in range(n):
            s = rk4_step(lambda t, x: -x, i * h, s, h)
        return abs(s - math.exp(-1.0))

    errs = [integrate(h) for h in (0.1, 0.05, 0.025, 0.0125)]
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(3)]
    assert min(orders) >= 4.0


def test_rk4_vector_state():
    # solve s' = A s for the rotation generator; norm is preserved
    A = np.array([[0.0, -1.0], [1.0, 0.0]])
    s = np.array([1.0, 0.0])
    h = 1e-3
    for i in range(1000):
        s = rk4_step(lambda t, x: A @ x, i * h, s, h)
    assert np.hypot(*s) == pytest.approx(1.0, abs=1e-12)
    assert s[0] == pytest.approx(math.cos(1.0), abs=1e-9)


def test_per_step_noise_smooth_kinds_none():
    assert per_step_noise(NoiseSpec(kind="zero"), 100, 1e-3) is None
    assert per_step_noise(NoiseSpec(kind="sinusoid", amplitude=0.5), 100, 1e-3) is None
    assert per_step_noise(NoiseSpec(kind="constant", constant_value=0.1), 100, 1e-3) is None


def test_per_step_noise_hold_structure():
    spec = NoiseSpec(kind="uniform", lo=-0.5, hi=0.5, hold_step=5e-3, seed=4)
    held = per_step_noise(spec, n_steps=100, dt=1e-3)
    assert held.shape == (101,)
    # constant within each 5-step hold, changing between most holds
    for i in range(0, 100, 5):
        assert np.unique(held[i:i + 5]).size == 1
    assert np.unique(held).size > 1


def test_per_step_noise_refinement_invariant():
    """Halving dt must not change the underlying piecewise signal."""
    spec = NoiseSpec(kind="uniform", lo=-0.5, hi=0.5, hold_step=4e-3, seed=8)
    coarse = per_step_noise(spec, n_steps=250, dt=4e-4)
    fine = per_step_noise(spec, n_steps=500, dt=2e-4)
    np.testing.assert_array_equal(coarse, fine[::2])


def test_backends_agree_smooth_noise():
    cfg = make_cfg()
    tf, mf = run_scenario(cfg, backend="fast")
    tr, mr = run_scenario(cfg, backend="reference")
    assert len(tf) == len(tr)
    scale = np.maximum(1.0, np.abs(tr.data))
    assert (np.abs(tf.data - tr.data) / scale).max() <= 1e-12
    assert (np.abs(tf.states - tr.states) /
            np.maximum(1.0, np.abs(tr.states))).max() <= 1e-12
    assert mf.diverged == mr.diverged == False


def test_backends_agree_held_uniform_noise():
    cfg = make_cfg(noise=NoiseSpec(kind="uniform", lo=-0.5, hi=0.5,
                                   hold_step=5e-3, seed=2))
    tf, _ = run_scenario(cfg, backend="fast")
    tr, _ = run_scenario(cfg, backend="reference")
    scale = np.maximum(1.0, np.abs(tr.data))
    assert (np.abs(tf.data - tr.data) / scale).max() <= 1e-12
    # both backends saw the identical held disturbance
    np.testing.assert_array_equal(tf.delta_bar, tr.delta_bar)


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        run_scenario(make_cfg(), backend="gpu")


def test_sampling_grid():
    cfg = make_cfg(t_end=1.0, dt=1e-3, sample_stride=10)
    traj, _ = run_scenario(cfg)
    assert len(traj) == 101
    np.testing.assert_allclose(traj.t, np.arange(101) * 1e-2, atol=1e-12)
    assert traj.t[-1] == pytest.approx(1.0)


def test_final_instant_recorded_for_uneven_stride():
    cfg = make_cfg(t_end=1.0, dt=1e-3, sample_stride=7)
    traj, _ = run_scenario(cfg)
    # 143 stride hits (0, 7, ..., 994) plus the final step 1000
    assert len(traj) == 144
    assert traj.t[-1] == pytest.approx(1.0)
    assert traj.t[-2] == pytest.approx(0.994)


def test_stride_one_records_every_step():
    cfg = make_cfg(t_end=0.05, dt=1e-3, sample_stride=1)
    traj, _ = run_scenario(cfg)
    assert len(traj) == 51


def test_run_is_deterministic():
    cfg = make_cfg(noise=NoiseSpec(kind="uniform", lo=-0.5, hi=0.5,
                                   hold_step=1e-3, seed=6))
    t1, _ = run_scenario(cfg)
    t2, _ = run_scenario(cfg)
    assert np.array_equal(t1.data, t2.data)
    assert np.array_equal(t1.states, t2.states)


def test_divergence_truncates_and_flags():
    # gradient gain far beyond the explicit-integrator stability limit
    cfg = make_cfg(gamma=1e8, t_end=1.0, dt=1e-3, sample_stride=1)
    traj_f, met_f = run_scenario(cfg, backend="fast")
    traj_r, met_r = run_scenario(cfg, backend="reference")
    assert met_f.diverged and met_r.diverged
    assert met_f.diverged_step == met_r.diverged_step
    assert met_f.diverged_step >= 0
    assert len(traj_f) < 1001
    assert math.isnan(met_f.max_error_new) or met_f.max_error_new >= 0.0
    # recorded part is still finite and identical across backends
    assert np.isfinite(traj_f.data).all()
    scale = np.maximum(1.0, np.abs(traj_r.data))
    assert (np.abs(traj_f.data - traj_r.data) / scale).max() <= 1e-10


def test_diverged_metrics_are_nan_when_window_empty():
    cfg = make_cfg(gamma=1e8, t_end=1.0, dt=1e-3)
    _, met = run_scenario(cfg)
    assert met.diverged
    assert math.isnan(met.max_error_new)
    assert math.isnan(met.rms_error_gradient)


def test_zero_gains_freeze_estimates_end_to_end():
    cfg = make_cfg(kappa=0.0, gamma=0.0)
    traj, _ = run_scenario(cfg)
    np.testing.assert_array_equal(traj.theta_new, np.full(len(traj), 1.8))
    np.testing.assert_array_equal(traj.theta_grad, np.full(len(traj), 1.8))


def test_metrics_window_and_aliases():
    cfg = make_cfg(t_end=2.0, steady_state_fraction=0.25)
    traj, met = run_scenario(cfg)
    w = traj.t >= 1.5
    assert met.max_error_new == pytest.approx(np.abs(traj.e_new[w]).max(), rel=1e-12)
    assert met.rms_error_gradient == pytest.approx(
        float(np.sqrt(np.mean(traj.e_grad[w] ** 2))), rel=1e-12)
    assert met.eps0_new == met.max_error_new
    assert met.eps0_gradient == met.max_error_gradient
    assert met.assumptions.n_samples > 0


def test_error_columns_consistent():
    cfg = make_cfg()
    traj, _ = run_scenario(cfg)
    np.testing.assert_allclose(traj.e_new, 2.0 - traj.theta_new, rtol=0, atol=0)
    np.testing.assert_allclose(traj.e_grad, 2.0 - traj.theta_grad, rtol=0, atol=0)


def test_column_accessor_matches_properties():
    traj, _ = run_scenario(make_cfg())
    for name in TRAJECTORY_COLUMNS:
        np.testing.assert_array_equal(traj.column(name),
                                      traj.data[:, TRAJECTORY_COLUMNS.index(name)])
    np.testing.assert_array_equal(traj.column("Delta"), traj.delta)
    np.testing.assert_array_equal(traj.psi, traj.data[:, 8:11])


def test_noise_free_identities_along_trajectory():
    """Zero disturbance keeps both polynomial and mixed regressions exact."""
    cfg = make_cfg(noise=NoiseSpec(kind="zero"), t_end=5.0, dt=1e-3,
                   sample_stride=5)
    traj, _ = run_scenario(cfg)
    Theta = np.array([2.0, 4.0, 8.0])
    resid = np.abs(traj.q - traj.psi @ Theta)
    assert (resid <= 1e-8 * np.maximum(1.0, np.abs(traj.q))).all()
    for i in range(len(traj)):
        row = RegressionRow(q=traj.q[i], psi=traj.psi[i])
        bank = DremBank(cfg.beta1, cfg.beta2, traj.states[i, IDX_BANK])
        mixed = mix(extended_regression(bank, row))
        scale = max(1.0, float(np.abs(mixed.Z).max()), abs(mixed.delta) * 8.0)
        assert np.abs(mixed.Z - mixed.delta * Theta).max() <= 1e-7 * scale
        assert mixed.delta == traj.delta[i]
        assert mixed.z1 == pytest.approx(traj.z1[i], abs=1e-12)
