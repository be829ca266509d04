"""Full closed-loop simulation of the identification comparison.

One augmented ODE carries every signal on a shared time base: the three
measurement filters, the eight extension-filter states, and both
parameter estimates (13 states total).  A fixed-step RK4 integrator
drives it; sample-and-hold disturbances are frozen over each step so
every stage of a step sees one consistent draw, while smooth
disturbances are evaluated exactly at the stage times.

Two backends produce identical trajectories: a compiled kernel used for
production runs, and a plain-Python loop built from the module-level
functions, kept as a cross-check and for small test scenarios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .drem import DremBank, drem_bank_derivatives, extended_regression, mix
from .estimators import drem_update_derivative, plain_gradient_derivative
from .lti import FirstOrderFilter, filter_derivative
from .signals import (AssumptionReport, NoiseSpec, RegressorSpec, TruthSpec,
                      check_assumptions, eval_noise, eval_regressor,
                      held_uniform_values)
from .transform import (EXP_INPUT_LIMIT, DivergedError, FilteredPoint,
                        regression_row)

STATE_DIM = 13
IDX_Y = 0
IDX_PHI_F = 1
IDX_DELTA_F = 2
IDX_BANK = slice(3, 11)
IDX_THETA_NEW = 11
IDX_THETA_GRAD = 12

TRAJECTORY_COLUMNS = (
    "t", "y_bar", "phi_bar", "delta_bar", "y", "phi", "delta_f",
    "q", "psi1", "psi2", "psi3", "Delta", "z1",
    "theta_new", "theta_grad", "e_new", "e_grad",
)


@dataclass
class SystemState:
    """Named view of the 13-component integration state."""

    y: float
    phi_f: float
    delta_f: float
    drem_states: np.ndarray
    theta_hat_new: float
    theta_hat_gradient: float

    @classmethod
    def from_array(cls, arr) -> "SystemState":
        arr = np.asarray(arr, dtype=float)
        return cls(y=arr[IDX_Y], phi_f=arr[IDX_PHI_F], delta_f=arr[IDX_DELTA_F],
                   drem_states=arr[IDX_BANK],
                   theta_hat_new=arr[IDX_THETA_NEW],
                   theta_hat_gradient=arr[IDX_THETA_GRAD])

    def as_array(self) -> np.ndarray:
        out = np.empty(STATE_DIM)
        out[IDX_Y] = self.y
        out[IDX_PHI_F] = self.phi_f
        out[IDX_DELTA_F] = self.delta_f
        out[IDX_BANK] = self.drem_states
        out[IDX_THETA_NEW] = self.theta_hat_new
        out[IDX_THETA_GRAD] = self.theta_hat_gradient
        return out


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one run needs: signals, gains, and integration grid."""

    truth: TruthSpec
    regressor: RegressorSpec
    noise: NoiseSpec
    k: float = 1.0
    beta1: float = 3.0
    beta2: float = 5.0
    kappa: float = 1e8
    gamma: float = 1e4
    t_end: float = 50.0
    dt: float = 1e-4
    sample_stride: int = 100
    steady_state_fraction: float = 0.2

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k > 0.0):
            raise ValueError(f"filter gain k must be finite and > 0, got {self.k}")
        for name in ("beta1", "beta2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be finite and > 0, got {v}")
        if self.beta1 == self.beta2:
            raise ValueError("beta1 and beta2 must be distinct")
        for name in ("kappa", "gamma"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be finite and > 0, got {self.dt}")
        if not (math.isfinite(self.t_end) and self.t_end > self.dt):
            raise ValueError(f"t_end must exceed dt, got t_end={self.t_end} dt={self.dt}")
        if not (isinstance(self.sample_stride, int) and self.sample_stride >= 1):
            raise ValueError(f"sample_stride must be an integer >= 1, got {self.sample_stride}")
        if not 0.0 < self.steady_state_fraction < 1.0:
            raise ValueError(
                f"steady_state_fraction must lie in (0, 1), got {self.steady_state_fraction}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass(frozen=True)
class Trajectory:
    """Sampled time series of every simulated and derived signal.

    `data` holds the TRAJECTORY_COLUMNS in order, one row per sample;
    `states` holds the raw 13-component integration state at the same
    instants so derived quantities can be reconstructed independently.
    """

    data: np.ndarray    # (n_samples, 17)
    states: np.ndarray  # (n_samples, 13)

    def column(self, name: str) -> np.ndarray:
        return self.data[:, TRAJECTORY_COLUMNS.index(name)]

    def __len__(self) -> int:
        return self.data.shape[0]

    @property
    def t(self): return self.data[:, 0]
    @property
    def y_bar(self): return self.data[:, 1]
    @property
    def phi_bar(self): return self.data[:, 2]
    @property
    def delta_bar(self): return self.data[:, 3]
    @property
    def y(self): return self.data[:, 4]
    @property
    def phi(self): return self.data[:, 5]
    @property
    def delta_f(self): return self.data[:, 6]
    @property
    def q(self): return self.data[:, 7]
    @property
    def psi(self): return self.data[:, 8:11]
    @property
    def delta(self): return self.data[:, 11]
    @property
    def z1(self): return self.data[:, 12]
    @property
    def theta_new(self): return self.data[:, 13]
    @property
    def theta_grad(self): return self.data[:, 14]
    @property
    def e_new(self): return self.data[:, 15]
    @property
    def e_grad(self): return self.data[:, 16]


@dataclass(frozen=True)
class RunMetrics:
    """Steady-state error summary over the trailing window of a run.

    eps0_* is the realized disturbance-induced error bound: the largest
    |theta - theta_hat| seen in the window (identical to max_error_*,
    kept under its own name because it is the quantity the method's
    accuracy claim is about).
    """

    max_error_new: float
    rms_error_new: float
    max_error_gradient: float
    rms_error_gradient: float
    eps0_new: float
    eps0_gradient: float
    diverged: bool
    diverged_step: int  # -1 when the run completed
    assumptions: AssumptionReport


def system_derivative(cfg: ScenarioConfig, t: float, s, noise_value=None) -> np.ndarray:
    """Right-hand side of the augmented ODE at (t, s).

    Wires the modules together: exogenous signals -> measurement filters
    -> polynomial row -> extension bank -> mixing -> both estimator laws.
    Pure in (t, s); pass noise_value to pin the disturbance lookup (used
    to hold sample-and-hold noise fixed across the stages of one step).
    """
    if isinstance(s, np.ndarray):
        s = SystemState.from_array(s)
    phi_bar = eval_regressor(cfg.regressor, t)
    delta_bar = eval_noise(cfg.noise, t) if noise_value is None else noise_value
    y_bar = phi_bar * cfg.truth.theta + delta_bar

    y_dot = filter_derivative(FirstOrderFilter(cfg.k, s.y), y_bar)
    phi_dot = filter_derivative(FirstOrderFilter(cfg.k, s.phi_f), phi_bar)
    delta_f_dot = filter_derivative(FirstOrderFilter(cfg.k, s.delta_f), delta_bar)

    row = regression_row(FilteredPoint(y=s.y, phi=s.phi_f, y_dot=y_dot, phi_dot=phi_dot))
    bank = DremBank(cfg.beta1, cfg.beta2, s.drem_states)
    bank_dot = drem_bank_derivatives(bank, row)
    mixed = mix(extended_regression(bank, row))

    out = np.empty(STATE_DIM)
    out[IDX_Y] = y_dot
    out[IDX_PHI_F] = phi_dot
    out[IDX_DELTA_F] = delta_f_dot
    out[IDX_BANK] = bank_dot
    out[IDX_THETA_NEW] = drem_update_derivative(
        s.theta_hat_new, mixed.delta, mixed.z1, cfg.kappa)
    out[IDX_THETA_GRAD] = plain_gradient_derivative(
        s.theta_hat_gradient, s.y, s.phi_f, cfg.gamma)
    return out


def rk4_step(f, t, s, dt):
    """One classical 4-stage Runge-Kutta step of s' = f(t, s).

    Generic over scalar or ndarray state; f must return the same shape.
    """
    hdt = 0.5 * dt
    k1 = f(t, s)
    k2 = f(t + hdt, s + hdt * k1)
    k3 = f(t + hdt, s + hdt * k2)
    k4 = f(t + dt, s + dt * k3)
    return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def initial_state(cfg: ScenarioConfig) -> np.ndarray:
    """Zero filter states; both estimates start at theta_hat0."""
    s0 = np.zeros(STATE_DIM)
    s0[IDX_THETA_NEW] = cfg.truth.theta_hat0
    s0[IDX_THETA_GRAD] = cfg.truth.theta_hat0
    return s0


def per_step_noise(noise: NoiseSpec, n_steps: int, dt: float):
    """Frozen disturbance value for each step of the grid (uniform kind only).

    Entry i is the held draw in effect at t = i*dt; entry n_steps covers
    the final sample instant.  Returns None for smooth noise kinds, which
    are evaluated exactly at stage times instead.  When hold_step is an
    integer multiple of dt the hold-interval index is computed in integer
    arithmetic so grid refinement cannot shift draw boundaries.
    """
    if noise.kind != "uniform":
        return None
    i = np.arange(n_steps + 1, dtype=np.int64)
    ratio = noise.hold_step / dt
    m = int(round(ratio))
    if m >= 1 and abs(ratio - m) <= 1e-9 * m:
        idx = i // m
    else:
        idx = np.floor(i * dt / noise.hold_step).astype(np.int64)
    return held_uniform_values(noise, idx)


def _record_row(cfg: ScenarioConfig, t: float, s: np.ndarray, delta_bar: float) -> np.ndarray:
    """One trajectory row (TRAJECTORY_COLUMNS order) from the raw state."""
    theta = cfg.truth.theta
    phi_bar = eval_regressor(cfg.regressor, t)
    y_bar = phi_bar * theta + delta_bar
    y_dot = cfg.k * (y_bar - s[IDX_Y])
    phi_dot = cfg.k * (phi_bar - s[IDX_PHI_F])
    row = regression_row(FilteredPoint(y=s[IDX_Y], phi=s[IDX_PHI_F],
                                       y_dot=y_dot, phi_dot=phi_dot))
    mixed = mix(extended_regression(DremBank(cfg.beta1, cfg.beta2, s[IDX_BANK]), row))
    thn = s[IDX_THETA_NEW]
    thg = s[IDX_THETA_GRAD]
    return np.array([
        t, y_bar, phi_bar, delta_bar, s[IDX_Y], s[IDX_PHI_F], s[IDX_DELTA_F],
        row.q, row.psi[0], row.psi[1], row.psi[2], mixed.delta, mixed.z1,
        thn, thg, theta - thn, theta - thg,
    ])


def _run_reference(cfg: ScenarioConfig, n_steps: int, s0: np.ndarray, noise_held):
    """Plain-Python twin of the compiled kernel (identical sampling rules)."""
    stride = cfg.sample_stride
    dt = cfg.dt
    s = s0.copy()
    rows, states = [], []
    diverged_step = -1
    for i in range(n_steps + 1):
        t = i * dt
        if not (np.isfinite(s).all() and abs(s[IDX_Y]) <= EXP_INPUT_LIMIT):
            diverged_step = i
            break
        nv = float(noise_held[i]) if noise_held is not None else None
        delta_bar = nv if nv is not None else eval_noise(cfg.noise, t)
        if i % stride == 0 or i == n_steps:
            rows.append(_record_row(cfg, t, s, delta_bar))
            states.append(s.copy())
        if i == n_steps:
            break
        try:
            s = rk4_step(lambda tt, ss: system_derivative(cfg, tt, ss, noise_value=nv),
                         t, s, dt)
        except DivergedError:
            diverged_step = i
            break
    data = np.vstack(rows) if rows else np.empty((0, len(TRAJECTORY_COLUMNS)))
    st = np.vstack(states) if states else np.empty((0, STATE_DIM))
    return data, st, diverged_step


def _run_fast(cfg: ScenarioConfig, n_steps: int, s0: np.ndarray, noise_held):
    from ._kernel import REG_CODES, NOISE_CODES, integrate

    stride = cfg.sample_stride
    max_samples = (n_steps // stride) + 2
    data = np.empty((max_samples, len(TRAJECTORY_COLUMNS)))
    states = np.empty((max_samples, STATE_DIM))
    held = noise_held if noise_held is not None else np.empty(0)
    n_rec, diverged_step = integrate(
        REG_CODES[cfg.regressor.kind],
        cfg.regressor.amplitude, cfg.regressor.angular_frequency, cfg.regressor.offset,
        NOISE_CODES[cfg.noise.kind],
        cfg.noise.amplitude, cfg.noise.angular_frequency, cfg.noise.constant_value,
        held,
        cfg.truth.theta, cfg.k, cfg.beta1, cfg.beta2, cfg.kappa, cfg.gamma,
        cfg.dt, n_steps, stride, s0.copy(), data, states)
    return data[:n_rec].copy(), states[:n_rec].copy(), diverged_step


def run_scenario(cfg: ScenarioConfig, backend: str = "fast"):
    """Integrate a scenario and summarize it.

    Returns (Trajectory, RunMetrics).  A diverged run (non-finite state
    or |y| beyond the exp guard) yields the partial trajectory up to the
    offending step with the diverged flag set; it never raises.

    backend "fast" uses the compiled kernel; "reference" runs the
    module-composed Python loop (slow, for validation).
    """
    if backend not in ("fast", "reference"):
        raise ValueError(f"unknown backend {backend!r}")
    n_steps = cfg.n_steps
    if n_steps < 1:
        raise ValueError("t_end/dt must give at least one step")
    s0 = initial_state(cfg)
    noise_held = per_step_noise(cfg.noise, n_steps, cfg.dt)
    runner = _run_fast if backend == "fast" else _run_reference
    # overflow past the finiteness guard is reported as divergence, not a warning
    with np.errstate(over="ignore", invalid="ignore"):
        data, states, diverged_step = runner(cfg, n_steps, s0, noise_held)
    traj = Trajectory(data=data, states=states)
    report = check_assumptions(cfg.regressor, cfg.noise, cfg.truth,
                               horizon=cfg.t_end,
                               sample_step=max(cfg.dt, cfg.t_end / 1e5))
    return traj, _metrics(cfg, traj, diverged_step, report)


def _metrics(cfg: ScenarioConfig, traj: Trajectory, diverged_step: int,
             report: AssumptionReport) -> RunMetrics:
    window = traj.t >= (1.0 - cfg.steady_state_fraction) * cfg.t_end
    if window.any():
        e_new = np.abs(traj.e_new[window])
        e_grad = np.abs(traj.e_grad[window])
        max_new, rms_new = float(e_new.max()), float(np.sqrt(np.mean(e_new ** 2)))
        max_grad, rms_grad = float(e_grad.max()), float(np.sqrt(np.mean(e_grad ** 2)))
    else:
        max_new = rms_new = max_grad = rms_grad = math.nan
    return RunMetrics(
        max_error_new=max_new, rms_error_new=rms_new,
        max_error_gradient=max_grad, rms_error_gradient=rms_grad,
        eps0_new=max_new, eps0_gradient=max_grad,
        diverged=diverged_step >= 0, diverged_step=diverged_step,
        assumptions=report,
    )
