"""Exogenous signals for identification runs.

Generates the regressor phi_bar(t), the measurement disturbance
delta_bar(t), and the raw measurement y_bar(t) = phi_bar(t)*theta +
delta_bar(t).  Also provides a sampled sanity check of the two
magnitude assumptions the identification method relies on:
|delta_bar| <= 1 everywhere, and |delta_bar| < |phi_bar*theta| most of
the time.

All evaluators accept a scalar time or an ndarray of times and are
pure: identical specs (and seed) give identical samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

REGRESSOR_KINDS = ("sinusoid", "constant")
NOISE_KINDS = ("zero", "sinusoid", "constant", "uniform")

# Number of uniform draws generated per cached RNG chunk.  Each chunk is
# derived from (seed, chunk index) alone, so draws depend only on the
# hold-interval index, never on evaluation order.
_CHUNK = 4096


@dataclass(frozen=True)
class RegressorSpec:
    """Shape of the known regressor signal phi_bar(t).

    sinusoid: offset + amplitude*sin(angular_frequency*t)
    constant: offset + amplitude
    """

    kind: str = "sinusoid"
    amplitude: float = 1.0
    angular_frequency: float = 1.0
    offset: float = 0.0

    def __post_init__(self):
        if self.kind not in REGRESSOR_KINDS:
            raise ValueError(f"unknown regressor kind {self.kind!r}")
        for name in ("amplitude", "angular_frequency", "offset"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"regressor {name} must be finite, got {value}")
        if self.angular_frequency < 0.0:
            raise ValueError("regressor angular_frequency must be >= 0")


@dataclass(frozen=True)
class NoiseSpec:
    """Declarative description of the disturbance delta_bar(t).

    kinds:
      zero      -- identically 0
      sinusoid  -- amplitude*sin(angular_frequency*t)
      constant  -- constant_value
      uniform   -- sample-and-hold: a fresh draw from [lo, hi) every
                   hold_step seconds, deterministic given seed

    Every validated spec satisfies sup_t |delta_bar(t)| <= 1; the
    constructor rejects anything louder.
    """

    kind: str = "zero"
    amplitude: float = 0.0
    angular_frequency: float = 0.0
    constant_value: float = 0.0
    lo: float = 0.0
    hi: float = 0.0
    hold_step: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        for name in ("amplitude", "angular_frequency", "constant_value",
                     "lo", "hi", "hold_step"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"noise {name} must be finite, got {value}")
        if self.kind == "uniform":
            if self.lo > self.hi:
                raise ValueError(f"noise lo={self.lo} must not exceed hi={self.hi}")
            if self.hold_step <= 0.0:
                raise ValueError("noise hold_step must be > 0")
        sup = self.sup_abs()
        if sup > 1.0:
            raise ValueError(
                f"noise magnitude bound violated: sup|delta_bar| = {sup} > 1")

    def sup_abs(self) -> float:
        """Tight upper bound on |delta_bar(t)| over all t."""
        if self.kind == "zero":
            return 0.0
        if self.kind == "sinusoid":
            return abs(self.amplitude)
        if self.kind == "constant":
            return abs(self.constant_value)
        return max(abs(self.lo), abs(self.hi))


@dataclass(frozen=True)
class TruthSpec:
    """The unknown constant parameter and the estimators' starting guess."""

    theta: float = 2.0
    theta_hat0: float = 1.8

    def __post_init__(self):
        if not math.isfinite(float(self.theta)):
            raise ValueError(f"theta must be finite, got {self.theta}")
        if not math.isfinite(float(self.theta_hat0)):
            raise ValueError(f"theta_hat0 must be finite, got {self.theta_hat0}")


@dataclass(frozen=True)
class AssumptionReport:
    """Sampled check of the disturbance-magnitude assumptions.

    bound_satisfied: sampled sup|delta_bar| <= 1
    violation_fraction: fraction of samples where the disturbance is at
        least as loud as the useful signal |phi_bar*theta| (only counted
        where the disturbance is nonzero).
    """

    sup_abs_noise: float
    bound_satisfied: bool
    violation_fraction: float
    n_samples: int


@lru_cache(maxsize=None)
def _uniform_chunk(seed: int, lo: float, hi: float, chunk: int) -> np.ndarray:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(chunk,))
    return np.random.default_rng(ss).uniform(lo, hi, _CHUNK)


def held_uniform_values(spec: NoiseSpec, interval_index) -> np.ndarray:
    """Draws held on the given hold-interval indices (int array in, floats out).

    Draw n depends only on (seed, lo, hi, n), so any access pattern sees
    the same piecewise-constant signal.
    """
    idx = np.atleast_1d(np.asarray(interval_index, dtype=np.int64))
    chunks = idx // _CHUNK
    offsets = idx % _CHUNK
    out = np.empty(idx.shape, dtype=float)
    for c in np.unique(chunks):
        mask = chunks == c
        out[mask] = _uniform_chunk(spec.seed, spec.lo, spec.hi, int(c))[offsets[mask]]
    return out


def eval_regressor(spec: RegressorSpec, t):
    """phi_bar(t); t may be a scalar or ndarray, t >= 0."""
    if isinstance(t, np.ndarray):
        if spec.kind == "sinusoid":
            return spec.offset + spec.amplitude * np.sin(spec.angular_frequency * t)
        return np.full_like(t, spec.offset + spec.amplitude, dtype=float)
    if spec.kind == "sinusoid":
        return spec.offset + spec.amplitude * math.sin(spec.angular_frequency * t)
    return spec.offset + spec.amplitude


def eval_noise(spec: NoiseSpec, t):
    """delta_bar(t); t may be a scalar or ndarray, t >= 0."""
    if isinstance(t, np.ndarray):
        if spec.kind == "zero":
            return np.zeros_like(t, dtype=float)
        if spec.kind == "sinusoid":
            return spec.amplitude * np.sin(spec.angular_frequency * t)
        if spec.kind == "constant":
            return np.full_like(t, spec.constant_value, dtype=float)
        idx = np.floor(t / spec.hold_step).astype(np.int64)
        return held_uniform_values(spec, idx)
    if spec.kind == "zero":
        return 0.0
    if spec.kind == "sinusoid":
        return spec.amplitude * math.sin(spec.angular_frequency * t)
    if spec.kind == "constant":
        return spec.constant_value
    return float(held_uniform_values(spec, int(math.floor(t / spec.hold_step)))[0])


def eval_measurement(reg: RegressorSpec, noise: NoiseSpec, truth: TruthSpec, t):
    """y_bar(t) = phi_bar(t)*theta + delta_bar(t)."""
    return eval_regressor(reg, t) * truth.theta + eval_noise(noise, t)


def check_assumptions(reg: RegressorSpec, noise: NoiseSpec, truth: TruthSpec,
                      horizon: float, sample_step: float) -> AssumptionReport:
    """Sample |delta_bar| against |phi_bar*theta| over [0, horizon].

    Advisory only: reports how often the disturbance drowns the useful
    signal (near regressor zero crossings this happens even for tame
    scenarios), and whether the unit magnitude bound held.  Never raises.
    """
    if horizon <= 0.0:
        raise ValueError("horizon must be > 0")
    if sample_step <= 0.0:
        raise ValueError("sample_step must be > 0")
    n = int(math.floor(horizon / sample_step)) + 1
    t = np.arange(n) * sample_step
    d = np.abs(eval_noise(noise, t))
    s = np.abs(eval_regressor(reg, t) * truth.theta)
    violations = (d >= s) & (d > 0.0)
    sup = float(d.max()) if n else 0.0
    return AssumptionReport(
        sup_abs_noise=sup,
        bound_satisfied=bool(sup <= 1.0),
        violation_fraction=float(np.mean(violations)) if n else 0.0,
        n_samples=n,
    )
