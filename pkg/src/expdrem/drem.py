"""Dynamic regressor extension and mixing for the 3-parameter regression.

Two banks of first-order filters produce delayed copies of the
instantaneous row (q, psi); stacking the original row with the two
filtered copies gives a square system Q_e = Psi_e * Theta in the
parameter powers Theta = (theta, theta^2, theta^3).  Multiplying by the
adjugate of Psi_e decouples it into scalar regressions
z_i = Delta * Theta_i with Delta = det(Psi_e).

Everything here is division free: a vanishing Delta is an informative
output (the downstream estimator simply freezes), not an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .transform import RegressionRow


@dataclass
class DremBank:
    """States of the two extension filter groups.

    Each group low-passes (q, psi1, psi2, psi3) with its own gain, so the
    bank carries 8 states: [q, psi1, psi2, psi3] under beta1 followed by
    the same four under beta2.  Equal gains would make the filtered rows
    asymptotically identical and drive Delta to zero, so they must differ.
    """

    beta1: float
    beta2: float
    states: np.ndarray = field(default_factory=lambda: np.zeros(8))

    def __post_init__(self):
        if not (math.isfinite(self.beta1) and self.beta1 > 0.0):
            raise ValueError(f"beta1 must be finite and > 0, got {self.beta1}")
        if not (math.isfinite(self.beta2) and self.beta2 > 0.0):
            raise ValueError(f"beta2 must be finite and > 0, got {self.beta2}")
        if self.beta1 == self.beta2:
            raise ValueError("beta1 and beta2 must be distinct")
        self.states = np.asarray(self.states, dtype=float)
        if self.states.shape != (8,):
            raise ValueError(f"bank states must have shape (8,), got {self.states.shape}")


@dataclass(frozen=True)
class ExtendedRegression:
    """Square system Q_e = Psi_e * Theta.

    Row 0 of Psi_e is the unfiltered instantaneous row; rows 1 and 2 are
    its beta1- and beta2-filtered copies.
    """

    Q_e: np.ndarray   # shape (3,)
    Psi_e: np.ndarray  # shape (3, 3)


@dataclass(frozen=True)
class MixOutput:
    """Result of adjugate mixing: Z = adj(Psi_e) Q_e and Delta = det(Psi_e).

    If Q_e = Psi_e*Theta holds exactly then Z = Delta*Theta exactly; z1
    is the component that drives the scalar estimator.
    """

    delta: float
    Z: np.ndarray  # shape (3,)
    z1: float


def det3(m) -> float:
    """Closed-form cofactor determinant of a 3x3 matrix."""
    (a, b, c), (d, e, f), (g, h, i) = (m[0], m[1], m[2])
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def adj3(m) -> np.ndarray:
    """Classical adjugate (transposed cofactor matrix) of a 3x3 matrix.

    Satisfies adj(m) @ m = det(m) * I without any division.
    """
    (a, b, c), (d, e, f), (g, h, i) = (m[0], m[1], m[2])
    return np.array([
        [e * i - f * h, c * h - b * i, b * f - c * e],
        [f * g - d * i, a * i - c * g, c * d - a * f],
        [d * h - e * g, b * g - a * h, a * e - b * d],
    ])


def mix(e: ExtendedRegression) -> MixOutput:
    """Decouple the extended regression into scalar form."""
    delta = det3(e.Psi_e)
    Z = adj3(e.Psi_e) @ np.asarray(e.Q_e, dtype=float)
    return MixOutput(delta=float(delta), Z=Z, z1=float(Z[0]))


def drem_bank_derivatives(bank: DremBank, row: RegressionRow) -> np.ndarray:
    """Filter-state derivatives for the 8 bank states driven by the row."""
    u = np.array([row.q, row.psi[0], row.psi[1], row.psi[2]])
    d = np.empty(8)
    d[:4] = bank.beta1 * (u - bank.states[:4])
    d[4:] = bank.beta2 * (u - bank.states[4:])
    return d


def extended_regression(bank: DremBank, row: RegressionRow) -> ExtendedRegression:
    """Stack the instantaneous row with the bank's two filtered copies."""
    s = bank.states
    Q_e = np.array([row.q, s[0], s[4]])
    Psi_e = np.array([
        [row.psi[0], row.psi[1], row.psi[2]],
        [s[1], s[2], s[3]],
        [s[5], s[6], s[7]],
    ])
    return ExtendedRegression(Q_e=Q_e, Psi_e=Psi_e)
