"""The two adaptation laws compared by the simulator.

Both are continuous-time gradient laws.  The proposed one descends the
mixed scalar regression z1 = Delta*theta; the baseline descends the
plain filtered regression y = phi*theta.  Neither is normalized or
projected: the comparison is between the raw laws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass
class EstimatorState:
    """Current estimates and gains for the side-by-side comparison."""

    theta_hat_new: float
    theta_hat_gradient: float
    kappa: float
    gamma_gradient: float

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and self.kappa >= 0.0):
            raise ValueError(f"kappa must be finite and >= 0, got {self.kappa}")
        if not (math.isfinite(self.gamma_gradient) and self.gamma_gradient >= 0.0):
            raise ValueError(
                f"gamma_gradient must be finite and >= 0, got {self.gamma_gradient}")
        if not math.isfinite(self.theta_hat_new):
            raise ValueError("theta_hat_new must be finite")
        if not math.isfinite(self.theta_hat_gradient):
            raise ValueError("theta_hat_gradient must be finite")


def drem_update_derivative(theta_hat: float, delta: float, z1: float,
                           kappa: float) -> float:
    """theta_hat' = kappa*Delta*(z1 - Delta*theta_hat).

    Delta enters multiplicatively, so Delta = 0 freezes the estimate
    rather than dividing by it; with z1 = Delta*theta the error obeys
    e' = -kappa*Delta^2*e and can only shrink.
    """
    return kappa * delta * (z1 - delta * theta_hat)


def plain_gradient_derivative(theta_hat: float, y: float, phi: float,
                              gamma: float) -> float:
    """Classical baseline theta_hat' = gamma*phi*(y - phi*theta_hat)."""
    return gamma * phi * (y - phi * theta_hat)
