"""Exponential re-parameterization of the filtered regression.

Exponentiating the filtered measurement, x = e^y with y = phi*theta +
delta, and truncating the e^delta Taylor series after the quadratic
term turns the noisy scalar regression into a clean polynomial one,

    q = psi1*theta + psi2*theta^2 + psi3*theta^3,

whose signals (q, psi1, psi2, psi3) are built purely from the filtered
measurement y, the filtered regressor phi, and their analytic
derivatives.  The disturbance no longer appears as an additive term;
its residual influence is confined to the dropped cubic-and-higher
Taylor terms, which the unit magnitude bound keeps small.

Two algebraically equivalent constructions are provided: the compact
product form used by the simulator, and a chain-rule reference built
from the intermediate polynomials (alpha, tau, rho).  Tests hold them
to each other to guard against transcription drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Inputs beyond this make e^y meaningless in double precision long before
# overflow; treat the run as diverged instead of producing infinities.
EXP_INPUT_LIMIT = 500.0


class DivergedError(RuntimeError):
    """A state left the numerically meaningful region (|y| > 500 or non-finite)."""


@dataclass(frozen=True)
class FilteredPoint:
    """One instant of the filtered signals and their exact derivatives.

    y_dot and phi_dot must come from the filter realizations
    (k*(input - state)), never from finite differencing.
    """

    y: float
    phi: float
    y_dot: float
    phi_dot: float

    def __post_init__(self):
        for v in (self.y, self.phi, self.y_dot, self.phi_dot):
            if not math.isfinite(v):
                raise DivergedError("non-finite filtered signal")


@dataclass(frozen=True)
class RegressionRow:
    """Instantaneous sample (q, psi) of the polynomial regression."""

    q: float
    psi: np.ndarray  # shape (3,)

    def __post_init__(self):
        object.__setattr__(self, "psi", np.asarray(self.psi, dtype=float))
        if self.psi.shape != (3,):
            raise ValueError(f"psi must have shape (3,), got {self.psi.shape}")


def exp_operator(y: float) -> float:
    """x = e^y, guarded against numerically diverged inputs."""
    if not math.isfinite(y):
        raise DivergedError(f"exp operator input is not finite: {y}")
    if abs(y) > EXP_INPUT_LIMIT:
        raise DivergedError(
            f"exp operator input |y| = {abs(y)} exceeds {EXP_INPUT_LIMIT}; run diverged")
    return math.exp(y)


def alpha_tau_rho(y: float, phi: float) -> tuple[float, float, float]:
    """The three polynomial coefficients of the truncated expansion.

    alpha = 1 + y + y^2/2, tau = -phi - phi*y, rho = phi^2/2, so that
    x = (alpha + tau*theta + rho*theta^2) * e^(phi*theta) up to the
    dropped cubic terms.
    """
    return 1.0 + y + 0.5 * y * y, -phi - phi * y, 0.5 * phi * phi


def regression_row(p: FilteredPoint) -> RegressionRow:
    """Build (q, psi1, psi2, psi3) in the cancelled product form.

    With x = e^y and x' = y'*x:

        q    =  y^2*y'*x / 2
        psi1 =  phi*y*y'*x + y^2*phi'*x / 2
        psi2 = -phi^2*y'*x / 2 - phi*y*phi'*x
        psi3 =  phi^2*phi'*x / 2
    """
    x = exp_operator(p.y)
    y, phi, yd, phd = p.y, p.phi, p.y_dot, p.phi_dot
    q = 0.5 * y * y * yd * x
    psi1 = phi * y * yd * x + 0.5 * y * y * phd * x
    psi2 = -0.5 * phi * phi * yd * x - phi * y * phd * x
    psi3 = 0.5 * phi * phi * phd * x
    return RegressionRow(q=q, psi=np.array([psi1, psi2, psi3]))


def regression_row_reference(p: FilteredPoint) -> RegressionRow:
    """Chain-rule construction of the same row, kept as a cross-check.

    Differentiates (alpha, tau, rho) explicitly and assembles

        q    = alpha*x' - alpha'*x
        psi1 = tau'*x - tau*x' + alpha*phi'*x
        psi2 = rho'*x - rho*x' + tau*phi'*x
        psi3 = rho*phi'*x

    without performing the product-form cancellations.
    """
    x = exp_operator(p.y)
    y, phi, yd, phd = p.y, p.phi, p.y_dot, p.phi_dot
    alpha, tau, rho = alpha_tau_rho(y, phi)
    alpha_dot = yd + y * yd
    tau_dot = -phd - phd * y - phi * yd
    rho_dot = phi * phd
    x_dot = yd * x
    q = alpha * x_dot - alpha_dot * x
    psi1 = tau_dot * x - tau * x_dot + alpha * phd * x
    psi2 = rho_dot * x - rho * x_dot + tau * phd * x
    psi3 = rho * phd * x
    return RegressionRow(q=q, psi=np.array([psi1, psi2, psi3]))
