"""First-order low-pass filters, realized in state space.

The transfer function g/(p + g) with unit DC gain becomes the scalar ODE
state' = g*(input - state).  The same expression is therefore both the
right-hand side handed to the integrator and the exact time derivative
of the filtered signal, which is what lets the transform stage consume
analytic derivatives instead of numerically differentiated ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass
class FirstOrderFilter:
    """Unit-DC-gain low-pass with bandwidth `gain` (1/seconds) and current output `state`."""

    gain: float
    state: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.gain) and self.gain > 0.0):
            raise ValueError(f"filter gain must be finite and > 0, got {self.gain}")
        if not math.isfinite(self.state):
            raise ValueError(f"filter state must be finite, got {self.state}")


def filter_derivative(f: FirstOrderFilter, u: float) -> float:
    """Rate of change of the filter output, gain*(u - state).

    Doubles as the exact derivative of the filtered signal at this
    instant, e.g. y' = k*(y_bar - y) for the measurement filter.
    """
    return f.gain * (u - f.state)
