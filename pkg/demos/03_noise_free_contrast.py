"""What each estimator needs to move, shown on clean vs disturbed data.

With zero disturbance and filters started from rest, the filtered output
is exactly theta times the filtered regressor at every instant.  The
three rows of the extended regressor then stay proportional to a single
fixed vector, its determinant Delta is identically zero, and the
decoupled update kappa*Delta*(z1 - Delta*theta_hat) never fires: the new
estimator simply holds its initial guess.  The plain gradient estimator
has no such degeneracy and converges.  Any disturbance (or nonzero
filter state) breaks the proportionality and wakes the decoupled
estimator up, which is the regime it is designed for.

Run:  python3 demos/03_noise_free_contrast.py
"""

from dataclasses import replace

import numpy as np

from expdrem import NoiseSpec, run_scenario
from expdrem.cli import preset

base = preset("fig2")
clean = replace(base, noise=NoiseSpec(kind="zero"))

for label, cfg in (("zero disturbance", clean), ("sinusoidal disturbance", base)):
    traj, met = run_scenario(cfg)
    print(f"--- {label} ---")
    print(f"max |Delta| over the run : {np.abs(traj.delta).max():.3e}")
    print(f"new estimate at t_end    : {traj.theta_new[-1]:.6f}  (start 1.8, truth 2)")
    print(f"gradient estimate at t_end: {traj.theta_grad[-1]:.6f}")
    print(f"steady-state max errors  : new {met.max_error_new:.3e}, "
          f"gradient {met.max_error_gradient:.3e}")
    print()

print("The determinant is exactly zero on clean data, so the new estimator")
print("is frozen there by construction; under disturbance it is the more")
print("accurate of the two.")
