"""Algebra behind the method, shown numerically.

The measured regression y = phi * theta is pushed through x = e^y with a
second-order Taylor truncation, which yields a cubic regression
q = psi1*theta + psi2*theta^2 + psi3*theta^3.  Three copies of that row
(the instantaneous one plus two low-pass filtered ones) are mixed by the
adjugate into per-power equations Z_i = Delta * theta^i without any
division.

Run:  python3 demos/02_transform_identities.py
"""

import numpy as np

from expdrem import (FilteredPoint, adj3, det3, mix, regression_row,
                     regression_row_reference)
from expdrem.drem import ExtendedRegression

theta = 2.0
rng = np.random.default_rng(7)

print("=== cubic regression identity q = psi . (theta, theta^2, theta^3) ===")
for _ in range(4):
    phi, phi_dot = rng.uniform(-1, 1, 2)
    # consistent data: y and its derivative track phi * theta exactly
    p = FilteredPoint(y=phi * theta, phi=phi,
                      y_dot=phi_dot * theta, phi_dot=phi_dot)
    row = regression_row(p)
    recon = row.psi @ [theta, theta**2, theta**3]
    print(f"q={row.q:+.9f}  psi.Theta={recon:+.9f}  residual={row.q - recon:+.2e}")

print()
print("=== two independent derivations of the row agree ===")
p = FilteredPoint(y=0.5, phi=0.3, y_dot=0.1, phi_dot=0.2)
a = regression_row(p)
b = regression_row_reference(p)
print("product form   :", a.q, a.psi)
print("chain-rule form:", b.q, b.psi)

print()
print("=== division-free decoupling: Z = adj(Psi_e) Q_e = Delta * Theta ===")
Theta = np.array([theta, theta**2, theta**3])
Psi_e = rng.uniform(-2, 2, (3, 3))
ext = ExtendedRegression(Q_e=Psi_e @ Theta, Psi_e=Psi_e)
out = mix(ext)
print("Delta          :", out.delta, " (= det:", det3(Psi_e), ")")
print("Z              :", out.Z)
print("Delta * Theta  :", out.delta * Theta)
print("adj(M) M       :\n", adj3(Psi_e) @ Psi_e)
print("det(M) I       :\n", det3(Psi_e) * np.eye(3))
