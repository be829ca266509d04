"""Steady-state accuracy of both estimators across the three presets.

Run:  python3 demos/04_preset_comparison.py
"""

from expdrem import run_scenario
from expdrem.cli import PRESET_NAMES, improvement_ratio, preset

header = (f"{'scenario':<8} {'disturbance':<12} {'max err new':>12} "
          f"{'max err grad':>13} {'rms new':>10} {'rms grad':>10} {'ratio':>9}")
print(header)
print("-" * len(header))
for name in PRESET_NAMES:
    cfg = preset(name)
    traj, met = run_scenario(cfg)
    ratio = improvement_ratio(met)
    print(f"{name:<8} {cfg.noise.kind:<12} {met.max_error_new:>12.3e} "
          f"{met.max_error_gradient:>13.3e} {met.rms_error_new:>10.3e} "
          f"{met.rms_error_gradient:>10.3e} "
          f"{'n/a' if ratio is None else format(ratio, '>9.3g')}")

print()
print("ratio = gradient max error / new max error over the last 20% of the run")
