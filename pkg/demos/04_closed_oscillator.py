#!/usr/bin/env python
"""
Without a bath: the three regimes of the driven oscillator.

Below threshold (mu > lambda) the energy oscillates, at threshold it grows
quadratically, above threshold exponentially. The numbers compare the
propagated covariance matrix with the closed-form energy.
"""
from squeezed_battery import closed_delta_E
from squeezed_battery.sweep import closed_report

for mu, lam, label in ((1.0, 0.5, "mu > lambda"), (1.0, 1.0, "mu = lambda"), (0.5, 1.0, "mu < lambda")):
    rows = closed_report(mu, lam, N_A=0.5, t_max=5.0, steps=501)
    worst = max(r["abs_diff"] for r in rows)
    print(f"{label}: worst |numeric - analytic| = {worst:.2e}")
    for r in rows[::100]:
        print(f"   t = {r['t']:4.1f}   dE = {r['delta_E_numeric']:12.6f}")

# The bath-free channel picture: squeezing a thermal state by r stores
# mu (1 + 2 N_A) sinh(r)^2, whatever the rotation angle.
print("\n   r     dE (N_A = 1)")
for r in (0.0, 0.25, 0.5, 1.0, 1.5):
    print(f"  {r:4.2f}   {closed_delta_E(r, 1.0, 1.0):.6f}")
