#!/usr/bin/env python
"""
Where to point the bath squeezing.

With a squeezed bath (r_B = 0.5) the phase theta_B decides whether the bath
helps or fights the drive. Scanning theta_B shows that the phase which
maximises the efficiency is not the one which maximises the charging power.
"""
import math

import numpy as np

from squeezed_battery import BathSpec, DriveSpec, power_point
from squeezed_battery.sweep import load_preset, optimize_theta

drive = DriveSpec(lam=0.5)
print(" theta_B/pi      eta      power")
for theta in np.linspace(0, 2 * math.pi, 9)[:-1]:
    res = power_point(drive, BathSpec(gamma=1.0, N_B=1.0, N_A=1.0, r_B=0.5, theta_B=theta))
    print(f"   {theta / math.pi:5.2f}    {res.thermo.eta:.4f}    {res.speed.power:.4f}")

# Grid search plus golden-section refinement over the landscape presets.
theta_eta, eta = optimize_theta(load_preset("fig3a"), "eta")
print(f"\nbest efficiency {eta:.4f} at theta_B = {theta_eta / math.pi:.4f} pi")
theta_p, power = optimize_theta(load_preset("fig5a"), "power", grid_steps=36)
print(f"best power      {power:.4f} at theta_B = {theta_p / math.pi:.4f} pi")
