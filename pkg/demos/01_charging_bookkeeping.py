#!/usr/bin/env python
"""
Charging a thermal battery with a weak squeezing drive.

The battery starts in equilibrium with a bath at occupation N_A = 1 and is
charged by a squeezing drive while it relaxes into a bath with N_B = 1. We
follow the energy ledger of the stroke and watch the efficiency approach one
half as the drive is made weaker.
"""
import numpy as np

from squeezed_battery import BathSpec, DriveSpec, thermo_point

bath = BathSpec(gamma=1.0, N_B=1.0, N_A=1.0)

# One charging stroke at moderate drive: the stored energy is pure work,
# because the two baths share a temperature and no net heat flows.
rep = thermo_point(DriveSpec(mu=1.0, lam=0.5), bath).thermo
print("lambda = 0.5")
for key in ("E_A", "E_B", "delta_E", "delta_W", "delta_Q", "delta_S", "delta_F", "eta"):
    print(f"  {key:8s} {getattr(rep, key): .6f}")

# Weakening the drive: the efficiency tends to 1/2.
print("\n  lambda        eta")
for lam in np.geomspace(0.5, 1e-3, 6):
    eta = thermo_point(DriveSpec(lam=lam), bath).thermo.eta
    print(f"  {lam:8.4f}   {eta:.6f}")

# A hotter common temperature stores more energy but less of it is free.
print("\n  N_A = N_B    delta_E     eta   (lambda = 0.5)")
for N in (0.0, 0.5, 1.0, 2.0, 3.0):
    r = thermo_point(DriveSpec(lam=0.5), BathSpec(gamma=1.0, N_B=N, N_A=N)).thermo
    print(f"  {N:6.2f}     {r.delta_E:8.4f}   {r.eta:.4f}")
