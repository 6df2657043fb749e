#!/usr/bin/env python
"""
How long does charging take?

The charged state is only reached asymptotically, so the charging time is
estimated geometrically: the Bures distance between discharged and charged
states divided by the mean speed along the trajectory, measured up to the time
the trajectory is within 1e-6 of the steady state.
"""
import numpy as np

from squeezed_battery import BathSpec, DriveSpec, power_point

res = power_point(DriveSpec(lam=0.6), BathSpec(gamma=1.0, N_B=1.0, N_A=1.0, r_B=0.3, theta_B=1.0),
                  keep_trajectory=True)
sp, traj = res.speed, res.trajectory
print(f"truncation time    {sp.t_trunc:.4f}")
print(f"integral velocity  {sp.V_AB:.6f}")
print(f"2(1 - F)           {sp.ds_AB:.6f}   (Bures length {sp.ds_len:.6f})")
print(f"charging time      {sp.delta_t:.4f}")
print(f"free energy        {res.thermo.delta_F:.6f}")
print(f"average power      {sp.power:.6f}")

# The symplectic eigenvalue does not rise monotonically; it rings while the
# drive rotates the state, which is why the speed takes a modulus.
print("\n     t        nu         v")
for i in np.linspace(0, np.searchsorted(traj.times, sp.t_trunc) - 1, 10).astype(int):
    print(f"  {traj.times[i]:6.2f}  {traj.spectra[i, 0]:.6f}  {sp.v[i]:.6f}")

# The two speed estimates side by side.
for formula in ("paper", "squared_derivative"):
    p = power_point(DriveSpec(lam=0.6), BathSpec(gamma=1.0, N_B=1.0, N_A=1.0, r_B=0.3, theta_B=1.0),
                    formula=formula).speed.power
    print(f"power with {formula:18s} {p:.6f}")
