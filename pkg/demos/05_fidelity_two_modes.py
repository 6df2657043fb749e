#!/usr/bin/env python
"""
Fidelity between Gaussian states, one mode and several.

The single-mode closed form and the general n-mode expression must agree on
one mode, multiply over independent modes, and ignore any common symplectic
transformation.
"""
import numpy as np

from squeezed_battery import apply_symplectic, direct_sum, fidelity_multimode, fidelity_single_mode, thermal_state
from squeezed_battery.gaussian import random_state, random_symplectic

rng = np.random.default_rng(1)
a, b = random_state(1, rng), random_state(1, rng)
print(f"single-mode formula  {fidelity_single_mode(a, b).fidelity:.12f}")
print(f"n-mode formula       {fidelity_multimode(a, b).fidelity:.12f}")

c, d = random_state(1, rng), random_state(1, rng)
joint = fidelity_multimode(direct_sum(a, c), direct_sum(b, d)).fidelity
print(f"\ntwo independent modes {joint:.12f}")
print(f"product of the two    {fidelity_single_mode(a, b).fidelity * fidelity_single_mode(c, d).fidelity:.12f}")

S = random_symplectic(2, rng)
moved = fidelity_multimode(apply_symplectic(direct_sum(a, c), S), apply_symplectic(direct_sum(b, d), S))
print(f"after a common symplectic map {moved.fidelity:.12f}")

print("\nvacuum against thermal N: F = 1/sqrt(N + 1)")
for N in (0.5, 1.0, 3.0):
    print(f"  N = {N:3.1f}   {fidelity_single_mode(thermal_state(0), thermal_state(N)).fidelity:.6f}"
          f"   {1 / np.sqrt(N + 1):.6f}")
