"""Ancilla flags, smooth ancilla rotations and two hardware surrogates for dephasing."""
import math

import numpy as np

from qwshrink import (
    EXAMPLE_VECTOR,
    HardwareModel,
    ancilla_flag_experiment,
    expectation_encode,
    gamma_from_idle,
    idle_time_for_retention,
    randomized_z_shrink,
    rescale_to_unit,
    smooth_ancilla_experiment,
)

d, _ = rescale_to_unit(EXAMPLE_VECTOR)
flags = ancilla_flag_experiment(d, 0.4, shots=1024, seed=0)
print("d          ", d)
print("P(flag)    ", flags.probabilities)
print("<Z> ancilla", flags.z_expectation)

smooth = smooth_ancilla_experiment(d, shots=1024, seed=0)
print("\nsin^2(pi|d|/2)", np.round(smooth.exact, 4))
print("estimated     ", np.round(smooth.probabilities, 4))
print("shrunk        ", np.round(smooth.shrunk, 4))

hw = HardwareModel(T2=100.0)
print("\nidle time for retention s, then the dephasing it accumulates:")
for s in (0.9, 0.7, 0.5, 0.1):
    t = idle_time_for_retention(s, hw)
    print(f"s={s:.1f}: t={t:7.3f}, gamma={gamma_from_idle(t, hw):.4f}, 1-s^2={1 - s * s:.4f}")

print("\nrandomized Z flips, <X> = 0.8:")
for gamma in (0.0, 0.25, 0.5):
    est = randomized_z_shrink(expectation_encode(0.8), gamma, 100_000, seed=3)
    print(f"gamma={gamma:.2f}: estimate {est:+.4f}, expected {(1 - 2 * gamma) * 0.8:+.4f}, 4/sqrt(shots)={4 / math.sqrt(1e5):.4f}")
