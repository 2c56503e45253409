"""Dephasing shrinks coherence; an ancilla dilation realizes the same map unitarily."""
import numpy as np

from qwshrink import channels as ch
from qwshrink.states import DensityMatrix, bloch, expectation_encode, to_density

rho = to_density(expectation_encode(0.8))
print("input Bloch vector", bloch(rho))
for gamma in (0.0, 0.36, 0.75, 1.0):
    out = ch.phase_damping(gamma)(rho)
    print(f"phase damping gamma={gamma:.2f}: <X> = {bloch(out).x:+.4f}  (sqrt(1-gamma) * 0.8 = {np.sqrt(1 - gamma) * 0.8:+.4f})")

# retention s keeps the |0> ancilla branch with probability s and scales <X> by 2s - 1
s = ch.retention_for_multiplier(0.6)
dil = ch.ancilla_shrink_dilation(s)
print("\nretention for multiplier 0.6:", s)
print("dilated <X>:", bloch(dil.apply(rho)).x)
kraus = ch.kraus_from_dilation(dil)
print("Kraus operators read off the dilation:")
for K in kraus.ops:
    print(np.round(K, 4))

# a random retention vector on two system qubits
rng = np.random.default_rng(1)
dil2 = ch.ancilla_dilation(rng.random(4), 2, signs=[1, -1, 1, -1])
rho2 = DensityMatrix(np.eye(4) / 4 + 0.05 * np.ones((4, 4)))
diff = np.abs(dil2.apply(rho2).rho - ch.kraus_from_dilation(dil2)(rho2).rho).max()
print("\ndilate-trace vs Kraus sum, max difference:", diff)

# neighbour mixing on the one-excitation subspace
d = np.array([0.3, -0.5, 0.8, 0.1])
psi = ch.one_excitation_encode(d)
U = ch.mixing_unitary(0.01, 4)
mixed = ch.one_excitation_decode(type(psi)(U @ psi.amps, norm=psi.norm, length=4))
print("\nmixed coefficients     ", np.round(mixed, 5))
print("first-order prediction ", np.round(ch.mixing_first_order(d, 0.01), 5))
