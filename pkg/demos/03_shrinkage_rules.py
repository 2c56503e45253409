"""Shrinkage rules on the rescaled axis and their quantum realizations."""
import numpy as np

from qwshrink import EXAMPLE_VECTOR, MODES, ShrinkagePolicy, rescale_to_unit, shrink_coefficients
from qwshrink.policies import gamma_of, ideal_shrink

d, rec = rescale_to_unit(EXAMPLE_VECTOR)
print("rescaled by", rec.scale, "->", d)

hard = ShrinkagePolicy("hard_gamma", lam=0.4)
for mode in MODES:
    out, _ = shrink_coefficients(d, hard, mode)
    print(f"hard(0.4) via {mode:20s}", np.round(out, 12))

sampled, _ = shrink_coefficients(d, hard, shots=100_000, seed=1)
print("hard(0.4), 1e5 shots          ", np.round(sampled, 4))

x = np.linspace(-1, 1, 9)
print("\nx        ", x)
for pol in (ShrinkagePolicy("cos4_gamma"), ShrinkagePolicy("cos_gamma", alpha=4.0),
            ShrinkagePolicy("exp_gamma", alpha=2.0)):
    print(f"{pol.kind:9s} gamma", np.round(gamma_of(pol, x), 4))
print("power 1.8", np.round(ideal_shrink(ShrinkagePolicy("power_law", exponent=1.8), x), 4))
print("soft 0.3 ", np.round(ideal_shrink(ShrinkagePolicy("classical_soft", lam=0.3), x), 4))
