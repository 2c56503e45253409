"""The orthogonal DWT three ways: Mallat pyramid, dense matrix, Givens rotations."""
import numpy as np

from qwshrink import EXAMPLE_VECTOR, build_filter, build_wavelet_matrix, givens_factorize, mallat_forward
from qwshrink.givens import givens_apply, rotation_count_report

haar = build_filter("haar")
coeffs = mallat_forward(EXAMPLE_VECTOR, haar, 2)
print("signal              ", EXAMPLE_VECTOR)
print("two-level Haar      ", np.round(coeffs.values, 6))
print("approximation block ", coeffs.approx, " coarsest detail", coeffs.detail(2))

W = build_wavelet_matrix(haar, 8, 2)
print("matrix route agrees:", np.allclose(W.forward(EXAMPLE_VECTOR).values, coeffs.values))
print("||W W^T - I||_F     ", W.orthogonality_residual())

# the same matrix as a product of plane rotations
plan = givens_factorize(W)
print("givens route agrees:", np.allclose(givens_apply(plan, EXAMPLE_VECTOR), coeffs.values))
print("rotations           ", rotation_count_report(plan))

for N in (8, 64, 1024):
    rep = rotation_count_report(givens_factorize(build_wavelet_matrix(build_filter("daub4"), N, 3)))
    print(f"daub4 N={N:5d} J=3: {rep.count:6d} rotations, depth {rep.depth}")
