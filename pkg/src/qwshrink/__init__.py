"""Wavelet shrinkage realized as coefficientwise quantum channels, simulated with numpy."""

from .channels import (
    DilationUnitary,
    KrausChannel,
    RetentionVector,
    WeakMeasurement,
    amplitude_damping,
    ancilla_dilation,
    ancilla_shrink_channel,
    ancilla_shrink_dilation,
    apply_channel,
    feedback_map,
    identity_channel,
    kraus_from_dilation,
    mixing_first_order,
    mixing_unitary,
    one_excitation_decode,
    one_excitation_encode,
    phase_damping,
    phase_flip,
    retention_for_multiplier,
    weak_measurement,
)
from .errors import InvariantViolation
from .givens import GivensPlan, Rotation, givens_apply, givens_factorize, givens_replay, rotation_count_report
from .pipeline import (
    MODES,
    EXAMPLE_VECTOR,
    HardwareModel,
    NoisySignalSpec,
    add_noise,
    ancilla_flag_experiment,
    ancilla_zero_diagonal,
    best_classical_lambda,
    denoise_classical,
    denoise_quantum,
    doppler,
    gamma_from_idle,
    idle_time_for_retention,
    measure_expectation_x,
    metrics,
    randomized_z_shrink,
    shrink_coefficients,
    smooth_ancilla_experiment,
    substream,
)
from .policies import ShrinkagePolicy, gamma_of, ideal_shrink, multiplier_of, soft_threshold
from .states import (
    DensityMatrix,
    PauliString,
    StateVector,
    amplitude_decode,
    amplitude_encode,
    bloch,
    expect,
    expectation_encode,
    hybrid_decode,
    hybrid_encode,
    partial_trace,
    phase_encode,
    rescale_to_unit,
)
from .wavelets import (
    CoefficientVector,
    OrthogonalTransform,
    WaveletFilter,
    build_filter,
    build_wavelet_matrix,
    mallat_forward,
    mallat_inverse,
)

__version__ = "0.1.0"
