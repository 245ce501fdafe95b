"""Belief-propagation MIMO detection with relaxed factor-graph degree.

Detectors: exhaustive ML, MMSE, ordered MMSE-SIC, standard max-log BP, and
relaxed BP (configurable number of explicit interferer edges per message,
optionally seeded by MMSE pseudo-priors), plus a reproducible Monte Carlo
BER/AMI harness and closed-form operation counts.
"""
from .channel import (
    NoiseSpec,
    SystemDims,
    bit_to_symbol_index,
    demodulate,
    generate_bits,
    modulate,
    sample_channel,
    snr_to_noise_variance,
    transmit,
)
from .detectors import (
    DetectionResult,
    DetectorSpec,
    MessageState,
    alpha_update,
    bit_gains,
    build_edge_sets,
    detect,
    interference_mean,
    interference_variance,
    log_likelihood_D,
    message_history,
    mmse_filter,
    mmse_prior_llr,
    rbp_D,
    rbp_beta_update,
    sbp_beta_update,
    select_edges,
    soft_output,
)
from .errors import (
    DimensionTooLargeError,
    IoFailure,
    LengthMismatchError,
    SingularMatrixError,
)
from .metrics import BerAccumulator, OpCounts, ami, ber_accumulate, complexity_counts
from .numerics import gram, hermitian_solve, max_log
from .presets import Preset, get_preset
from .simulator import (
    SweepConfig,
    SweepRecord,
    read_csv,
    run_convergence,
    run_point,
    run_sweep,
    write_csv,
)

__version__ = "0.1.0"

__all__ = [
    "NoiseSpec", "SystemDims", "bit_to_symbol_index", "demodulate",
    "generate_bits", "modulate", "sample_channel", "snr_to_noise_variance",
    "transmit",
    "DetectionResult", "DetectorSpec", "MessageState", "alpha_update",
    "bit_gains", "build_edge_sets", "detect", "interference_mean",
    "interference_variance", "log_likelihood_D", "message_history",
    "mmse_filter", "mmse_prior_llr", "rbp_D", "rbp_beta_update",
    "sbp_beta_update", "select_edges", "soft_output",
    "DimensionTooLargeError", "IoFailure", "LengthMismatchError",
    "SingularMatrixError",
    "BerAccumulator", "OpCounts", "ami", "ber_accumulate", "complexity_counts",
    "gram", "hermitian_solve", "max_log",
    "Preset", "get_preset",
    "SweepConfig", "SweepRecord", "read_csv", "run_convergence", "run_point",
    "run_sweep", "write_csv",
]
