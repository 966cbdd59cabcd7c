"""Gaussian-state simulation of entangled-probe target detection.

Compares a two-mode-squeezed source read out by a low-gain parametric
amplifier against the optimum classical system (coherent probe + homodyne)
at equal transmitted energy, in a lossy channel buried in thermal background.
Includes a truncated Fock-space brute-force oracle, a synthetic measurement
protocol (BPSK traces, spectral peaks, modulation-amplitude histograms) and a
CLI for reproducing the theory sweeps.
"""

from .gaussian import (
    GaussianState,
    ModeMoments,
    beam_splitter,
    coherent,
    loss_channel,
    mode_moments,
    partial_trace,
    phase_shift,
    photon_mean,
    photon_variance,
    quadrature_stats,
    scale_cross_correlations,
    tensor,
    thermal,
    two_mode_squeeze,
    vacuum,
)
from .fock import (
    FockArray,
    TruncationOverflow,
    apply_quadratic_unitary,
    fock_number_state,
    fock_photon_stats,
    fock_tensor,
    fock_tmss,
    fock_vacuum,
    qi_chain_fock,
)
from .sensing import (
    SnrReport,
    SystemParams,
    ZeroDenominator,
    background_to_return_db,
    ci_snr_asymptotic,
    ci_snr_exact,
    classicality_margin_db,
    electronics_variance,
    opa_input_state,
    qi_output_state,
    qi_receiver_moments,
    qi_snr_asymptotic,
    qi_snr_exact,
    snr_advantage,
)
from .measurement import (
    SpaResult,
    TraceRecord,
    ima_histogram,
    repeat_protocol,
    simulate_trace,
    spectral_peak_snr,
    write_spa_json,
    write_trace_csv,
)

__version__ = "0.1.0"
