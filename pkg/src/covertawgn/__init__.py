"""Covert communication over the unit-noise AWGN channel.

Truncated-Gaussian shell codes, exact Gaussian divergences, KL-budget power
planning, finite-blocklength throughput bounds, and seeded Monte-Carlo
experiments with an optimal-detector adversary.
"""

from .bounds import (
    CSV_COLUMNS,
    AsymptoticSweep,
    ThroughputBounds,
    achievability_bound,
    asymptotic_sweep,
    bounds_csv_text,
    bounds_grid,
    classify_kl_trend,
    converse_bound,
    default_n_grid,
    simplified_asymptotics,
    throughput_bounds,
    v1_dispersion,
    v2_dispersion,
    write_bounds_csv,
)
from .divergences import (
    CovarianceSpec,
    DivergenceReport,
    HWitness,
    IsotropicGaussianPair,
    bits_to_nats,
    chi_sq_mc,
    h_function_witness,
    hellinger_sq_isotropic,
    isotropic_report,
    kl_general_covariance,
    kl_isotropic,
    nats_to_bits,
    tvd_isotropic_exact,
)
from .errors import ConfigError, CovertError, DomainError, InputError, NumericError
from .planner import (
    CovertParams,
    PowerPlan,
    kl_budget_bits,
    nu_lemma_shell,
    plan,
    psi_nec,
    psi_suf,
    solve_exact_power,
    taylor_bracket_check,
)
from .simkit import (
    Codebook,
    DetectionResult,
    Estimate,
    SimulationResult,
    StreamTag,
    bob_decode,
    bob_decode_batch,
    build_codebook,
    empirical_divergences,
    load_codebook,
    save_codebook,
    simulate,
    transmit,
    willie_detect,
)
from .truncgauss import (
    RadialOutputDensity,
    TruncatedGaussianSpec,
    char_function_gaussian,
    output_divergences_quadrature,
    radial_output_density,
    radial_output_log_density,
    read_codebook_file,
    sample_codeword,
    sample_codewords,
    shell_mass,
    sqrt_power_schedule,
    tvd_trunc_vs_full,
    write_codebook_file,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticSweep",
    "CSV_COLUMNS",
    "Codebook",
    "ConfigError",
    "CovarianceSpec",
    "CovertError",
    "CovertParams",
    "DetectionResult",
    "DivergenceReport",
    "DomainError",
    "Estimate",
    "HWitness",
    "InputError",
    "IsotropicGaussianPair",
    "NumericError",
    "PowerPlan",
    "RadialOutputDensity",
    "SimulationResult",
    "StreamTag",
    "ThroughputBounds",
    "TruncatedGaussianSpec",
    "achievability_bound",
    "asymptotic_sweep",
    "bits_to_nats",
    "bob_decode",
    "bob_decode_batch",
    "bounds_csv_text",
    "bounds_grid",
    "build_codebook",
    "char_function_gaussian",
    "chi_sq_mc",
    "classify_kl_trend",
    "converse_bound",
    "default_n_grid",
    "empirical_divergences",
    "h_function_witness",
    "hellinger_sq_isotropic",
    "isotropic_report",
    "kl_budget_bits",
    "kl_general_covariance",
    "kl_isotropic",
    "load_codebook",
    "nats_to_bits",
    "nu_lemma_shell",
    "output_divergences_quadrature",
    "plan",
    "psi_nec",
    "psi_suf",
    "radial_output_density",
    "radial_output_log_density",
    "read_codebook_file",
    "sample_codeword",
    "sample_codewords",
    "save_codebook",
    "shell_mass",
    "simplified_asymptotics",
    "simulate",
    "solve_exact_power",
    "sqrt_power_schedule",
    "taylor_bracket_check",
    "throughput_bounds",
    "transmit",
    "tvd_isotropic_exact",
    "tvd_trunc_vs_full",
    "v1_dispersion",
    "v2_dispersion",
    "willie_detect",
    "write_bounds_csv",
    "write_codebook_file",
]
