"""Finite-blocklength analysis of the two-user Gaussian interference
channel with heterogeneous blocklengths: second-order rates, early
decoding at the short-blocklength receiver, and Monte Carlo validation
of the two-step SIC chain."""

from .budget import (
    BudgetReport,
    ErrorBudget,
    combine,
    split_grid,
    symmetric_split,
    validate_budget,
)
from .channel import (
    BlocklengthConfig,
    ChannelParams,
    ValidationReport,
    effective_sic_snr,
    transmit,
    validate,
)
from .early_decoding import (
    DtBoundTerms,
    EdBound,
    EdFeasibility,
    EdQuery,
    MaxPayload,
    dt_bound_terms,
    ed_bound,
    ed_feasible,
    max_log_m1,
    min_ed_length,
)
from .fbl import (
    gaussian_capacity,
    gaussian_dispersion,
    normal_approx_rate,
    q_func,
    q_inv,
)
from .region import (
    LatencyRow,
    ProfileResult,
    RatePoint,
    RegionSweep,
    SweepConfig,
    first_order_corner,
    latency_sweep,
    rate_profile_max,
    region_sweep,
    second_order_point,
)
from .simulate import (
    Codebook,
    SimExperiment,
    SimResult,
    generate_codebook,
    information_density,
    run_experiment,
    sic_decode_user1,
    sic_decode_user2,
    wilson_interval,
)

__version__ = "0.1.0"

__all__ = [
    "BlocklengthConfig",
    "BudgetReport",
    "ChannelParams",
    "Codebook",
    "DtBoundTerms",
    "EdBound",
    "EdFeasibility",
    "EdQuery",
    "ErrorBudget",
    "LatencyRow",
    "MaxPayload",
    "ProfileResult",
    "RatePoint",
    "RegionSweep",
    "SimExperiment",
    "SimResult",
    "SweepConfig",
    "ValidationReport",
    "combine",
    "dt_bound_terms",
    "ed_bound",
    "ed_feasible",
    "effective_sic_snr",
    "first_order_corner",
    "gaussian_capacity",
    "gaussian_dispersion",
    "generate_codebook",
    "information_density",
    "latency_sweep",
    "max_log_m1",
    "min_ed_length",
    "normal_approx_rate",
    "q_func",
    "q_inv",
    "rate_profile_max",
    "region_sweep",
    "run_experiment",
    "second_order_point",
    "sic_decode_user1",
    "sic_decode_user2",
    "split_grid",
    "symmetric_split",
    "transmit",
    "validate",
    "validate_budget",
    "wilson_interval",
]
