"""Secrecy capacities and coding simulations for broadcast channels with keys."""

from .capacity import (
    CapacityResult,
    FmConsistencyReport,
    GridConfig,
    HybridRatePoint,
    MartonBreakdown,
    best_marton_rate,
    capacity_deterministic,
    capacity_equal,
    capacity_middle,
    capacity_reversely_degraded,
    capacity_weakest,
    fm_consistency_check,
    hybrid_budgets,
    hybrid_closed_form_total,
    hybrid_rate_oracle,
    marton_rate,
    uv_outer_bound,
    weakest_alpha_equalizer,
    weakest_alpha_form,
    wiretap_key_capacity,
)
from .channels import (
    BroadcastSpec,
    LessNoisyVerdict,
    Regime,
    RegimeTag,
    check_degraded,
    check_less_noisy,
    classify,
    is_deterministic,
)
from .errors import (
    DomainError,
    PreconditionError,
    RelabelingError,
    ResourceBudgetError,
    SecbcError,
    ValidationError,
)
from .gaussian import (
    GaussianResult,
    GaussianSpec,
    SweepRow,
    awgn_mi,
    gauss_capacity,
    gauss_middle,
    gauss_strong,
    gauss_weak,
    sweep,
)
from .probcore import (
    Channel,
    Distribution,
    JointDistribution,
    binary_entropy,
    bsc,
    compose,
    conditional_mutual_information,
    entropy,
    identity_channel,
    joint_from,
    mutual_information,
    point_mass,
    simplex_grid,
    simplex_lattice,
    uniform,
)
from .simulate import (
    Codebook,
    ErrorEstimate,
    SimReport,
    build_otp_codebook,
    build_superposition_codebook,
    build_wiretap_codebook,
    exact_leakage,
    hybrid_sizes,
    otp_decrypt,
    otp_encrypt,
    simulate_hybrid_middle,
    simulate_otp_equal_outputs,
    simulate_weakest_scheme,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
