"""inscap: binary insertion channels — capacity expansion, exact oracle, estimators."""

__version__ = "0.1.0"

from .core import (
    BitSeq,
    ChannelSpec,
    Model,
    RunDecomposition,
    RunVector,
    binary_entropy,
    entropy_of_distribution,
    runs_of,
)
from .channels import (
    InsertionRealization,
    ProcessDelta,
    apply_realization,
    enumerate_realizations,
    modify_realization,
    perturb_realization,
    sample_realization,
)
from .series import (
    SeriesValue,
    capacity_approx,
    capacity_formula,
    constant_G,
    curve,
    sum_S1,
    sum_S2,
    sum_S3,
)
from .oracle import (
    DecompositionReport,
    JointTable,
    ambiguity_count,
    build_joint,
    exact_rate,
    likelihood,
)
from .estimators import (
    CaseTally,
    RateEstimate,
    RunStats,
    estimate_ab_ambiguity,
    estimate_capped_flip_density,
    estimate_hk_contribution,
    estimate_run_stats,
    estimate_zv_pmf,
    sample_capped_process,
)

__all__ = [name for name in dir() if not name.startswith("_")]
