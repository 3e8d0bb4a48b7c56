"""Entropy inequalities of finite quantum systems and the structure of states that saturate them."""

from .channels import (
    Ensemble,
    KrausChannel,
    apply,
    average_entropy_report,
    coherent_information,
    complementary,
    exchange_bound_report,
    holevo,
    induced_ensemble,
    omega_state,
)
from .errors import NotSaturatedError, RefinementExhaustedError, StructureError, StructureVerificationError
from .linalg import partial_trace, trace_distance, trace_norm
from .states import (
    GapReport,
    MultipartiteState,
    araki_lieb_gap,
    bi_ssa_gap,
    purification_identities,
    purify,
    ssa_gap_v1,
    ssa_gap_v2,
    von_neumann_entropy,
)
from .structure import (
    araki_lieb_decompose,
    bi_ssa_report,
    channel_saturation_analyze,
    coherent_saturation_check,
    holevo_saturation_analyze,
    markov_decompose,
    petz_markov_error,
    theorem1_decompose,
)

__version__ = "0.1.0"
