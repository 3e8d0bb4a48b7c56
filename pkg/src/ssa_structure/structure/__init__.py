from .algebra import FactorBlock, FactorDecomposition, OperatorAlgebra, algebra_closure, wedderburn_blocks
from .araki_lieb import ArakiLiebStructure, araki_lieb_decompose
from .bi_ssa import BiSsaReport, bi_ssa_report
from .channel_analysis import (
    ChannelSaturationReport,
    CoherentSaturationReport,
    HolevoSaturationReport,
    OutputBlock,
    channel_saturation_analyze,
    coherent_saturation_check,
    holevo_saturation_analyze,
)
from .markov import MarkovStructure, fixed_point_decomposition, markov_decompose, petz_markov_error, petz_recovery
from .theorem1 import TheoremOneStructure, theorem1_decompose

__all__ = [
    "FactorBlock",
    "FactorDecomposition",
    "OperatorAlgebra",
    "algebra_closure",
    "wedderburn_blocks",
    "ArakiLiebStructure",
    "araki_lieb_decompose",
    "BiSsaReport",
    "bi_ssa_report",
    "ChannelSaturationReport",
    "CoherentSaturationReport",
    "HolevoSaturationReport",
    "OutputBlock",
    "channel_saturation_analyze",
    "coherent_saturation_check",
    "holevo_saturation_analyze",
    "MarkovStructure",
    "fixed_point_decomposition",
    "markov_decompose",
    "petz_markov_error",
    "petz_recovery",
    "TheoremOneStructure",
    "theorem1_decompose",
]
