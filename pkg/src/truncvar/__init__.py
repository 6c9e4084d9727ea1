"""Partition-free pathwise quantities for sampled càdlàg paths.

Truncated variations, play-operator envelopes, band-crossing counts, the
pathwise quadratic-variation bracket and the associated pathwise integrals.
"""

__version__ = "0.1.0"

from ._accel import BACKEND
from .crossings import CrossingTrace, crossing_counts, crossing_integral, normalized_crossing_curve
from .follmer import (
    IntegralReport,
    QuadraticVariationCurve,
    covariation,
    identity_report,
    integral_X,
    integral_Xprime,
    integral_Xsecond,
    qv_bracket,
    realized_jump_square_sum,
)
from .path import CadlagPath, JumpList, PathError, jumps, left_limit_at, make_path, sup_distance, value_at
from .simulate import SimConfig, correlated_brownian_pair, generate
from .skorohod import EnvelopePath, backlash, envelope_energy, jordan_envelope, sandwich_check
from .stieltjes import (
    IntegrandFunction,
    integration_by_parts_check,
    jump_compensator,
    ls_integral_cadlag,
    ls_integral_left,
)
from .variation import (
    VariationProcess,
    VariationTriple,
    normalized_variation,
    variation_curve,
    variation_oracle_dp,
    variation_triple,
)

__all__ = [
    "BACKEND",
    "CadlagPath",
    "CrossingTrace",
    "EnvelopePath",
    "IntegralReport",
    "IntegrandFunction",
    "JumpList",
    "PathError",
    "QuadraticVariationCurve",
    "SimConfig",
    "VariationProcess",
    "VariationTriple",
    "backlash",
    "correlated_brownian_pair",
    "covariation",
    "crossing_counts",
    "crossing_integral",
    "envelope_energy",
    "generate",
    "identity_report",
    "integral_X",
    "integral_Xprime",
    "integral_Xsecond",
    "integration_by_parts_check",
    "jordan_envelope",
    "jump_compensator",
    "jumps",
    "left_limit_at",
    "ls_integral_cadlag",
    "ls_integral_left",
    "make_path",
    "normalized_crossing_curve",
    "normalized_variation",
    "qv_bracket",
    "realized_jump_square_sum",
    "sandwich_check",
    "sup_distance",
    "value_at",
    "variation_curve",
    "variation_oracle_dp",
    "variation_triple",
]
