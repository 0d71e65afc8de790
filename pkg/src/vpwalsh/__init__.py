"""Dyadic harmonic analysis: Walsh-Paley transforms, de la Vallee Poussin
means under arbitrary window sequences, block polynomials with exact
certificates, and executable divergence plans."""

from .blockpoly import (
    BlockPolynomial,
    OrderWitness,
    ScaledValue,
    build,
    eval_pointwise,
    in_agreement_set,
    lattice_frequency,
    select_order,
    verify_certificate,
    window_collapse_check,
)
from .config import RunConfig
from .divergence import (
    DivergenceCertificate,
    DivergencePlan,
    certify_divergence,
    choose_levels,
    choose_widths,
    eval_series,
    level_weight,
    membership_grid_integral,
    membership_report,
)
from .dyadic import DyadicPoint, binary_digits, dyadic_sum, rademacher, top_bit
from .errors import (
    BudgetError,
    PreconditionError,
    VerificationError,
    VpWalshError,
    WindowInvariantError,
)
from .orlicz import OrliczFunction, orlicz_from_spec
from .surd import SurdSum
from .vpmeans import (
    VPMeanResult,
    cesaro_maximal,
    vp_maximal,
    vp_mean,
    vp_mean_curve,
    weak_type_profile,
    weak_type_sup,
)
from .walsh import (
    GridFunction,
    SpectrumVector,
    forward_fwht,
    inverse_fwht,
    partial_sum,
    partial_sum_all,
    spectrum,
    walsh_eval,
)
from .windows import WindowSequence, window_from_spec

__version__ = "0.1.0"
