"""Exact valuation polygons, Artin-Schreier mollifiers and Frobenius recurrences in characteristic p."""

from .errors import ComputationError, DivisorObstruction, MollyError, ValidationError
from .ffield import AdditivePolynomial, ExtField, FFElem, additive_kernel, embedding, ext_build
from .lrr import (
    LRR,
    RLRR,
    FrobSequence,
    branch_algebraicity_check,
    closed_form,
    extend_recurrence,
    extract_rlrr,
    telescope_identity,
    verify_lrr,
    verify_rlrr,
)
from .mollify import (
    Case,
    ChainReport,
    MollifierReport,
    NegativeCertificate,
    apply_mollifier,
    divisor_chain_mollify,
    mollify_minimal,
    mollify_monomial,
    reduce_step,
)
from . import np
from .np import is_separable_symbol, is_weakly_admissible, npinf, symbol
from .perfring import PuiseuxPoly
from .polygon import (
    Line,
    Polygon,
    complete_valuation_polygon,
    envelope,
    gauss_path_polygon,
    min_with_zero,
    npinf_polygon,
    scale,
    terminal_slope,
)
from .series import (
    FiberSeries,
    as_twist,
    frobenius_section,
    geometric_as_branch,
    hadamard,
    lambda_decompose,
)
from .valuation import INF, ToricValuation, val, val_fraction, value_window

__version__ = "0.1.0"

__all__ = [
    "LRR",
    "RLRR",
    "FrobSequence",
    "branch_algebraicity_check",
    "closed_form",
    "extend_recurrence",
    "extract_rlrr",
    "telescope_identity",
    "verify_lrr",
    "verify_rlrr",
    "Case",
    "ChainReport",
    "MollifierReport",
    "NegativeCertificate",
    "apply_mollifier",
    "divisor_chain_mollify",
    "mollify_minimal",
    "mollify_monomial",
    "reduce_step",
    "Line",
    "Polygon",
    "complete_valuation_polygon",
    "envelope",
    "gauss_path_polygon",
    "min_with_zero",
    "npinf_polygon",
    "scale",
    "terminal_slope",
    "FiberSeries",
    "as_twist",
    "frobenius_section",
    "geometric_as_branch",
    "hadamard",
    "lambda_decompose",
    "ComputationError",
    "DivisorObstruction",
    "MollyError",
    "ValidationError",
    "AdditivePolynomial",
    "ExtField",
    "FFElem",
    "additive_kernel",
    "embedding",
    "ext_build",
    "is_separable_symbol",
    "is_weakly_admissible",
    "np",
    "npinf",
    "symbol",
    "PuiseuxPoly",
    "INF",
    "ToricValuation",
    "val",
    "val_fraction",
    "value_window",
    "__version__",
]
