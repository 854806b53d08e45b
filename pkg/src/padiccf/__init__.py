"""Exact p-adic continued fractions under the Browkin I, II and II* algorithms."""

from .cf_engine import (
    AlgorithmKind,
    Convergents,
    CqState,
    Expansion,
    ReconstructionError,
    Status,
    convergents,
    expand,
    reconstruct,
    step,
)
from .padic_core import (
    InsufficientPrecision,
    PAdicApprox,
    PartialQuotient,
    balanced_digits,
    s_floor,
    t_floor,
    vp_rational,
)
from .quad_field import (
    HenselRoot,
    NoSquareRoot,
    PrecisionError,
    QuadInt,
    conjugate,
    digits_of_quad,
    hensel_sqrt,
    quad_invert,
    quad_sub_rational,
    sqrt_exists,
    vp_quad,
)

__all__ = [
    "AlgorithmKind", "Convergents", "CqState", "Expansion", "HenselRoot", "InsufficientPrecision",
    "NoSquareRoot", "PAdicApprox", "PartialQuotient", "PrecisionError", "QuadInt",
    "ReconstructionError", "Status", "balanced_digits", "conjugate", "convergents",
    "digits_of_quad", "expand", "hensel_sqrt", "quad_invert", "quad_sub_rational",
    "reconstruct", "s_floor", "sqrt_exists", "step", "t_floor", "vp_quad", "vp_rational",
]
