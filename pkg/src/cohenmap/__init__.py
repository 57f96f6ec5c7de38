"""Exact operator/phase-space maps for Cohen-class kernels, with a numeric pairing check."""

from .algebra import (
    HBAR,
    I,
    ONE,
    PH,
    PLANCK_H,
    QH,
    ZERO,
    GaussianRational,
    OperatorPoly,
    PhasePoly,
    Scalar,
    ScalarSum,
    adjoint,
    standard_order,
)
from .kernels import (
    TABLE_KERNELS,
    InsufficientOrderError,
    KernelError,
    KernelSeries,
    KernelSpec,
    kernel_from_name,
    taylor,
)
from .parser import ParseError, parse, render
from .transforms import (
    observable_image,
    op_monomial_to_phase,
    phase_monomial_to_op,
    quantize,
    state_from_image,
    state_image,
)

__all__ = [
    "HBAR", "I", "ONE", "PH", "PLANCK_H", "QH", "ZERO",
    "GaussianRational", "OperatorPoly", "PhasePoly", "Scalar", "ScalarSum",
    "adjoint", "standard_order",
    "TABLE_KERNELS", "InsufficientOrderError", "KernelError", "KernelSeries",
    "KernelSpec", "kernel_from_name", "taylor",
    "ParseError", "parse", "render",
    "observable_image", "op_monomial_to_phase", "phase_monomial_to_op",
    "quantize", "state_from_image", "state_image",
]
