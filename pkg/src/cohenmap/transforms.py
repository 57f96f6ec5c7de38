"""The four maps between operators and phase-space functions for a kernel f.

Two monomial engines do all the work.  Both are parameterized by a series
``s`` and consume only origin derivatives of 1/s:

* ``op_monomial_to_phase(n, m, s)`` gives the phase-space image of
  ``qh^n ph^m`` under the kernel s (the inverse of quantization with s).
* ``phase_monomial_to_op(n, m, s)`` gives the operator of ``q^n p^m``
  under quantization with the kernel ``1/s(-theta, -tau)``.

Every public map picks the engine and the series from a small table, so a
kernel zero away from the origin never meets a division.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Optional, Union

from .algebra import (
    PLANCK_H,
    ZERO,
    GaussianRational,
    OperatorPoly,
    PhasePoly,
    ScalarSum,
    i_power,
    standard_order,
    sum_polys,
)
from .kernels import (
    InsufficientOrderError,
    KernelSeries,
    KernelSpec,
    inverse_tau_derivative,
    invert_series,
    taylor,
)

QP_ORDER = "qp_order"
PQ_ORDER = "pq_order"


@dataclass(frozen=True)
class MapDirection:
    variant: str  # "op_to_phase" | "phase_to_op"
    series_role: str  # "state_map" | "observable_map"
    include_h_factor: bool

    def __post_init__(self):
        if self.variant not in ("op_to_phase", "phase_to_op"):
            raise ValueError(f"unknown map variant {self.variant!r}")
        if self.series_role not in ("state_map", "observable_map"):
            raise ValueError(f"unknown series role {self.series_role!r}")
        if self.include_h_factor and self.series_role != "state_map":
            raise ValueError("the h factor belongs to the density-operator maps only")


# rho -> F, F -> rho, G -> g, g -> G
STATE_FORWARD = MapDirection("op_to_phase", "state_map", True)
STATE_INVERSE = MapDirection("phase_to_op", "state_map", True)
OBSERVABLE_FORWARD = MapDirection("op_to_phase", "observable_map", False)
OBSERVABLE_INVERSE = MapDirection("phase_to_op", "observable_map", False)


def reflect_series(s: KernelSeries) -> KernelSeries:
    """f(theta, tau) -> f(-theta, -tau)."""
    out = {
        (j, k): (-c if (j + k) % 2 else c) for (j, k), c in s.coeffs.items()
    }
    return KernelSeries(s.order, out, s.marginal_flag)


def dual_series(s: KernelSeries) -> KernelSeries:
    """1/f(-theta, -tau), the kernel of the dual representation."""
    return reflect_series(invert_series(s))


def _check_order(n: int, m: int, s: KernelSeries) -> None:
    if n < 0 or m < 0:
        raise ValueError("monomial exponents must be nonnegative")
    if s.order < n + m:
        raise InsufficientOrderError(
            f"monomial of degree {n + m} needs kernel series order >= {n + m}, have {s.order}"
        )


def _dhat_derivative(s: KernelSeries, r: int, k: int) -> ScalarSum:
    """k-th theta-derivative at 0 of D_r(theta)/f(theta,0)^(r+1), i.e. of (-1)^r/r! d^r(1/f)/dtau^r."""
    series = inverse_tau_derivative(s, r)
    c = series[k] * factorial(k)
    if not c:
        return c
    return c * (Fraction((-1) ** r, factorial(r)))


def op_monomial_to_phase(n: int, m: int, s: KernelSeries, ordered: str = QP_ORDER) -> PhasePoly:
    """Phase-space image of ``qh^n ph^m`` (or ``ph^m qh^n``) for the kernel series s."""
    _check_order(n, m, s)
    if ordered not in (QP_ORDER, PQ_ORDER):
        raise ValueError(f"unknown operator order {ordered!r}")
    half_hbar = Fraction(1, 2) if ordered == QP_ORDER else Fraction(-1, 2)
    out: dict[tuple[int, int], ScalarSum] = {}
    for l in range(m + 1):
        for j in range(l + 1):
            top = n - l + j
            if top < 0:
                # more tau-derivatives than powers of (u - tau*hbar/2)
                continue
            falling = Fraction(factorial(n), factorial(top))
            base = (
                Fraction((-1) ** (m - j) * factorial(m - l) * comb(m, l) * comb(l, j))
                * falling
                * half_hbar ** (l - j)
            )
            for k in range(top + 1):
                d = _dhat_derivative(s, m - l, k)
                if not d:
                    continue
                coeff = GaussianRational(base * comb(top, k)) * i_power(j - k - m)
                term = ScalarSum({(l - j, 0): coeff}) * d
                key = (top - k, j)
                out[key] = out.get(key, ZERO) + term
    return PhasePoly._raw(out)


def phase_monomial_to_op(
    n: int, m: int, s: KernelSeries, include_h_factor: bool = False
) -> OperatorPoly:
    """Operator of ``q^n p^m`` under quantization with ``1/s(-theta, -tau)``, times h if asked.

    Words come out as ``qh^j ph^(m-l) qh^(n-k-j)`` and are standard-ordered.
    """
    _check_order(n, m, s)
    parts = []
    for l in range(m + 1):
        for k in range(n + 1):
            d = _dhat_derivative(s, l, k)
            if not d:
                continue
            for j in range(n - k + 1):
                c = (
                    Fraction(comb(m, l) * comb(n, k) * comb(n - k, j) * factorial(l) * (-1) ** l)
                    * Fraction(2) ** (k - n)
                )
                coeff = ScalarSum({(0, 0): GaussianRational(c) * i_power(l + k)}) * d
                parts.append(standard_order([("q", j), ("p", m - l), ("q", n - k - j)], coeff))
    result = sum_polys(parts, OperatorPoly())
    if include_h_factor:
        result = result.scale(PLANCK_H)
    return result


Poly = Union[OperatorPoly, PhasePoly]


def default_order(poly: Poly) -> int:
    return poly.degree() + 2


def effective_series(f: KernelSeries, direction: MapDirection) -> KernelSeries:
    """Series fed to the monomial engine: 1/K(-theta,-tau) for the kernel K of the integral."""
    if (direction.variant, direction.series_role) in (
        ("op_to_phase", "observable_map"),
        ("phase_to_op", "state_map"),
    ):
        return f
    return dual_series(f)


def apply_map(
    poly: Poly,
    kernel: KernelSpec,
    direction: MapDirection,
    order: Optional[int] = None,
) -> Poly:
    """Linear extension of the monomial engines to a polynomial."""
    if direction.variant == "op_to_phase" and not isinstance(poly, OperatorPoly):
        raise TypeError("op_to_phase maps take an OperatorPoly")
    if direction.variant == "phase_to_op" and not isinstance(poly, PhasePoly):
        raise TypeError("phase_to_op maps take a PhasePoly")
    if order is None:
        order = default_order(poly)
    s = effective_series(taylor(kernel, order), direction)
    if direction.variant == "op_to_phase":
        parts = [op_monomial_to_phase(n, m, s).scale(c) for (n, m), c in poly.items()]
        result = sum_polys(parts, PhasePoly())
        if direction.include_h_factor:
            result = result.scale(PLANCK_H.inverse())
    else:
        parts = [
            phase_monomial_to_op(n, m, s, direction.include_h_factor).scale(c)
            for (n, m), c in poly.items()
        ]
        result = sum_polys(parts, OperatorPoly())
    return result


def observable_image(G: OperatorPoly, kernel: KernelSpec, order: Optional[int] = None) -> PhasePoly:
    """G -> g."""
    return apply_map(G, kernel, OBSERVABLE_FORWARD, order)


def quantize(g: PhasePoly, kernel: KernelSpec, order: Optional[int] = None) -> OperatorPoly:
    """g -> G, the quantization rule of the kernel."""
    return apply_map(g, kernel, OBSERVABLE_INVERSE, order)


def state_image(rho: OperatorPoly, kernel: KernelSpec, order: Optional[int] = None) -> PhasePoly:
    """rho -> F."""
    return apply_map(rho, kernel, STATE_FORWARD, order)


def state_from_image(F: PhasePoly, kernel: KernelSpec, order: Optional[int] = None) -> OperatorPoly:
    """F -> rho."""
    return apply_map(F, kernel, STATE_INVERSE, order)
