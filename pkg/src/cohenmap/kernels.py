"""Cohen kernels f(theta, tau): catalog, exact Taylor series, inverse derivatives.

Only the Taylor coefficients of a kernel at the origin ever enter the
symbolic maps.  Derivatives of 1/f in tau at tau = 0 are obtained from the
banded determinant of the tau-coefficients a_n(theta) of f, which never
evaluates f away from the origin; ``invert_series`` is an independent route
to the same numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .algebra import ONE, ZERO, GaussianRational, ScalarSum, i_power


class KernelError(ValueError):
    """Inadmissible kernel or kernel request."""


class InsufficientOrderError(KernelError):
    """A truncated series was asked for coefficients it does not know."""


VARIANTS = (
    "weyl",
    "rivier_cos",
    "born_jordan_sinc",
    "standard",
    "antistandard",
    "sudarshan_p",
    "husimi_q",
    "custom",
)

MARGINAL = {
    "weyl": True,
    "rivier_cos": True,
    "born_jordan_sinc": True,
    "standard": True,
    "antistandard": True,
    "sudarshan_p": False,
    "husimi_q": False,
}

# variant -> (cli name, closed form, distribution, quantization rule)
TABLE = {
    "weyl": ("weyl", "1", "Wigner", "Weyl"),
    "rivier_cos": ("cos", "cos(theta*tau*hbar/2)", "Margenau-Hill", "Rivier (symmetrization)"),
    "born_jordan_sinc": (
        "sinc",
        "2*sin(theta*tau*hbar/2)/(theta*tau*hbar)",
        "Shankara",
        "Born-Jordan",
    ),
    "standard": ("standard", "exp(-i*theta*tau*hbar/2)", "Kirkwood f_K+", "standard"),
    "antistandard": ("antistandard", "exp(i*theta*tau*hbar/2)", "Kirkwood f_K-", "antistandard"),
    "sudarshan_p": (
        "p-function",
        "exp(hbar/4*((tau*lambda)^2 + (theta/lambda)^2))",
        "P-function (Sudarshan-Glauber)",
        "normal",
    ),
    "husimi_q": (
        "q-function",
        "exp(-hbar/4*((tau*lambda)^2 + (theta/lambda)^2))",
        "Q-function (Husimi)",
        "antinormal",
    ),
}

ALIASES = {
    "weyl": "weyl",
    "cos": "rivier_cos",
    "rivier": "rivier_cos",
    "margenau-hill": "rivier_cos",
    "sinc": "born_jordan_sinc",
    "born-jordan": "born_jordan_sinc",
    "standard": "standard",
    "kirkwood+": "standard",
    "antistandard": "antistandard",
    "kirkwood-": "antistandard",
    "p-function": "sudarshan_p",
    "q-function": "husimi_q",
}


class ThetaSeries:
    """Truncated series ``sum_j c_j theta^j``, exact through ``theta^order``."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Sequence[ScalarSum], order: int):
        coeffs = [ScalarSum.coerce(c) for c in coeffs[: order + 1]]
        coeffs += [ZERO] * (order + 1 - len(coeffs))
        self.coeffs = tuple(coeffs)
        self.order = order

    @classmethod
    def constant(cls, c: ScalarSum, order: int) -> ThetaSeries:
        return cls([c], order)

    def __getitem__(self, j: int) -> ScalarSum:
        if j > self.order:
            raise InsufficientOrderError(f"theta^{j} requested from a series exact through theta^{self.order}")
        return self.coeffs[j]

    def derivative_at_zero(self, k: int) -> ScalarSum:
        return self[k] * factorial(k)

    def __add__(self, other: ThetaSeries) -> ThetaSeries:
        order = min(self.order, other.order)
        return ThetaSeries([self.coeffs[j] + other.coeffs[j] for j in range(order + 1)], order)

    def __neg__(self) -> ThetaSeries:
        return ThetaSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other: ThetaSeries) -> ThetaSeries:
        return self + (-other)

    def __mul__(self, other) -> ThetaSeries:
        if not isinstance(other, ThetaSeries):
            c = ScalarSum.coerce(other)
            return ThetaSeries([x * c for x in self.coeffs], self.order)
        order = min(self.order, other.order)
        out = []
        for n in range(order + 1):
            acc = ZERO
            for j in range(n + 1):
                a, b = self.coeffs[j], other.coeffs[n - j]
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return ThetaSeries(out, order)

    __rmul__ = __mul__

    def inverse(self) -> ThetaSeries:
        if self.coeffs[0] != ONE:
            raise KernelError("theta-series inversion needs a unit constant term")
        out = [ONE]
        for n in range(1, self.order + 1):
            acc = ZERO
            for j in range(1, n + 1):
                if self.coeffs[j]:
                    acc = acc + self.coeffs[j] * out[n - j]
            out.append(-acc)
        return ThetaSeries(out, self.order)

    def __pow__(self, k: int) -> ThetaSeries:
        if k < 0:
            return self.inverse() ** (-k)
        result = ThetaSeries.constant(ONE, self.order)
        for _ in range(k):
            result = result * self
        return result

    def truncate(self, order: int) -> ThetaSeries:
        if order > self.order:
            raise InsufficientOrderError(f"cannot extend a series exact through theta^{self.order}")
        return ThetaSeries(self.coeffs, order)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ThetaSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.order, self.coeffs))

    def __repr__(self) -> str:
        body = " + ".join(f"[{c!r}]*theta^{j}" for j, c in enumerate(self.coeffs) if c)
        return f"ThetaSeries({body or '0'}; order={self.order})"


class KernelSeries:
    """Taylor polynomial ``sum c_jk theta^j tau^k`` of a kernel through total degree ``order``."""

    __slots__ = ("order", "_coeffs", "marginal_flag", "_inv_tau")

    def __init__(self, order: int, coeffs: Mapping[tuple[int, int], ScalarSum], marginal_flag: bool):
        if order < 0:
            raise KernelError("series order must be nonnegative")
        clean = {}
        for (j, k), c in coeffs.items():
            if j < 0 or k < 0:
                raise KernelError(f"negative power in kernel coefficient ({j}, {k})")
            c = ScalarSum.coerce(c)
            if c and j + k <= order:
                clean[(j, k)] = c
        self.order = order
        self._coeffs = clean
        self.marginal_flag = marginal_flag
        self._inv_tau: dict[int, ThetaSeries] = {}

    @property
    def coeffs(self) -> dict[tuple[int, int], ScalarSum]:
        return dict(self._coeffs)

    def coeff(self, j: int, k: int) -> ScalarSum:
        if j + k > self.order:
            raise InsufficientOrderError(
                f"theta^{j} tau^{k} is beyond the series order {self.order}"
            )
        return self._coeffs.get((j, k), ZERO)

    def tau_slice(self, k: int) -> ThetaSeries:
        """a_k(theta) = (1/k!) d^k f / d tau^k at tau = 0, exact through theta^(order-k)."""
        if k > self.order:
            raise InsufficientOrderError(f"tau^{k} is beyond the series order {self.order}")
        n = self.order - k
        return ThetaSeries([self._coeffs.get((j, k), ZERO) for j in range(n + 1)], n)

    def truncate(self, order: int) -> KernelSeries:
        if order > self.order:
            raise InsufficientOrderError(f"cannot extend a series of order {self.order} to {order}")
        return KernelSeries(order, self._coeffs, self.marginal_flag)

    def satisfies_marginal_condition(self) -> bool:
        return not any(c for (j, k), c in self._coeffs.items() if (j == 0) != (k == 0))

    def __mul__(self, other: KernelSeries) -> KernelSeries:
        order = min(self.order, other.order)
        out: dict[tuple[int, int], ScalarSum] = {}
        for (j1, k1), c1 in self._coeffs.items():
            for (j2, k2), c2 in other._coeffs.items():
                if j1 + j2 + k1 + k2 <= order:
                    key = (j1 + j2, k1 + k2)
                    out[key] = out.get(key, ZERO) + c1 * c2
        return KernelSeries(order, out, self.marginal_flag and other.marginal_flag)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KernelSeries):
            return NotImplemented
        return self.order == other.order and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self.order, frozenset(self._coeffs.items())))

    def __repr__(self) -> str:
        body = " + ".join(
            f"[{c!r}]*theta^{j}*tau^{k}" for (j, k), c in sorted(self._coeffs.items())
        )
        return f"KernelSeries({body or '0'}; order={self.order}, marginal={self.marginal_flag})"


@dataclass(frozen=True)
class KernelSpec:
    variant: str
    lam: Optional[Fraction] = None
    custom_series: Optional[KernelSeries] = field(default=None, compare=False)
    source: Optional[str] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise KernelError(f"unknown kernel variant {self.variant!r}")
        if self.variant in ("sudarshan_p", "husimi_q"):
            lam = Fraction(1) if self.lam is None else Fraction(self.lam)
            if lam == 0:
                raise KernelError("lambda must be different from zero")
            object.__setattr__(self, "lam", lam)
        elif self.lam is not None:
            raise KernelError("lambda only applies to the p-function and q-function kernels")
        if self.variant == "custom" and self.custom_series is None:
            raise KernelError("custom kernel needs a series")

    @property
    def name(self) -> str:
        if self.variant == "custom":
            return f"custom:{self.source}" if self.source else "custom"
        return TABLE[self.variant][0]

    @property
    def marginal(self) -> bool:
        if self.variant == "custom":
            return self.custom_series.marginal_flag
        return MARGINAL[self.variant]

    @property
    def is_real_even(self) -> bool:
        return self.variant in ("weyl", "rivier_cos", "born_jordan_sinc")


TABLE_KERNELS = tuple(KernelSpec(v) for v in VARIANTS if v != "custom")


def kernel_from_name(name: str, lam: Fraction | str | None = None) -> KernelSpec:
    """Resolve a CLI kernel name (with aliases, or ``custom:<file>``)."""
    if name.startswith("custom:"):
        path = name[len("custom:"):]
        return KernelSpec("custom", custom_series=load_custom_series(path), source=path)
    key = name.strip().lower()
    if key not in ALIASES:
        raise KernelError(f"unknown kernel {name!r}; choose from {', '.join(ALIASES)} or custom:<file>")
    variant = ALIASES[key]
    if lam is not None:
        lam = Fraction(lam)
        if variant not in ("sudarshan_p", "husimi_q"):
            raise KernelError("--lambda only applies to p-function and q-function")
    return KernelSpec(variant, lam)


def load_custom_series(path: str | Path) -> KernelSeries:
    """Read ``j k re_num/re_den im_num/im_den hbar_pow`` lines.

    The listed coefficients are taken as the complete Taylor series unless an
    ``order N`` line declares the series known only through total degree N.
    """
    coeffs: dict[tuple[int, int], ScalarSum] = {}
    declared = None
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        try:
            if fields[0] == "order":
                declared = int(fields[1])
                continue
            if len(fields) != 5:
                raise ValueError("expected 5 fields")
            j, k = int(fields[0]), int(fields[1])
            re, im, hp = Fraction(fields[2]), Fraction(fields[3]), int(fields[4])
        except (ValueError, IndexError, ZeroDivisionError) as exc:
            raise KernelError(f"{path}:{lineno}: cannot parse kernel coefficient line: {exc}") from None
        coeffs[(j, k)] = coeffs.get((j, k), ZERO) + ScalarSum.of(re, im, hbar_pow=hp)
    top = max((j + k for j, k in coeffs), default=0)
    exact = declared is None
    order = top if exact else declared
    if not exact and top > declared:
        raise KernelError(f"{path}: coefficient beyond the declared order {declared}")
    series = KernelSeries(order, coeffs, marginal_flag=False)
    series = KernelSeries(order, coeffs, series.satisfies_marginal_condition())
    _check_unit_origin(series)
    return _CustomSeries(series, exact)


class _CustomSeries(KernelSeries):
    """A user series; ``exact`` means unlisted coefficients are truly zero."""

    __slots__ = ("exact",)

    def __init__(self, series: KernelSeries, exact: bool):
        super().__init__(series.order, series.coeffs, series.marginal_flag)
        self.exact = exact


def _check_unit_origin(series: KernelSeries) -> None:
    if series.coeff(0, 0) != ONE:
        raise KernelError("kernel must satisfy f(0, 0) = 1 (unit constant Taylor coefficient)")


def taylor(spec: KernelSpec, order: int) -> KernelSeries:
    """Exact Taylor coefficients of the kernel through total degree ``order``."""
    if order < 0:
        raise KernelError("order must be nonnegative")
    v = spec.variant
    coeffs: dict[tuple[int, int], ScalarSum] = {(0, 0): ONE}
    if v == "custom":
        s = spec.custom_series
        _check_unit_origin(s)
        if order > s.order and not getattr(s, "exact", False):
            raise InsufficientOrderError(
                f"custom kernel is known only through order {s.order}, {order} requested"
            )
        return KernelSeries(order, s.coeffs, s.marginal_flag)
    if v in ("rivier_cos", "born_jordan_sinc", "standard", "antistandard"):
        # series in x = theta*tau*hbar/2, contributing theta^r tau^r hbar^r / 2^r
        for r in range(1, order // 2 + 1):
            if v == "rivier_cos":
                if r % 2:
                    continue
                c = GaussianRational(Fraction((-1) ** (r // 2), factorial(r)))
            elif v == "born_jordan_sinc":
                if r % 2:
                    continue
                c = GaussianRational(Fraction((-1) ** (r // 2), factorial(r + 1)))
            else:
                sign = -1 if v == "standard" else 1
                c = i_power(sign * r) * GaussianRational(Fraction(1, factorial(r)))
            c = c * GaussianRational(Fraction(1, 2**r))
            coeffs[(r, r)] = ScalarSum({(r, 0): c})
    elif v in ("sudarshan_p", "husimi_q"):
        sign = 1 if v == "sudarshan_p" else -1
        lam2 = spec.lam * spec.lam
        # exp(sign*hbar/4*(theta^2/lam^2)) * exp(sign*hbar/4*(tau^2*lam^2))
        for a in range(order // 2 + 1):
            for b in range((order - 2 * a) // 2 + 1):
                if a == b == 0:
                    continue
                val = (
                    Fraction(sign) ** (a + b)
                    / (Fraction(4) ** (a + b) * factorial(a) * factorial(b))
                    * lam2 ** (b - a)
                )
                coeffs[(2 * a, 2 * b)] = ScalarSum.of(val, hbar_pow=a + b)
    return KernelSeries(order, coeffs, MARGINAL[v])


def invert_series(s: KernelSeries) -> KernelSeries:
    """Bivariate reciprocal 1/f through the same total degree (Cauchy-product recursion)."""
    if s.coeff(0, 0) != ONE:
        raise KernelError("series inversion needs f(0, 0) = 1")
    src = s.coeffs
    nonconst = [(key, c) for key, c in src.items() if key != (0, 0)]
    out: dict[tuple[int, int], ScalarSum] = {(0, 0): ONE}
    for d in range(1, s.order + 1):
        for j in range(d + 1):
            k = d - j
            acc = ZERO
            for (a, b), c in nonconst:
                if a <= j and b <= k:
                    t = out.get((j - a, k - b))
                    if t:
                        acc = acc + c * t
            if acc:
                out[(j, k)] = -acc
    return KernelSeries(s.order, out, s.marginal_flag)


def determinant(matrix: Sequence[Sequence[Optional[ThetaSeries]]], one: ThetaSeries) -> ThetaSeries:
    """Exact determinant over a commutative ring by memoized Laplace expansion.

    ``None`` marks a structural zero entry; ``one`` is the ring unit, returned
    for the empty matrix.
    """
    size = len(matrix)
    memo: dict[tuple[int, frozenset], Optional[ThetaSeries]] = {}

    def minor(row: int, cols: frozenset) -> Optional[ThetaSeries]:
        if row == size:
            return one
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc = None
        for pos, col in enumerate(sorted(cols)):
            entry = matrix[row][col]
            if entry is None:
                continue
            sub = minor(row + 1, cols - {col})
            if sub is None:
                continue
            term = entry * sub
            if pos % 2:
                term = -term
            acc = term if acc is None else acc + term
        memo[key] = acc
        return acc

    result = minor(0, frozenset(range(size)))
    if result is None:
        return one * ZERO
    return result


def tau_determinant(s: KernelSeries, k: int) -> ThetaSeries:
    """D_k: determinant of the k x k banded matrix with rows (a_i, a_{i-1}, ..., a_0, 0, ...)."""
    if k > s.order:
        raise InsufficientOrderError(f"D_{k} needs series order >= {k}, have {s.order}")
    a = [s.tau_slice(n) for n in range(k + 1)]
    one = ThetaSeries.constant(ONE, s.order - k)
    matrix = [[a[r - c + 1] if r - c + 1 >= 0 else None for c in range(k)] for r in range(k)]
    return determinant(matrix, one).truncate(s.order - k)


def inverse_tau_derivative(s: KernelSeries, k: int) -> ThetaSeries:
    """(d^k/dtau^k) 1/f at tau = 0 as a theta-series, via the determinant D_k.

    Equals ``k! (-1)^k D_k / f(theta, 0)^(k+1)``; exact through ``theta^(order-k)``.
    The power of f(theta, 0) is a series inverse, so only Taylor data at the
    origin is used.
    """
    if k < 0:
        raise KernelError("derivative order must be nonnegative")
    if k > s.order:
        raise InsufficientOrderError(f"tau-derivative of order {k} needs series order >= {k}, have {s.order}")
    if s.coeff(0, 0) != ONE:
        raise KernelError("kernel must satisfy f(0, 0) = 1")
    cached = s._inv_tau.get(k)
    if cached is not None:
        return cached
    d = tau_determinant(s, k)
    scale = factorial(k) * (-1) ** k
    f0 = s.tau_slice(0).truncate(s.order - k)
    if any(f0.coeffs[1:]):
        # f(theta, 0) != 1 for non-marginal kernels
        d = d * (f0 ** (-(k + 1)))
    result = d * scale
    s._inv_tau[k] = result
    return result


def evaluate(spec: KernelSpec, theta, tau, hbar: float):
    """Closed-form kernel value; broadcasts over numpy arrays."""
    if hbar <= 0:
        raise KernelError("hbar must be positive")
    v = spec.variant
    theta = np.asarray(theta, dtype=float)
    tau = np.asarray(tau, dtype=float)
    x = theta * tau * hbar
    if v == "weyl":
        out = np.ones(np.broadcast(theta, tau).shape, dtype=complex)
    elif v == "rivier_cos":
        out = np.cos(x / 2).astype(complex)
    elif v == "born_jordan_sinc":
        # 2 sin(x/2)/x with the removable singularity at x = 0 set to 1
        out = np.sinc(x / (2 * np.pi)).astype(complex)
    elif v == "standard":
        out = np.exp(-0.5j * x)
    elif v == "antistandard":
        out = np.exp(0.5j * x)
    elif v in ("sudarshan_p", "husimi_q"):
        lam = float(spec.lam)
        sign = 1.0 if v == "sudarshan_p" else -1.0
        out = np.exp(sign * hbar / 4 * ((tau * lam) ** 2 + (theta / lam) ** 2)).astype(complex)
    else:
        raise KernelError("custom kernels are series-only and have no closed form to evaluate")
    return out[()] if out.ndim == 0 else out


def evaluate_series(s: KernelSeries, theta: float, tau: float, hbar: float) -> complex:
    """Numeric value of the truncated Taylor polynomial."""
    total = 0j
    for (j, k), c in s.coeffs.items():
        total += c.evaluate(hbar) * theta**j * tau**k
    return total
