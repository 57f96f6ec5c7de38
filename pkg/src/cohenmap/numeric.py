"""Grid construction of Cohen-class distributions and the trace/phase-space pairing.

Conventions
-----------
A state is sampled at ``q_j = q_min + j*dq`` (N points, N a power of two).
The conjugate grids are ``theta_a = (a - N/2) * 2*pi/(N*dq)`` and, for a
momentum grid ``p_k = p_min + k*dp``, ``tau_b = (b - N_p/2) * 2*pi/(N_p*dp)``.

    A(theta, tau) = sum_j psi(u_j + tau*hbar/2) conj(psi(u_j - tau*hbar/2)) exp(i*theta*u_j) dq
    F(q, p) = (1/4 pi^2) sum_ab f(theta_a, tau_b) A(theta_a, tau_b)
              exp(-i*theta_a*q - i*tau_b*p) dtheta dtau

Half-step shifts are done spectrally on a zero-padded copy of psi; shifts
whose two arguments cannot both lie inside the grid contribute exactly zero.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, pi, sqrt
from pathlib import Path
from typing import Optional

import numpy as np

from .algebra import OperatorPoly, PhasePoly
from .kernels import KernelSpec, evaluate, kernel_from_name

_trapezoid = getattr(np, "trapezoid", None) or np.trapz

# Ambiguity values at the conjugate-grid boundary above this fraction of the
# peak mean the grid does not resolve the state.
BOUNDARY_TOL = 1e-10
STATE_EDGE_TOL = 1e-8
DIFFERENTIATION_TOL = 1e-8

# Moment-preserving regularization for the P-function kernel.
P_WINDOW_OVERSHOOT = 1.2
P_WINDOW_TERMS = 4


class GridError(ValueError):
    """The grid cannot represent the requested state or transform."""


class NumericalAccuracyError(ArithmeticError):
    """A numeric result would exceed its accuracy budget."""


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def conjugate_axis(n: int, step: float) -> np.ndarray:
    return (np.arange(n) - n // 2) * (2 * pi / (n * step))


@dataclass(frozen=True)
class GridState:
    """Pure state psi(q) on a uniform grid, normalized so that sum |psi|^2 dq = 1."""

    psi: np.ndarray
    q_min: float
    dq: float
    hbar: float = 1.0

    def __post_init__(self):
        psi = np.array(self.psi, dtype=complex)
        if psi.ndim != 1 or not _is_power_of_two(len(psi)):
            raise GridError(f"state needs a power-of-two number of samples, got {psi.shape}")
        if not self.dq > 0:
            raise GridError("dq must be positive")
        if not self.hbar > 0:
            raise GridError("hbar must be positive")
        norm = np.sqrt(np.sum(np.abs(psi) ** 2) * self.dq)
        if norm == 0 or not np.isfinite(norm):
            raise GridError("state has zero or non-finite norm")
        psi = psi / norm
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)

    @property
    def n(self) -> int:
        return len(self.psi)

    @property
    def span(self) -> float:
        return self.n * self.dq

    @property
    def q(self) -> np.ndarray:
        return self.q_min + self.dq * np.arange(self.n)

    @classmethod
    def on_grid(cls, values_of_q, n: int = 256, half_width: float = 8.0, hbar: float = 1.0) -> "GridState":
        """Samples of values_of_q on [-half_width, half_width) with n points."""
        q_min = -half_width
        dq = 2 * half_width / n
        q = q_min + dq * np.arange(n)
        return cls(values_of_q(q), q_min, dq, hbar)

    @classmethod
    def gaussian(
        cls,
        sigma: float = 1.0,
        q0: float = 0.0,
        p0: float = 0.0,
        n: int = 256,
        half_width: float = 8.0,
        hbar: float = 1.0,
    ) -> "GridState":
        def values(q):
            return (pi * sigma**2) ** -0.25 * np.exp(-((q - q0) ** 2) / (2 * sigma**2) + 1j * p0 * q / hbar)

        return cls.on_grid(values, n, half_width, hbar)

    @classmethod
    def oscillator(cls, level: int, n: int = 256, half_width: float = 8.0, hbar: float = 1.0) -> "GridState":
        """Eigenstate of H = (p^2 + q^2)/2 (unit mass and frequency)."""
        if level < 0:
            raise GridError("oscillator level must be nonnegative")

        def values(q):
            x = q / sqrt(hbar)
            prev = np.zeros_like(x)
            cur = pi**-0.25 * np.exp(-(x**2) / 2)
            for k in range(level):
                prev, cur = cur, sqrt(2 / (k + 1)) * x * cur - sqrt(k / (k + 1)) * prev
            return cur

        return cls.on_grid(values, n, half_width, hbar)

    @classmethod
    def from_csv(cls, path: str | Path, hbar: float = 1.0) -> "GridState":
        """Rows of ``q,re,im`` on a uniform grid; a non-numeric first line is a header."""
        rows = []
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rows.append([float(x) for x in line.split(",")])
            except ValueError:
                if rows:
                    raise GridError(f"{path}: malformed row {line!r}") from None
        data = np.array(rows)
        if data.ndim != 2 or data.shape[1] != 3:
            raise GridError(f"{path}: expected rows q,re,im")
        q = data[:, 0]
        steps = np.diff(q)
        if len(q) < 2 or not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
            raise GridError(f"{path}: q samples must be uniformly spaced")
        return cls(data[:, 1] + 1j * data[:, 2], float(q[0]), float(steps[0]), hbar)

    def to_csv(self, path: str | Path) -> None:
        lines = ["q,re,im"]
        lines += [f"{q:.17g},{z.real:.17g},{z.imag:.17g}" for q, z in zip(self.q, self.psi)]
        Path(path).write_text("\n".join(lines) + "\n")


def state_from_spec(spec: str, n: int = 256, half_width: float = 8.0, hbar: float = 1.0) -> GridState:
    """``gaussian:sigma=<v>[,q0=<v>,p0=<v>]``, ``oscillator:n=<int>``, or a CSV path."""
    if spec.startswith("gaussian:") or spec == "gaussian":
        params = _parse_params(spec.partition(":")[2], {"sigma", "q0", "p0"})
        return GridState.gaussian(
            params.get("sigma", 1.0), params.get("q0", 0.0), params.get("p0", 0.0), n, half_width, hbar
        )
    if spec.startswith("oscillator:"):
        params = _parse_params(spec.partition(":")[2], {"n"})
        level = params.get("n", 0.0)
        if level != int(level):
            raise GridError("oscillator level must be an integer")
        return GridState.oscillator(int(level), n, half_width, hbar)
    if not Path(spec).exists():
        raise GridError(f"unknown state {spec!r}: not a generator spec or an existing CSV file")
    return GridState.from_csv(spec, hbar)


def _parse_params(text: str, allowed: set[str]) -> dict[str, float]:
    params = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        key, sep, value = item.partition("=")
        if not sep or key not in allowed:
            raise GridError(f"bad state parameter {item!r}; allowed: {', '.join(sorted(allowed))}")
        try:
            params[key] = float(value)
        except ValueError:
            raise GridError(f"state parameter {key} needs a number, got {value!r}") from None
    return params


@dataclass(frozen=True)
class Ambiguity:
    theta: np.ndarray
    tau: np.ndarray
    values: np.ndarray  # indexed [theta, tau]


@dataclass(frozen=True)
class PhaseGrid:
    """F(q, p) sampled on an n_q x n_p grid, rows indexed by q."""

    F: np.ndarray
    q_min: float
    dq: float
    p_min: float
    dp: float
    hbar: float
    kernel: KernelSpec
    regularized: bool = field(default=False)

    def __post_init__(self):
        if self.F.ndim != 2:
            raise GridError("F must be two-dimensional")
        if not (self.dq > 0 and self.dp > 0):
            raise GridError("grid steps must be positive")

    @property
    def q(self) -> np.ndarray:
        return self.q_min + self.dq * np.arange(self.F.shape[0])

    @property
    def p(self) -> np.ndarray:
        return self.p_min + self.dp * np.arange(self.F.shape[1])

    def to_csv(self, path: str | Path | None = None) -> str:
        n_q, n_p = self.F.shape
        lines = [
            f"# q_min={self.q_min:.17g} dq={self.dq:.17g} n_q={n_q} p_min={self.p_min:.17g} "
            f"dp={self.dp:.17g} n_p={n_p} hbar={self.hbar:.17g} kernel={_kernel_label(self.kernel)}",
            "# re,im interleaved row-major",
        ]
        inter = np.empty((n_q, 2 * n_p))
        inter[:, 0::2] = self.F.real
        inter[:, 1::2] = self.F.imag
        lines += [",".join(f"{x:.17g}" for x in row) for row in inter]
        text = "\n".join(lines) + "\n"
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, path: str | Path) -> "PhaseGrid":
        text = Path(path).read_text().splitlines()
        header = dict(re.findall(r"(\w+)=(\S+)", text[0]))
        try:
            n_q, n_p = int(header["n_q"]), int(header["n_p"])
            kernel = _kernel_from_label(header["kernel"])
            rows = [list(map(float, line.split(","))) for line in text if line and not line.startswith("#")]
        except (KeyError, ValueError) as exc:
            raise GridError(f"{path}: malformed phase grid file: {exc}") from None
        data = np.array(rows)
        if data.shape != (n_q, 2 * n_p):
            raise GridError(f"{path}: expected {n_q} rows of {2 * n_p} values")
        return cls(
            data[:, 0::2] + 1j * data[:, 1::2],
            float(header["q_min"]),
            float(header["dq"]),
            float(header["p_min"]),
            float(header["dp"]),
            float(header["hbar"]),
            kernel,
        )


def _kernel_label(kernel: KernelSpec) -> str:
    if kernel.lam is not None and kernel.lam != 1:
        return f"{kernel.name}(lambda={kernel.lam})"
    return kernel.name


def _kernel_from_label(label: str) -> KernelSpec:
    m = re.fullmatch(r"(.+)\(lambda=([-0-9/]+)\)", label)
    if m:
        return kernel_from_name(m.group(1), Fraction(m.group(2)))
    return kernel_from_name(label)


def _check_contained(state: GridState) -> None:
    edge = max(np.abs(state.psi[:2]).max(), np.abs(state.psi[-2:]).max())
    if edge > STATE_EDGE_TOL * np.abs(state.psi).max():
        raise GridError("state does not decay inside the grid; widen the span")


def _shifted_products(state: GridState, shifts: np.ndarray) -> np.ndarray:
    """rows b: psi(u + s_b) * conj(psi(u - s_b)) at the grid points u."""
    n = state.n
    m = 2 * n
    lo = n // 2
    padded = np.zeros(m, dtype=complex)
    padded[lo:lo + n] = state.psi
    spectrum = np.fft.fft(padded)
    k = 2 * pi * np.fft.fftfreq(m, state.dq)
    out = np.zeros((len(shifts), n), dtype=complex)
    # beyond half the span the two arguments never both land inside the grid
    live = np.nonzero(np.abs(2 * shifts) < state.span)[0]
    for start in range(0, len(live), 256):
        rows = live[start:start + 256]
        phase = np.exp(1j * np.outer(shifts[rows], k))
        plus = np.fft.ifft(spectrum * phase, axis=1)[:, lo:lo + n]
        minus = np.fft.ifft(spectrum * phase.conj(), axis=1)[:, lo:lo + n]
        out[rows] = plus * minus.conj()
    return out


def ambiguity(state: GridState, p_span: Optional[float] = None, n_p: Optional[int] = None) -> Ambiguity:
    """A(theta, tau) on the grids conjugate to (q, p)."""
    _check_contained(state)
    n = state.n
    n_p = n if n_p is None else n_p
    p_span = state.span if p_span is None else p_span
    if not _is_power_of_two(n_p):
        raise GridError("momentum grid size must be a power of two")
    dp = p_span / n_p
    theta = conjugate_axis(n, state.dq)
    tau = conjugate_axis(n_p, dp)
    products = _shifted_products(state, tau * state.hbar / 2)
    alternate = (-1.0) ** np.arange(n)
    spec = np.fft.ifft(products * alternate, axis=1) * n
    values = (state.dq * np.exp(1j * theta * state.q_min) * spec).T
    peak = np.abs(values).max()
    rim = max(
        np.abs(values[0]).max(),
        np.abs(values[-1]).max(),
        np.abs(values[:, 0]).max(),
        np.abs(values[:, -1]).max(),
    )
    if rim > BOUNDARY_TOL * peak:
        raise GridError(
            "grid too small for the tau/theta range the state needs "
            f"(ambiguity at the boundary is {rim / peak:.1e} of its peak); refine dq or dp"
        )
    return Ambiguity(theta, tau, values)


def _regularized_p_kernel(kernel: KernelSpec, theta, tau, hbar: float) -> np.ndarray:
    """P-kernel times a window that is flat to high order at the origin.

    Per axis the window is exp(-a x^2) * sum_{k<=K} (a x^2)^k / k!, with a a
    little above the kernel's own Gaussian growth rate.  It equals
    1 - O(x^(2K+2)), so every moment of F through degree 2K+1 in each variable
    is untouched, while the product with the kernel stays bounded.
    """
    lam = float(kernel.lam)
    out = np.ones(np.broadcast(theta, tau).shape, dtype=complex)
    for x, growth in ((theta, hbar / (4 * lam**2)), (tau, hbar * lam**2 / 4)):
        a = P_WINDOW_OVERSHOOT * growth
        y = a * x**2
        poly = sum(y**k / factorial(k) for k in range(P_WINDOW_TERMS + 1))
        out = out * np.exp((growth - a) * x**2) * poly
    return out


def kernel_on_grid(kernel: KernelSpec, theta, tau, hbar: float) -> tuple[np.ndarray, bool]:
    """Kernel samples for the grid path; the flag reports a regularized P-function."""
    if kernel.variant == "sudarshan_p":
        return _regularized_p_kernel(kernel, theta, tau, hbar), True
    return evaluate(kernel, theta, tau, hbar), False


def cohen_distribution(
    state: GridState,
    kernel: KernelSpec,
    p_span: Optional[float] = None,
    n_p: Optional[int] = None,
) -> PhaseGrid:
    """F(q, p) for the kernel; the momentum grid defaults to the position grid's span and size."""
    amb = ambiguity(state, p_span, n_p)
    theta, tau = amb.theta, amb.tau
    n_q, n_pp = len(theta), len(tau)
    dp = (state.span if p_span is None else p_span) / n_pp
    p_min = -dp * n_pp / 2
    f, regularized = kernel_on_grid(kernel, theta[:, None], tau[None, :], state.hbar)
    G = f * amb.values
    dtheta = theta[1] - theta[0]
    dtau = tau[1] - tau[0]
    # theta -> q
    G = np.fft.fft(G * np.exp(-1j * theta * state.q_min)[:, None], axis=0)
    G *= ((-1.0) ** np.arange(n_q) * dtheta / (2 * pi))[:, None]
    # tau -> p
    G = np.fft.fft(G * np.exp(-1j * tau * p_min)[None, :], axis=1)
    G *= ((-1.0) ** np.arange(n_pp) * dtau / (2 * pi))[None, :]
    return PhaseGrid(G, state.q_min, state.dq, p_min, dp, state.hbar, kernel, regularized)


def marginals(grid: PhaseGrid) -> tuple[np.ndarray, np.ndarray]:
    """Trapezoid-rule integrals of F over p (position density) and over q (momentum density)."""
    q_marginal = _trapezoid(grid.F, dx=grid.dp, axis=1).real
    p_marginal = _trapezoid(grid.F, dx=grid.dq, axis=0).real
    return q_marginal, p_marginal


def pair(grid: PhaseGrid, g: PhasePoly) -> complex:
    """Quadrature of F*g over the grid.

    The caller keeps the degree of g low enough that F*g is negligible at the
    grid edges.
    """
    Q, P = np.meshgrid(grid.q, grid.p, indexing="ij")
    values = g.evaluate(Q, P, grid.hbar) * grid.F
    return complex(_trapezoid(_trapezoid(values, dx=grid.dp, axis=1), dx=grid.dq))


def _apply_p(state: GridState, vec: np.ndarray, m: int) -> np.ndarray:
    if m == 0:
        return vec
    k = 2 * pi * np.fft.fftfreq(state.n, state.dq)
    mult = (state.hbar * k) ** m
    if m % 2:
        mult[state.n // 2] = 0.0
    return np.fft.ifft(np.fft.fft(vec) * mult)


def _word_expectation(state: GridState, n: int, m: int) -> tuple[complex, complex]:
    """<psi| qh^n ph^m |psi> by two groupings, for a noise estimate."""
    psi, q, dq = state.psi, state.q, state.dq
    left = q**n * psi
    direct = np.vdot(left, _apply_p(state, psi, m)) * dq
    m1 = m // 2
    split = np.vdot(_apply_p(state, left, m1), _apply_p(state, psi, m - m1)) * dq
    return complex(direct), complex(split)


def trace_expectation(state: GridState, G: OperatorPoly) -> complex:
    """<psi|G|psi>: ph spectrally (multiplication by hbar*k), qh pointwise."""
    _check_contained(state)
    spectrum = np.abs(np.fft.fft(state.psi))
    top = np.sort(spectrum)[::-1]
    k_order = np.argsort(np.abs(np.fft.fftfreq(state.n)))
    tail = spectrum[k_order[-state.n // 8:]].max()
    if tail > 1e-10 * top[0]:
        raise NumericalAccuracyError("state is not resolved by the grid (spectrum reaches Nyquist)")
    total = 0j
    for (n, m), c in G.items():
        direct, split = _word_expectation(state, n, m)
        if abs(direct - split) > DIFFERENTIATION_TOL * (1 + abs(direct)):
            raise NumericalAccuracyError(
                f"spectral differentiation noise for qh^{n} ph^{m} is {abs(direct - split):.1e}, "
                f"above {DIFFERENTIATION_TOL:g}"
            )
        total += c.evaluate(state.hbar) * direct
    return total
