"""Exact coefficients and polynomials in (q, p) and in the operators (qh, ph).

Coefficients are Gaussian rationals graded by integer powers of hbar and of
2*pi.  Operator polynomials are kept in standard order, every word written
as ``qh^n * ph^m``, and reordered with ``[qh, ph] = i*hbar``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, pi
from typing import Iterable, Iterator, Mapping, Sequence, Union

Rational = Union[int, Fraction]


class GaussianRational:
    """Exact complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Rational = 0, im: Rational = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, other: GaussianRational) -> GaussianRational:
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: GaussianRational) -> GaussianRational:
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __mul__(self, other: GaussianRational) -> GaussianRational:
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __neg__(self) -> GaussianRational:
        return GaussianRational(-self.re, -self.im)

    def __truediv__(self, other: GaussianRational) -> GaussianRational:
        norm = other.re * other.re + other.im * other.im
        if norm == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * other.conjugate()
        return GaussianRational(num.re / norm, num.im / norm)

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        return f"GaussianRational({self.re}, {self.im})"

    def render(self) -> str:
        def frac(x: Fraction) -> str:
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

        if not self.im:
            return frac(self.re)
        imag = f"{frac(self.im)}*i"
        if not self.re:
            return imag
        return f"{frac(self.re)} + {imag}"


_ZERO = GaussianRational()
_ONE = GaussianRational(1)

Grade = tuple[int, int]


class Scalar:
    """A single graded coefficient ``value * hbar**hbar_pow * (2*pi)**twopi_pow``."""

    __slots__ = ("value", "hbar_pow", "twopi_pow")

    def __init__(self, value: GaussianRational, hbar_pow: int = 0, twopi_pow: int = 0):
        if not value:
            hbar_pow = twopi_pow = 0
        self.value = value
        self.hbar_pow = hbar_pow
        self.twopi_pow = twopi_pow

    @property
    def re_num(self) -> int:
        return self.value.re.numerator

    @property
    def re_den(self) -> int:
        return self.value.re.denominator

    @property
    def im_num(self) -> int:
        return self.value.im.numerator

    @property
    def im_den(self) -> int:
        return self.value.im.denominator

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Scalar):
            return NotImplemented
        return (self.value, self.hbar_pow, self.twopi_pow) == (
            other.value,
            other.hbar_pow,
            other.twopi_pow,
        )

    def __hash__(self) -> int:
        return hash((self.value, self.hbar_pow, self.twopi_pow))

    def __repr__(self) -> str:
        return f"Scalar({self.value!r}, hbar_pow={self.hbar_pow}, twopi_pow={self.twopi_pow})"


class ScalarSum:
    """Finite sum of graded coefficients, keyed by ``(hbar_pow, twopi_pow)``.

    Zero entries are never stored, so the empty sum is the canonical zero.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Grade, GaussianRational] | None = None):
        clean = {}
        if terms:
            for grade, value in terms.items():
                if value:
                    clean[grade] = value
        self._terms: dict[Grade, GaussianRational] = clean
        self._hash: int | None = None

    @classmethod
    def of(
        cls, re: Rational = 0, im: Rational = 0, hbar_pow: int = 0, twopi_pow: int = 0
    ) -> ScalarSum:
        return cls({(hbar_pow, twopi_pow): GaussianRational(re, im)})

    @classmethod
    def from_scalar(cls, scalar: Scalar) -> ScalarSum:
        return cls({(scalar.hbar_pow, scalar.twopi_pow): scalar.value})

    @classmethod
    def coerce(cls, value: ScalarLike) -> ScalarSum:
        if isinstance(value, ScalarSum):
            return value
        if isinstance(value, Scalar):
            return cls.from_scalar(value)
        if isinstance(value, GaussianRational):
            return cls({(0, 0): value})
        if isinstance(value, (int, Fraction)):
            return cls.of(value)
        raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")

    def items(self) -> Iterator[tuple[Grade, GaussianRational]]:
        return iter(sorted(self._terms.items(), reverse=True))

    def scalars(self) -> list[Scalar]:
        return [Scalar(v, hp, tp) for (hp, tp), v in self.items()]

    def __getitem__(self, grade: Grade) -> GaussianRational:
        return self._terms.get(grade, _ZERO)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __add__(self, other: ScalarLike) -> ScalarSum:
        other = ScalarSum.coerce(other)
        out = dict(self._terms)
        for grade, value in other._terms.items():
            out[grade] = out.get(grade, _ZERO) + value
        return ScalarSum(out)

    __radd__ = __add__

    def __neg__(self) -> ScalarSum:
        return ScalarSum({g: -v for g, v in self._terms.items()})

    def __sub__(self, other: ScalarLike) -> ScalarSum:
        return self + (-ScalarSum.coerce(other))

    def __rsub__(self, other: ScalarLike) -> ScalarSum:
        return ScalarSum.coerce(other) - self

    def __mul__(self, other: ScalarLike) -> ScalarSum:
        other = ScalarSum.coerce(other)
        out: dict[Grade, GaussianRational] = {}
        for (h1, t1), v1 in self._terms.items():
            for (h2, t2), v2 in other._terms.items():
                grade = (h1 + h2, t1 + t2)
                out[grade] = out.get(grade, _ZERO) + v1 * v2
        return ScalarSum(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> ScalarSum:
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> ScalarSum:
        """Inverse of a single graded term; sums of grades are not invertible here."""
        if len(self._terms) != 1:
            raise ZeroDivisionError("only a single nonzero graded coefficient is invertible")
        ((hp, tp), value), = self._terms.items()
        return ScalarSum({(-hp, -tp): _ONE / value})

    def conjugate(self) -> ScalarSum:
        return ScalarSum({g: v.conjugate() for g, v in self._terms.items()})

    def is_one(self) -> bool:
        return len(self._terms) == 1 and self._terms.get((0, 0)) == _ONE

    def evaluate(self, hbar: float) -> complex:
        total = 0j
        for (hp, tp), value in self._terms.items():
            total += complex(value) * hbar**hp * (2 * pi) ** tp
        return total

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, GaussianRational, Scalar)):
            other = ScalarSum.coerce(other)
        if not isinstance(other, ScalarSum):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"ScalarSum({[t or '1' for t in self.render_summands()] or ['0']})"

    def render_summands(self) -> list[str]:
        """Each graded part as ``(a/b + c/d*i)*hbar^k*(2*pi)^j``, unit factors omitted."""
        parts = []
        for (hp, tp), value in self.items():
            factors = []
            if value != _ONE:
                factors.append(f"({value.render()})")
            if hp:
                factors.append(f"hbar^{hp}")
            if tp:
                factors.append(f"(2*pi)^{tp}")
            parts.append(factors)
        return ["*".join(f) for f in parts]


ScalarLike = Union[ScalarSum, Scalar, GaussianRational, int, Fraction]

ZERO = ScalarSum()
ONE = ScalarSum.of(1)
I = ScalarSum.of(0, 1)
HBAR = ScalarSum.of(1, hbar_pow=1)
TWOPI = ScalarSum.of(1, twopi_pow=1)
PLANCK_H = ScalarSum.of(1, hbar_pow=1, twopi_pow=1)


Key = tuple[int, int]


class _Poly:
    """Shared storage for polynomials keyed by ``(n, m)`` exponent pairs."""

    __slots__ = ("_terms", "_hash")
    _vars: tuple[str, str] = ("q", "p")

    def __init__(self, terms: Mapping[Key, ScalarLike] | None = None):
        clean: dict[Key, ScalarSum] = {}
        if terms:
            for (n, m), c in terms.items():
                if n < 0 or m < 0:
                    raise ValueError(f"negative exponent in monomial ({n}, {m})")
                c = ScalarSum.coerce(c)
                if c:
                    clean[(n, m)] = c
        self._terms = clean
        self._hash: int | None = None

    @classmethod
    def _raw(cls, terms: dict[Key, ScalarSum]):
        obj = cls.__new__(cls)
        obj._terms = {k: v for k, v in terms.items() if v}
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, n: int = 0, m: int = 0, coeff: ScalarLike = ONE):
        return cls({(n, m): coeff})

    @classmethod
    def constant(cls, coeff: ScalarLike):
        return cls({(0, 0): coeff})

    @property
    def terms(self) -> dict[Key, ScalarSum]:
        return dict(self._terms)

    def items(self) -> list[tuple[Key, ScalarSum]]:
        return sorted(self._terms.items(), reverse=True)

    def coeff(self, n: int, m: int) -> ScalarSum:
        return self._terms.get((n, m), ZERO)

    def degree(self) -> int:
        return max((n + m for n, m in self._terms), default=0)

    def max_exponents(self) -> Key:
        return (
            max((n for n, _ in self._terms), default=0),
            max((m for _, m in self._terms), default=0),
        )

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __iter__(self):
        return iter(self.items())

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, ZERO) + c
        return type(self)._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return type(self)._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c: ScalarLike):
        c = ScalarSum.coerce(c)
        return type(self)._raw({k: v * c for k, v in self._terms.items()})

    def conjugate_coefficients(self):
        return type(self)._raw({k: v.conjugate() for k, v in self._terms.items()})

    def _coerce(self, other):
        if isinstance(other, type(self)):
            return other
        if isinstance(other, _Poly):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        return type(self).constant(other)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, _Poly):
            return type(self) is type(other) and self._terms == other._terms
        if isinstance(other, (int, Fraction, ScalarSum, GaussianRational)):
            return self._terms == type(self).constant(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((type(self).__name__, frozenset(self._terms.items())))
        return self._hash

    def render(self) -> str:
        """Canonical text: terms by (n, m) descending, grades descending within a term."""
        if not self._terms:
            return "0"
        x, y = self._vars
        summands = []
        for (n, m), c in self.items():
            mono = []
            if n:
                mono.append(f"{x}^{n}")
            if m:
                mono.append(f"{y}^{m}")
            for coeff_text in c.render_summands():
                factors = [coeff_text] if coeff_text else []
                factors += mono
                summands.append("*".join(factors) if factors else "1")
        return " + ".join(summands)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.render()!r})"

    def evaluate_coefficients(self, hbar: float) -> dict[Key, complex]:
        return {k: c.evaluate(hbar) for k, c in self._terms.items()}


class PhasePoly(_Poly):
    """Commutative polynomial ``sum c_nm q^n p^m``."""

    __slots__ = ()
    _vars = ("q", "p")

    def __mul__(self, other):
        if isinstance(other, _Poly) and not isinstance(other, PhasePoly):
            raise TypeError("cannot multiply a phase polynomial by an operator polynomial")
        other = self._coerce(other)
        out: dict[Key, ScalarSum] = {}
        for (n1, m1), c1 in self._terms.items():
            for (n2, m2), c2 in other._terms.items():
                k = (n1 + n2, m1 + m2)
                out[k] = out.get(k, ZERO) + c1 * c2
        return PhasePoly._raw(out)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        return _power(self, k)

    def evaluate(self, q, p, hbar: float):
        """Numeric value on (broadcastable) arrays ``q``, ``p``."""
        total = 0j
        for (n, m), c in self._terms.items():
            total = total + c.evaluate(hbar) * q**n * p**m
        return total


class OperatorPoly(_Poly):
    """Noncommutative polynomial in standard order, ``sum c_nm qh^n ph^m``."""

    __slots__ = ()
    _vars = ("qh", "ph")

    def __mul__(self, other):
        if isinstance(other, _Poly) and not isinstance(other, OperatorPoly):
            raise TypeError("cannot multiply an operator polynomial by a phase polynomial")
        other = self._coerce(other)
        out: dict[Key, ScalarSum] = {}
        for (a, b), c1 in self._terms.items():
            for (c, d), c2 in other._terms.items():
                base = c1 * c2
                # qh^a (ph^b qh^c) ph^d
                for (n, m), w in _reorder_pq(b, c):
                    k = (a + n, m + d)
                    out[k] = out.get(k, ZERO) + base * w
        return OperatorPoly._raw(out)

    def __rmul__(self, other):
        return self._coerce(other) * self

    def __pow__(self, k: int):
        return _power(self, k)


def _power(poly, k: int):
    if k < 0:
        raise ValueError("negative powers of polynomials are not defined")
    result = type(poly).constant(ONE)
    for _ in range(k):
        result = result * poly
    return result


@lru_cache(maxsize=None)
def _reorder_pq(m: int, n: int) -> tuple[tuple[Key, ScalarSum], ...]:
    """``ph^m qh^n = sum_k (-i hbar)^k k! C(m,k) C(n,k) qh^(n-k) ph^(m-k)``."""
    out = []
    for k in range(min(m, n) + 1):
        w = factorial(k) * comb(m, k) * comb(n, k)
        coeff = ScalarSum({(k, 0): GaussianRational(w) * _neg_i_power(k)})
        out.append(((n - k, m - k), coeff))
    return tuple(out)


def _neg_i_power(k: int) -> GaussianRational:
    return (GaussianRational(1), GaussianRational(0, -1), GaussianRational(-1), GaussianRational(0, 1))[k % 4]


def i_power(k: int) -> GaussianRational:
    """``i**k`` for any integer ``k``."""
    return (GaussianRational(1), GaussianRational(0, 1), GaussianRational(-1), GaussianRational(0, -1))[k % 4]


Word = Sequence[tuple[str, int]]


def standard_order(word: Word | str, coeff: ScalarLike = ONE) -> OperatorPoly:
    """Standard-order a word of ``qh``/``ph`` runs, e.g. ``[("p", 2), ("q", 2)]``.

    A plain string such as ``"ppqq"`` is read one letter per factor.
    """
    if isinstance(word, str):
        word = [(ch, 1) for ch in word]
    result = OperatorPoly.constant(coeff)
    for letter, exp in word:
        if exp < 0:
            raise ValueError("word exponents must be nonnegative")
        if letter in ("q", "qh"):
            factor = OperatorPoly.monomial(exp, 0)
        elif letter in ("p", "ph"):
            factor = OperatorPoly.monomial(0, exp)
        else:
            raise ValueError(f"unknown operator letter {letter!r}")
        result = result * factor
    return result


def adjoint(op: OperatorPoly) -> OperatorPoly:
    """Hermitian adjoint: conjugate coefficients, reverse words, reorder."""
    out = OperatorPoly()
    for (n, m), c in op.items():
        out = out + standard_order([("p", m), ("q", n)], c.conjugate())
    return out


def sum_polys(polys: Iterable, zero):
    """Sum many polynomials without quadratic re-copying."""
    acc: dict[Key, ScalarSum] = {}
    for poly in polys:
        for k, c in poly._terms.items():
            acc[k] = acc.get(k, ZERO) + c
    return type(zero)._raw(acc)


QH = OperatorPoly.monomial(1, 0)
PH = OperatorPoly.monomial(0, 1)
Q = PhasePoly.monomial(1, 0)
P = PhasePoly.monomial(0, 1)
