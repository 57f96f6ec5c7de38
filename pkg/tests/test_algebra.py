from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohenmap.algebra import (
    HBAR,
    I,
    ONE,
    PH,
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
from cohenmap.parser import parse
from oracles import operator_matrix, swap_reduce_poly, word_matrix

HBAR_VALUE = 0.7


def op(text):
    return parse(text, "operator")


# matrix oracle first: these pin the commutator convention independently


@pytest.mark.parametrize("n", range(4))
@pytest.mark.parametrize("m", range(4))
def test_standard_order_matches_truncated_matrices(n, m):
    word = "p" * m + "q" * n
    canonical = standard_order(word)
    # words of length <= 6 acting on the first 4 levels stay below level 10
    got = operator_matrix(canonical, HBAR_VALUE)[:4, :4]
    want = word_matrix(word, HBAR_VALUE)[:4, :4]
    np.testing.assert_allclose(got, want, atol=1e-10)


@pytest.mark.parametrize("word", ["pqpq", "qppq", "ppqqp", "pqqpp", "qpqpq"])
def test_mixed_words_match_matrices(word):
    got = operator_matrix(standard_order(word), HBAR_VALUE)[:4, :4]
    np.testing.assert_allclose(got, word_matrix(word, HBAR_VALUE)[:4, :4], atol=1e-10)


def test_closed_form_reordering_against_single_swaps():
    for n in range(9):
        for m in range(9):
            assert standard_order([("p", m), ("q", n)]) == swap_reduce_poly("p" * m + "q" * n), (n, m)


def test_documented_examples():
    assert standard_order("pq") == op("qh*ph") - OperatorPoly.constant(I * HBAR)
    assert standard_order([("q", 5)]) == OperatorPoly.monomial(5, 0)
    expected = op("qh^2*ph^2 - 4*i*hbar*qh*ph - 2*hbar^2")
    assert standard_order("ppqq") == expected
    assert (QH * PH) * (QH * PH) == op("qh^2*ph^2 - i*hbar*qh*ph")


def test_commutator_is_i_hbar():
    assert QH * PH - PH * QH == OperatorPoly.constant(I * HBAR)


def test_phase_products_commute():
    q, p = PhasePoly.monomial(1, 0), PhasePoly.monomial(0, 1)
    assert (q * p) * (q * p) == PhasePoly.monomial(2, 2)
    assert q * p == p * q


def test_additive_inverse_is_zero():
    x = op("qh^3*ph + 2/3*i*hbar*qh")
    assert (x + (-x)).is_zero()
    assert (x - x).render() == "0"


def test_adjoint_examples():
    assert adjoint(QH * PH) == op("qh*ph - i*hbar")
    assert adjoint(OperatorPoly.monomial(4, 0)) == OperatorPoly.monomial(4, 0)
    assert adjoint(OperatorPoly.constant(I * HBAR)) == OperatorPoly.constant(-(I * HBAR))


def test_adjoint_matches_conjugate_transpose():
    x = op("qh^2*ph^3 + (1/2 + 3*i)*hbar*qh*ph^2")
    np.testing.assert_allclose(
        operator_matrix(adjoint(x), HBAR_VALUE)[:4, :4],
        operator_matrix(x, HBAR_VALUE).conj().T[:4, :4],
        atol=1e-10,
    )


small_ints = st.integers(-5, 5)


@st.composite
def operator_polys(draw):
    terms = {}
    for _ in range(draw(st.integers(0, 3))):
        key = (draw(st.integers(0, 3)), draw(st.integers(0, 3)))
        coeff = ScalarSum.of(draw(small_ints), draw(small_ints), hbar_pow=draw(st.integers(0, 2)))
        terms[key] = terms.get(key, ZERO) + coeff
    return OperatorPoly(terms)


@settings(max_examples=60, deadline=None)
@given(operator_polys(), operator_polys(), operator_polys())
def test_associativity(a, b, c):
    assert (a * b) * c == a * (b * c)


@settings(max_examples=60, deadline=None)
@given(operator_polys())
def test_adjoint_is_an_involution(a):
    assert adjoint(adjoint(a)) == a


@settings(max_examples=40, deadline=None)
@given(operator_polys(), operator_polys())
def test_adjoint_reverses_products(a, b):
    assert adjoint(a * b) == adjoint(b) * adjoint(a)


def test_scalar_canonical_forms():
    s = Scalar(GaussianRational(Fraction(6, -4), Fraction(0)), hbar_pow=2)
    assert (s.re_num, s.re_den, s.im_num, s.im_den) == (-3, 2, 0, 1)
    zero = Scalar(GaussianRational(0), hbar_pow=3, twopi_pow=1)
    assert (zero.hbar_pow, zero.twopi_pow) == (0, 0)
    assert ScalarSum.of(0, hbar_pow=4) == ZERO
    assert len(ScalarSum.of(1, hbar_pow=1) + ScalarSum.of(1)) == 2


def test_graded_inverse_and_evaluation():
    h = ScalarSum.of(1, hbar_pow=1, twopi_pow=1)
    assert h * h.inverse() == ONE
    assert h.evaluate(0.5) == pytest.approx(np.pi)
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()


def test_render_format():
    assert OperatorPoly().render() == "0"
    assert op("qh*ph - i*hbar").render() == "qh^1*ph^1 + (-1*i)*hbar^1"
    assert OperatorPoly.constant(ONE).render() == "1"
    x = PhasePoly({(0, 0): ScalarSum.of(Fraction(1, 2), Fraction(-3, 4), hbar_pow=-1, twopi_pow=2)})
    assert x.render() == "(1/2 + -3/4*i)*hbar^-1*(2*pi)^2"


def test_polynomial_families_do_not_mix():
    with pytest.raises(TypeError):
        QH * PhasePoly.monomial(1, 0)
