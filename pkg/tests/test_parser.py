from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohenmap.algebra import HBAR, I, GaussianRational, OperatorPoly, PhasePoly, ScalarSum
from cohenmap.golden import ROWS
from cohenmap.parser import ParseError, detect_mode, parse, render


def test_monomial_and_reordering():
    assert parse("qh^2*ph^2") == OperatorPoly.monomial(2, 2)
    assert parse("ph*qh") == OperatorPoly.monomial(1, 1) - OperatorPoly.constant(I * HBAR)


def test_operator_products_keep_written_order():
    diff = parse("qh*ph") - parse("ph*qh")
    assert diff == OperatorPoly.constant(I * HBAR)
    assert parse("q*p", "phase") == parse("p*q", "phase")


def test_weyl_reference_row():
    got = parse("p^2*q^2 + 2*i*hbar*p*q - 1/2*hbar^2", "phase")
    want = PhasePoly({
        (2, 2): ScalarSum.of(1),
        (1, 1): ScalarSum.of(0, 2, hbar_pow=1),
        (0, 0): ScalarSum.of(Fraction(-1, 2), hbar_pow=2),
    })
    assert got == want


@pytest.mark.parametrize("name,textbook,canonical", ROWS)
def test_reference_rows_round_trip(name, textbook, canonical):
    poly = parse(textbook, "phase")
    assert render(poly, "phase") == canonical
    assert parse(canonical, "phase") == poly


def test_render_examples():
    assert render(OperatorPoly()) == "0"
    assert render(parse("qh*ph - i*hbar")) == "qh^1*ph^1 + (-1*i)*hbar^1"


def test_unicode_minus_and_pi():
    assert parse("q − p", "phase") == parse("q - p", "phase")
    assert parse("2*pi", "phase") == PhasePoly.constant(ScalarSum.of(1, twopi_pow=1))
    assert parse("(2*pi)^-1*hbar^-1", "phase") == PhasePoly.constant(ScalarSum.of(1, hbar_pow=-1, twopi_pow=-1))


@pytest.mark.parametrize(
    "text,mode,offset,fragment",
    [
        ("qh^2*(ph", "operator", 5, "unbalanced '('"),
        ("qh)", "operator", 2, "unbalanced ')'"),
        ("q^1.5", "phase", 3, "decimal"),
        ("q^(2)", "phase", 2, "integer literal"),
        ("q^3/2", "phase", 3, "fraction"),
        ("q^-2", "phase", 2, "negative exponent"),
        ("qh + p", "operator", 5, "phase-space variable"),
        ("q*ph", "phase", 2, "operator 'ph'"),
        ("x + 1", "phase", 0, "unknown symbol"),
        ("q/p", "phase", 1, "division"),
        ("q $ p", "phase", 2, "unexpected character"),
        ("", "phase", 0, "empty"),
        ("1/0", "phase", 2, "zero denominator"),
        ("éq", "phase", 0, "unexpected character"),
    ],
)
def test_errors_carry_byte_offsets(text, mode, offset, fragment):
    with pytest.raises(ParseError) as info:
        parse(text, mode)
    assert info.value.offset == offset
    assert fragment in str(info.value)


def test_offsets_count_bytes_not_characters():
    # the minus sign is three bytes in UTF-8
    with pytest.raises(ParseError) as info:
        parse("q − z", "phase")
    assert info.value.offset == 6


def test_detect_mode():
    assert detect_mode("qh*ph") == "operator"
    assert detect_mode("q*p + hbar") == "phase"


digits = st.integers(-(10**10) + 1, 10**10 - 1)
dens = st.integers(1, 10**10 - 1)


@st.composite
def coefficients(draw):
    out = ScalarSum()
    for _ in range(draw(st.integers(1, 2))):
        g = GaussianRational(Fraction(draw(digits), draw(dens)), Fraction(draw(digits), draw(dens)))
        out = out + ScalarSum({(draw(st.integers(-2, 4)), draw(st.integers(-1, 2))): g})
    return out


@st.composite
def polys(draw, cls):
    terms = {}
    for _ in range(draw(st.integers(0, 5))):
        n = draw(st.integers(0, 8))
        m = draw(st.integers(0, 8 - n))
        terms[(n, m)] = draw(coefficients())
    return cls(terms)


@settings(max_examples=500, deadline=None)
@given(polys(OperatorPoly))
def test_operator_render_round_trip(poly):
    assert parse(render(poly), "operator") == poly


@settings(max_examples=500, deadline=None)
@given(polys(PhasePoly))
def test_phase_render_round_trip(poly):
    assert parse(render(poly), "phase") == poly


@settings(max_examples=100, deadline=None)
@given(polys(PhasePoly))
def test_render_is_a_fixpoint(poly):
    once = render(parse(render(poly), "phase"))
    assert render(parse(once, "phase")) == once
