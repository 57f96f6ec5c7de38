from fractions import Fraction
from itertools import permutations

import pytest

from cohenmap.algebra import (
    HBAR,
    ONE,
    PLANCK_H,
    OperatorPoly,
    PhasePoly,
    ScalarSum,
    adjoint,
    standard_order,
    sum_polys,
)
from cohenmap.golden import ROWS
from cohenmap.kernels import TABLE_KERNELS, InsufficientOrderError, KernelSpec, kernel_from_name, taylor
from cohenmap.parser import parse
from cohenmap.transforms import (
    PQ_ORDER,
    OBSERVABLE_FORWARD,
    MapDirection,
    apply_map,
    observable_image,
    op_monomial_to_phase,
    phase_monomial_to_op,
    quantize,
    state_from_image,
    state_image,
)
from oracles import closed_form, dual_form, image_oracle, quantize_oracle

KERNEL_IDS = [k.name for k in TABLE_KERNELS]
MARGINAL_KERNELS = [k for k in TABLE_KERNELS if k.marginal]
LOW_DEGREE = [(n, m) for n in range(4) for m in range(4) if n + m <= 4]


def conj_phase(g: PhasePoly) -> PhasePoly:
    return g.conjugate_coefficients()


# generating-function oracles first


@pytest.mark.parametrize("spec", TABLE_KERNELS, ids=KERNEL_IDS)
@pytest.mark.parametrize("n,m", LOW_DEGREE)
def test_quantize_matches_generating_function(spec, n, m):
    f = closed_form(spec.variant)
    assert quantize(PhasePoly.monomial(n, m), spec) == quantize_oracle(f, n, m)


@pytest.mark.parametrize("spec", TABLE_KERNELS, ids=KERNEL_IDS)
@pytest.mark.parametrize("n,m", LOW_DEGREE)
def test_observable_image_matches_generating_function(spec, n, m):
    f = closed_form(spec.variant)
    assert observable_image(OperatorPoly.monomial(n, m), spec) == image_oracle(f, n, m)


@pytest.mark.parametrize("spec", TABLE_KERNELS, ids=KERNEL_IDS)
@pytest.mark.parametrize("n,m", [(0, 0), (1, 1), (2, 1), (1, 3)])
def test_state_maps_use_dual_kernel_and_h(spec, n, m):
    dual = dual_form(closed_form(spec.variant))
    rho = OperatorPoly.monomial(n, m)
    assert state_image(rho, spec) == image_oracle(dual, n, m).scale(PLANCK_H.inverse())
    F = PhasePoly.monomial(n, m)
    assert state_from_image(F, spec) == quantize_oracle(dual, n, m).scale(PLANCK_H)


def test_non_unit_lambda_against_oracle():
    spec = KernelSpec("husimi_q", Fraction(3, 2))
    f = closed_form("husimi_q", Fraction(3, 2))
    for n, m in [(2, 0), (1, 2), (2, 2)]:
        assert quantize(PhasePoly.monomial(n, m), spec) == quantize_oracle(f, n, m)
        assert observable_image(OperatorPoly.monomial(n, m), spec) == image_oracle(f, n, m)


@pytest.mark.parametrize("name,textbook,canonical", ROWS)
def test_reference_images_of_q2p2(name, textbook, canonical):
    image = observable_image(parse("qh^2*ph^2", "operator"), kernel_from_name(name))
    assert image == parse(textbook, "phase")
    assert image.render() == canonical


@pytest.mark.parametrize("spec", TABLE_KERNELS, ids=KERNEL_IDS)
def test_round_trips_are_exact(spec):
    for n in range(5):
        for m in range(5):
            G = OperatorPoly.monomial(n, m)
            assert quantize(observable_image(G, spec), spec) == G
            g = PhasePoly.monomial(n, m)
            assert observable_image(quantize(g, spec), spec) == g
            assert state_from_image(state_image(G, spec), spec) == G


@pytest.mark.parametrize("spec", MARGINAL_KERNELS, ids=[k.name for k in MARGINAL_KERNELS])
def test_reverse_order_rule(spec):
    s = taylor(spec, 12)
    for n in range(6):
        for m in range(6):
            direct = op_monomial_to_phase(n, m, s, ordered=PQ_ORDER)
            via_reorder = observable_image(standard_order([("p", m), ("q", n)]), spec, order=12)
            assert direct == via_reorder, (n, m)


def test_images_are_not_linear_in_the_kernel():
    G = parse("qh^2*ph^2", "operator")
    cos_image = observable_image(G, KernelSpec("rivier_cos"))
    average = (observable_image(G, KernelSpec("standard")) + observable_image(G, KernelSpec("antistandard"))).scale(
        ScalarSum.of(Fraction(1, 2))
    )
    assert cos_image - average == PhasePoly.constant(HBAR * HBAR)


@pytest.mark.parametrize("spec", [k for k in TABLE_KERNELS if k.variant not in ("standard", "antistandard")],
                         ids=lambda k: k.name)
def test_hermitian_conjugation_conjugates_images(spec):
    for n, m in LOW_DEGREE:
        G = OperatorPoly.monomial(n, m)
        assert observable_image(adjoint(G), spec) == conj_phase(observable_image(G, spec))


def test_standard_and_antistandard_are_conjugate_partners():
    std, anti = KernelSpec("standard"), KernelSpec("antistandard")
    for n, m in LOW_DEGREE:
        G = OperatorPoly.monomial(n, m)
        assert observable_image(adjoint(G), std) == conj_phase(observable_image(G, anti))


def _all_orderings(n, m):
    words = set(permutations("q" * n + "p" * m))
    return sum_polys([standard_order("".join(w)) for w in words], OperatorPoly()).scale(
        ScalarSum.of(Fraction(1, len(words)))
    )


@pytest.mark.parametrize("n,m", LOW_DEGREE)
def test_weyl_rule_is_full_symmetrization(n, m):
    assert quantize(PhasePoly.monomial(n, m), KernelSpec("weyl")) == _all_orderings(n, m)


@pytest.mark.parametrize("n,m", LOW_DEGREE)
def test_born_jordan_rule(n, m):
    words = [standard_order([("q", k), ("p", m), ("q", n - k)]) for k in range(n + 1)]
    want = sum_polys(words, OperatorPoly()).scale(ScalarSum.of(Fraction(1, n + 1)))
    assert quantize(PhasePoly.monomial(n, m), KernelSpec("born_jordan_sinc")) == want


@pytest.mark.parametrize("n,m", LOW_DEGREE)
def test_rivier_rule_and_kirkwood_orders(n, m):
    g = PhasePoly.monomial(n, m)
    qp = OperatorPoly.monomial(n, m)
    pq = standard_order([("p", m), ("q", n)])
    assert quantize(g, KernelSpec("rivier_cos")) == (qp + pq).scale(ScalarSum.of(Fraction(1, 2)))
    assert quantize(g, KernelSpec("standard")) == qp
    assert quantize(g, KernelSpec("antistandard")) == pq


def test_normal_and_antinormal_number_operator():
    # |z|^2 with z = (q + i p)/sqrt(2 hbar) quantizes to a^dag a (P) or a a^dag (Q)
    g = parse("q^2 + p^2", "phase").scale(ScalarSum.of(Fraction(1, 2), hbar_pow=-1))
    H = parse("qh^2 + ph^2", "operator").scale(ScalarSum.of(Fraction(1, 2), hbar_pow=-1))
    half = OperatorPoly.constant(Fraction(1, 2))
    assert quantize(g, KernelSpec("sudarshan_p")) == H - half
    assert quantize(g, KernelSpec("husimi_q")) == H + half


@pytest.mark.parametrize("spec", MARGINAL_KERNELS, ids=[k.name for k in MARGINAL_KERNELS])
def test_pure_position_and_momentum_powers_are_unchanged(spec):
    for n in range(11):
        assert observable_image(OperatorPoly.monomial(n, 0), spec) == PhasePoly.monomial(n, 0)
        assert observable_image(OperatorPoly.monomial(0, n), spec) == PhasePoly.monomial(0, n)


@pytest.mark.parametrize("spec", TABLE_KERNELS, ids=KERNEL_IDS)
def test_constant_maps_to_h(spec):
    s = taylor(spec, 2)
    assert phase_monomial_to_op(0, 0, s, include_h_factor=True) == OperatorPoly.constant(PLANCK_H)
    assert state_from_image(PhasePoly.constant(ONE), spec) == OperatorPoly.constant(PLANCK_H)


def test_explicit_low_order_is_rejected():
    with pytest.raises(InsufficientOrderError):
        observable_image(OperatorPoly.monomial(2, 2), KernelSpec("weyl"), order=3)


def test_map_argument_checks():
    with pytest.raises(TypeError):
        apply_map(PhasePoly.monomial(1, 0), KernelSpec("weyl"), OBSERVABLE_FORWARD)
    with pytest.raises(ValueError):
        MapDirection("op_to_phase", "observable_map", True)
    with pytest.raises(ValueError):
        MapDirection("sideways", "state_map", False)
