import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qpoisson import specialize as sp
from qpoisson.cartan import sl2, type_b2
from qpoisson.cli import parse_element
from qpoisson.pbw import BAR, HAT, Element, Uqg, Uqh
from qpoisson.qscalar import one, qpow
from qpoisson.specialize import (
    ClassicalElement, FrobeniusError, adjointness_check, basis_over_Z0,
    classical_relations_check, co_poisson_check, co_poisson_delta,
    cocommutativity_check, delta_h_coefficient, expected_cobracket,
    frobenius_hat, frobenius_morphism_check, frobenius_route_crosscheck,
    frobenius_tilde, frobenius_tilde_H_check, frobenius_tilde_morphism_check,
    hat_product_crosscheck, quantum_generator, specialize_one,
    tilde_commutative_check, z0_centrality_check,
)

G = Uqg("Q")


def el(text, alg=G):
    return parse_element(text, alg)[0]


def gen(name, side="g"):
    return ClassicalElement.generator(name, side)


def test_specialize_one_examples():
    assert specialize_one(el("Ed(1)")) == gen("e")
    assert specialize_one(el("Kt(0,1)")) == gen("h")
    assert specialize_one(el("E*F - F*E")) == gen("h")
    assert specialize_one(el("Ed(3)")) == gen("e") ** 3 * Fraction(1, 6)


def test_frobenius_hat_examples():
    assert frobenius_hat(el("Ed(3)"), 3) == gen("e")
    assert frobenius_hat(el("Ed(2)"), 3) == ClassicalElement({}, "g")
    assert frobenius_hat(el("Kt(0,3)"), 3) == gen("h")
    assert frobenius_hat(el("Fd(6)"), 3) == gen("f") ** 2 * Fraction(1, 2)
    assert frobenius_hat(el("1"), 3) == 1


def test_frobenius_hat_rejects_bar_input():
    x = Element(Uqg("P"), {(0, 0, 1): one()}, BAR)
    with pytest.raises(FrobeniusError):
        frobenius_hat(x, 3)


@pytest.mark.parametrize("ell", [2, 1, 4])
def test_frobenius_hat_rejects_bad_ell(ell):
    with pytest.raises(ValueError):
        frobenius_hat(el("Ed(3)"), ell)


def test_frobenius_tilde_examples():
    assert frobenius_tilde(gen("Fb", "F"), 3, "g") == Element(Uqg("P"), {(3, 0, 0): one()}, BAR)
    assert frobenius_tilde(gen("L", "F"), 3, "g") == el("L^3", Uqg("P"))


@pytest.mark.parametrize("side", ["g", "h"])
def test_classical_relations(side):
    rep = classical_relations_check(side)
    assert rep.checked == 22 and rep.ok, rep.failures[:1]


def test_tilde_limit_commutative():
    assert tilde_commutative_check().ok


@pytest.mark.parametrize("side", ["g", "h"])
def test_cobracket(side):
    rep = co_poisson_check(side)
    assert rep.checked == 3 and rep.ok, rep.failures


def test_cobracket_h_side_coefficient():
    got = co_poisson_delta(quantum_generator("H", "h"))
    e, f = gen("e", "h"), gen("f", "h")
    T = sp.ClassicalTensor.of
    assert got == (T(e, f) - T(f, e)).scale(8)
    assert delta_h_coefficient() == 8


def test_cobracket_readings_agree_only_for_equal_root_lengths():
    assert delta_h_coefficient(sl2(), 0, "derived") == delta_h_coefficient(sl2(), 0, "unsquared")
    b2 = type_b2()
    assert delta_h_coefficient(b2, 0, "derived") != delta_h_coefficient(b2, 0, "unsquared")


def test_cobracket_antisymmetric():
    for side in ("g", "h"):
        for name in ("F", "H", "E"):
            d = co_poisson_delta(quantum_generator(name, side))
            assert d.swap() == d.scale(-1)


@pytest.mark.parametrize("side", ["g", "h"])
def test_cocommutative_at_one(side):
    rep = cocommutativity_check(side, 20, 2)
    assert rep.checked == 20 and rep.ok


def test_cocommutativity_detects_broken_coproduct(monkeypatch):
    real = sp._h_generator_coproducts(3)
    broken = dict(real)
    e = broken["E"] = dict(real["E"])
    key = ((0, 0, 1), (0, 0, 0))
    e[key] = e.get(key, one()) + one()
    monkeypatch.setattr(sp, "_h_generator_coproducts", lambda T: broken)
    assert not cocommutativity_check("h", 20, 2).ok


hat_key = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))


@pytest.mark.parametrize("side", ["g", "h"])
@given(x=hat_key, y=hat_key)
def test_specialization_is_multiplicative(side, x, y):
    alg = (Uqg if side == "g" else Uqh)("Q")
    a = Element(alg, {(x[0], (0, x[1]), x[2]): one()}, HAT)
    b = Element(alg, {(y[0], (0, y[1]), y[2]): one()}, HAT)
    assert specialize_one(a * b) == specialize_one(a) * specialize_one(b)


@pytest.mark.parametrize("side", ["g", "h"])
def test_frobenius_morphism_ell3(side):
    rep, cert = frobenius_morphism_check(side, 3)
    assert cert.ok and rep.ok and rep.checked == 7 ** 6


@pytest.mark.parametrize("side", ["g", "h"])
def test_hat_product_matches_generic_product(side):
    assert hat_product_crosscheck(side, 1, samples=10).ok


@pytest.mark.parametrize("side", ["g", "h"])
def test_frobenius_routes_agree(side):
    assert frobenius_route_crosscheck(side).ok


def test_frobenius_check_detects_wrong_commutation_sign(monkeypatch):
    real = sp.HatProduct.__init__

    def flipped(self, side, ring):
        real(self, side, ring)
        self.sigma = -self.sigma
    monkeypatch.setattr(sp.HatProduct, "__init__", flipped)
    rep, _ = frobenius_morphism_check("g", 3, 3)
    assert not rep.ok


@pytest.mark.parametrize("side", ["g", "h"])
def test_frobenius_tilde_morphism(side):
    assert frobenius_tilde_morphism_check(3, side).ok


@pytest.mark.parametrize("side", ["g", "h"])
def test_z0_central(side):
    assert z0_centrality_check(3, side).ok


def test_basis_over_z0():
    rep = basis_over_Z0(3, "g")
    assert rep.ok and rep.rank == 27


def test_adjointness():
    rep = adjointness_check(3)
    assert rep.ok and rep.checked > 0


def test_function_side_frobenius():
    assert frobenius_tilde_H_check(3).ok
