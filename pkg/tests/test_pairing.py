from fractions import Fraction

import pytest

from qpoisson.cartan import sl2, type_a2, type_b2
from qpoisson.cli import RunConfig, cmd_pair, parse_element
from qpoisson.pairing import (
    VARIANTS, _borel_algs, diagonal_support_check, expected_poisson_table,
    hopf_pairing_check, orthogonality_check, pair_elements, poisson_table,
    torus_orthogonality_check,
)
from qpoisson.pbw import convert_basis
from qpoisson.qscalar import q_factorial, qpow

SL2 = RunConfig(cartan_matrix=[[2]], w0_word=[1])


def pair(variant, a, b):
    ax, ay = _borel_algs(variant)
    return pair_elements(variant, parse_element(a, ax)[0], parse_element(b, ay)[0])


def test_pi_minus_examples():
    q = qpow(1)
    assert pair("pi-", "F", "E") == 1 / (qpow(-1) - q)
    assert pair("pi-", "L", "K") == qpow(-1)
    assert pair("pi-", "F^2", "E^2") == q_factorial(2) * q / (qpow(-1) - q) ** 2
    assert pair("pi-", "1", "1") == 1


def test_pi_minus_is_diagonal():
    assert pair("pi-", "F^2", "E") == 0
    assert pair("pi-", "F", "E^3") == 0


def test_flavor_consistency():
    ax, ay = _borel_algs("pi-")
    x = parse_element("Fb^2*L", ax)[0]
    y = parse_element("Ed(2)*K", ay)[0]
    assert pair_elements("pi-", x, y) == pair_elements(
        "pi-", convert_basis(x, "plain"), convert_basis(y, "plain"))


@pytest.mark.parametrize("variant", VARIANTS)
def test_hopf_pairing_axioms(variant):
    rep = hopf_pairing_check(variant, 60, 3, seed=1)
    assert rep.checked > 0 and rep.ok, rep.failures[:1]


@pytest.mark.parametrize("ctor,e", [(sl2, 3), (type_a2, 2), (type_b2, 1)])
def test_diagonal_support(ctor, e):
    rep = diagonal_support_check(ctor(), e)
    assert rep.checked > 0 and rep.ok


def test_orthogonality_and_witness():
    rep, witness = orthogonality_check(2)
    assert rep.ok and rep.checked > 0
    assert not witness.is_laurent()


@pytest.mark.parametrize("ctor", [sl2, type_a2])
def test_torus_orthogonality(ctor):
    assert torus_orthogonality_check(ctor()).ok


def test_rescaled_examples():
    assert cmd_pair("rescaled-H", "F", "E", SL2) == "−1/2"
    assert cmd_pair("rescaled-H", "1", "1", SL2) == "1"
    assert cmd_pair("rescaled-P", "Fb", "Eb", SL2) == "−2"


@pytest.mark.parametrize("ctor", [sl2, type_a2, type_b2])
def test_poisson_table(ctor):
    c = ctor()
    got, want = poisson_table(c), expected_poisson_table(c)
    assert len(want) == 9 * c.n ** 2
    assert got == want


def test_sl2_poisson_table_values():
    t = poisson_table(sl2())
    assert t[("F", 0, "E", 0)] == Fraction(-1, 2)
    assert t[("E", 0, "F", 0)] == Fraction(1, 2)
    assert t[("T", 0, "T", 0)] == 2
    assert t[("F", 0, "F", 0)] == 0
