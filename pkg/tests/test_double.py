import random

import pytest

from qpoisson.cli import parse_element
from qpoisson.double import (
    Double, double_element, double_hopf, project_tensor, project_to_uqg, straighten,
    straightening_suite,
)
from qpoisson.pbw import (
    Element, Uqg, antipode, coproduct, counit, random_key, render, rewrite_oracle,
)

D = Double("P")


def el(text, alg=D):
    return parse_element(text, alg)[0]


def test_bar_cross_relation():
    x = double_element("P", (0, 0, 0, 1), "bar") * double_element("P", (1, 0, 0, 0), "bar")
    assert render(x) == "Eb ⊗ Fb + (q^-1 − q) L^2 ⊗ 1 + (q − q^-1) 1 ⊗ K^-1"
    assert x == rewrite_oracle(["Fb", "Eb"], D)


def test_ordered_product_is_unchanged():
    x = double_element("Q", (1, 0, 0, 0), "divided") * double_element("Q", (0, 0, 0, 1), "divided")
    assert x == double_element("Q", (1, 0, 0, 1), "divided")


def test_degree_one_straightening_matches_oracle():
    a, b = (1, 0, 0, 1), (1, 0, 0, 1)
    law = straighten(a, b)
    word = ["E", "F", "E", "F"]
    assert Element(D, law) == rewrite_oracle(word, D)


def test_double_hopf_examples():
    _, _, eps = double_hopf(el("Fb"))
    assert eps == 0
    assert antipode(el("L")) == el("L^-1")


@pytest.mark.parametrize("lattice,flavor", [("P", "bar"), ("Q", "divided")])
def test_straightening_suite(lattice, flavor):
    n, fails = straightening_suite(lattice, flavor, 2)
    assert n == 3 ** 8 and not fails


def test_plain_law_matches_oracle():
    from itertools import product
    for r, s, r2, s2 in product(range(3), repeat=4):
        a, b = (r, 1, 0, s), (r2, 0, 1, s2)
        word = ["E"] * r + ["L"] + ["F"] * s + ["E"] * r2 + ["K"] + ["F"] * s2
        assert Element(D, straighten(a, b)) == rewrite_oracle(word, D)


def test_naive_summation_bound_fails():
    n, fails = straightening_suite("P", "bar", 1, bound="naive")
    assert fails


def test_projection_kills_ideal():
    assert project_to_uqg(el("L^2") - el("K")).is_zero()


def test_projection_restraightens():
    assert project_to_uqg(el("Eb*Fb")) == parse_element("Eb*Fb", Uqg("P"))[0]


def test_projection_is_hopf_morphism():
    rng = random.Random(3)
    for _ in range(25):
        x = Element(D, {random_key(D, rng, 2): 1})
        y = Element(D, {random_key(D, rng, 2): 1})
        px, py = project_to_uqg(x), project_to_uqg(y)
        assert project_to_uqg(x * y) == px * py
        assert project_tensor(coproduct(x)) == coproduct(px)
        assert project_to_uqg(antipode(x)) == antipode(px)
        assert counit(x) == counit(px)
