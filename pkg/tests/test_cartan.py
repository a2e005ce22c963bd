from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from qpoisson.cartan import (
    CartanError, antisymmetric_phi_basis, build_cartan, build_phi, ent_half, sl2,
    type_a2, type_b2, zero_phi,
)

ALL = {"sl2": sl2, "A2": type_a2, "B2": type_b2}


def closure_of_simple_roots(c):
    """Positive roots by closing the simple roots under reflections."""
    seen = {tuple(int(i == j) for j in range(c.n)) for i in range(c.n)}
    frontier = list(seen)
    while frontier:
        beta = frontier.pop()
        for i in range(c.n):
            img = c.reflect(i, beta)
            if all(x >= 0 for x in img) and img not in seen:
                seen.add(img)
                frontier.append(img)
    return seen


def test_sl2():
    c = sl2()
    assert c.N == 1 and c.positive_roots == ((1,),) and c.d == (1,)


def test_a2_convex_order():
    assert type_a2().positive_roots == ((1, 0), (1, 1), (0, 1))


def test_b2():
    c = type_b2()
    assert c.N == 4
    assert c.d == (2, 1)
    assert c.positive_roots == ((1, 0), (1, 1), (1, 2), (0, 1))


@pytest.mark.parametrize("name", sorted(ALL))
def test_convex_order_is_positive_roots(name):
    c = ALL[name]()
    assert len(set(c.positive_roots)) == c.N
    assert set(c.positive_roots) == closure_of_simple_roots(c)


@pytest.mark.parametrize("name", sorted(ALL))
def test_form_on_generators(name):
    c = ALL[name]()
    for i, j in product(range(c.n), repeat=2):
        assert c.form(c.alpha(i), c.omega(j)) == (c.d[i] if i == j else 0)
        assert c.form(c.alpha(i), c.alpha(j)) == c.d[i] * c.A[i][j]
        assert c.form(c.alpha(i), c.omega(j), "angle") == int(i == j)


def test_sl2_forms():
    c = sl2()
    assert c.form((1,), (1,)) == Fraction(1, 2)
    assert c.form(c.alpha(0), (1,)) == 1
    with pytest.raises(CartanError):
        c.form((1,), (1,), "angle")


@pytest.mark.parametrize("name", sorted(ALL))
def test_form_symmetric(name):
    c = ALL[name]()
    vecs = list(product(range(-2, 3), repeat=c.n))
    for x in vecs[::3]:
        for y in vecs[::5]:
            assert c.form(x, y) == c.form(y, x)


def test_dual_lattice_sl2():
    c = sl2()
    assert c.dual_lattice("P") == c.lattice("Q")
    assert c.dual_lattice("Q") == c.lattice("P")


@pytest.mark.parametrize("name", ["sl2", "A2"])
def test_dual_lattice_involutive(name):
    c = ALL[name]()
    for M in (c.lattice("P"), c.lattice("Q")):
        assert c.dual_lattice(c.dual_lattice(M)) == M


@pytest.mark.parametrize("name", sorted(ALL))
def test_dual_lattice_antitone(name):
    c = ALL[name]()
    P, Q = c.lattice("P"), c.lattice("Q")
    assert Q <= P
    assert c.dual_lattice(P) <= c.dual_lattice(Q)


def test_b2_form_integral_on_P():
    # with d = (2, 1) the form is integral on P, so both duals are P
    c = type_b2()
    assert c.dual_lattice("P") == c.lattice("P")
    assert c.dual_lattice("Q") == c.lattice("P")


def test_cartan_errors():
    with pytest.raises(CartanError):
        build_cartan(((2, -1), (-1, 2)), [1, 2])
    with pytest.raises(CartanError):
        build_cartan(((2, 1), (1, 2)), [1, 2, 1])
    with pytest.raises(CartanError):
        build_phi([[1]], sl2())


def test_zero_phi():
    mp = zero_phi(type_a2())
    assert mp.is_zero()
    assert all(x == 0 for t in mp.tau for x in t)
    assert mp.r == mp.rbar


def test_sl2_phi_forced_zero():
    assert antisymmetric_phi_basis(sl2()) == [] or all(
        x == 0 for b in antisymmetric_phi_basis(sl2()) for row in b for x in row)


def a2_phi():
    c = type_a2()
    base = antisymmetric_phi_basis(c)[0]
    return c, build_phi([[2 * x for x in row] for row in base], c)


def test_a2_nonzero_phi():
    c, mp = a2_phi()
    assert not mp.is_zero()
    assert mp.tau == ((0, -3), (3, 0))
    # the sign constraint between tau and the simple roots
    for i, j in product(range(2), repeat=2):
        assert c.form(mp.tau[i], c.alpha(j)) == -c.form(mp.tau[j], c.alpha(i))


@given(st.tuples(st.integers(-4, 4), st.integers(-4, 4)),
       st.tuples(st.integers(-4, 4), st.integers(-4, 4)))
def test_r_rbar_adjoint(x, y):
    c, mp = a2_phi()
    assert c.form(mp.r_apply(x), y) == c.form(x, mp.rbar_apply(y))


def test_ent_half():
    assert [ent_half(t) for t in range(-3, 4)] == [-2, -1, -1, 0, 0, 1, 1]
