from fractions import Fraction
from itertools import permutations, product

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from bethecs import dunkl_jack as dj
from bethecs.dunkl_jack import LaurentPoly

exps = st.lists(st.integers(-2, 2), min_size=3, max_size=3).map(tuple)
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=7)
polys = st.dictionaries(exps, coeffs, max_size=4).map(lambda d: LaurentPoly(3, d))


def _to_sympy(p: LaurentPoly, zs):
    return sum(sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[z**e for z, e in zip(zs, a)])
               for a, c in p.terms.items()) if p.terms else sympy.Integer(0)


def _dunkl_sympy(i, f, zs, g):
    """Reference Dunkl operator written directly as a rational function."""
    N = len(zs)
    k = i - 1
    out = g * zs[k] * sympy.diff(f, zs[k]) + sympy.Rational(N + 1 - 2 * i, 2) * f
    for j in range(N):
        if j == k:
            continue
        sf = f.subs({zs[k]: zs[j], zs[j]: zs[k]}, simultaneous=True)
        if j < k:
            out -= zs[k] / (zs[j] - zs[k]) * (f - sf)
        else:
            out += zs[j] / (zs[k] - zs[j]) * (f - sf)
    return sympy.cancel(out)


@settings(max_examples=30, deadline=None)
@given(polys, polys, st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_laurent_ring_matches_evaluation(p, q, pt):
    point = [complex(x) + 0.37j for x in pt]
    assert np.isclose((p * q).evaluate(point), p.evaluate(point) * q.evaluate(point))
    assert np.isclose((p + q).evaluate(point), p.evaluate(point) + q.evaluate(point))
    assert (p - p).is_zero()
    assert p.swap(0, 2).swap(0, 2) == p
    assert LaurentPoly.from_dict(3, p.to_dict()) == p


@settings(max_examples=20, deadline=None)
@given(polys, st.integers(0, 2), st.integers(0, 2))
def test_divide_by_difference_exact(p, i, j):
    if i == j:
        return
    diff = LaurentPoly.variable(3, i) - LaurentPoly.variable(3, j)
    assert dj.divide_by_difference(p * diff, i, j) == p
    if not p.is_zero() and p.swap(i, j) != p:
        # antisymmetric part is always divisible
        q = dj.divide_by_difference(p - p.swap(i, j), i, j)
        assert q * diff == p - p.swap(i, j)


def test_divisibility_error():
    with pytest.raises(dj.DivisibilityError):
        dj.divide_by_difference(LaurentPoly.variable(2, 0), 0, 1)


@settings(max_examples=15, deadline=None)
@given(polys, st.integers(1, 3), st.sampled_from([Fraction(1), Fraction(2), Fraction(1, 3)]))
def test_dunkl_matches_reference(p, i, beta):
    zs = sympy.symbols("z1:4")
    got = _to_sympy(dj.dunkl_apply(i, p, beta), zs)
    want = _dunkl_sympy(i, _to_sympy(p, zs), zs, sympy.Rational(beta.denominator, beta.numerator))
    assert sympy.simplify(got - want) == 0


@settings(max_examples=10, deadline=None)
@given(polys)
def test_dunkl_operators_commute(p):
    b = Fraction(3, 2)
    for i, j in ((1, 2), (1, 3), (2, 3)):
        assert dj.dunkl_apply(i, dj.dunkl_apply(j, p, b), b) == dj.dunkl_apply(j, dj.dunkl_apply(i, p, b), b)


def test_coupling_gamma():
    assert dj.coupling_gamma(beta=2) == Fraction(1, 2)
    assert dj.coupling_gamma(gamma=0) == 0
    assert dj.coupling_gamma(beta="3/2") == Fraction(2, 3)
    with pytest.raises(ValueError):
        dj.coupling_gamma()


def test_compositions_and_orders():
    c = dj.Composition((1, 0, 1, 2))
    assert c.partition == (2, 1, 1, 0)
    assert [c.sigma(i) for i in range(1, 5)] == [2, 4, 3, 1]
    assert dj.dominates((3, 0), (2, 1)) and not dj.dominates((2, 1), (3, 0))
    assert dj.composition_lower((0, 1), (1, 0))
    assert dj.delta_eigenvalue((1, 0), beta=1) == [Fraction(3, 2), Fraction(-1, 2)]


def test_two_variable_jack_closed_form():
    for beta in (Fraction(1), Fraction(2), Fraction(5, 3)):
        E = dj.nonsym_jack((1, 0), beta)
        assert E == LaurentPoly.monomial((1, 0)) + LaurentPoly.monomial((0, 1), beta / (beta + 1))
        assert dj.nonsym_jack((0, 1), beta) == LaurentPoly.monomial((0, 1))


@pytest.mark.parametrize("mu", [(2, 0, 1), (0, 3, 1), (1, 2, 0), (1, 0, 1, 2), (2, 2, 0)])
def test_recursion_matches_bruteforce(mu):
    for beta in (Fraction(2), Fraction(1, 3)):
        assert dj.nonsym_jack(mu, beta) == dj.nonsym_jack_bruteforce(mu, beta)


def test_jack_is_monic_and_triangular():
    for mu in product(range(3), repeat=3):
        E = dj.nonsym_jack(mu, Fraction(2))
        assert E.coeff(mu) == 1
        assert all(dj.composition_lower(a, mu) for a in E.terms if a != mu)


def test_translation_by_elementary_product():
    # E_{mu + (1,...,1)} = z_1...z_N E_mu
    b = Fraction(2)
    for mu in [(1, 0, 2), (0, 1, 0)]:
        shifted = tuple(m + 1 for m in mu)
        assert dj.nonsym_jack(shifted, b) == dj.nonsym_jack(mu, b).shift(dj.elementary_product(3))


def test_symmetric_jacks_known_coefficients():
    b = Fraction(3)
    alpha = 1 / b
    P2 = dj.symmetric_jack((2, 0), b)
    assert P2.coeff((1, 1)) == 2 / (1 + alpha)
    P21 = dj.symmetric_jack((2, 1, 0), b)
    assert P21.coeff((1, 1, 1)) == 6 / (alpha + 2)
    for perm in permutations(range(3)):
        assert P21.permute(perm) == P21


def test_antisym_reduce():
    c, P, A = dj.antisym_reduce((4, 1, 0), Fraction(2))
    assert P == dj.symmetric_jack((2, 0, 0), Fraction(3))
    assert A == (dj.vandermonde(3) * P).scale(c)
    assert dj.antisym_reduce((1, 1, 0), 2)[0] == 0
    with pytest.raises(ValueError):
        dj.antisym_reduce((0, 1), 2)


def test_degenerate_parameter():
    with pytest.raises((dj.DegenerateParameterError, ZeroDivisionError)):
        dj.nonsym_jack((1, 0), beta=-1)


def test_perm_sign_and_symmetrize():
    assert dj.perm_sign((1, 0, 2)) == -1 and dj.perm_sign((1, 2, 0)) == 1
    V = dj.vandermonde(3)
    assert dj.symmetrize(V, sign=-1) == V
    assert dj.symmetrize(V, sign=1).is_zero()
