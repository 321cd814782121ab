from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bethecs import tensoralg as ta


@given(st.integers(1, 8), st.data())
def test_bits_roundtrip(L, data):
    code = data.draw(st.integers(0, 2**L - 1))
    bits = ta.bits_of(code, L)
    assert len(bits) == L
    assert ta.code_of(bits) == code
    assert ta.magnon_count(code, L) == sum(bits)


def test_basis_convention():
    # site 1 is the most significant bit, up = 0
    assert ta.bits_of(0b100, 3) == (1, 0, 0)
    v = ta.coordinate_state(3, [1])
    assert v[0b100] == 1 and np.sum(np.abs(v)) == 1
    assert ta.vacuum(3)[0] == 1
    assert list(ta.sector_indices(3, 1)) == [1, 2, 4]
    with pytest.raises(ValueError):
        ta.bits_of(8, 3)
    with pytest.raises(ValueError):
        ta.coordinate_state(3, [4])


@pytest.mark.parametrize("L", [2, 3, 4])
def test_permutation_matches_pauli_formula(L):
    for i, j in combinations(range(1, L + 1), 2):
        want = 0.5 * (np.eye(2**L) + sum(ta.sigma(a, i, L) @ ta.sigma(a, j, L) for a in "xyz"))
        P = ta.permutation_operator(i, j, L)
        assert np.allclose(P, want, atol=1e-15)
        assert np.allclose(P @ P, np.eye(2**L))


def test_permutation_errors():
    with pytest.raises(ValueError):
        ta.permutation_operator(2, 2, 3)
    with pytest.raises(ValueError):
        ta.pair_projector(1, 2, 3, 0)


def test_projectors_and_twist():
    L = 3
    for s in (1, -1):
        Pi = ta.pair_projector(1, 2, L, s)
        assert np.allclose(Pi @ Pi, Pi)
    assert np.allclose(ta.pair_projector(1, 2, L, 1) + ta.pair_projector(1, 2, L, -1), np.eye(8))
    k = 1.7 - 0.3j
    K = ta.twist_operator(k, L)
    Sz = ta.global_sl2(L)[2]
    assert np.allclose(np.diag(K), k ** (2 * np.diag(Sz).real))


def test_translation_is_cyclic():
    L = 4
    U = ta.translation_operator(L)
    assert np.allclose(np.linalg.matrix_power(U, L), np.eye(2**L))
    v = ta.coordinate_state(L, [2])
    w = U @ v
    assert np.isclose(np.linalg.norm(w), 1) and np.count_nonzero(np.abs(w) > 0.5) == 1


def test_sl2_algebra_and_casimir():
    L = 4
    Sp, Sm, Sz = ta.global_sl2(L)
    assert np.allclose(ta.commutator(Sp, Sm), 2 * Sz)
    assert np.allclose(ta.commutator(Sz, Sp), Sp)
    C = ta.casimir_operator(L)
    # Sum P_ij = L(L-4)/4 + S.S for spin 1/2
    assert np.allclose(ta.sum_permutations(L), L * (L - 4) / 4 * np.eye(2**L) + C)
    assert ta.relative_commutator(C, Sp) < 1e-15


@settings(max_examples=25, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False), min_size=2, max_size=2),
       st.integers(0, 2 ** 31))
def test_operator_polynomial_algebra(pts, seed):
    rng = np.random.default_rng(seed)
    p = ta.OperatorPolynomial(rng.normal(size=(3, 4, 4)) + 1j * rng.normal(size=(3, 4, 4)))
    q = ta.OperatorPolynomial(rng.normal(size=(2, 4, 4)))
    u, s = pts
    assert np.allclose((p @ q)(u), p(u) @ q(u))
    assert np.allclose((p + q)(u), p(u) + q(u))
    assert np.allclose((p - q)(u), p(u) - q(u))
    assert np.allclose(p.shifted(s)(u), p(u + s))
    v = rng.normal(size=4)
    assert np.allclose(np.polyval(p.apply(v)[::-1], u), p(u) @ v)


def test_operator_polynomial_shape_checks():
    with pytest.raises(ValueError):
        ta.OperatorPolynomial(np.zeros((2, 3)))
    c = ta.OperatorPolynomial.constant(np.eye(2))
    assert c.degree == 0 and c.dim == 2
    assert ta.relative_commutator(np.zeros((2, 2)), np.eye(2)) == 0.0
