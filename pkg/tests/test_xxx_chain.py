import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bethecs import tensoralg as ta
from bethecs import xxx_chain as xc

finite = st.floats(-2, 2, allow_nan=False)


def _spec(seed, L=4, kappa=1.3 + 0.2j):
    rng = np.random.default_rng(seed)
    return xc.ChainSpec(L, rng.normal(size=L) + 0.3j * rng.normal(size=L), kappa)


def test_spec_validation_and_json():
    s = xc.ChainSpec(2, [0.1, 0.2 + 1j], 2.0)
    assert xc.ChainSpec.from_json(s.to_json()) == s
    assert s.with_kappa(3).kappa == 3
    with pytest.raises(ValueError):
        xc.ChainSpec(3, [0, 1], 1)
    with pytest.raises(ValueError):
        xc.ChainSpec(1, [0], 0)


def test_r_matrix_forms():
    u = 0.3 - 0.7j
    P = ta.permutation_operator(1, 2, 2)
    assert np.allclose(xc.r_check(u), P @ xc.r_matrix(u))
    # R(u) R(-u) = -(u^2 + 1)
    assert np.allclose(xc.r_matrix(u) @ xc.r_matrix(-u), -(u * u + 1) * np.eye(4))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31), finite, finite)
def test_yang_baxter(seed, a, b):
    P12 = np.kron(ta.permutation_operator(1, 2, 2), np.eye(2))
    P23 = np.kron(np.eye(2), ta.permutation_operator(1, 2, 2))
    P13 = ta.permutation_operator(1, 3, 3)
    I = np.eye(8)

    def R(P, u):
        return u * I + 1j * P

    u, v = a + 0.1j, b - 0.2j
    lhs = R(P12, u - v) @ R(P13, u) @ R(P23, v)
    rhs = R(P23, v) @ R(P13, u) @ R(P12, u - v)
    assert np.allclose(lhs, rhs)


def test_monodromy_matches_direct_product():
    s = _spec(0)
    m = xc.monodromy(s)
    for u in (0.37 - 0.21j, 1.5 + 0.4j):
        assert np.abs(m.matrix(u) - xc.monodromy_direct(s, u)).max() < 1e-12


def test_b_on_vacuum_single_magnon_form():
    s = _spec(0)
    th = s.thetas
    u = 0.37 - 0.21j
    v = xc.monodromy(s).B(u) @ ta.vacuum(s.L)
    want = sum(1j * np.prod([u - th[j] + 0.5j for j in range(i)])
               * np.prod([u - th[j] - 0.5j for j in range(i + 1, s.L)])
               * ta.coordinate_state(s.L, [i + 1]) for i in range(s.L))
    assert np.abs(v - want).max() < 1e-12


def test_vacuum_eigenvalue():
    s = _spec(1)
    u = 0.2 + 0.9j
    t = xc.transfer(s)(u)
    Qp = np.polyval(xc.theta_poly(s.thetas, 0.5j)[::-1], u)
    Qm = np.polyval(xc.theta_poly(s.thetas, -0.5j)[::-1], u)
    assert np.allclose(t @ ta.vacuum(s.L), (s.kappa * Qp + Qm / s.kappa) * ta.vacuum(s.L))


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 2**31))
def test_transfer_commutes_and_conserves_sz(seed):
    rng = np.random.default_rng(seed)
    s = _spec(seed, L=4, kappa=complex(np.exp(rng.normal() + 1j * rng.normal())))
    t = xc.transfer(s)
    u, v = rng.normal(size=2) + 1j * rng.normal(size=2)
    assert ta.relative_commutator(t(u), t(v)) < 1e-12
    assert ta.relative_commutator(t(u), ta.global_sl2(4)[2]) < 1e-12


def test_expansion_matches_closed_form_charges():
    s = _spec(0)
    X = xc.transfer_expansion(s, 4)
    assert np.abs(X[0] - (s.kappa + 1 / s.kappa) * np.eye(16)).max() < 1e-12
    for n in (1, 2, 3):
        assert np.abs(X[n] - 1j**n * xc.charge_coefficients(s, n)).max() < 1e-10
    with pytest.raises(ValueError):
        xc.charge_coefficients(s, 4)


def test_periodic_charges_are_sl2_invariant():
    s = _spec(2, kappa=1.0)
    Sp = ta.global_sl2(4)[0]
    for n in (2, 3):
        assert ta.relative_commutator(xc.charge_coefficients(s, n), Sp) < 1e-14


def test_scattering_operators():
    s = _spec(0)
    G = xc.scattering_operators(s)
    assert np.abs(G[0] @ G[1] @ G[2] @ G[3] - ta.twist_operator(s.kappa, 4)).max() < 1e-12
    # homogeneous limit: every G_j is the twisted shift
    h = xc.ChainSpec(3, [0, 0, 0], 2.0)
    with pytest.warns(RuntimeWarning):
        G = xc.scattering_operators(h)
    shift = ta.twist_operator(2.0, 3, [3]) @ ta.translation_operator(3).T
    for g in G:
        assert np.abs(g - shift).max() < 1e-12


def test_exchange_relation():
    s = _spec(0)
    for j in (1, 2, 3):
        assert xc.exchange_residual(s, j, 0.37 - 0.21j) < 1e-14
    fused = xc.ChainSpec(2, [0.0, 1j], 1.0)
    with pytest.raises(xc.FusionError):
        xc.exchange_conjugation(fused, 1)


def test_quantum_determinant_is_central_scalar():
    s = _spec(3)
    u = 0.4 + 0.3j
    q = xc.quantum_determinant(s, u)
    want = np.prod([(u - t + 1.5j) * (u - t - 0.5j) for t in s.thetas])
    assert np.allclose(q, want * np.eye(16))


def test_local_hamiltonians_commute_with_transfer():
    s = _spec(4, kappa=1.0)
    t = xc.transfer(s)(0.3)
    for H in xc.local_hamiltonians(s):
        assert ta.relative_commutator(H, t) < 1e-6
