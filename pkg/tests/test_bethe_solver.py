from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bethecs import bethe_solver as bs
from bethecs import tensoralg as ta
from bethecs import xxx_chain as xc


def _generic(seed, L=4, kappa=1.3):
    rng = np.random.default_rng(seed)
    return xc.ChainSpec(L, rng.normal(size=L) * 0.8, kappa)


def test_q_function_helpers():
    q = bs.poly_from_roots([1.0, 2j])
    assert np.allclose(q, [2j * 1.0, -(1 + 2j), 1])
    assert list(bs.sort_roots([1j, -1, 0.5])) == [-1, 1j, 0.5] or len(bs.sort_roots([1j, -1, 0.5])) == 3


def test_two_site_homogeneous_root_zero():
    spec = xc.ChainSpec(2, [0, 0], 1.0)
    sols = bs.newton_solve(spec, 1)
    finite = [s for s in sols if not s.infinite]
    assert len(finite) == 1 and abs(finite[0].roots[0]) < 1e-9
    # singlet eigenvalue 2u^2 + 3/2 of t(u) = A + D at L = 2
    assert np.allclose(finite[0].tau, [1.5, 0, 2], atol=1e-8)
    assert any(s.infinite == 1 for s in sols)


def test_four_site_homogeneous_magnons():
    spec = xc.ChainSpec(4, [0, 0, 0, 0], 1.0)
    one = sorted(float(s.roots[0].real) for s in bs.newton_solve(spec, 1) if not s.infinite)
    assert np.allclose(one, [-0.5, 0, 0.5], atol=1e-8)
    two = [s.roots for s in bs.newton_solve(spec, 2) if not s.infinite and len(s.roots) == 2]
    real_pairs = [np.sort(r.real) for r in two if np.all(np.abs(r.imag) < 1e-8)]
    assert any(np.allclose(r, [-1 / (2 * np.sqrt(3)), 1 / (2 * np.sqrt(3))], atol=1e-8) for r in real_pairs)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_newton_matches_transfer_spectrum(seed):
    spec = _generic(seed, kappa=np.exp(0.4 + 0.3j))
    mono = xc.monodromy(spec)
    for M in range(spec.L + 1):
        sols = [s for s in bs.newton_solve(spec, M) if s.residual < 1e-9]
        assert len(sols) == comb(spec.L, M)
        C = bs.transfer_sector(spec, M, mono)
        u = 0.41 - 0.17j
        T = sum(c * u**n for n, c in enumerate(C))
        ev = np.linalg.eigvals(T)
        for s in sols:
            assert np.min(np.abs(ev - np.polyval(s.tau[::-1], u))) < 1e-8 * max(1, np.abs(ev).max())


@settings(max_examples=6, deadline=None)
@given(st.integers(0, 2**31))
def test_bethe_vectors_are_eigenvectors(seed):
    rng = np.random.default_rng(seed)
    spec = xc.ChainSpec(3, rng.normal(size=3), complex(np.exp(rng.normal() * 0.5 + 1j * rng.normal())))
    mono = xc.monodromy(spec)
    for M in (1, 2):
        for s in bs.newton_solve(spec, M):
            assert np.max(np.abs(bs.bethe_residual_ratio(spec, s.roots))) < 1e-8
            v = bs.aba_state(spec, s.roots, mono=mono)
            assert not bs.is_zero_state(spec, s.roots, v, mono)
            assert bs.eigen_residual(spec, v, s.tau, [0.3, 1j, -2 + 0.5j], mono) < 1e-9


def test_tq_extract_matches_newton():
    spec = _generic(3)
    mono = xc.monodromy(spec)
    for M in range(5):
        tq = [a for a in bs.tq_extract(spec, M, mono) if a.admissible]
        nw = bs.newton_solve(spec, M)
        assert len(tq) == comb(4, M)
        for a in tq:
            if M:
                assert min(np.abs(bs.sort_roots(a.roots) - bs.sort_roots(b.roots)).max() for b in nw) < 1e-8


def test_tq_periodic_flags_descendants():
    spec = _generic(5, kappa=1.0)
    sols = bs.tq_extract(spec, 2)
    assert sum(s.multiplicity for s in sols) == 6
    assert any(s.infinite > 0 and not s.admissible for s in sols)


def test_tau_from_q_and_off_shell():
    spec = _generic(0)
    s = bs.newton_solve(spec, 2)[0]
    tau = bs.tau_from_Q(spec, s.roots)
    assert np.allclose(tau, s.tau, atol=1e-8)
    Q = bs.QFunction.from_coeffs(bs.poly_from_roots(s.roots))
    assert np.allclose(bs.tau_from_Q(spec, Q), s.tau, atol=1e-8)
    with pytest.raises(bs.NotOnShellError):
        bs.tau_from_Q(spec, [0.123, -0.77])
    data = bs.tau_from_Q(spec, [0.123, -0.77], require_on_shell=False)
    assert not data.on_shell


@pytest.mark.parametrize("kappa", [1.3, 1.0])
def test_dual_q_satisfies_qq(kappa):
    spec = _generic(1, kappa=kappa)
    for s in bs.newton_solve(spec, 2):
        if s.infinite:
            continue
        Qt, res = bs.dual_q(spec, s.roots)
        assert res < 1e-8
        Qt = bs.QFunction.from_coeffs(Qt)
        assert np.abs(bs.qq_residual(spec, s.roots, Qt)).max() < 1e-8
        # Q and its dual share no root for a physical solution
        assert min(abs(a - b) for a in s.roots for b in Qt.roots) > 1e-6
    with pytest.raises(ValueError):
        bs.qq_residual(spec, [0.1], [0.1])


def test_charge_eigenvalues_match_operators():
    for kappa in (1.7 - 0.2j, 1.0):
        spec = _generic(2, kappa=kappa)
        mono = xc.monodromy(spec)
        ops = [xc.charge_coefficients(spec, n) for n in (1, 2, 3)]
        for M in (1, 2):
            for s in bs.newton_solve(spec, M):
                if s.infinite:
                    continue
                v = bs.aba_state(spec, s.roots, mono=mono)
                v = v / np.linalg.norm(v)
                ce = bs.charge_eigenvalues(spec, s)
                ser = bs.charges_from_series(spec, s.tau)
                assert np.allclose(ops[0] @ v, ce.tau1 * v, atol=1e-8)
                assert np.allclose(ops[1] @ v, ce.tau2 * v, atol=1e-8)
                assert np.allclose(ser[:2], [ce.tau1, ce.tau2], atol=1e-8)
                if kappa == 1.0:
                    assert np.allclose(ops[2] @ v, ce.tau3_periodic * v, atol=1e-8)
                    assert np.isclose(ser[2], ce.tau3_periodic, atol=1e-8)


def test_gt_solution_is_a_eigenvector():
    spec = _generic(4, kappa=1e8)
    mono = xc.monodromy(spec)
    g = bs.gt_solution(spec, [1, 3])
    v = bs.aba_state(spec, g.roots, mono=mono)
    u = 0.3 + 0.2j
    Av = mono.A(u) @ v
    assert np.linalg.norm(Av - np.polyval(g.tau[::-1], u) * v) / np.linalg.norm(Av) < 1e-10


def test_aba_state_rejects_bad_reference():
    spec = _generic(0)
    with pytest.raises(bs.VacuumError):
        bs.aba_state(spec, [0.1], vacuum=ta.coordinate_state(4, [2]))


def test_explicit_seeds():
    spec = _generic(6)
    ref = bs.newton_solve(spec, 1)
    again = bs.newton_solve(spec, 1, seed_strategy=[r.roots + 1e-3 for r in ref])
    assert len(again) == len(ref)
    for a in again:
        assert min(abs(a.roots[0] - b.roots[0]) for b in ref) < 1e-9
