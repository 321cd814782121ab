import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bethecs import freezing_hs as fz
from bethecs import tensoralg as ta

rc = ta.relative_commutator


def test_hs_hamiltonian_symmetries():
    for N in (4, 5, 6):
        H = fz.hs_hamiltonian(N)
        assert np.allclose(H, H.conj().T)
        for S in ta.global_sl2(N):
            assert rc(H, S) < 1e-14
        assert rc(H, ta.translation_operator(N)) < 1e-14


def test_t3_forms_agree_and_commute():
    N = 6
    T3 = fz.hs_t3(N)
    assert np.abs(T3 - fz.hs_t3_ordered(N)).max() < 1e-12
    assert rc(T3, fz.hs_hamiltonian(N)) < 1e-14
    assert rc(T3, ta.global_sl2(N)[0]) < 1e-14
    assert rc(T3, ta.translation_operator(N)) < 1e-14


@settings(max_examples=10, deadline=None)
@given(st.integers(4, 6), st.floats(0.3, 3.0), st.floats(-1.0, 1.0))
def test_twisted_t2_properties(N, r, phi):
    k = r * np.exp(1j * phi)
    if abs(k * k - 1) < 1e-3:
        return
    T2 = fz.hs_t2(N, k)
    assert rc(T2, fz.hs_hamiltonian(N)) < 1e-13
    assert rc(T2, ta.translation_operator(N)) < 1e-13
    assert rc(T2, ta.global_sl2(N)[2]) < 1e-13


def test_twisted_t2_breaks_sl2_and_periodic_t3():
    # the twist piece is not sl2 invariant and does not commute with periodic t3
    T2 = fz.hs_t2(6, 1.3)
    assert rc(T2, ta.global_sl2(6)[0]) > 1e-3
    assert rc(T2, fz.hs_t3(6)) > 1e-3


def test_t2_at_imaginary_twist():
    assert np.abs(fz.hs_t2(4, 1j) - fz.hs_twist_part(4) / 2).max() < 1e-14


def test_legacy_charges():
    lc = fz.legacy_charges(5)
    H = fz.hs_hamiltonian(5)
    for A in (lc.H3, lc.H4, lc.I3):
        assert rc(A, H) < 1e-14
    assert rc(lc.I3, lc.H3) < 1e-14 and rc(lc.I3, lc.H4) < 1e-14
    for S in ta.global_sl2(5):
        assert rc(lc.I3, S) < 1e-14
    assert np.abs(fz.legacy_charges(4).I3 - fz.spin_dot_rapidity(4)).max() < 1e-12


def test_motifs():
    assert fz.motif(6, [4]).content == [3, 1]
    assert fz.motif(11, [2, 5]).content == [1, 1, 5]
    assert fz.motif(4, [2]).partition() == (2, 1, 1, 0)
    assert fz.motif(4, [2]).kept_sites == [1, 4]
    for bad in ([0], [4], [1, 2]):
        with pytest.raises(ValueError):
            fz.motif(4, bad)


@pytest.mark.parametrize("N", range(1, 9))
def test_motif_dimensions_fill_hilbert_space(N):
    assert sum(m.dim for m in fz.all_motifs(N)) == 2**N


def test_frozen_roots_closed_form():
    for k in (1.5, 3.0, 0.4 + 0.7j):
        got = fz.sc_sort([s.x_roots[0] for s in fz.frozen_bethe(4, [2], 1, k)])
        assert np.abs(got - fz.sc_sort(fz.x_frozen(k))).max() < 1e-9
        for s in fz.frozen_bethe(4, [2], 1, k):
            assert s.residual < 1e-9 and s.survives


def test_frozen_periodic_roots():
    # [DERIVED] QQ survivors of the frozen periodic chain, frozen
    (s,) = fz.frozen_bethe(7, [4], 2, 1.0)
    assert np.abs(s.x_roots - [1 - 0.75**0.5 * 1j, 1 + 0.75**0.5 * 1j]).max() < 1e-9
    (s,) = fz.frozen_bethe(8, [4], 3, 1.0)
    assert np.abs(s.x_roots - [-5**0.5 * 1j, 0, 5**0.5 * 1j]).max() < 1e-8
    assert len(fz.frozen_bethe(7, [4], 2, 1.0, survivors_only=False)) == 5


def test_survivors_keep_nonzero_evaluation():
    # discarded solutions have an evaluation ratio decaying like 1/beta
    lam, k = (3, 2, 1, 0), 1.5
    sols = fz.frozen_bethe(4, [], 1, k, survivors_only=False)
    lost = [s for s in sols if not s.survives]
    kept = [s for s in sols if s.survives]
    assert lost and kept
    for s in kept:
        assert fz.evaluation_ratio(lam, 1000, k, s.x_roots) > 1e-2
    for s in lost:
        r1 = fz.evaluation_ratio(lam, 100, k, s.x_roots)
        r2 = fz.evaluation_ratio(lam, 1000, k, s.x_roots)
        assert r2 < 0.2 * r1


def test_qq_residuals_small():
    for s in fz.frozen_bethe(6, [], 2, 1.7, survivors_only=False):
        assert s.residual < 1e-8


def test_n4_example():
    for k in (1.5, -2.5):
        r = fz.n4_example(k, 2.0)
        assert r["vacuum_fermionic"] and r["momentum"] == 4 and r["energy"] == "9"
        for key in ("ev_vacuum_dev", "xb1_dev", "frozen_roots_dev", "bethe_state_dev",
                    "t2_eigen_dev", "hs_eigen_dev", "limit_descendant_dev", "limit_highest_dev"):
            assert r[key] < 1e-9, key
        assert r["limit_highest_is_hw"]
    with pytest.raises(ValueError):
        fz.n4_example(1.0)


def test_magnon_state_is_hs_eigenvector():
    H = fz.hs_hamiltonian(4)
    m = fz.magnon_state()
    e = m.conj() @ H @ m / (m.conj() @ m)
    assert np.linalg.norm(H @ m - e * m) < 1e-12
