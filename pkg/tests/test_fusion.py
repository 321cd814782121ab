import numpy as np
import pytest

from bethecs import bethe_solver as bs
from bethecs import fusion as fu
from bethecs import tensoralg as ta
from bethecs import xxx_chain as xc

SINGLET_TH = [0.31, -0.42, -0.42 + 1j, 1.17]
TRIPLET_TH = [0.31, -0.42, -0.42 - 1j, 1.17]


def test_resonance_sign():
    assert fu.resonance_sign(0.2, 0.2 + 1j) == fu.SINGLET
    assert fu.resonance_sign(0.2, 0.2 - 1j) == fu.TRIPLET
    assert fu.resonance_sign(0.2, 0.3) == 0


@pytest.mark.parametrize("thetas, tag", [
    ([0.1, 0.5, -0.3], "generic"),
    (SINGLET_TH, "independent"),
    ([0.0, 1j, 2j], "three-site antisymmetric"),
    ([0.0, -1j, -2j], "three-site symmetric"),
    ([0.0, 1j, 0.0], "three-site mixed"),
    ([0.0, 0.7, 1j], "non-adjacent"),
    ([0.0, 1j, -1j, 0.4], "unclassified"),
])
def test_detect_fusion_tags(thetas, tag):
    p = fu.detect_fusion(thetas)
    assert p.tag == tag
    assert p.to_dict()["tag"] == tag


def test_pattern_json_and_pairs():
    p = fu.detect_fusion(SINGLET_TH)
    (pair,) = p.pairs
    assert (pair.i, pair.k, pair.kind, pair.adjacent) == (2, 3, "singlet", True)
    assert np.isclose(pair.u0, -0.42 + 0.5j)
    assert '"singlet"' in p.to_json()


def test_fused_r_matrices_from_compression():
    u = 0.7 - 0.2j
    spin1, _ = fu.compressed_pair_product(u, -1j)
    R3, _ = fu.fused_r_matrices(u)
    assert np.abs(spin1 - R3).max() < 1e-14
    _, spin0 = fu.compressed_pair_product(u, 1j)
    assert np.abs(spin0 - fu.fused_r_matrices(u - 1j)[1] * np.eye(2)).max() < 1e-14
    with pytest.raises(ValueError):
        fu.fused_r_matrices(-1.5j)


def test_invariant_subspaces():
    for th, sign in ((SINGLET_TH, fu.SINGLET), (TRIPLET_TH, fu.TRIPLET)):
        spec = xc.ChainSpec(4, th, 1.3)
        mono = xc.monodromy(spec)
        own = fu.invariant_subspace(4, [(2, sign)])
        other = fu.invariant_subspace(4, [(2, -sign)])
        assert own.dim == (4 if sign == fu.SINGLET else 12)
        assert fu.invariance_check(spec, own, mono)["max"] < 1e-12
        assert fu.invariance_check(spec, other, mono)["max"] > 1e-2


def test_special_root_actions():
    s = xc.ChainSpec(4, SINGLET_TH, 1.0)
    v = fu.b_at_special_root(s, 2)
    w = fu.singlet_pattern_state(4, 2)
    assert np.linalg.norm(v - np.vdot(w, v) * w) < 1e-12 * np.linalg.norm(v)
    t = xc.ChainSpec(4, TRIPLET_TH, 1.0)
    assert np.linalg.norm(fu.b_at_special_root(t, 2)) < 1e-12
    with pytest.raises(xc.FusionError):
        fu.special_root(SINGLET_TH, 1)


def test_reduced_chain_lift():
    spec = xc.ChainSpec(4, SINGLET_TH, 1.4)
    mono = xc.monodromy(spec)
    red = fu.reduced_chain(spec)
    assert red.kept_sites == [1, 4]
    t = xc.transfer(spec, mono)
    for M in range(3):
        for sol in bs.newton_solve(red.spec, M):
            roots = fu.lift_q(sol.roots, red.special_roots)
            v = bs.aba_state(spec, roots, mono=mono)
            assert np.linalg.norm(v) > 1e-8
            for u in (0.3 + 0.1j, -1.2 + 0.4j):
                lam = red.prefactor_at(u) * np.polyval(sol.tau[::-1], u)
                assert np.linalg.norm(t(u) @ v - lam * v) < 1e-9 * np.linalg.norm(t(u), 2) * np.linalg.norm(v)


def test_reduction_rejects_triplets():
    with pytest.raises(fu.UnsupportedReductionError):
        fu.reduced_chain(xc.ChainSpec(4, TRIPLET_TH, 1.0))
    generic = xc.ChainSpec(2, [0.1, 0.4], 1.0)
    assert fu.reduced_chain(generic).spec == generic


def test_make_adjacent_conjugates_monodromy():
    spec = xc.ChainSpec(4, [0.2, 0.9, 0.2 + 1j, -0.4], 1.2)
    assert fu.detect_fusion(spec.thetas).tag == "non-adjacent"
    new, X, pos = fu.make_adjacent(spec, 1, 3)
    assert pos == 2 and np.isclose(new.thetas[1], 0.2 + 1j)
    u = 0.33 - 0.4j
    T = xc.monodromy(spec).matrix(u)
    Tn = xc.monodromy(new).matrix(u)
    Xf = np.kron(np.eye(2), X)
    assert np.linalg.norm(Tn @ Xf - Xf @ T) < 1e-10 * np.linalg.norm(T) * np.linalg.norm(Xf)
    assert fu.detect_fusion(new.thetas).tag == "independent"
    blocked = xc.ChainSpec(3, [0.0, 2j, 1j], 1.0)
    with pytest.raises(xc.FusionError):
        fu.make_adjacent(blocked, 1, 3)


def test_fusion_report():
    rep = fu.fusion_report(xc.ChainSpec(4, SINGLET_TH, 1.0))
    (leak,) = rep["leakage"]
    assert leak["sites"] == [2, 3]
    assert leak["invariant"] < 1e-12 < leak["complement"]


def test_leakage_of_identity_is_zero():
    sub = fu.invariant_subspace(3, [(1, fu.SINGLET)])
    assert fu.leakage(np.eye(8), sub) == 0.0
    assert fu.leakage(np.zeros((8, 8)), sub) == 0.0
    assert fu.leakage(ta.permutation_operator(2, 3, 3), sub) > 0.1
