"""
Fusion of adjacent sites whose inhomogeneities differ by +-i.

When theta_{j+1} - theta_j = +i the R-check at the pair is proportional to
an antisymmetriser and the image of Pi^-_{j,j+1} (a spin-0 site) is
invariant under the monodromy ("singlet" fusion).  For theta_{j+1} - theta_j
= -i the image of Pi^+ (a spin-1 site) is invariant ("triplet" fusion).

The special root u0 = (theta_j + theta_{j+1})/2 moves the pseudovacuum into
the singlet subspace; for a triplet pair B(u0) annihilates it instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import tensoralg as ta
from .xxx_chain import ChainSpec, FusionError, Monodromy, exchange_conjugation, monodromy, theta_poly

RESONANCE_TOL = 1e-9

SINGLET, TRIPLET = -1, +1


class UnsupportedReductionError(ValueError):
    """Reduction requested for a pattern other than independent singlets."""


# ---------------------------------------------------------------------------
# pattern detection
# ---------------------------------------------------------------------------

@dataclass
class FusedPair:
    """Sites i < k (1-based) with theta_k - theta_i = -sign * i."""
    i: int
    k: int
    sign: int
    u0: complex

    @property
    def adjacent(self) -> bool:
        return self.k == self.i + 1

    @property
    def kind(self) -> str:
        return "singlet" if self.sign == SINGLET else "triplet"


@dataclass
class FusionPattern:
    pairs: list[FusedPair]
    tag: str
    graph: list[tuple[int, int]] = field(default_factory=list)

    @property
    def adjacent_pairs(self) -> list[FusedPair]:
        return [p for p in self.pairs if p.adjacent]

    def to_dict(self) -> dict:
        return {
            "tag": self.tag,
            "pairs": [{"sites": [p.i, p.k], "sign": "-" if p.sign < 0 else "+", "kind": p.kind,
                       "u0": [p.u0.real, p.u0.imag]} for p in self.pairs],
            "graph": [list(e) for e in self.graph],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def resonance_sign(ti: complex, tk: complex, tol: float = RESONANCE_TOL) -> int:
    """SINGLET if tk - ti = +i, TRIPLET if tk - ti = -i, else 0."""
    d = tk - ti
    if abs(d - 1j) < tol:
        return SINGLET
    if abs(d + 1j) < tol:
        return TRIPLET
    return 0


def detect_fusion(thetas, tol: float = RESONANCE_TOL) -> FusionPattern:
    """Scan all site pairs for differences +-i and classify the pattern.

    Tags: "generic" (no resonance), "independent" (disjoint adjacent pairs),
    "three-site antisymmetric" / "three-site symmetric" / "three-site mixed"
    (two adjacent pairs sharing the middle site), "non-adjacent" (every
    resonance is disjoint but some need reordering before fusing) and
    "unclassified" otherwise.
    """
    th = [complex(t) for t in thetas]
    pairs = []
    for i, k in combinations(range(len(th)), 2):
        s = resonance_sign(th[i], th[k], tol)
        if s:
            pairs.append(FusedPair(i + 1, k + 1, s, (th[i] + th[k]) / 2))
    graph = [(p.i, p.k) for p in pairs]
    if not pairs:
        return FusionPattern([], "generic", graph)
    sites = [s for p in pairs for s in (p.i, p.k)]
    disjoint = len(sites) == len(set(sites))
    if disjoint:
        tag = "independent" if all(p.adjacent for p in pairs) else "non-adjacent"
        return FusionPattern(pairs, tag, graph)
    if len(pairs) == 2 and all(p.adjacent for p in pairs) and pairs[0].k == pairs[1].i:
        s1, s2 = pairs[0].sign, pairs[1].sign
        if s1 == s2 == SINGLET:
            tag = "three-site antisymmetric"
        elif s1 == s2 == TRIPLET:
            tag = "three-site symmetric"
        else:
            tag = "three-site mixed"
        return FusionPattern(pairs, tag, graph)
    return FusionPattern(pairs, "unclassified", graph)


def make_adjacent(spec: ChainSpec, i: int, k: int) -> tuple[ChainSpec, np.ndarray, int]:
    """Move site k next to site i (i < k) by successive exchanges.

    Returns the reordered spec, the accumulated conjugator X with
    T_new X = X T_old, and the new position of the moved inhomogeneity.
    Raises FusionError if an intermediate exchange is itself resonant.
    """
    if not 1 <= i < k <= spec.L:
        raise ValueError("need 1 <= i < k <= L")
    X = np.eye(2**spec.L, dtype=complex)
    cur = spec
    for pos in range(k - 1, i, -1):
        _, Xj = exchange_conjugation(cur, pos)
        X = Xj @ X
        th = list(cur.thetas)
        th[pos - 1], th[pos] = th[pos], th[pos - 1]
        cur = ChainSpec(cur.L, th, cur.kappa)
    return cur, X, i + 1


# ---------------------------------------------------------------------------
# invariant subspaces
# ---------------------------------------------------------------------------

@dataclass
class InvariantSubspace:
    projector: np.ndarray
    basis: np.ndarray
    pairs: list[tuple[int, int]]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def invariant_subspace(L: int, pairs) -> InvariantSubspace:
    """Image of the product of Pi^{sign}_{j,j+1} over disjoint adjacent pairs.

    `pairs` holds (j, sign) tuples or FusedPair objects.
    """
    Pi = np.eye(2**L, dtype=complex)
    used = []
    for p in pairs:
        j, s = (p.i, p.sign) if isinstance(p, FusedPair) else p
        if isinstance(p, FusedPair) and not p.adjacent:
            raise ValueError("make the pair adjacent first")
        Pi = Pi @ ta.pair_projector(j, j + 1, L, s)
        used.append((j, s))
    w, V = np.linalg.eigh((Pi + Pi.conj().T) / 2)
    basis = V[:, w > 0.5]
    return InvariantSubspace(Pi, basis, used)


def leakage(X: np.ndarray, sub: InvariantSubspace) -> float:
    """||(1 - Pi) X Pi|| relative to ||X||."""
    Pi = sub.projector
    n = np.linalg.norm(X)
    if n == 0:
        return 0.0
    return float(np.linalg.norm((np.eye(len(Pi)) - Pi) @ X @ Pi) / n)


def invariance_check(spec: ChainSpec, sub: InvariantSubspace, mono: Monodromy | None = None,
                     rng: np.random.Generator | None = None, npoints: int = 3) -> dict:
    """Max leakage of A, B, C, D out of the subspace at random spectral points."""
    mono = monodromy(spec) if mono is None else mono
    rng = np.random.default_rng(7) if rng is None else rng
    out = {"A": 0.0, "B": 0.0, "C": 0.0, "D": 0.0}
    for _ in range(npoints):
        u = complex(rng.normal(), rng.normal())
        for name in out:
            out[name] = max(out[name], leakage(getattr(mono, name)(u), sub))
    out["max"] = max(out.values())
    return out


# ---------------------------------------------------------------------------
# fused R-matrices
# ---------------------------------------------------------------------------

SPIN1_EMBED = np.array([[1, 0, 0],
                        [0, 1 / np.sqrt(2), 0],
                        [0, 1 / np.sqrt(2), 0],
                        [0, 0, 1]], dtype=complex)
SINGLET_EMBED = np.array([[0], [1 / np.sqrt(2)], [-1 / np.sqrt(2)], [0]], dtype=complex)


def fused_r_matrices(u: complex) -> tuple[np.ndarray, complex]:
    """Spin-1/2 x spin-1 R-matrix (6x6) and the scalar qdet R(u).

    Basis of C^2 (x) C^3: up (x) |1,1>, |1,0>, |1,-1>, then down (x) the same.
    """
    u = complex(u)
    if abs(u + 1.5j) < 1e-14:
        raise ValueError("u = -3i/2 is a pole of the spin-1 R-matrix")
    if abs(u + 0.5j) < 1e-14:
        raise ValueError("u = -i/2 is a pole of the quantum determinant")
    d = u + 1.5j
    R = np.eye(6, dtype=complex)
    R[1, 1] = R[4, 4] = (u + 0.5j) / d
    R[2, 2] = R[3, 3] = (u - 0.5j) / d
    off = np.sqrt(2) * 1j / d
    R[1, 3] = R[3, 1] = R[2, 4] = R[4, 2] = off
    return R, (u - 0.5j) / (u + 0.5j)


def normalised_r(u: complex) -> np.ndarray:
    """R(u)/(u+i) on C^2 (x) C^2."""
    return (u * np.eye(4) + 1j * ta.permutation_operator(1, 2, 2)) / (u + 1j)


def compressed_pair_product(u: complex, dtheta: complex) -> tuple[np.ndarray, np.ndarray]:
    """Compress R_01(a) R_02(a - dtheta) (normalised) onto spin 1 and spin 0.

    a = u - i/2 stands for u - theta_j - i/2 with theta_j = 0 and
    theta_{j+1} = dtheta.  Returns the 6x6 spin-1 and 2x2 spin-0 blocks.
    """
    a = u - 0.5j
    R01 = np.kron(normalised_r(a), np.eye(2))
    P = ta.permutation_operator(2, 3, 3)
    R02 = P @ np.kron(normalised_r(a - dtheta), np.eye(2)) @ P
    X = R01 @ R02
    W = np.kron(np.eye(2), SPIN1_EMBED)
    S = np.kron(np.eye(2), SINGLET_EMBED)
    return W.conj().T @ X @ W, S.conj().T @ X @ S


# ---------------------------------------------------------------------------
# special root and B at it
# ---------------------------------------------------------------------------

def _pair_sign(thetas, j: int) -> int:
    if not 1 <= j < len(thetas):
        raise ValueError(f"pair ({j},{j+1}) out of range")
    return resonance_sign(complex(thetas[j - 1]), complex(thetas[j]))


def special_root(thetas, j: int) -> complex:
    """u0 = (theta_j + theta_{j+1})/2 for a fused adjacent pair."""
    if not _pair_sign(thetas, j):
        raise FusionError(f"sites ({j},{j+1}) are not fused")
    return (complex(thetas[j - 1]) + complex(thetas[j])) / 2


def b_at_special_root(spec: ChainSpec, j: int, mono: Monodromy | None = None) -> np.ndarray:
    """B(u0)|0>; proportional to the local singlet, or zero for a triplet."""
    u0 = special_root(spec.thetas, j)
    mono = monodromy(spec) if mono is None else mono
    return mono.B(u0) @ ta.vacuum(spec.L)


def singlet_pattern_state(L: int, j: int) -> np.ndarray:
    """|up..up (up down - down up)_{j,j+1} up..up> / sqrt 2."""
    return (ta.coordinate_state(L, [j + 1]) - ta.coordinate_state(L, [j])) / np.sqrt(2)


# ---------------------------------------------------------------------------
# reduced chain
# ---------------------------------------------------------------------------

@dataclass
class ReducedChain:
    """Chain with fused singlet pairs removed.

    The original eigenvalue on the invariant subspace equals
    prefactor(u) * tau_reduced(u), prefactor = prod (u - u0 + i)(u - u0 - i).
    """
    spec: ChainSpec
    special_roots: list[complex]
    prefactor: np.ndarray
    kept_sites: list[int]

    def prefactor_at(self, u: complex) -> complex:
        return complex(np.polyval(self.prefactor[::-1], u))


def reduced_chain(spec: ChainSpec, pattern: FusionPattern | None = None) -> ReducedChain:
    pattern = detect_fusion(spec.thetas) if pattern is None else pattern
    if pattern.tag == "generic":
        return ReducedChain(spec, [], np.array([1.0 + 0j]), list(range(1, spec.L + 1)))
    if pattern.tag != "independent" or any(p.sign != SINGLET for p in pattern.pairs):
        raise UnsupportedReductionError(
            f"only independent adjacent singlet pairs can be reduced (pattern: {pattern.tag}, "
            f"signs {[p.sign for p in pattern.pairs]})")
    drop = {s for p in pattern.pairs for s in (p.i, p.k)}
    keep = [s for s in range(1, spec.L + 1) if s not in drop]
    u0s = [p.u0 for p in pattern.pairs]
    pref = np.array([1.0 + 0j])
    for u0 in u0s:
        pref = np.convolve(pref, theta_poly([u0 - 1j, u0 + 1j]))
    red = ChainSpec(len(keep), [spec.thetas[s - 1] for s in keep], spec.kappa)
    return ReducedChain(red, u0s, pref, keep)


def lift_q(reduced_roots, special_roots) -> np.ndarray:
    """Bethe roots of the original chain: reduced roots plus special roots."""
    return np.concatenate([np.asarray(reduced_roots, dtype=complex),
                           np.asarray(special_roots, dtype=complex)])


def fusion_report(spec: ChainSpec, rng: np.random.Generator | None = None) -> dict:
    """Pattern, special roots and leakage of both projectors for each adjacent pair."""
    pattern = detect_fusion(spec.thetas)
    mono = monodromy(spec)
    rep = pattern.to_dict()
    leaks = []
    for p in pattern.adjacent_pairs:
        own = invariance_check(spec, invariant_subspace(spec.L, [(p.i, p.sign)]), mono, rng)["max"]
        other = invariance_check(spec, invariant_subspace(spec.L, [(p.i, -p.sign)]), mono, rng)["max"]
        leaks.append({"sites": [p.i, p.k], "invariant": own, "complement": other})
    rep["leakage"] = leaks
    return rep
