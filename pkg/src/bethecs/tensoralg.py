"""
Dense linear algebra on L spin-1/2 sites.

Basis convention: site 1 is the most significant bit and up = 0, so the
all-up state |up...up> has index 0.  A state with down spins at sites
i_1 < ... < i_M is written |i_1, ..., i_M>.

Operators are plain complex numpy arrays of shape (2^L, 2^L).  Polynomials
in the spectral parameter with operator coefficients are stored
coefficient-wise in `OperatorPolynomial`.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

UP, DOWN = 0, 1

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
ID2 = np.eye(2, dtype=complex)


# ---------------------------------------------------------------------------
# basis bookkeeping
# ---------------------------------------------------------------------------

def bits_of(code: int, L: int) -> tuple[int, ...]:
    """Spin configuration (0 = up, 1 = down) of a basis index, site 1 first."""
    if not 0 <= code < 2**L:
        raise ValueError(f"basis code {code} out of range for L={L}")
    return tuple((code >> (L - 1 - k)) & 1 for k in range(L))


def code_of(bits: Sequence[int]) -> int:
    """Inverse of `bits_of`."""
    code = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError("spin bits must be 0 (up) or 1 (down)")
        code = (code << 1) | b
    return code


def magnon_count(code: int, L: int) -> int:
    return sum(bits_of(code, L))


def coordinate_state(L: int, sites: Iterable[int]) -> np.ndarray:
    """|i_1,...,i_M>: down spins at the given 1-based sites."""
    bits = [UP] * L
    for s in sites:
        if not 1 <= s <= L:
            raise ValueError(f"site {s} out of range for L={L}")
        bits[s - 1] = DOWN
    v = np.zeros(2**L, dtype=complex)
    v[code_of(bits)] = 1.0
    return v


def vacuum(L: int) -> np.ndarray:
    v = np.zeros(2**L, dtype=complex)
    v[0] = 1.0
    return v


def sector_indices(L: int, M: int) -> np.ndarray:
    """Basis indices with exactly M down spins, in increasing order."""
    idx = [code_of([DOWN if k in c else UP for k in range(L)])
           for c in combinations(range(L), M)]
    return np.array(sorted(idx), dtype=int)


def magnon_numbers(L: int) -> np.ndarray:
    codes = np.arange(2**L)
    return np.array([bin(c).count("1") for c in codes])


# ---------------------------------------------------------------------------
# local operators
# ---------------------------------------------------------------------------

def site_operator(op: np.ndarray, i: int, L: int) -> np.ndarray:
    """Embed a 2x2 operator at site i (1-based)."""
    if not 1 <= i <= L:
        raise ValueError(f"site {i} out of range for L={L}")
    return np.kron(np.kron(np.eye(2**(i - 1)), op), np.eye(2**(L - i)))


def sigma(which: str, i: int, L: int) -> np.ndarray:
    table = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z,
             "+": SIGMA_PLUS, "-": SIGMA_MINUS}
    return site_operator(table[which], i, L)


def _check_pair(i: int, j: int, L: int) -> None:
    if i == j:
        raise ValueError("permutation needs two distinct sites")
    if not (1 <= i <= L and 1 <= j <= L):
        raise ValueError(f"sites ({i},{j}) out of range for L={L}")


def site_permutation_indices(perm: Sequence[int], L: int) -> np.ndarray:
    """Index map of the operator moving the spin of site k to site perm[k].

    `perm` is a 0-based permutation of range(L).  The returned array `tgt`
    satisfies (P v)[tgt[c]] = v[c].
    """
    codes = np.arange(2**L)
    tgt = np.zeros_like(codes)
    for k in range(L):
        bit = (codes >> (L - 1 - k)) & 1
        tgt |= bit << (L - 1 - perm[k])
    return tgt


def permutation_operator(i: int, j: int, L: int) -> np.ndarray:
    """P_ij: swaps the spins at sites i and j."""
    _check_pair(i, j, L)
    perm = list(range(L))
    perm[i - 1], perm[j - 1] = j - 1, i - 1
    tgt = site_permutation_indices(perm, L)
    P = np.zeros((2**L, 2**L), dtype=complex)
    P[tgt, np.arange(2**L)] = 1.0
    return P


def pair_projector(i: int, j: int, L: int, sign: int) -> np.ndarray:
    """(1 + sign*P_ij)/2: symmetriser (+1) or antisymmetriser (-1)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return 0.5 * (np.eye(2**L) + sign * permutation_operator(i, j, L))


def twist_operator(kappa: complex, L: int, sites: Iterable[int] | None = None) -> np.ndarray:
    """Product of kappa^{sigma^z_i} over the given sites (all by default)."""
    sites = range(1, L + 1) if sites is None else sites
    diag = np.ones(2**L, dtype=complex)
    codes = np.arange(2**L)
    for i in sites:
        bit = (codes >> (L - i)) & 1
        diag *= np.where(bit == 0, kappa, 1.0 / kappa)
    return np.diag(diag)


def translation_operator(L: int) -> np.ndarray:
    """P_12 P_23 ... P_{L-1,L}."""
    U = np.eye(2**L, dtype=complex)
    for k in range(1, L):
        U = U @ permutation_operator(k, k + 1, L)
    return U


def global_sl2(L: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Global (S^+, S^-, S^z)."""
    if L < 1:
        raise ValueError("L must be positive")
    Sp = sum(sigma("+", i, L) for i in range(1, L + 1))
    Sm = sum(sigma("-", i, L) for i in range(1, L + 1))
    Sz = 0.5 * sum(sigma("z", i, L) for i in range(1, L + 1))
    return Sp, Sm, Sz


def casimir_operator(L: int) -> np.ndarray:
    """S.S = S^z(S^z+1) + S^- S^+."""
    Sp, Sm, Sz = global_sl2(L)
    return Sz @ Sz + Sz + Sm @ Sp


def sum_permutations(L: int) -> np.ndarray:
    """Sum of P_ij over pairs i < j."""
    D = 2**L
    out = np.zeros((D, D), dtype=complex)
    for i, j in combinations(range(1, L + 1), 2):
        out += permutation_operator(i, j, L)
    return out


# ---------------------------------------------------------------------------
# operator-valued polynomials
# ---------------------------------------------------------------------------

class OperatorPolynomial:
    """Sum_k u^k C_k with square matrix coefficients C_k."""

    def __init__(self, coeffs):
        c = np.asarray(coeffs, dtype=complex)
        if c.ndim != 3 or c.shape[1] != c.shape[2] or c.shape[0] == 0:
            raise ValueError("coefficients must have shape (deg+1, D, D)")
        self.coeffs = c

    @classmethod
    def constant(cls, op: np.ndarray) -> "OperatorPolynomial":
        return cls(np.asarray(op, dtype=complex)[None])

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def degree(self) -> int:
        nz = [k for k in range(self.coeffs.shape[0]) if np.any(self.coeffs[k])]
        return nz[-1] if nz else 0

    def __call__(self, u: complex) -> np.ndarray:
        out = np.zeros(self.coeffs.shape[1:], dtype=complex)
        for c in self.coeffs[::-1]:
            out = out * u + c
        return out

    def _padded(self, n: int) -> np.ndarray:
        c = self.coeffs
        if c.shape[0] >= n:
            return c
        pad = np.zeros((n - c.shape[0],) + c.shape[1:], dtype=complex)
        return np.concatenate([c, pad])

    def __add__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        n = max(self.coeffs.shape[0], other.coeffs.shape[0])
        return OperatorPolynomial(self._padded(n) + other._padded(n))

    def __sub__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        return self + other.scale(-1.0)

    def scale(self, s: complex) -> "OperatorPolynomial":
        return OperatorPolynomial(self.coeffs * s)

    def __matmul__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        a, b = self.coeffs, other.coeffs
        out = np.zeros((a.shape[0] + b.shape[0] - 1,) + a.shape[1:], dtype=complex)
        for i in range(a.shape[0]):
            for k in range(b.shape[0]):
                out[i + k] += a[i] @ b[k]
        return OperatorPolynomial(out)

    def shifted(self, s: complex) -> "OperatorPolynomial":
        """The polynomial u -> p(u + s), by Taylor shift of coefficients."""
        from math import comb
        c = self.coeffs
        n = c.shape[0]
        out = np.zeros_like(c)
        for k in range(n):
            for m in range(k + 1):
                out[m] += comb(k, m) * s ** (k - m) * c[k]
        return OperatorPolynomial(out)

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Coefficient vectors C_k v, shape (deg+1, D)."""
        return np.einsum("kij,j->ki", self.coeffs, v)


def op_poly_eval(p: OperatorPolynomial, u: complex) -> np.ndarray:
    """Evaluate an operator polynomial at a complex point."""
    return p(u)


def commutator(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return X @ Y - Y @ X


def relative_commutator(X: np.ndarray, Y: np.ndarray) -> float:
    nx, ny = np.linalg.norm(X), np.linalg.norm(Y)
    if nx == 0 or ny == 0:
        return 0.0
    return float(np.linalg.norm(commutator(X, Y)) / (nx * ny))
