"""
Inhomogeneous twisted XXX chain.

R(u) = u + iP.  The monodromy is
    T_0(u) = R_01(u - theta_1 - i/2) ... R_0L(u - theta_L - i/2)
         = [[A(u), B(u)], [C(u), D(u)]]   (auxiliary space, up first),
and the twisted transfer matrix is t(u) = kappa A(u) + kappa^{-1} D(u).
The twist lives in the trace only, so A, B, C, D do not depend on kappa.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import tensoralg as ta
from .tensoralg import OperatorPolynomial


class FusionError(ValueError):
    """Raised when an operation needs an invertible R-check but theta_j - theta_{j+1} = +-i."""


@dataclass(frozen=True)
class ChainSpec:
    """Length, inhomogeneities and twist of a chain."""

    L: int
    thetas: tuple = field(default=())
    kappa: complex = 1.0

    def __post_init__(self):
        th = tuple(complex(t) for t in self.thetas)
        object.__setattr__(self, "thetas", th)
        object.__setattr__(self, "kappa", complex(self.kappa))
        if len(th) != self.L:
            raise ValueError(f"expected {self.L} inhomogeneities, got {len(th)}")
        if self.kappa == 0:
            raise ValueError("twist must be nonzero")

    def with_kappa(self, kappa: complex) -> "ChainSpec":
        return ChainSpec(self.L, self.thetas, kappa)

    def to_dict(self) -> dict:
        return {"L": self.L,
                "theta": [[t.real, t.imag] for t in self.thetas],
                "kappa": [self.kappa.real, self.kappa.imag]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "ChainSpec":
        th = [complex(*t) if isinstance(t, (list, tuple)) else complex(t) for t in d["theta"]]
        k = d["kappa"]
        k = complex(*k) if isinstance(k, (list, tuple)) else complex(k)
        return cls(int(d["L"]), tuple(th), k)

    @classmethod
    def from_json(cls, s: str) -> "ChainSpec":
        return cls.from_dict(json.loads(s))


@dataclass(frozen=True)
class Monodromy:
    """Entries of the monodromy matrix as operator polynomials in u."""

    A: OperatorPolynomial
    B: OperatorPolynomial
    C: OperatorPolynomial
    D: OperatorPolynomial

    def at(self, u: complex) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return self.A(u), self.B(u), self.C(u), self.D(u)

    def matrix(self, u: complex) -> np.ndarray:
        """Full operator on aux (x) H, auxiliary index most significant."""
        A, B, C, D = self.at(u)
        return np.block([[A, B], [C, D]])


# ---------------------------------------------------------------------------
# R-matrices
# ---------------------------------------------------------------------------

def r_matrix(u: complex) -> np.ndarray:
    """u + iP on C^2 (x) C^2."""
    return u * np.eye(4, dtype=complex) + 1j * ta.permutation_operator(1, 2, 2)


def r_check(u: complex) -> np.ndarray:
    """P R(u) = i + uP."""
    return 1j * np.eye(4, dtype=complex) + u * ta.permutation_operator(1, 2, 2)


def theta_poly(thetas, shift: complex = 0.0) -> np.ndarray:
    """Ascending coefficients of Q_theta(u + shift) = prod (u + shift - theta_i)."""
    return npoly.polyfromroots([t - shift for t in thetas]) if len(thetas) else np.array([1.0 + 0j])


# ---------------------------------------------------------------------------
# monodromy
# ---------------------------------------------------------------------------

def _times_unit(X: np.ndarray, k: int, c: int, b: int, L: int) -> np.ndarray:
    """X . E_cb at site k for a stack of matrices X of shape (n, D, D)."""
    n, D, _ = X.shape
    Xr = X.reshape((n, D) + (2,) * L)
    out = np.zeros_like(Xr)
    ax = 2 + (k - 1)
    src = [slice(None)] * (L + 2)
    dst = [slice(None)] * (L + 2)
    src[ax], dst[ax] = c, b
    out[tuple(dst)] = Xr[tuple(src)]
    return out.reshape(n, D, D)


def monodromy(spec: ChainSpec) -> Monodromy:
    """Monodromy entries by coefficient convolution over the L R-factors."""
    L = spec.L
    D = 2**L
    # T[a][c]: coefficient stack, index = power of u
    eye = np.eye(D, dtype=complex)[None]
    zero = np.zeros((1, D, D), dtype=complex)
    T = [[eye.copy(), zero.copy()], [zero.copy(), eye.copy()]]
    for k in range(1, L + 1):
        a_k = spec.thetas[k - 1] + 0.5j
        new = [[None, None], [None, None]]
        for a in range(2):
            for c in range(2):
                X = T[a][c]
                n = X.shape[0]
                out = np.zeros((n + 1, D, D), dtype=complex)
                out[1:] += X
                out[:-1] -= a_k * X
                for b in range(2):
                    out[:-1] += 1j * _times_unit(T[a][b], k, c, b, L)
                new[a][c] = out
        T = new
    A, B, C, Dm = (OperatorPolynomial(T[0][0]), OperatorPolynomial(T[0][1]),
                   OperatorPolynomial(T[1][0]), OperatorPolynomial(T[1][1]))
    return Monodromy(A, B, C, Dm)


def monodromy_direct(spec: ChainSpec, u: complex) -> np.ndarray:
    """Numeric monodromy at a point from explicit Kronecker products.

    Independent of `monodromy`; the auxiliary space is the most significant
    factor.
    """
    L = spec.L
    out = np.eye(2 ** (L + 1), dtype=complex)
    for k in range(1, L + 1):
        P0k = ta.permutation_operator(1, k + 1, L + 1)
        R = (u - spec.thetas[k - 1] - 0.5j) * np.eye(2 ** (L + 1)) + 1j * P0k
        out = out @ R
    return out


def transfer(spec: ChainSpec, mono: Monodromy | None = None) -> OperatorPolynomial:
    """kappa A(u) + kappa^{-1} D(u)."""
    mono = monodromy(spec) if mono is None else mono
    return mono.A.scale(spec.kappa) + mono.D.scale(1.0 / spec.kappa)


def scattering_operators(spec: ChainSpec, mono: Monodromy | None = None) -> list[np.ndarray]:
    """G_j = -i t(theta_j + i/2), with each R-factor normalised to R(u)/(u + i).

    The normalisation divides by prod_{k != j}(theta_j - theta_k + i); with it
    the G_j multiply to kappa^{2 S^z} and reduce to the twisted shift
    operator in the homogeneous limit.
    """
    th = spec.thetas
    for i, j in combinations(range(spec.L), 2):
        if abs(th[i] - th[j]) < 1e-8:
            warnings.warn("coincident inhomogeneities: scattering operators are ill conditioned",
                          RuntimeWarning, stacklevel=2)
            break
    t = transfer(spec, mono)
    out = []
    for j in range(spec.L):
        norm = np.prod([th[j] - th[k] + 1j for k in range(spec.L) if k != j])
        out.append(-1j * t(th[j] + 0.5j) / norm)
    return out


# ---------------------------------------------------------------------------
# expansion at large u
# ---------------------------------------------------------------------------

def inverse_series(num: OperatorPolynomial, den: np.ndarray, nterms: int) -> list[np.ndarray]:
    """Coefficients c_n of num(u)/den(u) = sum_n c_n u^{deg num - deg den - n}.

    `den` is an ascending scalar coefficient array.  Division is done as a
    power series in w = 1/u on the reversed coefficient lists.
    """
    p = num.coeffs[::-1]
    q = np.asarray(den, dtype=complex)[::-1]
    out = []
    for n in range(nterms):
        acc = p[n].copy() if n < p.shape[0] else np.zeros_like(p[0])
        for m in range(1, min(n, len(q) - 1) + 1):
            acc -= q[m] * out[n - m]
        out.append(acc / q[0])
    return out


def transfer_expansion(spec: ChainSpec, nterms: int = 4) -> list[np.ndarray]:
    """Operators X_n with t(u + i/2)/Q_theta(u) = sum_n X_n u^{-n}."""
    t = transfer(spec).shifted(0.5j)
    return inverse_series(t, theta_poly(spec.thetas), nterms)


def charge_coefficients(spec: ChainSpec, n: int) -> np.ndarray:
    """The charge t_n(kappa) from the closed-form operator expressions.

    Convention: t(u + i/2)/Q_theta(u) = kappa + 1/kappa + sum_n t_n (-iu)^{-n}.
    """
    if n not in (1, 2, 3):
        raise ValueError("charges are available for n = 1, 2, 3")
    L, k, th = spec.L, spec.kappa, spec.thetas
    D = 2**L
    kz = [ta.twist_operator(k, L, [i]) for i in range(1, L + 1)]
    P = {(i, j): ta.permutation_operator(i, j, L)
         for i in range(1, L + 1) for j in range(1, L + 1) if i != j}
    if n == 1:
        return sum(kz)
    if n == 2:
        out = np.zeros((D, D), dtype=complex)
        for i, j in combinations(range(1, L + 1), 2):
            out += kz[j - 1] @ P[i, j]
        for i in range(1, L + 1):
            out += -1j * th[i - 1] * kz[i - 1]
        return out
    out = np.zeros((D, D), dtype=complex)
    for i, j, l in combinations(range(1, L + 1), 3):
        out += kz[l - 1] @ P[j, l] @ P[i, j]
    for i, j in combinations(range(1, L + 1), 2):
        out += -1j * (th[i - 1] + th[j - 1]) * kz[j - 1] @ P[i, j]
    for i in range(1, L + 1):
        out += -(th[i - 1] ** 2) * kz[i - 1]
    return out


# ---------------------------------------------------------------------------
# reordering inhomogeneities
# ---------------------------------------------------------------------------

def swapped_spec(spec: ChainSpec, j: int) -> ChainSpec:
    th = list(spec.thetas)
    th[j - 1], th[j] = th[j], th[j - 1]
    return ChainSpec(spec.L, tuple(th), spec.kappa)


def exchange_conjugation(spec: ChainSpec, j: int) -> tuple[Monodromy, np.ndarray]:
    """Monodromy with theta_j, theta_{j+1} swapped and the conjugator.

    With T' the swapped monodromy and X = R-check_{j+1,j}(theta_{j+1} - theta_j),
    T' X = X T on aux (x) H.
    """
    if not 1 <= j < spec.L:
        raise ValueError(f"pair ({j},{j+1}) out of range")
    d = spec.thetas[j] - spec.thetas[j - 1]
    if abs(d - 1j) < 1e-9 or abs(d + 1j) < 1e-9:
        raise FusionError(f"theta_{j+1} - theta_{j} = {d}: R-check is singular, use the fusion module")
    X = 1j * np.eye(2**spec.L) + d * ta.permutation_operator(j, j + 1, spec.L)
    return monodromy(swapped_spec(spec, j)), X


def exchange_residual(spec: ChainSpec, j: int, u: complex) -> float:
    """Norm of T'(u) X - X T(u), relative to |T||X|."""
    mono_sw, X = exchange_conjugation(spec, j)
    T = monodromy(spec).matrix(u)
    Ts = mono_sw.matrix(u)
    Xf = np.kron(np.eye(2), X)
    r = Ts @ Xf - Xf @ T
    return float(np.linalg.norm(r) / (np.linalg.norm(T) * np.linalg.norm(Xf)))


def local_hamiltonians(spec: ChainSpec, eps: float = 1e-6) -> list[np.ndarray]:
    """Diagnostic H_j = d/du log t(u) at u = theta_j + i/2 (finite difference).

    Only exposed for inspection; no closed form is asserted.
    """
    t = transfer(spec)
    out = []
    for th in spec.thetas:
        u0 = th + 0.5j
        T0 = t(u0)
        dT = (t(u0 + eps) - t(u0 - eps)) / (2 * eps)
        out.append(dT @ np.linalg.inv(T0))
    return out


def quantum_determinant(spec: ChainSpec, u: complex, mono: Monodromy | None = None) -> np.ndarray:
    """A(u+i) D(u) - B(u+i) C(u)."""
    m = monodromy(spec) if mono is None else mono
    return m.A(u + 1j) @ m.D(u) - m.B(u + 1j) @ m.C(u)
