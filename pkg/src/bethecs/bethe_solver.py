"""
Bethe equations for the inhomogeneous twisted XXX chain.

Three independent routes to the spectrum:
  * `tq_extract`: diagonalise the transfer matrix and solve Baxter's TQ
    relation for Q (linear algebra only),
  * `newton_solve`: damped Newton on the logarithmic Bethe equations,
    continued in the twist from the Gelfand-Tsetlin point kappa -> infinity,
  * the QQ relation, used as a residual check here and as a polynomial
    system in `freezing_hs.frozen_bethe`.

Polynomials are ascending numpy coefficient arrays.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import tensoralg as ta
from .xxx_chain import ChainSpec, Monodromy, monodromy, theta_poly, transfer

log = logging.getLogger(__name__)

GT_KAPPA = 1e6
INFINITE_ROOT = 1e6
DEDUP_FUZZ = 1e-7
TOL_TARGET = 1e-12
TOL_ACCEPT = 1e-9
PERIODIC_START = 0.05
PERIODIC_EPS = 1e-6
PATH_BUMP = 0.9
SPLIT_SCALE = 0.5
PATH_BUMPS = (0.9, -0.9, 2.1, -2.1, 0.3, -0.3)


class NotOnShellError(ValueError):
    """Q does not divide the TQ numerator."""


class ConvergenceError(RuntimeError):
    """A solver path failed to converge."""


@dataclass
class QFunction:
    """Monic polynomial prod (u - u_m)."""

    roots: np.ndarray

    def __post_init__(self):
        self.roots = np.asarray(self.roots, dtype=complex).ravel()

    @property
    def degree(self) -> int:
        return len(self.roots)

    @property
    def coeffs(self) -> np.ndarray:
        return poly_from_roots(self.roots)

    def shifted(self, s: complex) -> np.ndarray:
        """Coefficients of Q(u + s)."""
        return poly_from_roots(self.roots - s)

    def __call__(self, u):
        return np.prod([u - r for r in self.roots], axis=0) if len(self.roots) else np.ones_like(u)

    @classmethod
    def from_coeffs(cls, coeffs) -> "QFunction":
        c = np.asarray(coeffs, dtype=complex)
        if abs(c[-1] - 1) > 1e-10:
            raise ValueError("Q must be monic")
        return cls(npoly.polyroots(c) if len(c) > 1 else np.array([]))


@dataclass
class BetheSolution:
    M: int
    roots: np.ndarray
    tau: np.ndarray | None = None
    residual: float = np.nan
    admissible: bool = True
    dual_roots: np.ndarray | None = None
    multiplicity: int = 1
    infinite: int = 0
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        roots = sorted(self.roots, key=lambda z: (round(z.real, 9), round(z.imag, 9)))
        tau = [] if self.tau is None else self.tau
        return {"M": self.M,
                "roots": [[float(z.real), float(z.imag)] for z in roots],
                "residual": float(self.residual),
                "admissible": bool(self.admissible),
                "tau_coeffs": [[float(c.real), float(c.imag)] for c in tau]}


def poly_from_roots(roots) -> np.ndarray:
    roots = np.asarray(roots, dtype=complex)
    return npoly.polyfromroots(roots) if len(roots) else np.array([1.0 + 0j])


def _trim(c: np.ndarray, tol: float = 0.0) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    n = len(c)
    while n > 1 and abs(c[n - 1]) <= tol:
        n -= 1
    return c[:n]


def sort_roots(roots) -> np.ndarray:
    r = np.asarray(roots, dtype=complex)
    return np.array(sorted(r, key=lambda z: (round(z.real / DEDUP_FUZZ), round(z.imag / DEDUP_FUZZ),
                                              z.real, z.imag)), dtype=complex)


def _as_q(Q) -> QFunction:
    return Q if isinstance(Q, QFunction) else QFunction(Q)


# ---------------------------------------------------------------------------
# eigenvalues and residuals
# ---------------------------------------------------------------------------

@dataclass
class TauData:
    """kappa Q_th^+ Q^{--}/Q + kappa^{-1} Q_th^- Q^{++}/Q as num/den."""

    numerator: np.ndarray
    denominator: np.ndarray
    quotient: np.ndarray
    remainder_norm: float

    @property
    def on_shell(self) -> bool:
        return self.remainder_norm < 1e-8


def tau_numerator(spec: ChainSpec, Q) -> np.ndarray:
    Q = _as_q(Q)
    k = spec.kappa
    a = npoly.polymul(theta_poly(spec.thetas, 0.5j), Q.shifted(-1j))
    d = npoly.polymul(theta_poly(spec.thetas, -0.5j), Q.shifted(1j))
    return k * a + d / k


def tau_from_Q(spec: ChainSpec, Q, require_on_shell: bool = True, tol: float = 1e-8):
    """Transfer-matrix eigenvalue as a polynomial in u.

    Returns the degree-L coefficients when Q divides the numerator.  Off
    shell, `require_on_shell=False` returns a `TauData` pole report.
    """
    Q = _as_q(Q)
    num = tau_numerator(spec, Q)
    den = Q.coeffs
    quo, rem = npoly.polydiv(num, den)
    scale = max(np.abs(num).max(), 1.0)
    rnorm = float(np.abs(rem).max() / scale) if len(rem) else 0.0
    if require_on_shell:
        if rnorm > tol:
            raise NotOnShellError(f"TQ remainder {rnorm:.3e} exceeds {tol:.1e}")
        out = np.zeros(spec.L + 1, dtype=complex)
        out[:min(len(quo), spec.L + 1)] = quo[:spec.L + 1]
        return out
    return TauData(num, den, quo, rnorm)


def tau_series(spec: ChainSpec, tau: np.ndarray, nterms: int = 4) -> np.ndarray:
    """c_n with tau(u + i/2)/Q_theta(u) = sum_n c_n u^{-n}."""
    from .tensoralg import OperatorPolynomial
    from .xxx_chain import inverse_series
    p = OperatorPolynomial(np.asarray(tau, dtype=complex)[:, None, None]).shifted(0.5j)
    return np.array([c[0, 0] for c in inverse_series(p, theta_poly(spec.thetas), nterms)])


def _wrap(z: np.ndarray) -> np.ndarray:
    im = np.angle(np.exp(1j * z.imag))
    return z.real + 1j * im


def bethe_residual(spec: ChainSpec, roots) -> np.ndarray:
    """Logarithmic Bethe equations, imaginary parts wrapped to (-pi, pi].

    Entry m: log[kappa^2 prod_i (u_m-th_i+i/2)/(u_m-th_i-i/2)]
             - log prod_{n!=m} (u_m-u_n+i)/(u_m-u_n-i).
    """
    u = np.asarray(roots, dtype=complex)
    th = np.asarray(spec.thetas)
    out = np.empty(len(u), dtype=complex)
    for m in range(len(u)):
        s = 2 * np.log(spec.kappa)
        s += np.sum(np.log(u[m] - th + 0.5j) - np.log(u[m] - th - 0.5j))
        for n in range(len(u)):
            if n != m:
                s -= np.log(u[m] - u[n] + 1j) - np.log(u[m] - u[n] - 1j)
        out[m] = s
    return _wrap(out)


def bethe_residual_ratio(spec: ChainSpec, roots) -> np.ndarray:
    """Normalised form LHS/RHS - 1 of the Bethe equations."""
    u = np.asarray(roots, dtype=complex)
    th = np.asarray(spec.thetas)
    out = np.empty(len(u), dtype=complex)
    for m in range(len(u)):
        lhs = spec.kappa**2 * np.prod((u[m] - th + 0.5j) / (u[m] - th - 0.5j))
        rhs = np.prod([(u[m] - u[n] + 1j) / (u[m] - u[n] - 1j) for n in range(len(u)) if n != m])
        out[m] = lhs / rhs - 1
    return out


def _bethe_jacobian(spec: ChainSpec, u: np.ndarray) -> np.ndarray:
    th = np.asarray(spec.thetas)
    M = len(u)
    J = np.zeros((M, M), dtype=complex)
    for m in range(M):
        J[m, m] = np.sum(1 / (u[m] - th + 0.5j) - 1 / (u[m] - th - 0.5j))
        for n in range(M):
            if n != m:
                g = 1 / (u[m] - u[n] + 1j) - 1 / (u[m] - u[n] - 1j)
                J[m, m] -= g
                J[m, n] += g
    return J


def qq_residual(spec: ChainSpec, Q, Qt, periodic: bool | None = None) -> np.ndarray:
    """Coefficients of the QQ-relation residual.

    twisted:  kappa Q^- Qt^+ - kappa^{-1} Q^+ Qt^- - (kappa - kappa^{-1}) Q_theta,
              deg Qt = L - M;
    periodic: Q^- Qt^+ - Q^+ Qt^- - i (L - 2M + 1) Q_theta,  deg Qt = L - M + 1.
    """
    Q, Qt = _as_q(Q), _as_q(Qt)
    L, M, k = spec.L, Q.degree, spec.kappa
    if periodic is None:
        periodic = abs(k - 1) < 1e-14
    want = L - M + 1 if periodic else L - M
    if Qt.degree != want:
        raise ValueError(f"dual Q must have degree {want}, got {Qt.degree}")
    a = npoly.polymul(Q.shifted(-0.5j), Qt.shifted(0.5j))
    b = npoly.polymul(Q.shifted(0.5j), Qt.shifted(-0.5j))
    if periodic:
        r = npoly.polysub(npoly.polysub(a, b), 1j * (L - 2 * M + 1) * theta_poly(spec.thetas))
    else:
        r = npoly.polysub(npoly.polysub(k * a, b / k), (k - 1 / k) * theta_poly(spec.thetas))
    return r


def dual_q(spec: ChainSpec, Q, periodic: bool | None = None) -> tuple[np.ndarray, float]:
    """Solve the (linear) QQ relation for the monic dual Q.

    Returns ascending coefficients and the residual.  In the periodic case
    the coefficient of u^M is gauge-fixed to zero.
    """
    Q = _as_q(Q)
    L, M, k = spec.L, Q.degree, spec.kappa
    if periodic is None:
        periodic = abs(k - 1) < 1e-14
    K = L - M + 1 if periodic else L - M
    qm, qp = Q.shifted(-0.5j), Q.shifted(0.5j)
    cols = []
    for j in range(K + 1):
        e = np.zeros(j + 1, dtype=complex)
        e[j] = 1
        shp = npoly.polyfromroots([-0.5j] * j) if j else np.array([1.0 + 0j])
        shm = npoly.polyfromroots([0.5j] * j) if j else np.array([1.0 + 0j])
        if periodic:
            col = npoly.polysub(npoly.polymul(qm, shp), npoly.polymul(qp, shm))
        else:
            col = npoly.polysub(k * npoly.polymul(qm, shp), npoly.polymul(qp, shm) / k)
        cols.append(col)
    n = max(len(c) for c in cols)
    A = np.zeros((n, K + 1), dtype=complex)
    for j, c in enumerate(cols):
        A[:len(c), j] = c
    rhs = (1j * (L - 2 * M + 1) if periodic else (k - 1 / k)) * theta_poly(spec.thetas)
    b = np.zeros(n, dtype=complex)
    b[:len(rhs)] = rhs
    b = b - A[:, K]
    free = [j for j in range(K) if not (periodic and j == M)]
    sol, *_ = np.linalg.lstsq(A[:, free], b, rcond=None)
    coeffs = np.zeros(K + 1, dtype=complex)
    coeffs[K] = 1
    coeffs[free] = sol
    res = float(np.abs(A @ coeffs - np.pad(rhs, (0, n - len(rhs)))).max())
    return coeffs, res


# ---------------------------------------------------------------------------
# TQ extraction from exact diagonalisation
# ---------------------------------------------------------------------------

_PROBE = 0.3718 + 0.2291j


def _cluster(vals: np.ndarray, rtol: float) -> list[list[int]]:
    scale = max(1.0, float(np.abs(vals).max()))
    groups: list[list[int]] = []
    for i in np.argsort(vals.real):
        for g in groups:
            if abs(vals[g[0]] - vals[i]) < rtol * scale:
                g.append(int(i))
                break
        else:
            groups.append([int(i)])
    return groups


def solve_tq(spec: ChainSpec, tau: np.ndarray, M: int) -> tuple[np.ndarray | None, float, int]:
    """Monic degree-M Q with tau Q = kappa Q_th^+ Q^{--} + kappa^{-1} Q_th^- Q^{++}.

    Returns (coefficients, residual, rank).
    """
    k = spec.kappa
    tp, tm = theta_poly(spec.thetas, 0.5j), theta_poly(spec.thetas, -0.5j)
    cols = []
    for j in range(M + 1):
        mono = np.zeros(j + 1, dtype=complex)
        mono[j] = 1
        sh_m = npoly.polyfromroots([1j] * j) if j else np.array([1.0 + 0j])   # (u - i)^j
        sh_p = npoly.polyfromroots([-1j] * j) if j else np.array([1.0 + 0j])  # (u + i)^j
        col = npoly.polymul(tau, mono)
        col = npoly.polysub(col, k * npoly.polymul(tp, sh_m))
        col = npoly.polysub(col, npoly.polymul(tm, sh_p) / k)
        cols.append(col)
    n = max(len(c) for c in cols)
    A = np.zeros((n, M + 1), dtype=complex)
    for j, c in enumerate(cols):
        A[:len(c), j] = c
    if M == 0:
        return np.array([1.0 + 0j]), float(np.abs(A[:, 0]).max() / max(1, np.abs(tau).max())), 0
    sv = np.linalg.svd(A[:, :M], compute_uv=False)
    rank = int(np.sum(sv > 1e-9 * sv[0])) if sv[0] > 0 else 0
    sol, *_ = np.linalg.lstsq(A[:, :M], -A[:, M], rcond=None)
    q = np.append(sol, 1.0)
    res = float(np.abs(A @ q).max() / max(1.0, np.abs(A).max()))
    return q, res, rank


def transfer_sector(spec: ChainSpec, M: int, mono: Monodromy | None = None) -> np.ndarray:
    """Coefficient stack of t(u) restricted to the M-magnon sector."""
    t = transfer(spec, mono)
    idx = ta.sector_indices(spec.L, M)
    return t.coeffs[:, idx][:, :, idx]


def tq_extract(spec: ChainSpec, M: int, mono: Monodromy | None = None,
               probe: complex = _PROBE, cluster_rtol: float = 1e-7) -> list[BetheSolution]:
    """Bethe roots from the transfer spectrum in the M-magnon sector."""
    if spec.L > 12:
        raise ValueError("tq_extract is limited to L <= 12")
    C = transfer_sector(spec, M, mono)
    T0 = np.zeros(C.shape[1:], dtype=complex)
    for c in C[::-1]:
        T0 = T0 * probe + c
    vals, vecs = np.linalg.eig(T0)
    out = []
    for g in _cluster(vals, cluster_rtol):
        v = vecs[:, g[0]]
        tau = np.array([np.vdot(v, c @ v) / np.vdot(v, v) for c in C])
        sol = None
        for Md in range(M, -1, -1):
            q, res, rank = solve_tq(spec, tau, Md)
            if res < 1e-8 and (Md == 0 or rank == Md):
                roots = npoly.polyroots(q) if Md else np.array([], dtype=complex)
                sol = BetheSolution(M=M, roots=sort_roots(roots), tau=tau, residual=res,
                                    multiplicity=len(g), infinite=M - Md)
                if Md < M:
                    sol.flags.append(f"{M - Md} infinite root(s): descendant")
                    sol.admissible = False
                break
            if res < 1e-8 and rank < Md:
                sol = BetheSolution(M=M, roots=np.array([], dtype=complex), tau=tau, residual=res,
                                    multiplicity=len(g), admissible=False,
                                    flags=["rank-deficient TQ system: fused / common-root candidate"])
                break
        if sol is None:
            sol = BetheSolution(M=M, roots=np.array([], dtype=complex), tau=tau, residual=np.inf,
                                multiplicity=len(g), admissible=False,
                                flags=["no polynomial Q found"])
        if sol.admissible:
            _annotate(spec, sol)
        if len(g) > 1:
            sol.flags.append(f"multiplicity {len(g)}")
        out.append(sol)
    return out


def _annotate(spec: ChainSpec, sol: BetheSolution) -> None:
    r = sol.roots
    for a, b in combinations(range(len(r)), 2):
        if abs(r[a] - r[b]) < 1e-7:
            sol.admissible = False
            sol.flags.append("repeated root")
            break
    for z in r:
        for t in spec.thetas:
            if abs(z - t - 0.5j) < 1e-9 or abs(z - t + 0.5j) < 1e-9:
                sol.flags.append("root on an inhomogeneity pole")
                break
    for a, b in combinations(range(len(r)), 2):
        if abs(abs(r[a] - r[b]) - 1) < 1e-6 and abs((r[a] - r[b]).real) < 1e-6:
            sol.flags.append("exact string")
            break


# ---------------------------------------------------------------------------
# Newton with twist continuation
# ---------------------------------------------------------------------------

class _Anchored:
    """Roots u_m = a_m + w_m with offsets w_m tracked separately.

    Near the Gelfand-Tsetlin point a root sits within ~kappa^{-2} of a pole
    theta_j -+ i/2; pinning the anchor there and computing that one factor
    as w_m itself keeps full relative precision in the small offset.
    """

    def __init__(self, spec: ChainSpec, anchors, pins=None, side: int = 1):
        self.th = np.asarray(spec.thetas, dtype=complex)
        self.a = np.asarray(anchors, dtype=complex)
        M = len(self.a)
        self.pins = [-1] * M if pins is None else list(pins)
        # numerator / denominator factor offsets a_m - theta_j +- i/2
        self.cp = self.a[:, None] - self.th[None, :] + 0.5j
        self.cm = self.a[:, None] - self.th[None, :] - 0.5j
        for m, j in enumerate(self.pins):
            if j >= 0:
                if side > 0:
                    self.cp[m, j] = 0.0
                else:
                    self.cm[m, j] = 0.0
        self.da = self.a[:, None] - self.a[None, :]

    def roots(self, w: np.ndarray) -> np.ndarray:
        return self.a + w

    def residual(self, kappa: complex, w: np.ndarray) -> np.ndarray:
        p = self.cp + w[:, None]
        q = self.cm + w[:, None]
        d = self.da + (w[:, None] - w[None, :])
        M = len(w)
        out = np.empty(M, dtype=complex)
        for m in range(M):
            s = 2 * np.log(kappa) + np.sum(np.log(p[m]) - np.log(q[m]))
            for n in range(M):
                if n != m:
                    s -= np.log(d[m, n] + 1j) - np.log(d[m, n] - 1j)
            out[m] = s
        return _wrap(out)

    def jacobian(self, w: np.ndarray) -> np.ndarray:
        p = self.cp + w[:, None]
        q = self.cm + w[:, None]
        d = self.da + (w[:, None] - w[None, :])
        M = len(w)
        J = np.zeros((M, M), dtype=complex)
        for m in range(M):
            J[m, m] = np.sum(1 / p[m] - 1 / q[m])
            for n in range(M):
                if n != m:
                    g = 1 / (d[m, n] + 1j) - 1 / (d[m, n] - 1j)
                    J[m, m] -= g
                    J[m, n] += g
        return J


def _newton_anchored(sys: _Anchored, kappa: complex, w0: np.ndarray, tol: float,
                     maxit: int = 40) -> tuple[np.ndarray, float, bool]:
    w = np.array(w0, dtype=complex)
    if len(w) == 0:
        return w, 0.0, True
    F = sys.residual(kappa, w)
    fn = float(np.abs(F).max())
    for _ in range(maxit):
        if fn < tol:
            return w, fn, True
        try:
            dw = np.linalg.solve(sys.jacobian(w), -F)
        except np.linalg.LinAlgError:
            return w, fn, False
        lam = 1.0
        while lam > 1e-4:
            wn = w + lam * dw
            with np.errstate(all="ignore"):
                Fn = sys.residual(kappa, wn)
            fnn = float(np.abs(Fn).max()) if np.all(np.isfinite(Fn)) else np.inf
            if fnn < fn:
                break
            lam *= 0.5
        else:
            return w, fn, False
        w, F, fn = wn, Fn, fnn
    return w, fn, fn < tol


def _newton(spec: ChainSpec, u0: np.ndarray, tol: float, maxit: int = 40) -> tuple[np.ndarray, float, bool]:
    sys = _Anchored(spec, np.zeros(len(u0)))
    return _newton_anchored(sys, spec.kappa, np.asarray(u0, dtype=complex), tol, maxit)


def gt_seed(spec: ChainSpec, subset, large: bool = True) -> tuple[_Anchored, np.ndarray]:
    """Gelfand-Tsetlin anchors theta_i -/+ i/2 and first-order offsets."""
    th = np.asarray(spec.thetas)
    sgn = -1 if large else 1
    a = np.array([th[i] + sgn * 0.5j for i in subset], dtype=complex)
    sys = _Anchored(spec, a, pins=list(subset), side=1 if large else -1)
    w = np.zeros(len(a), dtype=complex)
    k2 = spec.kappa**2
    for m, i in enumerate(subset):
        others = [j for j in range(spec.L) if j != i]
        pref = np.prod([(a[m] - th[j] + 0.5j) / (a[m] - th[j] - 0.5j) for j in others])
        rhs = np.prod([(a[m] - a[n] + 1j) / (a[m] - a[n] - 1j) for n in range(len(a)) if n != m])
        if large:
            # factor (u - th + i/2)/(u - th - i/2) ~ i w
            w[m] = -1j * rhs / (k2 * pref)
        else:
            # factor ~ -i / w
            w[m] = -1j * k2 * pref / rhs
    return sys, w


def _continue(spec: ChainSpec, subset, kappa_target: complex, start_mod: float = GT_KAPPA,
              max_steps: int = 4000, bump: float = PATH_BUMP) -> tuple[np.ndarray | None, str]:
    large = abs(kappa_target) >= 1
    phase = kappa_target / abs(kappa_target)
    k0 = phase * (start_mod if large else 1 / start_mod)
    l0, l1 = np.log(k0), np.log(kappa_target)
    sys, w = gt_seed(spec.with_kappa(k0), subset, large)
    w, fn, ok = _newton_anchored(sys, k0, w, TOL_TARGET)
    if not ok:
        return None, f"GT start failed (residual {fn:.2e})"
    s, ds = 0.0, 0.05
    prev = None
    steps = 0
    while s < 1.0 and steps < max_steps:
        steps += 1
        s1 = min(1.0, s + ds)
        # detour through complex twist avoids root collisions on the real axis
        kap = np.exp(l0 + s1 * (l1 - l0) + 1j * bump * s1 * (1 - s1))
        guess = w if prev is None else w + (w - prev[0]) * (s1 - s) / (s - prev[1])
        wn, fn, ok = _newton_anchored(sys, kap, guess, 1e-11, maxit=8)
        u_old, u_new = sys.roots(w), sys.roots(wn)
        if ok and np.all(np.abs(wn - guess) < 0.05 * (1 + np.abs(u_old))) \
                and np.all(np.abs(u_new - u_old) < 0.5 * (1 + np.abs(u_old))):
            prev = (w, s)
            w, s = wn, s1
            ds = min(ds * 1.5, 0.2)
        else:
            ds *= 0.5
            if ds < 1e-7:
                return None, f"step size underflow at s={s:.4f}"
    if s < 1.0:
        return None, "too many steps"
    w, fn, ok = _newton_anchored(sys, kappa_target, w, TOL_TARGET)
    u = sys.roots(w)
    # re-polish in plain variables so the reported residual is the public one
    un, fn2, _ = _newton(spec.with_kappa(kappa_target), u, TOL_TARGET)
    if fn2 <= fn:
        u, fn = un, fn2
    return (u if fn < TOL_ACCEPT else None), ("ok" if fn < TOL_ACCEPT else f"final residual {fn:.2e}")


def dedupe(solutions: list[BetheSolution]) -> list[BetheSolution]:
    out: list[BetheSolution] = []
    for s in solutions:
        r = sort_roots(s.roots)
        scale = max(1.0, float(np.abs(r).max())) if len(r) else 1.0
        if any(len(r) == len(o.roots) and np.all(np.abs(r - sort_roots(o.roots)) < DEDUP_FUZZ * scale)
               and o.infinite == s.infinite for o in out):
            continue
        s.roots = r
        out.append(s)
    return out


def newton_solve(spec: ChainSpec, M: int, seed_strategy: str | list = "gt",
                 eps: float = PERIODIC_EPS) -> list[BetheSolution]:
    """All M-magnon solutions reachable from the Gelfand-Tsetlin seeds.

    `seed_strategy` is "gt" (one path per subset I of size M) or an explicit
    list of root arrays used directly as Newton seeds at the target twist.
    At kappa = +-1 the equations are solved at kappa(1+eps) and
    kappa(1+2 eps) and linearly extrapolated; roots growing like 1/eps are
    classified as infinite.
    """
    k = spec.kappa
    if isinstance(seed_strategy, str) and _coincident(spec.thetas):
        return _solve_split(spec, M, eps)
    periodic = abs(abs(k) - 1) < 1e-12 and abs(k.imag) < 1e-12
    if periodic:
        # solve at a moderate twist, then walk in geometric steps towards
        # kappa -> k; roots that run off behave like b / log(kappa)
        base = _solve_at(spec.with_kappa(k * np.exp(PERIODIC_START)), M, seed_strategy)
        s1, s2 = [], []
        for sol in base:
            if not sol.residual < TOL_ACCEPT:
                s1.append(sol)
                continue
            pair = _approach_periodic(spec, sol.roots, eps)
            if pair is None:
                s1.append(BetheSolution(M=M, roots=np.array([], dtype=complex), admissible=False,
                                        residual=np.inf, flags=sol.flags + ["periodic approach failed"]))
                continue
            u1, u2 = pair
            s1.append(_finish(spec.with_kappa(k * (1 + eps)), M, u1, sol.flags))
            s2.append(_finish(spec.with_kappa(k * (1 + 2 * eps)), M, u2, sol.flags))
        return _extrapolate(spec, s1, s2)
    return _solve_at(spec, M, seed_strategy)


def _coincident(thetas, tol: float = 1e-8) -> bool:
    th = np.asarray(thetas, dtype=complex)
    return any(abs(a - b) < tol for a, b in combinations(th, 2))


def _split_spec(spec: ChainSpec, s: float) -> ChainSpec:
    """Inhomogeneities pulled apart by s times fixed generic offsets."""
    L = spec.L
    off = SPLIT_SCALE * (np.arange(L) - (L - 1) / 2) * (1 + 0.37j) / max(L - 1, 1)
    off = off + SPLIT_SCALE * 0.11 * np.sin(1.7 * np.arange(L))
    return ChainSpec(L, tuple(np.asarray(spec.thetas) + s * off), spec.kappa)


def _solve_split(spec: ChainSpec, M: int, eps: float) -> list[BetheSolution]:
    """Coincident inhomogeneities: solve a split chain, then merge them back."""
    out = []
    for sol in newton_solve(_split_spec(spec, 1.0), M, eps=eps):
        if not sol.residual < TOL_ACCEPT:
            continue
        u = np.asarray(sol.roots, dtype=complex)
        s, ds, prev = 1.0, 0.1, None
        while s > 0 and u is not None:
            s1 = max(0.0, s - ds)
            guess = u if prev is None else u + (u - prev[0]) * (s1 - s) / (s - prev[1])
            un, fn, ok = _newton(_split_spec(spec, s1), guess, TOL_TARGET, maxit=20)
            if ok and np.all(np.abs(un - guess) < 0.1 * (1 + np.abs(guess))):
                prev, u, s = (u, s), un, s1
                ds = min(ds * 1.5, 0.2)
            else:
                ds *= 0.5
                if ds < 1e-6:
                    u = None
        if u is None:
            log.info("split path dropped at s=%.3g", s)
            continue
        fin = _finish(spec, len(u), u, sol.flags + ["merged inhomogeneities"])
        fin.M, fin.infinite = M, sol.infinite
        if fin.residual < TOL_ACCEPT and "repeated root" not in fin.flags:
            out.append(fin)
    return dedupe(out)


def _approach_periodic(spec: ChainSpec, u: np.ndarray, eps: float):
    """Continue roots from log-twist PERIODIC_START down to log(1+eps), log(1+2eps)."""
    k = spec.kappa
    hist = [(PERIODIC_START, np.asarray(u, dtype=complex))]
    out = {}
    targets = [np.log1p(2 * eps), np.log1p(eps)]
    l = PERIODIC_START
    ratio = 0.5
    while targets:
        ln = max(l * ratio, targets[0])
        if len(hist) >= 2:
            (la, ua), (lb, ub) = hist[-2], hist[-1]
            # fit u = a + b / l through the last two points
            b = (ua - ub) / (1 / la - 1 / lb)
            guess = ub + b * (1 / ln - 1 / lb)
        else:
            guess = hist[-1][1]
        un, fn, ok = _newton(spec.with_kappa(k * np.exp(ln)), guess, TOL_TARGET, maxit=20)
        if ok and np.all(np.abs(un - guess) < 0.1 * (1 + np.abs(guess))):
            hist.append((ln, un))
            l = ln
            ratio = max(ratio * 0.7, 0.1)
            if ln == targets[0]:
                out[len(targets)] = un
                targets.pop(0)
        else:
            ratio = ratio + (1 - ratio) * 0.5
            if ratio > 0.999:
                return None
    return out[1], out[2]


def _solve_at(spec: ChainSpec, M: int, seed_strategy) -> list[BetheSolution]:
    sols = []
    if isinstance(seed_strategy, str):
        if seed_strategy != "gt":
            raise ValueError(f"unknown seed strategy {seed_strategy!r}")
        found: list[BetheSolution] = []
        for subset in combinations(range(spec.L), M):
            msg = "no path"
            for bump in PATH_BUMPS:
                u, msg = _continue(spec, subset, spec.kappa, bump=bump)
                if u is None:
                    continue
                sol = _finish(spec, M, u, [f"path {subset}"])
                # a path that lands on a repeated root or on an earlier
                # endpoint has jumped sheets; retry with another detour
                if "repeated root" in sol.flags or len(dedupe(found + [sol])) == len(found):
                    msg = "path collided"
                    continue
                found.append(sol)
                break
            else:
                log.info("path %s dropped: %s", subset, msg)
                sols.append(BetheSolution(M=M, roots=np.array([], dtype=complex), admissible=False,
                                          residual=np.inf, flags=[f"path {subset}: {msg}"]))
        sols.extend(found)
    else:
        for seed in seed_strategy:
            u, fn, ok = _newton(spec, np.asarray(seed, dtype=complex), TOL_TARGET)
            if fn < TOL_ACCEPT:
                sols.append(_finish(spec, M, u, ["explicit seed"]))
    good = dedupe([s for s in sols if s.residual < TOL_ACCEPT])
    return good + [s for s in sols if not s.residual < TOL_ACCEPT]


def _finish(spec: ChainSpec, M: int, u: np.ndarray, flags: list) -> BetheSolution:
    res = float(np.abs(bethe_residual(spec, u)).max()) if M else 0.0
    sol = BetheSolution(M=M, roots=sort_roots(u), residual=res, flags=list(flags))
    _annotate(spec, sol)
    try:
        sol.tau = tau_from_Q(spec, sol.roots, tol=1e-7)
    except NotOnShellError:
        sol.flags.append("TQ remainder too large")
    return sol


def _extrapolate(spec: ChainSpec, s1: list[BetheSolution], s2: list[BetheSolution]) -> list[BetheSolution]:
    out = []
    for a in s1:
        if not a.residual < TOL_ACCEPT:
            out.append(a)
            continue
        path = a.flags[0] if a.flags else None
        b = next((x for x in s2 if x.flags and x.flags[0] == path), None)
        if b is None:
            # match by nearest root set
            cands = [x for x in s2 if x.residual < TOL_ACCEPT and len(x.roots) == len(a.roots)]
            if not cands:
                continue
            b = min(cands, key=lambda x: np.abs(sort_roots(x.roots) - a.roots).sum())
        ra, rb = _match(a.roots, b.roots)
        finite, infinite = [], 0
        for za, zb in zip(ra, rb):
            if abs(za) > INFINITE_ROOT or (abs(za) > 1e3 and abs(za / zb) > 1.5):
                infinite += 1
            else:
                finite.append(2 * za - zb)
        finite = np.array(finite, dtype=complex)
        if len(finite):
            finite, _, _ = _newton(spec, finite, TOL_TARGET, maxit=5)
        res = float(np.abs(bethe_residual(spec, finite)).max()) if len(finite) else 0.0
        sol = BetheSolution(M=len(finite), roots=sort_roots(finite), residual=res,
                            infinite=infinite, flags=list(a.flags))
        if infinite:
            sol.flags.append(f"{infinite} infinite root(s): descendant")
        _annotate(spec, sol)
        try:
            sol.tau = tau_from_Q(spec, sol.roots, tol=1e-5)
        except NotOnShellError:
            sol.flags.append("TQ remainder too large after extrapolation")
        out.append(sol)
    return dedupe(out)


def _match(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pair the roots of b with those of a greedily by distance."""
    b = list(b)
    out = []
    for z in a:
        j = int(np.argmin([abs(z - w) for w in b]))
        out.append(b.pop(j))
    return a, np.array(out)


# ---------------------------------------------------------------------------
# Bethe states and charges
# ---------------------------------------------------------------------------

class VacuumError(ValueError):
    """Reference state is not annihilated by C(u)."""


def aba_state(spec: ChainSpec, roots, vacuum: np.ndarray | None = None,
              mono: Monodromy | None = None, check: bool = True,
              rng: np.random.Generator | None = None) -> np.ndarray:
    """B(u_1) ... B(u_M) applied to the reference state."""
    mono = monodromy(spec) if mono is None else mono
    v = ta.vacuum(spec.L) if vacuum is None else np.asarray(vacuum, dtype=complex)
    if check:
        rng = np.random.default_rng(1) if rng is None else rng
        for _ in range(3):
            u = complex(*rng.normal(size=2))
            C = mono.C(u)
            if np.linalg.norm(C @ v) > 1e-10 * max(1.0, np.linalg.norm(C)) * np.linalg.norm(v):
                raise VacuumError("reference state is not annihilated by C(u)")
    scale = np.linalg.norm(v)
    for u in roots:
        B = mono.B(u)
        v = B @ v
        scale *= max(np.linalg.norm(B, 2), 1e-300)
    if np.linalg.norm(v) < 1e-12 * scale:
        log.info("Bethe vector vanishes")
    return v


def is_zero_state(spec: ChainSpec, roots, v: np.ndarray, mono: Monodromy | None = None) -> bool:
    mono = monodromy(spec) if mono is None else mono
    scale = np.prod([np.linalg.norm(mono.B(u), 2) for u in roots]) if len(roots) else 1.0
    return bool(np.linalg.norm(v) < 1e-12 * scale)


def eigen_residual(spec: ChainSpec, v: np.ndarray, tau: np.ndarray, points,
                   mono: Monodromy | None = None) -> float:
    t = transfer(spec, mono)
    nv = np.linalg.norm(v)
    return max(float(np.linalg.norm(t(u) @ v - npoly.polyval(u, tau) * v) /
                     (nv * max(1.0, np.linalg.norm(t(u), 2)))) for u in points)


@dataclass
class ChargeEigenvalues:
    tau1: complex
    tau2: complex
    tau2_periodic: complex | None = None
    tau3_periodic: complex | None = None


def charge_eigenvalues(spec: ChainSpec, solution) -> ChargeEigenvalues:
    """Closed-form eigenvalues of t_1, t_2 (and t_2(1), t_3(1) at kappa = 1)."""
    roots = solution.roots if isinstance(solution, BetheSolution) else np.asarray(solution)
    L, M, k = spec.L, len(roots), spec.kappa
    th = np.asarray(spec.thetas)
    su, st, st2 = np.sum(roots), np.sum(th), np.sum(th**2)
    h = L / 2 - M
    t1 = (k + 1 / k) * L / 2 + (k - 1 / k) * h
    t2p = -1j * st + h * (h + 1) + L * (L - 4) / 4
    t2 = (k + 1 / k) / 2 * t2p + (k - 1 / k) / 2 * (-1j * st + 2j * su + (L - 1) * h)
    out = ChargeEigenvalues(t1, t2)
    if abs(k - 1) < 1e-12:
        out.tau2_periodic = t2p
        out.tau3_periodic = (-st2 - 1j * (L - M - 1) * st + 2j * (h + 1) * su
                             + (h - 1) * (L * (L - M - 1) + M * (M - 1)) / 3)
    return out


def charges_from_series(spec: ChainSpec, tau: np.ndarray) -> np.ndarray:
    """tau_n for n = 1..3 read off the large-u series of the eigenvalue."""
    c = tau_series(spec, tau, 4)
    return np.array([c[n] / (1j**n) for n in range(1, 4)])


def gt_solution(spec: ChainSpec, subset) -> BetheSolution:
    """Extreme-twist solution u_m = theta_{i_m} - i/2 with the A-eigenvalue as tau.

    `subset` uses 1-based site labels.
    """
    I = sorted(subset)
    th = spec.thetas
    roots = np.array([th[i - 1] - 0.5j for i in I], dtype=complex)
    alpha = poly_from_roots([th[i - 1] + 0.5j for i in I] +
                            [th[j - 1] - 0.5j for j in range(1, spec.L + 1) if j not in I])
    return BetheSolution(M=len(I), roots=roots, tau=alpha, residual=0.0,
                         flags=["Gelfand-Tsetlin limit"])
