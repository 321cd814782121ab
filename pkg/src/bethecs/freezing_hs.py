"""
Freezing: beta -> infinity followed by evaluation at consecutive roots of unity.

Builds the Haldane-Shastry Hamiltonian, the frozen twisted and periodic
charges, the classical higher charges, motif bookkeeping and frozen Bethe
roots.  The N = 4, lambda = (2,1,1,0) example is reproduced end to end from
the spin-Calogero-Sutherland side.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Sequence

import numpy as np
import numpy.polynomial.polynomial as npoly

from . import spin_cs as sc
from . import tensoralg as ta
from .bethe_solver import poly_from_roots, qq_residual
from .dunkl_jack import INF
from .xxx_chain import ChainSpec

# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def root_point(N: int) -> np.ndarray:
    """(1, w, ..., w^{N-1}) with w = exp(2 pi i/N)."""
    return np.exp(2j * np.pi * np.arange(N) / N)


@dataclass
class FrozenState:
    N: int
    amplitudes: np.ndarray

    def is_zero(self, tol: float = 1e-10) -> bool:
        return bool(np.linalg.norm(self.amplitudes) < tol)


def evaluate(v: sc.SpinPolyVector | sc.JackSpinState) -> FrozenState:
    """ev: z_k -> exp(2 pi i (k-1)/N)."""
    return FrozenState(v.N, v.evaluate(root_point(v.N)))


# ---------------------------------------------------------------------------
# Haldane-Shastry operators
# ---------------------------------------------------------------------------

def _s(N: int, a: int) -> float:
    return np.sin(np.pi * a / N)


def _cot(N: int, a: int) -> float:
    return np.cos(np.pi * a / N) / np.sin(np.pi * a / N)


def _perms(N: int) -> dict[tuple[int, int], np.ndarray]:
    return {(i, j): ta.permutation_operator(i, j, N)
            for i in range(1, N + 1) for j in range(1, N + 1) if i != j}


def hs_hamiltonian(N: int) -> np.ndarray:
    """sum_{i<j} (1 + P_ij) / (4 sin^2(pi (i - j)/N))."""
    if N < 2:
        raise ValueError("N >= 2")
    D = 2**N
    out = np.zeros((D, D), dtype=complex)
    for i, j in combinations(range(1, N + 1), 2):
        out += (np.eye(D) + ta.permutation_operator(i, j, N)) / (4 * _s(N, i - j) ** 2)
    return out


def hs_twist_part(N: int) -> np.ndarray:
    """sum_{i<j} (e^{i pi (i-j)/N} sigma^z_j - e^{i pi (j-i)/N} sigma^z_i) / sin(pi (i-j)/N) P_ij."""
    D = 2**N
    out = np.zeros((D, D), dtype=complex)
    sz = [None] + [ta.sigma("z", i, N) for i in range(1, N + 1)]
    for i, j in combinations(range(1, N + 1), 2):
        a = np.exp(1j * np.pi * (i - j) / N) * sz[j] - np.exp(1j * np.pi * (j - i) / N) * sz[i]
        out += a @ ta.permutation_operator(i, j, N) / _s(N, i - j)
    return out


def hs_t2(N: int, kappa: complex) -> np.ndarray:
    k = complex(kappa)
    if k == 0:
        raise ValueError("kappa must be nonzero")
    return (k + 1 / k) / 2 * ta.sum_permutations(N) + (k - 1 / k) / 4j * hs_twist_part(N)


def hs_t3(N: int) -> np.ndarray:
    """1/2 sum' (1/3 + i cot(pi (i-j)/N)) P_ij P_jk."""
    if N < 3:
        raise ValueError("N >= 3")
    P = _perms(N)
    D = 2**N
    out = np.zeros((D, D), dtype=complex)
    for i, j, k in permutations(range(1, N + 1), 3):
        out += 0.5 * (1 / 3 + 1j * _cot(N, i - j)) * P[i, j] @ P[j, k]
    return out


def hs_t3_ordered(N: int) -> np.ndarray:
    """The same charge from the ordered triple sum with the cotangent sum."""
    P = _perms(N)
    D = 2**N
    out = np.zeros((D, D), dtype=complex)
    for i, j, k in combinations(range(1, N + 1), 3):
        a, b = P[i, j] @ P[j, k], P[j, k] @ P[i, j]
        c = _cot(N, i - j) + _cot(N, j - k) + _cot(N, k - i)
        out += 0.5 * (a + b + 1j * c * (a - b))
    return out


@dataclass
class LegacyCharges:
    H3: np.ndarray
    I3: np.ndarray
    H4: np.ndarray | None


def legacy_charges(N: int) -> LegacyCharges:
    """H_3, Inozemtsev's I_3 and H_4 as primed sums over sites."""
    if N < 3:
        raise ValueError("N >= 3")
    P = _perms(N)
    D = 2**N
    H3 = np.zeros((D, D), dtype=complex)
    I3 = np.zeros((D, D), dtype=complex)
    for i, j, k in permutations(range(1, N + 1), 3):
        PP = P[i, j] @ P[j, k]
        H3 += PP / (_s(N, i - j) * _s(N, j - k) * _s(N, k - i))
        I3 += _cot(N, i - j) * PP
    H4 = None
    if N >= 4:
        H4 = np.zeros((D, D), dtype=complex)
        for i, j, k, l in permutations(range(1, N + 1), 4):
            H4 += P[i, j] @ P[j, k] @ P[k, l] / (_s(N, i - j) * _s(N, j - k) * _s(N, k - l) * _s(N, l - i))
        for i, j in permutations(range(1, N + 1), 2):
            H4 -= 2 * P[i, j] / _s(N, i - j) ** 4
    return LegacyCharges(H3, I3, H4)


def rapidity_operator(N: int) -> list[np.ndarray]:
    """Components of sum_{i<j} cot(pi (i-j)/N) sigma_i x sigma_j."""
    s = {a: [None] + [ta.sigma(a, i, N) for i in range(1, N + 1)] for a in "xyz"}
    D = 2**N
    out = [np.zeros((D, D), dtype=complex) for _ in range(3)]
    cyc = [("y", "z"), ("z", "x"), ("x", "y")]
    for i, j in combinations(range(1, N + 1), 2):
        c = _cot(N, i - j)
        for a, (b, d) in enumerate(cyc):
            out[a] += c * (s[b][i] @ s[d][j] - s[d][i] @ s[b][j])
    return out


def spin_dot_rapidity(N: int) -> np.ndarray:
    """-i S . Lambda."""
    S = [sum(ta.sigma(a, i, N) for i in range(1, N + 1)) / 2 for a in "xyz"]
    Lam = rapidity_operator(N)
    return -1j * sum(S[a] @ Lam[a] for a in range(3))


# ---------------------------------------------------------------------------
# motifs
# ---------------------------------------------------------------------------

@dataclass
class Motif:
    N: int
    J: tuple[int, ...]
    content: list[int] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return int(np.prod([p + 1 for p in self.content])) if self.content else 1

    @property
    def kept_sites(self) -> list[int]:
        drop = {s for j in self.J for s in (j, j + 1)}
        return [i for i in range(1, self.N + 1) if i not in drop]

    def frozen_delta(self) -> list[Fraction]:
        return [Fraction(self.N + 1 - 2 * i, 2) for i in self.kept_sites]

    def partition(self) -> tuple[int, ...]:
        """Smallest partition with this motif (lambda_N = 0)."""
        lam = [0] * self.N
        for i in range(self.N - 1, 0, -1):
            lam[i - 1] = lam[i] + (0 if i in self.J else 1)
        return tuple(lam)

    def to_dict(self) -> dict:
        return {"N": self.N, "J": list(self.J), "content": self.content, "dim": self.dim}


def motif(N: int, J: Sequence[int]) -> Motif:
    J = tuple(sorted(int(j) for j in J))
    if any(not 1 <= j < N for j in J):
        raise ValueError(f"motif entries must lie in 1..{N - 1}")
    if any(b - a < 2 for a, b in zip(J, J[1:])):
        raise ValueError("motif entries must not be consecutive")
    m = Motif(N, J)
    d = m.frozen_delta()
    content, run = [], 0
    for a, b in zip([None] + d, d):
        if a is not None and a - b == 1:
            run += 1
        else:
            if run:
                content.append(run)
            run = 1
    if run:
        content.append(run)
    m.content = content
    return m


def all_motifs(N: int) -> list[Motif]:
    out = []
    for r in range(0, N // 2 + 1):
        for J in combinations(range(1, N), r):
            if all(b - a >= 2 for a, b in zip(J, J[1:])):
                out.append(motif(N, J))
    return out


# ---------------------------------------------------------------------------
# frozen Bethe roots from the QQ system
# ---------------------------------------------------------------------------

@dataclass
class FrozenSolution:
    M: int
    x_roots: np.ndarray
    dual_x_roots: np.ndarray
    residual: float
    survives: bool

    def to_dict(self) -> dict:
        return {"M": self.M, "roots": [[float(z.real), float(z.imag)] for z in self.x_roots],
                "dual_roots": [[float(z.real), float(z.imag)] for z in self.dual_x_roots],
                "residual": self.residual, "survives": self.survives}


def frozen_chain(N: int, J: Sequence[int], kappa: complex = 1.0) -> sc.EffectiveChain:
    return sc.effective_chain(motif(N, J).partition(), INF, kappa)


class _QQSystem:
    """QQ relation as a square polynomial system in the free Q, dual-Q coefficients.

    The relation is bilinear, so the Jacobian is assembled from shifted
    monomials rather than finite differences.
    """

    def __init__(self, spec: ChainSpec, M: int, periodic: bool):
        L, k = spec.L, spec.kappa
        self.L, self.M = L, M
        self.K = L - M + 1 if periodic else L - M
        self.free_t = [j for j in range(self.K) if not (periodic and j == M)]
        self.n = M + len(self.free_t)
        self.a, self.b = (1.0, 1.0) if periodic else (k, 1 / k)
        top = max(M, self.K) + 1
        self.mon_m = [_pad(_shift(np.eye(top)[j], -0.5j), top) for j in range(top)]
        self.mon_p = [_pad(_shift(np.eye(top)[j], 0.5j), top) for j in range(top)]
        th = poly_from_roots(spec.thetas)
        self.rhs = (1j * (L - 2 * M + 1) if periodic else (k - 1 / k)) * th

    def unpack(self, c):
        q = np.concatenate([c[:self.M], [1.0]]).astype(complex)
        qt = np.zeros(self.K + 1, dtype=complex)
        qt[self.K] = 1
        qt[self.free_t] = c[self.M:]
        return q, qt

    def _sh(self, c, mons):
        return sum(ci * mons[j] for j, ci in enumerate(c))

    def residual_jacobian(self, c):
        q, qt = self.unpack(c)
        qm, qp = self._sh(q, self.mon_m), self._sh(q, self.mon_p)
        tm, tp = self._sh(qt, self.mon_m), self._sh(qt, self.mon_p)
        r = _pad(self.a * np.convolve(qm, tp) - self.b * np.convolve(qp, tm) - _pad(self.rhs, 2 * len(qm) - 1),
                 self.L + 1)[:self.L]
        cols = []
        for j in range(self.M):
            cols.append(self.a * np.convolve(self.mon_m[j], tp) - self.b * np.convolve(self.mon_p[j], tm))
        for j in self.free_t:
            cols.append(self.a * np.convolve(qm, self.mon_p[j]) - self.b * np.convolve(qp, self.mon_m[j]))
        Jm = np.array([_pad(col, self.L + 1)[:self.L] for col in cols]).T if cols else np.zeros((self.L, 0))
        return r, Jm


def _pad(c, n: int) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    return np.concatenate([c, np.zeros(max(0, n - len(c)), dtype=complex)])[:max(n, len(c))]


def _shift(c: np.ndarray, s: complex) -> np.ndarray:
    """Ascending coefficients of p(u + s)."""
    out = np.zeros(1, dtype=complex)
    for a in np.asarray(c)[::-1]:
        out = npoly.polyadd(npoly.polymul(out, [s, 1]), [a])
    return out


def solve_qq(spec: ChainSpec, M: int, nstarts: int = 200, seed: int = 0,
             tol: float = 1e-11, maxit: int = 60) -> list[tuple[np.ndarray, np.ndarray, float]]:
    """Solutions of the QQ system found by damped Newton from random starts.

    Returns (Q roots, dual Q roots, residual) in the u variable.
    """
    periodic = abs(spec.kappa - 1) < 1e-14
    if periodic and 2 * M > spec.L:
        raise ValueError("periodic case needs 2M <= L")
    sys = _QQSystem(spec, M, periodic)
    rng = np.random.default_rng(seed)
    scale = 1 + max([abs(t) for t in spec.thetas] + [0.0])
    found: list[tuple[np.ndarray, np.ndarray, float]] = []
    keys: list[np.ndarray] = []
    for _ in range(1 if sys.n == 0 else nstarts):
        q0 = poly_from_roots(scale * (rng.normal(size=M) + 1j * rng.normal(size=M)))
        t0 = poly_from_roots(scale * (rng.normal(size=sys.K) + 1j * rng.normal(size=sys.K)))
        c = np.concatenate([q0[:M], t0[sys.free_t]])
        r, Jm = sys.residual_jacobian(c)
        ok = False
        for _ in range(maxit):
            nr = np.linalg.norm(r)
            if nr < tol * scale**spec.L:
                ok = True
                break
            step, *_ = np.linalg.lstsq(Jm, -r, rcond=None)
            t = 1.0
            while True:
                cn = c + t * step
                rn, Jn = sys.residual_jacobian(cn)
                if np.linalg.norm(rn) < nr or t < 1e-4:
                    break
                t /= 2
            c, r, Jm = cn, rn, Jn
        if not ok:
            continue
        q, qt = sys.unpack(c)
        key = q[:M]
        if any(np.max(np.abs(key - k0), initial=0.0) < 1e-6 * scale**M for k0 in keys):
            continue
        keys.append(key)
        qroots = npoly.polyroots(q) if M else np.array([], dtype=complex)
        troots = npoly.polyroots(qt) if len(qt) > 1 else np.array([], dtype=complex)
        res = float(np.max(np.abs(qq_residual(spec, qroots, troots, periodic))))
        found.append((qroots, troots, res))
    return found


def frozen_bethe(N: int, J: Sequence[int], M: int, kappa: complex = 1.0, nstarts: int = 300,
                 seed: int = 0, survivors_only: bool = True, gap: float = 1e-6) -> list[FrozenSolution]:
    """Bethe roots x_m of the frozen effective chain for a motif."""
    chain = frozen_chain(N, J, kappa)
    spec = chain.spec()
    if M > spec.L:
        raise ValueError(f"M = {M} exceeds L = {spec.L}")
    out = []
    for qr, tr, res in solve_qq(spec, M, nstarts=nstarts, seed=seed):
        common = any(abs(a - b) < gap for a in qr for b in tr)
        if survivors_only and common:
            continue
        x = sc_sort(-1j * qr)
        xt = sc_sort(-1j * tr)
        out.append(FrozenSolution(M, x, xt, res, not common))
    out.sort(key=lambda s: tuple((round(z.real, 8), round(z.imag, 8)) for z in s.x_roots))
    return out


def sc_sort(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    z = np.where(np.abs(z.real) < 1e-12, 1j * z.imag, z)
    z = np.where(np.abs(z.imag) < 1e-12, z.real + 0j, z)
    return np.array(sorted(z, key=lambda w: (round(w.real, 8), round(w.imag, 8))), dtype=complex)


def motif_report(N: int, J: Sequence[int], kappa: complex = 1.0, seed: int = 0) -> dict:
    m = motif(N, J)
    chain = frozen_chain(N, J, kappa)
    roots = {}
    for M in range(0, chain.L // 2 + 1 if abs(kappa - 1) < 1e-14 else chain.L + 1):
        roots[str(M)] = [s.to_dict() for s in frozen_bethe(N, J, M, kappa, seed=seed)]
    d = m.to_dict()
    d["roots"] = roots
    d["charges"] = {"L_eff": chain.L, "delta": [str(x) for x in m.frozen_delta()]}
    return d


# ---------------------------------------------------------------------------
# the N = 4 example
# ---------------------------------------------------------------------------

N4_LAMBDA = (2, 1, 1, 0)


def xb1(beta: float, kappa: complex) -> tuple[complex, complex]:
    """Closed-form one-magnon roots (x_{1,+}, x_{1,-}) at finite beta."""
    b, k = beta, complex(kappa)
    r = np.sqrt((3 * b + 2) ** 2 * k**4 - 2 * (7 * b * b + 12 * b + 4) * k**2 + (3 * b + 2) ** 2 + 0j)
    base = (b + 2) * k + (b - 2) / k
    den = 2 * b * (k - 1 / k)
    return -(base + r / k) / den, -(base - r / k) / den


def x_frozen(kappa: complex) -> tuple[complex, complex]:
    """(x°_{1,+}, x°_{1,-})."""
    k = complex(kappa)
    r = np.sqrt(9 * k**4 - 14 * k**2 + 9 + 0j)
    return -(k + 1 / k + r / k) / (2 * (k - 1 / k)), -(k + 1 / k - r / k) / (2 * (k - 1 / k))


def _ket(s: str) -> np.ndarray:
    v = np.zeros(2 ** len(s), dtype=complex)
    v[int(s.replace("u", "0").replace("d", "1"), 2)] = 1
    return v


def psi_state(x: complex) -> np.ndarray:
    return (1j * (_ket("uudd") - _ket("uddu") - _ket("duud") + _ket("dduu"))
            - x * (_ket("dudu") - _ket("udud")))


def magnon_state() -> np.ndarray:
    """-4i (|d u u u> - |u d u u> + |u u d u> - |u u u d>)."""
    return -4j * (_ket("duuu") - _ket("uduu") + _ket("uudu") - _ket("uuud"))


def c_coefficients(kappa: complex) -> tuple[complex, complex]:
    k = complex(kappa)
    xp, xm = x_frozen(k)
    base = (1 - 1 / k) * (xm - 2) / (np.sqrt(2) * xp)
    return 2 * np.sqrt(2) * 1j * (1 + 1 / k) * base, -2 * np.sqrt(2) * 1j * (1 - 1 / k) / base


def frozen_vacuum(lam: Sequence[int] = N4_LAMBDA) -> sc.JackSpinState:
    """|0_lambda> at beta = infinity, split into nonsymmetric Jack components."""
    hw = sc.highest_weight_vector(lam, gamma=0)
    return sc.jack_spin_components(hw.vector, lam, Fraction(0))


def frozen_bethe_state(xs, kappa: complex, lam: Sequence[int] = N4_LAMBDA) -> np.ndarray:
    """ev[B°(x_1) ... B°(x_M)|0_lambda>]."""
    st = frozen_vacuum(lam)
    for x in np.atleast_1d(xs):
        st = sc.cs_monodromy_entry(st, complex(x), "B", kappa)
    return evaluate(st).amplitudes


def _richardson(f, h0: float = 2e-2, levels: int = 5) -> np.ndarray:
    """Limit h -> 0 of f(h) for f analytic at 0.

    The symmetric average removes odd orders; the table then eliminates
    h^2, h^4, ... with step ratio 2.
    """
    rows = []
    for n in range(levels):
        h = h0 / 2**n
        row = [(np.asarray(f(h)) + np.asarray(f(-h))) / 2]
        for m in range(1, n + 1):
            r = 4**m
            row.append((r * row[m - 1] - rows[-1][m - 1]) / (r - 1))
        rows.append(row)
    return rows[-1][-1]


def n4_example(kappa: complex = 1.5, beta: float = 2.0) -> dict:
    """Reproduce the worked N = 4 example and report deviations."""
    k = complex(kappa)
    if abs(k) < 1e-14 or abs(k * k - 1) < 1e-12:
        raise ValueError("twisted branch needs kappa not in {0, 1, -1}")
    out: dict = {}
    hw = sc.highest_weight_vector(N4_LAMBDA, beta)
    v = hw.vector
    out["vacuum_fermionic"] = v.is_fermionic()
    out["momentum"] = sc.momentum_eigenvalue(N4_LAMBDA)
    out["energy"] = str(sc.energy_eigenvalue(N4_LAMBDA, beta))
    ev0 = evaluate(v).amplitudes
    out["ev_vacuum_dev"] = float(np.max(np.abs(ev0 - magnon_state())))

    sols = sc.cs_bethe_solutions(N4_LAMBDA, beta, k, 1)
    got = sc_sort([s.x_roots[0] for s in sols if len(s.x_roots) == 1])
    want = sc_sort(xb1(beta, k))
    out["xb1_dev"] = float(np.max(np.abs(got - want))) if len(got) == 2 else float("inf")

    fz = frozen_bethe(4, [2], 1, k)
    got = sc_sort([s.x_roots[0] for s in fz])
    xp, xm = x_frozen(k)
    out["frozen_roots_dev"] = float(np.max(np.abs(got - sc_sort([xp, xm])))) if len(got) == 2 else float("inf")

    cp, cm = c_coefficients(k)
    devs = []
    T2 = hs_t2(4, k)
    t2dev = []
    for x, c in ((xp, cp), (xm, cm)):
        state = frozen_bethe_state(x, k)
        devs.append(float(np.max(np.abs(state - c * psi_state(x)))))
        psi = psi_state(x)
        t2dev.append(float(np.max(np.abs(T2 @ psi + (k - 1 / k) * x * psi))))
    out["bethe_state_dev"] = max(devs)
    out["t2_eigen_dev"] = max(t2dev)
    H = hs_hamiltonian(4)
    lam = (ev0.conj() @ H @ ev0) / (ev0.conj() @ ev0)
    out["hs_eigen_dev"] = float(np.max(np.abs(H @ ev0 - lam * ev0)))
    out["hs_energy"] = float(lam.real)

    # kappa -> 1 limits
    def lim_plus(h):
        kk = 1 + h
        x = x_frozen(kk)[0]
        return 0.25j * frozen_bethe_state(x, kk) / (kk - 1 / kk)

    def lim_minus(h):
        kk = 1 + h
        x = x_frozen(kk)[1]
        return 0.25j * (kk - 1 / kk) * frozen_bethe_state(x, kk)

    Sm = ta.global_sl2(4)[1]
    want_p = -(_ket("dudu") - _ket("udud"))
    want_p2 = -0.125j * Sm @ magnon_state()
    want_m = 1j * (_ket("uudd") - _ket("uddu") - _ket("duud") + _ket("dduu"))
    lp, lm = _richardson(lim_plus), _richardson(lim_minus)
    out["limit_descendant_dev"] = float(max(np.max(np.abs(lp - want_p)), np.max(np.abs(want_p - want_p2))))
    out["limit_highest_dev"] = float(np.max(np.abs(lm - want_m)))
    S = ta.global_sl2(4)[0]
    out["limit_highest_is_hw"] = bool(np.linalg.norm(S @ want_m) < 1e-12)
    out["x_minus_periodic"] = complex(x_frozen(1 + 1e-8)[1])
    return out


def evaluation_ratio(lam: Sequence[int], beta, kappa: complex, x_roots) -> float:
    """|ev[B(x_1)...B(x_M)|0_lambda>]| relative to its norm before evaluation.

    The norm before evaluation is taken on the components w_mu of
    sum_mu E_mu (x) w_mu.  Bethe vectors that are quotiented out by freezing
    have a ratio that vanishes like 1/beta.
    """
    hw = sc.highest_weight_vector(lam, beta)
    g = sc.coupling_gamma(beta)
    st = sc.jack_spin_components(hw.vector, lam, g)
    for x in np.atleast_1d(x_roots):
        st = sc.cs_monodromy_entry(st, complex(x), "B", kappa)
    total = np.sqrt(sum(np.linalg.norm(w) ** 2 for w in st.comps.values()))
    return float(np.linalg.norm(evaluate(st).amplitudes) / total) if total else 0.0
