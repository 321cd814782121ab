"""
Fermionic spin-Calogero-Sutherland sectors and their Heisenberg-style charges.

A state is a map from spin basis codes (tensoralg conventions: site 1 is the
most significant bit, up = 0) to exact Laurent polynomials.  Fermionic
vectors satisfy P_ij s_ij v = -v.  The eigenspace F_lambda is built
concretely, so the correspondence with the effective spin chain can be
tested rather than assumed.

Charges come in two independent routes: through Dunkl operators, and through
the rewritten divided-difference forms where every rational term is grouped
per pair (i, j) and divided exactly by z_i - z_j.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
from typing import Callable, Sequence

import numpy as np

from . import dunkl_jack as dj
from . import tensoralg as ta
from .bethe_solver import BetheSolution, newton_solve
from .dunkl_jack import LaurentPoly, coupling_gamma, divide_by_difference
from .xxx_chain import ChainSpec, charge_coefficients, monodromy

# ---------------------------------------------------------------------------
# spin (x) polynomial vectors
# ---------------------------------------------------------------------------


def _bit(code: int, i: int, N: int) -> int:
    """Spin at 1-based site i: 0 = up, 1 = down."""
    return (code >> (N - i)) & 1


def _swap_bits(code: int, i: int, j: int, N: int) -> int:
    bi, bj = _bit(code, i, N), _bit(code, j, N)
    if bi == bj:
        return code
    return code ^ (1 << (N - i)) ^ (1 << (N - j))


class SpinPolyVector:
    """Finite sum of |code> (x) p_code(z) with exact Laurent coefficients."""

    __slots__ = ("N", "comps")

    def __init__(self, N: int, comps: dict[int, LaurentPoly] | None = None):
        self.N = N
        self.comps = {c: p for c, p in (comps or {}).items() if p}

    @classmethod
    def basis_state(cls, poly: LaurentPoly, code: int) -> "SpinPolyVector":
        return cls(poly.N, {code: poly})

    @classmethod
    def from_sites(cls, poly: LaurentPoly, down_sites: Sequence[int]) -> "SpinPolyVector":
        N = poly.N
        code = sum(1 << (N - s) for s in down_sites)
        return cls(N, {code: poly})

    def copy(self) -> "SpinPolyVector":
        return SpinPolyVector(self.N, dict(self.comps))

    def __bool__(self) -> bool:
        return bool(self.comps)

    def __eq__(self, other) -> bool:
        if isinstance(other, SpinPolyVector):
            return self.N == other.N and self.comps == other.comps
        if other == 0:
            return not self.comps
        return NotImplemented

    def __add__(self, other: "SpinPolyVector") -> "SpinPolyVector":
        out = dict(self.comps)
        for c, p in other.comps.items():
            q = out.get(c)
            s = p if q is None else q + p
            if s:
                out[c] = s
            else:
                out.pop(c, None)
        return SpinPolyVector(self.N, out)

    def __neg__(self) -> "SpinPolyVector":
        return SpinPolyVector(self.N, {c: -p for c, p in self.comps.items()})

    def __sub__(self, other: "SpinPolyVector") -> "SpinPolyVector":
        return self + (-other)

    def scale(self, s) -> "SpinPolyVector":
        s = dj.as_fraction(s)
        if not s:
            return SpinPolyVector(self.N)
        return SpinPolyVector(self.N, {c: p.scale(s) for c, p in self.comps.items()})

    def map_poly(self, fn: Callable[[LaurentPoly], LaurentPoly]) -> "SpinPolyVector":
        return SpinPolyVector(self.N, {c: fn(p) for c, p in self.comps.items()})

    def times(self, poly: LaurentPoly) -> "SpinPolyVector":
        return self.map_poly(lambda p: p * poly)

    # spin and coordinate actions (1-based sites)
    def spin_perm(self, i: int, j: int) -> "SpinPolyVector":
        """P_ij."""
        return SpinPolyVector(self.N, {_swap_bits(c, i, j, self.N): p for c, p in self.comps.items()})

    def coord_swap(self, i: int, j: int) -> "SpinPolyVector":
        """s_ij."""
        return self.map_poly(lambda p: p.swap(i - 1, j - 1))

    def transposition(self, i: int, j: int) -> "SpinPolyVector":
        """P_ij s_ij."""
        return SpinPolyVector(self.N, {_swap_bits(c, i, j, self.N): p.swap(i - 1, j - 1)
                                       for c, p in self.comps.items()})

    def sigma_z(self, i: int) -> "SpinPolyVector":
        return SpinPolyVector(self.N, {c: (p if _bit(c, i, self.N) == 0 else -p)
                                       for c, p in self.comps.items()})

    def spin_weight(self, i: int, up, down) -> "SpinPolyVector":
        """Diagonal spin operator at site i with entries (up, down)."""
        return SpinPolyVector(self.N, {c: p.scale(up if _bit(c, i, self.N) == 0 else down)
                                       for c, p in self.comps.items()})

    def euler(self, i: int) -> "SpinPolyVector":
        """z_i d/dz_i on every component."""
        return self.map_poly(lambda p: p.euler(i - 1))

    def dunkl(self, i: int, gamma: Fraction) -> "SpinPolyVector":
        return self.map_poly(lambda p: dj.dunkl_apply(i, p, gamma=gamma))

    def divide(self, i: int, j: int) -> "SpinPolyVector":
        """Exact division of every component by z_i - z_j."""
        return self.map_poly(lambda p: divide_by_difference(p, i - 1, j - 1))

    def lower_spin(self) -> "SpinPolyVector":
        """S^- = sum_i sigma^-_i."""
        out = SpinPolyVector(self.N)
        for i in range(1, self.N + 1):
            out = out + SpinPolyVector(self.N, {c | (1 << (self.N - i)): p for c, p in self.comps.items()
                                                if _bit(c, i, self.N) == 0})
        return out

    def raise_spin(self) -> "SpinPolyVector":
        """S^+ = sum_i sigma^+_i."""
        out = SpinPolyVector(self.N)
        for i in range(1, self.N + 1):
            out = out + SpinPolyVector(self.N, {c & ~(1 << (self.N - i)): p for c, p in self.comps.items()
                                                if _bit(c, i, self.N) == 1})
        return out

    # predicates and conversions
    def is_fermionic(self) -> bool:
        return all((self.transposition(i, i + 1) + self) == 0 for i in range(1, self.N))

    def magnons(self) -> set[int]:
        return {bin(c).count("1") for c in self.comps}

    def flat(self) -> dict[tuple, Fraction]:
        return {(c, a): v for c, p in self.comps.items() for a, v in p.terms.items()}

    def evaluate(self, point: Sequence[complex]) -> np.ndarray:
        out = np.zeros(2**self.N, dtype=complex)
        for c, p in self.comps.items():
            out[c] = p.evaluate(point)
        return out

    def to_dict(self) -> dict:
        return {str(c): p.to_dict() for c, p in sorted(self.comps.items())}

    def __repr__(self) -> str:
        return " + ".join(f"|{c:0{self.N}b}>*[{p}]" for c, p in sorted(self.comps.items())) or "0"


def total_antisymmetrize(v: SpinPolyVector) -> SpinPolyVector:
    """(1/N!) sum_w sgn(w) P_w s_w v via A_N = (1/N)(1 - sum_{k<N} T_kN) A_{N-1}."""
    out = v
    for n in range(2, v.N + 1):
        acc = out
        for k in range(1, n):
            acc = acc - out.transposition(k, n)
        out = acc.scale(Fraction(1, n))
    return out


# ---------------------------------------------------------------------------
# partitions, motifs, sectors
# ---------------------------------------------------------------------------

def is_allowed(lam: Sequence[int]) -> bool:
    """Weakly decreasing with multiplicities at most two."""
    lam = tuple(lam)
    dec = all(lam[i] >= lam[i + 1] for i in range(len(lam) - 1))
    return dec and all(lam[i] > lam[i + 2] for i in range(len(lam) - 2))


def motif_sets(lam: Sequence[int]) -> tuple[list[int], list[int]]:
    """(I_lambda, J_lambda), 1-based."""
    lam = tuple(lam)
    N = len(lam)
    ext = (float("inf"),) + lam + (float("-inf"),)
    I = [i for i in range(1, N + 1) if ext[i - 1] > ext[i] > ext[i + 1]]
    J = [j for j in range(1, N) if lam[j - 1] == lam[j]]
    return I, J


def _check_allowed(lam) -> None:
    if not is_allowed(lam):
        raise ValueError(f"{tuple(lam)} is not a partition with multiplicities <= 2")


@dataclass
class EffectiveChain:
    lam: tuple[int, ...]
    I: list[int]
    J: list[int]
    delta: list[Fraction]
    gamma: Fraction
    kappa: complex

    @property
    def N(self) -> int:
        return len(self.lam)

    @property
    def L(self) -> int:
        return len(self.I)

    @property
    def M_lambda(self) -> int:
        return len(self.J)

    @property
    def delta_I(self) -> list[Fraction]:
        return [self.delta[i - 1] for i in self.I]

    @property
    def delta_J(self) -> list[Fraction]:
        return [self.delta[j - 1] for j in self.J]

    def spec(self) -> ChainSpec:
        """XXX chain with theta_i = -i delta_i(lambda), i in I."""
        return ChainSpec(self.L, [-1j * float(d) for d in self.delta_I], self.kappa)

    def ambient_spec(self) -> ChainSpec:
        return ChainSpec(self.N, [-1j * float(d) for d in self.delta], self.kappa)

    def prefactor(self, x: complex) -> complex:
        out = complex(1)
        for d in self.delta_J:
            out *= (x + float(d) + 0.5) / (x + float(d) - 0.5)
        return out

    def to_dict(self) -> dict:
        return {"lambda": list(self.lam), "I": self.I, "J": self.J, "L_eff": self.L,
                "delta": [f"{d.numerator}/{d.denominator}" for d in self.delta]}


def effective_chain(lam: Sequence[int], beta=None, kappa: complex = 1.0, gamma=None) -> EffectiveChain:
    lam = tuple(int(x) for x in lam)
    _check_allowed(lam)
    g = coupling_gamma(beta, gamma)
    I, J = motif_sets(lam)
    N = len(lam)
    delta = [g * lam[i] + Fraction(N + 1 - 2 * (i + 1), 2) for i in range(N)]
    return EffectiveChain(lam, I, J, delta, g, complex(kappa))


class _ExactSpan:
    """Exact coordinates with respect to a list of linearly independent vectors."""

    def __init__(self, vectors: list[SpinPolyVector]):
        from sympy import QQ
        from sympy.polys.matrices import DomainMatrix

        self.vectors = vectors
        flats = [v.flat() for v in vectors]
        keys = sorted({k for f in flats for k in f})
        self.keys = keys
        n = len(vectors)
        rows = [[_qq(f.get(k, Fraction(0))) for f in flats] for k in keys]
        M = DomainMatrix(rows, (len(keys), n), QQ) if keys else None
        if n == 0:
            self.pivot_keys, self.inv = [], None
            return
        _, piv = M.transpose().rref()
        if len(piv) != n:
            raise ArithmeticError("sector vectors are linearly dependent")
        self.pivot_keys = [keys[p] for p in piv]
        sub = DomainMatrix([[_qq(f.get(k, Fraction(0))) for f in flats] for k in self.pivot_keys], (n, n), QQ)
        self.inv = sub.inv()

    def coordinates(self, v: SpinPolyVector) -> list[Fraction]:
        from sympy import QQ
        from sympy.polys.matrices import DomainMatrix

        n = len(self.vectors)
        if n == 0:
            if v:
                raise ArithmeticError("vector outside the (empty) span")
            return []
        f = v.flat()
        rhs = DomainMatrix([[_qq(f.get(k, Fraction(0)))] for k in self.pivot_keys], (n, 1), QQ)
        sol = self.inv * rhs
        coords = [Fraction(int(c.numerator), int(c.denominator)) for c in sol.to_Matrix()]
        recon = SpinPolyVector(v.N)
        for c, b in zip(coords, self.vectors):
            if c:
                recon = recon + b.scale(c)
        if recon != v:
            raise ArithmeticError("vector is not in the span of the sector basis")
        return coords


def _qq(x: Fraction):
    from sympy import QQ
    return QQ(x.numerator, x.denominator)


@dataclass
class FermionicSector:
    lam: tuple[int, ...]
    gamma: Fraction
    basis: list[SpinPolyVector]
    _span: _ExactSpan | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def N(self) -> int:
        return len(self.lam)

    def span(self) -> _ExactSpan:
        if self._span is None:
            self._span = _ExactSpan(self.basis)
        return self._span

    def coordinates(self, v: SpinPolyVector) -> list[Fraction]:
        return self.span().coordinates(v)

    def matrix(self, op: Callable[[SpinPolyVector], SpinPolyVector]) -> list[list[Fraction]]:
        """Exact matrix of an operator preserving the sector (columns = images)."""
        cols = [self.coordinates(op(b)) for b in self.basis]
        return [[cols[c][r] for c in range(self.dim)] for r in range(self.dim)]

    def to_dict(self) -> dict:
        I, J = motif_sets(self.lam)
        g = self.gamma
        N = self.N
        delta = [g * self.lam[i] + Fraction(N + 1 - 2 * (i + 1), 2) for i in range(N)]
        return {"lambda": list(self.lam), "I": I, "J": J, "L_eff": len(I),
                "delta": [f"{d.numerator}/{d.denominator}" for d in delta], "dim": self.dim}


def orbit(lam: Sequence[int]) -> list[tuple[int, ...]]:
    return sorted(set(permutations(tuple(lam))))


def sector_basis(lam: Sequence[int], beta=None, gamma=None) -> FermionicSector:
    """Independent vectors spanning F_lambda, by exact elimination."""
    from sympy import QQ
    from sympy.polys.matrices import DomainMatrix

    lam = tuple(int(x) for x in lam)
    _check_allowed(lam)
    g = coupling_gamma(beta, gamma)
    N = len(lam)
    I, J = motif_sets(lam)
    cands = []
    for mu in orbit(lam):
        E = dj.nonsym_jack(mu, gamma=g)
        for code in range(2**N):
            v = total_antisymmetrize(SpinPolyVector.basis_state(E, code))
            if v:
                cands.append(v)
    flats = [v.flat() for v in cands]
    keys = sorted({k for f in flats for k in f})
    M = DomainMatrix([[_qq(f.get(k, Fraction(0))) for k in keys] for f in flats], (len(flats), len(keys)), QQ)
    _, piv = M.transpose().rref()
    basis = [cands[p] for p in piv]
    expected = 2 ** (N - 2 * len(J))
    if len(basis) != expected:
        raise ArithmeticError(f"dim F_lambda = {len(basis)}, expected {expected}")
    return FermionicSector(lam, g, basis)


# ---------------------------------------------------------------------------
# highest-weight vector
# ---------------------------------------------------------------------------

@dataclass
class HighestWeight:
    vector: SpinPolyVector
    f: LaurentPoly
    lam_bar: tuple[int, ...]
    scalar: Fraction


def highest_weight_vector(lam: Sequence[int], beta=None, gamma=None) -> HighestWeight:
    """|0_lambda> from the partially antisymmetrised E_{lambda-bar}.

    lambda-bar lists the repeated values first, then the remaining parts,
    increasing within each block.  f is normalised so that its coefficient
    of z^(first block decreasing, second block decreasing) is 1; `scalar`
    records the factor relating it to the raw partial antisymmetrisation.
    """
    lam = tuple(int(x) for x in lam)
    _check_allowed(lam)
    g = coupling_gamma(beta, gamma)
    N = len(lam)
    I, J = motif_sets(lam)
    M = len(J)
    first = sorted(lam[j - 1] for j in J)
    rest = list(lam)
    for v in first:
        rest.remove(v)
    rest = sorted(rest)
    lam_bar = tuple(first + rest)
    E = dj.nonsym_jack(lam_bar, gamma=g)
    raw = LaurentPoly(N)
    for p1 in permutations(range(M)):
        for p2 in permutations(range(M, N)):
            perm = list(p1) + list(p2)
            term = E.permute(perm)
            raw = raw + (term if dj.perm_sign(perm) > 0 else -term)
    lead = tuple(sorted(first, reverse=True) + sorted(rest, reverse=True))
    c = raw.coeff(lead)
    if c == 0:
        raise ArithmeticError("partial antisymmetrisation vanished")
    f = raw.scale(1 / c)
    vec = SpinPolyVector(N)
    for js in combinations(range(1, N + 1), M):
        others = [k for k in range(1, N + 1) if k not in js]
        # variable slot k of f receives z_{order[k]}
        order = list(js) + others
        perm = [0] * N
        for slot, site in enumerate(order):
            perm[slot] = site - 1
        sign = (-1) ** sum(j - m for m, j in enumerate(js, start=1))
        comp = f.permute(perm)
        vec = vec + SpinPolyVector.from_sites(comp if sign > 0 else -comp, js)
    return HighestWeight(vec, f, lam_bar, c)


# ---------------------------------------------------------------------------
# momentum, Hamiltonian and Heisenberg-style charges
# ---------------------------------------------------------------------------

def apply_momentum(v: SpinPolyVector) -> SpinPolyVector:
    """P' = sum_i z_i d/dz_i."""
    out = SpinPolyVector(v.N)
    for i in range(1, v.N + 1):
        out = out + v.euler(i)
    return out


def _beta_of(gamma: Fraction) -> Fraction:
    if gamma == 0:
        raise ValueError("the Hamiltonian needs finite beta")
    return 1 / gamma


def apply_hamiltonian(v: SpinPolyVector, beta=None, gamma=None) -> SpinPolyVector:
    """Gauge-transformed fermionic Hamiltonian with exact pairwise division."""
    g = coupling_gamma(beta, gamma)
    b = _beta_of(g)
    N = v.N
    D = [None] + [v.euler(i) for i in range(1, N + 1)]
    out = SpinPolyVector(N)
    for i in range(1, N + 1):
        out = out + D[i].euler(i).scale(Fraction(1, 2))
    for i, j in combinations(range(1, N + 1), 2):
        zi, zj = LaurentPoly.variable(N, i - 1), LaurentPoly.variable(N, j - 1)
        num = (D[i] - D[j]).times((zi + zj) * (zi - zj)).scale(b / 2)
        num = num - (v + v.spin_perm(i, j)).times(zi * zj).scale(b)
        out = out + num.divide(i, j).divide(i, j)
    return out


def hamiltonian_dunkl(v: SpinPolyVector, beta=None, gamma=None) -> SpinPolyVector:
    """beta^2/2 (sum_i d_i^2 - E0), the Dunkl route to the same operator."""
    g = coupling_gamma(beta, gamma)
    b = _beta_of(g)
    N = v.N
    acc = SpinPolyVector(N)
    for i in range(1, N + 1):
        acc = acc + v.dunkl(i, g).dunkl(i, g)
    return (acc - v.scale(e0(N))).scale(b * b / 2)


def e0(N: int) -> Fraction:
    return Fraction(N * (N * N - 1), 12)


def momentum_eigenvalue(lam: Sequence[int]) -> int:
    return sum(lam)


def energy_eigenvalue(lam: Sequence[int], beta) -> Fraction:
    b = dj.as_fraction(beta)
    N = len(lam)
    return Fraction(sum(x * x for x in lam), 2) + b / 2 * sum((N - 2 * i + 1) * lam[i - 1] for i in range(1, N + 1))


def t2_parts(v: SpinPolyVector, beta=None, gamma=None) -> tuple[SpinPolyVector, SpinPolyVector]:
    """(X, Y) with t2(kappa) = (kappa + 1/kappa)/2 X + (kappa - 1/kappa)/2 Y.

    Rewritten form: X = sum P_ij - P'/beta and
    Y = -1/beta sum sigma^z_i z_i d_i
        + sum_{i<j} [(z_i sigma^z_j - z_j sigma^z_i) P_ij + (z_i + z_j)(sigma^z_j - sigma^z_i)/2] / (z_i - z_j).
    """
    g = coupling_gamma(beta, gamma)
    N = v.N
    X = SpinPolyVector(N)
    Y = SpinPolyVector(N)
    for i, j in combinations(range(1, N + 1), 2):
        X = X + v.spin_perm(i, j)
    X = X - apply_momentum(v).scale(g)
    for i in range(1, N + 1):
        Y = Y - v.euler(i).sigma_z(i).scale(g)
    for i, j in combinations(range(1, N + 1), 2):
        zi, zj = LaurentPoly.variable(N, i - 1), LaurentPoly.variable(N, j - 1)
        Pv = v.spin_perm(i, j)
        num = Pv.sigma_z(j).times(zi) - Pv.sigma_z(i).times(zj)
        num = num + (v.sigma_z(j) - v.sigma_z(i)).times(zi + zj).scale(Fraction(1, 2))
        Y = Y + num.divide(i, j)
    return X, Y


def t2_parts_dunkl(v: SpinPolyVector, beta=None, gamma=None) -> tuple[SpinPolyVector, SpinPolyVector]:
    """Dunkl route: X = sum P_ij - sum d_i, Y = sum_{i<j} sigma^z_j P_ij - sum sigma^z_i d_i."""
    g = coupling_gamma(beta, gamma)
    N = v.N
    X = SpinPolyVector(N)
    Y = SpinPolyVector(N)
    for i, j in combinations(range(1, N + 1), 2):
        Pv = v.spin_perm(i, j)
        X = X + Pv
        Y = Y + Pv.sigma_z(j)
    for i in range(1, N + 1):
        dv = v.dunkl(i, g)
        X = X - dv
        Y = Y - dv.sigma_z(i)
    return X, Y


def apply_t2(v: SpinPolyVector, kappa, beta=None, gamma=None, route: str = "rewritten") -> SpinPolyVector:
    """t2(kappa) v for exact rational kappa."""
    k = dj.as_fraction(kappa)
    if k == 0:
        raise ValueError("kappa must be nonzero")
    X, Y = (t2_parts if route == "rewritten" else t2_parts_dunkl)(v, beta, gamma)
    return X.scale((k + 1 / k) / 2) + Y.scale((k - 1 / k) / 2)


def apply_t3(v: SpinPolyVector, beta=None, gamma=None) -> SpinPolyVector:
    """Untwisted t3 in the primed-sum form, grouped per pair for exact division.

    t3 = -1/beta sum' P_ij z_i d_i - 1/2 sum' (z_i + z_k)/(z_i - z_k) P_ij
         + 1/2 sum' [1/3 - (z_i + z_j)/(z_i - z_j)] P_ij P_jk
    """
    g = coupling_gamma(beta, gamma)
    N = v.N
    out = SpinPolyVector(N)
    nums: dict[tuple[int, int], SpinPolyVector] = {}

    def add_frac(a: int, b: int, coef: Fraction, w: SpinPolyVector) -> None:
        # coef * (z_a + z_b)/(z_a - z_b) * w
        za, zb = LaurentPoly.variable(N, a - 1), LaurentPoly.variable(N, b - 1)
        key, sgn = ((a, b), 1) if a < b else ((b, a), -1)
        term = w.times(za + zb).scale(coef * sgn)
        nums[key] = nums.get(key, SpinPolyVector(N)) + term

    rng = range(1, N + 1)
    for i in rng:
        Di = v.euler(i)
        for j in rng:
            if j != i:
                out = out - Di.spin_perm(i, j).scale(g)
    for i in rng:
        for j in rng:
            for k in rng:
                if len({i, j, k}) < 3:
                    continue
                Pij = v.spin_perm(i, j)
                add_frac(i, k, Fraction(-1, 2), Pij)
                PP = v.spin_perm(j, k).spin_perm(i, j)
                out = out + PP.scale(Fraction(1, 6))
                add_frac(i, j, Fraction(-1, 2), PP)
    for (a, b), num in nums.items():
        out = out + num.divide(a, b)
    return out


def apply_t3_dunkl(v: SpinPolyVector, beta=None, gamma=None) -> SpinPolyVector:
    """Dunkl route: sum_{i<j<k} P_jk P_ij - sum_{i<j} (d_i + d_j) P_ij."""
    g = coupling_gamma(beta, gamma)
    N = v.N
    out = SpinPolyVector(N)
    for i, j, k in combinations(range(1, N + 1), 3):
        out = out + v.spin_perm(i, j).spin_perm(j, k)
    for i, j in combinations(range(1, N + 1), 2):
        Pv = v.spin_perm(i, j)
        out = out - Pv.dunkl(i, g) - Pv.dunkl(j, g)
    return out


# ---------------------------------------------------------------------------
# spectra on a sector
# ---------------------------------------------------------------------------

def _to_numpy(M: list[list[Fraction]]) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in M], dtype=complex) if M else np.zeros((0, 0), complex)


def t2_sector_matrices(sector: FermionicSector) -> tuple[np.ndarray, np.ndarray]:
    """Numeric matrices of X and Y (see t2_parts) in the sector basis."""
    g = sector.gamma
    imgs = [t2_parts(b, gamma=g) for b in sector.basis]
    sp = sector.span()
    X = np.array([[float(c) for c in sp.coordinates(im[0])] for im in imgs], dtype=complex).T
    Y = np.array([[float(c) for c in sp.coordinates(im[1])] for im in imgs], dtype=complex).T
    return X, Y


def t2_spectrum(sector: FermionicSector, kappa: complex) -> np.ndarray:
    X, Y = t2_sector_matrices(sector)
    k = complex(kappa)
    return np.sort_complex(np.linalg.eigvals((k + 1 / k) / 2 * X + (k - 1 / k) / 2 * Y))


def effective_t2_spectrum(chain: EffectiveChain) -> np.ndarray:
    """x^-2 coefficient of t_lambda(x + 1/2; kappa), prefactor included.

    The ambient series t(x + 1/2)/... has coefficients equal to the XXX
    charges with theta = -i delta; the prefactor of fused pairs contributes
    prod_j (x + delta_j + 1)/(x + delta_j).
    """
    spec = chain.spec()
    k = spec.kappa
    D = 2**spec.L
    c0 = (k + 1 / k) * np.eye(D)
    c1 = charge_coefficients(spec, 1) if spec.L else np.zeros((1, 1))
    c2 = charge_coefficients(spec, 2) if spec.L else np.zeros((1, 1))
    p = _ratio_series([-float(d) - 1 for d in chain.delta_J], [-float(d) for d in chain.delta_J], 3)
    T2 = p[0] * c2 + p[1] * c1 + p[2] * c0
    return np.sort_complex(np.linalg.eigvals(T2))


def _ratio_series(num_roots, den_roots, n: int) -> np.ndarray:
    """First n coefficients (w^0..w^{n-1}, w = 1/x) of prod (x - a)/prod (x - b)."""
    num = np.array([1.0 + 0j])
    for a in num_roots:
        num = np.convolve(num, [1.0, -a])
    den = np.array([1.0 + 0j])
    for b in den_roots:
        den = np.convolve(den, [1.0, -b])
    num = np.concatenate([num, np.zeros(n)])[:n]
    den = np.concatenate([den, np.zeros(n)])[:n]
    out = np.zeros(n, dtype=complex)
    for k in range(n):
        out[k] = (num[k] - np.dot(out[:k], den[1:k + 1][::-1])) / den[0]
    return out


# ---------------------------------------------------------------------------
# Bethe ansatz on the effective chain
# ---------------------------------------------------------------------------

@dataclass
class CSSolution:
    M: int
    x_roots: np.ndarray
    infinite: int
    residual: float
    raw: BetheSolution

    def to_dict(self) -> dict:
        return {"M": self.M, "roots": [[z.real, z.imag] for z in self.x_roots],
                "infinite": self.infinite, "residual": self.residual}


def cs_bethe_solutions(lam: Sequence[int], beta=None, kappa: complex = 1.5, M: int = 1,
                       gamma=None, check_real: bool = True) -> list[CSSolution]:
    """Bethe roots x_m of the effective chain (u = i x)."""
    chain = effective_chain(lam, beta, kappa, gamma)
    spec = chain.spec()
    if M > chain.L:
        raise ValueError(f"M = {M} exceeds the effective length {chain.L}")
    out = []
    for s in newton_solve(spec, M):
        if not s.residual < 1e-9:
            continue
        x = np.sort_complex(-1j * np.asarray(s.roots))
        if check_real and abs(complex(kappa).imag) < 1e-14 and chain.gamma >= 0 and len(x):
            q = np.poly(x)
            if np.max(np.abs(q.imag)) > 1e-7 * max(1.0, np.max(np.abs(q))):
                raise ArithmeticError(f"Q(x) is not real for real beta, kappa: {q}")
        out.append(CSSolution(s.M, x, s.infinite, s.residual, s))
    return out


def cs_tau(chain: EffectiveChain, x_roots, x: complex) -> complex:
    """Transfer eigenvalue on a Bethe vector of F_lambda."""
    xr = np.asarray(x_roots, dtype=complex)
    k = chain.kappa
    Q = lambda y: complex(np.prod(y - xr)) if len(xr) else 1.0
    a = complex(1)
    for d in chain.delta_I:
        a *= (x + float(d) + 0.5) / (x + float(d) - 0.5)
    return chain.prefactor(x) * (k * Q(x - 1) / Q(x) * a + Q(x + 1) / Q(x) / k)


def cs_tau_series(chain: EffectiveChain, x_roots, nterms: int = 4, shift: float = 0.5) -> np.ndarray:
    """Coefficients of x^0..x^{-(nterms-1)} of tau(x + shift)."""
    xr = np.asarray(x_roots, dtype=complex)
    k = chain.kappa
    dI = [float(d) for d in chain.delta_I]
    dJ = [float(d) for d in chain.delta_J]
    s = shift
    pref = _ratio_series([-d - 0.5 - s for d in dJ], [-d + 0.5 - s for d in dJ], nterms)
    aI = _ratio_series([-d - 0.5 - s for d in dI], [-d + 0.5 - s for d in dI], nterms)
    qm = _ratio_series(xr + 1 - s, xr - s, nterms)
    qp = _ratio_series(xr - 1 - s, xr - s, nterms)
    inner = k * np.convolve(qm, aI)[:nterms] + qp / k
    return np.convolve(pref, inner)[:nterms]


def tau_series_formula(chain: EffectiveChain, x_roots) -> tuple[complex, complex, complex]:
    """Closed-form x^0, x^-1, x^-2 coefficients of the twisted eigenvalue."""
    k = chain.kappa
    N, L = chain.N, chain.L
    M = len(x_roots)
    kp, km = k + 1 / k, k - 1 / k
    tau2 = (L / 2 - M) * (L / 2 - M + 1) + N * (N - 4) / 4
    sd = float(sum(chain.delta))
    sdI = float(sum(chain.delta_I))
    sx = complex(np.sum(x_roots))
    c1 = kp / 2 * N + km * (L / 2 - M)
    c2 = kp / 2 * (tau2 - sd) + km / 2 * ((N - 1) * (L / 2 - M) - 2 * sx - sdI)
    return kp, c1, c2


def tau3_formula(chain: EffectiveChain, x_roots) -> complex:
    """Untwisted t3 eigenvalue from the Bethe roots."""
    N, L = chain.N, chain.L
    M = len(x_roots)
    tau2 = (L / 2 - M) * (L / 2 - M + 1) + N * (N - 4) / 4
    sd = float(sum(chain.delta))
    sdI = float(sum(chain.delta_I))
    sx = complex(np.sum(x_roots))
    return -(L / 2 - M + 1) * (2 * sx + sdI) + (2 - N / 2) * sd + (N - 2) / 2 * (tau2 - N * (N - 1) / 6)


def qdet_series(lam: Sequence[int], beta=None, nterms: int = 4, gamma=None) -> list[Fraction]:
    """Exact coefficients of prod_i (x + delta_i + 1/2)/(x + delta_i - 1/2) in 1/x."""
    lam = tuple(lam)
    g = coupling_gamma(beta, gamma)
    N = len(lam)
    delta = [g * lam[i] + Fraction(N + 1 - 2 * (i + 1), 2) for i in range(N)]
    out = [Fraction(1)] + [Fraction(0)] * (nterms - 1)
    for d in delta:
        b = d - Fraction(1, 2)
        # 1 + 1/(x + b) = 1 + sum_{n>=1} (-b)^{n-1} x^{-n}
        fac = [Fraction(1)] + [(-b) ** (n - 1) for n in range(1, nterms)]
        out = [sum(out[i] * fac[n - i] for i in range(n + 1)) for n in range(nterms)]
    return out


def qdet_series_formula(lam: Sequence[int], beta) -> list[Fraction]:
    """1, N, N^2/2 - P'/beta, N^3/4 - N P'/beta + 2 E'/beta^2."""
    b = dj.as_fraction(beta)
    N = len(lam)
    P = momentum_eigenvalue(lam)
    E = energy_eigenvalue(lam, b)
    return [Fraction(1), Fraction(N), Fraction(N * N, 2) - P / b,
            Fraction(N**3, 4) - N * P / b + 2 * E / (b * b)]


# ---------------------------------------------------------------------------
# monodromy of the CS model acting on F_lambda
# ---------------------------------------------------------------------------

def jack_decompose(p: LaurentPoly, mus: Sequence[Sequence[int]], gamma: Fraction) -> dict[tuple, Fraction]:
    """Coefficients of p in the basis {E_mu}; exact triangular elimination."""
    allowed = {tuple(m) for m in mus}
    rest = p.copy()
    out: dict[tuple, Fraction] = {}
    while rest:
        lead = max(rest.terms, key=dj.composition_key)
        if lead not in allowed:
            raise ArithmeticError(f"monomial {lead} is not a leading term of any E_mu")
        c = rest.terms[lead]
        out[lead] = out.get(lead, 0) + c
        rest = rest - dj.nonsym_jack(lead, gamma=gamma).scale(c)
    return out


@dataclass
class JackSpinState:
    """sum_mu E_mu (x) w_mu with complex spin vectors w_mu."""
    N: int
    gamma: Fraction
    comps: dict[tuple, np.ndarray]

    def evaluate(self, point: Sequence[complex]) -> np.ndarray:
        out = np.zeros(2**self.N, dtype=complex)
        for mu, w in self.comps.items():
            out += dj.nonsym_jack(mu, gamma=self.gamma).evaluate(point) * w
        return out


def jack_spin_components(v: SpinPolyVector, lam: Sequence[int], gamma: Fraction) -> JackSpinState:
    mus = orbit(lam)
    comps: dict[tuple, np.ndarray] = {}
    for code, p in v.comps.items():
        for mu, c in jack_decompose(p, mus, gamma).items():
            comps.setdefault(mu, np.zeros(2**v.N, dtype=complex))[code] += float(c)
    return JackSpinState(v.N, gamma, comps)


@lru_cache(maxsize=256)
def _ambient_monodromy(delta: tuple, kappa: complex):
    N = len(delta)
    return monodromy(ChainSpec(N, [-1j * float(d) for d in delta], kappa))


def cs_monodromy_entry(state: JackSpinState, x: complex, entry: str = "B",
                       kappa: complex = 1.0) -> JackSpinState:
    """Apply A, B, C or D of T_0(x) = prod_k (1 + P_0k/(x + d_k - 1/2)).

    On E_mu (x) w the Dunkl operators act by delta(mu), so the entry acts as
    the ambient chain operator with theta = -i delta(mu), normalised by
    prod_k i (x + delta_k - 1/2).
    """
    out: dict[tuple, np.ndarray] = {}
    for mu, w in state.comps.items():
        delta = tuple(dj.delta_eigenvalue(mu, gamma=state.gamma))
        mono = _ambient_monodromy(delta, complex(kappa))
        norm = np.prod([1j * (x + float(d) - 0.5) for d in delta])
        out[mu] = getattr(mono, entry)(1j * x) @ w / norm
    return JackSpinState(state.N, state.gamma, out)


# ---------------------------------------------------------------------------
# free-fermion limit
# ---------------------------------------------------------------------------

@dataclass
class FreeFermionReport:
    roots_series: np.ndarray
    roots_solver: np.ndarray
    root_deviation: float
    tau_deviation: float


def b0_roots(lam: Sequence[int], I: Sequence[int], beta: float, kappa: complex) -> np.ndarray:
    """beta x_m through second order in beta (x_m returned, not beta x_m)."""
    lam = tuple(lam)
    N = len(lam)
    Il, _ = motif_sets(lam)
    k = complex(kappa)
    r = (k + 1 / k) / (k - 1 / k)
    out = []
    for im in I:
        s = 0j
        for j in Il:
            if j not in I:
                s += 1 / (lam[j - 1] - lam[im - 1])
        for j in I:
            if j != im:
                s -= 1 / (lam[j - 1] - lam[im - 1])
        bx = -lam[im - 1] - beta / 2 * (N + 1 - 2 * im + r) + beta**2 / (k - 1 / k) ** 2 * s
        out.append(bx / beta)
    return np.array(out)


def alpha_function(chain: EffectiveChain, I: Sequence[int], x: complex) -> complex:
    """A-operator eigenvalue: product over (I_lambda minus I) union J_lambda."""
    out = complex(1)
    for i in [i for i in chain.I if i not in I] + list(chain.J):
        d = float(chain.delta[i - 1])
        out *= (x + d + 0.5) / (x + d - 0.5)
    return out


def free_fermion_report(lam: Sequence[int], I: Sequence[int], kappa: complex, beta) -> FreeFermionReport:
    lam = tuple(lam)
    Il, _ = motif_sets(lam)
    vals = [lam[i - 1] for i in Il]
    if len(set(vals)) != len(vals):
        raise ValueError("free-fermion series needs distinct lambda_i on I_lambda")
    if not set(I) <= set(Il):
        raise ValueError("I must be a subset of I_lambda")
    b = float(dj.as_fraction(beta))
    chain = effective_chain(lam, beta, kappa)
    series = b0_roots(lam, I, b, kappa)
    sols = cs_bethe_solutions(lam, beta, kappa, len(I))
    best, dev = None, np.inf
    for s in sols:
        if s.infinite or len(s.x_roots) != len(I):
            continue
        a = np.sort_complex(b * s.x_roots)
        d = float(np.max(np.abs(a - np.sort_complex(b * series)))) if len(I) else 0.0
        if d < dev:
            best, dev = s, d
    if best is None:
        raise ArithmeticError("no solver root set matched the series")
    Ibar = [i for i in chain.I if i not in I]
    xs = [0.7 / b, 1.9 / b]
    tdev = max(abs(cs_tau(chain, best.x_roots, x)
                   - (chain.kappa * alpha_function(chain, I, x)
                      + alpha_function(chain, Ibar, x) / chain.kappa)) for x in xs)
    return FreeFermionReport(series, best.x_roots, dev, tdev)


def sector_report(lam: Sequence[int], beta) -> str:
    sec = sector_basis(lam, beta)
    return json.dumps(sec.to_dict(), sort_keys=True)
