"""
Exact Laurent polynomials, Dunkl operators and nonsymmetric Jack polynomials.

All arithmetic is over the rationals.  The coupling enters only through
gamma = 1/beta, so beta = infinity (gamma = 0) is handled exactly as well;
pass `beta=INF` or `gamma=0`.

Dunkl operators (1-based index i):

    d_i = gamma z_i d/dz_i - sum_{j<i} z_i/(z_j - z_i) (1 - s_ij)
          + sum_{j>i} z_j/(z_i - z_j) (1 - s_ij) + (N + 1 - 2i)/2
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product
from typing import Iterable, Mapping, Sequence

Exponent = tuple[int, ...]
INF = float("inf")


class DivisibilityError(ArithmeticError):
    """A divided difference left a nonzero remainder."""


class DegenerateParameterError(ZeroDivisionError):
    """An intertwiner denominator vanished for the chosen coupling."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    return Fraction(x)


def coupling_gamma(beta=None, gamma=None) -> Fraction:
    """gamma = 1/beta as an exact rational; beta = INF gives 0."""
    if gamma is not None:
        return as_fraction(gamma)
    if beta is None:
        raise ValueError("give beta or gamma")
    if isinstance(beta, float) and beta == INF:
        return Fraction(0)
    if isinstance(beta, str) and beta.strip().lower() in ("inf", "infinity"):
        return Fraction(0)
    b = as_fraction(beta)
    if b == 0:
        raise ValueError("beta must be nonzero")
    return 1 / b


# ---------------------------------------------------------------------------
# Laurent polynomials
# ---------------------------------------------------------------------------

class LaurentPoly:
    """Finite sum of c_a z^a with exact rational c_a, a in Z^N.

    Variable positions are 0-based in the methods of this class.
    """

    __slots__ = ("N", "terms")

    def __init__(self, N: int, terms: Mapping[Exponent, object] | None = None):
        self.N = N
        self.terms: dict[Exponent, Fraction] = {}
        if terms:
            for a, c in terms.items():
                c = as_fraction(c)
                if c:
                    a = tuple(int(x) for x in a)
                    if len(a) != N:
                        raise ValueError("exponent length must equal N")
                    self.terms[a] = self.terms.get(a, Fraction(0)) + c
            self.terms = {a: c for a, c in self.terms.items() if c}

    # constructors
    @classmethod
    def constant(cls, N: int, c=1) -> "LaurentPoly":
        return cls(N, {(0,) * N: c})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "LaurentPoly":
        return cls(len(exps), {tuple(exps): c})

    @classmethod
    def variable(cls, N: int, i: int) -> "LaurentPoly":
        a = [0] * N
        a[i] = 1
        return cls(N, {tuple(a): 1})

    @classmethod
    def _raw(cls, N: int, terms: dict) -> "LaurentPoly":
        p = cls.__new__(cls)
        p.N = N
        p.terms = terms
        return p

    # ring structure
    def copy(self) -> "LaurentPoly":
        return LaurentPoly._raw(self.N, dict(self.terms))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self.N == other.N and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.N, frozenset(self.terms.items())))

    def _check(self, other: "LaurentPoly") -> None:
        if other.N != self.N:
            raise ValueError("variable counts differ")

    def __add__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(self.N, other)
        self._check(other)
        t = dict(self.terms)
        for a, c in other.terms.items():
            v = t.get(a, 0) + c
            if v:
                t[a] = v
            else:
                t.pop(a, None)
        return LaurentPoly._raw(self.N, t)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly._raw(self.N, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(self.N, other)
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        return (-self) + other

    def scale(self, c) -> "LaurentPoly":
        c = as_fraction(c)
        if not c:
            return LaurentPoly(self.N)
        return LaurentPoly._raw(self.N, {a: v * c for a, v in self.terms.items()})

    def __mul__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return self.scale(other)
        self._check(other)
        t: dict[Exponent, Fraction] = {}
        for a, c in self.terms.items():
            for b, d in other.terms.items():
                e = tuple(x + y for x, y in zip(a, b))
                t[e] = t.get(e, 0) + c * d
        return LaurentPoly._raw(self.N, {a: c for a, c in t.items() if c})

    __rmul__ = __mul__

    def shift(self, exps: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial z^exps."""
        return LaurentPoly._raw(self.N, {tuple(x + y for x, y in zip(a, exps)): c
                                         for a, c in self.terms.items()})

    # symmetric group action on coordinates
    def swap(self, i: int, j: int) -> "LaurentPoly":
        """s_ij: exchange z_i and z_j (0-based)."""
        t = {}
        for a, c in self.terms.items():
            b = list(a)
            b[i], b[j] = b[j], b[i]
            t[tuple(b)] = c
        return LaurentPoly._raw(self.N, t)

    def permute(self, perm: Sequence[int]) -> "LaurentPoly":
        """f(z) -> f(z_{perm[0]}, ..., z_{perm[N-1]})."""
        t = {}
        for a, c in self.terms.items():
            b = [0] * self.N
            for k in range(self.N):
                b[perm[k]] += a[k]
            t[tuple(b)] = c
        return LaurentPoly._raw(self.N, t)

    # calculus
    def euler(self, i: int) -> "LaurentPoly":
        """z_i d/dz_i."""
        return LaurentPoly._raw(self.N, {a: c * a[i] for a, c in self.terms.items() if a[i]})

    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def leading(self) -> Exponent | None:
        return max(self.terms, key=composition_key) if self.terms else None

    def coeff(self, exps: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    def evaluate(self, point: Sequence[complex]) -> complex:
        s = 0j
        for a, c in self.terms.items():
            m = complex(1)
            for z, e in zip(point, a):
                m *= z**e
            s += float(c) * m
        return s

    def to_dict(self) -> list[dict]:
        return [{"exponents": list(a), "coeff": _frac_str(c)} for a, c in sorted(self.terms.items())]

    @classmethod
    def from_dict(cls, N: int, items: Iterable[Mapping]) -> "LaurentPoly":
        return cls(N, {tuple(d["exponents"]): Fraction(d["coeff"]) for d in items})

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for a, c in sorted(self.terms.items(), key=lambda t: composition_key(t[0]), reverse=True):
            mono = "*".join(f"z{k+1}" + (f"^{e}" if e != 1 else "") for k, e in enumerate(a) if e)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def _frac_str(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def divide_by_difference(g: LaurentPoly, i: int, j: int) -> LaurentPoly:
    """Exact quotient g / (z_i - z_j), 0-based; raises DivisibilityError.

    Terms are grouped into binary forms in (z_i, z_j) with fixed remaining
    exponents and fixed a_i + a_j; each is a Laurent polynomial in
    t = z_i/z_j divided by (t - 1) by synthetic division.
    """
    groups: dict[tuple, dict[int, Fraction]] = {}
    for a, c in g.terms.items():
        b = list(a)
        b[i] = b[j] = 0
        groups.setdefault((tuple(b), a[i] + a[j]), {})[a[i]] = c
    out: dict[Exponent, Fraction] = {}
    for (rest, d), coeffs in groups.items():
        lo, hi = min(coeffs), max(coeffs)
        acc = Fraction(0)
        # quotient coefficient of t^k (k = hi-1 .. lo) is sum_{m>k} p_m
        for k in range(hi - 1, lo - 1, -1):
            acc += coeffs.get(k + 1, 0)
            if acc:
                e = list(rest)
                e[i] = k
                e[j] = d - k - 1
                out[tuple(e)] = out.get(tuple(e), 0) + acc
        acc += coeffs.get(lo, 0)
        if acc:
            raise DivisibilityError(f"remainder {acc} dividing by z{i+1} - z{j+1}")
    return LaurentPoly._raw(g.N, {a: c for a, c in out.items() if c})


def divided_difference(f: LaurentPoly, i: int, j: int) -> LaurentPoly:
    """(1 - s_ij) f / (z_i - z_j), 0-based."""
    return divide_by_difference(f - f.swap(i, j), i, j)


def vandermonde(N: int) -> LaurentPoly:
    v = LaurentPoly.constant(N)
    for i in range(N):
        for j in range(i + 1, N):
            v = v * (LaurentPoly.variable(N, i) - LaurentPoly.variable(N, j))
    return v


def elementary_product(N: int, k: int = 1) -> Exponent:
    return (k,) * N


def perm_sign(perm: Sequence[int]) -> int:
    s, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if not seen[i]:
            j, n = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                n += 1
            if n % 2 == 0:
                s = -s
    return s


def symmetrize(f: LaurentPoly, sign: int = 1) -> LaurentPoly:
    """(1/N!) sum_w sign^{l(w)} w f."""
    out = LaurentPoly(f.N)
    count = 0
    for p in permutations(range(f.N)):
        term = f.permute(p)
        out = out + (term if sign > 0 or perm_sign(p) > 0 else -term)
        count += 1
    return out.scale(Fraction(1, count))


# ---------------------------------------------------------------------------
# compositions and dominance
# ---------------------------------------------------------------------------

def partial_sums(a: Sequence[int]) -> list[int]:
    out, s = [], 0
    for x in a:
        s += x
        out.append(s)
    return out


def dominates(a: Sequence[int], b: Sequence[int]) -> bool:
    """a >= b in dominance: equal totals and partial sums of a at least those of b."""
    if sum(a) != sum(b):
        return False
    return all(x >= y for x, y in zip(partial_sums(a), partial_sums(b)))


def composition_lower(mu: Sequence[int], nu: Sequence[int]) -> bool:
    """mu strictly below nu: sorted(mu) < sorted(nu) in dominance, or same
    orbit and mu < nu in dominance of the unsorted compositions."""
    mu, nu = tuple(mu), tuple(nu)
    if mu == nu:
        return False
    ms, ns = sorted(mu, reverse=True), sorted(nu, reverse=True)
    if ms != ns:
        return dominates(ns, ms)
    return dominates(nu, mu)


def composition_key(a: Sequence[int]) -> tuple:
    """Total order refining `composition_lower` (used only for display)."""
    return (sum(a), tuple(partial_sums(sorted(a, reverse=True))), tuple(partial_sums(a)))


class Composition(tuple):
    """Integer exponent tuple with the derived data used by the Dunkl spectrum."""

    def __new__(cls, parts):
        return super().__new__(cls, (int(x) for x in parts))

    @property
    def N(self) -> int:
        return len(self)

    @property
    def partition(self) -> tuple[int, ...]:
        return tuple(sorted(self, reverse=True))

    def sigma(self, i: int) -> int:
        """sigma^mu(i), 1-based."""
        mi = self[i - 1]
        return sum(1 for x in self if x > mi) + sum(1 for x in self[:i] if x == mi)

    def lower_than(self, other: Sequence[int]) -> bool:
        return composition_lower(self, other)


def delta_eigenvalue(mu: Sequence[int], beta=None, gamma=None) -> list[Fraction]:
    """delta_i(mu) = gamma mu_i + (N + 1 - 2 sigma^mu(i))/2, i = 1..N."""
    g = coupling_gamma(beta, gamma)
    c = Composition(mu)
    N = c.N
    return [g * c[i - 1] + Fraction(N + 1 - 2 * c.sigma(i), 2) for i in range(1, N + 1)]


# ---------------------------------------------------------------------------
# Dunkl operators
# ---------------------------------------------------------------------------

def dunkl_apply(i: int, f: LaurentPoly, beta=None, gamma=None) -> LaurentPoly:
    """d_i f for 1-based i."""
    g = coupling_gamma(beta, gamma)
    N = f.N
    if not 1 <= i <= N:
        raise ValueError(f"Dunkl index {i} out of range for N={N}")
    k = i - 1
    out = f.euler(k).scale(g) + f.scale(Fraction(N + 1 - 2 * i, 2))
    zk = (0,) * k + (1,) + (0,) * (N - k - 1)
    for j in range(N):
        if j == k:
            continue
        diff = f - f.swap(k, j)
        if not diff:
            continue
        if j < k:
            # - z_i/(z_j - z_i) (1 - s_ij) f
            out = out - divide_by_difference(diff, j, k).shift(zk)
        else:
            # + z_j/(z_i - z_j) (1 - s_ij) f
            zj = (0,) * j + (1,) + (0,) * (N - j - 1)
            out = out + divide_by_difference(diff, k, j).shift(zj)
    return out


def daha_check(N: int, d: int, beta=None, gamma=None,
               monomials: Iterable[Sequence[int]] | None = None,
               simple_only: bool = True) -> list[str]:
    """Verify the degenerate affine Hecke relations on monomials; returns violations.

    The locality relation d_i s_jk = s_jk d_i is checked for simple
    reflections s_{j,j+1} (i not in {j, j+1}); with `simple_only=False`
    every transposition is tried, which fails already at N = 3 since
    s_13 = s_12 s_23 s_12 does not commute with d_2.
    """
    g = coupling_gamma(beta, gamma)
    mons = list(monomials) if monomials is not None else list(product(range(-d, d + 1), repeat=N))
    bad = []
    for a in mons:
        f = LaurentPoly.monomial(a)
        D = [dunkl_apply(i, f, gamma=g) for i in range(1, N + 1)]
        for i in range(1, N + 1):
            for j in range(i + 1, N + 1):
                if dunkl_apply(i, D[j - 1], gamma=g) != dunkl_apply(j, D[i - 1], gamma=g):
                    bad.append(f"[d{i},d{j}] on {a}")
        for i in range(1, N):
            # d_i s_{i,i+1} f = s_{i,i+1} d_{i+1} f + f
            lhs = dunkl_apply(i, f.swap(i - 1, i), gamma=g)
            rhs = D[i].swap(i - 1, i) + f
            if lhs != rhs:
                bad.append(f"d{i} s{i}{i+1} on {a}")
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                for k in range(j + 1, N + 1):
                    if i in (j, k) or (simple_only and k != j + 1):
                        continue
                    lhs = dunkl_apply(i, f.swap(j - 1, k - 1), gamma=g)
                    rhs = D[i - 1].swap(j - 1, k - 1)
                    if lhs != rhs:
                        bad.append(f"d{i} s{j}{k} on {a}")
    return bad


# ---------------------------------------------------------------------------
# nonsymmetric Jack polynomials
# ---------------------------------------------------------------------------

def nonsym_jack(mu: Sequence[int], beta=None, gamma=None) -> LaurentPoly:
    """E_mu: monic joint Dunkl eigenfunction, built by the intertwiner recursion."""
    return _jack(tuple(int(x) for x in mu), coupling_gamma(beta, gamma)).copy()


@lru_cache(maxsize=4096)
def _jack(mu: Exponent, g: Fraction) -> LaurentPoly:
    N = len(mu)
    m = min(mu)
    if m != 0:
        # global shift by (z_1 ... z_N)^m
        base = _jack(tuple(x - m for x in mu), g)
        return base.shift((m,) * N)
    if not any(mu):
        return LaurentPoly.constant(N)
    for i in range(N - 1):
        if mu[i] > mu[i + 1]:
            nu = list(mu)
            nu[i], nu[i + 1] = nu[i + 1], nu[i]
            nu = tuple(nu)
            E = _jack(nu, g)
            dl = delta_eigenvalue(nu, gamma=g)
            den = dl[i + 1] - dl[i]
            if den == 0:
                raise DegenerateParameterError(
                    f"intertwiner s_{i+1} from {nu} to {mu}: delta_{i+2} = delta_{i+1}")
            return E.swap(i, i + 1) + E.scale(1 / den)
    # weakly increasing with mu_N >= 1: raise cyclically from
    # nu = (mu_N - 1, mu_1, ..., mu_{N-1})
    nu = (mu[-1] - 1,) + mu[:-1]
    E = _jack(nu, g)
    # f(z) -> z_N f(z_N, z_1, ..., z_{N-1})
    perm = [N - 1] + list(range(N - 1))
    return E.permute(perm).shift((0,) * (N - 1) + (1,))


def jack_eigen_residual(mu: Sequence[int], E: LaurentPoly, beta=None, gamma=None) -> list[LaurentPoly]:
    """d_i E - delta_i(mu) E for each i (all zero for a correct E_mu)."""
    g = coupling_gamma(beta, gamma)
    dl = delta_eigenvalue(mu, gamma=g)
    return [dunkl_apply(i, E, gamma=g) - E.scale(dl[i - 1]) for i in range(1, len(mu) + 1)]


def lower_span(mu: Sequence[int]) -> list[Exponent]:
    """All compositions nu with nu = mu or nu strictly below mu."""
    mu = tuple(mu)
    lo, hi = min(mu), max(mu)
    tot = sum(mu)
    out = []
    for nu in product(range(lo, hi + 1), repeat=len(mu)):
        if sum(nu) == tot and (nu == mu or composition_lower(nu, mu)):
            out.append(nu)
    return out


def nonsym_jack_bruteforce(mu: Sequence[int], beta=None, gamma=None) -> LaurentPoly:
    """Oracle: solve (d_k - delta_k(mu)) E = 0 for all k in the span below mu.

    The N systems are stacked, so the solve is regular whenever the joint
    spectrum is simple; it is exact over the rationals (sympy DomainMatrix).
    """
    from sympy import QQ
    from sympy.polys.matrices import DomainMatrix

    g = coupling_gamma(beta, gamma)
    mu = tuple(mu)
    N = len(mu)
    span = lower_span(mu)
    index = {nu: k for k, nu in enumerate(span)}
    deltas = delta_eigenvalue(mu, gamma=g)
    cols = []
    for nu in span:
        f = LaurentPoly.monomial(nu)
        col = [Fraction(0)] * (N * len(span))
        for k in range(N):
            Df = dunkl_apply(k + 1, f, gamma=g) - f.scale(deltas[k])
            for a, c in Df.terms.items():
                if a not in index:
                    raise ArithmeticError(f"Dunkl image leaves the lower span: {a}")
                col[k * len(span) + index[a]] = c
        cols.append(col)
    n = len(span)
    rows = N * n
    unknown = [k for k in range(n) if span[k] != mu]
    lead = index[mu]

    def q(x: Fraction):
        return QQ(x.numerator, x.denominator)

    A = DomainMatrix([[q(cols[c][r]) for c in unknown] for r in range(rows)], (rows, len(unknown)), QQ)
    b = DomainMatrix([[q(-cols[lead][r])] for r in range(rows)], (rows, 1), QQ)
    # least-squares-free exact solve through the normal equations of a consistent system
    At = A.transpose()
    sol = (At * A).lu_solve(At * b)
    coeffs = {mu: Fraction(1)}
    for k, c in zip(unknown, sol.to_Matrix()):
        fr = Fraction(int(c.p), int(c.q))
        if fr:
            coeffs[span[k]] = fr
    E = LaurentPoly(N, coeffs)
    if any(r for r in jack_eigen_residual(mu, E, gamma=g)):
        raise ArithmeticError("brute-force Jack solve is inconsistent")
    return E


def antisym_reduce(lam: Sequence[int], beta=None, gamma=None) -> tuple[Fraction, LaurentPoly, LaurentPoly]:
    """Antisymmetrise E_lambda and split off the Vandermonde factor.

    Returns (scalar, P, A) with A = antisymmetrisation of E_lambda and
    A = scalar * Vand * P, P monic in z^nu, nu = lambda - staircase.
    Non-strict lambda gives (0, 0, 0).
    """
    lam = tuple(lam)
    N = len(lam)
    if any(lam[i] < lam[i + 1] for i in range(N - 1)):
        raise ValueError("lambda must be weakly decreasing")
    E = nonsym_jack(lam, beta, gamma)
    A = symmetrize(E, sign=-1)
    zero = LaurentPoly(N)
    if any(lam[i] == lam[i + 1] for i in range(N - 1)):
        if A:
            raise ArithmeticError("antisymmetrisation of a repeated-part Jack is nonzero")
        return Fraction(0), zero, zero
    P = A
    for i in range(N):
        for j in range(i + 1, N):
            P = divide_by_difference(P, i, j)
    nu = tuple(lam[k] - (N - 1 - k) for k in range(N))
    c = P.coeff(nu)
    return c, P.scale(1 / c), A


def symmetric_jack(nu: Sequence[int], beta=None, gamma=None) -> LaurentPoly:
    """Monic symmetric Jack P_nu as the symmetrisation of E_nu."""
    S = symmetrize(nonsym_jack(nu, beta, gamma), sign=1)
    return S.scale(1 / S.coeff(tuple(nu)))
