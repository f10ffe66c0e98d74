"""Degree-two K3 surfaces w^2 = f(x, y, z) with f = -det(x M1 + y M2 + z M3).

The surface lives in the weighted projective space P(1,1,1,3).  Every point of
P^2(F_q) has 1 + chi(f(P)) points above it, so

    #S(F_q) = sum over P in P^2(F_q) of (1 + chi(f(P))).

From N_n = #S(F_{p^n}) the traces of Frobenius on H^2 are t_n = N_n - 1 - p^(2n),
and Newton's identities plus the functional equation recover the degree-22
characteristic polynomial.  Counting its roots that are roots of unity (after
dividing the roots by p) bounds the geometric Picard number from above.

The counting hot loop is a numba kernel working entirely in the discrete-log
domain of the Zech tables built by ``finite_field``.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import lcm
from typing import Dict, List, Optional, Sequence, Tuple

import numba
import numpy as np
from numba import njit, prange

# The default TBB layer is often unavailable; OpenMP ships with numba's wheels.
if "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER = "omp"

from .arith import cyclotomic_polynomial, euler_phi, poly_divmod, poly_gcd, poly_derivative, poly_trim
from .clifford import TriPoly, determinant, pencil_matrix
from .config import budget_points
from .errors import (AmbiguousReconstruction, BudgetExceeded, DegeneratePencil, Inconsistent,
                     InsufficientData, PreconditionError)
from .finite_field import FqContext, make_context

DEFAULT_POINT_BUDGET = 4_000_000_000
NAIVE_LIMIT = 729
WEIGHTED_LIMIT = 9
WEIL_TOL = 1e-6


# ---------------------------------------------------------------------------
# Pencils and the branch sextic
# ---------------------------------------------------------------------------

def _validate_matrix(name, M):
    if not isinstance(M, (list, tuple)) or len(M) != 6 or any(
            not isinstance(r, (list, tuple)) or len(r) != 6 for r in M):
        raise PreconditionError(f"{name}: expected a 6x6 array")
    for i in range(6):
        for j in range(6):
            if not isinstance(M[i][j], int) or isinstance(M[i][j], bool):
                raise PreconditionError(f"{name}[{i}][{j}]: expected an integer")
    for i in range(6):
        for j in range(i):
            if M[i][j] != M[j][i]:
                raise PreconditionError(f"{name}[{i}][{j}] != {name}[{j}][{i}]: matrix not symmetric")
    return tuple(tuple(r) for r in M)


@dataclass(frozen=True)
class K3Pencil:
    M1: Tuple[Tuple[int, ...], ...]
    M2: Tuple[Tuple[int, ...], ...]
    M3: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        for name in ("M1", "M2", "M3"):
            object.__setattr__(self, name, _validate_matrix(name, getattr(self, name)))

    @classmethod
    def from_dict(cls, d) -> "K3Pencil":
        missing = [k for k in ("M1", "M2", "M3") if k not in d]
        if missing:
            raise PreconditionError(f"pencil is missing {', '.join(missing)}")
        return cls(d["M1"], d["M2"], d["M3"])

    @classmethod
    def from_json(cls, path) -> "K3Pencil":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        return {k: [list(r) for r in getattr(self, k)] for k in ("M1", "M2", "M3")}

    def checksum(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def matrix(self):
        """x M1 + y M2 + z M3 as a matrix of linear TriPolys."""
        return pencil_matrix(self.M1, self.M2, self.M3)

    def at(self, point) -> List[List[Fraction]]:
        x, y, z = (Fraction(v) for v in point)
        return [[x * self.M1[i][j] + y * self.M2[i][j] + z * self.M3[i][j] for j in range(6)]
                for i in range(6)]

    @property
    def sextic(self) -> TriPoly:
        return _sextic_cached(self)


@lru_cache(maxsize=32)
def _sextic_cached(pencil: K3Pencil) -> TriPoly:
    return sextic_from_pencil(pencil)


def paper_pencil_path() -> str:
    return str(resources.files("k3kit").joinpath("data/paper_pencil.json"))


def paper_pencil() -> K3Pencil:
    return K3Pencil.from_json(paper_pencil_path())


def sextic_from_pencil(pencil: K3Pencil) -> TriPoly:
    """f = -det(x M1 + y M2 + z M3), exact."""
    f = -determinant(pencil.matrix())
    if f.is_zero():
        raise DegeneratePencil("det(x M1 + y M2 + z M3) vanishes identically")
    return f


def _as_sextic(obj) -> TriPoly:
    if isinstance(obj, K3Pencil):
        return obj.sextic
    if isinstance(obj, TriPoly):
        if not obj.is_homogeneous(6) or obj.is_zero():
            raise PreconditionError("branch polynomial must be a nonzero sextic form")
        return obj
    raise PreconditionError("expected a K3Pencil or a TriPoly sextic")


def sextic_coefficients_mod_p(f: TriPoly, p: int) -> np.ndarray:
    """C[i, j] = coefficient of x^i y^j z^(6-i-j), reduced mod p."""
    C = np.zeros((7, 7), dtype=np.int64)
    for (i, j, k), c in f.mod_p(p).items():
        C[i, j] = c
    return C


# ---------------------------------------------------------------------------
# Point counting: numba kernel in the log domain
# ---------------------------------------------------------------------------

@njit(cache=True, inline="always")
def _lmul(a, b, qm1):
    if a < 0 or b < 0:
        return -1
    s = a + b
    if s >= qm1:
        s -= qm1
    return s


@njit(cache=True, inline="always")
def _ladd(a, b, zech, qm1):
    if a < 0:
        return b
    if b < 0:
        return a
    d = b - a
    if d < 0:
        d += qm1
    z = zech[d]
    if z < 0:
        return -1
    s = a + z
    if s >= qm1:
        s -= qm1
    return s


@njit(cache=True)
def _row_chi_sum(A, zech, qm1):
    """sum over x in F_q of chi(A6 x^6 + ... + A0), coefficients given as logs."""
    s = 0
    for lx in range(-1, qm1):  # lx = -1 encodes x = 0
        v = A[6]
        for i in range(5, -1, -1):
            v = _ladd(_lmul(v, lx, qm1), A[i], zech, qm1)
        if v >= 0:
            s += 1 - 2 * (v & 1)
    return s


@njit(cache=True, parallel=True)
def _affine_chi_sum(C, ylogs, weights, zech, qm1):
    """sum over the chosen y (weighted) and all x of chi(f(x, y, 1))."""
    m = ylogs.shape[0]
    partial = np.zeros(m, dtype=np.int64)
    for t in prange(m):
        ly = ylogs[t]
        A = np.empty(7, dtype=np.int64)
        for i in range(7):
            v = -1
            for j in range(6 - i, -1, -1):
                v = _ladd(_lmul(v, ly, qm1), C[i, j], zech, qm1)
            A[i] = v
        partial[t] = weights[t] * _row_chi_sum(A, zech, qm1)
    return partial.sum()


@njit(cache=True)
def _frobenius_orbit_reps(qm1, p):
    """Representatives (as logs) of y -> y^p orbits on F_q^*, with orbit sizes."""
    seen = np.zeros(qm1, dtype=np.bool_)
    reps = np.empty(qm1, dtype=np.int64)
    sizes = np.empty(qm1, dtype=np.int64)
    k = 0
    for l in range(qm1):
        if seen[l]:
            continue
        size = 0
        cur = l
        while not seen[cur]:
            seen[cur] = True
            size += 1
            cur = (cur * p) % qm1
        reps[k] = l
        sizes[k] = size
        k += 1
    return reps[:k], sizes[:k]


def _set_threads(threads: Optional[int]):
    if threads:
        numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))


def count_points(pencil, p: int, n: int, *, threads: Optional[int] = None,
                 orbits: bool = False, budget: Optional[int] = None) -> int:
    """#S(F_{p^n}) for w^2 = f(x,y,z) in P(1,1,1,3).

    ``orbits=True`` enables the Galois-orbit fast path: the y-coordinate is
    only visited once per Frobenius orbit, which is valid because f has
    coefficients in F_p and chi(a^p) = chi(a).
    """
    f = _as_sextic(pencil)
    q = p ** n
    budget = budget_points(DEFAULT_POINT_BUDGET, budget)
    if q * q + q + 1 > budget:
        raise BudgetExceeded(f"{q * q + q + 1} points of P^2(F_{q}) exceed the budget {budget}")
    ctx = make_context(p, n, budget=max(budget, q))
    if not ctx.has_zech:
        raise BudgetExceeded(f"F_{q} is too large for the table-driven counter")
    _set_threads(threads)
    Cenc = sextic_coefficients_mod_p(f, p)
    C = ctx.log[Cenc]  # prime-field encodings coincide with residues
    qm1 = q - 1
    zech = ctx.zech
    if orbits:
        reps, sizes = _frobenius_orbit_reps(qm1, p)
        ylogs = np.concatenate(([-1], reps)).astype(np.int64)
        weights = np.concatenate(([1], sizes)).astype(np.int64)
    else:
        ylogs = np.arange(-1, qm1, dtype=np.int64)
        weights = np.ones(q, dtype=np.int64)
    total = q * q + int(_affine_chi_sum(C, ylogs, weights, zech, qm1))
    # line z = 0: points [x : 1 : 0] and [1 : 0 : 0]
    A = np.array([C[i, 6 - i] for i in range(7)], dtype=np.int64)
    total += q + int(_row_chi_sum(A, zech, qm1))
    lead = int(C[6, 0])
    total += 1 + (0 if lead < 0 else 1 - 2 * (lead & 1))
    return total


def count_points_range(pencil, p: int, n_max: int, **kw) -> List[int]:
    return [count_points(pencil, p, n, **kw) for n in range(1, n_max + 1)]


# -- independent oracles ------------------------------------------------------

def _poly_basis_tables(ctx: FqContext):
    """Full multiplication/addition tables built from polynomial arithmetic."""
    q, p, n = ctx.q, ctx.p, ctx.n
    digits = np.array([ctx.digits(a) for a in range(q)], dtype=np.int64)  # (q, n)
    pows = np.array([p ** i for i in range(n)], dtype=np.int64)
    conv = np.zeros((q, q, 2 * n - 1), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            conv[:, :, i + j] += np.outer(digits[:, i], digits[:, j])
    mod = np.array(ctx.modulus, dtype=np.int64)
    for k in range(2 * n - 2, n - 1, -1):
        c = conv[:, :, k] % p
        for idx in range(n):
            conv[:, :, k - n + idx] -= c * mod[idx]
        conv[:, :, k] = 0
    conv = conv[:, :, :n] % p
    mul = conv @ pows
    add = ((digits[:, None, :] + digits[None, :, :]) % p) @ pows
    return mul, add


def count_points_naive(pencil, p: int, n: int) -> int:
    """Same count with table-free modular polynomial arithmetic (q <= 729).

    Squares are detected by a histogram of a*a, not by discrete logs.
    """
    f = _as_sextic(pencil)
    q = p ** n
    if q > budget_points(NAIVE_LIMIT):
        raise BudgetExceeded(f"naive oracle limited to q <= {NAIVE_LIMIT}")
    ctx = FqContext(p, n, zech=False)
    mul, add = _poly_basis_tables(ctx)
    everything = np.arange(q)
    chi = np.full(q, -1, dtype=np.int64)
    chi[mul[everything, everything]] = 1
    chi[0] = 0
    powers = [np.ones(q, dtype=np.int64)]
    for _ in range(6):
        powers.append(mul[powers[-1], everything])
    terms = f.mod_p(p)
    # affine chart z = 1, all (x, y)
    V = np.zeros((q, q), dtype=np.int64)
    for (i, j, k), c in terms.items():
        V = add[V, mul[c, mul[powers[i][:, None], powers[j][None, :]]]]
    total = q * q + int(chi[V].sum())
    # z = 0, y = 1
    W = np.zeros(q, dtype=np.int64)
    for (i, j, k), c in terms.items():
        if k == 0:
            W = add[W, mul[c, powers[i]]]
    total += q + int(chi[W].sum())
    total += 1 + int(chi[terms.get((6, 0, 0), 0)])
    return total


def count_points_weighted(pencil, p: int, n: int) -> int:
    """Directly enumerate P(1,1,1,3): affine solutions of w^2 = f, divided by q - 1.

    The scaling (x,y,z,w) -> (l x, l y, l z, l^3 w) acts freely away from 0, so
    every point has exactly q - 1 affine representatives.  Tiny fields only.
    """
    f = _as_sextic(pencil)
    q = p ** n
    if q > WEIGHTED_LIMIT:
        raise BudgetExceeded(f"weighted enumeration limited to q <= {WEIGHTED_LIMIT}")
    ctx = FqContext(p, n, zech=False)
    terms = f.mod_p(p)
    squares: Dict[int, int] = {}
    for w in range(q):
        s = ctx.mul_poly(w, w)
        squares[s] = squares.get(s, 0) + 1
    affine = 0
    for x in range(q):
        for y in range(q):
            for z in range(q):
                val = 0
                for (i, j, k), c in terms.items():
                    t = ctx.mul_poly(ctx.mul_poly(ctx.pow_poly(x, i), ctx.pow_poly(y, j)), ctx.pow_poly(z, k))
                    val = ctx.add_poly(val, ctx.mul_poly(c, t))
                affine += squares.get(val, 0)
    affine -= 1  # the origin (0,0,0,0)
    if affine % (q - 1):
        raise AssertionError("weighted orbit count is not divisible by q - 1")  # unreachable
    return affine // (q - 1)


# ---------------------------------------------------------------------------
# Traces and the characteristic polynomial of Frobenius
# ---------------------------------------------------------------------------

def traces_from_counts(counts: Sequence[int], p: int) -> List[int]:
    """t_n = N_n - 1 - p^(2n) (Lefschetz, H^1 = H^3 = 0)."""
    if not counts:
        raise InsufficientData("no point counts given")
    return [int(N) - 1 - p ** (2 * n) for n, N in enumerate(counts, start=1)]


def newton_elementary(power_sums: Sequence) -> List[Fraction]:
    """e_0..e_k from power sums s_1..s_k:  k e_k = sum_{i=1..k} (-1)^(i-1) e_{k-i} s_i."""
    e = [Fraction(1)]
    for k in range(1, len(power_sums) + 1):
        acc = sum((-1) ** (i - 1) * e[k - i] * power_sums[i - 1] for i in range(1, k + 1))
        e.append(Fraction(acc) / k)
    return e


def power_sums_from_coeffs(coeffs: Sequence[int], count: int) -> List[Fraction]:
    """Power sums of the roots of a monic polynomial (ascending coefficients)."""
    deg = len(coeffs) - 1
    e = [Fraction((-1) ** k * coeffs[deg - k]) for k in range(deg + 1)]
    s: List[Fraction] = []
    for k in range(1, count + 1):
        acc = (-1) ** (k - 1) * k * (e[k] if k <= deg else 0)
        for i in range(1, k):
            if k - i <= deg:
                acc += (-1) ** (k - i - 1) * e[k - i] * s[i - 1]
        s.append(acc)
    return s


def parse_known_factor(text: str, p: Optional[int] = None) -> Tuple[int, int]:
    """'(t-3)^2' -> (3, 2); 't-3' -> (3, 1); '(t+3)' -> (-3, 1)."""
    s = text.replace(" ", "").replace("\u2212", "-")
    m = re.fullmatch(r"\(t([+-]\d+)?\)\^(\d+)|\(t([+-]\d+)?\)|t([+-]\d+)?", s)
    if m is None:
        raise PreconditionError(f"cannot parse known factor {text!r}")
    shift = m.group(1) or m.group(3) or m.group(4) or "0"
    mult = int(m.group(2)) if m.group(2) else 1
    if mult < 1:
        raise PreconditionError("multiplicity must be positive")
    return -int(shift), mult


def _divide_linear_power(coeffs: List[Fraction], root, mult: int) -> Optional[List[Fraction]]:
    g = list(coeffs)
    for _ in range(mult):
        q, r = poly_divmod(g, [-root, 1])
        if any(c != 0 for c in r):
            return None
        g = q
    return [Fraction(c) for c in g]


def _normalized_float_roots(coeffs: Sequence, p: int) -> np.ndarray:
    deg = len(coeffs) - 1
    normalized = [Fraction(c) * Fraction(p) ** k / Fraction(p) ** deg for k, c in enumerate(coeffs)]
    sqf = normalized
    if deg > 1:
        g = poly_gcd(normalized, poly_derivative(normalized))
        if len(g) > 1:
            sqf, _ = poly_divmod(normalized, g)
    sqf = [Fraction(c) for c in poly_trim(list(sqf))]
    if len(sqf) <= 1:
        return np.array([])
    return np.roots([float(c) for c in reversed(sqf)])


def weil_bound_ok(coeffs: Sequence[int], p: int, known: Sequence[Tuple[int, int]] = (),
                  tol: float = WEIL_TOL) -> bool:
    """All complex roots have absolute value p (checked numerically on p^-deg f(pt))."""
    rest = [Fraction(c) for c in coeffs]
    for root, mult in known:
        if abs(root) != p:
            continue
        d = _divide_linear_power(rest, root, mult)
        if d is not None:
            rest = d
    roots = _normalized_float_roots(rest, p)
    return bool(np.all(np.abs(np.abs(roots) - 1.0) < tol))


def functional_equation_holds(coeffs: Sequence[int], p: int, sign: int) -> bool:
    deg = len(coeffs) - 1
    # descending c_k is ascending a_{deg-k}:  c_{deg-k} = sign p^{deg-2k} c_k  <=>  a_k = sign p^{deg-2k} a_{deg-k}
    return all(Fraction(coeffs[k]) == sign * Fraction(p) ** (deg - 2 * k) * coeffs[deg - k]
               for k in range(deg + 1))


@dataclass(frozen=True)
class WeilPolynomial:
    """Monic characteristic polynomial of Frobenius on H^2, ascending coefficients."""

    coeffs: Tuple[int, ...]
    p: int
    sign: int
    known_factors: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if self.coeffs[-1] != 1:
            raise PreconditionError("Weil polynomial must be monic")
        if not functional_equation_holds(self.coeffs, self.p, self.sign):
            raise Inconsistent("functional equation fails")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def normalized(self) -> List[Fraction]:
        return normalize_weil(self.coeffs, self.p)

    def predicted_count(self, n: int) -> int:
        """N_n = 1 + p^(2n) + sum alpha^n, exactly via Newton."""
        return 1 + self.p ** (2 * n) + int(power_sums_from_coeffs(self.coeffs, n)[-1])


def reconstruct_weil_poly(traces: Sequence[int], p: int,
                          known_factors: Optional[Sequence[Tuple[int, int]]] = None,
                          degree: int = 22) -> WeilPolynomial:
    """Recover the Frobenius characteristic polynomial from traces t_1..t_10.

    Coefficients c_1..c_10 come from Newton's identities; the rest from the
    functional equation with sign s = +1 (middle coefficient fixed by f(p) = 0)
    or s = -1 (middle coefficient 0).  Candidates are filtered by the known
    factors and then by the Weil bound; exactly one must survive.  Traces
    beyond the tenth are used as additional consistency checks.
    """
    half = degree // 2
    if len(traces) < half - 1:
        raise InsufficientData(f"need {half - 1} traces, got {len(traces)}")
    known = [(int(r), int(m)) for r, m in (known_factors if known_factors is not None else [(p, 1)])]
    if not any(r == p and m >= 1 for r, m in known):
        raise PreconditionError("known factors must include (t - p)")
    e = newton_elementary([Fraction(t) for t in traces[:half - 1]])
    if any(x.denominator != 1 for x in e):
        raise Inconsistent("traces do not give integral symmetric functions")
    top = [int((-1) ** k * e[k]) for k in range(half)]  # c_0..c_10 of t^(22-k)
    survivors = []
    for sign in (1, -1):
        c: List[Optional[int]] = [None] * (degree + 1)
        for k in range(half):
            c[k] = top[k]
            c[degree - k] = sign * p ** (degree - 2 * k) * top[k]
        if sign == -1:
            c[half] = 0
        else:
            rest = sum(c[k] * p ** (degree - k) for k in range(degree + 1) if k != half)
            if rest % p ** half:
                continue
            c[half] = -rest // p ** half
        coeffs = [c[degree - k] for k in range(degree + 1)]  # ascending
        if any(_divide_linear_power([Fraction(v) for v in coeffs], r, m) is None for r, m in known):
            continue
        if not weil_bound_ok(coeffs, p, known):
            continue
        if len(traces) > half - 1:
            sums = power_sums_from_coeffs(coeffs, len(traces))
            if any(sums[i] != traces[i] for i in range(len(traces))):
                continue
        survivors.append(WeilPolynomial(tuple(coeffs), p, sign, tuple(known)))
    if len(survivors) > 1:
        raise AmbiguousReconstruction("both signs of the functional equation survive")
    if not survivors:
        raise Inconsistent("no candidate satisfies the known factors and the Weil bound")
    return survivors[0]


def normalize_weil(coeffs: Sequence, p: int) -> List[Fraction]:
    """f_p(t) = p^-deg f(p t)."""
    deg = len(coeffs) - 1
    return [Fraction(c) * Fraction(p) ** (k - deg) for k, c in enumerate(coeffs)]


def denormalize_weil(coeffs: Sequence, p: int) -> List[Fraction]:
    deg = len(coeffs) - 1
    return [Fraction(c) * Fraction(p) ** (deg - k) for k, c in enumerate(coeffs)]


def _cyclotomic_bound(deg: int) -> int:
    m, best = 1, 1
    while m <= 2 * deg * deg + 6:  # phi(m) >= sqrt(m/2)
        if euler_phi(m) <= deg:
            best = m
        m += 1
    return best


def count_cyclotomic_roots(fp: Sequence) -> int:
    """Number of roots (with multiplicity) that are roots of unity."""
    f = poly_trim([Fraction(c) for c in fp])
    if not f or all(c == 0 for c in f):
        raise PreconditionError("zero polynomial")
    den = 1
    for c in f:
        den = lcm(den, Fraction(c).denominator)
    f = [Fraction(c) * den for c in f]
    deg = len(f) - 1
    total = 0
    for m in range(1, _cyclotomic_bound(deg) + 1):
        phi = cyclotomic_polynomial(m)
        if len(phi) - 1 > len(f) - 1:
            continue
        while len(f) - 1 >= len(phi) - 1:
            q, r = poly_divmod(f, phi)
            if any(c != 0 for c in r):
                break
            f = [Fraction(c) for c in q]
            total += euler_phi(m)
    return total


def rational_poly_json(coeffs: Sequence) -> dict:
    """Ascending coefficients as decimal strings over a common denominator."""
    fr = [Fraction(c) for c in coeffs]
    den = 1
    for c in fr:
        den = lcm(den, c.denominator)
    return {"coefficients": [str(int(c * den)) for c in fr], "denominator": str(den)}


def rational_poly_from_json(d: dict) -> List[Fraction]:
    den = int(d["denominator"])
    return [Fraction(int(c), den) for c in d["coefficients"]]


@dataclass
class ZetaReport:
    p: int
    counts: List[int]
    traces: List[int]
    weil: WeilPolynomial
    normalized: List[Fraction]
    cyclotomic_roots: int

    def to_json(self):
        return {
            "p": self.p,
            "counts": [str(c) for c in self.counts],
            "traces": [str(t) for t in self.traces],
            "sign": self.weil.sign,
            "known_factors": [f"(t-{r})^{m}" for r, m in self.weil.known_factors],
            "charpoly": rational_poly_json(self.weil.coeffs),
            "normalized": rational_poly_json(self.normalized),
            "picard_bound": self.cyclotomic_roots,
        }


def zeta_from_counts(counts: Sequence[int], p: int,
                     known_factors: Optional[Sequence[Tuple[int, int]]] = None) -> ZetaReport:
    traces = traces_from_counts(counts, p)
    weil = reconstruct_weil_poly(traces, p, known_factors)
    fp = weil.normalized()
    return ZetaReport(p, list(counts), traces, weil, fp, count_cyclotomic_roots(fp))


def zeta_report(pencil, p: int, n_max: int = 10,
                known_factors: Optional[Sequence[Tuple[int, int]]] = None, **count_kw) -> ZetaReport:
    counts = count_points_range(pencil, p, n_max, **count_kw)
    return zeta_from_counts(counts, p, known_factors)


def picard_bound(pencil, p: int, n_max: int = 10,
                 known_factors: Optional[Sequence[Tuple[int, int]]] = None, **count_kw) -> int:
    """Upper bound for the geometric Picard number of the reduction mod p."""
    return zeta_report(pencil, p, n_max, known_factors, **count_kw).cyclotomic_roots


# ---------------------------------------------------------------------------
# Polynomials over F_q (lists of encodings, lowest degree first)
# ---------------------------------------------------------------------------

def _fq_trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _fq_add(ctx, f, g):
    out = [0] * max(len(f), len(g))
    for i, a in enumerate(f):
        out[i] = a
    for i, b in enumerate(g):
        out[i] = ctx.add(out[i], b)
    return _fq_trim(out)


def _fq_mul(ctx, f, g):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                if b:
                    out[i + j] = ctx.add(out[i + j], ctx.mul(a, b))
    return _fq_trim(out)


def _fq_scale(ctx, f, c):
    return _fq_trim([ctx.mul(c, a) for a in f])


def _fq_divmod(ctx, f, g):
    f = list(f)
    inv = ctx.inv(g[-1])
    q = [0] * max(len(f) - len(g) + 1, 0)
    while len(f) >= len(g) and f:
        c = ctx.mul(f[-1], inv)
        shift = len(f) - len(g)
        q[shift] = c
        for i, b in enumerate(g):
            f[shift + i] = ctx.sub(f[shift + i], ctx.mul(c, b))
        _fq_trim(f)
    return _fq_trim(q), f


def _fq_gcd(ctx, f, g):
    f, g = _fq_trim(list(f)), _fq_trim(list(g))
    while g:
        f, g = g, _fq_divmod(ctx, f, g)[1]
    return f


def _fq_derivative(ctx, f):
    return _fq_trim([ctx.mul(ctx.from_int(k), a) for k, a in enumerate(f)][1:])


def _fq_sqrt_monic(ctx, H):
    """Monic G with G^2 = H (H monic of even degree), or None.  Needs odd p."""
    d = len(H) - 1
    if d % 2:
        return None
    m = d // 2
    G = [0] * (m + 1)
    G[m] = 1
    half = ctx.inv(ctx.from_int(2))
    for k in range(m - 1, -1, -1):
        # coefficient of s^(m+k) in G^2: 2 G_k + sum_{i+j=m+k, k<i,j<m} G_i G_j
        acc = H[m + k]
        for i in range(k + 1, m):
            j = m + k - i
            if k < j < m:
                acc = ctx.sub(acc, ctx.mul(G[i], G[j]))
        G[k] = ctx.mul(acc, half)
    return G if _fq_mul(ctx, G, G) == _fq_trim(list(H)) else None


def _line_points(a, b, c, ctx):
    """Two points spanning the line a x + b y + c z = 0 (first nonzero of (a,b,c) is 1)."""
    if a:
        return (ctx.neg(b), 1, 0), (ctx.neg(c), 0, 1)
    if b:
        return (1, 0, 0), (0, ctx.neg(c), 1)
    return (1, 0, 0), (0, 1, 0)


def _restrict(ctx, terms, u, v):
    """Binary sextic h(s, t) = f(s u + t v) as its dehomogenization h(s, 1)."""
    lin = [_fq_trim([v[i], u[i]]) for i in range(3)]  # v + s u
    pw = []
    for L in lin:
        row = [[1]]
        for _ in range(6):
            row.append(_fq_mul(ctx, row[-1], L))
        pw.append(row)
    H: List[int] = []
    for (i, j, k), coeff in terms.items():
        t = _fq_mul(ctx, _fq_mul(ctx, pw[0][i], pw[1][j]), pw[2][k])
        H = _fq_add(ctx, H, _fq_scale(ctx, t, coeff))
    return H


def projective_lines(ctx):
    q = ctx.q
    for b in range(q):
        for c in range(q):
            yield (1, b, c)
    for c in range(q):
        yield (0, 1, c)
    yield (0, 0, 1)


@dataclass
class TritangentLine:
    line: Tuple[int, int, int]
    constant: int
    cubic: List[int]  # homogeneous cubic g(s, t) = sum g_i s^i t^(3-i)
    ctx: FqContext = field(repr=False, compare=False, default=None)

    def to_json(self):
        enc = (lambda e: e) if self.ctx.n == 1 else self.ctx.digits
        return {"line": [enc(a) for a in self.line], "constant": enc(self.constant),
                "cubic": [enc(g) for g in self.cubic]}


@dataclass
class TritangentReport:
    p: int
    k: int
    lines: List[TritangentLine]
    contained: List[Tuple[int, int, int]]  # lines inside the branch curve

    def line_set(self):
        return {t.line for t in self.lines}

    def to_json(self):
        return {"field": [self.p, self.k], "lines": [t.to_json() for t in self.lines],
                "contained_lines": [list(l) for l in self.contained]}


def _homogeneous_from(ctx, H):
    """Length-7 coefficient list of h(s,t) = t^6 H(s/t)."""
    return [H[i] if i < len(H) else 0 for i in range(7)]


def _verify_tritangent(ctx, H, c, g) -> bool:
    g2 = [0] * 7
    for i in range(4):
        for j in range(4):
            g2[i + j] = ctx.add(g2[i + j], ctx.mul(g[i], g[j]))
    return [ctx.mul(c, a) for a in g2] == _homogeneous_from(ctx, H)


def tritangent_search(pencil, p: int, k: int = 1, budget: Optional[int] = None) -> TritangentReport:
    """All lines of P^2(F_{p^k}) on which f restricts to c * g^2 with g a binary cubic."""
    if p == 2:
        raise PreconditionError("square test requires odd characteristic")
    f = _as_sextic(pencil)
    ctx = make_context(p, k)
    q = ctx.q
    nlines = q * q + q + 1
    budget = budget_points(10 ** 6, budget)
    if nlines > budget:
        raise BudgetExceeded(f"{nlines} lines exceed the budget {budget}")
    terms = f.mod_p(p)
    found, contained = [], []
    for line in projective_lines(ctx):
        u, v = _line_points(*line, ctx)
        H = _restrict(ctx, terms, u, v)
        if not H:
            contained.append(line)
            continue
        d = len(H) - 1
        if (6 - d) % 2:
            continue
        lead = H[-1]
        G = _fq_sqrt_monic(ctx, _fq_scale(ctx, H, ctx.inv(lead)))
        if G is None:
            continue
        # h(s,t) = t^(6-d) H(s/t), so g(s,t) = t^(3-d/2) G-hom(s,t) = sum G_i s^i t^(3-i)
        g = [G[i] if i < len(G) else 0 for i in range(4)]
        entry = TritangentLine(line, lead, g, ctx)
        if not _verify_tritangent(ctx, H, lead, g):
            raise AssertionError("tritangent verification failed")  # unreachable
        found.append(entry)
    return TritangentReport(p, k, found, contained)


def line_equation_str(line, p: int) -> str:
    names = ("x", "y", "z")
    parts = []
    for c, v in zip(line, names):
        if c == 0:
            continue
        parts.append(v if c == 1 else f"{c}{v}")
    return " + ".join(parts) + " = 0"


def sextic_squarefree_certificate(pencil, p: int, max_k: int = 2):
    """A line over F_{p^k} on which f restricts to a squarefree binary sextic.

    Its existence proves that f mod p is squarefree (a repeated factor of f
    would restrict to a repeated factor on every line).  Returns (k, line) or
    None when no such line exists over the fields tried.
    """
    f = _as_sextic(pencil)
    terms = f.mod_p(p)
    if not terms:
        return None
    for k in range(1, max_k + 1):
        ctx = make_context(p, k)
        for line in projective_lines(ctx):
            u, v = _line_points(*line, ctx)
            H = _restrict(ctx, terms, u, v)
            if len(H) - 1 < 5:  # at most a simple root at infinity
                continue
            if len(_fq_gcd(ctx, H, _fq_derivative(ctx, H))) == 1:
                return k, line
    return None


def is_squarefree_mod_p(pencil, p: int, max_k: int = 2) -> bool:
    return sextic_squarefree_certificate(pencil, p, max_k) is not None
