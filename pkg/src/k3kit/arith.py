"""Exact integer / rational arithmetic used throughout k3kit.

Integers are Python ints and rationals are ``fractions.Fraction`` (always in
lowest terms with positive denominator).  Univariate polynomials are plain
lists of coefficients, lowest degree first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import List, Optional, Sequence

from sympy import factorint, isprime
from sympy.ntheory import sqrt_mod

from .errors import NotCoprime, ZeroInput, PreconditionError

Matrix = List[List[int]]


# ---------------------------------------------------------------------------
# Q/2Z and Q/Z values
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QmodTwoZ:
    """A rational number modulo 2, stored as its representative in [0, 2)."""

    value: Fraction

    def __init__(self, value):
        object.__setattr__(self, "value", Fraction(value) % 2)

    def __add__(self, other):
        return QmodTwoZ(self.value + QmodTwoZ(_raw(other)).value)

    def __neg__(self):
        return QmodTwoZ(-self.value)

    def __sub__(self, other):
        return self + (-QmodTwoZ(_raw(other)))

    def __eq__(self, other):
        if isinstance(other, (QmodTwoZ, int, Fraction)):
            return self.value == QmodTwoZ(_raw(other)).value
        return NotImplemented

    def __hash__(self):
        return hash(("Q/2Z", self.value))

    def __str__(self):
        return f"{self.value} mod 2"


@dataclass(frozen=True)
class QmodZ:
    """A rational number modulo 1, stored as its representative in [0, 1)."""

    value: Fraction

    def __init__(self, value):
        object.__setattr__(self, "value", Fraction(value) % 1)

    def __add__(self, other):
        return QmodZ(self.value + QmodZ(_raw(other)).value)

    def __neg__(self):
        return QmodZ(-self.value)

    def __sub__(self, other):
        return self + (-QmodZ(_raw(other)))

    def __eq__(self, other):
        if isinstance(other, (QmodZ, int, Fraction)):
            return self.value == QmodZ(_raw(other)).value
        return NotImplemented

    def __hash__(self):
        return hash(("Q/Z", self.value))

    def __str__(self):
        return str(self.value)


def _raw(x):
    return x.value if isinstance(x, (QmodTwoZ, QmodZ)) else x


def fraction_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Smith and Hermite normal forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmithDecomposition:
    """``left @ A @ right == diag(diag)`` with unimodular ``left``/``right``."""

    left: Matrix
    diag: List[int]
    right: Matrix

    @property
    def invariant_factors(self) -> List[int]:
        return list(self.diag)


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A, B):
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]


def transpose(A):
    return [list(r) for r in zip(*A)]


def smith_normal_form(A: Sequence[Sequence[int]]) -> SmithDecomposition:
    """Smith normal form with transforms.

    Pivot on the entry of smallest nonzero absolute value in the trailing
    block, clear its row and column, and repair divisibility by folding an
    offending row into the pivot row.
    """
    S = [[int(x) for x in row] for row in A]
    m = len(S)
    n = len(S[0]) if m else 0
    L = identity(m)
    R = identity(n)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        L[i], L[j] = L[j], L[i]

    def swap_cols(i, j):
        for M in (S, R):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        for M in (S, L):
            M[dst] = [a + k * b for a, b in zip(M[dst], M[src])]

    def add_col(dst, src, k):  # col_dst += k * col_src
        for M in (S, R):
            for row in M:
                row[dst] += k * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if S[i][j] and (best is None or abs(S[i][j]) < abs(S[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            piv = S[t][t]
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(i, t, -(S[i][t] // piv))
            for j in range(t + 1, n):
                if S[t][j]:
                    add_col(j, t, -(S[t][j] // piv))
            if any(S[i][t] for i in range(t + 1, m)) or any(S[t][j] for j in range(t + 1, n)):
                continue
            bad = next((i for i in range(t + 1, m)
                        for j in range(t + 1, n) if S[i][j] % piv), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            L[t] = [-x for x in L[t]]
    diag = [S[i][i] for i in range(min(m, n))]
    return SmithDecomposition(L, diag, R)


def hermite_normal_form(B: Sequence[Sequence[int]]) -> Matrix:
    """Row-style HNF of a nonsingular square integer matrix.

    Upper triangular, positive diagonal, entries above each pivot reduced
    into ``[0, pivot)``.  The row lattice is unchanged.
    """
    H = [[int(x) for x in row] for row in B]
    n = len(H)
    for c in range(n):
        # Euclid down column c over rows c..n-1
        while True:
            rows = [r for r in range(c, n) if H[r][c]]
            if not rows:
                raise PreconditionError("hermite_normal_form needs a nonsingular matrix")
            r0 = min(rows, key=lambda r: abs(H[r][c]))
            H[c], H[r0] = H[r0], H[c]
            done = True
            for r in range(c + 1, n):
                if H[r][c]:
                    k = H[r][c] // H[c][c]
                    H[r] = [a - k * b for a, b in zip(H[r], H[c])]
                    if H[r][c]:
                        done = False
            if done:
                break
        if H[c][c] < 0:
            H[c] = [-x for x in H[c]]
        for r in range(c):
            k = H[r][c] // H[c][c]
            if k:
                H[r] = [a - k * b for a, b in zip(H[r], H[c])]
    return H


def det_exact(M) -> Fraction:
    """Determinant over Q by Gaussian elimination (exact)."""
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det *= A[c][c]
        inv = 1 / A[c][c]
        for r in range(c + 1, n):
            if A[r][c]:
                k = A[r][c] * inv
                A[r] = [a - k * b for a, b in zip(A[r], A[c])]
    return det


def inverse_exact(M) -> List[List[Fraction]]:
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                k = A[r][c]
                A[r] = [a - k * b for a, b in zip(A[r], A[c])]
    return [row[n:] for row in A]


# ---------------------------------------------------------------------------
# Quadratic residues and congruences
# ---------------------------------------------------------------------------

def is_quadratic_residue(a: int, p: int) -> bool:
    """Euler's criterion.  Raises ZeroInput when p | a."""
    if p == 2 or not isprime(p):
        raise PreconditionError(f"{p} is not an odd prime")
    a %= p
    if a == 0:
        raise ZeroInput(f"{p} divides the input")
    return pow(a, (p - 1) // 2, p) == 1


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _sqrt_prime_power(u: int, p: int, k: int) -> Optional[int]:
    """A root of x^2 = u mod p^k for a unit u, by Hensel lifting; None if absent."""
    pk = p ** k
    u %= pk
    if p == 2:
        # direct case analysis up to 2^3
        if k == 1:
            return 1
        if k == 2:
            return 1 if u % 4 == 1 else None
        if u % 8 != 1:
            return None
        x, j = 1, 3
        while j < k:
            if (x * x - u) % (2 ** (j + 1)):
                x += 2 ** (j - 1)
            j += 1
        return x % pk
    if legendre(u, p) != 1:
        return None
    x = min(sqrt_mod(u % p, p, all_roots=True))
    mod = p
    while mod < pk:
        mod = min(mod * mod, pk)
        x = (x - (x * x - u) * pow(2 * x, -1, mod)) % mod
    return x


def square_ratio_witness(a: int, b: int, m: int) -> Optional[int]:
    """Return a unit x with a = x^2 b (mod m), or None when none exists.

    Solved prime power by prime power and glued with the CRT.
    """
    if m <= 0:
        raise PreconditionError("modulus must be positive")
    if gcd(a, m) != 1 or gcd(b, m) != 1:
        raise NotCoprime(f"gcd({a}, {m}) and gcd({b}, {m}) must both be 1")
    if m == 1:
        return 0
    x, mod = 0, 1
    for p, k in sorted(factorint(m).items()):
        pk = p ** k
        u = a * pow(b, -1, pk) % pk
        r = _sqrt_prime_power(u, p, k)
        if r is None:
            return None
        # CRT: x = x mod `mod`, x = r mod pk
        t = (r - x) * pow(mod, -1, pk) % pk
        x, mod = x + mod * t, mod * pk
    return x % m


def square_ratio_solvable(a: int, b: int, m: int) -> bool:
    return square_ratio_witness(a, b, m) is not None


# ---------------------------------------------------------------------------
# Totient, cyclotomic polynomials, univariate polynomial helpers
# ---------------------------------------------------------------------------

def euler_phi(n: int) -> int:
    if n < 1:
        raise PreconditionError("euler_phi needs n >= 1")
    out = n
    for p in factorint(n):
        out = out // p * (p - 1)
    return out


def poly_trim(f):
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def poly_mul(f, g):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return poly_trim(out)


def poly_divmod(f, g):
    """Division with remainder over Q (or Z when the quotient stays integral)."""
    f, g = poly_trim(f), poly_trim(g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    if len(f) < len(g):
        return [], f
    rem = [Fraction(x) for x in f]
    quo = [Fraction(0)] * (len(f) - len(g) + 1)
    lead = Fraction(g[-1])
    for k in range(len(quo) - 1, -1, -1):
        c = rem[k + len(g) - 1] / lead
        quo[k] = c
        if c:
            for j, b in enumerate(g):
                rem[k + j] -= c * b
    return _demote(poly_trim(quo)), _demote(poly_trim(rem[:len(g) - 1]))


def _demote(f):
    return [int(c) if isinstance(c, Fraction) and c.denominator == 1 else c for c in f]


def poly_eval(f, x):
    acc = 0
    for c in reversed(f):
        acc = acc * x + c
    return acc


def poly_derivative(f):
    return poly_trim([i * c for i, c in enumerate(f)][1:])


def poly_gcd(f, g):
    """Monic gcd over Q."""
    f, g = poly_trim(f), poly_trim(g)
    while g:
        f, g = g, poly_divmod(f, g)[1]
    if not f:
        return []
    lead = Fraction(f[-1])
    return _demote([Fraction(c) / lead for c in f])


@lru_cache(maxsize=None)
def _cyclotomic(m: int):
    f = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            f, r = poly_divmod(f, list(_cyclotomic(d)))
            assert not r
    return tuple(int(c) for c in f)


def cyclotomic_polynomial(m: int) -> List[int]:
    """Phi_m as integer coefficients, lowest degree first."""
    if m < 1:
        raise PreconditionError("cyclotomic index must be >= 1")
    return list(_cyclotomic(m))


def poly_to_str(f, var="t") -> str:
    terms = []
    for k in range(len(f) - 1, -1, -1):
        c = f[k]
        if c == 0:
            continue
        cs = fraction_str(c)
        if k == 0:
            terms.append(cs)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            terms.append(mono if c == 1 else f"-{mono}" if c == -1 else f"{cs}*{mono}")
    return " + ".join(terms).replace("+ -", "- ") or "0"


def prime_divisors(n) -> List[int]:
    """Primes dividing a nonzero integer or the numerator/denominator of a rational."""
    n = Fraction(n)
    if n == 0:
        raise ZeroInput("zero has no finite prime support")
    primes = set(factorint(abs(n.numerator))) | set(factorint(n.denominator))
    primes.discard(1)
    return sorted(primes)
