"""Quadratic forms: minors, diagonalization, Clifford classes, Hilbert symbols.

Polynomials in x, y, z are ``TriPoly`` objects (sparse dicts of exponent
triples to Fractions).  Determinants of polynomial matrices use fraction-free
Bareiss elimination, which needs exact multivariate division.

Brauer classes over Q are represented formally as tensor products of
quaternion symbols ``(a, b)``.  Two such representatives are compared through
their local invariants; by Hasse-Brauer-Noether this decides equality.

Throughout, the signed discriminant of a rank-n form is
``(-1)^(n(n-1)/2) * det``.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from sympy import isprime

from .arith import QmodZ, fraction_str, identity, legendre, prime_divisors, transpose
from .errors import (DegenerateMatrix, Inconsistent, NotPrime, PreconditionError, SingularMinor,
                     ZeroEntry, ZeroInput)

Monomial = Tuple[int, int, int]
VARS = ("x", "y", "z")


# ---------------------------------------------------------------------------
# TriPoly
# ---------------------------------------------------------------------------

class TriPoly:
    """Polynomial in x, y, z with exact rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Monomial, object]] = None):
        clean = {}
        for mono, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[tuple(mono)] = c
        self.terms: Dict[Monomial, Fraction] = clean

    # constructors
    @classmethod
    def const(cls, c) -> "TriPoly":
        return cls({(0, 0, 0): c})

    @classmethod
    def var(cls, name: str) -> "TriPoly":
        mono = [0, 0, 0]
        mono[VARS.index(name)] = 1
        return cls({tuple(mono): 1})

    @classmethod
    def linear(cls, a, b, c) -> "TriPoly":
        return cls({(1, 0, 0): a, (0, 1, 0): b, (0, 0, 1): c})

    @classmethod
    def parse(cls, text: str) -> "TriPoly":
        """Parse strings such as ``-157x^2 - 46xy + 12xz`` (implicit products)."""
        s = text.replace(" ", "").replace("*", "").replace("−", "-")
        s = s.replace("²", "^2").replace("³", "^3").replace("⁴", "^4").replace("⁵", "^5")
        s = s.replace("⁶", "^6")
        if not s:
            raise PreconditionError("empty polynomial")
        if s[0] not in "+-":
            s = "+" + s
        terms: Dict[Monomial, Fraction] = {}
        for sign, coeff, mons in re.findall(r"([+-])(\d+(?:/\d+)?)?((?:[xyz](?:\^\d+)?)*)", s):
            if not coeff and not mons:
                continue
            c = Fraction(coeff) if coeff else Fraction(1)
            if sign == "-":
                c = -c
            e = [0, 0, 0]
            for v, power in re.findall(r"([xyz])(?:\^(\d+))?", mons):
                e[VARS.index(v)] += int(power) if power else 1
            key = tuple(e)
            terms[key] = terms.get(key, Fraction(0)) + c
        consumed = "".join(m.group(0) for m in re.finditer(r"[+-](\d+(?:/\d+)?)?((?:[xyz](?:\^\d+)?)*)", s))
        if consumed != s:
            raise PreconditionError(f"cannot parse polynomial {text!r}")
        return cls(terms)

    # basic queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def is_homogeneous(self, d: Optional[int] = None) -> bool:
        degs = {sum(m) for m in self.terms}
        if d is not None:
            return degs <= {d}
        return len(degs) <= 1

    def is_constant(self) -> bool:
        return all(m == (0, 0, 0) for m in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((0, 0, 0), Fraction(0))

    def coeff(self, mono: Monomial) -> Fraction:
        return self.terms.get(tuple(mono), Fraction(0))

    # arithmetic
    @staticmethod
    def _lift(other) -> "TriPoly":
        return other if isinstance(other, TriPoly) else TriPoly.const(other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return TriPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return TriPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out: Dict[Monomial, Fraction] = {}
        for (a1, b1, c1), u in self.terms.items():
            for (a2, b2, c2), v in other.terms.items():
                key = (a1 + a2, b1 + b2, c1 + c2)
                out[key] = out.get(key, 0) + u * v
        return TriPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = TriPoly.const(1)
        for _ in range(e):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TriPoly.const(other)
        return isinstance(other, TriPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def leading(self) -> Tuple[Monomial, Fraction]:
        """Leading term in lex order x > y > z."""
        m = max(self.terms)
        return m, self.terms[m]

    def divmod(self, other: "TriPoly") -> Tuple["TriPoly", "TriPoly"]:
        """Multivariate division by a single divisor (lex order)."""
        other = self._lift(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lm, lc = other.leading()
        quot: Dict[Monomial, Fraction] = {}
        rem: Dict[Monomial, Fraction] = {}
        work = TriPoly(self.terms)
        while work.terms:
            m, c = work.leading()
            if all(a >= b for a, b in zip(m, lm)):
                qm = tuple(a - b for a, b in zip(m, lm))
                qc = c / lc
                quot[qm] = quot.get(qm, 0) + qc
                work = work - TriPoly({qm: qc}) * other
            else:
                rem[m] = c
                del work.terms[m]
        return TriPoly(quot), TriPoly(rem)

    def exact_div(self, other) -> "TriPoly":
        if not isinstance(other, TriPoly):
            other = Fraction(other)
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return TriPoly({m: c / other for m, c in self.terms.items()})
        q, r = self.divmod(other)
        if r:
            raise Inconsistent("polynomial division is not exact")
        return q

    # evaluation and substitution
    def __call__(self, x, y, z):
        total = 0
        for (a, b, c), coeff in self.terms.items():
            total += coeff * x ** a * y ** b * z ** c
        return total

    def evaluate(self, point: Sequence) -> Fraction:
        x, y, z = (Fraction(v) for v in point)
        return Fraction(self(x, y, z))

    def mod_p(self, p: int) -> Dict[Monomial, int]:
        """Reduce coefficients modulo p (denominators must be prime to p)."""
        out = {}
        for m, c in self.terms.items():
            if c.denominator % p == 0:
                raise PreconditionError(f"coefficient {c} is not p-integral for p={p}")
            v = c.numerator * pow(c.denominator, -1, p) % p
            if v:
                out[m] = v
        return out

    def integer_content(self) -> Fraction:
        """Positive rational g with self/g having coprime integer coefficients."""
        from math import gcd, lcm
        if not self.terms:
            return Fraction(0)
        den = 1
        for c in self.terms.values():
            den = lcm(den, c.denominator)
        num = 0
        for c in self.terms.values():
            num = gcd(num, int(c * den))
        return Fraction(num, den)

    def __repr__(self):
        return f"TriPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda t: (-sum(t), tuple(-e for e in t))):
            c = self.terms[m]
            mono = "".join(v if e == 1 else f"{v}^{e}" for v, e in zip(VARS, m) if e)
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = mono if (mag == 1 and mono) else (fraction_str(mag) + mono)
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self):
        return [{"exponents": list(m), "coeff": fraction_str(c)} for m, c in sorted(self.terms.items())]


Scalar = Union[int, Fraction, TriPoly]


def pencil_matrix(M1, M2, M3) -> List[List[TriPoly]]:
    """Entry-wise x*M1 + y*M2 + z*M3 as a matrix of linear TriPolys."""
    n = len(M1)
    return [[TriPoly.linear(M1[i][j], M2[i][j], M3[i][j]) for j in range(n)] for i in range(n)]


def specialize_matrix(M, point) -> List[List[Fraction]]:
    return [[e.evaluate(point) if isinstance(e, TriPoly) else Fraction(e) for e in row] for row in M]


# ---------------------------------------------------------------------------
# Minors and diagonalization
# ---------------------------------------------------------------------------

def _is_zero(e) -> bool:
    return e.is_zero() if isinstance(e, TriPoly) else e == 0


def _exact_div(a, b):
    if isinstance(a, TriPoly):
        return a.exact_div(b)
    if isinstance(b, TriPoly):
        return TriPoly.const(a).exact_div(b)
    return Fraction(a) / Fraction(b)


def _check_square_symmetric(M):
    n = len(M)
    if any(len(row) != n for row in M):
        raise PreconditionError("matrix must be square")
    for i in range(n):
        for j in range(i):
            if M[i][j] != M[j][i]:
                raise PreconditionError("matrix must be symmetric")
    return n


def bareiss_minors(M) -> List:
    """Leading principal minors by fraction-free Bareiss elimination (no pivoting).

    Raises SingularMinor(k) when a pivot m_k vanishes before the last step.
    """
    n = len(M)
    A = [[e if isinstance(e, TriPoly) else Fraction(e) for e in row] for row in M]
    minors = []
    prev = Fraction(1)
    for k in range(n):
        pivot = A[k][k]
        minors.append(pivot)
        if k == n - 1:
            break
        if _is_zero(pivot):
            raise SingularMinor(k + 1)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = _exact_div(pivot * A[i][j] - A[i][k] * A[k][j], prev)
        prev = pivot
    return minors


def laplace_minors(M) -> List:
    """Leading principal minors by memoized Laplace expansion (division free).

    D[S] is the determinant of the first |S| rows against the columns S,
    expanded along the last row; the leading minors are D[(0, ..., k-1)].
    Used as an independent route and as the fallback when a Bareiss pivot
    vanishes.
    """
    n = len(M)
    D = {(): Fraction(1)}
    minors = []
    for r in range(n):
        level = {}
        for cols in itertools.combinations(range(n), r + 1):
            total = 0
            for pos, c in enumerate(cols):
                term = M[r][c] * D[cols[:pos] + cols[pos + 1:]]
                total = total - term if (r + pos) % 2 else total + term
            level[cols] = total
        D = level
        minors.append(D[tuple(range(r + 1))])
    return minors


def leading_principal_minors(M) -> List:
    """[m_1, ..., m_n]: determinants of the top-left i x i blocks."""
    _check_square_symmetric(M)
    try:
        return bareiss_minors(M)
    except SingularMinor:
        return laplace_minors(M)


def determinant(M):
    return leading_principal_minors(M)[-1]


def symmetric_diagonalize(M, with_transform: bool = False):
    """Congruence diagonalization by symmetric Gaussian elimination.

    Returns a_i = m_i / m_{i-1}.  For polynomial input the entries are pairs
    (m_i, m_{i-1}) since they live in the function field.  With
    ``with_transform`` (rational input only), also returns T with
    T^t M T = diag(a).
    """
    n = _check_square_symmetric(M)
    if any(isinstance(e, TriPoly) for row in M for e in row):
        minors = leading_principal_minors(M)
        for i, m in enumerate(minors):
            if _is_zero(m):
                raise SingularMinor(i + 1)
        dens = [TriPoly.const(1)] + minors[:-1]
        return list(zip(minors, dens))
    A = [[Fraction(e) for e in row] for row in M]
    L = identity(n)
    L = [[Fraction(e) for e in row] for row in L]
    diag = []
    for k in range(n):
        d = A[k][k] - sum(L[k][j] ** 2 * diag[j] for j in range(k))
        if d == 0:
            raise SingularMinor(k + 1)
        diag.append(d)
        for i in range(k + 1, n):
            L[i][k] = (A[i][k] - sum(L[i][j] * L[k][j] * diag[j] for j in range(k))) / d
    if not with_transform:
        return diag
    # M = L D L^t, so T = (L^t)^{-1} satisfies T^t M T = D
    from .arith import inverse_exact
    T = inverse_exact(transpose(L))
    return diag, T


# ---------------------------------------------------------------------------
# Places, symbols, Brauer representatives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Place:
    """A place of Q: ``Place(None)`` is the real place, ``Place(p)`` a prime."""

    p: Optional[int] = None

    def __post_init__(self):
        if self.p is not None and not isprime(self.p):
            raise NotPrime(f"{self.p} is not prime")

    @property
    def is_real(self) -> bool:
        return self.p is None

    def __str__(self):
        return "inf" if self.p is None else str(self.p)

    @classmethod
    def parse(cls, s: str) -> "Place":
        s = str(s).strip().lower()
        return cls(None) if s in ("inf", "infinity", "oo", "real") else cls(int(s))


RealPlace = Place(None)


def FinitePrime(p: int) -> Place:
    return Place(p)


class BaseField(str, enum.Enum):
    RationalField = "RationalField"
    FunctionFieldOfS = "FunctionFieldOfS"


@dataclass(frozen=True)
class QuaternionSymbol:
    a: Scalar
    b: Scalar

    def __post_init__(self):
        if _is_zero(self.a) or _is_zero(self.b):
            raise ZeroEntry("quaternion symbol entries must be nonzero")
        if not isinstance(self.a, TriPoly):
            object.__setattr__(self, "a", Fraction(self.a))
        if not isinstance(self.b, TriPoly):
            object.__setattr__(self, "b", Fraction(self.b))

    def specialize(self, point) -> "QuaternionSymbol":
        def ev(e):
            v = e.evaluate(point) if isinstance(e, TriPoly) else e
            if v == 0:
                raise ZeroEntry(f"symbol entry {e} vanishes at ({', '.join(str(c) for c in point)})")
            return v
        return QuaternionSymbol(ev(self.a), ev(self.b))

    def __str__(self):
        def s(e):
            return str(e) if isinstance(e, TriPoly) else fraction_str(e)
        return f"({s(self.a)}, {s(self.b)})"


@dataclass(frozen=True)
class BrauerRep:
    symbols: Tuple[QuaternionSymbol, ...] = ()
    base: BaseField = BaseField.RationalField

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))

    @classmethod
    def trivial(cls, base=BaseField.RationalField) -> "BrauerRep":
        return cls((), base)

    def tensor(self, other: "BrauerRep") -> "BrauerRep":
        return BrauerRep(self.symbols + other.symbols, self.base)

    def specialize(self, point) -> "BrauerRep":
        return BrauerRep(tuple(s.specialize(point) for s in self.symbols), BaseField.RationalField)

    def entries(self) -> List:
        return [e for s in self.symbols for e in (s.a, s.b)]

    def __str__(self):
        return " ⊗ ".join(str(s) for s in self.symbols) if self.symbols else "0"

    def to_json(self):
        def enc(e):
            return str(e) if isinstance(e, TriPoly) else fraction_str(e)
        return {"base": self.base.value, "symbols": [[enc(s.a), enc(s.b)] for s in self.symbols]}


def _sym(a, b) -> QuaternionSymbol:
    return QuaternionSymbol(a, b)


def clifford_class_rank6(a: Sequence) -> BrauerRep:
    """(-a1a2, -a1a3) (x) (a1a2a3a4, a1a2a3a5) for the diagonal form <a1..a6>."""
    if len(a) != 6:
        raise PreconditionError("need exactly six diagonal entries")
    if any(_is_zero(e) for e in a):
        raise ZeroEntry("diagonal entries must be nonzero")
    a = [e if isinstance(e, TriPoly) else Fraction(e) for e in a]
    a1, a2, a3, a4, a5, _ = a
    base = BaseField.FunctionFieldOfS if any(isinstance(e, TriPoly) for e in a) else BaseField.RationalField
    return BrauerRep((_sym(-(a1 * a2), -(a1 * a3)), _sym(a1 * a2 * a3 * a4, a1 * a2 * a3 * a5)), base)


def symbols_from_minors(m: Sequence) -> BrauerRep:
    m1, m2, m3, m4, m5 = m[:5]
    for i, v in enumerate((m1, m2, m3, m4, m5)):
        if _is_zero(v):
            raise SingularMinor(i + 1)
    base = BaseField.FunctionFieldOfS if any(isinstance(e, TriPoly) for e in m[:5]) else BaseField.RationalField
    return BrauerRep((_sym(-m2, -(m1 * m3)), _sym(m4, -(m3 * m5))), base)


def even_clifford_from_minors(M) -> BrauerRep:
    """(-m2, -m1 m3) (x) (m4, -m3 m5) built from the leading principal minors."""
    _check_square_symmetric(M)
    if len(M) != 6:
        raise PreconditionError("need a 6x6 matrix")
    minors = bareiss_minors(M)
    return symbols_from_minors(minors)


# ---------------------------------------------------------------------------
# Hilbert symbols and local invariants
# ---------------------------------------------------------------------------

def _split_p(n: int, p: int) -> Tuple[int, int]:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k, n


def _hilbert_sign(a: int, b: int, p: Optional[int]) -> int:
    """(a, b)_p in {+1, -1} for nonzero integers (Serre, Cours d'arithmetique III)."""
    if p is None:
        return -1 if (a < 0 and b < 0) else 1
    alpha, u = _split_p(a, p)
    beta, v = _split_p(b, p)
    if p == 2:
        eps = lambda t: ((t - 1) // 2) % 2
        omega = lambda t: ((t * t - 1) // 8) % 2
        e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if e % 2 else 1
    s = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    if beta % 2:
        s *= legendre(u, p)
    if alpha % 2:
        s *= legendre(v, p)
    return s


def _as_integer_square_class(x) -> int:
    x = Fraction(x)
    return x.numerator * x.denominator  # same square class as x


def hilbert_symbol(a, b, v: Place) -> QmodZ:
    """Local symbol (a, b)_v as 0 or 1/2 in Q/Z."""
    if isinstance(a, TriPoly) or isinstance(b, TriPoly):
        if not (isinstance(a, TriPoly) and a.is_constant() or not isinstance(a, TriPoly)):
            raise PreconditionError("hilbert_symbol needs rational entries")
        a = a.constant_value() if isinstance(a, TriPoly) else a
        b = b.constant_value() if isinstance(b, TriPoly) else b
    if Fraction(a) == 0 or Fraction(b) == 0:
        raise ZeroInput("Hilbert symbol of zero")
    if not isinstance(v, Place):
        v = Place.parse(v)
    s = _hilbert_sign(_as_integer_square_class(a), _as_integer_square_class(b), v.p)
    return QmodZ(Fraction(0) if s == 1 else Fraction(1, 2))


def relevant_places(values: Iterable) -> List[Place]:
    """{inf, 2} together with all primes dividing numerators or denominators."""
    primes = {2}
    for x in values:
        x = Fraction(x)
        if x == 0:
            raise ZeroEntry("zero entry has no support")
        primes.update(prime_divisors(x.numerator))
        primes.update(prime_divisors(x.denominator))
    return [RealPlace] + [Place(p) for p in sorted(primes)]


def brauer_invariant(rep: BrauerRep, v: Place) -> QmodZ:
    total = QmodZ(0)
    for s in rep.symbols:
        if isinstance(s.a, TriPoly) and not s.a.is_constant() or isinstance(s.b, TriPoly) and not s.b.is_constant():
            raise PreconditionError("specialize function-field symbols before taking invariants")
        total = total + hilbert_symbol(s.a, s.b, v)
    return total


def rep_places(*reps: BrauerRep) -> List[Place]:
    vals = []
    for r in reps:
        for e in r.entries():
            vals.append(e.constant_value() if isinstance(e, TriPoly) else e)
    return relevant_places(vals)


def brauer_equal(r1: BrauerRep, r2: BrauerRep) -> bool:
    """Equality in Br(Q), decided by local invariants on the joint support."""
    return all(brauer_invariant(r1, v) == brauer_invariant(r2, v) for v in rep_places(r1, r2))


def reciprocity_sum(rep: BrauerRep) -> QmodZ:
    total = QmodZ(0)
    for v in rep_places(rep):
        total = total + brauer_invariant(rep, v)
    return total


# ---------------------------------------------------------------------------
# Clifford invariant of diagonal forms and the rewriting rules
# ---------------------------------------------------------------------------

def _prod(xs):
    out = Fraction(1)
    for x in xs:
        out *= Fraction(x)
    return out


def signed_discriminant(a: Sequence) -> Fraction:
    n = len(a)
    return (-1) ** (n * (n - 1) // 2) * _prod(a)


def hasse_invariant(a: Sequence) -> BrauerRep:
    """s(q) = (x)_{i<j} (a_i, a_j)."""
    return BrauerRep(tuple(_sym(a[i], a[j]) for i in range(len(a)) for j in range(i + 1, len(a))))


def clifford_invariant(a: Sequence) -> BrauerRep:
    """Class of the Clifford algebra of <a_1..a_n> (Witt invariant).

    Expressed through the Hasse invariant and d = det, depending on n mod 8.
    """
    if any(Fraction(x) == 0 for x in a):
        raise ZeroEntry("diagonal entries must be nonzero")
    a = [Fraction(x) for x in a]
    s = hasse_invariant(a)
    d = _prod(a)
    r = len(a) % 8
    if r in (1, 2):
        return s
    if r in (3, 4):
        return s.tensor(BrauerRep((_sym(-1, -d),)))
    if r in (5, 6):
        return s.tensor(BrauerRep((_sym(-1, -1),)))
    return s.tensor(BrauerRep((_sym(-1, d),)))


def clifford_lemma_rules(q1: Sequence, q2: Sequence, a) -> Dict[str, Tuple[BrauerRep, BrauerRep]]:
    """Both sides of the three rewriting rules for even-rank diagonal forms.

    (i)   c(<a> q1)          = c(q1) (x) (a, D(q1))
    (ii)  c(q1 + q2)         = c(q1) (x) c(q2) (x) (D(q1), D(q2))
    (iii) c(q1 + <a, -a>)    = c(q1)
    """
    q1 = [Fraction(x) for x in q1]
    q2 = [Fraction(x) for x in q2]
    a = Fraction(a)
    if len(q1) % 2 or len(q2) % 2:
        raise PreconditionError("forms must have even rank")
    if a == 0 or any(x == 0 for x in q1 + q2):
        raise ZeroEntry("entries must be nonzero")
    d1, d2 = signed_discriminant(q1), signed_discriminant(q2)
    return {
        "i": (clifford_invariant([a * x for x in q1]),
              clifford_invariant(q1).tensor(BrauerRep((_sym(a, d1),)))),
        "ii": (clifford_invariant(q1 + q2),
               clifford_invariant(q1).tensor(clifford_invariant(q2)).tensor(BrauerRep((_sym(d1, d2),)))),
        "iii": (clifford_invariant(q1 + [a, -a]), clifford_invariant(q1)),
    }


# ---------------------------------------------------------------------------
# Exact signatures
# ---------------------------------------------------------------------------

def charpoly(M) -> List[Fraction]:
    """Characteristic polynomial det(tI - M), lowest degree first (Faddeev-LeVerrier)."""
    n = len(M)
    A = [[Fraction(e) for e in row] for row in M]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    Mk = [[Fraction(0)] * n for _ in range(n)]  # M_0 = 0
    c = Fraction(1)
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I ; c_{n-k} = -tr(A M_k)/k
        prod = [[sum(A[i][l] * Mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        Mk = [[prod[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
        AMk = [[sum(A[i][l] * Mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        c = -sum(AMk[i][i] for i in range(n)) / k
        coeffs[n - k] = c
    return coeffs


def _sign_changes(seq) -> int:
    signs = [1 if c > 0 else -1 for c in seq if c != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def signature_exact(M) -> Tuple[int, int]:
    """(#positive, #negative) eigenvalues via Descartes' rule on the char poly.

    Exact for symmetric matrices, whose characteristic polynomial is real-rooted.
    """
    _check_square_symmetric(M)
    cp = charpoly(M)
    if cp[0] == 0:
        raise DegenerateMatrix("matrix is singular")
    pos = _sign_changes(cp)
    neg = _sign_changes([c * (-1) ** i for i, c in enumerate(cp)])
    return pos, neg
