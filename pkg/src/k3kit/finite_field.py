"""Arithmetic in F_{p^n}.

Elements are encoded as integers ``sum c_i p^i`` where ``c_0 + c_1 x + ...`` is
the reduced polynomial representative modulo a fixed monic irreducible.  Small
fields (q <= 2^20) also carry discrete-log / Zech-log tables, which make
multiplication an index addition and addition a single table lookup::

    log(g^a + g^b) = a + Z[b - a],   Z[k] = log(1 + g^k)

The modulus is the lexicographically smallest monic irreducible, scanning the
coefficient tuple (c_0, c_1, ..., c_{n-1}).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from sympy import factorint, isprime

from .config import budget_points
from .errors import BudgetExceeded, DivisionByZero, MismatchedContext, NotPrime, PreconditionError

ZECH_LIMIT = 2 ** 20
DEFAULT_FIELD_BUDGET = 2 ** 32


# -- polynomials over F_p (lists, lowest degree first) -----------------------

def _trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def fp_poly_mod(f, m, p):
    f = [c % p for c in f]
    _trim(f)
    inv = pow(m[-1], -1, p)
    while len(f) >= len(m):
        c = f[-1] * inv % p
        shift = len(f) - len(m)
        for i, b in enumerate(m):
            f[shift + i] = (f[shift + i] - c * b) % p
        _trim(f)
    return f


def fp_poly_mul(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return _trim([c % p for c in out])


def fp_poly_sub(f, g, p):
    out = [0] * max(len(f), len(g))
    for i, a in enumerate(f):
        out[i] += a
    for i, b in enumerate(g):
        out[i] -= b
    return _trim([c % p for c in out])


def fp_poly_gcd(f, g, p):
    f, g = _trim([c % p for c in f]), _trim([c % p for c in g])
    while g:
        f, g = g, fp_poly_mod(f, g, p)
    return f


def fp_poly_powmod(f, e, m, p):
    result, base = [1], fp_poly_mod(f, m, p)
    while e:
        if e & 1:
            result = fp_poly_mod(fp_poly_mul(result, base, p), m, p)
        base = fp_poly_mod(fp_poly_mul(base, base, p), m, p)
        e >>= 1
    return result


def is_irreducible(m, p) -> bool:
    """gcd(x^{p^k} - x, m) = 1 for 1 <= k < n and x^{p^n} = x mod m."""
    n = len(m) - 1
    if n == 1:
        return True
    xpk = [0, 1]
    for k in range(1, n + 1):
        xpk = fp_poly_powmod(xpk, p, m, p)
        diff = fp_poly_sub(xpk, [0, 1], p)
        if k < n:
            g = fp_poly_gcd(m, diff, p)
            if len(g) > 1:
                return False
        elif diff:
            return False
    return True


@lru_cache(maxsize=None)
def smallest_irreducible(p: int, n: int) -> Tuple[int, ...]:
    for coeffs in itertools.product(range(p), repeat=n):
        if n > 1 and coeffs[0] == 0:
            continue
        m = list(coeffs) + [1]
        if is_irreducible(m, p):
            return tuple(m)
    raise AssertionError("no irreducible polynomial found")  # unreachable


# -- the field ---------------------------------------------------------------

class FqContext:
    """The field F_{p^n}; immutable after construction."""

    def __init__(self, p: int, n: int, budget: Optional[int] = None, zech: Optional[bool] = None):
        if not isprime(p):
            raise NotPrime(f"{p} is not prime")
        if n < 1:
            raise PreconditionError("extension degree must be >= 1")
        budget = budget_points(DEFAULT_FIELD_BUDGET, budget)
        if p ** n > budget:
            raise BudgetExceeded(f"field size {p}^{n} exceeds budget {budget}")
        self.p, self.n, self.q = p, n, p ** n
        self.modulus = smallest_irreducible(p, n)
        self._pows = [p ** i for i in range(n)]
        self.has_zech = (self.q <= ZECH_LIMIT) if zech is None else zech
        self.generator = None
        self.exp = self.log = self.zech = self.square = None
        if self.has_zech:
            self._build_tables()

    def __repr__(self):
        return f"FqContext(p={self.p}, n={self.n}, modulus={list(self.modulus)})"

    def __eq__(self, other):
        return isinstance(other, FqContext) and (self.p, self.n) == (other.p, other.n)

    def __hash__(self):
        return hash((self.p, self.n))

    # encodings <-> coefficient lists
    def digits(self, a: int) -> List[int]:
        out = []
        for _ in range(self.n):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def encode(self, coeffs) -> int:
        coeffs = fp_poly_mod(list(coeffs), list(self.modulus), self.p) if len(coeffs) > self.n \
            else [c % self.p for c in coeffs]
        return sum(c * self._pows[i] for i, c in enumerate(coeffs))

    # polynomial-path arithmetic (no tables)
    def add_poly(self, a: int, b: int) -> int:
        p = self.p
        out, k = 0, 1
        for _ in range(self.n):
            a, ra = divmod(a, p)
            b, rb = divmod(b, p)
            out += ((ra + rb) % p) * k
            k *= p
        return out

    def neg(self, a: int) -> int:
        return self.encode([(-c) % self.p for c in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add_poly(a, self.neg(b))

    def mul_poly(self, a: int, b: int) -> int:
        prod = fp_poly_mul(self.digits(a), self.digits(b), self.p)
        return self.encode(fp_poly_mod(prod, list(self.modulus), self.p))

    def pow_poly(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise DivisionByZero("0 has no inverse")
            return 0 if e else 1
        result, base = 1, a
        e %= self.q - 1
        while e:
            if e & 1:
                result = self.mul_poly(result, base)
            base = self.mul_poly(base, base)
            e >>= 1
        return result

    def inv_poly(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("0 has no inverse")
        return self.pow_poly(a, self.q - 2)

    # Zech-path arithmetic
    def _build_tables(self):
        q, p, n = self.q, self.p, self.n
        order = q - 1
        primes = list(factorint(order)) if order > 1 else []
        g = next(c for c in range(1, q) if all(self.pow_poly(c, order // r) != 1 for r in primes))
        self.generator = g
        # multiplication by g is F_p-linear: precompute images of the basis x^i
        basis_images = [self.digits(self.mul_poly(g, self._pows[i])) for i in range(n)]
        exp = np.empty(order, dtype=np.int64)
        digits = [1] + [0] * (n - 1)
        for k in range(order):
            exp[k] = sum(c * self._pows[i] for i, c in enumerate(digits))
            new = [0] * n
            for i, c in enumerate(digits):
                if c:
                    row = basis_images[i]
                    for j in range(n):
                        new[j] += c * row[j]
            digits = [c % p for c in new]
        log = np.full(q, -1, dtype=np.int64)
        log[exp] = np.arange(order, dtype=np.int64)
        if np.any(log[1:] < 0):
            raise AssertionError("generator does not generate")  # unreachable
        d0 = exp % p
        one_plus = exp - d0 + (d0 + 1) % p
        self.exp, self.log = exp, log
        self.zech = log[one_plus]  # -1 marks 1 + g^k = 0
        self.square = np.zeros(q, dtype=np.int8)
        self.square[exp[0::2]] = 1
        self.square[exp[1::2]] = -1

    def mul_zech(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[(self.log[a] + self.log[b]) % (self.q - 1)])

    def add_zech(self, a: int, b: int) -> int:
        if a == 0:
            return b
        if b == 0:
            return a
        la, lb = int(self.log[a]), int(self.log[b])
        z = int(self.zech[(lb - la) % (self.q - 1)])
        if z < 0:
            return 0
        return int(self.exp[(la + z) % (self.q - 1)])

    # dispatching API
    def add(self, a: int, b: int) -> int:
        return self.add_zech(a, b) if self.has_zech else self.add_poly(a, b)

    def mul(self, a: int, b: int) -> int:
        return self.mul_zech(a, b) if self.has_zech else self.mul_poly(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("0 has no inverse")
        if self.has_zech:
            return int(self.exp[(-self.log[a]) % (self.q - 1)])
        return self.inv_poly(a)

    def pow(self, a: int, e: int) -> int:
        if self.has_zech and a:
            return int(self.exp[(int(self.log[a]) * e) % (self.q - 1)])
        if e < 0:
            return self.pow_poly(self.inv(a), -e)
        return self.pow_poly(a, e)

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    def quadratic_character(self, a: int) -> int:
        if a == 0:
            return 0
        if self.has_zech:
            return int(self.square[a])
        return 1 if self.pow_poly(a, (self.q - 1) // 2) == 1 else -1

    def from_int(self, k: int) -> int:
        return k % self.p

    def element(self, value) -> "FqElement":
        if isinstance(value, (list, tuple)):
            value = self.encode(value)
        return FqElement(self, int(value))

    def elements(self):
        return [FqElement(self, a) for a in range(self.q)]


def make_context(p: int, n: int, budget: Optional[int] = None) -> FqContext:
    return FqContext(p, n, budget)


@dataclass(frozen=True)
class FqElement:
    ctx: FqContext
    value: int

    def _check(self, other):
        if isinstance(other, int):
            return self.ctx.from_int(other)
        if other.ctx != self.ctx:
            raise MismatchedContext("elements live in different fields")
        return other.value

    def __add__(self, other):
        return FqElement(self.ctx, self.ctx.add(self.value, self._check(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FqElement(self.ctx, self.ctx.sub(self.value, self._check(other)))

    def __neg__(self):
        return FqElement(self.ctx, self.ctx.neg(self.value))

    def __mul__(self, other):
        return FqElement(self.ctx, self.ctx.mul(self.value, self._check(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * FqElement(self.ctx, self.ctx.inv(self._check(other)))

    def __pow__(self, e: int):
        return FqElement(self.ctx, self.ctx.pow(self.value, e))

    def inv(self):
        return FqElement(self.ctx, self.ctx.inv(self.value))

    def frobenius(self):
        return FqElement(self.ctx, self.ctx.frobenius(self.value))

    def chi(self) -> int:
        return self.ctx.quadratic_character(self.value)

    def is_zero(self) -> bool:
        return self.value == 0

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == self.ctx.from_int(other) and 0 <= other < self.ctx.p
        return isinstance(other, FqElement) and other.ctx == self.ctx and other.value == self.value

    def __hash__(self):
        return hash((self.ctx.p, self.ctx.n, self.value))

    def __repr__(self):
        return f"F{self.ctx.q}({self.ctx.digits(self.value)})"


def quadratic_character(e: FqElement) -> int:
    return e.chi()
