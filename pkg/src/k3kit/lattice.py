"""Index-p sublattices of the transcendental lattice of a degree-2d K3 surface.

For fixed ``d`` and prime ``p`` an index-p sublattice of
``T = <-2d> + Lambda'`` is determined, up to the unimodular summand, by a pair
``(i_alpha, c_alpha)`` and splits off the rank three lattice ``M_alpha`` with
Gram matrix::

    [[-2d, -i, 0],
     [-i,  2c, p],
     [ 0,   p, 0]]

This module computes discriminant groups and forms of such lattices,
classifies them into isomorphism classes, counts the classes, and enumerates
index-p sublattices of small lattices as an independent check.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import factorint, isprime

from .arith import (QmodTwoZ, QmodZ, det_exact, fraction_str, hermite_normal_form,
                    is_quadratic_residue, matmul, smith_normal_form, transpose)
from .config import budget_points
from .errors import (BudgetExceeded, DegenerateLattice, MismatchedContext, NotPrime,
                     OddLattice, PreconditionError, UnsupportedPrime)


@dataclass(frozen=True)
class GramLattice:
    gram: Tuple[Tuple[int, ...], ...]

    def __init__(self, gram):
        g = tuple(tuple(int(x) for x in row) for row in gram)
        n = len(g)
        if any(len(row) != n for row in g):
            raise PreconditionError("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise PreconditionError("Gram matrix must be symmetric")
        object.__setattr__(self, "gram", g)

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @property
    def det(self) -> int:
        return int(det_exact(self.gram))

    def as_lists(self):
        return [list(r) for r in self.gram]


@dataclass(frozen=True)
class SublatticeParams:
    d: int
    p: int
    i_alpha: int
    c_alpha: int

    def __post_init__(self):
        if self.d < 1:
            raise PreconditionError("d must be a positive integer")
        if not isprime(self.p):
            raise NotPrime(f"{self.p} is not prime")
        if self.i_alpha not in (0, 1):
            raise PreconditionError("i_alpha must be 0 or 1 (normalize by i_alpha^-1)")
        if not 0 <= self.c_alpha < self.p:
            raise PreconditionError("c_alpha must lie in [0, p-1]")


class LatticeClassLabel(str, enum.Enum):
    # p does not divide d
    CyclicSquare = "CyclicSquare"
    CyclicNonsquare = "CyclicNonsquare"
    NonCyclic = "NonCyclic"
    # p divides d
    NonCyclicResidue = "NonCyclicResidue"
    NonCyclicNonresidue = "NonCyclicNonresidue"
    NonCyclicPP = "NonCyclicPP"
    CyclicFull = "CyclicFull"


@dataclass(frozen=True)
class DiscriminantForm:
    """Finite quadratic form on ``L*/L`` in SNF-adapted generators.

    ``generators`` are coordinate vectors in ``L*`` with respect to the Gram
    basis; only invariant factors > 1 get a generator.
    """

    invariant_factors: Tuple[int, ...]
    generators: Tuple[Tuple[Fraction, ...], ...]
    q_values: Tuple[QmodTwoZ, ...]
    gram_q: Tuple[Tuple[QmodZ, ...], ...]
    gram: Tuple[Tuple[int, ...], ...]

    @property
    def orders(self) -> List[int]:
        return [d for d in self.invariant_factors if d > 1]

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def pair(self, x, y) -> Fraction:
        """Rational value (x, y) of the Q-extended form on coordinate vectors."""
        G = self.gram
        return sum(Fraction(x[i]) * G[i][j] * Fraction(y[j])
                   for i in range(len(G)) for j in range(len(G)) if x[i] and y[j])

    def q(self, x) -> QmodTwoZ:
        return QmodTwoZ(self.pair(x, x))

    def b(self, x, y) -> QmodZ:
        return QmodZ(self.pair(x, y))

    def coordinates(self, x) -> List[int]:
        """Coordinates of a dual vector in terms of the generators (mod orders)."""
        orders = self.orders
        # brute-force is enough for the small groups handled here
        for combo in itertools.product(*[range(o) for o in orders]):
            diff = [Fraction(x[i]) - sum(c * g[i] for c, g in zip(combo, self.generators))
                    for i in range(len(x))]
            if all(v.denominator == 1 for v in diff):
                return list(combo)
        raise PreconditionError("vector is not in the dual lattice")

    def element_order(self, x) -> int:
        k = 1
        while not all((Fraction(c) * k).denominator == 1 for c in x):
            k += 1
        return k

    def to_json(self):
        return {
            "invariant_factors": list(self.invariant_factors),
            "group": self.orders,
            "generators": [[fraction_str(c) for c in g] for g in self.generators],
            "q_values": [f"{fraction_str(v.value)} mod 2" for v in self.q_values],
            "bilinear": [[f"{fraction_str(v.value)} mod 1" for v in row] for row in self.gram_q],
        }


# ---------------------------------------------------------------------------

def gram_of_M_alpha(params: SublatticeParams) -> GramLattice:
    d, p, i, c = params.d, params.p, params.i_alpha, params.c_alpha
    return GramLattice([[-2 * d, -i, 0], [-i, 2 * c, p], [0, p, 0]])


def discriminant_form(L: GramLattice) -> DiscriminantForm:
    G = [list(r) for r in L.gram]
    if L.det == 0:
        raise DegenerateLattice("Gram matrix is singular")
    if not L.is_even:
        raise OddLattice("discriminant forms need an even lattice")
    snf = smith_normal_form(G)
    # G = left^-1 D right^-1, so L* = G^-1 Z^n = right D^-1 Z^n
    gens, factors = [], []
    for k, dk in enumerate(snf.diag):
        factors.append(dk)
        if dk > 1:
            gens.append(tuple(Fraction(snf.right[i][k], dk) for i in range(L.rank)))
    form = DiscriminantForm(tuple(factors), tuple(gens), (), (), L.gram)
    qv = tuple(form.q(g) for g in gens)
    bq = tuple(tuple(form.b(g, h) for h in gens) for g in gens)
    return DiscriminantForm(tuple(factors), tuple(gens), qv, bq, L.gram)


def theorem_disc_group(params: SublatticeParams) -> List[int]:
    """Closed-form discriminant group, as the list of cyclic orders in the theorem."""
    d, p, i, c = params.d, params.p, params.i_alpha, params.c_alpha
    if i == 0:
        if c % p == 0 or p == 2:
            return [2 * d, p, p]
        return [2 * d, p * p]
    if (1 + 4 * c * d) % p:
        return [2 * d * p * p]
    return [2 * d * p, p]


def invariant_factors_of(orders: Sequence[int]) -> List[int]:
    """Normalize a direct sum of cyclic groups to invariant factors d1 | d2 | ... (no 1s)."""
    primary: Dict[int, List[int]] = {}
    for o in orders:
        for q, e in factorint(o).items():
            primary.setdefault(q, []).append(q ** e)
    if not primary:
        return []
    width = max(len(v) for v in primary.values())
    out = [1] * width
    for q, powers in primary.items():
        powers.sort()
        for k, pw in enumerate(powers):
            out[width - len(powers) + k] *= pw
    return out


def _require_odd(p):
    if p == 2:
        raise UnsupportedPrime("p = 2 is not covered by the classification")


def classify(params: SublatticeParams) -> LatticeClassLabel:
    d, p, i, c = params.d, params.p, params.i_alpha, params.c_alpha
    _require_odd(p)
    if d % p:
        # -2dp^2 q(v) for the cyclic generator: p^2+4cd (i=0) or 1+4cd (i=1)
        disc = (p * p + 4 * c * d) if i == 0 else (1 + 4 * c * d)
        if (i == 0 and c % p == 0) or disc % p == 0:
            return LatticeClassLabel.NonCyclic
        if is_quadratic_residue(disc, p):
            return LatticeClassLabel.CyclicSquare
        return LatticeClassLabel.CyclicNonsquare
    if i == 1:
        return LatticeClassLabel.CyclicFull
    if c % p == 0:
        return LatticeClassLabel.NonCyclicPP
    if is_quadratic_residue(c, p):
        return LatticeClassLabel.NonCyclicResidue
    return LatticeClassLabel.NonCyclicNonresidue


def isomorphic(params1: SublatticeParams, params2: SublatticeParams) -> bool:
    if (params1.d, params1.p) != (params2.d, params2.p):
        raise MismatchedContext("isomorphism is only decided for a common (d, p)")
    return classify(params1) == classify(params2)


def count_lattices(d: int, p: int) -> Dict[LatticeClassLabel, int]:
    if not isprime(p):
        raise NotPrime(f"{p} is not prime")
    _require_odd(p)
    if d % p:
        return {
            LatticeClassLabel.CyclicSquare: p ** 10 * (p ** 10 + 1) // 2,
            LatticeClassLabel.CyclicNonsquare: p ** 10 * (p ** 10 - 1) // 2,
            LatticeClassLabel.NonCyclic: (p ** 20 - 1) // (p - 1),
        }
    return {
        LatticeClassLabel.NonCyclicResidue: p ** 9 * (p ** 10 - 1) // 2,
        LatticeClassLabel.NonCyclicNonresidue: p ** 9 * (p ** 10 - 1) // 2,
        LatticeClassLabel.NonCyclicPP: (p ** 9 + 1) * (p ** 10 - 1) // (p - 1),
        LatticeClassLabel.CyclicFull: p ** 20,
    }


def total_lattices(p: int) -> int:
    return (p ** 21 - 1) // (p - 1)


# ---------------------------------------------------------------------------
# Points on split quadrics over F_p

def quadric_count_closed(n: int, p: int, target: int) -> int:
    """Solutions of x1x2 + ... + x_{2n-1}x_{2n} = target over F_p."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    if target % p == 0:
        return p ** (n - 1) * (p ** n + p - 1)
    return p ** (n - 1) * (p ** n - 1)


def quadric_count_bruteforce(n: int, p: int, target: int, budget: Optional[int] = None) -> int:
    """Exhaustive count over F_p^{2n}; each tuple's value is computed explicitly."""
    budget = budget_points(10 ** 8, budget)
    if p ** (2 * n) > budget:
        raise BudgetExceeded(f"{p}^{2 * n} points exceed the enumeration budget {budget}")
    dtype = np.int16 if p < 128 else np.int64
    xs = np.arange(p, dtype=np.int64)
    pair = (xs[:, None] * xs[None, :] % p).ravel().astype(dtype)
    values = np.zeros(1, dtype=dtype)
    for _ in range(n):
        values = ((values[:, None] + pair[None, :]) % p).ravel()
    return int(np.count_nonzero(values == target % p))


# ---------------------------------------------------------------------------
# Sublattice enumeration

def _projective_functionals(n: int, p: int):
    """Nonzero vectors of F_p^n whose first nonzero entry is 1."""
    for k in range(n):
        for tail in itertools.product(range(p), repeat=n - k - 1):
            yield (0,) * k + (1,) + tail


def sublattice_basis(phi: Sequence[int], p: int) -> List[List[int]]:
    """HNF basis (rows) of the kernel of x -> phi . x mod p."""
    n = len(phi)
    k = next(j for j, v in enumerate(phi) if v % p)
    inv = pow(phi[k], -1, p)
    rows = []
    for j in range(n):
        row = [0] * n
        if j == k:
            row[k] = p
        else:
            row[j] = 1
            row[k] = (-phi[j] * inv) % p
        rows.append(row)
    return hermite_normal_form(rows)


def enumerate_index_p_sublattices(L: GramLattice, p: int, budget: Optional[int] = None,
                                  with_functionals: bool = False):
    """One Gram matrix per hyperplane of L/pL (i.e. per index-p sublattice)."""
    if not isprime(p):
        raise NotPrime(f"{p} is not prime")
    n = L.rank
    total = (p ** n - 1) // (p - 1)
    budget = budget_points(10 ** 6, budget)
    if total > budget:
        raise BudgetExceeded(f"{total} sublattices exceed the budget {budget}")
    G = L.as_lists()
    out = []
    for phi in _projective_functionals(n, p):
        B = sublattice_basis(phi, p)
        sub = GramLattice(matmul(matmul(B, G), transpose(B)))
        out.append((phi, sub) if with_functionals else sub)
    return out


def params_from_functional(d: int, p: int, phi: Sequence[int]) -> SublatticeParams:
    """Recover (i_alpha, c_alpha) for a functional on <-2d> + U in basis (v, e, f).

    alpha(zv + ae + bf) = z*i + <lambda, ae + bf> with lambda = phi_f e + phi_e f,
    so lambda^2 = 2 phi_e phi_f = -2c.  When i != 0 the functional is rescaled
    to i = 1, which rescales c by i^-2.
    """
    i, e, f = (x % p for x in phi)
    c = (-e * f) % p
    if i:
        c = c * pow(i * i, -1, p) % p
        return SublatticeParams(d, p, 1, c)
    return SublatticeParams(d, p, 0, c)


def small_rank_lattice(d: int) -> GramLattice:
    """<-2d> + U."""
    return GramLattice([[-2 * d, 0, 0], [0, 0, 1], [0, 1, 0]])


def census(d: int, p: int):
    """Enumerate index-p sublattices of <-2d> + U and compare with the theorem.

    Returns a list of records (functional, params, SNF group, predicted group).
    """
    rows = []
    for phi, sub in enumerate_index_p_sublattices(small_rank_lattice(d), p, with_functionals=True):
        params = params_from_functional(d, p, phi)
        got = discriminant_form(sub).orders
        want = invariant_factors_of(theorem_disc_group(params))
        rows.append({"functional": list(phi), "i_alpha": params.i_alpha,
                     "c_alpha": params.c_alpha, "group": got, "predicted": want,
                     "agrees": got == want})
    return rows


# ---------------------------------------------------------------------------
# Brute-force isometry of discriminant forms (cross-check for `classify`)

def _group_elements(form: DiscriminantForm):
    for combo in itertools.product(*[range(o) for o in form.orders]):
        yield combo, tuple(sum(c * g[i] for c, g in zip(combo, form.generators))
                           for i in range(len(form.gram)))


def forms_isometric(A: DiscriminantForm, B: DiscriminantForm, limit: int = 5 * 10 ** 5) -> bool:
    """Decide isometry of two small discriminant forms by backtracking.

    A homomorphism sends each generator of A to an element of B of order
    dividing the generator's order; q on generators and b on pairs determine q
    everywhere, and bijectivity is checked by counting the image.
    """
    if A.orders != B.orders:
        return False
    elems = list(_group_elements(B))
    if len(elems) > limit:
        raise BudgetExceeded("discriminant group too large for brute-force isometry")
    gens = A.generators
    cand = []
    for k, g in enumerate(gens):
        o = A.orders[k]
        cand.append([(c, x) for c, x in elems
                     if B.element_order(x) == o and B.q(x) == A.q_values[k]])

    def image_size(images):
        seen = set()
        for combo in itertools.product(*[range(o) for o in A.orders]):
            v = tuple(sum(c * img[0][j] for c, img in zip(combo, images)) % o
                      for j, o in enumerate(B.orders))
            seen.add(v)
        return len(seen)

    def rec(k, chosen):
        if k == len(gens):
            return image_size(chosen) == A.order
        for c, x in cand[k]:
            if all(B.b(x, y[1]) == A.gram_q[k][j] for j, y in enumerate(chosen)):
                if rec(k + 1, chosen + [(c, x)]):
                    return True
        return False

    return rec(0, [])


# ---------------------------------------------------------------------------
# Special cubic fourfolds

class FourfoldAssociation(str, enum.Enum):
    ExistsUnique = "ExistsUnique"
    Exists = "Exists"
    NONE = "None"


def cubic_fourfold_association(d: int, p: int) -> Tuple[FourfoldAssociation, str]:
    if d < 1:
        raise PreconditionError("d must be >= 1")
    if not isprime(p):
        raise NotPrime(f"{p} is not prime")
    if p == 3:
        if gcd(6, d) != 1:
            return FourfoldAssociation.NONE, f"gcd(6, {d}) = {gcd(6, d)} != 1"
        bad = [q for q in factorint(d) if q % 3 != 1]
        if bad:
            return FourfoldAssociation.NONE, f"prime divisor(s) {bad} of d are not 1 mod 3"
        return FourfoldAssociation.Exists, (
            "gcd(6, d) = 1 and every prime divisor of d is 1 mod 3; "
            f"discriminant D = {18 * d}")
    if p > 3 and d == 1:
        return FourfoldAssociation.ExistsUnique, (
            f"d = 1, p = {p} > 3: unique class, discriminant D = {2 * p * p}")
    D = 2 * d * p * p
    if D % 6 not in (0, 2):
        return FourfoldAssociation.NONE, (
            f"C_D is empty: D = 2dp^2 = {D} is not 0 or 2 mod 6")
    return FourfoldAssociation.NONE, "outside the cases d = 1, p > 3 and p = 3"
