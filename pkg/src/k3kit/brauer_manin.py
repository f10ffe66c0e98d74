"""Evaluating the 2-torsion Brauer class at real and rational points.

At a base point (x0, y0, z0) with all leading minors m1..m5 nonzero the class
specializes to the biquaternion algebra

    (-m2, -m1 m3) (x) (m4, -m3 m5)

over Q, whose local invariants are sums of Hilbert symbols.  At the real place
the invariant only depends on the signature of M(x0, y0, z0): it is 0 for
signature (3, 3) and 1/2 for (1, 5) or (5, 1).

An adelic point whose invariants do not sum to 0 lies outside S(A)^alpha; if
S(Q) is nonempty this certifies failure of weak approximation.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .arith import QmodZ, det_exact, legendre
from .clifford import (Place, RealPlace, hilbert_symbol, relevant_places, signature_exact,
                       symbols_from_minors, bareiss_minors, laplace_minors)
from .config import budget_points
from .errors import (BudgetExhausted, CertificateFailed, NotOnSurface, OnDiscriminant,
                     PreconditionError, RepresentativeUndefined, SingularMinor)
from .k3zeta import K3Pencil

HALF = QmodZ(Fraction(1, 2))
CLASS_SYMBOLS = [["-m2", "-m1*m3"], ["m4", "-m3*m5"]]
ZERO = QmodZ(0)


def _triple(point) -> Tuple[Fraction, Fraction, Fraction]:
    x, y, z = (Fraction(v) for v in point)
    if x == y == z == 0:
        raise PreconditionError("(0, 0, 0) is not a point of P^2")
    return x, y, z


def minus_det(pencil: K3Pencil, point) -> Fraction:
    return -det_exact(pencil.at(point))


@dataclass(frozen=True)
class SurfaceRealPoint:
    """A real point of S over a rational base point; w = sqrt(w_squared)."""

    x0: Fraction
    y0: Fraction
    z0: Fraction
    w_squared: Fraction

    @classmethod
    def over(cls, pencil: K3Pencil, point) -> "SurfaceRealPoint":
        x, y, z = _triple(point)
        w2 = minus_det(pencil, (x, y, z))
        if w2 < 0:
            raise NotOnSurface(f"-det M{(str(x), str(y), str(z))} = {w2} < 0: no real point above")
        return cls(x, y, z, w2)

    @property
    def base(self):
        return (self.x0, self.y0, self.z0)

    def to_json(self):
        return {"base": [str(c) for c in self.base], "w_squared": str(self.w_squared)}


@dataclass(frozen=True)
class SurfaceRationalPoint:
    x0: Fraction
    y0: Fraction
    z0: Fraction
    w0: Fraction

    @classmethod
    def on(cls, pencil: K3Pencil, coords) -> "SurfaceRationalPoint":
        if len(coords) != 4:
            raise PreconditionError("a point of S needs four coordinates x, y, z, w")
        x, y, z = _triple(coords[:3])
        w = Fraction(coords[3])
        w2 = minus_det(pencil, (x, y, z))
        if w * w != w2:
            raise NotOnSurface(f"w^2 = {w * w} but -det M(x,y,z) = {w2}")
        return cls(x, y, z, w)

    @property
    def base(self):
        return (self.x0, self.y0, self.z0)

    def to_json(self):
        return {"coords": [str(c) for c in (self.x0, self.y0, self.z0, self.w0)]}


AnyPoint = Union[SurfaceRealPoint, SurfaceRationalPoint]


@lru_cache(maxsize=16)
def pencil_minors(pencil: K3Pencil):
    """m1..m6 of x M1 + y M2 + z M3 as TriPolys."""
    M = pencil.matrix()
    try:
        return bareiss_minors(M)
    except SingularMinor:
        return laplace_minors(M)


def minors_at(pencil: K3Pencil, point) -> List[Fraction]:
    x, y, z = _triple(point)
    return [m.evaluate((x, y, z)) for m in pencil_minors(pencil)]


def specialized_class(pencil: K3Pencil, point):
    """The biquaternion representative at a base point (rational entries)."""
    m = minors_at(pencil, point)
    for i, v in enumerate(m[:5]):
        if v == 0:
            raise RepresentativeUndefined(f"m{i + 1} vanishes at {tuple(str(c) for c in _triple(point))}")
    return symbols_from_minors(m)


def real_invariant(pencil: K3Pencil, point) -> QmodZ:
    """inv_inf from the signature of M(x0, y0, z0)."""
    base = point.base if isinstance(point, (SurfaceRealPoint, SurfaceRationalPoint)) else _triple(point)
    M = pencil.at(base)
    if det_exact(M) == 0:
        raise OnDiscriminant(f"det M vanishes at {tuple(str(c) for c in base)}")
    sig = signature_exact(M)
    if sig == (3, 3):
        return ZERO
    if sig in ((1, 5), (5, 1)):
        return HALF
    raise NotOnSurface(f"signature {sig}: det M > 0, so S has no real point above this base point")


def rational_point_invariant(pencil: K3Pencil, point, v: Place) -> QmodZ:
    """(-m2, -m1 m3)_v + (m4, -m3 m5)_v at the base point."""
    base = point.base if isinstance(point, (SurfaceRealPoint, SurfaceRationalPoint)) else _triple(point)
    rep = specialized_class(pencil, base)
    total = ZERO
    for s in rep.symbols:
        total = total + hilbert_symbol(s.a, s.b, v)
    return total


def _is_square_in_Qp(a: Fraction, p: int) -> bool:
    a = Fraction(a)
    if a == 0:
        return True
    n = a.numerator * a.denominator
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    if k % 2:
        return False
    if p == 2:
        return n % 8 == 1
    return legendre(n % p, p) == 1


def _check_local_point(point: AnyPoint, v: Place):
    if isinstance(point, SurfaceRealPoint) and not v.is_real:
        if not _is_square_in_Qp(point.w_squared, v.p):
            raise NotOnSurface(f"w^2 = {point.w_squared} is not a square in Q_{v.p}")


def support_places(pencil: K3Pencil, points: Sequence) -> List[Place]:
    """{inf, 2} and primes dividing any symbol entry at the given points."""
    values = []
    for pt in points:
        rep = specialized_class(pencil, pt.base)
        values.extend(rep.entries())
    return relevant_places(values)


def _coerce_place(key) -> Place:
    return key if isinstance(key, Place) else Place.parse(key)


def adelic_sum(pencil: K3Pencil, assignment: Mapping, base: AnyPoint,
               detail: bool = False):
    """Sum of local invariants of the adelic point (assignment[v], else base).

    Places outside the support set contribute 0 for every point involved.
    """
    assigned = {_coerce_place(k): pt for k, pt in assignment.items()}
    points = [base] + list(assigned.values())
    per_place: Dict[Place, QmodZ] = {}
    for v in sorted(set(support_places(pencil, points)) | set(assigned), key=lambda pl: (pl.p or 0)):
        pt = assigned.get(v, base)
        _check_local_point(pt, v)
        per_place[v] = rational_point_invariant(pencil, pt, v)
    total = ZERO
    for val in per_place.values():
        total = total + val
    return (total, per_place) if detail else total


# ---------------------------------------------------------------------------
# Searches for real points
# ---------------------------------------------------------------------------

def _signature_if_real(pencil, point):
    M = pencil.at(point)
    d = det_exact(M)
    if d >= 0:
        return None
    return signature_exact(M)


def _direction_parameters(k: int = 64) -> List[Fraction]:
    """t = tan(theta/2) for theta on a half circle, as small rationals."""
    out = []
    for i in range(1, k + 1):
        theta = math.pi * i / (k + 1)
        out.append(Fraction(math.tan(theta / 2)).limit_denominator(64))
    return out


def _sample_points(rng: random.Random, count: int, box: int = 4):
    pts = []
    for x in range(-1, 2):
        for y in range(-1, 2):
            for z in range(-1, 2):
                if (x, y, z) != (0, 0, 0):
                    pts.append((x, y, z))
    while len(pts) < count:
        p = tuple(rng.randint(-box, box) for _ in range(3))
        if p != (0, 0, 0):
            pts.append(p)
    return pts


def find_zero_invariant_real_point(pencil: K3Pencil, budget: Optional[int] = None,
                                   seed: int = 0) -> SurfaceRealPoint:
    """A base point with det M < 0 and signature (3, 3).

    Sample points are checked directly first; then, for each point Q of
    signature (1, 5) or (5, 1), walk the half great circle from Q to -Q through
    a second point R ((1 - t^2) Q + 2t R) and stop at the first (3, 3) point.
    """
    budget = budget_points(64, budget)
    rng = random.Random(seed)
    samples = _sample_points(rng, 2 * budget)
    odd = []
    for pt in samples:
        sig = _signature_if_real(pencil, pt)
        if sig == (3, 3):
            return SurfaceRealPoint.over(pencil, pt)
        if sig in ((1, 5), (5, 1)):
            odd.append(pt)
    ts = _direction_parameters(64)
    lines = 0
    for Q in odd:
        for R in samples:
            if lines >= budget:
                break
            if R == Q or all(a == -b for a, b in zip(R, Q)):
                continue
            lines += 1
            for t in ts:
                pt = tuple((1 - t * t) * q + 2 * t * r for q, r in zip(Q, R))
                if all(c == 0 for c in pt):
                    continue
                if _signature_if_real(pencil, pt) == (3, 3):
                    return SurfaceRealPoint.over(pencil, _primitive(pt))
        if lines >= budget:
            break
    raise BudgetExhausted(f"no signature-(3,3) real point found after {lines} lines")


def find_half_invariant_real_point(pencil: K3Pencil, budget: Optional[int] = None,
                                   seed: int = 0) -> SurfaceRealPoint:
    """A base point with det M < 0 and signature (1, 5) or (5, 1) (grid search)."""
    budget = budget_points(512, budget)
    for pt in _sample_points(random.Random(seed), budget):
        if _signature_if_real(pencil, pt) in ((1, 5), (5, 1)):
            return SurfaceRealPoint.over(pencil, pt)
    raise BudgetExhausted(f"no signature-(1,5)/(5,1) real point among {budget} samples")


def find_rational_point(pencil: K3Pencil, box: int = 3) -> SurfaceRationalPoint:
    """Small-height search for a rational point: -det M(x,y,z) a perfect square."""
    for h in range(1, box + 1):
        for x in range(-h, h + 1):
            for y in range(-h, h + 1):
                for z in range(-h, h + 1):
                    if max(abs(x), abs(y), abs(z)) != h:
                        continue
                    w2 = minus_det(pencil, (x, y, z))
                    if w2 < 0:
                        continue
                    w = math.isqrt(int(w2))
                    if w * w == w2:
                        return SurfaceRationalPoint(Fraction(x), Fraction(y), Fraction(z), Fraction(w))
    raise BudgetExhausted(f"no rational point of height <= {box}")


def _primitive(pt):
    fr = [Fraction(c) for c in pt]
    den = 1
    for c in fr:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in fr]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    return tuple(Fraction(c // g) for c in ints)


# ---------------------------------------------------------------------------
# The certificate
# ---------------------------------------------------------------------------

@dataclass
class InvariantCertificate:
    symbols: List[List[str]]
    minors: Dict[str, str]
    P1: SurfaceRationalPoint
    P2: SurfaceRealPoint
    inv_inf_P1: QmodZ
    inv_inf_P2: QmodZ
    all_P1: Dict[Place, QmodZ]
    mixed: Dict[Place, QmodZ]
    reciprocity_total: QmodZ
    total: QmodZ
    components: Dict[str, bool] = field(default_factory=dict)

    def to_json(self):
        def table(d):
            return {str(v): str(val.value) for v, val in d.items()}
        return {
            "class": {"symbols": self.symbols, "minors": self.minors},
            "P1": self.P1.to_json(),
            "P2": self.P2.to_json(),
            "inv_inf": {"P1": str(self.inv_inf_P1.value), "P2": str(self.inv_inf_P2.value)},
            "invariants_all_P1": table(self.all_P1),
            "reciprocity_total": str(self.reciprocity_total.value),
            "invariants_mixed": table(self.mixed),
            "total": str(self.total.value),
            "components": self.components,
        }


def wa_failure_certificate(pencil: K3Pencil, P1=None, P2=None) -> InvariantCertificate:
    """(a) P1 in S(Q); (b) inv_inf(P1) = 0; (c) a real point P2 with inv_inf = 1/2;
    (d) the adelic point (P2 at inf, P1 elsewhere) has invariant sum 1/2.
    """
    # (a)
    try:
        if P1 is None:
            P1 = find_rational_point(pencil)
        elif not isinstance(P1, SurfaceRationalPoint):
            P1 = SurfaceRationalPoint.on(pencil, P1)
        elif P1.w0 ** 2 != minus_det(pencil, P1.base):
            raise NotOnSurface("P1 does not satisfy the surface equation")
    except (NotOnSurface, BudgetExhausted, PreconditionError) as exc:
        raise CertificateFailed("a", str(exc)) from exc
    # (b)
    try:
        inv1 = real_invariant(pencil, P1)
        inv1_hilbert = rational_point_invariant(pencil, P1, RealPlace)
    except PreconditionError as exc:
        raise CertificateFailed("b", str(exc)) from exc
    if inv1 != ZERO or inv1_hilbert != inv1:
        raise CertificateFailed("b", f"inv_inf(P1) = {inv1} (Hilbert route {inv1_hilbert}), expected 0")
    # (c)
    try:
        if P2 is None:
            P2 = find_half_invariant_real_point(pencil)
        elif not isinstance(P2, SurfaceRealPoint):
            P2 = SurfaceRealPoint.over(pencil, P2[:3])
        inv2 = real_invariant(pencil, P2)
    except (PreconditionError, BudgetExhausted) as exc:
        raise CertificateFailed("c", str(exc)) from exc
    if inv2 != HALF:
        raise CertificateFailed("c", f"inv_inf(P2) = {inv2}, expected 1/2")
    # (d)
    try:
        inv2_hilbert = rational_point_invariant(pencil, P2, RealPlace)
        if inv2_hilbert != inv2:
            raise CertificateFailed("d", "Hilbert-symbol and signature routes disagree at P2")
        recip, all_p1 = adelic_sum(pencil, {}, P1, detail=True)
        total, mixed = adelic_sum(pencil, {RealPlace: P2}, P1, detail=True)
    except (PreconditionError, BudgetExhausted) as exc:
        if isinstance(exc, CertificateFailed):
            raise
        raise CertificateFailed("d", str(exc)) from exc
    if recip != ZERO:
        raise CertificateFailed("d", f"reciprocity sum for P1 is {recip}, expected 0")
    if total != HALF:
        raise CertificateFailed("d", f"mixed adelic sum is {total}, expected 1/2")
    minors = {f"m{i + 1}": str(m) for i, m in enumerate(pencil_minors(pencil)[:5])}
    return InvariantCertificate(CLASS_SYMBOLS, minors, P1, P2, inv1, inv2, all_p1, mixed, recip, total,
                                {"a": True, "b": True, "c": True, "d": True})
