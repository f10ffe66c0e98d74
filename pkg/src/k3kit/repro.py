"""Reproduction runs for the acceptance criteria (used by ``k3kit repro``).

Each check returns a ``CheckResult``.  The reference values below are fixed
golden constants; everything else is recomputed from scratch.  Long-running
variants (direct point counts for n = 7..10) only run with ``full=True``; the
default run uses the Galois-orbit counter for those n, which is itself
cross-checked against the direct loop for n <= 6.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional

from .arith import poly_mul

REFERENCE_MINORS = [
    "-6x+8z",
    "-157x^2-46xy+12xz-y^2+68yz+252z^2",
    "-512x^3-3884x^2y-1790x^2z-1094xy^2-48xyz+370xz^2-24y^3+1618y^2z+6580yz^2+1984z^3",
    "-14896x^4-112256x^3y-64196x^3z-13639x^2y^2-88686x^2yz-31415x^2z^2+1230xy^3+28380xy^2z"
    "+190454xyz^2+66580xz^3-1967y^4-14274y^3z+12573y^2z^2+148652yz^3+46212z^4",
    "-154622x^5-1832494x^4y-1088428x^4z-3261270x^3y^2-6264622x^3yz-2086758x^3z^2-353890x^2y^3"
    "-2306720x^2y^2z-992652x^2yz^2-124086x^2z^3+2698xy^4+587200xy^3z+6271452xy^2z^2+9184426xyz^3"
    "+2279020xz^4-51948y^5-439790y^4z-82534y^3z^2+4374124y^2z^3+5413502yz^4+1214952z^5",
]

# degree-20 cofactor of the normalized polynomial, highest degree first
REFERENCE_F3_COFACTOR = [3, 1, 2, 1, 3, 1, 2, -1, -1, -1, 0, -1, -1, -1, 2, 1, 3, 1, 2, 1, 3]


def reference_f3() -> List[Fraction]:
    """(1/3)(t-1)^2 * cofactor, ascending coefficients."""
    g = poly_mul([1, -2, 1], list(reversed(REFERENCE_F3_COFACTOR)))
    return [Fraction(c, 3) for c in g]


REFERENCE_COUNTS_TABLE = {  # p = 3, d = 1
    "NonCyclic": 1743392200,
    "CyclicSquare": 1743421725,
    "CyclicNonsquare": 1743362676,
}


@dataclass
class CheckResult:
    number: int
    title: str
    ok: bool
    seconds: float
    detail: dict = field(default_factory=dict)
    gated: bool = False

    def line(self) -> str:
        tag = "SKIP" if self.gated else ("PASS" if self.ok else "FAIL")
        return f"[{tag}] criterion {self.number}: {self.title} ({self.seconds:.2f}s)"

    def to_json(self):
        return {"criterion": self.number, "title": self.title,
                "status": "SKIP" if self.gated else ("PASS" if self.ok else "FAIL"),
                "seconds": round(self.seconds, 3), "detail": self.detail}


def _timed(number: int, title: str, fn: Callable[[], dict]) -> CheckResult:
    t0 = time.perf_counter()
    try:
        detail = fn()
        ok = bool(detail.pop("ok"))
    except Exception as exc:  # a crash is a failed criterion, reported as such
        ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
    return CheckResult(number, title, ok, time.perf_counter() - t0, detail)


# -- individual criteria -----------------------------------------------------

def check_minors() -> dict:
    from .clifford import TriPoly, leading_principal_minors
    from .k3zeta import paper_pencil
    minors = leading_principal_minors(paper_pencil().matrix())
    want = [TriPoly.parse(s) for s in REFERENCE_MINORS]
    matches = [m == w for m, w in zip(minors, want)]
    return {"ok": all(matches), "matches": matches, "m5_monomials": len(minors[4].terms)}


def check_f3(full: bool = False, threads: Optional[int] = None, state: Optional[dict] = None) -> dict:
    from .k3zeta import count_points, count_points_naive, paper_pencil, zeta_from_counts
    P = paper_pencil()
    counts, naive_ok, orbit_ok = [], True, True
    for n in range(1, 11):
        direct = n <= 6 or full
        N = count_points(P, 3, n, threads=threads, orbits=not direct)
        if n <= 6:
            naive_ok &= N == count_points_naive(P, 3, n)
            orbit_ok &= N == count_points(P, 3, n, threads=threads, orbits=True)
        counts.append(N)
    report = zeta_from_counts(counts, 3, [(3, 2)])
    exact = report.normalized == reference_f3()
    if state is not None:
        state["report"] = report
    return {"ok": exact and naive_ok and orbit_ok, "counts": [str(c) for c in counts],
            "naive_cross_check": naive_ok, "orbit_cross_check": orbit_ok,
            "mode": "direct" if full else "direct n<=6, orbit n>=7", "exact_match": exact}


def check_picard(state: dict) -> dict:
    from .k3zeta import count_cyclotomic_roots
    report = state.get("report")
    if report is None:
        return {"ok": False, "error": "criterion 2 produced no polynomial"}
    bound = count_cyclotomic_roots(report.normalized)
    return {"ok": bound == 2, "picard_bound": bound}


def check_tritangents() -> dict:
    from .k3zeta import paper_pencil, tritangent_search
    P = paper_pencil()
    r3 = tritangent_search(P, 3, 1)
    r5 = tritangent_search(P, 5, 1)
    has = (1, 0, 2) in r3.line_set()
    return {"ok": has and not r5.lines and not r5.contained,
            "F3_lines": sorted(r3.line_set()), "F5_lines": sorted(r5.line_set())}


def check_real_invariants() -> dict:
    from .brauer_manin import HALF, ZERO, minus_det, real_invariant
    from .k3zeta import paper_pencil
    P = paper_pencil()
    on_surface = minus_det(P, (1, 2, -1)) == 924 ** 2
    i1, i2 = real_invariant(P, (1, 2, -1)), real_invariant(P, (0, -1, 1))
    return {"ok": on_surface and i1 == ZERO and i2 == HALF,
            "inv_P1": str(i1), "inv_P2": str(i2), "P1_on_surface": on_surface}


def check_certificate() -> dict:
    from .brauer_manin import HALF, ZERO, wa_failure_certificate
    from .k3zeta import paper_pencil
    cert = wa_failure_certificate(paper_pencil(), (1, 2, -1, 924), (0, -1, 1))
    return {"ok": cert.total == HALF and cert.reciprocity_total == ZERO,
            "total": str(cert.total), "reciprocity": str(cert.reciprocity_total)}


def check_lattice_theorem() -> dict:
    from .lattice import (SublatticeParams, discriminant_form, gram_of_M_alpha,
                          invariant_factors_of, theorem_disc_group)
    cases = mismatches = qchecks = qbad = 0
    for p in (3, 5, 7):
        for d in range(1, 11):
            for i in (0, 1):
                for c in range(p):
                    params = SublatticeParams(d, p, i, c)
                    form = discriminant_form(gram_of_M_alpha(params))
                    cases += 1
                    if form.orders != invariant_factors_of(theorem_disc_group(params)):
                        mismatches += 1
                    if i == 1 and (1 + 4 * c * d) % p:
                        N = 2 * d * p * p
                        v4 = (Fraction(p, N), Fraction(-2 * d * p, N), Fraction(1 + 4 * c * d, N))
                        qchecks += 1
                        G = form.gram
                        in_dual = all(sum(G[r][s] * v4[s] for s in range(3)).denominator == 1 for r in range(3))
                        ok = in_dual and form.element_order(v4) == form.order
                        ok = ok and form.q(v4) == Fraction(-(1 + 4 * c * d), N)
                        qbad += not ok
    return {"ok": mismatches == 0 and qbad == 0, "cases": cases, "mismatches": mismatches,
            "q_checks": qchecks, "q_failures": qbad}


def check_counting() -> dict:
    from .lattice import count_lattices, quadric_count_bruteforce, quadric_count_closed
    bad_totals = []
    for p in (3, 5, 7, 11):
        for d in range(1, 13):
            if sum(count_lattices(d, p).values()) != (p ** 21 - 1) // (p - 1):
                bad_totals.append((d, p))
    bad_quadric, checked = [], 0
    for p in (3, 5, 7, 11, 13):
        n = 1
        while p ** (2 * n) <= 10 ** 6:
            for target in (0, 1, 2 % p, p - 1):
                checked += 1
                if quadric_count_closed(n, p, target) != quadric_count_bruteforce(n, p, target):
                    bad_quadric.append((n, p, target))
            n += 1
    table = {k.value if hasattr(k, "value") else k: v for k, v in count_lattices(1, 3).items()}
    table_ok = all(table.get(k) == v for k, v in REFERENCE_COUNTS_TABLE.items())
    return {"ok": not bad_totals and not bad_quadric and table_ok, "total_failures": bad_totals,
            "quadric_checks": checked, "quadric_failures": bad_quadric, "table_p3_d1": table_ok}


def check_clifford(seed: int = 0) -> dict:
    from .clifford import (QuaternionSymbol, BrauerRep, brauer_equal, clifford_class_rank6,
                           clifford_lemma_rules, even_clifford_from_minors, reciprocity_sum)
    rng = random.Random(seed)
    vals = [1, -1, 2, -2, 3, -3, 5, -5]
    rule_fail = 0
    for _ in range(200):
        q1 = [rng.choice(vals) for _ in range(rng.choice((2, 4, 6)))]
        q2 = [rng.choice(vals) for _ in range(rng.choice((2, 4)))]
        a = rng.choice(vals)
        rules = clifford_lemma_rules(q1, q2, a)
        rule_fail += not all(brauer_equal(l, r) for l, r in rules.values())
    recip_fail = 0
    for _ in range(500):
        a = Fraction(rng.choice((-1, 1)) * rng.randint(1, 500), rng.randint(1, 50))
        b = Fraction(rng.choice((-1, 1)) * rng.randint(1, 500), rng.randint(1, 50))
        recip_fail += reciprocity_sum(BrauerRep((QuaternionSymbol(a, b),))) != 0
    rep_fail = 0
    for _ in range(100):
        diag = [Fraction(rng.choice((-1, 1)) * rng.randint(1, 40), rng.randint(1, 9)) for _ in range(6)]
        D = [[diag[r] if r == c else Fraction(0) for c in range(6)] for r in range(6)]
        rep_fail += not brauer_equal(clifford_class_rank6(diag), even_clifford_from_minors(D))
    return {"ok": rule_fail == 0 and recip_fail == 0 and rep_fail == 0,
            "rule_failures": rule_fail, "reciprocity_failures": recip_fail,
            "representative_failures": rep_fail}


def check_census() -> dict:
    from .lattice import census
    rows = disagreements = 0
    for p in (3, 5):
        for d in range(1, 7):
            for r in census(d, p):
                rows += 1
                disagreements += not r["agrees"]
    return {"ok": disagreements == 0 and rows > 0, "sublattices": rows, "disagreements": disagreements}


def check_fourfolds() -> dict:
    from .lattice import FourfoldAssociation, cubic_fourfold_association
    got = {k: cubic_fourfold_association(*k)[0] for k in ((1, 5), (7, 3), (2, 3))}
    want = {(1, 5): FourfoldAssociation.ExistsUnique, (7, 3): FourfoldAssociation.Exists,
            (2, 3): FourfoldAssociation.NONE}
    return {"ok": got == want, "results": {f"d={d},p={p}": v.value for (d, p), v in got.items()}}


def run_all(full: bool = False, threads: Optional[int] = None) -> List[CheckResult]:
    state: Dict = {}
    plan = [
        (1, "leading principal minors match the reference", check_minors),
        (2, "Frobenius polynomial f_3 reconstructed exactly", lambda: check_f3(full, threads, state)),
        (3, "Picard bound equals 2", lambda: check_picard(state)),
        (4, "tritangent lines over F_3 and F_5", check_tritangents),
        (5, "real invariants at P1 and P2", check_real_invariants),
        (6, "weak-approximation certificate", check_certificate),
        (7, "discriminant groups of M_alpha", check_lattice_theorem),
        (8, "lattice and quadric counting identities", check_counting),
        (9, "Clifford / Hilbert symbol properties", check_clifford),
        (10, "rank-3 sublattice census", check_census),
        (11, "cubic fourfold association", check_fourfolds),
    ]
    return [_timed(n, title, fn) for n, title, fn in plan]
