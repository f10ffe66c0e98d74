import random
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from k3kit.arith import QmodZ, det_exact, identity, matmul, transpose
from k3kit.clifford import (BaseField, BrauerRep, FinitePrime, Place, QuaternionSymbol, RealPlace, TriPoly,
                            bareiss_minors, brauer_equal, brauer_invariant, charpoly, clifford_class_rank6,
                            clifford_invariant, clifford_lemma_rules, even_clifford_from_minors,
                            hilbert_symbol, laplace_minors, leading_principal_minors, pencil_matrix,
                            reciprocity_sum, relevant_places, signature_exact, signed_discriminant,
                            symbols_from_minors, symmetric_diagonalize)
from k3kit.errors import DegenerateMatrix, SingularMinor, ZeroEntry, ZeroInput
from k3kit.k3zeta import paper_pencil
from k3kit.repro import REFERENCE_MINORS

HALF = QmodZ(Fraction(1, 2))
X, Y, Z = sympy.symbols("x y z")

nonzero_rat = st.builds(Fraction, st.integers(-60, 60).filter(bool), st.integers(1, 30))


def tripoly_to_sympy(t: TriPoly):
    return sum(sympy.Rational(c.numerator, c.denominator) * X ** i * Y ** j * Z ** k
               for (i, j, k), c in t.terms.items())


def random_symmetric(rng, n=6, lo=-9, hi=9):
    A = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            A[i][j] = A[j][i] = Fraction(rng.randint(lo, hi), rng.randint(1, 4))
    return A


# --- TriPoly -------------------------------------------------------------------------

def test_tripoly_parse_and_print():
    t = TriPoly.parse("−157x² − 46xy + 12xz − y² + 68yz + 252z²")
    assert str(t) == "-157x^2 - 46xy + 12xz - y^2 + 68yz + 252z^2"
    assert TriPoly.parse(str(t)) == t


@settings(max_examples=50)
@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)),
                       st.integers(-20, 20), max_size=6),
       st.tuples(nonzero_rat, nonzero_rat, nonzero_rat))
def test_tripoly_ring_homomorphism(terms, pt):
    f = TriPoly(terms)
    g = TriPoly.linear(1, -2, 3) * f + TriPoly.const(5)
    assert (f * g).evaluate(pt) == f.evaluate(pt) * g.evaluate(pt)
    assert (f + g).evaluate(pt) == f.evaluate(pt) + g.evaluate(pt)
    if not f.is_zero():
        assert (f * g).exact_div(f) == g


# --- minors ----------------------------------------------------------------------------

def test_identity_minors():
    assert leading_principal_minors(identity(6)) == [1] * 6


def test_shipped_minors_golden():
    M = paper_pencil().matrix()
    minors = leading_principal_minors(M)
    assert str(minors[0]) == "-6x + 8z"
    assert str(minors[1]) == "-157x^2 - 46xy + 12xz - y^2 + 68yz + 252z^2"
    for got, want in zip(minors, REFERENCE_MINORS):
        assert got == TriPoly.parse(want)
    assert len(minors[4].terms) == 21


def test_shipped_minors_match_sympy_determinants():
    P = paper_pencil()
    S = sympy.Matrix(6, 6, lambda i, j: X * P.M1[i][j] + Y * P.M2[i][j] + Z * P.M3[i][j])
    minors = leading_principal_minors(P.matrix())
    for k in range(1, 7):
        want = sympy.expand(S[:k, :k].det(method="berkowitz"))
        assert sympy.expand(tripoly_to_sympy(minors[k - 1]) - want) == 0


def test_bareiss_and_laplace_agree_on_pencil():
    M = paper_pencil().matrix()
    assert bareiss_minors(M) == laplace_minors(M)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_minors_match_sympy_rational(seed):
    rng = random.Random(seed)
    A = random_symmetric(rng, 5)
    S = sympy.Matrix(A)
    want = [S[:k, :k].det() for k in range(1, 6)]
    assert laplace_minors(A) == want
    assert leading_principal_minors(A) == want


def test_singular_minor_fallback_and_error():
    A = [[0, 1], [1, 0]]
    assert leading_principal_minors(A) == [0, -1]
    with pytest.raises(SingularMinor) as info:
        bareiss_minors(A)
    assert info.value.index == 1


# --- diagonalization --------------------------------------------------------------------

def test_diagonalize_example():
    M = [[Fraction(int(i == j)) for j in range(6)] for i in range(6)]
    M[0][0], M[0][1], M[1][0], M[1][1] = 2, 1, 1, 3
    assert symmetric_diagonalize(M)[:2] == [2, Fraction(5, 2)]


def test_diagonalize_diagonal_input():
    d = [3, -1, Fraction(1, 2), 7, -5, 2]
    D = [[d[i] if i == j else 0 for j in range(6)] for i in range(6)]
    assert symmetric_diagonalize(D) == d


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_diagonalize_congruence_and_minors(seed):
    rng = random.Random(seed)
    A = random_symmetric(rng)
    minors = leading_principal_minors(A)
    if any(m == 0 for m in minors):
        with pytest.raises(SingularMinor):
            symmetric_diagonalize(A)
        return
    diag, T = symmetric_diagonalize(A, with_transform=True)
    acc = Fraction(1)
    for a, m in zip(diag, minors):
        acc *= a
        assert acc == m
    D = matmul(matmul(transpose(T), A), T)
    assert all(D[i][j] == (diag[i] if i == j else 0) for i in range(6) for j in range(6))
    assert det_exact(T) != 0


def test_diagonalize_pencil_returns_minor_ratios():
    M = paper_pencil().matrix()
    pairs = symmetric_diagonalize(M)
    minors = leading_principal_minors(M)
    assert [num for num, _ in pairs] == minors
    assert pairs[0][1] == TriPoly.const(1)


# --- Clifford representatives -----------------------------------------------------------

def test_rank6_examples():
    r = clifford_class_rank6([1] * 6)
    assert [(s.a, s.b) for s in r.symbols] == [(-1, -1), (1, 1)]
    r = clifford_class_rank6([1, -1, 1, -1, 1, -1])
    # the formula gives (1, -1) (x) (1, -1); both factors are split, as is (1,-1) (x) (-1,1)
    assert [(s.a, s.b) for s in r.symbols] == [(1, -1), (1, -1)]
    other = BrauerRep((QuaternionSymbol(1, -1), QuaternionSymbol(-1, 1)))
    assert brauer_equal(r, other) and brauer_equal(r, BrauerRep.trivial())


def test_rank6_zero_entry():
    with pytest.raises(ZeroEntry):
        clifford_class_rank6([1, 0, 1, 1, 1, 1])


def test_identity_even_clifford():
    r = even_clifford_from_minors(identity(6))
    assert [(s.a, s.b) for s in r.symbols] == [(-1, -1), (1, -1)]


def test_pencil_even_clifford_shape():
    M = paper_pencil().matrix()
    m = leading_principal_minors(M)
    r = even_clifford_from_minors(M)
    assert r.base is BaseField.FunctionFieldOfS
    (s1, s2) = r.symbols
    assert s1.a == -m[1] and s1.b == -(m[0] * m[2])
    assert s2.a == m[3] and s2.b == -(m[2] * m[4])


@settings(max_examples=100, deadline=None)
@given(st.lists(nonzero_rat, min_size=6, max_size=6))
def test_rank6_agrees_with_minors_route(diag):
    D = [[diag[i] if i == j else Fraction(0) for j in range(6)] for i in range(6)]
    a = clifford_class_rank6(diag)
    b = even_clifford_from_minors(D)
    for v in relevant_places(a.entries() + b.entries()):
        assert brauer_invariant(a, v) == brauer_invariant(b, v)


@settings(max_examples=100, deadline=None)
@given(st.lists(nonzero_rat, min_size=5, max_size=5), st.integers(1, 12))
def test_rank6_is_clifford_invariant_when_disc_is_square(head, s):
    # choose a6 so that Delta = -a1...a6 = s^2; then the even Clifford class is the Clifford class
    prod = Fraction(1)
    for a in head:
        prod *= a
    diag = list(head) + [-Fraction(s * s) / prod]
    assert signed_discriminant(diag) == s * s
    assert brauer_equal(clifford_class_rank6(diag), clifford_invariant(diag))


# --- Hilbert symbols ----------------------------------------------------------------------

def _squarefree(n):
    sign = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    for q, e in sympy.factorint(n).items():
        if e % 2:
            out *= q
    return sign * out


def brute_hilbert(a: int, b: int, p: int) -> int:
    """0 if z^2 = a x^2 + b y^2 has a primitive solution mod p^k, else 1/2 (as 0/1)."""
    a, b = _squarefree(a), _squarefree(b)
    k = 3 if p > 2 else 5
    m = p ** k
    r = np.arange(m, dtype=np.int64)
    sq = r * r % m
    all_sq = np.zeros(m, bool)
    all_sq[sq] = True
    unit_sq = np.zeros(m, bool)
    unit_sq[sq[r % p != 0]] = True
    vals = (a * sq[:, None] + b * sq[None, :]) % m
    prim_xy = (r[:, None] % p != 0) | (r[None, :] % p != 0)
    ok = (prim_xy & all_sq[vals]) | unit_sq[vals]
    return 0 if ok.any() else 1


def test_hilbert_examples():
    assert hilbert_symbol(-1, -1, RealPlace) == HALF
    assert hilbert_symbol(2, 3, FinitePrime(3)) == HALF
    for b in (2, -3, Fraction(5, 7)):
        for v in (RealPlace, Place(2), Place(3), Place(7)):
            assert hilbert_symbol(1, b, v) == 0
    with pytest.raises(ZeroInput):
        hilbert_symbol(0, 3, RealPlace)


def test_hilbert_2_3_at_3_bruteforce_lifts():
    # z^2 = 2x^2 + 3y^2 has only the trivial primitive-free solutions mod 3^k
    assert brute_hilbert(2, 3, 3) == 1


@settings(max_examples=150, deadline=None)
@given(st.integers(-200, 200).filter(bool), st.integers(-200, 200).filter(bool),
       st.sampled_from([2, 3, 5, 7, 11]))
def test_hilbert_matches_bruteforce(a, b, p):
    got = hilbert_symbol(a, b, Place(p))
    assert got == (HALF if brute_hilbert(a, b, p) else QmodZ(0))


@settings(max_examples=200, deadline=None)
@given(nonzero_rat, nonzero_rat, nonzero_rat)
def test_hilbert_bilinear_and_symmetric(a, b1, b2):
    for v in relevant_places([a, b1, b2]):
        assert hilbert_symbol(a, b1 * b2, v) == hilbert_symbol(a, b1, v) + hilbert_symbol(a, b2, v)
        assert hilbert_symbol(a, b1, v) == hilbert_symbol(b1, a, v)
        assert hilbert_symbol(a, -a, v) == 0


def test_hilbert_reciprocity_500_pairs():
    rng = random.Random(7)
    for _ in range(500):
        a = Fraction(rng.choice((-1, 1)) * rng.randint(1, 10 ** 4), rng.randint(1, 300))
        b = Fraction(rng.choice((-1, 1)) * rng.randint(1, 10 ** 4), rng.randint(1, 300))
        assert reciprocity_sum(BrauerRep((QuaternionSymbol(a, b),))) == 0


def test_brauer_invariant_examples():
    assert all(brauer_invariant(BrauerRep.trivial(), v) == 0 for v in (RealPlace, Place(2), Place(5)))
    rep = BrauerRep((QuaternionSymbol(-1, -1), QuaternionSymbol(-1, -1)))
    assert brauer_invariant(rep, RealPlace) == 0
    assert brauer_invariant(BrauerRep((QuaternionSymbol(-1, -1),)), Place(2)) == HALF


def test_quaternion_symbol_rejects_zero():
    with pytest.raises(ZeroEntry):
        QuaternionSymbol(0, 1)
    t = TriPoly.parse("x - y")
    sym = QuaternionSymbol(t, 2)
    with pytest.raises(ZeroEntry):
        sym.specialize((1, 1, 0))


# --- rewriting rules -----------------------------------------------------------------------

def test_rule_iii_example():
    lhs, rhs = clifford_lemma_rules([1, -1], [1, 1], 3)["iii"]
    assert brauer_equal(lhs, BrauerRep.trivial()) and brauer_equal(rhs, BrauerRep.trivial())


def test_rule_ii_example():
    lhs, rhs = clifford_lemma_rules([1, 1], [1, 1], 1)["ii"]
    assert brauer_equal(lhs, rhs)
    assert signed_discriminant([1, 1]) == -1


def test_rules_200_random_forms():
    rng = random.Random(3)
    vals = [1, -1, 2, -2, 3, -3, 5, -5]
    for _ in range(200):
        q1 = [rng.choice(vals) for _ in range(rng.choice((2, 4, 6)))]
        q2 = [rng.choice(vals) for _ in range(rng.choice((2, 4, 6)))]
        a = rng.choice(vals)
        for name, (lhs, rhs) in clifford_lemma_rules(q1, q2, a).items():
            assert brauer_equal(lhs, rhs), (name, q1, q2, a)


def test_clifford_invariant_of_hyperbolic_planes_is_trivial():
    for n in range(1, 5):
        assert brauer_equal(clifford_invariant([1, -1] * n), BrauerRep.trivial())


# --- signatures ------------------------------------------------------------------------------

def test_signature_examples():
    assert signature_exact(identity(6)) == (6, 0)
    D = [[(1 if i < 3 else -1) if i == j else 0 for j in range(6)] for i in range(6)]
    assert signature_exact(D) == (3, 3)
    assert signature_exact(paper_pencil().at((1, 2, -1))) == (3, 3)
    with pytest.raises(DegenerateMatrix):
        signature_exact([[1, 1], [1, 1]])


def test_charpoly_matches_sympy():
    rng = random.Random(11)
    for _ in range(20):
        A = random_symmetric(rng)
        t = sympy.symbols("t")
        want = sympy.Poly(sympy.Matrix(A).charpoly(t).as_expr(), t).all_coeffs()[::-1]
        assert charpoly(A) == [Fraction(int(c.p), int(c.q)) for c in want]


def test_signature_trichotomy_and_numpy_oracle():
    P = paper_pencil()
    rng = random.Random(5)
    seen, checked = set(), 0
    while checked < 1000:
        pt = (rng.randint(-30, 30), rng.randint(-30, 30), rng.randint(-30, 30))
        M = P.at(pt)
        if det_exact(M) >= 0:
            continue
        checked += 1
        sig = signature_exact(M)
        assert sig in {(1, 5), (5, 1), (3, 3)}
        ev = np.linalg.eigvalsh(np.array(M, dtype=float))
        assert sig == (int((ev > 0).sum()), int((ev < 0).sum()))
        seen.add(sig)
    assert (3, 3) in seen
