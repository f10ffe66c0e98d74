from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ, cyclotomic_poly, symbols, totient, Poly
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from k3kit.arith import (QmodTwoZ, QmodZ, cyclotomic_polynomial, det_exact, euler_phi,
                         hermite_normal_form, identity, inverse_exact, is_quadratic_residue,
                         legendre, matmul, poly_divmod, poly_gcd, poly_mul, smith_normal_form,
                         square_ratio_solvable, square_ratio_witness)
from k3kit.errors import NotCoprime, ZeroInput, PreconditionError
from k3kit.lattice import SublatticeParams, gram_of_M_alpha


def sympy_factors(A):
    D = sympy_snf(Matrix(A), domain=ZZ)
    n = min(D.shape)
    return sorted(abs(int(D[i, i])) for i in range(n))


small_matrices = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-20, 20), min_size=n, max_size=n), min_size=n, max_size=n))


# --- Q/Z and Q/2Z -----------------------------------------------------------

def test_qmodz_reduces():
    assert QmodZ(Fraction(3, 2)) == QmodZ(Fraction(1, 2))
    assert QmodZ(Fraction(1, 2)) + QmodZ(Fraction(1, 2)) == 0
    assert QmodTwoZ(Fraction(-1, 18)).value == Fraction(35, 18)
    assert QmodTwoZ(3) == 1


# --- Smith normal form ------------------------------------------------------

def test_snf_identity():
    assert smith_normal_form(identity(3)).invariant_factors == [1, 1, 1]


def test_snf_already_diagonal():
    assert smith_normal_form([[2, 0], [0, 4]]).invariant_factors == [2, 4]


def test_snf_gram_example():
    G = gram_of_M_alpha(SublatticeParams(1, 3, 1, 0)).as_lists()
    assert smith_normal_form(G).invariant_factors == [1, 1, 18]
    assert sympy_factors(G) == [1, 1, 18]


@settings(max_examples=150, deadline=None)
@given(small_matrices)
def test_snf_matches_sympy_and_is_a_decomposition(A):
    S = smith_normal_form(A)
    n = len(A)
    D = matmul(matmul(S.left, A), S.right)
    assert all(D[i][j] == (S.diag[i] if i == j else 0) for i in range(n) for j in range(n))
    assert abs(det_exact(S.left)) == 1 and abs(det_exact(S.right)) == 1
    for a, b in zip(S.diag, S.diag[1:]):
        assert (b == 0) if a == 0 else (b % a == 0)
    assert sorted(abs(x) for x in S.diag) == sympy_factors(A)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.integers(1, 8).flatmap(
    lambda m: st.lists(st.lists(st.integers(-50, 50), min_size=m, max_size=m), min_size=n, max_size=n))))
def test_snf_reconstruction_up_to_8x8(A):
    S = smith_normal_form(A)
    D = matmul(matmul(S.left, A), S.right)
    for i, row in enumerate(D):
        for j, x in enumerate(row):
            assert x == (S.diag[i] if i == j and i < len(S.diag) else 0)


@settings(max_examples=100, deadline=None)
@given(small_matrices)
def test_hnf_same_row_lattice(B):
    if det_exact(B) == 0:
        return
    H = hermite_normal_form(B)
    assert abs(det_exact(H)) == abs(det_exact(B))
    # every row of H is an integer combination of rows of B and vice versa
    for X, Y in ((H, B), (B, H)):
        Yinv = inverse_exact(Y)
        C = matmul(X, Yinv)
        assert all(Fraction(c).denominator == 1 for row in C for c in row)


@settings(max_examples=100, deadline=None)
@given(small_matrices)
def test_det_matches_sympy(A):
    assert det_exact(A) == Matrix(A).det()


# --- residues ----------------------------------------------------------------

@pytest.mark.parametrize("a,p,want", [(4, 5, True), (2, 5, False), (29, 5, True)])
def test_quadratic_residue_examples(a, p, want):
    assert is_quadratic_residue(a, p) is want


def test_quadratic_residue_rejects_multiples_of_p():
    with pytest.raises(ZeroInput):
        is_quadratic_residue(10, 5)


@given(st.integers(-1000, 1000), st.sampled_from([3, 5, 7, 11, 13, 101]))
def test_legendre_matches_bruteforce(a, p):
    squares = {x * x % p for x in range(1, p)}
    want = 0 if a % p == 0 else (1 if a % p in squares else -1)
    assert legendre(a, p) == want


def brute_square_ratio(a, b, m):
    return any(gcd(x, m) == 1 and (a - x * x * b) % m == 0 for x in range(m))


def test_square_ratio_examples():
    assert square_ratio_solvable(1, 1, 7)
    assert not square_ratio_solvable(2, 1, 5)
    # 5 is not a unit modulo 100, so the question is outside the coprime domain
    with pytest.raises(NotCoprime):
        square_ratio_solvable(5, 29, 100)
    assert square_ratio_solvable(9, 29, 100) == brute_square_ratio(9, 29, 100)


@settings(max_examples=300, deadline=None)
@given(st.integers(-500, 500), st.integers(-500, 500), st.integers(1, 500))
def test_square_ratio_matches_bruteforce(a, b, m):
    if gcd(a, m) != 1 or gcd(b, m) != 1:
        with pytest.raises(NotCoprime):
            square_ratio_witness(a, b, m)
        return
    x = square_ratio_witness(a, b, m)
    assert (x is not None) == brute_square_ratio(a, b, m)
    if x is not None:
        assert gcd(x, m) == 1 and (a - x * x * b) % m == 0


# --- totient and cyclotomic polynomials --------------------------------------

@given(st.integers(1, 2000))
def test_euler_phi_matches_sympy(n):
    assert euler_phi(n) == totient(n)


@pytest.mark.parametrize("m", range(1, 61))
def test_cyclotomic_matches_sympy(m):
    t = symbols("t")
    want = Poly(cyclotomic_poly(m, t), t).all_coeffs()[::-1]
    assert cyclotomic_polynomial(m) == [int(c) for c in want]


def test_cyclotomic_small_cases():
    assert euler_phi(1) == 1
    assert cyclotomic_polynomial(1) == [-1, 1]
    assert cyclotomic_polynomial(2) == [1, 1]
    assert cyclotomic_polynomial(12) == [1, 0, -1, 0, 1]


@pytest.mark.parametrize("m", range(1, 121))
def test_cyclotomic_divides_and_has_degree_phi(m):
    phi = cyclotomic_polynomial(m)
    assert len(phi) - 1 == euler_phi(m) and phi[-1] == 1
    _, r = poly_divmod([-1] + [0] * (m - 1) + [1], phi)
    assert not any(r)


def test_cyclotomic_product_identity():
    # prod_{d | n} Phi_d = t^n - 1
    for n in (12, 30, 22):
        prod = [1]
        for d in range(1, n + 1):
            if n % d == 0:
                prod = poly_mul(prod, cyclotomic_polynomial(d))
        assert prod == [-1] + [0] * (n - 1) + [1]


def test_cyclotomic_rejects_nonpositive():
    with pytest.raises(PreconditionError):
        cyclotomic_polynomial(0)


polys = st.lists(st.integers(-9, 9), min_size=1, max_size=6)


@settings(max_examples=100)
@given(polys, polys)
def test_poly_divmod_identity(f, g):
    if not any(g):
        return
    q, r = poly_divmod(f, g)
    back = poly_mul(q, g)
    n = max(len(back), len(r), len(f))
    pad = lambda h: [Fraction(c) for c in h] + [Fraction(0)] * (n - len(h))
    assert [x + y for x, y in zip(pad(back), pad(r))] == pad(f)


def test_poly_gcd_simple():
    # (t-1)(t+1) and (t-1)(t+2) share t-1 (monic normalisation)
    g = poly_gcd([-1, 0, 1], [-2, 1, 1])
    assert [Fraction(c) for c in g] == [-1, 1]
