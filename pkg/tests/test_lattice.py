import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from k3kit.arith import QmodTwoZ, QmodZ, det_exact, is_quadratic_residue
from k3kit.errors import (BudgetExceeded, DegenerateLattice, MismatchedContext, OddLattice,
                          UnsupportedPrime)
from k3kit.lattice import (FourfoldAssociation, GramLattice, LatticeClassLabel as L, SublatticeParams,
                           census, classify, count_lattices, cubic_fourfold_association,
                           discriminant_form, enumerate_index_p_sublattices, forms_isometric,
                           gram_of_M_alpha, invariant_factors_of, isomorphic, quadric_count_bruteforce,
                           quadric_count_closed, small_rank_lattice, theorem_disc_group, total_lattices)

ODD = [3, 5, 7, 11]


@st.composite
def params(draw, primes=(3, 5, 7), dmax=10):
    p = draw(st.sampled_from(primes))
    return SublatticeParams(draw(st.integers(1, dmax)), p, draw(st.integers(0, 1)), draw(st.integers(0, p - 1)))


def disc(d, p, i, c):
    return discriminant_form(gram_of_M_alpha(SublatticeParams(d, p, i, c)))


# --- Gram matrices -------------------------------------------------------------

def test_gram_examples():
    assert gram_of_M_alpha(SublatticeParams(1, 2, 1, 0)).as_lists() == [[-2, -1, 0], [-1, 0, 2], [0, 2, 0]]
    assert gram_of_M_alpha(SublatticeParams(1, 3, 0, 0)).as_lists() == [[-2, 0, 0], [0, 0, 3], [0, 3, 0]]


@settings(max_examples=50)
@given(params(primes=(2, 3, 5, 7, 11, 13)))
def test_gram_determinant(prm):
    G = gram_of_M_alpha(prm)
    assert G.is_even
    assert abs(det_exact(G.as_lists())) == 2 * prm.d * prm.p ** 2


def test_gram_lattice_validation():
    with pytest.raises(ValueError):
        GramLattice([[1, 2], [3, 4]])
    with pytest.raises(DegenerateLattice):
        discriminant_form(GramLattice([[2, 2], [2, 2]]))
    with pytest.raises(OddLattice):
        discriminant_form(GramLattice([[1, 0], [0, 2]]))


# --- discriminant forms ----------------------------------------------------------

def test_unimodular_has_trivial_group():
    assert discriminant_form(GramLattice([[0, 1], [1, 0]])).orders == []


def test_cyclic_example_and_v4():
    form = disc(1, 3, 1, 0)
    assert form.orders == [18]
    v4 = (Fraction(3, 18), Fraction(-6, 18), Fraction(1, 18))
    assert form.element_order(v4) == 18
    assert form.q(v4) == QmodTwoZ(Fraction(-1, 18))


def test_noncyclic_example():
    assert disc(1, 3, 0, 0).orders == invariant_factors_of([2, 3, 3]) == [3, 6]


@settings(max_examples=200, deadline=None)
@given(params())
def test_form_consistency(prm):
    form = discriminant_form(gram_of_M_alpha(prm))
    prod = 1
    for o in form.orders:
        prod *= o
    assert prod == 2 * prm.d * prm.p ** 2
    for o, a in zip(form.orders, form.orders[1:]):
        assert a % o == 0
    # q(x+y) - q(x) - q(y) = 2 b(x, y) mod 2Z, and q(g) reduces to b(g, g) mod Z
    gens = form.generators
    for x, y in itertools.product(gens, repeat=2):
        s = tuple(a + b for a, b in zip(x, y))
        lhs = form.q(s) - form.q(x) - form.q(y)
        assert QmodZ(lhs.value / 2) == form.b(x, y) or QmodZ(lhs.value / 2 + Fraction(1, 2)) == form.b(x, y)
        assert (lhs.value - 2 * form.b(x, y).value) % 2 == 0
    for g, qv in zip(gens, form.q_values):
        assert QmodZ(qv.value) == form.b(g, g)


# The proof-of-structure vectors, transported into the computed group.

def _vectors(d, p, c):
    N = 2 * d * p * p
    v1 = (Fraction(p * p, N), Fraction(0), Fraction(0))
    v2 = (Fraction(0), Fraction(2 * d * p, N), Fraction(-4 * c * d, N))
    v3 = (Fraction(0), Fraction(0), Fraction(2 * d * p, N))
    return v1, v2, v3


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("d", [1, 2, 3, 6])
@pytest.mark.parametrize("c", [0, 1, 2])
def test_explicit_generators_i0(d, p, c):
    form = disc(d, p, 0, c)
    v1, v2, v3 = _vectors(d, p, c)
    N = 2 * d * p * p
    assert form.element_order(v1) == 2 * d
    assert form.element_order(v2) == (p if c % p == 0 else p * p)
    assert form.q(v1) == QmodTwoZ(Fraction(-1, 2 * d))
    s = tuple(a + b for a, b in zip(v1, v2))
    if c % p and d % p:
        assert form.element_order(s) == N
        assert form.q(s) == QmodTwoZ(Fraction(-(p * p + 4 * c * d), N))
    elif c % p == 0:
        assert form.element_order(v3) == p


@settings(max_examples=100, deadline=None)
@given(params())
def test_v4_value_when_cyclic(prm):
    d, p, c = prm.d, prm.p, prm.c_alpha
    if (1 + 4 * c * d) % p == 0:
        return
    form = disc(d, p, 1, c)
    N = 2 * d * p * p
    v4 = (Fraction(p, N), Fraction(-2 * d * p, N), Fraction(1 + 4 * c * d, N))
    assert form.orders == [N]
    assert form.element_order(v4) == N
    assert form.q(v4) == QmodTwoZ(Fraction(-(1 + 4 * c * d), N))


# --- theorem groups ---------------------------------------------------------------

@pytest.mark.parametrize("prm,want", [
    ((2, 5, 1, 1), [100]),
    ((1, 3, 1, 2), [6, 3]),
    ((3, 2, 0, 1), [6, 2, 2]),
])
def test_theorem_group_examples(prm, want):
    assert theorem_disc_group(SublatticeParams(*prm)) == want


def test_theorem_matches_snf_everywhere():
    for p in (3, 5, 7):
        for d in range(1, 11):
            for i in (0, 1):
                for c in range(p):
                    prm = SublatticeParams(d, p, i, c)
                    assert discriminant_form(gram_of_M_alpha(prm)).orders == \
                        invariant_factors_of(theorem_disc_group(prm)), prm


@pytest.mark.parametrize("d", [1, 2, 3, 4])
@pytest.mark.parametrize("i,c", [(0, 0), (0, 1), (1, 0), (1, 1)])
def test_theorem_matches_snf_p2(d, i, c):
    prm = SublatticeParams(d, 2, i, c)
    assert discriminant_form(gram_of_M_alpha(prm)).orders == invariant_factors_of(theorem_disc_group(prm))


# --- classification -----------------------------------------------------------------

def test_classify_examples():
    assert classify(SublatticeParams(1, 5, 0, 1)) is L.CyclicSquare
    assert is_quadratic_residue(25 + 4, 5)
    assert classify(SublatticeParams(1, 5, 0, 0)) is L.NonCyclic
    assert classify(SublatticeParams(3, 3, 1, 0)) is L.CyclicFull


def test_classify_p2_unsupported():
    with pytest.raises(UnsupportedPrime):
        classify(SublatticeParams(1, 2, 0, 0))
    with pytest.raises(UnsupportedPrime):
        count_lattices(1, 2)


def test_isomorphic_examples():
    a = SublatticeParams(1, 5, 0, 1)
    assert isomorphic(a, a)
    assert not isomorphic(a, SublatticeParams(1, 5, 1, 1))
    assert isomorphic(SublatticeParams(5, 5, 0, 1), SublatticeParams(5, 5, 0, 4))
    with pytest.raises(MismatchedContext):
        isomorphic(a, SublatticeParams(2, 5, 0, 1))


@settings(max_examples=100)
@given(st.sampled_from([3, 5, 7]).flatmap(lambda p: st.tuples(
    st.just(p), st.integers(1, 10),
    *[st.tuples(st.integers(0, 1), st.integers(0, p - 1))] * 3)))
def test_isomorphic_is_equivalence(sample):
    p, d, *ics = sample
    a, b, c = (SublatticeParams(d, p, i, cc) for i, cc in ics)
    assert isomorphic(a, a)
    assert isomorphic(a, b) == isomorphic(b, a)
    if isomorphic(a, b) and isomorphic(b, c):
        assert isomorphic(a, c)


@pytest.mark.parametrize("p,d", [(3, d) for d in range(1, 7)] + [(5, 1), (5, 2), (5, 5)])
def test_classify_agrees_with_form_isometry(p, d):
    ps = [SublatticeParams(d, p, i, c) for i in (0, 1) for c in range(p)]
    forms = {x: discriminant_form(gram_of_M_alpha(x)) for x in ps}
    for a, b in itertools.combinations(ps, 2):
        assert isomorphic(a, b) == forms_isometric(forms[a], forms[b]), (a, b)


# --- counting -------------------------------------------------------------------------

def test_table_counts_p3():
    assert count_lattices(1, 3) == {L.CyclicSquare: 1743421725, L.CyclicNonsquare: 1743362676,
                                    L.NonCyclic: 1743392200}


def test_table_counts_p_divides_d():
    got = count_lattices(3, 3)
    half = 3 ** 9 * (3 ** 10 - 1) // 2
    assert got == {L.NonCyclicResidue: half, L.NonCyclicNonresidue: half,
                   L.NonCyclicPP: (3 ** 9 + 1) * (3 ** 10 - 1) // 2, L.CyclicFull: 3 ** 20}


@pytest.mark.parametrize("p", ODD)
@pytest.mark.parametrize("d", range(1, 13))
def test_counts_sum_to_projective_space(p, d):
    assert sum(count_lattices(d, p).values()) == total_lattices(p) == (p ** 21 - 1) // (p - 1)


@pytest.mark.parametrize("args,want", [((1, 3, 0), 5), ((1, 3, 1), 2), ((2, 3, 0), 33),
                                       ((2, 3, 1), 24), ((2, 5, 0), 145)])
def test_quadric_examples(args, want):
    assert quadric_count_closed(*args) == want
    assert quadric_count_bruteforce(*args) == want


def test_quadric_closed_equals_bruteforce():
    for p in (3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
        n = 1
        while p ** (2 * n) <= 10 ** 6:
            for t in range(p):
                assert quadric_count_closed(n, p, t) == quadric_count_bruteforce(n, p, t), (n, p, t)
            n += 1


def test_quadric_budget():
    with pytest.raises(BudgetExceeded):
        quadric_count_bruteforce(5, 11, 0)


def test_quadric_budget_env(monkeypatch):
    monkeypatch.setenv("K3KIT_BUDGET_POINTS", "100")
    with pytest.raises(BudgetExceeded):
        quadric_count_bruteforce(2, 5, 0)


# --- enumeration and census --------------------------------------------------------

def test_enumeration_counts():
    assert len(enumerate_index_p_sublattices(small_rank_lattice(1), 3)) == 13
    assert len(enumerate_index_p_sublattices(small_rank_lattice(2), 5)) == 31


def test_enumerated_sublattices_have_index_p():
    L0 = small_rank_lattice(2)
    for sub in enumerate_index_p_sublattices(L0, 5):
        assert abs(sub.det) == abs(L0.det) * 25


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_index_p_sublattices(GramLattice([[2 if i == j else 0 for j in range(12)] for i in range(12)]), 7)


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("d", range(1, 7))
def test_census_agrees_with_theorem(p, d):
    rows = census(d, p)
    assert len(rows) == p * p + p + 1
    assert all(r["agrees"] for r in rows)


def test_census_distribution_d1_p3():
    from collections import Counter
    dist = Counter(tuple(r["group"]) for r in census(1, 3))
    # cyclic Z/18: i = 1 with 3 not dividing 1+4c, or i = 0 with 3 not dividing c (Z/2 + Z/9)
    cyclic = sum(1 for r in census(1, 3)
                 if (r["i_alpha"] == 1 and (1 + 4 * r["c_alpha"]) % 3) or (r["i_alpha"] == 0 and r["c_alpha"] % 3))
    assert sum(dist.values()) == 13
    assert dist[(18,)] == cyclic == 9
    assert dist[(3, 6)] == 4


# --- cubic fourfolds ------------------------------------------------------------------

@pytest.mark.parametrize("d,p,want", [(1, 5, FourfoldAssociation.ExistsUnique),
                                      (7, 3, FourfoldAssociation.Exists),
                                      (2, 3, FourfoldAssociation.NONE),
                                      (13, 3, FourfoldAssociation.Exists),
                                      (5, 3, FourfoldAssociation.NONE),
                                      (1, 7, FourfoldAssociation.ExistsUnique)])
def test_fourfold_association(d, p, want):
    status, reason = cubic_fourfold_association(d, p)
    assert status is want and reason
