import math
from itertools import permutations

import pytest
from hypothesis import given, settings, strategies as st

from hardsquares.homology import betti_numbers, smith_normal_form
from hardsquares.injective_words import (
    WordPolynomial,
    coefficient_matrix,
    derangements,
    injective_word_complex,
    injective_words,
    lie_bracket,
    parse_dump,
    pi_basis,
    pi_basis_products,
    pi_n_basis_products,
    reutenauer_basis,
    set_partitions,
    top_homology_basis,
    top_homology_products,
    top_homology_rank,
    word_boundary,
)

PI_4_2 = """[[1,2],3] [[1,3],2] 1[2,3] 2[1,3] 3[1,2] 123 [[1,2],4] [[1,4],2] 1[2,4] 2[1,4] 4[1,2] 124
[[1,3],4] [[1,4],3] 1[3,4] 3[1,4] 4[1,3] 134 [[2,3],4] [[2,4],3] 2[3,4] 3[2,4] 4[2,3] 234""".split()
PI_4_3 = """1234 12[3,4] 13[2,4] 14[2,3] 23[1,4] 24[1,3] 34[1,2] 1[[2,3],4] 1[[2,4],3] 2[[1,3],4]
2[[1,4],3] 3[[1,2],4] 3[[1,4],2] 4[[1,2],3] 4[[1,3],2] [1,2][3,4] [1,3][2,4] [1,4][2,3]
[[[1,2],3],4] [[[1,2],4],3] [[[1,3],2],4] [[[1,3],4],2] [[[1,4],2],3] [[[1,4],3],2]""".split()
PI_STAR_3 = """[1,2][3,4] [1,3][2,4] [1,4][2,3] [[[1,2],3],4] [[[1,2],4],3] [[[1,3],2],4] [[[1,3],4],2]
[[[1,4],2],3] [[[1,4],3],2]""".split()
PI_STAR_3_3 = "[[[1,2],3],4] [[[1,2],4],3] [[[1,3],2],4] [[[1,3],4],2] [[[1,4],2],3] [[[1,4],3],2]".split()


def W(*letters):
    return WordPolynomial.word(letters)


def test_word_boundary_examples():
    assert word_boundary((1, 2)) == W(2) - W(1)
    assert word_boundary((1, 2, 3)) == W(2, 3) - W(1, 3) + W(1, 2)
    assert W(1, 2, 3, 4).boundary().boundary() == 0


def test_bracket_of_letters():
    assert lie_bracket(W(1), W(2)) == W(1, 2) + W(2, 1)
    with pytest.raises(ValueError):
        lie_bracket(W(1), W(1, 2))


def polys(letters):
    """Random homogeneous polynomials on a fixed letter set."""
    words = list(permutations(letters))
    return st.lists(st.tuples(st.sampled_from(words), st.integers(-3, 3)), min_size=1, max_size=4).map(
        lambda terms: sum((c * WordPolynomial.word(w) for w, c in terms), WordPolynomial())
    )


@settings(max_examples=60, deadline=None)
@given(polys((1, 2)), polys((3,)), polys((4, 5, 6)))
def test_graded_antisymmetry_and_jacobi(a, b, c):
    for x, y in ((a, b), (b, c), (a, c)):
        if x and y:
            assert lie_bracket(x, y) + (-1) ** (x.degree * y.degree) * lie_bracket(y, x) == 0
    if a and b and c:
        da, db, dc = a.degree, b.degree, c.degree
        total = (
            (-1) ** (da * dc) * lie_bracket(lie_bracket(a, b), c)
            + (-1) ** (db * da) * lie_bracket(lie_bracket(b, c), a)
            + (-1) ** (dc * db) * lie_bracket(lie_bracket(c, a), b)
        )
        assert total == 0


@settings(max_examples=40, deadline=None)
@given(polys((1, 2, 3)))
def test_boundary_squares_to_zero(p):
    assert p.boundary().boundary() == 0


def test_dump_roundtrip():
    p = 3 * W(1, 2) - W(2, 1) + W(10, 11)
    assert parse_dump(p.dump()) == p
    assert parse_dump("0") == WordPolynomial()


def test_reutenauer_examples():
    assert [str(b) for b in reutenauer_basis({1, 2, 3})] == ["[[1,2],3]", "[[1,3],2]"]
    assert [str(b) for b in reutenauer_basis({1, 2})] == ["[1,2]"]
    four = reutenauer_basis({1, 2, 3, 4})
    words = injective_words(4, 4)
    assert smith_normal_form(coefficient_matrix([b.expansion for b in four], words))[1] == 6


@pytest.mark.parametrize("m", range(2, 8))
def test_reutenauer_size(m):
    assert len(reutenauer_basis(range(1, m + 1))) == math.factorial(m - 1)


def test_listed_bases():
    assert sorted(b.name for b in pi_n_basis_products(4, 2)) == sorted(PI_4_2)
    assert sorted(b.name for b in pi_basis_products({1, 2, 3, 4})) == sorted(PI_4_3)
    assert sorted(b.name for b in top_homology_products(4, 2)) == sorted(PI_STAR_3)
    assert sorted(b.name for b in top_homology_products(4, 3)) == sorted(PI_STAR_3_3)


def test_factor_order_is_ascending_size():
    # singletons come before longer brackets inside a product
    for b in pi_basis_products({1, 2, 3, 4}):
        sizes = [f.size for f in b.factors]
        assert sizes == sorted(sizes)


@pytest.mark.parametrize("T", [(1, 2, 3), (1, 2, 3, 4), (2, 4, 5, 7)])
def test_pi_basis_is_unimodular(T):
    basis = pi_basis(T, len(T) - 1)
    words = sorted(permutations(T))
    assert len(basis) == len(words)
    factors, rank = smith_normal_form(coefficient_matrix(basis, words))
    assert rank == len(words) and all(f == 1 for f in factors)


def test_pi_basis_size_check():
    with pytest.raises(ValueError):
        pi_basis({1, 2, 3}, 3)


def partition_oracle(m, r):
    return sum(math.prod(math.factorial(len(b) - 1) for b in part) for part in set_partitions(tuple(range(1, m + 1)), r))


@pytest.mark.parametrize("m", range(2, 7))
def test_top_homology_rank(m):
    assert len(top_homology_basis(m, 2)) == derangements(m) == partition_oracle(m, 2)
    assert top_homology_rank(m, 3) == len(top_homology_basis(m, 3)) == partition_oracle(m, 3)


def test_top_homology_five():
    assert len(top_homology_basis(5, 2)) == 44


@pytest.mark.parametrize("m", range(1, 7))
def test_injective_words_homology(m):
    cc, words = injective_word_complex(m)
    betti = [s.betti for s in betti_numbers(cc, "integers")]
    betti[0] -= 1  # reduced homology
    assert betti[:-1] == [0] * (m - 1)
    assert betti[-1] == derangements(m)
    if m >= 2:
        basis = top_homology_basis(m, 2)
        for b in basis:
            assert b.boundary() == 0
        assert smith_normal_form(coefficient_matrix(basis, words[-1]))[1] == derangements(m)
