import pytest
from hypothesis import given
from hypothesis import strategies as st

from detfactor.base import PrimeField
from detfactor.poly import (
    CharDividesIndex,
    NotSquarefree,
    Poly,
    berlekamp_deterministic,
    cyclotomic,
    distinct_degree_factorization,
    euler_phi,
    product,
    squarefree_part_check,
)

from .helpers import poly
from .oracles import oracle_check, pdivmod, pgcd, pmul, trial_factor


def test_cyclotomic_standard_identities():
    f7 = PrimeField(7)
    assert cyclotomic(8, f7) == Poly(f7, [1, 0, 0, 0, 1])
    assert cyclotomic(12, f7) == Poly(f7, [1, 0, -1, 0, 1])
    assert cyclotomic(5, f7) == Poly(f7, [1, 1, 1, 1, 1])
    assert cyclotomic(1, f7) == Poly(f7, [-1, 1])


def test_cyclotomic_rejects_char_dividing_index():
    with pytest.raises(CharDividesIndex):
        cyclotomic(14, PrimeField(7))


@given(st.integers(1, 40), st.sampled_from([5, 7, 11, 13]))
def test_cyclotomic_product_is_x_n_minus_one(n, p):
    field = PrimeField(p)
    if n % p == 0:
        return
    divisors = [d for d in range(1, n + 1) if n % d == 0]
    prod = product([cyclotomic(d, field) for d in divisors], field)
    assert prod == Poly.monomial(field, n) - Poly.const(field, 1)
    assert cyclotomic(n, field).deg == euler_phi(n)


def test_ddf_examples():
    assert distinct_degree_factorization(poly(5, [-1, 0, 1])) == [(1, poly(5, [-1, 0, 1]))]
    assert distinct_degree_factorization(poly(3, [0, -1, 0, 1])) == [(1, poly(3, [0, -1, 0, 1]))]
    # Trial division finds no linear factor and two quadratics for X^4 + 1 mod 7.
    assert [len(g) - 1 for g in trial_factor([1, 0, 0, 0, 1], 7)] == [2, 2]
    assert distinct_degree_factorization(poly(7, [1, 0, 0, 0, 1])) == [(2, poly(7, [1, 0, 0, 0, 1]))]


def test_berlekamp_examples():
    assert berlekamp_deterministic(poly(3, [-1, 0, 1])) == [poly(3, [1, 1]), poly(3, [-1, 1])]
    assert berlekamp_deterministic(poly(3, [0, -1, 0, 1])) == [poly(3, [0, 1]), poly(3, [1, 1]), poly(3, [-1, 1])]
    # No roots in F_3 by exhaustion, so X^2 + 1 stays whole.
    assert berlekamp_deterministic(poly(3, [1, 0, 1])) == [poly(3, [1, 0, 1])]


def test_berlekamp_keeps_multiplicities():
    assert berlekamp_deterministic(poly(5, [1, 2, 1])) == [poly(5, [1, 1]), poly(5, [1, 1])]


def test_squarefree_check():
    squarefree_part_check(poly(7, [-3, 0, 1]))
    with pytest.raises(NotSquarefree):
        squarefree_part_check(poly(5, [1, 2, 1]))
    with pytest.raises(NotSquarefree):
        squarefree_part_check(poly(5, [0, 0, 0, 0, 0, 1]))


coeff_lists = st.lists(st.integers(0, 10), min_size=1, max_size=7)


@given(coeff_lists, coeff_lists)
def test_arithmetic_against_plain_lists(a, b):
    p = 11
    fa, fb = poly(p, a), poly(p, b)
    assert list((fa * fb).coeffs) == pmul(list(fa.coeffs), list(fb.coeffs), p)
    if fb.is_zero():
        return
    q, r = divmod(fa, fb)
    eq, er = pdivmod(list(fa.coeffs), list(fb.coeffs), p)
    assert list(q.coeffs) == eq and list(r.coeffs) == er
    g = fa.gcd(fb)
    assert list(g.coeffs) == (pgcd(list(fa.coeffs), list(fb.coeffs), p) or [])


@given(st.sampled_from([5, 7, 11]), st.lists(st.integers(0, 10), min_size=3, max_size=7), st.integers(0, 3))
def test_berlekamp_agrees_with_randomized_oracle(p, coeffs, seed):
    coeffs[-1] = 1
    f = poly(p, coeffs)
    if f.deg < 1 or not f.gcd(f.derivative()).is_const():
        return
    ours = sorted(berlekamp_deterministic(f), key=lambda g: (g.deg, g.coeffs))
    theirs = oracle_check(f, seed)
    assert ours == theirs
