import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from detfactor.algebra import Algebra, AlgebraMap, Found, ZeroDivisor, centralizer
from detfactor.base import PrimeField, Subspace, solve_columns
from detfactor.noncomm import (
    CommutativeInput,
    MatrixShape,
    _quaternion_zero_divisor,
    conjugator,
    find_zero_divisor,
    max_comm_semisimple,
    order_r_conjugation_zerodiv,
    preprocess,
    sum_of_two_squares,
)

from .helpers import (
    assert_zero_divisor,
    direct_sum_table,
    disguise,
    matrix_algebra,
    matrix_table,
    quaternion_table,
    quotient,
)


def _upper_triangular(p):
    """Span of E11, E12, E22 inside M_2."""
    m2 = matrix_algebra(p, 2)
    alg, _ = m2.restrict(m2.span([m2.basis_vec(0), m2.basis_vec(1), m2.basis_vec(3)]))
    return alg


def test_preprocess_m2():
    res = preprocess(matrix_algebra(5, 2))
    assert isinstance(res, Found)
    shape = res.value
    assert isinstance(shape, MatrixShape)
    assert shape.m == 2 and shape.center.dim == 1


def test_preprocess_m2_over_quadratic_center():
    # M_2(F_49) viewed over F_7: center of dim 2, m = 2.
    table = np.multiply.outer(matrix_table(2), quotient(7, [-3, 0, 1]).table)
    t = table.transpose(0, 3, 1, 4, 2, 5).reshape(8, 8, 8) % 7
    res = preprocess(Algebra(PrimeField(7), t))
    assert isinstance(res, Found)
    assert res.value.m == 2 and res.value.center.dim == 2


def test_preprocess_nilpotent_radical():
    alg = _upper_triangular(5)
    res = preprocess(alg)
    assert isinstance(res, ZeroDivisor)
    assert_zero_divisor(res, alg)
    # The radical is spanned by E12, which squares to zero.
    assert not np.any(alg.mul(res.z.v, res.z.v))


def test_preprocess_non_free_over_center():
    alg = Algebra(PrimeField(5), direct_sum_table(matrix_table(2), matrix_table(3)))
    res = preprocess(alg)
    assert isinstance(res, ZeroDivisor)
    assert_zero_divisor(res, alg)


def test_preprocess_rejects_commutative():
    with pytest.raises(CommutativeInput):
        preprocess(quotient(5, [-2, 0, 1]))


def test_max_comm_semisimple_m2():
    alg = matrix_algebra(7, 2)
    shape = preprocess(alg).value
    res = max_comm_semisimple(alg, shape.center, shape.m)
    if isinstance(res, ZeroDivisor):
        assert_zero_divisor(res, alg)
        return
    d = res.value
    assert d.dim == 2
    assert centralizer(alg, d) == d
    assert d.contains(alg.one)


def test_conjugator_identity_over_center_is_one():
    alg = matrix_algebra(7, 2)
    d = alg.scalars()
    dstd, _ = alg.restrict(d)
    res = conjugator(alg, d, AlgebraMap(dstd, dstd, np.eye(1, dtype=np.int64)))
    assert isinstance(res, Found)
    y = res.value
    assert np.array_equal(y, alg.one)


def test_conjugator_identity_on_diagonal_is_one():
    alg = matrix_algebra(7, 2)
    d = alg.span([alg.basis_vec(0), alg.basis_vec(3)])
    dstd, _ = alg.restrict(d)
    res = conjugator(alg, d, AlgebraMap(dstd, dstd, np.eye(2, dtype=np.int64)))
    assert isinstance(res, Found) and np.array_equal(res.value, alg.one)


def test_conjugator_planted_singular_solution():
    # In the upper triangular algebra, swapping E11 and E22 forces y into span{E12}.
    alg = _upper_triangular(7)
    d = alg.span([alg.one, alg.basis_vec(0)])
    dstd, demb = alg.restrict(d)
    e22 = (alg.one - alg.basis_vec(0)) % 7
    imgs = np.stack([alg.one, e22], axis=1)
    m = solve_columns(demb.matrix, imgs, 7)
    sigma = AlgebraMap(dstd, dstd, m % 7)
    res = conjugator(alg, d, sigma)
    assert isinstance(res, ZeroDivisor)
    assert_zero_divisor(res, alg)


def _check_conjugator(alg, d, sigma, res):
    if isinstance(res, ZeroDivisor):
        assert_zero_divisor(res, alg)
        return None
    y = res.value
    dstd, demb = alg.restrict(d)
    for i in range(d.dim):
        x = d.basis[i]
        lhs = alg.mul(y, demb(sigma.matrix[:, i]))
        assert np.array_equal(lhs, alg.mul(x, y))
    return y


def test_conjugator_diagonal_swap():
    alg = matrix_algebra(7, 2)
    d = alg.span([alg.basis_vec(0), alg.basis_vec(3)])
    dstd, demb = alg.restrict(d)
    swap_in_a = np.zeros((4, 4), dtype=np.int64)
    swap_in_a[0, 3] = swap_in_a[3, 0] = 1
    m = solve_columns(demb.matrix, (swap_in_a @ demb.matrix) % 7, 7)
    sigma = AlgebraMap(dstd, dstd, m, kind="automorphism", order=2)
    y = _check_conjugator(alg, d, sigma, conjugator(alg, d, sigma))
    if y is not None:
        # y^-1 E11 y = E22: y is antidiagonal.
        assert y[0] == 0 and y[3] == 0 and y[1] and y[2]


def test_order_r_conjugation_zerodiv():
    alg = matrix_algebra(7, 2)
    y = alg.vec([0, 1, 1, 0])  # the swap matrix, y^2 = 1
    zd = order_r_conjugation_zerodiv(alg, y, 2)
    assert_zero_divisor(zd, alg)
    with pytest.raises(ValueError):
        order_r_conjugation_zerodiv(alg, alg.vec([0, 1, 6, 0]), 2)


@pytest.mark.parametrize("p,expected", [(13, (5, 0)), (7, (2, 3)), (5, (2, 0)), (11, (1, 3))])
def test_sum_of_two_squares_frozen(p, expected):
    assert sum_of_two_squares(p) == expected


@given(st.sampled_from([3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 101, 103]))
def test_sum_of_two_squares_identity(p):
    a, b = sum_of_two_squares(p)
    assert (a * a + b * b + 1) % p == 0


def test_quaternion_branch_direct():
    for p in (5, 7, 11, 13):
        alg = Algebra(PrimeField(p), quaternion_table(p))
        zd = _quaternion_zero_divisor(alg, alg.basis_vec(1), alg.basis_vec(2))
        assert_zero_divisor(zd, alg)


def test_find_zero_divisor_rejects_commutative():
    with pytest.raises(CommutativeInput):
        find_zero_divisor(quotient(5, [-2, 0, 1]))


@pytest.mark.parametrize("p", [5, 7, 11, 13])
@pytest.mark.parametrize(
    "name,builder",
    [
        ("M2", lambda: matrix_table(2)),
        ("M3", lambda: matrix_table(3)),
        ("M2+C", lambda: direct_sum_table(matrix_table(2), np.ones((1, 1, 1), dtype=np.int64))),
    ],
)
def test_find_zero_divisor_disguised(p, name, builder):
    rng = random.Random(p * 1000 + len(name))
    alg, _ = disguise(p, builder(), rng)
    zd = find_zero_divisor(alg)
    assert_zero_divisor(zd, alg)


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_find_zero_divisor_quaternions(p):
    rng = random.Random(p)
    alg, _ = disguise(p, quaternion_table(p), rng)
    zd = find_zero_divisor(alg)
    assert_zero_divisor(zd, alg)


def test_find_zero_divisor_m2_over_quadratic_center():
    table = np.multiply.outer(matrix_table(2), quotient(7, [-3, 0, 1]).table)
    t = table.transpose(0, 3, 1, 4, 2, 5).reshape(8, 8, 8) % 7
    alg = Algebra(PrimeField(7), t)
    assert_zero_divisor(find_zero_divisor(alg), alg)


def test_subspace_import_is_used():
    # Guard against silently changing the center's representation.
    shape = preprocess(matrix_algebra(5, 2)).value
    assert isinstance(shape.center, Subspace)
