import itertools
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from detfactor.algebra import (
    AlgebraMap,
    Algebra,
    Found,
    ZeroDivisor,
    center,
    complement,
    fixed_subalgebra,
    from_polynomial,
    ideal_toolkit,
    identity_map,
    minimal_polynomial,
    primitive_element,
    radical,
    split,
    structure_analysis,
    subalgebra_generated,
    tensor_square_over,
)
from detfactor.base import PrimeField, Subspace, rank

from .helpers import (
    assert_zero_divisor,
    map_from_permutation,
    matrix_algebra,
    poly,
    quotient,
    split_algebra,
    tensor_table,
)
from .oracles import is_irreducible


def test_from_polynomial_examples():
    a = quotient(5, [-1, 0, 1])
    x = a.basis_vec(1)
    assert a.dim == 2 and list(a.mul(x, x)) == [1, 0]
    assert quotient(5, [0, 1]).dim == 1
    b = quotient(7, [1, 0, 0, 0, 1])
    assert list(b.power(b.basis_vec(1), 4)) == [6, 0, 0, 0]


def test_from_polynomial_rejects_constants():
    with pytest.raises(ValueError):
        from_polynomial(poly(5, [3]))


def test_algebra_rejects_bad_tables():
    f = PrimeField(5)
    with pytest.raises(ValueError):
        Algebra(f, np.zeros((2, 2, 3), dtype=np.int64))
    golden = np.zeros((2, 2, 2), dtype=np.int64)
    golden[0, 0, 0] = golden[0, 1, 1] = golden[1, 0, 1] = 1
    golden[1, 1, 0] = 1
    golden[1, 1, 1] = 1
    Algebra(f, golden)  # F_5[x]/(x^2 - x - 1), associative
    with pytest.raises(ValueError):
        Algebra(f, golden, one=[0, 1])


def test_minimal_polynomial_examples():
    a = quotient(7, [-3, 0, 1])
    assert minimal_polynomial(a.one_elem()) == poly(7, [-1, 1])
    assert minimal_polynomial(a.zero_elem()) == poly(7, [0, 1])
    assert minimal_polynomial(a.basis_elem(1)) == poly(7, [-3, 0, 1])


@given(st.lists(st.integers(0, 6), min_size=3, max_size=3))
def test_minimal_polynomial_annihilates(coords):
    a = quotient(7, [1, 2, 0, 1])
    x = a.elem(coords)
    m = minimal_polynomial(x)
    val = a.zeros()
    for c in reversed(m.coeffs):
        val = (a.mul(val, x.v) + c * a.one) % 7
    assert not np.any(val)
    assert 1 <= m.deg <= 3


def test_ideal_toolkit_split_quadratic():
    a = quotient(5, [-1, 0, 1])
    z = a.elem([-1, 1])
    ideal = ideal_toolkit(a, z)
    e = ideal.e
    assert ideal.dim == 1
    assert np.array_equal(a.mul(e, e), e)
    assert np.array_equal(a.mul(e, z.v), z.v)
    # e = (1 - x)/2 = 3 + 2x over F_5; frozen from idempotent arithmetic.
    assert [int(c) for c in e] == [3, 2]
    comp = complement(ideal)
    assert comp.dim == 1
    (i1, emb1), (i2, emb2) = split(a, ideal)
    assert i1.dim == i2.dim == 1
    assert emb1.is_multiplicative() and emb2.is_multiplicative()


def test_ideal_toolkit_unit_and_field():
    a = quotient(5, [-1, 0, 1])
    whole = ideal_toolkit(a, a.one_elem())
    assert whole.dim == 2 and complement(whole).dim == 0
    f = quotient(7, [-3, 0, 1])
    assert ideal_toolkit(f, f.elem([2, 5])).dim == 2


def test_subalgebra_generated_examples():
    a = quotient(7, [-3, 0, 1])
    assert subalgebra_generated(a, [a.one]) == a.scalars()
    assert subalgebra_generated(a, [a.basis_vec(1)]).dim == 2
    b = split_algebra(5, 3)
    e = b.basis_vec(0)
    sub = subalgebra_generated(b, [e])
    assert sub.dim == 2 and sub.contains(b.one) and sub.contains(e)


def test_tensor_square_over_base_and_field():
    a = quotient(7, [-3, 0, 1])
    ts = tensor_square_over(a, a.full_space(), [a.one])
    # Rank 1 over B = A, both embeddings bijective.
    assert ts.algebra.dim == a.dim
    assert ts.left.is_injective() and ts.right.is_injective()
    assert np.array_equal(ts.left.matrix, ts.right.matrix)
    ts = tensor_square_over(a, a.scalars(), [a.one, a.basis_vec(1)])
    assert ts.algebra.dim == 4
    x = a.basis_vec(1)
    lx, rx = ts.left(x), ts.right(x)
    assert not np.array_equal(lx, rx)
    # (x (x) 1)(1 (x) x) is the pure tensor x (x) x, which is neither embedded image.
    prod = ts.algebra.mul(lx, rx)
    assert not ts.left.image().contains(prod)


@given(st.sampled_from([5, 7, 11]), st.integers(1, 3), st.integers(1, 2))
def test_tensor_square_dimension(p, m, d):
    """dim_k (A (x)_B A) = m^2 dim B for A = B (x) F_p^m."""
    bt = split_algebra(p, d).table
    ft = split_algebra(p, m).table
    a = Algebra(PrimeField(p), tensor_table(bt, ft, p))
    sub = Subspace(p, a.dim, [np.kron(a_i, np.ones(m, dtype=np.int64)) for a_i in np.eye(d, dtype=np.int64)])
    free = [np.kron(np.ones(d, dtype=np.int64), u) for u in np.eye(m, dtype=np.int64)]
    ts = tensor_square_over(a, sub, free)
    assert ts.algebra.dim == m * m * d


def test_structure_analysis_examples():
    a = quotient(7, [1, 2, 0, 1])
    info = structure_analysis(a)
    assert info.center.dim == 3
    t = np.zeros((2, 2, 2), dtype=np.int64)
    t[0, 0, 0] = t[0, 1, 1] = t[1, 0, 1] = 1
    nil = Algebra(PrimeField(5), t)  # F_5[x]/(x^2)
    rad = radical(nil)
    assert rad == Subspace(5, 2, [[0, 1]])
    assert is_irreducible([-3, 0, 1], 7)
    assert structure_analysis(quotient(7, [-3, 0, 1])).simple_component_sizes == (49,)


def test_center_of_matrix_algebra():
    m2 = matrix_algebra(5, 2)
    assert center(m2) == m2.scalars()
    assert radical(m2).dim == 0


@given(st.sampled_from([5, 7, 11]), st.lists(st.integers(1, 3), min_size=1, max_size=3))
def test_component_sizes_match_oracle(p, degs):
    """A = prod F_p[x]/(g_i) with g_i the least irreducible of each degree."""
    from .oracles import monics

    parts = []
    for d in degs:
        g = next(g for g in monics(d, p) if is_irreducible(g, p) and (d > 1 or g[0] == 0))
        parts.append(quotient(p, g).table)
    t = parts[0]
    for extra in parts[1:]:
        n1, n2 = t.shape[0], extra.shape[0]
        big = np.zeros((n1 + n2,) * 3, dtype=np.int64)
        big[:n1, :n1, :n1] = t
        big[n1:, n1:, n1:] = extra
        t = big
    a = Algebra(PrimeField(p), t)
    assert structure_analysis(a).simple_component_sizes == tuple(sorted(p**d for d in degs))


def test_primitive_element_examples():
    a = quotient(7, [-3, 0, 1])
    res = primitive_element(a)
    assert isinstance(res, Found)
    assert minimal_polynomial(res.value).deg == 2
    res = primitive_element(a, a.full_space())
    assert isinstance(res, Found) and np.array_equal(res.value.v, a.one)
    b = quotient(13, [-1, 0, 1])
    res = primitive_element(b)
    if isinstance(res, ZeroDivisor):
        assert_zero_divisor(res, b)
    else:
        assert minimal_polynomial(res.value).deg == 2


def test_fixed_subalgebra_examples():
    a = quotient(7, [-3, 0, 1])
    assert fixed_subalgebra(a, [identity_map(a)]) == a.full_space()
    neg = AlgebraMap(a, a, np.array([[1, 0], [0, 6]]), kind="automorphism")
    assert fixed_subalgebra(a, [neg]) == a.scalars()
    b = split_algebra(5, 3)
    swap = map_from_permutation(b, [1, 0, 2])
    fixed = fixed_subalgebra(b, [swap])
    # Eigenspace for eigenvalue 1 of a transposition on F_5^3 is 2-dimensional.
    assert fixed.dim == 2
    assert fixed.contains([1, 1, 0]) and fixed.contains([0, 0, 1])


def test_restrict_gives_subalgebra():
    rng = random.Random(3)
    a = quotient(11, [1, 3, 0, 2, 1])
    for _ in range(5):
        g = a.vec([rng.randrange(11) for _ in range(4)])
        sub = subalgebra_generated(a, [g])
        alg, emb = a.restrict(sub)
        assert alg.dim == sub.dim
        assert emb.is_homomorphism() and rank(emb.matrix, 11) == sub.dim


def test_algebra_map_basics():
    a = split_algebra(7, 3)
    cyc = map_from_permutation(a, [1, 2, 0])
    assert cyc.verify_automorphism(claimed_order=3)
    assert cyc.compose(cyc.inverse()).is_identity()
    assert np.array_equal(cyc.power(3).matrix, np.eye(3, dtype=np.int64))
    for perm in itertools.permutations(range(3)):
        m = map_from_permutation(a, perm)
        assert m.is_homomorphism()
