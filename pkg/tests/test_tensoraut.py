import numpy as np
import pytest

from detfactor.algebra import AlgebraMap, Found, ZeroDivisor, fixed_subalgebra, identity_map
from detfactor.tensoraut import (
    Budget,
    RecursionBudgetExceeded,
    bring_down_automorphism,
    construct_subalgebra_automorphism,
    essential_tensor_power,
    evdokimov,
    factor_or_automorphism,
    kummer_embed_or_zerodiv,
    left_right_witness,
    main_decompose,
)
from detfactor.zerodiv import free_basis_or_zero_divisor

from .helpers import assert_zero_divisor, is_automorphism, poly, quotient, roots_poly, split_algebra
from .oracles import is_product_of, oracle_check


def _free(a, sub=None):
    sub = a.scalars() if sub is None else sub
    return free_basis_or_zero_divisor(a, sub).value


def _neg(a):
    return AlgebraMap(a, a, np.diag([1, a.p - 1]), kind="automorphism", order=2)


def test_essential_square_of_quadratic_field():
    a = quotient(7, [-3, 0, 1])
    etp = essential_tensor_power(a, a.scalars(), _free(a), 2)
    assert etp.algebra.dim == 2 * 1 * 1
    assert is_automorphism(etp.cycle(), 2)


def test_essential_square_rank_six():
    a = quotient(11, [1, 2, 0, 1])
    etp = essential_tensor_power(a, a.scalars(), _free(a), 2)
    assert etp.algebra.dim == 6


def test_essential_first_power_is_identity():
    a = quotient(11, [1, 2, 0, 1])
    etp = essential_tensor_power(a, a.scalars(), _free(a), 1)
    assert etp.algebra.dim == a.dim
    assert np.array_equal(etp.embeddings[0].matrix, np.eye(3, dtype=np.int64))


def test_essential_power_permutations_are_semiregular():
    a = quotient(13, [1, 0, 2, 1])
    etp = essential_tensor_power(a, a.scalars(), _free(a), 3)
    assert etp.algebra.dim == 6
    cyc = etp.cycle()
    assert is_automorphism(cyc, 3)
    swap = etp.permutation([1, 0, 2])
    assert is_automorphism(swap, 2)
    # S_3 acts semiregularly: dim = |S_3| times the fixed dimension.
    assert fixed_subalgebra(etp.algebra, [cyc, swap]).dim == 1


def test_left_right_witness_on_whole_square():
    a = quotient(7, [-3, 0, 1])
    etp = essential_tensor_power(a, a.scalars(), _free(a), 2)
    assert left_right_witness(etp, etp.algebra.one) == 1


def test_kummer_embed_injective():
    d = quotient(7, [-3, 0, 1])
    a, emb = d.restrict(d.scalars())
    x = d.vec([0, 3])  # (3x)^2 = -1 lies in F_7
    res = kummer_embed_or_zerodiv(d, emb, 2, x)
    assert isinstance(res, Found)
    kum, phi = res.value
    assert phi.is_homomorphism() and phi.is_injective()
    assert np.array_equal(phi(kum.root), x)


def test_kummer_embed_collapsed_component():
    d = split_algebra(7, 3)
    a, emb = d.restrict(d.span([[1, 1, 0], [0, 0, 1]]))
    x = d.vec([1, 6, 1])  # x^2 = 1, x outside A, but the third factor sees x = 1
    res = kummer_embed_or_zerodiv(d, emb, 2, x)
    assert isinstance(res, ZeroDivisor)
    assert_zero_divisor(res, d)


def test_bring_down_identity_embedding():
    a = quotient(7, [-3, 0, 1])
    tau = _neg(a)
    res = bring_down_automorphism(a, tau, identity_map(a))
    assert isinstance(res, Found)
    out = res.value
    assert out.space.dim == 2
    assert np.array_equal(out.tau.matrix, tau.matrix)


def test_bring_down_from_essential_square():
    a = quotient(11, [-1, 0, 1])
    etp = essential_tensor_power(a, a.scalars(), _free(a), 2)
    res = bring_down_automorphism(etp.algebra, etp.cycle(), etp.embeddings[0])
    if isinstance(res, ZeroDivisor):
        assert_zero_divisor(res, a)
        return
    out = res.value
    assert out.space.dim == 2
    tau = out.tau
    assert is_automorphism(tau, 2)
    # Semiregular: dim C = 2 dim C_tau.
    assert fixed_subalgebra(out.algebra, [tau]).dim == 1


def test_construct_subalgebra_automorphism_field():
    a = quotient(7, [-3, 0, 1])
    res = construct_subalgebra_automorphism(a, a.scalars(), 2)
    assert isinstance(res, Found)
    out = res.value
    assert out.space.dim == 2
    # The unique nontrivial automorphism of F_49 over F_7 is x -> -x.
    assert np.array_equal(out.embedding.matrix @ out.tau.matrix % 7, _neg(a).matrix @ out.embedding.matrix % 7)
    assert fixed_subalgebra(out.algebra, [out.tau]).dim == 1


def test_construct_subalgebra_automorphism_split():
    a = quotient(5, [-1, 0, 1])
    res = construct_subalgebra_automorphism(a, a.scalars(), 2)
    if isinstance(res, ZeroDivisor):
        assert_zero_divisor(res, a)
    else:
        assert is_automorphism(res.value.tau, 2)


def test_construct_subalgebra_automorphism_split_quartic():
    a = split_algebra(13, 4)
    res = construct_subalgebra_automorphism(a, a.scalars(), 2)
    if isinstance(res, ZeroDivisor):
        assert_zero_divisor(res, a)
    else:
        out = res.value
        assert is_automorphism(out.tau, 2)
        assert out.space.contains_space(a.scalars())


def test_evdokimov_examples():
    a = quotient(5, [0, 1])
    res = evdokimov(a)
    assert isinstance(res, Found) and res.value.is_identity()
    b = quotient(7, [-3, 0, 1])
    res = evdokimov(b)
    assert isinstance(res, Found)
    assert np.array_equal(res.value.matrix, _neg(b).matrix)
    c = quotient(5, [0, -1, 0, 1])
    res = evdokimov(c)
    if isinstance(res, ZeroDivisor):
        assert_zero_divisor(res, c)
    else:
        assert is_automorphism(res.value, 3)
        assert fixed_subalgebra(c, [res.value]) == c.scalars()


@pytest.mark.parametrize("coeffs,p", [([2, 1, 0, 0, 0, 1], 41), ([3, 0, 1, 0, 0, 0, 1], 43), ([5, 0, 0, 1], 61)])
def test_evdokimov_on_fields_and_mixed(coeffs, p):
    a = quotient(p, coeffs)
    res = evdokimov(a)
    if isinstance(res, ZeroDivisor):
        assert_zero_divisor(res, a)
    else:
        assert is_automorphism(res.value, a.dim)
        assert fixed_subalgebra(a, [res.value]) == a.scalars()


def test_main_decompose_examples():
    comps = main_decompose(quotient(5, [0, 1]))
    assert len(comps) == 1 and comps[0].sigma.is_identity()
    comps = main_decompose(quotient(7, [-3, 0, 1]))
    assert len(comps) == 1 and is_automorphism(comps[0].sigma, 2)
    a = quotient(5, [-1, 0, 1])
    comps = main_decompose(a)
    assert sum(c.algebra.dim for c in comps) == 2
    assert np.array_equal(sum(c.idempotent for c in comps) % 5, a.one)
    for c in comps:
        assert is_automorphism(c.sigma, c.algebra.dim)


def test_main_decompose_refines_true_factorization():
    f = poly(11, [1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 3])  # degree 10, checked squarefree below
    assert f.gcd(f.derivative()).is_const()
    a = quotient(11, list(f.coeffs))
    comps = main_decompose(a)
    factors = [list(g.coeffs) for g in oracle_check(f, 0)]
    for c in comps:
        g = f.gcd(poly(11, [int(v) for v in (a.one - c.idempotent) % 11]))
        cofactor = f // g
        # Each ideal corresponds to a product of true irreducible factors.
        assert is_product_of(list(cofactor.monic().coeffs), factors, 11)
        assert is_automorphism(c.sigma, c.algebra.dim)


def test_factor_or_automorphism_examples():
    out = factor_or_automorphism(poly(7, [-3, 0, 1]))
    assert out.kind == "automorphism" and is_automorphism(out.automorphism, 2)
    f = poly(5, [-1, 0, 1])
    out = factor_or_automorphism(f)
    if out.factor is not None:
        assert out.factor in (poly(5, [1, 1]), poly(5, [-1, 1]))
    else:
        assert is_automorphism(out.automorphism, 2)


@pytest.mark.parametrize("j,p", [(1, 11), (2, 13), (3, 17), (5, 19)])
def test_factor_or_automorphism_legendre_family(j, p):
    """Roots are the Legendre lambda values of the elliptic curves with j-invariant j."""
    base = poly(p, [1, -1, 1])
    c = j * pow(256, -1, p) % p
    f = base * base * base - poly(p, [0, 0, c]) * poly(p, [-1, 1]) * poly(p, [-1, 1])
    if not f.gcd(f.derivative()).is_const():
        pytest.skip("this member of the family is not squarefree")
    out = factor_or_automorphism(f)
    if out.factor is not None:
        g = out.factor
        assert 0 < g.deg < 6 and (f % g).is_zero()
        assert is_product_of(list(g.coeffs), [list(h.coeffs) for h in oracle_check(f, j)], p)
    else:
        assert is_automorphism(out.automorphism, 6)


def test_factor_or_automorphism_rejects_bad_input():
    from detfactor.poly import NotSquarefree

    with pytest.raises(NotSquarefree):
        factor_or_automorphism(poly(7, [1, 2, 1]))
    with pytest.raises(ValueError):
        factor_or_automorphism(poly(7, [3]))


def test_budget_cap():
    with pytest.raises(RecursionBudgetExceeded):
        factor_or_automorphism(roots_poly(13, [1, 2, 3, 4, 5, 6]), 1)
    b = Budget.for_instance(4, 1, 8)
    assert b.limit == 8 * 4**2
    b.charge(10)
    assert b.peak == 10
    with pytest.raises(RecursionBudgetExceeded):
        b.charge(b.limit + 1)
