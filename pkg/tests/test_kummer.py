import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from detfactor.algebra import AlgebraMap, Found, fixed_subalgebra, identity_map, restrict_map
from detfactor.base import Subspace
from detfactor.kummer import (
    CyclicGroup,
    CyclicUnitGroup,
    adjoin_zeta,
    cyclotomic_algebra,
    extend_automorphism,
    factor_cyclotomic,
    fixed_algebra,
    galois_descend,
    kummer_root_extension,
    lagrange_resolvent,
    noncyclic_zero_divisor,
    omega_power,
    teich_cyclic_or_zerodiv,
    teichmuller_resolvent,
    teichmuller_test,
    unit_group_is_cyclic,
)
from detfactor.poly import cyclotomic
from detfactor.semireg import semiregular_or_zero_divisor

from .helpers import assert_zero_divisor, is_automorphism, map_from_permutation, poly, quotient, split_algebra
from .oracles import is_irreducible, mult_order, oracle_check, pmod, trial_factor


def _x_scale(a, c):
    n, p = a.dim, a.p
    return AlgebraMap(a, a, np.diag([pow(c, i, p) for i in range(n)]), kind="automorphism")


def test_adjoin_zeta_r2_is_trivial():
    a = quotient(7, [-3, 0, 1])
    ext = adjoin_zeta(a, 2)
    assert ext.algebra is a
    assert np.array_equal(ext.zeta, (-a.one) % 7)
    assert list(ext.delta) == [1]


def test_adjoin_zeta_cube_roots():
    a = quotient(7, [0, 1])
    ext = adjoin_zeta(a, 3)
    e, z = ext.algebra, ext.zeta
    assert e.dim == 2
    assert not np.any((e.mul(z, z) + z + e.one) % 7)
    for a_, rho in ext.delta.items():
        assert np.array_equal(rho(z), e.power(z, a_))


def test_sylow_exponent_counts_extension_components():
    ext = adjoin_zeta(quotient(13, [0, 1]), 3)
    # F_13 holds the cube roots of unity, so E = F_13^2 and each factor adds v_3(12) = 1.
    assert ext.sizes == (13, 13)
    assert ext.t == 2


def test_omega_power_examples():
    ext = adjoin_zeta(quotient(13, [0, 1]), 3)
    e = ext.algebra
    g = ext.zeta
    assert np.array_equal(omega_power(ext, 1, g), g)
    assert np.array_equal(omega_power(ext, 4, g), g)
    assert np.array_equal(omega_power(ext, 2, e.one), e.one)
    assert np.array_equal(omega_power(ext, 2, g), e.power(g, 2))


def test_teichmuller_test_examples():
    ext = adjoin_zeta(quotient(13, [0, 1]), 3)
    assert teichmuller_test(ext, ext.algebra.one)
    assert teichmuller_test(ext, ext.zeta)
    ext2 = adjoin_zeta(quotient(13, [-2, 0, 0, 0, 1]), 2)
    a = ext2.algebra
    x = a.basis_vec(1)
    # x^4 = 2 has order 12 in F_13^*, so x has order 48; its 2-part x^3 passes.
    assert teichmuller_test(ext2, a.power(x, 3))


def test_teich_cyclic_or_zerodiv():
    a = split_algebra(13, 2)
    ext = adjoin_zeta(a, 2)
    u = np.array([5, 5])
    assert teich_cyclic_or_zerodiv(ext, u, u) == Found(1)
    assert teich_cyclic_or_zerodiv(ext, u, a.one) == Found(0)
    # v = (5, 5^3): no j has j = 1 and j = 3 mod 4 at once (brute force below).
    v = np.array([5, 8])
    assert not any(pow(5, j, 13) == 5 and pow(5, j, 13) == 8 for j in range(4))
    res = teich_cyclic_or_zerodiv(ext, u, v)
    assert_zero_divisor(res, a)


def test_kummer_root_extension_trivial_c():
    ext = adjoin_zeta(quotient(7, [0, 1]), 3)
    k = kummer_root_extension(ext, ext.algebra.one, 3)
    assert k.algebra.dim == 3 * ext.algebra.dim
    assert k.sigma.multiplicative_order(cap=3) == 3
    assert np.array_equal(k.sigma(k.root), k.algebra.mul(k.embed(ext.zeta), k.root))


@pytest.mark.parametrize("p,r", [(7, 2), (7, 3), (11, 5), (13, 3), (13, 2), (29, 7)])
def test_kummer_fixed_algebra_is_base(p, r):
    a = quotient(p, [1, 1, 0, 1]) if p != 29 else quotient(p, [3, 1])
    ext = adjoin_zeta(a, r)
    # The zeta power is a Teichmuller element of E.
    c = ext.zeta
    k = kummer_root_extension(ext, c, r)
    assert np.array_equal(k.sigma.power(r)(k.root), k.root)
    fixed = fixed_subalgebra(k.algebra, list(k.lifted_delta.values()) + [k.sigma])
    base_in_k = (k.embed.matrix @ ext.embed.matrix) % p
    assert fixed == Subspace(p, k.algebra.dim, base_in_k.T)


def test_lagrange_resolvent_examples():
    a = quotient(7, [-3, 0, 1])
    neg = _x_scale(a, 6)
    x = lagrange_resolvent(a, neg, (-a.one) % 7, order=2)
    assert np.array_equal(neg(x), (-x) % 7) and np.any(x)
    # x^3 - 2 is irreducible mod 13 and x -> 3x has order 3.
    assert is_irreducible([-2, 0, 0, 1], 13) and mult_order(3, 13) == 3
    b = quotient(13, [-2, 0, 0, 1])
    tau = _x_scale(b, 3)
    xi = 3 * b.one % 13
    y = lagrange_resolvent(b, tau, xi, order=3)
    assert np.any(y) and np.array_equal(tau(y), b.mul(xi, y))


def test_teichmuller_resolvent_quadratic():
    a = quotient(7, [-3, 0, 1])
    res = teichmuller_resolvent(a, _x_scale(a, 6), order=2)
    x, c = res.x, res.c
    assert np.array_equal(_x_scale(a, 6)(x), (-x) % 7)
    assert np.array_equal(a.mul(x, x), c)
    assert a.span([c]) == a.scalars()
    # c is a non-residue: c^((7 - 1)/2) = -1.
    assert pow(int(c[0]), 3, 7) == 6
    assert res.phi is not None and res.phi.is_homomorphism()
    assert res.kummer.algebra.dim == res.ext.algebra.dim


@pytest.mark.parametrize("p,r,n", [(13, 3, 3), (7, 3, 6), (11, 5, 5)])
def test_teichmuller_resolvent_split_cycles(p, r, n):
    a = split_algebra(p, n)
    perm = [(i + n // r) % n for i in range(n)] if n % r == 0 else None
    tau = map_from_permutation(a, perm)
    tau = AlgebraMap(a, a, tau.matrix, kind="automorphism", order=r)
    res = teichmuller_resolvent(a, tau, order=r)
    e = res.ext
    assert np.array_equal(e.lift_map(tau)(res.x), e.algebra.mul(e.zeta, res.x))
    assert res.phi.is_homomorphism() and res.phi.is_injective()
    assert res.kummer.algebra.dim == e.algebra.dim


def test_extend_identity_over_order_two_field():
    a = quotient(7, [-3, 0, 1])
    tau = AlgebraMap(a, a, _x_scale(a, 6).matrix, kind="automorphism", order=2)
    fixed, emb = fixed_algebra(a, tau)
    res = extend_automorphism(a, tau, identity_map(fixed))
    assert isinstance(res, Found)
    mu = res.value
    # The fixed algebra must be (A_tau)_id = A_tau, so the extension is tau itself.
    assert np.array_equal(mu.matrix, tau.matrix)
    assert fixed_subalgebra(a, [mu]) == fixed_subalgebra(a, [tau])


def test_extend_automorphism_restricts():
    a = split_algebra(11, 6)
    cyc = map_from_permutation(a, [1, 2, 3, 4, 5, 0])
    tau = AlgebraMap(a, a, cyc.power(2).matrix, kind="automorphism", order=3)
    fixed, emb = fixed_algebra(a, tau)
    # The 6-cycle commutes with tau, so it restricts to the fixed algebra.
    mu = restrict_map(cyc, emb)
    mu = AlgebraMap(fixed, fixed, mu.matrix, kind="automorphism")
    assert is_automorphism(mu, 2)
    res = extend_automorphism(a, tau, mu)
    if isinstance(res, Found):
        ext = res.value
        assert is_automorphism(ext, 6)
        assert np.array_equal(ext.matrix @ emb.matrix % 11, emb.matrix @ mu.matrix % 11)
    else:
        assert_zero_divisor(res, a)


def test_extend_automorphism_over_sextic_field():
    # 2 generates F_13^*, so x^6 - 2 is irreducible; x -> 3x has order 3 and x -> 4x order 6.
    assert is_irreducible([-2, 0, 0, 0, 0, 0, 1], 13)
    a = quotient(13, [-2, 0, 0, 0, 0, 0, 1])
    tau = AlgebraMap(a, a, _x_scale(a, 3).matrix, kind="automorphism", order=3)
    fixed, emb = fixed_algebra(a, tau)
    assert fixed.dim == 2
    mu = AlgebraMap(fixed, fixed, restrict_map(_x_scale(a, 4), emb).matrix, kind="automorphism")
    assert is_automorphism(mu, 2)
    res = extend_automorphism(a, tau, mu)
    assert isinstance(res, Found)
    ext = res.value
    assert is_automorphism(ext, 6)
    assert np.array_equal(ext.matrix @ emb.matrix % 13, emb.matrix @ mu.matrix % 13)
    assert fixed_subalgebra(a, [ext]) == a.scalars()


def test_noncyclic_zero_divisor_cyclotomic_8():
    alg, gens = cyclotomic_algebra(8, 7)
    zd = noncyclic_zero_divisor(alg, gens)
    assert_zero_divisor(zd, alg)
    phi = cyclotomic(8, alg.field)
    g = phi.gcd(poly(7, [int(c) for c in zd.z.v])).monic()
    # Trial division: X^4 + 1 = (X^2 + 3X + 1)(X^2 + 4X + 1) mod 7.
    assert trial_factor([1, 0, 0, 0, 1], 7) == [[1, 3, 1], [1, 4, 1]]
    assert list(g.coeffs) in ([1, 3, 1], [1, 4, 1])


def test_noncyclic_zero_divisor_cyclotomic_12():
    alg, gens = cyclotomic_algebra(12, 11)
    zd = noncyclic_zero_divisor(alg, gens)
    assert_zero_divisor(zd, alg)
    # Trial division: Phi_12 splits into two quadratics mod 11 (11 has order 2 mod 12).
    assert [len(f) - 1 for f in trial_factor([1, 0, -1, 0, 1], 11)] == [2, 2]


def test_noncyclic_rejects_cyclic_group():
    a = split_algebra(7, 3)
    with pytest.raises(CyclicGroup):
        noncyclic_zero_divisor(a, [map_from_permutation(a, [1, 2, 0])])


@pytest.mark.parametrize("r,p", [(8, 7), (12, 7), (15, 7), (24, 5), (21, 13)])
def test_factor_cyclotomic_against_oracle(r, p):
    g = factor_cyclotomic(r, p)
    phi = cyclotomic(r, g.field)
    assert 0 < g.deg < phi.deg and (phi % g).is_zero()
    factors = [list(f.coeffs) for f in oracle_check(phi, seed=r * p)]
    from .oracles import is_product_of

    assert is_product_of(list(g.coeffs), factors, p)


def test_factor_cyclotomic_frozen_examples():
    g = factor_cyclotomic(8, 7)
    assert list(g.coeffs) in ([1, 3, 1], [1, 4, 1])
    g = factor_cyclotomic(12, 7)
    # Trial division: Phi_12 = (X^2 + 2)(X^2 + 4) mod 7.
    assert not pmod([1, 0, -1, 0, 1], list(g.coeffs), 7)
    g = factor_cyclotomic(15, 7)
    # Randomized splitter: Phi_15 mod 7 is two quartics.
    assert list(g.coeffs) in ([2, 1, 4, 2, 1], [4, 1, 2, 4, 1])


def test_factor_cyclotomic_rejects_cyclic():
    assert unit_group_is_cyclic(9) and not unit_group_is_cyclic(8)
    with pytest.raises(CyclicUnitGroup):
        factor_cyclotomic(9, 7)


def test_galois_descend_trivial_cases():
    a = split_algebra(7, 6)
    cyc = map_from_permutation(a, [1, 2, 3, 4, 5, 0])
    group = semiregular_or_zero_divisor(a, [cyc]).value
    res = galois_descend(a, group, a.full_space())
    assert isinstance(res, Found) and is_automorphism(res.value, 6)
    e = a.basis_vec(0)
    res = galois_descend(a, group, a.span([e]), e)
    assert isinstance(res, Found) and res.value.source.dim == 1


def _regular_s3(a):
    """Left multiplication of S_3 on its six elements, as coordinate permutations."""
    import itertools

    elems = list(itertools.permutations(range(3)))
    idx = {g: i for i, g in enumerate(elems)}

    def left(h):
        return map_from_permutation(a, [idx[tuple(h[g[k]] for k in range(3))] for g in elems])

    return left((1, 0, 2)), left((1, 2, 0))


def test_galois_descend_metacyclic():
    """F_7^6 with the regular (transitive, noncyclic) action of S_3; B the fixed algebra of the 3-cycle."""
    a = split_algebra(7, 6)
    swap, rot = _regular_s3(a)
    res = semiregular_or_zero_divisor(a, [swap, rot])
    assert isinstance(res, Found) and len(res.value) == 6
    group = res.value
    sub = fixed_subalgebra(a, [rot])
    assert sub.dim == 2
    out = galois_descend(a, group, sub)
    if isinstance(out, Found):
        assert is_automorphism(out.value, 2)
    else:
        assert_zero_divisor(out)


@given(st.sampled_from([(8, 7), (8, 11), (12, 7), (12, 13), (15, 7)]))
def test_cyclotomic_algebra_group_is_unit_group(case):
    r, p = case
    alg, gens = cyclotomic_algebra(r, p)
    res = semiregular_or_zero_divisor(alg, gens)
    assert isinstance(res, Found)
    units = sum(1 for a in range(1, r) if np.gcd(a, r) == 1)
    assert len(res.value) == units == alg.dim
    assert fixed_subalgebra(alg, gens) == alg.scalars()
