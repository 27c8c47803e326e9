import numpy as np
import pytest

from detfactor.algebra import AlgebraMap, Found, fixed_subalgebra
from detfactor.semireg import (
    enumerate_group,
    galois_subgroup_or_zero_divisor,
    is_semiregular_group,
    semiregular_or_zero_divisor,
)

from .helpers import assert_zero_divisor, map_from_permutation, quotient, split_algebra
from .oracles import is_irreducible, mult_order


def _x_scale(a, c):
    """x -> c x on F_p[x]/(x^n - a)."""
    n, p = a.dim, a.p
    return AlgebraMap(a, a, np.diag([pow(c, i, p) for i in range(n)]), kind="automorphism")


def test_field_with_negation():
    a = quotient(7, [-3, 0, 1])
    res = semiregular_or_zero_divisor(a, [_x_scale(a, 6)])
    assert isinstance(res, Found) and len(res.value) == 2
    assert sorted(g.order for g in res.value) == [1, 2]


def test_partial_swap_gives_zero_divisor():
    a = split_algebra(5, 3)
    res = semiregular_or_zero_divisor(a, [map_from_permutation(a, [1, 0, 2])])
    assert_zero_divisor(res, a)


def test_empty_generators():
    a = split_algebra(5, 2)
    res = semiregular_or_zero_divisor(a, [])
    assert isinstance(res, Found) and len(res.value) == 1
    assert res.value[0].is_identity()


def test_transitive_cycle_is_semiregular():
    a = split_algebra(7, 4)
    res = semiregular_or_zero_divisor(a, [map_from_permutation(a, [1, 2, 3, 0])])
    assert isinstance(res, Found) and len(res.value) == 4
    assert is_semiregular_group(a, res.value)
    assert not is_semiregular_group(a, enumerate_group(a, [map_from_permutation(a, [1, 0, 2, 3])], 4))


def test_galois_subgroup_trivial_cases():
    a = quotient(7, [-3, 0, 1])
    group = semiregular_or_zero_divisor(a, [_x_scale(a, 6)]).value
    res = galois_subgroup_or_zero_divisor(a, group, a.full_space())
    assert isinstance(res, Found) and len(res.value) == 1
    res = galois_subgroup_or_zero_divisor(a, group, a.scalars())
    assert isinstance(res, Found) and len(res.value) == 2


def test_galois_subgroup_quartic_kummer_field():
    # x^4 - 2 is irreducible over F_13 (trial division), and 5 has order 4 mod 13.
    assert is_irreducible([-2, 0, 0, 0, 1], 13) and mult_order(5, 13) == 4
    a = quotient(13, [-2, 0, 0, 0, 1])
    sigma = _x_scale(a, 5)
    group = semiregular_or_zero_divisor(a, [sigma]).value
    assert len(group) == 4
    sub = fixed_subalgebra(a, [sigma.power(2)])
    assert sub == a.span([[1, 0, 0, 0], [0, 0, 1, 0]])
    res = galois_subgroup_or_zero_divisor(a, group, sub)
    assert isinstance(res, Found) and len(res.value) == 2
    assert fixed_subalgebra(a, res.value) == sub


def test_galois_subgroup_split_case():
    a = split_algebra(11, 6)
    cyc = map_from_permutation(a, [1, 2, 3, 4, 5, 0])
    group = semiregular_or_zero_divisor(a, [cyc]).value
    sub = fixed_subalgebra(a, [cyc.power(3)])
    res = galois_subgroup_or_zero_divisor(a, group, sub)
    if isinstance(res, Found):
        assert fixed_subalgebra(a, res.value) == sub
    else:
        assert_zero_divisor(res, a)


def test_galois_subgroup_requires_fixed_algebra():
    a = split_algebra(7, 4)
    group = semiregular_or_zero_divisor(a, [map_from_permutation(a, [1, 2, 3, 0])]).value
    with pytest.raises(ValueError):
        galois_subgroup_or_zero_divisor(a, group, a.span([a.basis_vec(0)]))
