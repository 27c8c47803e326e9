"""Semiregular automorphism groups of commutative semisimple algebras.

A group G of automorphisms is semiregular when no non-identity element fixes
a nontrivial ideal; equivalently dim A = |G| dim A_G and A is free of rank |G|
over the fixed algebra A_G.  The functions here either list such a group,
recover the subgroup fixing a given subalgebra, or return a zero divisor.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .algebra import (
    AlgElem,
    Algebra,
    AlgebraMap,
    Dichotomy,
    Found,
    InvariantViolation,
    ZeroDivisor,
    ZeroDivisorFound,
    fixed_subalgebra,
    free_coordinates,
    identity_map,
    primitive_element,
    zero_divisor_from,
)
from .base import Subspace, kernel
from .zerodiv import berlekamp_zero_divisor, free_basis_or_zero_divisor

__all__ = [
    "semiregular_or_zero_divisor",
    "galois_subgroup_or_zero_divisor",
    "enumerate_group",
    "map_key",
    "is_semiregular_group",
    "small_field",
]


def map_key(sigma: AlgebraMap) -> tuple:
    return tuple(int(c) for c in sigma.matrix.flat)


def enumerate_group(alg: Algebra, gens: Sequence[AlgebraMap], cap: int) -> list[AlgebraMap]:
    """Breadth-first closure of ``gens`` under composition, stopping past ``cap`` elements."""
    ident = identity_map(alg)
    out = [ident]
    seen = {map_key(ident)}
    head = 0
    while head < len(out) and len(out) <= cap:
        cur = out[head]
        head += 1
        for g in gens:
            nxt = AlgebraMap(alg, alg, (g.matrix @ cur.matrix) % alg.p, kind="automorphism")
            key = map_key(nxt)
            if key not in seen:
                seen.add(key)
                out.append(nxt)
                if len(out) > cap:
                    break
    return out


def _with_orders(group: list[AlgebraMap]) -> list[AlgebraMap]:
    n = len(group)
    return [AlgebraMap(g.source, g.target, g.matrix, kind="automorphism", order=g.multiplicative_order(cap=n)) for g in group]


def semiregular_or_zero_divisor(alg: Algebra, gamma: Sequence[AlgebraMap]) -> Dichotomy:
    """Found(all elements of the group generated by ``gamma``) or a zero divisor.

    dim A <= |G| dim A_G always, with equality exactly for semiregular G, so
    listing the group up to m = dim A / dim A_G decides the question.  The
    free-basis step is only consulted when m is not an integer, where A
    cannot be free over A_G and it must return a zero divisor.
    """
    fixed = fixed_subalgebra(alg, list(gamma))
    if alg.dim % fixed.dim:
        res = free_basis_or_zero_divisor(alg, fixed)
        if isinstance(res, ZeroDivisor):
            return res
        raise InvariantViolation("free basis over the fixed algebra with fractional rank")
    m = alg.dim // fixed.dim
    group = enumerate_group(alg, gamma, m)
    if len(group) == m:
        return Found(_with_orders(group))
    if len(group) < m:
        raise InvariantViolation("group smaller than the rank over its fixed algebra")
    # Two of the m + 1 listed elements differ by a map fixing a component.
    for i in range(len(group)):
        for j in range(i):
            sigma = group[i].compose(group[j].inverse())
            own = fixed_subalgebra(alg, [sigma])
            res = free_basis_or_zero_divisor(alg, own)
            if isinstance(res, ZeroDivisor):
                return res
    raise InvariantViolation("no pair of group elements exposed a fixed component")


def is_semiregular_group(alg: Algebra, group: Sequence[AlgebraMap]) -> bool:
    """dim A = |G| dim A_G for the listed group G."""
    fixed = fixed_subalgebra(alg, list(group))
    return alg.dim == len(group) * fixed.dim


def small_field(alg: Algebra) -> bool:
    """The primitive-element route needs |k| >= (dim A)^2."""
    return alg.p < alg.dim * alg.dim


# ---------------------------------------------------------------------------
# polynomials with algebra coefficients (ascending lists of vectors)
# ---------------------------------------------------------------------------


def _peval(alg: Algebra, coeffs: list[np.ndarray], y: np.ndarray) -> np.ndarray:
    out = alg.zeros()
    for c in reversed(coeffs):
        out = (alg.mul(out, y) + c) % alg.p
    return out


def _pdivmod(alg: Algebra, f: list[np.ndarray], g: list[np.ndarray]) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Division by a monic g."""
    p = alg.p
    rem = [c.copy() for c in f]
    dg = len(g) - 1
    if len(rem) - 1 < dg:
        return [alg.zeros()], rem
    quot = [alg.zeros() for _ in range(len(rem) - dg)]
    for k in range(len(rem) - 1, dg - 1, -1):
        lead = rem[k]
        if not np.any(lead):
            continue
        quot[k - dg] = lead
        for i in range(dg + 1):
            rem[k - dg + i] = (rem[k - dg + i] - alg.mul(lead, g[i])) % p
    return quot, rem[:dg]


def _divide_linear(alg: Algebra, f: list[np.ndarray], root: np.ndarray) -> list[np.ndarray]:
    one = alg.one
    quot, rem = _pdivmod(alg, f, [(-root) % alg.p, one])
    if any(np.any(r) for r in rem):
        raise InvariantViolation("linear factor does not divide")
    return quot


def _free_powers(alg: Algebra, sub: Subspace, x: np.ndarray, count: int) -> list[np.ndarray]:
    powers = [alg.power(x, i) for i in range(count)]
    res = free_basis_or_zero_divisor(alg, sub, powers)
    if isinstance(res, ZeroDivisor):
        raise ZeroDivisorFound(res)
    if len(res.value) != count or any(np.any(u != v) for u, v in zip(res.value, powers)):
        # A generator spanning A with fewer than rank-many powers is impossible.
        raise InvariantViolation("powers of a primitive element are not a free basis")
    return powers


def _min_relation(alg: Algebra, sub: Subspace, powers: list[np.ndarray], x: np.ndarray) -> list[np.ndarray]:
    """Monic polynomial over ``sub`` of degree len(powers) killing x."""
    d = len(powers)
    top = alg.mul(powers[-1], x)
    coeffs = free_coordinates(alg, sub, powers, top)  # (d, n)
    return [(-coeffs[i]) % alg.p for i in range(d)] + [alg.one.copy()]


def _nonunit_factor(alg: Algebra, factors: Sequence[np.ndarray]) -> ZeroDivisor:
    for f in factors:
        if np.any(f) and not alg.is_unit(f):
            return zero_divisor_from(AlgElem(alg, f))
    raise InvariantViolation("product of units vanished")


def galois_subgroup_or_zero_divisor(alg: Algebra, group: Sequence[AlgebraMap], sub: Subspace) -> Dichotomy:
    """Found(H) with H <= G and A_H = ``sub``, or a zero divisor.

    ``group`` is a semiregular group listed in full and ``sub`` a subalgebra
    containing A_G.
    """
    group = list(group)
    try:
        return _galois_subgroup(alg, group, sub)
    except ZeroDivisorFound as exc:
        return exc.zd


def _pointwise_stabilizer(alg: Algebra, group: list[AlgebraMap], sub: Subspace) -> list[AlgebraMap]:
    return [g for g in group if all(np.all(g(b) == b) for b in sub.basis)]


def _galois_subgroup(alg: Algebra, group: list[AlgebraMap], sub: Subspace) -> Dichotomy:
    p, n = alg.p, alg.dim
    fixed = fixed_subalgebra(alg, group)
    if not sub.contains_space(fixed):
        raise ValueError("subalgebra does not contain the fixed algebra of the group")
    if sub.dim == n:
        return Found([identity_map(alg)])
    if small_field(alg):
        zd = berlekamp_zero_divisor(alg)
        if zd is not None:
            return zd
        # A field: ordinary Galois correspondence.
        h = _pointwise_stabilizer(alg, group, sub)
        if fixed_subalgebra(alg, h) != sub:
            raise InvariantViolation("Galois correspondence failed in a field")
        return Found(h)
    prim = primitive_element(alg)
    if isinstance(prim, ZeroDivisor):
        return prim
    x = prim.value.v
    d = len(group)
    if n % sub.dim:
        res = free_basis_or_zero_divisor(alg, sub)
        if isinstance(res, ZeroDivisor):
            return res
        raise InvariantViolation("rank over the subalgebra is not an integer")
    m = n // sub.dim
    pow_g = _free_powers(alg, fixed, x, d)
    f = _min_relation(alg, fixed, pow_g, x)
    pow_b = _free_powers(alg, sub, x, m)
    g = _min_relation(alg, sub, pow_b, x)
    h, rem = _pdivmod(alg, f, g)
    if any(np.any(c) for c in rem):
        raise InvariantViolation("remainder of f by g is nonzero")
    g_cur, h_cur = g, h
    images = [s(x) for s in group]
    keep: list[int] = []
    other: list[int] = []
    for idx, y in enumerate(images):
        gv = _peval(alg, g_cur, y)
        if not np.any(gv):
            g_cur = _divide_linear(alg, g_cur, y)
            keep.append(idx)
            continue
        hv = _peval(alg, h_cur, y)
        if not np.any(hv):
            h_cur = _divide_linear(alg, h_cur, y)
            other.append(idx)
            continue
        diffs = [(y - images[j]) % p for j in keep + other]
        return _nonunit_factor(alg, [gv, hv] + diffs)
    if len(keep) != m:
        raise InvariantViolation("root bookkeeping lost track of the factor degrees")
    # mu_sigma: sum c_i x^i -> sum c_i (x^sigma)^i with c_i in the subalgebra.
    coords = [free_coordinates(alg, sub, pow_b, e) for e in alg.field.eye(n)]
    maps = []
    for idx in keep:
        y = images[idx]
        ypows = [alg.power(y, i) for i in range(m)]
        cols = []
        for c in coords:
            v = alg.zeros()
            for i in range(m):
                v = (v + alg.mul(c[i], ypows[i])) % p
            cols.append(v)
        mat = np.array(cols).T % p
        ker = kernel(mat, p)
        if len(ker):
            return zero_divisor_from(AlgElem(alg, ker[0]))
        mu = AlgebraMap(alg, alg, mat, kind="automorphism")
        if not mu.is_homomorphism():
            raise InvariantViolation("substitution map is not multiplicative")
        maps.append(mu)
    res = semiregular_or_zero_divisor(alg, maps)
    if isinstance(res, ZeroDivisor):
        return res
    hgroup = res.value
    if len(hgroup) != m:
        raise InvariantViolation("substitution maps do not form a group of the expected size")
    res = semiregular_or_zero_divisor(alg, group + hgroup)
    if isinstance(res, ZeroDivisor):
        return res
    if len(res.value) != d:
        raise InvariantViolation("joint group larger than G yet semiregular")
    keys = {map_key(s): s for s in group}
    out = [keys[map_key(hm)] for hm in hgroup]
    if fixed_subalgebra(alg, out) != sub:
        raise InvariantViolation("fixed algebra of the recovered subgroup differs")
    return Found(out)
