"""Factoring fully split polynomials when p - 1 has only small prime factors.

Covers k[X]/(Phi_{r_I}) -> B <= A are grown one Kummer element at a time
until B = A.  The known automorphisms X -> X^a of the cyclotomic ring then
either split A or give it an automorphism of order dim A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import (
    AlgElem,
    Algebra,
    AlgebraMap,
    Dichotomy,
    Found,
    InvariantViolation,
    ZeroDivisor,
    from_polynomial,
    idempotent_of,
    subalgebra_generated,
)
from .base import PrimeField, Subspace, factor_int, kernel, rank, solve_columns
from .kummer import CyclicGroup, noncyclic_zero_divisor
from .poly import Poly, cyclotomic, squarefree_part_check
from .semireg import semiregular_or_zero_divisor
from .zerodiv import berlekamp_zero_divisor, free_basis_or_zero_divisor, refine_invariant_decomposition

__all__ = [
    "DEFAULT_SMOOTH_BOUND",
    "SmoothBoundExceeded",
    "NotSplit",
    "CyclotomicCover",
    "KummerElement",
    "SmoothOutcome",
    "trivial_cover",
    "smooth_kummer_element",
    "cyclotomic_cover_extend",
    "smooth_factor",
]

DEFAULT_SMOOTH_BOUND = 64


class SmoothBoundExceeded(ValueError):
    """p - 1 has a prime factor above the configured bound."""

    def __init__(self, factor: int, bound: int) -> None:
        super().__init__(f"p - 1 has the prime factor {factor} > {bound}")
        self.factor = factor
        self.bound = bound


class NotSplit(ValueError):
    """The polynomial does not split into linear factors over F_p."""


@dataclass
class CyclotomicCover:
    """psi: k[X]/(Phi_{r_I}) -> A, a homomorphism with image ``target``."""

    primes: tuple
    source: Algebra
    target: Subspace
    psi: AlgebraMap

    @property
    def r_i(self) -> int:
        return math.prod(self.primes)

    def generator_image(self) -> np.ndarray:
        """psi(X)."""
        return self.psi(_x_in(self.source, self.r_i))

    def verify(self) -> bool:
        m = self.psi
        if not m.is_homomorphism():
            return False
        return rank(m.matrix, m.p) == self.target.dim and m.image() == self.target


@dataclass
class KummerElement:
    x: np.ndarray
    r: int
    case: str  # "r!=d" or "r=d"


@dataclass
class SmoothOutcome:
    factor: Optional[Poly] = None
    automorphism: Optional[AlgebraMap] = None
    cover: Optional[CyclotomicCover] = None

    @property
    def kind(self) -> str:
        return "factor" if self.factor is not None else "automorphism"


def _cyclotomic_ring(r: int, field: PrimeField) -> Algebra:
    return from_polynomial(cyclotomic(r, field))


def _x_in(c: Algebra, r: int) -> np.ndarray:
    """Class of X in k[X]/(Phi_r) as a coordinate vector."""
    phi = cyclotomic(r, c.field)
    red = Poly.x(c.field) % phi
    v = c.zeros()
    for i, co in enumerate(red.coeffs):
        v[i] = co
    return v


def trivial_cover(alg: Algebra) -> CyclotomicCover:
    """k[X]/(X - 1) onto the scalars."""
    c = _cyclotomic_ring(1, alg.field)
    psi = AlgebraMap(c, alg, alg.one.reshape(-1, 1), kind="homomorphism")
    return CyclotomicCover((), c, alg.scalars(), psi)


def _prime_factors(p: int, bound: int) -> list[int]:
    primes = sorted(factor_int(p - 1))
    for q in primes:
        if q > bound:
            raise SmoothBoundExceeded(q, bound)
    return primes


def _nonunit_pair(alg: Algebra, z: np.ndarray) -> Optional[ZeroDivisor]:
    z = np.asarray(z) % alg.p
    if not np.any(z):
        return None
    ker = kernel(alg.lmat(z), alg.p)
    if len(ker) == 0:
        return None
    return ZeroDivisor(AlgElem(alg, z), AlgElem(alg, ker[0]))


# ---------------------------------------------------------------------------
# Kummer elements
# ---------------------------------------------------------------------------


def smooth_kummer_element(alg: Algebra, sub: Subspace, d: int, bound: int = DEFAULT_SMOOTH_BOUND) -> Dichotomy:
    """Found(KummerElement) or a zero divisor of A, for A free of rank d over B."""
    p = alg.p
    primes = _prime_factors(p, bound)
    # At most sum(r - 1) shifts are bad for a fixed pair of distinct eigenvalues.
    span = sum(q - 1 for q in primes) + 1
    if p <= 3 or p < span + 1:
        zd = berlekamp_zero_divisor(alg)
        if zd is None:
            raise ValueError("algebra is a field; nothing to split")
        return zd
    y = next((e for e in alg.field.eye(alg.dim) if not sub.contains(e)), None)
    if y is None:
        raise ValueError("B equals A")
    z = None
    for a in range(span):
        cand = (y + a * alg.one) % p
        zd = _nonunit_pair(alg, cand)
        if zd is not None:
            return zd
        if all(not sub.contains(alg.power(cand, q)) for q in primes):
            z = cand
            break
    if z is None:
        raise InvariantViolation("no shift avoids every r-th power coincidence")
    # Least exponent E | p - 1 with z^E in B; it is composite.
    n = p - 1
    e = n
    for q in primes:
        while e % q == 0 and sub.contains(alg.power(z, e // q)):
            e //= q
    factors = []
    for q, k in factor_int(e).items():
        factors.extend([q] * k)
    if len(factors) < 2:
        raise InvariantViolation("minimal exponent into B is prime")
    other = [q for q in sorted(set(factors)) if q != d]
    if other:
        r = other[0]
        x = alg.power(z, e // r)
        case = "r!=d"
    else:
        r = d
        x = alg.power(z, e // (r * r))
        case = "r=d"
    cof = n
    while cof % r == 0:
        cof //= r
    x = alg.power(x, cof)
    if case == "r!=d":
        ok = not sub.contains(x) and sub.contains(alg.power(x, r))
    else:
        ok = not sub.contains(alg.power(x, r)) and sub.contains(alg.power(x, r * r))
    if not ok:
        raise InvariantViolation("Kummer element fails its membership conditions")
    return Found(KummerElement(x, r, case))


# ---------------------------------------------------------------------------
# growing covers
# ---------------------------------------------------------------------------


def _within(cover: CyclotomicCover, emb: AlgebraMap) -> CyclotomicCover:
    """Re-express a cover landing in emb's image in emb's source coordinates."""
    p = emb.p
    mat = solve_columns(emb.matrix, cover.psi.matrix, p)
    if mat is None:
        raise InvariantViolation("cover leaves the subalgebra")
    psi = AlgebraMap(cover.source, emb.source, mat, kind="homomorphism")
    return CyclotomicCover(cover.primes, cover.source, psi.image(), psi)


def _lift_cover(cover: CyclotomicCover, emb: AlgebraMap) -> CyclotomicCover:
    psi = AlgebraMap(cover.source, emb.target, (emb.matrix @ cover.psi.matrix) % emb.p, kind="homomorphism")
    return CyclotomicCover(cover.primes, cover.source, psi.image(), psi)


def _primitive_or_zd(alg: Algebra, zeta: np.ndarray, r: int) -> Optional[ZeroDivisor]:
    """Zero divisor when some zeta^i - 1 (0 < i < r) is a non-unit."""
    for i in range(1, r):
        zd = _nonunit_pair(alg, (alg.power(zeta, i) - alg.one) % alg.p)
        if zd is not None:
            return zd
    return None


def _r_tower(alg: Algebra, x: np.ndarray, r: int) -> int:
    cur, t = np.asarray(x) % alg.p, 0
    while np.any(cur != alg.one):
        cur = alg.power(cur, r)
        t += 1
        if t > 64 * alg.dim:
            raise InvariantViolation("element does not have r-power order")
    return t


def cyclotomic_cover_extend(alg: Algebra, sub: Subspace, cover: CyclotomicCover, bound: int = DEFAULT_SMOOTH_BOUND) -> Dichotomy:
    """Found(cover onto some B' > B) or a zero divisor of A."""
    p = alg.p
    if sub.dim == alg.dim:
        raise ValueError("B must be a proper subalgebra")
    res = free_basis_or_zero_divisor(alg, sub)
    if isinstance(res, ZeroDivisor):
        return res
    d = len(res.value)
    ke = smooth_kummer_element(alg, sub, d, bound)
    if isinstance(ke, ZeroDivisor):
        return ke
    x, r, case = ke.value.x, ke.value.r, ke.value.case
    bx = subalgebra_generated(alg, [x], over=sub)
    if bx.dim < alg.dim:
        bstd, bemb = alg.restrict(bx)
        inner = Subspace(p, bstd.dim, solve_columns(bemb.matrix, sub.basis.T, p).T)
        out = cyclotomic_cover_extend(bstd, inner, _within(cover, bemb), bound)
        if isinstance(out, ZeroDivisor):
            return out.mapped(bemb)
        return Found(_lift_cover(out.value, bemb))
    if case == "r=d":
        return _case_equal(alg, sub, x, r)
    if np.any(alg.power(x, r) != alg.one):
        return _case_twist(alg, sub, x, r, d)
    return _case_root_of_unity(alg, sub, x, r, cover)


def _case_equal(alg: Algebra, sub: Subspace, x: np.ndarray, r: int) -> ZeroDivisor:
    """d = r and A = B[x]: the norm of x against x^r."""
    p = alg.p
    xr = alg.power(x, r)
    bxr = subalgebra_generated(alg, [xr], over=sub)
    if bxr.dim < alg.dim:
        res = free_basis_or_zero_divisor(alg, bxr)
        if isinstance(res, Found):
            raise InvariantViolation("A is free over B[x^r] of non-prime rank")
        return res
    c = alg.power(xr, r)
    if np.all(c == alg.one):
        # x^(r^2) - 1 = (x^r - 1) Phi_r(x^r).
        phi = alg.zeros()
        cur = alg.one.copy()
        for _ in range(r):
            phi = (phi + cur) % p
            cur = alg.mul(cur, xr)
        return ZeroDivisor(AlgElem(alg, phi), AlgElem(alg, (xr - alg.one) % p))
    t = _r_tower(alg, c, r)
    zeta = alg.power(c, r ** (t - 1))
    zd = _primitive_or_zd(alg, zeta, r)
    if zd is not None:
        return zd
    sigma = _twist_map(alg, sub, xr, zeta, r)
    z = alg.one.copy()
    cur = x.copy()
    for _ in range(r):
        z = alg.mul(z, cur)
        cur = sigma(cur)
    if r == 2:
        w = next(b for b in range(p) if (b * b + 1) % p == 0)
        u = (w * z - xr) % p
        return ZeroDivisor(AlgElem(alg, u), AlgElem(alg, (w * z + xr) % p))
    for i in range(r):
        u = (z - alg.mul(alg.power(zeta, i), xr)) % p
        zd = _nonunit_pair(alg, u)
        if zd is not None:
            return zd
    raise InvariantViolation("norm element matches no twist of x^r")


def _twist_map(alg: Algebra, sub: Subspace, y: np.ndarray, zeta: np.ndarray, r: int) -> AlgebraMap:
    """B-linear y^j -> zeta^j y^j on A free over B with basis 1, y, ..., y^(r-1)."""
    p = alg.p
    basis, imgs = [], []
    for j in range(r):
        yj = alg.power(y, j)
        zj = alg.power(zeta, j)
        for b in sub.basis:
            basis.append(alg.mul(b, yj))
            imgs.append(alg.mul(alg.mul(b, zj), yj))
    bm = np.array(basis).T % p
    im = np.array(imgs).T % p
    sol = solve_columns(bm.T, im.T, p)
    if sol is None or rank(bm, p) != alg.dim:
        raise InvariantViolation("powers of y do not form a free basis")
    sigma = AlgebraMap(alg, alg, sol.T, kind="automorphism")
    if not sigma.is_homomorphism():
        raise InvariantViolation("twist is not multiplicative")
    return sigma


def _pure_extension(bstd: Algebra, c: np.ndarray, r: int) -> Algebra:
    """B[X]/(X^r - c), basis beta_t X^j at index j * dim B + t."""
    nb, p = bstd.dim, bstd.p
    bt = bstd.table
    btc = np.tensordot(bt, bstd.rmat(c).T, axes=([2], [0])) % p
    n = nb * r
    tab = bstd.field.zeros((n, n, n))
    for j1 in range(r):
        for j2 in range(r):
            s = j1 + j2
            blk, src = (s, bt) if s < r else (s - r, btc)
            tab[j1 * nb : (j1 + 1) * nb, j2 * nb : (j2 + 1) * nb, blk * nb : (blk + 1) * nb] = src
    one = np.concatenate([bstd.one, bstd.field.zeros(nb * (r - 1))])
    return Algebra(bstd.field, tab, one, check=False, name="pure")


def _case_twist(alg: Algebra, sub: Subspace, x: np.ndarray, r: int, d: int) -> ZeroDivisor:
    """d < r, x^r != 1: twist X -> zeta X on B[X]/(X^r - x^r), which maps onto A."""
    p = alg.p
    powers = [alg.power(x, j) for j in range(d)]
    res = free_basis_or_zero_divisor(alg, sub, generators=powers)
    if isinstance(res, ZeroDivisor):
        return res
    xr = alg.power(x, r)
    t = _r_tower(alg, xr, r)
    zeta = alg.power(xr, r ** (t - 1))
    zd = _primitive_or_zd(alg, zeta, r)
    if zd is not None:
        return zd
    bstd, bemb = alg.restrict(sub)
    coords = solve_columns(bemb.matrix, np.stack([xr, zeta], axis=1), p)
    c_b, zeta_b = coords[:, 0], coords[:, 1]
    k = _pure_extension(bstd, c_b, r)
    nb = bstd.dim
    cols = []
    for j in range(r):
        xj = alg.power(x, j)
        for tt in range(nb):
            cols.append(alg.mul(bemb(bstd.basis_vec(tt)), xj))
    phi = AlgebraMap(k, alg, np.array(cols).T % p, kind="homomorphism")
    if not phi.is_homomorphism():
        raise InvariantViolation("substitution X -> x is not multiplicative")
    tw = []
    for j in range(r):
        zj = bstd.power(zeta_b, j)
        blk = np.zeros((k.dim, nb), dtype=object)
        blk[j * nb : (j + 1) * nb, :] = bstd.lmat(zj)
        tw.append(blk)
    sigma = AlgebraMap(k, k, np.concatenate(tw, axis=1) % p, kind="automorphism")
    ker = kernel(phi.matrix, p)
    e = idempotent_of(k, Subspace(p, k.dim, ker)) if len(ker) else k.zeros()
    f = (k.one - e) % p
    cur = f
    for _ in range(1, r):
        cur = sigma(cur)
        g = k.mul(f, cur)
        if np.any(g) and np.any(g != f):
            return ZeroDivisor(AlgElem(alg, phi(g)), AlgElem(alg, phi((f - g) % p)))
        if np.all(g == f):
            # sigma^i preserves the complement of the kernel: an automorphism of A of order r.
            images = solve_columns(phi.matrix, alg.field.eye(alg.dim), p)
            pre = np.stack([k.mul(f, images[:, i]) for i in range(alg.dim)], axis=1)
            tau = AlgebraMap(alg, alg, (phi.matrix @ sigma.matrix @ pre) % p, kind="automorphism")
            out = semiregular_or_zero_divisor(alg, [tau])
            if isinstance(out, ZeroDivisor):
                return out
            raise InvariantViolation("order-r automorphism is semiregular at rank below r")
    raise InvariantViolation("twisted copies of the quotient ideal are pairwise orthogonal")


def _case_root_of_unity(alg: Algebra, sub: Subspace, x: np.ndarray, r: int, cover: CyclotomicCover) -> Dichotomy:
    """d < r, x^r = 1: a zero divisor from y in B, or a cover with r adjoined."""
    p = alg.p
    r_i = cover.r_i
    gx = cover.generator_image()
    if r in cover.primes:
        y = alg.power(gx, r_i // r)
        for i in range(r):
            u = (x - alg.mul(alg.power(x, i), y)) % p
            zd = _nonunit_pair(alg, u)
            if zd is not None:
                return zd
        raise InvariantViolation("no x - x^i y is a zero divisor")
    zd = _primitive_or_zd(alg, x, r)
    if zd is not None:
        return zd
    primes = tuple(sorted(cover.primes + (r,)))
    new_r = r_i * r
    c = _cyclotomic_ring(new_r, alg.field)
    g = alg.mul(gx, x)
    cols = [alg.power(g, i) for i in range(c.dim)]
    psi = AlgebraMap(c, alg, np.array(cols).T % p, kind="homomorphism")
    if not psi.is_homomorphism():
        raise InvariantViolation("glued cover is not a homomorphism")
    out = CyclotomicCover(primes, c, psi.image(), psi)
    if out.target.dim <= sub.dim:
        raise InvariantViolation("cover did not grow")
    return Found(out)


# ---------------------------------------------------------------------------
# the wrapper
# ---------------------------------------------------------------------------


def _factor_from(f: Poly, z: np.ndarray) -> Poly:
    g = f.gcd(Poly(f.field, [int(c) for c in z])).monic()
    if not 0 < g.deg < f.deg:
        raise InvariantViolation("zero divisor gives no proper factor")
    return g


def _check_split(f: Poly) -> None:
    x = Poly.x(f.field)
    if not ((x.powmod(f.p, f) - x) % f).is_zero():
        raise NotSplit("polynomial has a nonlinear irreducible factor")


def smooth_factor(f: Poly, bound: int = DEFAULT_SMOOTH_BOUND) -> SmoothOutcome:
    """A proper factor of a fully split f, or an automorphism of order deg f."""
    if f.deg < 1:
        raise ValueError("need a polynomial of positive degree")
    f = f.monic()
    squarefree_part_check(f)
    _check_split(f)
    p = f.p
    _prime_factors(p, bound)
    alg = from_polynomial(f)
    cover = trivial_cover(alg)
    while cover.target.dim < alg.dim:
        res = cyclotomic_cover_extend(alg, cover.target, cover, bound)
        if isinstance(res, ZeroDivisor):
            return SmoothOutcome(factor=_factor_from(f, res.z.v))
        cover = res.value
        if not cover.verify():
            raise InvariantViolation("cover failed verification")
    return _finish(f, alg, cover)


def _finish(f: Poly, alg: Algebra, cover: CyclotomicCover) -> SmoothOutcome:
    """B = A: split the cyclotomic ring along the kernel, or transport its automorphisms."""
    p = alg.p
    c, psi, m = cover.source, cover.psi, cover.r_i
    units = [a for a in range(1, m + 1) if math.gcd(a, m) == 1] if m > 1 else [1]
    xc = _x_in(c, m)
    rhos = []
    for a in units:
        img = [c.power(xc, a * i % max(m, 1)) for i in range(c.dim)]
        rhos.append(AlgebraMap(c, c, np.array(img).T % p, kind="automorphism"))
    ker = kernel(psi.matrix, p)
    if len(ker):
        e = idempotent_of(c, Subspace(p, c.dim, ker))
        start = [e, (c.one - e) % p]
    else:
        e = c.zeros()
        start = [c.one]
    f_c = (c.one - e) % p
    pieces = refine_invariant_decomposition(c, rhos, start)
    inside = [pc for pc in pieces if np.all(c.mul(pc.e, f_c) == pc.e)]
    if len(inside) > 1:
        return SmoothOutcome(factor=_factor_from(f, psi(inside[0].e)), cover=cover)
    stab = [rho for rho in rhos if np.all(rho(f_c) == f_c)]
    # psi is bijective on the ideal (1 - e)C, so invert it there.
    ideal = Subspace(p, c.dim, c.lmat(f_c).T).basis.T
    pre = (ideal @ solve_columns((psi.matrix @ ideal) % p, alg.field.eye(alg.dim), p)) % p
    maps = [AlgebraMap(alg, alg, (psi.matrix @ rho.matrix @ pre) % p, kind="automorphism") for rho in stab]
    res = semiregular_or_zero_divisor(alg, maps)
    if isinstance(res, ZeroDivisor):
        return SmoothOutcome(factor=_factor_from(f, res.z.v), cover=cover)
    group = res.value
    n = alg.dim
    gen = next((g for g in group if g.order == n), None)
    if gen is not None:
        if not gen.verify_automorphism(claimed_order=n):
            raise InvariantViolation("transported automorphism failed verification")
        return SmoothOutcome(automorphism=AlgebraMap(alg, alg, gen.matrix, kind="automorphism", order=n), cover=cover)
    try:
        zd = noncyclic_zero_divisor(alg, [g for g in group if g.order != 1] or group)
    except CyclicGroup as exc:
        raise InvariantViolation("cyclic stabilizer without an element of full order") from exc
    return SmoothOutcome(factor=_factor_from(f, zd.z.v), cover=cover)
