"""Zero divisors in noncommutative algebras over F_p.

A semisimple algebra free over its center C looks like M_m(C).  A maximal
commutative semisimple D inside it carries a C-automorphism from the
tensor-power recursion; conjugation realises it, and a cyclic algebra
generated by two elements x, y with xy = zeta yx then yields the zero
divisor.
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
    candidate_elements,
    center,
    centralizer,
    minimal_polynomial_vec,
    radical,
    subalgebra_generated,
)
from .base import Subspace, factor_int, kernel, solve_columns
from .kummer import lagrange_resolvent
from .poly import distinct_degree_factorization
from .tensoraut import DEFAULT_BUDGET, Budget, evdokimov
from .zerodiv import discrete_log_r_elements, free_basis_or_zero_divisor

__all__ = [
    "CommutativeInput",
    "NoSolution",
    "MatrixShape",
    "preprocess",
    "max_comm_semisimple",
    "conjugator",
    "order_r_conjugation_zerodiv",
    "sum_of_two_squares",
    "find_zero_divisor",
]


class CommutativeInput(ValueError):
    """The algebra is commutative; use the commutative decomposition instead."""


class NoSolution(ValueError):
    """The conjugation system has only the zero solution."""


@dataclass
class MatrixShape:
    """Center C of A and m with dim A = m^2 dim C."""

    center: Subspace
    m: int


def _nilpotent_pair(alg: Algebra, z: np.ndarray) -> ZeroDivisor:
    """(z^(k-1), z) for a nilpotent z with z^k = 0."""
    prev = np.asarray(z) % alg.p
    cur = alg.mul(prev, prev)
    while np.any(cur):
        prev, cur = cur, alg.mul(cur, z)
    return ZeroDivisor(AlgElem(alg, prev), AlgElem(alg, z))


def _right_witness(alg: Algebra, z: np.ndarray) -> Optional[ZeroDivisor]:
    """(z, w) with z w = 0 when z is a nonzero non-unit."""
    z = np.asarray(z) % alg.p
    if not np.any(z):
        return None
    ker = kernel(alg.lmat(z), alg.p)
    if len(ker) == 0:
        return None
    return ZeroDivisor(AlgElem(alg, z), AlgElem(alg, ker[0]))


def preprocess(alg: Algebra) -> Dichotomy:
    """Found(MatrixShape) when A is semisimple and free over its center, else a zero divisor."""
    if alg.commutative:
        raise CommutativeInput("algebra is commutative")
    rad = radical(alg)
    if rad.dim:
        return _nilpotent_pair(alg, rad.basis[0])
    cen = center(alg)
    res = free_basis_or_zero_divisor(alg, cen)
    if isinstance(res, ZeroDivisor):
        return res
    ratio = alg.dim // cen.dim
    m = math.isqrt(ratio)
    if m * m != ratio or alg.dim % cen.dim:
        raise InvariantViolation("rank over the center is not a square")
    return Found(MatrixShape(cen, m))


def max_comm_semisimple(alg: Algebra, cen: Subspace, m: int) -> Dichotomy:
    """Found(D): commutative semisimple, self-centralizing, free of rank m over C."""
    p = alg.p
    d = cen
    while True:
        cz = centralizer(alg, d)
        if cz == d:
            break
        v = next(v for v in candidate_elements(alg, cz) if not d.contains(v))
        grown = subalgebra_generated(alg, [v], over=d)
        gstd, gemb = alg.restrict(grown)
        rad = radical(gstd)
        if rad.dim:
            return _nilpotent_pair(alg, gemb(rad.basis[0]))
        d = grown
    dstd, demb = alg.restrict(d)
    c_in = solve_columns(demb.matrix, cen.basis.T, p)
    res = free_basis_or_zero_divisor(dstd, Subspace(p, dstd.dim, c_in.T))
    if isinstance(res, ZeroDivisor):
        return res.mapped(demb)
    if d.dim != m * cen.dim:
        raise InvariantViolation("self-centralizing subalgebra has the wrong rank")
    return Found(d)


def conjugator(alg: Algebra, sub: Subspace, sigma: AlgebraMap) -> Dichotomy:
    """Found(y) with sigma(x) = y^-1 x y on B, or (y, w) when the solution is singular.

    ``sigma`` acts on ``alg.restrict(sub)``; its matrix is in that basis.
    The solution space is searched for 1, then for an invertible basis vector.
    """
    p = alg.p
    bstd, bemb = alg.restrict(sub)
    imgs = (bemb.matrix @ sigma.matrix) % p  # columns: sigma(x_i) in A
    blocks = [(alg.rmat(imgs[:, i]) - alg.lmat(sub.basis[i])) % p for i in range(sub.dim)]
    ker = kernel(np.concatenate(blocks), p)
    if len(ker) == 0:
        raise NoSolution("conjugation system has only the zero solution")
    sol = Subspace(p, alg.dim, ker)
    if sol.contains(alg.one):
        return Found(alg.one.copy())
    for y in sol.basis:
        if _right_witness(alg, y) is None:
            return Found(y % p)
    return _right_witness(alg, sol.basis[0])


def order_r_conjugation_zerodiv(alg: Algebra, y: np.ndarray, r: int) -> ZeroDivisor:
    """(y - 1, 1 + y + ... + y^(r-1)) for y of order r acting nontrivially."""
    p = alg.p
    y = np.asarray(y) % p
    total = alg.zeros()
    cur = alg.one.copy()
    for _ in range(r):
        total = (total + cur) % p
        cur = alg.mul(cur, y)
    if np.any(cur != alg.one):
        raise ValueError("y^r is not 1")
    return ZeroDivisor(AlgElem(alg, (y - alg.one) % p), AlgElem(alg, total))


def sum_of_two_squares(p: int) -> tuple[int, int]:
    """(alpha, beta) with alpha^2 + beta^2 = -1 mod p, p odd.

    A square root of -1 is taken first with beta = 0; otherwise alpha scans
    upward until -1 - alpha^2 is a square.
    """
    if p % 2 == 0:
        raise ValueError("p must be odd")

    def is_square(a: int) -> bool:
        return a % p == 0 or pow(a, (p - 1) // 2, p) == 1

    def root(a: int) -> int:
        return next(b for b in range(p) if b * b % p == a % p)

    if is_square(-1):
        return root(-1), 0
    for alpha in range(p):
        rest = (-1 - alpha * alpha) % p
        if is_square(rest):
            return alpha, root(rest)
    raise AssertionError("every element of F_p is a sum of two squares")


# ---------------------------------------------------------------------------
# the pipeline
# ---------------------------------------------------------------------------


def _order_multiple(alg: Algebra, y: np.ndarray) -> int:
    """Multiple of the order of the unit y from the distinct-degree split of its minimal polynomial."""
    p = alg.p
    g = minimal_polynomial_vec(alg, y)
    m = 1
    for d, _ in distinct_degree_factorization(g.monic()):
        m = math.lcm(m, p**d - 1)
    # Repeated factors add a unipotent part of p-power order.
    pk = 1
    while pk < g.deg:
        pk *= p
    return m * pk


def _r_free_part(n: int, r: int) -> int:
    while n % r == 0:
        n //= r
    return n


def _r_order(alg: Algebra, x: np.ndarray, r: int) -> int:
    """t with x^(r^t) = 1 minimal, for x of r-power order."""
    cur = np.asarray(x) % alg.p
    t = 0
    while np.any(cur != alg.one):
        cur = alg.power(cur, r)
        t += 1
        if t > 64 * alg.dim:
            raise InvariantViolation("element does not have r-power order")
    return t


def _conj_map(alg: Algebra, d: Subspace, y: np.ndarray) -> AlgebraMap:
    """x -> y^-1 x y on D as a map of the standalone D."""
    p = alg.p
    dstd, demb = alg.restrict(d)
    yinv = alg.inverse(y)
    imgs = np.stack([alg.mul(alg.mul(yinv, b), y) for b in d.basis], axis=1)
    mat = solve_columns(demb.matrix, imgs, p)
    if mat is None:
        raise InvariantViolation("conjugation does not preserve D")
    return AlgebraMap(dstd, dstd, mat, kind="automorphism")


def find_zero_divisor(alg: Algebra, budget_multiplier: int = DEFAULT_BUDGET) -> ZeroDivisor:
    """A zero divisor of a noncommutative algebra over F_p."""
    p = alg.p
    pre = preprocess(alg)
    if isinstance(pre, ZeroDivisor):
        return pre
    shape = pre.value
    cen, m = shape.center, shape.m
    res = max_comm_semisimple(alg, cen, m)
    if isinstance(res, ZeroDivisor):
        return res
    d = res.value
    dstd, demb = alg.restrict(d)
    c_in = Subspace(p, dstd.dim, solve_columns(demb.matrix, cen.basis.T, p).T)
    budget = Budget.for_instance(m, c_in.dim, budget_multiplier)
    ev = evdokimov(dstd, c_in, budget)
    if isinstance(ev, ZeroDivisor):
        return ev.mapped(demb)
    sigma = ev.value
    res = conjugator(alg, d, sigma)
    if isinstance(res, ZeroDivisor):
        return res
    y = res.value
    r = min(factor_int(m))
    # Power y so that its order is a power of r and conjugation has order r.
    a = _r_free_part(_order_multiple(alg, y), r)
    y = alg.power(y, a)
    s_order = sigma.power(a).multiplicative_order()
    y = alg.power(y, s_order // r)
    return _cyclic_algebra_zero_divisor(alg, d, y, r)


def _cyclic_algebra_zero_divisor(alg: Algebra, d: Subspace, y: np.ndarray, r: int) -> ZeroDivisor:
    p = alg.p
    dstd, demb = alg.restrict(d)
    tau = _conj_map(alg, d, y)
    tau = AlgebraMap(dstd, dstd, tau.matrix, kind="automorphism", order=r)
    if tau.multiplicative_order() != r:
        raise InvariantViolation("conjugation does not have order r")
    z = alg.power(y, r)
    if np.all(z == alg.one):
        return order_r_conjugation_zerodiv(alg, y, r)
    z_d = solve_columns(demb.matrix, z.reshape(-1, 1), p)
    if z_d is None:
        raise InvariantViolation("y^r lies outside the maximal subalgebra")
    z_d = z_d[:, 0]
    tz = _r_order(dstd, z_d, r)
    zeta = dstd.power(z_d, r ** (tz - 1))
    for i in range(1, r):
        zd = _right_witness(dstd, (dstd.power(zeta, i) - dstd.one) % p)
        if zd is not None:
            return zd.mapped(demb)
    x = lagrange_resolvent(dstd, tau, zeta, order=r)
    zd = _right_witness(dstd, x)
    if zd is not None:
        return zd.mapped(demb)
    a = _r_free_part(_order_multiple(dstd, x), r)
    x = dstd.power(x, a)
    xa = demb(x)
    return _vdw_descent(alg, xa, y, r)


def _vdw_descent(alg: Algebra, x: np.ndarray, y: np.ndarray, r: int) -> ZeroDivisor:
    """x, y of r-power order with x y = zeta y x, zeta of order r."""
    p = alg.p
    for _ in range(4):
        w = alg.power(x, r)
        z = alg.power(y, r)
        cprime, cemb = alg.restrict(subalgebra_generated(alg, [w, z]))
        if not cprime.commutative:
            raise InvariantViolation("x^r and y^r do not commute")
        w_c = solve_columns(cemb.matrix, w.reshape(-1, 1), p)[:, 0]
        z_c = solve_columns(cemb.matrix, z.reshape(-1, 1), p)[:, 0]
        tw, tz = _r_order(cprime, w_c, r), _r_order(cprime, z_c, r)
        big, small, big_c, small_c = (y, x, z_c, w_c) if tz > tw else (x, y, w_c, z_c)
        if tz != tw:
            # small^r = big^(r k): rescale small to order r.
            dl = discrete_log_r_elements(cprime, big_c, small_c, r)
            if isinstance(dl, ZeroDivisor):
                return dl.mapped(cemb)
            k = dl.value
            if k % r:
                raise InvariantViolation("discrete log of the smaller power is not divisible by r")
            u = cemb(cprime.power(big_c, k // r))
            t = alg.mul(alg.inverse(u), small)
            return order_r_conjugation_zerodiv(alg, t, r)
        t = tw
        if t == 0:
            return order_r_conjugation_zerodiv(alg, x, r)
        wt = cprime.power(w_c, r ** (t - 1))
        zt = cprime.power(z_c, r ** (t - 1))
        j = None
        for cand in range(1, r):
            if np.all(cprime.mul(cprime.power(wt, cand), zt) == cprime.one):
                j = cand
                break
        if j is None:
            dl = discrete_log_r_elements(cprime, wt, zt, r)
            if isinstance(dl, ZeroDivisor):
                return dl.mapped(cemb)
            raise InvariantViolation("no exponent lowers the order of w^j z")
        y_new = alg.mul(alg.power(x, j), y)
        z_new = alg.power(y_new, r)
        if r == 2 and _r_order(alg, z_new, r) >= t:
            minus = (-alg.one) % p
            if np.all(w == minus) and np.all(z == minus):
                return _quaternion_zero_divisor(alg, x, y)
            raise InvariantViolation("order of y'^2 did not fall outside the quaternion case")
        y = y_new
    raise InvariantViolation("cyclic algebra descent did not terminate")


def _quaternion_zero_divisor(alg: Algebra, x: np.ndarray, y: np.ndarray) -> ZeroDivisor:
    """x^2 = y^2 = -1, xy = -yx: (x' - 1, x' + 1) with x' = (alpha y + beta) x."""
    p = alg.p
    alpha, beta = sum_of_two_squares(p)
    u = (alpha * y + beta * alg.one) % p
    xp = alg.mul(u, x)
    if np.any(alg.mul(xp, xp) != alg.one):
        raise InvariantViolation("x' does not square to one")
    return ZeroDivisor(AlgElem(alg, (xp - alg.one) % p), AlgElem(alg, (xp + alg.one) % p))
