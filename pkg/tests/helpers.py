"""Algebra builders and result checkers shared by the tests."""

from __future__ import annotations

import random
from typing import Sequence

import numpy as np

from detfactor.algebra import Algebra, AlgebraMap, ZeroDivisor, from_polynomial
from detfactor.base import PrimeField, rank, solve_columns
from detfactor.poly import Poly


def poly(p: int, coeffs: Sequence[int]) -> Poly:
    return Poly(PrimeField(p), coeffs)


def quotient(p: int, coeffs: Sequence[int]) -> Algebra:
    return from_polynomial(poly(p, coeffs))


def split_algebra(p: int, n: int) -> Algebra:
    """F_p^n with coordinatewise product."""
    t = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        t[i, i, i] = 1
    return Algebra(PrimeField(p), t)


def matrix_table(n: int) -> np.ndarray:
    """M_n with basis E_ab at index a*n + b."""
    size = n * n
    t = np.zeros((size, size, size), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                t[a * n + b, b * n + c, a * n + c] = 1
    return t


def matrix_algebra(p: int, n: int) -> Algebra:
    return Algebra(PrimeField(p), matrix_table(n))


def quaternion_table(p: int) -> np.ndarray:
    """Basis 1, i, j, k with i^2 = j^2 = -1 and ij = -ji = k."""
    t = np.zeros((4, 4, 4), dtype=np.int64)
    for a in range(4):
        t[0, a, a] = 1
        t[a, 0, a] = 1
    rules = {
        (1, 1): (-1, 0), (2, 2): (-1, 0), (3, 3): (-1, 0),
        (1, 2): (1, 3), (2, 1): (-1, 3),
        (2, 3): (1, 1), (3, 2): (-1, 1),
        (3, 1): (1, 2), (1, 3): (-1, 2),
    }
    for (a, b), (s, c) in rules.items():
        t[a, b, c] = s % p
    return t


def direct_sum_table(t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
    n1, n2 = t1.shape[0], t2.shape[0]
    t = np.zeros((n1 + n2,) * 3, dtype=np.int64)
    t[:n1, :n1, :n1] = t1
    t[n1:, n1:, n1:] = t2
    return t


def tensor_table(t1: np.ndarray, t2: np.ndarray, p: int) -> np.ndarray:
    """Structure constants of A1 (x) A2 with basis index i*n2 + a."""
    n1, n2 = t1.shape[0], t2.shape[0]
    return np.multiply.outer(t1, t2).transpose(0, 3, 1, 4, 2, 5).reshape(n1 * n2, n1 * n2, n1 * n2) % p


def random_invertible(p: int, n: int, rng: random.Random) -> np.ndarray:
    while True:
        m = np.array([[rng.randrange(p) for _ in range(n)] for _ in range(n)], dtype=np.int64)
        if rank(m, p) == n:
            return m


def disguise(p: int, table: np.ndarray, rng: random.Random) -> tuple[Algebra, np.ndarray]:
    """The same algebra in the basis b'_i = sum_j P[i, j] b_j; returns (algebra, P)."""
    n = table.shape[0]
    pm = random_invertible(p, n, rng)
    pinv = solve_columns(pm.T, np.eye(n, dtype=np.int64), p)
    prod = np.einsum("ia,jb,abc->ijc", pm, pm, table) % p
    new = np.einsum("ijc,cd->ijd", prod, pinv.T) % p
    return Algebra(PrimeField(p), new), pm


def roots_poly(p: int, roots: Sequence[int]) -> Poly:
    return Poly.from_roots(PrimeField(p), roots)


# ---------------------------------------------------------------------------
# checkers
# ---------------------------------------------------------------------------


def assert_zero_divisor(zd: ZeroDivisor, alg: Algebra | None = None) -> None:
    a = zd.z.parent
    if alg is not None:
        assert a is alg
    assert np.any(zd.z.v) and np.any(zd.w.v)
    assert not np.any(a.mul(zd.z.v, zd.w.v))
    assert rank(a.lmat(zd.z.v), a.p) < a.dim


def is_automorphism(sigma: AlgebraMap, order: int | None = None) -> bool:
    a = sigma.source
    if sigma.target is not a or rank(sigma.matrix, a.p) != a.dim:
        return False
    if not sigma.is_homomorphism():
        return False
    return order is None or sigma.multiplicative_order(cap=order) == order


def map_from_permutation(alg: Algebra, perm: Sequence[int]) -> AlgebraMap:
    """Coordinate permutation b_i -> b_perm[i] of a split algebra."""
    n = alg.dim
    m = np.zeros((n, n), dtype=np.int64)
    for i, j in enumerate(perm):
        m[j, i] = 1
    return AlgebraMap(alg, alg, m, kind="automorphism")
