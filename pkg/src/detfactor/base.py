"""Prime-field arithmetic and exact dense linear algebra over F_p.

Matrices are numpy arrays whose entries are residues in ``[0, p)``.  For
moduli below 2**25 the arrays use ``int64`` (a product of two residues
summed over a few thousand terms cannot overflow); larger moduli fall back
to ``object`` arrays holding Python integers, which keeps the same code
path exact for every p < 2**61.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "FieldError",
    "PrimeField",
    "Mat",
    "Subspace",
    "is_prime",
    "rref",
    "kernel",
    "left_kernel",
    "solve",
    "solve_columns",
    "dot_mod",
    "rank",
    "subspace_ops",
    "factor_int",
]

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_INT64_LIMIT = 1 << 25
MAX_MODULUS = 1 << 61


class FieldError(ValueError):
    """Raised for an invalid modulus or mismatched fields."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n < 3.3 * 10**24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factor_int(n: int) -> dict[int, int]:
    """Prime factorization by trial division (desk-scale exponents only)."""
    if n < 1:
        raise ValueError("factor_int needs a positive integer")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_p for an odd prime p < 2**61."""

    p: int
    dtype: object = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        p = self.p
        if not isinstance(p, int) or isinstance(p, bool):
            raise FieldError(f"modulus must be an int, got {p!r}")
        if p < 3 or p >= MAX_MODULUS:
            raise FieldError(f"modulus {p} outside the supported range 3 <= p < 2**61")
        if not is_prime(p):
            raise FieldError(f"modulus {p} is not prime")
        object.__setattr__(self, "dtype", np.int64 if p < _INT64_LIMIT else object)

    def __call__(self, a: int) -> int:
        return int(a) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a prime field")
        return pow(a, -1, self.p)

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def is_square(self, a: int) -> bool:
        """Euler's criterion."""
        a %= self.p
        return a == 0 or pow(a, (self.p - 1) // 2, self.p) == 1

    def sqrt(self, a: int) -> Optional[int]:
        """Smallest square root of a by ascending scan, or None."""
        a %= self.p
        if not self.is_square(a):
            return None
        for x in range(self.p):
            if x * x % self.p == a:
                return x
        return None  # pragma: no cover

    # numpy helpers -------------------------------------------------
    def array(self, data) -> np.ndarray:
        """Reduce ``data`` into a fresh residue array of this field's dtype."""
        if self.dtype is object:
            arr = np.array(data, dtype=object)
            return np.vectorize(lambda v: int(v) % self.p, otypes=[object])(arr) if arr.size else arr
        arr = np.array(data, dtype=object if _needs_object(data) else np.int64)
        return (arr % self.p).astype(np.int64)

    def zeros(self, shape) -> np.ndarray:
        if self.dtype is object:
            out = np.empty(shape, dtype=object)
            out.fill(0)
            return out
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = 1
        return out

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a @ b) % self.p


_FLOAT_EXACT = 1 << 53


def dot_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """(a @ b) mod p for 2-d residue arrays.

    Routed through float64 BLAS when every partial sum stays below 2**53,
    which keeps the result exact.
    """
    if a.dtype != object and b.dtype != object and a.shape[1] * (p - 1) ** 2 < _FLOAT_EXACT:
        out = a.astype(np.float64) @ b.astype(np.float64)
        return np.fmod(out, p).astype(np.int64)
    return (a @ b) % p


def _needs_object(data) -> bool:
    try:
        arr = np.asarray(data)
    except (OverflowError, ValueError):
        return True
    return arr.dtype == object


def rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form of ``a`` over F_p.

    Returns the nonzero rows and the pivot column of each row.
    """
    m = np.array(a, copy=True) % p
    if m.ndim != 2:
        raise ValueError("rref expects a 2-D array")
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if len(nz) == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            m[[r, i]] = m[[i, r]]
        piv = int(m[r, c])
        if piv != 1:
            m[r] = (m[r] * pow(piv, -1, p)) % p
        col = m[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if len(hit):
            m[hit] = (m[hit] - np.outer(col[hit], m[r])) % p
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(a: np.ndarray, p: int) -> int:
    return len(rref(a, p)[1])


def kernel(a: np.ndarray, p: int) -> np.ndarray:
    """Canonical (RREF) basis of {v : a @ v = 0}, one vector per row."""
    a = np.asarray(a)
    rows, cols = a.shape
    dt = a.dtype if a.dtype == object else np.int64
    if rows == 0:
        out = np.zeros((cols, cols), dtype=dt)
        for i in range(cols):
            out[i, i] = 1
        return out
    r, piv = rref(a, p)
    free = [c for c in range(cols) if c not in set(piv)]
    out = np.zeros((len(free), cols), dtype=dt)
    for k, f in enumerate(free):
        out[k, f] = 1
        for i, pc in enumerate(piv):
            out[k, pc] = (-r[i, f]) % p
    # Built from free columns this is already reduced; rref makes it canonical.
    return rref(out, p)[0] if len(free) else out


def left_kernel(a: np.ndarray, p: int) -> np.ndarray:
    """Canonical basis of {v : v @ a = 0}."""
    return kernel(np.asarray(a).T, p)


def solve(a: np.ndarray, b: Sequence[int], p: int) -> Optional[np.ndarray]:
    """Some x with a @ x = b (free variables zero), or None if inconsistent."""
    a = np.asarray(a)
    rows, cols = a.shape
    bb = np.asarray(b).reshape(rows, 1)
    aug = np.concatenate([a, bb.astype(a.dtype) if a.dtype == object else bb], axis=1)
    r, piv = rref(aug, p)
    if piv and piv[-1] == cols:
        return None
    x = np.zeros(cols, dtype=r.dtype)
    for i, pc in enumerate(piv):
        x[pc] = r[i, cols]
    return x


def solve_columns(a: np.ndarray, rhs: np.ndarray, p: int) -> Optional[np.ndarray]:
    """X with a @ X = rhs for a full-column-rank ``a``; None if some column is unreachable."""
    a = np.asarray(a)
    rhs = np.asarray(rhs)
    k = a.shape[1]
    if rhs.ndim == 1:
        rhs = rhs.reshape(-1, 1)
    dt = object if (a.dtype == object or rhs.dtype == object) else np.int64
    aug = np.concatenate([a.astype(dt), rhs.astype(dt)], axis=1)
    r, piv = rref(aug, p)
    if piv[:k] != list(range(k)):
        raise ValueError("solve_columns needs a full-column-rank matrix")
    if len(piv) > k:
        return None
    return r[:k, k:].copy()


class Mat:
    """An immutable matrix over a prime field."""

    __slots__ = ("field", "a")

    def __init__(self, field_: PrimeField, data) -> None:
        arr = field_.array(data)
        if arr.ndim != 2:
            raise ValueError("Mat needs 2-D data")
        arr.setflags(write=False)
        self.field = field_
        self.a = arr

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Mat)
            and self.field == other.field
            and self.a.shape == other.a.shape
            and bool(np.all(self.a == other.a))
        )

    def __matmul__(self, other: "Mat") -> "Mat":
        return Mat(self.field, self.field.matmul(self.a, other.a))

    def tolist(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self.a]

    def rank(self) -> int:
        return rank(self.a, self.field.p)

    def kernel(self) -> "Mat":
        return Mat(self.field, kernel(self.a, self.field.p).reshape(-1, self.cols))

    def rref(self) -> "Mat":
        return Mat(self.field, rref(self.a, self.field.p)[0].reshape(-1, self.cols))

    def solve(self, b: Sequence[int]) -> Optional[list[int]]:
        x = solve(self.a, list(b), self.field.p)
        return None if x is None else [int(v) for v in x]

    def __repr__(self) -> str:
        return f"Mat(p={self.field.p}, {self.tolist()})"


class Subspace:
    """A subspace of F_p^n stored as a canonical RREF basis (rows)."""

    __slots__ = ("p", "n", "basis", "pivots")

    def __init__(self, p: int, n: int, rows=None, *, reduced: bool = False) -> None:
        self.p = p
        self.n = n
        if rows is None or len(rows) == 0:
            self.basis = np.zeros((0, n), dtype=object if p >= _INT64_LIMIT else np.int64)
            self.pivots: list[int] = []
            return
        arr = np.asarray(rows)
        if arr.dtype != object:
            arr = arr.astype(np.int64)
        arr = arr.reshape(-1, n)
        if reduced:
            self.basis = arr
            self.pivots = [int(np.nonzero(row)[0][0]) for row in arr]
        else:
            self.basis, self.pivots = rref(arr, p)

    @classmethod
    def full(cls, p: int, n: int) -> "Subspace":
        eye = np.zeros((n, n), dtype=object if p >= _INT64_LIMIT else np.int64)
        for i in range(n):
            eye[i, i] = 1
        return cls(p, n, eye, reduced=True)

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def coords(self, v) -> Optional[np.ndarray]:
        """Coordinates of v in the RREF basis, or None when v is outside."""
        v = np.asarray(v) % self.p
        c = v[self.pivots] if self.pivots else v[:0]
        recon = (c @ self.basis) % self.p if self.pivots else np.zeros_like(v)
        if np.any(recon != v):
            return None
        return c

    def contains(self, v) -> bool:
        return self.coords(v) is not None

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(row) for row in other.basis)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Subspace)
            and self.n == other.n
            and self.pivots == other.pivots
            and bool(np.all(self.basis == other.basis))
        )

    def __add__(self, other: "Subspace") -> "Subspace":
        if self.dim == 0:
            return other
        if other.dim == 0:
            return self
        return Subspace(self.p, self.n, np.concatenate([self.basis, other.basis]))

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.dim == 0 or other.dim == 0:
            return Subspace(self.p, self.n)
        stacked = np.concatenate([self.basis, (-other.basis) % self.p])
        rel = left_kernel(stacked, self.p)
        if len(rel) == 0:
            return Subspace(self.p, self.n)
        vecs = (rel[:, : self.dim] @ self.basis) % self.p
        return Subspace(self.p, self.n, vecs)

    def __repr__(self) -> str:
        return f"Subspace(p={self.p}, n={self.n}, dim={self.dim})"


def subspace_ops(u, w, p: int) -> dict:
    """Sum, intersection and membership test for the row spaces of u and w."""
    u = np.asarray(u)
    w = np.asarray(w)
    n = u.shape[1] if u.ndim == 2 and u.shape[1] else w.shape[1]
    su = Subspace(p, n, u if len(u) else None)
    sw = Subspace(p, n, w if len(w) else None)
    return {
        "sum": su + sw,
        "intersection": su.intersect(sw),
        "member": lambda v: su.contains(v),
        "u": su,
        "w": sw,
    }


def as_int_list(v: Iterable) -> list[int]:
    return [int(x) for x in v]
