"""Finite-dimensional algebras over F_p given by structure constants.

An :class:`Algebra` of dimension n stores ``table[i, j, l]``, the
coefficient of ``b_l`` in ``b_i * b_j``.  Subalgebras and ideals are
echelonized :class:`~detfactor.base.Subspace` objects of the ambient
coordinate space; :meth:`Algebra.restrict` turns one into a standalone
algebra together with its embedding when an algorithm needs to re-root
itself on a smaller structure.

Every result that claims a zero divisor is a :class:`ZeroDivisor`, whose
constructor checks ``z != 0``, ``w != 0`` and ``z * w == 0``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Generic, Iterable, Iterator, Optional, Sequence, TypeVar, Union

import numpy as np

from .base import PrimeField, Subspace, dot_mod, kernel, rank, rref, solve, solve_columns
from .poly import (
    Poly,
    distinct_degree_factorization,
    squarefree_part_check,
)

__all__ = [
    "Algebra",
    "AlgElem",
    "AlgebraMap",
    "IdealRepr",
    "ZeroDivisor",
    "Found",
    "Dichotomy",
    "ZeroDivisorFound",
    "InvariantViolation",
    "NoIdempotent",
    "RadicalNonzero",
    "StructureInfo",
    "from_polynomial",
    "minimal_polynomial",
    "ideal_generated",
    "ideal_toolkit",
    "complement",
    "split",
    "subalgebra_generated",
    "tensor_square_over",
    "structure_analysis",
    "component_sizes",
    "primitive_element",
    "fixed_subalgebra",
    "zero_divisor_from",
    "candidate_elements",
    "radical",
    "center",
    "centralizer",
    "identity_map",
    "restrict_map",
    "map_from_images",
    "free_structure",
    "FreeStructure",
]

T = TypeVar("T")


class InvariantViolation(RuntimeError):
    """An internal postcondition failed; always a bug, never an input error."""


class NoIdempotent(ValueError):
    """The ideal has no unit element, so the algebra is not semisimple there."""

    def __init__(self, nilpotent: Optional["AlgElem"] = None) -> None:
        super().__init__("ideal has no identity element")
        self.nilpotent = nilpotent


class RadicalNonzero(ValueError):
    """The algebra has a nonzero nilpotent ideal; ``nilpotent`` lies in it."""

    def __init__(self, nilpotent: "AlgElem") -> None:
        super().__init__("algebra has a nonzero radical")
        self.nilpotent = nilpotent


# ---------------------------------------------------------------------------
# algebras and elements
# ---------------------------------------------------------------------------


class Algebra:
    """An associative unital algebra over F_p by structure constants."""

    def __init__(
        self,
        field: PrimeField,
        table,
        one: Optional[Sequence[int]] = None,
        *,
        check: bool = True,
        name: str = "",
    ) -> None:
        self.field = field
        p = field.p
        tab = field.array(table) if not isinstance(table, np.ndarray) else np.asarray(table) % p
        if tab.dtype != object and field.dtype is object:
            tab = tab.astype(object)
        n = tab.shape[0] if tab.ndim == 3 else -1
        if tab.ndim != 3 or tab.shape != (n, n, n) or n < 1:
            raise ValueError("structure constants must form an n x n x n array with n >= 1")
        self.dim = n
        self.table = tab
        self.table.setflags(write=False)
        # lmats[i] is the matrix of y -> b_i * y, so lmats[i][l, j] = table[i, j, l].
        self._lmats = np.ascontiguousarray(tab.transpose(0, 2, 1))
        # rmats[j] is the matrix of x -> x * b_j, so rmats[j][l, i] = table[i, j, l].
        self._rmats = np.ascontiguousarray(tab.transpose(1, 2, 0))
        self.commutative = bool(np.all(tab == tab.transpose(1, 0, 2)))
        self.name = name
        if one is None:
            self.one = self._find_one()
        else:
            self.one = field.array(list(one)).reshape(n)
            if check and not self._is_one(self.one):
                raise ValueError("declared identity is not a two-sided identity")
        if check:
            self.check_associative()

    # construction helpers ------------------------------------------------
    def _find_one(self) -> np.ndarray:
        n, p = self.dim, self.p
        # e * b_j = b_j and b_j * e = b_j, linear in e.
        rows = np.concatenate([self.table.transpose(1, 2, 0).reshape(n * n, n), self.table.transpose(0, 2, 1).reshape(n * n, n)])
        rhs = np.zeros(2 * n * n, dtype=object)
        for j in range(n):
            rhs[j * n + j] = 1
            rhs[n * n + j * n + j] = 1
        x = solve(rows, rhs, p)
        if x is None:
            raise ValueError("structure constants admit no identity element")
        return np.asarray(x, dtype=self.field.dtype) % p

    def _is_one(self, e: np.ndarray) -> bool:
        eye = self.field.eye(self.dim)
        return bool(np.all(self.lmat(e) == eye) and np.all(self.rmat(e) == eye))

    def check_associative(self, full_limit: int = 32) -> None:
        """Raise ValueError unless (b_i b_j) b_l = b_i (b_j b_l) on tested triples."""
        n, p, t = self.dim, self.p, self.table
        if n <= full_limit:
            lhs = np.tensordot(t, t, axes=([2], [0])) % p  # (i, j, l, o)
            rhs = np.tensordot(t, t, axes=([2], [1])).transpose(2, 0, 1, 3) % p
            if not np.all(lhs == rhs):
                raise ValueError("structure constants are not associative")
            return
        idx = [(i * 7 + 3) % n for i in range(12)]
        for i in idx:
            for j in idx:
                for l in idx:
                    a = self._mul_basis(self._mul_basis_vec(i, j), l)
                    b = self.mul(self.basis_vec(i), self._mul_basis_vec(j, l))
                    if np.any(a != b):
                        raise ValueError("structure constants are not associative")

    def _mul_basis_vec(self, i: int, j: int) -> np.ndarray:
        return self.table[i, j].copy()

    def _mul_basis(self, x: np.ndarray, l: int) -> np.ndarray:
        return (self._rmats[l] @ x) % self.p

    # basic API -------------------------------------------------------------
    @property
    def p(self) -> int:
        return self.field.p

    def __repr__(self) -> str:
        tag = f" {self.name}" if self.name else ""
        return f"<Algebra{tag} dim={self.dim} over F_{self.p}>"

    def zeros(self) -> np.ndarray:
        return self.field.zeros(self.dim)

    def basis_vec(self, i: int) -> np.ndarray:
        v = self.zeros()
        v[i] = 1
        return v

    def vec(self, coords) -> np.ndarray:
        return self.field.array(list(coords)).reshape(self.dim)

    def elem(self, coords) -> "AlgElem":
        return AlgElem(self, self.vec(coords))

    def zero_elem(self) -> "AlgElem":
        return AlgElem(self, self.zeros())

    def one_elem(self) -> "AlgElem":
        return AlgElem(self, self.one.copy())

    def basis_elem(self, i: int) -> "AlgElem":
        return AlgElem(self, self.basis_vec(i))

    def scalar(self, c: int) -> "AlgElem":
        return AlgElem(self, (self.one * (c % self.p)) % self.p)

    def lmat(self, x: np.ndarray) -> np.ndarray:
        """Matrix of y -> x * y."""
        n = self.dim
        return dot_mod(np.asarray(x).reshape(1, n), self._lmats.reshape(n, n * n), self.p).reshape(n, n)

    def rmat(self, y: np.ndarray) -> np.ndarray:
        """Matrix of x -> x * y."""
        n = self.dim
        return dot_mod(np.asarray(y).reshape(1, n), self._rmats.reshape(n, n * n), self.p).reshape(n, n)

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (self.lmat(x) @ y) % self.p

    def power(self, x: np.ndarray, e: int) -> np.ndarray:
        if e < 0:
            inv = self.inverse(x)
            if inv is None:
                raise ZeroDivisionError("negative power of a non-unit")
            return self.power(inv, -e)
        out = self.one.copy()
        base = x % self.p
        while e:
            if e & 1:
                out = self.mul(out, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return out

    def inverse(self, x: np.ndarray) -> Optional[np.ndarray]:
        y = solve(self.lmat(x), self.one, self.p)
        if y is None:
            return None
        y = np.asarray(y, dtype=self.field.dtype) % self.p
        if np.any(self.mul(y, x) != self.one):
            return None
        return y

    def is_unit(self, x: np.ndarray) -> bool:
        return rank(self.lmat(x), self.p) == self.dim

    def right_annihilator(self, z: np.ndarray) -> np.ndarray:
        """Canonical basis of {w : z * w = 0}."""
        return kernel(self.lmat(z), self.p)

    def full_space(self) -> Subspace:
        return Subspace.full(self.p, self.dim)

    def scalars(self) -> Subspace:
        return Subspace(self.p, self.dim, self.one.reshape(1, -1))

    def span(self, vecs: Iterable) -> Subspace:
        rows = [np.asarray(v) for v in vecs]
        return Subspace(self.p, self.dim, np.array(rows) if rows else None)

    def products(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """All products u_i * v_j for row stacks u, v; shape (len u, len v, n)."""
        p, n = self.p, self.dim
        u, v = np.asarray(u), np.asarray(v)
        left = dot_mod(u, self.table.reshape(n, n * n), p).reshape(len(u), n, n)  # (i, b, l)
        left = left.transpose(0, 2, 1).reshape(len(u) * n, n)  # (i l, b)
        out = dot_mod(left, v.T, p).reshape(len(u), n, len(v))
        return out.transpose(0, 2, 1)

    def restrict(self, space: Subspace, one: Optional[np.ndarray] = None, *, name: str = "") -> tuple["Algebra", "AlgebraMap"]:
        """Standalone algebra on a multiplication-closed subspace.

        ``one`` is the identity of the subspace (defaults to the ambient one,
        pass an idempotent for ideals).  Returns (algebra, embedding).
        """
        basis = space.basis
        d = space.dim
        if d == 0:
            raise ValueError("cannot restrict to the zero subspace")
        prods = self.products(basis, basis)
        coords = prods[:, :, space.pivots]
        recon = np.tensordot(coords, basis, axes=([2], [0])) % self.p
        if np.any(recon != prods):
            raise ValueError("subspace is not closed under multiplication")
        unit = self.one if one is None else np.asarray(one) % self.p
        uc = space.coords(unit)
        if uc is None:
            raise ValueError("identity element is outside the subspace")
        sub = Algebra(self.field, coords, uc, check=False, name=name)
        emb = AlgebraMap(sub, self, np.ascontiguousarray(basis.T), kind="embedding" if one is None else "linear")
        return sub, emb


class AlgElem:
    """An element of an :class:`Algebra`, stored as its coordinate vector."""

    __slots__ = ("parent", "v")

    def __init__(self, parent: Algebra, v) -> None:
        self.parent = parent
        self.v = np.asarray(v) % parent.p

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, AlgElem):
            if other.parent is not self.parent:
                raise ValueError("elements of different algebras")
            return other.v
        return self.parent.scalar(int(other)).v

    def __add__(self, other) -> "AlgElem":
        return AlgElem(self.parent, self.v + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other) -> "AlgElem":
        return AlgElem(self.parent, self.v - self._coerce(other))

    def __rsub__(self, other) -> "AlgElem":
        return AlgElem(self.parent, self._coerce(other) - self.v)

    def __neg__(self) -> "AlgElem":
        return AlgElem(self.parent, -self.v)

    def __mul__(self, other) -> "AlgElem":
        if isinstance(other, AlgElem):
            return AlgElem(self.parent, self.parent.mul(self.v, self._coerce(other)))
        return AlgElem(self.parent, self.v * (int(other) % self.parent.p))

    def __rmul__(self, other) -> "AlgElem":
        if isinstance(other, AlgElem):
            return other.__mul__(self)
        return AlgElem(self.parent, self.v * (int(other) % self.parent.p))

    def __pow__(self, e: int) -> "AlgElem":
        return AlgElem(self.parent, self.parent.power(self.v, e))

    def __eq__(self, other) -> bool:
        if isinstance(other, (AlgElem, int)):
            return bool(np.all(self.v == self._coerce(other)))
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(int(c) for c in self.v))

    def is_zero(self) -> bool:
        return not np.any(self.v)

    def is_unit(self) -> bool:
        return self.parent.is_unit(self.v)

    def is_zero_divisor(self) -> bool:
        return (not self.is_zero()) and not self.is_unit()

    def inverse(self) -> "AlgElem":
        inv = self.parent.inverse(self.v)
        if inv is None:
            raise ZeroDivisionError("element is not a unit")
        return AlgElem(self.parent, inv)

    def lmat(self) -> np.ndarray:
        return self.parent.lmat(self.v)

    def tolist(self) -> list[int]:
        return [int(c) for c in self.v]

    def __repr__(self) -> str:
        return f"AlgElem({self.tolist()})"


# ---------------------------------------------------------------------------
# maps
# ---------------------------------------------------------------------------

MAP_KINDS = ("linear", "homomorphism", "embedding", "automorphism")


class AlgebraMap:
    """A linear map source -> target stored as a dim(target) x dim(source) matrix."""

    def __init__(self, source: Algebra, target: Algebra, matrix, *, kind: str = "linear", order: Optional[int] = None) -> None:
        if kind not in MAP_KINDS:
            raise ValueError(f"unknown map kind {kind!r}")
        m = np.asarray(matrix) % source.p
        if m.shape != (target.dim, source.dim):
            raise ValueError(f"map matrix has shape {m.shape}, expected {(target.dim, source.dim)}")
        if m.dtype != object and source.field.dtype is object:
            m = m.astype(object)
        self.source = source
        self.target = target
        self.matrix = m
        self.kind = kind
        self.order = order

    @property
    def p(self) -> int:
        return self.source.p

    def __call__(self, x):
        if isinstance(x, AlgElem):
            return AlgElem(self.target, (self.matrix @ x.v) % self.p)
        return (self.matrix @ np.asarray(x)) % self.p

    def compose(self, inner: "AlgebraMap") -> "AlgebraMap":
        """self o inner."""
        return AlgebraMap(inner.source, self.target, (self.matrix @ inner.matrix) % self.p)

    def image(self) -> Subspace:
        return Subspace(self.p, self.target.dim, self.matrix.T.copy())

    def is_injective(self) -> bool:
        return rank(self.matrix, self.p) == self.source.dim

    def is_unital(self) -> bool:
        return bool(np.all(self(self.source.one) == self.target.one))

    def is_multiplicative(self) -> bool:
        s, t, m, p = self.source, self.target, self.matrix, self.p
        lhs = np.tensordot(s.table, m, axes=([2], [1])) % p  # (i, j, a)
        imgs = m.T  # row i = image of b_i
        rhs = t.products(imgs, imgs)
        return bool(np.all(lhs == rhs))

    def is_homomorphism(self) -> bool:
        return self.is_unital() and self.is_multiplicative()

    def is_identity(self) -> bool:
        return self.source is self.target and bool(np.all(self.matrix == self.source.field.eye(self.source.dim)))

    def inverse(self) -> "AlgebraMap":
        n = self.source.dim
        if self.target.dim != n:
            raise ValueError("only square maps are invertible")
        eye = self.source.field.eye(n)
        cols = []
        for j in range(n):
            x = solve(self.matrix, eye[:, j], self.p)
            if x is None:
                raise ZeroDivisionError("map is not invertible")
            cols.append(x)
        inv = np.array(cols).T % self.p
        return AlgebraMap(self.target, self.source, inv, kind=self.kind, order=self.order)

    def power(self, k: int) -> "AlgebraMap":
        if k < 0:
            return self.inverse().power(-k)
        a = self.source
        out = a.field.eye(a.dim)
        base = self.matrix
        while k:
            if k & 1:
                out = (out @ base) % self.p
            k >>= 1
            if k:
                base = (base @ base) % self.p
        return AlgebraMap(a, a, out, kind=self.kind)

    def multiplicative_order(self, cap: int = 100000) -> Optional[int]:
        a = self.source
        if a is not self.target:
            return None
        eye = a.field.eye(a.dim)
        cur = self.matrix
        for k in range(1, cap + 1):
            if np.all(cur == eye):
                return k
            cur = (cur @ self.matrix) % self.p
        return None

    def verify_automorphism(self, claimed_order: Optional[int] = None) -> bool:
        if self.source is not self.target:
            return False
        if not (self.is_injective() and self.is_homomorphism()):
            return False
        if claimed_order is not None:
            return self.multiplicative_order(cap=claimed_order) == claimed_order
        return True

    def as_automorphism(self) -> "AlgebraMap":
        """Return a verified copy tagged ``automorphism`` with its exact order."""
        if not self.verify_automorphism():
            raise InvariantViolation("map is not an automorphism")
        order = self.multiplicative_order()
        return AlgebraMap(self.source, self.target, self.matrix, kind="automorphism", order=order)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AlgebraMap)
            and self.source is other.source
            and self.target is other.target
            and bool(np.all(self.matrix == other.matrix))
        )

    def __hash__(self) -> int:
        return hash(tuple(int(c) for c in self.matrix.flat))

    def tolist(self) -> list[list[int]]:
        return [[int(c) for c in row] for row in self.matrix]

    def __repr__(self) -> str:
        o = f", order={self.order}" if self.order is not None else ""
        return f"AlgebraMap({self.kind}, {self.source.dim}->{self.target.dim}{o})"


def identity_map(a: Algebra) -> AlgebraMap:
    return AlgebraMap(a, a, a.field.eye(a.dim), kind="automorphism", order=1)


def restrict_map(sigma: AlgebraMap, emb: AlgebraMap, target_emb: Optional[AlgebraMap] = None) -> AlgebraMap:
    """sigma on the image of ``emb``, read back through ``target_emb`` (default ``emb``).

    Raises ValueError when sigma does not carry the first image into the second.
    """
    te = target_emb if target_emb is not None else emb
    imgs = (sigma.matrix @ emb.matrix) % sigma.p
    x = solve_columns(te.matrix, imgs, sigma.p)
    if x is None:
        raise ValueError("map does not preserve the given subalgebra")
    return AlgebraMap(emb.source, te.source, x, kind=sigma.kind if te is emb else "linear")


def map_from_images(source: Algebra, target: Algebra, images: Sequence[np.ndarray], kind: str = "linear") -> AlgebraMap:
    """The linear map sending basis vector i of ``source`` to ``images[i]``."""
    cols = np.array([np.asarray(v) % source.p for v in images]).reshape(source.dim, target.dim)
    return AlgebraMap(source, target, np.ascontiguousarray(cols.T), kind=kind)


# ---------------------------------------------------------------------------
# dichotomy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroDivisor:
    """A verified pair z, w with z != 0, w != 0 and z * w = 0."""

    z: AlgElem
    w: AlgElem

    def __post_init__(self) -> None:
        if self.z.parent is not self.w.parent:
            raise InvariantViolation("zero divisor pair lives in two algebras")
        if self.z.is_zero() or self.w.is_zero():
            raise InvariantViolation("zero divisor pair has a zero entry")
        if not (self.z * self.w).is_zero():
            raise InvariantViolation("claimed zero divisor pair multiplies to a nonzero element")

    @property
    def is_zero_divisor(self) -> bool:
        return True

    def mapped(self, f: AlgebraMap) -> "ZeroDivisor":
        """Transport along an injective homomorphism."""
        return ZeroDivisor(f(self.z), f(self.w))


@dataclass(frozen=True)
class Found(Generic[T]):
    value: T

    @property
    def is_zero_divisor(self) -> bool:
        return False


Dichotomy = Union[ZeroDivisor, Found]


class ZeroDivisorFound(Exception):
    """Internal control flow: a zero divisor surfaced deep inside a procedure."""

    def __init__(self, zd: ZeroDivisor) -> None:
        super().__init__("zero divisor found")
        self.zd = zd


def zero_divisor_from(z: AlgElem) -> ZeroDivisor:
    """Pair a nonzero non-unit z with the canonical vector of its right annihilator."""
    if z.is_zero():
        raise InvariantViolation("zero is not a zero divisor")
    ker = z.parent.right_annihilator(z.v)
    if len(ker) == 0:
        raise InvariantViolation("element is a unit, not a zero divisor")
    return ZeroDivisor(z, AlgElem(z.parent, ker[0]))


def raise_zero_divisor(z: AlgElem) -> None:
    raise ZeroDivisorFound(zero_divisor_from(z))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def from_polynomial(f: Poly) -> Algebra:
    """F_p[x]/(f) with basis 1, x, ..., x^(n-1)."""
    if f.deg < 1:
        raise ValueError("from_polynomial needs deg f >= 1")
    f = f.monic()
    squarefree_part_check(f)
    field, n = f.field, f.deg
    powers = []  # x^k mod f for k < 2n - 1
    cur = Poly.const(field, 1)
    x = Poly.x(field)
    for _ in range(2 * n - 1):
        powers.append(list(cur.coeffs) + [0] * (n - len(cur.coeffs)))
        cur = (cur * x) % f
    table = [[powers[i + j] for j in range(n)] for i in range(n)]
    one = [1] + [0] * (n - 1)
    return Algebra(field, table, one, check=False, name=f"F_{f.p}[x]/({f})")


def element_from_poly(a: Algebra, g: Poly, x: np.ndarray) -> np.ndarray:
    """g evaluated at x (Horner)."""
    out = a.zeros()
    for c in reversed(g.coeffs):
        out = (a.mul(out, x) + c * a.one) % a.p
    return out


def minimal_polynomial(a: AlgElem) -> Poly:
    """Least-degree monic m with m(a) = 0, from the first dependency among powers."""
    alg = a.parent
    p = alg.p
    powers = [alg.one.copy()]
    while True:
        nxt = alg.mul(powers[-1], a.v)
        mat = np.array(powers).T
        c = solve(mat, nxt, p)
        if c is not None:
            # a^d = sum c_i a^i, so m = X^d - sum c_i X^i.
            return Poly(alg.field, [-int(ci) for ci in c] + [1])
        powers.append(nxt)


def minimal_polynomial_vec(alg: Algebra, x: np.ndarray) -> Poly:
    return minimal_polynomial(AlgElem(alg, x))


def subalgebra_generated(a: Algebra, gens: Sequence, over: Optional[Subspace] = None) -> Subspace:
    """Least multiplication-closed subspace containing ``over``, 1 and ``gens``."""
    vecs = [np.asarray(g.v if isinstance(g, AlgElem) else g) % a.p for g in gens]
    start = [a.one]
    if over is not None:
        start.extend(over.basis)
    space = a.span(start + vecs)
    while True:
        prods = a.products(space.basis, space.basis).reshape(-1, a.dim)
        grown = space + a.span(prods)
        if grown.dim == space.dim:
            return space
        space = grown


def ideal_generated(a: Algebra, zs: Sequence) -> Subspace:
    """Two-sided ideal generated by the given elements."""
    vecs = [np.asarray(z.v if isinstance(z, AlgElem) else z) % a.p for z in zs]
    space = a.span(vecs)
    eye = a.field.eye(a.dim)
    while space.dim:
        left = a.products(eye, space.basis).reshape(-1, a.dim)
        right = a.products(space.basis, eye).reshape(-1, a.dim)
        grown = space + a.span(np.concatenate([left, right]))
        if grown.dim == space.dim:
            return space
        space = grown
    return space


@dataclass(frozen=True)
class IdealRepr:
    """An ideal I = eA of a commutative algebra with its identity e."""

    algebra: Algebra
    space: Subspace
    e: np.ndarray

    @property
    def dim(self) -> int:
        return self.space.dim

    def idempotent(self) -> AlgElem:
        return AlgElem(self.algebra, self.e)

    def standalone(self, name: str = "") -> tuple[Algebra, AlgebraMap]:
        return self.algebra.restrict(self.space, self.e, name=name)

    def project(self, x: np.ndarray) -> np.ndarray:
        return self.algebra.mul(self.e, x)


def idempotent_of(a: Algebra, space: Subspace) -> np.ndarray:
    """The unique e in the ideal with e * v = v on its basis, else NoIdempotent."""
    b = space.basis
    d = space.dim
    if d == 0:
        return a.zeros()
    # e = sum c_k b_k; need sum_k c_k (b_k * b_j) = b_j for all j.
    prods = a.products(b, b)  # (k, j, l)
    mat = prods.transpose(1, 2, 0).reshape(d * a.dim, d)
    rhs = b.reshape(d * a.dim)
    c = solve(mat, rhs, a.p)
    if c is None:
        raise NoIdempotent(_nilpotent_in(a, space))
    e = (np.asarray(c) @ b) % a.p
    if np.any(a.mul(e, e) != e):
        raise NoIdempotent(_nilpotent_in(a, space))
    return e


def _nilpotent_in(a: Algebra, space: Subspace) -> Optional[AlgElem]:
    rad = radical(a)
    inter = rad.intersect(space)
    if inter.dim:
        return AlgElem(a, inter.basis[0])
    if rad.dim:
        return AlgElem(a, rad.basis[0])
    return None


def ideal_toolkit(a: Algebra, z_or_basis) -> IdealRepr:
    """Ideal generated by an element (or spanned by a basis) with its idempotent."""
    if isinstance(z_or_basis, AlgElem):
        if z_or_basis.is_zero():
            raise ValueError("ideal_toolkit needs a nonzero generator")
        space = ideal_generated(a, [z_or_basis])
    elif isinstance(z_or_basis, Subspace):
        space = z_or_basis
    else:
        space = ideal_generated(a, list(z_or_basis))
    e = idempotent_of(a, space)
    return IdealRepr(a, space, e)


def ideal_of_idempotent(a: Algebra, e: np.ndarray) -> IdealRepr:
    e = np.asarray(e) % a.p
    space = Subspace(a.p, a.dim, a.lmat(e).T.copy()) if np.any(e) else Subspace(a.p, a.dim)
    return IdealRepr(a, space, e)


def complement(ideal: IdealRepr) -> IdealRepr:
    """The annihilator of e, i.e. (1 - e) A."""
    a = ideal.algebra
    f = (a.one - ideal.e) % a.p
    return ideal_of_idempotent(a, f)


def split(a: Algebra, ideal: IdealRepr) -> tuple[tuple[Algebra, AlgebraMap], tuple[Algebra, AlgebraMap]]:
    """A = I + I^perp as two standalone algebras with their back-embeddings."""
    comp = complement(ideal)
    if ideal.dim == 0 or comp.dim == 0:
        raise ValueError("split needs a proper nonzero ideal")
    return ideal.standalone(), comp.standalone()


def fixed_subalgebra(a: Algebra, gamma: Sequence[AlgebraMap]) -> Subspace:
    """Intersection of the kernels of (sigma - id)."""
    if not gamma:
        return a.full_space()
    eye = a.field.eye(a.dim)
    stacked = np.concatenate([(g.matrix - eye) % a.p for g in gamma])
    ker = kernel(stacked, a.p)
    return Subspace(a.p, a.dim, ker if len(ker) else None, reduced=True)


def center(a: Algebra) -> Subspace:
    n, p, t = a.dim, a.p, a.table
    if a.commutative:
        return a.full_space()
    # x in the center iff sum_i x_i (t[i, j, :] - t[j, i, :]) = 0 for every j.
    diff = (t - t.transpose(1, 0, 2)) % p  # (i, j, l)
    mat = diff.transpose(1, 2, 0).reshape(n * n, n)
    ker = kernel(mat, p)
    return Subspace(p, n, ker if len(ker) else None, reduced=True)


def centralizer(a: Algebra, space: Subspace) -> Subspace:
    """{x : x y = y x for all y in space}."""
    n, p = a.dim, a.p
    if space.dim == 0:
        return a.full_space()
    blocks = [(a.rmat(y) - a.lmat(y)) % p for y in space.basis]
    ker = kernel(np.concatenate(blocks), p)
    return Subspace(p, n, ker if len(ker) else None, reduced=True)


def _trace_power_functional(mats: Sequence[np.ndarray], p: int, i: int) -> list[int]:
    """g_i(a) = (Tr(lift(a)^(p^i)) mod p^(i+1)) / p^i, per regular-representation matrix."""
    mod = p ** (i + 1)
    out = []
    for m in mats:
        cur = np.array([[int(c) for c in row] for row in m], dtype=object)
        for _ in range(i):
            cur = _mat_pow_mod(cur, p, mod)
        tr = int(sum(cur[k, k] for k in range(cur.shape[0]))) % mod
        if tr % (p**i):
            raise InvariantViolation("trace of a p-power lift not divisible as expected")
        out.append((tr // p**i) % p)
    return out


def _mat_pow_mod(m: np.ndarray, e: int, mod: int) -> np.ndarray:
    n = m.shape[0]
    out = np.zeros((n, n), dtype=object)
    for k in range(n):
        out[k, k] = 1
    base = m
    while e:
        if e & 1:
            out = (out @ base) % mod
        e >>= 1
        if e:
            base = (base @ base) % mod
    return out


def radical(a: Algebra) -> Subspace:
    """Jacobson radical via the characteristic-p trace-form iteration.

    I_{-1} = A and I_i = {x in I_{i-1} : g_i(x b) = 0 for all b in A},
    where g_i is the p^i-th trace functional on the regular representation;
    g_i is linear on I_{i-1} and the chain stops at i = floor(log_p n).
    """
    n, p = a.dim, a.p
    current = a.full_space()
    i = 0
    while True:
        if current.dim == 0:
            return current
        # Functional values on products u_k * b_j for u_k in the current ideal.
        prods = a.products(current.basis, a.field.eye(n))  # (k, j, l)
        d = current.dim
        if i == 0:
            # Tr L_x is linear in x: trace of L_{b_l} is sum_j table[l, j, j].
            traces = np.einsum("ljj->l", a.table) % p
            vals = np.tensordot(prods, traces, axes=([2], [0])).T % p
        else:
            vals = np.zeros((n, d), dtype=object)
            for k in range(d):
                mats = [a.lmat(prods[k, j]) for j in range(n)]
                col = _trace_power_functional(mats, p, i)
                for j in range(n):
                    vals[j, k] = col[j]
        ker = kernel(vals, p)
        nxt = Subspace(p, n, (ker @ current.basis) % p if len(ker) else None)
        current = nxt
        if p ** (i + 1) > n:
            return current
        i += 1


@dataclass(frozen=True)
class StructureInfo:
    center: Subspace
    radical: Subspace
    simple_component_sizes: Optional[tuple[int, ...]]


def _frobenius_matrix(a: Algebra) -> np.ndarray:
    """Matrix of the (linear, since A is commutative) map x -> x^p."""
    cols = [a.power(a.basis_vec(i), a.p) for i in range(a.dim)]
    return np.array(cols).T % a.p


def _sizes_from_frobenius(a: Algebra) -> tuple[int, ...]:
    """Component degrees from dim ker(F^d - 1) = sum_i gcd(d, d_i)."""
    n, p = a.dim, a.p
    frob = _frobenius_matrix(a)
    eye = a.field.eye(n)
    counts = []
    cur = eye
    for _ in range(n):
        cur = (cur @ frob) % p
        counts.append(n - rank((cur - eye) % p, p))
    # Solve sum_e c_e gcd(d, e) = counts[d - 1] for d = 1..n.
    from math import gcd

    mat = [[Fraction(gcd(d, e)) for e in range(1, n + 1)] for d in range(1, n + 1)]
    rhs = [Fraction(c) for c in counts]
    sol = _solve_rational(mat, rhs)
    sizes: list[int] = []
    for e, c in enumerate(sol, start=1):
        if c.denominator != 1 or c < 0:
            raise InvariantViolation("Frobenius fixed-point counts are inconsistent")
        sizes.extend([p**e] * int(c))
    return tuple(sorted(sizes))


def _solve_rational(mat: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(mat)
    m = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    for c in range(n):
        piv = next(r for r in range(c, n) if m[r][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [v * inv for v in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [vr - f * vc for vr, vc in zip(m[r], m[c])]
    return [m[r][n] for r in range(n)]


def candidate_elements(a: Algebra, space: Optional[Subspace] = None) -> Iterator[np.ndarray]:
    """Deterministic search order: basis vectors, then pairwise sums in index order."""
    basis = space.basis if space is not None else a.field.eye(a.dim)
    k = len(basis)
    for i in range(k):
        yield basis[i] % a.p
    for i in range(k):
        for j in range(i + 1, k):
            yield (basis[i] + basis[j]) % a.p


def component_sizes(a: Algebra) -> tuple[int, ...]:
    """Sizes p^d of the simple components of a commutative semisimple algebra."""
    if not a.commutative:
        raise ValueError("component sizes need a commutative algebra")
    rad = radical(a)
    if rad.dim:
        raise RadicalNonzero(AlgElem(a, rad.basis[0]))
    p, n = a.p, a.dim
    # Preferred route: a generating element turns A into F_p[X]/(g).
    # Only a short candidate prefix is tried; split algebras rarely have a
    # generator among the first few, and the Frobenius count is cheap.
    for x in itertools.islice(_generator_candidates(a), 4):
        g = minimal_polynomial_vec(a, x)
        if g.deg == n:
            sizes = []
            for d, part in distinct_degree_factorization(g):
                sizes.extend([p**d] * (part.deg // d))
            return tuple(sorted(sizes))
    return _sizes_from_frobenius(a)


def _generator_candidates(a: Algebra) -> Iterator[np.ndarray]:
    n, p = a.dim, a.p
    yield from candidate_elements(a)
    # Then x = sum c^i b_i for c = 1, 2, ... (a moment-curve scan).
    for c in range(2, min(p, n * n + 2)):
        v = a.zeros()
        for i in range(n):
            v[i] = pow(c, i, p)
        yield v


def structure_analysis(a: Algebra) -> StructureInfo:
    cen = center(a)
    rad = radical(a)
    sizes: Optional[tuple[int, ...]] = None
    if a.commutative and rad.dim == 0:
        sizes = component_sizes(a)
    return StructureInfo(cen, rad, sizes)


# ---------------------------------------------------------------------------
# modules over a subalgebra, primitive elements
# ---------------------------------------------------------------------------


def module_coords(a: Algebra, b: Subspace, free: Sequence[np.ndarray]) -> np.ndarray:
    """k-basis {beta_t u_s} of A for a B-basis beta and free basis u; shape (d*m, n).

    Row index is t * m + s.
    """
    prods = a.products(b.basis, np.array(free))  # (t, s, n)
    return prods.reshape(-1, a.dim)


def free_coordinates(a: Algebra, b: Subspace, free: Sequence[np.ndarray], x: np.ndarray) -> np.ndarray:
    """B-coordinates of x in the free basis, as an (m, n) array of B-elements."""
    kb = module_coords(a, b, free)
    c = solve(kb.T, x, a.p)
    if c is None:
        raise ValueError("element not in the B-span of the free basis")
    d, m = b.dim, len(free)
    c = np.asarray(c).reshape(d, m)
    return (c.T @ b.basis) % a.p


def primitive_element(a: Algebra, b: Optional[Subspace] = None) -> Dichotomy:
    """An element alpha with 1, alpha, ..., alpha^(m-1) a free B-basis of A.

    Grows B[alpha] one ambient basis vector at a time, taking alpha + c u for
    the least c in 0..n^2 that generates B[alpha, u].  A B-relation among the
    final powers with a non-unit coefficient is returned as a zero divisor.
    """
    from .zerodiv import free_basis_or_zero_divisor

    if not a.commutative:
        raise ValueError("primitive_element needs a commutative algebra")
    if b is None:
        b = a.scalars()
    n, p = a.dim, a.p
    if b.dim == 0 or n % b.dim:
        raise ValueError("A cannot be free over B")
    m = n // b.dim
    if m == 1:
        return Found(AlgElem(a, a.one.copy()))
    alpha = a.zeros()
    cur = subalgebra_generated(a, [], b)
    for u in a.field.eye(n):
        if cur.contains(u):
            continue
        target = subalgebra_generated(a, [alpha, u], b)
        for c in range(min(p, n * n + 1)):
            cand = (alpha + c * u) % p
            gen = subalgebra_generated(a, [cand], b)
            if gen.dim == target.dim:
                alpha, cur = cand, gen
                break
        else:
            raise ValueError("field too small for the primitive element search")
        if cur.dim == n:
            break
    powers = [a.power(alpha, i) for i in range(m)]
    res = free_basis_or_zero_divisor(a, b, powers)
    if isinstance(res, ZeroDivisor):
        return res
    if len(res.value) != m:
        raise InvariantViolation("primitive element powers do not span A over B")
    return Found(AlgElem(a, alpha))


# ---------------------------------------------------------------------------
# tensor products over a subalgebra
# ---------------------------------------------------------------------------


@dataclass
class FreeStructure:
    """A B-algebra free of rank M over B, by B-valued structure constants.

    ``bstd`` is B as a standalone algebra with basis beta_0..beta_{d-1};
    ``consts[I, K, S]`` is the B-coordinate vector of the coefficient of u_S
    in u_I * u_K; ``one[S]`` is the B-coordinate vector of the coefficient of
    u_S in 1.
    """

    bstd: Algebra
    consts: np.ndarray
    one: np.ndarray

    @property
    def rank(self) -> int:
        return self.consts.shape[0]

    def to_algebra(self, name: str = "") -> Algebra:
        """k-algebra with basis beta_t u_S, index t * M + S."""
        bt, p = self.bstd.table, self.bstd.p
        d, mm = self.bstd.dim, self.rank
        # w[t, t2, b, :] = beta_t beta_t2 beta_b
        w = np.tensordot(bt, bt, axes=([2], [0])) % p  # (t, t2, b, out)
        # prod[t, t2, I, K, S, out] = sum_b w[t, t2, b, out] consts[I, K, S, b]
        prod = np.tensordot(w, self.consts, axes=([2], [3])) % p  # (t, t2, out, I, K, S)
        tab = prod.transpose(0, 3, 1, 4, 2, 5).reshape(d * mm, d * mm, d * mm)
        one = self.one.T.reshape(d * mm)  # index t * M + S
        return Algebra(self.bstd.field, tab, one, check=False, name=name)

    def tensor(self, other: "FreeStructure") -> "FreeStructure":
        """self (x)_B other, basis index I1 * M2 + I2."""
        bt, p = self.bstd.table, self.bstd.p
        m1, m2, d = self.rank, other.rank, self.bstd.dim
        # coefficient product in B: c1 * c2 = sum_{a,b} c1_a c2_b bt[a, b, :]
        left = np.tensordot(self.consts, bt, axes=([3], [0])) % p  # (I1, K1, S1, b, out)
        full = np.tensordot(left, other.consts, axes=([3], [3])) % p  # (I1,K1,S1,out,I2,K2,S2)
        full = full.transpose(0, 4, 1, 5, 2, 6, 3).reshape(m1 * m2, m1 * m2, m1 * m2, d)
        o = np.tensordot(self.one, bt, axes=([1], [0])) % p  # (S1, b, out)
        o = np.tensordot(o, other.one, axes=([1], [1])) % p  # (S1, out, S2)
        o = o.transpose(0, 2, 1).reshape(m1 * m2, d)
        return FreeStructure(self.bstd, full, o)


def free_structure(a: Algebra, b: Subspace, free: Sequence[np.ndarray]) -> tuple[FreeStructure, Algebra, AlgebraMap]:
    """Express A as a free B-algebra on ``free``; also returns (B standalone, its embedding)."""
    bstd, bemb = a.restrict(b)
    m = len(free)
    fr = np.array([np.asarray(u) % a.p for u in free])
    kb = module_coords(a, b, fr)
    if rank(kb, a.p) != a.dim or len(kb) != a.dim:
        raise ValueError("given elements are not a free B-basis of A")
    d = b.dim
    prods = a.products(fr, fr).reshape(m * m, a.dim)
    targets = np.concatenate([prods, a.one.reshape(1, -1)])
    # Solve kb.T @ c = target for each target; c indexed t * m + s.
    coeffs = _solve_many(kb.T, targets, a.p)  # (count, d*m)
    coeffs = coeffs.reshape(-1, d, m).transpose(0, 2, 1)  # (count, s, t)
    consts = coeffs[:-1].reshape(m, m, m, d)
    one = coeffs[-1]
    return FreeStructure(bstd, consts, one), bstd, bemb


def _solve_many(mat: np.ndarray, targets: np.ndarray, p: int) -> np.ndarray:
    """Solve mat @ x = t for each row t of targets (mat assumed square invertible)."""
    n = mat.shape[0]
    aug = np.concatenate([mat, targets.T.astype(mat.dtype) if mat.dtype != object else targets.T], axis=1)
    r, piv = rref(aug, p)
    if piv[:n] != list(range(n)) or (len(piv) > n):
        raise ValueError("linear system is singular or inconsistent")
    return r[:n, n:].T.copy()


@dataclass
class TensorSquare:
    algebra: Algebra
    left: AlgebraMap
    right: AlgebraMap
    structure: FreeStructure


def tensor_power_embedding(fs: FreeStructure, a: Algebra, b: Subspace, free: np.ndarray, big: Algebra, r: int, i: int) -> AlgebraMap:
    """mu_i: A -> A^{(x) r}, h -> 1 (x) ... (x) h (x) ... (x) 1 (h in slot i)."""
    p = a.p
    d, m = b.dim, len(free)
    bstd = fs.bstd
    kb = module_coords(a, b, free)
    # Image of beta_t u_s: beta_t * prod_{slot != i} one-coords (B-valued), u_s in slot i.
    one = fs.one  # (m, d)
    cols = np.zeros((d * m ** r, a.dim), dtype=big.table.dtype)
    # Build the B-valued tensor of the image of u_s for each s: shape (m,)*r x d
    for s in range(m):
        coef = {(): bstd.one.copy()}
        for slot in range(r):
            nxt = {}
            for key, val in coef.items():
                if slot == i:
                    nxt[key + (s,)] = val
                else:
                    for s2 in range(m):
                        if np.any(one[s2]):
                            nxt[key + (s2,)] = bstd.mul(val, one[s2])
            coef = nxt
        for t in range(d):
            col = np.zeros(d * m**r, dtype=object)
            beta = bstd.basis_vec(t)
            for key, val in coef.items():
                idx = 0
                for s2 in key:
                    idx = idx * m + s2
                prod_b = bstd.mul(beta, val)
                for t2 in range(d):
                    if prod_b[t2]:
                        col[t2 * m**r + idx] = (col[t2 * m**r + idx] + prod_b[t2]) % p
            # column for k-basis element beta_t u_s of A (in kb ordering t * m + s)
            cols[:, t * m + s] = col
    # cols maps kb-coordinates to big coordinates; convert A's standard basis.
    kb_inv = _solve_many(kb.T, a.field.eye(a.dim), p)  # row j: kb-coords of e_j
    mat = (cols @ kb_inv.T) % p
    return AlgebraMap(a, big, mat, kind="embedding")


def tensor_square_over(a: Algebra, b: Optional[Subspace], free_basis: Sequence) -> TensorSquare:
    """A (x)_B A with the left (h -> h (x) 1) and right (h -> 1 (x) h) embeddings."""
    if b is None:
        b = a.scalars()
    free = np.array([np.asarray(u.v if isinstance(u, AlgElem) else u) % a.p for u in free_basis])
    fs, _, _ = free_structure(a, b, free)
    sq = fs.tensor(fs)
    alg = sq.to_algebra(name="tensor square")
    left = tensor_power_embedding(fs, a, b, free, alg, 2, 0)
    right = tensor_power_embedding(fs, a, b, free, alg, 2, 1)
    for emb in (left, right):
        if not (emb.is_homomorphism() and emb.is_injective()):
            raise InvariantViolation("tensor square embedding failed verification")
    return TensorSquare(alg, left, right, sq)
