"""Univariate polynomials over F_p, distinct-degree factorization,
Berlekamp's deterministic factoring and cyclotomic polynomials."""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .base import PrimeField, kernel

__all__ = [
    "Poly",
    "NotSquarefree",
    "CharDividesIndex",
    "cyclotomic",
    "distinct_degree_factorization",
    "berlekamp_deterministic",
    "squarefree_part_check",
    "factor_sort_key",
    "euler_phi",
]


class NotSquarefree(ValueError):
    """The input has a repeated factor; ``factor`` is gcd(f, f')."""

    def __init__(self, factor: "Poly") -> None:
        super().__init__(f"polynomial is not squarefree; gcd(f, f') = {factor}")
        self.factor = factor


class CharDividesIndex(ValueError):
    """The characteristic divides the cyclotomic index."""


class Poly:
    """A polynomial over F_p with ascending coefficients, no leading zeros."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: PrimeField, coeffs: Iterable[int]) -> None:
        p = field.p
        cs = [int(c) % p for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.coeffs: tuple[int, ...] = tuple(cs)

    # constructors ---------------------------------------------------
    @classmethod
    def x(cls, field: PrimeField) -> "Poly":
        return cls(field, [0, 1])

    @classmethod
    def const(cls, field: PrimeField, c: int) -> "Poly":
        return cls(field, [c])

    @classmethod
    def monomial(cls, field: PrimeField, d: int, c: int = 1) -> "Poly":
        return cls(field, [0] * d + [c])

    @classmethod
    def from_roots(cls, field: PrimeField, roots: Iterable[int]) -> "Poly":
        out = cls.const(field, 1)
        for a in roots:
            out = out * cls(field, [-a, 1])
        return out

    # basic properties -----------------------------------------------
    @property
    def p(self) -> int:
        return self.field.p

    @property
    def deg(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return self.lc == 1

    def is_const(self) -> bool:
        return len(self.coeffs) <= 1

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        inv = self.field.inv(self.lc)
        return Poly(self.field, [c * inv for c in self.coeffs])

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self.coeffs == Poly.const(self.field, other).coeffs
        return isinstance(other, Poly) and self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.p, self.coeffs))

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.deg, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
            if i == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}*{mono}")
        return " + ".join(terms) + f" (mod {self.p})"

    def to_json(self) -> dict:
        return {"p": self.p, "coeffs": list(self.coeffs)}

    # arithmetic -----------------------------------------------------
    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.p != self.p:
                raise ValueError("polynomials over different fields")
            return other
        return Poly.const(self.field, int(other))

    def __add__(self, other) -> "Poly":
        o = self._lift(other)
        a, b = self.coeffs, o.coeffs
        n = max(len(a), len(b))
        return Poly(self.field, [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.field, [-c for c in self.coeffs])

    def __sub__(self, other) -> "Poly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Poly":
        return self._lift(other) - self

    def __mul__(self, other) -> "Poly":
        o = self._lift(other)
        a, b = self.coeffs, o.coeffs
        if not a or not b:
            return Poly(self.field, [])
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return Poly(self.field, out)

    __rmul__ = __mul__

    def __divmod__(self, other) -> tuple["Poly", "Poly"]:
        d = self._lift(other)
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        r = list(self.coeffs)
        dc = d.coeffs
        dd = len(dc) - 1
        inv = pow(dc[-1], -1, p)
        q = [0] * max(len(r) - dd, 0)
        for i in range(len(r) - 1, dd - 1, -1):
            c = r[i] % p
            if c == 0:
                continue
            c = c * inv % p
            q[i - dd] = c
            for j in range(dd + 1):
                r[i - dd + j] -= c * dc[j]
        return Poly(self.field, q), Poly(self.field, r[:dd] if dd else [])

    def __floordiv__(self, other) -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "Poly":
        return divmod(self, other)[1]

    def exact_div(self, other) -> "Poly":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def divides(self, other: "Poly") -> bool:
        return (other % self).is_zero()

    def __pow__(self, e: int) -> "Poly":
        out = Poly.const(self.field, 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def powmod(self, e: int, mod: "Poly") -> "Poly":
        out = Poly.const(self.field, 1) % mod
        base = self % mod
        while e:
            if e & 1:
                out = (out * base) % mod
            base = (base * base) % mod
            e >>= 1
        return out

    def derivative(self) -> "Poly":
        return Poly(self.field, [i * c for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, a: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * a + c) % self.p
        return acc

    def compose(self, g: "Poly") -> "Poly":
        out = Poly(self.field, [])
        for c in reversed(self.coeffs):
            out = out * g + c
        return out

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, self._lift(other)
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def xgcd(self, other: "Poly") -> tuple["Poly", "Poly", "Poly"]:
        """(g, s, t) with s*self + t*other = g monic."""
        one = Poly.const(self.field, 1)
        zero = Poly(self.field, [])
        r0, r1 = self, self._lift(other)
        s0, s1, t0, t1 = one, zero, zero, one
        while not r1.is_zero():
            q, r = divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if r0.is_zero():
            return r0, s0, t0
        inv = self.field.inv(r0.lc)
        return r0 * inv, s0 * inv, t0 * inv

    def inverse_mod(self, mod: "Poly") -> "Poly":
        g, s, _ = self.xgcd(mod)
        if g.deg != 0:
            raise ZeroDivisionError("not invertible modulo the given polynomial")
        return s % mod

    def pth_root(self) -> "Poly":
        """The polynomial g with g(X)^p = self, for self in F_p[X^p]."""
        p = self.p
        if any(c and i % p for i, c in enumerate(self.coeffs)):
            raise ValueError("not a p-th power")
        return Poly(self.field, self.coeffs[::p])


def factor_sort_key(f: Poly) -> tuple:
    return (f.deg, f.coeffs)


def euler_phi(n: int) -> int:
    out, m, d = n, n, 2
    while d * d <= m:
        if m % d == 0:
            while m % d == 0:
                m //= d
            out -= out // d
        d += 1
    if m > 1:
        out -= out // m
    return out


@lru_cache(maxsize=None)
def _cyclotomic_coeffs(r: int, p: int) -> tuple[int, ...]:
    field = PrimeField(p)
    num = Poly.monomial(field, r) - 1
    for d in range(1, r):
        if r % d == 0:
            num = num.exact_div(Poly(field, _cyclotomic_coeffs(d, p)))
    return num.coeffs


def cyclotomic(r: int, field: PrimeField) -> Poly:
    """Phi_r mod p by exact division of X^r - 1 by the lower cyclotomics."""
    if r < 1:
        raise ValueError("cyclotomic index must be positive")
    if r % field.p == 0:
        raise CharDividesIndex(f"p = {field.p} divides r = {r}")
    return Poly(field, _cyclotomic_coeffs(r, field.p))


def squarefree_part_check(f: Poly) -> None:
    """Raise NotSquarefree when gcd(f, f') is nontrivial."""
    g = f.gcd(f.derivative())
    if g.deg > 0:
        raise NotSquarefree(g)
    if f.derivative().is_zero() and f.deg > 0:  # pragma: no cover - caught above
        raise NotSquarefree(f.monic())


def distinct_degree_factorization(f: Poly) -> list[tuple[int, Poly]]:
    """Split a squarefree monic f into products of equal-degree factors."""
    if not f.is_monic():
        raise ValueError("distinct_degree_factorization expects a monic polynomial")
    if f.deg <= 0:
        return []
    squarefree_part_check(f)
    field, p = f.field, f.p
    x = Poly.x(field)
    out: list[tuple[int, Poly]] = []
    rest = f
    h = x
    d = 0
    while rest.deg > 0:
        d += 1
        if 2 * d > rest.deg:
            out.append((rest.deg, rest))
            break
        h = h.powmod(p, rest)
        g = rest.gcd(h - x)
        if g.deg > 0:
            out.append((d, g))
            rest = rest.exact_div(g)
            h = h % rest
    return out


def _berlekamp_squarefree(f: Poly) -> list[Poly]:
    field, p, n = f.field, f.p, f.deg
    if n <= 1:
        return [f]
    # Row i of q holds X^(i p) mod f.
    q = np.zeros((n, n), dtype=object)
    xp = Poly.x(field).powmod(p, f)
    cur = Poly.const(field, 1)
    for i in range(n):
        for j, c in enumerate(cur.coeffs):
            q[i, j] = c
        cur = (cur * xp) % f
    for i in range(n):
        q[i, i] = (q[i, i] - 1) % p
    basis = kernel(q.T, p)
    k = len(basis)
    factors = [f]
    if k == 1:
        return factors
    for vec in basis:
        v = Poly(field, [int(c) for c in vec])
        if v.deg <= 0:
            continue
        for s in range(p):
            nxt = []
            for g in factors:
                if g.deg <= 1:
                    nxt.append(g)
                    continue
                h = g.gcd(v - s)
                if 0 < h.deg < g.deg:
                    nxt.extend([h, g.exact_div(h)])
                else:
                    nxt.append(g)
            factors = nxt
            if len(factors) == k:
                return factors
    return factors  # pragma: no cover - Berlekamp always separates


def berlekamp_deterministic(f: Poly) -> list[Poly]:
    """Monic irreducible factors of f with multiplicity, canonically sorted.

    Work is O(p * deg^3), so callers restrict it to small characteristic.
    """
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    f = f.monic()
    out: list[Poly] = []

    def rec(g: Poly, mult: int) -> None:
        if g.deg <= 0:
            return
        d = g.derivative()
        if d.is_zero():
            rec(g.pth_root(), mult * g.p)
            return
        c = g.gcd(d)
        sqf = g.exact_div(c)
        # sqf collects every distinct factor of g exactly once.
        i = 1
        while sqf.deg > 0:
            y = sqf.gcd(c)
            part = sqf.exact_div(y)
            if part.deg > 0:
                for h in _berlekamp_squarefree(part):
                    out.extend([h] * (mult * i))
            sqf = y
            c = c.exact_div(y)
            i += 1
        if c.deg > 0:
            rec(c.pth_root(), mult * g.p)

    rec(f, 1)
    return sorted(out, key=factor_sort_key)


def product(polys: Sequence[Poly], field: PrimeField) -> Poly:
    out = Poly.const(field, 1)
    for g in polys:
        out = out * g
    return out
