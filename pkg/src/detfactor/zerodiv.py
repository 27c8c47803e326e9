"""Three workhorses that either produce an object or a zero divisor.

* :func:`discrete_log_r_elements` is a Pohlig-Hellman digit loop for units of
  prime-power order in which every equality test is replaced by "is the
  difference zero or a zero divisor".
* :func:`free_basis_or_zero_divisor` greedily builds a free basis of a module
  over a commutative algebra; a coefficient that kills a new generator modulo
  the current span is necessarily a zero divisor.
* :func:`refine_invariant_decomposition` splits a decomposition into
  orthogonal ideals until a set of automorphisms permutes its pieces.

Also here: a complete split of a commutative semisimple algebra through its
Frobenius-fixed subalgebra, used whenever the field is too small for the
primitive-element machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .algebra import (
    AlgElem,
    Algebra,
    AlgebraMap,
    Dichotomy,
    Found,
    IdealRepr,
    InvariantViolation,
    ZeroDivisor,
    _frobenius_matrix,
    idempotent_of,
    ideal_of_idempotent,
    minimal_polynomial_vec,
    zero_divisor_from,
)
from .base import Subspace, kernel
from .poly import Poly, berlekamp_deterministic

__all__ = [
    "OrderViolation",
    "DlogZeroDivisor",
    "discrete_log_r_elements",
    "r_order_exponent",
    "free_basis_or_zero_divisor",
    "refine_invariant_decomposition",
    "annihilator_idempotent",
    "ideal_idempotent",
    "berlekamp_zero_divisor",
    "berlekamp_split",
    "split_on_zero_divisor",
]


class OrderViolation(ValueError):
    """The first r-element has smaller order than the second."""


@dataclass(frozen=True)
class DlogZeroDivisor(ZeroDivisor):
    """A zero divisor of the form a^s - b^s_prime."""

    s: int = 0
    s_prime: int = 0


def _vec(x) -> np.ndarray:
    return x.v if isinstance(x, AlgElem) else np.asarray(x)


def ideal_idempotent(a: Algebra, z: np.ndarray) -> np.ndarray:
    """Identity element of the ideal zA of a commutative semisimple algebra."""
    z = np.asarray(z) % a.p
    if not np.any(z):
        return a.zeros()
    space = Subspace(a.p, a.dim, a.lmat(z).T.copy())
    return idempotent_of(a, space)


def annihilator_idempotent(a: Algebra, z: np.ndarray) -> np.ndarray:
    """Identity element of {x : z x = 0}, i.e. 1 minus the identity of zA."""
    return (a.one - ideal_idempotent(a, z)) % a.p


def _tower_limit(a: Algebra, r: int) -> int:
    # r^t divides |A*| < p^dim, so t <= dim * log_r p.
    return a.dim * int(math.log(a.p, r) + 1) + 1


def r_order_exponent(a: Algebra, x: np.ndarray, r: int) -> tuple[int, Optional[np.ndarray]]:
    """Least t with x^(r^t) - 1 zero or a zero divisor.

    Returns (t, None) when x^(r^t) = 1 and (t, x^(r^t) - 1) when that
    difference is a zero divisor.  Raises ValueError for non r-elements.
    """
    cur = np.asarray(x) % a.p
    for t in range(_tower_limit(a, r) + 1):
        diff = (cur - a.one) % a.p
        if not np.any(diff):
            return t, None
        if not a.is_unit(diff):
            return t, diff
        cur = a.power(cur, r)
    raise ValueError("element is not an r-element")


def _dlog_zero_divisor(a: Algebra, z: np.ndarray, s: int, s_prime: int, witness: Optional[np.ndarray] = None) -> DlogZeroDivisor:
    if witness is None:
        witness = zero_divisor_from(AlgElem(a, z)).w.v
    return DlogZeroDivisor(AlgElem(a, z), AlgElem(a, witness), s, s_prime)


def discrete_log_r_elements(alg: Algebra, a, b, r: int) -> Dichotomy:
    """Found(s) with a^s = b, or a :class:`DlogZeroDivisor` a^s - b^s'.

    ``a`` and ``b`` are units of r-power order in a commutative semisimple
    algebra with ord(a) >= ord(b).
    """
    p = alg.p
    av, bv = _vec(a) % p, _vec(b) % p
    if r == p:
        raise ValueError("r must differ from the characteristic")
    ta, za = r_order_exponent(alg, av, r)
    if za is not None:
        return _dlog_zero_divisor(alg, za, r**ta, 0)
    tb, zb = r_order_exponent(alg, bv, r)
    if zb is not None:
        # a^0 - b^(r^tb) = -(b^(r^tb) - 1)
        return _dlog_zero_divisor(alg, (-zb) % p, 0, r**tb)
    if ta < tb:
        raise OrderViolation(f"ord(a) = {r}^{ta} < ord(b) = {r}^{tb}")
    mult = r ** (ta - tb)
    a1 = alg.power(av, mult)
    t = tb
    if t == 0:
        return Found(0)
    e = alg.one.copy()
    s = 0
    for j in range(1, t + 1):
        bpow = alg.power(bv, r ** (t - j))
        digits = range(1, r) if j == 1 else range(r)
        for d in digits:
            cand = s + d * r ** (j - 1)
            z = (alg.power(a1, cand * r ** (t - j)) - bpow) % p
            # the annihilator of z inside eA
            ez = alg.mul(e, z)
            if not np.any(ez):
                new_e = e
            else:
                f = ideal_idempotent(alg, ez)
                new_e = alg.mul(e, (alg.one - f) % p)
            if np.any(new_e):
                s, e = cand, new_e
                break
        else:
            raise InvariantViolation("no base-r digit matched in the discrete log loop")
    diff = (alg.power(a1, s) - bv) % p
    if not np.any(diff):
        return Found(mult * s)
    # e kills a^(mult s) - b while neither is zero.
    return _dlog_zero_divisor(alg, diff, mult * s, 1, e)


# ---------------------------------------------------------------------------
# free bases
# ---------------------------------------------------------------------------


def free_basis_or_zero_divisor(
    alg: Algebra,
    action: Union[Subspace, np.ndarray, None] = None,
    generators: Optional[Sequence] = None,
    *,
    complete: bool = False,
) -> Dichotomy:
    """Greedy free basis of a module over a commutative algebra, or a zero divisor.

    ``action`` selects the module:

    * a :class:`Subspace` B of ``alg`` (a subalgebra): the module is ``alg``
      itself over B; zero divisors are elements of B in ambient coordinates.
    * an array of shape (dim alg, N, N): matrix of each basis element of
      ``alg`` acting on V = F_p^N; zero divisors are elements of ``alg``.
    * None: ``alg`` acting on itself.

    ``generators`` are tried first, then (for a subalgebra) the identity,
    then the standard basis of V.

    With ``complete`` (subalgebra action, B commutative semisimple) a failed
    greedy step splits B along the idempotent it exposes and both halves are
    solved separately, so a zero divisor means A is genuinely not free.
    """
    p = alg.p
    if action is None:
        action = alg.full_space()
    if complete:
        if not isinstance(action, Subspace):
            raise ValueError("complete search needs a subalgebra action")
        return _complete_free_basis(alg, action, generators)
    if isinstance(action, Subspace):
        coeff_basis = action.basis
        mats = np.array([alg.lmat(b) for b in coeff_basis]) if len(coeff_basis) else np.zeros((0, alg.dim, alg.dim), dtype=np.int64)
        ndim = alg.dim
    else:
        mats = np.asarray(action) % p
        coeff_basis = alg.field.eye(alg.dim)
        ndim = mats.shape[1]
    ncoef = len(coeff_basis)
    if ncoef == 0:
        raise ValueError("coefficient algebra is zero")
    gens = [np.asarray(_vec(g)) % p for g in (generators or [])]
    if isinstance(action, Subspace):
        # B * 1 = B is never killed, so 1 always extends a partial basis.
        gens.append(alg.one.copy())
    eye = alg.field.eye(ndim)
    span = Subspace(p, ndim)
    chosen: list[np.ndarray] = []
    for v in gens + list(eye):
        if span.dim == ndim:
            break
        if span.contains(v):
            continue
        cols = np.tensordot(mats, v, axes=([2], [0])) % p  # (ncoef, N): image of v under each coefficient
        if span.dim:
            stacked = np.concatenate([cols, span.basis]).T
        else:
            stacked = cols.T
        ker = kernel(stacked, p)
        coeffs = [row[:ncoef] for row in ker if np.any(row[:ncoef])]
        if coeffs:
            c = coeffs[0]
            x = (c @ coeff_basis) % p
            return _coefficient_zero_divisor(alg, action, x)
        span = span + Subspace(p, ndim, cols)
        chosen.append(v)
    if span.dim != ndim:
        raise InvariantViolation("free basis search did not exhaust the module")
    return Found(chosen)


def _complete_free_basis(alg: Algebra, sub: Subspace, generators: Optional[Sequence]) -> Dichotomy:
    res = free_basis_or_zero_divisor(alg, sub, generators)
    if isinstance(res, Found):
        return res
    p = alg.p
    bstd, bemb = alg.restrict(sub)
    e = bemb(ideal_idempotent(bstd, sub.coords(res.z.v)))
    halves = []
    for idem in (e, (alg.one - e) % p):
        space = Subspace(p, alg.dim, alg.lmat(idem).T.copy())
        piece, emb = alg.restrict(space, one=idem)
        inner = Subspace(p, piece.dim, np.array([space.coords(alg.mul(idem, b)) for b in sub.basis]))
        half = _complete_free_basis(piece, inner, None)
        if isinstance(half, ZeroDivisor):
            return half.mapped(emb)
        halves.append([emb(u) for u in half.value])
    if len(halves[0]) != len(halves[1]):
        # e A and (1 - e) A have different ranks, so A is not free over B.
        return ZeroDivisor(AlgElem(alg, e), AlgElem(alg, (alg.one - e) % p))
    return Found([(u + v) % p for u, v in zip(*halves)])


def _coefficient_zero_divisor(alg: Algebra, action, x: np.ndarray) -> ZeroDivisor:
    """x is a nonzero non-unit of the coefficient algebra; pair it with a witness there."""
    p = alg.p
    if isinstance(action, Subspace):
        basis = action.basis
        # w in B with x w = 0: kernel of lmat(x) restricted to B.
        prods = (alg.lmat(x) @ basis.T) % p
        ker = kernel(prods, p)
        if len(ker) == 0:
            raise InvariantViolation("coefficient found by the free basis search is a unit")
        w = (ker[0] @ basis) % p
        return ZeroDivisor(AlgElem(alg, x), AlgElem(alg, w))
    return zero_divisor_from(AlgElem(alg, x))


# ---------------------------------------------------------------------------
# invariant refinement
# ---------------------------------------------------------------------------


def refine_invariant_decomposition(alg: Algebra, gamma: Sequence[AlgebraMap], start: Sequence) -> list[IdealRepr]:
    """Refine orthogonal ideals until every map in ``gamma`` permutes them.

    ``start`` holds IdealRepr objects or idempotent vectors.
    """
    p = alg.p
    idems = [np.asarray(s.e if isinstance(s, IdealRepr) else _vec(s)) % p for s in start]
    idems = [e for e in idems if np.any(e)]
    total = sum((e for e in idems), alg.zeros()) % p
    if np.any(total != alg.one):
        raise ValueError("start ideals do not sum to the algebra")
    changed = True
    while changed:
        changed = False
        for sigma in gamma:
            for e in list(idems):
                img = sigma(e)
                for k, f in enumerate(idems):
                    g = alg.mul(f, img)
                    if np.any(g) and np.any(g != f):
                        idems[k : k + 1] = [g, (f - g) % p]
                        changed = True
                        break
                if changed:
                    break
            if changed:
                break
    return [ideal_of_idempotent(alg, e) for e in idems]


# ---------------------------------------------------------------------------
# small-field route
# ---------------------------------------------------------------------------


def _frobenius_fixed(alg: Algebra) -> Subspace:
    frob = _frobenius_matrix(alg)
    ker = kernel((frob - alg.field.eye(alg.dim)) % alg.p, alg.p)
    return Subspace(alg.p, alg.dim, ker if len(ker) else None, reduced=True)


def _split_roots(g: Poly) -> list[int]:
    roots = []
    for fac in berlekamp_deterministic(g):
        if fac.deg != 1:
            raise InvariantViolation("Frobenius-fixed element has a non-split minimal polynomial")
        roots.append((-fac.coeffs[0]) % g.p)
    return sorted(set(roots))


def berlekamp_split(alg: Algebra) -> list[np.ndarray]:
    """Primitive idempotents of a commutative semisimple algebra.

    The Frobenius-fixed subalgebra is F_p^c with one factor per component;
    each of its basis vectors has a split minimal polynomial whose Lagrange
    idempotents refine the running partition.
    """
    p = alg.p
    fixed = _frobenius_fixed(alg)
    parts = [alg.one.copy()]
    for u in fixed.basis:
        roots = _split_roots(minimal_polynomial_vec(alg, u))
        if len(roots) < 2:
            continue
        lag = []
        for i, ci in enumerate(roots):
            num = alg.one.copy()
            den = 1
            for j, cj in enumerate(roots):
                if j != i:
                    num = alg.mul(num, (u - cj * alg.one) % p)
                    den = den * (ci - cj) % p
            lag.append((num * pow(den, -1, p)) % p)
        parts = [alg.mul(e, l) for e in parts for l in lag]
        parts = [e for e in parts if np.any(e)]
        if len(parts) == fixed.dim:
            break
    if len(parts) != fixed.dim:
        raise InvariantViolation("Berlekamp split did not reach the component count")
    return sorted(parts, key=lambda v: tuple(int(c) for c in v))


def berlekamp_zero_divisor(alg: Algebra) -> Optional[ZeroDivisor]:
    """A zero divisor of a commutative semisimple algebra, or None for a field."""
    parts = berlekamp_split(alg)
    if len(parts) < 2:
        return None
    e = parts[0]
    return ZeroDivisor(AlgElem(alg, e), AlgElem(alg, (alg.one - e) % alg.p))


def split_on_zero_divisor(alg: Algebra, z) -> tuple[IdealRepr, IdealRepr]:
    """The ideal zA and its complement."""
    e = ideal_idempotent(alg, _vec(z))
    f = (alg.one - e) % alg.p
    if not np.any(e) or not np.any(f):
        raise ValueError("element is zero or a unit")
    return ideal_of_idempotent(alg, e), ideal_of_idempotent(alg, f)
