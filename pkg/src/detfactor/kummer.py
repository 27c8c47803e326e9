"""Cyclotomic and Kummer extensions of commutative semisimple algebras.

E = A[zeta_r] is A tensor F_p[X]/(1 + X + ... + X^(r-1)), carrying the
automorphisms rho_a : zeta -> zeta^a.  An r-element x of E is Teichmuller
when rho_a(x) = x^omega(a) for every a.  Built on top of these:

* resolvents x with x^tau = zeta x for a semiregular tau of prime order,
* extension of an automorphism of A_tau to one of A,
* zero divisors from noncyclic automorphism groups, and the resulting
  factorization of cyclotomic polynomials,
* descent of a semiregular group to an automorphism of a subalgebra.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .algebra import (
    AlgElem,
    Algebra,
    AlgebraMap,
    Dichotomy,
    Found,
    InvariantViolation,
    ZeroDivisor,
    component_sizes,
    fixed_subalgebra,
    from_polynomial,
    identity_map,
    ideal_generated,
    idempotent_of,
    restrict_map,
)
from .base import PrimeField, Subspace, factor_int, kernel, rank, solve_columns
from .poly import Poly, berlekamp_deterministic, cyclotomic, euler_phi
from .semireg import (
    enumerate_group,
    galois_subgroup_or_zero_divisor,
    semiregular_or_zero_divisor,
)
from .zerodiv import (
    annihilator_idempotent,
    berlekamp_zero_divisor,
    discrete_log_r_elements,
    r_order_exponent,
    refine_invariant_decomposition,
)

__all__ = [
    "CyclicGroup",
    "CyclicUnitGroup",
    "CharDividesGroup",
    "ResolventExhausted",
    "CyclotomicExtension",
    "KummerExtension",
    "TeichmullerResolvent",
    "adjoin_zeta",
    "omega_exponent",
    "omega_power",
    "teichmuller_test",
    "teich_cyclic_or_zerodiv",
    "zero_divisor_to_base",
    "kummer_root_extension",
    "lagrange_resolvent",
    "teichmuller_resolvent",
    "fixed_algebra",
    "extend_automorphism",
    "noncyclic_zero_divisor",
    "unit_group_is_cyclic",
    "integer_cyclotomic",
    "factor_cyclotomic",
    "cyclotomic_algebra",
    "galois_descend",
]


class CyclicGroup(ValueError):
    """The automorphism group handed in as noncyclic is cyclic."""


class CyclicUnitGroup(ValueError):
    """Z_r^* is cyclic, so the cyclotomic route has nothing to offer."""


class CharDividesGroup(ValueError):
    """The characteristic divides the group order."""


class ResolventExhausted(RuntimeError):
    """No basis vector escapes the fixed algebra of the automorphism."""


def _vr(n: int, r: int) -> int:
    v = 0
    while n % r == 0:
        n //= r
        v += 1
    return v


def _mult_order(a: int, r: int) -> int:
    k, cur = 1, a % r
    while cur != 1:
        cur = cur * a % r
        k += 1
    return k


def _primitive_root(r: int) -> int:
    for g in range(2, r):
        if _mult_order(g, r) == r - 1:
            return g
    return 1


def _inverse_matrix(m: np.ndarray, p: int) -> np.ndarray:
    n = m.shape[0]
    eye = np.zeros((n, n), dtype=m.dtype)
    for i in range(n):
        eye[i, i] = 1
    inv = solve_columns(m, eye, p)
    if inv is None:
        raise ZeroDivisionError("matrix is not invertible")
    return inv


def _vec(x) -> np.ndarray:
    return x.v if isinstance(x, AlgElem) else np.asarray(x)


# ---------------------------------------------------------------------------
# A[zeta_r]
# ---------------------------------------------------------------------------


@dataclass
class CyclotomicExtension:
    """E = A[zeta_r] with Delta_r = {rho_a} and the Sylow exponent t of E*."""

    base: Algebra
    r: int
    algebra: Algebra
    embed: AlgebraMap
    zeta: np.ndarray
    delta: dict
    sizes: tuple
    t: int

    @property
    def p(self) -> int:
        return self.base.p

    def rho(self, a: int) -> AlgebraMap:
        return self.delta[a % self.r]

    def lift_map(self, sigma: AlgebraMap) -> AlgebraMap:
        """sigma tensor id, an automorphism of E fixing zeta."""
        if self.r == 2:
            return AlgebraMap(self.algebra, self.algebra, sigma.matrix, kind=sigma.kind)
        k = self.r - 1
        eye = self.base.field.eye(k)
        return AlgebraMap(self.algebra, self.algebra, np.kron(sigma.matrix, eye) % self.p, kind=sigma.kind)

    def lift_hom(self, f: AlgebraMap, target: "CyclotomicExtension") -> AlgebraMap:
        """f tensor id from this extension into ``target`` (same r)."""
        if self.r == 2:
            return AlgebraMap(self.algebra, target.algebra, f.matrix, kind=f.kind)
        eye = self.base.field.eye(self.r - 1)
        return AlgebraMap(self.algebra, target.algebra, np.kron(f.matrix, eye) % self.p, kind=f.kind)

    def to_base(self, x) -> Optional[np.ndarray]:
        """Coordinates in A of an element of the embedded copy, else None."""
        x = _vec(x) % self.p
        if self.r == 2:
            return x
        k = self.r - 1
        blocks = x.reshape(self.base.dim, k)
        if np.any(blocks[:, 1:]):
            return None
        return blocks[:, 0].copy()

    def omega(self, a: int, T: Optional[int] = None) -> int:
        return omega_exponent(self.r, a, self.t if T is None else T)


def adjoin_zeta(alg: Algebra, r: int) -> CyclotomicExtension:
    """A[zeta_r] with basis a_i tensor X^j at index i*(r-1) + j."""
    p = alg.p
    if r == p:
        raise ValueError("r must differ from the characteristic")
    if factor_int(r) != {r: 1}:
        raise ValueError("r must be prime")
    base_sizes = component_sizes(alg)
    sizes: list[int] = []
    for q in base_sizes:
        o = _mult_order(q, r) if r > 2 else 1
        sizes.extend([q**o] * ((r - 1) // o))
    sizes_t = tuple(sorted(sizes))
    t = sum(_vr(q - 1, r) for q in sizes_t)
    if r == 2:
        one = identity_map(alg)
        zeta = (-alg.one) % p
        return CyclotomicExtension(alg, 2, alg, one, zeta, {1: one}, sizes_t, t)
    field_ = alg.field
    cyc = from_polynomial(cyclotomic(r, field_))
    k = r - 1
    n = alg.dim
    big = np.multiply.outer(alg.table, cyc.table).transpose(0, 3, 1, 4, 2, 5).reshape(n * k, n * k, n * k) % p
    one = np.kron(alg.one, cyc.one) % p
    ext = Algebra(field_, big, one, check=False, name=f"{alg.name}[zeta_{r}]")
    emb_mat = field_.zeros((n * k, n))
    for i in range(n):
        emb_mat[i * k, i] = 1
    embed = AlgebraMap(alg, ext, emb_mat, kind="embedding")
    xvec = cyc.basis_vec(1) if k > 1 else (-cyc.one) % p
    zeta = np.kron(alg.one, xvec) % p
    xpows = [cyc.power(xvec, j) for j in range(r)]
    eye_n = field_.eye(n)
    delta = {}
    for a in range(1, r):
        ra = np.array([xpows[(a * j) % r] for j in range(k)]).T % p
        delta[a] = AlgebraMap(ext, ext, np.kron(eye_n, ra) % p, kind="automorphism", order=_mult_order(a, r))
    return CyclotomicExtension(alg, r, ext, embed, zeta, delta, sizes_t, t)


def omega_exponent(r: int, a: int, T: int) -> int:
    """a^(r^(T-1)) mod r^T, the Teichmuller lift of a at level T."""
    if T <= 0:
        return 1
    mod = r**T
    return pow(a, r ** (T - 1), mod)


def omega_power(ext: CyclotomicExtension, a: int, x, T: Optional[int] = None) -> np.ndarray:
    """x^omega(a) for an r-element x of E."""
    if a % ext.r == 0:
        raise ValueError("a must be coprime to r")
    return ext.algebra.power(_vec(x) % ext.p, ext.omega(a, T))


def _test_residues(r: int) -> list[int]:
    return list(range(1, r)) if r <= 7 else [_primitive_root(r)]


def teichmuller_test(ext: CyclotomicExtension, x, T: Optional[int] = None) -> bool:
    """rho_a(x) == x^omega(a)."""
    xv = _vec(x) % ext.p
    for a in _test_residues(ext.r):
        if np.any(ext.rho(a)(xv) != omega_power(ext, a, xv, T)):
            return False
    return True


def zero_divisor_to_base(ext: CyclotomicExtension, z) -> ZeroDivisor:
    """A zero divisor of A from a zero divisor z of E."""
    e_alg = ext.algebra
    p = ext.p
    e = annihilator_idempotent(e_alg, _vec(z))
    base_e = ext.to_base(e)
    if base_e is None:
        # Not Delta-invariant: fall back to orbit sums of the refined pieces.
        pieces = refine_invariant_decomposition(e_alg, list(ext.delta.values()), [e, (e_alg.one - e) % p])
        idems = [piece.e for piece in pieces]
        orbit = {0}
        frontier = [0]
        while frontier:
            i = frontier.pop()
            for rho in ext.delta.values():
                img = rho(idems[i])
                for j, f in enumerate(idems):
                    if j not in orbit and np.all(f == img):
                        orbit.add(j)
                        frontier.append(j)
        if len(orbit) == len(idems):
            raise InvariantViolation("zero divisor of A[zeta] does not descend to A")
        total = sum((idems[i] for i in sorted(orbit)), e_alg.zeros()) % p
        base_e = ext.to_base(total)
        if base_e is None:
            raise InvariantViolation("orbit idempotent is not in A")
    a = ext.base
    return ZeroDivisor(AlgElem(a, base_e), AlgElem(a, (a.one - base_e) % p))


def teich_cyclic_or_zerodiv(ext: CyclotomicExtension, u, v) -> Dichotomy:
    """Found(j) with v = u^j, or a zero divisor of A when <u, v> is noncyclic."""
    res = discrete_log_r_elements(ext.algebra, _vec(u), _vec(v), ext.r)
    if isinstance(res, Found):
        return res
    return zero_divisor_to_base(ext, res.z.v)


def _order_exponent_or_zd(ext: CyclotomicExtension, x) -> Dichotomy:
    t, diff = r_order_exponent(ext.algebra, _vec(x), ext.r)
    if diff is not None:
        return zero_divisor_to_base(ext, diff)
    return Found(t)


def _cyclic_merge(ext: CyclotomicExtension, gen: np.ndarray, x: np.ndarray) -> Dichotomy:
    """Found(generator of <gen, x>) when that group is cyclic with a listed generator."""
    tg = _order_exponent_or_zd(ext, gen)
    if isinstance(tg, ZeroDivisor):
        return tg
    tx = _order_exponent_or_zd(ext, x)
    if isinstance(tx, ZeroDivisor):
        return tx
    if tg.value >= tx.value:
        res = teich_cyclic_or_zerodiv(ext, gen, x)
        return res if isinstance(res, ZeroDivisor) else Found(gen)
    res = teich_cyclic_or_zerodiv(ext, x, gen)
    return res if isinstance(res, ZeroDivisor) else Found(x)


# ---------------------------------------------------------------------------
# E[Y]/(Y^s - c)
# ---------------------------------------------------------------------------


@dataclass
class KummerExtension:
    """K = E[Y]/(Y^s - c), basis Y^j e_i at index j*dim E + i."""

    base: CyclotomicExtension
    c: np.ndarray
    s: int
    algebra: Algebra
    root: np.ndarray
    embed: AlgebraMap
    lifted_delta: dict
    sigma: Optional[AlgebraMap]


def kummer_root_extension(ext: CyclotomicExtension, c, s: int, *, verify: bool = True) -> KummerExtension:
    """Adjoin an s-th root of the Teichmuller element c."""
    e_alg = ext.algebra
    p, r, n = ext.p, ext.r, e_alg.dim
    c = _vec(c) % p
    if s < 2 or r ** _vr(s, r) != s:
        raise ValueError("s must be a positive power of r")
    if not teichmuller_test(ext, c):
        raise ValueError("c is not a Teichmuller element")
    tab = e_alg.table
    over = np.tensordot(tab, e_alg.rmat(c).T, axes=([2], [0])) % p
    big = e_alg.field.zeros((s * n, s * n, s * n))
    for j in range(s):
        for k in range(s):
            d = (j + k) % s
            big[j * n : (j + 1) * n, k * n : (k + 1) * n, d * n : (d + 1) * n] = tab if j + k < s else over
    one = np.concatenate([e_alg.one] + [e_alg.zeros()] * (s - 1))
    kalg = Algebra(e_alg.field, big, one, check=False, name=f"{e_alg.name}[root]")
    emb_mat = e_alg.field.zeros((s * n, n))
    for i in range(n):
        emb_mat[i, i] = 1
    embed = AlgebraMap(e_alg, kalg, emb_mat, kind="embedding")
    root = np.concatenate([e_alg.zeros(), e_alg.one] + [e_alg.zeros()] * (s - 2)) % p
    T = ext.t + _vr(s, r)
    lifted = {}
    for a, rho in ext.delta.items():
        w = omega_exponent(r, a, T)
        cols = []
        for j in range(s):
            yj = kalg.power(root, j * w)
            ri = embed.matrix @ rho.matrix % p  # columns: images of e_i in K
            cols.append(kalg.products(ri.T, yj[None, :])[:, 0, :])
        mat = np.concatenate(cols).T % p
        lifted[a] = AlgebraMap(kalg, kalg, mat, kind="automorphism")
    sigma = None
    if s == r:
        cols = []
        for j in range(s):
            zj = e_alg.power(ext.zeta, j)
            imgs = e_alg.products(e_alg.field.eye(n), zj[None, :])[:, 0, :]  # rows: e_i zeta^j
            block = np.zeros((n, s * n), dtype=imgs.dtype)
            block[:, j * n : (j + 1) * n] = imgs
            cols.append(block)
        sigma = AlgebraMap(kalg, kalg, np.concatenate(cols).T % p, kind="automorphism", order=r)
    out = KummerExtension(ext, c, s, kalg, root, embed, lifted, sigma)
    if verify:
        if np.any(kalg.power(root, s) != embed(c)):
            raise InvariantViolation("root^s differs from c")
        for rho in lifted.values():
            if not rho.is_homomorphism():
                raise InvariantViolation("lifted rho is not multiplicative")
        if sigma is not None:
            if not sigma.is_homomorphism() or sigma.multiplicative_order(cap=r) != r:
                raise InvariantViolation("root twist is not an automorphism of order r")
            for rho in lifted.values():
                if np.any((sigma.matrix @ rho.matrix - rho.matrix @ sigma.matrix) % p):
                    raise InvariantViolation("root twist does not commute with Delta")
    return out


# ---------------------------------------------------------------------------
# resolvents
# ---------------------------------------------------------------------------


def lagrange_resolvent(alg: Algebra, tau: AlgebraMap, xi, space: Optional[Subspace] = None, order: Optional[int] = None) -> np.ndarray:
    """Nonzero x with tau(x) = xi x, scanning basis vectors of ``space``."""
    p = alg.p
    r = order or tau.order or tau.multiplicative_order()
    if r is None or r < 2:
        raise ValueError("tau must have prime order r >= 2")
    xi = _vec(xi) % p
    basis = space.basis if space is not None else alg.field.eye(alg.dim)
    taus = [alg.field.eye(alg.dim)]
    for _ in range(1, r):
        taus.append((tau.matrix @ taus[-1]) % p)
    xipows = [alg.power(xi, i) for i in range(r)]
    for y in basis:
        if np.all(tau(y) == y):
            continue
        orbit = [(m @ y) % p for m in taus]
        for j in range(1, r):
            res = alg.zeros()
            for i in range(r):
                res = (res + alg.mul(xipows[(i * j) % r], orbit[i])) % p
            if np.any(tau(res) != res):
                # tau(res) = xi^(-j) res, so the k-th power with -jk = 1 works.
                k = pow(-j % r, -1, r)
                x = alg.power(res, k)
                if np.any(tau(x) != alg.mul(xi, x)) or not np.any(x):
                    raise InvariantViolation("resolvent is not an eigenvector")
                return x
    raise ResolventExhausted("every basis vector is fixed by tau")


@dataclass
class TeichmullerResolvent:
    """x in E with tau(x) = zeta x, c = x^r, and the iso K -> E when built."""

    x: np.ndarray
    c: np.ndarray
    ext: CyclotomicExtension
    fixed_alg: Algebra
    fixed_emb: AlgebraMap
    fixed_ext: Optional[CyclotomicExtension] = None
    c_fixed: Optional[np.ndarray] = None
    kummer: Optional[KummerExtension] = None
    phi: Optional[AlgebraMap] = None
    down: Optional[AlgebraMap] = None  # fixed_ext -> ext


def fixed_algebra(alg: Algebra, tau: AlgebraMap) -> tuple[Algebra, AlgebraMap]:
    """A_tau as a standalone algebra with its embedding."""
    return alg.restrict(fixed_subalgebra(alg, [tau]), name=f"{alg.name}_fix")


def teichmuller_resolvent(alg: Algebra, tau: AlgebraMap, ext: Optional[CyclotomicExtension] = None, *, build_iso: bool = True, order: Optional[int] = None) -> TeichmullerResolvent:
    """Teichmuller x with tau(x) = zeta x for a semiregular tau of prime order r."""
    p = alg.p
    r = order or tau.order or tau.multiplicative_order()
    if ext is None:
        ext = adjoin_zeta(alg, r)
    if ext.r != r:
        raise ValueError("extension built for a different prime")
    e_alg = ext.algebra
    tau_e = ext.lift_map(tau)
    # Accumulate eigenvectors on complementary tau-invariant ideals.
    e = e_alg.one.copy()
    y = e_alg.zeros()
    while np.any(e):
        space = Subspace(p, e_alg.dim, e_alg.lmat(e).T.copy())
        xi = e_alg.mul(e, ext.zeta)
        part = lagrange_resolvent(e_alg, tau_e, xi, space, order=r)
        f = idempotent_of(e_alg, Subspace(p, e_alg.dim, e_alg.lmat(part).T.copy()))
        y = (y + part) % p
        e = (e - f) % p
    if not e_alg.is_unit(y):
        raise InvariantViolation("accumulated resolvent is not a unit")
    total = 1
    for q in ext.sizes:
        total *= q - 1
    ell = total // r**ext.t
    m = pow((-ell) % r, -1, r)
    z = e_alg.power(y, ell * m)
    x = e_alg.one.copy()
    for b in range(1, r):
        binv = pow(b, -1, r)
        x = e_alg.mul(x, ext.rho(binv)(omega_power(ext, b, z)))
    if np.any(tau_e(x) != e_alg.mul(ext.zeta, x)):
        raise InvariantViolation("Teichmuller resolvent is not a zeta-eigenvector")
    if not teichmuller_test(ext, x):
        raise InvariantViolation("resolvent is not Teichmuller")
    c = e_alg.power(x, r)
    fixed_alg, fixed_emb = fixed_algebra(alg, tau)
    out = TeichmullerResolvent(x, c, ext, fixed_alg, fixed_emb)
    if not build_iso:
        return out
    fext = adjoin_zeta(fixed_alg, r)
    down = fext.lift_hom(fixed_emb, ext)
    c_fixed = solve_columns(down.matrix, c.reshape(-1, 1), p)
    if c_fixed is None:
        raise InvariantViolation("x^r is not fixed by tau")
    c_fixed = c_fixed[:, 0]
    kum = kummer_root_extension(fext, c_fixed, r)
    cols = []
    for j in range(r):
        xj = e_alg.power(x, j)
        imgs = down.matrix.T  # rows: images of the basis of E'
        cols.append(e_alg.products(imgs, xj[None, :])[:, 0, :])
    phi = AlgebraMap(kum.algebra, e_alg, np.concatenate(cols).T % p, kind="linear")
    if phi.matrix.shape[0] != phi.matrix.shape[1] or rank(phi.matrix, p) != e_alg.dim:
        raise InvariantViolation("Kummer map is not bijective")
    if not phi.is_homomorphism():
        raise InvariantViolation("Kummer map is not multiplicative")
    for a in range(1, r):
        lhs = (phi.matrix @ kum.lifted_delta[a].matrix) % p
        rhs = (ext.rho(a).matrix @ phi.matrix) % p
        if np.any(lhs != rhs):
            raise InvariantViolation("Kummer map does not commute with Delta")
    out.fixed_ext, out.c_fixed, out.kummer, out.phi, out.down = fext, c_fixed, kum, phi, down
    return out


# ---------------------------------------------------------------------------
# extending automorphisms from A_tau to A
# ---------------------------------------------------------------------------


def _map_equal(a: np.ndarray, b: np.ndarray) -> bool:
    return bool(np.all(a == b))


def _extend_prime(big: Algebra, tau: AlgebraMap, r: int, mu: AlgebraMap, small: Algebra, small_emb: AlgebraMap) -> Dichotomy:
    """Extend ``mu`` (on ``small`` = big_tau) to ``big``; tau has prime order r."""
    p = big.p
    res = semiregular_or_zero_divisor(big, [tau])
    if isinstance(res, ZeroDivisor):
        return res
    tr = teichmuller_resolvent(big, tau, order=r)
    ext, fext = tr.ext, tr.fixed_ext
    # Move mu onto the resolvent's copy of A_tau.
    conv = solve_columns(small_emb.matrix, tr.fixed_emb.matrix, p)
    if conv is None:
        raise InvariantViolation("fixed algebras disagree")
    mu_local = (_inverse_matrix(conv, p) @ mu.matrix @ conv) % p
    mu_loc = AlgebraMap(tr.fixed_alg, tr.fixed_alg, mu_local, kind="automorphism")
    mu_e = fext.lift_map(mu_loc)
    cf = tr.c_fixed
    if not np.any((cf - fext.algebra.one) % p):
        res = teich_cyclic_or_zerodiv(ext, ext.zeta, tr.x)
        if isinstance(res, Found):
            raise InvariantViolation("resolvent of order r lies in <zeta>")
        return res
    back = lambda zd: zd.mapped(tr.fixed_emb)  # noqa: E731
    cmu = mu_e(cf)
    res = teich_cyclic_or_zerodiv(fext, cf, cmu)
    if isinstance(res, ZeroDivisor):
        return back(res)
    j = res.value
    res = teich_cyclic_or_zerodiv(fext, cf, fext.zeta)
    if isinstance(res, ZeroDivisor):
        return back(res)
    if (j - 1) % r:
        raise InvariantViolation("mu moves zeta inside <c>")
    e_alg = ext.algebra
    x2 = e_alg.power(tr.x, j)
    phi_inv = _inverse_matrix(tr.phi.matrix, p)
    cols = []
    for k in range(r):
        xk = e_alg.power(x2, k)
        imgs = (tr.down.matrix @ mu_e.matrix).T  # rows: images of mu(e'_i) in E
        cols.append(e_alg.products(imgs % p, xk[None, :])[:, 0, :])
    phi2_mu = np.concatenate(cols).T % p  # phi' o mu'' on K coordinates
    mu_big_e = AlgebraMap(e_alg, e_alg, (phi2_mu @ phi_inv) % p, kind="automorphism")
    try:
        cand = restrict_map(mu_big_e, ext.embed)
    except ValueError as exc:
        raise InvariantViolation("extended map does not preserve A") from exc
    cand = AlgebraMap(big, big, cand.matrix, kind="automorphism")
    if not cand.verify_automorphism():
        raise InvariantViolation("extended map is not an automorphism")
    target_fixed = _lift_fixed(small, small_emb, mu)
    tau_pow = identity_map(big)
    for _ in range(r):
        trial = AlgebraMap(big, big, (cand.matrix @ tau_pow.matrix) % p, kind="automorphism")
        if fixed_subalgebra(big, [trial]) == target_fixed:
            return Found(trial)
        tau_pow = AlgebraMap(big, big, (tau.matrix @ tau_pow.matrix) % p)
    # <tau, mu'> is not cyclic and semiregular.
    res = semiregular_or_zero_divisor(big, [tau, cand])
    if isinstance(res, ZeroDivisor):
        return res
    try:
        return noncyclic_zero_divisor(big, res.value)
    except CyclicGroup as exc:
        raise InvariantViolation("cyclic semiregular group without a matching extension") from exc


def _lift_fixed(small: Algebra, small_emb: AlgebraMap, mu: AlgebraMap) -> Subspace:
    fx = fixed_subalgebra(small, [mu])
    big_dim = small_emb.target.dim
    vecs = (small_emb.matrix @ fx.basis.T).T % small.p if fx.dim else None
    return Subspace(small.p, big_dim, vecs)


def extend_automorphism(alg: Algebra, tau: AlgebraMap, mu: AlgebraMap) -> Dichotomy:
    """Found(mu') on A extending mu with A_mu' = (A_tau)_mu, or a zero divisor.

    ``mu`` acts on the standalone algebra returned by :func:`fixed_algebra`.
    """
    p = alg.p
    order = tau.order or tau.multiplicative_order()
    if order is None:
        raise ValueError("tau has no finite order")
    if order % p == 0:
        raise ValueError("order of tau must be coprime to p")
    primes: list[int] = []
    for q, e in sorted(factor_int(order).items()) if order > 1 else []:
        primes.extend([q] * e)
    fixed0, emb0 = fixed_algebra(alg, tau)
    if mu.source.dim != fixed0.dim or mu.target.dim != fixed0.dim:
        raise ValueError("mu must act on the fixed algebra of tau")
    cur_alg, cur_emb = fixed0, emb0
    cur_mu = AlgebraMap(fixed0, fixed0, mu.matrix, kind="automorphism")
    done = 1
    for r in primes:
        if done * r == order:
            big, big_emb = alg, identity_map(alg)
        else:
            big, big_emb = alg.restrict(fixed_subalgebra(alg, [tau.power(done * r)]))
        step_tau = restrict_map(tau.power(done), big_emb)
        step_tau = AlgebraMap(big, big, step_tau.matrix, kind="automorphism", order=r)
        done *= r
        if step_tau.multiplicative_order(cap=r) != r:
            raise InvariantViolation("restricted tau has the wrong order")
        # cur_alg embeds into big through big_emb.
        small_in_big = solve_columns(big_emb.matrix, cur_emb.matrix, p)
        small_emb = AlgebraMap(cur_alg, big, small_in_big, kind="embedding")
        res = _extend_prime(big, step_tau, r, cur_mu, cur_alg, small_emb)
        if isinstance(res, ZeroDivisor):
            return res.mapped(big_emb) if big is not alg else res
        cur_alg, cur_emb, cur_mu = big, big_emb, res.value
    final = AlgebraMap(alg, alg, cur_mu.matrix, kind="automorphism")
    if not final.verify_automorphism():
        raise InvariantViolation("extension is not an automorphism")
    if not _map_equal((final.matrix @ emb0.matrix) % p, (emb0.matrix @ mu.matrix) % p):
        raise InvariantViolation("extension does not restrict to mu")
    if fixed_subalgebra(alg, [final]) != _lift_fixed(fixed0, emb0, mu):
        raise InvariantViolation("fixed algebra of the extension is wrong")
    return Found(final.as_automorphism())


# ---------------------------------------------------------------------------
# noncyclic groups
# ---------------------------------------------------------------------------


def _is_cyclic(group: Sequence[AlgebraMap]) -> bool:
    n = len(group)
    return any((g.order or g.multiplicative_order(cap=n)) == n for g in group)


def noncyclic_zero_divisor(alg: Algebra, gens: Sequence[AlgebraMap]) -> ZeroDivisor:
    """A zero divisor of A from a noncyclic group of automorphisms."""
    res = semiregular_or_zero_divisor(alg, list(gens))
    if isinstance(res, ZeroDivisor):
        return res
    group = res.value
    n = len(group)
    if _is_cyclic(group):
        raise CyclicGroup(f"group of order {n} is cyclic")
    p = alg.p
    if n % p == 0:
        zd = berlekamp_zero_divisor(alg)
        if zd is None:
            raise InvariantViolation("a field admits no noncyclic semiregular group")
        return zd
    gens_by_prime = {}
    for r in sorted(factor_int(n)):
        ext = adjoin_zeta(alg, r)
        pi_r = [g for g in group if g.order == r]
        gen = None
        for sigma in pi_r:
            x = teichmuller_resolvent(alg, sigma, ext, build_iso=False, order=r).x
            if gen is None:
                gen = x
                continue
            res = _cyclic_merge(ext, gen, x)
            if isinstance(res, ZeroDivisor):
                return res
            gen = res.value
        jays = []
        for sigma in group:
            img = ext.lift_map(sigma)(gen)
            res = teich_cyclic_or_zerodiv(ext, gen, img)
            if isinstance(res, ZeroDivisor):
                return res
            jays.append(res.value)
        gens_by_prime[r] = (ext, gen, jays)
    if 2 not in gens_by_prime:
        raise InvariantViolation("odd-order noncyclic group produced no zero divisor")
    ext, x, jays = gens_by_prime[2]
    tk = _order_exponent_or_zd(ext, x)
    if isinstance(tk, ZeroDivisor):
        return tk
    k = tk.value
    mod = 2**k
    sigma1 = sigma2 = None
    for sigma, j in zip(group, jays):
        if sigma.order != 2:
            continue
        if sigma1 is None and j % mod == (mod - 1) % mod:
            sigma1 = sigma
        if sigma2 is None and k >= 3 and j % mod == (2 ** (k - 1) + 1) % mod:
            sigma2 = sigma
    if sigma1 is None or sigma2 is None:
        raise InvariantViolation("2-Sylow analysis found no sign or twist element")
    a1, emb1 = fixed_algebra(alg, sigma1)
    s2 = AlgebraMap(a1, a1, restrict_map(sigma2, emb1).matrix, kind="automorphism", order=2)
    y1 = teichmuller_resolvent(a1, s2, build_iso=False, order=2).x
    y = emb1(y1)
    res = _cyclic_merge(ext, x, y)
    if isinstance(res, Found):
        raise InvariantViolation("sign and twist elements generate a cyclic group")
    return res


# ---------------------------------------------------------------------------
# cyclotomic polynomials
# ---------------------------------------------------------------------------


def unit_group_is_cyclic(r: int) -> bool:
    """Z_r^* is cyclic iff r is 1, 2, 4, q^k or 2 q^k for an odd prime q."""
    if r in (1, 2, 4):
        return True
    m = r // 2 if r % 2 == 0 else r
    if m % 2 == 0:
        return False
    return len(factor_int(m)) == 1


def integer_cyclotomic(r: int) -> list[int]:
    """Integer coefficients of Phi_r, ascending."""
    num = [-1] + [0] * (r - 1) + [1]
    for d in range(1, r):
        if r % d == 0:
            num = _int_exact_div(num, integer_cyclotomic(d))
    return num


def _int_exact_div(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    dd = len(den) - 1
    out = [0] * (len(num) - dd)
    for k in range(len(num) - 1, dd - 1, -1):
        c = num[k]
        out[k - dd] = c
        for i in range(dd + 1):
            num[k - dd + i] -= c * den[i]
    if any(num[:dd]):
        raise ArithmeticError("inexact integer division")
    return out


def cyclotomic_algebra(r: int, p: int) -> tuple[Algebra, list[AlgebraMap]]:
    """F_p[x]/(Phi_r) and greedy generators rho_i of Z_r^*, i ascending."""
    field_ = PrimeField(p)
    phi = cyclotomic(r, field_)
    alg = from_polynomial(phi)
    x = alg.basis_vec(1) if alg.dim > 1 else (-phi.coeffs[0] * alg.one) % p
    pows = [alg.power(x, k) for k in range(r)]
    units = [i for i in range(1, r) if np.gcd(i, r) == 1]
    gens: list[AlgebraMap] = []
    covered = {1}
    for i in units:
        if i in covered:
            continue
        mat = np.array([pows[(i * j) % r] for j in range(alg.dim)]).T % p
        gens.append(AlgebraMap(alg, alg, mat, kind="automorphism"))
        frontier = list(covered)
        while frontier:
            b = frontier.pop() * i % r
            if b not in covered:
                covered.add(b)
                frontier.extend(c * b % r for c in list(covered))
        covered = _closure(covered, r)
    return alg, gens


def _closure(elems: set, r: int) -> set:
    out = set(elems)
    grown = True
    while grown:
        grown = False
        for a in list(out):
            for b in list(out):
                if a * b % r not in out:
                    out.add(a * b % r)
                    grown = True
    return out


def factor_cyclotomic(r: int, p: int) -> Poly:
    """A nontrivial monic factor of Phi_r mod p."""
    if unit_group_is_cyclic(r):
        raise CyclicUnitGroup(f"Z_{r}^* is cyclic")
    field_ = PrimeField(p)
    deg = euler_phi(r)
    if r % p == 0:
        phi = Poly(field_, integer_cyclotomic(r))
        factors = berlekamp_deterministic(phi)
        g = factors[0]
    else:
        alg, gens = cyclotomic_algebra(r, p)
        zd = noncyclic_zero_divisor(alg, gens)
        phi = cyclotomic(r, field_)
        g = phi.gcd(Poly(field_, [int(c) for c in zd.z.v]))
    g = g.monic()
    if not 0 < g.deg < deg or not (phi % g).is_zero():
        raise InvariantViolation("cyclotomic factor failed verification")
    return g


# ---------------------------------------------------------------------------
# descent to a subalgebra
# ---------------------------------------------------------------------------


def _stabilizer(alg: Algebra, group: list[AlgebraMap], e: np.ndarray) -> list[AlgebraMap]:
    return [g for g in group if np.all(g(e) == e)]


def galois_descend(alg: Algebra, group: Sequence[AlgebraMap], space: Subspace, unit: Optional[np.ndarray] = None) -> Dichotomy:
    """Found(semiregular automorphism of B of order dim B) or a zero divisor of B.

    ``group`` is semiregular on A with A_G = F_p, listed in full.  B is the
    subspace ``space`` with identity ``unit`` (default 1_A); the zero-divisor
    arm and the automorphism both live on ``B`` as returned by
    ``alg.restrict(space, unit)``.
    """
    p = alg.p
    bstd, bemb = alg.restrict(space, unit)
    if bstd.dim == 1:
        return Found(identity_map(bstd).as_automorphism())
    cur = alg
    cur_group = list(group)
    transport = bemb.matrix  # B coords -> cur coords
    while True:
        e_b = (transport @ bstd.one) % p
        ideal_e = None
        if np.any(e_b != cur.one):
            ideal_e = e_b
        elif not _is_cyclic(cur_group):
            zd = noncyclic_zero_divisor(cur, cur_group)
            ideal_e = annihilator_idempotent(cur, zd.z.v)
        else:
            b_space = Subspace(p, cur.dim, transport.T.copy())
            res = galois_subgroup_or_zero_divisor(cur, cur_group, b_space)
            if isinstance(res, ZeroDivisor):
                ideal_e = annihilator_idempotent(cur, res.z.v)
            else:
                n = len(cur_group)
                gen = next(g for g in cur_group if (g.order or g.multiplicative_order(cap=n)) == n)
                img = (gen.matrix @ transport) % p
                mat = solve_columns(transport, img, p)
                if mat is None:
                    raise InvariantViolation("generator does not preserve B")
                beta = AlgebraMap(bstd, bstd, mat, kind="automorphism")
                if not beta.verify_automorphism(claimed_order=bstd.dim):
                    raise InvariantViolation("descended map has the wrong order")
                if fixed_subalgebra(bstd, [beta]).dim != 1:
                    raise InvariantViolation("descended map is not semiregular")
                return Found(beta.as_automorphism())
        pieces = refine_invariant_decomposition(cur, cur_group, [ideal_e, (cur.one - ideal_e) % p])
        chosen = None
        for piece in pieces:
            proj = cur.lmat(piece.e) @ transport % p
            rk = rank(proj, p)
            if rk == 0:
                continue
            if rk == bstd.dim:
                chosen = (piece, proj)
                break
            ker = kernel(proj, p)
            kspace = Subspace(p, bstd.dim, ker)
            kspace = ideal_generated(bstd, [AlgElem(bstd, v) for v in kspace.basis])
            f = idempotent_of(bstd, kspace)
            b = kspace.basis[0]
            return ZeroDivisor(AlgElem(bstd, b), AlgElem(bstd, (bstd.one - f) % p))
        if chosen is None:
            raise InvariantViolation("no projection of B is injective")
        piece, proj = chosen
        j_alg, j_emb = piece.standalone()
        new_group = []
        for g in _stabilizer(cur, cur_group, piece.e):
            new_group.append(AlgebraMap(j_alg, j_alg, restrict_map(g, j_emb).matrix, kind="automorphism"))
        new_group = enumerate_group(j_alg, new_group, len(new_group))
        new_transport = solve_columns(j_emb.matrix, proj, p)
        if new_transport is None:
            raise InvariantViolation("projection leaves the ideal")
        cur, cur_group, transport = j_alg, [g.as_automorphism() for g in new_group], new_transport
