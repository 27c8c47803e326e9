"""Automorphisms of commutative semisimple algebras through tensor powers.

The essential part of A (x)_B ... (x)_B A carries a semiregular action of the
symmetric group.  Bringing the cyclic permutation down to A through Kummer
extensions produces automorphisms of subalgebras, and a recursion on ranks
assembles them into a semiregular automorphism of A over B, or stops at a
zero divisor.  Iterating over ideals gives the full decomposition, and for
f in F_p[X] either a factor or an automorphism of F_p[x]/(f) of order deg f.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
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
    _frobenius_matrix,
    fixed_subalgebra,
    free_structure,
    from_polynomial,
    identity_map,
    idempotent_of,
    restrict_map,
    subalgebra_generated,
    tensor_power_embedding,
)
from .base import Subspace, kernel, rank, solve_columns
from .kummer import (
    CyclicGroup,
    CyclotomicExtension,
    KummerExtension,
    adjoin_zeta,
    extend_automorphism,
    fixed_algebra,
    kummer_root_extension,
    noncyclic_zero_divisor,
    teichmuller_resolvent,
)
from .poly import Poly, squarefree_part_check
from .semireg import semiregular_or_zero_divisor
from .zerodiv import (
    berlekamp_zero_divisor,
    free_basis_or_zero_divisor,
    ideal_idempotent,
    refine_invariant_decomposition,
)

__all__ = [
    "RecursionBudgetExceeded",
    "EssentialTensorPower",
    "SubalgebraAutomorphism",
    "Budget",
    "Component",
    "FactorOutcome",
    "essential_tensor_power",
    "left_right_witness",
    "kummer_embed_or_zerodiv",
    "bring_down_automorphism",
    "construct_subalgebra_automorphism",
    "evdokimov",
    "main_decompose",
    "factor_or_automorphism",
    "DEFAULT_BUDGET",
]

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 8


class RecursionBudgetExceeded(RuntimeError):
    """An intermediate algebra outgrew the configured size cap."""


def _vec(x) -> np.ndarray:
    return x.v if isinstance(x, AlgElem) else np.asarray(x)


def _span(alg: Algebra, vecs) -> Subspace:
    vecs = [np.asarray(v) % alg.p for v in vecs]
    return Subspace(alg.p, alg.dim, np.array(vecs) if vecs else None)


def _image(mat: np.ndarray, p: int) -> Subspace:
    return Subspace(p, mat.shape[0], mat.T.copy())


def _ideal_space(alg: Algebra, e: np.ndarray) -> Subspace:
    return Subspace(alg.p, alg.dim, alg.lmat(e).T.copy())


def _kernel_zero_divisor(src: Algebra, mat: np.ndarray) -> ZeroDivisor:
    """Zero divisor of ``src`` from a ring map with a proper nonzero kernel."""
    p = src.p
    ker = kernel(mat, p)
    space = Subspace(p, src.dim, ker)
    f = idempotent_of(src, space)
    a = space.basis[0]
    return ZeroDivisor(AlgElem(src, a), AlgElem(src, (src.one - f) % p))


def _falling(m: int, r: int) -> int:
    out = 1
    for i in range(r):
        out *= m - i
    return out


# ---------------------------------------------------------------------------
# essential tensor powers
# ---------------------------------------------------------------------------


@dataclass
class EssentialTensorPower:
    """Essential part of the r-th tensor power of A over B.

    ``full`` is the whole tensor power with slot-embeddings ``slots``;
    ``algebra`` is the essential ideal as a standalone algebra, reached
    from ``full`` by multiplying with ``idempotent``; ``embeddings[i]`` is
    slot i composed with that projection.
    """

    base: Algebra
    sub: Subspace
    r: int
    m: int
    full: Algebra
    slots: list
    idempotent: np.ndarray
    algebra: Algebra
    to_full: AlgebraMap
    embeddings: list

    def permutation(self, perm: Sequence[int]) -> AlgebraMap:
        """Slot permutation: slot i of the image holds old slot perm[i]."""
        return restrict_map(self._full_permutation(perm), self.to_full)

    def cycle(self) -> AlgebraMap:
        perm = [(i + 1) % self.r for i in range(self.r)]
        mp = self.permutation(perm)
        return AlgebraMap(self.algebra, self.algebra, mp.matrix, kind="automorphism", order=self.r if self.r > 1 else 1)

    def _full_permutation(self, perm: Sequence[int]) -> AlgebraMap:
        m, r = self.m, self.r
        mm = m**r
        d = self.sub.dim
        n = self.full.dim
        mat = self.full.field.zeros((n, n))
        for s in range(mm):
            digits = []
            rest = s
            for _ in range(r):
                digits.append(rest % m)
                rest //= m
            digits.reverse()
            new = 0
            for i in range(r):
                new = new * m + digits[perm[i]]
            for t in range(d):
                mat[t * mm + new, t * mm + s] = 1
        return AlgebraMap(self.full, self.full, mat, kind="automorphism")


def essential_tensor_power(alg: Algebra, sub: Subspace, free: Sequence, r: int) -> EssentialTensorPower:
    """Essential part of A^{(x)_B r} for a free B-basis ``free`` of A."""
    p = alg.p
    fr = np.array([_vec(u) % p for u in free])
    m = len(fr)
    if not 1 <= r <= m:
        raise ValueError("need 1 <= r <= rank")
    if r == 1:
        ident = identity_map(alg)
        return EssentialTensorPower(alg, sub, 1, m, alg, [ident], alg.one.copy(), alg, ident, [ident])
    fs, _, _ = free_structure(alg, sub, fr)
    power = fs
    for _ in range(r - 1):
        power = power.tensor(fs)
    big = power.to_algebra(name=f"tensor^{r}")
    slots = [tensor_power_embedding(fs, alg, sub, fr, big, r, i) for i in range(r)]
    e = big.one.copy()
    eye = alg.field.eye(alg.dim)
    for i in range(r):
        for j in range(i + 1, r):
            diffs = [(slots[i](u) - slots[j](u)) % p for u in eye]
            stacked = np.concatenate([big.lmat(dv) for dv in diffs])
            ker = kernel(stacked, p)
            delta = Subspace(p, big.dim, ker if len(ker) else None, reduced=True)
            e_ij = idempotent_of(big, delta)
            e = big.mul(e, (big.one - e_ij) % p)
    ess, to_full = big.restrict(_ideal_space(big, e), e, name=f"essential^{r}")
    expected = _falling(m, r) * sub.dim
    if ess.dim != expected:
        raise InvariantViolation(f"essential part has dimension {ess.dim}, expected {expected}")
    embeddings = []
    for sl in slots:
        proj = (big.lmat(e) @ sl.matrix) % p
        coords = solve_columns(to_full.matrix, proj, p)
        if coords is None:
            raise InvariantViolation("projected slot leaves the essential part")
        embeddings.append(AlgebraMap(alg, ess, coords, kind="linear"))
    return EssentialTensorPower(alg, sub, r, m, big, slots, e, ess, to_full, embeddings)


def left_right_witness(etp: EssentialTensorPower, e: np.ndarray) -> Optional[int]:
    """Least basis index i of A with left(b_i) e != right(b_i) e, for an ideal eT."""
    if etp.r != 2:
        raise ValueError("left and right maps exist for tensor squares")
    t = etp.algebra
    left, right = etp.embeddings
    for i, u in enumerate(etp.base.field.eye(etp.base.dim)):
        if np.any(t.mul(left(u), e) != t.mul(right(u), e)):
            return i
    return None


# ---------------------------------------------------------------------------
# Kummer extensions inside D[zeta]
# ---------------------------------------------------------------------------


def kummer_embed_or_zerodiv(
    dalg: Algebra,
    emb: AlgebraMap,
    r: int,
    x,
    ext_d: Optional[CyclotomicExtension] = None,
    ext_a: Optional[CyclotomicExtension] = None,
) -> Dichotomy:
    """Found((K, phi)) with phi: A[zeta][root c] -> D[zeta] injective, or a zero divisor of D.

    ``emb`` embeds A into D; x is Teichmuller in D[zeta], outside A[zeta],
    with c = x^r inside A[zeta].
    """
    p = dalg.p
    a = emb.source
    ext_d = ext_d or adjoin_zeta(dalg, r)
    ext_a = ext_a or adjoin_zeta(a, r)
    e_alg = ext_d.algebra
    x = _vec(x) % p
    down = ext_a.lift_hom(emb, ext_d)
    c = e_alg.power(x, r)
    c_a = solve_columns(down.matrix, c.reshape(-1, 1), p)
    if c_a is None:
        raise ValueError("x^r is not in A[zeta]")
    if solve_columns(down.matrix, x.reshape(-1, 1), p) is not None:
        raise ValueError("x already lies in A[zeta]")
    kum = kummer_root_extension(ext_a, c_a[:, 0], r)
    cols = []
    for j in range(r):
        xj = e_alg.power(x, j)
        cols.append(e_alg.products(down.matrix.T % p, xj[None, :])[:, 0, :])
    phi = AlgebraMap(kum.algebra, e_alg, np.concatenate(cols).T % p, kind="linear")
    if not phi.is_homomorphism():
        raise InvariantViolation("Kummer substitution is not multiplicative")
    for k, rho in kum.lifted_delta.items():
        if np.any((phi.matrix @ rho.matrix - ext_d.rho(k).matrix @ phi.matrix) % p):
            raise InvariantViolation("Kummer substitution does not commute with Delta")
    if rank(phi.matrix, p) == kum.algebra.dim:
        return Found((kum, phi))
    return _kummer_kernel_zero_divisor(dalg, ext_d, kum, phi)


def _kummer_kernel_zero_divisor(dalg: Algebra, ext_d: CyclotomicExtension, kum: KummerExtension, phi: AlgebraMap) -> ZeroDivisor:
    p = dalg.p
    k = kum.algebra
    c_space = fixed_subalgebra(k, list(kum.lifted_delta.values()))
    c_alg, c_emb = k.restrict(c_space)
    phi_c = (phi.matrix @ c_emb.matrix) % p
    ker = kernel(phi_c, p)
    if len(ker) == 0:
        raise InvariantViolation("kernel vanishes on the Delta-fixed part")
    i_space = Subspace(p, c_alg.dim, ker)
    e_i = idempotent_of(c_alg, i_space)
    e_j = (c_alg.one - e_i) % p
    sigma = restrict_map(kum.sigma, c_emb)
    cur = e_j
    for _ in range(1, kum.base.r):
        cur = sigma(cur)
        g = c_alg.mul(e_j, cur)
        if np.any(g) and np.any(g != e_j):
            z = ext_d.to_base((phi.matrix @ c_emb(g)) % p)
            w = ext_d.to_base((phi.matrix @ c_emb((e_j - g) % p)) % p)
            if z is None or w is None:
                raise InvariantViolation("Delta-fixed image left D")
            return ZeroDivisor(AlgElem(dalg, z), AlgElem(dalg, w))
    raise InvariantViolation("no twisted copy of the complement ideal meets it properly")


# ---------------------------------------------------------------------------
# bringing an automorphism down
# ---------------------------------------------------------------------------


@dataclass
class SubalgebraAutomorphism:
    """A subalgebra C of A (``space``, standalone ``algebra`` with ``embedding``) and tau on C."""

    space: Subspace
    algebra: Algebra
    embedding: AlgebraMap
    tau: AlgebraMap


def _subalgebra_auto(a: Algebra, c_space: Subspace, d_tau: AlgebraMap, emb: np.ndarray, r: int) -> Dichotomy:
    p = a.p
    c_alg, c_emb = a.restrict(c_space, name="C")
    into_d = (emb @ c_emb.matrix) % p
    img = (d_tau.matrix @ into_d) % p
    mat = solve_columns(into_d, img, p)
    if mat is None:
        raise InvariantViolation("tau does not preserve C")
    tau_c = AlgebraMap(c_alg, c_alg, mat, kind="automorphism")
    if not tau_c.verify_automorphism(claimed_order=r):
        raise InvariantViolation("restricted tau is not an automorphism of order r")
    res = semiregular_or_zero_divisor(c_alg, [tau_c])
    if isinstance(res, ZeroDivisor):
        return res.mapped(c_emb)
    tau_c = AlgebraMap(c_alg, c_alg, mat, kind="automorphism", order=r)
    return Found(SubalgebraAutomorphism(c_space, c_alg, c_emb, tau_c))


def _projection_zero_divisor(a: Algebra, proj: np.ndarray) -> Optional[ZeroDivisor]:
    """Zero divisor of A when the ring map ``proj`` is not injective."""
    if rank(proj, a.p) == a.dim:
        return None
    return _kernel_zero_divisor(a, proj)


def _piece(dalg: Algebra, e: np.ndarray, emb: np.ndarray) -> tuple[Algebra, AlgebraMap, np.ndarray]:
    """e D standalone, its embedding, and emb projected into its coordinates."""
    p = dalg.p
    sub, sub_emb = dalg.restrict(_ideal_space(dalg, e), e, name="ideal")
    proj = (dalg.lmat(e) @ emb) % p
    coords = solve_columns(sub_emb.matrix, proj, p)
    if coords is None:
        raise InvariantViolation("projection leaves the ideal")
    return sub, sub_emb, coords


def bring_down_automorphism(dalg: Algebra, tau: AlgebraMap, emb: AlgebraMap, order: Optional[int] = None) -> Dichotomy:
    """Found(SubalgebraAutomorphism with C_tau' >= A cap D_tau) or a zero divisor of A.

    ``emb`` embeds A into D; tau is semiregular on D of prime order r and
    r does not divide dim D / dim A.
    """
    a = emb.source
    p = a.p
    r = order or tau.order or tau.multiplicative_order()
    if r == p:
        raise ValueError("r must differ from the characteristic")
    zd = _projection_zero_divisor(a, emb.matrix)
    if zd is not None:
        return zd
    cur_d = dalg
    cur_tau = AlgebraMap(dalg, dalg, tau.matrix, kind="automorphism", order=r)
    cur_emb = emb.matrix % p
    ext_a = adjoin_zeta(a, r)
    while True:
        if cur_d.dim % a.dim == 0 and (cur_d.dim // a.dim) % r == 0:
            raise ValueError("r divides the rank of D over A")
        z = _bring_down_step(a, cur_d, cur_tau, cur_emb, r, ext_a)
        if isinstance(z, Found):
            return z.value
        # z: a zero divisor of the current D; split along tau-orbits.
        e = ideal_idempotent(cur_d, z.z.v)
        pieces = refine_invariant_decomposition(cur_d, [cur_tau], [e, (cur_d.one - e) % p])
        chosen = None
        for piece in pieces:
            proj = (cur_d.lmat(piece.e) @ cur_emb) % p
            zd = _projection_zero_divisor(a, proj)
            if zd is not None:
                return zd
            if chosen is None and np.all(cur_tau(piece.e) == piece.e):
                ratio_ok = piece.dim % a.dim != 0 or (piece.dim // a.dim) % r != 0
                if ratio_ok:
                    chosen = piece
        if chosen is None:
            raise InvariantViolation("no tau-invariant ideal with rank prime to r")
        sub, sub_emb, coords = _piece(cur_d, chosen.e, cur_emb)
        if sub.dim % a.dim != 0:
            res = free_basis_or_zero_divisor(sub, _image(coords, p))
            if isinstance(res, Found):
                raise InvariantViolation("ideal is free over A of non-integral rank")
            back = solve_columns(coords, np.stack([res.z.v, res.w.v], axis=1), p)
            if back is None:
                raise InvariantViolation("non-freeness witness left the image of A")
            return ZeroDivisor(AlgElem(a, back[:, 0]), AlgElem(a, back[:, 1]))
        new_tau = restrict_map(cur_tau, sub_emb)
        cur_d = sub
        cur_tau = AlgebraMap(sub, sub, new_tau.matrix, kind="automorphism", order=r)
        cur_emb = coords


def _bring_down_step(a: Algebra, dalg: Algebra, tau: AlgebraMap, emb: np.ndarray, r: int, ext_a: CyclotomicExtension):
    """Found(Dichotomy for A) when finished, else a zero divisor of D to split on."""
    p = a.p
    res = semiregular_or_zero_divisor(dalg, [tau])
    if isinstance(res, ZeroDivisor):
        return res
    tr = teichmuller_resolvent(dalg, tau, build_iso=False, order=r)
    ext_d = tr.ext
    e_alg = ext_d.algebra
    emb_map = AlgebraMap(a, dalg, emb, kind="linear")
    down = ext_a.lift_hom(emb_map, ext_d).matrix
    x = tr.x
    if solve_columns(down, x.reshape(-1, 1), p) is not None:
        # C = A_tau[zeta][x] fixed by Delta, pulled back to A.
        fix_a = kernel(((tau.matrix - dalg.field.eye(dalg.dim)) @ emb) % p, p)
        a_tau = Subspace(p, a.dim, fix_a if len(fix_a) else None)
        into_e = (ext_d.embed.matrix @ emb) % p
        gens = [(into_e @ v) % p for v in a_tau.basis] + [ext_d.zeta, x]
        gen = subalgebra_generated(e_alg, gens)
        fixed = gen.intersect(_image(into_e, p))
        if fixed.dim == 0:
            raise InvariantViolation("Delta-fixed part of the generated algebra is zero")
        coords = solve_columns(into_e, fixed.basis.T, p)
        if coords is None:
            raise InvariantViolation("Delta-fixed part leaves A")
        c_space = Subspace(p, a.dim, coords.T)
        out = _subalgebra_auto(a, c_space, tau, emb, r)
        if isinstance(out, Found):
            sa = out.value
            got = _lift(sa.embedding, fixed_subalgebra(sa.algebra, [sa.tau]))
            if not got.contains_space(a_tau):
                raise InvariantViolation("fixed algebra of tau' misses A_tau")
        return Found(out)
    # Climb to y with y not in A[zeta] and y^r in A[zeta].
    y = x
    while True:
        nxt = e_alg.power(y, r)
        if solve_columns(down, nxt.reshape(-1, 1), p) is not None:
            break
        y = nxt
    res = kummer_embed_or_zerodiv(dalg, emb_map, r, y, ext_d, ext_a)
    if isinstance(res, ZeroDivisor):
        return res
    kum, phi = res.value
    c_space = fixed_subalgebra(kum.algebra, list(kum.lifted_delta.values()))
    imgs = (phi.matrix @ c_space.basis.T) % p
    d0 = []
    for col in imgs.T:
        v = ext_d.to_base(col)
        if v is None:
            raise InvariantViolation("Delta-fixed image left D")
        d0.append(v)
    d0_space = _span(dalg, d0)
    res = free_basis_or_zero_divisor(dalg, d0_space)
    if isinstance(res, Found):
        raise InvariantViolation("D is free over the Kummer subalgebra despite the rank")
    return res


def _lift(emb: AlgebraMap, space: Subspace) -> Subspace:
    if space.dim == 0:
        return Subspace(emb.p, emb.target.dim)
    return _image((emb.matrix @ space.basis.T) % emb.p, emb.p)


def construct_subalgebra_automorphism(alg: Algebra, sub: Subspace, r: int, budget: Optional["Budget"] = None) -> Dichotomy:
    """Found(SubalgebraAutomorphism of order r with C_tau >= B) or a zero divisor of A."""
    p = alg.p
    if r == p:
        raise ValueError("r must differ from the characteristic")
    res = free_basis_or_zero_divisor(alg, sub)
    if isinstance(res, ZeroDivisor):
        return res
    free = res.value
    m = len(free)
    if m % r:
        raise ValueError("r must divide the rank of A over B")
    if budget is not None:
        budget.charge(m**r * sub.dim)
    etp = essential_tensor_power(alg, sub, free, r)
    tau = etp.cycle()
    out = bring_down_automorphism(etp.algebra, tau, etp.embeddings[0], order=r)
    if isinstance(out, Found):
        sa = out.value
        if not _lift(sa.embedding, fixed_subalgebra(sa.algebra, [sa.tau])).contains_space(sub):
            raise InvariantViolation("fixed algebra of the constructed automorphism misses B")
    return out


# ---------------------------------------------------------------------------
# the recursion
# ---------------------------------------------------------------------------


@dataclass
class Budget:
    """Cap on the dimension of any tensor power built during one run."""

    limit: int
    peak: int = 0
    calls: int = 0
    trace: list = field(default_factory=list)

    @classmethod
    def for_instance(cls, m: int, base_dim: int, multiplier: int = DEFAULT_BUDGET) -> "Budget":
        exp = max(1, math.ceil(math.log2(m))) if m > 1 else 1
        return cls(limit=multiplier * max(m, 2) ** exp * base_dim)

    def charge(self, dim: int) -> None:
        self.peak = max(self.peak, dim)
        if dim > self.limit:
            raise RecursionBudgetExceeded(f"tensor power of dimension {dim} exceeds the cap {self.limit}")


def _verify_sigma(alg: Algebra, sub: Subspace, sigma: AlgebraMap, m: int) -> Dichotomy:
    sigma = AlgebraMap(alg, alg, sigma.matrix, kind="automorphism")
    if not sigma.verify_automorphism(claimed_order=m):
        res = semiregular_or_zero_divisor(alg, [sigma])
        if isinstance(res, ZeroDivisor):
            return res
        raise InvariantViolation("automorphism has the wrong order")
    if fixed_subalgebra(alg, [sigma]) != sub:
        raise InvariantViolation("automorphism fixes the wrong subalgebra")
    return Found(AlgebraMap(alg, alg, sigma.matrix, kind="automorphism", order=m))


def _sub_in(emb: AlgebraMap, space: Subspace) -> Subspace:
    """Preimage coordinates of ``space`` (inside the image of emb)."""
    if space.dim == 0:
        return Subspace(emb.p, emb.source.dim)
    coords = solve_columns(emb.matrix, space.basis.T, emb.p)
    if coords is None:
        raise InvariantViolation("subspace is not inside the embedded algebra")
    return Subspace(emb.p, emb.source.dim, coords.T)


def evdokimov(alg: Algebra, sub: Optional[Subspace] = None, budget: Optional[Budget] = None) -> Dichotomy:
    """Found(semiregular sigma of order m with A_sigma = B) or a zero divisor of A."""
    if sub is None:
        sub = alg.scalars()
    if budget is None:
        m0 = alg.dim // max(sub.dim, 1)
        budget = Budget.for_instance(m0, sub.dim)
    budget.calls += 1
    res = free_basis_or_zero_divisor(alg, sub)
    if isinstance(res, ZeroDivisor):
        return res
    m = len(res.value)
    budget.trace.append((alg.dim, sub.dim))
    log.debug("evdokimov: dim %d over dim %d, rank %d", alg.dim, sub.dim, m)
    if m == 1:
        return Found(identity_map(alg).as_automorphism())
    p = alg.p
    if p <= m * m:
        return _small_field(alg, sub, m)
    if m % 2 == 0:
        return _even_case(alg, sub, m, budget)
    return _odd_case(alg, sub, m, budget)


def _small_field(alg: Algebra, sub: Subspace, m: int) -> Dichotomy:
    zd = berlekamp_zero_divisor(alg)
    if zd is not None:
        return zd
    # A is a field; B is its subfield of size p^dim B.
    frob = AlgebraMap(alg, alg, _frobenius_matrix(alg), kind="automorphism")
    return _verify_sigma(alg, sub, frob.power(sub.dim), m)


def _even_case(alg: Algebra, sub: Subspace, m: int, budget: Budget) -> Dichotomy:
    res = construct_subalgebra_automorphism(alg, sub, 2, budget)
    if isinstance(res, ZeroDivisor):
        return res
    sa = res.value
    c_space = sa.space
    rec1 = evdokimov(alg, c_space, budget)
    if isinstance(rec1, ZeroDivisor):
        return rec1
    sigma1 = rec1.value
    c_fix, c_fix_emb = fixed_algebra(sa.algebra, sa.tau)
    into_a = AlgebraMap(c_fix, alg, (sa.embedding.matrix @ c_fix_emb.matrix) % alg.p, kind="embedding")
    rec2 = evdokimov(c_fix, _sub_in(into_a, sub), budget)
    if isinstance(rec2, ZeroDivisor):
        return rec2.mapped(into_a)
    mu = extend_automorphism(sa.algebra, sa.tau, rec2.value)
    if isinstance(mu, ZeroDivisor):
        return mu.mapped(sa.embedding)
    return _glue(alg, sub, m, sigma1, sa.algebra, sa.embedding, mu.value)


def _glue(alg: Algebra, sub: Subspace, m: int, sigma1: AlgebraMap, c_alg: Algebra, c_emb: AlgebraMap, mu: AlgebraMap) -> Dichotomy:
    """Extend mu (on C = A_sigma1) to A through sigma1."""
    p = alg.p
    fix, fix_emb = fixed_algebra(alg, sigma1)
    conv = solve_columns(c_emb.matrix, fix_emb.matrix, p)  # fix coords -> C coords
    if conv is None:
        raise InvariantViolation("fixed algebra of sigma1 differs from C")
    back = solve_columns(conv, c_alg.field.eye(c_alg.dim), p)
    mu_fix = AlgebraMap(fix, fix, (back @ mu.matrix @ conv) % p, kind="automorphism")
    ext = extend_automorphism(alg, sigma1, mu_fix)
    if isinstance(ext, ZeroDivisor):
        return ext
    return _verify_sigma(alg, sub, ext.value, m)


def _finish_with_mu(alg: Algebra, sub: Subspace, m: int, mu: AlgebraMap, budget: Budget) -> Dichotomy:
    """A nontrivial B-automorphism mu: recurse on (A_mu, B) and extend."""
    res = semiregular_or_zero_divisor(alg, [mu])
    if isinstance(res, ZeroDivisor):
        return res
    order = len(res.value)
    mu = AlgebraMap(alg, alg, mu.matrix, kind="automorphism", order=order)
    fix, fix_emb = fixed_algebra(alg, mu)
    rec = evdokimov(fix, _sub_in(fix_emb, sub), budget)
    if isinstance(rec, ZeroDivisor):
        return rec.mapped(fix_emb)
    ext = extend_automorphism(alg, mu, rec.value)
    if isinstance(ext, ZeroDivisor):
        return ext
    return _verify_sigma(alg, sub, ext.value, m)


@dataclass
class _Ideal:
    """An ideal I of the essential square with left and right maps A -> I."""

    algebra: Algebra
    left: np.ndarray
    right: np.ndarray


def _shrink(state: _Ideal, z: np.ndarray, a: Algebra) -> Dichotomy:
    """Replace I by the smaller of zI and its complement; zero divisor of A if left is not injective."""
    i_alg = state.algebra
    p = i_alg.p
    e = ideal_idempotent(i_alg, z)
    halves = [e, (i_alg.one - e) % p]
    dims = [rank(i_alg.lmat(h), p) for h in halves]
    order = sorted(range(2), key=lambda k: (dims[k], tuple(int(c) for c in _ideal_space(i_alg, halves[k]).basis.flat)))
    h = halves[order[0]]
    sub, sub_emb, left = _piece(i_alg, h, state.left)
    zd = _projection_zero_divisor(a, left)
    if zd is not None:
        return zd
    right = solve_columns(sub_emb.matrix, (i_alg.lmat(h) @ state.right) % p, p)
    return Found(_Ideal(sub, left, right))


def _odd_case(alg: Algebra, sub: Subspace, m: int, budget: Budget) -> Dichotomy:
    p = alg.p
    free = free_basis_or_zero_divisor(alg, sub).value
    budget.charge(m * m * sub.dim)
    etp = essential_tensor_power(alg, sub, free, 2)
    left, right = etp.embeddings
    zd = _projection_zero_divisor(alg, left.matrix)
    if zd is not None:
        return zd
    state = _Ideal(etp.algebra, left.matrix % p, right.matrix % p)
    while True:
        i_alg = state.algebra
        b1 = _image(state.left, p)
        res = evdokimov(i_alg, b1, budget)
        if isinstance(res, ZeroDivisor):
            nxt = _shrink(state, res.z.v, alg)
            if isinstance(nxt, ZeroDivisor):
                return nxt
            state = nxt.value
            continue
        sigma = res.value
        zd = _projection_zero_divisor(alg, state.right)
        if zd is not None:
            return zd
        tau1 = AlgebraMap(alg, i_alg, state.left)
        tau2 = AlgebraMap(alg, i_alg, state.right)
        if i_alg.dim == alg.dim:
            mu_mat = solve_columns(state.right, state.left, p)
            if mu_mat is None:
                raise InvariantViolation("left and right images differ in a rank-one ideal")
            mu = AlgebraMap(alg, alg, mu_mat, kind="automorphism")
            if mu.is_identity():
                raise InvariantViolation("left and right maps agree on a nonzero ideal")
            return _finish_with_mu(alg, sub, m, mu, budget)
        b2 = _image(state.right, p)
        res2 = evdokimov(i_alg, b2, budget)
        if isinstance(res2, ZeroDivisor):
            nxt = _shrink(state, res2.z.v, alg)
            if isinstance(nxt, ZeroDivisor):
                return nxt
            state = nxt.value
            continue
        sigma2 = res2.value
        if np.any((sigma.matrix @ sigma2.matrix - sigma2.matrix @ sigma.matrix) % p):
            try:
                zd = noncyclic_zero_divisor(i_alg, [sigma, sigma2])
            except CyclicGroup as exc:
                raise InvariantViolation("noncommuting automorphisms generate a cyclic group") from exc
            nxt = _shrink(state, zd.z.v, alg)
            if isinstance(nxt, ZeroDivisor):
                return nxt
            state = nxt.value
            continue
        for s, t in ((sigma, tau2), (sigma2, tau1)):
            mu_mat = solve_columns(t.matrix, (s.matrix @ t.matrix) % p, p)
            if mu_mat is None:
                raise InvariantViolation("commuting automorphism does not preserve the image")
            mu = AlgebraMap(alg, alg, mu_mat, kind="automorphism")
            if not mu.is_identity():
                return _finish_with_mu(alg, sub, m, mu, budget)
        raise InvariantViolation("left and right images coincide in a large ideal")


# ---------------------------------------------------------------------------
# decomposition and the polynomial wrapper
# ---------------------------------------------------------------------------


@dataclass
class Component:
    """An ideal e A with its standalone algebra and an automorphism of order dim."""

    idempotent: np.ndarray
    algebra: Algebra
    embedding: AlgebraMap
    sigma: AlgebraMap


def main_decompose(alg: Algebra, budget_multiplier: int = DEFAULT_BUDGET) -> list[Component]:
    """A = sum of ideals A_i, each with a semiregular automorphism of order dim A_i."""
    p = alg.p
    work = [alg.one.copy()]
    done: list[Component] = []
    while work:
        e = work.pop(0)
        if np.all(e == alg.one):
            piece, emb = alg, identity_map(alg)
        else:
            piece, emb = alg.restrict(_ideal_space(alg, e), e, name="component")
        budget = Budget.for_instance(piece.dim, 1, budget_multiplier)
        res = evdokimov(piece, piece.scalars(), budget)
        if isinstance(res, ZeroDivisor):
            f = ideal_idempotent(piece, res.z.v)
            f_amb = emb(f)
            work[:0] = [f_amb, (e - f_amb) % p]
            continue
        sigma = res.value
        if fixed_subalgebra(piece, [sigma]).dim != 1:
            raise InvariantViolation("component automorphism is not semiregular")
        done.append(Component(e, piece, emb, sigma))
    total = sum((c.idempotent for c in done), alg.zeros()) % p
    if np.any(total != alg.one):
        raise InvariantViolation("component idempotents do not sum to one")
    return done


@dataclass
class FactorOutcome:
    """Either ``factor`` (a proper monic divisor) or ``automorphism`` is set."""

    factor: Optional[Poly] = None
    automorphism: Optional[AlgebraMap] = None
    components: list = field(default_factory=list)

    @property
    def kind(self) -> str:
        return "factor" if self.factor is not None else "automorphism"


def factor_or_automorphism(f: Poly, budget_multiplier: int = DEFAULT_BUDGET) -> FactorOutcome:
    """A nontrivial factor of f, or an automorphism of F_p[x]/(f) of order deg f."""
    if f.deg < 1:
        raise ValueError("need a polynomial of positive degree")
    f = f.monic()
    squarefree_part_check(f)
    alg = from_polynomial(f)
    comps = main_decompose(alg, budget_multiplier)
    if len(comps) == 1:
        sigma = comps[0].sigma
        if not sigma.verify_automorphism(claimed_order=f.deg):
            raise InvariantViolation("automorphism failed verification")
        return FactorOutcome(automorphism=sigma, components=comps)
    e = comps[0].idempotent
    g = f.gcd(Poly(f.field, [int(c) for c in (alg.one - e) % alg.p]))
    g = g.monic()
    if not 0 < g.deg < f.deg or not (f % g).is_zero():
        raise InvariantViolation("factor failed verification")
    return FactorOutcome(factor=g, components=comps)

