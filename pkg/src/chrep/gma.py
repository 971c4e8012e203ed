"""Type-(1,1) generalized matrix algebras over a local scalar ring.

A GMA is a triple (B, C, m): two finite A-modules and a bilinear pairing
m : B x C -> A subject to the two associativity squares; the algebra is
E = (A B; C A) with 2x2 multiplication and the canonical Cayley-Hamilton
law D(a,b,c,d) = ad - m(b⊗c), Tr = a + d.

Provides: algebra construction (with full Cayley-Hamilton validation),
adapted representations into M_2(A'), the reducibility ideal B·C and the
reducible quotient, extraction of a GMA from a 2-dimensional matrix
representation with residually-distinct diagonal, condition-constrained
quotients (pushing the idempotents through E^C), and reducible splitting
in the presence of a condition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from . import zmod
from .algebras import (
    FiniteAlgebra,
    matrix_algebra,
    validate_algebra,
    vec_from_matrix,
)
from .chalg import (
    ChAlgebra,
    CompatibleRep,
    ConditionedQuotient,
    e_with_condition,
    validate_ch_algebra,
)
from .conditions import Condition, has_c_artinian
from .errors import (
    AssoComViolation,
    NotReducible,
    OrderMismatch,
    PeirceMismatch,
    ResidualMismatch,
    SizeLimitExceeded,
    TheoremViolation,
)
from .groups import FiniteGroup, cyclic
from .modules import (
    Character,
    GModule,
    character,
    hom_space_basis,
    module_from_character,
    validate_module,
)
from .pseudorep import (
    DetBackend,
    GmaFormulaBackend,
    TraceDet,
    char_poly,
    find_all_reducible_splits,
    psi_eval,
    trace_det,
)
from .rings import (
    FiniteRing,
    Ideal,
    RingHom,
    basis_vec,
    check_order_guard,
    ideal,
    quotient_ring,
)
from .zmod import Mat, Subgroup, Vec, ZGroup

_TRIVIAL_GROUP = cyclic(1)


def a_module(ring: FiniteRing, orders: Sequence[int], action: Sequence[Mat]) -> GModule:
    """A finite A-module presented like a GModule over the trivial group."""
    return validate_module(ring, _TRIVIAL_GROUP, orders, action, ())


def free_a_module(ring: FiniteRing, rank: int) -> GModule:
    k = ring.rank
    orders = tuple(ring.orders[i] for _ in range(rank) for i in range(k))

    def idx(r, i):
        return r * k + i

    ra = []
    for i in range(k):
        m = [[0] * (rank * k) for _ in range(rank * k)]
        for r in range(rank):
            for j in range(k):
                prod = ring.mul(basis_vec(k, i), basis_vec(k, j))
                for kk, x in enumerate(prod):
                    m[idx(r, kk)][idx(r, j)] = x
        ra.append(tuple(tuple(row) for row in m))
    return a_module(ring, orders, tuple(ra))


def zero_a_module(ring: FiniteRing) -> GModule:
    return a_module(ring, (), tuple(() for _ in range(ring.rank)))


@dataclass(frozen=True)
class GmaData:
    ring: FiniteRing
    b: GModule
    c: GModule
    m: tuple[tuple[Vec, ...], ...]  # m[i][j] = m(b_i ⊗ c_j) in A

    @property
    def rank_b(self) -> int:
        return self.b.rank

    @property
    def rank_c(self) -> int:
        return self.c.rank

    def algebra_rank(self) -> int:
        return 2 * self.ring.rank + self.rank_b + self.rank_c

    def split(self, v: Sequence[int]):
        k = self.ring.rank
        return (
            tuple(v[:k]),
            tuple(v[k : k + self.rank_b]),
            tuple(v[k + self.rank_b : k + self.rank_b + self.rank_c]),
            tuple(v[k + self.rank_b + self.rank_c :]),
        )

    def join(self, a: Vec, b: Vec, c: Vec, d: Vec) -> Vec:
        return tuple(a) + tuple(b) + tuple(c) + tuple(d)

    def backend(self) -> GmaFormulaBackend:
        return GmaFormulaBackend(self.ring, self.rank_b, self.rank_c, self.m)

    def e1(self) -> Vec:
        return self.join(self.ring.one, (0,) * self.rank_b, (0,) * self.rank_c, self.ring.zero())

    def e2(self) -> Vec:
        return self.join(self.ring.zero(), (0,) * self.rank_b, (0,) * self.rank_c, self.ring.one)


def validate_gma(
    ring: FiniteRing, b: GModule, c: GModule, m: Sequence[Sequence[Sequence[int]]]
) -> GmaData:
    """Order respect of the pairing plus the two (ASSO) squares; the C⊗B
    pairing is always derived from m, so (COM) holds by construction."""
    if b.ring != ring or c.ring != ring:
        raise OrderMismatch("B and C must be modules over the scalar ring")
    mm = tuple(
        tuple(ring.group.reduce(m[i][j]) for j in range(c.rank)) for i in range(b.rank)
    )
    for i in range(b.rank):
        for j in range(c.rank):
            ann = min(b.orders[i], c.orders[j])
            for kk, x in enumerate(mm[i][j]):
                if (x * ann) % ring.orders[kk]:
                    raise OrderMismatch(
                        "pairing value order exceeds its arguments", witness=(i, j)
                    )
    g = GmaData(ring, b, c, mm)
    # (ASSO): m(b_i ⊗ c_j)·b_i' == m(b_i' ⊗ c_j)·b_i in B
    for i in range(b.rank):
        for i2 in range(b.rank):
            for j in range(c.rank):
                lhs = b.act_ring(mm[i][j], basis_vec(b.rank, i2))
                rhs = b.act_ring(mm[i2][j], basis_vec(b.rank, i))
                if lhs != rhs:
                    raise AssoComViolation(
                        "B-side associativity square fails", witness=(i, i2, j)
                    )
    # (ASSO): m(b_i ⊗ c_j)·c_j' == m(b_i ⊗ c_j')·c_j in C
    for i in range(b.rank):
        for j in range(c.rank):
            for j2 in range(c.rank):
                lhs = c.act_ring(mm[i][j], basis_vec(c.rank, j2))
                rhs = c.act_ring(mm[i][j2], basis_vec(c.rank, j))
                if lhs != rhs:
                    raise AssoComViolation(
                        "C-side associativity square fails", witness=(i, j, j2)
                    )
    return g


def gma_finite_algebra(g: GmaData, max_order: int | None = None) -> FiniteAlgebra:
    """E = A ⊕ B ⊕ C ⊕ A with the 2x2 multiplication."""
    ring = g.ring
    k = ring.rank
    nb, nc = g.rank_b, g.rank_c
    rank = 2 * k + nb + nc
    orders = ring.orders + g.b.orders + g.c.orders + ring.orders
    zero = (0,) * rank

    def a_slot(v: Vec) -> Vec:
        return tuple(v) + (0,) * (nb + nc) + (0,) * k

    def b_slot(v: Vec) -> Vec:
        return (0,) * k + tuple(v) + (0,) * nc + (0,) * k

    def c_slot(v: Vec) -> Vec:
        return (0,) * k + (0,) * nb + tuple(v) + (0,) * k

    def d_slot(v: Vec) -> Vec:
        return (0,) * (k + nb + nc) + tuple(v)

    table = [[zero] * rank for _ in range(rank)]
    A_ = range(k)
    B_ = range(k, k + nb)
    C_ = range(k + nb, k + nb + nc)
    D_ = range(k + nb + nc, rank)
    for i in A_:
        ei = basis_vec(k, i)
        for j in A_:
            table[i][j] = a_slot(ring.mul(ei, basis_vec(k, j)))
        for j in B_:
            jb = j - k
            table[i][j] = b_slot(g.b.act_ring(ei, basis_vec(nb, jb)))
    for i in B_:
        ib = i - k
        for j in C_:
            jc = j - (k + nb)
            table[i][j] = a_slot(g.m[ib][jc])
        for j in D_:
            jd = j - (k + nb + nc)
            table[i][j] = b_slot(g.b.act_ring(basis_vec(k, jd), basis_vec(nb, ib)))
    for i in C_:
        ic = i - (k + nb)
        for j in A_:
            table[i][j] = c_slot(g.c.act_ring(basis_vec(k, j), basis_vec(nc, ic)))
        for j in B_:
            jb = j - k
            table[i][j] = d_slot(g.m[jb][ic])
    for i in D_:
        id_ = i - (k + nb + nc)
        ei = basis_vec(k, id_)
        for j in C_:
            jc = j - (k + nb)
            table[i][j] = c_slot(g.c.act_ring(ei, basis_vec(nc, jc)))
        for j in D_:
            jd = j - (k + nb + nc)
            table[i][j] = d_slot(ring.mul(ei, basis_vec(k, jd)))
    one = g.join(ring.one, (0,) * nb, (0,) * nc, ring.one)
    embed = tuple(
        g.join(basis_vec(k, i), (0,) * nb, (0,) * nc, basis_vec(k, i)) for i in range(k)
    )
    return validate_algebra(
        ring, orders, tuple(tuple(r) for r in table), one, embed, max_order
    )


@dataclass(frozen=True)
class GmaRep:
    """rho : G -> E^× landing in a GMA, with declared residual characters."""

    gma: GmaData
    group: FiniteGroup
    chalg: ChAlgebra
    residual: tuple[Character, Character]
    residue_proj: RingHom

    @property
    def rho(self) -> tuple[Vec, ...]:
        return self.chalg.rho

    def coord(self, which: str, g: int) -> Vec:
        a, b, c, d = self.gma.split(self.rho[g])
        return {"11": a, "12": b, "21": c, "22": d}[which]

    def induced_trace_det(self) -> TraceDet:
        ring = self.gma.ring
        t = tuple(
            self.chalg.backend.fast_trace(self.rho[g]) for g in range(self.group.order)
        )
        dt = tuple(psi_eval(self.chalg.backend, self.rho[g]) for g in range(self.group.order))
        return trace_det(ring, self.group, t, dt)


def gma_rep(
    g: GmaData,
    group: FiniteGroup,
    rho_gens: Sequence[Sequence[int]],
    residual: tuple[Character, Character],
    residue_proj: RingHom,
    max_order: int | None = None,
    require_distinct: bool = True,
) -> GmaRep:
    """Validate the representation and the residual diagonal characters."""
    ealg = gma_algebra(g, group, rho_gens, max_order)
    chi1, chi2 = residual
    if require_distinct and chi1.values == chi2.values:
        raise ResidualMismatch("residual characters must be distinct")
    rep = GmaRep(g, group, ealg, residual, residue_proj)
    for gg in range(group.order):
        a, _, _, d = g.split(ealg.rho[gg])
        if residue_proj(a) != chi1(gg) or residue_proj(d) != chi2(gg):
            raise ResidualMismatch(
                "diagonal coordinates do not reduce to the declared characters",
                witness=gg,
            )
    return rep


def gma_algebra(
    g: GmaData,
    group: FiniteGroup,
    rho_gens: Sequence[Sequence[int]],
    max_order: int | None = None,
) -> ChAlgebra:
    """The GMA as a full Cayley-Hamilton representation of the group."""
    alg = gma_finite_algebra(g, max_order)
    return validate_ch_algebra(
        g.ring, alg, group, [alg.group.reduce(r) for r in rho_gens], g.backend(), 2,
        max_order,
    )


# -- adapted representations -----------------------------------------------------


def adapted_reps(
    rep: GmaRep,
    target: FiniteRing,
    hom: RingHom,
    max_order: int | None = None,
) -> list[CompatibleRep]:
    """All adapted representations (E, idempotents) -> M_2(A') along hom:
    pairs of A-linear maps f_B : B -> A', f_C : C -> A' with
    f_B(b) f_C(c) = hom(m(b⊗c)), sending (a,b,c,d) to ((a, f_B b), (f_C c, d)).

    Each result is verified multiplicative and law-compatible, and is
    returned in the compatible-representation format (so adapted reps embed
    into the compatible-rep enumeration for cross checks).
    """
    g = rep.gma
    a_prime_mod = _ring_as_module_over(g.ring, target, hom)
    fb_space = _all_linear_maps(g.b, a_prime_mod, max_order)
    fc_space = _all_linear_maps(g.c, a_prime_mod, max_order)
    out = []
    mring = matrix_algebra(target, 2)
    for fb in fb_space:
        for fc in fc_space:
            if not _pairing_compatible(g, target, hom, fb, fc):
                continue
            mat = _adapted_matrix(g, target, hom, fb, fc)
            cand = CompatibleRep(rep.chalg, target, hom, mat)
            if _is_algebra_map(rep.chalg, mring, cand):
                out.append(cand)
    out.sort(key=lambda r: r.key())
    return out


def _ring_as_module_over(a: FiniteRing, target: FiniteRing, hom: RingHom) -> GModule:
    """target as an A-module through hom, over the trivial group."""
    ra = tuple(target.mult_matrix(hom(basis_vec(a.rank, i))) for i in range(a.rank))
    return validate_module(a, _TRIVIAL_GROUP, target.orders, ra, ())


def _all_linear_maps(src: GModule, dst: GModule, max_order: int | None) -> list[Mat]:
    basis = hom_space_basis(src, dst)
    if not basis:
        return [tuple(tuple(0 for _ in range(src.rank)) for _ in range(dst.rank))]
    var_orders = [dst.orders[r] for r in range(dst.rank) for _ in range(src.rank)]
    zg = ZGroup(src.ring.prime, tuple(var_orders))
    flat = [tuple(m[r][c] for r in range(dst.rank) for c in range(src.rank)) for m in basis]
    span = zg.span(flat)
    check_order_guard(span.order, max_order)
    out = []
    for vec in span.elements():
        out.append(
            tuple(
                tuple(vec[r * src.rank + c] for c in range(src.rank))
                for r in range(dst.rank)
            )
        )
    return out


def _pairing_compatible(g, target, hom, fb: Mat, fc: Mat) -> bool:
    for i in range(g.rank_b):
        vb = zmod.mat_apply(fb, basis_vec(g.rank_b, i), target.orders) if fb else target.zero()
        for j in range(g.rank_c):
            vc = zmod.mat_apply(fc, basis_vec(g.rank_c, j), target.orders) if fc else target.zero()
            if target.mul(vb, vc) != hom(g.m[i][j]):
                return False
    return True


def _adapted_matrix(g: GmaData, target: FiniteRing, hom: RingHom, fb: Mat, fc: Mat) -> Mat:
    """Matrix of (a,b,c,d) -> [[hom a, f_B b],[f_C c, hom d]] in M_2 layout."""
    kt = target.rank
    nm = 4 * kt
    cols = []
    for src in range(g.algebra_rank()):
        e = basis_vec(g.algebra_rank(), src)
        a, b, c, d = g.split(e)
        m00 = hom(a)
        m01 = zmod.mat_apply(fb, b, target.orders) if g.rank_b else target.zero()
        m10 = zmod.mat_apply(fc, c, target.orders) if g.rank_c else target.zero()
        m11 = hom(d)
        col = [0] * nm
        for slot, val in enumerate((m00, m01, m10, m11)):
            for i, x in enumerate(val):
                col[slot * kt + i] = x
        cols.append(col)
    return tuple(tuple(cols[j][i] for j in range(g.algebra_rank())) for i in range(nm))


def _is_algebra_map(ealg: ChAlgebra, mring: FiniteAlgebra, rep: CompatibleRep) -> bool:
    alg = ealg.algebra
    if rep(alg.one) != mring.one:
        return False
    for i in range(alg.rank):
        ei = basis_vec(alg.rank, i)
        fi = rep(ei)
        for j in range(alg.rank):
            ej = basis_vec(alg.rank, j)
            if mring.mul(fi, rep(ej)) != rep(alg.mul(ei, ej)):
                return False
    # law compatibility: trace on basis, determinant on small all-element scan
    from .chalg import _det_law_matches

    return _det_law_matches(ealg, rep)


# -- reducibility ------------------------------------------------------------------


def reducibility_ideal(g: GmaData) -> Ideal:
    """The image ideal B·C = (m(b_i ⊗ c_j))."""
    return ideal(g.ring, [g.m[i][j] for i in range(g.rank_b) for j in range(g.rank_c)])


def group_reducibility_ideal(rep: GmaRep) -> Ideal:
    """The ideal generated by m(rho_12(sigma) ⊗ rho_21(tau)) over all pairs
    of group elements (the group-level reducibility obstruction)."""
    g = rep.gma
    ring = g.ring
    gens = []
    for s in range(rep.group.order):
        b = rep.coord("12", s)
        for t in range(rep.group.order):
            c = rep.coord("21", t)
            acc = ring.zero()
            for i in range(g.rank_b):
                if b[i]:
                    for j in range(g.rank_c):
                        if c[j]:
                            acc = ring.add(acc, ring.smul(b[i] * c[j], g.m[i][j]))
            gens.append(acc)
    return ideal(ring, gens)


@dataclass(frozen=True)
class ReducibleQuotient:
    gma: GmaData | None  # None when the quotient ring is zero
    rep: GmaRep | None
    scalar_proj: RingHom
    b_proj: Mat
    c_proj: Mat
    chalg: ChAlgebra | None


def change_ring_module(
    mod: GModule, proj: RingHom, max_order: int | None = None
) -> tuple[GModule, Mat]:
    """mod ⊗_A A/J for a surjective proj with kernel J: quotient by J·mod,
    re-present over the target ring.  Returns the new module and the
    projection matrix on underlying groups."""
    ring_new = proj.target
    j_rows = proj.kernel().rows
    kill = mod.zgroup.span(
        [mod.act_ring(j, basis_vec(mod.rank, t)) for j in j_rows for t in range(mod.rank)]
    )
    pres = zmod.quotient_by(mod.zgroup, kill)
    qg = pres.quotient
    lifts = [pres.lift(basis_vec(qg.rank, t)) for t in range(qg.rank)]
    ra = []
    for i in range(ring_new.rank):
        pre = _lift_scalar(proj, basis_vec(ring_new.rank, i))
        cols = [pres.project(mod.act_ring(pre, lift)) for lift in lifts]
        ra.append(tuple(tuple(col[r] for col in cols) for r in range(qg.rank)))
    new_mod = validate_module(
        ring_new, mod.group, qg.orders, tuple(ra),
        tuple(
            tuple(
                tuple(pres.project(mod.act_group(s, lift))[r] for lift in lifts)
                for r in range(qg.rank)
            )
            for s in mod.group.generators
        )
        if mod.group.generators
        else (),
        max_order,
    )
    proj_mat = tuple(
        tuple(pres.project(basis_vec(mod.rank, j))[r] for j in range(mod.rank))
        for r in range(qg.rank)
    )
    return new_mod, proj_mat


def _lift_scalar(proj: RingHom, v: Vec) -> Vec:
    res = zmod.solve(proj.matrix(), v, proj.target.group, proj.source.group)
    assert res.consistent
    return res.particular


def reducible_quotient(rep: GmaRep, max_order: int | None = None) -> ReducibleQuotient:
    """Base change to A/J for J the reducibility ideal; the pushed diagonal
    coordinates become genuine characters (verified)."""
    g = rep.gma
    j = reducibility_ideal(g)
    ring_new, proj = quotient_ring(g.ring, j, max_order)
    if ring_new.is_zero:
        return ReducibleQuotient(None, None, proj, (), (), None)
    b_new, b_proj = change_ring_module(g.b, proj, max_order)
    c_new, c_proj = change_ring_module(g.c, proj, max_order)
    m_new = tuple(
        tuple(ring_new.zero() for _ in range(c_new.rank)) for _ in range(b_new.rank)
    )
    # the induced pairing must vanish: check on generators through lifts
    for i in range(g.rank_b):
        for jj in range(g.rank_c):
            if any(proj(g.m[i][jj])):
                raise AssoComViolation(
                    "reducibility ideal did not kill the pairing", witness=(i, jj)
                )
    g_new = validate_gma(ring_new, b_new, c_new, m_new)
    rho_gens_new = []
    for s in rep.group.generators:
        a, b, c, d = g.split(rep.rho[s])
        rho_gens_new.append(
            g_new.join(
                proj(a),
                zmod.mat_apply(b_proj, b, b_new.orders),
                zmod.mat_apply(c_proj, c, c_new.orders),
                proj(d),
            )
        )
    # residual characters survive: residue field of A/J is that of A
    res_proj_new = _compose_residue(proj, rep.residue_proj)
    new_rep = gma_rep(
        g_new, rep.group, rho_gens_new, rep.residual, res_proj_new, max_order
    )
    # diagonal coordinates are characters of the group now
    for label, chi_idx in (("11", 0), ("22", 1)):
        vals = tuple(new_rep.coord(label, gg) for gg in range(rep.group.order))
        character(ring_new, rep.group, vals)
    return ReducibleQuotient(g_new, new_rep, proj, b_proj, c_proj, new_rep.chalg)


def _compose_residue(proj: RingHom, residue: RingHom) -> RingHom:
    """Residue map on A/J from the residue map on A (J inside the maximal
    ideal whenever A/J is nonzero)."""
    from .rings import ring_hom

    images = []
    for i in range(proj.target.rank):
        pre = _lift_scalar(proj, basis_vec(proj.target.rank, i))
        images.append(residue(pre))
    return ring_hom(proj.target, residue.target, images)


# -- extraction from a matrix representation -----------------------------------------


def gma_from_rep(
    ring: FiniteRing,
    group: FiniteGroup,
    rho_matrices: Sequence[Sequence[Sequence[Vec]]],
    residual: tuple[Character, Character],
    residue_proj: RingHom,
    max_order: int | None = None,
) -> GmaRep:
    """Extract (B, C, m) from rho : G -> GL_2(A) whose diagonal realizes the
    residually-distinct characters in the given basis (no idempotent
    search; the basis is part of the input).

    B is the A-submodule of A generated by the rho_12 values, C likewise
    from rho_21, and m is multiplication in A restricted to B x C.
    """
    mring = matrix_algebra(ring, 2)
    gens = [vec_from_matrix(ring, 2, m) for m in rho_matrices]
    ealg = validate_ch_algebra(
        ring, mring, group, gens, DetBackend(ring, 2), 2, max_order
    )
    k = ring.rank

    def entry(v: Vec, r: int, s: int) -> Vec:
        return tuple(v[(r * 2 + s) * k + i] for i in range(k))

    chi1, chi2 = residual
    for gg in range(group.order):
        if residue_proj(entry(ealg.rho[gg], 0, 0)) != chi1(gg) or residue_proj(
            entry(ealg.rho[gg], 1, 1)
        ) != chi2(gg):
            raise ResidualMismatch(
                "diagonal entries do not reduce to the residual characters",
                witness=gg,
            )
    b_vals = [entry(ealg.rho[gg], 0, 1) for gg in range(group.order)]
    c_vals = [entry(ealg.rho[gg], 1, 0) for gg in range(group.order)]
    b_mod, b_coords = _span_submodule_of_ring(ring, b_vals)
    c_mod, c_coords = _span_submodule_of_ring(ring, c_vals)
    m = tuple(
        tuple(ring.mul(b_coords.rows[i], c_coords.rows[j]) for j in range(c_mod.rank))
        for i in range(b_mod.rank)
    )
    g = validate_gma(ring, b_mod, c_mod, m)
    rho_gens = []
    for s in group.generators:
        v = ealg.rho[s]
        bc = b_coords.coefficients_of(entry(v, 0, 1))
        cc = c_coords.coefficients_of(entry(v, 1, 0))
        assert bc is not None and cc is not None
        rho_gens.append(
            g.join(
                entry(v, 0, 0),
                b_mod.zgroup.reduce(bc),
                c_mod.zgroup.reduce(cc),
                entry(v, 1, 1),
            )
        )
    return gma_rep(g, group, rho_gens, residual, residue_proj, max_order)


def _span_submodule_of_ring(ring: FiniteRing, values: Sequence[Vec]):
    """Present the A-submodule of A generated by the values; returns the
    module plus the subgroup (whose rows are the chosen basis)."""
    sub = ideal(ring, values).subgroup
    rows = sub.rows
    rank = len(rows)
    row_orders = sub.row_orders()
    ra = []
    for i in range(ring.rank):
        cols = []
        for row in rows:
            prod = ring.mul(basis_vec(ring.rank, i), row)
            coeff = sub.coefficients_of(prod)
            assert coeff is not None
            cols.append(coeff)
        ra.append(tuple(tuple(col[r] % row_orders[r] for col in cols) for r in range(rank)))
    mod = a_module(ring, row_orders, tuple(ra))
    return mod, sub


# -- conditioned GMA quotients ---------------------------------------------------------


@dataclass(frozen=True)
class ConditionedGma:
    source: GmaRep
    conditioned: ConditionedQuotient
    gma: GmaData | None
    rep: GmaRep | None
    scalar_to_new: RingHom | None  # A -> A'' (scalars of the conditioned GMA)
    reducible: ReducibleQuotient | None

    def scalars_preserved(self) -> bool:
        return (
            self.scalar_to_new is not None
            and self.scalar_to_new.source.order == self.scalar_to_new.target.order
        )


def gma_with_condition(
    rep: GmaRep, cond: Condition, max_order: int | None = None
) -> ConditionedGma:
    """E^C of the GMA algebra, idempotents pushed through, Peirce blocks
    extracted as the new (scalars, B^C, C^C), then the reducible quotient.

    PeirceMismatch is raised if the two diagonal blocks disagree (the
    type-(1,1) structure would not survive)."""
    g = rep.gma
    cq = e_with_condition(rep.chalg, cond, max_order)
    equot = cq.quotient
    enew = equot.result
    if enew.algebra.is_zero or enew.ring.is_zero:
        return ConditionedGma(rep, cq, None, None, None, None)
    alg = enew.algebra
    aprime = enew.ring
    e1 = equot.project(g.e1())
    e2 = equot.project(g.e2())
    # Peirce decomposition of the quotient
    blocks: dict[str, Subgroup] = {}
    for name, l, r in (("11", e1, e1), ("12", e1, e2), ("21", e2, e1), ("22", e2, e2)):
        gens = [
            alg.mul(alg.mul(l, basis_vec(alg.rank, t)), r) for t in range(alg.rank)
        ]
        blocks[name] = alg.group.span(gens)
    # diagonal blocks must both be scalar: A'' = A'/ann(e_i), equal on both sides
    ann1 = _scalar_annihilator(alg, aprime, e1)
    ann2 = _scalar_annihilator(alg, aprime, e2)
    if ann1.rows != ann2.rows:
        raise PeirceMismatch(
            "diagonal Peirce blocks carry different scalar rings",
            witness=(ann1.rows, ann2.rows),
        )
    a2, to_a2 = quotient_ring(aprime, ideal(aprime, ann1.rows), max_order)
    for name, idem in (("11", e1), ("22", e2)):
        if blocks[name].order != a2.order:
            raise PeirceMismatch(
                f"diagonal block {name} is not the scalar ring", witness=name
            )
    b_mod, b_rows = _block_as_module(alg, aprime, a2, to_a2, blocks["12"])
    c_mod, c_rows = _block_as_module(alg, aprime, a2, to_a2, blocks["21"])
    # pairing: product of block representatives, read in the 11 block
    m_new = []
    for brow in b_rows:
        row = []
        for crow in c_rows:
            prod = alg.mul(brow, crow)  # lands in e1 E e2 * e2 E e1 ⊆ e1 E e1
            row.append(_scalar_coords(alg, aprime, a2, to_a2, e1, prod))
        m_new.append(tuple(row))
    g_new = validate_gma(a2, b_mod, c_mod, tuple(m_new))
    # transport rho
    scalar_total = to_a2.compose(equot.scalar_proj)
    rho_gens = []
    b_sub = alg.group.span(b_rows)
    c_sub = alg.group.span(c_rows)
    for s in rep.group.generators:
        x = equot.project(rep.rho[s])
        x11 = alg.mul(alg.mul(e1, x), e1)
        x12 = alg.mul(alg.mul(e1, x), e2)
        x21 = alg.mul(alg.mul(e2, x), e1)
        x22 = alg.mul(alg.mul(e2, x), e2)
        bc = b_sub.coefficients_of(x12)
        cc = c_sub.coefficients_of(x21)
        if bc is None or cc is None:
            raise PeirceMismatch("rho coordinate escaped its Peirce block")
        rho_gens.append(
            g_new.join(
                _scalar_coords(alg, aprime, a2, to_a2, e1, x11),
                b_mod.zgroup.reduce(bc),
                c_mod.zgroup.reduce(cc),
                _scalar_coords(alg, aprime, a2, to_a2, e2, x22),
            )
        )
    res_proj_new = _residue_through(scalar_total, rep.residue_proj)
    rep_new = gma_rep(g_new, rep.group, rho_gens, rep.residual, res_proj_new, max_order)
    red = reducible_quotient(rep_new, max_order)
    return ConditionedGma(rep, cq, g_new, rep_new, scalar_total, red)


def _scalar_annihilator(alg: FiniteAlgebra, aprime: FiniteRing, idem: Vec) -> Subgroup:
    rows = []
    for i in range(aprime.rank):
        rows.append(alg.mul(alg.scalar(basis_vec(aprime.rank, i)), idem))
    mat = tuple(tuple(rows[j][i] for j in range(aprime.rank)) for i in range(alg.rank))
    return zmod.kernel_of(mat, alg.group, aprime.group)


def _scalar_coords(alg, aprime, a2, to_a2, idem: Vec, x: Vec) -> Vec:
    """Coordinates in A'' of an element of the diagonal block e A' e."""
    mat = tuple(
        tuple(
            alg.mul(alg.scalar(basis_vec(aprime.rank, j)), idem)[i]
            for j in range(aprime.rank)
        )
        for i in range(alg.rank)
    )
    res = zmod.solve(mat, x, alg.group, aprime.group)
    if not res.consistent:
        raise PeirceMismatch("diagonal block element is not scalar", witness=x)
    return to_a2(res.particular)


def _block_as_module(alg, aprime, a2, to_a2, block: Subgroup):
    """An off-diagonal Peirce block as an A''-module."""
    rows = block.rows
    rank = len(rows)
    row_orders = block.row_orders()
    ra = []
    for i in range(a2.rank):
        pre = _lift_scalar(to_a2, basis_vec(a2.rank, i))
        cols = []
        for row in rows:
            prod = alg.mul(alg.scalar(pre), row)
            coeff = block.coefficients_of(prod)
            if coeff is None:
                raise PeirceMismatch("scalar action escaped the Peirce block")
            cols.append(coeff)
        ra.append(
            tuple(tuple(col[r] % row_orders[r] for col in cols) for r in range(rank))
        )
    mod = a_module(a2, row_orders, tuple(ra))
    return mod, rows


def _residue_through(total: RingHom, residue: RingHom) -> RingHom:
    from .rings import ring_hom

    images = []
    for i in range(total.target.rank):
        pre = _lift_scalar(total, basis_vec(total.target.rank, i))
        images.append(residue(pre))
    return ring_hom(total.target, residue.target, images)


# -- reducible splitting with a condition -----------------------------------------------


def split_reducible_with_c(
    rep: GmaRep, cond: Condition, max_order: int | None = None
) -> tuple[Character, Character] | None:
    """If psi(rho) is reducible and still satisfied after conditioning (the
    conditioned GMA preserves the scalars, hence psi), return the split
    characters, each verified to satisfy the condition."""
    td = rep.induced_trace_det()
    splits = find_all_reducible_splits(td, rep.residual, rep.residue_proj)
    if not splits:
        raise NotReducible("the induced pseudorepresentation has no character split")
    conditioned = gma_with_condition(rep, cond, max_order)
    if not conditioned.scalars_preserved():
        return None
    chi1, chi2 = splits[0]
    for chi in (chi1, chi2):
        if not has_c_artinian(module_from_character(chi), cond, max_order):
            raise TheoremViolation(
                "conditioned quotient preserved psi but a split character "
                "fails the condition"
            )
    return chi1, chi2
