"""Group cohomology H^1, extension groups of character twists, conditioned
extension subgroups, Selmer kernels, and the Hom(B, M) bridge.

Cocycles are stored as full value tables f : G -> M (one vector per group
element, concatenated), solved as one linear system; H^1 is presented with
an explicit section so classes can be enumerated and lifted.  Extension
modules are built literally as M ⊕ A with the block action
[[act_M(g), chi2(g) u(g)], [0, chi2(g)]] and re-validated, which doubles as
a check of the cocycle identity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from . import zmod
from .conditions import Condition, evaluate
from .errors import (
    BridgeNotBijective,
    ConstituentNotInC,
    NotASubmodule,
    OrderMismatch,
    SizeLimitExceeded,
)
from .gma import ConditionedGma, GmaRep, a_module, gma_with_condition
from .groups import FiniteGroup, subgroup_as_group
from .modules import (
    Character,
    GModule,
    character,
    hom_space_basis,
    module_from_character,
    tensor_with_character,
    validate_module,
)
from .rings import FiniteRing, basis_vec, check_order_guard
from .zmod import Mat, QuotientPresentation, Subgroup, Vec, ZGroup


@dataclass(frozen=True)
class CocycleSpace:
    group: FiniteGroup
    coefficients: GModule  # the (twisted) coefficient module
    big: ZGroup  # functions G -> M as concatenated vectors
    z1: Subgroup
    b1: Subgroup
    z1_group: ZGroup  # Z1 in its own coordinates (rows of z1)
    h1: QuotientPresentation  # Z1 / B1

    @property
    def h1_order(self) -> int:
        return self.h1.quotient.order

    def value(self, table: Sequence[int], g: int) -> Vec:
        n = self.coefficients.rank
        return tuple(table[g * n + i] for i in range(n))

    def class_of(self, table: Sequence[int]) -> Vec:
        coeffs = self.z1.coefficients_of(table)
        if coeffs is None:
            raise OrderMismatch("table is not a cocycle")
        return self.h1.project(self.z1_group.reduce(coeffs))

    def representative(self, cls: Sequence[int]) -> Vec:
        """A cocycle table representing the class."""
        coeffs = self.h1.lift(cls)
        acc = [0] * self.big.rank
        for c, row in zip(coeffs, self.z1.rows):
            if c:
                for i, x in enumerate(row):
                    acc[i] = (acc[i] + c * x) % self.big.orders[i]
        return tuple(acc)

    def classes(self) -> list[Vec]:
        return [tuple(v) for v in self.h1.quotient.elements()]


def h1(group: FiniteGroup, coefficients: GModule, max_order: int | None = None) -> CocycleSpace:
    """Solve f(gh) = f(g) + g·f(h) over the full element table."""
    m = coefficients
    n = m.rank
    ng = group.order
    # the function table is a solver domain, never enumerated; guard the
    # coefficient module and the table rank rather than |M|^|G|
    check_order_guard(m.order, max_order)
    check_order_guard(ng * max(n, 1), max_order)
    big = ZGroup(m.ring.prime, tuple(m.orders[i] for _ in range(ng) for i in range(n)))
    rows: list[list[int]] = []
    to_orders: list[int] = []
    for g in range(ng):
        act_g = m.element_action[g]
        for h in range(ng):
            gh = group.op(g, h)
            for r in range(n):
                row = [0] * big.rank
                row[gh * n + r] += 1
                row[g * n + r] -= 1
                for c in range(n):
                    row[h * n + c] -= act_g[r][c]
                rows.append([x % m.orders[r] for x in row])
                to_orders.append(m.orders[r])
    z1 = zmod.kernel_of(rows, ZGroup(m.ring.prime, tuple(to_orders)), big)
    b_gens = []
    for j in range(n):
        e = basis_vec(n, j)
        table = []
        for g in range(ng):
            table.extend(m.zgroup.sub(m.act_group(g, e), e))
        b_gens.append(table)
    b1 = big.span(b_gens)
    z1_group = ZGroup(m.ring.prime, z1.row_orders())
    b_in_z = []
    for row in b1.rows:
        coeffs = z1.coefficients_of(row)
        assert coeffs is not None, "coboundary is not a cocycle?"
        b_in_z.append(z1_group.reduce(coeffs))
    pres = zmod.quotient_by(z1_group, z1_group.span(b_in_z))
    return CocycleSpace(group, m, big, z1, b1, z1_group, pres)


def h1_brute_count(group: FiniteGroup, coefficients: GModule, limit: int = 10**6) -> int:
    """Independent oracle: enumerate all functions G -> M and count cocycle
    classes (|Z1| / |B1|)."""
    m = coefficients
    total = m.order ** group.order
    if total > limit:
        raise SizeLimitExceeded("brute-force cocycle enumeration too large")
    n = m.rank
    z_count = 0
    for table in itertools.product(m.elements(), repeat=group.order):
        ok = True
        for g in range(group.order):
            for h in range(group.order):
                gh = group.op(g, h)
                want = m.zgroup.add(table[g], m.act_group(g, table[h]))
                if tuple(table[gh]) != want:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            z_count += 1
    b_set = set()
    for x in m.elements():
        tbl = tuple(tuple(m.zgroup.sub(m.act_group(g, x), x)) for g in range(group.order))
        b_set.add(tbl)
    return z_count // len(b_set)


# -- Ext^1 of character twists ----------------------------------------------------


@dataclass(frozen=True)
class ExtSpace:
    """Ext^1_{A[G]}(chi2, target) with target = chi1 ⊗ M, via cocycles of
    the twist target ⊗ chi2^{-1}."""

    chi2: Character
    target: GModule
    twist: GModule
    cocycles: CocycleSpace

    @property
    def h1_order(self) -> int:
        return self.cocycles.h1_order

    def extension_module(self, table: Sequence[int], max_order: int | None = None) -> GModule:
        """M ⊕ A with action [[act(g), chi2(g)u(g)],[0, chi2(g)]]."""
        t = self.target
        ring = t.ring
        ka = ring.rank
        n = t.rank
        orders = t.orders + ring.orders
        ga = []
        for s in t.group.generators:
            u_s = self.cocycles.value(table, s)
            w = t.act_ring(self.chi2(s), u_s)
            m = [[0] * (n + ka) for _ in range(n + ka)]
            for i in range(n):
                for j in range(n):
                    m[i][j] = t.element_action[s][i][j]
            for j in range(ka):
                col = t.act_ring(basis_vec(ka, j), w)
                for i in range(n):
                    m[i][n + j] = col[i]
            chi_mat = ring.mult_matrix(self.chi2(s))
            for i in range(ka):
                for j in range(ka):
                    m[n + i][n + j] = chi_mat[i][j]
            ga.append(tuple(tuple(r) for r in m))
        ra = []
        for i in range(ring.rank):
            m = [[0] * (n + ka) for _ in range(n + ka)]
            for r in range(n):
                for c in range(n):
                    m[r][c] = t.ring_action[i][r][c]
            amat = ring.mult_matrix(basis_vec(ka, i))
            for r in range(ka):
                for c in range(ka):
                    m[n + r][n + c] = amat[r][c]
            ra.append(tuple(tuple(row) for row in m))
        return validate_module(ring, t.group, orders, tuple(ra), tuple(ga), max_order)


def ext1(chi2: Character, target: GModule, max_order: int | None = None) -> ExtSpace:
    twist = tensor_with_character(target, chi2.inv())
    return ExtSpace(chi2, target, twist, h1(target.group, twist, max_order))


@dataclass(frozen=True)
class ExtSubspace:
    """A subgroup of H^1 classes, with the ambient space."""

    space: ExtSpace
    classes: Subgroup  # subgroup of the H1 presentation group

    @property
    def order(self) -> int:
        return self.classes.order

    def contains(self, cls: Sequence[int]) -> bool:
        return self.classes.contains(cls)


def full_subspace(space: ExtSpace) -> ExtSubspace:
    return ExtSubspace(space, space.cocycles.h1.quotient.full())


def ext1_with_condition(
    chi2: Character,
    target: GModule,
    cond: Condition,
    max_order: int | None = None,
    paranoid: bool = False,
) -> ExtSubspace:
    """Classes whose extension modules satisfy the condition.

    One module per class suffices (membership is a class property for a
    stable condition); ``paranoid`` additionally tests every representative
    of every class.  The passing set is verified to be a subgroup."""
    if not evaluate(cond, target):
        raise ConstituentNotInC("the sub constituent fails the condition")
    if not evaluate(cond, module_from_character(chi2)):
        raise ConstituentNotInC("the quotient constituent fails the condition")
    space = ext1(chi2, target, max_order)
    passing: list[Vec] = []
    h1_group = space.cocycles.h1.quotient
    check_order_guard(h1_group.order, max_order)
    for cls in space.cocycles.classes():
        table = space.cocycles.representative(cls)
        v = space.extension_module(table, max_order)
        ok = evaluate(cond, v)
        if paranoid:
            check_order_guard(space.cocycles.b1.order * h1_group.order, max_order)
            for shift in space.cocycles.b1.elements():
                table2 = space.cocycles.big.add(table, shift)
                if evaluate(cond, space.extension_module(table2, max_order)) != ok:
                    raise NotASubmodule(
                        "condition verdict depends on the representative",
                        witness=cls,
                    )
        if ok:
            passing.append(cls)
    sub = h1_group.span(passing)
    if sub.order != len(passing):
        raise NotASubmodule(
            "passing classes do not form a subgroup (condition unstable?)",
            witness=len(passing),
        )
    for cls in passing:
        if not sub.contains(cls):
            raise NotASubmodule("span mismatch", witness=cls)
    return ExtSubspace(space, sub)


# -- restriction and Selmer kernels ---------------------------------------------------


@dataclass(frozen=True)
class LocalDatum:
    subgroup_name: str
    space: ExtSpace  # Ext over the subgroup
    allowed: Subgroup  # subgroup of the local H1 presentation group


def restrict_ext(space: ExtSpace, name: str, max_order: int | None = None) -> ExtSpace:
    sub, embedding = subgroup_as_group(space.target.group, name)
    t = space.target
    tr = validate_module(
        t.ring, sub, t.orders, t.ring_action,
        tuple(t.element_action[embedding[i]] for i in sub.generators),
    )
    chi2r = character(
        space.chi2.ring, sub, tuple(space.chi2(embedding[i]) for i in range(sub.order))
    )
    return ext1(chi2r, tr, max_order)


def restriction_class_map(
    space: ExtSpace, local: ExtSpace, embedding: tuple[int, ...]
) -> Mat:
    """Matrix of H1(G) -> H1(H) on the presentation groups."""
    n = space.target.rank
    cols = []
    src = space.cocycles.h1.quotient
    for j in range(src.rank):
        table = space.cocycles.representative(basis_vec(src.rank, j))
        restricted = []
        for idx in range(local.cocycles.group.order):
            g = embedding[idx]
            restricted.extend(space.cocycles.value(table, g))
        cols.append(local.cocycles.class_of(tuple(restricted)))
    dst = local.cocycles.h1.quotient
    return tuple(tuple(cols[j][i] for j in range(src.rank)) for i in range(dst.rank))


def selmer_kernel(
    space: ExtSpace,
    locals_: Sequence[LocalDatum],
    max_order: int | None = None,
) -> ExtSubspace:
    """Classes whose restriction to each subgroup lies in the allowed local
    subspace: the kernel of ⊕ (restrict, then quotient by allowed)."""
    src = space.cocycles.h1.quotient
    rows: list[list[int]] = []
    to_orders: list[int] = []
    for datum in locals_:
        _, embedding = subgroup_as_group(space.target.group, datum.subgroup_name)
        res = restriction_class_map(space, datum.space, embedding)
        local_h1 = datum.space.cocycles.h1.quotient
        quot = zmod.quotient_by(local_h1, datum.allowed)
        comp = zmod.mat_mul(quot.proj, res, quot.quotient.orders)
        for r, row in enumerate(comp):
            rows.append(list(row))
            to_orders.append(quot.quotient.orders[r])
    if not rows:
        return ExtSubspace(space, src.full())
    kern = zmod.kernel_of(rows, ZGroup(src.prime, tuple(to_orders)), src)
    return ExtSubspace(space, kern)


def unramified_local_datum(
    space: ExtSpace, name: str, max_order: int | None = None
) -> LocalDatum:
    """Local condition 'restriction is trivial on the subgroup': allowed
    classes are zero."""
    local = restrict_ext(space, name, max_order)
    return LocalDatum(name, local, local.cocycles.h1.quotient.zero_subgroup())


# -- the Hom(B, M) bridge --------------------------------------------------------------


@dataclass(frozen=True)
class BridgeReport:
    hom_order: int
    ext_order: int
    bridge_cols: tuple[Vec, ...]  # H1 class per hom-space basis element
    image: Subgroup  # inside the H1 presentation group
    injective: bool
    surjective_onto_full: bool

    @property
    def bijective(self) -> bool:
        return self.injective and self.surjective_onto_full


def hom_b_to_m(
    b_mod: GModule,
    b_of: Sequence[Vec],
    m_mod: GModule,
    space: ExtSpace,
    max_order: int | None = None,
) -> BridgeReport:
    """Hom_A(B, M) -> Ext^1(chi2, chi1 ⊗ M): f maps to the class of the
    cocycle sigma -> chi2(sigma)^{-1} f(b_sigma), where b_sigma are the
    rho_12 coordinates of a reducible GMA representation.

    The assignment is A-linear in f; the report carries the class of every
    basis element of the hom space, the image subgroup, and injectivity.
    """
    ring = b_mod.ring
    group = space.target.group
    basis = hom_space_basis(b_mod, m_mod)
    var_orders = tuple(
        m_mod.orders[r] for r in range(m_mod.rank) for _ in range(b_mod.rank)
    )
    hom_group = ZGroup(ring.prime, var_orders)
    flat = [
        tuple(mat[r][c] for r in range(m_mod.rank) for c in range(b_mod.rank))
        for mat in basis
    ]
    hom_sub = hom_group.span(flat)
    check_order_guard(hom_sub.order, max_order)
    chi2_inv = space.chi2.inv()
    src_h1 = space.cocycles.h1.quotient
    cols = []
    for row in hom_sub.rows:
        mat = tuple(
            tuple(row[r * b_mod.rank + c] for c in range(b_mod.rank))
            for r in range(m_mod.rank)
        )
        table: list[int] = []
        for sigma in range(group.order):
            f_b = (
                zmod.mat_apply(mat, b_of[sigma], m_mod.orders)
                if b_mod.rank
                else m_mod.zgroup.zero()
            )
            u = m_mod.act_ring(chi2_inv(sigma), f_b)
            table.extend(u)
        cols.append(space.cocycles.class_of(tuple(table)))
    bridge = tuple(
        tuple(cols[j][i] for j in range(len(cols))) for i in range(src_h1.rank)
    )
    dom = ZGroup(ring.prime, hom_sub.row_orders())
    kern = zmod.kernel_of(bridge, src_h1, dom) if cols else dom.full()
    image = src_h1.span(cols)
    return BridgeReport(
        hom_order=hom_sub.order,
        ext_order=src_h1.order,
        bridge_cols=tuple(cols),
        image=image,
        injective=kern.order == 1,
        surjective_onto_full=image.order == src_h1.order,
    )


@dataclass(frozen=True)
class ConditionedBridgeReport:
    conditioned: ConditionedGma
    bridge: BridgeReport | None
    ext_c_order: int
    bc_red_order: int
    bijective_onto_conditioned: bool
    finding: str | None


def verify_bc_exts(
    rep: GmaRep,
    m_mod: GModule,
    cond: Condition,
    max_order: int | None = None,
) -> ConditionedBridgeReport:
    """The conditioned bridge: Hom_A(B^{C,red}, M) vs Ext^1-with-condition.

    Per-instance check against the supplied finite algebra standing in for
    the universal conditioned reducible quotient; non-bijectivity is
    reported as a finding (the instance may simply not be saturated), never
    raised.  Requires the conditioned scalars to survive (isomorphic to A),
    otherwise the instance is reported unsaturated.
    """
    g = rep.gma
    ring = g.ring
    chi1 = character(ring, rep.group, tuple(rep.coord("11", s) for s in range(rep.group.order)))
    chi2 = character(ring, rep.group, tuple(rep.coord("22", s) for s in range(rep.group.order)))
    from .conditions import has_c_artinian

    for chi in (chi1, chi2):
        if not has_c_artinian(module_from_character(chi), cond, max_order):
            raise ConstituentNotInC("a diagonal character fails the condition")
    target = chi_tensor(chi1, m_mod)
    ext_c = ext1_with_condition(chi2, target, cond, max_order)
    conditioned = gma_with_condition(rep, cond, max_order)
    red = conditioned.reducible
    if red is None or red.rep is None:
        return ConditionedBridgeReport(
            conditioned, None, ext_c.order, 0, False,
            "conditioned quotient degenerated to the zero ring",
        )
    total = red.scalar_proj.compose(conditioned.scalar_to_new)
    if total.target.order != ring.order:
        return ConditionedBridgeReport(
            conditioned, None, ext_c.order, red.gma.b.order, False,
            "conditioned scalars shrank; instance is not saturated",
        )
    b_back = _transport_module_scalars(red.gma.b, total)
    b_of = tuple(red.rep.coord("12", s) for s in range(rep.group.order))
    report = hom_b_to_m(b_back, b_of, m_mod, ext_c.space, max_order)
    bij = report.injective and report.image.key() == ext_c.classes.key()
    finding = None
    if not bij:
        finding = "bridge is not a bijection onto the conditioned extension group"
    return ConditionedBridgeReport(
        conditioned, report, ext_c.order, report.hom_order, bij, finding
    )


def _transport_module_scalars(mod: GModule, iso: "RingHom") -> GModule:
    """Re-present a module over iso.target as a module over iso.source,
    for a bijective scalar homomorphism iso: source -> target."""
    src = iso.source
    ra = []
    for i in range(src.rank):
        img = iso(basis_vec(src.rank, i))
        # action of e_i := action of iso(e_i)
        acc = [[0] * mod.rank for _ in range(mod.rank)]
        for t, c in enumerate(img):
            if c:
                for r in range(mod.rank):
                    for s in range(mod.rank):
                        acc[r][s] += c * mod.ring_action[t][r][s]
        ra.append(tuple(tuple(x % mod.orders[r] for x in row) for r, row in enumerate(acc)))
    return validate_module(src, mod.group, mod.orders, tuple(ra), ())


def chi_tensor(chi: Character, m_mod: GModule) -> GModule:
    """chi ⊗ M as a module over chi's group (M has the trivial action)."""
    ring = m_mod.ring
    group = chi.group
    base = validate_module(
        ring, group, m_mod.orders, m_mod.ring_action,
        tuple(zmod.identity_mat(m_mod.rank) for _ in group.generators),
    )
    return tensor_with_character(base, chi)
