"""Finite modules over A[G]: presentation, morphisms, and enumeration.

A GModule is an additive graded group with an A-action matrix per ring
basis element and an invertible action matrix per group generator.  The
constructor stores (and validates against the multiplication table) the
action of *every* group element, so condition evaluation is table-driven.

Submodule enumeration is exact: cyclic modules A[G]·v for every v, closed
under pairwise sums to a fixpoint, deduplicated by the canonical Howell
basis.  This is the engine behind the maximal-quotient functor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from . import zmod
from .errors import (
    NotStable,
    OrderMismatch,
    RingMismatchError,
    SizeLimitExceeded,
)
from .groups import FiniteGroup, subgroup_as_group
from .rings import FiniteRing, basis_vec, check_order_guard
from .zmod import Mat, Subgroup, Vec, ZGroup


@dataclass(frozen=True)
class GModule:
    ring: FiniteRing
    group: FiniteGroup
    orders: tuple[int, ...]
    ring_action: tuple[Mat, ...]   # one matrix per ring basis element
    element_action: tuple[Mat, ...]  # one matrix per group element (validated)

    @cached_property
    def zgroup(self) -> ZGroup:
        return ZGroup(self.ring.prime, self.orders)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def order(self) -> int:
        return self.zgroup.order

    def act_group(self, g: int, v: Sequence[int]) -> Vec:
        return zmod.mat_apply(self.element_action[g], v, self.orders)

    def act_ring(self, a: Sequence[int], v: Sequence[int]) -> Vec:
        acc = [0] * self.rank
        for i, c in enumerate(a):
            if c:
                row = zmod.mat_apply(self.ring_action[i], v, self.orders)
                for k, x in enumerate(row):
                    acc[k] += c * x
        return self.zgroup.reduce(acc)

    def elements(self) -> Iterable[Vec]:
        return self.zgroup.elements()

    def describe(self) -> str:
        return "⊕".join(f"Z/{o}" for o in self.orders) if self.orders else "0"


def validate_module(
    ring: FiniteRing,
    group: FiniteGroup,
    orders: Sequence[int],
    ring_action: Sequence[Sequence[Sequence[int]]],
    generator_action: Sequence[Sequence[Sequence[int]]],
    max_order: int | None = None,
) -> GModule:
    """Validate a presentation and expand generator actions to all of G."""
    zg = ZGroup(ring.prime, orders)
    check_order_guard(zg.order, max_order)
    n = zg.rank
    ra = tuple(zmod.reduce_matrix(m, orders) for m in ring_action)
    if len(ra) != ring.rank:
        raise OrderMismatch("one action matrix per ring basis element required")
    for m in ra:
        zmod.check_map_orders(m, orders, orders)
    # unital: sum of one-coords of action matrices is the identity
    ident = zmod.identity_mat(n)
    one_mat = _combo(ra, ring.one, zg)
    if one_mat != ident:
        raise OrderMismatch("ring action is not unital")
    # ring hom: act(e_i)act(e_j) = act(e_i e_j)
    for i in range(ring.rank):
        for j in range(ring.rank):
            lhs = zmod.mat_mul(ra[i], ra[j], zg.orders)
            rhs = _combo(ra, ring.mul_table[i][j], zg)
            if lhs != rhs:
                raise OrderMismatch(
                    f"ring action not multiplicative on e_{i}e_{j}", witness=(i, j)
                )
    ga = tuple(zmod.reduce_matrix(m, orders) for m in generator_action)
    if len(ga) != len(group.generators):
        raise OrderMismatch("one action matrix per group generator required")
    for m in ga:
        zmod.check_map_orders(m, orders, orders)
    gen_of = {s: ga[i] for i, s in enumerate(group.generators)}
    element_action: list[Mat | None] = [None] * group.order
    element_action[0] = ident
    for g in range(group.order):
        word = group.words[g]
        m = ident
        for s in word:
            m = zmod.mat_mul(m, gen_of[s], zg.orders)
        element_action[g] = m
    # every relation of the table must hold
    for g in range(group.order):
        for h in range(group.order):
            if zmod.mat_mul(element_action[g], element_action[h], zg.orders) != element_action[group.op(g, h)]:
                raise NotStable(
                    "group action violates the multiplication table", witness=(g, h)
                )
    # invertibility: g * g^{-1} = identity holds by the relation check
    # A-linearity of the group action
    for i in range(ring.rank):
        for s, m in gen_of.items():
            if zmod.mat_mul(ra[i], m, zg.orders) != zmod.mat_mul(m, ra[i], zg.orders):
                raise NotStable(
                    "group action is not A-linear", witness=(i, s)
                )
    return GModule(ring, group, tuple(zg.orders), ra, tuple(element_action))


def _combo(mats: Sequence[Mat], coeffs: Sequence[int], zg: ZGroup) -> Mat:
    n = zg.rank
    acc = [[0] * n for _ in range(n)]
    for c, m in zip(coeffs, mats):
        if c:
            for i in range(n):
                row = m[i]
                for j in range(n):
                    acc[i][j] += c * row[j]
    return tuple(tuple(x % o for x in row) for row, o in zip(acc, zg.orders))


# -- module maps ---------------------------------------------------------------


@dataclass(frozen=True)
class ModuleMap:
    source: GModule
    target: GModule
    matrix: Mat

    def __call__(self, v: Sequence[int]) -> Vec:
        return zmod.mat_apply(self.matrix, v, self.target.orders)

    def compose(self, inner: "ModuleMap") -> "ModuleMap":
        return ModuleMap(
            inner.source,
            self.target,
            zmod.mat_mul(self.matrix, inner.matrix, self.target.orders),
        )

    def kernel(self) -> Subgroup:
        return zmod.kernel_of(self.matrix, self.target.zgroup, self.source.zgroup)

    def image(self) -> Subgroup:
        cols = [self(basis_vec(self.source.rank, j)) for j in range(self.source.rank)]
        return self.target.zgroup.span(cols)

    def is_surjective(self) -> bool:
        return self.image().order == self.target.order

    def is_injective(self) -> bool:
        return self.kernel().order == 1


def module_map(source: GModule, target: GModule, matrix: Sequence[Sequence[int]]) -> ModuleMap:
    if source.ring != target.ring:
        raise RingMismatchError("module map requires a common coefficient ring")
    m = zmod.reduce_matrix(matrix, target.orders)
    zmod.check_map_orders(m, target.orders, source.orders)
    f = ModuleMap(source, target, m)
    for i in range(source.ring.rank):
        lhs = zmod.mat_mul(m, source.ring_action[i], target.orders)
        rhs = zmod.mat_mul(target.ring_action[i], m, target.orders)
        if lhs != rhs:
            raise NotStable("map does not commute with the ring action", witness=i)
    for s in source.group.generators:
        lhs = zmod.mat_mul(m, source.element_action[s], target.orders)
        rhs = zmod.mat_mul(target.element_action[s], m, target.orders)
        if lhs != rhs:
            raise NotStable("map does not commute with the group action", witness=s)
    return f


def identity_map(v: GModule) -> ModuleMap:
    return ModuleMap(v, v, zmod.identity_mat(v.rank))


# -- submodules and quotients ---------------------------------------------------


def module_span(v: GModule, vectors: Iterable[Sequence[int]]) -> Subgroup:
    """Smallest A[G]-stable subgroup containing the vectors."""
    sub = v.zgroup.span(vectors)
    mats = list(v.ring_action) + [v.element_action[s] for s in v.group.generators]
    while True:
        extra = []
        for row in sub.rows:
            for m in mats:
                w = zmod.mat_apply(m, row, v.orders)
                if not sub.contains(w):
                    extra.append(w)
        if not extra:
            break
        sub = sub.add_generators(extra)
    return sub


def is_stable(v: GModule, sub: Subgroup) -> bool:
    mats = list(v.ring_action) + [v.element_action[s] for s in v.group.generators]
    return all(
        sub.contains(zmod.mat_apply(m, row, v.orders)) for row in sub.rows for m in mats
    )


def all_submodules(v: GModule, max_order: int | None = None) -> list[Subgroup]:
    """Every A[G]-submodule exactly once, as canonical Howell bases.

    Cyclic spans for every element, then pairwise-sum closure.  Output is
    sorted by (order, basis) so the enumeration order is deterministic.
    """
    check_order_guard(v.order, max_order)
    seen: dict[Mat, Subgroup] = {}
    zero = v.zgroup.zero_subgroup()
    seen[zero.key()] = zero
    cyclic: list[Subgroup] = [zero]
    for x in v.elements():
        s = module_span(v, [x])
        if s.key() not in seen:
            seen[s.key()] = s
            cyclic.append(s)
    frontier = list(seen.values())
    while frontier:
        fresh = []
        for a in frontier:
            for b in cyclic:
                c = a.sum(b)
                if c.key() not in seen:
                    seen[c.key()] = c
                    fresh.append(c)
        frontier = fresh
    subs = list(seen.values())
    subs.sort(key=lambda s: (s.order, s.rows))
    return subs


def quotient_module(
    v: GModule, sub: Subgroup, max_order: int | None = None
) -> tuple[GModule, ModuleMap]:
    """V/W with induced actions; raises NotStable if W is not A[G]-stable."""
    if not is_stable(v, sub):
        raise NotStable("subgroup is not an A[G]-submodule")
    pres = zmod.quotient_by(v.zgroup, sub)
    qg = pres.quotient
    lifts = [pres.lift(basis_vec(qg.rank, j)) for j in range(qg.rank)]

    def push(m: Mat) -> Mat:
        cols = [pres.project(zmod.mat_apply(m, lift, v.orders)) for lift in lifts]
        return tuple(tuple(col[i] for col in cols) for i in range(qg.rank))

    ra = tuple(push(m) for m in v.ring_action)
    ga = tuple(push(v.element_action[s]) for s in v.group.generators)
    quot = validate_module(v.ring, v.group, qg.orders, ra, ga, max_order)
    proj = module_map(v, quot, tuple(
        tuple(pres.project(basis_vec(v.rank, j))[i] for j in range(v.rank))
        for i in range(qg.rank)
    ))
    return quot, proj


def submodule_as_module(v: GModule, sub: Subgroup) -> tuple[GModule, ModuleMap]:
    """Present a stable subgroup as a module with its inclusion map.

    The presentation uses the subgroup's cyclic Howell rows as generators;
    coordinates are extracted through the canonical reduction.
    """
    if not is_stable(v, sub):
        raise NotStable("subgroup is not an A[G]-submodule")
    rows = sub.rows
    k = len(rows)
    row_orders = sub.row_orders()
    zg = ZGroup(v.ring.prime, row_orders)

    def coords_of(x: Sequence[int]) -> Vec:
        c = sub.coefficients_of(x)
        if c is None:
            raise NotStable("element escaped the subgroup during presentation")
        return zg.reduce(c)

    def pull(m: Mat) -> Mat:
        cols = [coords_of(zmod.mat_apply(m, row, v.orders)) for row in rows]
        return tuple(tuple(col[i] for col in cols) for i in range(k))

    ra = tuple(pull(m) for m in v.ring_action)
    ga = tuple(pull(v.element_action[s]) for s in v.group.generators)
    w = validate_module(v.ring, v.group, row_orders, ra, ga)
    incl = module_map(w, v, tuple(tuple(rows[j][i] for j in range(k)) for i in range(v.rank)))
    return w, incl


# -- hom modules -----------------------------------------------------------------


def hom_modules(v: GModule, w: GModule) -> list[ModuleMap]:
    """A basis (Howell, canonical) of Hom_{A[G]}(V, W).

    Solved as one linear system: commutation with each ring basis action
    and each generator action, plus the order-respect congruences on the
    matrix entries.
    """
    if v.ring != w.ring:
        raise RingMismatchError("hom requires a common coefficient ring")
    basis = hom_space_basis(v, w)
    return [ModuleMap(v, w, m) for m in basis]


def hom_space_basis(v: GModule, w: GModule) -> list[Mat]:
    nv, nw = v.rank, w.rank
    if nv == 0 or nw == 0:
        return []
    var_orders = tuple(w.orders[r] for r in range(nw) for _ in range(nv))
    var_group = ZGroup(v.ring.prime, var_orders)

    def unknown_index(r: int, c: int) -> int:
        return r * nv + c

    eq_rows: list[list[int]] = []
    eq_orders: list[int] = []
    mats = [(m, v.ring_action[i]) for i, m in enumerate(w.ring_action)]
    mats += [
        (w.element_action[s], v.element_action[s]) for s in v.group.generators
    ]
    for wm, vm in mats:
        # T @ vm == wm @ T, entrywise equations mod w.orders[r]
        for r in range(nw):
            for c in range(nv):
                row = [0] * (nw * nv)
                for j in range(nv):
                    row[unknown_index(r, j)] += vm[j][c]
                for i in range(nw):
                    row[unknown_index(i, c)] -= wm[r][i]
                eq_rows.append([x % w.orders[r] for x in row])
                eq_orders.append(w.orders[r])
    # order respect: v.orders[c] * T[r][c] == 0 mod w.orders[r]
    for r in range(nw):
        for c in range(nv):
            row = [0] * (nw * nv)
            row[unknown_index(r, c)] = v.orders[c] % w.orders[r]
            eq_rows.append(row)
            eq_orders.append(w.orders[r])
    eq_group = ZGroup(v.ring.prime, tuple(eq_orders))
    kern = zmod.kernel_of(eq_rows, eq_group, var_group)
    out = []
    for krow in kern.rows:
        out.append(tuple(tuple(krow[unknown_index(r, c)] for c in range(nv)) for r in range(nw)))
    return out


def hom_count(v: GModule, w: GModule) -> int:
    nv, nw = v.rank, w.rank
    if nv == 0 or nw == 0:
        return 1
    var_orders = tuple(w.orders[r] for r in range(nw) for _ in range(nv))
    var_group = ZGroup(v.ring.prime, var_orders)
    sub = var_group.span([tuple(m[r][c] for r in range(nw) for c in range(nv)) for m in hom_space_basis(v, w)])
    return sub.order


# -- constructions -----------------------------------------------------------------


def restrict(v: GModule, name: str) -> GModule:
    """The same additive group as a module over the named subgroup."""
    sub, embedding = subgroup_as_group(v.group, name)
    ga = tuple(v.element_action[embedding[i]] for i in sub.generators)
    return validate_module(v.ring, sub, v.orders, v.ring_action, ga)


def direct_sum(*mods: GModule, max_order: int | None = None) -> GModule:
    if not mods:
        raise ValueError("direct_sum of nothing")
    ring, group = mods[0].ring, mods[0].group
    for m in mods[1:]:
        if m.ring != ring or m.group.mult != group.mult:
            raise RingMismatchError("summands must share ring and group")
    orders = tuple(o for m in mods for o in m.orders)

    def block(mats: list[Mat]) -> Mat:
        n = sum(len(m) for m in mats)
        out = [[0] * n for _ in range(n)]
        off = 0
        for m in mats:
            for i, row in enumerate(m):
                for j, x in enumerate(row):
                    out[off + i][off + j] = x
            off += len(m)
        return tuple(tuple(r) for r in out)

    ra = tuple(block([m.ring_action[i] for m in mods]) for i in range(ring.rank))
    ga = tuple(
        block([m.element_action[s] for m in mods]) for s in group.generators
    )
    return validate_module(ring, group, orders, ra, ga, max_order)


@dataclass(frozen=True)
class Character:
    """A homomorphism G -> A^× stored as the full value table."""

    ring: FiniteRing
    group: FiniteGroup
    values: tuple[Vec, ...]

    def __call__(self, g: int) -> Vec:
        return self.values[g]

    def mul(self, other: "Character") -> "Character":
        return Character(
            self.ring,
            self.group,
            tuple(self.ring.mul(a, b) for a, b in zip(self.values, other.values)),
        )

    def inv(self) -> "Character":
        return Character(
            self.ring, self.group, tuple(self.ring.inverse(v) for v in self.values)
        )


def character(ring: FiniteRing, group: FiniteGroup, values: Sequence[Sequence[int]]) -> Character:
    vals = tuple(ring.group.reduce(v) for v in values)
    if len(vals) != group.order:
        raise OrderMismatch("a character needs one value per group element")
    if vals[0] != ring.one:
        raise NotStable("character must send 1 to 1", witness=0)
    for g in range(group.order):
        for h in range(group.order):
            if ring.mul(vals[g], vals[h]) != vals[group.op(g, h)]:
                raise NotStable("character is not multiplicative", witness=(g, h))
    for g in range(group.order):
        if not ring.is_unit(vals[g]):
            raise NotStable("character value is not a unit", witness=g)
    return Character(ring, group, vals)


def trivial_character(ring: FiniteRing, group: FiniteGroup) -> Character:
    return Character(ring, group, tuple(ring.one for _ in range(group.order)))


def characters_of(ring: FiniteRing, group: FiniteGroup, max_candidates: int | None = None) -> list[Character]:
    """All characters G -> A^×, by assigning unit values to the generators."""
    units = ring.units()
    gens = group.generators
    cands = len(units) ** len(gens)
    limit = 10**6 if max_candidates is None else max_candidates
    if cands > limit:
        raise SizeLimitExceeded(f"character search space {cands} exceeds {limit}")
    out = []
    for choice in itertools.product(units, repeat=len(gens)):
        tab = _expand_character(ring, group, dict(zip(gens, choice)))
        if tab is not None:
            out.append(Character(ring, group, tab))
    out.sort(key=lambda c: c.values)
    return out


def _expand_character(ring, group, gen_values) -> tuple[Vec, ...] | None:
    values: list[Vec | None] = [None] * group.order
    values[0] = ring.one
    for g in range(group.order):
        acc = ring.one
        for s in group.words[g]:
            acc = ring.mul(acc, gen_values[s])
        values[g] = acc
    for g in range(group.order):
        for h in range(group.order):
            if ring.mul(values[g], values[h]) != values[group.op(g, h)]:
                return None
    return tuple(values)


def module_from_character(chi: Character) -> GModule:
    """Free rank-1 module with G acting through the character."""
    ring = chi.ring
    k = ring.rank
    ra = tuple(ring.mult_matrix(basis_vec(k, i)) for i in range(k))
    ga = tuple(ring.mult_matrix(chi(s)) for s in chi.group.generators)
    return validate_module(ring, chi.group, ring.orders, ra, ga)


def tensor_with_character(v: GModule, chi: Character) -> GModule:
    """Same module with the group action twisted by the character."""
    ga = []
    for s in v.group.generators:
        m = v.element_action[s]
        twist = []
        for basis_col in range(v.rank):
            col = zmod.mat_apply(m, basis_vec(v.rank, basis_col), v.orders)
            twist.append(v.act_ring(chi(s), col))
        ga.append(tuple(tuple(t[i] for t in twist) for i in range(v.rank)))
    return validate_module(v.ring, v.group, v.orders, v.ring_action, tuple(ga))


def trivial_module(ring: FiniteRing, group: FiniteGroup) -> GModule:
    return module_from_character(trivial_character(ring, group))


def regular_module(ring: FiniteRing, group: FiniteGroup, max_order: int | None = None) -> GModule:
    """A[G] as a left module over itself (free of rank |G| over A)."""
    n = group.order
    k = ring.rank
    orders = tuple(ring.orders[i] for _ in range(n) for i in range(k))

    def idx(g: int, i: int) -> int:
        return g * k + i

    rank = n * k
    ra = []
    for i in range(k):
        m = [[0] * rank for _ in range(rank)]
        for g in range(n):
            prod_cols = [ring.mul(basis_vec(k, i), basis_vec(k, j)) for j in range(k)]
            for j in range(k):
                for kk, x in enumerate(prod_cols[j]):
                    m[idx(g, kk)][idx(g, j)] = x
        ra.append(tuple(tuple(r) for r in m))
    ga = []
    for s in group.generators:
        m = [[0] * rank for _ in range(rank)]
        for g in range(n):
            tgt = group.op(s, g)
            for i in range(k):
                m[idx(tgt, i)][idx(g, i)] = 1
        ga.append(tuple(tuple(r) for r in m))
    return validate_module(ring, group, orders, tuple(ra), tuple(ga), max_order)


def zero_module(ring: FiniteRing, group: FiniteGroup) -> GModule:
    return validate_module(ring, group, (), tuple(() for _ in range(ring.rank)),
                           tuple(() for _ in group.generators))


def find_isomorphism(v: GModule, w: GModule, max_order: int | None = None) -> ModuleMap | None:
    """Brute-force search for an invertible A[G]-map (gated by size)."""
    if v.order != w.order:
        return None
    check_order_guard(v.order, max_order)
    for f in _all_homs(v, w):
        if f.is_injective() and f.is_surjective():
            return f
    return None


def _all_homs(v: GModule, w: GModule) -> Iterable[ModuleMap]:
    basis = hom_space_basis(v, w)
    if not basis:
        yield ModuleMap(v, w, tuple(tuple(0 for _ in range(v.rank)) for _ in range(w.rank)))
        return
    var_orders = [w.orders[r] for r in range(w.rank) for _ in range(v.rank)]
    flat = [tuple(m[r][c] for r in range(w.rank) for c in range(v.rank)) for m in basis]
    zg = ZGroup(v.ring.prime, tuple(var_orders))
    for vec in zg.span(flat).elements():
        yield ModuleMap(
            v, w, tuple(tuple(vec[r * v.rank + c] for c in range(v.rank)) for r in range(w.rank))
        )
