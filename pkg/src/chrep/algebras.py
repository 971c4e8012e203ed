"""Finite (possibly noncommutative) algebras over a FiniteRing.

Same presentation style as the scalar rings: additive graded group plus a
structure tensor and unit, with an explicit central embedding of the
scalar ring.  Supplies matrix algebras M_d(A), two-sided ideals, algebra
quotients with sections, and subalgebra closure of a generating set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from . import zmod
from .errors import NotAssociative, OrderMismatch, RingMismatchError
from .rings import FiniteRing, basis_vec, check_order_guard
from .zmod import Mat, Subgroup, Vec, ZGroup


@dataclass(frozen=True)
class FiniteAlgebra:
    scalars: FiniteRing
    orders: tuple[int, ...]
    mul_table: tuple[Mat, ...]
    one: Vec
    scalar_embed: tuple[Vec, ...]  # image of each scalar basis element

    @cached_property
    def group(self) -> ZGroup:
        return ZGroup(self.scalars.prime, self.orders)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def is_zero(self) -> bool:
        return self.rank == 0

    def zero(self) -> Vec:
        return (0,) * self.rank

    def add(self, a, b) -> Vec:
        return self.group.add(a, b)

    def sub(self, a, b) -> Vec:
        return self.group.sub(a, b)

    def smul(self, c: int, a) -> Vec:
        return self.group.smul(c, a)

    @cached_property
    def _sparse(self) -> tuple[tuple[tuple[tuple[int, int], ...], ...], ...]:
        return tuple(
            tuple(
                tuple((k, x) for k, x in enumerate(cell) if x) for cell in row
            )
            for row in self.mul_table
        )

    def mul(self, a: Sequence[int], b: Sequence[int]) -> Vec:
        acc = [0] * self.rank
        sparse = self._sparse
        for i, ai in enumerate(a):
            if ai:
                ti = sparse[i]
                for j, bj in enumerate(b):
                    if bj:
                        c = ai * bj
                        for k, x in ti[j]:
                            acc[k] += c * x
        return tuple(v % o for v, o in zip(acc, self.orders))

    def scalar(self, a: Sequence[int]) -> Vec:
        """Image of a scalar-ring element in the algebra."""
        acc = [0] * self.rank
        for c, img in zip(a, self.scalar_embed):
            if c:
                for k, x in enumerate(img):
                    acc[k] += c * x
        return self.group.reduce(acc)

    def scalar_mul(self, a: Sequence[int], x: Sequence[int]) -> Vec:
        return self.mul(self.scalar(a), x)

    def power(self, a: Sequence[int], n: int) -> Vec:
        result, base = self.one, tuple(a)
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def elements(self) -> Iterable[Vec]:
        return self.group.elements()

    def left_mult_matrix(self, a: Sequence[int]) -> Mat:
        cols = [self.mul(a, basis_vec(self.rank, j)) for j in range(self.rank)]
        return tuple(tuple(col[i] for col in cols) for i in range(self.rank))

    def right_mult_matrix(self, a: Sequence[int]) -> Mat:
        cols = [self.mul(basis_vec(self.rank, j), a) for j in range(self.rank)]
        return tuple(tuple(col[i] for col in cols) for i in range(self.rank))

    def inverse(self, a: Sequence[int]) -> Vec | None:
        if self.is_zero:
            return ()
        res = zmod.solve(self.left_mult_matrix(a), self.one, self.group, self.group)
        if not res.consistent:
            return None
        inv = res.particular
        # finite rings: a right inverse is two-sided; assert anyway
        if self.mul(inv, a) != self.one:
            return None
        return inv

    def is_unit(self, a: Sequence[int]) -> bool:
        return self.inverse(a) is not None

    def describe(self) -> str:
        return "⊕".join(f"Z/{o}" for o in self.orders) if self.orders else "0"


def validate_algebra(
    scalars: FiniteRing,
    orders: Sequence[int],
    mul_table: Sequence[Sequence[Sequence[int]]],
    one: Sequence[int],
    scalar_embed: Sequence[Sequence[int]],
    max_order: int | None = None,
) -> FiniteAlgebra:
    """Associativity/unit on basis triples, order respect, central scalars."""
    zg = ZGroup(scalars.prime, orders)
    check_order_guard(zg.order, max_order)
    k = zg.rank
    if len(mul_table) != k or any(len(row) != k for row in mul_table):
        raise OrderMismatch("structure tensor shape does not match the basis")
    table = []
    for i in range(k):
        row = []
        for j in range(k):
            cell = tuple(int(x) % orders[t] for t, x in enumerate(mul_table[i][j]))
            ann = min(orders[i], orders[j])
            for t, x in enumerate(cell):
                if (x * ann) % orders[t]:
                    raise OrderMismatch(
                        f"product e_{i}e_{j} violates additive orders", witness=(i, j, t)
                    )
            row.append(cell)
        table.append(tuple(row))
    alg = FiniteAlgebra(
        scalars,
        tuple(int(o) for o in orders),
        tuple(table),
        zg.reduce(one),
        tuple(zg.reduce(v) for v in scalar_embed),
    )
    if k == 0:
        return alg
    for i in range(k):
        e = basis_vec(k, i)
        if alg.mul(alg.one, e) != e or alg.mul(e, alg.one) != e:
            raise OrderMismatch(f"unit law fails on e_{i}", witness=i)
    for i in range(k):
        ei = basis_vec(k, i)
        for j in range(k):
            left = alg.mul(ei, basis_vec(k, j))
            for l in range(k):
                el = basis_vec(k, l)
                if alg.mul(left, el) != alg.mul(ei, alg.mul(basis_vec(k, j), el)):
                    raise NotAssociative(
                        f"(e_{i}e_{j})e_{l} != e_{i}(e_{j}e_{l})", witness=(i, j, l)
                    )
    # scalar embedding: unital ring hom with central image
    if alg.scalar(scalars.one) != alg.one:
        raise OrderMismatch("scalar embedding does not preserve the unit")
    for i in range(scalars.rank):
        si = alg.scalar(basis_vec(scalars.rank, i))
        for j in range(scalars.rank):
            sj = alg.scalar(basis_vec(scalars.rank, j))
            prod = alg.scalar(scalars.mul_table[i][j])
            if alg.mul(si, sj) != prod:
                raise OrderMismatch("scalar embedding is not multiplicative", witness=(i, j))
        for l in range(k):
            el = basis_vec(k, l)
            if alg.mul(si, el) != alg.mul(el, si):
                raise OrderMismatch("scalar image is not central", witness=(i, l))
    return alg


# -- two-sided ideals -----------------------------------------------------------


@dataclass(frozen=True)
class TwoSidedIdeal:
    algebra: FiniteAlgebra
    generators: tuple[Vec, ...]
    subgroup: Subgroup

    @property
    def rows(self) -> Mat:
        return self.subgroup.rows

    @property
    def order(self) -> int:
        return self.subgroup.order

    def contains(self, v) -> bool:
        return self.subgroup.contains(v)


def two_sided_ideal(alg: FiniteAlgebra, generators: Iterable[Sequence[int]]) -> TwoSidedIdeal:
    gens = tuple(alg.group.reduce(g) for g in generators)
    sub = alg.group.span(gens)
    while True:
        extra = []
        for row in sub.rows:
            for i in range(alg.rank):
                e = basis_vec(alg.rank, i)
                for prod in (alg.mul(e, row), alg.mul(row, e)):
                    if not sub.contains(prod):
                        extra.append(prod)
        if not extra:
            break
        sub = sub.add_generators(extra)
    return TwoSidedIdeal(alg, gens, sub)


def is_two_sided(alg: FiniteAlgebra, sub: Subgroup) -> bool:
    for row in sub.rows:
        for i in range(alg.rank):
            e = basis_vec(alg.rank, i)
            if not sub.contains(alg.mul(e, row)) or not sub.contains(alg.mul(row, e)):
                return False
    return True


@dataclass(frozen=True)
class AlgebraQuotient:
    source: FiniteAlgebra
    quotient: FiniteAlgebra
    proj: Mat  # quotient.rank x source.rank
    sect: Mat  # source.rank x quotient.rank

    def project(self, v: Sequence[int]) -> Vec:
        return zmod.mat_apply(self.proj, v, self.quotient.orders)

    def lift(self, y: Sequence[int]) -> Vec:
        return zmod.mat_apply(self.sect, y, self.source.orders)


def quotient_algebra(
    alg: FiniteAlgebra,
    ideal: TwoSidedIdeal,
    new_scalars: FiniteRing | None = None,
    scalar_proj=None,
    max_order: int | None = None,
) -> AlgebraQuotient:
    """E/I with induced structure; scalars may simultaneously change along
    a projection A -> A' (used by Cayley-Hamilton quotients)."""
    scal = new_scalars if new_scalars is not None else alg.scalars
    pres = zmod.quotient_by(alg.group, ideal.subgroup)
    qg = pres.quotient
    k = qg.rank
    lifts = [pres.lift(basis_vec(k, j)) for j in range(k)]
    table = tuple(
        tuple(pres.project(alg.mul(lifts[i], lifts[j])) for j in range(k))
        for i in range(k)
    )
    if scalar_proj is None:
        embed = tuple(pres.project(v) for v in alg.scalar_embed)
    else:
        # images of the new scalar basis: lift through A -> A', embed, project
        embed = []
        for i in range(scal.rank):
            pre = scalar_proj_lift(scalar_proj, basis_vec(scal.rank, i))
            embed.append(pres.project(alg.scalar(pre)))
        embed = tuple(embed)
    quot = validate_algebra(scal, qg.orders, table, pres.project(alg.one), embed, max_order)
    proj = tuple(
        tuple(pres.project(basis_vec(alg.rank, j))[i] for j in range(alg.rank))
        for i in range(k)
    )
    sect = tuple(tuple(lifts[j][i] for j in range(k)) for i in range(alg.rank))
    return AlgebraQuotient(alg, quot, proj, sect)


def scalar_proj_lift(proj_hom, target_vec: Vec) -> Vec:
    res = zmod.solve(
        proj_hom.matrix(), target_vec, proj_hom.target.group, proj_hom.source.group
    )
    assert res.consistent, "scalar projection is not surjective"
    return res.particular


# -- constructions ----------------------------------------------------------------


def matrix_algebra(a: FiniteRing, d: int, max_order: int | None = None) -> FiniteAlgebra:
    """M_d(A): basis E_{rs} ⊗ (A-basis), row-major blocks."""
    k = a.rank
    rank = d * d * k

    def idx(r: int, s: int, i: int) -> int:
        return (r * d + s) * k + i

    orders = tuple(a.orders[i] for _ in range(d * d) for i in range(k))
    zero = (0,) * rank
    table = [[zero] * rank for _ in range(rank)]
    for r in range(d):
        for s in range(d):
            for i in range(k):
                for s2 in range(d):
                    for t in range(d):
                        for j in range(k):
                            if s != s2:
                                continue
                            prod = a.mul_table[i][j]
                            vec = [0] * rank
                            for kk, x in enumerate(prod):
                                vec[idx(r, t, kk)] = x
                            table[idx(r, s, i)][idx(s2, t, j)] = tuple(vec)
    one = [0] * rank
    for r in range(d):
        for i, x in enumerate(a.one):
            one[idx(r, r, i)] = x
    embed = []
    for i in range(k):
        v = [0] * rank
        for r in range(d):
            v[idx(r, r, i)] = 1
        embed.append(tuple(v))
    return validate_algebra(a, orders, tuple(tuple(r) for r in table),
                            tuple(one), tuple(embed), max_order)


def matrix_entry_vec(a: FiniteRing, d: int, r: int, s: int, elt: Sequence[int]) -> Vec:
    """The element elt·E_{rs} of M_d(A) in algebra coordinates."""
    k = a.rank
    out = [0] * (d * d * k)
    for i, x in enumerate(elt):
        out[(r * d + s) * k + i] = x
    return tuple(out)


def matrix_from_vec(a: FiniteRing, d: int, v: Sequence[int]) -> list[list[Vec]]:
    k = a.rank
    return [
        [tuple(v[(r * d + s) * k + i] for i in range(k)) for s in range(d)]
        for r in range(d)
    ]


def vec_from_matrix(a: FiniteRing, d: int, m: Sequence[Sequence[Sequence[int]]]) -> Vec:
    k = a.rank
    out = [0] * (d * d * k)
    for r in range(d):
        for s in range(d):
            for i in range(k):
                out[(r * d + s) * k + i] = m[r][s][i] % a.orders[i]
    return tuple(out)


def commutative_as_algebra(a: FiniteRing) -> FiniteAlgebra:
    """A itself as an A-algebra (dimension-1 carrier)."""
    return validate_algebra(
        a, a.orders, a.mul_table, a.one,
        tuple(basis_vec(a.rank, i) for i in range(a.rank)),
    )


def diagonal_algebra(a: FiniteRing) -> FiniteAlgebra:
    """A x A with coordinatewise operations (the reducible shape)."""
    k = a.rank
    rank = 2 * k
    orders = a.orders + a.orders
    zero = (0,) * rank
    table = [[zero] * rank for _ in range(rank)]
    for blk in (0, 1):
        off = blk * k
        for i in range(k):
            for j in range(k):
                vec = [0] * rank
                for kk, x in enumerate(a.mul_table[i][j]):
                    vec[off + kk] = x
                table[off + i][off + j] = tuple(vec)
    one = tuple(a.one) + tuple(a.one)
    embed = tuple(
        tuple(basis_vec(k, i)) + tuple(basis_vec(k, i)) for i in range(k)
    )
    return validate_algebra(a, orders, tuple(tuple(r) for r in table), one, embed)


def subalgebra_closure(
    alg: FiniteAlgebra, seeds: Sequence[Vec], max_rounds: int = 64
) -> Subgroup:
    """Additive span of all words in the seeds (with 1), i.e. the smallest
    unital subalgebra containing them, as a subgroup of the algebra."""
    sub = alg.group.span([alg.one, *seeds])
    for _ in range(max_rounds):
        extra = []
        for x in sub.rows:
            for y in sub.rows:
                p = alg.mul(x, y)
                if not sub.contains(p):
                    extra.append(p)
        if not extra:
            return sub
        sub = sub.add_generators(extra)
    raise NotAssociative("subalgebra closure did not stabilize")
