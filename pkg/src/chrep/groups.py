"""Finite groups as multiplication tables, with named subgroups.

Identity is index 0.  The table is validated exhaustively (associativity,
identity, inverses); generators must generate; named subgroups must be
closed.  Groups can also be ingested from permutation generators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import BadGroupLaw


@dataclass(frozen=True)
class FiniteGroup:
    mult: tuple[tuple[int, ...], ...]
    generators: tuple[int, ...]
    subgroups: tuple[tuple[str, frozenset[int]], ...] = ()

    @property
    def order(self) -> int:
        return len(self.mult)

    def op(self, g: int, h: int) -> int:
        return self.mult[g][h]

    @cached_property
    def inverse(self) -> tuple[int, ...]:
        inv = [None] * self.order
        for g in range(self.order):
            for h in range(self.order):
                if self.mult[g][h] == 0:
                    inv[g] = h
                    break
        return tuple(inv)

    @cached_property
    def subgroup_map(self) -> dict[str, frozenset[int]]:
        return dict(self.subgroups)

    def subgroup(self, name: str) -> frozenset[int]:
        try:
            return self.subgroup_map[name]
        except KeyError:
            raise BadGroupLaw(f"no subgroup named {name!r}") from None

    def element_order(self, g: int) -> int:
        n, x = 1, g
        while x != 0:
            x = self.op(x, g)
            n += 1
        return n

    @cached_property
    def words(self) -> tuple[tuple[int, ...], ...]:
        """A generator word for every element, found breadth-first."""
        words: dict[int, tuple[int, ...]] = {0: ()}
        frontier = [0]
        while frontier:
            nxt = []
            for g in frontier:
                for s in self.generators:
                    h = self.op(g, s)
                    if h not in words:
                        words[h] = words[g] + (s,)
                        nxt.append(h)
            frontier = nxt
        if len(words) != self.order:
            raise BadGroupLaw("generators do not generate the group")
        return tuple(words[g] for g in range(self.order))

    def named(self, name: str, elements: Iterable[int]) -> "FiniteGroup":
        elems = frozenset(elements)
        _check_closed(self.mult, elems)
        return FiniteGroup(self.mult, self.generators, self.subgroups + ((name, elems),))

    def is_normal(self, name: str) -> bool:
        h = self.subgroup(name)
        return all(
            self.op(self.op(g, x), self.inverse[g]) in h for g in range(self.order) for x in h
        )

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order}, gens={list(self.generators)})"


def _check_closed(mult, elems: frozenset[int]) -> None:
    if 0 not in elems:
        raise BadGroupLaw("subgroup must contain the identity")
    for a in elems:
        for b in elems:
            if mult[a][b] not in elems:
                raise BadGroupLaw("named subgroup is not closed", witness=(a, b))


def validate_group(
    mult: Sequence[Sequence[int]],
    generators: Sequence[int],
    subgroups: Mapping[str, Iterable[int]] | None = None,
) -> FiniteGroup:
    n = len(mult)
    table = tuple(tuple(int(x) for x in row) for row in mult)
    for g in range(n):
        if table[0][g] != g or table[g][0] != g:
            raise BadGroupLaw("index 0 is not an identity", witness=g)
    for g in range(n):
        if sorted(table[g]) != list(range(n)):
            raise BadGroupLaw("row is not a permutation (no inverses)", witness=g)
        if sorted(table[h][g] for h in range(n)) != list(range(n)):
            raise BadGroupLaw("column is not a permutation", witness=g)
    for g in range(n):
        for h in range(n):
            for k in range(n):
                if table[table[g][h]][k] != table[g][table[h][k]]:
                    raise BadGroupLaw("associativity fails", witness=(g, h, k))
    named = tuple(
        (name, frozenset(int(x) for x in elems)) for name, elems in (subgroups or {}).items()
    )
    for name, elems in named:
        _check_closed(table, elems)
    group = FiniteGroup(table, tuple(int(g) for g in generators), named)
    group.words  # force generation check
    return group


def from_permutations(perms: Sequence[Sequence[int]]) -> FiniteGroup:
    """Close a list of permutations (of 0..m-1) into a group table."""
    m = len(perms[0])
    ident = tuple(range(m))
    gens = [tuple(p) for p in perms]
    elems = {ident: 0}
    order_list = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = tuple(g[s[i]] for i in range(m))
                if h not in elems:
                    elems[h] = len(order_list)
                    order_list.append(h)
                    nxt.append(h)
        frontier = nxt
    n = len(order_list)
    mult = [
        [elems[tuple(a[b[i]] for i in range(m))] for b in order_list] for a in order_list
    ]
    gen_idx = [elems[g] for g in gens]
    return validate_group(mult, gen_idx)


def cyclic(n: int) -> FiniteGroup:
    mult = [[(i + j) % n for j in range(n)] for i in range(n)]
    return validate_group(mult, [1] if n > 1 else [])


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    """A x B; indices sorted with identity first; both factors named."""
    pairs = list(itertools.product(range(a.order), range(b.order)))
    idx = {pq: i for i, pq in enumerate(pairs)}
    mult = [
        [idx[(a.op(p1, p2), b.op(q1, q2))] for (p2, q2) in pairs] for (p1, q1) in pairs
    ]
    gens = [idx[(g, 0)] for g in a.generators] + [idx[(0, h)] for h in b.generators]
    g = validate_group(mult, gens)
    g = g.named("factor1", [idx[(p, 0)] for p in range(a.order)])
    g = g.named("factor2", [idx[(0, q)] for q in range(b.order)])
    return g


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon as permutations of the vertices."""
    rot = [(i + 1) % n for i in range(n)]
    ref = [(-i) % n for i in range(n)]
    g = from_permutations([rot, ref])
    rot_elems = [0]
    cur = 0
    # rotation generator has index of `rot`; accumulate its powers
    r = g.generators[0]
    for _ in range(n - 1):
        cur = g.op(cur, r)
        rot_elems.append(cur)
    return g.named("rotations", rot_elems)


def symmetric(n: int) -> FiniteGroup:
    if n < 2:
        return cyclic(1)
    cycle = [(i + 1) % n for i in range(n)]
    swap = list(range(n))
    swap[0], swap[1] = 1, 0
    g = from_permutations([cycle, swap])
    if n == 3:
        # alternating subgroup = rotations, useful for conditions
        r = g.generators[0]
        g = g.named("A", [0, r, g.op(r, r)])
    return g


def trivial_subgroup_name(g: FiniteGroup) -> FiniteGroup:
    return g.named("1", [0])


def subgroup_as_group(g: FiniteGroup, name: str) -> tuple[FiniteGroup, tuple[int, ...]]:
    """The named subgroup as a standalone group plus the element embedding.

    Named subgroups of the ambient group that are contained in H carry over
    (plus H itself under its own name), so fiber-product conditions can be
    evaluated on restrictions.
    """
    elems = sorted(g.subgroup(name), key=lambda x: (x != 0, x))
    idx = {e: i for i, e in enumerate(elems)}
    mult = [[idx[g.op(a, b)] for b in elems] for a in elems]
    # find generators: accumulate elements greedily until they generate
    gens: list[int] = []
    span = {0}
    for i in range(len(elems)):
        if i in span:
            continue
        gens.append(i)
        span = _span(mult, gens)
        if len(span) == len(elems):
            break
    sub = validate_group(mult, gens)
    carried: dict[str, list[int]] = {name: [idx[e] for e in elems]}
    for other, oelems in g.subgroups:
        if other != name and oelems <= set(elems):
            carried[other] = [idx[e] for e in sorted(oelems)]
    for sname, selems in carried.items():
        sub = sub.named(sname, selems)
    return sub, tuple(elems)


def _span(mult, gens: list[int]) -> set[int]:
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for a in frontier:
            for s in gens:
                b = mult[a][s]
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return seen
