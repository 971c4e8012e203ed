"""Finite commutative Z/p^n-algebras presented by structure constants.

A ring is an additive graded group ⊕ Z/p^{n_i} together with a structure
tensor e_i * e_j = Σ_k c[i][j][k] e_k and a distinguished unit vector.
Validation checks the axioms by full enumeration over basis triples.

Everything downstream (modules, algebras, pseudorepresentations) draws its
scalars from here.  The zero ring (empty basis) is a legal value and shows
up as a quotient; operations treat it as carrying the unique empty data.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

from . import zmod
from .errors import (
    BadUnit,
    NotAssociative,
    NotCommutative,
    NotLocal,
    OrderMismatch,
    SizeLimitExceeded,
)
from .zmod import Mat, Subgroup, Vec, ZGroup

DEFAULT_MAX_ORDER = 10**6


def check_order_guard(order: int, max_order: int | None) -> None:
    limit = DEFAULT_MAX_ORDER if max_order is None else max_order
    if order > limit:
        raise SizeLimitExceeded(f"object of order {order} exceeds the bound {limit}")


@dataclass(frozen=True)
class FiniteRing:
    """Commutative ring on basis e_0..e_{k-1}; see module docstring.

    Construct through ``validate_ring`` (or the named constructors below),
    which enforce the invariants; the raw constructor trusts its input.
    """

    prime: int
    orders: tuple[int, ...]
    mul_table: tuple[Mat, ...]  # mul_table[i][j] = coords of e_i * e_j
    one: Vec

    @cached_property
    def group(self) -> ZGroup:
        return ZGroup(self.prime, self.orders)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def is_zero(self) -> bool:
        return self.rank == 0

    # -- element arithmetic on coordinate tuples --------------------------

    def zero(self) -> Vec:
        return (0,) * self.rank

    def add(self, a: Sequence[int], b: Sequence[int]) -> Vec:
        return self.group.add(a, b)

    def sub(self, a: Sequence[int], b: Sequence[int]) -> Vec:
        return self.group.sub(a, b)

    def neg(self, a: Sequence[int]) -> Vec:
        return self.group.neg(a)

    def smul(self, c: int, a: Sequence[int]) -> Vec:
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

    def power(self, a: Sequence[int], n: int) -> Vec:
        result = self.one
        base = tuple(a)
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def from_int(self, n: int) -> Vec:
        return self.smul(n, self.one)

    def elements(self) -> Iterable[Vec]:
        return self.group.elements()

    def mult_matrix(self, a: Sequence[int]) -> Mat:
        """Matrix of x -> a*x in the additive basis (column convention)."""
        cols = [self.mul(a, basis_vec(self.rank, j)) for j in range(self.rank)]
        return tuple(tuple(col[i] for col in cols) for i in range(self.rank))

    def inverse(self, a: Sequence[int]) -> Vec | None:
        if self.is_zero:
            return ()
        res = zmod.solve(self.mult_matrix(a), self.one, self.group, self.group)
        if not res.consistent:
            return None
        return res.particular

    def is_unit(self, a: Sequence[int]) -> bool:
        return self.inverse(a) is not None

    def units(self) -> list[Vec]:
        return [a for a in self.elements() if self.is_unit(a)]

    def describe(self) -> str:
        if self.is_zero:
            return "0"
        return "⊕".join(f"Z/{o}" for o in self.orders)


def basis_vec(rank: int, j: int) -> Vec:
    return tuple(1 if i == j else 0 for i in range(rank))


@dataclass(frozen=True)
class RingElt:
    ring: FiniteRing
    coords: Vec

    def __post_init__(self):
        if len(self.coords) != self.ring.rank:
            raise OrderMismatch("element length does not match the ring rank")
        object.__setattr__(self, "coords", self.ring.group.reduce(self.coords))

    def __add__(self, other: "RingElt") -> "RingElt":
        return RingElt(self.ring, self.ring.add(self.coords, other.coords))

    def __mul__(self, other: "RingElt") -> "RingElt":
        return RingElt(self.ring, self.ring.mul(self.coords, other.coords))

    def __neg__(self) -> "RingElt":
        return RingElt(self.ring, self.ring.neg(self.coords))


def validate_ring(
    prime: int,
    orders: Sequence[int],
    mul_table: Sequence[Sequence[Sequence[int]]],
    one: Sequence[int],
    max_order: int | None = None,
) -> FiniteRing:
    """Check the ring axioms exhaustively on the basis and build the ring.

    Commutativity, associativity, and the unit law are each checked on all
    basis tuples; the structure constants must respect additive orders and
    be reduced.  Errors carry the violating basis tuple as the witness.
    """
    k = len(orders)
    group = ZGroup(prime, orders)
    check_order_guard(group.order, max_order)
    if len(mul_table) != k or any(len(row) != k for row in mul_table):
        raise OrderMismatch("structure tensor shape does not match the basis")
    table = tuple(
        tuple(tuple(int(x) % orders[kk] for kk, x in enumerate(cell)) for cell in row)
        for row in mul_table
    )
    for i in range(k):
        for j in range(k):
            cell = mul_table[i][j]
            if len(cell) != k:
                raise OrderMismatch("structure tensor shape does not match the basis")
            if tuple(int(x) for x in cell) != table[i][j]:
                raise OrderMismatch(
                    f"structure constant c[{i}][{j}] is not reduced", witness=(i, j)
                )
            # e_i e_j must be killed by min(order(e_i), order(e_j))
            ann = min(orders[i], orders[j])
            for kk, x in enumerate(table[i][j]):
                if (x * ann) % orders[kk]:
                    raise OrderMismatch(
                        f"product e_{i}e_{j} has additive order exceeding its factors",
                        witness=(i, j, kk),
                    )
    ring = FiniteRing(prime, tuple(int(o) for o in orders), table, group.reduce(one))
    if k == 0:
        return ring
    if any(ring.one):
        pass
    elif group.order > 1:
        raise BadUnit("unit is zero in a nonzero ring", witness=ring.one)
    for i in range(k):
        e = basis_vec(k, i)
        if ring.mul(ring.one, e) != e or ring.mul(e, ring.one) != e:
            raise BadUnit(f"1*e_{i} != e_{i}", witness=i)
    for i in range(k):
        ei = basis_vec(k, i)
        for j in range(i + 1, k):
            ej = basis_vec(k, j)
            if ring.mul(ei, ej) != ring.mul(ej, ei):
                raise NotCommutative(f"e_{i}e_{j} != e_{j}e_{i}", witness=(i, j))
    for i in range(k):
        ei = basis_vec(k, i)
        for j in range(k):
            ej = basis_vec(k, j)
            left = ring.mul(ei, ej)
            for l in range(k):
                el = basis_vec(k, l)
                if ring.mul(left, el) != ring.mul(ei, ring.mul(ej, el)):
                    raise NotAssociative(
                        f"(e_{i}e_{j})e_{l} != e_{i}(e_{j}e_{l})", witness=(i, j, l)
                    )
    return ring


# -- ideals ------------------------------------------------------------------


@dataclass(frozen=True)
class Ideal:
    """An ideal with its canonical (Howell) additive basis.

    The basis spans the smallest multiplication-closed subgroup containing
    the generators, so equal ideals always carry byte-identical bases.
    """

    ring: FiniteRing
    generators: tuple[Vec, ...]
    subgroup: Subgroup

    @property
    def rows(self) -> Mat:
        return self.subgroup.rows

    @property
    def order(self) -> int:
        return self.subgroup.order

    def contains(self, v: Sequence[int]) -> bool:
        return self.subgroup.contains(v)


def ideal(ring: FiniteRing, generators: Iterable[Sequence[int]]) -> Ideal:
    gens = tuple(ring.group.reduce(g) for g in generators)
    sub = ring.group.span(gens)
    # close under multiplication by basis elements (suffices by linearity)
    while True:
        extra = []
        for row in sub.rows:
            for i in range(ring.rank):
                prod = ring.mul(basis_vec(ring.rank, i), row)
                if not sub.contains(prod):
                    extra.append(prod)
        if not extra:
            break
        sub = sub.add_generators(extra)
    return Ideal(ring, gens, sub)


def principal_ideal(ring: FiniteRing, element: Sequence[int]) -> Ideal:
    return ideal(ring, [element])


def ideal_product(a: Ideal, b: Ideal) -> Ideal:
    ring = a.ring
    return ideal(ring, [ring.mul(x, y) for x in a.rows for y in b.rows])


# -- ring homomorphisms -------------------------------------------------------


@dataclass(frozen=True)
class RingHom:
    source: FiniteRing
    target: FiniteRing
    images: tuple[Vec, ...]  # image of each source basis element

    def __call__(self, v: Sequence[int]) -> Vec:
        acc = self.target.zero()
        for c, img in zip(v, self.images):
            if c:
                acc = self.target.add(acc, self.target.smul(c, img))
        return acc

    def compose(self, inner: "RingHom") -> "RingHom":
        return ring_hom(inner.source, self.target, [self(img) for img in inner.images])

    def matrix(self) -> Mat:
        t = self.target.rank
        return tuple(
            tuple(self.images[j][i] for j in range(self.source.rank)) for i in range(t)
        )

    def kernel(self) -> Ideal:
        sub = zmod.kernel_of(self.matrix(), self.target.group, self.source.group)
        return ideal(self.source, sub.rows)

    def is_surjective(self) -> bool:
        return self.target.group.span(self.images).order == self.target.order


def ring_hom(
    source: FiniteRing, target: FiniteRing, images: Iterable[Sequence[int]]
) -> RingHom:
    imgs = tuple(target.group.reduce(v) for v in images)
    if len(imgs) != source.rank:
        raise OrderMismatch("one image per source basis element required")
    for i, img in enumerate(imgs):
        for kk, x in enumerate(img):
            if (x * source.orders[i]) % target.orders[kk]:
                raise OrderMismatch(
                    f"image of e_{i} has too large additive order", witness=i
                )
    hom = RingHom(source, target, imgs)
    if hom(source.one) != target.one:
        raise BadUnit("homomorphism does not preserve the unit")
    for i in range(source.rank):
        for j in range(i, source.rank):
            lhs = hom(source.mul(basis_vec(source.rank, i), basis_vec(source.rank, j)))
            rhs = target.mul(imgs[i], imgs[j])
            if lhs != rhs:
                raise NotAssociative(
                    f"homomorphism not multiplicative on e_{i}e_{j}", witness=(i, j)
                )
    return hom


def identity_hom(ring: FiniteRing) -> RingHom:
    return RingHom(ring, ring, tuple(basis_vec(ring.rank, i) for i in range(ring.rank)))


# -- quotients ---------------------------------------------------------------


def quotient_ring(ring: FiniteRing, ideal_: Ideal, max_order: int | None = None) -> tuple[FiniteRing, RingHom]:
    """R/I with induced structure constants plus the projection map."""
    pres = zmod.quotient_by(ring.group, ideal_.subgroup)
    quot_group = pres.quotient
    k = quot_group.rank
    lifts = [pres.lift(basis_vec(k, j)) for j in range(k)]
    table = []
    for i in range(k):
        row = []
        for j in range(k):
            row.append(pres.project(ring.mul(lifts[i], lifts[j])))
        table.append(tuple(row))
    one = pres.project(ring.one)
    quot = validate_ring(ring.prime, quot_group.orders, tuple(table), one, max_order)
    proj = ring_hom(ring, quot, [pres.project(basis_vec(ring.rank, i)) for i in range(ring.rank)])
    return quot, proj


# -- scalar extensions --------------------------------------------------------


def extend_scalars(
    ring: FiniteRing, kind: str = "dual_numbers", degree: int = 2, max_order: int | None = None
) -> tuple[FiniteRing, RingHom]:
    """R[t]/(t^N): basis {e_i t^a}; dual numbers are the N=2 case."""
    if kind == "dual_numbers":
        n = 2
    elif kind == "truncated_poly":
        n = degree
        if n < 1:
            raise OrderMismatch("truncation degree must be >= 1")
    else:
        raise ValueError(f"unknown extension kind: {kind}")
    k = ring.rank
    check_order_guard(ring.order**n, max_order)
    orders = tuple(ring.orders[i] for _ in range(n) for i in range(k))
    rank = n * k

    def idx(i: int, a: int) -> int:
        return a * k + i

    zero = (0,) * rank
    table = [[zero] * rank for _ in range(rank)]
    for a in range(n):
        for b in range(n):
            if a + b >= n:
                continue
            for i in range(k):
                for j in range(k):
                    prod = ring.mul_table[i][j]
                    vec = [0] * rank
                    for kk, x in enumerate(prod):
                        vec[idx(kk, a + b)] = x
                    table[idx(i, a)][idx(j, b)] = tuple(vec)
    one = [0] * rank
    for i, x in enumerate(ring.one):
        one[idx(i, 0)] = x
    ext = validate_ring(ring.prime, orders, tuple(tuple(r) for r in table), tuple(one), max_order)
    incl = ring_hom(ring, ext, [basis_vec(rank, idx(i, 0)) for i in range(k)])
    return ext, incl


def t_coefficient(ring: FiniteRing, ext_vec: Sequence[int], a: int) -> Vec:
    """Coefficient of t^a of an element of R[t]/(t^N), as an element of R."""
    k = ring.rank
    return tuple(ext_vec[a * k + i] for i in range(k))


def t_inject(ring: FiniteRing, v: Sequence[int], a: int, n: int) -> Vec:
    k = ring.rank
    out = [0] * (n * k)
    for i, x in enumerate(v):
        out[a * k + i] = x
    return tuple(out)


# -- linear solving over a ring's additive group ------------------------------


def solve_linear(
    m: Sequence[Sequence[int]],
    b: Sequence[int],
    to_orders: Sequence[int],
    from_orders: Sequence[int],
    prime: int,
) -> zmod.SolveResult:
    """All x with M x = b over graded groups; see zmod.solve."""
    return zmod.solve(m, b, ZGroup(prime, to_orders), ZGroup(prime, from_orders))


# -- locality ------------------------------------------------------------------


def is_local(ring: FiniteRing) -> Ideal | None:
    """The unique maximal ideal, or None if the ring is not local.

    Maximal ideals biject with those of R/pR; on that F_p-algebra the
    Frobenius x -> x^p is F_p-linear, the nilradical is its stable kernel,
    and the number of local factors is dim ker(Frob - id) on the semisimple
    quotient.  Locality is exactly one factor.  The maximal ideal is then
    the preimage of the nilradical, which is verified to be an ideal.
    """
    if ring.is_zero:
        return None
    p = ring.prime
    rbar, proj = quotient_ring(ring, ideal(ring, [ring.from_int(p)]))
    k = rbar.rank
    if k == 0:
        return None
    frob = _frobenius_matrix(rbar)
    nil = _stable_kernel(frob, rbar)
    pres = zmod.quotient_by(rbar.group, nil)
    ss_group = pres.quotient
    if ss_group.rank == 0:
        # R/pR is nilpotent mod its radical being everything: impossible for
        # a nonzero unital ring
        return None
    lifts = [pres.lift(basis_vec(ss_group.rank, j)) for j in range(ss_group.rank)]
    frob_ss = tuple(
        tuple(
            pres.project(zmod.mat_apply(frob, lifts[j], rbar.orders))[i]
            for j in range(ss_group.rank)
        )
        for i in range(ss_group.rank)
    )
    fixed = zmod.kernel_of(
        tuple(
            tuple((frob_ss[i][j] - (1 if i == j else 0)) % p for j in range(ss_group.rank))
            for i in range(ss_group.rank)
        ),
        ss_group,
        ss_group,
    )
    n_factors = 0
    order = fixed.order
    while order > 1:
        order //= p
        n_factors += 1
    if n_factors != 1:
        return None
    # maximal ideal: preimage of the nilradical in R
    gens = [_lift_through(proj, row) for row in nil.rows]
    gens.extend(ring.smul(p, basis_vec(ring.rank, i)) for i in range(ring.rank))
    m = ideal(ring, gens)
    for row in m.rows:
        if ring.is_unit(row):
            raise NotLocal("claimed maximal ideal contains a unit", witness=row)
    return m


def _frobenius_matrix(rbar: FiniteRing) -> Mat:
    cols = [rbar.power(basis_vec(rbar.rank, j), rbar.prime) for j in range(rbar.rank)]
    return tuple(tuple(col[i] for col in cols) for i in range(rbar.rank))


def _stable_kernel(m: Mat, rbar: FiniteRing) -> Subgroup:
    g = rbar.group
    power = m
    dim = rbar.rank
    steps = 1
    while (rbar.prime**steps) < dim:
        steps += 1
    for _ in range(steps):
        power = zmod.mat_mul(power, m, g.orders)
    return zmod.kernel_of(power, g, g)


def _lift_through(proj: RingHom, target_vec: Vec) -> Vec:
    res = zmod.solve(proj.matrix(), target_vec, proj.target.group, proj.source.group)
    assert res.consistent
    return res.particular


def nilpotency_index(ring: FiniteRing, m: Ideal) -> int:
    """Smallest i with m^i = 0 (finite local rings only)."""
    i = 1
    power = m
    while power.order > 1:
        power = ideal_product(power, m)
        i += 1
        if i > 64:
            raise NotLocal("ideal does not appear to be nilpotent")
    return i


def residue_field(ring: FiniteRing, m: Ideal) -> tuple[FiniteRing, RingHom]:
    return quotient_ring(ring, m)


# -- standard constructors -----------------------------------------------------


def zmod_ring(prime: int, n: int = 1) -> FiniteRing:
    """Z/p^n with its identity presentation."""
    return validate_ring(prime, (prime**n,), (((1,),),), (1,))


def field_fp(prime: int) -> FiniteRing:
    return zmod_ring(prime, 1)


def dual_numbers(ring: FiniteRing) -> tuple[FiniteRing, RingHom]:
    return extend_scalars(ring, "dual_numbers")


def product_ring(a: FiniteRing, b: FiniteRing) -> FiniteRing:
    """A x B with componentwise operations (used to exercise non-local rings)."""
    if a.prime != b.prime:
        raise OrderMismatch("product requires a single prime")
    ka, kb = a.rank, b.rank
    orders = a.orders + b.orders
    rank = ka + kb
    zero = (0,) * rank
    table = [[zero] * rank for _ in range(rank)]
    for i in range(ka):
        for j in range(ka):
            table[i][j] = tuple(a.mul_table[i][j]) + (0,) * kb
    for i in range(kb):
        for j in range(kb):
            table[ka + i][ka + j] = (0,) * ka + tuple(b.mul_table[i][j])
    one = tuple(a.one) + tuple(b.one)
    return validate_ring(a.prime, orders, tuple(tuple(r) for r in table), one)
