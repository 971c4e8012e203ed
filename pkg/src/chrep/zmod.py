"""Exact linear algebra over graded groups ⊕ Z/o_i (o_i prime powers of one p).

A *graded group* is a finite abelian p-group presented as a direct sum of
cyclic groups of given orders.  Every submodule computation is routed
through the Howell form over Z/q, q = max(o_i): the group embeds into
(Z/q)^n by scaling coordinate i with q/o_i, submodules become row spans,
and the Howell form of the scaled rows is a canonical (byte-stable) basis.

Linear systems M x = b are solved in the scaled picture.  The matrix must
respect the additive orders (M[i][j] * o_col(j) == 0 mod o_row(i)); this is
checked and violated entries are reported via OrderMismatch.

Quotients need integer Smith normal form with transforms; matrices here are
small (dozens of rows), so plain Python integers are fine.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

from . import _kernels
from .errors import OrderMismatch

Vec = tuple[int, ...]
Mat = tuple[Vec, ...]


def as_mat(rows: Iterable[Sequence[int]]) -> Mat:
    return tuple(tuple(int(x) for x in row) for row in rows)


def identity_mat(n: int) -> Mat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zero_vec(n: int) -> Vec:
    return (0,) * n


def mat_apply(m: Sequence[Sequence[int]], v: Sequence[int], orders: Sequence[int]) -> Vec:
    """Apply the matrix to a column vector, reducing per-row mod orders."""
    return tuple(
        sum(mi * vi for mi, vi in zip(row, v)) % o for row, o in zip(m, orders)
    )


def reduce_matrix(m: Sequence[Sequence[int]], to_orders: Sequence[int]) -> Mat:
    """Reduce entries per row: entry [i][j] lives mod to_orders[i]."""
    return tuple(
        tuple(int(x) % o for x in row) for row, o in zip(m, to_orders)
    )


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], orders: Sequence[int]) -> Mat:
    """Compose maps (a after b), reducing rows of the result mod orders."""
    if not a:
        return ()
    q = max(orders) if orders else 1
    prod = _kernels.matmul_mod([list(r) for r in a], [list(r) for r in b], q)
    return tuple(
        tuple(x % o for x in row) for row, o in zip(prod, orders)
    )


class ZGroup:
    """⊕ Z/orders[i]; orders are powers of a single prime p (possibly p^0=1)."""

    __slots__ = ("prime", "orders", "q", "_scales")

    def __init__(self, prime: int, orders: Sequence[int]):
        self.prime = prime
        self.orders = tuple(int(o) for o in orders)
        for o in self.orders:
            if o < 1 or not _is_power_of(o, prime):
                raise OrderMismatch(f"order {o} is not a power of {prime}")
        self.q = max(self.orders, default=1)
        self._scales = tuple(self.q // o for o in self.orders)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def order(self) -> int:
        n = 1
        for o in self.orders:
            n *= o
        return n

    def reduce(self, v: Sequence[int]) -> Vec:
        return tuple(int(x) % o for x, o in zip(v, self.orders))

    def zero(self) -> Vec:
        return zero_vec(self.rank)

    def add(self, a: Sequence[int], b: Sequence[int]) -> Vec:
        return tuple((x + y) % o for x, y, o in zip(a, b, self.orders))

    def sub(self, a: Sequence[int], b: Sequence[int]) -> Vec:
        return tuple((x - y) % o for x, y, o in zip(a, b, self.orders))

    def smul(self, c: int, a: Sequence[int]) -> Vec:
        return tuple((c * x) % o for x, o in zip(a, self.orders))

    def neg(self, a: Sequence[int]) -> Vec:
        return tuple((-x) % o for x, o in zip(a, self.orders))

    def elements(self) -> Iterable[Vec]:
        return itertools.product(*(range(o) for o in self.orders))

    def scale_up(self, v: Sequence[int]) -> list[int]:
        return [(x % o) * s for x, o, s in zip(v, self.orders, self._scales)]

    def scale_down(self, row: Sequence[int]) -> Vec:
        return tuple(x // s for x, s in zip(row, self._scales))

    def span(self, vectors: Iterable[Sequence[int]]) -> "Subgroup":
        scaled = [self.scale_up(v) for v in vectors]
        return Subgroup._from_scaled(self, scaled)

    def full(self) -> "Subgroup":
        return self.span(identity_mat(self.rank))

    def zero_subgroup(self) -> "Subgroup":
        return self.span([])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ZGroup)
            and self.prime == other.prime
            and self.orders == other.orders
        )

    def __hash__(self) -> int:
        return hash((self.prime, self.orders))

    def __repr__(self) -> str:
        return f"ZGroup(p={self.prime}, orders={list(self.orders)})"


def _is_power_of(o: int, p: int) -> bool:
    while o % p == 0:
        o //= p
    return o == 1


@dataclass(frozen=True)
class Subgroup:
    """A subgroup in canonical form: Howell basis of the scaled rows.

    ``rows`` are genuine member vectors (module coordinates).  Equal
    subgroups have byte-identical ``rows`` regardless of the generators.
    """

    group: ZGroup
    rows: Mat
    _scaled: Mat = field(repr=False, compare=False)
    _pivots: tuple[int, ...] = field(repr=False, compare=False)

    @staticmethod
    def _from_scaled(group: ZGroup, scaled_rows: list[list[int]]) -> "Subgroup":
        if group.rank == 0 or not scaled_rows:
            return Subgroup(group, (), (), ())
        how, _, _ = _kernels.howell_complete(scaled_rows, group.q)
        pivots = tuple(next(i for i, x in enumerate(row) if x) for row in how)
        rows = tuple(group.scale_down(row) for row in how)
        return Subgroup(group, rows, as_mat(how), pivots)

    @property
    def order(self) -> int:
        n = 1
        for row, p in zip(self._scaled, self._pivots):
            n *= self.group.q // gcd(row[p], self.group.q)
        return n

    def contains(self, v: Sequence[int]) -> bool:
        return not any(self._reduce_scaled(self.group.scale_up(v)))

    def _reduce_scaled(self, w: list[int]) -> list[int]:
        q = self.group.q
        for row, p in zip(self._scaled, self._pivots):
            if w[p]:
                c = w[p] // row[p]
                if c:
                    w = [(x - c * y) % q for x, y in zip(w, row)]
        return w

    def coefficients_of(self, v: Sequence[int]) -> Vec | None:
        """Express v as a combination of the canonical rows, or None."""
        w = self.group.scale_up(v)
        q = self.group.q
        coeffs = []
        for row, p in zip(self._scaled, self._pivots):
            c = w[p] // row[p] if w[p] else 0
            coeffs.append(c)
            if c:
                w = [(x - c * y) % q for x, y in zip(w, row)]
        if any(w):
            return None
        return tuple(coeffs)

    def add_generators(self, vectors: Iterable[Sequence[int]]) -> "Subgroup":
        scaled = [list(r) for r in self._scaled]
        scaled.extend(self.group.scale_up(v) for v in vectors)
        return Subgroup._from_scaled(self.group, scaled)

    def sum(self, other: "Subgroup") -> "Subgroup":
        return self.add_generators(other.rows)

    def intersect(self, other: "Subgroup") -> "Subgroup":
        """Kernel trick: x@A = y@B for stacked kernel of [A; B]."""
        if not self.rows or not other.rows:
            return self.group.zero_subgroup()
        stacked = [list(r) for r in self._scaled] + [list(r) for r in other._scaled]
        _, _, kern = _kernels.howell_complete(stacked, self.group.q)
        na = len(self._scaled)
        gens = []
        for krow in kern:
            comb = [0] * self.group.rank
            for c, row in zip(krow[:na], self._scaled):
                if c:
                    for i, x in enumerate(row):
                        comb[i] = (comb[i] + c * x) % self.group.q
            gens.append(comb)
        return Subgroup._from_scaled(self.group, gens)

    def elements(self) -> Iterable[Vec]:
        """All members (product over cyclic factors of the Howell rows)."""
        if not self.rows:
            yield self.group.zero()
            return
        q = self.group.q
        row_orders = [q // gcd(row[p], q) for row, p in zip(self._scaled, self._pivots)]
        for coeffs in itertools.product(*(range(o) for o in row_orders)):
            acc = [0] * self.group.rank
            for c, row in zip(coeffs, self._scaled):
                if c:
                    for i, x in enumerate(row):
                        acc[i] = (acc[i] + c * x) % q
            yield self.group.scale_down(acc)

    def is_subset_of(self, other: "Subgroup") -> bool:
        return all(other.contains(r) for r in self.rows)

    def row_orders(self) -> tuple[int, ...]:
        """Additive order of each canonical basis row."""
        q = self.group.q
        return tuple(
            q // gcd(r[p], q) for r, p in zip(self._scaled, self._pivots)
        )

    def key(self) -> Mat:
        """Canonical hashable identity of the subgroup."""
        return self.rows

    def __le__(self, other: "Subgroup") -> bool:
        return self.is_subset_of(other)


def check_map_orders(
    m: Sequence[Sequence[int]], to_orders: Sequence[int], from_orders: Sequence[int]
) -> None:
    """A matrix defines a map ⊕Z/from -> ⊕Z/to iff m[i][j]*from[j] == 0 mod to[i]."""
    for i, (row, oi) in enumerate(zip(m, to_orders)):
        for j, (x, oj) in enumerate(zip(row, from_orders)):
            if (x * oj) % oi:
                raise OrderMismatch(
                    f"matrix entry ({i},{j})={x} does not respect orders "
                    f"{oj} -> {oi}",
                    witness=(i, j, x),
                )


@dataclass(frozen=True)
class SolveResult:
    """Solution set of M x = b: one solution plus the kernel subgroup."""

    consistent: bool
    particular: Vec | None
    kernel: Subgroup

    def __iter__(self):
        if not self.consistent:
            return
        dom = self.kernel.group
        for k in self.kernel.elements():
            yield dom.add(self.particular, k)

    def count(self) -> int:
        return self.kernel.order if self.consistent else 0


def solve(
    m: Sequence[Sequence[int]],
    b: Sequence[int],
    to_group: ZGroup,
    from_group: ZGroup,
) -> SolveResult:
    """All x in from_group with M x == b in to_group.

    Scaled to Z/q: each equation row i is multiplied by q/to_orders[i]; the
    unknowns live mod q, and order-respect makes the answer independent of
    lifts, so reducing mod from_orders yields exactly the graded solutions.
    """
    q = max(to_group.q, from_group.q, 1)
    check_map_orders(m, to_group.orders, from_group.orders)
    n = from_group.rank
    if n == 0:
        ok = all(b[i] % to_group.orders[i] == 0 for i in range(to_group.rank))
        return SolveResult(ok, from_group.zero() if ok else None, from_group.full())
    if to_group.rank == 0:
        return SolveResult(True, from_group.zero(), from_group.full())
    # rows of the transposed, scaled system: unknown row-vector x with x @ A = t
    a_rows = []
    for j in range(n):
        a_rows.append(
            [
                ((m[i][j] % to_group.orders[i]) * (q // to_group.orders[i])) % q
                for i in range(to_group.rank)
            ]
        )
    target = [(b[i] % to_group.orders[i]) * (q // to_group.orders[i]) % q for i in range(to_group.rank)]
    how, transform, kern = _kernels.howell_complete(a_rows, q)
    # reduce the target against the Howell rows, tracking coefficients
    w = list(target)
    coeffs = [0] * len(how)
    for idx, row in enumerate(how):
        p = next(i for i, x in enumerate(row) if x)
        if w[p]:
            c = w[p] // row[p]
            if c:
                coeffs[idx] = c
                w = [(x - c * y) % q for x, y in zip(w, row)]
    # order-respect makes from_orders[j]*e_j a Z/q-kernel vector, so reducing
    # the Z/q kernel mod the graded orders loses nothing
    kernel = from_group.span([from_group.reduce(krow) for krow in kern])
    if any(w):
        return SolveResult(False, None, kernel)
    x = [0] * n
    for c, trow in zip(coeffs, transform):
        if c:
            for j in range(n):
                x[j] = (x[j] + c * trow[j]) % q
    return SolveResult(True, from_group.reduce(x), kernel)


def kernel_of(m: Sequence[Sequence[int]], to_group: ZGroup, from_group: ZGroup) -> Subgroup:
    return solve(m, to_group.zero(), to_group, from_group).kernel


def preimage(
    m: Sequence[Sequence[int]],
    to_group: ZGroup,
    from_group: ZGroup,
    target: Subgroup,
) -> Subgroup:
    """{x : M x ∈ target} via solving against target generators jointly."""
    if not target.rows:
        return kernel_of(m, to_group, from_group)
    # unknowns (x, c): M x - sum c_r t_r = 0
    n, r = from_group.rank, len(target.rows)
    big = []
    for i in range(to_group.rank):
        row = list(m[i]) + [(-target.rows[k][i]) % to_group.orders[i] for k in range(r)]
        big.append(row)
    big_from = ZGroup(from_group.prime, tuple(from_group.orders) + (to_group.q,) * r)
    kern = kernel_of(big, to_group, big_from)
    return from_group.span([row[:n] for row in kern.rows])


# -- integer Smith normal form (for quotient presentations) -----------------


def smith_normal_form(rows: list[list[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """U @ rows @ V = D over Z, with U, V unimodular and D diagonal with
    d_1 | d_2 | ...  Returns (D, V, Vinv); the row transform is not needed
    by callers.  Plain cross-reduction; matrices here are small.
    """
    a = [list(map(int, r)) for r in rows]
    nr = len(a)
    nc = len(a[0]) if a else 0
    v = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]
    vinv = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]

    def col_op(j1, j2, c):
        # col j2 += c * col j1 ; update v accordingly, vinv inversely
        for i in range(nr):
            a[i][j2] += c * a[i][j1]
        for i in range(nc):
            v[i][j2] += c * v[i][j1]
        for jj in range(nc):
            vinv[j1][jj] -= c * vinv[j2][jj]

    def col_swap(j1, j2):
        for i in range(nr):
            a[i][j1], a[i][j2] = a[i][j2], a[i][j1]
        for i in range(nc):
            v[i][j1], v[i][j2] = v[i][j2], v[i][j1]
        vinv[j1], vinv[j2] = vinv[j2], vinv[j1]

    def col_negate(j):
        for i in range(nr):
            a[i][j] = -a[i][j]
        for i in range(nc):
            v[i][j] = -v[i][j]
        vinv[j] = [-x for x in vinv[j]]

    def row_op(i1, i2, c):
        for j in range(nc):
            a[i2][j] += c * a[i1][j]

    def row_swap(i1, i2):
        a[i1], a[i2] = a[i2], a[i1]

    t = 0
    while t < min(nr, nc):
        # find a nonzero pivot in the remaining block
        piv = None
        for i in range(t, nr):
            for j in range(t, nc):
                if a[i][j]:
                    if piv is None or abs(a[i][j]) < abs(a[piv[0]][piv[1]]):
                        piv = (i, j)
        if piv is None:
            break
        while True:
            i0, j0 = piv
            if i0 != t:
                row_swap(t, i0)
            if j0 != t:
                col_swap(t, j0)
            done = True
            for i in range(t + 1, nr):
                if a[i][t]:
                    row_op(t, i, -(a[i][t] // a[t][t]))
                    if a[i][t]:
                        done = False
            for j in range(t + 1, nc):
                if a[t][j]:
                    col_op(t, j, -(a[t][j] // a[t][t]))
                    if a[t][j]:
                        done = False
            if done:
                # ensure the pivot divides the rest of the block
                offender = None
                for i in range(t + 1, nr):
                    for j in range(t + 1, nc):
                        if a[i][j] % a[t][t]:
                            offender = i
                            break
                    if offender is not None:
                        break
                if offender is None:
                    break
                row_op(offender, t, 1)
                piv = (t, t)
            else:
                best = None
                for i in range(t, nr):
                    for j in range(t, nc):
                        if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                            best = (i, j)
                piv = best
        if a[t][t] < 0:
            col_negate(t)
        t += 1
    d = [[a[i][j] if i < nr and j < nc else 0 for j in range(nc)] for i in range(nr)]
    return d, v, vinv


@dataclass(frozen=True)
class QuotientPresentation:
    """Presentation of group/relations: a new graded group with projection
    and a section (a set-theoretic right inverse of the projection)."""

    source: ZGroup
    quotient: ZGroup
    # projection matrix (quotient.rank x source.rank): x -> P x
    proj: Mat
    # section matrix (source.rank x quotient.rank): lift classes
    sect: Mat

    def project(self, v: Sequence[int]) -> Vec:
        return mat_apply(self.proj, v, self.quotient.orders)

    def lift(self, y: Sequence[int]) -> Vec:
        return mat_apply(self.sect, y, self.source.orders)


def quotient_by(group: ZGroup, relations: Subgroup) -> QuotientPresentation:
    """Present group/relations as a graded group via integer SNF.

    Relation lattice in Z^n: the subgroup rows plus orders[i]*e_i.
    """
    n = group.rank
    rel = [list(r) for r in relations.rows]
    for i in range(n):
        rel.append([group.orders[i] if j == i else 0 for j in range(n)])
    if n == 0:
        q = ZGroup(group.prime, ())
        return QuotientPresentation(group, q, (), ())
    d, v, vinv = smith_normal_form(rel)
    diag = [d[i][i] if i < len(d) else 0 for i in range(n)]
    keep = [i for i in range(n) if abs(diag[i]) != 1]
    orders = tuple(abs(diag[i]) for i in keep)
    quot = ZGroup(group.prime, orders)
    # row-vector convention: class of x is (x @ V) on kept coords
    proj = tuple(tuple(v[j][i] % orders[k] for j in range(n)) for k, i in enumerate(keep))
    sect = tuple(tuple(vinv[keep[c]][j] % group.orders[j] for c in range(len(keep))) for j in range(n))
    return QuotientPresentation(group, quot, proj, sect)
