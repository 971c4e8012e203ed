"""Pseudorepresentation values: determinant laws, characteristic polynomials,
kernels, reducibility splits, and the dimension-2 census.

A backend evaluates the degree-d law D on elements of E ⊗ A' where A' is a
free truncated extension A[t_1,..]/(t_i^{N_i}) of the scalar ring; such an
element is a map {monomial slot -> E-coordinates}.  Backends:

  * DetBackend      -- E = M_d(A), D = exact determinant (Leibniz sum);
  * GmaFormulaBackend -- E = (A B; C A) of type (1,1), D(a,b,c,d) = ad - m(b⊗c);
  * QuotientBackend -- induced law on a quotient, evaluated through lifts;
  * TraceDet        -- dimension 2, group-algebra carrier, stored as value
                      tables (T, Dt) satisfying the finite identity list.

Characteristic polynomials are computed literally as D_{A[t]}(t - x) over
A[t]/(t^{d+1}); nothing is ever evaluated symbolically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Protocol, Sequence

from .algebras import FiniteAlgebra
from .errors import (
    KernelNotIdeal,
    NotReducible,
    SizeLimitExceeded,
    UnsupportedCarrier,
)
from .groups import FiniteGroup
from .modules import Character, characters_of
from .rings import FiniteRing, RingHom, basis_vec
from .zmod import Mat, Vec

# -- free truncated extensions -------------------------------------------------


@dataclass(frozen=True)
class FreeExt:
    """Monomial slots of A[t_1..t_r]/(t_i^{bounds_i}); slot 0 is 1."""

    bounds: tuple[int, ...]

    @cached_property
    def slots(self) -> tuple[tuple[int, ...], ...]:
        return tuple(itertools.product(*(range(b) for b in self.bounds)))

    @cached_property
    def index(self) -> dict[tuple[int, ...], int]:
        return {m: i for i, m in enumerate(self.slots)}

    def mul_slot(self, i: int, j: int) -> int | None:
        m = tuple(a + b for a, b in zip(self.slots[i], self.slots[j]))
        return self.index.get(m)

    @property
    def n(self) -> int:
        return len(self.slots)


BASE = FreeExt(())  # A itself: a single slot


def ext_zero(ring: FiniteRing, ext: FreeExt) -> tuple[Vec, ...]:
    return tuple(ring.zero() for _ in range(ext.n))


def ext_scalar(ring: FiniteRing, ext: FreeExt, a: Vec) -> tuple[Vec, ...]:
    out = [ring.zero()] * ext.n
    out[0] = tuple(a)
    return tuple(out)


def ext_add(ring: FiniteRing, x, y) -> tuple[Vec, ...]:
    return tuple(ring.add(a, b) for a, b in zip(x, y))


def ext_sub(ring: FiniteRing, x, y) -> tuple[Vec, ...]:
    return tuple(ring.sub(a, b) for a, b in zip(x, y))


def ext_mul(ring: FiniteRing, ext: FreeExt, x, y) -> tuple[Vec, ...]:
    acc = [ring.zero() for _ in range(ext.n)]
    for i, xi in enumerate(x):
        if any(xi):
            for j, yj in enumerate(y):
                if any(yj):
                    k = ext.mul_slot(i, j)
                    if k is not None:
                        acc[k] = ring.add(acc[k], ring.mul(xi, yj))
    return tuple(acc)


def ext_int_mul(ring: FiniteRing, c: int, x) -> tuple[Vec, ...]:
    return tuple(ring.smul(c, a) for a in x)


def ext_one(ring: FiniteRing, ext: FreeExt) -> tuple[Vec, ...]:
    return ext_scalar(ring, ext, ring.one)


# elements of E ⊗ A': one E-coordinate vector per slot
def carrier_zero(rank: int, ext: FreeExt) -> tuple[Vec, ...]:
    return tuple((0,) * rank for _ in range(ext.n))


def carrier_from_base(x: Sequence[int], ext: FreeExt) -> tuple[Vec, ...]:
    out = [(0,) * len(x)] * ext.n
    out[0] = tuple(x)
    return tuple(out)


class DBackend(Protocol):
    ring: FiniteRing
    d: int

    def eval_d(self, ext: FreeExt, blocks: Sequence[Vec]) -> tuple[Vec, ...]:
        """D_{A'}(x) for x in E ⊗ A' given slot-wise; returns an A' element."""
        ...

    def carrier_rank(self) -> int:
        ...


# -- determinant over matrix algebras ---------------------------------------------


@dataclass(frozen=True)
class DetBackend:
    """E = M_d(A) in row-major entry layout; D = determinant."""

    ring: FiniteRing
    d: int

    def carrier_rank(self) -> int:
        return self.d * self.d * self.ring.rank

    def _entry(self, blocks: Sequence[Vec], r: int, s: int) -> tuple[Vec, ...]:
        k = self.ring.rank
        return tuple(
            tuple(blk[(r * self.d + s) * k + i] for i in range(k)) for blk in blocks
        )

    def eval_d(self, ext: FreeExt, blocks: Sequence[Vec]) -> tuple[Vec, ...]:
        ring = self.ring
        acc = ext_zero(ring, ext)
        for perm in itertools.permutations(range(self.d)):
            term = ext_one(ring, ext)
            for r in range(self.d):
                term = ext_mul(ring, ext, term, self._entry(blocks, r, perm[r]))
            if _perm_sign(perm) > 0:
                acc = ext_add(ring, acc, term)
            else:
                acc = ext_sub(ring, acc, term)
        return acc

    def fast_trace(self, x: Sequence[int]) -> Vec:
        k = self.ring.rank
        acc = self.ring.zero()
        for r in range(self.d):
            acc = self.ring.add(
                acc, tuple(x[(r * self.d + r) * k + i] for i in range(k))
            )
        return acc

    def fast_psi(self, x: Sequence[int]) -> Vec:
        ring = self.ring
        k = ring.rank

        def entry(r, s):
            return tuple(x[(r * self.d + s) * k + i] for i in range(k))

        acc = ring.zero()
        for perm in itertools.permutations(range(self.d)):
            term = ring.one
            for r in range(self.d):
                term = ring.mul(term, entry(r, perm[r]))
            acc = ring.add(acc, term) if _perm_sign(perm) > 0 else ring.sub(acc, term)
        return acc


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        ln = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            ln += 1
        if ln % 2 == 0:
            sign = -sign
    return sign


# -- type (1,1) generalized matrix algebra law -------------------------------------


@dataclass(frozen=True)
class GmaFormulaBackend:
    """E = A ⊕ B ⊕ C ⊕ A (type (1,1)); D(a,b,c,d) = ad - m(b⊗c).

    Coordinates: [a: ring.rank | b: rank_b | c: rank_c | d: ring.rank].
    ``m_matrix[i][j]`` is the A-element m(b_i ⊗ c_j); m extends to scalar
    extensions multilinearly with integer coordinate weights.
    """

    ring: FiniteRing
    rank_b: int
    rank_c: int
    m_matrix: tuple[tuple[Vec, ...], ...]
    d: int = 2

    def carrier_rank(self) -> int:
        return 2 * self.ring.rank + self.rank_b + self.rank_c

    def split(self, v: Sequence[int]) -> tuple[Vec, Vec, Vec, Vec]:
        k = self.ring.rank
        a = tuple(v[:k])
        b = tuple(v[k : k + self.rank_b])
        c = tuple(v[k + self.rank_b : k + self.rank_b + self.rank_c])
        dd = tuple(v[k + self.rank_b + self.rank_c :])
        return a, b, c, dd

    def join(self, a: Vec, b: Vec, c: Vec, dd: Vec) -> Vec:
        return tuple(a) + tuple(b) + tuple(c) + tuple(dd)

    def eval_d(self, ext: FreeExt, blocks: Sequence[Vec]) -> tuple[Vec, ...]:
        ring = self.ring
        a_blocks, b_blocks, c_blocks, d_blocks = [], [], [], []
        for blk in blocks:
            a, b, c, dd = self.split(blk)
            a_blocks.append(a)
            b_blocks.append(b)
            c_blocks.append(c)
            d_blocks.append(dd)
        acc = ext_mul(ring, ext, tuple(a_blocks), tuple(d_blocks))
        # subtract sum m_ij * b_i * c_j with integer block coordinates
        for i in range(self.rank_b):
            for j in range(self.rank_c):
                mij = self.m_matrix[i][j]
                if not any(mij):
                    continue
                conv = [ring.zero() for _ in range(ext.n)]
                for s1, bb in enumerate(b_blocks):
                    if bb[i]:
                        for s2, cc in enumerate(c_blocks):
                            if cc[j]:
                                k = ext.mul_slot(s1, s2)
                                if k is not None:
                                    conv[k] = ring.add(
                                        conv[k], ring.smul(bb[i] * cc[j], mij)
                                    )
                acc = ext_sub(ring, acc, tuple(conv))
        return acc

    def fast_trace(self, x: Sequence[int]) -> Vec:
        a, _, _, dd = self.split(x)
        return self.ring.add(a, dd)

    def fast_psi(self, x: Sequence[int]) -> Vec:
        ring = self.ring
        a, b, c, dd = self.split(x)
        acc = ring.mul(a, dd)
        for i in range(self.rank_b):
            if b[i]:
                for j in range(self.rank_c):
                    if c[j]:
                        acc = ring.sub(acc, ring.smul(b[i] * c[j], self.m_matrix[i][j]))
        return acc


# -- induced law on a quotient -------------------------------------------------------


@dataclass(frozen=True)
class QuotientBackend:
    """Law on E' = E/(I,J) over A' = A/J, evaluated through linear sections.

    Well-definedness is not assumed here: the Cayley-Hamilton quotient
    construction verifies it on coset spanning sets before handing out the
    backend.
    """

    parent: "DBackend"
    ring: FiniteRing  # A'
    scalar_proj: RingHom  # A -> A'
    alg_sect: Mat  # lift matrix E' -> E (parent_rank x quotient_rank)
    orders: tuple[int, ...]  # additive orders of the quotient carrier
    parent_orders: tuple[int, ...]
    d: int

    def carrier_rank(self) -> int:
        return len(self.orders)

    def eval_d(self, ext: FreeExt, blocks: Sequence[Vec]) -> tuple[Vec, ...]:
        from . import zmod

        lifted = [
            zmod.mat_apply(self.alg_sect, blk, self.parent_orders) for blk in blocks
        ]
        raw = self.parent.eval_d(ext, lifted)
        return tuple(self.scalar_proj(v) for v in raw)

    def fast_trace(self, x: Sequence[int]) -> Vec | None:
        from . import zmod

        inner = getattr(self.parent, "fast_trace", None)
        if inner is None:
            return None
        lifted = zmod.mat_apply(self.alg_sect, x, self.parent_orders)
        t = inner(lifted)
        if t is None:
            return None
        return self.scalar_proj(t)

    def fast_psi(self, x: Sequence[int]) -> Vec | None:
        from . import zmod

        inner = getattr(self.parent, "fast_psi", None)
        if inner is None:
            return None
        lifted = zmod.mat_apply(self.alg_sect, x, self.parent_orders)
        v = inner(lifted)
        if v is None:
            return None
        return self.scalar_proj(v)


# -- derived values ------------------------------------------------------------------


@dataclass(frozen=True)
class CharPoly:
    """chi(x,t) = t^d - L1 t^{d-1} + ... + (-1)^d Ld; lambdas = (1, L1, .., Ld)."""

    ring: FiniteRing
    lambdas: tuple[Vec, ...]

    @property
    def dimension(self) -> int:
        return len(self.lambdas) - 1

    @property
    def trace(self) -> Vec:
        return self.lambdas[1]

    @property
    def det(self) -> Vec:
        return self.lambdas[-1]


def psi_eval(backend: DBackend, x: Sequence[int]) -> Vec:
    """D(x) for x in the algebra carrier (base scalars)."""
    fast = getattr(backend, "fast_psi", None)
    if fast is not None:
        v = fast(x)
        if v is not None:
            return v
    return backend.eval_d(BASE, (tuple(x),))[0]


def psi_eval_ext(backend: DBackend, ext: FreeExt, blocks: Sequence[Vec]) -> tuple[Vec, ...]:
    return backend.eval_d(ext, blocks)


def char_poly(backend: DBackend, x: Sequence[int], one: Sequence[int]) -> CharPoly:
    """D_{A[t]}(t - x) over A[t]/(t^{d+1}), read off coefficient-wise."""
    d = backend.d
    if d == 2:
        fast = getattr(backend, "fast_trace", None)
        tr = fast(x) if fast is not None else None
        if tr is not None:
            return CharPoly(backend.ring, (backend.ring.one, tr, psi_eval(backend, x)))
    ext = FreeExt((d + 1,))
    rank = len(x)
    neg_x = tuple(-v for v in x)
    blk = [neg_x, tuple(one)] + [(0,) * rank] * (d - 1)
    coeffs = backend.eval_d(ext, blk)
    ring = backend.ring
    lambdas = [ring.one]
    for j in range(1, d + 1):
        sign = -1 if j % 2 else 1
        lambdas.append(ring.smul(sign, coeffs[d - j]))
    return CharPoly(ring, tuple(lambdas))


def trace(backend: DBackend, x: Sequence[int], one: Sequence[int]) -> Vec:
    return char_poly(backend, x, one).trace


def ch_residual(
    alg: FiniteAlgebra, backend: DBackend, x: Sequence[int]
) -> Vec:
    """chi(x)(x) evaluated in the algebra; zero iff x satisfies its own
    characteristic polynomial."""
    if backend.d == 2:
        fast = getattr(backend, "fast_trace", None)
        tr = fast(x) if fast is not None else None
        if tr is not None:
            xx = tuple(x)
            res = alg.sub(alg.mul(xx, xx), alg.scalar_mul(tr, xx))
            return alg.add(res, alg.scalar_mul(psi_eval(backend, xx), alg.one))
    cp = char_poly(backend, x, alg.one)
    acc = alg.zero()
    power = alg.one
    # sum_{j=0..d} (-1)^j L_j x^{d-j}, built from x^0 upwards
    for j in range(cp.dimension, -1, -1):
        sign = -1 if j % 2 else 1
        term = alg.scalar_mul(cp.lambdas[j], power)
        acc = alg.add(acc, alg.smul(sign, term))
        power = alg.mul(power, tuple(x))
    return acc


def kernel_of_pseudorep(alg: FiniteAlgebra, backend: DBackend, max_order: int | None = None) -> list[Vec]:
    """{x : D(1 - xyt) = 1 for all y}, by exhaustive double loop.

    Verified to be a two-sided ideal before returning (KernelNotIdeal
    signals a broken backend).  D(1-zt) is evaluated over A[t]/(t^{d+1}),
    which is exact since D has degree d.
    """
    from .rings import check_order_guard

    check_order_guard(alg.order * alg.order, max_order)
    ext = FreeExt((backend.d + 1,))
    one_ext = ext_one(alg.scalars, ext)
    members = []
    elems = list(alg.elements())
    for x in elems:
        ok = True
        for y in elems:
            z = alg.mul(x, y)
            blk = [tuple(alg.one)] + [alg.group.neg(z)] + [alg.zero()] * (backend.d - 1)
            if backend.eval_d(ext, blk) != one_ext:
                ok = False
                break
        if ok:
            members.append(x)
    member_set = set(members)
    for x in members:
        for i in range(alg.rank):
            e = basis_vec(alg.rank, i)
            if alg.mul(e, x) not in member_set or alg.mul(x, e) not in member_set:
                raise KernelNotIdeal(
                    "kernel is not a two-sided ideal", witness=(x, i)
                )
        for y in members:
            if alg.add(x, y) not in member_set:
                raise KernelNotIdeal("kernel is not additively closed", witness=(x, y))
    sub = alg.group.span(members)
    return [tuple(r) for r in sub.rows]


# -- dimension-2 trace/determinant pairs ----------------------------------------------


@dataclass(frozen=True)
class TraceDet:
    """A 2-dimensional pseudorepresentation of G as value tables.

    The stored identities (checked by ``verify_dim2_law``) are the finite
    dimension-2 axiomatization: T(1)=2, Dt(1)=1, Dt multiplicative, T
    central, and T(g)T(h) = T(gh) + Dt(h) T(gh^{-1}).
    """

    ring: FiniteRing
    group: FiniteGroup
    t_values: tuple[Vec, ...]
    dt_values: tuple[Vec, ...]

    d: int = 2

    def key(self) -> tuple:
        return (self.t_values, self.dt_values)


def verify_dim2_law(
    ring: FiniteRing, group: FiniteGroup, t: Sequence[Vec], dt: Sequence[Vec]
) -> tuple[bool, tuple | None]:
    """Exhaustive identity check; returns (ok, first_failure_witness)."""
    n = group.order
    if tuple(t[0]) != ring.from_int(2):
        return False, ("T(1)=2", 0)
    if tuple(dt[0]) != ring.one:
        return False, ("Dt(1)=1", 0)
    for g in range(n):
        for h in range(n):
            if ring.mul(dt[g], dt[h]) != tuple(dt[group.op(g, h)]):
                return False, ("Dt multiplicative", (g, h))
            if tuple(t[group.op(g, h)]) != tuple(t[group.op(h, g)]):
                return False, ("T central", (g, h))
            lhs = ring.mul(t[g], t[h])
            rhs = ring.add(
                t[group.op(g, h)],
                ring.mul(dt[h], t[group.op(g, group.inverse[h])]),
            )
            if lhs != rhs:
                return False, ("T(g)T(h)=T(gh)+Dt(h)T(gh^-1)", (g, h))
    return True, None


def trace_det(ring, group, t_values, dt_values) -> TraceDet:
    t = tuple(ring.group.reduce(v) for v in t_values)
    dt = tuple(ring.group.reduce(v) for v in dt_values)
    ok, witness = verify_dim2_law(ring, group, t, dt)
    if not ok:
        raise UnsupportedCarrier(f"dimension-2 identities fail: {witness}", witness=witness)
    return TraceDet(ring, group, t, dt)


def trace_det_psi(
    td: TraceDet, ext: FreeExt, coeffs: Mapping[int, tuple[Vec, ...]]
) -> tuple[Vec, ...]:
    """D(sum x_g g) over an extension, x_g given slot-wise, via the standard
    degree-2 expansion: sum x_g^2 Dt(g) + sum_{g<h} x_g x_h (T(g)T(h)-T(gh))."""
    ring = td.ring
    acc = ext_zero(ring, ext)
    support = sorted(coeffs)
    for g in support:
        xg = coeffs[g]
        term = ext_mul(ring, ext, xg, xg)
        term = ext_mul(ring, ext, term, ext_scalar(ring, ext, td.dt_values[g]))
        acc = ext_add(ring, acc, term)
    for i, g in enumerate(support):
        for h in support[i + 1 :]:
            lam = ring.sub(
                ring.mul(td.t_values[g], td.t_values[h]),
                td.t_values[td.group.op(g, h)],
            )
            term = ext_mul(ring, ext, coeffs[g], coeffs[h])
            term = ext_mul(ring, ext, term, ext_scalar(ring, ext, lam))
            acc = ext_add(ring, acc, term)
    return acc


def trace_det_char_poly(td: TraceDet, coeffs: Mapping[int, Vec]) -> CharPoly:
    """chi of a group-algebra element: D(t - x) over A[t]/(t^3)."""
    ring = td.ring
    ext = FreeExt((3,))
    slots: dict[int, tuple[Vec, ...]] = {}
    for g, v in coeffs.items():
        slots[g] = (ring.neg(v), ring.zero(), ring.zero())
    ident = slots.get(0, (ring.zero(),) * 3)
    slots[0] = (ident[0], ring.one, ring.zero())
    out = trace_det_psi(td, ext, slots)
    return CharPoly(ring, (ring.one, ring.neg(out[1]), out[0]))


def trace_det_from_characters(chi1: Character, chi2: Character) -> TraceDet:
    ring, group = chi1.ring, chi1.group
    t = tuple(ring.add(chi1(g), chi2(g)) for g in range(group.order))
    dt = tuple(ring.mul(chi1(g), chi2(g)) for g in range(group.order))
    return trace_det(ring, group, t, dt)


# -- reducibility ---------------------------------------------------------------------


def character_lifts(
    ring: FiniteRing,
    group: FiniteGroup,
    residual: Character,
    proj: RingHom,
    max_candidates: int | None = None,
) -> list[Character]:
    """Characters G -> A^× reducing to the residual character through proj."""
    out = []
    for chi in characters_of(ring, group, max_candidates):
        if all(proj(chi(g)) == residual(g) for g in range(group.order)):
            out.append(chi)
    return out


def find_reducible_split(
    td: TraceDet,
    residual: tuple[Character, Character],
    proj: RingHom,
    max_candidates: int | None = None,
) -> tuple[tuple[Character, Character], bool] | None:
    """Brute-force search for characters with T = chi1+chi2, Dt = chi1 chi2.

    Returns (ordered pair, unique_flag) or None.  When the residual
    characters are distinct the ordered pair is unique; for equal residual
    characters all witnesses are scanned and uniqueness reported honestly.
    """
    splits = find_all_reducible_splits(td, residual, proj, max_candidates)
    if not splits:
        return None
    return splits[0], len(splits) == 1


def find_all_reducible_splits(
    td: TraceDet,
    residual: tuple[Character, Character],
    proj: RingHom,
    max_candidates: int | None = None,
) -> list[tuple[Character, Character]]:
    ring, group = td.ring, td.group
    lifts1 = character_lifts(ring, group, residual[0], proj, max_candidates)
    lifts2 = character_lifts(ring, group, residual[1], proj, max_candidates)
    found = []
    for c1 in lifts1:
        for c2 in lifts2:
            if all(
                ring.add(c1(g), c2(g)) == td.t_values[g]
                and ring.mul(c1(g), c2(g)) == td.dt_values[g]
                for g in range(group.order)
            ):
                found.append((c1, c2))
    return found


# -- the dimension-2 census ------------------------------------------------------------


@dataclass(frozen=True)
class CensusReport:
    members: tuple[TraceDet, ...]
    p2_axiomatization_relative: bool
    free_positions: tuple[int, ...]


def enumerate_psdef_dim2(
    group: FiniteGroup,
    ring: FiniteRing,
    residual: tuple[Character, Character],
    proj: RingHom,
    allow_p2: bool = False,
    max_candidates: int | None = None,
) -> CensusReport:
    """All (T, Dt) pairs deforming the residual data and passing the
    dimension-2 identities.

    Dt ranges over character lifts of the residual product; T is grown by
    constraint propagation (T(gh) = T(g)T(h) - Dt(h)T(gh^{-1}), centrality)
    from free values chosen when propagation stalls, then every candidate
    is re-verified against the full identity list and deduplicated.
    """
    if ring.prime == 2 and not allow_p2:
        raise UnsupportedCarrier(
            "p=2 census refused: the dimension-2 identity list is "
            "axiomatization-relative at p=2 (pass allow_p2 to override)"
        )
    chi1_bar, chi2_bar = residual
    res_field = proj.target
    t_residual = tuple(
        res_field.add(chi1_bar(g), chi2_bar(g)) for g in range(group.order)
    )
    dt_residual_char = Character(
        res_field, group,
        tuple(res_field.mul(chi1_bar(g), chi2_bar(g)) for g in range(group.order)),
    )
    dt_candidates = character_lifts(ring, group, dt_residual_char, proj, max_candidates)
    # fibers of proj: lifts of each residual value
    ker_elems = [
        v for v in ring.elements() if proj(v) == res_field.zero()
    ]
    limit = 10**6 if max_candidates is None else max_candidates

    members: dict[tuple, TraceDet] = {}
    free_used: set[int] = set()
    n = group.order
    for dt in dt_candidates:
        dt_vals = dt.values
        base: list[Vec | None] = [None] * n
        base[0] = ring.from_int(2)
        stack = [base]
        while stack:
            values = stack.pop()
            values, ok = _propagate_t(ring, group, values, dt_vals)
            if not ok:
                continue
            hole = next((g for g in range(n) if values[g] is None), None)
            if hole is None:
                t_tab = tuple(values)  # type: ignore[arg-type]
                if any(proj(t_tab[g]) != t_residual[g] for g in range(n)):
                    continue
                good, _ = verify_dim2_law(ring, group, t_tab, dt_vals)
                if good:
                    td = TraceDet(ring, group, t_tab, dt_vals)
                    members.setdefault(td.key(), td)
                continue
            free_used.add(hole)
            lift0 = _any_lift(ring, proj, t_residual[hole])
            if len(members) + len(stack) > limit:
                raise SizeLimitExceeded("census search exceeded the guard")
            for k in ker_elems:
                nxt = list(values)
                nxt[hole] = ring.add(lift0, k)
                stack.append(nxt)
    ordered = sorted(members.values(), key=lambda td: td.key())
    return CensusReport(tuple(ordered), ring.prime == 2, tuple(sorted(free_used)))


def _any_lift(ring: FiniteRing, proj: RingHom, target: Vec) -> Vec:
    from . import zmod

    res = zmod.solve(proj.matrix(), target, proj.target.group, proj.source.group)
    if not res.consistent:
        raise UnsupportedCarrier("residual value has no lift")
    return res.particular


def _propagate_t(ring, group, values, dt_vals):
    """Fill T values forced by the identities; detect contradictions."""
    vals = list(values)
    n = group.order
    changed = True
    while changed:
        changed = False
        for g in range(n):
            if vals[g] is None:
                continue
            for h in range(n):
                if vals[h] is None:
                    continue
                gh = group.op(g, h)
                ghinv = group.op(g, group.inverse[h])
                hg = group.op(h, g)
                # centrality transfer
                if vals[gh] is not None and vals[hg] is None:
                    vals[hg] = vals[gh]
                    changed = True
                if vals[ghinv] is not None:
                    forced = ring.sub(
                        ring.mul(vals[g], vals[h]),
                        ring.mul(dt_vals[h], vals[ghinv]),
                    )
                    if vals[gh] is None:
                        vals[gh] = forced
                        changed = True
                    elif vals[gh] != forced:
                        return vals, False
    return vals, True
