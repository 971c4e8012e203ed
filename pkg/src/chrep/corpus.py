"""Deterministic corpus generation for the verification suites.

Everything is derived from a seed through ``random.Random``; the same
(seed, spec) always produces the same corpus, element for element.  All
constructions go through the validating constructors, so invalid draws are
impossible; GMA pairings are drawn at random and rejection-tested against
the associativity squares, as a deliberate exercise of the validator.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

from . import cohomology as coh
from . import conditions as cnd
from . import gma as gma_mod
from . import groups as grp
from . import modules as mod
from . import pseudorep as ps
from . import rings as rng
from .algebras import matrix_algebra, vec_from_matrix
from .chalg import ChAlgebra, EModule, left_regular_emodule, validate_ch_algebra, validate_emodule
from .errors import AssoComViolation, OrderMismatch, ResidualMismatch
from .rings import FiniteRing, basis_vec
from .zmod import Vec


@dataclass(frozen=True)
class CorpusSpec:
    prime: int = 3
    seed: int = 0
    n_modules: int = 24
    n_gma_reps: int = 36
    n_gmas: int = 56
    max_order: int = 10**6


@dataclass
class BridgeInstance:
    name: str
    rep: gma_mod.GmaRep
    m_mod: mod.GModule
    condition: cnd.Condition
    expect_smaller: bool  # conditioned subspace strictly smaller on both sides


@dataclass
class Corpus:
    spec: CorpusSpec
    rings: dict[str, FiniteRing] = field(default_factory=dict)
    groups: dict[str, grp.FiniteGroup] = field(default_factory=dict)
    modules: list[tuple[str, mod.GModule]] = field(default_factory=list)
    conditions: list[tuple[str, cnd.Condition]] = field(default_factory=list)
    gmas: list[tuple[str, gma_mod.GmaData]] = field(default_factory=list)
    gma_reps: list[tuple[str, gma_mod.GmaRep]] = field(default_factory=list)
    ch_algebras: list[tuple[str, ChAlgebra]] = field(default_factory=list)
    emodules: list[tuple[str, EModule]] = field(default_factory=list)
    bridge_instances: list[BridgeInstance] = field(default_factory=list)
    residue_homs: dict[str, rng.RingHom] = field(default_factory=dict)


def dihedral_of_bicyclic(p: int) -> grp.FiniteGroup:
    """(Z/p x Z/p) ⋊ Z/2 with the involution inverting; subgroup H is the
    first translation factor."""
    pts = list(itertools.product(range(p), range(p)))
    idx = {q: i for i, q in enumerate(pts)}
    t1 = [idx[((a + 1) % p, b)] for (a, b) in pts]
    t2 = [idx[(a, (b + 1) % p)] for (a, b) in pts]
    inv = [idx[((-a) % p, (-b) % p)] for (a, b) in pts]
    g = grp.from_permutations([t1, t2, inv])
    h = grp._span(g.mult, [g.generators[0]])
    g = g.named("H", sorted(h))
    h2 = grp._span(g.mult, [g.generators[1]])
    g = g.named("H2", sorted(h2))
    return g.named("1", [0])


def base_groups(p: int) -> dict[str, grp.FiniteGroup]:
    s3 = grp.symmetric(3).named("1", [0])
    d4 = grp.dihedral(4)
    r2 = d4.op(d4.generators[0], d4.generators[0])
    d4 = d4.named("Z", [0, r2]).named("1", [0])
    cp = grp.cyclic(p).named("G", list(range(p))).named("1", [0])
    c2 = grp.cyclic(2).named("G", [0, 1]).named("1", [0])
    cpp = grp.direct_product(grp.cyclic(p), grp.cyclic(p)).named("1", [0])
    c6 = grp.direct_product(grp.cyclic(2), grp.cyclic(p)).named("1", [0])
    return {
        "c2": c2,
        f"c{p}": cp,
        f"c{p}x{p}": cpp,
        "c2xp": c6,
        "s3": s3,
        "d4": d4,
        "dih_pp": dihedral_of_bicyclic(p),
    }


def base_rings(p: int) -> dict[str, FiniteRing]:
    fp = rng.field_fp(p)
    zp2 = rng.zmod_ring(p, 2)
    fpe = rng.dual_numbers(fp)[0]
    zp2e = rng.dual_numbers(zp2)[0]
    return {"fp": fp, "zp2": zp2, "fpe": fpe, "zp2e": zp2e}


def residue_hom(ring: FiniteRing) -> rng.RingHom:
    """Projection onto the residue field F_p of a local ring."""
    m = rng.is_local(ring)
    assert m is not None, "corpus rings are local"
    field, proj = rng.quotient_ring(ring, m)
    assert field.orders == (ring.prime,)
    return proj


def generate_corpus(spec: CorpusSpec) -> Corpus:
    rnd = random.Random(spec.seed)
    p = spec.prime
    corpus = Corpus(spec)
    corpus.rings = base_rings(p)
    corpus.groups = base_groups(p)
    for name, ring in corpus.rings.items():
        corpus.residue_homs[name] = residue_hom(ring)

    # conditions used throughout: one of each built-in family
    corpus.conditions = [
        ("everything", cnd.Everything()),
        ("exp1", cnd.ExponentAtMost(1)),
    ]
    for gname, g in sorted(corpus.groups.items()):
        for sub, _ in g.subgroups:
            if sub not in ("1",) and g.is_normal(sub):
                corpus.conditions.append(
                    (f"triv_{gname}_{sub}", cnd.TrivialOn(sub))
                )
                corpus.conditions.append(
                    (
                        f"fp_{gname}_{sub}",
                        cnd.FiberProduct(((sub, cnd.TrivialOn(sub)),)),
                    )
                )

    _make_modules(corpus, rnd)
    _make_gmas_and_reps(corpus, rnd)
    _make_ch_algebras(corpus, rnd)
    _make_bridge_instances(corpus)
    return corpus


def _make_modules(corpus: Corpus, rnd: random.Random) -> None:
    p = corpus.spec.prime
    recipes = []
    for gname, g in sorted(corpus.groups.items()):
        if g.order > 9:
            continue
        for rname in ("fp", "zp2", "fpe"):
            ring = corpus.rings[rname]
            chars = mod.characters_of(ring, g)
            recipes.append((f"triv_{rname}_{gname}", mod.trivial_module(ring, g)))
            for i, chi in enumerate(chars[:3]):
                recipes.append(
                    (f"chi{i}_{rname}_{gname}", mod.module_from_character(chi))
                )
            if ring.order ** g.order <= 3**6:
                recipes.append((f"reg_{rname}_{gname}", mod.regular_module(ring, g)))
    rnd.shuffle(recipes)
    seen = set()
    out = []
    for name, v in recipes:
        key = (v.ring, v.group.mult, v.orders, v.element_action)
        if key in seen:
            continue
        seen.add(key)
        out.append((name, v))
    # random direct sums of compatible members for diversity
    extra = []
    for _ in range(8):
        name, v = out[rnd.randrange(len(out))]
        partners = [
            (n2, w)
            for n2, w in out
            if w.ring == v.ring and w.group.mult == v.group.mult
            and w.order * v.order <= 3**6
        ]
        if partners:
            n2, w = partners[rnd.randrange(len(partners))]
            extra.append((f"sum_{name}_{n2}", mod.direct_sum(v, w)))
    out.extend(extra)
    corpus.modules = out[: corpus.spec.n_modules]


def _draw_pairing(
    rnd: random.Random, ring: FiniteRing, b: mod.GModule, c: mod.GModule
) -> gma_mod.GmaData | None:
    """Draw a random pairing matrix and rejection-test the GMA axioms."""
    m = tuple(
        tuple(
            tuple(rnd.randrange(o) for o in ring.orders) for _ in range(c.rank)
        )
        for _ in range(b.rank)
    )
    try:
        return gma_mod.validate_gma(ring, b, c, m)
    except (AssoComViolation, OrderMismatch):
        return None


def _distinct_residual_pair(ring, group, residue):
    """A pair of characters with distinct residual reductions, if one exists."""
    field = residue.target
    chars = mod.characters_of(ring, group)
    res: list[tuple] = []
    for chi in chars:
        red = tuple(residue(chi(g)) for g in range(group.order))
        res.append((chi, red))
    for chi1, r1 in res:
        for chi2, r2 in res:
            if r1 != r2:
                f_chi1 = mod.character(field, group, r1)
                f_chi2 = mod.character(field, group, r2)
                return chi1, chi2, (f_chi1, f_chi2)
    return None


def _make_gmas_and_reps(corpus: Corpus, rnd: random.Random) -> None:
    spec = corpus.spec
    ring_names = ["fp", "zp2", "fpe", "zp2e"]
    # plain GMA data (for the Cayley-Hamilton suite): rings of order <= p^4
    count = 0
    attempts = 0
    while count < spec.n_gmas and attempts < spec.n_gmas * 30:
        attempts += 1
        rname = ring_names[rnd.randrange(len(ring_names))]
        ring = corpus.rings[rname]
        rb = rnd.randrange(3)
        rc = rnd.randrange(3)
        if ring.order ** (2 + rb + rc) > 3**8:
            continue
        b = gma_mod.free_a_module(ring, rb)
        c = gma_mod.free_a_module(ring, rc)
        g = _draw_pairing(rnd, ring, b, c)
        if g is None:
            continue
        corpus.gmas.append((f"gma{count}_{rname}_b{rb}c{rc}", g))
        count += 1

    # GMA representations with distinct residual characters
    group_names = ["c2", "s3", "c2xp", "dih_pp"]
    made = 0
    attempts = 0
    while made < spec.n_gma_reps and attempts < spec.n_gma_reps * 40:
        attempts += 1
        gname = group_names[rnd.randrange(len(group_names))]
        group = corpus.groups[gname]
        rname = ring_names[rnd.randrange(3)]
        ring = corpus.rings[rname]
        residue = corpus.residue_homs[rname]
        found = _distinct_residual_pair(ring, group, residue)
        if found is None:
            continue
        chi1, chi2, residual = found
        style = rnd.randrange(4)
        try:
            rep = _build_rep(corpus, rnd, ring, group, chi1, chi2, residual, residue, style)
        except (AssoComViolation, ResidualMismatch, OrderMismatch):
            rep = None
        if rep is None:
            continue
        corpus.gma_reps.append((f"rep{made}_{rname}_{gname}_s{style}", rep))
        made += 1


def _twisted_classes(ring, group, chi1, chi2, max_order=None):
    m_mod = gma_mod.free_a_module(ring, 1)
    target = coh.chi_tensor(chi1, m_mod)
    return coh.ext1(chi2, target, max_order)


def _build_rep(corpus, rnd, ring, group, chi1, chi2, residual, residue, style):
    p = corpus.spec.prime
    if style == 0:
        # diagonal over a random rejection-sampled pairing
        for _ in range(10):
            rb, rc = rnd.randrange(2), rnd.randrange(2)
            b = gma_mod.free_a_module(ring, rb)
            c = gma_mod.free_a_module(ring, rc)
            g = _draw_pairing(rnd, ring, b, c)
            if g is not None:
                break
        else:
            return None
        gens = [
            g.join(chi1(s), (0,) * g.rank_b, (0,) * g.rank_c, chi2(s))
            for s in group.generators
        ]
        return gma_mod.gma_rep(g, group, gens, residual, residue)
    if style in (1, 2):
        # triangular from a random cocycle class of the twist
        space = _twisted_classes(ring, group, chi1, chi2)
        classes = space.cocycles.classes()
        cls = classes[rnd.randrange(len(classes))]
        table = space.cocycles.representative(cls)
        b = gma_mod.free_a_module(ring, 1)
        c = gma_mod.zero_a_module(ring)
        if style == 2:
            b, c = c, b
        m = tuple(tuple(ring.zero() for _ in range(c.rank)) for _ in range(b.rank))
        g = gma_mod.validate_gma(ring, b, c, m)
        gens = []
        for s in group.generators:
            u = space.cocycles.value(table, s)
            w = ring.mul(chi2(s), u)
            if style == 1:
                gens.append(g.join(chi1(s), w, (), chi2(s)))
            else:
                gens.append(g.join(chi1(s), (), w, chi2(s)))
        return gma_mod.gma_rep(g, group, gens, residual, residue)
    # style 3: a conjugated diagonal matrix representation.  Conjugating a
    # *split* representation keeps the extracted pairing products zero, so
    # the basis stays aligned with the universal idempotents; conjugating a
    # nonsplit triangular would not (the group-coordinate reducibility
    # ideal is basis-dependent), and such bases are deliberately excluded.
    m_loc = rng.is_local(ring)
    assert m_loc is not None
    mrows = list(m_loc.rows) or [ring.zero()]
    x = mrows[rnd.randrange(len(mrows))]
    mats = []
    for s in group.generators:
        # P diag(chi1, chi2) P^{-1} with P = [[1,0],[x,1]]:
        # [[chi1, 0], [x(chi1 - chi2), chi2]]
        mats.append(
            [
                [chi1(s), ring.zero()],
                [ring.mul(x, ring.sub(chi1(s), chi2(s))), chi2(s)],
            ]
        )
    return gma_mod.gma_from_rep(ring, group, mats, residual, residue)


def _make_ch_algebras(corpus: Corpus, rnd: random.Random) -> None:
    p = corpus.spec.prime
    fp = corpus.rings["fp"]
    zp2 = corpus.rings["zp2"]
    d4 = corpus.groups["d4"]
    # full matrix algebras carrying the dihedral representation
    for ring, label in ((fp, "fp"), (zp2, "zp2")):
        m2 = matrix_algebra(ring, 2)
        nege = ring.neg(ring.one)
        r = vec_from_matrix(ring, 2, [[ring.zero(), nege], [ring.one, ring.zero()]])
        s = vec_from_matrix(ring, 2, [[ring.one, ring.zero()], [ring.zero(), nege]])
        ealg = validate_ch_algebra(ring, m2, d4, [r, s], ps.DetBackend(ring, 2), 2)
        corpus.ch_algebras.append((f"m2_{label}_d4", ealg))
        corpus.emodules.append((f"m2_{label}_d4_reg", left_regular_emodule(ealg)))
    # dimension-1 carriers: the ring itself with a character action
    for rname in ("fp", "zp2", "fpe"):
        ring = corpus.rings[rname]
        group = corpus.groups["c2"]
        chars = mod.characters_of(ring, group)
        chi = chars[-1]
        m1 = matrix_algebra(ring, 1)
        ealg = validate_ch_algebra(
            ring, m1, group, [chi(s) for s in group.generators], ps.DetBackend(ring, 1), 1
        )
        corpus.ch_algebras.append((f"dim1_{rname}", ealg))
    # every GMA representation is a Cayley-Hamilton algebra
    for name, rep in corpus.gma_reps:
        corpus.ch_algebras.append((f"ch_{name}", rep.chalg))
    for rname in ("fp", "zp2", "fpe"):
        ealg = dict(corpus.ch_algebras)[f"dim1_{rname}"]
        corpus.emodules.append((f"dim1_{rname}_reg", left_regular_emodule(ealg)))
    # faithful E-modules: left regular modules of the GMA algebras, and the
    # column modules E·e2 of a few of them
    for name, rep in corpus.gma_reps:
        corpus.emodules.append((f"reg_{name}", left_regular_emodule(rep.chalg)))
    for name, rep in corpus.gma_reps[:10]:
        col = _column_emodule(rep)
        if col is not None:
            corpus.emodules.append((f"col_{name}", col))


def _column_emodule(rep: gma_mod.GmaRep) -> EModule | None:
    """The left ideal E·e2 as an E-module (faithful when m is injective in
    the appropriate sense; the annihilator check is run by the consumer)."""
    ealg = rep.chalg
    alg = ealg.algebra
    from .chalg import emodule_from_left_ideal

    return emodule_from_left_ideal(ealg, [rep.gma.e2()])


def _make_bridge_instances(corpus: Corpus) -> None:
    p = corpus.spec.prime
    fp = corpus.rings["fp"]
    idh = rng.identity_hom(fp)
    m_mod = gma_mod.free_a_module(fp, 1)
    combos = []
    for gname, subname in (("s3", "A"), ("dih_pp", "H"), ("dih_pp", "H2"), ("c2xp", "factor2")):
        group = corpus.groups[gname]
        if subname not in dict(group.subgroups):
            continue
        found = _distinct_residual_pair(fp, group, idh)
        if found is None:
            continue
        chi1, chi2, residual = found
        combos.append((gname, subname, group, chi1, chi2, residual))
        combos.append(
            (f"{gname}_swap", subname, group, chi2, chi1, (residual[1], residual[0]))
        )
    for gname, subname, group, chi1, chi2, residual in combos:
        space = _twisted_classes(fp, group, chi1, chi2)
        h1q = space.cocycles.h1.quotient
        if h1q.order == 1:
            continue
        rank = h1q.rank
        b = gma_mod.free_a_module(fp, rank)
        c = gma_mod.zero_a_module(fp)
        g = gma_mod.validate_gma(
            fp, b, c, tuple(() for _ in range(rank))
        )
        tables = [
            space.cocycles.representative(basis_vec(rank, i)) for i in range(rank)
        ]
        gens = []
        for s in group.generators:
            coords: list[int] = []
            for table in tables:
                u = space.cocycles.value(table, s)
                coords.extend(fp.mul(chi2(s), u))
            gens.append(g.join(chi1(s), tuple(coords), (), chi2(s)))
        rep = gma_mod.gma_rep(g, group, gens, residual, idh)
        cond = cnd.FiberProduct(((subname, cnd.TrivialOn(subname)),))
        sub = coh.ext1_with_condition(chi2, space.target, cond)
        corpus.bridge_instances.append(
            BridgeInstance(
                name=f"bridge_{gname}_{subname}",
                rep=rep,
                m_mod=m_mod,
                condition=cond,
                expect_smaller=sub.order < h1q.order,
            )
        )
