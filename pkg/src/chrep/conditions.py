"""Stable conditions on finite A[G]-modules and the maximal-quotient functor.

A condition is an AST: TrivialOn(H) (the action of H is trivial),
FiberProduct (restrictions to subgroups must satisfy child conditions),
ExponentAtMost(k) (p^k kills the module), Everything, or an external
Plugin predicate.  Stability (closure under isomorphism, subquotient, and
finite direct sum) holds by construction for the built-ins; for plugins it
is a user assertion that ``audit_stability`` cross-examines on a corpus.

``max_quotient_with_c`` computes V^C = V/K, K the intersection of all
kernels of C-quotients, by literal enumeration of the submodule lattice.
"""

from __future__ import annotations

import hashlib
import json
import os
import subprocess
import tempfile
import threading
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import zmod
from .errors import NotLocal, PluginFailure, SizeLimitExceeded
from .modules import (
    GModule,
    ModuleMap,
    all_submodules,
    direct_sum,
    module_map,
    quotient_module,
    restrict,
    submodule_as_module,
)
from .rings import Ideal, ideal, is_local, nilpotency_index
from .zmod import Subgroup


class Condition:
    """Base class; subclasses are immutable AST nodes."""

    def describe(self) -> str:
        raise NotImplementedError

    def content_key(self) -> object:
        raise NotImplementedError

    def hash(self) -> str:
        return hashlib.sha256(
            json.dumps(self.content_key(), sort_keys=True).encode()
        ).hexdigest()[:16]


@dataclass(frozen=True)
class Everything(Condition):
    def describe(self) -> str:
        return "everything"

    def content_key(self):
        return ["everything"]


@dataclass(frozen=True)
class TrivialOn(Condition):
    subgroup: str

    def describe(self) -> str:
        return f"trivial-on({self.subgroup})"

    def content_key(self):
        return ["trivial-on", self.subgroup]


@dataclass(frozen=True)
class ExponentAtMost(Condition):
    k: int

    def describe(self) -> str:
        return f"exponent<=p^{self.k}"

    def content_key(self):
        return ["exponent", self.k]


@dataclass(frozen=True)
class FiberProduct(Condition):
    parts: tuple[tuple[str, Condition], ...]

    def describe(self) -> str:
        inner = ", ".join(f"{h}:{c.describe()}" for h, c in self.parts)
        return f"fiber-product({inner})"

    def content_key(self):
        return ["fiber-product", [[h, c.content_key()] for h, c in self.parts]]


@dataclass(frozen=True)
class Plugin(Condition):
    name: str
    executable: str
    declared_stable: bool = False

    def describe(self) -> str:
        return f"plugin({self.name})"

    def content_key(self):
        return ["plugin", self.name, self.executable]


_plugin_cache: dict[str, bool] = {}
_plugin_lock = threading.Lock()
_plugin_inflight: dict[str, threading.Event] = {}


def _serialize_for_plugin(v: GModule) -> bytes:
    # plugins see the underlying Z/p^n[G]-structure only
    payload = {
        "format": "chrep-module",
        "prime": v.ring.prime,
        "orders": list(v.orders),
        "group_mult": [list(r) for r in v.group.mult],
        "group_generators": list(v.group.generators),
        "element_action": [[list(r) for r in m] for m in v.element_action],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def _run_plugin(plug: Plugin, v: GModule) -> bool:
    blob = _serialize_for_plugin(v)
    key = hashlib.sha256(plug.executable.encode() + b"\0" + blob).hexdigest()
    # single-flight: only one evaluation per content key at a time
    while True:
        with _plugin_lock:
            if key in _plugin_cache:
                return _plugin_cache[key]
            ev = _plugin_inflight.get(key)
            if ev is None:
                _plugin_inflight[key] = threading.Event()
                break
        ev.wait()
    try:
        with tempfile.NamedTemporaryFile(suffix=".json", delete=False) as fh:
            fh.write(blob)
            path = fh.name
        try:
            proc = subprocess.run(
                [plug.executable, path], capture_output=True, timeout=60
            )
        finally:
            os.unlink(path)
        if proc.returncode != 0:
            raise PluginFailure(
                f"plugin {plug.name} exited with {proc.returncode}",
                witness=proc.stderr.decode(errors="replace"),
            )
        out = proc.stdout.decode().strip()
        if out not in ("true", "false"):
            raise PluginFailure(
                f"plugin {plug.name} produced malformed output", witness=out
            )
        verdict = out == "true"
        with _plugin_lock:
            _plugin_cache[key] = verdict
        return verdict
    finally:
        with _plugin_lock:
            _plugin_inflight.pop(key).set()


def evaluate(cond: Condition, v: GModule) -> bool:
    """Does the module satisfy the condition?  Pure for the built-ins."""
    if isinstance(cond, Everything):
        return True
    if isinstance(cond, TrivialOn):
        h = v.group.subgroup(cond.subgroup)
        ident = zmod.identity_mat(v.rank)
        return all(v.element_action[g] == ident for g in h)
    if isinstance(cond, ExponentAtMost):
        p = v.ring.prime
        return all((p ** cond.k) % o == 0 for o in v.orders)
    if isinstance(cond, FiberProduct):
        return all(
            evaluate(child, restrict(v, name)) for name, child in cond.parts
        )
    if isinstance(cond, Plugin):
        return _run_plugin(cond, v)
    raise TypeError(f"unknown condition node {cond!r}")


def max_quotient_with_c(
    v: GModule, cond: Condition, max_order: int | None = None
) -> tuple[GModule, ModuleMap]:
    """The largest quotient of V satisfying the condition, with projection.

    K = intersection of the kernels W of quotients V/W in C; only the
    minimal such W (under inclusion) are intersected, which gives the same
    K with fewer intersections.  The zero module always satisfies any
    stable condition, so the result exists (possibly 0).
    """
    subs = all_submodules(v, max_order)
    kernels: list[Subgroup] = []
    for w in subs:
        quot, _ = quotient_module(v, w, max_order)
        if evaluate(cond, quot):
            kernels.append(w)
    minimal = [
        w
        for w in kernels
        if not any(u is not w and u.is_subset_of(w) and u.key() != w.key() for u in kernels)
    ]
    k = v.zgroup.full() if not minimal else minimal[0]
    for w in minimal[1:]:
        k = k.intersect(w)
    return quotient_module(v, k, max_order)


def coinvariants_oracle(
    v: GModule, subgroup_name: str, max_order: int | None = None
) -> tuple[GModule, ModuleMap]:
    """Independent oracle for TrivialOn: quotient by span{(h-1)e_j}."""
    h = v.group.subgroup(subgroup_name)
    gens = []
    for g in h:
        for j in range(v.rank):
            e = tuple(1 if t == j else 0 for t in range(v.rank))
            gens.append(v.zgroup.sub(v.act_group(g, e), e))
    return quotient_module(v, v.zgroup.span(gens), max_order)


@dataclass(frozen=True)
class StabilityFinding:
    kind: str  # "subquotient" | "direct-sum"
    detail: str


@dataclass(frozen=True)
class ConditionReport:
    condition_hash: str
    corpus_hash: str
    verdicts: tuple[bool, ...]
    passed: bool
    finding: StabilityFinding | None


def audit_stability(
    cond: Condition, corpus: Sequence[GModule], max_order: int | None = None
) -> ConditionReport:
    """Falsifier for stability on a corpus: closure of membership under all
    subquotients, and under direct sums of member pairs.  A pass is not a
    proof; the first counterexample is reported."""
    verdicts = tuple(evaluate(cond, v) for v in corpus)
    corpus_hash = hashlib.sha256(
        b"|".join(str(v.orders).encode() for v in corpus)
    ).hexdigest()[:16]
    finding = None
    members = [v for v, ok in zip(corpus, verdicts) if ok]
    for idx, v in enumerate(members):
        subs = all_submodules(v, max_order)
        for w in subs:
            for u in subs:
                if w.key() == u.key() or not w.is_subset_of(u):
                    continue
                mod_u, _ = submodule_as_module(v, u)
                # subquotient u/w presented by pushing w into mod_u
                win = [mod_u.zgroup.reduce(c) for c in _coords_in(u, w)]
                sq, _ = quotient_module(mod_u, mod_u.zgroup.span(win), max_order)
                if not evaluate(cond, sq):
                    finding = StabilityFinding(
                        "subquotient",
                        f"corpus member {idx}: subquotient of orders {sq.orders} escapes",
                    )
                    return ConditionReport(
                        cond.hash(), corpus_hash, verdicts, False, finding
                    )
    for i, a in enumerate(members):
        for b in members[i:]:
            if a.group.mult != b.group.mult or a.ring != b.ring:
                continue
            s = direct_sum(a, b, max_order=max_order)
            if not evaluate(cond, s):
                finding = StabilityFinding(
                    "direct-sum", f"sum of members of orders {a.order},{b.order} escapes"
                )
                return ConditionReport(cond.hash(), corpus_hash, verdicts, False, finding)
    return ConditionReport(cond.hash(), corpus_hash, verdicts, True, None)


def _coords_in(ambient: Subgroup, sub: Subgroup) -> list[tuple[int, ...]]:
    out = []
    for row in sub.rows:
        c = ambient.coefficients_of(row)
        assert c is not None
        out.append(c)
    return out


def has_c_artinian(v: GModule, cond: Condition, max_order: int | None = None) -> bool:
    """Tower test: V/m_A^i V satisfies the condition for every i up to the
    nilpotency index of the maximal ideal.  Requires a local scalar ring."""
    a = v.ring
    if a.is_zero:
        return True
    m = is_local(a)
    if m is None:
        raise NotLocal("coefficient ring is not local")
    n = nilpotency_index(a, m)
    power: Ideal = m
    for i in range(1, n + 1):
        gens = []
        for mu in power.rows:
            for j in range(v.rank):
                gens.append(v.act_ring(mu, tuple(1 if t == j else 0 for t in range(v.rank))))
        mi_v = v.zgroup.span(gens)
        quot, _ = quotient_module(v, mi_v, max_order)
        if not evaluate(cond, quot):
            return False
        if i < n:
            power = ideal(a, [a.mul(x, y) for x in power.rows for y in m.rows])
    return True
