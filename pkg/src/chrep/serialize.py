"""Canonical JSON serialization and the session declaration schema.

Canonical form: UTF-8, sorted keys, compact separators, integers only
(no floats anywhere in the formats).  Content hashes and the cache are
built on these bytes, and report determinism is byte-level.

Declared objects are rebuilt through their validating constructors on
load; canonical bases (ideals, submodules) are always recomputed, never
trusted from the file.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

from . import conditions as cond_mod
from . import groups as groups_mod
from . import modules as modules_mod
from . import rings as rings_mod
from .errors import SessionParseError, SessionReferenceError

FORMAT = "chrep-session"
VERSION = 1


def canon_bytes(obj: Any) -> bytes:
    return json.dumps(
        obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True
    ).encode()


def content_hash(obj: Any) -> str:
    return hashlib.sha256(canon_bytes(obj)).hexdigest()


# -- declarations -> objects -------------------------------------------------------


def ring_from_decl(decl: dict, prime: int) -> rings_mod.FiniteRing:
    preset = decl.get("preset")
    if preset == "zmod":
        return rings_mod.zmod_ring(prime, int(decl.get("n", 1)))
    if preset == "field":
        return rings_mod.field_fp(prime)
    if preset == "dual_numbers":
        base = rings_mod.zmod_ring(prime, int(decl.get("n", 1)))
        return rings_mod.dual_numbers(base)[0]
    if preset == "truncated":
        base = rings_mod.zmod_ring(prime, int(decl.get("n", 1)))
        return rings_mod.extend_scalars(base, "truncated_poly", int(decl["degree"]))[0]
    if preset is not None:
        raise SessionParseError(f"unknown ring preset {preset!r}")
    return rings_mod.validate_ring(
        prime, decl["orders"], decl["mul"], decl["one"]
    )


def ring_to_json(r: rings_mod.FiniteRing) -> dict:
    return {
        "orders": list(r.orders),
        "mul": [[list(cell) for cell in row] for row in r.mul_table],
        "one": list(r.one),
    }


def group_from_decl(decl: dict) -> groups_mod.FiniteGroup:
    preset = decl.get("preset")
    subgroups = decl.get("subgroups", {})
    if preset == "cyclic":
        g = groups_mod.cyclic(int(decl["n"]))
    elif preset == "dihedral":
        g = groups_mod.dihedral(int(decl["n"]))
    elif preset == "symmetric":
        g = groups_mod.symmetric(int(decl["n"]))
    elif preset == "product_cyclic":
        g = groups_mod.cyclic(int(decl["ns"][0]))
        for n in decl["ns"][1:]:
            g = groups_mod.direct_product(g, groups_mod.cyclic(int(n)))
    elif "permutations" in decl:
        g = groups_mod.from_permutations(decl["permutations"])
    else:
        g = groups_mod.validate_group(decl["mult"], decl["generators"])
    for name, elems in sorted(subgroups.items()):
        g = g.named(name, [int(x) for x in elems])
    return g


def group_to_json(g: groups_mod.FiniteGroup) -> dict:
    return {
        "mult": [list(r) for r in g.mult],
        "generators": list(g.generators),
        "subgroups": {name: sorted(elems) for name, elems in g.subgroups},
    }


def module_from_decl(
    decl: dict, ring: rings_mod.FiniteRing, group: groups_mod.FiniteGroup
) -> modules_mod.GModule:
    return modules_mod.validate_module(
        ring, group, decl["orders"], decl["ring_action"], decl["group_action"]
    )


def module_to_json(v: modules_mod.GModule) -> dict:
    return {
        "orders": list(v.orders),
        "ring_action": [[list(r) for r in m] for m in v.ring_action],
        "group_action": [
            [list(r) for r in v.element_action[s]] for s in v.group.generators
        ],
    }


def character_from_decl(decl, ring, group) -> modules_mod.Character:
    return modules_mod.character(ring, group, decl["values"])


def character_to_json(chi: modules_mod.Character) -> dict:
    return {"values": [list(v) for v in chi.values]}


def condition_from_json(node: dict) -> cond_mod.Condition:
    t = node.get("type")
    if t == "everything":
        return cond_mod.Everything()
    if t == "trivial_on":
        return cond_mod.TrivialOn(str(node["subgroup"]))
    if t == "exponent_at_most":
        return cond_mod.ExponentAtMost(int(node["k"]))
    if t == "fiber_product":
        return cond_mod.FiberProduct(
            tuple((str(h), condition_from_json(c)) for h, c in node["parts"])
        )
    if t == "plugin":
        return cond_mod.Plugin(
            str(node["name"]), str(node["executable"]),
            bool(node.get("declared_stable", False)),
        )
    raise SessionParseError(f"unknown condition node type {t!r}")


def condition_to_json(c: cond_mod.Condition) -> dict:
    if isinstance(c, cond_mod.Everything):
        return {"type": "everything"}
    if isinstance(c, cond_mod.TrivialOn):
        return {"type": "trivial_on", "subgroup": c.subgroup}
    if isinstance(c, cond_mod.ExponentAtMost):
        return {"type": "exponent_at_most", "k": c.k}
    if isinstance(c, cond_mod.FiberProduct):
        return {
            "type": "fiber_product",
            "parts": [[h, condition_to_json(child)] for h, child in c.parts],
        }
    if isinstance(c, cond_mod.Plugin):
        return {
            "type": "plugin",
            "name": c.name,
            "executable": c.executable,
            "declared_stable": c.declared_stable,
        }
    raise SessionParseError(f"unserializable condition {c!r}")


SESSION_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "chrep session",
    "type": "object",
    "required": ["format", "version", "prime"],
    "properties": {
        "format": {"const": FORMAT},
        "version": {"const": VERSION},
        "prime": {"type": "integer", "minimum": 2},
        "limits": {
            "type": "object",
            "properties": {
                "max_order": {"type": "integer", "minimum": 1},
                "jobs": {"type": "integer", "minimum": 1},
                "allow_p2": {"type": "boolean"},
                "paranoid": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "declarations": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind", "name"],
                "properties": {
                    "kind": {
                        "enum": [
                            "ring", "group", "module", "character",
                            "condition", "gma", "gma_rep", "hom",
                        ]
                    },
                    "name": {"type": "string", "minLength": 1},
                },
            },
        },
        "commands": {
            "type": "array",
            "items": {
                "anyOf": [
                    {"type": "string"},
                    {
                        "type": "object",
                        "required": ["op"],
                        "properties": {
                            "op": {"type": "string"},
                            "args": {"type": "array", "items": {"type": "string"}},
                            "as": {"type": "string"},
                        },
                    },
                ]
            },
        },
    },
}
