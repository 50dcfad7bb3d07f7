"""JSON codecs for mixtures, rules, mechanisms, reaction sequences and OGs.

Writers emit sorted keys, two-space indentation, arrays sorted by id and a
trailing LF, so equal objects always serialize to identical bytes.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from ..chemgraph import Atom, Bond, GraphError, Mixture, pair
from ..dpo import InconsistentDeltaError, Mechanism, Rule, RuleError, StepDelta


class DocumentError(ValueError):
    pass


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_json(path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def save_json(doc: Any, path) -> None:
    Path(path).write_bytes(dumps(doc).encode("utf-8"))


def _require(doc, key, kind=list):
    if not isinstance(doc, dict) or key not in doc:
        raise DocumentError(f"missing field {key!r}")
    val = doc[key]
    if not isinstance(val, kind):
        raise DocumentError(f"field {key!r} has the wrong type")
    return val


def _int(v, what):
    if isinstance(v, bool) or not isinstance(v, int):
        raise DocumentError(f"{what} must be an integer, got {v!r}")
    return v


# -- mixtures -----------------------------------------------------------------

def mixture_to_doc(g: Mixture) -> dict:
    return {
        "vertices": [{"id": a.id, "element": a.element, "charge": a.charge} for a in g.atoms],
        "edges": [{"src": b.src, "dst": b.dst, "order": b.order} for b in g.bonds],
    }


def read_mixture(doc: dict) -> Mixture:
    try:
        atoms = [Atom(_int(v["id"], "vertex id"), v["element"], _int(v.get("charge", 0), "charge"))
                 for v in _require(doc, "vertices")]
        bonds = [Bond(_int(e["src"], "src"), _int(e["dst"], "dst"), _int(e["order"], "order"))
                 for e in _require(doc, "edges")]
    except KeyError as exc:
        raise DocumentError(f"missing field {exc.args[0]!r}") from None
    except TypeError:
        raise DocumentError("malformed mixture document") from None
    return Mixture(atoms, bonds)


def write_mixture(g: Mixture) -> str:
    return dumps(mixture_to_doc(g))


# -- rules --------------------------------------------------------------------

def _pair_list(pairs) -> list[list[int]]:
    return [list(p) for p in sorted(pairs)]


def rule_to_doc(rule: Rule, substrate: bool = False) -> dict:
    doc = {
        "left": mixture_to_doc(rule.left),
        "right": mixture_to_doc(rule.right),
        "context_atoms": sorted(rule.context_atoms),
        "context_bonds": _pair_list(rule.context_bonds),
        "nonbond_left": _pair_list(rule.nonbond_left),
        "nonbond_right": _pair_list(rule.nonbond_right),
    }
    if substrate:
        doc["created_atoms"] = sorted(rule.created_atoms)
        doc["deleted_atoms"] = sorted(rule.deleted_atoms)
    return doc


def _read_pairs(doc, key) -> frozenset:
    out = set()
    for item in doc.get(key, []):
        if not isinstance(item, list) or len(item) != 2:
            raise DocumentError(f"{key} entries must be [a, b] pairs")
        out.add(pair(_int(item[0], key), _int(item[1], key)))
    return frozenset(out)


def read_rule(doc: dict) -> Rule:
    left = read_mixture(_require(doc, "left", dict))
    right = read_mixture(_require(doc, "right", dict))
    try:
        rule = Rule(left, right, frozenset(_int(v, "context atom") for v in doc.get("context_atoms", [])),
                    _read_pairs(doc, "context_bonds"), _read_pairs(doc, "nonbond_left"),
                    _read_pairs(doc, "nonbond_right"))
    except RuleError as exc:
        raise DocumentError(str(exc)) from None
    for key, derived in (("created_atoms", rule.created_atoms), ("deleted_atoms", rule.deleted_atoms)):
        if key in doc and frozenset(doc[key]) != derived:
            raise DocumentError(f"{key} disagrees with the rule sides")
    return rule


def write_rule(rule: Rule, substrate: bool | None = None) -> str:
    if substrate is None:
        substrate = bool(rule.created_atoms or rule.deleted_atoms)
    return dumps(rule_to_doc(rule, substrate))


# -- mechanisms ---------------------------------------------------------------

def delta_to_doc(delta: StepDelta) -> dict:
    return {
        "bond_changes": [{"src": s, "dst": d, "from": a, "to": b}
                         for s, d, a, b in sorted(delta.bond_changes)],
        "charge_changes": [{"id": v, "from": a, "to": b} for v, a, b in sorted(delta.charge_changes)],
    }


def read_delta(doc: dict) -> StepDelta:
    try:
        bonds = tuple((_int(c["src"], "src"), _int(c["dst"], "dst"), _int(c["from"], "from"),
                       _int(c["to"], "to")) for c in doc.get("bond_changes", []))
        charges = tuple((_int(c["id"], "id"), _int(c["from"], "from"), _int(c["to"], "to"))
                        for c in doc.get("charge_changes", []))
    except KeyError as exc:
        raise DocumentError(f"missing field {exc.args[0]!r} in step") from None
    return StepDelta(bonds, charges)


def mechanism_to_doc(m: Mechanism) -> dict:
    return {"educts": mixture_to_doc(m.educts), "steps": [delta_to_doc(d) for d in m.deltas()]}


def read_mechanism(doc: dict) -> Mechanism:
    educts = read_mixture(_require(doc, "educts", dict))
    steps = [read_delta(s) for s in _require(doc, "steps")]
    return Mechanism.from_deltas(educts, steps)


def write_mechanism(m: Mechanism) -> str:
    return dumps(mechanism_to_doc(m))


# -- reaction sequences -------------------------------------------------------

def sequence_to_doc(seq) -> dict:
    doc = {"steps": [{"educts": mixture_to_doc(e), "products": mixture_to_doc(p),
                      "map": [[a, b] for a, b in sorted(m.items())]}
                     for e, p, m in seq.steps]}
    if seq.partial_links:
        doc["partial_links"] = [{"step_index": i, "product_atom": a, "next_educt_atom": b}
                                for i, a, b in sorted(seq.partial_links)]
    return doc


def read_reaction_sequence(doc: dict):
    from ..enumeration import ReactionSequence

    steps = []
    for i, s in enumerate(_require(doc, "steps")):
        e = read_mixture(_require(s, "educts", dict))
        p = read_mixture(_require(s, "products", dict))
        mapping = {}
        for item in _require(s, "map"):
            if not isinstance(item, list) or len(item) != 2:
                raise DocumentError(f"step {i}: map entries must be [educt, product] pairs")
            mapping[_int(item[0], "map")] = _int(item[1], "map")
        steps.append((e, p, mapping))
    links = []
    for item in doc.get("partial_links", []):
        try:
            links.append((_int(item["step_index"], "step_index"), _int(item["product_atom"], "product_atom"),
                          _int(item["next_educt_atom"], "next_educt_atom")))
        except KeyError as exc:
            raise DocumentError(f"missing field {exc.args[0]!r} in partial link") from None
    return ReactionSequence(tuple(steps), tuple(links))


def write_reaction_sequence(seq) -> str:
    return dumps(sequence_to_doc(seq))


# -- overlay graphs -----------------------------------------------------------

def og_to_doc(og) -> dict:
    atoms = []
    for a in og.atoms:
        rec = {"id": a.id,
               "start": None if a.start is None else list(a.start),
               "end": None if a.end is None else list(a.end)}
        if a.substrate_flag is not None:
            rec["substrate_flag"] = a.substrate_flag
        atoms.append(rec)
    bonds = [{"pair": list(b.pair), "start_order": b.start_order, "end_order": b.end_order,
              "class": b.bond_class.value, "transient": b.transient} for b in og.bonds]
    return {"atoms": atoms, "bonds": bonds}


def read_og(doc: dict):
    from ..overlay import BondClass, OGAtom, OGBond, OverlayGraph

    try:
        atoms = tuple(OGAtom(a["id"], None if a["start"] is None else tuple(a["start"]),
                             None if a["end"] is None else tuple(a["end"]), a.get("substrate_flag"))
                      for a in _require(doc, "atoms"))
        bonds = tuple(OGBond(tuple(b["pair"]), b["start_order"], b["end_order"],
                             BondClass(b["class"]), b["transient"]) for b in _require(doc, "bonds"))
    except (KeyError, ValueError) as exc:
        raise DocumentError(f"malformed OG document: {exc}") from None
    return OverlayGraph(atoms, bonds)


def write_og(og) -> str:
    return dumps(og_to_doc(og))


__all__ = [
    "DocumentError", "GraphError", "InconsistentDeltaError", "dumps", "load_json", "save_json",
    "mixture_to_doc", "read_mixture", "write_mixture", "rule_to_doc", "read_rule", "write_rule",
    "delta_to_doc", "read_delta", "mechanism_to_doc", "read_mechanism", "write_mechanism",
    "sequence_to_doc", "read_reaction_sequence", "write_reaction_sequence", "og_to_doc", "read_og",
    "write_og",
]
