"""Mechanisms consistent with a reaction sequence whose inter-step links are unknown.

Each step comes with its own educts, products and a per-step atom map. The
product mixture of one step and the educt mixture of the next are the same
molecules under unknown ids, so every isomorphism between them (a linking) is
a candidate. All mechanisms are expressed in the ids of the first step's
educts.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import kernel
from .chemgraph import Mixture, pair
from .dpo import Mechanism, Rule, StepDelta, rule_hash, rules_isomorphic
from .overlay import overlay_rule


class SequenceError(ValueError):
    pass


class ContradictoryPinError(SequenceError):
    pass


def _check_link(seq_steps, i, a, b, err=SequenceError):
    if not 0 <= i < len(seq_steps) - 1:
        raise err(f"link step index {i} has no following step")
    prods, nxt = seq_steps[i][1], seq_steps[i + 1][0]
    if a not in prods:
        raise err(f"step {i} products have no atom {a}")
    if b not in nxt:
        raise err(f"step {i + 1} educts have no atom {b}")
    if prods.label(a) != nxt.label(b):
        raise err(f"link {a} -> {b} joins {prods.label(a)} with {nxt.label(b)}")


def _check_link_set(links, err):
    fwd, bwd = {}, {}
    for i, a, b in links:
        if fwd.setdefault((i, a), b) != b or bwd.setdefault((i, b), a) != a:
            raise err(f"step {i}: atom links {a} -> {b} conflict with another link")


@dataclass(frozen=True)
class ReactionSequence:
    steps: tuple
    partial_links: tuple = ()

    def __post_init__(self):
        steps = tuple((e, p, dict(m)) for e, p, m in self.steps)
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "partial_links", tuple(tuple(x) for x in self.partial_links))
        for i, (e, p, m) in enumerate(steps):
            if set(m) != set(e.labels) or sorted(m.values()) != sorted(p.labels):
                raise SequenceError(f"step {i}: map is not a bijection between educt and product atoms")
            for a, b in m.items():
                if e.element(a) != p.element(b):
                    raise SequenceError(f"step {i}: map sends {e.element(a)} atom {a} to "
                                        f"{p.element(b)} atom {b}")
        for i in range(len(steps) - 1):
            prods, nxt = steps[i][1], steps[i + 1][0]
            if (prods.element_counts() != nxt.element_counts()
                    or prods.bond_signature() != nxt.bond_signature()):
                raise SequenceError(f"step {i} products and step {i + 1} educts differ in "
                                    f"atom or bond multisets")
        for link in self.partial_links:
            _check_link(steps, *link)
        _check_link_set(self.partial_links, SequenceError)

    def __len__(self):
        return len(self.steps)


def _pinned_graph(g: Mixture, pins: dict[int, int]) -> kernel.LabeledGraph:
    nodes = {v: (lab, pins.get(v)) for v, lab in g.labels.items()}
    return kernel.LabeledGraph(nodes, g.orders)


def link_steps(prev_products: Mixture, next_educts: Mixture,
               constraints: Iterable[tuple[int, int]] = ()) -> list[dict[int, int]]:
    """All isomorphisms ``prev_products -> next_educts`` honouring forced pairs."""
    if len(prev_products) != len(next_educts) or len(prev_products.orders) != len(next_educts.orders):
        return []
    src_pins: dict[int, int] = {}
    dst_pins: dict[int, int] = {}
    for a, b in constraints:
        if a not in prev_products or b not in next_educts:
            return []
        if a in src_pins or b in dst_pins:
            if src_pins.get(a, -1) == dst_pins.get(b, -2):
                continue
            return []
        src_pins[a] = dst_pins[b] = len(src_pins)
    found = kernel.embeddings(_pinned_graph(prev_products, src_pins),
                              _pinned_graph(next_educts, dst_pins))
    keys = prev_products.atom_ids()
    found.sort(key=lambda m: tuple(m[k] for k in keys))
    return found


def step_delta(educts: Mixture, products: Mixture, mapping: dict[int, int]) -> StepDelta:
    """Changes of one step in its own educt ids."""
    back = {p: e for e, p in mapping.items()}
    after = products.relabel(back)
    bonds = []
    for p in sorted(set(educts.orders) | set(after.orders)):
        a, b = educts.order(*p), after.order(*p)
        if a != b:
            bonds.append((p[0], p[1], a, b))
    charges = [(v, educts.charge(v), after.charge(v)) for v in educts.atom_ids()
               if educts.charge(v) != after.charge(v)]
    return StepDelta(tuple(bonds), tuple(charges))


def _translate(delta: StepDelta, to_global: dict[int, int]) -> StepDelta:
    bonds = []
    for s, d, a, b in delta.bond_changes:
        g = pair(to_global[s], to_global[d])
        bonds.append((g[0], g[1], a, b))
    charges = [(to_global[v], a, b) for v, a, b in delta.charge_changes]
    return StepDelta(tuple(sorted(bonds)), tuple(sorted(charges)))


@dataclass
class EnumerationResult:
    mechanisms: list
    overlay_rules: list
    counts: tuple
    rule_index: list = field(default_factory=list)

    @property
    def total_linkings(self) -> int:
        return self.counts[0]

    @property
    def distinct_mechanisms(self) -> int:
        return self.counts[1]

    @property
    def distinct_overlay_rules(self) -> int:
        return self.counts[2]

    def summary(self) -> dict:
        return {"total_linkings": self.counts[0], "distinct_mechanisms": self.counts[1],
                "distinct_overlay_rules": self.counts[2]}


class RuleSet:
    """Rules deduplicated up to rule isomorphism (hash prefilter, then exact check)."""

    def __init__(self):
        self.rules: list[Rule] = []
        self._by_hash: dict[str, list[int]] = {}

    def add(self, rule: Rule) -> int:
        h = rule_hash(rule)
        bucket = self._by_hash.setdefault(h, [])
        for idx in bucket:
            if rules_isomorphic(self.rules[idx], rule):
                return idx
        self.rules.append(rule)
        bucket.append(len(self.rules) - 1)
        return len(self.rules) - 1

    def __len__(self):
        return len(self.rules)


def mechanisms_for(seq: ReactionSequence, linkings: Sequence[dict[int, int]]) -> Mechanism:
    """The mechanism induced by one choice of linking per seam."""
    first = seq.steps[0][0]
    to_step = {v: v for v in first.labels}
    deltas = []
    for i, (e, p, m) in enumerate(seq.steps):
        to_global = {s: g for g, s in to_step.items()}
        deltas.append(_translate(step_delta(e, p, m), to_global))
        if i < len(linkings):
            link = linkings[i]
            to_step = {g: link[m[s]] for g, s in to_step.items()}
    return Mechanism.from_deltas(first, deltas)


def enumerate_overlays(seq: ReactionSequence) -> EnumerationResult:
    if not seq.steps:
        raise SequenceError("empty reaction sequence")
    seams = []
    for i in range(len(seq.steps) - 1):
        forced = [(a, b) for j, a, b in seq.partial_links if j == i]
        links = link_steps(seq.steps[i][1], seq.steps[i + 1][0], forced)
        if not links:
            raise SequenceError(f"no linking between step {i} products and step {i + 1} educts")
        seams.append(links)
    total = 1
    for links in seams:
        total *= len(links)
    seen: dict[tuple, int] = {}
    mechanisms = []
    rules = RuleSet()
    index = []
    for combo in itertools.product(*seams):
        mech = mechanisms_for(seq, combo)
        key = tuple(mech.deltas())
        if key in seen:
            continue
        seen[key] = len(mechanisms)
        mechanisms.append(mech)
        index.append(rules.add(overlay_rule(mech)[0]))
    order = sorted(range(len(rules.rules)), key=lambda k: (rule_hash(rules.rules[k]), k))
    rank = {k: r for r, k in enumerate(order)}
    return EnumerationResult(mechanisms, [rules.rules[k] for k in order],
                             (total, len(mechanisms), len(rules)), [rank[k] for k in index])


def apply_partial_map(seq: ReactionSequence, pins: Iterable[Sequence[int]]) -> ReactionSequence:
    """Add forced links ``(step_index, product_atom, next_educt_atom)`` to ``seq``."""
    pins = [tuple(p) for p in pins]
    if not pins:
        return seq
    for p in pins:
        if len(p) != 3:
            raise ContradictoryPinError(f"pin {p} must be (step_index, product_atom, next_educt_atom)")
        _check_link(seq.steps, *p, err=ContradictoryPinError)
    links = tuple(dict.fromkeys(seq.partial_links + tuple(pins)))
    _check_link_set(links, ContradictoryPinError)
    out = ReactionSequence(seq.steps, links)
    for i in range(len(seq.steps) - 1):
        forced = [(a, b) for j, a, b in links if j == i]
        if forced and not link_steps(seq.steps[i][1], seq.steps[i + 1][0], forced):
            raise ContradictoryPinError(f"pins at seam {i} admit no linking")
    return out


def sequence_from_mechanism(m: Mechanism, relabel: Sequence[dict[int, int]] | None = None) -> ReactionSequence:
    """Forget the inter-step links of ``m``.

    ``relabel[i]`` renames the ids of stage ``i`` (identity when omitted), so
    a test can hide the atom map behind arbitrary ids.
    """
    stages = m.stages()
    n = len(m.derivations)
    names = [relabel[i] if relabel else {v: v for v in stages[i].labels} for i in range(n + 1)]
    steps = []
    for i in range(n):
        e = stages[i].relabel(names[i])
        p = stages[i + 1].relabel(names[i + 1])
        mapping = {names[i][v]: names[i + 1][v] for v in stages[i].labels}
        steps.append((e, p, mapping))
    return ReactionSequence(tuple(steps))


__all__ = [
    "ReactionSequence", "EnumerationResult", "SequenceError", "ContradictoryPinError", "RuleSet",
    "link_steps", "step_delta", "enumerate_overlays", "apply_partial_map", "mechanisms_for",
    "sequence_from_mechanism",
]
