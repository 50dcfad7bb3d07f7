"""Double-pushout rules over molecular graphs.

A :class:`Rule` stores its left and right patterns as two mixtures over one
atom-id space: an id present on both sides and listed in ``context_atoms`` is
preserved (and may be relabelled, since the interface is untyped). Ids only on
the left are deleted, ids only on the right are created. ``context_bonds`` are
the interface edges; a bond present on both sides but outside
``context_bonds`` is broken and re-formed by the rule.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import kernel
from .chemgraph import GraphError, Mixture, find_monomorphisms, pair, wl_digest


class RuleError(ValueError):
    pass


class InvalidMatchError(ValueError):
    pass


class ChainBreakError(ValueError):
    def __init__(self, message: str, step: int | None = None):
        self.step = step
        super().__init__(message if step is None else f"step {step}: {message}")


class InconsistentDeltaError(ValueError):
    def __init__(self, message: str, step: int):
        self.step = step
        super().__init__(f"step {step}: {message}")


def _pairs(items) -> frozenset:
    return frozenset(pair(a, b) for a, b in items)


@dataclass(frozen=True)
class Rule:
    left: Mixture
    right: Mixture
    context_atoms: frozenset = frozenset()
    context_bonds: frozenset = frozenset()
    nonbond_left: frozenset = frozenset()
    nonbond_right: frozenset = frozenset()

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "context_atoms", frozenset(self.context_atoms))
        set_(self, "context_bonds", _pairs(self.context_bonds))
        set_(self, "nonbond_left", _pairs(self.nonbond_left))
        set_(self, "nonbond_right", _pairs(self.nonbond_right))
        both = set(self.left.labels) & set(self.right.labels)
        if not self.context_atoms <= both:
            raise RuleError(f"context atoms {sorted(self.context_atoms - both)} "
                            f"missing from one side")
        for a, b in self.context_bonds:
            if a not in self.context_atoms or b not in self.context_atoms:
                raise RuleError(f"context bond {(a, b)} has a non-context endpoint")
            if not self.left.order(a, b) or not self.right.order(a, b):
                raise RuleError(f"context bond {(a, b)} is not bonded on both sides")
        for side, pairs_ in (("left", self.nonbond_left), ("right", self.nonbond_right)):
            g = getattr(self, side)
            for a, b in pairs_:
                if a not in g or b not in g or a == b:
                    raise RuleError(f"{side} non-bond constraint {(a, b)} references missing atoms")
                if g.order(a, b):
                    raise RuleError(f"{side} non-bond constraint {(a, b)} is bonded")

    @classmethod
    def identity(cls, g: Mixture) -> "Rule":
        return cls(g, g, frozenset(g.labels), frozenset(g.orders))

    @classmethod
    def empty(cls) -> "Rule":
        return cls(Mixture(), Mixture())

    @property
    def created_atoms(self) -> frozenset:
        return frozenset(self.right.labels) - self.context_atoms

    @property
    def deleted_atoms(self) -> frozenset:
        return frozenset(self.left.labels) - self.context_atoms

    @property
    def implicit_nonbond_left(self) -> frozenset:
        return frozenset(p for p in self.right.orders
                         if p[0] in self.left and p[1] in self.left and not self.left.order(*p))

    @property
    def implicit_nonbond_right(self) -> frozenset:
        return frozenset(p for p in self.left.orders
                         if p[0] in self.right and p[1] in self.right and not self.right.order(*p))

    @property
    def forbidden_left(self) -> frozenset:
        return self.nonbond_left | self.implicit_nonbond_left

    def mentioned_pairs(self) -> frozenset:
        """Pairs bonded on either side or carrying an explicit constraint."""
        return (frozenset(self.left.orders) | frozenset(self.right.orders)
                | self.nonbond_left | self.nonbond_right)

    def atom_ids(self) -> list[int]:
        return sorted(set(self.left.labels) | set(self.right.labels))

    def invert(self) -> "Rule":
        return invert(self)

    def relabel(self, mapping: Mapping[int, int]) -> "Rule":
        def m(p):
            return pair(mapping[p[0]], mapping[p[1]])
        return Rule(self.left.relabel(mapping), self.right.relabel(mapping),
                    frozenset(mapping[v] for v in self.context_atoms),
                    frozenset(m(p) for p in self.context_bonds),
                    frozenset(m(p) for p in self.nonbond_left),
                    frozenset(m(p) for p in self.nonbond_right))

    def is_identity(self) -> bool:
        return (self.left == self.right and not self.created_atoms and not self.deleted_atoms
                and frozenset(self.left.orders) == self.context_bonds)

    def __repr__(self):
        return (f"Rule(atoms={len(self.atom_ids())}, left_bonds={len(self.left.orders)}, "
                f"right_bonds={len(self.right.orders)}, context_bonds={len(self.context_bonds)})")


def invert(rule: Rule) -> Rule:
    return Rule(rule.right, rule.left, rule.context_atoms, rule.context_bonds,
                rule.nonbond_right, rule.nonbond_left)


@dataclass(frozen=True)
class Derivation:
    rule: Rule
    host: Mixture
    match: dict
    result: Mixture
    tracking: dict
    comatch: dict = field(default_factory=dict)


def find_rule_matches(rule: Rule, host: Mixture, limit: int = 0,
                      deadline: float = 0.0) -> list[dict[int, int]]:
    """Matches of ``rule.left`` in ``host`` honouring non-bond and dangling conditions."""
    found = find_monomorphisms(rule.left, host, rule.forbidden_left, deadline=deadline)
    deleted = rule.deleted_atoms
    if deleted:
        found = [m for m in found
                 if all(host.degree(m[x]) == rule.left.degree(x) for x in deleted)]
    if limit:
        found = found[:limit]
    return found


def check_match(rule: Rule, host: Mixture, match: Mapping[int, int]) -> None:
    left = rule.left
    if set(match) != set(left.labels):
        raise InvalidMatchError("match domain differs from the rule's left side")
    if len(set(match.values())) != len(match):
        raise InvalidMatchError("match is not injective")
    for x, v in match.items():
        if v not in host:
            raise InvalidMatchError(f"atom {v} is not in the host")
        if host.label(v) != left.label(x):
            raise InvalidMatchError(f"label mismatch at rule atom {x}")
    for (a, b), o in left.orders.items():
        if host.order(match[a], match[b]) != o:
            raise InvalidMatchError(f"bond {(a, b)} not present with order {o}")
    for a, b in rule.forbidden_left:
        if host.order(match[a], match[b]):
            raise InvalidMatchError(f"non-bond constraint {(a, b)} violated")
    for x in rule.deleted_atoms:
        if host.degree(match[x]) != left.degree(x):
            raise InvalidMatchError(f"deleting atom {x} would leave dangling bonds")


def apply(rule: Rule, host: Mixture, match: Mapping[int, int], check: bool = True) -> Derivation:
    """Rewrite ``host`` at ``match``; surviving atoms keep their ids."""
    if check:
        check_match(rule, host, match)
    labels = dict(host.labels)
    orders = dict(host.orders)
    for (a, b) in rule.left.orders:
        hp = pair(match[a], match[b])
        if (a, b) in rule.context_bonds:
            orders[hp] = rule.right.orders[(a, b)]
        else:
            del orders[hp]
    gone = {match[x] for x in rule.deleted_atoms}
    for v in gone:
        del labels[v]
    comatch = {x: match[x] for x in rule.context_atoms}
    nxt = max(host.labels, default=-1) + 1
    for x in sorted(rule.created_atoms):
        comatch[x] = nxt
        nxt += 1
    for (a, b), o in rule.right.orders.items():
        if (a, b) not in rule.context_bonds:
            orders[pair(comatch[a], comatch[b])] = o
    for x, lab in rule.right.labels.items():
        labels[comatch[x]] = lab
    result = Mixture._trusted(labels, orders)
    tracking = {v: v for v in host.labels if v not in gone}
    return Derivation(rule, host, dict(match), result, tracking, comatch)


# -- mechanisms ---------------------------------------------------------------

@dataclass(frozen=True)
class StepDelta:
    """Bond changes ``(src, dst, from, to)`` and charge changes ``(id, from, to)``."""
    bond_changes: tuple = ()
    charge_changes: tuple = ()


def step_rule(host: Mixture, delta: StepDelta, step: int = 0) -> Rule:
    """The minimal rule performing ``delta`` on ``host`` (rule ids = host ids)."""
    touched: set[int] = set()
    seen_pairs = set()
    for src, dst, old, new in delta.bond_changes:
        for v in (src, dst):
            if v not in host:
                raise InconsistentDeltaError(f"atom {v} does not exist", step)
        p = pair(src, dst)
        if src == dst or p in seen_pairs:
            raise InconsistentDeltaError(f"repeated or self pair {p}", step)
        seen_pairs.add(p)
        if old == new:
            raise InconsistentDeltaError(f"bond change on {p} does not change the order", step)
        if not (0 <= new <= 3):
            raise InconsistentDeltaError(f"order {new} for {p} out of range", step)
        if host.order(src, dst) != old:
            raise InconsistentDeltaError(
                f"pair {p} has order {host.order(src, dst)}, delta claims {old}", step)
        touched.update(p)
    new_charge = {}
    for v, old, new in delta.charge_changes:
        if v not in host:
            raise InconsistentDeltaError(f"atom {v} does not exist", step)
        if host.charge(v) != old:
            raise InconsistentDeltaError(
                f"atom {v} has charge {host.charge(v)}, delta claims {old}", step)
        if not -4 <= new <= 4:
            raise InconsistentDeltaError(f"charge {new} for atom {v} out of range", step)
        new_charge[v] = new
        touched.add(v)
    left_labels = {v: host.label(v) for v in touched}
    right_labels = {v: (host.element(v), new_charge.get(v, host.charge(v))) for v in touched}
    left_orders, right_orders, context = {}, {}, set()
    for src, dst, old, new in delta.bond_changes:
        p = pair(src, dst)
        if old:
            left_orders[p] = old
        if new:
            right_orders[p] = new
        if old and new:
            context.add(p)
    return Rule(Mixture._trusted(left_labels, left_orders),
                Mixture._trusted(right_labels, right_orders),
                frozenset(touched), frozenset(context))


def delta_of(rule: Rule, match: Mapping[int, int]) -> StepDelta:
    """Inverse of :func:`step_rule` for atom-preserving rules."""
    bonds = []
    for p in sorted(rule.mentioned_pairs()):
        a, b = rule.left.order(*p), rule.right.order(*p)
        if a != b:
            bonds.append((match[p[0]], match[p[1]], a, b))
    charges = [(match[v], rule.left.charge(v), rule.right.charge(v))
               for v in sorted(rule.context_atoms) if rule.left.charge(v) != rule.right.charge(v)]
    bonds = [(min(s, d), max(s, d), a, b) for s, d, a, b in bonds]
    return StepDelta(tuple(sorted(bonds)), tuple(sorted(charges)))


@dataclass(frozen=True)
class Mechanism:
    educts: Mixture
    derivations: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "derivations", tuple(self.derivations))
        current = self.educts
        for i, d in enumerate(self.derivations):
            if d.host != current:
                raise ChainBreakError("host differs from the previous result", i)
            current = d.result

    @classmethod
    def from_deltas(cls, educts: Mixture, deltas: Iterable[StepDelta]) -> "Mechanism":
        ders = []
        host = educts
        for i, delta in enumerate(deltas):
            rule = step_rule(host, delta, i)
            d = apply(rule, host, {v: v for v in rule.left.labels}, check=False)
            ders.append(d)
            host = d.result
        return cls(educts, tuple(ders))

    @property
    def final(self) -> Mixture:
        return self.derivations[-1].result if self.derivations else self.educts

    def stages(self) -> list[Mixture]:
        return [self.educts] + [d.result for d in self.derivations]

    def deltas(self) -> list[StepDelta]:
        return [delta_of(d.rule, d.match) for d in self.derivations]

    def __len__(self):
        return len(self.derivations)


def execute(mechanism: Mechanism) -> tuple[Mixture, dict[int, int]]:
    """Run every step; returns the final mixture and the educt-to-product atom map."""
    current = mechanism.educts
    composite = {v: v for v in current.labels}
    for i, d in enumerate(mechanism.derivations):
        if d.host != current:
            raise ChainBreakError("host differs from the previous result", i)
        redo = apply(d.rule, current, d.match)
        if redo.result != d.result:
            raise ChainBreakError("recorded result does not follow from the rule", i)
        composite = {v: d.tracking[w] for v, w in composite.items() if w in d.tracking}
        current = d.result
    return current, composite


# -- combined graph and rule isomorphism --------------------------------------

@dataclass(frozen=True)
class CombinedAtom:
    id: int
    left_label: tuple | None
    right_label: tuple | None


@dataclass(frozen=True)
class CombinedBond:
    pair: tuple
    left_order: int | None
    right_order: int | None


@dataclass(frozen=True)
class CombinedGraph:
    atoms: tuple
    bonds: tuple


def combined_graph(rule: Rule) -> CombinedGraph:
    atoms = tuple(CombinedAtom(v, rule.left.labels.get(v), rule.right.labels.get(v))
                  for v in rule.atom_ids())
    pairs = sorted(set(rule.left.orders) | set(rule.right.orders))
    bonds = tuple(CombinedBond(p, rule.left.orders.get(p), rule.right.orders.get(p))
                  for p in pairs)
    return CombinedGraph(atoms, bonds)


def rule_graph(rule: Rule) -> tuple[dict, dict]:
    """Labelled graph used for rule isomorphism and refinement checks.

    Node label: (left label, right label, preserved). Edge label:
    (left order, right order, interface edge, explicit left constraint,
    explicit right constraint); explicit non-bond pairs are edges too.
    """
    nodes = {v: (rule.left.labels.get(v), rule.right.labels.get(v), v in rule.context_atoms)
             for v in rule.atom_ids()}
    edges = {}
    for p in rule.mentioned_pairs():
        edges[p] = (rule.left.order(*p), rule.right.order(*p), p in rule.context_bonds,
                    p in rule.nonbond_left, p in rule.nonbond_right)
    return nodes, edges


_rule_graph_cache: dict[int, tuple] = {}


def _rule_lg(rule: Rule):
    key = id(rule)
    hit = _rule_graph_cache.get(key)
    if hit is None or hit[0] is not rule:
        nodes, edges = rule_graph(rule)
        hit = (rule, kernel.LabeledGraph(nodes, edges), wl_digest(nodes, edges))
        if len(_rule_graph_cache) > 4096:
            _rule_graph_cache.clear()
        _rule_graph_cache[key] = hit
    return hit[1], hit[2]


def rule_hash(rule: Rule) -> str:
    return _rule_lg(rule)[1]


def rule_isomorphisms(r1: Rule, r2: Rule, limit: int = 0) -> list[dict[int, int]]:
    g1, h1 = _rule_lg(r1)
    g2, h2 = _rule_lg(r2)
    if len(g1) != len(g2) or g1.n_edges != g2.n_edges or h1 != h2:
        return []
    return kernel.embeddings(g1, g2, limit=limit)


def rules_isomorphic(r1: Rule, r2: Rule) -> bool:
    return bool(rule_isomorphisms(r1, r2, limit=1))


def rule_embeddings(small: Rule, big: Rule, limit: int = 0) -> list[dict[int, int]]:
    """Embeddings of ``small``'s rule graph into ``big``'s (labels and edge labels kept)."""
    g1, _ = _rule_lg(small)
    g2, _ = _rule_lg(big)
    return kernel.embeddings(g1, g2, limit=limit)


__all__ = [
    "Rule", "Derivation", "Mechanism", "StepDelta", "CombinedGraph", "CombinedAtom",
    "CombinedBond", "RuleError", "InvalidMatchError", "ChainBreakError",
    "InconsistentDeltaError", "GraphError", "find_rule_matches", "apply", "check_match",
    "invert", "execute", "combined_graph", "step_rule", "delta_of", "rule_graph",
    "rule_hash", "rules_isomorphic", "rule_isomorphisms", "rule_embeddings",
]
