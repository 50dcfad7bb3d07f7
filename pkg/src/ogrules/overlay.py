"""Rule composition, overlay rules of whole mechanisms, and overlay graphs.

Composition works in a single atom-id space: two rules whose ids agree exactly
on the atoms they share (the right side of the first, the left side of the
second) are glued pair by pair. Each atom pair mentioned by either rule gets a
summary (order before, order after, whether it ever reached zero, how often it
changed) from which L, R, K and the explicit non-bond constraints follow.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from .chemgraph import Mixture, pair
from .dpo import ChainBreakError, Derivation, Mechanism, Rule, apply, execute


class CompositionError(ValueError):
    pass


class BondClass(str, Enum):
    FORMED = "formed"
    BROKEN = "broken"
    CONTEXT = "context"
    TRANSIENT_MODIFIED = "transient_modified"
    TRANSIENT_FORMED = "transient_formed"


ACTION_CLASSES = frozenset({BondClass.FORMED, BondClass.BROKEN})


def _glue(r1: Rule, r2: Rule) -> Rule:
    """Sequential composition of rules sharing ids only on ``R1 ∩ L2``."""
    a1 = set(r1.left.labels) | set(r1.right.labels)
    a2 = set(r2.left.labels) | set(r2.right.labels)
    shared = a1 & a2
    interface = set(r1.right.labels) & set(r2.left.labels)
    if not shared <= interface:
        raise CompositionError(f"atoms {sorted(shared - interface)} are shared outside the interface")
    for x in sorted(interface):
        if r1.right.label(x) != r2.left.label(x):
            raise CompositionError(f"atom {x}: label {r1.right.label(x)} after the first rule, "
                                   f"{r2.left.label(x)} required by the second")

    left_ids = set(r1.left.labels) | (set(r2.left.labels) - set(r1.right.labels))
    right_ids = set(r2.right.labels) | (set(r1.right.labels) - set(r2.left.labels))
    left_labels = {v: (r1.left.labels[v] if v in r1.left else r2.left.labels[v]) for v in left_ids}
    right_labels = {v: (r2.right.labels[v] if v in r2.right else r1.right.labels[v]) for v in right_ids}
    created_by_1 = r1.created_atoms
    deleted_by_2 = r2.deleted_atoms

    m1, m2 = r1.mentioned_pairs(), r2.mentioned_pairs()
    left_orders, right_orders = {}, {}
    context, nb_left, nb_right = set(), set(), set()
    for p in sorted(m1 | m2):
        in1, in2 = p in m1, p in m2
        if in1:
            x1, y1 = r1.left.order(*p), r1.right.order(*p)
        if in2:
            x2, y2 = r2.left.order(*p), r2.right.order(*p)
        if in1 and in2 and y1 != x2:
            raise CompositionError(f"pair {p}: order {y1} after the first rule, {x2} required by the second")
        if in2 and not in1 and x2 and (p[0] in created_by_1 or p[1] in created_by_1):
            raise CompositionError(f"pair {p} must be bonded on an atom the first rule creates")
        if in1 and not in2 and y1 and (p[0] in deleted_by_2 or p[1] in deleted_by_2):
            raise CompositionError(f"pair {p} would dangle on an atom the second rule deletes")
        a = x1 if in1 else x2
        b = y2 if in2 else y1
        zero_hit = (in1 and p not in r1.context_bonds) or (in2 and p not in r2.context_bonds)
        changes = (in1 and p in r1.context_bonds and x1 != y1) + (in2 and p in r2.context_bonds and x2 != y2)
        ever = ((in1 and (x1 or y1 or (p in r1.nonbond_left and p in r1.nonbond_right)))
                or (in2 and (x2 or y2 or (p in r2.nonbond_left and p in r2.nonbond_right))))
        if a:
            left_orders[p] = a
        if b:
            right_orders[p] = b
        if a and b and not zero_hit and changes <= 1:
            context.add(p)
        on_left = p[0] in left_ids and p[1] in left_ids
        on_right = p[0] in right_ids and p[1] in right_ids
        # a pair bonded on the other side is already an implicit constraint
        if not a and not b and on_left:
            if ever or (in1 and p in r1.nonbond_left) or (not in1 and p in r2.nonbond_left):
                nb_left.add(p)
        if not a and not b and on_right:
            if ever or (in2 and p in r2.nonbond_right) or (not in2 and p in r1.nonbond_right):
                nb_right.add(p)
    return Rule(Mixture._trusted(left_labels, left_orders), Mixture._trusted(right_labels, right_orders),
                frozenset(left_ids & right_ids), frozenset(context), frozenset(nb_left),
                frozenset(nb_right))


def compose_rules_with_overlap(r1: Rule, r2: Rule, overlap: Mapping[int, int]) -> Rule:
    """Compose ``r1`` then ``r2``, identifying ``x`` of ``r1.right`` with ``overlap[x]`` of ``r2.left``.

    The result keeps ``r1``'s ids; atoms of ``r2`` outside the overlap get
    fresh ids above every id of ``r1``.
    """
    if len(set(overlap.values())) != len(overlap):
        raise CompositionError("overlap is not injective")
    for x, y in overlap.items():
        if x not in r1.right:
            raise CompositionError(f"overlap source {x} is not on the right side of the first rule")
        if y not in r2.left:
            raise CompositionError(f"overlap target {y} is not on the left side of the second rule")
    inverse = {y: x for x, y in overlap.items()}
    nxt = max(r1.atom_ids(), default=-1) + 1
    rename = {}
    for y in r2.atom_ids():
        if y in inverse:
            rename[y] = inverse[y]
        else:
            rename[y] = nxt
            nxt += 1
    return _glue(r1, r2.relabel(rename))


def _host_rule(d: Derivation) -> Rule:
    """``d.rule`` renamed into the ids of ``d.host`` / ``d.result``."""
    names = dict(d.comatch)
    names.update(d.match)
    return d.rule.relabel(names)


def compose(d1: Derivation, d2: Derivation) -> tuple[Rule, Derivation]:
    if d2.host != d1.result:
        raise ChainBreakError("second derivation does not start from the first one's result")
    rule = _glue(_host_rule(d1), _host_rule(d2))
    match = {v: v for v in rule.left.labels}
    comatch = {v: v for v in rule.right.labels}
    tracking = {v: d2.tracking[w] for v, w in d1.tracking.items() if w in d2.tracking}
    return rule, Derivation(rule, d1.host, match, d2.result, tracking, comatch)


def overlay_rule(m: Mechanism, fold: str = "left") -> tuple[Rule, Derivation]:
    """The overlay rule of ``m`` and its single derivation from educts to products."""
    if not m.derivations:
        rule = Rule.empty()
        ident = {v: v for v in m.educts.labels}
        return rule, Derivation(rule, m.educts, {}, m.educts, ident, {})
    parts = [_host_rule(d) for d in m.derivations]
    if fold == "left":
        rule = parts[0]
        for r in parts[1:]:
            rule = _glue(rule, r)
    elif fold == "right":
        rule = parts[-1]
        for r in reversed(parts[:-1]):
            rule = _glue(r, rule)
    else:
        raise ValueError(f"fold must be 'left' or 'right', got {fold!r}")
    d = apply(rule, m.educts, {v: v for v in rule.left.labels})
    return rule, d


# -- trajectories ---------------------------------------------------------------

@dataclass(frozen=True)
class BondHistory:
    pair: tuple
    orders: tuple


def _step_pairs(m: Mechanism) -> set:
    pairs = set()
    for d in m.derivations:
        pairs |= _host_rule(d).mentioned_pairs()
    return pairs


def bond_histories(m: Mechanism) -> list[BondHistory]:
    stages = m.stages()
    pairs = _step_pairs(m)
    for g in stages:
        pairs |= set(g.orders)
    return [BondHistory(p, tuple(g.order(*p) for g in stages)) for p in sorted(pairs)]


def _changes(orders: Sequence[int]) -> int:
    return sum(1 for x, y in zip(orders, orders[1:]) if x != y)


def classify_bond(h) -> BondClass:
    orders = tuple(h.orders if isinstance(h, BondHistory) else h)
    if not orders:
        raise ValueError("empty bond history")
    first, last = orders[0], orders[-1]
    if first == 0 and last > 0:
        return BondClass.FORMED
    if first > 0 and last == 0:
        return BondClass.BROKEN
    if first > 0 and last > 0:
        if last > first:
            return BondClass.FORMED
        if last < first:
            return BondClass.BROKEN
        return BondClass.CONTEXT if _changes(orders) == 0 else BondClass.TRANSIENT_MODIFIED
    # never bonded at either end: a non-bond constraint whether or not it was ever formed
    return BondClass.TRANSIENT_FORMED


def is_transient(h) -> bool:
    """Whether a history passes through a state its endpoints do not show."""
    orders = tuple(h.orders if isinstance(h, BondHistory) else h)
    cls = classify_bond(orders)
    if cls in (BondClass.TRANSIENT_FORMED, BondClass.TRANSIENT_MODIFIED):
        return True
    if orders[0] and orders[-1]:
        return 0 in orders or _changes(orders) > 1
    return False


def trajectory_rule(m: Mechanism) -> Rule:
    """Overlay rule read directly off the stage graphs, without composing anything.

    Used as the independent reference for :func:`overlay_rule`.
    """
    stages = m.stages()
    if not m.derivations:
        return Rule.empty()
    atoms = set()
    for d in m.derivations:
        atoms |= set(_host_rule(d).atom_ids())
    first, last = stages[0], stages[-1]
    left_orders, right_orders, context, nb = {}, {}, set(), set()
    for p in _step_pairs(m):
        h = [g.order(*p) for g in stages]
        a, b = h[0], h[-1]
        if a:
            left_orders[p] = a
        if b:
            right_orders[p] = b
        if all(h) and _changes(h) <= 1:
            context.add(p)
        if not a and not b and any(h):
            nb.add(p)
    return Rule(Mixture._trusted({v: first.label(v) for v in atoms}, left_orders),
                Mixture._trusted({v: last.label(v) for v in atoms}, right_orders),
                frozenset(atoms), frozenset(context), frozenset(nb), frozenset(nb))


# -- overlay graphs -------------------------------------------------------------

@dataclass(frozen=True)
class OGAtom:
    id: int
    start: tuple | None
    end: tuple | None
    substrate_flag: str | None = None

    @property
    def charge_changed(self) -> bool:
        return self.start is not None and self.end is not None and self.start[1] != self.end[1]


@dataclass(frozen=True)
class OGBond:
    pair: tuple
    start_order: int
    end_order: int
    bond_class: BondClass
    transient: bool = False


@dataclass(frozen=True)
class OverlayGraph:
    atoms: tuple
    bonds: tuple

    def bonds_of(self, cls: BondClass) -> list[OGBond]:
        return [b for b in self.bonds if b.bond_class == cls]

    def class_counts(self) -> dict[BondClass, int]:
        counts = {c: 0 for c in BondClass}
        for b in self.bonds:
            counts[b.bond_class] += 1
        return counts

    def bond(self, a: int, b: int) -> OGBond | None:
        p = pair(a, b)
        for bd in self.bonds:
            if bd.pair == p:
                return bd
        return None


def rule_bond_class(rule: Rule, p) -> tuple[BondClass, bool]:
    a, b = rule.left.order(*p), rule.right.order(*p)
    if not a and not b:
        return BondClass.TRANSIENT_FORMED, True
    if not a:
        return BondClass.FORMED, False
    if not b:
        return BondClass.BROKEN, False
    in_k = p in rule.context_bonds
    if a < b:
        return BondClass.FORMED, not in_k
    if a > b:
        return BondClass.BROKEN, not in_k
    return (BondClass.CONTEXT, False) if in_k else (BondClass.TRANSIENT_MODIFIED, True)


def og_from_rule(rule: Rule, substrate: bool = False) -> OverlayGraph:
    created, deleted = rule.created_atoms, rule.deleted_atoms
    atoms = []
    for v in rule.atom_ids():
        flag = None
        if substrate:
            flag = "created" if v in created else "deleted" if v in deleted else None
        atoms.append(OGAtom(v, rule.left.labels.get(v), rule.right.labels.get(v), flag))
    bonds = []
    for p in sorted(rule.mentioned_pairs()):
        cls, transient = rule_bond_class(rule, p)
        bonds.append(OGBond(p, rule.left.order(*p), rule.right.order(*p), cls, transient))
    return OverlayGraph(tuple(atoms), tuple(bonds))


class OverlayConsistencyError(AssertionError):
    pass


def build_og(m: Mechanism) -> OverlayGraph:
    """OG of ``m``; bond classes are cross-checked against the stage-by-stage histories."""
    rule, _ = overlay_rule(m)
    og = og_from_rule(rule)
    histories = {h.pair: h for h in bond_histories(m)}
    for b in og.bonds:
        h = histories[b.pair]
        if classify_bond(h) != b.bond_class or is_transient(h) != b.transient:
            raise OverlayConsistencyError(
                f"pair {b.pair}: rule gives {b.bond_class.value}, history {h.orders} disagrees")
    return og


def action_size(rule: Rule) -> tuple[int, int]:
    """(number of FORMED/BROKEN pairs, number of atoms created, deleted or relabelled)."""
    edges = sum(1 for p in rule.mentioned_pairs() if rule_bond_class(rule, p)[0] in ACTION_CLASSES)
    nodes = sum(1 for v in rule.atom_ids() if rule.left.labels.get(v) != rule.right.labels.get(v))
    return edges, nodes


__all__ = [
    "BondClass", "BondHistory", "CompositionError", "OGAtom", "OGBond", "OverlayGraph",
    "OverlayConsistencyError", "ACTION_CLASSES", "compose", "compose_rules_with_overlap",
    "overlay_rule", "bond_histories", "classify_bond", "is_transient", "trajectory_rule",
    "build_og", "og_from_rule", "rule_bond_class", "action_size", "execute",
]
