"""Catalyst detection and substrate rules.

A catalyst is a set of whole components found unchanged (up to isomorphism) on
both sides of an overall reaction E => P. Removing them leaves the substrate
parts E' and P'. Atoms can be traded with the catalyst. An atom that starts in
E' but ends inside the catalyst copy of P departs, and the substrate rule
deletes it. An atom arriving from the catalyst is created.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .chemgraph import Mixture, components, is_isomorphic, isomorphisms
from .dpo import Derivation, Mechanism, Rule
from .overlay import overlay_rule


class CatalystError(ValueError):
    pass


@dataclass(frozen=True)
class CatalystAssignment:
    catalyst: Mixture
    into_educts: dict
    into_products: dict

    def educt_atoms(self) -> frozenset:
        return frozenset(self.into_educts.values())

    def product_atoms(self) -> frozenset:
        return frozenset(self.into_products.values())

    def key(self) -> tuple:
        """(sorted component min-ids in E, sorted component min-ids in P) for tie-breaks."""
        e_comps = [min(c.labels) for c in components(self.catalyst)]
        p_comps = sorted(min(self.into_products[v] for v in c.labels) for c in components(self.catalyst))
        return (tuple(sorted(e_comps)), tuple(p_comps))


def _best_isomorphism(a: Mixture, b: Mixture) -> dict[int, int]:
    best, score = None, -1
    for iso in isomorphisms(a, b):
        s = sum(1 for x, y in iso.items() if x == y)
        if s > score:
            best, score = iso, s
    return best


def _assignment(E: Mixture, pairs: Sequence[tuple[Mixture, Mixture]]) -> CatalystAssignment:
    ids: list[int] = []
    c2: dict[int, int] = {}
    for ce, cp in pairs:
        ids.extend(ce.labels)
        c2.update(_best_isomorphism(ce, cp))
    catalyst = E.subgraph(ids)
    return CatalystAssignment(catalyst, {v: v for v in ids}, c2)


def detect_catalysts(E: Mixture, P: Mixture,
                     component_indices: Iterable[int] | None = None) -> list[CatalystAssignment]:
    """Every maximal pairing of educt components with isomorphic product components.

    ``component_indices`` restricts the candidates to the listed educt
    components (indices into :func:`components` order).
    """
    comps_e = components(E)
    comps_p = components(P)
    if component_indices is not None:
        wanted = sorted(set(component_indices))
        for i in wanted:
            if not 0 <= i < len(comps_e):
                raise CatalystError(f"educt component index {i} out of range (0..{len(comps_e) - 1})")
        comps_e = [comps_e[i] for i in wanted]
    classes: list[tuple[list[Mixture], list[Mixture]]] = []
    for ce in comps_e:
        for cls in classes:
            if is_isomorphic(cls[0][0], ce):
                cls[0].append(ce)
                break
        else:
            classes.append(([ce], [cp for cp in comps_p if is_isomorphic(ce, cp)]))
    if component_indices is not None:
        for es, ps in classes:
            if len(ps) < len(es):
                raise CatalystError("a requested catalyst component has no unchanged counterpart "
                                    "among the products")
    options = []
    for es, ps in classes:
        k = min(len(es), len(ps))
        if k == 0:
            continue
        options.append([list(zip(sub_e, sub_p))
                        for sub_e in itertools.combinations(es, k)
                        for sub_p in itertools.permutations(ps, k)])
    if not options:
        return []
    out = [_assignment(E, [p for group in combo for p in group]) for combo in itertools.product(*options)]
    out.sort(key=CatalystAssignment.key)
    return out


def _check_assignment(ca: CatalystAssignment, E: Mixture, P: Mixture) -> None:
    c = ca.catalyst
    for side, emb, host in (("educts", ca.into_educts, E), ("products", ca.into_products, P)):
        if set(emb) != set(c.labels):
            raise CatalystError(f"embedding into {side} is not total on the catalyst")
        if len(set(emb.values())) != len(emb):
            raise CatalystError(f"embedding into {side} is not injective")
        for v, w in emb.items():
            if w not in host or host.label(w) != c.label(v):
                raise CatalystError(f"catalyst atom {v} does not match {side} atom {w}")
        for (a, b), o in c.orders.items():
            if host.order(emb[a], emb[b]) != o:
                raise CatalystError(f"catalyst bond {(a, b)} missing in {side}")
        image = set(emb.values())
        for w in image:
            if any(x not in image for x in host.neighbors(w)):
                raise CatalystError(f"catalyst image in {side} is not a union of whole components")
        if sum(host.degree(w) for w in image) != 2 * len(c.orders):
            raise CatalystError(f"catalyst image in {side} carries extra bonds")


def substrate_rule(overlay: Rule, od: Derivation, ca: CatalystAssignment) -> Rule:
    """Restrict an overlay rule to the substrate parts of its derivation."""
    E, P = od.host, od.result
    _check_assignment(ca, E, P)
    to_e = dict(od.match)
    to_p = dict(od.comatch)
    rule = overlay.relabel({**to_p, **to_e})
    if any(to_e[v] != to_p[v] for v in overlay.context_atoms):
        raise CatalystError("overlay derivation does not keep atom ids")
    e_sub = set(E.labels) - ca.educt_atoms()
    p_sub = set(P.labels) - ca.product_atoms()
    departing = e_sub - p_sub
    arriving = p_sub - e_sub
    kept = e_sub & p_sub

    left_atoms = (set(rule.left.labels) & e_sub) | departing
    for v in departing:
        left_atoms.update(w for w in E.neighbors(v) if w in e_sub)
    right_atoms = (set(rule.right.labels) & p_sub) | arriving
    for v in arriving:
        right_atoms.update(w for w in P.neighbors(v) if w in p_sub)
    context = (left_atoms | right_atoms) & kept
    left_atoms = context | (left_atoms & departing)
    right_atoms = context | (right_atoms & arriving)

    def inside(p, ids):
        return p[0] in ids and p[1] in ids

    left_orders = {p: o for p, o in rule.left.orders.items() if inside(p, left_atoms)}
    for v in departing:
        for w, o in E.neighbors(v).items():
            left_orders[(min(v, w), max(v, w))] = o
    right_orders = {p: o for p, o in rule.right.orders.items() if inside(p, right_atoms)}
    for v in arriving:
        for w, o in P.neighbors(v).items():
            right_orders[(min(v, w), max(v, w))] = o
    left = Mixture._trusted({v: E.label(v) for v in left_atoms}, left_orders)
    right = Mixture._trusted({v: P.label(v) for v in right_atoms}, right_orders)
    context_bonds = {p for p in rule.context_bonds if inside(p, context)}
    nb_left = {p for p in rule.nonbond_left if inside(p, left_atoms) and not left.order(*p)}
    nb_right = {p for p in rule.nonbond_right if inside(p, right_atoms) and not right.order(*p)}
    return Rule(left, right, frozenset(context), frozenset(context_bonds),
                frozenset(nb_left), frozenset(nb_right))


def fixed_points(ca: CatalystAssignment, od: Derivation) -> int:
    """Catalyst atoms that the overlay derivation carries onto their own product copy."""
    return sum(1 for v in ca.catalyst.labels
               if od.tracking.get(ca.into_educts[v]) == ca.into_products[v])


def rule_size(rule: Rule) -> int:
    return (len(rule.atom_ids()) + len(set(rule.left.orders) | set(rule.right.orders))
            + len(rule.nonbond_left | rule.nonbond_right))


def condense(assignments: Sequence[CatalystAssignment], od: Derivation,
             overlay: Rule | None = None) -> CatalystAssignment:
    """Pick the assignment that trades the fewest atoms with the substrate.

    Ranking: most fixed catalyst atoms, then smallest substrate rule, then the
    smallest sorted component ids.
    """
    if not assignments:
        raise CatalystError("no catalyst assignments to choose from")
    if len(assignments) == 1:
        return assignments[0]
    overlay = od.rule if overlay is None else overlay

    def rank(ca):
        return (-fixed_points(ca, od), rule_size(substrate_rule(overlay, od, ca)), ca.key())
    return min(assignments, key=rank)


def mass_balanced(rule: Rule) -> bool:
    def counts(g, ids):
        out: dict[str, int] = {}
        for v in ids:
            out[g.element(v)] = out.get(g.element(v), 0) + 1
        return out
    return counts(rule.right, rule.created_atoms) == counts(rule.left, rule.deleted_atoms)


def substrate_rule_of(m: Mechanism, catalysts: str | Iterable[int] = "auto") -> tuple[Rule, CatalystAssignment | None]:
    """Overlay rule of ``m`` reduced to its most condensed substrate rule.

    Returns the full overlay rule and ``None`` when no catalyst is found.
    """
    overlay, od = overlay_rule(m)
    indices = None if catalysts == "auto" else list(catalysts)
    found = detect_catalysts(od.host, od.result, indices)
    if not found:
        return overlay, None
    ca = condense(found, od, overlay)
    return substrate_rule(overlay, od, ca), ca


def substrate_parts(ca: CatalystAssignment, E: Mixture, P: Mixture) -> tuple[Mixture, Mixture]:
    return (E.subgraph(set(E.labels) - ca.educt_atoms()),
            P.subgraph(set(P.labels) - ca.product_atoms()))


def check_projection(srule: Rule, overlay: Rule, od: Derivation) -> bool:
    """Substrate-rule bonds exist in E (left) and P (right), agreeing with the overlay where it speaks."""
    for side, host in (("left", od.host), ("right", od.result)):
        s, o = getattr(srule, side), getattr(overlay, side)
        for (a, b), order in s.orders.items():
            if host.order(a, b) != order:
                return False
            if a in o and b in o and (a, b) in overlay.mentioned_pairs() and o.order(a, b) != order:
                return False
    return True


__all__ = [
    "CatalystAssignment", "CatalystError", "detect_catalysts", "substrate_rule", "condense",
    "fixed_points", "rule_size", "mass_balanced", "substrate_rule_of", "substrate_parts",
    "check_projection",
]
