"""Random generators and brute-force oracles shared by the test modules."""
from __future__ import annotations

import itertools
import random
from importlib.resources import files

import networkx as nx

from ogrules.chemgraph import Mixture, pair
from ogrules.dpo import Mechanism, Rule, StepDelta, rule_graph
from ogrules.molparse import load_json, read_mechanism, read_reaction_sequence, read_rule

DATA = files("ogrules") / "data"
ELEMENTS = ("C", "N", "O", "H")


def data_path(*parts):
    p = DATA
    for part in parts:
        p = p / part
    return p


def load_mechanism(name: str) -> Mechanism:
    return read_mechanism(load_json(data_path("mechanisms", f"{name}.mech.json")))


def load_sequence(name: str):
    return read_reaction_sequence(load_json(data_path("sequences", f"{name}.seq.json")))


def load_rule(group: str, name: str) -> Rule:
    for suffix in (".srule.json", ".rule.json"):
        p = data_path("rules", group, name + suffix)
        if p.is_file():
            return read_rule(load_json(p))
    raise FileNotFoundError(name)


# -- random structures ------------------------------------------------------------

def random_mixture(rng: random.Random, n: int, p_bond: float = 0.3,
                   elements=ELEMENTS, charged: bool = True) -> Mixture:
    labels = {v: (rng.choice(elements), rng.choice((0, 0, 0, 1, -1)) if charged else 0)
              for v in range(n)}
    orders = {}
    for a, b in itertools.combinations(range(n), 2):
        if rng.random() < p_bond:
            orders[(a, b)] = rng.choice((1, 1, 1, 2, 3))
    return Mixture.from_maps(labels, orders)


def random_mechanism(rng: random.Random, max_steps: int = 5, max_atoms: int = 12,
                     min_steps: int = 1) -> Mechanism:
    """A chemically meaningless but well-formed mechanism that likes to revisit pairs."""
    n = rng.randint(2, max_atoms)
    g = random_mixture(rng, n)
    orders = dict(g.orders)
    charges = {v: g.charge(v) for v in g.labels}
    touched: list[tuple[int, int]] = []
    deltas = []
    for _ in range(rng.randint(min_steps, max_steps)):
        seen, bonds = set(), []
        for _ in range(rng.randint(1, 3)):
            if touched and rng.random() < 0.5:
                p = rng.choice(touched)
            else:
                p = pair(*rng.sample(range(n), 2))
            if p in seen:
                continue
            seen.add(p)
            old = orders.get(p, 0)
            new = rng.choice([o for o in range(4) if o != old])
            bonds.append((p[0], p[1], old, new))
        ch = []
        if rng.random() < 0.4:
            v = rng.randrange(n)
            new = rng.choice([c for c in (-1, 0, 1) if c != charges[v]])
            ch.append((v, charges[v], new))
            charges[v] = new
        for a, b, _, new in bonds:
            if new:
                orders[(a, b)] = new
            else:
                orders.pop((a, b), None)
        touched.extend(seen)
        deltas.append(StepDelta(tuple(bonds), tuple(ch)))
    return Mechanism.from_deltas(g, deltas)


def random_tree(rng: random.Random, n: int, start: int, elements=("C", "N", "O")) -> tuple[dict, dict]:
    labels = {start + i: (rng.choice(elements), 0) for i in range(n)}
    orders = {}
    for i in range(1, n):
        parent = start + rng.randrange(i)
        orders[(parent, start + i)] = rng.choice((1, 1, 2))
    return labels, orders


def random_catalytic_mechanism(rng: random.Random) -> Mechanism:
    """A catalyst hands one leaf atom to the substrate and takes an equal one back.

    Optional substrate-only steps and spare copies of the catalyst are mixed in.
    """
    leaf = rng.choice(("H", "F", "Cl"))
    labels, orders = {}, {}
    cat_labels, cat_orders = random_tree(rng, rng.randint(1, 3), 0)
    anchor = rng.choice(sorted(cat_labels))
    nxt = max(cat_labels) + 1
    c = nxt
    cat_labels[c] = (leaf, 0)
    cat_orders[(anchor, c)] = 1
    nxt += 1
    labels.update(cat_labels)
    orders.update(cat_orders)
    sub_labels, sub_orders = random_tree(rng, rng.randint(1, 5), nxt)
    nxt = max(sub_labels) + 1
    b = rng.choice(sorted(sub_labels))
    s = nxt
    sub_labels[s] = (leaf, 0)
    sub_orders[(b, s)] = 1
    nxt += 1
    labels.update(sub_labels)
    orders.update(sub_orders)
    copies = rng.randint(0, 2)
    for _ in range(copies):
        shift = {v: v + nxt for v in cat_labels}
        labels.update({shift[v]: lab for v, lab in cat_labels.items()})
        orders.update({pair(shift[x], shift[y]): o for (x, y), o in cat_orders.items()})
        nxt += len(cat_labels)
    g = Mixture.from_maps(labels, orders)
    target = rng.choice([v for v in sub_labels if v != s])
    deltas = [
        StepDelta(((anchor, c, 1, 0), pair(c, target) + (0, 1))),
        StepDelta((pair(b, s) + (1, 0), pair(anchor, s) + (0, 1))),
    ]
    heavy = [v for v in sub_labels if v != s]
    if len(heavy) >= 2 and rng.random() < 0.6:
        x, y = pair(*rng.sample(heavy, 2))
        state = dict(orders)
        state.pop(pair(anchor, c))
        state[pair(target, c)] = 1
        state.pop(pair(b, s))
        state[pair(anchor, s)] = 1
        old = state.get((x, y), 0)
        new = rng.choice([o for o in (0, 1, 2) if o != old])
        deltas.append(StepDelta(((x, y, old, new),)))
    return Mechanism.from_deltas(g, deltas)


# -- oracles --------------------------------------------------------------------------

def brute_force_monomorphisms(pattern: Mixture, host: Mixture, forbidden=()) -> list[dict]:
    pids = pattern.atom_ids()
    out = []
    for image in itertools.permutations(host.atom_ids(), len(pids)):
        m = dict(zip(pids, image))
        if any(pattern.label(v) != host.label(m[v]) for v in pids):
            continue
        if any(host.order(m[a], m[b]) != o for (a, b), o in pattern.orders.items()):
            continue
        if any(host.order(m[a], m[b]) for a, b in forbidden):
            continue
        out.append(m)
    out.sort(key=lambda m: tuple(m[k] for k in pids))
    return out


def to_nx(g: Mixture) -> nx.Graph:
    G = nx.Graph()
    for v, lab in g.labels.items():
        G.add_node(v, label=lab)
    for (a, b), o in g.orders.items():
        G.add_edge(a, b, order=o)
    return G


def nx_isomorphic(a: Mixture, b: Mixture) -> bool:
    return nx.is_isomorphic(to_nx(a), to_nx(b), node_match=lambda x, y: x["label"] == y["label"],
                            edge_match=lambda x, y: x["order"] == y["order"])


def nx_rules_isomorphic(r1: Rule, r2: Rule) -> bool:
    def graph(r):
        nodes, edges = rule_graph(r)
        G = nx.Graph()
        for v, lab in nodes.items():
            G.add_node(v, label=lab)
        for (a, b), lab in edges.items():
            G.add_edge(a, b, label=lab)
        return G
    same = lambda x, y: x["label"] == y["label"]  # noqa: E731
    return nx.is_isomorphic(graph(r1), graph(r2), node_match=same, edge_match=same)


def naive_apply(rule: Rule, host: Mixture, match: dict) -> Mixture:
    """Edit script: drop deleted atoms and L-only bonds, add R-only bonds, relabel."""
    labels = dict(host.labels)
    orders = dict(host.orders)
    for (a, b) in rule.left.orders:
        orders.pop(pair(match[a], match[b]))
    for v in rule.deleted_atoms:
        labels.pop(match[v])
    names = {v: match[v] for v in rule.context_atoms}
    fresh = max(host.labels, default=-1) + 1
    for v in sorted(rule.created_atoms):
        names[v] = fresh
        fresh += 1
    for v, lab in rule.right.labels.items():
        labels[names[v]] = lab
    for (a, b), o in rule.right.orders.items():
        orders[pair(names[a], names[b])] = o
    return Mixture.from_maps(labels, orders)


def history_rule(m: Mechanism) -> Rule:
    """Overlay rule rebuilt from the stage graphs with nothing but set arithmetic."""
    stages = [m.educts] + [d.result for d in m.derivations]
    changed = set()
    atoms = set()
    for before, after in zip(stages, stages[1:]):
        for p in set(before.orders) | set(after.orders):
            if before.order(*p) != after.order(*p):
                changed.add(p)
                atoms.update(p)
        for v in before.labels:
            if before.label(v) != after.label(v):
                atoms.add(v)
    first, last = stages[0], stages[-1]
    left, right, k, nb = {}, {}, set(), set()
    for p in changed:
        h = [g.order(*p) for g in stages]
        if h[0]:
            left[p] = h[0]
        if h[-1]:
            right[p] = h[-1]
        n_changes = sum(x != y for x, y in zip(h, h[1:]))
        if min(h) > 0 and n_changes <= 1:
            k.add(p)
        if h[0] == 0 and h[-1] == 0:
            nb.add(p)
    return Rule(Mixture.from_maps({v: first.label(v) for v in atoms}, left),
                Mixture.from_maps({v: last.label(v) for v in atoms}, right),
                frozenset(atoms), frozenset(k), frozenset(nb), frozenset(nb))
