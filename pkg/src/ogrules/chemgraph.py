"""Molecular graphs: atoms with element and charge, bonds with integer order.

A :class:`Mixture` is an immutable, possibly disconnected graph whose connected
components are molecules. Atom maps are plain ``dict[int, int]``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import kernel

ELEMENTS = ("H", "B", "C", "N", "O", "F", "Si", "P", "S", "Cl", "Br", "I")
MIN_CHARGE, MAX_CHARGE = -4, 4
BOND_ORDERS = (1, 2, 3)

AtomMap = dict


class GraphError(ValueError):
    """Structurally invalid graph input."""


@dataclass(frozen=True, order=True)
class Atom:
    id: int
    element: str
    charge: int = 0

    def __post_init__(self):
        if not isinstance(self.id, int) or self.id < 0:
            raise GraphError(f"atom id must be a non-negative integer, got {self.id!r}")
        if self.element not in ELEMENTS:
            raise GraphError(f"unsupported element {self.element!r}")
        if not MIN_CHARGE <= self.charge <= MAX_CHARGE:
            raise GraphError(f"charge {self.charge} of atom {self.id} outside [-4, 4]")

    @property
    def label(self) -> tuple[str, int]:
        return (self.element, self.charge)


@dataclass(frozen=True, order=True)
class Bond:
    src: int
    dst: int
    order: int = 1

    def __post_init__(self):
        if self.src == self.dst:
            raise GraphError(f"self-loop on atom {self.src}")
        if self.order not in BOND_ORDERS:
            raise GraphError(f"bond order {self.order} not in {{1, 2, 3}}")

    @property
    def pair(self) -> tuple[int, int]:
        return pair(self.src, self.dst)


def pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


class Mixture:
    """Immutable molecular graph.

    Construct from atoms and bonds, or from label/order mappings with
    :meth:`from_maps`. Equality is id-exact; use :func:`is_isomorphic` for
    structural comparison.
    """

    __slots__ = ("_labels", "_bonds", "_adj", "_hash", "_lg", "_digest")

    def __init__(self, atoms: Iterable[Atom] = (), bonds: Iterable[Bond] = ()):
        labels: dict[int, tuple[str, int]] = {}
        for a in atoms:
            if a.id in labels:
                raise GraphError(f"duplicate atom id {a.id}")
            labels[a.id] = a.label
        orders: dict[tuple[int, int], int] = {}
        for b in bonds:
            p = b.pair
            if p[0] not in labels or p[1] not in labels:
                raise GraphError(f"bond {p} references a missing atom")
            if p in orders:
                raise GraphError(f"parallel bond between atoms {p[0]} and {p[1]}")
            orders[p] = b.order
        self._init(labels, orders)

    def _init(self, labels, orders):
        self._labels = labels
        self._bonds = orders
        adj: dict[int, dict[int, int]] = {v: {} for v in labels}
        for (a, b), o in orders.items():
            adj[a][b] = o
            adj[b][a] = o
        self._adj = adj
        self._hash = None
        self._lg = None
        self._digest = None

    @classmethod
    def from_maps(cls, labels: Mapping[int, tuple[str, int]],
                  orders: Mapping[tuple[int, int], int]) -> "Mixture":
        atoms = [Atom(v, el, ch) for v, (el, ch) in labels.items()]
        bonds = [Bond(a, b, o) for (a, b), o in orders.items()]
        return cls(atoms, bonds)

    @classmethod
    def _trusted(cls, labels, orders) -> "Mixture":
        # caller guarantees validity; skips per-atom checks on hot paths
        m = cls.__new__(cls)
        m._init(dict(labels), dict(orders))
        return m

    # -- accessors --------------------------------------------------------
    @property
    def atoms(self) -> tuple[Atom, ...]:
        return tuple(Atom(v, *self._labels[v]) for v in sorted(self._labels))

    @property
    def bonds(self) -> tuple[Bond, ...]:
        return tuple(Bond(a, b, o) for (a, b), o in sorted(self._bonds.items()))

    @property
    def labels(self) -> Mapping[int, tuple[str, int]]:
        return self._labels

    @property
    def orders(self) -> Mapping[tuple[int, int], int]:
        return self._bonds

    def atom_ids(self) -> list[int]:
        return sorted(self._labels)

    def __contains__(self, atom_id) -> bool:
        return atom_id in self._labels

    def __len__(self) -> int:
        return len(self._labels)

    def element(self, v: int) -> str:
        return self._labels[v][0]

    def charge(self, v: int) -> int:
        return self._labels[v][1]

    def label(self, v: int) -> tuple[str, int]:
        return self._labels[v]

    def order(self, a: int, b: int) -> int:
        """Bond order between ``a`` and ``b``; 0 when unbonded."""
        return self._adj.get(a, {}).get(b, 0)

    def neighbors(self, v: int) -> dict[int, int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    # -- derived graphs ---------------------------------------------------
    def subgraph(self, ids: Iterable[int]) -> "Mixture":
        keep = set(ids)
        labels = {v: self._labels[v] for v in keep}
        orders = {p: o for p, o in self._bonds.items() if p[0] in keep and p[1] in keep}
        return Mixture._trusted(labels, orders)

    def relabel(self, mapping: Mapping[int, int]) -> "Mixture":
        """Rename atom ids; ``mapping`` must be injective on this graph's ids."""
        labels = {mapping[v]: lab for v, lab in self._labels.items()}
        if len(labels) != len(self._labels):
            raise GraphError("relabelling is not injective")
        orders = {pair(mapping[a], mapping[b]): o for (a, b), o in self._bonds.items()}
        return Mixture._trusted(labels, orders)

    def union(self, other: "Mixture") -> "Mixture":
        if set(self._labels) & set(other._labels):
            raise GraphError("mixtures share atom ids")
        return Mixture._trusted({**self._labels, **other._labels},
                                {**self._bonds, **other._bonds})

    def element_counts(self) -> dict[tuple[str, int], int]:
        counts: dict[tuple[str, int], int] = {}
        for lab in self._labels.values():
            counts[lab] = counts.get(lab, 0) + 1
        return counts

    def bond_signature(self) -> list[tuple]:
        """Sorted multiset of (label, label, order) over bonds."""
        sig = []
        for (a, b), o in self._bonds.items():
            la, lb = sorted((self._labels[a], self._labels[b]))
            sig.append((la, lb, o))
        return sorted(sig)

    def labeled_graph(self) -> kernel.LabeledGraph:
        if self._lg is None:
            self._lg = kernel.LabeledGraph(self._labels, self._bonds)
        return self._lg

    # -- dunder -----------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, Mixture):
            return NotImplemented
        return self._labels == other._labels and self._bonds == other._bonds

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((frozenset(self._labels.items()), frozenset(self._bonds.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Mixture({len(self._labels)} atoms, {len(self._bonds)} bonds)"

    def __getstate__(self):
        return (self._labels, self._bonds)

    def __setstate__(self, state):
        self._init(*state)


EMPTY = Mixture()


def find_monomorphisms(pattern: Mixture, host: Mixture,
                       forbidden_pairs: Iterable[tuple[int, int]] = (),
                       limit: int = 0, deadline: float = 0.0) -> list[dict[int, int]]:
    """Every injective embedding of ``pattern`` into ``host``.

    Elements, charges and bond orders must agree. For each forbidden pair of
    pattern atoms the images must be unbonded. The list is sorted by the tuple
    of images taken in ascending pattern-id order.
    """
    found = kernel.embeddings(pattern.labeled_graph(), host.labeled_graph(),
                              forbidden_pairs, limit=limit, deadline=deadline)
    keys = pattern.atom_ids()
    found.sort(key=lambda m: tuple(m[k] for k in keys))
    return found


def is_isomorphic(a: Mixture, b: Mixture) -> bool:
    if len(a) != len(b) or len(a.orders) != len(b.orders):
        return False
    if a.element_counts() != b.element_counts() or a.bond_signature() != b.bond_signature():
        return False
    if canonical_hash(a) != canonical_hash(b):
        return False
    return bool(kernel.embeddings(a.labeled_graph(), b.labeled_graph(), limit=1))


def isomorphisms(a: Mixture, b: Mixture, limit: int = 0) -> list[dict[int, int]]:
    """All isomorphisms ``a -> b`` in :func:`find_monomorphisms` order."""
    if len(a) != len(b) or len(a.orders) != len(b.orders):
        return []
    return find_monomorphisms(a, b, limit=limit)


def wl_digest(nodes: Mapping[int, object], edges: Mapping[tuple[int, int], object],
              rounds: int | None = None) -> str:
    """Colour-refinement digest of a labeled graph (sha256 hex)."""
    adj: dict[int, list[tuple[int, object]]] = {v: [] for v in nodes}
    for (a, b), lab in edges.items():
        adj[a].append((b, lab))
        adj[b].append((a, lab))
    colour = {v: hashlib.sha256(repr(lab).encode()).hexdigest()[:16] for v, lab in nodes.items()}
    n_classes = len(set(colour.values()))
    for _ in range(rounds if rounds is not None else len(nodes)):
        new = {}
        for v in nodes:
            sig = sorted((repr(lab), colour[w]) for w, lab in adj[v])
            new[v] = hashlib.sha256(repr((colour[v], sig)).encode()).hexdigest()[:16]
        colour = new
        k = len(set(colour.values()))
        if k == n_classes:
            break
        n_classes = k
    edge_cols = sorted(tuple(sorted((colour[a], colour[b]))) + (repr(lab),)
                       for (a, b), lab in edges.items())
    payload = repr((sorted(colour.values()), edge_cols))
    return hashlib.sha256(payload.encode()).hexdigest()


EMPTY_DIGEST = wl_digest({}, {})


def canonical_hash(g: Mixture) -> str:
    """Isomorphism-invariant digest; equal graphs always agree, the converse is not promised.

    The empty mixture hashes to :data:`EMPTY_DIGEST`.
    """
    if g._digest is None:
        g._digest = wl_digest(g.labels, g.orders)
    return g._digest


def components(g: Mixture) -> list[Mixture]:
    """Connected components ordered by their smallest atom id."""
    seen: set[int] = set()
    out = []
    for start in g.atom_ids():
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in g.neighbors(v):
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        out.append(g.subgraph(comp))
    return out
