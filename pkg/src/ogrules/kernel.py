"""Embedding search over small labeled graphs.

The backtracking loop lives in ``_kernel`` (Cython) with ``_kernel_py`` as the
pure-Python fallback. The compiled module is used when it imports and
``OGRULES_PURE_PYTHON`` is unset. Everything above the loop (label interning,
CSR encoding, search order) is shared here so both backends see identical input.
"""
from __future__ import annotations

import os
import threading
from typing import Hashable, Iterable, Mapping

import numpy as np

from . import _kernel_py

try:
    if os.environ.get("OGRULES_PURE_PYTHON"):
        raise ImportError("pure python requested")
    from . import _kernel as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def get_backend(name: str | None = None):
    """Return the embedding function for ``name`` ("cython", "python" or default)."""
    if name is None:
        name = BACKEND
    if name == "python":
        return _kernel_py.embeddings
    if name == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernel is not available")
        return _compiled.embeddings
    raise ValueError(f"unknown backend {name!r}")


_labels: dict[Hashable, int] = {}
_labels_lock = threading.Lock()


def intern(label: Hashable) -> int:
    try:
        return _labels[label]
    except KeyError:
        with _labels_lock:
            return _labels.setdefault(label, len(_labels))


class LabeledGraph:
    """Undirected graph with hashable node and edge labels, indexed 0..n-1.

    ``ids`` keeps the caller's node identifiers; embeddings are reported in
    terms of them.
    """

    __slots__ = ("ids", "index", "labels", "adj", "n_edges", "_host", "_label_counts")

    def __init__(self, nodes: Mapping[int, Hashable], edges: Mapping[tuple[int, int], Hashable]):
        self.ids = tuple(sorted(nodes))
        self.index = {v: i for i, v in enumerate(self.ids)}
        self.labels = np.array([intern(nodes[v]) for v in self.ids], dtype=np.int32)
        adj: list[dict[int, int]] = [{} for _ in self.ids]
        for (a, b), lab in edges.items():
            i, j = self.index[a], self.index[b]
            code = intern(lab)
            adj[i][j] = code
            adj[j][i] = code
        self.adj = adj
        self.n_edges = len(edges)
        self._host = None
        self._label_counts = None

    def __len__(self):
        return len(self.ids)

    def label_counts(self) -> dict[int, int]:
        if self._label_counts is None:
            counts: dict[int, int] = {}
            for lab in self.labels.tolist():
                counts[lab] = counts.get(lab, 0) + 1
            self._label_counts = counts
        return self._label_counts

    def host_arrays(self):
        if self._host is None:
            n = len(self.ids)
            deg = np.array([len(a) for a in self.adj], dtype=np.int32)
            ptr = np.zeros(n + 1, dtype=np.int32)
            ptr[1:] = np.cumsum(deg)
            idx = np.array([j for a in self.adj for j in sorted(a)], dtype=np.int32)
            mat = np.zeros(n * n, dtype=np.int32)
            for i, a in enumerate(self.adj):
                for j, code in a.items():
                    mat[i * n + j] = code + 1
            self._host = (self.labels, deg, ptr, idx, mat)
        return self._host


def _search_order(pattern: LabeledGraph, host: LabeledGraph):
    """Order pattern nodes so that each one, where possible, touches an earlier one."""
    n = len(pattern)
    counts = host.label_counts()
    labels = pattern.labels.tolist()
    rarity = [counts.get(labels[u], 0) for u in range(n)]
    placed = [False] * n
    order: list[int] = []
    parent: list[int] = []
    links = [0] * n
    while len(order) < n:
        best = None
        for u in range(n):
            if placed[u]:
                continue
            key = (-links[u], rarity[u], -len(pattern.adj[u]), u)
            if best is None or key < best[0]:
                best = (key, u)
        u = best[1]
        par = -1
        if links[u]:
            par = min(order.index(w) for w in pattern.adj[u] if placed[w])
            par = order[par]
        placed[u] = True
        order.append(u)
        parent.append(par)
        for w in pattern.adj[u]:
            links[w] += 1
    return order, parent


def embeddings(pattern: LabeledGraph, host: LabeledGraph,
               forbidden: Iterable[tuple[int, int]] = (), limit: int = 0,
               deadline: float = 0.0, backend: str | None = None) -> list[dict[int, int]]:
    """All injective label-preserving maps of ``pattern`` into ``host``.

    Pattern edges must map onto host edges with the same label; ``forbidden``
    pairs (pattern ids) must map onto non-adjacent host nodes. Results are in
    search order; callers sort them. Raises ``TimeoutError`` past ``deadline``
    (a ``time.monotonic`` value, 0 for none).
    """
    n_p = len(pattern)
    if n_p > len(host):
        return []
    if n_p:
        counts = host.label_counts()
        for lab, c in pattern.label_counts().items():
            if counts.get(lab, 0) < c:
                return []
    order, parent = _search_order(pattern, host)
    deg = np.array([len(a) for a in pattern.adj], dtype=np.int32)
    ptr = np.zeros(n_p + 1, dtype=np.int32)
    ptr[1:] = np.cumsum(deg)
    p_idx = np.array([j for a in pattern.adj for j in sorted(a)], dtype=np.int32)
    p_elab = np.array([a[j] for a in pattern.adj for j in sorted(a)], dtype=np.int32)
    forb: list[list[int]] = [[] for _ in range(n_p)]
    for a, b in forbidden:
        i, j = pattern.index[a], pattern.index[b]
        forb[i].append(j)
        forb[j].append(i)
    f_ptr = np.zeros(n_p + 1, dtype=np.int32)
    f_ptr[1:] = np.cumsum([len(f) for f in forb])
    f_idx = np.array([j for f in forb for j in f], dtype=np.int32)
    h_label, h_deg, h_ptr, h_idx, h_mat = host.host_arrays()
    fn = get_backend(backend)
    raw = fn(np.array(order, dtype=np.int32), np.array(parent, dtype=np.int32),
             pattern.labels, deg, ptr, p_idx, p_elab, f_ptr, f_idx,
             h_label, h_deg, h_ptr, h_idx, h_mat, int(limit), float(deadline))
    pids, hids = pattern.ids, host.ids
    return [{pids[i]: hids[t[i]] for i in range(n_p)} for t in raw]
