"""Immutable undirected weighted graph in compressed neighbor-list form.

Nodes are dense integers ``0..n-1``. The original identifiers seen while
parsing are kept in :attr:`Graph.ids` so every numeric output can be mapped
back through a sidecar table.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from collections.abc import Iterable
from typing import TextIO

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .errors import DomainError, ParseError

logger = logging.getLogger(__name__)

__all__ = [
    "Graph",
    "parse_edge_list",
    "read_edge_list",
    "format_edge_list",
    "write_identifier_table",
    "degrees",
    "density",
    "induced_subgraph",
    "connected_components",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


class Graph:
    """Undirected simple graph with strictly positive edge weights.

    Adjacency is stored symmetrically in CSR arrays: the neighbors of node
    ``i`` are ``indices[indptr[i]:indptr[i+1]]`` with matching ``weights``.
    Instances are read-only; use :meth:`from_edges` to build one.
    """

    __slots__ = ("indptr", "indices", "weights", "ids", "dropped_self_loops")

    def __init__(self, indptr, indices, weights, ids, dropped_self_loops=0):
        object.__setattr__(self, "indptr", _frozen(np.asarray(indptr, dtype=np.int64)))
        object.__setattr__(self, "indices", _frozen(np.asarray(indices, dtype=np.int64)))
        object.__setattr__(self, "weights", _frozen(np.asarray(weights, dtype=np.float64)))
        object.__setattr__(self, "ids", tuple(str(i) for i in ids))
        object.__setattr__(self, "dropped_self_loops", int(dropped_self_loops))
        if len(self.ids) != len(self.indptr) - 1:
            raise DomainError("identifier table length does not match node count")

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    @classmethod
    def from_edges(cls, n, src, dst, weight=None, ids=None) -> "Graph":
        """Build a graph on ``n`` nodes from parallel endpoint arrays.

        Self-loops are dropped (the count is kept on the instance) and
        repeated pairs, in either orientation, merge by summing weights.
        """
        n = int(n)
        if n < 0:
            raise DomainError("node count must be non-negative")
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise DomainError("src and dst must have equal length")
        if weight is None:
            w = np.ones(src.shape, dtype=np.float64)
        else:
            w = np.asarray(weight, dtype=np.float64).ravel()
            if w.shape != src.shape:
                raise DomainError("weight must match src/dst length")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise DomainError("edge weights must be finite and strictly positive")
        if src.size and (src.min() < 0 or dst.min() < 0 or max(src.max(), dst.max()) >= n):
            raise DomainError("edge endpoint out of range")
        if ids is None:
            ids = [str(i) for i in range(n)]

        loops = src == dst
        dropped = int(loops.sum())
        if dropped:
            src, dst, w = src[~loops], dst[~loops], w[~loops]
        lo = np.minimum(src, dst)
        hi = np.maximum(src, dst)
        key = lo * max(n, 1) + hi
        ukey, inverse = np.unique(key, return_inverse=True)
        wsum = np.bincount(inverse, weights=w, minlength=ukey.size) if ukey.size else w[:0]
        lo = ukey // max(n, 1)
        hi = ukey % max(n, 1)

        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        vals = np.concatenate([wsum, wsum])
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return cls(indptr, cols, vals, ids, dropped)

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    @property
    def total_weight(self) -> float:
        u, v, w = self.edges()
        return float(w.sum())

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        if not 0 <= i < self.n:
            raise DomainError(f"node {i} out of range")
        a, b = self.indptr[i], self.indptr[i + 1]
        return self.indices[a:b], self.weights[a:b]

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Each undirected edge once, as ``(u, v, w)`` arrays with ``u < v``."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        keep = rows < self.indices
        return rows[keep], self.indices[keep], self.weights[keep]

    def adjacency(self) -> sp.csr_matrix:
        """Weighted adjacency as a fresh scipy CSR matrix."""
        return sp.csr_matrix(
            (self.weights.copy(), self.indices.copy(), self.indptr.copy()),
            shape=(self.n, self.n),
        )

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.ids == other.ids
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m}, total_weight={self.total_weight:g})"


def _node_order(ids: list[str]) -> list[str]:
    # all-integer identifiers keep their numeric order so "0".."n-1" map to themselves
    try:
        as_int = [int(t) for t in ids]
    except ValueError:
        return ids
    return [t for _, t in sorted(zip(as_int, ids))]


def parse_edge_list(text: str | Iterable[str], weighted: bool = True) -> Graph:
    """Parse whitespace-delimited ``u v [w]`` lines into a :class:`Graph`.

    Lines starting with ``#`` and blank lines are skipped. With
    ``weighted=False`` a third column is still validated but every edge gets
    weight 1. Dense indices follow numeric order when every identifier is an
    integer and first-appearance order otherwise.

    Raises
    ------
    ParseError
        On a wrong token count, a non-numeric weight or a weight <= 0.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    seen: dict[str, None] = {}
    src: list[str] = []
    dst: list[str] = []
    wts: list[float] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        if len(tok) not in (2, 3):
            raise ParseError(lineno, f"expected 'u v' or 'u v w', got {len(tok)} tokens")
        w = 1.0
        if len(tok) == 3:
            try:
                w = float(tok[2])
            except ValueError:
                raise ParseError(lineno, f"non-numeric weight {tok[2]!r}") from None
            if not math.isfinite(w) or w <= 0:
                raise ParseError(lineno, f"weight must be a positive finite number, got {tok[2]!r}")
            if not weighted:
                w = 1.0
        seen.setdefault(tok[0])
        seen.setdefault(tok[1])
        src.append(tok[0])
        dst.append(tok[1])
        wts.append(w)

    ids = _node_order(list(seen))
    index = {t: i for i, t in enumerate(ids)}
    g = Graph.from_edges(
        len(ids),
        [index[t] for t in src],
        [index[t] for t in dst],
        wts,
        ids=ids,
    )
    if g.dropped_self_loops:
        logger.warning("dropped %d self-loop line(s)", g.dropped_self_loops)
    return g


def read_edge_list(path, weighted: bool = True) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh, weighted=weighted)


def format_edge_list(g: Graph) -> str:
    """Serialize ``g`` to edge-list text that :func:`parse_edge_list` reads back.

    Weights are written with ``repr`` precision and omitted entirely when
    every edge has unit weight.
    """
    u, v, w = g.edges()
    out = io.StringIO()
    unit = bool(np.all(w == 1.0))
    ids = g.ids
    for a, b, x in zip(u.tolist(), v.tolist(), w.tolist()):
        if unit:
            out.write(f"{ids[a]} {ids[b]}\n")
        else:
            out.write(f"{ids[a]} {ids[b]} {x!r}\n")
    return out.getvalue()


def write_identifier_table(g: Graph, fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["index", "id"])
    for i, ident in enumerate(g.ids):
        writer.writerow([i, ident])


def degrees(g: Graph) -> np.ndarray:
    """Weighted degree (strength) of every node."""
    rows = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(g.indptr))
    return np.bincount(rows, weights=g.weights, minlength=g.n)


def density(g: Graph) -> float:
    """Fraction of possible node pairs joined by an edge, ``2m / (n(n-1))``."""
    if g.n < 2:
        raise DomainError("density needs at least two nodes")
    return 2.0 * g.m / (g.n * (g.n - 1))


def induced_subgraph(g: Graph, nodes) -> Graph:
    """Subgraph on ``nodes`` (reindexed in ascending order) with all internal edges."""
    keep = np.unique(np.asarray(list(nodes), dtype=np.int64))
    if keep.size and (keep[0] < 0 or keep[-1] >= g.n):
        raise DomainError("node id out of range")
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[keep] = np.arange(keep.size)
    u, v, w = g.edges()
    inside = (remap[u] >= 0) & (remap[v] >= 0)
    return Graph.from_edges(
        keep.size, remap[u[inside]], remap[v[inside]], w[inside],
        ids=[g.ids[i] for i in keep.tolist()],
    )


def connected_components(g: Graph) -> np.ndarray:
    """Component label per node, numbered in order of lowest member index."""
    _, labels = csgraph.connected_components(g.adjacency(), directed=False)
    return labels.astype(np.int64)
