"""Louvain modularity maximization, KE-guided coarsening, and the timing bench.

The Louvain implementation is the plain two-phase method at resolution 1:
local moves to the neighboring community with the largest modularity gain,
then contraction of communities into super-nodes, repeated until a level
makes no move. A contracted super-node keeps its internal weight as a
self-loop entry ``A_ii = 2 * internal weight`` so strengths and ``2W`` are
preserved across levels.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .centrality import DEFAULT_MAX_ITER, DEFAULT_TOL, KatzParams
from .cluster import ClusterParams, detect_communities
from .errors import DomainError
from .graph import Graph
from .partition import Partition
from .quality import ModularityReport, score

__all__ = ["louvain", "louvain_run", "LouvainRun", "ke_coarsen", "BenchResult", "bench", "bench_json"]

MoveCallback = Callable[[np.ndarray, np.ndarray, float], None]


@dataclass(frozen=True)
class LouvainRun:
    partition: Partition
    q: float  # from the algorithm's own running totals
    levels: int


class _Level:
    __slots__ = ("nbrs", "wts", "loops", "k")

    def __init__(self, nbrs, wts, loops):
        self.nbrs = nbrs
        self.wts = wts
        self.loops = loops
        self.k = [sum(w) + s for w, s in zip(wts, loops)]

    @classmethod
    def from_graph(cls, g: Graph):
        nbrs, wts = [], []
        ip = g.indptr.tolist()
        idx = g.indices.tolist()
        wt = g.weights.tolist()
        for i in range(g.n):
            nbrs.append(idx[ip[i]:ip[i + 1]])
            wts.append(wt[ip[i]:ip[i + 1]])
        return cls(nbrs, wts, [0.0] * g.n)

    def contract(self, comm: list[int], ncomm: int) -> "_Level":
        loops = [0.0] * ncomm
        links: list[dict[int, float]] = [{} for _ in range(ncomm)]
        for i, (ns, ws) in enumerate(zip(self.nbrs, self.wts)):
            ci = comm[i]
            loops[ci] += self.loops[i]
            row = links[ci]
            for j, w in zip(ns, ws):
                cj = comm[j]
                if cj == ci:
                    loops[ci] += w  # each internal edge is seen from both ends
                else:
                    row[cj] = row.get(cj, 0.0) + w
        nbrs = [list(r.keys()) for r in links]
        wts = [list(r.values()) for r in links]
        return _Level(nbrs, wts, loops)


def _one_level(level: _Level, two_w: float, rng, notify) -> tuple[list[int], bool]:
    n = len(level.k)
    comm = list(range(n))
    tot = list(level.k)
    k = level.k
    moved_any = False
    while True:
        moves = 0
        for i in rng.permutation(n).tolist():
            ci = comm[i]
            ki = k[i]
            links: dict[int, float] = {}
            for j, w in zip(level.nbrs[i], level.wts[i]):
                c = comm[j]
                links[c] = links.get(c, 0.0) + w
            tot[ci] -= ki
            scale = ki / two_w
            stay = links.get(ci, 0.0) - tot[ci] * scale
            best, best_gain = ci, stay
            margin = 1e-12 * max(ki, 1e-300)
            for c, w in links.items():
                gain = w - tot[c] * scale
                if gain > best_gain + margin:
                    best, best_gain = c, gain
            tot[best] += ki
            if best != ci:
                if notify is not None:
                    notify(i, ci, best, 2.0 * (best_gain - stay) / two_w)
                comm[i] = best
                moves += 1
        if moves == 0:
            break
        moved_any = True
    return comm, moved_any


def louvain_run(g: Graph, seed: int = 0, on_move: MoveCallback | None = None) -> LouvainRun:
    """Louvain with the internal modularity figure and level count.

    ``on_move(before, after, gain)`` is called for every accepted local
    move with full-resolution labelings before and after it and the
    predicted modularity gain. Node visit order is a fresh seeded shuffle
    on every pass.
    """
    if g.m == 0:
        raise DomainError("Louvain needs at least one edge")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))
    two_w = 2.0 * g.total_weight
    level = _Level.from_graph(g)
    owner = np.arange(g.n)  # original node -> node of the current level
    levels = 0
    while True:
        notify = None
        if on_move is not None:
            current: list[int] = []

            def notify(i, old, new, gain, _owner=owner, _cur=current):
                before = np.asarray(_cur)[_owner]
                _cur[i] = new
                after = np.asarray(_cur)[_owner]
                on_move(before, after, gain)

            # the callback tracks its own copy of the labels; seeded below
            current.extend(range(len(level.k)))
        comm, moved = _one_level(level, two_w, rng, notify)
        if not moved:
            break
        levels += 1
        remap: dict[int, int] = {}
        dense = [remap.setdefault(c, len(remap)) for c in comm]
        owner = np.asarray(dense)[owner]
        level = level.contract(dense, len(remap))

    q = sum(level.loops) / two_w - sum((x / two_w) ** 2 for x in level.k)
    return LouvainRun(Partition.from_labels(owner), float(q), levels)


def louvain(g: Graph, seed: int = 0, on_move: MoveCallback | None = None) -> Partition:
    """Louvain communities of ``g``, deterministic for a given ``seed``."""
    return louvain_run(g, seed, on_move).partition


def ke_coarsen(g: Graph, louvain_part: Partition, ke_part: Partition) -> Partition:
    """Merge each Louvain community whole into the KE community holding most of its members.

    Ties go to the larger KE community, then to the lower KE id. Louvain
    communities are never split, so the result has at most as many
    communities as ``louvain_part``.
    """
    if louvain_part.n != g.n or ke_part.n != g.n:
        raise DomainError("both partitions must cover the graph")
    ke_sizes = ke_part.sizes()
    overlap = np.zeros((louvain_part.k, ke_part.k), dtype=np.int64)
    np.add.at(overlap, (louvain_part.labels, ke_part.labels), 1)
    target = np.empty(louvain_part.k, dtype=np.int64)
    for c in range(louvain_part.k):
        row = overlap[c]
        cand = np.flatnonzero(row == row.max())
        # lexsort keys: last is primary -> larger KE community, then lower id
        target[c] = cand[np.lexsort((cand, -ke_sizes[cand]))[0]]
    return Partition.from_labels(target[louvain_part.labels])


@dataclass(frozen=True)
class BenchResult:
    method: Literal["louvain", "ke"]
    wall_time: float
    report: ModularityReport | None
    k: int
    error: str | None = None

    def as_dict(self) -> dict:
        if self.error is not None:
            return {"error": self.error}
        return {"seconds": self.wall_time, "q": self.report.q, "q_max": self.report.q_max, "k": self.k}


def _timed(method, fn, g):
    try:
        start = time.perf_counter()
        part = fn()
        elapsed = time.perf_counter() - start
        return BenchResult(method, elapsed, score(g, part), part.k), part
    except Exception as exc:  # the other method still runs
        return BenchResult(method, 0.0, None, 0, error=f"{type(exc).__name__}: {exc}"), None


def bench(
    g: Graph,
    kp: KatzParams = KatzParams(),
    cp: ClusterParams = ClusterParams(),
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    max_iter: int = DEFAULT_MAX_ITER,
    per_component: bool = True,
) -> tuple[BenchResult, BenchResult]:
    """Time Louvain and KE detection one after the other on the same graph.

    Scoring happens outside the timed region.
    """
    lv, _ = _timed("louvain", lambda: louvain(g, seed), g)
    ke, _ = _timed("ke", lambda: detect_communities(g, kp, cp, tol, max_iter, per_component).partition, g)
    return lv, ke


def bench_json(g: Graph, results: tuple[BenchResult, BenchResult]) -> str:
    lv, ke = results
    payload = {"network": {"n": g.n, "m": g.m}, "louvain": lv.as_dict(), "ke": ke.as_dict()}
    return json.dumps(payload, indent=2) + "\n"
