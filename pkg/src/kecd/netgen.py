"""Seeded random graphs and the two-block ad-hoc modular network.

All randomness comes from numpy's PCG64 bit generator seeded through
``SeedSequence``, so a given seed reproduces the same edges on every
platform numpy supports.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError
from .graph import Graph, density
from .partition import Partition

__all__ = ["AdHocSpec", "LabeledGraph", "gen_er", "gen_ba", "adhoc_modular", "density_ratio"]


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    if int(seed) < 0:
        raise DomainError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def _er_edges(n: int, p: float, rng: np.random.Generator):
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"edge probability must lie in [0, 1], got {p}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    src, dst = [], []
    # one uniform draw per unordered pair (i, j>i), row by row
    for i in range(n - 1):
        hits = np.flatnonzero(rng.random(n - 1 - i) < p) + i + 1
        src.append(np.full(hits.size, i, dtype=np.int64))
        dst.append(hits)
    if not src:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    return np.concatenate(src), np.concatenate(dst)


def gen_er(n: int, p: float, seed) -> Graph:
    """Erdős–Rényi G(n, p): every unordered pair is an edge with probability ``p``."""
    src, dst = _er_edges(n, p, _rng(seed))
    return Graph.from_edges(n, src, dst)


def _ba_edges(n: int, q: int, rng: np.random.Generator):
    if not 1 <= q < n:
        raise DomainError(f"Barabási–Albert needs 1 <= q < n, got q={q}, n={n}")
    src: list[int] = []
    dst: list[int] = []
    # seed clique on q+1 nodes gives the first arrival q distinct targets
    for i in range(q + 1):
        for j in range(i + 1, q + 1):
            src.append(i)
            dst.append(j)
    # each node appears once per incident edge, so a uniform pick is degree-proportional
    repeated = [v for i in range(q + 1) for v in [i] * q]
    for new in range(q + 1, n):
        targets: set[int] = set()
        chosen: list[int] = []
        while len(chosen) < q:
            t = repeated[int(rng.integers(len(repeated)))]
            if t not in targets:
                targets.add(t)
                chosen.append(t)
        for t in chosen:
            src.append(new)
            dst.append(t)
        repeated.extend(chosen)
        repeated.extend([new] * q)
    return np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64)


def gen_ba(n: int, q: int, seed) -> Graph:
    """Barabási–Albert preferential attachment grown from a ``K_{q+1}`` seed clique.

    Node ``q+1`` onward each attach ``q`` distinct edges to earlier nodes
    with probability proportional to their current degree, giving
    ``q(q+1)/2 + q(n-q-1)`` edges.
    """
    src, dst = _ba_edges(n, q, _rng(seed))
    return Graph.from_edges(n, src, dst)


@dataclass(frozen=True)
class AdHocSpec:
    """Two random blocks of sizes ``n1``/``n2`` joined by ``mu`` cross edges.

    ``param1``/``param2`` are the edge probability (ER) or attachment count
    (BA) of each block.
    """

    model: Literal["ER", "BA"]
    n1: int
    n2: int
    param1: float
    param2: float
    mu: int
    seed: int = 0

    def __post_init__(self):
        if self.model not in ("ER", "BA"):
            raise DomainError(f"model must be 'ER' or 'BA', got {self.model!r}")
        if self.n1 < 1 or self.n2 < 1:
            raise DomainError("block sizes must be positive")
        for p, n in ((self.param1, self.n1), (self.param2, self.n2)):
            if self.model == "ER" and not 0 <= p <= 1:
                raise DomainError(f"ER edge probability must lie in [0, 1], got {p}")
            if self.model == "BA" and (int(p) != p or not 1 <= p < n):
                raise DomainError(f"BA attachment count must be an integer in [1, n), got {p} for n={n}")
        if self.mu < 0 or self.mu > self.n1 * self.n2:
            raise DomainError(f"mu must lie in [0, n1*n2={self.n1 * self.n2}], got {self.mu}")
        if self.seed < 0:
            raise DomainError("seed must be non-negative")


@dataclass(frozen=True)
class LabeledGraph:
    graph: Graph
    truth: Partition
    rho1: float
    rho2: float
    spec: AdHocSpec | None = None


def _block(model, n, param, seq):
    rng = _rng(seq)
    if model == "ER":
        return _er_edges(n, float(param), rng)
    return _ba_edges(n, int(param), rng)


def adhoc_modular(spec: AdHocSpec) -> LabeledGraph:
    """Generate both blocks, record their densities, then add ``mu`` cross edges.

    Cross edges are ``mu`` distinct (block-1, block-2) pairs drawn uniformly
    without replacement. Block 1 occupies indices ``0..n1-1`` and is
    community 0 of the ground truth.
    """
    s1, s2, s3 = np.random.SeedSequence(spec.seed).spawn(3)
    u1, v1 = _block(spec.model, spec.n1, spec.param1, s1)
    u2, v2 = _block(spec.model, spec.n2, spec.param2, s2)
    g1 = Graph.from_edges(spec.n1, u1, v1)
    g2 = Graph.from_edges(spec.n2, u2, v2)
    rho1 = density(g1) if spec.n1 >= 2 else 0.0
    rho2 = density(g2) if spec.n2 >= 2 else 0.0

    picks = np.sort(_rng(s3).choice(spec.n1 * spec.n2, size=spec.mu, replace=False))
    cu = picks // spec.n2
    cv = picks % spec.n2 + spec.n1
    n = spec.n1 + spec.n2
    g = Graph.from_edges(
        n,
        np.concatenate([u1, u2 + spec.n1, cu]),
        np.concatenate([v1, v2 + spec.n1, cv]),
    )
    truth = Partition(np.repeat(np.array([0, 1]), [spec.n1, spec.n2]))
    return LabeledGraph(g, truth, rho1, rho2, spec)


def density_ratio(lg: LabeledGraph) -> float:
    """Density of the sparser block over that of the denser one (both pre-join)."""
    if lg.rho1 <= 0 or lg.rho2 <= 0:
        raise DomainError("both blocks need a positive density")
    return min(lg.rho1, lg.rho2) / max(lg.rho1, lg.rho2)
