"""Partition scoring and KE-plot cluster geometry.

Modularity is the weighted form: strengths replace degrees and the total
edge weight ``W`` replaces the edge count, so ``2m`` becomes ``2W``.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .centrality import DEFAULT_MAX_ITER, DEFAULT_TOL, KatzParams, KEPlot, ke_points
from .errors import DomainError, GeometryError
from .graph import Graph, degrees
from .netgen import AdHocSpec, adhoc_modular, density_ratio
from .partition import Partition

logger = logging.getLogger(__name__)

__all__ = [
    "ModularityReport",
    "ClusterGeometry",
    "SweepRow",
    "modularity",
    "modularity_max",
    "score",
    "cluster_geometry",
    "sweep_experiment",
    "write_sweep_csv",
    "SWEEP_COLUMNS",
]


def _community_totals(g: Graph, part: Partition) -> tuple[float, np.ndarray]:
    if g.m == 0:
        raise DomainError("modularity is undefined for a graph without edges")
    if part.n != g.n:
        raise DomainError(f"partition covers {part.n} nodes, graph has {g.n}")
    two_w = 2.0 * g.total_weight
    tot = np.bincount(part.labels, weights=degrees(g), minlength=part.k)
    return two_w, tot


def modularity(g: Graph, part: Partition) -> float:
    """Observed within-community weight fraction minus its null-model expectation."""
    two_w, tot = _community_totals(g, part)
    u, v, w = g.edges()
    inside = 2.0 * float(w[part.labels[u] == part.labels[v]].sum())
    return inside / two_w - float(np.sum((tot / two_w) ** 2))


def modularity_max(g: Graph, part: Partition) -> float:
    """Modularity the same classes would reach if every edge stayed inside one."""
    two_w, tot = _community_totals(g, part)
    return 1.0 - float(np.sum((tot / two_w) ** 2))


@dataclass(frozen=True)
class ModularityReport:
    q: float
    q_max: float
    q_normalized: float | None
    k: int

    def as_dict(self) -> dict:
        return {"q": self.q, "q_max": self.q_max, "q_normalized": self.q_normalized, "k": self.k}


def score(g: Graph, part: Partition) -> ModularityReport:
    """Q, Q_max and their ratio; the ratio is ``None`` when ``Q_max`` is not positive."""
    q = modularity(g, part)
    q_max = modularity_max(g, part)
    ratio = q / q_max if q_max > 1e-15 else None
    return ModularityReport(q, q_max, ratio, part.k)


@dataclass(frozen=True)
class ClusterGeometry:
    theta_deg: float
    base_distance: float
    length_ratio: float


def _line_angle(x, y, through_origin):
    if through_origin:
        # atan(sum(xy)/sum(x^2)), written with atan2 so a vertical cluster gives 90
        return math.degrees(math.atan2(float(x @ y), float(x @ x)))
    if np.ptp(x) == 0:
        return 90.0
    slope = np.polyfit(x, y, 1)[0]
    return math.degrees(math.atan(slope))


def cluster_geometry(
    plot: KEPlot,
    part: Partition,
    sparse_first: bool | None = None,
    through_origin: bool = True,
) -> ClusterGeometry:
    """Angle between fitted lines, base distance and length ratio of two clusters.

    ``sparse_first`` names the sparse cluster: ``True`` for community 0,
    ``False`` for community 1, ``None`` to take the one with the shorter
    bounding-box diagonal. The length ratio is sparse over dense.
    """
    if part.k != 2:
        raise DomainError(f"cluster geometry needs exactly 2 communities, got {part.k}")
    if part.n != plot.n:
        raise DomainError("partition and KE plot differ in size")
    pts = np.column_stack([plot.x, plot.y])
    angle, base, length = [], [], []
    for c in (0, 1):
        p = pts[part.labels == c]
        if np.unique(p, axis=0).shape[0] < 2:
            raise GeometryError(f"cluster {c} has fewer than two distinct points")
        angle.append(_line_angle(p[:, 0], p[:, 1], through_origin))
        r = np.hypot(p[:, 0], p[:, 1])
        base.append(p[r <= np.median(r)].mean(axis=0))
        length.append(float(np.hypot(*np.ptp(p, axis=0))))
    if sparse_first is None:
        sparse_first = length[0] <= length[1]
    lsparse, ldense = (length[0], length[1]) if sparse_first else (length[1], length[0])
    return ClusterGeometry(
        theta_deg=abs(angle[0] - angle[1]),
        base_distance=float(np.linalg.norm(base[0] - base[1])),
        length_ratio=lsparse / ldense,
    )


SWEEP_COLUMNS = [
    "param", "mu", "density_ratio_mean", "q_mean", "qmax_mean",
    "theta_mean", "theta_std", "dist_mean", "dist_std",
    "lenratio_mean", "lenratio_std", "seeds",
]


@dataclass(frozen=True)
class SweepRow:
    param: tuple[float, float]
    mu: int
    density_ratio_mean: float
    q_mean: float
    qmax_mean: float
    theta_mean: float
    theta_std: float
    dist_mean: float
    dist_std: float
    lenratio_mean: float
    lenratio_std: float
    seeds: int
    errors: tuple[str, ...] = ()

    @property
    def qnorm_mean(self) -> float:
        return self.q_mean / self.qmax_mean if self.qmax_mean > 0 else math.nan

    @property
    def ok(self) -> bool:
        return self.seeds > 0


def _cell(args):
    model, n1, n2, param, mu, seed, kp, tol, max_iter = args
    spec = AdHocSpec(model, n1, n2, param[0], param[1], mu, seed)
    lg = adhoc_modular(spec)
    plot = ke_points(lg.graph, kp, tol, max_iter)
    geom = cluster_geometry(plot, lg.truth, sparse_first=lg.rho1 <= lg.rho2)
    rep = score(lg.graph, lg.truth)
    return density_ratio(lg), rep.q, rep.q_max, geom.theta_deg, geom.base_distance, geom.length_ratio


def _std(a):
    return float(np.std(a, ddof=1)) if len(a) > 1 else math.nan


def sweep_experiment(
    model: str,
    grid,
    n1: int,
    n2: int,
    seeds: int,
    kp: KatzParams = KatzParams(),
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    workers: int = 1,
) -> list[SweepRow]:
    """KE geometry of ad-hoc networks over a grid of block parameters and ``mu``.

    ``grid`` is a sequence of ``((param1, param2), mu)`` pairs; seed ``s`` of
    every cell uses generator seed ``s``. Geometry is measured against the
    ground-truth blocks, with the sparse one taken from the pre-join
    densities. A failing (cell, seed) is logged and left out of that cell's
    aggregate rather than stopping the sweep; its message lands in
    ``SweepRow.errors``.
    """
    if seeds < 2:
        raise DomainError(f"sweep needs at least 2 seeds, got {seeds}")
    grid = [((float(p[0]), float(p[1])), int(mu)) for p, mu in grid]
    jobs = [
        (model, n1, n2, param, mu, s, kp, tol, max_iter)
        for param, mu in grid for s in range(seeds)
    ]
    results: list = [None] * len(jobs)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_cell, job) for job in jobs]
            for i, f in enumerate(futures):
                try:
                    results[i] = f.result()
                except Exception as exc:  # recorded per cell
                    results[i] = exc
    else:
        for i, job in enumerate(jobs):
            try:
                results[i] = _cell(job)
            except Exception as exc:  # recorded per cell
                results[i] = exc

    rows = []
    for c, (param, mu) in enumerate(grid):
        cell = results[c * seeds:(c + 1) * seeds]
        good = np.array([r for r in cell if not isinstance(r, Exception)], dtype=float).reshape(-1, 6)
        errs = tuple(f"seed {s}: {r}" for s, r in enumerate(cell) if isinstance(r, Exception))
        for e in errs:
            logger.warning("sweep cell param=%s mu=%d failed: %s", param, mu, e)
        mean = good.mean(axis=0) if len(good) else np.full(6, math.nan)
        rows.append(SweepRow(
            param, mu,
            density_ratio_mean=float(mean[0]), q_mean=float(mean[1]), qmax_mean=float(mean[2]),
            theta_mean=float(mean[3]), theta_std=_std(good[:, 3]),
            dist_mean=float(mean[4]), dist_std=_std(good[:, 4]),
            lenratio_mean=float(mean[5]), lenratio_std=_std(good[:, 5]),
            seeds=len(good), errors=errs,
        ))
    return rows


def _fmt_param(param):
    return ":".join(f"{int(p)}" if float(p).is_integer() else repr(float(p)) for p in param)


def write_sweep_csv(rows: list[SweepRow], fh: TextIO, with_errors: bool = False) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS + (["errors"] if with_errors else []))
    for r in rows:
        line = [_fmt_param(r.param), r.mu] + [
            repr(float(getattr(r, col))) for col in SWEEP_COLUMNS[2:-1]
        ] + [r.seeds]
        if with_errors:
            line.append("; ".join(r.errors))
        writer.writerow(line)
