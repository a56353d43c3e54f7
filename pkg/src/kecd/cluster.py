"""Line-sweep clustering of a KE plot.

A line through the origin at angle phi is swept over [0, 90] degrees. For
each angle the cost is the sum of squared orthogonal distances of the
points lying within ``w`` of the line. Local minima of the smoothed cost
become sector boundaries, and each node is labeled by the sector its own
polar angle falls in.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import NamedTuple, TextIO

import numpy as np

from .centrality import DEFAULT_MAX_ITER, DEFAULT_TOL, KatzParams, KEPlot, ke_points
from .errors import DomainError
from .graph import Graph
from .partition import Partition

logger = logging.getLogger(__name__)

__all__ = [
    "ClusterParams",
    "SweepProfile",
    "Detection",
    "orth_sq_distance",
    "sweep_cost",
    "find_minima",
    "assign_clusters",
    "prune_empty_sectors",
    "detect_communities",
]

# points scored per vectorized block in sweep_cost
_POINT_BLOCK = 1 << 15
# atan2 rounding puts points of an exact ray ~1e-14 deg either side of it
ANGLE_TOL = 1e-9


@dataclass(frozen=True)
class ClusterParams:
    """Sweep hyperparameters.

    w           -- orthogonal-distance window, in normalized KE units
    phi_step    -- sweep granularity in degrees
    smooth_window -- moving-average width in samples (odd)
    prominence  -- minimum dip depth as a fraction of the smoothed maximum
    """

    w: float = 0.01
    phi_step: float = 0.5
    smooth_window: int = 5
    prominence: float = 0.05

    def __post_init__(self):
        if not self.w > 0:
            raise DomainError(f"w must be > 0, got {self.w}")
        if not 0 < self.phi_step <= 90:
            raise DomainError(f"phi_step must lie in (0, 90], got {self.phi_step}")
        if int(self.smooth_window) != self.smooth_window or self.smooth_window < 1 or self.smooth_window % 2 == 0:
            raise DomainError(f"smooth_window must be an odd positive integer, got {self.smooth_window}")
        if not self.prominence >= 0:
            raise DomainError(f"prominence must be >= 0, got {self.prominence}")


@dataclass(frozen=True)
class SweepProfile:
    angles: np.ndarray
    cost_raw: np.ndarray
    cost_smoothed: np.ndarray
    minima: tuple[float, ...] = field(default=())

    def write_csv(self, fh: TextIO) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["phi_deg", "cost_raw", "cost_smoothed"])
        for row in zip(self.angles.tolist(), self.cost_raw.tolist(), self.cost_smoothed.tolist()):
            writer.writerow([repr(v) for v in row])


class Detection(NamedTuple):
    partition: Partition
    plot: KEPlot
    profile: SweepProfile


def orth_sq_distance(x, y, phi):
    """Squared distance from ``(x, y)`` to the line through the origin at ``phi`` degrees."""
    t = np.radians(phi)
    return (y * np.cos(t) - x * np.sin(t)) ** 2


def sweep_angles(phi_step: float) -> np.ndarray:
    count = int(np.floor(90.0 / phi_step + 1e-9)) + 1
    return phi_step * np.arange(count)


def moving_average(values: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average; the ends are padded by reflection."""
    n = values.size
    if n == 0:
        return values.copy()
    window = min(window, n if n % 2 else n - 1)
    half = window // 2
    if half == 0:
        return values.astype(float).copy()
    padded = np.pad(values, half, mode="reflect")
    return np.convolve(padded, np.full(window, 1.0 / window), mode="valid")


def sweep_cost(plot: KEPlot, p: ClusterParams = ClusterParams()) -> SweepProfile:
    """Windowed orthogonal-distance cost for every sweep angle, raw and smoothed.

    A point at radius ``r`` and angle ``psi`` lies within ``w`` of the line
    at ``phi`` only if ``|phi - psi| <= asin(w / r)``, so each point is
    scored against just the sweep angles in that range (widened by one
    sample and then filtered exactly).
    """
    if plot.n == 0:
        raise DomainError("cannot sweep an empty KE plot")
    angles = sweep_angles(p.phi_step)
    t = np.radians(angles)
    cos_t, sin_t = np.cos(t), np.sin(t)
    w2 = p.w * p.w
    cost = np.zeros(angles.size)
    for start in range(0, plot.n, _POINT_BLOCK):
        x = plot.x[start:start + _POINT_BLOCK]
        y = plot.y[start:start + _POINT_BLOCK]
        r = np.hypot(x, y)
        with np.errstate(divide="ignore", over="ignore"):
            reach = np.degrees(np.arcsin(np.minimum(1.0, p.w / r)))
        psi = np.degrees(np.arctan2(y, x))
        lo = np.clip(np.floor((psi - reach) / p.phi_step).astype(np.int64) - 1, 0, angles.size - 1)
        hi = np.clip(np.ceil((psi + reach) / p.phi_step).astype(np.int64) + 1, 0, angles.size - 1)
        counts = hi - lo + 1
        point = np.repeat(np.arange(x.size), counts)
        offset = np.arange(point.size) - np.repeat(np.cumsum(counts) - counts, counts)
        ai = lo[point] + offset
        d = y[point] * cos_t[ai] - x[point] * sin_t[ai]
        d *= d
        keep = d <= w2
        cost += np.bincount(ai[keep], weights=d[keep], minlength=angles.size)
    return SweepProfile(angles, cost, moving_average(cost, p.smooth_window))


def _prominence(s: np.ndarray, left: int, right: int) -> float:
    # depth of the basin s[left..right] (a plateau of equal values): climb each
    # side until a strictly lower value or the range end, keep the lower of
    # the two highest points reached
    v = s[left]
    hi_left = v
    for j in range(left - 1, -1, -1):
        if s[j] < v:
            break
        hi_left = max(hi_left, s[j])
    hi_right = v
    for j in range(right + 1, s.size):
        if s[j] < v:
            break
        hi_right = max(hi_right, s[j])
    return min(hi_left, hi_right) - v


def find_minima(profile: SweepProfile, p: ClusterParams = ClusterParams()) -> list[float]:
    """Interior local minima of the smoothed cost, deep enough to count.

    A run of equal values counts as one minimum at its middle sample
    (rounded down). Runs touching either end of the sweep never count.
    """
    s = profile.cost_smoothed
    n = s.size
    if n < 3:
        return []
    threshold = p.prominence * float(s.max())
    found = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and s[j + 1] == s[i]:
            j += 1
        if i > 0 and j < n - 1 and s[i - 1] > s[i] and s[j + 1] > s[j]:
            if _prominence(s, i, j) >= threshold:
                found.append(float(profile.angles[(i + j) // 2]))
        i = j + 1
    return found


def _sector_index(boundaries: np.ndarray, psi: np.ndarray) -> np.ndarray:
    return np.searchsorted(boundaries, psi - ANGLE_TOL, side="left")


def assign_clusters(plot: KEPlot, boundaries) -> Partition:
    """Label each node by the angular sector containing its point.

    The raw sector index is the number of boundaries strictly below the
    point's angle, so a point on a boundary (within ``ANGLE_TOL`` degrees)
    joins the lower sector.
    Sectors are then renumbered largest first; empty sectors disappear.
    """
    b = np.asarray(sorted(boundaries), dtype=float)
    at_origin = (plot.x == 0) & (plot.y == 0)
    if at_origin.any():
        logger.warning("%d node(s) at the KE origin assigned to sector 0", int(at_origin.sum()))
    sector = _sector_index(b, plot.angles())
    sector[at_origin] = 0
    return Partition.from_labels(sector)


def prune_empty_sectors(plot: KEPlot, boundaries, profile: SweepProfile | None = None) -> list[float]:
    """Drop boundaries until every angular sector holds at least one point.

    A tight cluster produces a dip in the cost at its own angle, which
    yields a boundary with no points between it and the neighboring one.
    Of two boundaries enclosing an empty sector the one with the higher
    smoothed cost goes; an empty outermost sector drops its inner boundary.
    """
    b = sorted(float(x) for x in boundaries)
    psi = plot.angles()

    def cost_at(angle):
        if profile is None:
            return 0.0
        return float(profile.cost_smoothed[np.argmin(np.abs(profile.angles - angle))])

    while b:
        counts = np.bincount(_sector_index(np.asarray(b), psi), minlength=len(b) + 1)
        empty = np.flatnonzero(counts == 0)
        if empty.size == 0:
            break
        j = int(empty[0])
        if j == 0:
            del b[0]
        elif j == len(b):
            del b[-1]
        elif cost_at(b[j - 1]) > cost_at(b[j]):
            del b[j - 1]
        else:
            del b[j]
    return b


def detect_communities(
    g: Graph,
    kp: KatzParams = KatzParams(),
    cp: ClusterParams = ClusterParams(),
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    per_component: bool = True,
) -> Detection:
    """KE plot, cost sweep, minima and sector assignment in one call.

    The returned profile's ``minima`` holds the boundaries actually used,
    so ``partition.k == len(profile.minima) + 1``.
    """
    if g.m == 0:
        raise DomainError("community detection needs at least one edge")
    plot = ke_points(g, kp, tol, max_iter, per_component)
    profile = sweep_cost(plot, cp)
    boundaries = prune_empty_sectors(plot, find_minima(profile, cp), profile)
    partition = assign_clusters(plot, boundaries)
    profile = SweepProfile(profile.angles, profile.cost_raw, profile.cost_smoothed, tuple(boundaries))
    return Detection(partition, plot, profile)
