"""Eigenvector and Katz centrality by power iteration, and the KE point cloud.

Both solvers start from the all-ones vector and stop when the max-norm of
the difference between successive iterates drops below ``tol``. Katz values
stay unnormalized until :func:`normalize` is applied so they can be compared
against the dense closed form.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field, replace
from typing import Literal, TextIO

import numpy as np

from .errors import ConvergenceError, DivergenceError, DomainError
from .graph import Graph, connected_components

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000
CLOSED_FORM_MAX_N = 2000

__all__ = [
    "CentralityVector",
    "KatzParams",
    "KEPlot",
    "spectral_radius",
    "eigenvector_centrality",
    "katz_centrality",
    "katz_closed_form",
    "normalize",
    "ke_points",
]


@dataclass(frozen=True)
class CentralityVector:
    values: np.ndarray
    kind: Literal["eigenvector", "katz"]
    normalized: bool
    iterations_used: int
    residual: float
    alpha: float | None = None
    warnings: tuple[str, ...] = ()
    eigenvalue: float | None = None

    def __post_init__(self):
        self.values.setflags(write=False)


@dataclass(frozen=True)
class KatzParams:
    """Katz attenuation ``alpha`` and free centrality ``beta``.

    Leaving ``alpha`` as ``None`` derives it per graph as
    ``alpha_fraction / lambda_1``.
    """

    alpha: float | None = None
    beta: float = 1.0
    alpha_fraction: float = 0.5

    def __post_init__(self):
        if self.alpha is not None and not self.alpha >= 0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha}")
        if not self.beta > 0:
            raise DomainError(f"beta must be > 0, got {self.beta}")
        if not 0 < self.alpha_fraction < 1:
            raise DomainError(f"alpha_fraction must lie in (0, 1), got {self.alpha_fraction}")

    def resolve_alpha(self, lambda1: float) -> float:
        if self.alpha is not None:
            return float(self.alpha)
        if lambda1 <= 0:
            raise DomainError("cannot derive alpha for a graph without edges")
        return self.alpha_fraction / lambda1


@dataclass(frozen=True)
class KEPlot:
    """Per-node points: normalized eigenvector centrality (x) vs normalized Katz (y)."""

    x: np.ndarray
    y: np.ndarray
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.x.shape != self.y.shape or self.x.ndim != 1:
            raise DomainError("x and y must be 1-d arrays of equal length")

    @property
    def n(self) -> int:
        return int(self.x.size)

    def angles(self) -> np.ndarray:
        """Polar angle of every point in degrees, in [0, 90] for a valid plot."""
        return np.degrees(np.arctan2(self.y, self.x))

    def write_csv(self, fh: TextIO) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node", "evc", "katz"])
        for i, (a, b) in enumerate(zip(self.x.tolist(), self.y.tolist())):
            writer.writerow([i, repr(a), repr(b)])


def _check_solver_args(tol, max_iter):
    if not tol > 0:
        raise DomainError(f"tol must be > 0, got {tol}")
    if max_iter < 1:
        raise DomainError(f"max_iter must be >= 1, got {max_iter}")


def _shift(adj) -> float:
    # A + sI has the same eigenvectors as A; s > 0 breaks the +/- lambda_1 tie of
    # bipartite graphs that would otherwise make the iteration oscillate
    n = adj.shape[0]
    return 0.5 * float(adj.sum()) / n if n else 0.0


def spectral_radius(g: Graph, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> float:
    """Leading adjacency eigenvalue, estimated by the Rayleigh quotient of power iterates.

    Stops once the estimate changes by at most ``tol`` relative to its value.
    """
    _check_solver_args(tol, max_iter)
    if g.m == 0:
        raise DomainError("spectral radius needs at least one edge")
    adj = g.adjacency()
    s = _shift(adj)
    x = np.ones(g.n)
    lam_prev = None
    change = np.inf
    for it in range(1, max_iter + 1):
        ax = adj @ x
        lam = float(x @ ax) / float(x @ x)
        if lam_prev is not None:
            change = abs(lam - lam_prev) / abs(lam)
            if change <= tol:
                return lam
        lam_prev = lam
        x = ax + s * x
        x /= x.max()
    raise ConvergenceError(
        f"spectral radius did not converge in {max_iter} iterations "
        f"(last relative change {change:.3g})",
        estimate=lam_prev, residual=change, iterations=max_iter,
    )


def _power_iteration(adj, tol, max_iter):
    n = adj.shape[0]
    s = _shift(adj)
    x = np.ones(n)
    diff = np.inf
    for it in range(1, max_iter + 1):
        y = adj @ x + s * x
        y /= y.max()
        diff = float(np.max(np.abs(y - x)))
        x = y
        if diff < tol:
            return x, it, diff
    raise ConvergenceError(
        f"eigenvector iteration did not converge in {max_iter} iterations "
        f"(last update {diff:.3g})",
        estimate=x, residual=diff, iterations=max_iter,
    )


def eigenvector_centrality(
    g: Graph,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    per_component: bool = True,
) -> CentralityVector:
    """Leading-eigenvector centrality scaled to unit max-norm.

    On a disconnected graph with ``per_component=True`` each component is
    iterated on its own (isolated nodes score 0) and the pieces are joined,
    so every non-trivial component peaks at 1. A single global iteration
    would localize on the component with the largest eigenvalue.
    """
    _check_solver_args(tol, max_iter)
    if g.m == 0:
        raise DomainError("eigenvector centrality needs at least one edge")
    adj = g.adjacency()
    labels = connected_components(g)
    ncomp = int(labels.max()) + 1
    notes: tuple[str, ...] = ()
    if ncomp == 1 or not per_component:
        if ncomp > 1:
            notes = (f"graph has {ncomp} components; global iteration localizes on one",)
            logger.warning(notes[0])
        x, iters, res = _power_iteration(adj, tol, max_iter)
        lam = float(x @ (adj @ x)) / float(x @ x)
        return CentralityVector(x, "eigenvector", True, iters, res, warnings=notes, eigenvalue=lam)

    notes = (f"graph has {ncomp} components; centrality computed per component",)
    logger.warning(notes[0])
    values = np.zeros(g.n)
    iters, res, lam = 0, 0.0, 0.0
    order = np.argsort(labels, kind="stable")
    bounds = np.flatnonzero(np.diff(labels[order])) + 1
    for members in np.split(order, bounds):
        if members.size < 2:
            continue
        sub = adj[members][:, members]
        x, it, r = _power_iteration(sub, tol, max_iter)
        values[members] = x
        iters = max(iters, it)
        res = max(res, r)
        lam = max(lam, float(x @ (sub @ x)) / float(x @ x))
    values /= values.max()
    return CentralityVector(values, "eigenvector", True, iters, res, warnings=notes, eigenvalue=lam)


def katz_centrality(
    g: Graph,
    p: KatzParams = KatzParams(),
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    lambda1: float | None = None,
) -> CentralityVector:
    """Fixed point of ``x <- alpha*A*x + beta*1`` started from ones (raw scale).

    ``lambda1`` may carry an already computed leading eigenvalue (e.g. the
    Rayleigh quotient of a converged eigenvector run); otherwise it is
    estimated with :func:`spectral_radius`.

    Raises
    ------
    DivergenceError
        If ``alpha >= 1/lambda_1`` for the estimated leading eigenvalue.
    ConvergenceError
        If the update norm is still above ``tol`` after ``max_iter`` steps.
    """
    _check_solver_args(tol, max_iter)
    if lambda1 is not None:
        lam = float(lambda1)
    else:
        lam = spectral_radius(g, tol, max_iter) if g.m else 0.0
    alpha = p.resolve_alpha(lam)
    if alpha * lam >= 1.0:
        raise DivergenceError(alpha, lam)
    adj = g.adjacency()
    x = np.ones(g.n)
    diff = np.inf
    for it in range(1, max_iter + 1):
        y = alpha * (adj @ x) + p.beta
        diff = float(np.max(np.abs(y - x))) if g.n else 0.0
        x = y
        if diff < tol:
            return CentralityVector(x, "katz", False, it, diff, alpha=alpha)
        if not np.isfinite(diff):
            break
    raise ConvergenceError(
        f"Katz iteration did not converge in {it} iterations (last update {diff:.3g})",
        estimate=x, residual=diff, iterations=it,
    )


def katz_closed_form(g: Graph, p: KatzParams = KatzParams()) -> CentralityVector:
    """Dense solve of ``(I - alpha*A) x = beta*1``; a reference for small graphs.

    ``lambda_1`` comes from a dense symmetric eigensolve, independent of
    :func:`spectral_radius`.
    """
    if g.n > CLOSED_FORM_MAX_N:
        raise DomainError(f"closed form limited to n <= {CLOSED_FORM_MAX_N}, got {g.n}")
    a = g.adjacency().toarray()
    lam = float(np.linalg.eigvalsh(a)[-1]) if g.n else 0.0
    alpha = p.resolve_alpha(lam)
    if alpha * lam >= 1.0:
        raise DivergenceError(alpha, lam)
    m = np.eye(g.n) - alpha * a
    try:
        x = np.linalg.solve(m, np.full(g.n, p.beta))
    except np.linalg.LinAlgError as exc:
        raise DivergenceError(alpha, lam) from exc
    return CentralityVector(x, "katz", False, 0, 0.0, alpha=alpha)


def normalize(v: CentralityVector) -> CentralityVector:
    """Divide by the maximum so the largest score is exactly 1."""
    top = float(v.values.max()) if v.values.size else 0.0
    if not top > 0:
        raise DomainError("cannot normalize a vector whose maximum is not positive")
    return replace(v, values=v.values / top, normalized=True)


def ke_points(
    g: Graph,
    p: KatzParams = KatzParams(),
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    per_component: bool = True,
) -> KEPlot:
    raw = eigenvector_centrality(g, tol, max_iter, per_component)
    katz = normalize(katz_centrality(g, p, tol, max_iter, lambda1=raw.eigenvalue))
    evc = normalize(raw)
    return KEPlot(evc.values, katz.values, warnings=evc.warnings)
