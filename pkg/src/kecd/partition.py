from __future__ import annotations

import json

import numpy as np

from .errors import DomainError

__all__ = ["Partition"]


class Partition:
    """Node-to-community labeling with ids ``0..k-1``, each id used at least once."""

    __slots__ = ("labels", "k")

    def __init__(self, labels):
        labels = np.array(labels, dtype=np.int64).ravel()
        k = int(labels.max()) + 1 if labels.size else 0
        if labels.size and labels.min() < 0:
            raise DomainError("community ids must be non-negative")
        if labels.size and np.any(np.bincount(labels, minlength=k) == 0):
            raise DomainError("community ids must be contiguous 0..k-1")
        labels.setflags(write=False)
        self.labels = labels
        self.k = k

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        """Relabel arbitrary ids densely: largest community first, ties by smallest old id."""
        labels = np.asarray(labels).ravel()
        if labels.size == 0:
            return cls(labels.astype(np.int64))
        uniq, inverse, counts = np.unique(labels, return_inverse=True, return_counts=True)
        order = np.lexsort((np.arange(uniq.size), -counts))
        rank = np.empty(uniq.size, dtype=np.int64)
        rank[order] = np.arange(uniq.size)
        return cls(rank[inverse.ravel()])

    @property
    def n(self) -> int:
        return int(self.labels.size)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.labels == c)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.labels, other.labels)

    __hash__ = None

    def __repr__(self):
        return f"Partition(n={self.n}, k={self.k})"

    def to_json(self, **extra) -> str:
        payload = {"k": self.k, **extra, "labels": self.labels.tolist()}
        return json.dumps(payload, sort_keys=False)
