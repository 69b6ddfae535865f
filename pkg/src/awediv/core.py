"""Domain types shared across the package: instances, chunks, oracle
matrices and pairwise contingency tables."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class Instance:
    features: tuple[float, ...]
    label: Optional[Hashable] = None
    amount: Optional[float] = None

    def __post_init__(self):
        if self.amount is not None and self.amount < 0:
            raise ValueError(f"amount must be >= 0, got {self.amount}")


class LabelIndex:
    """Maps opaque class labels to dense integer indices.

    With ``closed=True`` the class set is fixed at construction and an
    unknown label raises ``KeyError``; otherwise new labels get the next
    free index in order of first appearance.
    """

    def __init__(self, classes: Iterable[Hashable] = (), closed: bool = False):
        self._index: dict[Hashable, int] = {}
        self.classes: list[Hashable] = []
        self.closed = False
        for c in classes:
            self.add(c)
        self.closed = closed

    def add(self, label: Hashable) -> int:
        if label in self._index:
            return self._index[label]
        if self.closed:
            raise KeyError(f"unknown label {label!r}")
        self._index[label] = len(self.classes)
        self.classes.append(label)
        return self._index[label]

    def __getitem__(self, label: Hashable) -> int:
        return self._index[label]

    def __contains__(self, label) -> bool:
        return label in self._index

    def __len__(self) -> int:
        return len(self.classes)


@dataclass(frozen=True, eq=False)
class Chunk:
    """A block of labeled instances in array form.

    ``labels`` holds dense class indices; ``n_classes`` is the size of the
    stream's class index when the chunk was cut.
    """

    features: np.ndarray
    labels: np.ndarray
    index: int
    n_classes: int
    amounts: Optional[np.ndarray] = None
    partial: bool = False

    def __post_init__(self):
        if len(self.labels) == 0:
            raise ValueError("a chunk holds at least one instance")
        if self.features.ndim != 2 or self.features.shape[0] != len(self.labels):
            raise ValueError("features must be an (n, m) array matching labels")
        if self.index < 0:
            raise ValueError("chunk index must be non-negative")

    def __len__(self) -> int:
        return len(self.labels)

    @classmethod
    def from_instances(cls, instances: Sequence[Instance], index: int,
                       labels: LabelIndex, partial: bool = False) -> "Chunk":
        if not instances:
            raise ValueError("a chunk holds at least one instance")
        if any(inst.label is None for inst in instances):
            raise ValueError("chunk instances must all be labeled")
        y = np.fromiter((labels.add(inst.label) for inst in instances),
                        dtype=np.int64, count=len(instances))
        X = np.array([inst.features for inst in instances], dtype=float)
        amounts = None
        if all(inst.amount is not None for inst in instances):
            amounts = np.array([inst.amount for inst in instances], dtype=float)
        return cls(X, y, index, len(labels), amounts, partial)

    @classmethod
    def from_arrays(cls, features, labels, index: int = 0, n_classes=None,
                    amounts=None) -> "Chunk":
        X = np.asarray(features, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        y = np.asarray(labels, dtype=np.int64)
        k = int(y.max()) + 1 if n_classes is None else n_classes
        a = None if amounts is None else np.asarray(amounts, dtype=float)
        return cls(X, y, index, k, a)

    def class_priors(self) -> np.ndarray:
        """Empirical class distribution of the chunk over ``n_classes``."""
        return np.bincount(self.labels, minlength=self.n_classes) / len(self)


@dataclass(frozen=True, eq=False)
class OracleMatrix:
    """N x L record of which classifier got which sample right.

    Entries are stored as booleans (True = correct). The -1/1 coding is
    only an I/O convention, see :meth:`from_signed` and :meth:`signed`.
    """

    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries)
        if e.ndim != 2:
            raise ValueError("oracle matrix must be two-dimensional")
        if e.dtype != bool:
            if not np.isin(e, (0, 1)).all():
                raise ValueError("oracle entries must be correct/incorrect flags")
            e = e.astype(bool)
        n, l = e.shape
        if n < 1:
            raise ValueError("oracle matrix needs at least one sample")
        if l < 2:
            raise ValueError("oracle matrix needs at least two classifiers")
        e = e.copy()
        e.flags.writeable = False
        object.__setattr__(self, "entries", e)

    @property
    def n_samples(self) -> int:
        return self.entries.shape[0]

    @property
    def n_classifiers(self) -> int:
        return self.entries.shape[1]

    @classmethod
    def from_signed(cls, values) -> "OracleMatrix":
        v = np.asarray(values)
        if not np.isin(v, (-1, 1)).all():
            raise ValueError("signed oracle entries must be -1 or 1")
        return cls(v == 1)

    @classmethod
    def from_predictions(cls, predictions, truth) -> "OracleMatrix":
        """Build from an (N, L) array of predicted labels and N true labels."""
        p = np.asarray(predictions)
        t = np.asarray(truth).reshape(-1, 1)
        return cls(p == t)

    def signed(self) -> np.ndarray:
        return np.where(self.entries, 1, -1)

    def correct_votes(self) -> np.ndarray:
        """Per-sample count of classifiers that were right."""
        return self.entries.sum(axis=1)

    def failure_counts(self) -> np.ndarray:
        """Per-sample count of classifiers that were wrong."""
        return self.n_classifiers - self.correct_votes()


@dataclass(frozen=True)
class ContingencyTable:
    """Joint correctness of a classifier pair (C_i, C_j).

    ``n_b`` counts samples where C_i is wrong and C_j right, ``n_c`` the
    reverse. Counts are integers for block/incremental use and reals for
    faded sums; proportions are derived on read. ``total`` defaults to the
    cell sum; faded tables pass the shared fading increment instead.
    """

    n_a: float
    n_b: float
    n_c: float
    n_d: float
    total: Optional[float] = None

    def __post_init__(self):
        if min(self.n_a, self.n_b, self.n_c, self.n_d) < 0:
            raise ValueError("contingency counts must be non-negative")
        cell_sum = self.n_a + self.n_b + self.n_c + self.n_d
        if self.total is None:
            object.__setattr__(self, "total", cell_sum)
        elif abs(self.total - cell_sum) > 1e-9 * max(1.0, self.total):
            raise ValueError("contingency total does not match the cell sum")
        if self.total <= 0:
            raise ValueError("contingency table is empty")

    @property
    def a(self) -> float:
        return self.n_a / self.total

    @property
    def b(self) -> float:
        return self.n_b / self.total

    @property
    def c(self) -> float:
        return self.n_c / self.total

    @property
    def d(self) -> float:
        return self.n_d / self.total

    def proportions(self) -> tuple[float, float, float, float]:
        return self.a, self.b, self.c, self.d

    def transposed(self) -> "ContingencyTable":
        return ContingencyTable(self.n_a, self.n_c, self.n_b, self.n_d, self.total)


def _pair_counts(entries: np.ndarray, i: int, j: int) -> tuple[int, int, int, int]:
    ci, cj = entries[:, i], entries[:, j]
    a = int(np.count_nonzero(ci & cj))
    b = int(np.count_nonzero(~ci & cj))
    c = int(np.count_nonzero(ci & ~cj))
    d = len(ci) - a - b - c
    return a, b, c, d


def contingency_from_oracle(oracle: OracleMatrix, i: int, j: int) -> ContingencyTable:
    """Contingency table of classifiers ``i`` and ``j`` over all samples."""
    L = oracle.n_classifiers
    for k in (i, j):
        if not 0 <= k < L:
            raise IndexError(f"classifier index {k} out of range for L={L}")
    if i == j:
        raise ValueError("a contingency table needs two distinct classifiers")
    return ContingencyTable(*_pair_counts(oracle.entries, i, j))


def all_pair_counts(entries: np.ndarray) -> np.ndarray:
    """(a, b, c, d) integer counts for every pair i < j, in row-major pair order."""
    x = entries.astype(np.int64)
    n, L = x.shape
    both = x.T @ x
    col = x.sum(axis=0)
    iu, ju = np.triu_indices(L, k=1)
    a = both[iu, ju]
    b = col[ju] - a
    c = col[iu] - a
    d = n - a - b - c
    return np.stack([a, b, c, d], axis=1)


def pair_list(n_classifiers: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n_classifiers) for j in range(i + 1, n_classifiers)]
