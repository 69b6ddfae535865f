"""Diversity measures over a stream of oracle outcome vectors.

Four processing modes are supported:

* block: static measures on each chunk, nothing carried over;
* incremental: exact integer counts of every pair cell plus the failure
  histogram, one O(L^2) update per instance;
* window: static measures over the last W outcome vectors;
* fading: exponentially decayed versions of the incremental counts, all
  sharing one fading increment so the faded cells stay a distribution.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .core import ContingencyTable, OracleMatrix, all_pair_counts, pair_list
from .diversity import (AccuracySummary, NonPairwiseMeasures, PairwiseMeasures,
                        ensemble_accuracy, nonpairwise_from_summary,
                        pairwise_from_counts, pairwise_measures, summary_from_counts)

MODES = ("block", "incremental", "window", "fading")
CELLS = ("a", "b", "c", "d")

DEFAULT_ALPHA = 0.999


@dataclass(frozen=True, eq=False)
class DiversityReport:
    pairwise: PairwiseMeasures
    nonpairwise: NonPairwiseMeasures
    accuracy: AccuracySummary
    mode: str
    timestamp: int

    def values(self) -> dict[str, float]:
        """Flat name -> value view, average accuracy first."""
        out = {"p": self.accuracy.big_p}
        out.update(self.pairwise.as_dict())
        out.update(self.nonpairwise.as_dict())
        return out


def _cell_index(outcome: np.ndarray, iu: np.ndarray, ju: np.ndarray) -> np.ndarray:
    # cell per pair (i < j): 0=a both right, 1=b only j right, 2=c only i right, 3=d
    wrong = ~outcome
    return wrong[iu].astype(np.int64) + 2 * wrong[ju].astype(np.int64)


def _as_outcome(outcome, L: int) -> np.ndarray:
    v = np.asarray(outcome)
    if v.shape != (L,):
        raise ValueError(f"outcome vector must have length {L}, got shape {v.shape}")
    if v.dtype != bool:
        if not np.isin(v, (0, 1)).all():
            raise ValueError("outcome entries must be correct/incorrect flags")
        v = v.astype(bool)
    return v


def block_report(oracle: OracleMatrix, timestamp: int = 0) -> DiversityReport:
    """Static measures on one block; no state survives the call."""
    summary = ensemble_accuracy(oracle)
    return DiversityReport(pairwise_from_counts(all_pair_counts(oracle.entries)),
                           nonpairwise_from_summary(summary), summary,
                           "block", timestamp)


class PairCountState:
    """Exact counts for incremental diversity over a fixed member set.

    ``pair_counts`` has one (a, b, c, d) row per pair i < j. The per-sample
    failure histogram and per-classifier hit counts feed the non-pairwise
    measures; no per-sample history is kept.
    """

    def __init__(self, n_classifiers: int):
        if n_classifiers < 2:
            raise ValueError("diversity needs at least two classifiers")
        L = n_classifiers
        self.n_classifiers = L
        self.pairs = pair_list(L)
        self.pair_counts = np.zeros((len(self.pairs), 4), dtype=np.int64)
        self.failure_hist = np.zeros(L + 1, dtype=np.int64)
        self.correct = np.zeros(L, dtype=np.int64)
        self.n_seen = 0
        self._rows = np.arange(len(self.pairs))
        self._iu, self._ju = np.triu_indices(L, k=1)

    def update(self, outcome) -> "PairCountState":
        v = _as_outcome(outcome, self.n_classifiers)
        self.pair_counts[self._rows, _cell_index(v, self._iu, self._ju)] += 1
        self.failure_hist[self.n_classifiers - int(v.sum())] += 1
        self.correct += v
        self.n_seen += 1
        return self

    def report(self, timestamp: int = 0) -> DiversityReport:
        if self.n_seen == 0:
            raise ValueError("no outcomes seen yet")
        summary = summary_from_counts(self.correct, self.failure_hist, self.n_seen)
        return DiversityReport(pairwise_from_counts(self.pair_counts),
                               nonpairwise_from_summary(summary), summary,
                               "incremental", timestamp)


def incremental_update(state: PairCountState, outcome_vector) -> PairCountState:
    """Fold one labeled instance's outcome vector into ``state`` (in place)."""
    return state.update(outcome_vector)


class WindowState:
    """Bounded FIFO of the most recent outcome vectors."""

    def __init__(self, capacity: int, n_classifiers: Optional[int] = None):
        if capacity < 1:
            raise ValueError("window capacity must be positive")
        self.capacity = capacity
        self.n_classifiers = n_classifiers
        self.window: deque = deque(maxlen=capacity)

    def push(self, outcome) -> "WindowState":
        if self.n_classifiers is None:
            self.n_classifiers = len(outcome)
        # deque(maxlen) drops the oldest vector before appending
        self.window.append(_as_outcome(outcome, self.n_classifiers))
        return self

    def __len__(self) -> int:
        return len(self.window)

    def report(self, timestamp: int = 0) -> DiversityReport:
        if not self.window:
            raise ValueError("window is empty")
        rep = block_report(OracleMatrix(np.stack(self.window)), timestamp)
        return replace(rep, mode="window")


def window_report(state: WindowState, timestamp: int = 0) -> DiversityReport:
    return state.report(timestamp)


@dataclass(frozen=True)
class FadingCounts:
    """Faded a/b/c/d sums for a single classifier pair."""

    alpha: float = DEFAULT_ALPHA
    s_a: float = 0.0
    s_b: float = 0.0
    s_c: float = 0.0
    s_d: float = 0.0
    n_fading: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")

    def table(self) -> ContingencyTable:
        if self.n_fading <= 0:
            raise ValueError("no updates yet")
        return ContingencyTable(self.s_a, self.s_b, self.s_c, self.s_d,
                                total=self.n_fading)


def fading_update(state: FadingCounts, pair_outcome: str) -> FadingCounts:
    """Decay every cell by alpha, then add 1 to the observed cell."""
    if pair_outcome not in CELLS:
        raise ValueError(f"pair outcome must be one of {CELLS}, got {pair_outcome!r}")
    al = state.alpha
    sums = {f"s_{x}": al * getattr(state, f"s_{x}") for x in CELLS}
    sums[f"s_{pair_outcome}"] += 1.0
    return replace(state, n_fading=1.0 + al * state.n_fading, **sums)


def fading_measures(state: FadingCounts) -> PairwiseMeasures:
    """Pairwise measures on the faded table; ``df`` is S_d / N_alpha."""
    return pairwise_measures(state.table())


class FadingTracker:
    """Ensemble-wide fading state.

    Keeps faded a/b/c/d sums for every pair, a faded failure histogram
    (L + 1 bins) and faded per-classifier hit counts, all normalized by the
    single shared fading increment.
    """

    def __init__(self, n_classifiers: int, alpha: float = DEFAULT_ALPHA):
        if n_classifiers < 2:
            raise ValueError("diversity needs at least two classifiers")
        if not 0.0 < alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
        L = n_classifiers
        self.n_classifiers = L
        self.alpha = alpha
        self.pairs = pair_list(L)
        self.pair_sums = np.zeros((len(self.pairs), 4))
        self.failure_hist = np.zeros(L + 1)
        self.correct = np.zeros(L)
        self.n_fading = 0.0
        self._rows = np.arange(len(self.pairs))
        self._iu, self._ju = np.triu_indices(L, k=1)

    def update(self, outcome) -> "FadingTracker":
        v = _as_outcome(outcome, self.n_classifiers)
        al = self.alpha
        self.pair_sums *= al
        self.pair_sums[self._rows, _cell_index(v, self._iu, self._ju)] += 1.0
        self.failure_hist *= al
        self.failure_hist[self.n_classifiers - int(v.sum())] += 1.0
        self.correct *= al
        self.correct += v
        self.n_fading = 1.0 + al * self.n_fading
        return self

    def pair_state(self, i: int, j: int) -> FadingCounts:
        row = self.pairs.index((min(i, j), max(i, j)))
        s = self.pair_sums[row]
        if i > j:
            s = s[[0, 2, 1, 3]]
        return FadingCounts(self.alpha, *map(float, s), n_fading=self.n_fading)

    def report(self, timestamp: int = 0) -> DiversityReport:
        if self.n_fading <= 0:
            raise ValueError("no updates yet")
        n = self.n_fading
        summary = summary_from_counts(self.correct, self.failure_hist, n)
        return DiversityReport(pairwise_from_counts(self.pair_sums, total=n),
                               nonpairwise_from_summary(summary), summary,
                               "fading", timestamp)
