"""Static ensemble diversity measures computed from an oracle matrix.

Pairwise measures (correlation, Q statistic, disagreement, double fault)
are evaluated per classifier pair and averaged over all L(L-1)/2 pairs.
Non-pairwise measures (entropy, Cunningham-Carney entropy, Kohavi-Wolpert
variance, inter-rater agreement, generalized diversity) only need the
distribution of per-sample failure counts, which is what lets the stream
trackers reuse them without keeping per-sample history.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import ContingencyTable, OracleMatrix, all_pair_counts

PAIRWISE_FIELDS = ("rho", "q", "dis", "df")
NONPAIRWISE_FIELDS = ("entropy_e", "entropy_cc", "kw", "kappa", "gd")


@dataclass(frozen=True)
class PairwiseMeasures:
    rho: float
    q: float
    dis: float
    df: float
    # names of measures that hit a zero denominator and took the convention value
    degenerate: frozenset = field(default_factory=frozenset)

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in PAIRWISE_FIELDS}


@dataclass(frozen=True, eq=False)
class AccuracySummary:
    """Accuracy bookkeeping for an ensemble over a set of samples.

    ``big_p`` is the average accuracy computed from the misclassification
    mass, ``big_p_weighted`` the same quantity as a weighted mean of the
    column accuracies; the two agree up to rounding. ``failure_histogram[j]``
    is the fraction of samples on which exactly j classifiers fail.
    ``l_mass`` is only available when per-sample outcomes are at hand.
    """

    p_per_classifier: np.ndarray
    weights: np.ndarray
    big_p: float
    big_p_weighted: float
    failure_histogram: np.ndarray
    n_samples: float
    l_mass: Optional[np.ndarray] = None
    uniform: bool = True

    @property
    def n_classifiers(self) -> int:
        return len(self.p_per_classifier)


@dataclass(frozen=True)
class NonPairwiseMeasures:
    entropy_e: float
    entropy_cc: float
    kw: float
    kappa: float
    gd: float
    degenerate: frozenset = field(default_factory=frozenset)

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in NONPAIRWISE_FIELDS}


def pairwise_measures(table: ContingencyTable) -> PairwiseMeasures:
    """Correlation, Q statistic, disagreement and double fault of one pair.

    A zero denominator in rho or Q yields 0 and marks the measure as
    degenerate (no correlation evidence, e.g. under unanimity).
    """
    a, b, c, d = table.proportions()
    cross = a * d - b * c
    degenerate = set()

    rho_den = math.sqrt((a + b) * (c + d) * (b + d) * (a + c))
    if rho_den > 0:
        rho = cross / rho_den
    else:
        rho = 0.0
        degenerate.add("rho")

    q_den = a * d + b * c
    if q_den > 0:
        q = cross / q_den
    else:
        q = 0.0
        degenerate.add("q")

    return PairwiseMeasures(rho, q, b + c, d, frozenset(degenerate))


def average_pairwise(measures: Sequence[PairwiseMeasures]) -> PairwiseMeasures:
    """Mean of per-pair measures, i.e. 2/(L(L-1)) times the pair sum."""
    if not measures:
        raise ValueError("no classifier pairs to average")
    n = len(measures)
    totals = [math.fsum(getattr(m, name) for m in measures) / n
              for name in PAIRWISE_FIELDS]
    flags = frozenset().union(*(m.degenerate for m in measures))
    return PairwiseMeasures(*totals, degenerate=flags)


def pairwise_from_counts(cells, total=None) -> PairwiseMeasures:
    """Average pairwise measures from a (n_pairs, 4) array of a/b/c/d cells."""
    tables = [ContingencyTable(*map(_scalar, row), total=total) for row in cells]
    return average_pairwise([pairwise_measures(t) for t in tables])


def pairwise_averages(oracle: OracleMatrix) -> PairwiseMeasures:
    if oracle.n_classifiers < 2:
        raise ValueError("pairwise measures need at least two classifiers")
    return pairwise_from_counts(all_pair_counts(oracle.entries))


def _scalar(x):
    # numpy integer -> int keeps the proportions as exact as the Python path
    return x.item() if hasattr(x, "item") else x


def _check_weights(weights, L: int) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.shape != (L,):
        raise ValueError(f"expected {L} weights, got shape {w.shape}")
    if (w < 0).any():
        raise ValueError("weights must be non-negative")
    if abs(w.sum() - 1.0) > 1e-9:
        raise ValueError(f"weights must sum to 1, got {w.sum()!r}")
    return w


def ensemble_accuracy(oracle: OracleMatrix, weights=None) -> AccuracySummary:
    """Per-classifier accuracies, misclassification mass and failure histogram.

    Without ``weights`` every classifier weighs 1/L and each ``l_i`` is the
    integer number of classifiers wrong on sample i.
    """
    N, L = oracle.n_samples, oracle.n_classifiers
    wrong = ~oracle.entries
    failures = wrong.sum(axis=1)
    if weights is None:
        w = np.full(L, 1.0 / L)
        l_mass = failures.astype(float)
        uniform = True
    else:
        w = _check_weights(weights, L)
        l_mass = L * (wrong @ w)
        uniform = False

    p = oracle.entries.sum(axis=0) / N
    big_p = float(1.0 - l_mass.sum() / (N * L))
    hist = np.bincount(failures, minlength=L + 1) / N
    return AccuracySummary(p, w, big_p, float(w @ p), hist, N, l_mass, uniform)


def summary_from_counts(correct, failure_hist, n, weights=None) -> AccuracySummary:
    """Accuracy summary from aggregated counts instead of a full oracle.

    ``correct[j]`` is how often classifier j was right, ``failure_hist[k]``
    how many samples had exactly k failures; both may be faded sums, in
    which case ``n`` is the matching fading increment.
    """
    correct = np.asarray(correct)
    failure_hist = np.asarray(failure_hist)
    L = len(correct)
    if len(failure_hist) != L + 1:
        raise ValueError("failure histogram needs L + 1 bins")
    if n <= 0:
        raise ValueError("no samples summarized")
    w = np.full(L, 1.0 / L) if weights is None else _check_weights(weights, L)
    p = correct / n
    if weights is None:
        big_p = 1.0 - (np.arange(L + 1) @ failure_hist) / (n * L)
    else:
        big_p = float(w @ p)
    return AccuracySummary(p, w, float(big_p), float(w @ p), failure_hist / n,
                           n, None, weights is None)


def _binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def nonpairwise_from_summary(summary: AccuracySummary) -> NonPairwiseMeasures:
    L = summary.n_classifiers
    if L < 2:
        raise ValueError("non-pairwise measures need at least two classifiers")
    T = summary.failure_histogram
    j = np.arange(L + 1)
    degenerate = set()

    # a sample with j failures has min(j, L - j) votes in the minority
    minority = np.minimum(j, L - j)
    entropy_e = float(minority @ T) / (L - math.ceil(L / 2))

    correct_share = 1.0 - float(j @ T) / L
    entropy_cc = _binary_entropy(correct_share)

    if summary.uniform or summary.l_mass is None:
        spread = float((j * (L - j)) @ T)
    else:
        l = summary.l_mass
        spread = float(np.mean(l * (L - l)))
    kw = spread / L**2

    P = float(summary.big_p)
    kappa_den = L * (L - 1) * P * (1.0 - P)
    if kappa_den > 0:
        kappa = 1.0 - spread / kappa_den
    else:
        kappa = 1.0
        degenerate.add("kappa")

    gd_num = float((j * (j - 1)) @ T) / (L * (L - 1))
    gd_den = float(j @ T) / L
    if gd_den > 0:
        gd = 1.0 - gd_num / gd_den
    else:
        gd = 1.0
        degenerate.add("gd")

    return NonPairwiseMeasures(entropy_e, entropy_cc, kw, kappa, gd,
                               frozenset(degenerate))


def nonpairwise_measures(oracle: OracleMatrix,
                         summary: Optional[AccuracySummary] = None) -> NonPairwiseMeasures:
    if summary is None:
        summary = ensemble_accuracy(oracle)
    if summary.n_classifiers != oracle.n_classifiers or summary.n_samples != oracle.n_samples:
        raise ValueError("summary was not computed from this oracle matrix")
    return nonpairwise_from_summary(summary)


@dataclass(frozen=True, eq=False)
class StaticMeasures:
    pairwise: PairwiseMeasures
    nonpairwise: NonPairwiseMeasures
    accuracy: AccuracySummary


def static_measures(oracle: OracleMatrix, weights=None) -> StaticMeasures:
    """Every measure for one oracle matrix.

    Non-pairwise measures always use the unweighted summary; ``weights``
    only affects the returned accuracy summary.
    """
    summary = ensemble_accuracy(oracle)
    accuracy = summary if weights is None else ensemble_accuracy(oracle, weights)
    return StaticMeasures(pairwise_averages(oracle),
                          nonpairwise_from_summary(summary), accuracy)
