"""Accuracy-weighted ensemble (AWE) for concept-drifting streams.

Every incoming chunk trains one new member. All members, new and old, are
then scored on that chunk and weighted by how much better they do than a
classifier guessing from the chunk's class distribution:

    w_i = MSE_r - MSE_i            (error weighting)
    w_i = b_i - b_r                (benefit weighting, cost-sensitive)

and only the ``capacity`` best members are kept.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .core import Chunk
from .learners import ClassDistribution, get_learner

log = logging.getLogger(__name__)

WEIGHTING_MODES = ("mse", "benefit")


class NoPositiveWeightError(RuntimeError):
    """No member has a positive weight, so the weighted vote is undefined."""


@dataclass(frozen=True)
class BenefitMatrix:
    """Cost-sensitive gains for a binary fraud/not-fraud decision.

    Predicting the positive (fraud) class gains ``t(x) - cost`` on an actual
    fraud and ``-cost`` otherwise; predicting any other class gains 0.
    """

    cost: float
    positive_class: int = 1

    def __post_init__(self):
        if self.cost < 0:
            raise ValueError("investigation cost must be non-negative")

    def positive_gain(self, labels: np.ndarray, amounts: np.ndarray) -> np.ndarray:
        """Gain of predicting the positive class for each instance."""
        return np.where(labels == self.positive_class, amounts - self.cost, -self.cost)

    def gains(self, label: int, amount: float, n_classes: int) -> np.ndarray:
        """Row ``b[label, :]`` of the matrix for one transaction."""
        row = np.zeros(n_classes)
        row[self.positive_class] = amount - self.cost if label == self.positive_class else -self.cost
        return row


@dataclass(frozen=True)
class EnsembleConfig:
    capacity: int = 10
    chunk_size: int = 500
    weighting_mode: str = "mse"
    benefit_matrix: Optional[BenefitMatrix] = None
    # evict members whose weight drops to <= 0 instead of waiting for capacity
    prune_nonpositive: bool = True

    def __post_init__(self):
        if self.capacity < 2:
            raise ValueError("ensemble capacity must be at least 2")
        if self.chunk_size < 1:
            raise ValueError("chunk size must be positive")
        if self.weighting_mode not in WEIGHTING_MODES:
            raise ValueError(f"weighting mode must be one of {WEIGHTING_MODES}")
        if self.weighting_mode == "benefit" and self.benefit_matrix is None:
            raise ValueError("benefit weighting needs a benefit matrix")


@dataclass(frozen=True, eq=False)
class EnsembleMember:
    model: object
    weight: float
    mse: float
    origin_chunk: int
    benefit: Optional[float] = None


@dataclass(frozen=True)
class MemberScore:
    origin_chunk: int
    mse: float
    weight: float
    benefit: Optional[float] = None


@dataclass(frozen=True)
class WeightReport:
    chunk_index: int
    mse_r: float
    scores: tuple[MemberScore, ...]
    retained: tuple[int, ...]
    pruned: tuple[int, ...]
    benefit_r: Optional[float] = None

    def weight_of(self, origin_chunk: int) -> float:
        for s in self.scores:
            if s.origin_chunk == origin_chunk:
                return s.weight
        raise KeyError(origin_chunk)


def _padded_proba(model, X: np.ndarray, n_classes: int) -> np.ndarray:
    p = model.predict_proba(X)
    k = p.shape[1]
    if k < n_classes:
        p = np.pad(p, ((0, 0), (0, n_classes - k)))
    return p


def _require_rows(chunk: Chunk):
    if len(chunk) == 0:
        raise ValueError("empty chunk")


def mse_of_classifier(model, chunk: Chunk) -> float:
    """Mean of (1 - f_true(x))^2 over the chunk."""
    _require_rows(chunk)
    p = _padded_proba(model, chunk.features, chunk.n_classes)
    f_true = p[np.arange(len(chunk)), chunk.labels]
    return float(np.mean((1.0 - f_true) ** 2))


def mse_random(class_priors) -> float:
    """Error of a classifier that always answers with the class priors."""
    p = np.asarray(class_priors.probs if isinstance(class_priors, ClassDistribution)
                   else class_priors, dtype=float)
    return float(np.sum(p * (1.0 - p) ** 2))


def _require_amounts(chunk: Chunk) -> np.ndarray:
    if chunk.amounts is None:
        raise ValueError("benefit weighting needs a transaction amount on every instance")
    return chunk.amounts


def benefit_of_classifier(model, chunk: Chunk, matrix: BenefitMatrix) -> float:
    """Expected total benefit: each matrix cell times the predicted probability
    of the class in that cell's column, summed over the chunk."""
    amounts = _require_amounts(chunk)
    p = _padded_proba(model, chunk.features, max(chunk.n_classes, matrix.positive_class + 1))
    f_pos = p[:, matrix.positive_class]
    return float(np.sum(matrix.positive_gain(chunk.labels, amounts) * f_pos))


def benefit_random(chunk: Chunk, matrix: BenefitMatrix) -> float:
    """Benefit of guessing the positive class with its frequency in the chunk."""
    amounts = _require_amounts(chunk)
    p_pos = float(np.mean(chunk.labels == matrix.positive_class))
    return float(np.sum(matrix.positive_gain(chunk.labels, amounts)) * p_pos)


def _retain(scored: list[EnsembleMember], config: EnsembleConfig) -> list[EnsembleMember]:
    # highest weight first, newer member first on ties
    ranked = sorted(scored, key=lambda m: (-m.weight, -m.origin_chunk))
    if config.prune_nonpositive:
        positive = [m for m in ranked if m.weight > 0]
        # never drop to an empty ensemble; the best member stays as cold-start fallback
        return positive[:config.capacity] or ranked[:1]
    return ranked[:config.capacity]


def reweight(members: Sequence[EnsembleMember], chunk: Chunk,
             config: EnsembleConfig) -> tuple[list[EnsembleMember], WeightReport]:
    """Score every member on the newest chunk, recompute weights and prune."""
    if not members:
        raise ValueError("no members to reweight")
    _require_rows(chunk)
    mse_r = mse_random(chunk.class_priors())
    b_r = None
    if config.weighting_mode == "benefit":
        if config.benefit_matrix is None:
            raise ValueError("benefit weighting needs a benefit matrix")
        b_r = benefit_random(chunk, config.benefit_matrix)

    scored = []
    for m in members:
        mse = mse_of_classifier(m.model, chunk)
        if b_r is None:
            scored.append(replace(m, mse=mse, weight=mse_r - mse, benefit=None))
        else:
            b = benefit_of_classifier(m.model, chunk, config.benefit_matrix)
            scored.append(replace(m, mse=mse, weight=b - b_r, benefit=b))

    kept = _retain(scored, config)
    kept_ids = {m.origin_chunk for m in kept}
    report = WeightReport(
        chunk_index=chunk.index,
        mse_r=mse_r,
        scores=tuple(MemberScore(m.origin_chunk, m.mse, m.weight, m.benefit) for m in scored),
        retained=tuple(m.origin_chunk for m in kept),
        pruned=tuple(m.origin_chunk for m in scored if m.origin_chunk not in kept_ids),
        benefit_r=b_r,
    )
    return kept, report


def weighted_scores(members: Sequence[EnsembleMember], X, n_classes: int = 0) -> np.ndarray:
    """Per-class vote sum_i max(w_i, 0) * f_c^i(x) for each row of X."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    k = max([n_classes] + [m.model.n_classes for m in members])
    scores = np.zeros((len(X), k))
    for m in members:
        if m.weight > 0:
            scores += m.weight * _padded_proba(m.model, X, k)
    return scores


class AccuracyWeightedEnsemble:
    """Chunk-by-chunk AWE state machine.

    ``learner`` is a learner name (``"nb"``, ``"stump"``) or any callable
    turning a Chunk into a model with ``predict_proba`` and ``n_classes``.
    Listeners registered with :meth:`on_membership_change` are called with
    the new tuple of member ids whenever the member set changes.
    """

    def __init__(self, config: EnsembleConfig = EnsembleConfig(),
                 learner: Union[str, Callable] = "nb"):
        self.config = config
        self.fit = get_learner(learner) if isinstance(learner, str) else learner
        self.members: list[EnsembleMember] = []
        self._listeners: list[Callable] = []

    def __len__(self) -> int:
        return len(self.members)

    @property
    def member_ids(self) -> tuple[int, ...]:
        return tuple(m.origin_chunk for m in self.members)

    @property
    def weights(self) -> np.ndarray:
        return np.array([m.weight for m in self.members])

    def on_membership_change(self, callback: Callable) -> None:
        self._listeners.append(callback)

    def process_chunk(self, chunk: Chunk) -> WeightReport:
        before = self.member_ids
        model = self.fit(chunk)
        candidate = EnsembleMember(model, 0.0, 0.0, chunk.index)
        self.members, report = reweight(self.members + [candidate], chunk, self.config)
        if report.pruned:
            log.debug("chunk %d: pruned members %s", chunk.index, report.pruned)
        if self.member_ids != before:
            for cb in self._listeners:
                cb(self.member_ids)
        return report

    def predict_proba(self, X, n_classes: int = 0) -> np.ndarray:
        """Normalized weighted-vote distribution for each row of X."""
        if not any(m.weight > 0 for m in self.members):
            raise NoPositiveWeightError("no member has a positive weight")
        scores = weighted_scores(self.members, X, n_classes)
        return scores / scores.sum(axis=1, keepdims=True)

    def predict_weighted(self, x) -> tuple[int, ClassDistribution]:
        dist = ClassDistribution(self.predict_proba(np.asarray(x, dtype=float).reshape(1, -1))[0])
        return dist.argmax(), dist

    def predict(self, X, n_classes: int = 0) -> np.ndarray:
        """Predicted class indices, falling back to the newest member when no
        member carries positive weight."""
        if not self.members:
            raise NoPositiveWeightError("ensemble is empty")
        try:
            return np.argmax(self.predict_proba(X, n_classes), axis=1)
        except NoPositiveWeightError:
            newest = max(self.members, key=lambda m: m.origin_chunk)
            return np.argmax(_padded_proba(newest.model, np.atleast_2d(X), n_classes), axis=1)

    def member_predictions(self, X) -> np.ndarray:
        """(n, L) matrix of each member's predicted class index."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.stack([np.argmax(m.model.predict_proba(X), axis=1) for m in self.members],
                        axis=1)


def predict_weighted(members: Sequence[EnsembleMember], x) -> tuple[int, ClassDistribution]:
    """Weighted-vote prediction for a single instance; ties go to the lowest class."""
    if not any(m.weight > 0 for m in members):
        raise NoPositiveWeightError("no member has a positive weight")
    scores = weighted_scores(members, np.asarray(x, dtype=float).reshape(1, -1))[0]
    dist = ClassDistribution(scores / scores.sum())
    return dist.argmax(), dist
