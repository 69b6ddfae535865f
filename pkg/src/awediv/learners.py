"""Chunk-trained base classifiers producing class-probability outputs.

Both learners are trained once on a chunk and frozen afterwards; the
ensemble adapts by reweighting and replacing members, never by updating
them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np

from .core import Chunk

LAPLACE = 1.0
VAR_FLOOR = 1e-9
# keeps every class probability strictly inside (0, 1)
PROB_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class ClassDistribution:
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or len(p) == 0:
            raise ValueError("a class distribution is a non-empty vector")
        if (p < 0).any() or (p > 1).any() or abs(p.sum() - 1.0) > 1e-9:
            raise ValueError("class probabilities must lie in [0, 1] and sum to 1")
        object.__setattr__(self, "probs", p)

    def argmax(self) -> int:
        return int(np.argmax(self.probs))

    def __len__(self) -> int:
        return len(self.probs)


class Classifier(Protocol):
    n_classes: int

    def predict_proba(self, X: np.ndarray) -> np.ndarray: ...


def _normalize_rows(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, PROB_FLOOR, None)
    return p / p.sum(axis=1, keepdims=True)


def _check_chunk(chunk: Chunk):
    if len(chunk) == 0:
        raise ValueError("cannot fit on an empty chunk")
    if chunk.features.shape[1] == 0:
        raise ValueError("cannot fit without features")


class _Frozen:
    n_classes: int

    def predict(self, x) -> ClassDistribution:
        """Class distribution for a single feature vector."""
        row = np.asarray(x, dtype=float).reshape(1, -1)
        return ClassDistribution(self.predict_proba(row)[0])

    def predict_labels(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)


class GaussianNaiveBayes(_Frozen):
    """Gaussian naive Bayes with Laplace-smoothed priors.

    Classes absent from the training chunk fall back to the pooled feature
    statistics, so their posterior is driven by the smoothed prior alone.
    """

    def __init__(self, log_prior, means, variances):
        self.log_prior = log_prior
        self.means = means
        self.variances = variances
        self.n_classes = len(log_prior)
        for arr in (log_prior, means, variances):
            arr.flags.writeable = False

    @classmethod
    def fit(cls, chunk: Chunk) -> "GaussianNaiveBayes":
        _check_chunk(chunk)
        X, y, K = chunk.features, chunk.labels, chunk.n_classes
        counts = np.bincount(y, minlength=K).astype(float)
        prior = (counts + LAPLACE) / (len(y) + LAPLACE * K)

        pooled_mean = X.mean(axis=0)
        pooled_var = X.var(axis=0)
        means = np.tile(pooled_mean, (K, 1))
        variances = np.tile(pooled_var, (K, 1))
        for k in np.flatnonzero(counts):
            Xk = X[y == k]
            means[k] = Xk.mean(axis=0)
            variances[k] = Xk.var(axis=0)
        np.maximum(variances, VAR_FLOOR, out=variances)
        return cls(np.log(prior), means, variances)

    def predict_proba(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        diff = X[:, None, :] - self.means[None, :, :]
        log_lik = -0.5 * (np.log(2 * math.pi * self.variances)[None, :, :]
                          + diff**2 / self.variances[None, :, :]).sum(axis=2)
        joint = log_lik + self.log_prior[None, :]
        joint -= joint.max(axis=1, keepdims=True)
        return _normalize_rows(np.exp(joint))


def _entropy_rows(counts: np.ndarray) -> np.ndarray:
    """Shannon entropy (bits) of each row of class counts."""
    n = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(n > 0, counts / n, 0.0)
        logs = np.where(p > 0, np.log2(p), 0.0)
    return -(p * logs).sum(axis=-1)


class DecisionStump(_Frozen):
    """One-level tree: ``x[feature] <= threshold`` goes left.

    ``feature`` is None for a prior-only stump (no split gained anything).
    """

    def __init__(self, feature, threshold, left, right, n_classes):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.n_classes = n_classes

    @staticmethod
    def best_split(X: np.ndarray, y: np.ndarray, n_classes: int):
        """Highest information-gain (feature, threshold, gain).

        Thresholds are midpoints between consecutive distinct values. Ties
        keep the lowest feature index and then the lowest threshold.
        """
        n = len(y)
        parent = _entropy_rows(np.bincount(y, minlength=n_classes)[None, :].astype(float))[0]
        best = (None, None, 0.0)
        onehot = np.eye(n_classes)[y]
        for f in range(X.shape[1]):
            order = np.argsort(X[:, f], kind="stable")
            xs = X[order, f]
            cut = np.flatnonzero(xs[1:] > xs[:-1])
            if len(cut) == 0:
                continue
            left = np.cumsum(onehot[order], axis=0)[cut]
            right = onehot.sum(axis=0) - left
            n_left = (cut + 1).astype(float)
            child = (n_left * _entropy_rows(left) + (n - n_left) * _entropy_rows(right)) / n
            gains = parent - child
            k = int(np.argmax(gains))
            if gains[k] > best[2] + 1e-12:
                best = (f, 0.5 * (xs[cut[k]] + xs[cut[k] + 1]), float(gains[k]))
        return best

    @classmethod
    def fit(cls, chunk: Chunk) -> "DecisionStump":
        _check_chunk(chunk)
        X, y, K = chunk.features, chunk.labels, chunk.n_classes
        feature, threshold, _ = cls.best_split(X, y, K)

        def leaf(mask):
            counts = np.bincount(y[mask], minlength=K).astype(float)
            return (counts + LAPLACE) / (counts.sum() + LAPLACE * K)

        if feature is None:
            prior = leaf(np.ones(len(y), dtype=bool))
            return cls(None, None, prior, prior, K)
        go_left = X[:, feature] <= threshold
        return cls(feature, float(threshold), leaf(go_left), leaf(~go_left), K)

    def predict_proba(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.feature is None:
            return np.tile(self.left, (len(X), 1))
        go_left = X[:, self.feature] <= self.threshold
        return np.where(go_left[:, None], self.left[None, :], self.right[None, :])


def naive_bayes_fit(chunk: Chunk) -> GaussianNaiveBayes:
    return GaussianNaiveBayes.fit(chunk)


def decision_stump_fit(chunk: Chunk) -> DecisionStump:
    return DecisionStump.fit(chunk)


LEARNERS: dict[str, Callable[[Chunk], _Frozen]] = {
    "nb": naive_bayes_fit,
    "naive_bayes": naive_bayes_fit,
    "stump": decision_stump_fit,
    "decision_stump": decision_stump_fit,
}


def get_learner(name: str) -> Callable[[Chunk], _Frozen]:
    try:
        return LEARNERS[name]
    except KeyError:
        raise ValueError(f"unknown learner {name!r}; choose from {sorted(LEARNERS)}") from None
