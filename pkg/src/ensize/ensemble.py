"""Online weighted-vote ensemble with prequential evaluation.

The component classifiers are incremental Gaussian naive-Bayes models, each
restricted to a random subset of the features and fed a Poisson number of
copies of every instance (online bagging). They are stored side by side in
one :class:`LearnerPool` so a whole ensemble is scored with a handful of
array operations per instance.

Ensemble weights minimize the squared Euclidean distance between the
weighted vote and the one-hot target over a trailing window and are refit
every ``window`` instances.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .core import (
    DomainError,
    IdealVector,
    ShapeError,
    VoteMatrix,
    VoteVector,
    WeightVector,
)

VARIANCE_FLOOR = 1e-6
_LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class EnsembleConfig:
    n: int
    window: int = 500
    ridge: float = 1e-6
    bagging_rate: float = 1.0
    feature_fraction: float = 0.75
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("ensemble needs n >= 1")
        if self.window < 1:
            raise DomainError("window must be >= 1")
        if self.ridge < 0:
            raise DomainError("ridge must be >= 0")
        if not self.bagging_rate > 0:
            raise DomainError("bagging_rate must be > 0")
        if not 0 < self.feature_fraction <= 1:
            raise DomainError("feature_fraction must be in (0, 1]")


class LearnerPool:
    """``n`` incremental Gaussian naive-Bayes learners over ``m`` classes.

    Per learner and class the pool keeps the weighted count, the running
    mean and the sum of squared deviations of every feature (Welford
    updates with integer weights). ``masks[i]`` selects the features learner
    ``i`` looks at.
    """

    def __init__(self, n, m, n_features, feature_fraction=1.0, bagging_rate=1.0,
                 seed=0, variance_floor=VARIANCE_FLOOR):
        self.n, self.m, self.d = int(n), int(m), int(n_features)
        self.bagging_rate = float(bagging_rate)
        self.variance_floor = float(variance_floor)
        self.rng = np.random.default_rng(seed)
        k = max(1, int(round(feature_fraction * self.d)))
        self.masks = np.zeros((self.n, self.d))
        for i in range(self.n):
            self.masks[i, self.rng.choice(self.d, size=k, replace=False)] = 1.0
        self.counts = np.zeros((self.n, self.m))
        self.means = np.zeros((self.n, self.m, self.d))
        self.sq_dev = np.zeros((self.n, self.m, self.d))
        self._inv_var = np.full((self.n, self.m, self.d), 1.0 / self.variance_floor)
        self._log_norm = np.zeros((self.n, self.m))
        self._refresh(slice(None))

    def _refresh(self, cls):
        counts = self.counts[:, cls, None]
        var = np.maximum(self.sq_dev[:, cls] / np.maximum(counts, 1.0), self.variance_floor)
        self._inv_var[:, cls] = 1.0 / var
        subs = "icd,id->ic" if isinstance(cls, slice) else "id,id->i"
        self._log_norm[:, cls] = np.einsum(subs, np.log(var) + _LOG_2PI, self.masks)

    def ensure_classes(self, m):
        """Grow the class dimension to ``m`` (labels seen for the first time)."""
        extra = int(m) - self.m
        if extra <= 0:
            return
        self.counts = np.pad(self.counts, ((0, 0), (0, extra)))
        self.means = np.pad(self.means, ((0, 0), (0, extra), (0, 0)))
        self.sq_dev = np.pad(self.sq_dev, ((0, 0), (0, extra), (0, 0)))
        self._inv_var = np.pad(self._inv_var, ((0, 0), (0, extra), (0, 0)))
        self._log_norm = np.pad(self._log_norm, ((0, 0), (0, extra)))
        old = self.m
        self.m = int(m)
        self._refresh(slice(old, self.m))

    def predict(self, x) -> np.ndarray:
        """Vote matrix of shape ``(n, m)``; each row sums to one.

        Classes a learner has never trained on get score 0. A learner that
        has seen nothing votes uniformly.
        """
        x = np.asarray(x, dtype=np.float64)
        diff = x - self.means
        quad = np.einsum("icd,id->ic", diff * diff * self._inv_var, self.masks)
        total = self.counts.sum(axis=1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_prior = np.log(self.counts / np.maximum(total, 1.0))
            ll = log_prior - 0.5 * (quad + self._log_norm)
            ll -= ll.max(axis=1, keepdims=True)
            votes = np.exp(ll)
            votes /= votes.sum(axis=1, keepdims=True)
        untrained = total[:, 0] == 0
        if untrained.any():
            votes[untrained] = 1.0 / self.m
        return votes

    def train(self, x, label, multiplicity=None) -> np.ndarray:
        """Absorb one instance; returns the per-learner multiplicities used.

        Without explicit ``multiplicity`` each learner draws its own
        Poisson(``bagging_rate``) count from the pool's generator.
        """
        if label >= self.m:
            self.ensure_classes(label + 1)
        x = np.asarray(x, dtype=np.float64)
        if multiplicity is None:
            k = self.rng.poisson(self.bagging_rate, size=self.n).astype(np.float64)
        else:
            k = np.broadcast_to(np.asarray(multiplicity, dtype=np.float64), (self.n,)).copy()
        hit = k > 0
        if not hit.any():
            return k
        c_new = self.counts[:, label] + k
        delta = x - self.means[:, label]
        step = np.where(hit, k / np.where(hit, c_new, 1.0), 0.0)[:, None]
        self.means[:, label] += step * delta
        self.sq_dev[:, label] += k[:, None] * delta * (x - self.means[:, label])
        self.counts[:, label] = c_new
        self._refresh(label)
        return k


def new_learner(m, n_features, feature_fraction=1.0, bagging_rate=1.0, seed=0) -> LearnerPool:
    """A single base learner (a pool of size one)."""
    return LearnerPool(1, m, n_features, feature_fraction, bagging_rate, seed)


def base_predict(state: LearnerPool, features, index: int = 0) -> VoteVector:
    return VoteVector(state.predict(features)[index])


def base_train(state: LearnerPool, features, label, multiplicity=None) -> LearnerPool:
    state.train(features, label, multiplicity)
    return state


def _window_arrays(window_votes):
    if isinstance(window_votes, tuple) and len(window_votes) == 2 and isinstance(window_votes[0], np.ndarray):
        votes, labels = window_votes
        return np.asarray(votes, dtype=np.float64), np.asarray(labels, dtype=np.int64)
    pairs = list(window_votes)
    if not pairs:
        raise DomainError("cannot fit weights on an empty window")
    votes = np.stack([v.rows if isinstance(v, VoteMatrix) else np.asarray(v) for v, _ in pairs])
    labels = np.array([o.class_index if isinstance(o, IdealVector) else int(o) for _, o in pairs])
    return votes, labels


def fit_weights(window_votes, ridge: float = 0.0) -> WeightVector:
    """Minimize ``sum_t ||sum_i w_i S_i(t) - o(t)||^2 + ridge ||w||^2``.

    ``window_votes`` is a sequence of ``(VoteMatrix, IdealVector)`` pairs or
    a ``(votes, labels)`` tuple of arrays shaped ``(T, n, m)`` and ``(T,)``.
    The normal equations are solved through an eigendecomposition; directions
    with (numerically) zero curvature are dropped, which yields the
    minimum-norm minimizer when the system is degenerate.
    """
    votes, labels = _window_arrays(window_votes)
    if votes.ndim != 3 or votes.shape[0] == 0:
        raise DomainError("cannot fit weights on an empty window")
    t, n, _ = votes.shape
    gram = np.einsum("tim,tjm->ij", votes, votes)
    rhs = votes[np.arange(t), :, labels].sum(axis=0)
    gram[np.diag_indices(n)] += ridge
    evals, evecs = np.linalg.eigh(gram)
    cutoff = max(evals[-1], 0.0) * n * np.finfo(float).eps * 16
    keep = evals > cutoff
    coef = (evecs[:, keep].T @ rhs) / evals[keep]
    return WeightVector(evecs[:, keep] @ coef)


def window_loss(weights, window_votes) -> float:
    """Sum of squared distances between the weighted vote and the target."""
    votes, labels = _window_arrays(window_votes)
    w = weights.weights if isinstance(weights, WeightVector) else np.asarray(weights)
    combined = np.einsum("i,tim->tm", w, votes)
    combined[np.arange(len(labels)), labels] -= 1.0
    return float((combined * combined).sum())


def ensemble_predict(weights, votes):
    """Return ``(predicted, V)`` with ``V = sum_i w_i S_i``; ties go to the
    lowest class index."""
    w = weights.weights if isinstance(weights, WeightVector) else np.asarray(weights, dtype=np.float64)
    rows = votes.rows if isinstance(votes, VoteMatrix) else np.asarray(votes, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[0] != w.size:
        raise ShapeError(f"{w.size} weights do not match vote matrix of shape {rows.shape}")
    v = w @ rows
    return int(np.argmax(v)), v


@dataclass(frozen=True)
class PrequentialRecord:
    instance_index: int
    predicted: int
    actual: int
    ensemble_vote: np.ndarray


@dataclass
class PrequentialRun:
    """Outcome of one test-then-train pass.

    ``votes`` holds every instance's component votes, shape ``(T, n, m)``,
    when recording was requested; it feeds the dependence estimator directly.
    """

    config: EnsembleConfig
    predicted: np.ndarray
    actual: np.ndarray
    ensemble_votes: np.ndarray
    weights: WeightVector
    votes: Optional[np.ndarray] = None

    @property
    def correct(self) -> int:
        return int(np.count_nonzero(self.predicted == self.actual))

    @property
    def instances_seen(self) -> int:
        return len(self.actual)

    @property
    def accuracy(self) -> float:
        return self.correct / self.instances_seen

    @property
    def records(self) -> Iterator[PrequentialRecord]:
        for t in range(self.instances_seen):
            yield PrequentialRecord(t, int(self.predicted[t]), int(self.actual[t]), self.ensemble_votes[t])

    def vote_matrices(self) -> Iterator[VoteMatrix]:
        if self.votes is None:
            raise DomainError("votes were not recorded for this run")
        for t, rows in enumerate(self.votes):
            yield VoteMatrix(rows, t)

    def write_records_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["instance_index", "predicted", "actual"])
            for t, (p, a) in enumerate(zip(self.predicted, self.actual)):
                writer.writerow([t, int(p), int(a)])


def _arrays(stream):
    if hasattr(stream, "features") and hasattr(stream, "labels"):
        x = np.asarray(stream.features, dtype=np.float64)
        y = np.asarray(stream.labels, dtype=np.int64)
        return x, y, getattr(stream, "m", int(y.max()) + 1)
    items = list(stream)
    if not items:
        raise DomainError("empty stream")
    x = np.stack([np.asarray(it.features, dtype=np.float64) for it in items])
    y = np.array([it.label for it in items], dtype=np.int64)
    return x, y, int(y.max()) + 1


def run_prequential(stream, config: EnsembleConfig, m: Optional[int] = None,
                    record_votes: bool = True) -> PrequentialRun:
    """Test-then-train pass over ``stream``.

    Every instance is first classified with the current weights and only then
    used for training. Weights start uniform and are refit on the trailing
    ``config.window`` instances each time that many instances have passed.
    """
    x, y, m_stream = _arrays(stream)
    if len(y) == 0:
        raise DomainError("empty stream")
    m = max(int(m or 0), int(m_stream), 2)
    n, t_total = config.n, len(y)
    pool = LearnerPool(n, m, x.shape[1], config.feature_fraction, config.bagging_rate, config.seed)
    w = np.full(n, 1.0 / n)
    win_votes = np.zeros((config.window, n, m))
    win_labels = np.zeros(config.window, dtype=np.int64)
    predicted = np.empty(t_total, dtype=np.int64)
    combined = np.empty((t_total, m))
    recorded = np.empty((t_total, n, m)) if record_votes else None
    for t in range(t_total):
        s = pool.predict(x[t])
        v = w @ s
        predicted[t] = np.argmax(v)
        combined[t] = v
        if recorded is not None:
            recorded[t] = s
        slot = t % config.window
        win_votes[slot] = s
        win_labels[slot] = y[t]
        pool.train(x[t], y[t])
        if slot == config.window - 1:
            w = fit_weights((win_votes, win_labels), config.ridge).weights
    return PrequentialRun(config, predicted, y.copy(), combined, WeightVector(w), recorded)
