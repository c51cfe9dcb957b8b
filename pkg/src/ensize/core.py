"""Domain vocabulary shared by every other module.

Votes are plain float64 numpy arrays wrapped in frozen dataclasses; the
arrays are flagged read-only so a value can be handed to several consumers
without defensive copies.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

#: Absolute tolerance used for sums, rank decisions and weight checks.
DEFAULT_TOL = 1e-9


class EnsizeError(Exception):
    """Base class for all errors raised by this package."""


class NormalizationError(EnsizeError, ValueError):
    pass


class DomainError(EnsizeError, ValueError):
    pass


class ShapeError(EnsizeError, ValueError):
    pass


class CapacityError(EnsizeError, ValueError):
    pass


class ParseError(EnsizeError, ValueError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class DatasetIOError(EnsizeError, OSError):
    pass


@contextmanager
def open_for_writing(target):
    """Yield a text handle for a path, or pass an already-open handle through."""
    if hasattr(target, "write"):
        yield target
    else:
        with open(target, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _frozen(values, ndim=1):
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise ShapeError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class VoteVector:
    """One classifier's score vector over ``m`` class labels, summing to 1."""

    scores: np.ndarray

    def __post_init__(self):
        scores = _frozen(self.scores)
        if scores.size < 2:
            raise ShapeError("a vote needs at least two class labels")
        if not np.all(np.isfinite(scores)):
            raise NormalizationError("vote components must be finite")
        if abs(scores.sum() - 1.0) > DEFAULT_TOL:
            raise NormalizationError(f"vote components sum to {scores.sum()!r}, not 1")
        object.__setattr__(self, "scores", scores)

    @property
    def m(self) -> int:
        return self.scores.size

    def __len__(self):
        return self.scores.size

    def __getitem__(self, j):
        return self.scores[j]


@dataclass(frozen=True)
class IdealVector:
    """One-hot vector pointing at the true class of an instance."""

    class_index: int
    m: int

    def __post_init__(self):
        if self.m < 1 or not 0 <= self.class_index < self.m:
            raise DomainError(f"class index {self.class_index} outside [0, {self.m})")

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.m)
        out[self.class_index] = 1.0
        return out


@dataclass(frozen=True)
class VoteMatrix:
    """All component votes for one instance; row ``i`` is classifier ``i``."""

    rows: np.ndarray
    instance_id: int = 0

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim == 1:
            rows = rows[None, :]
        rows = _frozen(rows, ndim=2)
        if rows.shape[0] < 1:
            raise ShapeError("a vote matrix needs at least one row")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_votes(cls, votes: Sequence[VoteVector], instance_id=0):
        lengths = {v.m for v in votes}
        if len(lengths) > 1:
            raise ShapeError(f"votes have different lengths {sorted(lengths)}")
        return cls(np.stack([v.scores for v in votes]), instance_id)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def m(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class WeightVector:
    weights: np.ndarray

    def __post_init__(self):
        weights = _frozen(self.weights)
        if not np.all(np.isfinite(weights)):
            raise DomainError("weights must be finite")
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return self.weights.size

    def total(self) -> float:
        return float(self.weights.sum())


@dataclass(frozen=True)
class DependenceProfile:
    """Probabilities ``p_1 .. p_{m-1}`` that a new vote falls inside the
    span of the votes seen so far, indexed by the span's dimension.

    ``profile[k - 1]`` is the probability for a ``k``-dimensional span.
    """

    p: np.ndarray

    def __post_init__(self):
        p = _frozen(self.p)
        if p.size < 1:
            raise DomainError("a dependence profile needs at least one entry (m >= 2)")
        if not np.all(np.isfinite(p)) or np.any(p < 0.0) or np.any(p > 1.0):
            raise DomainError(f"dependence probabilities must lie in [0, 1], got {p.tolist()}")
        object.__setattr__(self, "p", p)

    @property
    def m(self) -> int:
        return self.p.size + 1

    def __len__(self):
        return self.p.size

    def __getitem__(self, k):
        return self.p[k]

    def tolist(self):
        return self.p.tolist()


def as_profile(profile) -> DependenceProfile:
    if isinstance(profile, DependenceProfile):
        return profile
    return DependenceProfile(np.atleast_1d(np.asarray(profile, dtype=np.float64)))


@dataclass(frozen=True)
class StreamInstance:
    features: np.ndarray
    label: int

    def __post_init__(self):
        object.__setattr__(self, "features", _frozen(self.features))
        if self.label < 0:
            raise DomainError(f"labels are dense non-negative indices, got {self.label}")


@dataclass(frozen=True)
class SweepResult:
    """Accuracy of one prequential run at a given ensemble size."""

    ensemble_size: int
    correct: int
    instances_seen: int
    seed: int
    accuracy: float = field(init=False)

    def __post_init__(self):
        acc = self.correct / self.instances_seen if self.instances_seen else 0.0
        object.__setattr__(self, "accuracy", acc)


def normalize_vote(raw) -> VoteVector:
    """Scale non-negative raw scores so they sum to one.

    Raises
    ------
    NormalizationError
        If the input is all zeros, negative, or not finite.
    """
    arr = np.asarray(raw, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 2:
        raise ShapeError(f"expected m >= 2 raw scores, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NormalizationError("raw scores must be finite")
    if np.any(arr < 0):
        raise NormalizationError("raw scores must be non-negative")
    total = arr.sum()
    if total <= 0:
        raise NormalizationError("cannot normalize an all-zero vote")
    return VoteVector(arr / total)


def ideal_vector(class_index: int, m: int) -> IdealVector:
    return IdealVector(int(class_index), int(m))
