"""Estimate a dependence profile from per-instance vote matrices.

For every instance the classifier votes are added one row at a time to a
growing span. While the span has dimension ``d`` each added row is one trial
for ``p_d``; the trial fails (the vote is dependent) when the dimension does
not grow. The scan over an instance stops as soon as the span is full.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from itertools import groupby
from typing import Iterable

import numpy as np

from .core import (
    DEFAULT_TOL,
    DatasetIOError,
    open_for_writing,
    DependenceProfile,
    DomainError,
    ParseError,
    ShapeError,
    VoteMatrix,
)
from .linalg import OrthoBasis


@dataclass
class EstimatorState:
    """Running trial counts, one slot per span dimension ``1..m``.

    ``dependent_counts[d - 1]`` counts votes that left a ``d``-dimensional
    span unchanged, ``total_counts[d - 1]`` counts all votes added while the
    span had dimension ``d``.
    """

    m: int
    dependent_counts: np.ndarray = field(default=None)
    total_counts: np.ndarray = field(default=None)
    instances_processed: int = 0

    def __post_init__(self):
        if self.m < 2:
            raise DomainError(f"need m >= 2, got {self.m}")
        if self.dependent_counts is None:
            self.dependent_counts = np.zeros(self.m, dtype=np.int64)
        if self.total_counts is None:
            self.total_counts = np.zeros(self.m, dtype=np.int64)

    def copy(self) -> "EstimatorState":
        return EstimatorState(
            self.m,
            self.dependent_counts.copy(),
            self.total_counts.copy(),
            self.instances_processed,
        )

    def merge(self, other: "EstimatorState") -> "EstimatorState":
        if other.m != self.m:
            raise ShapeError(f"cannot merge states for m={self.m} and m={other.m}")
        return EstimatorState(
            self.m,
            self.dependent_counts + other.dependent_counts,
            self.total_counts + other.total_counts,
            self.instances_processed + other.instances_processed,
        )

    def update(self, votes, tol: float = DEFAULT_TOL) -> None:
        """In-place version of :func:`observe_instance`."""
        rows = votes.rows if isinstance(votes, VoteMatrix) else np.asarray(votes, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[1] != self.m:
            raise ShapeError(f"vote matrix of shape {rows.shape} does not have m={self.m} columns")
        basis = OrthoBasis(self.m)
        basis.add(rows[0], tol)
        # the first vote always spans a line, whatever the residual test says
        dim = 1
        for row in rows[1:]:
            prev = dim
            if basis.add(row, tol):
                dim += 1
            else:
                self.dependent_counts[dim - 1] += 1
            self.total_counts[prev - 1] += 1
            if dim == self.m:
                break
        self.instances_processed += 1


def observe_instance(state: EstimatorState, votes, tol: float = DEFAULT_TOL) -> EstimatorState:
    new = state.copy()
    new.update(votes, tol)
    return new


def finalize_profile(state: EstimatorState) -> DependenceProfile:
    """Turn counts into ``p_1 .. p_{m-1}``; a dimension never visited gets
    probability 1."""
    dep = state.dependent_counts[: state.m - 1].astype(np.float64)
    tot = state.total_counts[: state.m - 1].astype(np.float64)
    p = np.ones(state.m - 1)
    seen = tot > 0
    p[seen] = dep[seen] / tot[seen]
    return DependenceProfile(p)


def accumulate(votes_source: Iterable, m: int | None = None, tol: float = DEFAULT_TOL) -> EstimatorState:
    state = None
    for votes in votes_source:
        rows = votes.rows if isinstance(votes, VoteMatrix) else np.asarray(votes)
        if state is None:
            state = EstimatorState(m if m is not None else rows.shape[1])
        state.update(rows, tol)
    if state is None:
        raise DomainError("cannot estimate a profile from an empty vote source")
    return state


def estimate_from_stream(votes_source: Iterable, tol: float = DEFAULT_TOL) -> DependenceProfile:
    """Fold every vote matrix into a fresh state and finalize it.

    ``votes_source`` may yield :class:`VoteMatrix` values or plain ``(n, m)``
    arrays, e.g. a ``(T, n, m)`` array of recorded votes.
    """
    return finalize_profile(accumulate(votes_source, tol=tol))


VOTES_HEADER = ("instance_id", "classifier_id")


def write_votes_csv(path, vote_matrices: Iterable) -> None:
    """Recorded-vote format: ``instance_id, classifier_id, score_0..score_{m-1}``."""
    with open_for_writing(path) as fh:
        writer = None
        for t, votes in enumerate(vote_matrices):
            if isinstance(votes, VoteMatrix):
                rows, iid = votes.rows, votes.instance_id
            else:
                rows, iid = np.asarray(votes), t
            if writer is None:
                writer = csv.writer(fh)
                writer.writerow(list(VOTES_HEADER) + [f"score_{j}" for j in range(rows.shape[1])])
            for i, row in enumerate(rows):
                writer.writerow([iid, i] + [repr(float(x)) for x in row])


def read_votes_csv(path):
    """Yield one :class:`VoteMatrix` per ``instance_id`` group, rows sorted by
    ``classifier_id``."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DatasetIOError(f"cannot open votes file {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 4:
            raise ParseError(f"{path}: expected header instance_id,classifier_id,score_0,...", row=1)

        def parsed():
            for lineno, rec in enumerate(reader, start=2):
                if len(rec) != len(header):
                    raise ParseError(f"{path}: row {lineno} has {len(rec)} cells, expected {len(header)}", row=lineno)
                try:
                    iid, cid = int(rec[0]), int(rec[1])
                except ValueError:
                    raise ParseError(f"{path}: row {lineno}: non-integer id", row=lineno) from None
                try:
                    scores = [float(x) for x in rec[2:]]
                except ValueError:
                    raise ParseError(f"{path}: row {lineno}: non-numeric score", row=lineno) from None
                yield iid, cid, scores

        for iid, group in groupby(parsed(), key=lambda r: r[0]):
            items = sorted(group, key=lambda r: r[1])
            yield VoteMatrix(np.array([r[2] for r in items]), iid)
