"""Rank decisions and the ideal-weight solver.

Two independent routes to rank are kept on purpose: :func:`rank_with_tolerance`
counts singular values, :class:`OrthoBasis` grows a Gram-Schmidt basis one row
at a time. The dependence estimator uses the incremental route; tests check the
two agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_TOL,
    IdealVector,
    ShapeError,
    VoteMatrix,
    WeightVector,
)


@dataclass(frozen=True)
class RankReport:
    rank: int
    tolerance: float


def _as_matrix(matrix) -> np.ndarray:
    if isinstance(matrix, VoteMatrix):
        return np.asarray(matrix.rows)
    try:
        arr = np.array(matrix, dtype=np.float64)
    except (ValueError, TypeError) as exc:
        raise ShapeError(f"matrix is not rectangular: {exc}") from None
    if arr.ndim == 1 and arr.size:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ShapeError("matrix entries must be finite")
    return arr


def rank_with_tolerance(matrix, tol: float = DEFAULT_TOL) -> RankReport:
    """Number of singular values strictly above ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    arr = _as_matrix(matrix)
    if arr.size == 0:
        return RankReport(0, tol)
    sv = np.linalg.svd(arr, compute_uv=False)
    return RankReport(int(np.count_nonzero(sv > tol)), tol)


class OrthoBasis:
    """Orthonormal basis of the span of the rows added so far.

    Each new row is orthogonalized twice against the basis (classical
    Gram-Schmidt with one reorthogonalization pass), which keeps the basis
    orthonormal to working precision even for nearly dependent rows.
    """

    def __init__(self, m: int):
        self.m = int(m)
        self._q = np.empty((self.m, self.m))
        self.rank = 0

    @property
    def basis(self) -> np.ndarray:
        return self._q[: self.rank].copy()

    def residual(self, row) -> np.ndarray:
        r = np.array(row, dtype=np.float64)
        if r.shape != (self.m,):
            raise ShapeError(f"row of shape {r.shape} does not match dimension {self.m}")
        if self.rank:
            q = self._q[: self.rank]
            r -= q.T @ (q @ r)
            r -= q.T @ (q @ r)
        return r

    def add(self, row, tol: float = DEFAULT_TOL) -> bool:
        r = self.residual(row)
        norm = np.linalg.norm(r)
        if norm <= tol or self.rank == self.m:
            return False
        self._q[self.rank] = r / norm
        self.rank += 1
        return True

    def copy(self) -> "OrthoBasis":
        other = OrthoBasis(self.m)
        other._q[: self.rank] = self._q[: self.rank]
        other.rank = self.rank
        return other


def incremental_rank_add_row(state: OrthoBasis, row, tol: float = DEFAULT_TOL):
    """Functional wrapper: returns ``(new_state, increased)`` and leaves
    ``state`` untouched."""
    new_state = state.copy()
    increased = new_state.add(row, tol)
    return new_state, increased


def independent_rows(rows, tol: float = DEFAULT_TOL) -> list[int]:
    """Indices of the first rows (in order) that each grow the span."""
    arr = _as_matrix(rows)
    basis = OrthoBasis(arr.shape[1])
    picked = []
    for i, row in enumerate(arr):
        if basis.add(row, tol):
            picked.append(i)
            if basis.rank == basis.m:
                break
    return picked


def least_squares_weights(columns: np.ndarray, target: np.ndarray, ridge: float = 0.0) -> np.ndarray:
    """Minimum-norm minimizer of ``||columns @ w - target||^2 + ridge ||w||^2``."""
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    a = np.asarray(columns, dtype=np.float64)
    b = np.asarray(target, dtype=np.float64)
    if ridge > 0:
        k = a.shape[1]
        a = np.vstack([a, np.sqrt(ridge) * np.eye(k)])
        b = np.concatenate([b, np.zeros(k)])
    w, *_ = np.linalg.lstsq(a, b, rcond=None)
    return w


def solve_ideal_weights(votes, target: IdealVector, ridge: float = 0.0, tol: float = DEFAULT_TOL) -> WeightVector:
    """Weights whose combination of the votes reproduces the ideal vector.

    When the rows hold ``m`` linearly independent votes the first such set
    (in row order) gets the unique exact solution and every other classifier
    gets weight 0. Otherwise the regularized least-squares minimizer of the
    Euclidean distance to the ideal vector is returned, taking the
    minimum-norm solution when it is not unique.
    """
    s = _as_matrix(votes)
    n, m = s.shape
    if target.m != m:
        raise ShapeError(f"target has length {target.m}, votes have {m} columns")
    o = target.to_array()
    picked = independent_rows(s, tol)
    if len(picked) == m:
        w = np.zeros(n)
        w[picked] = np.linalg.solve(s[picked].T, o)
        return WeightVector(w)
    return WeightVector(least_squares_weights(s.T, o, ridge))


def vote_loss(weights, votes, target) -> float:
    """Euclidean distance between the combined vote and the ideal vector."""
    w = weights.weights if isinstance(weights, WeightVector) else np.asarray(weights)
    o = target.to_array() if isinstance(target, IdealVector) else np.asarray(target)
    return float(np.linalg.norm(w @ _as_matrix(votes) - o))
