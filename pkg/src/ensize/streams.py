"""Data streams: random-RBF generator, planted-dependence vote generator and
CSV ingestion."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .core import (
    DatasetIOError,
    DependenceProfile,
    DomainError,
    ParseError,
    StreamInstance,
    open_for_writing,
    VoteMatrix,
    as_profile,
)
from .linalg import OrthoBasis


@dataclass
class Stream:
    """A materialized stream: ``features[t]`` with dense label ``labels[t]``.

    Iterating yields :class:`StreamInstance` values in stream order.
    ``label_names[j]`` is the original label that was mapped to index ``j``.
    """

    features: np.ndarray
    labels: np.ndarray
    m: int
    label_names: list = field(default_factory=list)
    feature_names: list = field(default_factory=list)

    def __len__(self):
        return len(self.labels)

    def __iter__(self) -> Iterator[StreamInstance]:
        for x, y in zip(self.features, self.labels):
            yield StreamInstance(x, int(y))

    def __getitem__(self, t) -> StreamInstance:
        return StreamInstance(self.features[t], int(self.labels[t]))

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @classmethod
    def from_instances(cls, instances: Sequence[StreamInstance]):
        instances = list(instances)
        if not instances:
            raise DomainError("empty stream")
        widths = {inst.features.size for inst in instances}
        if len(widths) != 1:
            raise DomainError(f"feature length varies within the stream: {sorted(widths)}")
        x = np.stack([inst.features for inst in instances])
        y = np.array([inst.label for inst in instances], dtype=np.int64)
        m = max(int(y.max()) + 1, 2)
        return cls(x, y, m, list(range(m)))


@dataclass(frozen=True)
class RbfConfig:
    m: int = 4
    n_features: int = 20
    centroids_per_class: int = 5
    noise_std: float = 0.05
    instances: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.m < 2:
            raise DomainError("RBF stream needs m >= 2")
        if self.instances < 1:
            raise DomainError("RBF stream needs at least one instance")
        if self.centroids_per_class < 1:
            raise DomainError("need at least one centroid per class")
        if self.n_features < 1:
            raise DomainError("need at least one feature")
        if not self.noise_std >= 0:
            raise DomainError("noise_std must be >= 0")


def rbf_stream(config: RbfConfig) -> Stream:
    """Random radial-basis-function stream.

    Every class owns ``centroids_per_class`` centroids placed uniformly in the
    unit hypercube. An instance picks a class uniformly, one of its centroids
    uniformly, and adds isotropic Gaussian noise.
    """
    rng = np.random.default_rng(config.seed)
    k, d = config.centroids_per_class, config.n_features
    centroids = rng.random((config.m, k, d))
    labels = rng.integers(0, config.m, size=config.instances)
    which = rng.integers(0, k, size=config.instances)
    x = centroids[labels, which]
    if config.noise_std > 0:
        x = x + rng.normal(0.0, config.noise_std, size=x.shape)
    return Stream(
        x,
        labels.astype(np.int64),
        config.m,
        list(range(config.m)),
        [f"f{i}" for i in range(d)],
    )


@dataclass(frozen=True)
class PlantedVoteConfig:
    profile: DependenceProfile
    n: int
    m: int
    instances: int
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "profile", as_profile(self.profile))
        if self.n < 1:
            raise DomainError("need at least one vote per instance")
        if len(self.profile) != self.m - 1:
            raise DomainError(f"profile has {len(self.profile)} entries, expected m-1 = {self.m - 1}")
        if self.instances < 0:
            raise DomainError("instances must be >= 0")


# a fresh vote must clear the current span by this much to count as new
_FRESH_MARGIN = 1e-3


def synthetic_vote_stream(config: PlantedVoteConfig) -> Iterator[VoteMatrix]:
    """Vote matrices whose rank growth follows a known dependence profile.

    Per instance, the first vote is uniform on the simplex. While the votes
    span ``d < m`` dimensions, each next vote is, with probability ``p_d``, a
    Dirichlet(1, ..., 1) mixture of the independent votes drawn so far (so
    it lies exactly in their span), and otherwise a fresh simplex point off
    that span. Once the span is full any simplex point is dependent.
    """
    rng = np.random.default_rng(config.seed)
    p = config.profile.p
    m, n = config.m, config.n
    ones = np.ones(m)
    for t in range(config.instances):
        rows = np.empty((n, m))
        basis = OrthoBasis(m)
        kept = []
        for i in range(n):
            d = len(kept)
            if d == m or (d > 0 and rng.random() < p[d - 1]):
                if d == m:
                    vote = rng.dirichlet(ones)
                else:
                    vote = rng.dirichlet(np.ones(d)) @ np.array(kept)
            else:
                while True:
                    vote = rng.dirichlet(ones)
                    if np.linalg.norm(basis.residual(vote)) > _FRESH_MARGIN:
                        break
                basis.add(vote)
                kept.append(vote)
            rows[i] = vote
        yield VoteMatrix(rows, t)


def _parse_float(cell, row, col, name):
    try:
        return float(cell)
    except ValueError:
        raise ParseError(
            f"row {row}, column {col + 1} ({name!r}): cannot parse {cell!r} as a number",
            row=row,
            column=name,
        ) from None


def load_csv_stream(path, label_column=-1) -> Stream:
    """Read a comma-separated file with a header row.

    ``label_column`` is a header name or a column index (negative indices
    count from the end). All other columns are numeric features, kept in
    file order. Labels are mapped to ``0, 1, ...`` in first-seen order, so
    ``m`` grows as new labels appear.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DatasetIOError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise ParseError(f"{path}: missing header row", row=1)
        header = [h.strip() for h in header]
        if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
            if label_column not in header:
                raise DomainError(f"{path}: no column named {label_column!r}")
            li = header.index(label_column)
        else:
            li = int(label_column)
            if not -len(header) <= li < len(header):
                raise DomainError(f"{path}: label column {li} out of range")
            li %= len(header)
        feat_cols = [j for j in range(len(header)) if j != li]
        mapping: dict[str, int] = {}
        xs, ys = [], []
        for row_no, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise ParseError(f"row {row_no}: expected {len(header)} cells, found {len(rec)}", row=row_no)
            xs.append([_parse_float(rec[j], row_no, j, header[j]) for j in feat_cols])
            label = rec[li].strip()
            ys.append(mapping.setdefault(label, len(mapping)))
    if not ys:
        raise ParseError(f"{path}: no data rows", row=2)
    return Stream(
        np.array(xs, dtype=np.float64).reshape(len(ys), len(feat_cols)),
        np.array(ys, dtype=np.int64),
        len(mapping),
        list(mapping),
        [header[j] for j in feat_cols],
    )


def write_stream_csv(path, stream: Stream, label_name="label") -> None:
    """Dump a stream in the same format :func:`load_csv_stream` reads."""
    names = stream.feature_names or [f"f{i}" for i in range(stream.n_features)]
    with open_for_writing(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(list(names) + [label_name])
        for x, y in zip(stream.features, stream.labels):
            label = stream.label_names[y] if stream.label_names else int(y)
            writer.writerow([repr(float(v)) for v in x] + [label])
