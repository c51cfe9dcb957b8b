"""Accuracy-versus-ensemble-size sweeps.

Each size runs its own prequential pass on the same stream. The largest
ensemble's votes are folded into a dependence estimate, which is turned into
a recommended ensemble size.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .core import DEFAULT_TOL, DomainError, SweepResult
from .ensemble import EnsembleConfig, run_prequential
from .estimator import EstimatorState, accumulate, finalize_profile
from .independence import SizeRecommendation, min_ensemble_size, reach_probability
from .streams import RbfConfig, Stream, load_csv_stream, rbf_stream

DEFAULT_SIZES = (2, 4, 8, 16, 32, 64, 128)
SWEEP_COLUMNS = ("ensemble_size", "accuracy", "correct", "instances_seen", "seed")


@dataclass(frozen=True)
class SweepConfig:
    sizes: tuple = DEFAULT_SIZES
    dataset: Union[RbfConfig, str] = field(default_factory=RbfConfig)
    label_column: Union[str, int] = -1
    target_probability: float = 0.999
    seed: int = 0
    window: int = 500
    ridge: float = 1e-6
    bagging_rate: float = 1.0
    feature_fraction: float = 0.75
    tol: float = DEFAULT_TOL
    output: Optional[str] = None

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or any(s < 1 for s in sizes) or any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise DomainError(f"sizes must be strictly increasing positive integers, got {list(sizes)}")
        object.__setattr__(self, "sizes", sizes)
        if not 0 < self.target_probability < 1:
            raise DomainError("target probability must lie in (0, 1)")


def engine_seed(seed: int, size: int) -> int:
    """Per-size seed so sweeps over different size lists stay comparable."""
    return int(np.random.SeedSequence([seed, size]).generate_state(1)[0])


def load_dataset(config: SweepConfig) -> Stream:
    if isinstance(config.dataset, RbfConfig):
        return rbf_stream(config.dataset)
    return load_csv_stream(config.dataset, config.label_column)


def _run_size(stream, config: SweepConfig, size: int, estimate: bool):
    ecfg = EnsembleConfig(
        n=size,
        window=config.window,
        ridge=config.ridge,
        bagging_rate=config.bagging_rate,
        feature_fraction=config.feature_fraction,
        seed=engine_seed(config.seed, size),
    )
    run = run_prequential(stream, ecfg, m=stream.m, record_votes=estimate)
    result = SweepResult(size, run.correct, run.instances_seen, config.seed)
    state = accumulate(run.votes, m=stream.m, tol=config.tol) if estimate else None
    return result, state


@dataclass
class SweepOutcome:
    results: list
    estimator: EstimatorState
    recommendation: SizeRecommendation
    m: int

    @property
    def profile(self):
        return finalize_profile(self.estimator)

    def accuracy(self, size) -> float:
        for r in self.results:
            if r.ensemble_size == size:
                return r.accuracy
        raise KeyError(size)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for r in self.results:
            writer.writerow([r.ensemble_size, f"{r.accuracy:.12g}", r.correct, r.instances_seen, r.seed])
        return buf.getvalue()

    def summary(self) -> dict:
        profile = self.profile
        return {
            "m": self.m,
            "profile": profile.tolist(),
            "dependent_counts": self.estimator.dependent_counts.tolist(),
            "total_counts": self.estimator.total_counts.tolist(),
            "recommendation": self.recommendation.to_dict(),
            "sizes": [
                {
                    "ensemble_size": r.ensemble_size,
                    "accuracy": r.accuracy,
                    "reach_probability": reach_probability(r.ensemble_size, self.m, profile),
                }
                for r in self.results
            ],
        }


def run_sweep(config: SweepConfig, stream: Optional[Stream] = None, jobs: int = 1) -> SweepOutcome:
    """Prequential accuracy for every size in ``config.sizes``.

    Sizes may run in separate processes (``jobs > 1``); results are reported
    in size order and do not depend on ``jobs``.
    """
    if stream is None:
        stream = load_dataset(config)
    largest = config.sizes[-1]
    tasks = [(s, s == largest) for s in config.sizes]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_size, stream, config, s, est) for s, est in tasks]
            outs = [f.result() for f in futures]
    else:
        outs = [_run_size(stream, config, s, est) for s, est in tasks]
    results = [r for r, _ in outs]
    state = next(st for _, st in outs if st is not None)
    rec = min_ensemble_size(stream.m, finalize_profile(state), config.target_probability)
    outcome = SweepOutcome(results, state, rec, stream.m)
    if config.output:
        with open(config.output, "w", newline="", encoding="utf-8") as fh:
            fh.write(outcome.to_csv())
    return outcome
