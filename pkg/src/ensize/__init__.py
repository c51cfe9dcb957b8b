"""Ensemble sizing from the linear independence of classifier votes."""

from .core import (
    DEFAULT_TOL,
    CapacityError,
    DatasetIOError,
    DependenceProfile,
    DomainError,
    EnsizeError,
    IdealVector,
    NormalizationError,
    ParseError,
    ShapeError,
    StreamInstance,
    SweepResult,
    VoteMatrix,
    VoteVector,
    WeightVector,
    ideal_vector,
    normalize_vote,
)
from .ensemble import EnsembleConfig, fit_weights, ensemble_predict, run_prequential
from .estimator import EstimatorState, estimate_from_stream, finalize_profile, observe_instance
from .independence import (
    SizeRecommendation,
    min_ensemble_size,
    reach_probability,
    reach_probability_bruteforce,
    simulate_chain,
    unreached_probability,
)
from .linalg import OrthoBasis, incremental_rank_add_row, rank_with_tolerance, solve_ideal_weights
from .streams import PlantedVoteConfig, RbfConfig, load_csv_stream, rbf_stream, synthetic_vote_stream

__version__ = "0.1.0"
