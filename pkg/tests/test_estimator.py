import numpy as np
import pytest

from ensize.core import DomainError, ShapeError, VoteMatrix
from ensize.estimator import (
    EstimatorState,
    accumulate,
    estimate_from_stream,
    finalize_profile,
    observe_instance,
    read_votes_csv,
    write_votes_csv,
)
from ensize.streams import PlantedVoteConfig, synthetic_vote_stream


def test_independent_rows_break_early():
    s = observe_instance(EstimatorState(2), [(1, 0), (0, 1)])
    assert s.total_counts.tolist() == [1, 0]
    assert s.dependent_counts.tolist() == [0, 0]


def test_duplicated_vote_counts_as_dependent():
    s = observe_instance(EstimatorState(2), [(0.5, 0.5), (0.5, 0.5)])
    assert s.total_counts.tolist() == [1, 0]
    assert s.dependent_counts.tolist() == [1, 0]


def test_hand_trace_m3():
    rows = [(1, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    s = observe_instance(EstimatorState(3), rows)
    assert s.total_counts.tolist() == [2, 1, 0]
    assert s.dependent_counts.tolist() == [1, 0, 0]


def test_rows_after_full_rank_are_ignored():
    rows = [(1, 0), (0, 1), (1, 0), (0.3, 0.7)]
    s = observe_instance(EstimatorState(2), rows)
    assert s.total_counts.tolist() == [1, 0]


def test_observe_does_not_mutate_input():
    s0 = EstimatorState(2)
    observe_instance(s0, [(1, 0), (1, 0)])
    assert s0.total_counts.sum() == 0 and s0.instances_processed == 0


def test_shape_mismatch():
    with pytest.raises(ShapeError):
        observe_instance(EstimatorState(3), [(1, 0), (0, 1)])


@pytest.mark.parametrize(
    "dep, tot, expected",
    [((3, 0), (10, 0), (0.3,)), ((0, 0, 0), (5, 0, 0), (0.0, 1.0)), ((2, 1, 0), (8, 4, 0), (0.25, 0.25))],
)
def test_finalize(dep, tot, expected):
    state = EstimatorState(len(dep), np.array(dep), np.array(tot))
    np.testing.assert_allclose(finalize_profile(state).p, expected)


def test_identical_rows_give_all_ones():
    stream = [np.tile([0.2, 0.3, 0.5], (5, 1)) for _ in range(10)]
    np.testing.assert_array_equal(estimate_from_stream(stream).p, [1.0, 1.0])


def test_canonical_basis_gives_all_zeros():
    stream = [VoteMatrix(np.eye(4), t) for t in range(10)]
    np.testing.assert_array_equal(estimate_from_stream(stream).p, [0.0, 0.0, 0.0])


def test_empty_source():
    with pytest.raises(DomainError):
        estimate_from_stream([])


def test_planted_profile_recovered():
    cfg = PlantedVoteConfig([0.3], n=8, m=2, instances=20_000, seed=42)
    p_hat = estimate_from_stream(synthetic_vote_stream(cfg)).p[0]
    assert 0.28 <= p_hat <= 0.32


def test_counts_invariants_and_merge():
    cfg = PlantedVoteConfig([0.5, 0.4], n=6, m=3, instances=600, seed=5)
    votes = list(synthetic_vote_stream(cfg))
    whole = accumulate(votes)
    assert np.all(whole.dependent_counts <= whole.total_counts)
    left, right = accumulate(votes[:250]), accumulate(votes[250:])
    merged = left.merge(right)
    np.testing.assert_array_equal(merged.total_counts, whole.total_counts)
    np.testing.assert_array_equal(merged.dependent_counts, whole.dependent_counts)
    assert merged.instances_processed == 600
    again = accumulate(votes)
    np.testing.assert_array_equal(again.total_counts, whole.total_counts)


def test_row_order_matters():
    a = observe_instance(EstimatorState(3), [(1, 0, 0), (1, 0, 0), (0, 1, 0)])
    b = observe_instance(EstimatorState(3), [(1, 0, 0), (0, 1, 0), (1, 0, 0)])
    assert a.dependent_counts.tolist() == [1, 0, 0]
    assert b.dependent_counts.tolist() == [0, 1, 0]


def test_votes_csv_round_trip(tmp_path):
    cfg = PlantedVoteConfig([0.5, 0.2], n=4, m=3, instances=30, seed=9)
    votes = list(synthetic_vote_stream(cfg))
    path = tmp_path / "votes.csv"
    write_votes_csv(path, votes)
    back = list(read_votes_csv(path))
    assert len(back) == 30
    for a, b in zip(votes, back):
        assert a.instance_id == b.instance_id
        np.testing.assert_array_equal(a.rows, b.rows)
    header = path.read_text().splitlines()[0]
    assert header == "instance_id,classifier_id,score_0,score_1,score_2"
