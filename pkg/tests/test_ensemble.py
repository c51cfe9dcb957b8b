import numpy as np
import pytest
from scipy.stats import norm

from ensize.core import IdealVector, ShapeError, VoteMatrix, WeightVector
from ensize.ensemble import (
    EnsembleConfig,
    LearnerPool,
    base_predict,
    base_train,
    ensemble_predict,
    fit_weights,
    new_learner,
    run_prequential,
    window_loss,
)
from ensize.streams import RbfConfig, Stream, rbf_stream
from conftest import random_simplex_rows


def test_untrained_learner_votes_uniform():
    np.testing.assert_array_equal(base_predict(new_learner(4, 3), np.zeros(3)).scores, [0.25] * 4)


def test_single_class_learner():
    learner = new_learner(4, 3)
    for x in np.random.default_rng(0).random((10, 3)):
        base_train(learner, x, 2, multiplicity=1)
    assert np.argmax(base_predict(learner, np.full(3, 0.5)).scores) == 2


def test_gaussian_posterior_against_scipy():
    rng = np.random.default_rng(1)
    learner = new_learner(2, 2)
    data = [(rng.normal([0, 0], 0.3), 0) for _ in range(20)] + [(rng.normal([1, 1], 0.5), 1) for _ in range(30)]
    for x, y in data:
        base_train(learner, x, y, multiplicity=1)
    xs = np.array([x for x, _ in data])
    ys = np.array([y for _, y in data])
    probe = np.array([0.4, 0.7])
    logp = []
    for c in (0, 1):
        pts = xs[ys == c]
        logp.append(np.log(len(pts) / len(xs)) + norm.logpdf(probe, pts.mean(0), pts.std(0)).sum())
    logp = np.array(logp)
    expected = np.exp(logp - logp.max())
    expected /= expected.sum()
    np.testing.assert_allclose(base_predict(learner, probe).scores, expected, rtol=1e-9)


def test_separated_classes_are_near_one_hot():
    learner = new_learner(2, 2)
    for _ in range(5):
        base_train(learner, np.array([0.0, 0.0]), 0, multiplicity=1)
        base_train(learner, np.array([1.0, 1.0]), 1, multiplicity=1)
    # zero spread hits the variance floor; log posterior ratio is ~1e6
    vote = base_predict(learner, np.array([1.0, 1.0])).scores
    np.testing.assert_allclose(vote, [0, 1], atol=1e-3)


def test_bagging_multiplicities_reproducible():
    def draws(seed):
        pool = LearnerPool(3, 2, 2, seed=seed)
        rng = np.random.default_rng(5)
        return sum(pool.train(rng.random(2), int(rng.integers(2))).sum() for _ in range(100))

    assert draws(4) == draws(4)


def test_poisson_zero_mass():
    pool = LearnerPool(100_000, 2, 1, seed=0)
    k = pool.train(np.zeros(1), 0)
    assert abs(np.mean(k == 0) - np.exp(-1)) <= 0.01


def test_single_instance_count_equals_multiplicity():
    pool = LearnerPool(5, 3, 2, seed=2)
    k = pool.train(np.array([0.1, 0.2]), 1)
    np.testing.assert_array_equal(pool.counts[:, 1], k)
    assert pool.counts[:, [0, 2]].sum() == 0


def test_pool_grows_classes():
    pool = LearnerPool(2, 2, 1, seed=0)
    pool.train(np.zeros(1), 0, multiplicity=1)
    pool.train(np.ones(1), 3, multiplicity=1)
    assert pool.m == 4
    votes = pool.predict(np.ones(1))
    assert votes.shape == (2, 4) and np.argmax(votes[0]) == 3


def test_fit_weights_canonical():
    window = [(VoteMatrix(np.eye(3)), IdealVector(0, 3))]
    np.testing.assert_allclose(fit_weights(window).weights, [1, 0, 0], atol=1e-12)


def test_fit_weights_identical_classifiers_equal(rng):
    window, vs, ys = [], [], []
    for _ in range(40):
        vote = rng.dirichlet(np.ones(3))
        y = int(rng.integers(3))
        window.append((VoteMatrix(np.tile(vote, (4, 1))), IdealVector(y, 3)))
        vs.append(vote)
        ys.append(y)
    # every minimizer has the same total s*, the 1-d least-squares scale
    vs = np.array(vs)
    scale = vs[np.arange(40), ys].sum() / (vs * vs).sum()
    np.testing.assert_allclose(fit_weights(window).weights, np.full(4, scale / 4), atol=1e-9)


def test_fit_weights_identical_truthful_classifiers_uniform():
    window = [(VoteMatrix(np.tile(np.eye(3)[y], (4, 1))), IdealVector(y, 3)) for y in (0, 2, 1, 1)]
    np.testing.assert_allclose(fit_weights(window).weights, np.full(4, 0.25), atol=1e-12)


def test_fit_weights_truthful_classifier(rng):
    window = []
    for _ in range(50):
        y = int(rng.integers(3))
        window.append((VoteMatrix(np.vstack([np.eye(3)[y], np.full(3, 1 / 3)])), IdealVector(y, 3)))
    w = fit_weights(window, ridge=0.0)
    assert window_loss(w, window) <= 1e-9
    np.testing.assert_allclose(w.weights, [1, 0], atol=1e-9)


def test_fit_weights_never_worse_than_uniform(rng):
    for _ in range(100):
        n, m, t = int(rng.integers(1, 10)), int(rng.integers(2, 6)), int(rng.integers(1, 30))
        votes = rng.dirichlet(np.ones(m), size=(t, n))
        labels = rng.integers(0, m, size=t)
        w = fit_weights((votes, labels), ridge=0.0)
        assert window_loss(w, (votes, labels)) <= window_loss(np.full(n, 1 / n), (votes, labels)) + 1e-9


def test_fit_weights_zero_loss_window(rng):
    # rows of each instance are m independent simplex points plus extra rows;
    # one shared weight vector reproduces every target exactly
    m, n = 3, 5
    w_true = rng.normal(size=n)
    window = []
    for _ in range(20):
        y = int(rng.integers(m))
        head = random_simplex_rows(rng, n - 1, m)
        partial = w_true[:-1] @ head
        last = (np.eye(m)[y] - partial) / w_true[-1]
        window.append((VoteMatrix(np.vstack([head, last])), IdealVector(y, m)))
    w = fit_weights(window, ridge=0.0)
    assert window_loss(w, window) <= 1e-6


def test_ensemble_predict_examples():
    pred, v = ensemble_predict(WeightVector([0.5, 0.5]), VoteMatrix([[1, 0], [0, 1]]))
    assert pred == 0 and np.allclose(v, [0.5, 0.5])
    pred, v = ensemble_predict(WeightVector([2, -1]), VoteMatrix([[0.5, 0.5], [1, 0]]))
    assert pred == 1 and np.allclose(v, [0, 1])
    rows = np.array([[0.2, 0.5, 0.3], [0.6, 0.1, 0.3]])
    pred, v = ensemble_predict([1.0, 0.0], rows)
    np.testing.assert_array_equal(v, rows[0])
    with pytest.raises(ShapeError):
        ensemble_predict([1.0, 0.0, 0.0], rows)


def test_positive_rescaling_keeps_prediction(rng):
    for _ in range(200):
        rows = rng.dirichlet(np.ones(4), size=5)
        w = rng.normal(size=5)
        c = rng.uniform(0.01, 100)
        assert ensemble_predict(w, rows)[0] == ensemble_predict(c * w, rows)[0]


def test_prequential_separable_stream():
    s = rbf_stream(RbfConfig(m=2, n_features=5, centroids_per_class=1, noise_std=0.0, instances=5000, seed=4))
    assert run_prequential(s, EnsembleConfig(n=4, seed=1)).accuracy >= 0.95


def test_prequential_no_signal():
    rng = np.random.default_rng(6)
    s = Stream(rng.random((20_000, 5)), rng.integers(0, 2, 20_000), 2)
    acc = run_prequential(s, EnsembleConfig(n=4, seed=2), record_votes=False).accuracy
    assert abs(acc - 0.5) <= 0.02


def test_prequential_deterministic_and_test_then_train():
    s = rbf_stream(RbfConfig(m=3, instances=1500, seed=2))
    a = run_prequential(s, EnsembleConfig(n=5, window=200, seed=9))
    b = run_prequential(s, EnsembleConfig(n=5, window=200, seed=9))
    assert a.accuracy == b.accuracy
    np.testing.assert_array_equal(a.predicted, b.predicted)
    np.testing.assert_array_equal(a.votes, b.votes)
    # the very first instance is scored by untrained learners
    np.testing.assert_array_equal(a.votes[0], np.full((5, 3), 1 / 3))
    rec = next(iter(a.records))
    assert rec.predicted == int(np.argmax(rec.ensemble_vote))
    assert a.correct == sum(r.predicted == r.actual for r in a.records)


def test_learners_are_diverse():
    s = rbf_stream(RbfConfig(m=3, instances=1000, noise_std=0.2, seed=3))
    run = run_prequential(s, EnsembleConfig(n=4, feature_fraction=1.0, seed=1))
    spread = np.abs(run.votes - run.votes[:, :1]).max(axis=(1, 2))
    assert np.any(spread > 1e-9)


def test_records_csv(tmp_path):
    s = rbf_stream(RbfConfig(m=2, instances=30, seed=0))
    run = run_prequential(s, EnsembleConfig(n=2, window=10))
    path = tmp_path / "records.csv"
    run.write_records_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "instance_index,predicted,actual" and len(lines) == 31
