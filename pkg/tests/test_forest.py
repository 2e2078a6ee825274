import numpy as np
import pytest

from wikiccc.forest import ForestConfig, RandomForest, fit_forest


def two_clusters(n=200, seed=0):
    rng = np.random.default_rng(seed)
    half = n // 2
    X = np.vstack([rng.normal(-2.0, 0.5, size=(half, 14)), rng.normal(2.0, 0.5, size=(n - half, 14))])
    y = np.array([0] * half + [1] * (n - half))
    return X, y


def test_separable_clusters_reach_high_oob_accuracy():
    X, y = two_clusters()
    model = fit_forest(X, y, seed=3)
    assert len(model.trees) == 100
    assert model.oob_accuracy >= 0.99
    assert model.train_accuracy == 1.0


def test_same_seed_gives_identical_model():
    X, y = two_clusters(seed=1)
    a = fit_forest(X, y, seed=11, config=ForestConfig(n_estimators=20))
    b = fit_forest(X, y, seed=11, config=ForestConfig(n_estimators=20))
    assert a.to_json() == b.to_json()


def test_row_order_does_not_change_model():
    X, y = two_clusters(seed=2)
    perm = np.random.default_rng(5).permutation(len(y))
    a = fit_forest(X, y, seed=4, config=ForestConfig(n_estimators=15))
    b = fit_forest(X[perm], y[perm], seed=4, config=ForestConfig(n_estimators=15))
    assert a.to_json() == b.to_json()


def test_worker_count_does_not_change_model():
    X, y = two_clusters(seed=3)
    a = fit_forest(X, y, seed=4, config=ForestConfig(n_estimators=16, workers=1))
    b = fit_forest(X, y, seed=4, config=ForestConfig(n_estimators=16, workers=4))
    assert a.to_json() == b.to_json()


def test_planted_separator_has_maximal_importance():
    rng = np.random.default_rng(8)
    X = rng.uniform(size=(300, 14))
    y = (X[:, 10] > 0.5).astype(int)
    model = fit_forest(X, y, seed=1)
    assert int(np.argmax(model.importances)) == 10
    assert model.importances.sum() == pytest.approx(1.0, abs=1e-9)
    assert (model.importances >= 0).all()


def test_json_round_trip_predicts_the_same():
    X, y = two_clusters(seed=4)
    model = fit_forest(X, y, seed=2, config=ForestConfig(n_estimators=10))
    again = RandomForest.from_dict(__import__("json").loads(model.to_json()))
    probe = np.random.default_rng(0).normal(size=(50, 14))
    assert np.array_equal(model.predict_proba(probe), again.predict_proba(probe))


def test_unknown_model_version_rejected():
    X, y = two_clusters(seed=4)
    d = fit_forest(X, y, seed=2, config=ForestConfig(n_estimators=2)).to_dict()
    d["model_version"] = 99
    with pytest.raises(ValueError, match="model_version"):
        RandomForest.from_dict(d)


def test_single_class_rejected():
    with pytest.raises(ValueError, match="single class"):
        fit_forest(np.zeros((4, 2)), np.zeros(4, dtype=int), seed=0)


def test_training_positive_in_pure_leaves_scores_one():
    X, y = two_clusters(seed=6)
    model = fit_forest(X, y, seed=6, config=ForestConfig(n_estimators=25))
    assert model.predict_proba(X[-1:])[0] == 1.0


def test_half_vote_classifies_positive():
    X, y = two_clusters(seed=7)
    model = fit_forest(X, y, seed=1, config=ForestConfig(n_estimators=2))
    # force one tree to always vote 1 and one to always vote 0
    t0, t1 = model.trees
    t0.feature[:] = -1
    t0.counts[0] = [0, 5]
    t1.feature[:] = -1
    t1.counts[0] = [5, 0]
    assert model.predict_proba(X[:1])[0] == 0.5
    assert model.predict(X[:1])[0] == 1
