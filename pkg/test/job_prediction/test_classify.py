from hpc_job_prediction.classify import accuracy, f1, features_per_split, fit_cart_classifier, fit_gnb, \
    fit_logistic, fit_random_forest, logistic_objective
from hpc_job_prediction.errors import JobDataError, NonConvergence, SingleClass
from hpc_job_prediction.registrations import create_model_from_dict

import json

import numpy as np
import pytest


__author__ = 'HPC Job Prediction Team'


def _labeled_data(n=300, seed=6):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 3))
    probabilities = 1.0 / (1.0 + np.exp(-(0.5 + 2.0 * X[:, 0] - 1.0 * X[:, 1])))
    y = (rng.random(n) < probabilities).astype(np.float64)
    return X, y


def _newton_logistic(X, y, l2_strength, iterations=50):
    design = np.hstack([np.ones((len(y), 1)), X])
    penalty = l2_strength * np.eye(design.shape[1])
    penalty[0, 0] = 0.0
    parameters = np.zeros(design.shape[1])
    for _ in range(iterations):
        p = 1.0 / (1.0 + np.exp(-design @ parameters))
        gradient = design.T @ (p - y) + penalty @ parameters
        hessian = design.T @ (design * (p * (1 - p))[:, None]) + penalty
        parameters = parameters - np.linalg.solve(hessian, gradient)
    return parameters


def test_accuracy():
    assert 1.0 == accuracy([0, 1, 1], [0, 1, 1])
    assert pytest.approx(2.0 / 3.0) == accuracy([0, 1, 1], [0, 0, 1])
    with pytest.raises(ValueError):
        accuracy([], [])


def test_f1():
    assert 1.0 == f1([0, 1, 1], [0, 1, 1])
    assert 0.0 == f1([0, 1, 1], [0, 0, 0])
    assert 0.0 == f1([0, 0, 0], [0, 0, 0])
    # precision 1/2, recall 1/2
    assert pytest.approx(0.5) == f1([1, 1, 0, 0], [1, 0, 1, 0])
    # precision 1, recall 1/3
    assert pytest.approx(0.5) == f1([1, 1, 1, 0], [1, 0, 0, 0])


def test_metrics_match_direct_counts_on_random_vectors():
    rng = np.random.default_rng(17)
    for _ in range(1000):
        n = int(rng.integers(1, 60))
        y_true = rng.integers(0, 2, size=n).tolist()
        y_pred = rng.integers(0, 2, size=n).tolist()
        correct = sum(1 for t, p in zip(y_true, y_pred) if t == p)
        true_positives = sum(1 for t, p in zip(y_true, y_pred) if t == 1 and p == 1)
        false_positives = sum(1 for t, p in zip(y_true, y_pred) if t == 0 and p == 1)
        false_negatives = sum(1 for t, p in zip(y_true, y_pred) if t == 1 and p == 0)
        expected_f1 = 2.0 * true_positives / (2.0 * true_positives + false_positives + false_negatives) \
            if true_positives > 0 else 0.0
        assert pytest.approx(correct / n, abs=1e-12) == accuracy(y_true, y_pred)
        assert pytest.approx(expected_f1, abs=1e-12) == f1(y_true, y_pred)


def test_fit_logistic_matches_newton_oracle():
    X, y = _labeled_data()
    model = fit_logistic(X, y, l2_strength=1.0)
    expected = _newton_logistic(X, y, 1.0)
    assert pytest.approx(expected[0], abs=1e-6) == model.intercept
    np.testing.assert_allclose(expected[1:], model.weights, atol=1e-6)
    assert model.metadata['gradient_norm'] <= 1e-6
    assert pytest.approx(logistic_objective(expected, X, y, 1.0), rel=1e-9) == model.metadata['objective']


def test_fit_logistic_probabilities():
    X, y = _labeled_data()
    model = fit_logistic(X, y)
    probabilities = model.predict_proba(X)
    assert np.all((probabilities > 0.0) & (probabilities < 1.0))
    np.testing.assert_array_equal((probabilities > 0.5).astype(np.int64), model.predict(X))
    assert accuracy(y, model.predict(X)) > 0.7


def test_fit_logistic_strong_penalty_predicts_prevalence():
    X, y = _labeled_data()
    model = fit_logistic(X, y, l2_strength=1.0e9)
    np.testing.assert_allclose(np.zeros(3), model.weights, atol=1e-5)
    np.testing.assert_allclose(np.full(len(y), y.mean()), model.predict_proba(X), atol=1e-4)


def test_fit_logistic_symmetric_data_has_zero_intercept():
    X = np.tile(np.array([[-1.0], [1.0]]), (50, 1))
    y = np.tile(np.array([0.0, 1.0]), 50)
    model = fit_logistic(X, y)
    assert pytest.approx(0.0, abs=1e-6) == model.intercept
    assert model.weights[0] > 0.0
    np.testing.assert_allclose(1.0 - model.predict_proba(np.array([[1.0]])), model.predict_proba(np.array([[-1.0]])))


def test_fit_logistic_too_few_iterations():
    X, y = _labeled_data()
    with pytest.raises(NonConvergence):
        fit_logistic(X, y, max_iterations=1)


def test_fit_logistic_rejects_bad_labels():
    X, _ = _labeled_data(n=10)
    with pytest.raises(JobDataError):
        fit_logistic(X, np.arange(10.0))
    with pytest.raises(ValueError):
        fit_logistic(X, np.zeros(10), l2_strength=-1.0)


def test_fit_cart_classifier_fits_training_data():
    X, y = _labeled_data()
    model = fit_cart_classifier(X, y)
    assert 1.0 == accuracy(y, model.predict(X))


def test_fit_cart_classifier_leaf_majority_ties_to_zero():
    X = np.array([[0.0], [0.0], [1.0], [1.0], [1.0]])
    y = np.array([0.0, 1.0, 1.0, 1.0, 0.0])
    model = fit_cart_classifier(X, y, max_depth=1)
    np.testing.assert_array_equal(np.array([0, 1]), model.predict(np.array([[0.0], [1.0]])))
    np.testing.assert_allclose(np.array([0.5, 2.0 / 3.0]), model.predict_proba(np.array([[0.0], [1.0]])))


def test_fit_cart_classifier_pure_labels():
    X, _ = _labeled_data(n=20)
    model = fit_cart_classifier(X, np.ones(20))
    np.testing.assert_array_equal(np.ones(20), model.predict(X))


def test_fit_gnb_symmetric_posterior():
    X = np.array([[-1.0], [1.0], [3.0], [5.0]])
    y = np.array([0.0, 0.0, 1.0, 1.0])
    model = fit_gnb(X, y)
    np.testing.assert_allclose(np.array([[0.0], [4.0]]), model.means)
    np.testing.assert_allclose(np.array([[1.0], [1.0]]), model.variances)
    assert pytest.approx(0.5) == model.predict_proba(np.array([[2.0]]))[0]
    assert 0 == model.predict(np.array([[2.0]]))[0]
    np.testing.assert_array_equal(np.array([0, 1]), model.predict(np.array([[0.0], [4.0]])))


def test_fit_gnb_priors_and_variance_floor():
    X = np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 2.0], [1.0, 3.0]])
    y = np.array([0.0, 1.0, 1.0, 1.0])
    model = fit_gnb(X, y, var_smoothing=1e-9)
    np.testing.assert_allclose(np.array([0.25, 0.75]), model.priors)
    floor = 1e-9 * np.var(X[:, 1])
    assert pytest.approx(floor) == model.variances[0, 0]
    assert pytest.approx(floor) == model.variances[0, 1]
    assert np.all(np.isfinite(model.predict_proba(X)))


def test_fit_gnb_prior_ratio_shifts_boundary_toward_rarer_class():
    class_zero = np.array([-1.0, 1.0])
    class_one = np.array([3.0, 5.0])
    for ratio in (1, 2, 4):
        X = np.concatenate([np.tile(class_zero, ratio), class_one]).reshape(-1, 1)
        y = np.concatenate([np.zeros(2 * ratio), np.ones(2)])
        model = fit_gnb(X, y)
        # means 0 and 4, unit variances
        boundary = 2.0 + np.log(ratio) / 4.0
        assert pytest.approx(0.5, abs=1e-9) == model.predict_proba(np.array([[boundary]]))[0]
        np.testing.assert_array_equal(np.array([0, 1]), model.predict(np.array([[boundary - 0.01],
                                                                                [boundary + 0.01]])))


def test_fit_gnb_single_sample_class_takes_variance_floor():
    X = np.array([[0.0], [1.0], [2.0], [7.0]])
    y = np.array([0.0, 0.0, 0.0, 1.0])
    model = fit_gnb(X, y)
    assert pytest.approx(1e-9 * np.var(X[:, 0])) == model.variances[1, 0]
    assert 1 == model.predict(np.array([[7.0]]))[0]


def test_fit_gnb_single_class():
    X, _ = _labeled_data(n=10)
    with pytest.raises(SingleClass):
        fit_gnb(X, np.zeros(10))


def test_fit_random_forest_is_deterministic():
    X, y = _labeled_data(n=120)
    first = fit_random_forest(X, y, n_trees=7, rng_seed=3)
    second = fit_random_forest(X, y, n_trees=7, rng_seed=3)
    assert first.seeds == second.seeds
    np.testing.assert_array_equal(first.predict_proba(X), second.predict_proba(X))
    third = fit_random_forest(X, y, n_trees=7, rng_seed=4)
    assert first.seeds != third.seeds


def test_fit_random_forest_parallel_trees_are_identical():
    X, y = _labeled_data(n=120)
    sequential = fit_random_forest(X, y, n_trees=5, rng_seed=1)
    parallel = fit_random_forest(X, y, n_trees=5, rng_seed=1, n_jobs=2)
    np.testing.assert_array_equal(sequential.predict_proba(X), parallel.predict_proba(X))


def test_fit_random_forest_majority_vote():
    X, y = _labeled_data(n=150)
    model = fit_random_forest(X, y, n_trees=9)
    assert 9 == len(model.trees)
    votes = model.votes(X)
    np.testing.assert_array_equal((2 * votes > 9).astype(np.int64), model.predict(X))
    assert np.all((votes >= 0) & (votes <= 9))


def test_fit_random_forest_fits_training_data():
    rng = np.random.default_rng(12)
    X = rng.normal(size=(200, 2))
    y = (X[:, 0] + X[:, 1] > 0).astype(np.float64)
    model = fit_random_forest(X, y, n_trees=25)
    assert accuracy(y, model.predict(X)) >= 0.95


def test_single_tree_forest_without_bootstrap_is_a_classification_tree():
    for seed in range(5):
        X, y = _labeled_data(n=120, seed=seed)
        forest = fit_random_forest(X, y, n_trees=1, bootstrap=False, max_features='all', rng_seed=seed)
        tree = fit_cart_classifier(X, y).tree
        assert tree.get_as_dict() == forest.trees[0].get_as_dict()
        queries = np.random.default_rng(seed).normal(size=(50, 3))
        np.testing.assert_array_equal(fit_cart_classifier(X, y).predict(queries), forest.predict(queries))


def test_fit_random_forest_draws_split_features_from_all_features():
    rng = np.random.default_rng(4)
    X = np.hstack([np.zeros((80, 3)), rng.normal(size=(80, 1))])
    y = (X[:, 3] > 0).astype(np.float64)
    forest = fit_random_forest(X, y, n_trees=60, max_features=1, bootstrap=False)
    # only a draw of the last feature can split the root
    roots = [tree.node_count > 1 for tree in forest.trees]
    assert any(roots)
    assert not all(roots)


def test_fit_random_forest_invalid_parameters():
    X, y = _labeled_data(n=20)
    with pytest.raises(ValueError):
        fit_random_forest(X, y, n_trees=0)
    with pytest.raises(ValueError):
        fit_random_forest(X, y, criterion='mse')
    with pytest.raises(ValueError):
        fit_random_forest(X, y, max_features='log2')


def test_features_per_split():
    assert 4 == features_per_split('sqrt', 15)
    assert 4 == features_per_split('sqrt', 16)
    assert 1 == features_per_split('sqrt', 1)
    assert 15 == features_per_split(None, 15)
    assert 15 == features_per_split('all', 15)
    assert 3 == features_per_split(3, 15)
    assert 15 == features_per_split(30, 15)


def test_persisted_classifiers_predict_identically():
    X, y = _labeled_data(n=100)
    models = [fit_logistic(X, y), fit_cart_classifier(X, y, max_depth=3), fit_gnb(X, y),
              fit_random_forest(X, y, n_trees=3)]
    for model in models:
        copy = create_model_from_dict(json.loads(json.dumps(model.get_as_dict())))
        assert model.name() == copy.name()
        np.testing.assert_array_equal(model.predict_proba(X), copy.predict_proba(X))
        np.testing.assert_array_equal(model.predict(X), copy.predict(X))
