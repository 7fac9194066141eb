from hpc_job_prediction.errors import ConstantTarget, JobDataError, RankDeficient, SchemaMismatch
from hpc_job_prediction.registrations import create_model_from_dict
from hpc_job_prediction.regress import AIC, BIC, alpha_grid, elastic_net_path, fit_cart_regression, \
    fit_elastic_net_cv, fit_lasso_lars_ic, fit_ols, fit_ridge, information_criterion, lars_lasso_path, predict, \
    r_squared

import numpy as np
import pytest


__author__ = 'HPC Job Prediction Team'


def _linear_data(n=200, seed=1, noise=1.0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 6))
    y = 2.0 + X @ np.array([5.0, 0.0, 0.0, -4.0, 0.0, 0.0]) + noise * rng.normal(size=n)
    return X, y


def _orthogonal_data(n=100, seed=4):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, 7))
    A -= A.mean(axis=0)
    Q = np.linalg.qr(A)[0] * np.sqrt(n)
    X = Q[:, :6]
    y = 10.0 + X @ np.array([3.0, 0.0, 0.0, -2.0, 0.0, 0.0]) + 0.3 * Q[:, 6]
    return X, y


def _standardized(X):
    return (X - X.mean(axis=0)) / X.std(axis=0)


def test_r_squared():
    assert 1.0 == r_squared([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert 0.0 == r_squared([1.0, 2.0, 3.0], [2.0, 2.0, 2.0])
    assert 0.5 == r_squared([1.0, 2.0, 3.0], [1.0, 2.0, 2.0])
    assert pytest.approx(1.0 - 3.0 / 2.0) == r_squared([1.0, 2.0, 3.0], [2.0, 1.0, 4.0])
    assert 0.0 > r_squared([1.0, 2.0, 3.0], [3.0, 2.0, 1.0])


def test_r_squared_matches_direct_formula_on_random_vectors():
    rng = np.random.default_rng(21)
    for _ in range(1000):
        n = int(rng.integers(2, 50))
        y_true = rng.normal(size=n).tolist()
        y_pred = rng.normal(size=n).tolist()
        mean = sum(y_true) / n
        residual_sum = sum((t - p) ** 2 for t, p in zip(y_true, y_pred))
        total_sum = sum((t - mean) ** 2 for t in y_true)
        assert pytest.approx(1.0 - residual_sum / total_sum, rel=1e-12, abs=1e-12) == r_squared(y_true, y_pred)


def test_r_squared_undefined():
    with pytest.raises(ConstantTarget):
        r_squared([2.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        r_squared([2.0], [2.0])


def test_fit_ols_matches_normal_equations():
    X, y = _linear_data()
    model = fit_ols(X, y)
    design = np.hstack([np.ones((len(y), 1)), X])
    expected = np.linalg.solve(design.T @ design, design.T @ y)
    assert pytest.approx(expected[0], rel=1e-9) == model.intercept
    np.testing.assert_allclose(expected[1:], model.coefficients, rtol=1e-9, atol=1e-12)


def test_fit_ols_matches_normal_equations_on_seeded_problems():
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(50, 201))
        p = int(rng.integers(2, 9))
        X = rng.normal(size=(n, p))
        y = rng.normal() + X @ rng.normal(size=p) + rng.normal(size=n)
        model = fit_ols(X, y)
        design = np.hstack([np.ones((n, 1)), X])
        expected = np.linalg.solve(design.T @ design, design.T @ y)
        assert np.max(np.abs(expected[1:] - model.coefficients)) <= 1e-8
        assert pytest.approx(expected[0], abs=1e-8) == model.intercept


def test_fit_ols_exact_fit():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    model = fit_ols(X, 1.0 + 2.0 * X[:, 0], columns=['reqTime'])
    assert pytest.approx(1.0) == model.intercept
    assert pytest.approx(2.0) == model.coefficients[0]
    assert ['reqTime'] == model.columns


def test_fit_ols_rank_deficient():
    X, y = _linear_data()
    X = np.hstack([X, X[:, [1]] * 2.0])
    with pytest.raises(RankDeficient) as e:
        fit_ols(X, y, columns=['a', 'b', 'c', 'd', 'e', 'f', 'g'])
    assert 1 == len(e.value.columns)
    assert e.value.columns[0] in ('b', 'g')


def test_fit_ols_rejects_non_finite_values():
    X, y = _linear_data()
    X[3, 2] = np.nan
    with pytest.raises(JobDataError):
        fit_ols(X, y)


def test_fit_ridge_matches_closed_form():
    X, y = _linear_data()
    model = fit_ridge(X, y, alpha=3.0)
    Xc = X - X.mean(axis=0)
    expected = np.linalg.solve(Xc.T @ Xc + 3.0 * np.eye(6), Xc.T @ (y - y.mean()))
    np.testing.assert_allclose(expected, model.coefficients, rtol=1e-9)
    assert pytest.approx(y.mean() - X.mean(axis=0) @ expected) == model.intercept


def test_fit_ridge_without_penalty_is_ols():
    X, y = _linear_data()
    np.testing.assert_allclose(fit_ols(X, y).coefficients, fit_ridge(X, y, alpha=0.0).coefficients, rtol=1e-9)


def test_fit_ridge_shrinks():
    X, y = _linear_data()
    norms = [np.linalg.norm(fit_ridge(X, y, alpha=alpha).coefficients) for alpha in (0.0, 10.0, 1000.0, 1.0e8)]
    assert norms[0] > norms[1] > norms[2] > norms[3]
    assert 1e-3 > norms[3]


def test_fit_ridge_negative_penalty():
    X, y = _linear_data()
    with pytest.raises(ValueError):
        fit_ridge(X, y, alpha=-1.0)


def test_lars_lasso_path_ends_at_ols():
    X, y = _linear_data(noise=2.0)
    alphas, path, entered = lars_lasso_path(X, y)
    np.testing.assert_array_equal(np.zeros(6), path[0])
    np.testing.assert_allclose(fit_ols(X, y).coefficients, path[-1], rtol=1e-6, atol=1e-8)
    assert np.all(np.diff(alphas) <= 1e-12)
    assert set(range(6)) == set(entered)
    assert len(alphas) == len(path)


def test_lars_lasso_path_first_alpha_is_largest_correlation():
    X, y = _linear_data()
    alphas, _, entered = lars_lasso_path(X, y)
    correlations = (X - X.mean(axis=0)).T @ (y - y.mean())
    assert pytest.approx(np.max(np.abs(correlations)) / len(y)) == alphas[0]
    assert int(np.argmax(np.abs(correlations))) == entered[0]


def test_lars_lasso_path_strong_variables_enter_first():
    X, y = _linear_data()
    _, _, entered = lars_lasso_path(X, y)
    assert [0, 3] == entered[:2]


def test_lars_lasso_path_soft_thresholds_orthogonal_design():
    X, y = _orthogonal_data()
    alphas, path, _ = lars_lasso_path(X, y)
    # for orthogonal columns of norm sqrt(n), the lasso solution soft-thresholds the least squares coefficients
    ols = fit_ols(X, y).coefficients
    for alpha, coefficients in zip(alphas, path):
        expected = np.sign(ols) * np.maximum(np.abs(ols) - alpha, 0.0)
        np.testing.assert_allclose(expected, coefficients, atol=1e-8)


def test_fit_lasso_lars_ic_recovers_support_without_noise_in_design():
    X, y = _orthogonal_data()
    model = fit_lasso_lars_ic(X, y, criterion=AIC)
    assert [0, 3] == list(np.flatnonzero(model.coefficients))
    np.testing.assert_allclose(np.array([3.0, 0.0, 0.0, -2.0, 0.0, 0.0]), model.coefficients, atol=1e-8)
    assert pytest.approx(10.0) == model.intercept
    assert not model.metadata['path_degenerate']


def test_fit_lasso_lars_ic_keeps_strong_variables():
    for seed in range(5):
        X, y = _linear_data(seed=seed)
        support = set(np.flatnonzero(fit_lasso_lars_ic(X, y).coefficients))
        assert {0, 3} <= support


def test_fit_lasso_lars_ic_bic_is_no_denser_than_aic():
    for seed in range(5):
        X, y = _linear_data(seed=seed, noise=3.0)
        aic = fit_lasso_lars_ic(X, y, criterion=AIC)
        bic = fit_lasso_lars_ic(X, y, criterion=BIC)
        assert np.count_nonzero(bic.coefficients) <= np.count_nonzero(aic.coefficients)


def test_fit_lasso_lars_ic_constant_target():
    X, _ = _linear_data()
    model = fit_lasso_lars_ic(X, np.full(len(X), 3.0))
    assert model.metadata['path_degenerate']
    np.testing.assert_allclose(np.full(len(X), 3.0), model.predict(X))


def test_information_criterion():
    assert pytest.approx(10 * np.log(2.0) + 6.0) == information_criterion(20.0, 10, 3, AIC)
    assert pytest.approx(10 * np.log(2.0) + 3 * np.log(10)) == information_criterion(20.0, 10, 3, BIC)
    with pytest.raises(ValueError):
        information_criterion(20.0, 10, 3, 'hqc')


def test_elastic_net_path_satisfies_optimality_conditions():
    X, y = _linear_data(noise=3.0)
    X = _standardized(X)
    alphas = [2.0, 0.5, 0.1]
    intercepts, path = elastic_net_path(X, y, alphas, l1_ratio=0.5, tol=1e-12)
    n = len(y)
    for alpha, intercept, coefficients in zip(alphas, intercepts, path):
        residuals = y - intercept - X @ coefficients
        gradient = X.T @ residuals / n - alpha * 0.5 * coefficients
        active = coefficients != 0.0
        np.testing.assert_allclose(alpha * 0.5 * np.sign(coefficients[active]), gradient[active], atol=1e-6)
        assert np.all(np.abs(gradient[~active]) <= alpha * 0.5 + 1e-6)
        assert pytest.approx(0.0, abs=1e-9) == float(np.mean(residuals))


def _assert_elastic_net_optimal(X, y, intercept, coefficients, alpha, l1_ratio, atol=1e-4):
    residuals = y - intercept - X @ coefficients
    gradient = X.T @ residuals / len(y) - alpha * (1.0 - l1_ratio) * coefficients
    active = coefficients != 0.0
    np.testing.assert_allclose(alpha * l1_ratio * np.sign(coefficients[active]), gradient[active], atol=atol)
    assert np.all(np.abs(gradient[~active]) <= alpha * l1_ratio + atol)
    assert pytest.approx(0.0, abs=atol) == float(np.mean(residuals))


def _seeded_problem(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(50, 201))
    p = int(rng.integers(2, 9))
    X = _standardized(rng.normal(size=(n, p)))
    coefficients = rng.normal(size=p) * (rng.random(p) < 0.6)
    y = rng.normal() + X @ coefficients + rng.normal(scale=rng.uniform(0.1, 3.0), size=n)
    return X, y


def test_elastic_net_path_is_optimal_on_seeded_problems():
    for seed in range(50):
        X, y = _seeded_problem(seed)
        l1_ratio = [0.1, 0.5, 0.9, 1.0][seed % 4]
        alphas = alpha_grid(X, y, l1_ratio=l1_ratio)[::9]
        intercepts, path = elastic_net_path(X, y, alphas, l1_ratio=l1_ratio)
        for alpha, intercept, coefficients in zip(alphas, intercepts, path):
            _assert_elastic_net_optimal(X, y, intercept, coefficients, alpha, l1_ratio)


def test_fit_elastic_net_cv_is_optimal_on_seeded_problems():
    for seed in range(50):
        X, y = _seeded_problem(seed)
        model = fit_elastic_net_cv(X, y)
        scale = model.metadata['target_scale']
        target = (y - model.metadata['target_mean']) / scale
        _assert_elastic_net_optimal(X, target, (model.intercept - model.metadata['target_mean']) / scale,
                                    model.coefficients / scale, model.metadata['alpha'], 0.5)


def test_fit_elastic_net_cv_does_not_depend_on_target_units():
    X, y = _linear_data()
    X = _standardized(X)
    model = fit_elastic_net_cv(X, y)
    in_bytes = fit_elastic_net_cv(X, y * 2.0 ** 30)
    assert pytest.approx(model.metadata['alpha'], rel=1e-9) == in_bytes.metadata['alpha']
    np.testing.assert_allclose(model.coefficients * 2.0 ** 30, in_bytes.coefficients, rtol=1e-6)
    assert pytest.approx(model.intercept * 2.0 ** 30, rel=1e-6) == in_bytes.intercept
    assert r_squared(y * 2.0 ** 30, in_bytes.predict(X)) > 0.9


def test_elastic_net_path_largest_penalty_zeroes_coefficients():
    X, y = _linear_data()
    grid = alpha_grid(X, y, l1_ratio=0.5)
    assert 100 == len(grid)
    assert pytest.approx(grid[0] * 1e-3) == grid[-1]
    _, path = elastic_net_path(X, y, grid[:1], l1_ratio=0.5)
    np.testing.assert_allclose(np.zeros(6), path[0], atol=1e-12)


def test_elastic_net_path_invalid_parameters():
    X, y = _linear_data()
    with pytest.raises(ValueError):
        elastic_net_path(X, y, [0.1], l1_ratio=1.5)
    with pytest.raises(ValueError):
        elastic_net_path(X, y, [-0.1])


def test_fit_elastic_net_cv_without_penalty_is_ols():
    X, y = _linear_data()
    X = _standardized(X)
    model = fit_elastic_net_cv(X, y, alphas=[0.0], tol=1e-10)
    ols = fit_ols(X, y)
    np.testing.assert_allclose(ols.coefficients, model.coefficients, atol=1e-6)
    assert pytest.approx(ols.intercept, abs=1e-6) == model.intercept


def test_fit_elastic_net_cv_selects_a_grid_penalty():
    X, y = _linear_data()
    X = _standardized(X)
    model = fit_elastic_net_cv(X, y, folds=5)
    assert model.metadata['alpha'] in model.metadata['alphas']
    assert 100 == len(model.metadata['mean_squared_errors'])
    assert r_squared(y, model.predict(X)) > 0.9


def test_fit_elastic_net_cv_parallel_folds_give_same_model():
    X, y = _linear_data(n=80)
    X = _standardized(X)
    sequential = fit_elastic_net_cv(X, y, folds=4)
    parallel = fit_elastic_net_cv(X, y, folds=4, n_jobs=2)
    np.testing.assert_array_equal(sequential.coefficients, parallel.coefficients)


def test_fit_elastic_net_cv_invalid_folds():
    X, y = _linear_data(n=10)
    with pytest.raises(ValueError):
        fit_elastic_net_cv(X, y, folds=1)
    with pytest.raises(ValueError):
        fit_elastic_net_cv(X, y, folds=11)


def test_fit_cart_regression_memorizes():
    rng = np.random.default_rng(9)
    X = rng.normal(size=(50, 3))
    y = rng.normal(size=50)
    model = fit_cart_regression(X, y)
    np.testing.assert_allclose(y, model.predict(X), atol=1e-12)
    assert 50 == model.leaf_count


def test_fit_cart_regression_constant_target():
    X, _ = _linear_data(n=20)
    model = fit_cart_regression(X, np.full(20, 5.0))
    assert 1 == model.leaf_count
    np.testing.assert_array_equal(np.full(3, 5.0), model.predict(X[:3]))


def test_fit_cart_regression_max_depth():
    X, y = _linear_data()
    model = fit_cart_regression(X, y, max_depth=3)
    assert 3 >= model.depth
    assert 8 >= model.leaf_count


def test_fit_cart_regression_invalid_parameters():
    X, y = _linear_data(n=20)
    with pytest.raises(ValueError):
        fit_cart_regression(X, y, criterion='gini')
    with pytest.raises(ValueError):
        fit_cart_regression(X, y, splitter='random')


def test_predict_checks_columns():
    X, y = _linear_data()
    model = fit_ridge(X, y, columns=['a', 'b', 'c', 'd', 'e', 'f'])
    np.testing.assert_array_equal(model.predict(X), predict(model, X, ['a', 'b', 'c', 'd', 'e', 'f']))
    with pytest.raises(SchemaMismatch):
        predict(model, X, ['a', 'b', 'c', 'd', 'f', 'e'])
    with pytest.raises(SchemaMismatch):
        predict(model, X[:, :5])


def test_persisted_models_predict_identically():
    X, y = _linear_data()
    models = [fit_ols(X, y), fit_ridge(X, y), fit_lasso_lars_ic(X, y), fit_cart_regression(X, y, max_depth=4)]
    for model in models:
        copy = create_model_from_dict(model.get_as_dict())
        assert model.name() == copy.name()
        np.testing.assert_array_equal(model.predict(X), copy.predict(X))
