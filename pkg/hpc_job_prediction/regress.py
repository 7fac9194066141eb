"""
Description
===========

This module contains the learners that predict the resource usage of jobs: ordinary least squares, ridge regression,
the lasso with its penalty chosen by an information criterion on the least angle regression path, the elastic net
with its penalty chosen by cross-validation, and regression trees. It also contains the coefficient of determination
by which they are evaluated.
"""

from typing import List, Optional, Sequence, Tuple
import logging

import numpy as np
import scipy.linalg
from joblib import Parallel, delayed
from sklearn.model_selection import KFold

from .cart import MSE, Tree, grow_tree
from .errors import ConstantTarget, JobDataError, NonConvergence, RankDeficient
from .features import Scaler
from .model import FittedModel, ModelAccessor, resolve_columns

__author__ = 'HPC Job Prediction Team'

AIC = 'aic'
BIC = 'bic'
DEFAULT_RIDGE_ALPHA = 0.5
DEFAULT_L1_RATIO = 0.5
DEFAULT_N_ALPHAS = 100
DEFAULT_ALPHA_RATIO = 1e-3
DEFAULT_FOLDS = 5
DEFAULT_TOLERANCE = 1e-6
DEFAULT_MAX_ITERATIONS = 10000


def check_matrix(X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError('Feature matrix must be two-dimensional')
    if y.ndim != 1 or len(y) != X.shape[0]:
        raise ValueError('Need one target per row, got {0} targets for {1} rows'.format(len(y), X.shape[0]))
    if len(y) == 0:
        raise ValueError('Need at least one row')
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise JobDataError('Feature matrix and targets must be finite')
    return X, y


def r_squared(y_true: Sequence[float], y_pred: Sequence[float]) -> float:
    """The coefficient of determination 1 - SS_res / SS_tot. Negative for predictions worse than the mean."""
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ValueError('True and predicted values must be vectors of equal length')
    if len(y_true) < 2:
        raise ValueError('Need at least two values')
    residuals = y_true - y_pred
    deviations = y_true - np.mean(y_true)
    ss_tot = float(np.dot(deviations, deviations))
    if ss_tot == 0.0:
        raise ConstantTarget('R squared is undefined for a constant target')
    return 1.0 - float(np.dot(residuals, residuals)) / ss_tot


class LinearModel(FittedModel):
    """A model y = a0 + a1 x1 + ... + ap xp."""

    def __init__(self, intercept: float, coefficients: Sequence[float], columns: Sequence[str],
                 hyperparameters: Optional[dict] = None, metadata: Optional[dict] = None,
                 scaler: Optional[Scaler] = None):
        super().__init__(columns, hyperparameters, metadata, scaler)
        self._intercept = float(intercept)
        self._coefficients = np.asarray(coefficients, dtype=np.float64)
        if len(self._coefficients) != len(self.columns):
            raise ValueError('Need one coefficient per column')
        if not (np.isfinite(self._intercept) and np.all(np.isfinite(self._coefficients))):
            raise JobDataError('Linear model parameters must be finite')

    @classmethod
    def name(cls) -> str:
        return 'LinearModel'

    @property
    def intercept(self) -> float:
        return self._intercept

    @property
    def coefficients(self) -> np.ndarray:
        return self._coefficients

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return self._intercept + X @ self._coefficients

    def _get_state_as_dict(self) -> dict:
        return {'intercept': self._intercept, 'coefficients': self._coefficients.tolist()}

    @classmethod
    def create_from_parameters(cls, parameters: dict) -> 'LinearModel':
        scaler = Scaler.create_from_dict(parameters['scaler']) if parameters.get('scaler') is not None else None
        state = parameters['state']
        return cls(state['intercept'], state['coefficients'], parameters['columns'],
                   parameters.get('hyperparameters'), parameters.get('metadata'), scaler)


class OrdinaryLeastSquaresModel(LinearModel):

    @classmethod
    def name(cls) -> str:
        return 'LinearRegression'


class RidgeModel(LinearModel):

    @classmethod
    def name(cls) -> str:
        return 'Ridge'


class LassoLarsICModel(LinearModel):

    @classmethod
    def name(cls) -> str:
        return 'LassoLarsIC'


class ElasticNetCVModel(LinearModel):

    @classmethod
    def name(cls) -> str:
        return 'ElasticNetCV'


class RegressionTree(FittedModel):
    """A CART regression tree. Leaves predict the mean target of the training rows routed to them."""

    def __init__(self, tree: Tree, columns: Sequence[str], hyperparameters: Optional[dict] = None,
                 metadata: Optional[dict] = None, scaler: Optional[Scaler] = None):
        super().__init__(columns, hyperparameters, metadata, scaler)
        self._tree = tree

    @classmethod
    def name(cls) -> str:
        return 'CARTRegression'

    @property
    def tree(self) -> Tree:
        return self._tree

    @property
    def depth(self) -> int:
        return self._tree.depth

    @property
    def leaf_count(self) -> int:
        return self._tree.leaf_count

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return self._tree.predict_value(X)

    def _get_state_as_dict(self) -> dict:
        return {'tree': self._tree.get_as_dict()}

    @classmethod
    def create_from_parameters(cls, parameters: dict) -> 'RegressionTree':
        scaler = Scaler.create_from_dict(parameters['scaler']) if parameters.get('scaler') is not None else None
        return cls(Tree.create_from_dict(parameters['state']['tree']), parameters['columns'],
                   parameters.get('hyperparameters'), parameters.get('metadata'), scaler)


def predict(model: FittedModel, X: np.ndarray, columns: Optional[Sequence[str]] = None) -> np.ndarray:
    """Predicts with any fitted model. Raises SchemaMismatch if the columns differ from the training columns."""
    return model.predict(X, columns)


def _center(X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    x_mean = X.mean(axis=0)
    y_mean = float(np.mean(y))
    return X - x_mean, y - y_mean, x_mean, y_mean


def _dependent_columns(Xc: np.ndarray) -> List[int]:
    if Xc.shape[1] == 0:
        return []
    _, r, pivots = scipy.linalg.qr(Xc, mode='economic', pivoting=True)
    diagonal = np.abs(np.diag(r))
    largest = diagonal[0] if len(diagonal) > 0 else 0.0
    tolerance = largest * max(Xc.shape) * np.finfo(np.float64).eps
    rank = int(np.sum(diagonal > tolerance)) if largest > 0 else 0
    return sorted(int(index) for index in pivots[rank:])


def fit_ols(X: np.ndarray, y: np.ndarray, columns: Optional[Sequence[str]] = None) -> OrdinaryLeastSquaresModel:
    """
    Fits y = a0 + Xw by least squares.
    :raises RankDeficient: If the centered columns are linearly dependent, naming the dependent columns.
    """
    X, y = check_matrix(X, y)
    columns = resolve_columns(columns, X.shape[1])
    Xc, yc, x_mean, y_mean = _center(X, y)
    dependent = _dependent_columns(Xc)
    if len(dependent) > 0:
        raise RankDeficient([columns[index] for index in dependent])
    coefficients = scipy.linalg.lstsq(Xc, yc)[0] if X.shape[1] > 0 else np.zeros(0)
    intercept = y_mean - float(x_mean @ coefficients)
    return OrdinaryLeastSquaresModel(intercept, coefficients, columns)


def fit_ridge(X: np.ndarray, y: np.ndarray, alpha: float = DEFAULT_RIDGE_ALPHA,
              columns: Optional[Sequence[str]] = None) -> RidgeModel:
    """Minimizes ||y - a0 - Xw||^2 + alpha ||w||^2. The intercept is not penalized."""
    if alpha < 0:
        raise ValueError('alpha must not be negative')
    X, y = check_matrix(X, y)
    columns = resolve_columns(columns, X.shape[1])
    Xc, yc, x_mean, y_mean = _center(X, y)
    gram = Xc.T @ Xc + alpha * np.eye(X.shape[1])
    try:
        coefficients = scipy.linalg.solve(gram, Xc.T @ yc, assume_a='sym')
    except scipy.linalg.LinAlgError:
        coefficients = scipy.linalg.lstsq(Xc, yc)[0]
    intercept = y_mean - float(x_mean @ coefficients)
    return RidgeModel(intercept, coefficients, columns, hyperparameters={'alpha': alpha})


def lars_lasso_path(X: np.ndarray, y: np.ndarray,
                    max_steps: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray, List[int]]:
    """
    Computes the lasso regularization path by least angle regression. Between breakpoints, the coefficients change
    linearly. A variable enters at each breakpoint, or leaves when its coefficient crosses zero.
    :param X: The feature matrix. It is centered internally.
    :param y: The targets. They are centered internally.
    :param max_steps: The maximum number of breakpoints. Defaults to eight times the number of columns.
    :return: The penalties at the breakpoints, on the scale of the (1/2n)-weighted lasso objective and in
    decreasing order; the coefficients at the breakpoints, one row per breakpoint; and the order in which
    variables entered.
    """
    X, y = check_matrix(X, y)
    n, p = X.shape
    Xc, yc, _, _ = _center(X, y)
    gram = Xc.T @ Xc
    column_norms = np.sqrt(np.diag(gram))
    tolerance = 1e-12 * max(float(np.linalg.norm(yc)) * float(column_norms.max(initial=0.0)), 1e-300)
    coefficients = np.zeros(p)
    correlations = Xc.T @ yc
    alphas = [float(np.max(np.abs(correlations), initial=0.0)) / n]
    path = [coefficients.copy()]
    entered: List[int] = []
    excluded = set(int(j) for j in np.flatnonzero(column_norms == 0.0))
    candidates = [j for j in range(p) if j not in excluded]
    if len(candidates) == 0 or alphas[0] * n <= tolerance:
        return np.array(alphas), np.array(path), entered
    first = candidates[int(np.argmax(np.abs(correlations[candidates])))]
    active = [first]
    entered.append(first)
    max_steps = max_steps if max_steps is not None else 8 * p
    for _ in range(max_steps):
        correlations = Xc.T @ (yc - Xc @ coefficients)
        c = float(np.max(np.abs(correlations[active])))
        if c <= tolerance:
            break
        signs = np.sign(correlations[active])
        try:
            direction = scipy.linalg.solve(gram[np.ix_(active, active)], signs, assume_a='sym')
        except scipy.linalg.LinAlgError:
            excluded.add(active.pop())
            continue
        normalization = 1.0 / np.sqrt(float(signs @ direction))
        direction = normalization * direction
        angles = gram[:, active] @ direction
        gamma_full = c / normalization
        gamma_enter, entering = np.inf, None
        inactive = [j for j in range(p) if j not in active and j not in excluded]
        with np.errstate(divide='ignore', invalid='ignore'):
            if len(inactive) > 0:
                gammas = np.concatenate([(c - correlations[inactive]) / (normalization - angles[inactive]),
                                         (c + correlations[inactive]) / (normalization + angles[inactive])])
                # steps that would not lower the correlation noticeably do not count
                gammas[~(gammas > tolerance / normalization)] = np.inf
                position = int(np.argmin(gammas))
                if np.isfinite(gammas[position]):
                    gamma_enter, entering = float(gammas[position]), inactive[position % len(inactive)]
            crossings = -coefficients[active] / direction
        crossings[~(crossings > 0)] = np.inf
        gamma_drop = float(np.min(crossings))
        gamma_step = min(gamma_full, gamma_enter, gamma_drop)
        coefficients[active] += gamma_step * direction
        alphas.append(max(c - gamma_step * normalization, 0.0) / n)
        if gamma_step == gamma_drop:
            leaving = [active[i] for i in np.flatnonzero(crossings == gamma_drop)]
            coefficients[leaving] = 0.0
            active = [j for j in active if j not in leaving]
            path.append(coefficients.copy())
            if len(active) == 0:
                break
        elif gamma_step == gamma_enter:
            path.append(coefficients.copy())
            projection = scipy.linalg.lstsq(Xc[:, active], Xc[:, entering])[0]
            remainder = Xc[:, entering] - Xc[:, active] @ projection
            if float(remainder @ remainder) <= 1e-10 * gram[entering, entering]:
                logging.info('Column {} depends linearly on the active columns and is skipped'.format(entering))
                excluded.add(entering)
            else:
                active.append(entering)
                entered.append(entering)
        else:
            path.append(coefficients.copy())
            break
    else:
        logging.warning('Least angle regression stopped after {} steps'.format(max_steps))
    return np.array(alphas), np.array(path), entered


def information_criterion(residual_sum_of_squares: float, n: int, k: int, criterion: str) -> float:
    """n ln(RSS / n) plus 2k for 'aic' or k ln(n) for 'bic'."""
    if criterion not in (AIC, BIC):
        raise ValueError('Unknown criterion {0}, expected {1} or {2}'.format(criterion, AIC, BIC))
    fit = n * np.log(max(residual_sum_of_squares, np.finfo(np.float64).tiny) / n)
    return float(fit + (2.0 * k if criterion == AIC else k * np.log(n)))


def fit_lasso_lars_ic(X: np.ndarray, y: np.ndarray, criterion: str = AIC,
                      columns: Optional[Sequence[str]] = None) -> LassoLarsICModel:
    """
    Fits the lasso at the breakpoint of the least angle regression path that minimizes the information criterion.
    The criterion counts the nonzero coefficients plus the intercept as parameters. If no column correlates with
    the target, the model predicts the mean and its metadata is flagged 'path_degenerate'.
    """
    if criterion not in (AIC, BIC):
        raise ValueError('Unknown criterion {0}, expected {1} or {2}'.format(criterion, AIC, BIC))
    X, y = check_matrix(X, y)
    n = X.shape[0]
    if n <= 2:
        raise ValueError('Need more than two rows')
    columns = resolve_columns(columns, X.shape[1])
    Xc, yc, x_mean, y_mean = _center(X, y)
    alphas, path, entered = lars_lasso_path(X, y)
    criteria = []
    for coefficients in path:
        residuals = yc - Xc @ coefficients
        k = int(np.count_nonzero(coefficients)) + 1
        criteria.append(information_criterion(float(residuals @ residuals), n, k, criterion))
    best = int(np.argmin(criteria))
    coefficients = path[best]
    metadata = {'path_degenerate': len(entered) == 0, 'alpha': float(alphas[best]), 'alphas': alphas.tolist(),
                'criterion_values': criteria, 'entered': entered}
    return LassoLarsICModel(y_mean - float(x_mean @ coefficients), coefficients, columns,
                            hyperparameters={'criterion': criterion}, metadata=metadata)


def _coordinate_descent(gram: np.ndarray, correlations: np.ndarray, l1: float, l2: float, start: np.ndarray,
                        tol: float, max_iterations: int) -> Tuple[np.ndarray, int]:
    # gram and correlations are scaled by 1/n
    coefficients = start.copy()
    product = gram @ coefficients
    max_change = np.inf
    for iteration in range(1, max_iterations + 1):
        max_change = 0.0
        for j in range(len(coefficients)):
            denominator = gram[j, j] + l2
            old = coefficients[j]
            if denominator <= 0.0:
                new = 0.0
            else:
                z = correlations[j] - product[j] + gram[j, j] * old
                new = np.sign(z) * max(abs(z) - l1, 0.0) / denominator
            if new != old:
                product += gram[:, j] * (new - old)
                coefficients[j] = new
                max_change = max(max_change, abs(new - old))
        if max_change <= tol:
            return coefficients, iteration
    raise NonConvergence(max_iterations, float(max_change))


def _scaled_problem(X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, float, float]:
    Xc, yc, x_mean, y_mean = _center(X, y)
    scale = float(np.std(yc))
    return Xc, yc, x_mean, y_mean, scale if scale > 0 else 1.0


def elastic_net_path(X: np.ndarray, y: np.ndarray, alphas: Sequence[float], l1_ratio: float = DEFAULT_L1_RATIO,
                     tol: float = DEFAULT_TOLERANCE,
                     max_iterations: int = DEFAULT_MAX_ITERATIONS) -> Tuple[np.ndarray, np.ndarray]:
    """
    Solves the elastic net (1/2n)||y - a0 - Xw||^2 + alpha l1_ratio ||w||_1 + (alpha/2)(1 - l1_ratio)||w||^2 for
    each penalty by coordinate descent, starting each solve from the previous solution. Convergence is reached when
    no coefficient changes by more than tol, measured in units of the standard deviation of y.
    :return: The intercepts and the coefficients, one row per penalty.
    """
    if not 0.0 <= l1_ratio <= 1.0:
        raise ValueError('l1_ratio must lie in [0, 1]')
    X, y = check_matrix(X, y)
    n, p = X.shape
    Xc, yc, x_mean, y_mean, scale = _scaled_problem(X, y)
    gram = Xc.T @ Xc / n
    correlations = Xc.T @ (yc / scale) / n
    coefficients = np.zeros(p)
    intercepts, path = [], []
    for alpha in alphas:
        if alpha < 0:
            raise ValueError('Penalties must not be negative')
        # with y divided by scale, the l1 penalty scales by 1/scale and the l2 penalty stays
        coefficients, _ = _coordinate_descent(gram, correlations, alpha * l1_ratio / scale, alpha * (1.0 - l1_ratio),
                                              coefficients, tol, max_iterations)
        path.append(coefficients * scale)
        intercepts.append(y_mean - float(x_mean @ path[-1]))
    return np.array(intercepts), np.array(path).reshape(len(path), p)


def alpha_grid(X: np.ndarray, y: np.ndarray, l1_ratio: float = DEFAULT_L1_RATIO, n_alphas: int = DEFAULT_N_ALPHAS,
               ratio: float = DEFAULT_ALPHA_RATIO) -> np.ndarray:
    """Geometric grid from the smallest penalty that zeroes all coefficients down to ratio times that penalty."""
    X, y = check_matrix(X, y)
    Xc, yc, _, _ = _center(X, y)
    alpha_max = float(np.max(np.abs(Xc.T @ yc), initial=0.0)) / (len(y) * max(l1_ratio, 1e-3))
    if alpha_max <= 0.0:
        return np.zeros(1)
    return np.geomspace(alpha_max, alpha_max * ratio, num=n_alphas)


def _fold_errors(X: np.ndarray, y: np.ndarray, train: np.ndarray, test: np.ndarray, alphas: np.ndarray,
                 l1_ratio: float, tol: float, max_iterations: int) -> np.ndarray:
    intercepts, path = elastic_net_path(X[train], y[train], alphas, l1_ratio, tol, max_iterations)
    predictions = intercepts[:, None] + path @ X[test].T
    return np.mean((predictions - y[test][None, :]) ** 2, axis=1)


def fit_elastic_net_cv(X: np.ndarray, y: np.ndarray, l1_ratio: float = DEFAULT_L1_RATIO, folds: int = DEFAULT_FOLDS,
                       alphas: Optional[Sequence[float]] = None, tol: float = DEFAULT_TOLERANCE,
                       max_iterations: int = DEFAULT_MAX_ITERATIONS, n_jobs: int = 1,
                       columns: Optional[Sequence[str]] = None) -> ElasticNetCVModel:
    """
    Fits the elastic net with the penalty that minimizes the mean squared error over contiguous cross-validation
    folds, then refits on all rows at that penalty. The path is solved for the standardized target
    (y - mean(y)) / std(y), so the penalties do not depend on the units of y. Intercept and coefficients are
    returned in the units of y.
    :param alphas: The candidate penalties for the standardized target. If None, a geometric grid of 100 penalties
    is used.
    """
    X, y = check_matrix(X, y)
    columns = resolve_columns(columns, X.shape[1])
    if folds < 2 or folds > len(y):
        raise ValueError('Number of folds must lie between 2 and the number of rows')
    target_mean = float(np.mean(y))
    target_scale = float(np.std(y))
    if target_scale <= 0.0:
        target_scale = 1.0
    target = (y - target_mean) / target_scale
    if alphas is None:
        alphas = alpha_grid(X, target, l1_ratio)
    alphas = np.sort(np.asarray(alphas, dtype=np.float64))[::-1]
    splits = KFold(n_splits=folds, shuffle=False).split(X)
    errors = Parallel(n_jobs=n_jobs)(delayed(_fold_errors)(X, target, train, test, alphas, l1_ratio, tol,
                                                           max_iterations)
                                     for train, test in splits)
    mean_errors = np.mean(errors, axis=0)
    best = int(np.argmin(mean_errors))
    intercepts, path = elastic_net_path(X, target, alphas[:best + 1], l1_ratio, tol, max_iterations)
    metadata = {'alpha': float(alphas[best]), 'alphas': alphas.tolist(),
                'mean_squared_errors': (mean_errors * target_scale ** 2).tolist(), 'target_mean': target_mean,
                'target_scale': target_scale}
    return ElasticNetCVModel(target_mean + target_scale * intercepts[-1], path[-1] * target_scale, columns,
                             hyperparameters={'l1_ratio': l1_ratio, 'folds': folds}, metadata=metadata)


def fit_cart_regression(X: np.ndarray, y: np.ndarray, criterion: str = MSE, splitter: str = 'best',
                        max_depth: Optional[int] = None, min_samples_split: int = 2,
                        columns: Optional[Sequence[str]] = None) -> RegressionTree:
    """Grows a regression tree minimizing the weighted mean squared error of the children at each split."""
    if criterion != MSE:
        raise ValueError('Regression trees support the \'mse\' criterion only')
    if splitter != 'best':
        raise ValueError('Only the \'best\' splitter is supported')
    X, y = check_matrix(X, y)
    columns = resolve_columns(columns, X.shape[1])
    tree = grow_tree(X, y, MSE, max_depth=max_depth, min_samples_split=min_samples_split)
    hyperparameters = {'criterion': criterion, 'splitter': splitter, 'max_depth': max_depth,
                       'min_samples_split': min_samples_split}
    return RegressionTree(tree, columns, hyperparameters, {'depth': tree.depth, 'leaf_count': tree.leaf_count})


class LinearRegressionAccessor(ModelAccessor):

    @classmethod
    def name(cls) -> str:
        return OrdinaryLeastSquaresModel.name()

    @classmethod
    def is_classifier(cls) -> bool:
        return False

    @classmethod
    def fit(cls, X: np.ndarray, y: np.ndarray, columns: Sequence[str], hyperparameters: dict) -> FittedModel:
        return fit_ols(X, y, columns=columns, **hyperparameters)

    @classmethod
    def create_from_parameters(cls, parameters: dict) -> FittedModel:
        return OrdinaryLeastSquaresModel.create_from_parameters(parameters)


class RidgeAccessor(ModelAccessor):

    @classmethod
    def name(cls) -> str:
        return RidgeModel.name()

    @classmethod
    def is_classifier(cls) -> bool:
        return False

    @classmethod
    def fit(cls, X: np.ndarray, y: np.ndarray, columns: Sequence[str], hyperparameters: dict) -> FittedModel:
        return fit_ridge(X, y, columns=columns, **hyperparameters)

    @classmethod
    def create_from_parameters(cls, parameters: dict) -> FittedModel:
        return RidgeModel.create_from_parameters(parameters)


class LassoLarsICAccessor(ModelAccessor):

    @classmethod
    def name(cls) -> str:
        return LassoLarsICModel.name()

    @classmethod
    def is_classifier(cls) -> bool:
        return False

    @classmethod
    def fit(cls, X: np.ndarray, y: np.ndarray, columns: Sequence[str], hyperparameters: dict) -> FittedModel:
        return fit_lasso_lars_ic(X, y, columns=columns, **hyperparameters)

    @classmethod
    def create_from_parameters(cls, parameters: dict) -> FittedModel:
        return LassoLarsICModel.create_from_parameters(parameters)


class ElasticNetCVAccessor(ModelAccessor):

    @classmethod
    def name(cls) -> str:
        return ElasticNetCVModel.name()

    @classmethod
    def is_classifier(cls) -> bool:
        return False

    @classmethod
    def fit(cls, X: np.ndarray, y: np.ndarray, columns: Sequence[str], hyperparameters: dict) -> FittedModel:
        return fit_elastic_net_cv(X, y, columns=columns, **hyperparameters)

    @classmethod
    def create_from_parameters(cls, parameters: dict) -> FittedModel:
        return ElasticNetCVModel.create_from_parameters(parameters)


class CARTRegressionAccessor(ModelAccessor):

    @classmethod
    def name(cls) -> str:
        return RegressionTree.name()

    @classmethod
    def is_classifier(cls) -> bool:
        return False

    @classmethod
    def fit(cls, X: np.ndarray, y: np.ndarray, columns: Sequence[str], hyperparameters: dict) -> FittedModel:
        return fit_cart_regression(X, y, columns=columns, **hyperparameters)

    @classmethod
    def create_from_parameters(cls, parameters: dict) -> FittedModel:
        return RegressionTree.create_from_parameters(parameters)
