"""
Description
===========

This module contains the learners that predict whether a job fails: logistic regression with an l2 penalty,
classification trees, Gaussian naive Bayes and random forests. It also contains accuracy and F1, by which they are
evaluated. Class 1 marks a failed job; wherever a decision is tied, class 0 is predicted.
"""

from typing import List, Optional, Sequence, Tuple, Union
import logging
import math

import numpy as np
import scipy.optimize
import scipy.special
from joblib import Parallel, delayed

from .cart import GINI, Tree, grow_tree
from .errors import JobDataError, NonConvergence, SingleClass
from .features import Scaler
from .model import Classifier, FittedModel, ModelAccessor, resolve_columns
from .regress import check_matrix

__author__ = 'HPC Job Prediction Team'

DEFAULT_L2_STRENGTH = 1.0
DEFAULT_N_TREES = 100
DEFAULT_VAR_SMOOTHING = 1e-9
GRADIENT_TOLERANCE = 1e-6

logger = logging.getLogger('ComponentProgress')
logger.setLevel(logging.INFO)


def _check_labels(X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    X, y = check_matrix(X, y)
    if not np.all((y == 0) | (y == 1)):
        raise JobDataError('Labels must be 0 or 1')
    return X, y


def accuracy(y_true: Sequence[int], y_pred: Sequence[int]) -> float:
    """The fraction of correctly classified samples."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape or len(y_true) == 0:
        raise ValueError('True and predicted labels must be non-empty and of equal length')
    return float(np.mean(y_true == y_pred))


def f1(y_true: Sequence[int], y_pred: Sequence[int]) -> float:
    """The harmonic mean of precision and recall of class 1. 0 if both are 0."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise ValueError('True and predicted labels must be of equal length')
    true_positives = float(np.sum((y_true == 1) & (y_pred == 1)))
    predicted_positives = float(np.sum(y_pred == 1))
    positives = float(np.sum(y_true == 1))
    precision = true_positives / predicted_positives if predicted_positives > 0 else 0.0
    recall = true_positives / positives if positives > 0 else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _scaler_from(parameters: dict) -> Optional[Scaler]:
    return Scaler.create_from_dict(parameters['scaler']) if parameters.get('scaler') is not None else None


class LogisticModel(Classifier):

    def __init__(self, intercept: float, weights: Sequence[float], columns: Sequence[str],
                 hyperparameters: Optional[dict] = None, metadata: Optional[dict] = None,
                 scaler: Optional[Scaler] = None):
        super().__init__(columns, hyperparameters, metadata, scaler)
        self._intercept = float(intercept)
        self._weights = np.asarray(weights, dtype=np.float64)
        if len(self._weights) != len(self.columns):
            raise ValueError('Need one weight per column')

    @classmethod
    def name(cls) -> str:
        return 'LogisticRegression'

    @property
    def intercept(self) -> float:
        return self._intercept

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def l2_strength(self) -> float:
        return self.hyperparameters.get('l2_strength', DEFAULT_L2_STRENGTH)

    def _predict_proba(self, X: np.ndarray) -> np.ndarray:
        return scipy.special.expit(self._intercept + X @ self._weights)

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return (self._predict_proba(X) > 0.5).astype(np.int64)

    def _get_state_as_dict(self) -> dict:
        return {'intercept': self._intercept, 'weights': self._weights.tolist()}

    @classmethod
    def create_from_parameters(cls, parameters: dict) -> 'LogisticModel':
        state = parameters['state']
        return cls(state['intercept'], state['weights'], parameters['columns'], parameters.get('hyperparameters'),
                   parameters.get('metadata'), _scaler_from(parameters))


def logistic_objective(parameters: np.ndarray, X: np.ndarray, y: np.ndarray, l2_strength: float) -> float:
    """Negative log-likelihood plus (l2_strength / 2) ||w||^2. The first parameter is the unpenalized intercept."""
    z = parameters[0] + X @ parameters[1:]
    return float(np.sum(np.logaddexp(0.0, z) - y * z) + 0.5 * l2_strength * parameters[1:] @ parameters[1:])


def _objective_and_gradient(parameters: np.ndarray, X: np.ndarray, y: np.ndarray,
                            l2_strength: float) -> Tuple[float, np.ndarray]:
    residuals = scipy.special.expit(parameters[0] + X @ parameters[1:]) - y
    gradient = np.empty_like(parameters)
    gradient[0] = np.sum(residuals)
    gradient[1:] = X.T @ residuals + l2_strength * parameters[1:]
    return logistic_objective(parameters, X, y, l2_strength), gradient


def _hessian(parameters: np.ndarray, X: np.ndarray, y: np.ndarray, l2_strength: float) -> np.ndarray:
    probabilities = scipy.special.expit(parameters[0] + X @ parameters[1:])
    weights = probabilities * (1.0 - probabilities)
    design = np.hstack([np.ones((len(y), 1)), X])
    hessian = design.T @ (design * weights[:, None])
    hessian[1:, 1:] += l2_strength * np.eye(X.shape[1])
    return hessian


def fit_logistic(X: np.ndarray, y: np.ndarray, l2_strength: float = DEFAULT_L2_STRENGTH,
                 max_iterations: int = 1000, columns: Optional[Sequence[str]] = None) -> LogisticModel:
    """
    Fits a logistic regression by minimizing the negative log-likelihood plus (l2_strength / 2) ||w||^2 with a
    trust region Newton method.
    :raises NonConvergence: If the gradient norm does not fall to 1e-6 within max_iterations.
    """
    if l2_strength < 0:
        raise ValueError('l2_strength must not be negative')
    X, y = _check_labels(X, y)
    columns = resolve_columns(columns, X.shape[1])
    result = scipy.optimize.minimize(_objective_and_gradient, np.zeros(X.shape[1] + 1), args=(X, y, l2_strength),
                                     jac=True, hess=_hessian, method='trust-exact',
                                     options={'gtol': GRADIENT_TOLERANCE * 1e-2, 'maxiter': max_iterations})
    _, gradient = _objective_and_gradient(result.x, X, y, l2_strength)
    gradient_norm = float(np.linalg.norm(gradient))
    if not gradient_norm <= GRADIENT_TOLERANCE:
        raise NonConvergence(int(result.nit), gradient_norm)
    metadata = {'iterations': int(result.nit), 'gradient_norm': gradient_norm, 'objective': float(result.fun)}
    return LogisticModel(result.x[0], result.x[1:], columns, {'l2_strength': l2_strength}, metadata)


class ClassificationTree(Classifier):
    """A CART classification tree. Leaves predict the majority class of their training rows."""

    def __init__(self, tree: Tree, columns: Sequence[str], hyperparameters: Optional[dict] = None,
                 metadata: Optional[dict] = None, scaler: Optional[Scaler] = None):
        super().__init__(columns, hyperparameters, metadata, scaler)
        self._tree = tree

    @classmethod
    def name(cls) -> str:
        return 'CARTClassification'

    @property
    def tree(self) -> Tree:
        return self._tree

    def _predict_proba(self, X: np.ndarray) -> np.ndarray:
        return self._tree.predict_value(X)

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return (self._predict_proba(X) > 0.5).astype(np.int64)

    def _get_state_as_dict(self) -> dict:
        return {'tree': self._tree.get_as_dict()}

    @classmethod
    def create_from_parameters(cls, parameters: dict) -> 'ClassificationTree':
        return cls(Tree.create_from_dict(parameters['state']['tree']), parameters['columns'],
                   parameters.get('hyperparameters'), parameters.get('metadata'), _scaler_from(parameters))


def fit_cart_classifier(X: np.ndarray, y: np.ndarray, criterion: str = GINI, splitter: str = 'best',
                        max_depth: Optional[int] = None, min_samples_split: int = 2,
                        columns: Optional[Sequence[str]] = None) -> ClassificationTree:
    """Grows a classification tree minimizing the weighted Gini impurity of the children at each split."""
    if criterion != GINI:
        raise ValueError('Classification trees support the \'gini\' criterion only')
    if splitter != 'best':
        raise ValueError('Only the \'best\' splitter is supported')
    X, y = _check_labels(X, y)
    columns = resolve_columns(columns, X.shape[1])
    tree = grow_tree(X, y, GINI, max_depth=max_depth, min_samples_split=min_samples_split)
    hyperparameters = {'criterion': criterion, 'splitter': splitter, 'max_depth': max_depth,
                       'min_samples_split': min_samples_split}
    return ClassificationTree(tree, columns, hyperparameters, {'depth': tree.depth, 'leaf_count': tree.leaf_count})


class GaussianNBModel(Classifier):

    def __init__(self, priors: Sequence[float], means: Sequence[Sequence[float]],
                 variances: Sequence[Sequence[float]], columns: Sequence[str],
                 hyperparameters: Optional[dict] = None, metadata: Optional[dict] = None,
                 scaler: Optional[Scaler] = None):
        super().__init__(columns, hyperparameters, metadata, scaler)
        self._priors = np.asarray(priors, dtype=np.float64)
        self._means = np.asarray(means, dtype=np.float64).reshape(2, len(self.columns))
        self._variances = np.asarray(variances, dtype=np.float64).reshape(2, len(self.columns))

    @classmethod
    def name(cls) -> str:
        return 'GaussianNB'

    @property
    def priors(self) -> np.ndarray:
        return self._priors

    @property
    def means(self) -> np.ndarray:
        return self._means

    @property
    def variances(self) -> np.ndarray:
        return self._variances

    def joint_log_likelihood(self, X: np.ndarray) -> np.ndarray:
        """Log prior plus the summed log densities of the features, one column per class."""
        X = self.check_columns(X)
        likelihoods = []
        for c in range(2):
            log_density = -0.5 * np.sum(np.log(2.0 * np.pi * self._variances[c])) - \
                0.5 * np.sum((X - self._means[c]) ** 2 / self._variances[c], axis=1)
            likelihoods.append(np.log(self._priors[c]) + log_density)
        return np.stack(likelihoods, axis=1)

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.joint_log_likelihood(X), axis=1).astype(np.int64)

    def _predict_proba(self, X: np.ndarray) -> np.ndarray:
        likelihoods = self.joint_log_likelihood(X)
        return np.exp(likelihoods[:, 1] - scipy.special.logsumexp(likelihoods, axis=1))

    def _get_state_as_dict(self) -> dict:
        return {'priors': self._priors.tolist(), 'means': self._means.tolist(), 'variances': self._variances.tolist()}

    @classmethod
    def create_from_parameters(cls, parameters: dict) -> 'GaussianNBModel':
        state = parameters['state']
        return cls(state['priors'], state['means'], state['variances'], parameters['columns'],
                   parameters.get('hyperparameters'), parameters.get('metadata'), _scaler_from(parameters))


def fit_gnb(X: np.ndarray, y: np.ndarray, var_smoothing: float = DEFAULT_VAR_SMOOTHING,
            columns: Optional[Sequence[str]] = None) -> GaussianNBModel:
    """
    Fits Gaussian naive Bayes with maximum likelihood means and variances per class. Variances are floored at
    var_smoothing times the largest feature variance. A class with a single sample, or a feature constant within a
    class, has zero variance and so takes the floor.
    :raises SingleClass: If a class has no samples.
    """
    X, y = _check_labels(X, y)
    columns = resolve_columns(columns, X.shape[1])
    counts = np.array([np.sum(y == 0), np.sum(y == 1)])
    if np.any(counts == 0):
        raise SingleClass('Gaussian naive Bayes needs samples of both classes')
    largest_variance = float(np.max(np.var(X, axis=0), initial=0.0))
    floor = var_smoothing * largest_variance if largest_variance > 0 else var_smoothing
    means = np.stack([X[y == c].mean(axis=0) for c in range(2)])
    variances = np.maximum(np.stack([X[y == c].var(axis=0) for c in range(2)]), floor)
    return GaussianNBModel(counts / len(y), means, variances, columns, {'var_smoothing': var_smoothing},
                           {'variance_floor': floor})


class ForestModel(Classifier):
    """A random forest. Class 1 is predicted if more than half of the trees predict it."""

    def __init__(self, trees: Sequence[Tree], seeds: Sequence[int], columns: Sequence[str],
                 hyperparameters: Optional[dict] = None, metadata: Optional[dict] = None,
                 scaler: Optional[Scaler] = None):
        super().__init__(columns, hyperparameters, metadata, scaler)
        self._trees = list(trees)
        self._seeds = [int(seed) for seed in seeds]

    @classmethod
    def name(cls) -> str:
        return 'RandomForest'

    @property
    def trees(self) -> List[Tree]:
        return self._trees

    @property
    def seeds(self) -> List[int]:
        return self._seeds

    def votes(self, X: np.ndarray) -> np.ndarray:
        """The number of trees predicting class 1, per row."""
        votes = np.zeros(len(X), dtype=np.int64)
        for tree in self._trees:
            votes += tree.predict_value(X) > 0.5
        return votes

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return (2 * self.votes(X) > len(self._trees)).astype(np.int64)

    def _predict_proba(self, X: np.ndarray) -> np.ndarray:
        return np.mean([tree.predict_value(X) for tree in self._trees], axis=0)

    def _get_state_as_dict(self) -> dict:
        return {'trees': [tree.get_as_dict() for tree in self._trees], 'seeds': self._seeds}

    @classmethod
    def create_from_parameters(cls, parameters: dict) -> 'ForestModel':
        state = parameters['state']
        return cls([Tree.create_from_dict(tree) for tree in state['trees']], state['seeds'], parameters['columns'],
                   parameters.get('hyperparameters'), parameters.get('metadata'), _scaler_from(parameters))


def features_per_split(max_features: Union[int, str, None], p: int) -> int:
    if max_features is None or max_features == 'all':
        return p
    if max_features == 'sqrt':
        return max(1, math.ceil(math.sqrt(p)))
    if isinstance(max_features, int) and max_features > 0:
        return min(max_features, p)
    raise ValueError('max_features must be a positive integer, \'sqrt\' or \'all\'')


def _grow_forest_tree(X: np.ndarray, y: np.ndarray, seed: int, bootstrap: bool, max_features: int,
                      max_depth: Optional[int], min_samples_split: int) -> Tree:
    rng = np.random.default_rng(seed)
    if bootstrap:
        rows = rng.integers(0, len(y), size=len(y))
        X, y = X[rows], y[rows]
    return grow_tree(X, y, GINI, max_depth=max_depth, min_samples_split=min_samples_split,
                     max_features=max_features, rng=rng)


def fit_random_forest(X: np.ndarray, y: np.ndarray, n_trees: int = DEFAULT_N_TREES, criterion: str = GINI,
                      max_depth: Optional[int] = None, min_samples_split: int = 2,
                      max_features: Union[int, str, None] = 'sqrt', bootstrap: bool = True, rng_seed: int = 42,
                      n_jobs: int = 1, columns: Optional[Sequence[str]] = None) -> ForestModel:
    """
    Grows a random forest. Each tree is grown on a bootstrap sample drawn with its own seed, which is derived from
    rng_seed. At each split, a tree considers the square root of the number of features, rounded up, drawn anew.
    :param n_jobs: The number of trees grown in parallel.
    """
    if criterion != GINI:
        raise ValueError('Random forests support the \'gini\' criterion only')
    if n_trees < 1:
        raise ValueError('n_trees must be at least 1')
    X, y = _check_labels(X, y)
    columns = resolve_columns(columns, X.shape[1])
    n_features = features_per_split(max_features, X.shape[1])
    seeds = np.random.SeedSequence(rng_seed).generate_state(n_trees).tolist()
    if n_jobs == 1:
        trees = []
        for i, seed in enumerate(seeds):
            trees.append(_grow_forest_tree(X, y, seed, bootstrap, n_features, max_depth, min_samples_split))
            logger.info('{}'.format(int(((i + 1) / n_trees) * 100)))
    else:
        trees = Parallel(n_jobs=n_jobs)(delayed(_grow_forest_tree)(X, y, seed, bootstrap, n_features, max_depth,
                                                                   min_samples_split) for seed in seeds)
    hyperparameters = {'n_trees': n_trees, 'criterion': criterion, 'max_depth': max_depth,
                       'min_samples_split': min_samples_split, 'max_features': max_features, 'bootstrap': bootstrap,
                       'rng_seed': rng_seed}
    return ForestModel(trees, seeds, columns, hyperparameters, {'features_per_split': n_features})


class LogisticRegressionAccessor(ModelAccessor):

    @classmethod
    def name(cls) -> str:
        return LogisticModel.name()

    @classmethod
    def is_classifier(cls) -> bool:
        return True

    @classmethod
    def fit(cls, X: np.ndarray, y: np.ndarray, columns: Sequence[str], hyperparameters: dict) -> FittedModel:
        return fit_logistic(X, y, columns=columns, **hyperparameters)

    @classmethod
    def create_from_parameters(cls, parameters: dict) -> FittedModel:
        return LogisticModel.create_from_parameters(parameters)


class CARTClassificationAccessor(ModelAccessor):

    @classmethod
    def name(cls) -> str:
        return ClassificationTree.name()

    @classmethod
    def is_classifier(cls) -> bool:
        return True

    @classmethod
    def fit(cls, X: np.ndarray, y: np.ndarray, columns: Sequence[str], hyperparameters: dict) -> FittedModel:
        return fit_cart_classifier(X, y, columns=columns, **hyperparameters)

    @classmethod
    def create_from_parameters(cls, parameters: dict) -> FittedModel:
        return ClassificationTree.create_from_parameters(parameters)


class GaussianNBAccessor(ModelAccessor):

    @classmethod
    def name(cls) -> str:
        return GaussianNBModel.name()

    @classmethod
    def is_classifier(cls) -> bool:
        return True

    @classmethod
    def fit(cls, X: np.ndarray, y: np.ndarray, columns: Sequence[str], hyperparameters: dict) -> FittedModel:
        return fit_gnb(X, y, columns=columns, **hyperparameters)

    @classmethod
    def create_from_parameters(cls, parameters: dict) -> FittedModel:
        return GaussianNBModel.create_from_parameters(parameters)


class RandomForestAccessor(ModelAccessor):

    @classmethod
    def name(cls) -> str:
        return ForestModel.name()

    @classmethod
    def is_classifier(cls) -> bool:
        return True

    @classmethod
    def fit(cls, X: np.ndarray, y: np.ndarray, columns: Sequence[str], hyperparameters: dict) -> FittedModel:
        return fit_random_forest(X, y, columns=columns, **hyperparameters)

    @classmethod
    def create_from_parameters(cls, parameters: dict) -> FittedModel:
        return ForestModel.create_from_parameters(parameters)
