"""
Description
===========

This module grows binary decision trees the CART way: starting from the root, each node is split on the feature and
threshold that minimise the weighted impurity of the two children. It is shared by the regression tree, the
classification tree and the random forest.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

__author__ = 'HPC Job Prediction Team'

MSE = 'mse'
GINI = 'gini'
CRITERIA = (MSE, GINI)
LEAF = -1
# relative impurity decrease below which a split is taken as no improvement
_MIN_RELATIVE_DECREASE = 1e-9


def gini(labels: Sequence[int]) -> float:
    """Gini impurity 1 - sum of squared class proportions of binary labels."""
    labels = np.asarray(labels)
    if len(labels) == 0:
        return 0.0
    p = float(np.mean(labels))
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def _node_cost(y: np.ndarray, criterion: str) -> float:
    # impurity times number of samples
    n = len(y)
    if criterion == GINI:
        positives = float(np.sum(y))
        return 2.0 * positives * (n - positives) / n
    centered = y - np.mean(y)
    return float(np.dot(centered, centered))


def find_best_split(X: np.ndarray, y: np.ndarray, criterion: str,
                    features: Optional[Sequence[int]] = None) -> Optional[Tuple[int, float, float]]:
    """
    Finds the split of a node minimising the summed child impurity, weighted by the child sizes. Candidate thresholds
    are the midpoints between consecutive distinct values. Ties go to the lowest feature index, then to the lowest
    threshold.
    :param X: The rows of the node.
    :param y: The targets of the node.
    :param criterion: 'mse' or 'gini'.
    :param features: The candidate features. All features if None.
    :return: The feature, the threshold and the summed child cost (impurity times samples), or None if no feature
    takes more than one value.
    """
    n = len(y)
    if features is None:
        features = range(X.shape[1])
    features = np.asarray(features, dtype=np.intp)
    if n < 2 or len(features) == 0:
        return None
    values = X[:, features]
    order = np.argsort(values, axis=0, kind='stable')
    sorted_values = np.take_along_axis(values, order, axis=0)
    sorted_y = y[order]
    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    n_right = n - n_left
    if criterion == GINI:
        positives_left = np.cumsum(sorted_y, axis=0)[:-1]
        positives = float(np.sum(y))
        positives_right = positives - positives_left
        cost = 2.0 * positives_left * (n_left - positives_left) / n_left + \
            2.0 * positives_right * (n_right - positives_right) / n_right
    else:
        centered = sorted_y - np.mean(y)
        sum_left = np.cumsum(centered, axis=0)[:-1]
        squares_left = np.cumsum(centered * centered, axis=0)[:-1]
        total = float(np.sum(centered[:, 0]))
        total_squares = float(np.dot(centered[:, 0], centered[:, 0]))
        sum_right = total - sum_left
        cost = (squares_left - sum_left * sum_left / n_left) + \
            (total_squares - squares_left - sum_right * sum_right / n_right)
    cost = np.where(sorted_values[:-1] < sorted_values[1:], cost, np.inf)
    # features along the first axis, so that the first minimum has the lowest feature, then the lowest threshold
    cost = cost.T
    best = int(np.argmin(cost))
    feature_position, row = divmod(best, n - 1)
    best_cost = float(cost[feature_position, row])
    if not np.isfinite(best_cost):
        return None
    lower = float(sorted_values[row, feature_position])
    upper = float(sorted_values[row + 1, feature_position])
    threshold = (lower + upper) / 2.0
    if not lower <= threshold < upper:
        threshold = lower
    return int(features[feature_position]), threshold, max(best_cost, 0.0)


class Tree(object):
    """
    A binary tree stored in parallel arrays. Node 0 is the root; leaves have feature and children set to -1. Rows with
    a value at or below a node's threshold go to the left child.
    """

    def __init__(self, feature: Sequence[int], threshold: Sequence[float], left: Sequence[int],
                 right: Sequence[int], value: Sequence[float], n_samples: Sequence[int], impurity: Sequence[float]):
        self.feature = np.asarray(feature, dtype=np.intp)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.intp)
        self.right = np.asarray(right, dtype=np.intp)
        self.value = np.asarray(value, dtype=np.float64)
        self.n_samples = np.asarray(n_samples, dtype=np.int64)
        self.impurity = np.asarray(impurity, dtype=np.float64)

    @property
    def node_count(self) -> int:
        return len(self.feature)

    @property
    def leaf_count(self) -> int:
        return int(np.sum(self.left == LEAF))

    @property
    def depth(self) -> int:
        depths = np.zeros(self.node_count, dtype=np.int64)
        for node in range(self.node_count):
            if self.left[node] != LEAF:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max()) if self.node_count > 0 else 0

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Returns the index of the leaf each row ends up in."""
        leaves = np.empty(len(X), dtype=np.intp)
        stack = [(0, np.arange(len(X)))]
        while stack:
            node, rows = stack.pop()
            if self.left[node] == LEAF:
                leaves[rows] = node
                continue
            goes_left = X[rows, self.feature[node]] <= self.threshold[node]
            stack.append((self.left[node], rows[goes_left]))
            stack.append((self.right[node], rows[~goes_left]))
        return leaves

    def predict_value(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def get_as_dict(self) -> dict:
        return {'feature': self.feature.tolist(), 'threshold': self.threshold.tolist(), 'left': self.left.tolist(),
                'right': self.right.tolist(), 'value': self.value.tolist(), 'n_samples': self.n_samples.tolist(),
                'impurity': self.impurity.tolist()}

    @classmethod
    def create_from_dict(cls, parameters: dict) -> 'Tree':
        return cls(parameters['feature'], parameters['threshold'], parameters['left'], parameters['right'],
                   parameters['value'], parameters['n_samples'], parameters['impurity'])


def grow_tree(X: np.ndarray, y: np.ndarray, criterion: str, max_depth: Optional[int] = None,
              min_samples_split: int = 2, max_features: Optional[int] = None,
              rng: Optional[np.random.Generator] = None) -> Tree:
    """
    Grows a tree greedily from the root. A node becomes a leaf when it is pure, holds fewer than min_samples_split
    rows, has reached max_depth or when no split strictly decreases the impurity. A leaf's value is the mean target
    of its rows, i.e. the fraction of class 1 for classification.
    :param max_features: If given and smaller than the number of features, each split considers this many features,
    drawn anew with rng from all features. A node whose drawn features are all constant on it becomes a leaf.
    """
    if criterion not in CRITERIA:
        raise ValueError('Unknown criterion {0}, expected one of {1}'.format(criterion, CRITERIA))
    if min_samples_split < 2:
        raise ValueError('min_samples_split must be at least 2')
    if max_depth is not None and max_depth < 0:
        raise ValueError('max_depth must not be negative')
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(y) == 0:
        raise ValueError('Cannot grow a tree without samples')
    p = X.shape[1]
    subsample_features = max_features is not None and max_features < p
    if subsample_features and rng is None:
        raise ValueError('Feature subsampling needs a random generator')
    nodes = {'feature': [], 'threshold': [], 'left': [], 'right': [], 'value': [], 'n_samples': [], 'impurity': []}

    def add_node(rows: np.ndarray, cost: float) -> int:
        nodes['feature'].append(LEAF)
        nodes['threshold'].append(0.0)
        nodes['left'].append(LEAF)
        nodes['right'].append(LEAF)
        nodes['value'].append(float(np.mean(y[rows])))
        nodes['n_samples'].append(len(rows))
        nodes['impurity'].append(cost / len(rows))
        return len(nodes['feature']) - 1

    root_rows = np.arange(len(y))
    stack: List[Tuple[int, np.ndarray, int, float]] = []
    root_cost = _node_cost(y, criterion)
    stack.append((add_node(root_rows, root_cost), root_rows, 0, root_cost))
    while stack:
        node, rows, depth, cost = stack.pop()
        node_y = y[rows]
        if len(rows) < min_samples_split or (max_depth is not None and depth >= max_depth) or \
                np.all(node_y == node_y[0]) or cost <= 0.0:
            continue
        node_X = X[rows]
        features = None
        if subsample_features:
            features = np.sort(rng.choice(p, size=max_features, replace=False))
        split = find_best_split(node_X, node_y, criterion, features)
        if split is None:
            continue
        feature, threshold, child_cost = split
        if cost - child_cost <= _MIN_RELATIVE_DECREASE * cost:
            continue
        goes_left = node_X[:, feature] <= threshold
        left_rows, right_rows = rows[goes_left], rows[~goes_left]
        left_cost = _node_cost(y[left_rows], criterion)
        right_cost = _node_cost(y[right_rows], criterion)
        left = add_node(left_rows, left_cost)
        right = add_node(right_rows, right_cost)
        nodes['feature'][node] = feature
        nodes['threshold'][node] = threshold
        nodes['left'][node] = left
        nodes['right'][node] = right
        stack.append((right, right_rows, depth + 1, right_cost))
        stack.append((left, left_rows, depth + 1, left_cost))
    return Tree(**nodes)
