# coding=UTF-8
"""
Description
===========

This module contains the model API of the job prediction toolkit. A :py:class:`FittedModel` is the result of training
one of the learners on a feature matrix. Learners are made available through a :py:class:`ModelAccessor`, which
trains new models and recreates persisted ones.
"""

from abc import ABCMeta, abstractmethod
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from .errors import SchemaMismatch
from .features import Scaler


__author__ = 'HPC Job Prediction Team'


class FittedModel(metaclass=ABCMeta):
    """
    A trained model. It knows the names of the columns it was trained on and, optionally, the scaler that was applied
    to the feature table before training.
    """

    def __init__(self, columns: Sequence[str], hyperparameters: Optional[dict] = None,
                 metadata: Optional[dict] = None, scaler: Optional[Scaler] = None):
        self._columns = list(columns)
        self._hyperparameters = dict(hyperparameters) if hyperparameters is not None else {}
        self._metadata = dict(metadata) if metadata is not None else {}
        self._scaler = scaler

    @classmethod
    @abstractmethod
    def name(cls) -> str:
        """
        :return: The name of the learner that produced the model.
        """

    @property
    def columns(self) -> Sequence[str]:
        """The ordered names of the columns the model expects."""
        return self._columns

    @property
    def hyperparameters(self) -> dict:
        return self._hyperparameters

    @property
    def metadata(self) -> dict:
        """Information gathered during training, e.g., the fit time or convergence details."""
        return self._metadata

    @property
    def scaler(self) -> Optional[Scaler]:
        return self._scaler

    @scaler.setter
    def scaler(self, scaler: Optional[Scaler]):
        if scaler is not None and list(scaler.columns) != self._columns:
            raise SchemaMismatch(self._columns, scaler.columns)
        self._scaler = scaler

    @property
    def fit_time_s(self) -> Optional[float]:
        return self._metadata.get('fit_time_s')

    def check_columns(self, X: np.ndarray, columns: Optional[Sequence[str]] = None) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if columns is not None and list(columns) != self._columns:
            raise SchemaMismatch(self._columns, columns)
        if X.ndim != 2 or X.shape[1] != len(self._columns):
            raise SchemaMismatch(self._columns, ['<{} columns>'.format(X.shape[-1] if X.ndim > 0 else 0)])
        return X

    def predict(self, X: np.ndarray, columns: Optional[Sequence[str]] = None) -> np.ndarray:
        """
        Predicts targets for the rows of a prepared feature matrix.
        :param X: The matrix, with the model's columns in the model's order.
        :param columns: If given, the names of the matrix columns, which are checked against the model's.
        """
        return self._predict(self.check_columns(X, columns))

    def prepare(self, frame: pd.DataFrame) -> np.ndarray:
        """Selects (and, if the model has a scaler, standardizes) the model's columns from a feature table."""
        if self._scaler is not None:
            missing = [column for column in self._scaler.input_columns if column not in frame.columns]
            if len(missing) > 0:
                raise SchemaMismatch(self._scaler.input_columns, list(frame.columns))
            return self._scaler.transform_frame(frame)
        missing = [column for column in self._columns if column not in frame.columns]
        if len(missing) > 0:
            raise SchemaMismatch(self._columns, list(frame.columns))
        return frame[self._columns].to_numpy(dtype=np.float64)

    def predict_frame(self, frame: pd.DataFrame) -> np.ndarray:
        return self._predict(self.prepare(frame))

    @abstractmethod
    def _predict(self, X: np.ndarray) -> np.ndarray:
        """Predicts on a matrix whose shape has been checked."""

    def get_as_dict(self) -> dict:
        """
        :return: A representation of this model as dictionary.
        """
        return {'type': self.name(),
                'parameters': self.get_parameters_as_dict()}

    def get_parameters_as_dict(self) -> dict:
        return {'columns': self._columns,
                'hyperparameters': self._hyperparameters,
                'metadata': self._metadata,
                'scaler': self._scaler.get_as_dict() if self._scaler is not None else None,
                'state': self._get_state_as_dict()}

    @abstractmethod
    def _get_state_as_dict(self) -> dict:
        """
        :return: The fitted parameters of this model as dict
        """


class Classifier(FittedModel, metaclass=ABCMeta):
    """A model predicting whether a job fails. Besides the class, it provides the probability of failure."""

    def predict_proba(self, X: np.ndarray, columns: Optional[Sequence[str]] = None) -> np.ndarray:
        """
        :return: The probability of class 1 for each row.
        """
        return self._predict_proba(self.check_columns(X, columns))

    def predict_proba_frame(self, frame: pd.DataFrame) -> np.ndarray:
        return self._predict_proba(self.prepare(frame))

    @abstractmethod
    def _predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Predicts failure probabilities on a matrix whose shape has been checked."""


class ModelAccessor(metaclass=ABCMeta):

    @classmethod
    @abstractmethod
    def name(cls) -> str:
        """The name of the learner."""

    @classmethod
    @abstractmethod
    def is_classifier(cls) -> bool:
        """Whether the learner predicts job failure rather than resource usage."""

    @classmethod
    @abstractmethod
    def fit(cls, X: np.ndarray, y: np.ndarray, columns: Sequence[str], hyperparameters: dict) -> FittedModel:
        """Trains a model with the given hyperparameters on the matrix X with targets y."""

    @classmethod
    @abstractmethod
    def create_from_parameters(cls, parameters: dict) -> FittedModel:
        """Returns a FittedModel object from the parameters of a persisted model."""


def resolve_columns(columns: Optional[Sequence[str]], p: int) -> List[str]:
    """Checks the given column names against the number of columns. Without names, columns are called x0, x1, ..."""
    if columns is None:
        return ['x{}'.format(i) for i in range(p)]
    if len(columns) != p:
        raise ValueError('Got {0} column names for {1} columns'.format(len(columns), p))
    return list(columns)
