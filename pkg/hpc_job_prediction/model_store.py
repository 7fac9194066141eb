"""
Description
===========

This module persists trained models as JSON documents in a store directory. Besides one model per task, the store
holds the history needed to build features for new jobs: the per-user aggregates, fallback aggregates per role and
over all users, and the codes assigned to users and projects.
"""

from dataclasses import asdict, dataclass, field
from typing import Dict, Optional, Sequence, Tuple
import json
import logging
import os

from .errors import MissingModel
from .features import UserAggregate, compute_user_aggregates, encode_users, role_fallback_aggregates
from .ingest import JobRecord
from .model import FittedModel
from .registrations import create_model_from_dict

__author__ = 'HPC Job Prediction Team'

HISTORY_FILE_NAME = 'aggregates.json'
_MODEL_FILE_SUFFIX = '.json'


@dataclass
class UserHistory:
    """What is known about users and projects from the jobs a store was trained on."""
    user_aggregates: Dict[str, UserAggregate]
    role_aggregates: Dict[str, UserAggregate]
    overall: UserAggregate
    user_codes: Dict[str, int] = field(default_factory=dict)
    project_codes: Dict[str, int] = field(default_factory=dict)

    @classmethod
    def from_jobs(cls, jobs: Sequence[JobRecord]) -> 'UserHistory':
        role_aggregates, overall = role_fallback_aggregates(jobs)
        project_codes = {}
        for job in jobs:
            project_codes.setdefault(job.project, job.project_id)
        return cls(user_aggregates=compute_user_aggregates(jobs), role_aggregates=role_aggregates, overall=overall,
                   user_codes=encode_users(job.owner for job in jobs), project_codes=project_codes)

    def lookup(self, owner: str, role: str) -> Tuple[UserAggregate, bool]:
        """
        :return: The aggregates of the user and False, or, for users without history, the aggregates of the role (or
        of all users, if the role is unknown too) and True.
        """
        if owner in self.user_aggregates:
            return self.user_aggregates[owner], False
        return self.role_aggregates.get(role, self.overall), True

    def project_code(self, project: str) -> int:
        """The code of a project. Projects not seen before share the next free code."""
        if project in self.project_codes:
            return self.project_codes[project]
        return max(self.project_codes.values(), default=-1) + 1

    def get_as_dict(self) -> dict:
        return {'user_aggregates': [asdict(aggregate) for aggregate in self.user_aggregates.values()],
                'role_aggregates': [asdict(aggregate) for aggregate in self.role_aggregates.values()],
                'overall': asdict(self.overall),
                'user_codes': self.user_codes,
                'project_codes': self.project_codes}

    @classmethod
    def create_from_dict(cls, history_as_dict: dict) -> 'UserHistory':
        user_aggregates = [UserAggregate(**aggregate) for aggregate in history_as_dict['user_aggregates']]
        role_aggregates = [UserAggregate(**aggregate) for aggregate in history_as_dict['role_aggregates']]
        return cls(user_aggregates={aggregate.user: aggregate for aggregate in user_aggregates},
                   role_aggregates={aggregate.user: aggregate for aggregate in role_aggregates},
                   overall=UserAggregate(**history_as_dict['overall']),
                   user_codes=dict(history_as_dict.get('user_codes', {})),
                   project_codes=dict(history_as_dict.get('project_codes', {})))


class ModelStore(object):
    """
    A directory with one JSON document per task, named after the task, and the user history.
    """

    def __init__(self, path: str):
        self._path = path
        if not os.path.exists(path):
            os.makedirs(path)

    @property
    def path(self) -> str:
        return self._path

    def _model_file(self, task: str) -> str:
        return os.path.join(self._path, task + _MODEL_FILE_SUFFIX)

    def has_model(self, task: str) -> bool:
        return os.path.exists(self._model_file(task))

    def save_model(self, task: str, model: FittedModel):
        with open(self._model_file(task), 'w') as json_file:
            json.dump(model.get_as_dict(), json_file, indent=2)
        logging.info('Stored {0} model for {1}'.format(model.name(), task))

    def load_model(self, task: str) -> FittedModel:
        if not self.has_model(task):
            raise MissingModel(task)
        return load_model_file(self._model_file(task))

    def save_history(self, history: UserHistory):
        with open(os.path.join(self._path, HISTORY_FILE_NAME), 'w') as json_file:
            json.dump(history.get_as_dict(), json_file, indent=2)

    def load_history(self) -> UserHistory:
        history_file = os.path.join(self._path, HISTORY_FILE_NAME)
        if not os.path.exists(history_file):
            raise MissingModel(HISTORY_FILE_NAME)
        with open(history_file, 'r') as json_file:
            return UserHistory.create_from_dict(json.load(json_file))


def load_model_file(path: str) -> FittedModel:
    with open(path, 'r') as json_file:
        return create_model_from_dict(json.load(json_file))


def store_of_model_file(path: str, store_path: Optional[str] = None) -> ModelStore:
    """The store a model file belongs to: the given store, or the directory the file lies in."""
    if store_path is None:
        store_path = os.path.dirname(os.path.abspath(path))
    return ModelStore(store_path)
