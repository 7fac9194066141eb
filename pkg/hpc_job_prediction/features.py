"""
Description
===========

This module builds the feature set used by all learners. Per-user averages of usage and requests are computed over
all jobs of a user and replicated onto each of the user's jobs. Together with the requests, the encoded user and
project and a one-hot encoding of the user's role they form the feature table. From this table, a
:py:class:`Dataset` is assembled for each of the three prediction tasks.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union
import logging
import warnings

import numpy as np
import pandas as pd

from .errors import DegenerateColumn, UnknownUser
from .ingest import JobRecord, ROLES, UNKNOWN_ROLE, jobs_to_frame

__author__ = 'HPC Job Prediction Team'

CPU_REGRESSION = 'cpu_regression'
MEM_REGRESSION = 'mem_regression'
FAILURE_CLASSIFICATION = 'failure_classification'
TASKS = (CPU_REGRESSION, MEM_REGRESSION, FAILURE_CLASSIFICATION)
REGRESSION_TASKS = (CPU_REGRESSION, MEM_REGRESSION)

TARGET_COLUMNS = ('failed', 'cpu', 'maxvmem')
BASE_NUMERIC_COLUMNS = ('id', 'reqMem', 'reqTime', 'project')
AGGREGATE_COLUMNS = ('aCPU', 'aMaxmem', 'aReqtime', 'aReqmem')
ROLE_COLUMNS = tuple('p_{}'.format(role) for role in ROLES)
FEATURE_COLUMNS = TARGET_COLUMNS + BASE_NUMERIC_COLUMNS + AGGREGATE_COLUMNS + ROLE_COLUMNS

TASK_TARGETS = {CPU_REGRESSION: 'cpu', MEM_REGRESSION: 'maxvmem', FAILURE_CLASSIFICATION: 'failed'}
TASK_AGGREGATES = {CPU_REGRESSION: ('aCPU', 'aReqtime'),
                   MEM_REGRESSION: ('aMaxmem', 'aReqmem'),
                   FAILURE_CLASSIFICATION: AGGREGATE_COLUMNS}

_USAGE_FIELDS = ('cpu_s', 'maxvmem_bytes', 'req_time_s', 'req_mem_bytes')

Row = Union[JobRecord, Tuple[JobRecord, 'UserAggregate']]


@dataclass(frozen=True)
class UserAggregate:
    user: str
    a_cpu: float
    a_maxmem: float
    a_reqtime: float
    a_reqmem: float
    job_count: int


def _aggregates_from_frame(frame: pd.DataFrame, key: str) -> Dict[str, UserAggregate]:
    grouped = frame.groupby(key, sort=False)[list(_USAGE_FIELDS)]
    # floating point summation may leave a mean marginally outside the range of its values
    means = np.clip(grouped.mean().to_numpy(), grouped.min().to_numpy(), grouped.max().to_numpy())
    counts = grouped.size()
    aggregates = {}
    for name, (a_cpu, a_maxmem, a_reqtime, a_reqmem) in zip(counts.index, means):
        aggregates[name] = UserAggregate(user=name, a_cpu=float(a_cpu), a_maxmem=float(a_maxmem),
                                         a_reqtime=float(a_reqtime), a_reqmem=float(a_reqmem),
                                         job_count=int(counts[name]))
    return aggregates


def compute_user_aggregates(jobs: Sequence[JobRecord]) -> Dict[str, UserAggregate]:
    """
    Computes the average CPU usage, memory usage, requested time and requested memory per user.
    :param jobs: The jobs to aggregate over.
    :return: A dictionary from user to aggregates, ordered by first appearance of the user.
    """
    if len(jobs) == 0:
        return {}
    return _aggregates_from_frame(jobs_to_frame(jobs), 'owner')


def role_fallback_aggregates(jobs: Sequence[JobRecord]) -> Tuple[Dict[str, UserAggregate], UserAggregate]:
    """
    Computes aggregates over all jobs of a role and over all jobs. These are served for users without history.
    :return: A dictionary from role to aggregates and the aggregates over all jobs.
    """
    if len(jobs) == 0:
        raise ValueError('Cannot compute fallback aggregates without jobs')
    frame = jobs_to_frame(jobs)
    per_role = _aggregates_from_frame(frame, 'role')
    frame['everyone'] = '*'
    overall = _aggregates_from_frame(frame, 'everyone')['*']
    return per_role, overall


def join_aggregates(jobs: Sequence[JobRecord],
                    aggs: Dict[str, UserAggregate]) -> List[Tuple[JobRecord, UserAggregate]]:
    """Attaches to every job the aggregates of its owner. Returns one row per job, in job order."""
    rows = []
    for job in jobs:
        if job.owner not in aggs:
            raise UnknownUser(job.owner)
        rows.append((job, aggs[job.owner]))
    return rows


def encode_users(owners: Iterable[str], known: Optional[Dict[str, int]] = None) -> Dict[str, int]:
    """
    Assigns dense integer codes to users in order of first appearance. Codes of known users are kept, users not
    known yet receive the next free codes. The given mapping is not modified.
    """
    codes = dict(known) if known is not None else {}
    for owner in owners:
        if owner not in codes:
            codes[owner] = len(codes)
    return codes


def _split_rows(rows: Sequence[Row]) -> Tuple[List[JobRecord], Optional[List[UserAggregate]]]:
    if len(rows) > 0 and isinstance(rows[0], tuple):
        return [row[0] for row in rows], [row[1] for row in rows]
    return list(rows), None


def feature_frame(rows: Sequence[Row], user_codes: Optional[Dict[str, int]] = None) -> pd.DataFrame:
    """
    Creates the feature table. Its columns follow the order failed, cpu, maxvmem, id, reqMem, reqTime, project,
    aCPU, aMaxmem, aReqtime, aReqmem and the role indicators. Aggregate columns are only present if the rows carry
    aggregates.
    :param rows: Either jobs or pairs of job and aggregates as returned by :py:func:`join_aggregates`.
    :param user_codes: Codes of users seen before. Other users are encoded in order of first appearance.
    """
    jobs, aggregates = _split_rows(rows)
    codes = encode_users((job.owner for job in jobs), user_codes)
    data = {
        'failed': [job.failed for job in jobs],
        'cpu': [job.cpu_s for job in jobs],
        'maxvmem': [job.maxvmem_bytes for job in jobs],
        'id': [codes[job.owner] for job in jobs],
        'reqMem': [job.req_mem_bytes for job in jobs],
        'reqTime': [job.req_time_s for job in jobs],
        'project': [job.project_id for job in jobs],
    }
    if aggregates is not None:
        data['aCPU'] = [aggregate.a_cpu for aggregate in aggregates]
        data['aMaxmem'] = [aggregate.a_maxmem for aggregate in aggregates]
        data['aReqtime'] = [aggregate.a_reqtime for aggregate in aggregates]
        data['aReqmem'] = [aggregate.a_reqmem for aggregate in aggregates]
    roles = [job.role if job.role in ROLES else UNKNOWN_ROLE for job in jobs]
    for role, column in zip(ROLES, ROLE_COLUMNS):
        data[column] = [int(job_role == role) for job_role in roles]
    frame = pd.DataFrame(data, columns=[column for column in FEATURE_COLUMNS if column in data])
    for column in ('failed', 'id', 'project') + ROLE_COLUMNS:
        frame[column] = frame[column].astype(np.int64)
    for column in frame.columns:
        if frame[column].dtype != np.int64:
            frame[column] = frame[column].astype(np.float64)
    return frame


def dataset_columns(task: str, with_user_features: bool) -> List[str]:
    """The ordered feature columns of a task."""
    if task not in TASKS:
        raise ValueError('Unknown task {0}, expected one of {1}'.format(task, TASKS))
    aggregates = TASK_AGGREGATES[task] if with_user_features else ()
    return [column for column in BASE_NUMERIC_COLUMNS + AGGREGATE_COLUMNS + ROLE_COLUMNS
            if column not in AGGREGATE_COLUMNS or column in aggregates]


class Scaler(object):
    """
    Standardizes numeric columns with the mean and population standard deviation of the data it was fitted on.
    Role indicators pass through unchanged. Numeric columns without variance are dropped.
    """

    def __init__(self, input_columns: Sequence[str], columns: Sequence[str], means: Sequence[float],
                 stds: Sequence[float]):
        self.input_columns = list(input_columns)
        self.columns = list(columns)
        self.means = np.asarray(means, dtype=np.float64)
        self.stds = np.asarray(stds, dtype=np.float64)
        if not len(self.columns) == len(self.means) == len(self.stds):
            raise ValueError('Scaler needs one mean and one standard deviation per column')
        missing = [column for column in self.columns if column not in self.input_columns]
        if len(missing) > 0:
            raise ValueError('Scaler columns {} are no input columns'.format(missing))
        self._indexes = [self.input_columns.index(column) for column in self.columns]

    @classmethod
    def fit(cls, X: np.ndarray, columns: Sequence[str], passthrough: Sequence[str] = ROLE_COLUMNS) -> 'Scaler':
        X = np.asarray(X, dtype=np.float64)
        kept, means, stds = [], [], []
        for index, column in enumerate(columns):
            if column in passthrough:
                kept.append(column)
                means.append(0.0)
                stds.append(1.0)
                continue
            std = float(np.std(X[:, index]))
            if not std > 0:
                warnings.warn('Column {} has no variance and is dropped'.format(column), DegenerateColumn)
                continue
            kept.append(column)
            means.append(float(np.mean(X[:, index])))
            stds.append(std)
        return cls(columns, kept, means, stds)

    @property
    def dropped_columns(self) -> List[str]:
        return [column for column in self.input_columns if column not in self.columns]

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != len(self.input_columns):
            raise ValueError('Expected {0} columns, got shape {1}'.format(len(self.input_columns), X.shape))
        return (X[:, self._indexes] - self.means) / self.stds

    def transform_frame(self, frame: pd.DataFrame) -> np.ndarray:
        return self.transform(frame[self.input_columns].to_numpy(dtype=np.float64))

    def without(self, names: Iterable[str]) -> 'Scaler':
        names = set(names)
        kept = [i for i, column in enumerate(self.columns) if column not in names]
        return Scaler([column for column in self.input_columns if column not in names],
                      [self.columns[i] for i in kept], self.means[kept], self.stds[kept])

    def get_as_dict(self) -> dict:
        return {'input_columns': self.input_columns, 'columns': self.columns,
                'means': self.means.tolist(), 'stds': self.stds.tolist()}

    @classmethod
    def create_from_dict(cls, parameters: dict) -> 'Scaler':
        return cls(parameters['input_columns'], parameters['columns'], parameters['means'], parameters['stds'])


@dataclass
class Dataset:
    columns: List[str]
    X: np.ndarray
    y: np.ndarray
    task: str
    with_user_features: bool
    scaler: Optional[Scaler] = None
    dropped_columns: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.X.shape != (len(self.y), len(self.columns)):
            raise ValueError('Matrix of shape {0} does not fit {1} rows and {2} columns'.format(
                self.X.shape, len(self.y), len(self.columns)))

    @property
    def target(self) -> str:
        return TASK_TARGETS[self.task]

    def __len__(self) -> int:
        return len(self.y)

    def take(self, rows: Sequence[int]) -> 'Dataset':
        rows = np.asarray(rows, dtype=np.intp)
        return replace(self, X=self.X[rows], y=self.y[rows], dropped_columns=list(self.dropped_columns))

    def without_columns(self, names: Iterable[str]) -> 'Dataset':
        names = [name for name in names if name in self.columns]
        kept = [i for i, column in enumerate(self.columns) if column not in names]
        scaler = self.scaler.without(names) if self.scaler is not None else None
        return replace(self, columns=[self.columns[i] for i in kept], X=self.X[:, kept], scaler=scaler,
                       dropped_columns=self.dropped_columns + names)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.X, columns=self.columns)
        frame.insert(0, self.target, self.y)
        return frame


def build_dataset(rows: Sequence[Row], task: str, with_user_features: bool, standardize: bool,
                  user_codes: Optional[Dict[str, int]] = None) -> Dataset:
    """
    Assembles the feature matrix and target vector of a task.
    :param rows: Pairs of job and aggregates, or plain jobs if with_user_features is False.
    :param task: One of 'cpu_regression', 'mem_regression' and 'failure_classification'.
    :param with_user_features: Whether the task's per-user aggregates are part of the features.
    :param standardize: Whether numeric columns are z-scored with statistics of the given rows.
    :param user_codes: Codes of users seen before.
    :return: The dataset. Columns dropped for lack of variance are listed in its dropped_columns.
    """
    columns = dataset_columns(task, with_user_features)
    if with_user_features and len(rows) > 0 and not isinstance(rows[0], tuple):
        raise ValueError('Per-user features need rows joined with aggregates')
    frame = feature_frame(rows, user_codes)
    X = frame[columns].to_numpy(dtype=np.float64)
    y = frame[TASK_TARGETS[task]].to_numpy(dtype=np.float64)
    dataset = Dataset(columns=columns, X=X, y=y, task=task, with_user_features=with_user_features)
    if not standardize:
        return dataset
    scaler = Scaler.fit(X, columns)
    if len(scaler.dropped_columns) > 0:
        logging.info('Dropped columns without variance: {}'.format(', '.join(scaler.dropped_columns)))
    return Dataset(columns=scaler.columns, X=scaler.transform(X), y=y, task=task,
                   with_user_features=with_user_features, scaler=scaler, dropped_columns=scaler.dropped_columns)


def export_dataset(data: Union[Dataset, pd.DataFrame], path: str, delimiter: str = ',') -> None:
    """Writes a dataset or feature table as delimiter-separated text with a header row."""
    frame = data.to_frame() if isinstance(data, Dataset) else data
    frame.to_csv(path, sep=delimiter, index=False)
