"""
Description
===========

This module runs the per-user feature ablation: every configured model is trained on each task twice, once with and
once without the task's per-user aggregates, and evaluated on a held-out part of the jobs. The results form an
:py:class:`EvalReport`, which is rendered as text tables or as comma-separated values. The module also trains the
models that are persisted for predictions on new jobs.
"""

from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple
import csv
import hashlib
import io
import json
import logging
import os
import time

import numpy as np
import scipy.linalg
import yaml
from sklearn.model_selection import train_test_split

from .classify import accuracy, f1
from .errors import ConfigurationError, ExperimentError, JobDataError, SingleClass
from .features import FAILURE_CLASSIFICATION, ROLE_COLUMNS, TASK_AGGREGATES, TASKS, Dataset, Scaler, \
    build_dataset, compute_user_aggregates, join_aggregates
from .ingest import JobRecord
from .model import FittedModel
from .model_store import ModelStore, UserHistory
from .registrations import get_model_accessor
from .regress import r_squared

__author__ = 'HPC Job Prediction Team'

PATH_TO_DEFAULT_EXPERIMENT_FILE = os.path.join(os.path.dirname(__file__), 'default_experiment.yaml')
TEXT = 'text'
CSV = 'csv'
FORMATS = (TEXT, CSV)

#: Labels of the models in rendered tables.
MODEL_LABELS = {'LinearRegression': 'LinearRegression', 'LassoLarsIC': 'LLIC', 'ElasticNetCV': 'ENCV',
                'Ridge': 'Ridge', 'CARTRegression': 'CART', 'LogisticRegression': 'LR', 'CARTClassification': 'CART',
                'GaussianNB': 'GNB', 'RandomForest': 'RF'}

LINEAR = 'linear'
STANDARDIZED = 'standardized'
RAW = 'raw'
#: How the feature matrix is prepared for a model. Models not listed get the raw matrix.
PREPARATIONS = {'LinearRegression': LINEAR, 'LassoLarsIC': LINEAR, 'ElasticNetCV': LINEAR, 'Ridge': LINEAR,
                'LogisticRegression': LINEAR, 'GaussianNB': STANDARDIZED}

R_SQUARED = 'r_squared'
ACCURACY = 'accuracy'
F1 = 'f1'
_CSV_COLUMNS = ('task', 'model', 'per_user_features', R_SQUARED, ACCURACY, F1, 'fit_time_s')
_REPORT_TITLE = 'hpc-job-prediction evaluation report'

logger = logging.getLogger('ComponentProgress')
logger.setLevel(logging.INFO)


@dataclass
class SplitConfig:
    train_fraction: float = 0.8
    stratified: bool = True
    rng_seed: int = 42

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigurationError('train_fraction must lie strictly between 0 and 1')


@dataclass
class ExperimentConfig:
    split: SplitConfig = field(default_factory=SplitConfig)
    tasks: List[str] = field(default_factory=lambda: list(TASKS))
    models: Dict[str, List[str]] = field(default_factory=dict)
    hyperparameters: Dict[str, dict] = field(default_factory=dict)
    store_models: Dict[str, str] = field(default_factory=dict)
    record_fit_time: bool = False

    def __post_init__(self):
        if isinstance(self.split, dict):
            self.split = SplitConfig(**self.split)
        for task in self.tasks:
            if task not in TASKS:
                raise ConfigurationError('Unknown task {0}, expected one of {1}'.format(task, TASKS))
        for task in self.models:
            if task not in TASKS:
                raise ConfigurationError('Models configured for unknown task {}'.format(task))

    def models_of(self, task: str) -> List[str]:
        return list(self.models.get(task, []))

    def hyperparameters_of(self, model_name: str) -> dict:
        return dict(self.hyperparameters.get(model_name) or {})

    def get_as_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form of the configuration."""
        canonical = json.dumps(self.get_as_dict(), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def _merge(config: dict, update: dict) -> dict:
    for key, value in update.items():
        if key not in config:
            raise ConfigurationError('Unknown configuration key {}'.format(key))
        if key in ('split', 'models', 'store_models'):
            config[key].update(value or {})
        elif key == 'hyperparameters':
            for model_name, parameters in (value or {}).items():
                config[key].setdefault(model_name, {})
                config[key][model_name] = dict(config[key][model_name] or {}, **(parameters or {}))
        else:
            config[key] = value
    return config


def load_experiment_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> ExperimentConfig:
    """
    Reads the default experiment configuration and merges a user configuration file and overrides into it. Split
    settings, model lists and store models are merged per key, hyperparameters per model.
    """
    with open(PATH_TO_DEFAULT_EXPERIMENT_FILE, 'r') as stream:
        config = yaml.safe_load(stream)
    if path is not None:
        with open(path, 'r') as stream:
            user_config = yaml.safe_load(stream)
        if user_config is not None:
            if not isinstance(user_config, dict):
                raise ConfigurationError('Experiment configuration {} must be a mapping'.format(path))
            config = _merge(config, user_config)
    if overrides is not None:
        config = _merge(config, overrides)
    try:
        return ExperimentConfig(**config)
    except TypeError as e:
        raise ConfigurationError('Invalid experiment configuration: {}'.format(e))


@dataclass
class EvalRow:
    task: str
    model: str
    per_user_features: bool
    metrics: Dict[str, float]
    fit_time_s: Optional[float] = None

    @property
    def label(self) -> str:
        return MODEL_LABELS.get(self.model, self.model)


@dataclass
class EvalReport:
    rows: List[EvalRow]
    n_rows: int
    rng_seed: int
    config_digest: str
    leakage: bool = True


@dataclass
class Design:
    """The columns a model sees and, for models trained on standardized data, the scaler producing them."""
    columns: List[str]
    scaler: Optional[Scaler] = None
    removed_columns: List[str] = field(default_factory=list)

    def matrix(self, dataset: Dataset) -> np.ndarray:
        input_columns = self.scaler.input_columns if self.scaler is not None else self.columns
        X = dataset.X[:, [dataset.columns.index(column) for column in input_columns]]
        return self.scaler.transform(X) if self.scaler is not None else X


def prepare_design(model_name: str, train: Dataset) -> Design:
    """
    Decides on the columns of a model from its training data. Columns that are constant on the training data are
    removed. Linear models lose the first remaining role indicator and, like naive Bayes, get their numeric columns
    standardized with statistics of the training data.
    """
    constant = [column for j, column in enumerate(train.columns) if np.all(train.X[:, j] == train.X[0, j])]
    columns = [column for column in train.columns if column not in constant]
    removed = list(constant)
    preparation = PREPARATIONS.get(model_name, RAW)
    if preparation == LINEAR:
        roles = [column for column in columns if column in ROLE_COLUMNS]
        if len(roles) > 0:
            columns.remove(roles[0])
            removed.append(roles[0])
    if preparation == RAW:
        return Design(columns, None, removed)
    kept = [train.columns.index(column) for column in columns]
    return Design(columns, Scaler.fit(train.X[:, kept], columns), removed)


def split_rows(y: np.ndarray, task: str, split: SplitConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Splits the row indexes into sorted training and test indexes. Classification splits keep class proportions."""
    stratify = None
    if task == FAILURE_CLASSIFICATION and split.stratified:
        if len(np.unique(y)) < 2:
            raise SingleClass('Cannot evaluate failure classification on jobs of one class')
        stratify = y
    train, test = train_test_split(np.arange(len(y)), train_size=split.train_fraction,
                                   random_state=split.rng_seed % 2 ** 32, shuffle=True, stratify=stratify)
    return np.sort(train), np.sort(test)


def fit_with_design(model_name: str, train: Dataset, hyperparameters: dict) -> FittedModel:
    """Prepares the training data for a model, fits it and attaches the scaler. Records the fit time in seconds."""
    accessor = get_model_accessor(model_name)
    if accessor.is_classifier() != (train.task == FAILURE_CLASSIFICATION):
        raise ConfigurationError('Model {0} cannot be used for {1}'.format(model_name, train.task))
    design = prepare_design(model_name, train)
    X = design.matrix(train)
    start = time.perf_counter()
    model = accessor.fit(X, train.y, design.columns, hyperparameters)
    fit_time_s = time.perf_counter() - start
    model.scaler = design.scaler
    model.metadata['fit_time_s'] = fit_time_s
    model.metadata['removed_columns'] = design.removed_columns
    return model


def _evaluate(model: FittedModel, test: Dataset) -> Dict[str, float]:
    design = Design(list(model.columns), model.scaler)
    predictions = model.predict(design.matrix(test))
    if test.task == FAILURE_CLASSIFICATION:
        return {ACCURACY: accuracy(test.y, predictions), F1: f1(test.y, predictions)}
    return {R_SQUARED: r_squared(test.y, predictions)}


def run_experiment(jobs: Sequence[JobRecord], cfg: ExperimentConfig) -> EvalReport:
    """
    Trains and evaluates every configured model of every configured task with and without per-user aggregates.
    Aggregates are computed over all jobs before the split. Both variants of a task use the same split.
    :return: The report, with rows ordered by task, model as configured and per-user features before none.
    """
    if len(jobs) == 0:
        raise ValueError('Cannot run an experiment without jobs')
    joined = join_aggregates(jobs, compute_user_aggregates(jobs))
    n_cells = 2 * sum(len(cfg.models_of(task)) for task in cfg.tasks)
    rows = []
    for task in cfg.tasks:
        if len(cfg.models_of(task)) == 0:
            continue
        full = build_dataset(joined, task, with_user_features=True, standardize=False)
        variants = {True: full, False: full.without_columns(TASK_AGGREGATES[task])}
        try:
            train_rows, test_rows = split_rows(full.y, task, cfg.split)
        except (JobDataError, ValueError) as e:
            raise ExperimentError(task, 'split', e) from e
        logging.info('{0}: {1} training and {2} test rows'.format(task, len(train_rows), len(test_rows)))
        for model_name in cfg.models_of(task):
            for per_user_features in (True, False):
                data = variants[per_user_features]
                try:
                    model = fit_with_design(model_name, data.take(train_rows), cfg.hyperparameters_of(model_name))
                    metrics = _evaluate(model, data.take(test_rows))
                except (JobDataError, ValueError, scipy.linalg.LinAlgError) as e:
                    raise ExperimentError(task, model_name, e) from e
                fit_time_s = model.fit_time_s if cfg.record_fit_time else None
                rows.append(EvalRow(task, model_name, per_user_features, metrics, fit_time_s))
                logger.info('{}'.format(int((len(rows) / n_cells) * 100)))
    return EvalReport(rows, len(jobs), cfg.split.rng_seed, cfg.digest())


def train_store(jobs: Sequence[JobRecord], store: ModelStore, cfg: ExperimentConfig) -> Dict[str, FittedModel]:
    """
    Trains the store model of each configured task on all jobs, with per-user aggregates, and persists the models
    together with the user history.
    """
    if len(jobs) == 0:
        raise ValueError('Cannot train without jobs')
    history = UserHistory.from_jobs(jobs)
    joined = join_aggregates(jobs, history.user_aggregates)
    models = {}
    for task in cfg.tasks:
        model_name = cfg.store_models.get(task)
        if model_name is None:
            raise ConfigurationError('No store model configured for {}'.format(task))
        data = build_dataset(joined, task, with_user_features=True, standardize=False, user_codes=history.user_codes)
        models[task] = fit_with_design(model_name, data, cfg.hyperparameters_of(model_name))
        store.save_model(task, models[task])
    store.save_history(history)
    return models


def _format_percent(value: float, decimals: int) -> str:
    return '{0:.{1}f}'.format(100.0 * value, decimals)


def _format_time(fit_time_s: Optional[float]) -> str:
    return '{:.3f}'.format(fit_time_s) if fit_time_s is not None else 'n/a'


def _header_lines(report: EvalReport) -> List[str]:
    return ['# {}'.format(_REPORT_TITLE),
            '# config_digest: {}'.format(report.config_digest),
            '# rng_seed: {}'.format(report.rng_seed),
            '# rows: {}'.format(report.n_rows),
            '# leakage: {}'.format(str(report.leakage).lower())]


def _render_text(report: EvalReport) -> str:
    lines = _header_lines(report)
    if len(report.rows) == 0:
        lines.append('Model  Per-User Features  Time (second)')
    tasks = []
    for row in report.rows:
        if row.task not in tasks:
            tasks.append(row.task)
    for task in tasks:
        lines.append('')
        lines.append(task)
        if task == FAILURE_CLASSIFICATION:
            lines.append('Model  Per-User Features  Accuracy (%)  F1 (%)  Time (second)')
        else:
            lines.append('Model  Per-User Features  R squared (%)  Time (second)')
        for row in report.rows:
            if row.task != task:
                continue
            if task == FAILURE_CLASSIFICATION:
                values = [_format_percent(row.metrics[ACCURACY], 2), _format_percent(row.metrics[F1], 0)]
            else:
                values = [_format_percent(row.metrics[R_SQUARED], 2)]
            lines.append('  '.join([row.label, str(row.per_user_features)] + values + [_format_time(row.fit_time_s)]))
    return '\n'.join(lines) + '\n'


def _render_csv(report: EvalReport) -> str:
    output = io.StringIO()
    output.write('\n'.join(_header_lines(report)) + '\n')
    writer = csv.writer(output, lineterminator='\n')
    writer.writerow(_CSV_COLUMNS)
    for row in report.rows:
        metrics = [repr(row.metrics[name]) if name in row.metrics else '' for name in (R_SQUARED, ACCURACY, F1)]
        fit_time = repr(row.fit_time_s) if row.fit_time_s is not None else ''
        writer.writerow([row.task, row.model, row.per_user_features] + metrics + [fit_time])
    return output.getvalue()


def render_report(report: EvalReport, format: str = TEXT) -> str:
    """
    Renders a report as text tables, one per task, with percentages to two decimals (F1 to whole percent) and fit
    times in seconds; or as comma-separated values at full precision.
    """
    if format == TEXT:
        return _render_text(report)
    if format == CSV:
        return _render_csv(report)
    raise ValueError('Unknown report format {0}, expected one of {1}'.format(format, FORMATS))


def parse_report(text: str) -> EvalReport:
    """Reads a report rendered as comma-separated values."""
    header = {}
    body = []
    for line in text.splitlines():
        if line.startswith('#'):
            key, separator, value = line[1:].partition(':')
            if separator:
                header[key.strip()] = value.strip()
        elif line.strip() != '':
            body.append(line)
    if len(body) == 0 or tuple(next(csv.reader([body[0]]))) != _CSV_COLUMNS:
        raise JobDataError('Not a report in comma-separated form')
    rows = []
    for record in csv.DictReader(body):
        metrics = {name: float(record[name]) for name in (R_SQUARED, ACCURACY, F1) if record[name] != ''}
        fit_time_s = float(record['fit_time_s']) if record['fit_time_s'] != '' else None
        rows.append(EvalRow(record['task'], record['model'], record['per_user_features'] == 'True', metrics,
                            fit_time_s))
    try:
        return EvalReport(rows, int(header['rows']), int(header['rng_seed']), header['config_digest'],
                          header.get('leakage', 'true') == 'true')
    except (KeyError, ValueError) as e:
        raise JobDataError('Report header is incomplete: {}'.format(e))
