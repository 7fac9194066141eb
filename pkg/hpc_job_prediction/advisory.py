"""
Description
===========

This module gives feedback on jobs before they run. From the models and the user history in a model store it
estimates the CPU time and memory a submission will use and the probability that it fails, and flags submissions
that request less than the estimated need. Users without history are served from the averages of their role.
"""

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple
import logging

import numpy as np

from .errors import MissingRequest
from .features import CPU_REGRESSION, FAILURE_CLASSIFICATION, MEM_REGRESSION, feature_frame
from .ingest import UNKNOWN_ROLE, JobRecord, RawAccountingRecord, parse_resource_request
from .model import Classifier, FittedModel
from .model_store import ModelStore, UserHistory


__author__ = 'HPC Job Prediction Team'


@dataclass(frozen=True)
class Advisory:
    owner: str
    est_cpu_s: float
    est_mem_bytes: float
    failure_probability: float
    under_request: bool
    cold_start: bool

    def as_lines(self) -> List[str]:
        return ['owner={}'.format(self.owner),
                'est_cpu_s={!r}'.format(self.est_cpu_s),
                'est_mem_bytes={!r}'.format(self.est_mem_bytes),
                'failure_probability={!r}'.format(self.failure_probability),
                'under_request={}'.format(str(self.under_request).lower()),
                'cold_start={}'.format(str(self.cold_start).lower())]


def _submission(owner: str, role: str, req_time_s: float, req_mem_bytes: float, project: str,
                history: UserHistory) -> JobRecord:
    # usage is unknown before the job runs
    return JobRecord(owner=owner, role=role, failed=0, cpu_s=0.0, maxvmem_bytes=0.0, req_time_s=float(req_time_s),
                     req_mem_bytes=float(req_mem_bytes), project_id=history.project_code(project), submission_time=0,
                     project=project)


def predict_for_submission(store: ModelStore, owner: str, req_time_s: float, req_mem_bytes: float,
                           role: str = UNKNOWN_ROLE, project: str = '') -> Advisory:
    """
    Estimates the usage and the failure probability of a job about to be submitted.
    :param store: A store holding models for the CPU, memory and failure tasks and the user history.
    :param owner: The submitting user. Users unknown to the store are served from the averages of the given role.
    :param req_time_s: The requested run time in seconds.
    :param req_mem_bytes: The requested memory in bytes.
    :return: The advisory. The failure probability is returned as is; deciding on a threshold is left to the caller.
    """
    if req_time_s <= 0 or req_mem_bytes <= 0:
        raise ValueError('Requested time and memory must be positive')
    cpu_model = store.load_model(CPU_REGRESSION)
    mem_model = store.load_model(MEM_REGRESSION)
    failure_model = store.load_model(FAILURE_CLASSIFICATION)
    history = store.load_history()
    aggregate, cold_start = history.lookup(owner, role)
    if cold_start:
        logging.info('No history for user {0}, using averages of role {1}'.format(owner, role))
    job = _submission(owner, role, req_time_s, req_mem_bytes, project, history)
    frame = feature_frame([(job, aggregate)], user_codes=history.user_codes)
    est_cpu_s = float(cpu_model.predict_frame(frame)[0])
    est_mem_bytes = float(mem_model.predict_frame(frame)[0])
    if isinstance(failure_model, Classifier):
        failure_probability = float(failure_model.predict_proba_frame(frame)[0])
    else:
        failure_probability = float(failure_model.predict_frame(frame)[0])
    under_request = req_mem_bytes < est_mem_bytes or req_time_s < est_cpu_s
    return Advisory(owner, est_cpu_s, est_mem_bytes, failure_probability, under_request, cold_start)


def predict_records(model: FittedModel, history: UserHistory, records: Sequence[RawAccountingRecord],
                    roles: Dict[str, str]) -> List[Tuple[int, float]]:
    """
    Applies a persisted model to raw accounting records, using the user history of its store for the per-user
    aggregates. Records without a usable resource request are predicted as NaN.
    :return: One pair of job number and prediction per record, in record order.
    """
    rows, positions = [], []
    for i, record in enumerate(records):
        try:
            req_time_s, req_mem_bytes = parse_resource_request(record.category)
        except MissingRequest:
            logging.warning('Job {} has no usable resource request'.format(record.job_number))
            continue
        role = roles.get(record.owner, UNKNOWN_ROLE)
        aggregate, _ = history.lookup(record.owner, role)
        job = _submission(record.owner, role, req_time_s, req_mem_bytes, record.project, history)
        rows.append((job, aggregate))
        positions.append(i)
    predictions = np.full(len(records), np.nan)
    if len(rows) > 0:
        predictions[positions] = model.predict_frame(feature_frame(rows, user_codes=history.user_codes))
    return [(record.job_number, float(prediction)) for record, prediction in zip(records, predictions)]
