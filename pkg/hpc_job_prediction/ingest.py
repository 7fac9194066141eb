"""
Description
===========

This module contains the functionality to read Grid Engine accounting logs. Lines are parsed into
:py:class:`RawAccountingRecord` objects, which are then cleaned, filtered by user activity and sampled into
:py:class:`JobRecord` objects that carry the user's role from a separate roles file.
"""

from collections import Counter
from dataclasses import asdict, dataclass, field, fields
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union
import logging
import math
import re

import numpy as np
import pandas as pd

from .errors import EmptyResult, MalformedLine, MissingRequest, NumericParse

__author__ = 'HPC Job Prediction Team'

NUM_FIELDS = 45
COMMENT_PREFIX = '#'
UNKNOWN_ROLE = 'Unknowing'
ROLES = ('Faculty', 'Graduate', 'PostDoc', 'ResearchAss', 'Staff', 'UnderGra', UNKNOWN_ROLE)
ANY_NONZERO = 'any_nonzero'
RESOURCE_KILL = 'resource_kill'
LABEL_RULES = (ANY_NONZERO, RESOURCE_KILL)
# qmaster enforced a limit / job killed by a signal
RESOURCE_KILL_FAILED_CODES = (37, 100)
# SIGKILL (hard limits) and SIGXCPU
RESOURCE_KILL_EXIT_STATUSES = (137, 152)

# 0-based positions of the fields read from the accounting layout
_QNAME = 0
_OWNER = 3
_JOB_NUMBER = 5
_SUBMISSION_TIME = 8
_START_TIME = 9
_END_TIME = 10
_FAILED = 11
_EXIT_STATUS = 12
_WALLCLOCK = 13
_PROJECT = 31
_CPU = 36
_CATEGORY = 39
_MAXVMEM = 42
_PINNED = (_QNAME, _OWNER, _JOB_NUMBER, _SUBMISSION_TIME, _START_TIME, _END_TIME, _FAILED, _EXIT_STATUS,
           _WALLCLOCK, _PROJECT, _CPU, _CATEGORY, _MAXVMEM)
_EXTRA_POSITIONS = tuple(i for i in range(NUM_FIELDS) if i not in _PINNED)

_FIELD = re.compile(r'(?:[^:\\]|\\.|\\$)*')
_ESCAPED = re.compile(r'\\([\\:])')
_RUNTIME_REQUEST = re.compile(r'(?<![\w])h_rt=([^,\s]+)')
_MEMORY_REQUEST = re.compile(r'(?<![\w])h_vmem=([^,\s]+)')
_SIZE = re.compile(r'^(\d+(?:\.\d*)?|\.\d+)([kmgt]?)$', re.IGNORECASE)
_SIZE_FACTORS = {'': 1, 'k': 2 ** 10, 'm': 2 ** 20, 'g': 2 ** 30, 't': 2 ** 40}


@dataclass(frozen=True)
class RawAccountingRecord:
    """One line of an accounting file. Fields that are not interpreted are kept, in order, in ``extra``."""
    qname: str
    owner: str
    job_number: int
    submission_time: int
    start_time: int
    end_time: int
    failed_code: int
    exit_status: int
    wallclock_s: float
    cpu_s: float
    maxvmem_bytes: float
    category: str
    project: str
    extra: Tuple[str, ...] = field(default=('',) * len(_EXTRA_POSITIONS))


@dataclass(frozen=True)
class JobRecord:
    """A cleaned job: who ran it, what was requested, what was used and whether it failed."""
    owner: str
    role: str
    failed: int
    cpu_s: float
    maxvmem_bytes: float
    req_time_s: float
    req_mem_bytes: float
    project_id: int
    submission_time: int
    project: str = ''


@dataclass
class IngestConfig:
    window_start: int = 0
    window_end: int = 2 ** 63 - 1
    min_jobs_per_user: int = 200
    sample_size: Union[int, str] = 1000000
    rng_seed: int = 42
    label_rule: str = ANY_NONZERO

    def __post_init__(self):
        if self.window_start >= self.window_end:
            raise ValueError('window_start must lie before window_end')
        if self.min_jobs_per_user < 1:
            raise ValueError('min_jobs_per_user must be at least 1')
        if self.sample_size != 'all' and (not isinstance(self.sample_size, int) or self.sample_size < 1):
            raise ValueError('sample_size must be a positive integer or \'all\'')
        if self.label_rule not in LABEL_RULES:
            raise ValueError('Unknown label rule {0}, expected one of {1}'.format(self.label_rule, LABEL_RULES))

    @classmethod
    def for_recent_years(cls, reference_time: int, years: int = 3, **kwargs) -> 'IngestConfig':
        """Creates a configuration whose window covers the given number of years up to the reference time."""
        return cls(window_start=int(reference_time - years * 365.25 * 86400), window_end=int(reference_time),
                   **kwargs)


def _to_int(token: str, line_number: Optional[int], field_index: int) -> int:
    try:
        return int(token)
    except ValueError:
        pass
    try:
        value = float(token)
    except ValueError:
        raise NumericParse(line_number, field_index, token)
    if not value.is_integer():
        raise NumericParse(line_number, field_index, token)
    return int(value)


def _to_float(token: str, line_number: Optional[int], field_index: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise NumericParse(line_number, field_index, token)
    if math.isnan(value):
        raise NumericParse(line_number, field_index, token)
    return value


def _split_fields(line: str) -> List[str]:
    # backslash escapes the next character, so only unescaped colons separate fields
    tokens = []
    position = 0
    while True:
        match = _FIELD.match(line, position)
        tokens.append(match.group(0))
        position = match.end() + 1
        if position > len(line):
            return tokens


def parse_accounting_line(line: str, line_number: Optional[int] = None) -> Optional[RawAccountingRecord]:
    """
    Parses a single line of an accounting file.
    :param line: The line, with or without trailing newline.
    :param line_number: The 1-based number of the line within its file, used in error messages.
    :return: The record, or None for comment and blank lines.
    """
    line = line.rstrip('\r\n')
    if line.strip() == '' or line.lstrip().startswith(COMMENT_PREFIX):
        return None
    tokens = _split_fields(line)
    if len(tokens) != NUM_FIELDS:
        raise MalformedLine(line_number, min(len(tokens), NUM_FIELDS) + 1, 'expected {} fields'.format(NUM_FIELDS))
    return RawAccountingRecord(
        qname=tokens[_QNAME],
        owner=tokens[_OWNER],
        job_number=_to_int(tokens[_JOB_NUMBER], line_number, _JOB_NUMBER + 1),
        submission_time=_to_int(tokens[_SUBMISSION_TIME], line_number, _SUBMISSION_TIME + 1),
        start_time=_to_int(tokens[_START_TIME], line_number, _START_TIME + 1),
        end_time=_to_int(tokens[_END_TIME], line_number, _END_TIME + 1),
        failed_code=_to_int(tokens[_FAILED], line_number, _FAILED + 1),
        exit_status=_to_int(tokens[_EXIT_STATUS], line_number, _EXIT_STATUS + 1),
        wallclock_s=_to_float(tokens[_WALLCLOCK], line_number, _WALLCLOCK + 1),
        cpu_s=_to_float(tokens[_CPU], line_number, _CPU + 1),
        maxvmem_bytes=_to_float(tokens[_MAXVMEM], line_number, _MAXVMEM + 1),
        category=_ESCAPED.sub(r'\1', tokens[_CATEGORY]),
        project=tokens[_PROJECT],
        extra=tuple(tokens[i] for i in _EXTRA_POSITIONS))


def serialize_accounting_record(record: RawAccountingRecord) -> str:
    """Writes a record as one accounting line (without newline). Inverse of :py:func:`parse_accounting_line`."""
    if len(record.extra) != len(_EXTRA_POSITIONS):
        raise ValueError('Record must carry {} extra fields'.format(len(_EXTRA_POSITIONS)))
    tokens = [''] * NUM_FIELDS
    for position, value in zip(_EXTRA_POSITIONS, record.extra):
        tokens[position] = value
    tokens[_QNAME] = record.qname
    tokens[_OWNER] = record.owner
    tokens[_JOB_NUMBER] = str(record.job_number)
    tokens[_SUBMISSION_TIME] = str(record.submission_time)
    tokens[_START_TIME] = str(record.start_time)
    tokens[_END_TIME] = str(record.end_time)
    tokens[_FAILED] = str(record.failed_code)
    tokens[_EXIT_STATUS] = str(record.exit_status)
    tokens[_WALLCLOCK] = repr(float(record.wallclock_s))
    tokens[_PROJECT] = record.project
    tokens[_CPU] = repr(float(record.cpu_s))
    tokens[_CATEGORY] = record.category.replace('\\', '\\\\').replace(':', '\\:')
    tokens[_MAXVMEM] = repr(float(record.maxvmem_bytes))
    return ':'.join(tokens)


def read_accounting(lines: Iterable[str], skip_malformed: bool = True) -> Tuple[List[RawAccountingRecord], int]:
    """
    Parses all lines of an accounting file.
    :param lines: The lines of the file.
    :param skip_malformed: If True, lines that cannot be parsed are logged and counted, otherwise the error is raised.
    :return: The parsed records in file order and the number of skipped lines.
    """
    records = []
    skipped = 0
    for line_number, line in enumerate(lines, start=1):
        try:
            record = parse_accounting_line(line, line_number)
        except (MalformedLine, NumericParse) as e:
            if not skip_malformed:
                raise
            logging.warning('Skipping line: {}'.format(e))
            skipped += 1
            continue
        if record is not None:
            records.append(record)
    logging.info('Read {0} accounting records, skipped {1} lines'.format(len(records), skipped))
    return records, skipped


def read_roles(lines: Iterable[str]) -> Dict[str, str]:
    """
    Reads a roles file consisting of 'user,role' lines. Roles that are not known are mapped to 'Unknowing'.
    """
    known_roles = {role.lower(): role for role in ROLES}
    roles = {}
    for line in lines:
        line = line.strip()
        if line == '' or line.startswith(COMMENT_PREFIX):
            continue
        user, _, role = line.partition(',')
        roles[user.strip()] = known_roles.get(role.strip().lower(), UNKNOWN_ROLE)
    return roles


def _parse_size(value: str) -> float:
    match = _SIZE.match(value)
    if match is None:
        raise MissingRequest('Cannot read memory request \'{}\''.format(value))
    return float(match.group(1)) * _SIZE_FACTORS[match.group(2).lower()]


def _parse_duration(value: str) -> float:
    parts = value.split(':')
    if len(parts) > 3:
        raise MissingRequest('Cannot read runtime request \'{}\''.format(value))
    seconds = 0.0
    try:
        for part in parts:
            seconds = seconds * 60 + float(part if part != '' else 0)
    except ValueError:
        raise MissingRequest('Cannot read runtime request \'{}\''.format(value))
    return seconds


def parse_resource_request(category: str) -> Tuple[float, float]:
    """
    Extracts the requested runtime and memory from a job category string.
    :param category: The raw category, e.g. '-l h_rt=3600,h_vmem=4G'.
    :return: A tuple of requested seconds and requested bytes. Size suffixes K, M, G and T are binary multiples.
    """
    runtime_match = _RUNTIME_REQUEST.search(category)
    memory_match = _MEMORY_REQUEST.search(category)
    if runtime_match is None or memory_match is None:
        raise MissingRequest('Category \'{}\' lacks h_rt or h_vmem'.format(category))
    req_time_s = _parse_duration(runtime_match.group(1))
    req_mem_bytes = _parse_size(memory_match.group(1))
    if req_time_s <= 0 or req_mem_bytes <= 0:
        raise MissingRequest('Category \'{}\' requests no resources'.format(category))
    return req_time_s, req_mem_bytes


def failed_label(record: RawAccountingRecord, label_rule: str = ANY_NONZERO) -> int:
    if label_rule == RESOURCE_KILL:
        return int(record.failed_code in RESOURCE_KILL_FAILED_CODES or
                   record.exit_status in RESOURCE_KILL_EXIT_STATUSES)
    return int(record.failed_code != 0 or record.exit_status != 0)


def _drop_reason(record: RawAccountingRecord, cfg: IngestConfig) -> Optional[str]:
    if not cfg.window_start <= record.submission_time < cfg.window_end:
        return 'outside window'
    if record.start_time == 0:
        return 'never started'
    if record.end_time < record.start_time:
        return 'ends before start'
    if record.cpu_s < 0 or record.maxvmem_bytes < 0 or record.wallclock_s < 0:
        return 'negative usage'
    return None


def _sample(candidates: list, cfg: IngestConfig) -> list:
    if cfg.sample_size == 'all' or cfg.sample_size >= len(candidates):
        return candidates
    rng = np.random.default_rng(cfg.rng_seed)
    chosen = np.sort(rng.choice(len(candidates), size=cfg.sample_size, replace=False))
    return [candidates[i] for i in chosen]


def clean_filter_sample(records: Sequence[RawAccountingRecord], roles: Dict[str, str],
                        cfg: IngestConfig) -> List[JobRecord]:
    """
    Turns raw accounting records into job records: drops records outside the time window, records of jobs that never
    started or lack resource requests, and all records of users with too few jobs; then draws a uniform sample without
    replacement. Sampled records keep their input order.
    """
    drop_counts = Counter()
    candidates = []
    for record in records:
        reason = _drop_reason(record, cfg)
        if reason is None:
            try:
                req_time_s, req_mem_bytes = parse_resource_request(record.category)
            except MissingRequest:
                reason = 'missing request'
        if reason is not None:
            drop_counts[reason] += 1
            continue
        candidates.append((record, req_time_s, req_mem_bytes))
    jobs_per_user = Counter(record.owner for record, _, _ in candidates)
    active = [candidate for candidate in candidates if jobs_per_user[candidate[0].owner] >= cfg.min_jobs_per_user]
    drop_counts['infrequent user'] = len(candidates) - len(active)
    for reason, count in sorted(drop_counts.items()):
        logging.info('Dropped {0} records: {1}'.format(count, reason))
    if len(active) == 0:
        raise EmptyResult('No accounting record survived cleaning and filtering')
    sampled = _sample(active, cfg)
    logging.info('Selected {0} of {1} records (seed {2})'.format(len(sampled), len(active), cfg.rng_seed))
    project_ids = {}
    jobs = []
    for record, req_time_s, req_mem_bytes in sampled:
        project_id = project_ids.setdefault(record.project, len(project_ids))
        jobs.append(JobRecord(owner=record.owner,
                              role=roles.get(record.owner, UNKNOWN_ROLE),
                              failed=failed_label(record, cfg.label_rule),
                              cpu_s=record.cpu_s,
                              maxvmem_bytes=record.maxvmem_bytes,
                              req_time_s=req_time_s,
                              req_mem_bytes=req_mem_bytes,
                              project_id=project_id,
                              submission_time=record.submission_time,
                              project=record.project))
    return jobs


def jobs_to_frame(jobs: Sequence[JobRecord]) -> pd.DataFrame:
    columns = [f.name for f in fields(JobRecord)]
    return pd.DataFrame([asdict(job) for job in jobs], columns=columns)


def write_jobs(jobs: Sequence[JobRecord], path: str) -> None:
    jobs_to_frame(jobs).to_csv(path, index=False)


def read_jobs(path: str) -> List[JobRecord]:
    frame = pd.read_csv(path, dtype={'owner': str, 'role': str, 'project': str}, float_precision='round_trip',
                        keep_default_na=False)
    jobs = []
    for row in frame.itertuples(index=False):
        jobs.append(JobRecord(owner=row.owner, role=row.role, failed=int(row.failed), cpu_s=float(row.cpu_s),
                              maxvmem_bytes=float(row.maxvmem_bytes), req_time_s=float(row.req_time_s),
                              req_mem_bytes=float(row.req_mem_bytes), project_id=int(row.project_id),
                              submission_time=int(row.submission_time), project=row.project))
    return jobs
