"""
Description
===========

This module generates synthetic accounting logs. Every user has a latent expertise that depends on the user's role.
Users with little expertise request resources with small and erratic margins over what their jobs need, so their jobs
are more often killed for exceeding a request. Each user's jobs scatter around a user-specific base demand, which
makes the per-user averages informative.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
import logging
import math
import os

import numpy as np
import pandas as pd

from .ingest import ROLES, UNKNOWN_ROLE, RawAccountingRecord, serialize_accounting_record

__author__ = 'HPC Job Prediction Team'

ACCOUNTING_FILE_NAME = 'accounting.log'
ROLES_FILE_NAME = 'roles.txt'
TRUTH_FILE_NAME = 'truth.csv'
MIB = 2 ** 20
KILLED_FAILED_CODE = 100
KILLED_EXIT_STATUS = 137
MEMORY_KILL = 'memory'
TIME_KILL = 'time'
_N_EXTRA_ZEROS = 27


def _default_role_distribution() -> Dict[str, float]:
    return {'Faculty': 0.1, 'Graduate': 0.3, 'PostDoc': 0.1, 'ResearchAss': 0.1, 'Staff': 0.1, 'UnderGra': 0.15,
            UNKNOWN_ROLE: 0.15}


def _default_role_expertise() -> Dict[str, float]:
    return {'Faculty': 0.7, 'Graduate': 0.4, 'PostDoc': 0.6, 'ResearchAss': 0.5, 'Staff': 0.7, 'UnderGra': 0.2,
            UNKNOWN_ROLE: 0.4}


@dataclass
class SynthConfig:
    """
    Parameters of the generator. Request margins are lognormal: the mean of the log margin is
    margin_offset + margin_gain * expertise, its standard deviation moves from margin_sigma_novice to
    margin_sigma_expert as expertise grows.
    """
    n_users: int = 50
    jobs_per_user: Tuple[int, int] = (400, 400)
    role_distribution: Dict[str, float] = field(default_factory=_default_role_distribution)
    role_expertise: Dict[str, float] = field(default_factory=_default_role_expertise)
    expertise_concentration: float = 6.0
    cpu_base_mean_s: float = 3600.0
    cpu_base_sigma: float = 1.0
    mem_base_mean_bytes: float = 2.0 * 2 ** 30
    mem_base_sigma: float = 0.8
    job_cpu_sigma: float = 0.35
    job_mem_sigma: float = 0.35
    utilization: Tuple[float, float] = (0.5, 1.0)
    margin_offset: float = 0.2
    margin_gain: float = 0.8
    margin_sigma_novice: float = 0.6
    margin_sigma_expert: float = 0.1
    fixed_margin: Optional[float] = None
    n_projects: int = 8
    escaped_category_fraction: float = 0.1
    mean_interarrival_s: float = 1800.0
    start_time: int = 1500000000
    rng_seed: int = 42

    def __post_init__(self):
        if self.n_users < 1:
            raise ValueError('n_users must be at least 1')
        self.jobs_per_user = tuple(self.jobs_per_user)
        if not 1 <= self.jobs_per_user[0] <= self.jobs_per_user[1]:
            raise ValueError('jobs_per_user must be a range of positive counts')
        if set(self.role_distribution) - set(ROLES) or set(self.role_expertise) != set(ROLES):
            raise ValueError('Roles must be taken from {}'.format(ROLES))
        probabilities = np.array(list(self.role_distribution.values()), dtype=np.float64)
        if np.any(probabilities < 0) or not math.isclose(float(probabilities.sum()), 1.0, abs_tol=1e-9):
            raise ValueError('Role probabilities must be non-negative and sum to 1')
        if not all(0.0 < value < 1.0 for value in self.role_expertise.values()):
            raise ValueError('Role expertise must lie strictly between 0 and 1')
        scales = (self.expertise_concentration, self.cpu_base_mean_s, self.cpu_base_sigma, self.mem_base_mean_bytes,
                  self.mem_base_sigma, self.job_cpu_sigma, self.job_mem_sigma, self.margin_sigma_novice,
                  self.margin_sigma_expert, self.mean_interarrival_s)
        if not all(scale > 0 for scale in scales):
            raise ValueError('All scales must be positive')
        if not 0.0 < self.utilization[0] <= self.utilization[1] <= 1.0:
            raise ValueError('utilization must be a range within (0, 1]')
        if self.fixed_margin is not None and not self.fixed_margin > 0:
            raise ValueError('fixed_margin must be positive')
        if self.n_projects < 1 or not 0.0 <= self.escaped_category_fraction <= 1.0:
            raise ValueError('Need at least one project and an escaped category fraction within [0, 1]')


@dataclass(frozen=True)
class JobTruth:
    owner: str
    job_number: int
    expertise: float
    cpu_base_s: float
    mem_base_bytes: float
    true_cpu_s: float
    true_runtime_s: float
    true_mem_bytes: float
    req_time_s: float
    req_mem_bytes: float
    failed: int
    kill_reason: str


@dataclass
class Workload:
    accounting_text: str
    roles_text: str
    records: List[RawAccountingRecord]
    truths: List[JobTruth]
    roles: Dict[str, str]


def _lognormal(rng: np.random.Generator, mean: float, sigma: float, size=None):
    # parameterized by its mean rather than its median
    return mean * np.exp(rng.normal(-0.5 * sigma * sigma, sigma, size=size))


def _margins(rng: np.random.Generator, cfg: SynthConfig, expertise: float, size: int) -> np.ndarray:
    if cfg.fixed_margin is not None:
        return np.full(size, cfg.fixed_margin)
    location = cfg.margin_offset + cfg.margin_gain * expertise
    scale = cfg.margin_sigma_novice * (1.0 - expertise) + cfg.margin_sigma_expert * expertise
    return np.exp(rng.normal(location, scale, size=size))


def _category(req_time_s: int, req_mem_mib: int, tagged: bool) -> str:
    category = '-l h_rt={0},h_vmem={1}M'.format(req_time_s, req_mem_mib)
    if tagged:
        category += ' -ac stage=pre:post'
    return category


def _user_jobs(user_index: int, rng: np.random.Generator, cfg: SynthConfig, roles: List[str],
               first_job_number: int) -> Tuple[str, List[RawAccountingRecord], List[JobTruth]]:
    owner = 'user{:03d}'.format(user_index)
    role_probabilities = [cfg.role_distribution.get(role, 0.0) for role in roles]
    role = roles[int(rng.choice(len(roles), p=role_probabilities))]
    mean_expertise = cfg.role_expertise[role]
    expertise = float(rng.beta(cfg.expertise_concentration * mean_expertise,
                               cfg.expertise_concentration * (1.0 - mean_expertise)))
    cpu_base = float(_lognormal(rng, cfg.cpu_base_mean_s, cfg.cpu_base_sigma))
    mem_base = float(_lognormal(rng, cfg.mem_base_mean_bytes, cfg.mem_base_sigma))
    n_jobs = int(rng.integers(cfg.jobs_per_user[0], cfg.jobs_per_user[1] + 1))
    projects = rng.choice(cfg.n_projects, size=min(2, cfg.n_projects), replace=False)

    true_cpu = _lognormal(rng, cpu_base, cfg.job_cpu_sigma, n_jobs)
    true_mem = _lognormal(rng, mem_base, cfg.job_mem_sigma, n_jobs)
    utilization = rng.uniform(cfg.utilization[0], cfg.utilization[1], size=n_jobs)
    true_runtime = true_cpu / utilization
    req_time = np.maximum(np.ceil(true_runtime * _margins(rng, cfg, expertise, n_jobs)), 1.0)
    req_mem_mib = np.maximum(np.ceil(true_mem * _margins(rng, cfg, expertise, n_jobs) / MIB), 1.0)
    job_projects = projects[rng.integers(0, len(projects), size=n_jobs)]
    tagged = rng.random(n_jobs) < cfg.escaped_category_fraction
    submission_times = cfg.start_time + int(rng.integers(0, 86400)) + \
        np.cumsum(np.ceil(rng.exponential(cfg.mean_interarrival_s, size=n_jobs))).astype(np.int64)
    waits = rng.integers(0, 600, size=n_jobs)

    records, truths = [], []
    for j in range(n_jobs):
        req_mem_bytes = req_mem_mib[j] * MIB
        memory_over = true_mem[j] > req_mem_bytes
        time_over = true_runtime[j] > req_time[j]
        runtime = true_runtime[j]
        kill_reason = ''
        if memory_over or time_over:
            # memory grows linearly to its peak over the run
            memory_kill = true_runtime[j] * req_mem_bytes / true_mem[j] if memory_over else np.inf
            time_kill = req_time[j] if time_over else np.inf
            runtime = min(memory_kill, time_kill)
            kill_reason = MEMORY_KILL if memory_kill <= time_kill else TIME_KILL
        failed = int(memory_over or time_over)
        wallclock = round(float(runtime), 3)
        cpu = round(float(runtime * utilization[j]), 3)
        maxvmem = float(math.floor(min(true_mem[j] * runtime / true_runtime[j], req_mem_bytes)))
        start_time = int(submission_times[j] + waits[j])
        job_number = first_job_number + j
        records.append(RawAccountingRecord(
            qname='batch.q', owner=owner, job_number=job_number, submission_time=int(submission_times[j]),
            start_time=start_time, end_time=start_time + int(math.ceil(wallclock)),
            failed_code=KILLED_FAILED_CODE if failed else 0, exit_status=KILLED_EXIT_STATUS if failed else 0,
            wallclock_s=wallclock, cpu_s=cpu, maxvmem_bytes=maxvmem,
            category=_category(int(req_time[j]), int(req_mem_mib[j]), bool(tagged[j])),
            project='project{:02d}'.format(int(job_projects[j])),
            extra=('node{:03d}'.format(int(rng.integers(0, 64))), 'users', 'job{}'.format(job_number), 'sge',
                   '0') + ('0',) * _N_EXTRA_ZEROS))
        truths.append(JobTruth(owner=owner, job_number=job_number, expertise=expertise, cpu_base_s=cpu_base,
                               mem_base_bytes=mem_base,
                               true_cpu_s=float(true_cpu[j]), true_runtime_s=float(true_runtime[j]),
                               true_mem_bytes=float(true_mem[j]), req_time_s=float(req_time[j]),
                               req_mem_bytes=float(req_mem_bytes), failed=failed, kill_reason=kill_reason))
    return role, records, truths


def generate_workload(cfg: SynthConfig) -> Workload:
    """
    Generates the jobs of all users, ordered by user and, per user, by submission. Each user draws from its own
    random stream derived from the configured seed.
    :return: The accounting file text, the roles file text (which leaves out users of unknown role), the records
    and the ground truth of each job.
    """
    roles = list(ROLES)
    streams = np.random.SeedSequence(cfg.rng_seed).spawn(cfg.n_users)
    records, truths, user_roles = [], [], {}
    for user_index, stream in enumerate(streams):
        role, user_records, user_truths = _user_jobs(user_index, np.random.default_rng(stream), cfg, roles,
                                                     1000 + len(records))
        user_roles[user_records[0].owner] = role
        records.extend(user_records)
        truths.extend(user_truths)
    failures = sum(truth.failed for truth in truths)
    logging.info('Generated {0} jobs of {1} users, {2} failed'.format(len(records), cfg.n_users, failures))
    accounting_lines = ['# synthetic accounting (seed {})'.format(cfg.rng_seed)]
    accounting_lines.extend(serialize_accounting_record(record) for record in records)
    roles_lines = ['{0},{1}'.format(user, role) for user, role in user_roles.items() if role != UNKNOWN_ROLE]
    return Workload(accounting_text='\n'.join(accounting_lines) + '\n', roles_text='\n'.join(roles_lines) + '\n',
                    records=records, truths=truths, roles=user_roles)


def write_workload(workload: Workload, directory: str):
    """Writes the accounting file, the roles file and the ground truth into a directory."""
    if not os.path.exists(directory):
        os.makedirs(directory)
    with open(os.path.join(directory, ACCOUNTING_FILE_NAME), 'w') as accounting_file:
        accounting_file.write(workload.accounting_text)
    with open(os.path.join(directory, ROLES_FILE_NAME), 'w') as roles_file:
        roles_file.write(workload.roles_text)
    pd.DataFrame([truth.__dict__ for truth in workload.truths]).to_csv(os.path.join(directory, TRUTH_FILE_NAME),
                                                                       index=False)
