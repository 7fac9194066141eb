from hpc_job_prediction.ingest import UNKNOWN_ROLE, parse_accounting_line, parse_resource_request, read_accounting, \
    read_roles, serialize_accounting_record
from hpc_job_prediction.synth import ACCOUNTING_FILE_NAME, MEMORY_KILL, ROLES_FILE_NAME, TIME_KILL, \
    TRUTH_FILE_NAME, SynthConfig, generate_workload, write_workload

import os

import numpy as np
import pandas as pd
import pytest


__author__ = 'HPC Job Prediction Team'


def _small_config(**kwargs):
    return SynthConfig(n_users=12, jobs_per_user=(20, 30), **kwargs)


def test_generate_workload_is_deterministic():
    first = generate_workload(_small_config(rng_seed=7))
    second = generate_workload(_small_config(rng_seed=7))
    assert first.accounting_text == second.accounting_text
    assert first.roles_text == second.roles_text
    assert first.accounting_text != generate_workload(_small_config(rng_seed=8)).accounting_text


def test_generate_workload_job_counts():
    workload = generate_workload(_small_config())
    assert len(workload.records) == len(workload.truths)
    assert 12 == len(workload.roles)
    for owner in workload.roles:
        count = sum(1 for record in workload.records if record.owner == owner)
        assert 20 <= count <= 30
    assert list(range(1000, 1000 + len(workload.records))) == [record.job_number for record in workload.records]


def test_generate_workload_parses_back():
    workload = generate_workload(_small_config())
    records, skipped = read_accounting(workload.accounting_text.splitlines(), skip_malformed=False)
    assert 0 == skipped
    assert workload.records == records


def test_ten_thousand_records_round_trip():
    workload = generate_workload(SynthConfig(n_users=25, jobs_per_user=(400, 400), rng_seed=11))
    assert 10000 == len(workload.records)
    assert any(':' in record.category for record in workload.records)
    for record in workload.records:
        assert record == parse_accounting_line(serialize_accounting_record(record))


def test_roles_file_leaves_out_unknown_roles():
    workload = generate_workload(SynthConfig(n_users=40, jobs_per_user=(1, 1)))
    roles = read_roles(workload.roles_text.splitlines())
    assert {user: role for user, role in workload.roles.items() if role != UNKNOWN_ROLE} == roles
    assert UNKNOWN_ROLE not in roles.values()


def test_failures_follow_requests():
    workload = generate_workload(_small_config())
    for record, truth in zip(workload.records, workload.truths):
        assert record.job_number == truth.job_number
        over = truth.true_mem_bytes > truth.req_mem_bytes or truth.true_runtime_s > truth.req_time_s
        assert int(over) == truth.failed
        assert (record.failed_code != 0) == bool(truth.failed)
        req_time_s, req_mem_bytes = parse_resource_request(record.category)
        assert truth.req_time_s == req_time_s
        assert truth.req_mem_bytes == req_mem_bytes
        assert record.maxvmem_bytes <= req_mem_bytes
        if truth.failed:
            assert truth.kill_reason in (MEMORY_KILL, TIME_KILL)
            assert record.wallclock_s <= req_time_s + 1e-3
        else:
            assert '' == truth.kill_reason
            assert pytest.approx(truth.true_runtime_s, abs=1e-3) == record.wallclock_s
        assert record.cpu_s <= record.wallclock_s + 1e-3


def test_generous_margins_never_fail():
    workload = generate_workload(_small_config(fixed_margin=100.0))
    assert 0 == sum(truth.failed for truth in workload.truths)


def test_tight_margins_fail():
    workload = generate_workload(_small_config(fixed_margin=0.9))
    assert sum(truth.failed for truth in workload.truths) > len(workload.truths) / 2


def test_novices_fail_more_often():
    workload = generate_workload(SynthConfig())
    frame = pd.DataFrame([truth.__dict__ for truth in workload.truths])
    per_user = frame.groupby('owner').agg(expertise=('expertise', 'first'), failure_rate=('failed', 'mean'))
    assert np.corrcoef(per_user['expertise'], per_user['failure_rate'])[0, 1] < -0.5


def test_user_base_demand_drives_usage():
    workload = generate_workload(SynthConfig())
    frame = pd.DataFrame([truth.__dict__ for truth in workload.truths])
    frame['cpu'] = [record.cpu_s for record in workload.records]
    frame['maxvmem'] = [record.maxvmem_bytes for record in workload.records]
    per_user = frame.groupby('owner').agg(cpu_base=('cpu_base_s', 'first'), cpu=('cpu', 'mean'),
                                          mem_base=('mem_base_bytes', 'first'), maxvmem=('maxvmem', 'mean'))
    assert np.corrcoef(per_user['cpu_base'], per_user['cpu'])[0, 1] > 0.9
    assert np.corrcoef(per_user['mem_base'], per_user['maxvmem'])[0, 1] > 0.9


def test_escaped_categories():
    workload = generate_workload(_small_config(escaped_category_fraction=1.0))
    assert all(':' in record.category for record in workload.records)
    assert all('\\:' in line for line in workload.accounting_text.splitlines()[1:])
    workload = generate_workload(_small_config(escaped_category_fraction=0.0))
    assert not any(':' in record.category for record in workload.records)


def test_write_workload(tmp_path):
    workload = generate_workload(_small_config())
    directory = str(tmp_path / 'workload')
    write_workload(workload, directory)
    with open(os.path.join(directory, ACCOUNTING_FILE_NAME)) as accounting_file:
        assert workload.accounting_text == accounting_file.read()
    with open(os.path.join(directory, ROLES_FILE_NAME)) as roles_file:
        assert workload.roles_text == roles_file.read()
    truth = pd.read_csv(os.path.join(directory, TRUTH_FILE_NAME))
    assert len(workload.truths) == len(truth)
    assert [truth.failed for truth in workload.truths] == truth['failed'].tolist()


def test_synth_config_validation():
    with pytest.raises(ValueError):
        SynthConfig(n_users=0)
    with pytest.raises(ValueError):
        SynthConfig(jobs_per_user=(10, 5))
    with pytest.raises(ValueError):
        SynthConfig(role_distribution={'Faculty': 0.5, 'Staff': 0.4})
    with pytest.raises(ValueError):
        SynthConfig(role_distribution={'Astronaut': 1.0})
    with pytest.raises(ValueError):
        SynthConfig(fixed_margin=0.0)
    with pytest.raises(ValueError):
        SynthConfig(utilization=(0.0, 1.0))
    with pytest.raises(ValueError):
        SynthConfig(cpu_base_sigma=-1.0)
