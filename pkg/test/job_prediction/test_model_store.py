from hpc_job_prediction.errors import MissingModel
from hpc_job_prediction.features import CPU_REGRESSION
from hpc_job_prediction.ingest import JobRecord
from hpc_job_prediction.model_store import HISTORY_FILE_NAME, ModelStore, UserHistory, load_model_file, \
    store_of_model_file
from hpc_job_prediction.registrations import MODEL_REGISTRY, create_model_from_dict, get_model_accessor
from hpc_job_prediction.regress import RidgeModel

import json
import os

import numpy as np
import pytest


__author__ = 'HPC Job Prediction Team'


def _job(owner, role, cpu_s, project='projA', project_id=0):
    return JobRecord(owner=owner, role=role, failed=0, cpu_s=cpu_s, maxvmem_bytes=2.0 * cpu_s, req_time_s=60.0,
                     req_mem_bytes=1000.0, project_id=project_id, submission_time=0, project=project)


def _jobs():
    return [_job('alice', 'Staff', 10.0), _job('bob', 'Graduate', 2.0, 'projB', 1), _job('alice', 'Staff', 30.0),
            _job('carol', 'Graduate', 6.0)]


def test_get_model_accessor():
    assert 'Ridge' == get_model_accessor('Ridge').name()
    assert get_model_accessor('RandomForest').is_classifier()
    assert not get_model_accessor('LassoLarsIC').is_classifier()
    assert 9 <= len(MODEL_REGISTRY)


def test_get_model_accessor_of_unknown_model():
    with pytest.raises(UserWarning, match='Could not find model of type SupportVectorMachine'):
        get_model_accessor('SupportVectorMachine')


def test_create_model_from_dict():
    model = create_model_from_dict({'type': 'Ridge', 'parameters': {
        'columns': ['reqTime'], 'hyperparameters': {'alpha': 0.5}, 'metadata': {}, 'scaler': None,
        'state': {'intercept': 1.0, 'coefficients': [2.0]}}})
    assert 'Ridge' == model.name()
    np.testing.assert_array_equal(np.array([7.0]), model.predict(np.array([[3.0]])))


def test_user_history_from_jobs():
    history = UserHistory.from_jobs(_jobs())
    assert 20.0 == history.user_aggregates['alice'].a_cpu
    assert 4.0 == history.role_aggregates['Graduate'].a_cpu
    assert 12.0 == history.overall.a_cpu
    assert {'alice': 0, 'bob': 1, 'carol': 2} == history.user_codes
    assert {'projA': 0, 'projB': 1} == history.project_codes


def test_user_history_lookup():
    history = UserHistory.from_jobs(_jobs())
    aggregate, cold_start = history.lookup('bob', 'Staff')
    assert 2.0 == aggregate.a_cpu
    assert not cold_start
    aggregate, cold_start = history.lookup('dave', 'Staff')
    assert 20.0 == aggregate.a_cpu
    assert cold_start
    aggregate, cold_start = history.lookup('erin', 'Faculty')
    assert 12.0 == aggregate.a_cpu
    assert cold_start


def test_user_history_project_code():
    history = UserHistory.from_jobs(_jobs())
    assert 1 == history.project_code('projB')
    assert 2 == history.project_code('projZ')


def test_user_history_as_dict():
    history = UserHistory.from_jobs(_jobs())
    copy = UserHistory.create_from_dict(json.loads(json.dumps(history.get_as_dict())))
    assert history == copy


def test_model_store_saves_and_loads(tmp_path):
    store = ModelStore(str(tmp_path / 'store'))
    assert not store.has_model(CPU_REGRESSION)
    model = RidgeModel(1.5, [2.0, -1.0], ['reqTime', 'aCPU'], {'alpha': 0.5}, {'fit_time_s': 0.25})
    store.save_model(CPU_REGRESSION, model)
    assert store.has_model(CPU_REGRESSION)
    assert os.path.exists(os.path.join(store.path, 'cpu_regression.json'))
    loaded = store.load_model(CPU_REGRESSION)
    assert 'Ridge' == loaded.name()
    assert ['reqTime', 'aCPU'] == list(loaded.columns)
    assert 0.25 == loaded.fit_time_s
    X = np.array([[1.0, 2.0], [3.0, 0.5]])
    np.testing.assert_array_equal(model.predict(X), loaded.predict(X))


def test_model_store_saves_history(tmp_path):
    store = ModelStore(str(tmp_path))
    history = UserHistory.from_jobs(_jobs())
    store.save_history(history)
    assert os.path.exists(os.path.join(str(tmp_path), HISTORY_FILE_NAME))
    assert history == store.load_history()


def test_model_store_missing_model(tmp_path):
    store = ModelStore(str(tmp_path))
    with pytest.raises(MissingModel):
        store.load_model(CPU_REGRESSION)
    with pytest.raises(MissingModel):
        store.load_history()


def test_load_model_file_and_its_store(tmp_path):
    store = ModelStore(str(tmp_path))
    store.save_model(CPU_REGRESSION, RidgeModel(0.0, [1.0], ['reqTime']))
    path = os.path.join(str(tmp_path), 'cpu_regression.json')
    assert 'Ridge' == load_model_file(path).name()
    assert os.path.abspath(str(tmp_path)) == store_of_model_file(path).path
    other = str(tmp_path / 'other')
    assert other == store_of_model_file(path, other).path
