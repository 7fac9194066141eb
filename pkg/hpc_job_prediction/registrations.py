from importlib import metadata
from typing import List, Type

from .classify import CARTClassificationAccessor, GaussianNBAccessor, LogisticRegressionAccessor, \
    RandomForestAccessor
from .model import FittedModel, ModelAccessor
from .regress import CARTRegressionAccessor, ElasticNetCVAccessor, LassoLarsICAccessor, LinearRegressionAccessor, \
    RidgeAccessor

__author__ = 'HPC Job Prediction Team'


#: List of ModelAccessor implementations supported by the toolkit.
# Entries are classes derived from :py:class:`ModelAccessor` class.
#: Plugins may extend this list by their implementations, registered under the entry point group 'model_plugins'.
MODEL_REGISTRY: List[Type[ModelAccessor]] = []

_BUILT_IN_ACCESSORS = (LinearRegressionAccessor, LassoLarsICAccessor, ElasticNetCVAccessor, RidgeAccessor,
                       CARTRegressionAccessor, LogisticRegressionAccessor, CARTClassificationAccessor,
                       GaussianNBAccessor, RandomForestAccessor)


def _iter_entry_points(group: str):
    entry_points = metadata.entry_points()
    if hasattr(entry_points, 'select'):
        return entry_points.select(group=group)
    return entry_points.get(group, [])


def _set_up_model_registry():
    names = set()
    for accessor in _BUILT_IN_ACCESSORS:
        MODEL_REGISTRY.append(accessor)
        names.add(accessor.name())
    for registered_model in _iter_entry_points('model_plugins'):
        accessor = registered_model.load()
        if accessor.name() not in names:
            MODEL_REGISTRY.append(accessor)
            names.add(accessor.name())


def get_model_accessor(name: str) -> Type[ModelAccessor]:
    if len(MODEL_REGISTRY) == 0:
        _set_up_model_registry()
    for model_accessor in MODEL_REGISTRY:
        if model_accessor.name() == name:
            return model_accessor
    raise UserWarning('Could not find model of type {0}'.format(name))


def create_model_from_dict(model_as_dict: dict) -> FittedModel:
    parameters = model_as_dict['parameters']
    return get_model_accessor(model_as_dict['type']).create_from_parameters(parameters)
