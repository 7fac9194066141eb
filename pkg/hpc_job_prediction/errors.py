"""
Description
===========

This module contains the exceptions raised by the job prediction toolkit. Problems with input data derive from
:py:class:`JobDataError`, problems with configuration or registered plugins from :py:class:`ConfigurationError`.
"""

from typing import Optional, Sequence


__author__ = 'HPC Job Prediction Team'


class JobDataError(ValueError):
    """Base class of all errors caused by the data handed to the toolkit."""


class ConfigurationError(UserWarning):
    """Raised when a configuration cannot be used."""


class MalformedLine(JobDataError):

    def __init__(self, line_number: Optional[int], field_index: int, message: str = ''):
        self.line_number = line_number
        self.field_index = field_index
        super().__init__('Malformed accounting line {0} (field {1}){2}'.format(
            line_number, field_index, ': ' + message if message else ''))


class NumericParse(JobDataError):

    def __init__(self, line_number: Optional[int], field_index: int, value: str):
        self.line_number = line_number
        self.field_index = field_index
        self.value = value
        super().__init__('Accounting line {0}, field {1}: cannot read \'{2}\' as a number'.format(
            line_number, field_index, value))


class MissingRequest(JobDataError):
    """Raised when a job category lacks a usable h_rt or h_vmem request."""


class EmptyResult(JobDataError):
    """Raised when no record survives cleaning and filtering."""


class UnknownUser(JobDataError):

    def __init__(self, user: str):
        self.user = user
        super().__init__('No aggregates for user {}'.format(user))


class RankDeficient(JobDataError):

    def __init__(self, columns: Sequence[str]):
        self.columns = list(columns)
        super().__init__('Design matrix is rank deficient; dependent columns: {}'.format(', '.join(self.columns)))


class SchemaMismatch(JobDataError):

    def __init__(self, expected: Sequence[str], actual: Sequence[str]):
        self.expected = list(expected)
        self.actual = list(actual)
        super().__init__('Model expects columns {0}, got {1}'.format(self.expected, self.actual))


class NonConvergence(JobDataError):

    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__('No convergence after {0} iterations (residual {1:.3e})'.format(iterations, residual))


class ConstantTarget(JobDataError):
    """Raised when a metric needs a target with non-zero variance."""


class SingleClass(JobDataError):
    """Raised when classification labels hold one class only."""


class MissingModel(JobDataError):

    def __init__(self, name: str):
        self.name = name
        super().__init__('No persisted model for {}'.format(name))


class ExperimentError(JobDataError):

    def __init__(self, task: str, model: str, cause: Exception):
        self.task = task
        self.model = model
        super().__init__('{0} / {1}: {2}'.format(task, model, cause))


class DegenerateColumn(UserWarning):
    """Warning category for zero-variance columns dropped during standardization."""
