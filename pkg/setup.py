#!/usr/bin/env python

from setuptools import setup

import os


def read(file_name):
    return open(os.path.join(os.path.dirname(__file__), file_name)).read()


requirements = ['numpy', 'scipy', 'pandas', 'scikit-learn', 'joblib', 'pyyaml']

__version__ = None
with open('hpc_job_prediction/version.py') as f:
    exec(f.read())

setup(
    name='hpc-job-prediction',
    version=__version__,
    description='Prediction of resource usage and failures of HPC batch jobs from accounting logs',
    long_description=read('README.md'),
    author='HPC Job Prediction Team',
    packages=['hpc_job_prediction'],
    install_requires=requirements,
    package_data={
        'hpc_job_prediction': ['*.yaml']
    },
    entry_points={
        'model_plugins': [
            'linear_regression = hpc_job_prediction.regress:LinearRegressionAccessor',
            'lasso_lars_ic = hpc_job_prediction.regress:LassoLarsICAccessor',
            'elastic_net_cv = hpc_job_prediction.regress:ElasticNetCVAccessor',
            'ridge = hpc_job_prediction.regress:RidgeAccessor',
            'cart_regression = hpc_job_prediction.regress:CARTRegressionAccessor',
            'logistic_regression = hpc_job_prediction.classify:LogisticRegressionAccessor',
            'cart_classification = hpc_job_prediction.classify:CARTClassificationAccessor',
            'gaussian_nb = hpc_job_prediction.classify:GaussianNBAccessor',
            'random_forest = hpc_job_prediction.classify:RandomForestAccessor'
        ],
        'console_scripts': [
            'hpc-job-prediction = hpc_job_prediction.cli:main'
        ],
    }
)
