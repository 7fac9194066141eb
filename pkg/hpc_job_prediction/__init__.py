from .errors import ConfigurationError, ConstantTarget, DegenerateColumn, EmptyResult, ExperimentError, \
    JobDataError, MalformedLine, MissingModel, MissingRequest, NonConvergence, NumericParse, RankDeficient, \
    SchemaMismatch, SingleClass, UnknownUser
from .ingest import IngestConfig, JobRecord, RawAccountingRecord, clean_filter_sample, parse_accounting_line, \
    parse_resource_request, read_accounting, read_jobs, read_roles, serialize_accounting_record, write_jobs
from .features import Dataset, Scaler, UserAggregate, build_dataset, compute_user_aggregates, export_dataset, \
    feature_frame, join_aggregates, role_fallback_aggregates
from .model import Classifier, FittedModel, ModelAccessor
from .cart import Tree, gini, grow_tree
from .regress import elastic_net_path, fit_cart_regression, fit_elastic_net_cv, fit_lasso_lars_ic, fit_ols, \
    fit_ridge, lars_lasso_path, predict, r_squared
from .classify import accuracy, f1, fit_cart_classifier, fit_gnb, fit_logistic, fit_random_forest
from .registrations import create_model_from_dict, get_model_accessor
from .model_store import ModelStore, UserHistory
from .evaluate import EvalReport, EvalRow, ExperimentConfig, load_experiment_config, parse_report, render_report, \
    run_experiment, train_store
from .synth import JobTruth, SynthConfig, Workload, generate_workload, write_workload
from .advisory import Advisory, predict_for_submission, predict_records
from .cli import run_cli
from .version import __version__
