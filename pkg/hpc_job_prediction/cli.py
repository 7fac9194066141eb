"""
Description
===========

The command line of the toolkit. Each subcommand runs one step of the pipeline: generating a synthetic workload,
ingesting accounting files into a job table, exporting features, training the models of a store, predicting for new
jobs, and running and rendering the per-user feature evaluation.
Exit codes are 0 on success, 1 on usage errors and 2 on errors in the data, the configuration or the file system.
"""

from typing import List, Optional
import argparse
import logging
import os
import sys

import yaml

from .advisory import predict_for_submission, predict_records
from .errors import ConfigurationError, JobDataError
from .evaluate import FORMATS, TEXT, load_experiment_config, parse_report, render_report, run_experiment, \
    train_store
from .features import compute_user_aggregates, export_dataset, feature_frame, join_aggregates
from .ingest import LABEL_RULES, UNKNOWN_ROLE, IngestConfig, clean_filter_sample, parse_resource_request, \
    read_accounting, read_jobs, read_roles, write_jobs
from .model_store import ModelStore, load_model_file, store_of_model_file
from .synth import ACCOUNTING_FILE_NAME, ROLES_FILE_NAME, SynthConfig, generate_workload, write_workload
from .version import __version__

__author__ = 'HPC Job Prediction Team'

PROGRAM_NAME = 'hpc-job-prediction'
USAGE_ERROR = 1
DATA_ERROR = 2


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError('{0}: error: {1}'.format(self.prog, message))


def _sample_size(value: str):
    if value == 'all':
        return value
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError('expected a positive integer or \'all\', got \'{}\''.format(value))


def _create_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=None, help='Seed of all random choices.')
    common.add_argument('--verbose', action='store_true', help='Log debug messages.')

    parser = _ArgumentParser(prog=PROGRAM_NAME, description='Predicts resource usage and failures of batch jobs.')
    parser.add_argument('--version', action='version', version='%(prog)s {}'.format(__version__))
    subparsers = parser.add_subparsers(dest='command', parser_class=_ArgumentParser)
    subparsers.required = True

    synth = subparsers.add_parser('synth', parents=[common], help='Generate a synthetic workload.')
    synth.add_argument('--out', required=True, help='Directory to write the accounting and roles files to.')
    synth.add_argument('--users', type=int, default=None, help='Number of users.')
    synth.add_argument('--jobs-per-user', type=int, default=None, help='Number of jobs of each user.')

    ingest = subparsers.add_parser('ingest', parents=[common], help='Clean an accounting file into a job table.')
    ingest.add_argument('--accounting', required=True, help='The accounting file.')
    ingest.add_argument('--roles', default=None, help='File of \'user,role\' lines.')
    ingest.add_argument('--out', required=True, help='The job table to write.')
    ingest.add_argument('--min-jobs', type=int, default=200, help='Minimum number of jobs per user.')
    ingest.add_argument('--sample-size', type=_sample_size, default=1000000, help='Number of jobs, or \'all\'.')
    ingest.add_argument('--window-start', type=int, default=0, help='Earliest submission time.')
    ingest.add_argument('--window-end', type=int, default=2 ** 63 - 1, help='Submission time bounding the window.')
    ingest.add_argument('--label-rule', choices=LABEL_RULES, default=LABEL_RULES[0], help='How failures are labeled.')

    featurize = subparsers.add_parser('featurize', parents=[common], help='Export the feature table of a job table.')
    featurize.add_argument('--jobs', required=True, help='The job table.')
    featurize.add_argument('--out', required=True, help='The feature table to write.')

    train = subparsers.add_parser('train', parents=[common], help='Train the models of a model store.')
    train.add_argument('--jobs', required=True, help='The job table.')
    train.add_argument('--store', required=True, help='The model store directory.')
    train.add_argument('--config', default=None, help='Experiment configuration merged over the defaults.')

    predict = subparsers.add_parser('predict', parents=[common],
                                    help='Predict for accounting records or advise on a submission.')
    predict.add_argument('--model', default=None, help='A persisted model.')
    predict.add_argument('--jobs', default=None, help='Accounting file with the jobs to predict.')
    predict.add_argument('--roles', default=None, help='File of \'user,role\' lines.')
    predict.add_argument('--store', default=None, help='The model store directory.')
    predict.add_argument('--owner', default=None, help='The submitting user.')
    predict.add_argument('--req-time', default=None, help='Requested run time, in seconds or as H:M:S.')
    predict.add_argument('--req-mem', default=None, help='Requested memory, e.g. 2G.')
    predict.add_argument('--role', default=UNKNOWN_ROLE, help='Role of the submitting user.')
    predict.add_argument('--project', default='', help='Project of the submission.')

    evaluate = subparsers.add_parser('evaluate', parents=[common], help='Run the per-user feature evaluation.')
    source = evaluate.add_mutually_exclusive_group(required=True)
    source.add_argument('--in', dest='in_dir', default=None, help='Directory with accounting and roles files.')
    source.add_argument('--jobs', default=None, help='The job table.')
    evaluate.add_argument('--report', default=None, help='The report file to write. Default: the output stream.')
    evaluate.add_argument('--config', default=None, help='Experiment configuration merged over the defaults.')
    evaluate.add_argument('--format', choices=FORMATS, default=TEXT, help='Report format.')
    timing = evaluate.add_mutually_exclusive_group()
    timing.add_argument('--timing', dest='timing', action='store_true',
                        help='Report fit times. Reports then differ between runs.')
    timing.add_argument('--no-timing', dest='timing', action='store_false', help='Do not report fit times (default).')
    evaluate.set_defaults(timing=None)
    evaluate.add_argument('--min-jobs', type=int, default=200, help='Minimum number of jobs per user.')

    report = subparsers.add_parser('report', parents=[common], help='Render a report in comma-separated form.')
    report.add_argument('--in', dest='in_file', required=True, help='The report file.')
    report.add_argument('--format', choices=FORMATS, default=TEXT, help='Report format.')
    return parser


def _read_roles(path: Optional[str]) -> dict:
    if path is None:
        return {}
    with open(path, 'r') as roles_file:
        return read_roles(roles_file)


def _ingest(accounting_path: str, roles_path: Optional[str], cfg: IngestConfig):
    with open(accounting_path, 'r') as accounting_file:
        records, _ = read_accounting(accounting_file)
    return clean_filter_sample(records, _read_roles(roles_path), cfg)


def _experiment_overrides(args) -> dict:
    overrides = {}
    if args.seed is not None:
        overrides['split'] = {'rng_seed': args.seed}
        overrides['hyperparameters'] = {'RandomForest': {'rng_seed': args.seed}}
    if getattr(args, 'timing', None) is not None:
        overrides['record_fit_time'] = args.timing
    return overrides


def _write(text: str, path: Optional[str]):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, 'w') as output_file:
        output_file.write(text)


def _run_synth(args):
    parameters = {}
    if args.seed is not None:
        parameters['rng_seed'] = args.seed
    if args.users is not None:
        parameters['n_users'] = args.users
    if args.jobs_per_user is not None:
        parameters['jobs_per_user'] = (args.jobs_per_user, args.jobs_per_user)
    write_workload(generate_workload(SynthConfig(**parameters)), args.out)


def _run_ingest(args):
    seed = args.seed if args.seed is not None else 42
    cfg = IngestConfig(window_start=args.window_start, window_end=args.window_end, min_jobs_per_user=args.min_jobs,
                       sample_size=args.sample_size, rng_seed=seed, label_rule=args.label_rule)
    write_jobs(_ingest(args.accounting, args.roles, cfg), args.out)


def _run_featurize(args):
    jobs = read_jobs(args.jobs)
    export_dataset(feature_frame(join_aggregates(jobs, compute_user_aggregates(jobs))), args.out)


def _run_train(args):
    cfg = load_experiment_config(args.config, _experiment_overrides(args))
    train_store(read_jobs(args.jobs), ModelStore(args.store), cfg)


def _run_predict(args):
    if args.model is not None:
        if args.jobs is None:
            raise UsageError('predict: --model needs --jobs')
        model = load_model_file(args.model)
        history = store_of_model_file(args.model, args.store).load_history()
        with open(args.jobs, 'r') as accounting_file:
            records, _ = read_accounting(accounting_file)
        for job_number, prediction in predict_records(model, history, records, _read_roles(args.roles)):
            sys.stdout.write('{0} {1!r}\n'.format(job_number, prediction))
        return
    if args.store is None or args.owner is None or args.req_time is None or args.req_mem is None:
        raise UsageError('predict: either --model and --jobs, or --store, --owner, --req-time and --req-mem')
    req_time_s, req_mem_bytes = parse_resource_request('h_rt={0},h_vmem={1}'.format(args.req_time, args.req_mem))
    advisory = predict_for_submission(ModelStore(args.store), args.owner, req_time_s, req_mem_bytes, args.role,
                                      args.project)
    sys.stdout.write('\n'.join(advisory.as_lines()) + '\n')


def _run_evaluate(args):
    cfg = load_experiment_config(args.config, _experiment_overrides(args))
    if args.in_dir is not None:
        ingest_cfg = IngestConfig(min_jobs_per_user=args.min_jobs, rng_seed=cfg.split.rng_seed)
        jobs = _ingest(os.path.join(args.in_dir, ACCOUNTING_FILE_NAME), os.path.join(args.in_dir, ROLES_FILE_NAME),
                       ingest_cfg)
    else:
        jobs = read_jobs(args.jobs)
    _write(render_report(run_experiment(jobs, cfg), args.format), args.report)


def _run_report(args):
    with open(args.in_file, 'r') as report_file:
        report = parse_report(report_file.read())
    _write(render_report(report, args.format), None)


_COMMANDS = {'synth': _run_synth, 'ingest': _run_ingest, 'featurize': _run_featurize, 'train': _run_train,
             'predict': _run_predict, 'evaluate': _run_evaluate, 'report': _run_report}


def run_cli(argv: Optional[List[str]] = None) -> int:
    """
    Runs a subcommand.
    :param argv: The arguments, without the program name. Defaults to the arguments of the process.
    :return: The exit code.
    """
    parser = _create_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        sys.stderr.write('{}\n'.format(e))
        return USAGE_ERROR
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else USAGE_ERROR
    logging.basicConfig(stream=sys.stderr, level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(levelname)s: %(message)s')
    try:
        _COMMANDS[args.command](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        sys.stderr.write('{0}: error: {1}\n'.format(PROGRAM_NAME, e))
        return USAGE_ERROR
    except (JobDataError, ConfigurationError, UserWarning, ValueError, OSError, yaml.YAMLError) as e:
        sys.stderr.write('{0}: error: {1}\n'.format(PROGRAM_NAME, e))
        return DATA_ERROR
    return 0


def main():
    sys.exit(run_cli())
