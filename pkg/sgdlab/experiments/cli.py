"""
Command-line entry point.

``sgdlab experiment run <config.json>`` runs a config file; the module
subcommands run one of the experiments of that module from its defaults,
with ``--set key=value`` overriding single parameters. The exit code is 0
iff every acceptance flag of the report passed, 1 if one failed and 2 if
the configuration was rejected or a stage failed.
"""
import argparse
import json
import logging
from typing import Optional, Sequence

from sgdlab.experiments.config import ExperimentConfigError, load_config
from sgdlab.experiments.report import ReportError
from sgdlab.experiments.runners import ExperimentError, run
from sgdlab.utils.sgdlab_enums import ExperimentId

logger = logging.getLogger(__name__)

MODULE_EXPERIMENTS = {
    'simulate': (ExperimentId.boltzmann_stationarity, ExperimentId.ml_power_stationarity,
                 ExperimentId.ml_global_min_selection, ExperimentId.flat_selection_sgd),
    'invariant': (ExperimentId.integrability_lattice, ExperimentId.underparam_flat_limit),
    'flatness': (ExperimentId.flat_selection_quadrature,),
    'fpe': (ExperimentId.fpe_convergence,),
    'hardy': (ExperimentId.hardy_suite,),
}


def _assignment(text):
    key, sep, raw = text.partition('=')
    if not sep or not key:
        raise argparse.ArgumentTypeError('expected key=value, got {0!r}'.format(text))
    try:
        val = json.loads(raw)
    except ValueError:
        val = raw
    return key, val


def _common(parser):
    parser.add_argument('--seed', type=int, default=None, help='experiment seed')
    parser.add_argument('--out', default=None, help='output directory for the report and CSVs')
    parser.add_argument('--threads', type=int, default=None, help='worker threads for path blocks')
    parser.add_argument('--log-level', default='INFO', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='sgdlab', description='Desk-scale checks of SGD invariant distributions.')
    commands = parser.add_subparsers(dest='command', required=True)

    experiment = commands.add_parser('experiment', help='run an experiment config file')
    actions = experiment.add_subparsers(dest='action', required=True)
    run_parser = actions.add_parser('run', help='run the experiment described by a JSON config')
    run_parser.add_argument('config', help='path to the JSON config')
    _common(run_parser)

    for command, experiments in MODULE_EXPERIMENTS.items():
        sub = commands.add_parser(command, help='run {0}'.format(', '.join(e.name for e in experiments)))
        sub.add_argument('experiment', nargs='?', default=experiments[0].name,
                         choices=[e.name for e in experiments])
        sub.add_argument('--landscape', default=None, help='catalog landscape name')
        sub.add_argument('--landscape-params', type=json.loads, default=None,
                         help='landscape parameters as a JSON object')
        sub.add_argument('--eta', type=float, default=None)
        sub.add_argument('--sigma', type=float, default=None)
        sub.add_argument('--eta-sigma', type=float, default=None)
        sub.add_argument('--set', dest='overrides', type=_assignment, action='append', default=[],
                         metavar='KEY=VALUE', help='override one experiment parameter (JSON value)')
        _common(sub)
    return parser


def config_from_args(args):
    """The config dict described by parsed arguments, before defaults are applied."""
    if args.command == 'experiment':
        with open(args.config) as f:
            data = json.load(f)
    else:
        data = {'experiment': args.experiment, 'parameters': dict(args.overrides)}
        if args.landscape is not None or args.landscape_params is not None:
            data['landscape'] = {}
            if args.landscape is not None:
                data['landscape']['entry'] = args.landscape
            if args.landscape_params is not None:
                data['landscape']['params'] = args.landscape_params
        noise = {key: getattr(args, key) for key in ('eta', 'sigma', 'eta_sigma') if getattr(args, key) is not None}
        if noise:
            data['noise'] = noise
    for flag, key in (('seed', 'seed'), ('out', 'output_dir'), ('threads', 'threads')):
        val = getattr(args, flag)
        if val is not None:
            data[key] = val
    return data


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_arg_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format='%(asctime)s %(name)s %(levelname)s %(message)s')
    try:
        config = load_config(config_from_args(args))
        report = run(config)
    except (ExperimentConfigError, ExperimentError, ReportError, OSError) as err:
        logger.error('sgdlab {0} failed: {1}'.format(args.command, err))
        return 2
    failed = sorted(name for name, ok in report.flags.items() if not ok)
    if failed:
        logger.warning('{0} failed checks: {1}'.format(report.experiment.name, ', '.join(failed)))
        return 1
    logger.info('{0} passed; report in {1}'.format(report.experiment.name, config.output_dir))
    return 0


if __name__ == '__main__':
    raise SystemExit(main())
