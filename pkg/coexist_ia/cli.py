""" command-line entry point """
import argparse
import contextlib
import logging
import os
import sys
import typing

import numpy as np

from coexist_ia import config as config_module, exc, harness, metadata, results
from coexist_ia.bases import EigenMode, Membership, NodeKind, UserSpec
from coexist_ia.feasibility import check_feasibility

logger = logging.getLogger(__name__)

RUNNERS = {
    'sinr-sweep': harness.run_sinr_sweep,
    'roc': harness.run_roc,
    'pd-delta': harness.run_pd_delta,
    'user-sweep': harness.run_user_sweep,
}


def _dofs(text: str) -> typing.List[int]:
    try:
        values = [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError('expected comma-separated integers, got %r' % text) from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError('dofs must be positive integers')
    return values


def _run_options(parser: argparse.ArgumentParser):
    parser.add_argument('--config', help='JSON scenario document')
    parser.add_argument('--seed', type=int, help='master seed (default: $%s or the config value)'
                        % metadata.SEED_ENV_VAR)
    parser.add_argument('--out', help='output path (default: stdout)')
    parser.add_argument('--format', choices=sorted(results.WRITERS), default='csv')
    parser.add_argument('--eigen-mode', choices=[mode.value for mode in EigenMode])
    parser.add_argument('--threads', type=int, default=1)
    parser.add_argument('--progress', action='store_true', help='progress bar on stderr')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='coexist-ia',
                                     description='Radar/communication coexistence via interference alignment')
    parser.add_argument('-v', '--verbose', action='store_true')
    commands = parser.add_subparsers(dest='command', required=True)

    feasibility = commands.add_parser('feasibility', help='check whether the dofs can be aligned')
    feasibility.add_argument('--nsc', type=int, required=True)
    feasibility.add_argument('--dofs', type=_dofs, required=True,
                             help='comma-separated dofs; the last entry is the radar unless --no-radar')
    feasibility.add_argument('--no-radar', action='store_true')

    for name in RUNNERS:
        _run_options(commands.add_parser(name))
    return parser


def _seed(args) -> typing.Optional[int]:
    if args.seed is not None:
        return args.seed
    value = os.environ.get(metadata.SEED_ENV_VAR)
    if value is None:
        return None
    try:
        return int(value)
    except ValueError:
        raise exc.ConfigurationError('%s must be an integer, got %r' % (metadata.SEED_ENV_VAR, value)) from None


def _feasibility(args) -> int:
    if args.nsc < 1:
        raise exc.ConfigurationError('--nsc must be >= 1')
    users = []
    for index, d in enumerate(args.dofs):
        radar = not args.no_radar and index == len(args.dofs) - 1
        users.append(UserSpec(uid='radar' if radar else 'comm%d' % index,
                              kind=NodeKind.RADAR if radar else NodeKind.COMM, d=d,
                              membership=Membership.RADAR if radar else Membership.RADAR_INTERFERED))
    verdict = check_feasibility(args.nsc, users)
    if verdict:
        print('feasible')
        return metadata.EXIT_OK
    print('infeasible: %s (%s)' % (verdict.condition, verdict.reason))
    return metadata.EXIT_INFEASIBLE


@contextlib.contextmanager
def _output(path: typing.Optional[str]):
    if path is None:
        yield sys.stdout
        return
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        yield handle


def _run(args) -> int:
    if args.threads < 1:
        raise exc.ConfigurationError('--threads must be >= 1')
    overrides = {'master_seed': _seed(args), 'eigen_mode': args.eigen_mode}
    scenario_config = config_module.load_config(args.config, overrides)
    result = RUNNERS[args.command](scenario_config, threads=args.threads, progress=args.progress)
    with _output(args.out) as handle:
        results.write(result, handle, args.format)
    logger.info('%s: wrote %d rows', args.command, len(result.rows))
    return metadata.EXIT_OK


def main(argv: typing.Optional[typing.Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, stream=sys.stderr,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    try:
        if args.command == 'feasibility':
            return _feasibility(args)
        return _run(args)
    except exc.ConfigurationError as err:
        logger.error('%s', err)
        return metadata.EXIT_CONFIG
    except exc.InfeasibleError as err:
        logger.error('%s', err)
        return metadata.EXIT_INFEASIBLE
    except (exc.NumericError, np.linalg.LinAlgError) as err:
        logger.error('numeric failure: %s', err)
        return metadata.EXIT_NUMERIC
