import argparse
import logging
import sys

from utils import UsageError, DataError, NumericError
from ._config import PRESETS, resolve_config
from ._commands import add_subcommands

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

# GlobalConfig fields that subcommand flags may override
_OVERRIDES = ('preset', 'seed', 'n_jobs', 'backend', 'T', 'beta_start', 'beta_end', 'split_sizes')


class ArgumentParser(argparse.ArgumentParser):
    """Reports bad arguments as UsageError instead of exiting."""

    def error(self, message):
        raise UsageError('{}: {}'.format(self.prog, message))


def build_parser():
    common = ArgumentParser(add_help=False)
    common.add_argument('--config', help='JSON config file')
    common.add_argument('--preset', choices=tuple(PRESETS))
    common.add_argument('--seed', type=int)
    common.add_argument('--n-jobs', type=int)
    common.add_argument('--backend', choices=('oracle', 'external'))
    common.add_argument('--log-level', default='INFO', choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'))

    parser = ArgumentParser(prog='evc', description='Diffusion-based expressive voice conversion toolkit')
    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True
    add_subcommands(subparsers, common)
    return parser


def _fail(kind, error, code):
    print('error[{}]: {}'.format(kind, error), file=sys.stderr)
    return code


def run(argv=None):
    '''
    Parses argv, runs one subcommand and maps failures to exit codes:
    0 success, 1 usage error, 2 data error, 3 numeric failure.
    :param argv: argument list without the program name
    :return: exit code
    '''
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter('%(asctime)s %(levelname)s %(name)s: %(message)s'))
    root = logging.getLogger()
    root.addHandler(handler)
    try:
        args = build_parser().parse_args(argv)
        root.setLevel(args.log_level)
        config = resolve_config(args.config, {key: getattr(args, key, None) for key in _OVERRIDES})
        return args.func(args, config)
    except UsageError as e:
        return _fail('usage', e, EXIT_USAGE)
    except DataError as e:
        return _fail('data', e, EXIT_DATA)
    except NumericError as e:
        return _fail('numeric', e, EXIT_NUMERIC)
    except ValueError as e:
        return _fail('usage', e, EXIT_USAGE)
    except OSError as e:
        return _fail('data', e, EXIT_DATA)
    except (RuntimeError, MemoryError) as e:
        # torch failures inside training or sampling, out-of-memory included
        return _fail('numeric', e, EXIT_NUMERIC)
    except SystemExit as e:
        # --help
        return e.code if isinstance(e.code, int) else EXIT_OK
    finally:
        root.removeHandler(handler)


def main():
    sys.exit(run(sys.argv[1:]))
