# -*- coding: utf-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
r"""
Define the IGND command line interface.

Exit codes: 0 success, 2 invalid configuration, 3 divergence, 4 failed
verification checks.

.. click:: ignd.cli:cli
   :prog: ignd
   :show-nested:

"""
import click
import logging
import click_log
import schedula as sh
from ignd import dsp as _process
from ignd._version import __version__
from ignd.errors import (
    ConfigError, Diverged, VerificationFailed, find_error
)

log = logging.getLogger('ignd.cli')

log_config = dict(format="%(asctime)-15s:%(levelname)5.5s:%(name)s:%(message)s")

#: Exit code per error type.
EXIT_CODES = ((ConfigError, 2), (Diverged, 3), (VerificationFailed, 4))

FAMILIES = ('supervised', 'frozenlake', 'cartpole', 'lqr')


class _Logger(logging.Logger):
    # noinspection PyMissingOrEmptyDocstring
    def setLevel(self, level):
        super(_Logger, self).setLevel(level)
        logging.basicConfig(level=level, **log_config)
        rlog = logging.getLogger()
        # because `basicConfig()` does not reconfig root-logger when re-invoked.
        rlog.level = level
        logging.captureWarnings(True)


logger = _Logger('cli')
click_log.basic_config(logger)


def exit_code(ex):
    """
    Returns the exit code of an error raised by a run.

    :param ex:
        Raised exception (possibly wrapped by `schedula`).
    :type ex: BaseException

    :return:
        Exit code or None for unexpected errors.
    :rtype: int | None
    """
    for error, code in EXIT_CODES:
        if find_error(ex, error) is not None:
            return code
    return None


def _run(inputs, outputs):
    try:
        return _process(inputs, outputs)
    except Exception as ex:
        code = exit_code(ex)
        if code is None:
            raise
        log.error('%s', find_error(ex, *(e for e, _ in EXIT_CODES)))
        raise click.exceptions.Exit(code)


def _experiment_options(func):
    for decorator in reversed((
        click.option(
            '-c', '--config', 'config_file', type=click.Path(exists=True),
            help='Experiment config file `.yaml`.'
        ),
        click.option('--seed', type=int, help='Run the single seed N.'),
        click.option('--seeds', type=click.IntRange(1),
                     help='Run the seeds 0..N-1.'),
        click.option('--alpha', type=float, help='Learning rate.'),
        click.option('--epsilon', type=float,
                     help='Gauss-Newton regularizer.'),
        click.option('--optimizer', help='Update rule (e.g. sgd, ignd).'),
        click.option('--steps', type=click.IntRange(1),
                     help='Training steps (episodes for cartpole).'),
        click.option('-O', '--out', type=click.Path(file_okay=False),
                     help='Output folder.'),
        click.option('-j', '--jobs', type=click.IntRange(1),
                     help='Number of cells run concurrently.'),
        click.option(
            '-MC', '--model-conf', type=click.Path(exists=True),
            help='Model-configuration file path `.yaml`.'
        ),
        click_log.simple_verbosity_option(logger)
    )):
        func = decorator(func)
    return func


def _experiment(family=None, grid_search=False, config_file=None,
                model_conf=None, **cmd_flags):
    inputs = {
        sh.START: {'model_conf': model_conf}, 'family': family,
        'config_file': config_file, 'grid_search': grid_search,
        'cmd_flags': cmd_flags
    }
    return _run(inputs, ['outcome', 'done'])


@click.group(
    'ignd', context_settings=dict(help_option_names=['-h', '--help'])
)
@click.version_option(__version__)
def cli():
    """
    IGND experiments command line tool.
    """


def _family_command(family, short_help):
    @cli.command(family, short_help=short_help, help=short_help)
    @_experiment_options
    def command(**kwargs):
        return _experiment(family, **kwargs)

    return command


for _family, _help in (
        ('supervised', 'Incremental regression on a tabular dataset.'),
        ('frozenlake', 'Tabular Q-learning on FrozenLake.'),
        ('cartpole', 'Q-learning with a neural network on CartPole.'),
        ('lqr', 'Generalized policy iteration on an LQR system.')):
    _family_command(_family, _help)


@cli.command('gridsearch', short_help='Learning-rate grid search.')
@click.option(
    '-F', '--family', type=click.Choice(FAMILIES),
    help='Experiment family (default: the `family` of the config).'
)
@_experiment_options
def gridsearch(**kwargs):
    """
    Runs every (alpha, seed) pair of the `grid` section of the config and
    selects the best alpha.
    """
    return _experiment(grid_search=True, **kwargs)


@cli.command('verify', short_help='Runs the property and oracle checks.')
@click.option('-q', '--quick', is_flag=True, help='Run fewer random cases.')
@_experiment_options
def verify(quick, **kwargs):
    """
    Runs the property and oracle checks and records PASS/FAIL per check.
    """
    return _experiment('verify', quick=quick or None, **kwargs)


@cli.command('template', short_help='Generates an example experiment config.')
@click.argument('family', type=click.Choice(FAMILIES + ('verify',)))
@click.argument(
    'output-file', default='./config.yaml', required=False,
    type=click.Path(writable=True)
)
@click_log.simple_verbosity_option(logger)
def template(family, output_file):
    """
    Writes the full example config of FAMILY into OUTPUT_FILE.

    OUTPUT_FILE: File path `.yaml`. [default: ./config.yaml]
    """
    return _run(
        {'family': family, 'template_file': output_file}, ['template', 'done']
    )


@cli.command('conf', short_help='Generates the model-configuration file.')
@click.argument(
    'output-file', default='./conf.yaml', required=False,
    type=click.Path(writable=True)
)
@click.option(
    '-MC', '--model-conf', type=click.Path(exists=True),
    help='Model-configuration file path `.yaml`.'
)
@click_log.simple_verbosity_option(logger)
def conf(output_file, **kwargs):
    """
    Writes the model-configuration file into OUTPUT_FILE.

    OUTPUT_FILE: File path `.yaml`. [default: ./conf.yaml]
    """
    inputs = {sh.START: kwargs, 'output_file': output_file}
    return _run(inputs, ['conf', 'done'])


if __name__ == '__main__':
    cli()
