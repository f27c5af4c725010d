# -*- coding: utf-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
"""
Functions and `dsp` model to load and validate an experiment configuration.

Sub-Modules:

.. currentmodule:: ignd.core.load

.. autosummary::
    :nosignatures:
    :toctree: load/

    schema
"""
import logging
import schedula as sh
from ...errors import ConfigError

log = logging.getLogger(__name__)

dsp = sh.BlueDispatcher(
    name='load_config', raises=True,
    description='Loads and validates the experiment configuration.'
)

#: Dotted keys whose mapping values are kept as they are.
LEAF_KEYS = frozenset(('supervised.columns',))

#: Command line options and the config keys they override.
FLAG_KEYS = {
    'alpha': 'optimizer.alpha',
    'epsilon': 'optimizer.epsilon',
    'optimizer': 'optimizer.rule',
    'out': 'output_dir',
    'jobs': 'jobs',
    'quick': 'verify.quick',
}


def flatten_config(data, prefix=()):
    """
    Flattens nested mappings into dotted keys.

    :param data:
        Nested or flat configuration.
    :type data: dict

    :param prefix:
        Parent keys.
    :type prefix: tuple[str]

    :return:
        Flat configuration.
    :rtype: dict

    Example::

        >>> sorted(flatten_config({'optimizer': {'alpha': 1}, 'steps': 2}))
        ['optimizer.alpha', 'steps']
    """
    flat = {}
    for k, v in data.items():
        key = '.'.join(prefix + (str(k),))
        if isinstance(v, dict) and key not in LEAF_KEYS:
            flat.update(flatten_config(v, prefix + (str(k),)))
        else:
            flat[key] = v
    return flat


@sh.add_function(
    dsp, inputs_kwargs=True, inputs_defaults=True, outputs=['raw_config']
)
def read_config_file(config_file=None):
    """
    Reads the experiment configuration file `.yaml`.

    :param config_file:
        Config file path.
    :type config_file: str

    :return:
        Flat raw configuration.
    :rtype: dict
    """
    if not config_file:
        return {}
    import yaml
    loader = getattr(yaml, 'CSafeLoader', yaml.SafeLoader)
    try:
        with open(config_file, 'rb') as f:
            data = yaml.load(f, Loader=loader)
    except yaml.YAMLError as ex:
        raise ConfigError({config_file: 'cannot be parsed (%s)!' % ex})
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError({config_file: 'should be a mapping!'})
    log.info('Experiment configuration file (%s) loaded.', config_file)
    return flatten_config(data)


def parse_cmd_flags(cmd_flags, family):
    """
    Translates the command line options into config keys.

    :param cmd_flags:
        Command line options (None values are skipped).
    :type cmd_flags: dict

    :param family:
        Experiment family.
    :type family: str

    :return:
        Config overrides.
    :rtype: dict
    """
    flags, res = {k: v for k, v in cmd_flags.items() if v is not None}, {}
    if 'seeds' in flags:
        res['seeds'] = list(range(int(flags.pop('seeds'))))
    if 'seed' in flags:
        res['seeds'] = [int(flags.pop('seed'))]
    if 'steps' in flags:
        res['episodes' if family == 'cartpole' else 'steps'] = flags.pop(
            'steps'
        )
    for k, v in flags.items():
        if k in FLAG_KEYS:
            res[FLAG_KEYS[k]] = v
    return res


@sh.add_function(
    dsp, inputs_kwargs=True, inputs_defaults=True, outputs=['merged_config']
)
def merge_config(raw_config, family=None, cmd_flags=None, grid_search=False):
    """
    Merges the family defaults, the config file and the command line options.

    :param raw_config:
        Flat raw configuration.
    :type raw_config: dict

    :param family:
        Experiment family of the sub-command (default: the `family` key).
    :type family: str

    :param cmd_flags:
        Command line options.
    :type cmd_flags: dict

    :param grid_search:
        Enable the learning-rate grid search?
    :type grid_search: bool

    :return:
        Flat configuration to validate.
    :rtype: dict
    """
    from ...defaults import dfl
    raw_config = dict(raw_config)
    if family is None:
        family = raw_config.get('family')
    elif raw_config.get('family', family) != family:
        log.warning('Config family `%s` replaced by `%s`.',
                    raw_config['family'], family)
    exp = dfl.experiments
    base = dict(exp.common.CONFIG)
    family_conf = getattr(exp, str(family), None)
    if family_conf is not None and hasattr(family_conf, 'CONFIG'):
        base.update(family_conf.CONFIG)
    if family is not None:
        raw_config['family'] = family
    if grid_search:
        raw_config['grid.enabled'] = True
    return sh.combine_dicts(
        base, raw_config, parse_cmd_flags(cmd_flags or {}, family)
    )


def _check_consistency(config):
    errors = {}
    if config['optimizer.schedule'] == 'geometric' and \
            config['optimizer.alpha_end'] is None:
        errors['optimizer.alpha_end'] = 'required by the geometric schedule!'
    if config['grid.enabled']:
        if config['family'] == 'verify':
            errors['family'] = 'verify cannot be grid searched!'
        for k in ('grid.lo', 'grid.hi', 'grid.n'):
            if config[k] is None:
                errors[k] = 'is required by the grid search!'
        lo, hi = config['grid.lo'], config['grid.hi']
        if lo is not None and hi is not None and not lo < hi:
            errors['grid.hi'] = 'should be greater than grid.lo!'
    return errors


def _log_errors_msg(errors):
    if errors:
        msg = ['\nConfiguration cannot be parsed, due to:']
        for k, v in sorted(errors.items()):
            msg.append('{}: {}'.format(k, v))
        log.error('\n  '.join(msg))
        return True
    return False


@sh.add_function(dsp, outputs=['config'])
def validate_config(merged_config):
    """
    Validates the experiment configuration.

    Every field is validated on its own and all the errors are reported
    together, keyed by their dotted path.

    :param merged_config:
        Flat configuration to validate.
    :type merged_config: dict

    :return:
        Validated configuration.
    :rtype: dict
    """
    from schema import SchemaError
    from .schema import define_config_validation, error_message
    validate, config, errors = define_config_validation(), {}, {}
    if merged_config.get('family') is None:
        errors['family'] = 'missing field!'
    for k, v in sorted(merged_config.items()):
        if k == 'family' and v is None:
            continue
        try:
            config[k] = validate(k, v)
        except SchemaError as ex:
            errors[k] = error_message(ex)
    if not errors:
        errors.update(_check_consistency(config))
    if _log_errors_msg(errors):
        raise ConfigError(errors)
    if config['run_id'] is None:
        config['run_id'] = '%s-%s' % (
            config['family'], config['optimizer.rule']
        )
    return config
