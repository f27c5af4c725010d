# -*- coding: utf-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
"""
It provides the experiment configuration parser/validator.

The configuration is a flat mapping of dotted keys (e.g. `optimizer.alpha`);
every key has its own validator, so all the invalid fields are reported
together.
"""
import re
import functools
from schema import Schema, Use, And, Or, SchemaError

#: Experiment families.
FAMILIES = ('supervised', 'frozenlake', 'cartpole', 'lqr', 'verify')

#: Update rules and their accepted aliases.
RULES = {
    'sgd': 'sgd', 'ql': 'sgd', 'ignd': 'ignd', 'igndq': 'ignd', 'cgd': 'cgd',
    'ngd': 'ngd', 'adam': 'adam', 'ignd_adam': 'ignd_adam'
}

_re_1 = re.compile('(?<!})}(?!})')
_re_2 = re.compile('(?<!{){(?!{)')


def _format_error(error):
    if error:
        error = _re_1.sub('}}', error)
        error = _re_2.sub('{{', error)
    return error


def _string(error=None):
    error = _format_error(error or 'should be a string!')
    return And(str, error=error)


def _select(types=(), error=None):
    if not isinstance(types, dict):
        types = {k: k for k in types}
    error = _format_error(error or 'should be one of {}!'.format(
        tuple(sorted(set(types)))
    ))
    types = {k.lower(): v for k, v in types.items()}
    return And(str, Use(lambda x: types[x.lower()]), error=error)


def _check_positive(x):
    return x >= 0


# noinspection PyShadowingBuiltins
def _positive(type=float, error=None, check=_check_positive):
    error = _format_error(error or 'should be as {} and positive!'.format(
        type.__name__
    ))
    return And(Or(int, float), Use(type), check, error=error)


def _limits(limits=(0, 1), error=None):
    error = _format_error(error or 'should be {} <= x <= {}!'.format(*limits))

    def _check_limits(x):
        return limits[0] <= x <= limits[1]

    return And(Or(int, float), Use(float), _check_limits, error=error)


# noinspection PyShadowingBuiltins
def _type(type, error=None):
    error = _format_error(error or 'should be as {}!'.format(type.__name__))
    return Schema(type, error=error)


def _int_list(error=None, check=_check_positive, empty=False):
    error = _format_error(error or 'should be a list of positive integers!')

    def _check(x):
        return (empty or len(x) > 0) and all(map(check, x))

    return And(Or(list, tuple), Use(lambda x: [int(v) for v in x]), _check,
               error=error)


def _columns(error=None):
    error = _format_error(
        error or 'should be a map of column name: numeric | categorical!'
    )
    return And(dict, {str: _select(('numeric', 'categorical'))}, error=error)


def _validator(schema, k, v):
    if k not in schema:
        raise SchemaError('unknown field!')
    return schema[k].validate(v)


def error_message(ex):
    """
    Returns the most specific message of a schema error.

    :param ex:
        Schema error.
    :type ex: schema.SchemaError

    :rtype: str
    """
    msg = [m for m in ex.errors if m] or [m for m in ex.autos if m]
    return msg[0] if msg else str(ex)


@functools.lru_cache(None)
def define_config_validation():
    """
    Defines the experiment configuration schema.

    :return:
        Validator `(key, value) -> value`.
    :rtype: function
    """
    string = _string()
    _bool = _type(bool)
    positive = _positive()
    greater_than_zero = _positive(
        error='should be as <float> and greater than zero!',
        check=lambda x: x > 0
    )
    probability = _limits()
    unit_open = _positive(
        error='should be as <float> and 0 < x < 1!',
        check=lambda x: 0 < x < 1
    )
    decay_rate = _positive(
        error='should be as <float> and 0 <= x < 1!',
        check=lambda x: 0 <= x < 1
    )
    positive_int = _positive(type=int)
    greater_than_zero_int = _positive(
        type=int, error='should be as <int> and greater than zero!',
        check=lambda x: x >= 1
    )
    greater_than_one_int = _positive(
        type=int, error='should be as <int> and greater than one!',
        check=lambda x: x >= 2
    )
    hidden = _int_list(
        error='should be a list of integer widths greater than zero!',
        check=lambda x: x >= 1, empty=True
    )
    _float = And(Or(int, float), Use(float), error='should be as <float>!')

    schema = {
        'family': _select(FAMILIES),
        'run_id': Or(None, string),
        'seeds': _int_list(),
        'output_dir': string,
        'jobs': greater_than_zero_int,
        'steps': positive_int,
        'episodes': positive_int,

        'optimizer.rule': _select(RULES),
        'optimizer.alpha': greater_than_zero,
        'optimizer.schedule': _select(
            ('constant', 'inverse_time', 'geometric')
        ),
        'optimizer.alpha_end': Or(None, greater_than_zero),
        'optimizer.decay': greater_than_zero,
        'optimizer.epsilon': positive,
        'optimizer.eta': greater_than_zero,
        'optimizer.beta_ngd': positive,
        'optimizer.adam_beta1': decay_rate,
        'optimizer.adam_beta2': decay_rate,
        'optimizer.adam_eps': greater_than_zero,

        'grid.lo': Or(None, greater_than_zero),
        'grid.hi': Or(None, greater_than_zero),
        'grid.n': Or(None, greater_than_one_int),
        'grid.enabled': _bool,
        'grid.logspace': _bool,

        'supervised.dataset': string,
        'supervised.target': string,
        'supervised.columns': Or(None, _columns()),
        'supervised.n_samples': greater_than_one_int,
        'supervised.model': _select(('linear', 'mlp')),
        'supervised.hidden': hidden,
        'supervised.train_fraction': unit_open,
        'supervised.eval_every': greater_than_zero_int,

        'frozenlake.gamma': probability,
        'frozenlake.exploration': probability,
        'frozenlake.slippery': _bool,
        'frozenlake.scaled': _bool,
        'frozenlake.phi_max': greater_than_zero_int,
        'frozenlake.tie_break': _select(('first', 'random')),

        'cartpole.reward': _select(('mp', 'original')),
        'cartpole.hidden': hidden,
        'cartpole.gamma': probability,
        'cartpole.target_update': greater_than_zero_int,
        'cartpole.epsilon_start': probability,
        'cartpole.epsilon_end': probability,
        'cartpole.exploration_fraction': probability,
        'cartpole.total_steps': greater_than_zero_int,

        'lqr.system': string,
        'lqr.improvements': greater_than_zero_int,
        'lqr.k0': _float,
        'lqr.exploration_variance': Or(None, positive),
        'lqr.warm_start': _bool,

        'verify.quick': _bool,
    }
    return functools.partial(_validator, schema)
