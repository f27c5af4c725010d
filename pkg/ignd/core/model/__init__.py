# -*- coding: utf-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
"""
It provides the experiment model `dsp`, which runs one (config, seed) cell of
the experiment family selected by the config.

Sub-Modules:

.. currentmodule:: ignd.core.model

.. autosummary::
    :nosignatures:
    :toctree: model/

    approximator
    optim
    supervised
    tabular
    deep
    lqr
    verify
    grid
"""
import functools
import schedula as sh
from ...errors import IGNDError, find_error
from .supervised import dsp as _supervised
from .tabular import dsp as _frozenlake
from .deep import dsp as _cartpole
from .lqr import dsp as _lqr
from .verify import run_verify

dsp = sh.BlueDispatcher(
    name='model', raises=True,
    description='Runs one seed of the configured experiment family.'
)


# noinspection PyUnusedLocal
def is_family(family, config, *args):
    """
    Checks the experiment family of the config.

    :param family:
        Expected family.
    :type family: str

    :param config:
        Validated experiment config.
    :type config: dict

    :return:
        Is the config of the given family?
    :rtype: bool
    """
    return config['family'] == family


for _family, _dsp in (('supervised', _supervised), ('frozenlake', _frozenlake),
                      ('cartpole', _cartpole), ('lqr', _lqr)):
    dsp.add_function(
        function_id='run_%s' % _family,
        function=sh.SubDispatchFunction(
            _dsp, function_id='run_%s' % _family, inputs=['config', 'seed'],
            outputs=['curve']
        ),
        inputs=['config', 'seed'],
        outputs=['curve'],
        input_domain=functools.partial(is_family, _family)
    )

dsp.add_function(
    function=run_verify,
    inputs=['config', 'seed'],
    outputs=['curve'],
    input_domain=functools.partial(is_family, 'verify')
)


@functools.lru_cache(None)
def _registered_model():
    return dsp.register(memo={})


def run_cell(config, seed):
    """
    Runs one seed of the experiment.

    The errors of the family functions are re-raised unwrapped.

    :param config:
        Validated experiment config.
    :type config: dict

    :param seed:
        Run seed.
    :type seed: int

    :return:
        Learning curve.
    :rtype: list[ignd.utils.CurvePoint]
    """
    try:
        sol = _registered_model()(
            {'config': config, 'seed': int(seed)}, outputs=['curve']
        )
    except Exception as ex:
        err = find_error(ex, IGNDError)
        if err is None or err is ex:
            raise
        raise err from None
    return sol['curve']
