# -*- coding: utf-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
"""
Defines the command processing model `dsp`.

.. currentmodule:: ignd

.. autosummary::
    :nosignatures:
    :toctree: toctree/ignd/

    ~core
    ~cli
    ~numkit
    ~utils
    ~errors
    ~defaults
"""
import os
import tqdm
import logging
import os.path as osp
import schedula as sh
from ignd._version import *

log = logging.getLogger(__name__)
dsp = sh.BlueDispatcher(name='process', raises=True)


def init_conf(inputs):
    """
    Initialize the model constants.

    :param inputs:
         Initialization inputs.
    :type inputs: dict | schedula.Token

    :return:
        Initialization inputs.
    :rtype: dict | schedula.Token
    """
    if inputs is not sh.NONE and inputs.get('model_conf'):
        from ignd.defaults import dfl
        dfl.load(inputs['model_conf'])
        log.info('Model configuration file (%s) loaded.' % inputs['model_conf'])
    return inputs


dsp.add_data(sh.START, filters=[init_conf, lambda x: sh.NONE])


@sh.add_function(dsp, outputs=['conf'])
def save_ignd_conf(output_file):
    """
    Save the model constants.

    :param output_file:
        Output file.
    :type output_file: str
    """
    from ignd.defaults import dfl
    os.makedirs(osp.dirname(output_file) or '.', exist_ok=True)
    dfl.dump(output_file)
    log.info('Model configurations written into (%s).', output_file)


def family_template(family):
    """
    Returns the fully populated example config of an experiment family.

    :param family:
        Experiment family.
    :type family: str

    :return:
        Flat configuration with the family defaults.
    :rtype: dict
    """
    from ignd.defaults import dfl
    exp = dfl.experiments
    conf = dict(exp.common.CONFIG)
    conf.update(getattr(exp, family).CONFIG)
    conf['family'] = family
    return conf


@sh.add_function(dsp, outputs=['template'])
def save_ignd_template(template_file, family):
    """
    Save an example experiment config.

    :param template_file:
        Output file.
    :type template_file: str

    :param family:
        Experiment family.
    :type family: str
    """
    import yaml
    dumper = getattr(yaml, 'CSafeDumper', yaml.SafeDumper)
    os.makedirs(osp.dirname(template_file) or '.', exist_ok=True)
    with open(template_file, 'w', encoding='utf-8') as f:
        yaml.dump(
            family_template(family), f, Dumper=dumper,
            default_flow_style=False, sort_keys=True
        )
    log.info('Experiment template (%s) written into (%s).', family,
             template_file)


@sh.add_function(dsp, outputs=['core_model'])
def register_core():
    """
    Register core model.

    :return:
        Experiment core model.
    :rtype: schedula.Dispatcher
    """
    from .core import dsp
    return dsp.register(memo={})


class _ProgressBar(tqdm.tqdm):
    def __init__(self, *args, _format_meter=None, **kwargs):
        if _format_meter:
            self._format_meter = _format_meter
        super(_ProgressBar, self).__init__(*args, **kwargs)

    @staticmethod
    def _format_meter(bar, data):
        return '%s: Processing %s\n' % (bar, data)

    # noinspection PyMissingOrEmptyDocstring
    def format_meter(self, n, *args, **kwargs):
        bar = super(_ProgressBar, self).format_meter(n, *args, **kwargs)
        try:
            return self._format_meter(bar, self.iterable[n])
        except (IndexError, TypeError):
            return bar


@sh.add_function(dsp, outputs=['start_time'])
def default_start_time():
    """
    Returns the default run start time.

    :return:
        Run start time.
    :rtype: datetime.datetime
    """
    import datetime
    return datetime.datetime.today()


@sh.add_function(dsp, outputs=['outcome'])
def run_core(core_model, cmd_flags, config_file, family, grid_search):
    """
    Run core model.

    :param core_model:
        Experiment core model.
    :type core_model: schedula.Dispatcher

    :param config_file:
        Experiment config file `.yaml`.
    :type config_file: str

    :param family:
        Experiment family of the sub-command (default: from the config file).
    :type family: str

    :param cmd_flags:
        Command line options.
    :type cmd_flags: dict

    :param grid_search:
        Run the learning-rate grid search?
    :type grid_search: bool

    :return:
        Number of successful runs.
    :rtype: int
    """
    from .core.write import close_run_logs
    try:
        sol = core_model(dict(
            config_file=config_file, family=family, cmd_flags=cmd_flags,
            grid_search=grid_search
        ), outputs=['outcome', 'best_alpha'])
    finally:
        close_run_logs()
    return sol['outcome']


@sh.add_function(dsp, outputs=['done'], weight=sh.inf(100, 0))
def log_done(start_time):
    """
    Logs the overall execution time.

    :param start_time:
        Run start time.
    :type start_time: datetime.datetime

    :return:
        Execution time [s].
    :rtype: float
    """
    import datetime
    sec = (datetime.datetime.today() - start_time).total_seconds()
    log.info('Done! [%.2f sec]' % sec)
    return sec
