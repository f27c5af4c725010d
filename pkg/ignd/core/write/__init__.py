# -*- coding: utf-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
"""
Functions and `dsp` model to write the experiment outputs.

An output directory holds exactly:

- `config.yaml`: validated configuration snapshot (sorted flat keys),
- `records.csv`: records `run_id,seed,step,metric,value`,
- `plot.py`: script plotting mean ± 1 standard deviation over seeds,
- `run.log`: timestamped run log.

Sub-Modules:

.. currentmodule:: ignd.core.write

.. autosummary::
    :nosignatures:
    :toctree: write/

    plot
"""
import os
import logging
import os.path as osp
import schedula as sh
from ..._version import __version__

log = logging.getLogger(__name__)

dsp = sh.BlueDispatcher(
    name='write', raises=True,
    description='Writes the outputs of an experiment.'
)

#: Output file names.
FILES = {
    'records_file': 'records.csv',
    'config_snapshot_file': 'config.yaml',
    'plot_file': 'plot.py',
    'run_log_file': 'run.log',
}

#: Records header.
COLUMNS = ('run_id', 'seed', 'step', 'metric', 'value')


@sh.add_function(dsp, outputs=['output_dir'] + list(FILES))
def define_output_files(config):
    """
    Creates the output directory and defines the output file paths.

    :param config:
        Validated experiment config.
    :type config: dict

    :return:
        Output directory and the paths of records, config snapshot, plot
        script and run log.
    :rtype: tuple[str]
    """
    out = config['output_dir']
    os.makedirs(out, exist_ok=True)
    return (out,) + tuple(osp.join(out, v) for v in FILES.values())


class _RunLogHandler(logging.FileHandler):
    pass


@sh.add_function(dsp, outputs=['run_log'])
def open_run_log(run_log_file):
    """
    Attaches the `run.log` file handler to the root logger.

    :param run_log_file:
        Run log path.
    :type run_log_file: str

    :return:
        File handler.
    :rtype: logging.FileHandler
    """
    close_run_logs()
    handler = _RunLogHandler(run_log_file, mode='w', encoding='utf-8')
    handler.setFormatter(logging.Formatter(
        '%(asctime)-15s:%(levelname)5.5s:%(name)s:%(message)s'
    ))
    handler.setLevel(logging.INFO)
    logging.getLogger().addHandler(handler)
    log.info('igndkit %s: run log opened.', __version__)
    return handler


def close_run_logs():
    """
    Detaches and closes every `run.log` file handler.
    """
    root = logging.getLogger()
    for h in list(root.handlers):
        if isinstance(h, _RunLogHandler):
            root.removeHandler(h)
            h.close()


@sh.add_function(dsp, outputs=['config_snapshot'])
def save_config_snapshot(config_snapshot_file, config):
    """
    Writes the validated configuration with sorted flat keys.

    :param config_snapshot_file:
        Config snapshot path.
    :type config_snapshot_file: str

    :param config:
        Validated experiment config.
    :type config: dict

    :return:
        Config snapshot path.
    :rtype: str
    """
    import yaml
    dumper = getattr(yaml, 'CSafeDumper', yaml.SafeDumper)
    with open(config_snapshot_file, 'w', encoding='utf-8') as f:
        yaml.dump(
            dict(sorted(config.items())), f, Dumper=dumper,
            default_flow_style=False, sort_keys=True
        )
    log.info('Config snapshot written into (%s).', config_snapshot_file)
    return config_snapshot_file


@sh.add_function(dsp, outputs=['plot_script'])
def save_plot_script(plot_file, config):
    """
    Writes the plotting script of the records.

    :param plot_file:
        Plot script path.
    :type plot_file: str

    :param config:
        Validated experiment config.
    :type config: dict

    :return:
        Plot script path.
    :rtype: str
    """
    from .plot import plot_script
    with open(plot_file, 'w', encoding='utf-8') as f:
        f.write(plot_script(config))
    log.info('Plot script written into (%s).', plot_file)
    return plot_file


def format_record(run_id, seed, point):
    """
    Formats one record as CSV cells (floats as their shortest repr).

    :param run_id:
        Run identifier.
    :type run_id: str

    :param seed:
        Run seed (None for aggregate rows).
    :type seed: int | None

    :param point:
        Curve point.
    :type point: ignd.utils.CurvePoint

    :return:
        Record cells.
    :rtype: tuple[str]
    """
    return (
        str(run_id), '' if seed is None else str(int(seed)),
        str(int(point.step)), str(point.metric), repr(float(point.value))
    )


class RecordsWriter:
    """
    Appends records to the CSV file, flushing after every block.

    :param records_file:
        Records path.
    :type records_file: str

    :param append:
        Append to an existing file (otherwise it is truncated and the header
        is written).
    :type append: bool
    """

    def __init__(self, records_file, append=False):
        self.records_file, self.append, self.n_rows = records_file, append, 0
        self._file = None

    def __enter__(self):
        self._file = open(
            self.records_file, 'a' if self.append else 'w', encoding='utf-8',
            newline=''
        )
        if not self.append:
            self._write([], header=True)
        return self

    def __exit__(self, *exc):
        self._file.close()
        self._file = None

    def _write(self, rows, header=False):
        import pandas as pd
        pd.DataFrame(rows, columns=COLUMNS, dtype=str).to_csv(
            self._file, header=header, index=False, lineterminator='\n'
        )
        self._file.flush()

    def write(self, run_id, seed, curve):
        """
        Appends the records of one curve.

        :param run_id:
            Run identifier.
        :type run_id: str

        :param seed:
            Run seed (None for aggregate rows).
        :type seed: int | None

        :param curve:
            Learning curve.
        :type curve: list[ignd.utils.CurvePoint]
        """
        rows = [format_record(run_id, seed, p) for p in curve]
        if rows:
            self._write(rows)
            self.n_rows += len(rows)
