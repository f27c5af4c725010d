# -*- coding: utf-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
"""
Functions and `dsp` model to run an experiment.

The configuration is loaded and validated, the output files are prepared, then
every (alpha, seed) cell of the run plan is executed and its records are
appended to the CSV in plan order.

Sub-Modules:

.. currentmodule:: ignd.core

.. autosummary::
    :nosignatures:
    :toctree: core/

    load
    model
    write
"""
import logging
import collections
import schedula as sh
from ..errors import (
    Diverged, IndefiniteMaa, SingularInnerMatrix, DegenerateScale,
    NoConvergence, NonFiniteValue, VerificationFailed
)
from ..utils import CurvePoint
from .load import dsp as _load
from .write import dsp as _write

log = logging.getLogger(__name__)

dsp = sh.BlueDispatcher(
    name='core', raises=True, description='Runs an experiment.'
)

#: Errors that stop one run without stopping the others.
RUN_FAILURES = (
    Diverged, IndefiniteMaa, SingularInnerMatrix, DegenerateScale,
    NoConvergence, NonFiniteValue
)

#: One (alpha, seed) cell of the run plan.
Cell = collections.namedtuple('Cell', ['alpha', 'seed', 'run_id'])

#: Outcome of one cell (`error` is None on success).
CellResult = collections.namedtuple(
    'CellResult', ['alpha', 'seed', 'run_id', 'curve', 'error']
)

dsp.add_dispatcher(
    dsp=_load,
    inputs=('config_file', 'family', 'cmd_flags', 'grid_search'),
    outputs=('config',)
)

dsp.add_dispatcher(
    dsp=_write,
    inputs=('config',),
    outputs=('output_dir', 'records_file', 'run_log', 'config_snapshot',
             'plot_script')
)


@sh.add_function(dsp, outputs=['alphas'])
def define_alphas(config):
    """
    Defines the learning rates to run.

    :param config:
        Validated experiment config.
    :type config: dict

    :return:
        Grid values, or the configured learning rate.
    :rtype: list[float]
    """
    if config['grid.enabled']:
        from ..utils import logspace_grid
        return [float(a) for a in logspace_grid(
            config['grid.lo'], config['grid.hi'], config['grid.n'],
            config['grid.logspace']
        )]
    return [config['optimizer.alpha']]


@sh.add_function(dsp, outputs=['run_plan'])
def define_run_plan(config, alphas):
    """
    Defines the (alpha, seed) cells in output order.

    :param config:
        Validated experiment config.
    :type config: dict

    :param alphas:
        Learning rates to run.
    :type alphas: list[float]

    :return:
        Run plan.
    :rtype: list[Cell]
    """
    plan = []
    for alpha in alphas:
        run_id = config['run_id']
        if config['grid.enabled']:
            run_id = '%s@alpha=%r' % (run_id, alpha)
        plan.extend(Cell(alpha, seed, run_id) for seed in config['seeds'])
    return plan


def cell_config(config, alpha):
    """
    Returns the config of one cell.

    :param config:
        Validated experiment config.
    :type config: dict

    :param alpha:
        Learning rate of the cell.
    :type alpha: float

    :rtype: dict
    """
    return sh.combine_dicts(config, {'optimizer.alpha': alpha})


def _run_cell(task):
    from .model import run_cell
    config, seed = task
    try:
        return run_cell(config, seed), None
    except RUN_FAILURES as ex:
        return None, '%s: %s' % (type(ex).__name__, ex)


def _init_worker(model_conf):
    from ..defaults import dfl
    dfl.from_dict(model_conf)


def _format_meter(bar, cell):
    return '%s: Running %s (seed %d)\n' % (bar, cell.run_id, cell.seed)


def _map_cells(config, plan):
    tasks = [(cell_config(config, c.alpha), c.seed) for c in plan]
    if config['jobs'] > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor
        from ..defaults import dfl
        with ProcessPoolExecutor(
                max_workers=config['jobs'], initializer=_init_worker,
                initargs=(dfl.to_dict(),)) as executor:
            yield from executor.map(_run_cell, tasks)
    else:
        yield from map(_run_cell, tasks)


# noinspection PyUnusedLocal
@sh.add_function(dsp, outputs=['cells'])
def run_cells(config, run_plan, records_file, run_log):
    """
    Runs the cells of the plan and appends their records to the CSV.

    Cells may run concurrently (`jobs`), the records are written in plan order.

    :param config:
        Validated experiment config.
    :type config: dict

    :param run_plan:
        Run plan.
    :type run_plan: list[Cell]

    :param records_file:
        Records path.
    :type records_file: str

    :param run_log:
        Run log handler.
    :type run_log: logging.FileHandler

    :return:
        Cell outcomes.
    :rtype: list[CellResult]
    """
    from .. import _ProgressBar
    from .write import RecordsWriter
    results = []
    bar = _ProgressBar(run_plan, _format_meter=_format_meter)
    with RecordsWriter(records_file) as writer:
        for cell, (curve, error) in zip(bar, _map_cells(config, run_plan)):
            if error is None:
                writer.write(cell.run_id, cell.seed, curve)
            else:
                log.warning('%s seed %d failed: %s', cell.run_id, cell.seed,
                            error)
            results.append(CellResult(*cell, curve, error))
    log.info('Records written into (%s).', records_file)
    return results


@sh.add_function(
    dsp, outputs=['best_alpha', 'grid_table'],
    input_domain=lambda config, *args: config['grid.enabled']
)
def score_grid(config, alphas, cells, records_file):
    """
    Scores the grid search and appends the table to the records.

    Rows of run id `<run_id>-grid` (no seed, step = alpha index) hold the
    metrics `grid_alpha`, `grid_score`, `grid_score_sd` and `grid_diverged`;
    `grid_best_alpha` closes the table. Failed runs raise :class:`Diverged`
    once the table is written.

    :param config:
        Validated experiment config.
    :type config: dict

    :param alphas:
        Grid values.
    :type alphas: list[float]

    :param cells:
        Cell outcomes.
    :type cells: list[CellResult]

    :param records_file:
        Records path.
    :type records_file: str

    :return:
        Best alpha and grid table.
    :rtype: (float, list[ignd.core.model.grid.GridRow])
    """
    from .write import RecordsWriter
    from .model.grid import (
        OBJECTIVES, score_curve, grid_table, select_best_alpha
    )
    metric, maximize = OBJECTIVES[config['family']]
    scores = {a: [] for a in alphas}
    for c in cells:
        scores[c.alpha].append(
            None if c.error else score_curve(c.curve, metric)
        )
    rows, curve = grid_table(alphas, scores), []
    for i, r in enumerate(rows):
        curve.extend((
            CurvePoint(i, 'grid_alpha', r.alpha),
            CurvePoint(i, 'grid_score', r.mean),
            CurvePoint(i, 'grid_score_sd', r.sd),
            CurvePoint(i, 'grid_diverged', float(r.diverged))
        ))
        log.info('alpha=%r: %s %g ± %g (%d/%d diverged)', r.alpha, metric,
                 r.mean, r.sd, r.diverged, r.n_seeds)
    try:
        best = select_best_alpha(rows, maximize)
        curve.append(CurvePoint(len(rows), 'grid_best_alpha', best.alpha))
        log.info('Best alpha: %r.', best.alpha)
    finally:
        with RecordsWriter(records_file, append=True) as writer:
            writer.write('%s-grid' % config['run_id'], None, curve)
    failed = sum(1 for c in cells if c.error)
    if failed:
        raise Diverged('%d of %d grid runs failed (best alpha %r)!' % (
            failed, len(cells), best.alpha
        ))
    return best.alpha, rows


@sh.add_function(dsp, outputs=['outcome'])
def check_outcome(config, cells, config_snapshot, plot_script):
    """
    Reports the failed runs and checks the experiment outcome.

    :param config:
        Validated experiment config.
    :type config: dict

    :param cells:
        Cell outcomes.
    :type cells: list[CellResult]

    :param config_snapshot:
        Config snapshot path.
    :type config_snapshot: str

    :param plot_script:
        Plot script path.
    :type plot_script: str

    :return:
        Number of successful runs.
    :rtype: int
    """
    failed = [c for c in cells if c.error]
    if failed:
        msg = ['\n%d of %d runs failed:' % (len(failed), len(cells))]
        msg.extend('%s seed %d: %s' % (c.run_id, c.seed, c.error)
                   for c in failed)
        log.error('\n  '.join(msg))
    if config['family'] == 'verify':
        bad = sorted({p.metric for c in cells if c.curve for p in c.curve
                      if not p.metric.endswith('.error') and p.value != 1})
        if bad:
            raise VerificationFailed('Failed checks: %s!' % ', '.join(bad))
    # Grid failures are raised by `score_grid`.
    elif failed and not config['grid.enabled']:
        raise Diverged('%d of %d runs failed!' % (len(failed), len(cells)))
    return len(cells) - len(failed)
