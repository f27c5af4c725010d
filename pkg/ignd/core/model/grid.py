# -*- coding: utf-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
"""
It contains functions to score the learning-rate grid search.

A run is scored by the mean of the last `window_fraction` of its objective
metric. Every alpha is scored over all its seeds; diverged seeds are counted
and excluded from the mean.
"""
import logging
import collections
import numpy as np
from ...defaults import dfl
from ...errors import AllRunsDiverged, Diverged
from ...utils import final_window_mean

log = logging.getLogger(__name__)

#: Objective metric per family and whether it is maximized.
OBJECTIVES = {
    'supervised': ('test_mse', False),
    'frozenlake': ('return', True),
    'cartpole': ('return', True),
    'lqr': ('k_error_inf', False),
}

#: One row of the grid table.
GridRow = collections.namedtuple(
    'GridRow', ['alpha', 'mean', 'sd', 'diverged', 'n_seeds']
)


def score_curve(curve, metric, window_fraction=None):
    """
    Returns the final-window mean of a metric of a learning curve.

    :param curve:
        Learning curve.
    :type curve: list[ignd.utils.CurvePoint]

    :param metric:
        Objective metric.
    :type metric: str

    :param window_fraction:
        Averaged fraction of the final values.
    :type window_fraction: float, optional

    :return:
        Score (NaN if the metric is missing).
    :rtype: float
    """
    if window_fraction is None:
        window_fraction = dfl.functions.select_best_alpha.window_fraction
    values = [p.value for p in curve if p.metric == metric]
    return final_window_mean(values, window_fraction)


def grid_table(alphas, scores):
    """
    Aggregates the seed scores per alpha.

    :param alphas:
        Grid values in evaluation order.
    :type alphas: list[float]

    :param scores:
        Seed scores per alpha (None for a diverged seed).
    :type scores: dict[float, list[float | None]]

    :return:
        Grid table.
    :rtype: list[GridRow]
    """
    rows = []
    for alpha in alphas:
        s = scores[alpha]
        ok = np.array([v for v in s if v is not None and np.isfinite(v)])
        rows.append(GridRow(
            float(alpha), float(ok.mean()) if ok.size else np.nan,
            float(ok.std()) if ok.size else np.nan, len(s) - ok.size, len(s)
        ))
    return rows


def select_best_alpha(rows, maximize=False):
    """
    Selects the best alpha of the grid table.

    Alphas rank by the mean score of their surviving seeds, ties are broken
    by the fewer diverged seeds.

    :param rows:
        Grid table.
    :type rows: list[GridRow]

    :param maximize:
        Maximize the score?
    :type maximize: bool

    :return:
        Best row.
    :rtype: GridRow
    """
    rows = [r for r in rows if r.diverged < r.n_seeds]
    if not rows:
        raise AllRunsDiverged('Every run of the grid search diverged!')
    sign = -1 if maximize else 1
    return min(rows, key=lambda r: (sign * r.mean, r.diverged))


def grid_search(alphas, seeds, evaluate, maximize=False):
    """
    Evaluates every (alpha, seed) pair and selects the best alpha.

    :param alphas:
        Grid values.
    :type alphas: list[float]

    :param seeds:
        Run seeds.
    :type seeds: list[int]

    :param evaluate:
        Score function `(alpha, seed) -> float`; it raises
        :class:`ignd.errors.Diverged` on divergence.
    :type evaluate: callable

    :param maximize:
        Maximize the score?
    :type maximize: bool

    :return:
        Best alpha and the full grid table.
    :rtype: (float, list[GridRow])
    """
    scores = collections.OrderedDict()
    for alpha in alphas:
        scores[alpha] = []
        for seed in seeds:
            try:
                scores[alpha].append(float(evaluate(alpha, seed)))
            except Diverged as ex:
                log.info('alpha=%r seed=%d diverged: %s', alpha, seed, ex)
                scores[alpha].append(None)
    rows = grid_table(list(scores), scores)
    return select_best_alpha(rows, maximize).alpha, rows
