# -*- coding: utf-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
"""
It generates the plotting script written next to the records.
"""

_TEMPLATE = '''#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Plots the `{run_id}` records as mean (thick line) +/- 1 standard deviation
(band) over seeds.

Usage: python plot.py [METRIC]   (default: {metric})
"""
import sys
import os.path as osp
import pandas as pd
import plotly.graph_objects as go

RECORDS = osp.join(osp.dirname(osp.abspath(__file__)), 'records.csv')


def main(metric={metric!r}):
    df = pd.read_csv(RECORDS)
    metric = metric or df['metric'].iloc[0]
    df = df[df['metric'] == metric]
    fig = go.Figure()
    for run_id, d in df.groupby('run_id', sort=False):
        s = d.groupby('step')['value'].agg(['mean', 'std']).fillna(0.0)
        x, lo, hi = list(s.index), s['mean'] - s['std'], s['mean'] + s['std']
        fig.add_trace(go.Scatter(
            x=x + x[::-1], y=list(hi) + list(lo)[::-1], fill='toself',
            opacity=0.25, line=dict(width=0), hoverinfo='skip',
            showlegend=False, name=run_id
        ))
        fig.add_trace(go.Scatter(
            x=x, y=list(s['mean']), mode='lines', line=dict(width=3),
            name=run_id
        ))
    fig.update_layout(
        title={run_id!r}, xaxis_title={x_label!r}, yaxis_title=metric
    )
    fig.show()


if __name__ == '__main__':
    main(*sys.argv[1:2])
'''

#: Default plotted metric and x-axis label per family.
_AXES = {
    'supervised': ('test_mse', 'step'),
    'frozenlake': ('return', 'episode'),
    'cartpole': ('return', 'episode'),
    'lqr': ('k_error_inf', 'improvement'),
    'verify': (None, 'check'),
}


def plot_script(config):
    """
    Returns the source of the plotting script of an experiment.

    The script reads `records.csv` from its own directory and shows one line
    per run (mean over seeds per step) with a ±1 standard deviation band.

    :param config:
        Validated experiment config.
    :type config: dict

    :return:
        Python source.
    :rtype: str
    """
    metric, x_label = _AXES[config['family']]
    if config.get('grid.enabled'):
        metric = 'grid_score'
        x_label = 'alpha index'
    return _TEMPLATE.format(
        run_id=config['run_id'], metric=metric, x_label=x_label
    )
