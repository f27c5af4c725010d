#!/usr/bin/env python
# -*- coding: UTF-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
"""
It contains classes and functions of general utility.
"""
import collections
import numpy as np

#: One learning-curve observation (`step` is a step, episode or improvement
#: index depending on the experiment family).
CurvePoint = collections.namedtuple('CurvePoint', ['step', 'metric', 'value'])


# noinspection PyMissingOrEmptyDocstring
class Constants(dict):
    def load(self, file, **kw):
        import yaml
        kw['Loader'] = kw.get(
            'Loader', getattr(yaml, 'CSafeLoader', yaml.SafeLoader)
        )
        with open(file, 'rb') as f:
            self.from_dict(yaml.load(f, **kw))
        return self

    def dump(self, file, default_flow_style=False, **kw):
        import yaml
        kw['Dumper'] = kw.get(
            'Dumper', getattr(yaml, 'CSafeDumper', yaml.SafeDumper)
        )
        with open(file, 'w') as f:
            yaml.dump(
                self.to_dict(), f, default_flow_style=default_flow_style, **kw
            )

    def from_dict(self, d):
        for k, v in sorted(d.items()):
            if isinstance(v, dict) and '__constants__' in v:
                o = getattr(self, k, Constants())
                if isinstance(o, Constants):
                    v = o.from_dict(v['__constants__'])
                elif issubclass(o.__class__, Constants) or \
                        issubclass(o, Constants):
                    v = o().from_dict(v['__constants__'])
                if not v:
                    continue
            elif hasattr(self, k) and getattr(self, k) == v:
                continue
            setattr(self, k, v)
            self[k] = v

        return self

    def to_dict(self):
        import inspect
        s, pr = set(dir(self)) - set(dir(Constants)), {}
        for n in s.union(self.__class__.__dict__.keys()):
            if n.startswith('__'):
                continue
            v = getattr(self, n)
            if inspect.ismethod(v) or inspect.isbuiltin(v) or \
                    inspect.isfunction(v):
                continue
            if isinstance(v, Constants):
                pr[n] = {'__constants__': v.to_dict()}
            elif inspect.isclass(v) and issubclass(v, Constants):
                # noinspection PyCallByClass,PyTypeChecker
                pr[n] = {'__constants__': v.to_dict(v)}
            elif isinstance(v, tuple):
                pr[n] = list(v)
            else:
                pr[n] = v
        return pr


def seeded_rng(seed, *keys):
    """
    Returns a counter-based (Philox) random generator.

    Identical `seed` and `keys` give the same stream on every platform;
    different `keys` give statistically independent sub-streams of the same
    seed.

    :param seed:
        Non-negative seed.
    :type seed: int

    :param keys:
        Sub-stream identifiers.
    :type keys: int

    :return:
        Random generator.
    :rtype: numpy.random.Generator

    Example::

        >>> a, b = seeded_rng(1).random(), seeded_rng(1).random()
        >>> a == b
        True
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(map(int, keys)))
    return np.random.Generator(np.random.Philox(ss))


def greedy_action(values, rng=None, tol=None):
    """
    Returns the index of the greatest value.

    Values within `tol·max(1, |max|)` of the maximum are tied; ties are broken
    by lowest index, or by a draw from `rng` when given. The tie set, not the
    exact floats, decides the draw.

    :param values:
        Action values.
    :type values: numpy.array

    :param rng:
        Random generator for tie-breaking.
    :type rng: numpy.random.Generator, optional

    :param tol:
        Relative tie tolerance.
    :type tol: float, optional

    :return:
        Greedy action index.
    :rtype: int
    """
    if tol is None:
        from .defaults import dfl
        tol = dfl.functions.greedy_action.tie_tol
    values = np.where(np.isnan(values), -np.inf, np.asarray(values, float))
    m = values.max()
    if np.isfinite(m):
        tied = np.flatnonzero(values >= m - tol * max(1.0, abs(m)))
    elif m > 0:
        tied = np.flatnonzero(values == m)
    else:
        tied = np.arange(values.size)
    if rng is None or tied.size == 1:
        return int(tied[0])
    return int(tied[rng.integers(tied.size)])


def logspace_grid(lo, hi, n, logspace=True):
    """
    Returns the learning-rate grid, endpoints included.

    :param lo:
        Lower bound.
    :type lo: float

    :param hi:
        Upper bound.
    :type hi: float

    :param n:
        Number of points.
    :type n: int

    :param logspace:
        Log-uniform spacing?
    :type logspace: bool

    :return:
        Grid values.
    :rtype: numpy.array
    """
    if logspace:
        return np.logspace(np.log10(lo), np.log10(hi), int(n))
    return np.linspace(lo, hi, int(n))


def final_window_mean(values, fraction=0.1):
    """
    Mean of the last `fraction` of the values (at least one value).

    :param values:
        Metric sequence.
    :type values: list[float] | numpy.array

    :param fraction:
        Window fraction.
    :type fraction: float

    :return:
        Final-window mean.
    :rtype: float
    """
    values = np.asarray(values, dtype=float)
    if not values.size:
        return np.nan
    n = max(1, int(np.ceil(values.size * fraction)))
    return float(values[-n:].mean())
