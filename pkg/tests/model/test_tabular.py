#!/usr/bin/env python
# -*- coding: UTF-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl

import ddt
import unittest
import collections
import numpy as np
import numpy.testing as nt
import ignd.core.model.tabular as tab
from ignd.utils import seeded_rng
from ignd.core.model.optim import OptimConfig
from ignd.errors import SteppedTerminal, IndexOutOfRange, ZeroScale


def _returns(records):
    return np.array([r.value for r in records if r.metric == 'return'])


def _run(rule, seed=0, phi=None, alpha=1.0, steps=5000, trace=None, **kw):
    return tab.tabular_q_learning(
        tab.GridWorld(), OptimConfig(rule, alpha, epsilon=0), 0.99, steps,
        0.1, seed, phi=phi, trace=trace, **kw
    )


@ddt.ddt
class GridWorld(unittest.TestCase):
    def setUp(self):
        self.env = tab.GridWorld()

    def test_layout(self):
        env = self.env
        self.assertEqual((env.n_states, env.n_actions), (16, 4))
        self.assertEqual((env.start, env.goal), (0, 15))
        self.assertSetEqual(set(env.holes), {5, 7, 11, 12})

    @ddt.data(
        (0, 2, 1, 0.0, False),
        (0, 0, 0, 0.0, False),
        (0, 3, 0, 0.0, False),
        (14, 2, 15, 1.0, True),
        (1, 1, 5, 0.0, True)
    )
    @ddt.unpack
    def test_step(self, s, a, nxt, reward, terminal):
        tr = tab.env_step(self.env, s, a)
        self.assertEqual(tr, tab.Transition(s, a, reward, nxt, terminal))

    def test_step_limit(self):
        self.assertTrue(tab.env_step(self.env, 0, 0, elapsed=99).terminal)
        self.assertRaises(
            SteppedTerminal, tab.env_step, self.env, 0, 0, elapsed=100
        )

    @ddt.data(5, 15)
    def test_stepped_terminal(self, s):
        self.assertRaises(SteppedTerminal, tab.env_step, self.env, s, 0)

    def test_invalid(self):
        self.assertRaises(IndexOutOfRange, tab.env_step, self.env, 16, 0)
        self.assertRaises(IndexOutOfRange, tab.env_step, self.env, 0, 4)

    def test_slippery(self):
        env, rng = tab.GridWorld(slippery=True), seeded_rng(7)
        counts = collections.Counter(
            tab.env_step(env, 9, 2, rng).next_state for _ in range(30000)
        )
        # Right (10), or perpendicular: down (13) and up (5).
        self.assertSetEqual(set(counts), {5, 10, 13})
        for v in counts.values():
            self.assertAlmostEqual(v / 30000, 1 / 3, delta=0.015)


class FeatureScale(unittest.TestCase):
    def test_non_zero(self):
        phi = tab.sample_feature_scale(10000, 1, seeded_rng(0))
        self.assertTrue(phi.all())
        self.assertSetEqual(set(phi), {-1.0, 1.0})

    def test_range(self):
        phi = tab.sample_feature_scale(64, 10000, seeded_rng(1))
        self.assertLessEqual(np.abs(phi).max(), 10000)
        nt.assert_array_equal(phi, np.round(phi))


class QLearning(unittest.TestCase):
    def test_episodes(self):
        res = _run('ignd', steps=2000)
        steps = [r.value for r in res if r.metric == 'steps']
        env_steps = [r.value for r in res if r.metric == 'env_steps']
        self.assertTrue(all(0 < s <= 100 for s in steps))
        nt.assert_array_equal(np.cumsum(steps), env_steps)
        self.assertTrue(set(_returns(res)) <= {0.0, 1.0})
        self.assertFalse(
            [r for r in res if r.metric == 'q_bound_violations']
        )

    def test_ql_equals_igndq_unscaled(self):
        t1, t2 = [], []
        r1, r2 = _run('sgd', trace=t1), _run('ignd', trace=t2)
        self.assertListEqual(t1, t2)
        nt.assert_array_equal(_returns(r1), _returns(r2))

    def test_igndq_scale_invariance(self):
        phi = tab.sample_feature_scale(64, 10000, seeded_rng(3))
        t1, t2 = [], []
        r1 = _run('ignd', seed=4, trace=t1)
        r2 = _run('ignd', seed=4, phi=phi, trace=t2)
        nt.assert_allclose(t2, t1, rtol=1e-9, atol=1e-12)
        nt.assert_array_equal(_returns(r2), _returns(r1))

    def test_igndq_learns(self):
        means = [
            _returns(_run('ignd', seed=s))[-50:].mean() for s in range(20)
        ]
        self.assertGreaterEqual(np.mean(means), 0.5)

    def test_scaled_ql_compromised(self):
        means = []
        for seed in range(20):
            phi = tab.sample_feature_scale(64, 10000, seeded_rng(seed, 203))
            means.append(_returns(_run('sgd', seed, phi)).mean())
        self.assertLess(np.mean(means), 0.05)

    def test_first_tie_break(self):
        res = _run('ignd', seed=2, steps=500, tie_break='first')
        self.assertListEqual(
            res, _run('ignd', seed=2, steps=500, tie_break='first')
        )

    def test_invalid(self):
        env, config = tab.GridWorld(), OptimConfig('ignd')
        self.assertRaises(
            ValueError, tab.tabular_q_learning, env, config, 1.5, 10, 0.1, 0
        )
        self.assertRaises(
            ZeroScale, tab.tabular_q_learning, env, config, 0.9, 10, 0.1, 0,
            np.zeros(64)
        )
        self.assertRaises(
            IndexOutOfRange, tab.tabular_q_learning, env, config, 0.9, 10,
            0.1, 0, np.ones(3)
        )


if __name__ == '__main__':
    unittest.main()
