#! python
# -*- coding: UTF-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl

import os
import ddt
import tempfile
import unittest
import ignd.core.load as load
from ignd.errors import ConfigError, find_error


def _config(family='frozenlake', raw=None, flags=None, grid_search=False):
    return load.validate_config(load.merge_config(
        raw or {}, family, flags, grid_search
    ))


@ddt.ddt
class Load(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def _write(self, text):
        fp = os.path.join(self.tmp.name, 'config.yaml')
        with open(fp, 'w', encoding='utf-8') as f:
            f.write(text)
        return fp

    def test_flatten(self):
        res = load.flatten_config({
            'steps': 10, 'optimizer': {'alpha': 0.5, 'rule': 'sgd'},
            'supervised': {'columns': {'cut': 'categorical'}}
        })
        self.assertEqual(res, {
            'steps': 10, 'optimizer.alpha': 0.5, 'optimizer.rule': 'sgd',
            'supervised.columns': {'cut': 'categorical'}
        })

    def test_read(self):
        self.assertEqual(load.read_config_file(None), {})
        fp = self._write('family: lqr\noptimizer:\n  alpha: 0.5\n')
        self.assertEqual(load.read_config_file(fp), {
            'family': 'lqr', 'optimizer.alpha': 0.5
        })
        self.assertEqual(load.read_config_file(self._write('')), {})

    @ddt.data('- 1\n- 2\n', 'a: [1, 2\n')
    def test_read_invalid(self, text):
        self.assertRaises(
            ConfigError, load.read_config_file, self._write(text)
        )

    @ddt.data(
        ({'seeds': 3}, 'lqr', {'seeds': [0, 1, 2]}),
        ({'seed': 7, 'alpha': None}, 'lqr', {'seeds': [7]}),
        ({'steps': 20}, 'cartpole', {'episodes': 20}),
        ({'steps': 20, 'optimizer': 'sgd'}, 'lqr', {
            'steps': 20, 'optimizer.rule': 'sgd'
        }),
        ({'out': 'o', 'jobs': 2, 'quick': True}, 'verify', {
            'output_dir': 'o', 'jobs': 2, 'verify.quick': True
        })
    )
    @ddt.unpack
    def test_cmd_flags(self, flags, family, res):
        self.assertEqual(load.parse_cmd_flags(flags, family), res)

    def test_merge(self):
        res = load.merge_config(
            {'family': 'lqr', 'optimizer.alpha': 0.5, 'steps': 7},
            None, {'alpha': 0.25}
        )
        self.assertEqual(res['family'], 'lqr')
        self.assertEqual(res['optimizer.alpha'], 0.25)
        self.assertEqual(res['steps'], 7)
        self.assertEqual(res['lqr.improvements'], 50)
        self.assertFalse(res['grid.enabled'])

    def test_family_override(self):
        with self.assertLogs('ignd.core.load', 'WARNING'):
            res = load.merge_config({'family': 'lqr'}, 'frozenlake')
        self.assertEqual(res['family'], 'frozenlake')

    def test_defaults(self):
        config = _config()
        self.assertEqual(config['run_id'], 'frozenlake-ignd')
        self.assertEqual(config['seeds'], [0])
        self.assertEqual(config['steps'], 5000)
        self.assertEqual(_config(raw={'run_id': 'x'})['run_id'], 'x')

    def test_rule_alias(self):
        config = _config(raw={'optimizer.rule': 'QL'})
        self.assertEqual(config['optimizer.rule'], 'sgd')
        self.assertEqual(config['run_id'], 'frozenlake-sgd')

    def test_all_errors_reported(self):
        with self.assertRaises(ConfigError) as cm:
            _config(raw={
                'optimizer.alpha': -1, 'frozenlake.gamma': 2, 'colour': 'red',
                'seeds': []
            })
        self.assertSetEqual(set(cm.exception.errors), {
            'optimizer.alpha', 'frozenlake.gamma', 'colour', 'seeds'
        })
        self.assertEqual(cm.exception.errors['colour'], 'unknown field!')
        self.assertIn('optimizer.alpha', str(cm.exception))

    def test_missing_family(self):
        with self.assertRaises(ConfigError) as cm:
            _config(family=None)
        self.assertIn('family', cm.exception.errors)

    def test_consistency(self):
        with self.assertRaises(ConfigError) as cm:
            _config(raw={'optimizer.schedule': 'geometric'})
        self.assertIn('optimizer.alpha_end', cm.exception.errors)

        with self.assertRaises(ConfigError) as cm:
            _config(raw={'grid.lo': 1.0, 'grid.hi': 0.1}, grid_search=True)
        self.assertSetEqual(
            set(cm.exception.errors), {'grid.n', 'grid.hi'}
        )

        with self.assertRaises(ConfigError) as cm:
            _config('verify', grid_search=True, raw={
                'grid.lo': 0.1, 'grid.hi': 1.0, 'grid.n': 3
            })
        self.assertIn('family', cm.exception.errors)

    def test_columns(self):
        config = _config('supervised', raw={
            'supervised.columns': {'cut': 'Categorical', 'x': 'numeric'}
        })
        self.assertEqual(config['supervised.columns'], {
            'cut': 'categorical', 'x': 'numeric'
        })
        self.assertRaises(ConfigError, _config, 'supervised', raw={
            'supervised.columns': {'cut': 'ordinal'}
        })

    def test_dispatcher(self):
        fp = self._write('family: lqr\nsteps: 10\nlqr:\n  k0: -0.1\n')
        sol = load.dsp.register()(
            {'config_file': fp, 'cmd_flags': {'seeds': 2}}, ['config']
        )
        config = sol['config']
        self.assertEqual(config['family'], 'lqr')
        self.assertEqual(config['lqr.k0'], -0.1)
        self.assertEqual(config['seeds'], [0, 1])

        fp = self._write('family: lqr\nsteps: -10\n')
        with self.assertRaises(Exception) as cm:
            load.dsp.register()({'config_file': fp}, ['config'])
        self.assertIsNotNone(find_error(cm.exception, ConfigError))


if __name__ == '__main__':
    unittest.main()
