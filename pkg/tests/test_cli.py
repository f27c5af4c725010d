#! python
# -*- coding: UTF-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl

import ddt
import unittest
import os.path as osp

cdir = osp.abspath(osp.dirname(__file__))
fdir = osp.join(cdir, 'files')

_linear = """\
family: supervised
steps: 200
seeds: [0]
supervised:
  dataset: linear
  model: linear
  n_samples: 100
  eval_every: 50
"""


def _read(fpath):
    with open(fpath, 'rb') as f:
        return f.read()


@ddt.ddt
class CLI(unittest.TestCase):
    # noinspection PyMissingOrEmptyDocstring
    def setUp(self):
        import functools
        from ignd.cli import cli
        from click.testing import CliRunner
        self.runner = CliRunner()
        self.invoke = functools.partial(self.runner.invoke, cli)

    def _write(self, fpath, text):
        with open(fpath, 'w', encoding='utf-8') as f:
            f.write(text)
        return fpath

    @ddt.idata((
            ('frozenlake',),
            ('lqr', 'temp.yaml'),
            ('supervised', 'folder/temp.yaml'),
            ('verify', 'folder/temp.yaml')
    ))
    def test_0_template(self, options):
        import yaml
        from ignd import family_template
        from ignd.cli import template
        kw = template.make_context('template', list(options)).params
        with self.runner.isolated_filesystem():
            result = self.invoke(('template',) + options)
            self.assertEqual(result.exit_code, 0, result.output)
            with open(kw['output_file'], 'rb') as f:
                res = yaml.safe_load(f)
            self.assertEqual(res, family_template(kw['family']))
            self.assertEqual(res['family'], kw['family'])

    @ddt.idata((
            (),
            ('temp.yaml',),
            ('conf/temp.yaml',),
            ('conf/temp.yaml', '-MC', osp.join(fdir, 'conf.yaml'))
    ))
    def test_1_conf(self, options):
        import yaml
        import schedula as sh
        from ignd.defaults import dfl
        from ignd.cli import conf
        kw = conf.make_context('conf', list(options)).params
        t = {k for k, _ in sh.stack_nested_keys(dfl.to_dict())}
        with self.runner.isolated_filesystem():
            result = self.invoke(('conf',) + options)
            self.assertEqual(result.exit_code, 0, result.output)
            with open(kw['output_file'], 'rb') as f:
                r = dict(sh.stack_nested_keys(yaml.safe_load(f)))
                self.assertSetEqual(set(r), t)
            if kw['model_conf']:
                with open(kw['model_conf'], 'rb') as f:
                    for k, v in sh.stack_nested_keys(yaml.safe_load(f)):
                        self.assertEqual(r[k], v)

    def test_2_run(self):
        import pandas as pd
        options = (
            'frozenlake', '--seeds', '2', '--steps', '300', '-O', 'out'
        )
        with self.runner.isolated_filesystem():
            result = self.invoke(options)
            self.assertEqual(result.exit_code, 0, result.output)
            files = {'config.yaml', 'records.csv', 'plot.py', 'run.log'}
            for name in files:
                self.assertTrue(osp.isfile(osp.join('out', name)), name)
            df = pd.read_csv('out/records.csv', keep_default_na=False)
            self.assertEqual(
                list(df.columns), ['run_id', 'seed', 'step', 'metric', 'value']
            )
            self.assertSetEqual(set(df['run_id']), {'frozenlake-ignd'})
            self.assertSetEqual(set(df['seed']), {0, 1})
            self.assertIn('return', set(df['metric']))
            self.assertIn('run log opened', _read('out/run.log').decode())

            records, snapshot = _read('out/records.csv'), _read(
                'out/config.yaml'
            )
            self.assertEqual(self.invoke(options + ('-j', '1')).exit_code, 0)
            self.assertEqual(_read('out/records.csv'), records)
            self.assertEqual(_read('out/config.yaml'), snapshot)

    def test_3_jobs(self):
        options = ('frozenlake', '--seeds', '3', '--steps', '200')
        with self.runner.isolated_filesystem():
            for jobs, out in (('1', 'serial'), ('2', 'parallel')):
                result = self.invoke(options + ('-j', jobs, '-O', out))
                self.assertEqual(result.exit_code, 0, result.output)
            self.assertEqual(
                _read('serial/records.csv'), _read('parallel/records.csv')
            )

    def test_4_template_run(self):
        import yaml
        with self.runner.isolated_filesystem():
            result = self.invoke(('template', 'frozenlake', 't.yaml'))
            self.assertEqual(result.exit_code, 0, result.output)
            result = self.invoke((
                'frozenlake', '-c', 't.yaml', '--steps', '100', '-O', 'o'
            ))
            self.assertEqual(result.exit_code, 0, result.output)
            with open('o/config.yaml', 'rb') as f:
                self.assertEqual(yaml.safe_load(f)['steps'], 100)

            result = self.invoke((
                'supervised', '-c', self._write('s.yaml', _linear), '-O', 's'
            ))
            self.assertEqual(result.exit_code, 0, result.output)
            with open('s/config.yaml', 'rb') as f:
                snapshot = yaml.safe_load(f)
            self.assertEqual(snapshot['supervised.dataset'], 'linear')
            self.assertEqual(snapshot['run_id'], 'supervised-ignd')

    def test_5_gridsearch(self):
        import pandas as pd
        text = 'steps: 200\ngrid:\n  lo: 0.1\n  hi: 1.0\n  n: 2\n'
        with self.runner.isolated_filesystem():
            result = self.invoke((
                'gridsearch', '-F', 'frozenlake', '-c',
                self._write('g.yaml', text), '-O', 'g'
            ))
            self.assertEqual(result.exit_code, 0, result.output)
            df = pd.read_csv('g/records.csv', keep_default_na=False)
            grid = df[df['run_id'] == 'frozenlake-ignd-grid']
            self.assertSetEqual(set(grid['seed']), {''})
            self.assertEqual(
                list(grid['metric'])[-1], 'grid_best_alpha'
            )
            run_ids = set(df['run_id']) - {'frozenlake-ignd-grid'}
            self.assertEqual(len(run_ids), 2)
            self.assertTrue(all(
                r.startswith('frozenlake-ignd@alpha=') for r in run_ids
            ))

    @ddt.idata((
            ('frozenlake', '--alpha', '-1'),
            ('frozenlake', '--optimizer', 'rmsprop'),
            ('lqr', '-c', osp.join(fdir, 'conf.yaml')),
            ('gridsearch', '-F', 'lqr')
    ))
    def test_6_invalid_config(self, options):
        with self.runner.isolated_filesystem():
            result = self.invoke(options + ('-O', 'o'))
            self.assertEqual(result.exit_code, 2, result.output)
            self.assertFalse(osp.exists('o/records.csv'))

    def test_7_diverged(self):
        with self.runner.isolated_filesystem():
            result = self.invoke((
                'supervised', '-c', self._write('c.yaml', _linear),
                '--optimizer', 'sgd', '--alpha', '100', '-O', 'o'
            ))
            self.assertEqual(result.exit_code, 3, result.output)
            self.assertTrue(osp.isfile('o/run.log'))

    def test_8_verify(self):
        with self.runner.isolated_filesystem():
            result = self.invoke(('verify', '--quick', '-O', 'v'))
            self.assertEqual(result.exit_code, 0, result.output)
            with open('v/records.csv', encoding='utf-8') as f:
                text = f.read()
            self.assertIn('verify-ignd,0,1,null_space,1.0\n', text)

    def test_9_grid_diverged(self):
        import pandas as pd
        text = _linear + (
            'optimizer:\n  rule: sgd\ngrid:\n  lo: 0.01\n  hi: 100.0\n  n: 2\n'
        )
        with self.runner.isolated_filesystem():
            result = self.invoke((
                'gridsearch', '-F', 'supervised', '-c',
                self._write('g.yaml', text), '-O', 'g'
            ))
            self.assertEqual(result.exit_code, 3, result.output)
            df = pd.read_csv('g/records.csv', keep_default_na=False)
            grid = df[df['run_id'] == 'supervised-sgd-grid']
            self.assertEqual(list(grid['metric'])[-1], 'grid_best_alpha')
            self.assertAlmostEqual(float(list(grid['value'])[-1]), 0.01)


if __name__ == '__main__':
    unittest.main()
