#!/usr/bin/env python
# -*- coding: UTF-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl

import unittest
import ignd.core.model.verify as ver


class Verify(unittest.TestCase):
    def test_quick_suite(self):
        res = ver.run_checks(0, quick=True)
        self.assertEqual([r.name for r in res], [k for k, _ in ver.CHECKS])
        failed = [r for r in res if not r.ok]
        self.assertFalse(failed, failed)

    def test_names(self):
        names = ['null_space', 'quadratic_bijection', 'riccati']
        res = ver.run_checks(3, quick=True, names=names)
        self.assertEqual([r.name for r in res], names)
        self.assertTrue(all(r.ok for r in res))
        self.assertTrue(all(r.error <= 1e-9 for r in res))

    def test_failure_is_logged(self):
        checks = ver.CHECKS
        try:
            ver.CHECKS = (('broken', lambda rng, size: (False, 1.0)),)
            with self.assertLogs('ignd.core.model.verify', 'ERROR'):
                res = ver.run_checks(0, quick=True)
        finally:
            ver.CHECKS = checks
        self.assertEqual(res, [ver.CheckResult('broken', False, 1.0)])

    def test_run_verify(self):
        config = {'verify.quick': True}
        checks = ver.CHECKS
        try:
            ver.CHECKS = checks[:2]
            curve = ver.run_verify(config, 0)
        finally:
            ver.CHECKS = checks
        self.assertEqual([(p.step, p.metric, p.value) for p in curve[::2]], [
            (1, 'null_space', 1.0), (2, 'oracle_equivalence', 1.0)
        ])
        self.assertEqual(curve[1].metric, 'null_space.error')


if __name__ == '__main__':
    unittest.main()
