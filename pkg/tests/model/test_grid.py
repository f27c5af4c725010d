#!/usr/bin/env python
# -*- coding: UTF-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl

import ddt
import math
import unittest
import ignd.core.model.grid as grid
from ignd.utils import CurvePoint
from ignd.errors import AllRunsDiverged, Diverged


@ddt.ddt
class Grid(unittest.TestCase):
    def test_score_curve(self):
        curve = [CurvePoint(i, 'test_mse', float(i)) for i in range(1, 11)]
        curve.append(CurvePoint(10, 'xi_mean', 1e6))
        self.assertEqual(grid.score_curve(curve, 'test_mse', 0.2), 9.5)
        self.assertTrue(math.isnan(grid.score_curve(curve, 'return', 0.2)))

    def test_grid_table(self):
        rows = grid.grid_table([0.1, 1.0], {
            0.1: [1.0, 3.0], 1.0: [None, 2.0]
        })
        self.assertEqual(rows[0], grid.GridRow(0.1, 2.0, 1.0, 0, 2))
        self.assertEqual(rows[1], grid.GridRow(1.0, 2.0, 0.0, 1, 2))

    @ddt.data((False, 0.01), (True, 10.0))
    @ddt.unpack
    def test_select_best_alpha(self, maximize, res):
        rows = [
            grid.GridRow(0.01, 1.0, 0.0, 0, 3),
            grid.GridRow(0.1, 2.0, 0.0, 0, 3),
            grid.GridRow(1.0, 3.0, 0.0, 0, 3),
            grid.GridRow(10.0, 9.0, 0.0, 2, 3),
        ]
        self.assertEqual(grid.select_best_alpha(rows, maximize).alpha, res)

    def test_select_best_alpha_ties(self):
        rows = [
            grid.GridRow(0.01, 2.0, 0.0, 1, 3),
            grid.GridRow(0.1, 2.0, 0.0, 0, 3),
            grid.GridRow(1.0, 1.5, 0.0, 2, 3),
        ]
        self.assertEqual(grid.select_best_alpha(rows).alpha, 1.0)
        self.assertEqual(grid.select_best_alpha(rows, True).alpha, 0.1)

    def test_all_diverged(self):
        rows = [grid.GridRow(1.0, math.nan, math.nan, 2, 2)]
        self.assertRaises(AllRunsDiverged, grid.select_best_alpha, rows)

    def test_grid_search(self):
        def evaluate(alpha, seed):
            if alpha > 1:
                raise Diverged('too large')
            return (math.log10(alpha) + 2) ** 2 + 0.01 * seed

        alphas = [10.0 ** k for k in range(-4, 3)]
        with self.assertLogs('ignd.core.model.grid', 'INFO'):
            best, rows = grid.grid_search(alphas, [0, 1, 2], evaluate)
        self.assertAlmostEqual(best, 0.01)
        self.assertEqual(len(rows), 7)
        self.assertEqual([r.diverged for r in rows], [0] * 5 + [3, 3])

    def test_grid_search_all_diverged(self):
        def evaluate(alpha, seed):
            raise Diverged('always')

        self.assertRaises(
            AllRunsDiverged, grid.grid_search, [0.1, 1.0], [0], evaluate
        )


if __name__ == '__main__':
    unittest.main()
