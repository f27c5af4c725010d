#!/usr/bin/env python
# -*- coding: UTF-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl

import ddt
import unittest
import numpy as np
import numpy.testing as nt
import ignd.core.model.approximator as apx
from ignd.utils import seeded_rng
from ignd.errors import (
    DimensionMismatch, LengthMismatch, IndexOutOfRange, ZeroScale
)


@ddt.ddt
class Approximator(unittest.TestCase):
    @ddt.data(
        ([], 3, 4),
        ([32, 64, 32], 8, 4673),
        ([5], 2, 21)
    )
    @ddt.unpack
    def test_n_params(self, hidden, input_dim, res):
        model = apx.MLP(apx.layer_specs(hidden), input_dim)
        self.assertEqual(model.n_params, res)
        self.assertEqual(model.init(seeded_rng(0)).size, res)

    def test_init(self):
        specs = apx.layer_specs([4])
        w0 = apx.mlp_init(specs, 3, seeded_rng(5))
        nt.assert_array_equal(w0, apx.mlp_init(specs, 3, seeded_rng(5)))
        model = apx.MLP(specs, 3)
        (w1, b1), (w2, b2) = model.unflatten(w0)
        self.assertLessEqual(np.abs(w1).max(), np.sqrt(6 / 7))
        self.assertLessEqual(np.abs(w2).max(), np.sqrt(6 / 5))
        nt.assert_array_equal(np.concatenate((b1, b2)), 0)

    def test_output_layer(self):
        self.assertRaises(
            DimensionMismatch, apx.MLP, [apx.LayerSpec(2, 'identity')], 3
        )

    def test_linear(self):
        ev = apx.eval_with_gradient(apx.LinearModel(2), np.array([1., 2.]),
                                    [3, 4], 0)
        self.assertEqual(ev.value, 11)
        nt.assert_array_equal(ev.gradient, [3, 4])
        self.assertEqual(ev.residual, -11)
        self.assertEqual(ev.grad_sq_norm, 25)

    def test_dimension_mismatch(self):
        model = apx.MLP(apx.layer_specs([3]), 4)
        w = model.init(seeded_rng(0))
        self.assertRaises(
            DimensionMismatch, apx.eval_with_gradient, model, w, [1, 2], 0
        )
        self.assertRaises(
            LengthMismatch, apx.eval_with_gradient, model, w[:-1], np.ones(4),
            0
        )

    @ddt.data([4], [8, 8], [32, 64, 32])
    def test_gradient(self, hidden):
        rng = seeded_rng(11, len(hidden))
        model = apx.MLP(apx.layer_specs(hidden), 4)
        h = 1e-6
        for _ in range(10):
            w, x = model.init(rng), rng.standard_normal(4)
            ev = apx.eval_with_gradient(model, w, x, 0.0)
            self.assertAlmostEqual(ev.value, model.predict(w, x), places=12)
            self.assertAlmostEqual(
                ev.grad_sq_norm, ev.gradient @ ev.gradient, places=9
            )
            for j in rng.choice(w.size, min(w.size, 25), replace=False):
                wp, wm = w.copy(), w.copy()
                wp[j] += h
                wm[j] -= h
                fd = (model.predict(wp, x) - model.predict(wm, x)) / (2 * h)
                nt.assert_allclose(ev.gradient[j], fd, rtol=1e-5, atol=1e-7)

    def test_layout_round_trip(self):
        model = apx.MLP(apx.layer_specs([3, 2]), 5)
        w = model.init(seeded_rng(2)) + 0.1
        nt.assert_array_equal(model.flatten(model.unflatten(w)), w)

    @ddt.data(
        ((0, 0, 16, 4), 0),
        ((1, 2, 16, 4), 6),
        ((15, 3, 16, 4), 63)
    )
    @ddt.unpack
    def test_tabular_features(self, args, index):
        x = apx.tabular_features(*args)
        self.assertEqual(x.size, 64)
        self.assertEqual(np.flatnonzero(x).tolist(), [index])
        ev = apx.eval_with_gradient(apx.LinearModel(64), np.zeros(64), x, 1)
        self.assertEqual(ev.grad_sq_norm, 1)

    def test_tabular_scale(self):
        scale = np.ones(64)
        scale[6] = -7
        x = apx.tabular_features(1, 2, 16, 4, scale)
        self.assertEqual(x[6], -7)
        self.assertEqual(x @ x, 49)
        scale[0] = 0
        self.assertRaises(
            ZeroScale, apx.tabular_features, 1, 2, 16, 4, scale
        )

    @ddt.data((16, 0), (-1, 0), (0, 4))
    @ddt.unpack
    def test_tabular_out_of_range(self, s, a):
        self.assertRaises(
            IndexOutOfRange, apx.tabular_features, s, a, 16, 4
        )

    def test_checkpoint(self):
        import os
        import struct
        import tempfile
        model = apx.MLP(apx.layer_specs([3, 2]), 4)
        w = model.init(seeded_rng(9))
        with tempfile.TemporaryDirectory() as d:
            fp = os.path.join(d, 'weights.bin')
            apx.save_weights(fp, model, w)
            with open(fp, 'rb') as f:
                data = f.read()
            self.assertEqual(struct.unpack_from('<5I', data), (4, 4, 3, 2, 1))
            self.assertEqual(len(data), 4 * 5 + 8 * model.n_params)
            loaded, w1 = apx.load_weights(fp)
        self.assertEqual(repr(loaded), repr(model))
        nt.assert_array_equal(w1, w)


if __name__ == '__main__':
    unittest.main()
