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
import ignd.numkit as nk
from ignd.utils import seeded_rng, greedy_action, logspace_grid
from ignd.errors import (
    ZeroGradient, NonFiniteValue, DimensionMismatch, SingularInnerMatrix
)


@ddt.ddt
class NullSpace(unittest.TestCase):
    def test_coordinate(self):
        nt.assert_allclose(nk.null_space_basis([1, 0]), [[0], [1]], atol=1e-15)

    def test_zero_gradient(self):
        self.assertRaises(ZeroGradient, nk.null_space_basis, [0, 0])

    def test_non_finite(self):
        self.assertRaises(NonFiniteValue, nk.null_space_basis, [1, np.nan])

    @ddt.data(2, 5, 13, 20)
    def test_orthonormal(self, m):
        rng = seeded_rng(0, m)
        for _ in range(50):
            g = rng.standard_normal(m) * 10 ** rng.uniform(-3, 3)
            z = nk.null_space_basis(g)
            self.assertEqual(z.shape, (m, m - 1))
            self.assertLessEqual(np.abs(z.T @ z - np.eye(m - 1)).max(), 1e-12)
            self.assertLessEqual(
                np.abs(z.T @ g).max(), 1e-12 * np.linalg.norm(g)
            )


@ddt.ddt
class GaussNewtonOracle(unittest.TestCase):
    @ddt.data(
        (2, [1, 0], [-2, 0]),
        (1, [3, 4], [-0.12, -0.16])
    )
    @ddt.unpack
    def test_examples(self, r, g, res):
        dw = nk.solve_regularized_gn_oracle(r, g)
        nt.assert_allclose(dw, res, atol=1e-12)
        self.assertAlmostEqual(r + np.dot(g, dw), 0, places=12)

    def test_stationarity(self):
        rng = seeded_rng(1)
        for m in range(2, 12):
            r, g = rng.standard_normal(), rng.standard_normal(m)
            dw = nk.solve_regularized_gn_oracle(r, g)
            z = nk.null_space_basis(g)
            nt.assert_allclose(
                g * (r + g @ dw) + z @ z.T @ dw, np.zeros(m), atol=1e-10
            )

    def test_zero_gradient(self):
        self.assertRaises(
            ZeroGradient, nk.solve_regularized_gn_oracle, 1.0, [0, 0, 0]
        )


class Riccati(unittest.TestCase):
    @staticmethod
    def _system(a, b, q, r, gamma=0.9, sigma=None):
        from ignd.core.model.lqr import LQRSystem
        n = np.shape(a)[0]
        sigma = np.zeros((n, n)) if sigma is None else sigma
        return LQRSystem(a, b, q, r, sigma, gamma)

    def test_decoupled_state(self):
        sys = self._system(
            np.zeros((2, 2)), np.eye(2), -np.eye(2), -np.eye(2)
        )
        p, k = nk.riccati_fixed_point(sys)
        nt.assert_allclose(p, -np.eye(2), atol=1e-12)
        nt.assert_allclose(k, np.zeros((2, 2)), atol=1e-12)

    def test_scalar_system(self):
        sys = self._system([[0.9]], [[1.0]], [[-1.0]], [[-1.0]])
        p, k = nk.riccati_fixed_point(sys)
        nt.assert_allclose(p, [[-1.45995]], atol=1e-5)
        nt.assert_allclose(k, [[-0.51105]], atol=1e-5)
        self.assertLess(nk.spectral_radius(sys.A + sys.B @ k), 1)

    def test_recursion_residual(self):
        from ignd.defaults import dfl
        sys = self._system(
            [[0.9, 0.2], [0.0, 0.8]], [[0.1], [0.5]], -np.eye(2), [[-1.0]]
        )
        p, k = nk.riccati_fixed_point(sys)
        a, b, q, r, g = sys.A, sys.B, sys.Q, sys.R, sys.gamma
        inner = r + g * b.T @ p @ b
        res = q + g * a.T @ p @ a - g ** 2 * a.T @ p @ b @ np.linalg.solve(
            inner, b.T @ p @ a
        ) - p
        tol = dfl.functions.riccati_fixed_point.tol
        self.assertLessEqual(np.abs(res).max(), 10 * tol)

    def test_singular_inner_matrix(self):
        sys = self._system([[0.5]], [[1.0]], [[0.0]], [[-1.0]])
        sys.R = np.zeros((1, 1))
        self.assertRaises(SingularInnerMatrix, nk.riccati_fixed_point, sys)


@ddt.ddt
class Primitives(unittest.TestCase):
    def test_as_matrix_flat(self):
        nt.assert_array_equal(
            nk.as_matrix([1, 2, 3, 4, 5, 6], 2, 3), [[1, 2, 3], [4, 5, 6]]
        )
        self.assertRaises(DimensionMismatch, nk.as_matrix, [1, 2, 3], 2, 2)

    def test_as_vector_non_finite(self):
        self.assertRaises(NonFiniteValue, nk.as_vector, [1, np.inf])

    @ddt.data(
        ([[0.5, 0], [0, 0.25]], 0.5),
        ([[0, 1], [-1, 0]], 1.0),
        ([[0.9, 10], [0, 0.9]], 0.9)
    )
    @ddt.unpack
    def test_spectral_radius(self, m, rho):
        self.assertAlmostEqual(nk.spectral_radius(m), rho, delta=1e-6)

    def test_seeded_rng(self):
        a = seeded_rng(7, 1).random(5)
        nt.assert_array_equal(a, seeded_rng(7, 1).random(5))
        self.assertFalse(np.array_equal(a, seeded_rng(7, 2).random(5)))

    @ddt.data(
        ([0, 1, 1 - 1e-12], None, 1),
        ([0, 0, 0], None, 0),
        ([np.nan, -1], None, 1),
        ([3, 3 + 1e-3], None, 1)
    )
    @ddt.unpack
    def test_greedy_action(self, values, rng, res):
        self.assertEqual(greedy_action(np.array(values), rng), res)

    def test_greedy_action_random_ties(self):
        rng = seeded_rng(3)
        picks = {greedy_action(np.zeros(4), rng) for _ in range(200)}
        self.assertSetEqual(picks, {0, 1, 2, 3})

    def test_logspace_grid(self):
        grid = logspace_grid(1e-9, 1, 10)
        self.assertEqual(len(grid), 10)
        nt.assert_allclose(grid[[0, -1]], [1e-9, 1], rtol=1e-12)
        nt.assert_allclose(np.diff(np.log10(grid)), 1, rtol=1e-9)


if __name__ == '__main__':
    unittest.main()
