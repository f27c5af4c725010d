# -*- coding: utf-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
"""
Dense vector/matrix primitives and the brute-force oracles used to check the
analytic fast paths.

Vectors and matrices are float64 :class:`numpy.ndarray`; the oracles solve
with dense linear algebra what the optimizers obtain in closed form.
"""
import logging
import numpy as np
import scipy.linalg as sla
from .defaults import dfl
from .errors import (
    NonFiniteValue, DimensionMismatch, ZeroGradient, NoConvergence,
    SingularInnerMatrix
)

log = logging.getLogger(__name__)


def as_vector(data):
    """
    Converts data to a finite float64 vector.

    :param data:
        Vector entries.
    :type data: list[float] | numpy.array

    :return:
        Dense vector.
    :rtype: numpy.array
    """
    v = np.array(data, dtype=np.float64).ravel()
    if not np.isfinite(v).all():
        raise NonFiniteValue('Vector has non-finite entries: %r' % v)
    return v


def as_matrix(data, rows=None, cols=None):
    """
    Converts data to a finite float64 matrix.

    :param data:
        Matrix entries (nested rows or row-major flat sequence).
    :type data: list | numpy.array

    :param rows:
        Number of rows (required for flat data).
    :type rows: int, optional

    :param cols:
        Number of columns (required for flat data).
    :type cols: int, optional

    :return:
        Dense matrix.
    :rtype: numpy.array
    """
    m = np.array(data, dtype=np.float64)
    if rows is not None and cols is not None:
        if m.size != rows * cols:
            raise DimensionMismatch(
                'Expected %d entries, got %d!' % (rows * cols, m.size)
            )
        m = m.reshape(rows, cols)
    elif m.ndim != 2:
        m = np.atleast_2d(m)
    if not np.isfinite(m).all():
        raise NonFiniteValue('Matrix has non-finite entries!')
    return m


def null_space_basis(g):
    """
    Returns an orthonormal basis of the null-space of `gᵀ`.

    Gram-Schmidt (with one re-orthogonalisation pass) over the standard basis,
    skipping the coordinate of the largest-magnitude entry of `g`.

    :param g:
        Residual gradient of dimension `m`.
    :type g: numpy.array

    :return:
        Basis `Z` of shape `(m, m-1)` with `ZᵀZ = I` and `Zᵀg = 0`.
    :rtype: numpy.array
    """
    g = as_vector(g)
    m, norm = g.size, np.linalg.norm(g)
    if m < 1:
        raise DimensionMismatch('Gradient must have at least one entry!')
    if norm == 0:
        raise ZeroGradient('Null-space of a zero gradient is undefined!')
    pivot = int(np.argmax(np.abs(g)))
    q = np.empty((m, m))
    q[:, 0] = g / norm
    k = 1
    for j in range(m):
        if j == pivot:
            continue
        v = np.zeros(m)
        v[j] = 1.0
        for _ in range(2):
            v -= q[:, :k] @ (q[:, :k].T @ v)
        q[:, k] = v / np.linalg.norm(v)
        k += 1
    return q[:, 1:]


def solve_regularized_gn_oracle(r, g):
    """
    Solves the regularized incremental Gauss-Newton step by dense algebra.

    Minimises `½(r + gᵀΔw)² + ½‖ZᵀΔw‖²` by solving the normal equations
    `(ggᵀ + ZZᵀ)Δw = -gr` with `Z` the null-space basis of `gᵀ`.

    :param r:
        Scalar residual.
    :type r: float

    :param g:
        Residual gradient.
    :type g: numpy.array

    :return:
        Step `Δw`.
    :rtype: numpy.array
    """
    g = as_vector(g)
    z = null_space_basis(g)
    h = np.outer(g, g) + z @ z.T
    return sla.solve(h, -g * float(r), assume_a='pos')


def spectral_radius(m, n_squarings=None):
    """
    Estimates the spectral radius by repeated squaring (`ρ = lim ‖Mᵏ‖^{1/k}`).

    :param m:
        Square matrix.
    :type m: numpy.array

    :param n_squarings:
        Number of squarings (`k = 2^n_squarings`).
    :type n_squarings: int, optional

    :return:
        Spectral radius estimate.
    :rtype: float
    """
    if n_squarings is None:
        n_squarings = dfl.functions.spectral_radius.n_squarings
    x, log_scale, rho = as_matrix(m), 0.0, 0.0
    for k in range(n_squarings + 1):
        nrm = np.linalg.norm(x, 2)
        if nrm == 0:
            return 0.0
        rho = np.exp((np.log(nrm) + log_scale) / 2.0 ** k)
        log_scale = 2.0 * (log_scale + np.log(nrm))
        x = x / nrm
        x = x @ x
    return float(rho)


def riccati_fixed_point(sys, tol=None, max_iter=None):
    """
    Solves the discounted discrete algebraic Riccati equation by value
    recursion.

    Iterates `P ← Q + γAᵀPA - γ²AᵀPB(R + γBᵀPB)⁻¹BᵀPA` from `P = 0` (reward
    convention: `Q`, `R` non-positive, `P` negative semi-definite).

    :param sys:
        Linear system.
    :type sys: ignd.core.model.lqr.LQRSystem

    :param tol:
        Tolerance on `‖P_{k+1} - P_k‖∞`.
    :type tol: float, optional

    :param max_iter:
        Maximum number of recursions.
    :type max_iter: int, optional

    :return:
        Value matrix `P` and optimal gain `K* = -(R + γBᵀPB)⁻¹γBᵀPA`.
    :rtype: (numpy.array, numpy.array)
    """
    d = dfl.functions.riccati_fixed_point
    tol = d.tol if tol is None else tol
    max_iter = d.max_iter if max_iter is None else max_iter
    a, b, q, r, gamma = sys.A, sys.B, sys.Q, sys.R, sys.gamma

    def _gain(p):
        inner = r + gamma * b.T @ p @ b
        try:
            if np.linalg.cond(inner) > 1 / dfl.EPS:
                raise np.linalg.LinAlgError
            return -np.linalg.solve(inner, gamma * b.T @ p @ a)
        except np.linalg.LinAlgError:
            raise SingularInnerMatrix('R + γBᵀPB is singular!')

    p = np.zeros_like(q)
    for it in range(1, max_iter + 1):
        k = _gain(p)
        # `P_next = Q + γAᵀPA + γAᵀPBK`, the optimal-action form of the recursion.
        p_next = q + gamma * a.T @ p @ (a + b @ k)
        p_next = (p_next + p_next.T) / 2
        if np.abs(p_next - p).max() <= tol:
            p = p_next
            break
        p = p_next
    else:
        raise NoConvergence(
            'Riccati recursion did not converge in %d iterations!' % max_iter
        )
    k = _gain(p)
    rho = spectral_radius(a + b @ k)
    if rho >= 1:
        log.warning('Riccati gain is not stabilizing (ρ(A+BK*) = %g).', rho)
    log.debug('Riccati recursion converged in %d iterations.', it)
    return p, k
