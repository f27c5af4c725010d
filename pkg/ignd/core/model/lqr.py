# -*- coding: utf-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
"""
Functions and `dsp` model to model the data-driven LQR policy iteration.

The discounted Q-function of a linear gain `a = Ks` is quadratic,
`q(s, a) = zᵀMz + c` with `z = (s; a)`, hence linear in the quadratic features
of :func:`quadratic_features`. Policy evaluation fits those weights by TD
learning along an exploratory trajectory; policy improvement reads the new gain
`K = -M_aa⁻¹M_as` from the fitted matrix. The Riccati fixed point of
:func:`ignd.numkit.riccati_fixed_point` is the reference solution.

Reward convention: `r = sᵀQs + aᵀRa` with `Q` negative semi-definite and `R`
negative definite.
"""
import logging
import collections
import numpy as np
import schedula as sh
from ...defaults import dfl
from ...numkit import as_matrix, riccati_fixed_point
from ...utils import seeded_rng, CurvePoint
from ...errors import (
    DimensionMismatch, LengthMismatch, Diverged, IndefiniteMaa, ParseError
)
from .approximator import GradEval
from .optim import OptimConfig, OptimState, step

log = logging.getLogger(__name__)

dsp = sh.BlueDispatcher(
    name='lqr', raises=True,
    description='Models the LQR generalized policy iteration.'
)


def _is_definite(m, sign, strict=True):
    # Cholesky of `sign·m` (shifted for the semi-definite case).
    m = sign * (m + m.T) / 2
    if not strict:
        m = m + 1e-12 * max(1.0, np.abs(m).max()) * np.eye(m.shape[0])
    try:
        np.linalg.cholesky(m)
        return True
    except np.linalg.LinAlgError:
        return False


def _noise_factor(sigma):
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        u, s, _ = np.linalg.svd(sigma)
        return u * np.sqrt(np.maximum(s, 0))


class LQRSystem:
    """
    Discrete-time linear system `s' = As + Ba + e`, `e ~ N(0, Σ)`, with
    quadratic reward and discount `γ`.
    """

    def __init__(self, A, B, Q, R, Sigma, gamma):
        self.A, self.B = as_matrix(A), as_matrix(B)
        self.Q, self.R, self.Sigma = as_matrix(Q), as_matrix(R), \
            as_matrix(Sigma)
        self.gamma = float(gamma)
        n_s, n_a = self.B.shape
        for k, shape in (('A', (n_s, n_s)), ('Q', (n_s, n_s)),
                         ('R', (n_a, n_a)), ('Sigma', (n_s, n_s))):
            if getattr(self, k).shape != shape:
                raise DimensionMismatch('%s must be %dx%d!' % ((k,) + shape))
        for k in ('Q', 'R', 'Sigma'):
            m = getattr(self, k)
            if np.abs(m - m.T).max() > 1e-12:
                raise ValueError('%s must be symmetric!' % k)
        if not 0 < self.gamma < 1:
            raise ValueError('Discount factor must be in (0, 1)!')
        if not _is_definite(self.Q, -1, strict=False):
            raise ValueError('Q must be negative semi-definite!')
        if not _is_definite(self.R, -1):
            raise ValueError('R must be negative definite!')
        if not _is_definite(self.Sigma, 1, strict=False):
            raise ValueError('Sigma must be positive semi-definite!')
        self.n_s, self.n_a = n_s, n_a
        self.noise_factor = _noise_factor(self.Sigma)

    def __repr__(self):
        return 'LQRSystem(n_s=%d, n_a=%d, gamma=%r)' % (
            self.n_s, self.n_a, self.gamma
        )

    def reward(self, s, a):
        return float(s @ self.Q @ s + a @ self.R @ a)

    def noise(self, rng):
        return self.noise_factor @ rng.standard_normal(self.n_s)


def quadratic_features(s, a, n_s=None, n_a=None):
    """
    Returns the quadratic features of a state-action pair.

    With `z = (s; a)` of length `d` the features are the products `z_i·z_j`,
    `i ≤ j`, in row-major upper-triangular order, followed by a constant 1.

    :param s:
        State.
    :type s: numpy.array

    :param a:
        Action.
    :type a: numpy.array

    :param n_s:
        Expected state dimension.
    :type n_s: int, optional

    :param n_a:
        Expected action dimension.
    :type n_a: int, optional

    :return:
        Features of length `d(d+1)/2 + 1`.
    :rtype: numpy.array
    """
    s, a = np.atleast_1d(np.asarray(s, float)), np.atleast_1d(
        np.asarray(a, float)
    )
    if (n_s is not None and s.size != n_s) or (
            n_a is not None and a.size != n_a):
        raise DimensionMismatch('State/action dimensions do not match!')
    z = np.concatenate((s, a))
    iu = np.triu_indices(z.size)
    return np.append(np.outer(z, z)[iu], 1.0)


def n_quadratic_features(n_s, n_a):
    d = n_s + n_a
    return d * (d + 1) // 2 + 1


class QuadraticQ:
    """
    Quadratic action-value function `q(s, a) = zᵀMz + c`.
    """

    def __init__(self, weights, M, c, n_s, n_a):
        self.weights, self.M, self.c = weights, M, float(c)
        self.n_s, self.n_a = n_s, n_a

    @property
    def M_ss(self):
        return self.M[:self.n_s, :self.n_s]

    @property
    def M_sa(self):
        return self.M[:self.n_s, self.n_s:]

    @property
    def M_as(self):
        return self.M[self.n_s:, :self.n_s]

    @property
    def M_aa(self):
        return self.M[self.n_s:, self.n_s:]

    def __call__(self, s, a):
        z = np.concatenate((np.atleast_1d(s), np.atleast_1d(a)))
        return float(z @ self.M @ z + self.c)


def weights_to_M(w, n_s, n_a):
    """
    Converts feature weights into the symmetric matrix `M` and constant `c`.

    :param w:
        Feature weights.
    :type w: numpy.array

    :param n_s:
        State dimension.
    :type n_s: int

    :param n_a:
        Action dimension.
    :type n_a: int

    :return:
        Quadratic Q-function.
    :rtype: QuadraticQ
    """
    w, d = np.asarray(w, dtype=float), n_s + n_a
    if w.size != n_quadratic_features(n_s, n_a):
        raise LengthMismatch('Expected %d weights, got %d!' % (
            n_quadratic_features(n_s, n_a), w.size
        ))
    iu = np.triu_indices(d)
    m = np.zeros((d, d))
    m[iu] = w[:-1] / 2
    m = m + m.T
    return QuadraticQ(w.copy(), m, w[-1], n_s, n_a)


def M_to_weights(M, c):
    """
    Converts a symmetric matrix `M` and constant `c` into feature weights.

    :rtype: numpy.array
    """
    m = np.asarray(M, dtype=float)
    iu = np.triu_indices(m.shape[0])
    w = 2 * m[iu]
    w[iu[0] == iu[1]] /= 2
    return np.append(w, float(c))


#: Outcome of one policy evaluation.
Evaluation = collections.namedtuple('Evaluation', ['weights', 'steps_used'])


def policy_evaluation(sys, K, w0, config, max_steps, rng, tol=None,
                      exploration_variance=None, s0=None, scale=None,
                      trace=None, min_steps=None):
    """
    Fits the Q-function weights of the gain `K` by TD learning.

    The trajectory follows `a = Ks + e_x` (`e_x ~ N(0, σ²I)`), the bootstrap
    uses the greedy next action `a' = Ks'`. Each step applies the update rule
    of `config` to the TD error `δ = r + wᵀ(γx' - x)` along the features `x`.

    Without `s0`, the trajectory starts from `s ~ N(0, vI)` and is restarted
    from a new draw every `reset_every` updates (see
    :data:`ignd.defaults.dfl.functions.policy_evaluation`), so that the
    state-action block of the Q-function is excited.

    :param sys:
        Linear system.
    :type sys: LQRSystem

    :param K:
        Policy gain `(n_a, n_s)`.
    :type K: numpy.array

    :param w0:
        Initial weights.
    :type w0: numpy.array

    :param config:
        Update rule (`sgd` for Q-learning, `ignd` for IGNDQ).
    :type config: ignd.core.model.optim.OptimConfig

    :param max_steps:
        Maximum number of TD updates.
    :type max_steps: int

    :param rng:
        Random generator (start states, system and exploration noise).
    :type rng: numpy.random.Generator

    :param tol:
        Stop when `‖w_i - w_{i-1}‖∞ < tol`.
    :type tol: float, optional

    :param exploration_variance:
        Exploration noise variance.
    :type exploration_variance: float, optional

    :param s0:
        Initial state of a single trajectory without restarts.
    :type s0: numpy.array, optional

    :param scale:
        Fixed per-feature scaling applied to the features.
    :type scale: numpy.array, optional

    :param trace:
        If given, the predicted `q(S_i, A_i)` of every step is appended.
    :type trace: list, optional

    :param min_steps:
        Updates before `tol` is checked.
    :type min_steps: int, optional

    :return:
        Fitted weights and number of updates used.
    :rtype: Evaluation
    """
    d = dfl.functions.policy_evaluation
    tol = d.tol if tol is None else tol
    min_steps = d.min_steps if min_steps is None else min_steps
    K = as_matrix(K)
    if K.shape != (sys.n_a, sys.n_s):
        raise DimensionMismatch('Gain must be %dx%d!' % (sys.n_a, sys.n_s))
    if exploration_variance is None:
        exploration_variance = d.exploration_variance
    sd = np.sqrt(exploration_variance)
    w = np.array(w0, dtype=float)
    if w.size != n_quadratic_features(sys.n_s, sys.n_a):
        raise LengthMismatch('Initial weights have the wrong length!')
    scale = np.ones(w.size) if scale is None else np.asarray(scale, float)
    restart = s0 is None
    s_sd = np.sqrt(d.initial_state_variance)
    if restart:
        s = s_sd * rng.standard_normal(sys.n_s)
    else:
        s = np.array(s0, dtype=float)
    state, gamma, i = OptimState.new(config, w.size), sys.gamma, 0
    for i in range(1, int(max_steps) + 1):
        a = K @ s + sd * rng.standard_normal(sys.n_a)
        r = sys.reward(s, a)
        s_next = sys.A @ s + sys.B @ a + sys.noise(rng)
        x = scale * quadratic_features(s, a)
        x_next = scale * quadratic_features(s_next, K @ s_next)
        q = float(w @ x)
        delta = r + gamma * float(w @ x_next) - q
        w_next, _ = step(config, state, w, GradEval(q, x, delta, float(x @ x)))
        if trace is not None:
            trace.append(q)
        if not np.isfinite(w_next).all() or \
                np.abs(w_next).max() > d.max_abs_weight:
            raise Diverged('Policy evaluation diverged at step %d!' % i)
        converged = i >= min_steps and np.abs(w_next - w).max() < tol
        w, s = w_next, s_next
        if converged:
            break
        if restart and i % d.reset_every == 0:
            s = s_sd * rng.standard_normal(sys.n_s)
    return Evaluation(w, i)


def policy_improvement(q, sign=-1):
    """
    Returns the greedy gain `K = -M_aa⁻¹M_as` of a quadratic Q-function.

    :param q:
        Quadratic Q-function.
    :type q: QuadraticQ

    :param sign:
        Required definiteness of `M_aa`: -1 negative (negative definite `R`),
        +1 positive.
    :type sign: int

    :return:
        Policy gain.
    :rtype: numpy.array
    """
    m_aa = q.M_aa
    if not _is_definite(m_aa, sign):
        raise IndefiniteMaa('M_aa is not %s definite!' % (
            'negative' if sign < 0 else 'positive'
        ))
    log.debug('M_aa is %s definite.', 'negative' if sign < 0 else 'positive')
    return -np.linalg.solve(m_aa, q.M_as)


def policy_q_matrix(sys, K, tol=1e-12, max_iter=100000):
    """
    Returns the exact quadratic Q-function of the gain `K` by value recursion.

    `P_K = Q + KᵀRK + γ(A+BK)ᵀP_K(A+BK)`, then
    `M = [[Q + γAᵀPA, γAᵀPB], [γBᵀPA, R + γBᵀPB]]` and
    `c = γ/(1-γ)·Tr(PΣ)`.

    :rtype: QuadraticQ
    """
    a, b, g = sys.A, sys.B, sys.gamma
    acl, base = a + b @ K, sys.Q + K.T @ sys.R @ K
    p = np.zeros_like(sys.Q)
    for _ in range(max_iter):
        p_next = base + g * acl.T @ p @ acl
        done = np.abs(p_next - p).max() <= tol
        p = p_next
        if done:
            break
    else:
        raise Diverged('Gain value recursion did not converge!')
    m = np.block([
        [sys.Q + g * a.T @ p @ a, g * a.T @ p @ b],
        [g * b.T @ p @ a, sys.R + g * b.T @ p @ b]
    ])
    c = value_offset(p, sys.Sigma, g)
    return QuadraticQ(M_to_weights(m, c), m, c, sys.n_s, sys.n_a)


def value_offset(P, Sigma, gamma):
    """
    Returns the noise contribution `V₀ = γ/(1-γ)·Tr(PΣ)` to the value.

    :rtype: float
    """
    return float(gamma / (1.0 - gamma) * np.trace(
        np.asarray(P, float) @ np.asarray(Sigma, float)
    ))


def generalized_policy_iteration(sys, K0, config, eval_steps,
                                 max_improvements, rng, tol=None,
                                 exploration_variance=None, warm_start=True,
                                 k_star=None):
    """
    Alternates TD policy evaluation and greedy policy improvement.

    :param sys:
        Linear system.
    :type sys: LQRSystem

    :param K0:
        Initial stabilizing gain.
    :type K0: numpy.array

    :param config:
        Update rule of the evaluations.
    :type config: ignd.core.model.optim.OptimConfig

    :param eval_steps:
        Maximum TD updates per evaluation.
    :type eval_steps: int

    :param max_improvements:
        Maximum number of improvements.
    :type max_improvements: int

    :param rng:
        Random generator.
    :type rng: numpy.random.Generator

    :param tol:
        Stop when `max|K_p - K_{p-1}| < tol`.
    :type tol: float, optional

    :param exploration_variance:
        Exploration noise variance.
    :type exploration_variance: float, optional

    :param warm_start:
        Start each evaluation from the previous weights?
    :type warm_start: bool

    :param k_star:
        Reference gain for the error trace (default: Riccati solution).
    :type k_star: numpy.array, optional

    :return:
        Final gain and trace of `(improvement, max|K_p - K*|, steps used)`.
    :rtype: (numpy.array, list[tuple])
    """
    tol = dfl.functions.generalized_policy_iteration.tol if tol is None \
        else tol
    if not np.abs(sys.B).any():
        log.warning('B = 0: the system is not controllable, the gain is '
                    'irrelevant.')
    if k_star is None:
        k_star = riccati_fixed_point(sys)[1]
    sign = -1 if _is_definite(sys.R, -1) else 1
    K, n = as_matrix(K0), n_quadratic_features(sys.n_s, sys.n_a)
    w, trace = np.zeros(n), []
    for p in range(1, int(max_improvements) + 1):
        ev = policy_evaluation(
            sys, K, w if warm_start else np.zeros(n), config, eval_steps, rng,
            exploration_variance=exploration_variance
        )
        w = ev.weights
        K_next = policy_improvement(weights_to_M(w, sys.n_s, sys.n_a), sign)
        change = np.abs(K_next - K).max()
        K = K_next
        trace.append((p, float(np.abs(K - k_star).max()), ev.steps_used))
        log.debug('Improvement %d: max|K - K*| = %g.', p, trace[-1][1])
        if change < tol:
            break
    return K, trace


def _parse_system(lines, path):
    blocks, i = {}, 0
    lines = [(n, l.split('#')[0].split()) for n, l in enumerate(lines)]
    lines = [(n, t) for n, t in lines if t]
    while i < len(lines):
        n, tokens = lines[i]
        name = tokens[0]
        try:
            if name in ('gamma', 'dt'):
                blocks[name] = float(tokens[1])
                i += 1
                continue
            rows, cols = int(tokens[1]), int(tokens[2])
            data = []
            for n, row in lines[i + 1:i + 1 + rows]:
                if len(row) != cols:
                    raise ValueError
                data.append([float(v) for v in row])
            if len(data) != rows:
                raise ValueError
        except (ValueError, IndexError):
            raise ParseError(n, name, ' '.join(tokens))
        blocks[name] = data
        i += 1 + rows
    for k in ('A', 'B', 'Q', 'R', 'Sigma', 'gamma'):
        if k not in blocks:
            raise ValueError('Block %r is missing in %s!' % (k, path))
    return blocks


def discretize_zoh(A, B, dt):
    """
    Zero-order-hold discretisation of `ṡ = As + Ba`.

    :rtype: (numpy.array, numpy.array)
    """
    import scipy.linalg as sla
    A, B = as_matrix(A), as_matrix(B)
    n_s, n_a = B.shape
    m = np.zeros((n_s + n_a, n_s + n_a))
    m[:n_s, :n_s], m[:n_s, n_s:] = A, B
    e = sla.expm(m * dt)
    return e[:n_s, :n_s], e[:n_s, n_s:]


def load_system(name):
    """
    Returns a shipped system (`uav`, `bdt`) or reads a system file.

    The file holds whitespace-delimited blocks, each introduced by a header
    `NAME ROWS COLS` (`A`, `B`, `Q`, `R`, `Sigma`), plus the scalar lines
    `gamma VALUE` and, optionally, `dt VALUE`. With `dt`, `A` and `B` are
    continuous-time and discretised by zero-order hold. `#` starts a comment.

    :param name:
        System name or file path.
    :type name: str

    :rtype: LQRSystem
    """
    systems = dfl.functions.load_system.SYSTEMS
    if name in systems:
        return LQRSystem(**systems[name])
    with open(name, encoding='utf-8') as f:
        b = _parse_system(f.readlines(), name)
    A, B = b['A'], b['B']
    if 'dt' in b:
        A, B = discretize_zoh(A, B, b['dt'])
    return LQRSystem(A, B, b['Q'], b['R'], b['Sigma'], b['gamma'])


@sh.add_function(dsp, outputs=['lqr_system'])
def define_lqr_system(config):
    """
    Loads the system of `lqr.system`.

    :param config:
        Validated experiment config.
    :type config: dict

    :rtype: LQRSystem
    """
    return load_system(config['lqr.system'])


@sh.add_function(dsp, outputs=['initial_gain'])
def define_initial_gain(config, lqr_system):
    """
    Returns the initial gain with all entries equal to `lqr.k0`.

    :rtype: numpy.array
    """
    return np.full((lqr_system.n_a, lqr_system.n_s), config['lqr.k0'])


@sh.add_function(dsp, outputs=['riccati_solution'])
def solve_riccati(lqr_system):
    """
    Solves the discounted Riccati equation of the system.

    :return:
        Value matrix `P` and optimal gain `K*`.
    :rtype: (numpy.array, numpy.array)
    """
    return riccati_fixed_point(lqr_system)


@sh.add_function(dsp, outputs=['optim_config'])
def define_optim_config(config):
    """
    Defines the update rule; the schedule spans one policy evaluation.

    :rtype: ignd.core.model.optim.OptimConfig
    """
    return OptimConfig.from_config(config, horizon=config['steps'])


@sh.add_function(dsp, outputs=['curve'])
def run_policy_iteration(config, seed, lqr_system, initial_gain,
                         riccati_solution, optim_config):
    """
    Runs the generalized policy iteration of one seed.

    :param config:
        Validated experiment config.
    :type config: dict

    :param seed:
        Run seed.
    :type seed: int

    :param lqr_system:
        Linear system.
    :type lqr_system: LQRSystem

    :param initial_gain:
        Initial gain.
    :type initial_gain: numpy.array

    :param riccati_solution:
        Value matrix `P` and optimal gain `K*`.
    :type riccati_solution: (numpy.array, numpy.array)

    :param optim_config:
        Update rule.
    :type optim_config: ignd.core.model.optim.OptimConfig

    :return:
        `k_error_inf` and `eval_steps_used` per improvement, and the reference
        `value_offset`.
    :rtype: list[CurvePoint]
    """
    p, k_star = riccati_solution
    _, trace = generalized_policy_iteration(
        lqr_system, initial_gain, optim_config, config['steps'],
        config['lqr.improvements'], seeded_rng(seed, 401),
        exploration_variance=config['lqr.exploration_variance'],
        warm_start=config['lqr.warm_start'], k_star=k_star
    )
    records = []
    for i, err, used in trace:
        records.append(CurvePoint(i, 'k_error_inf', err))
        records.append(CurvePoint(i, 'eval_steps_used', float(used)))
    records.append(CurvePoint(0, 'value_offset', value_offset(
        p, lqr_system.Sigma, lqr_system.gamma
    )))
    return records
