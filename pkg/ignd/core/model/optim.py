# -*- coding: utf-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
"""
Functions and classes to model the incremental update rules.

Sign convention: the loss gradient of one sample is `∇L = -r∇f`, hence every
rule moves along `+r∇f` scaled by the learning rate and by a rule-specific
scalar `ξ`:

======== =====================================================
rule     update
======== =====================================================
sgd      `w + α·r·∇f`
ignd     `w + α·ξ·r·∇f` with `ξ = 1/(‖∇f‖² + ε)`
cgd      `w + α·min{1/η, 1/‖∇L‖}·r·∇f`
ngd      `w + α/(‖∇L‖ + β)·r·∇f`
adam     bias-corrected Adam step on `∇L`
ignd_adam  Adam step on the scaled gradient `ξ·∇L`
======== =====================================================
"""
import logging
import collections
import numpy as np
from ...defaults import dfl
from ...errors import DegenerateScale, DimensionMismatch

log = logging.getLogger(__name__)

RULES = ('sgd', 'ignd', 'cgd', 'ngd', 'adam', 'ignd_adam')

#: Diagnostics of one update: scaling `ξ`, `‖∇L‖` and `‖Δw‖`.
StepDiagnostics = collections.namedtuple(
    'StepDiagnostics', ['xi', 'loss_grad_norm', 'effective_step_norm']
)


class LRSchedule:
    """
    Learning-rate schedule.

    - `constant`: `α_t = alpha0`,
    - `inverse_time`: `α_t = alpha0/(1 + t/decay)` (Robbins-Monro),
    - `geometric`: log-linear decay from `alpha0` to `alpha_end` over
      `horizon` steps, then constant.
    """
    kinds = ('constant', 'inverse_time', 'geometric')

    def __init__(self, kind='constant', alpha0=None, decay=None,
                 alpha_end=None, horizon=None):
        alpha0 = dfl.values.alpha if alpha0 is None else float(alpha0)
        decay = dfl.values.decay if decay is None else float(decay)
        if kind not in self.kinds:
            raise ValueError('Unknown schedule %r!' % kind)
        if not alpha0 > 0:
            raise ValueError('Learning rate must be positive!')
        if kind == 'inverse_time' and not decay > 0:
            raise ValueError('Decay must be positive!')
        if kind == 'geometric' and not (alpha_end and alpha_end > 0):
            raise ValueError('Geometric schedule needs a positive alpha_end!')
        self.kind, self.alpha0, self.decay = kind, alpha0, decay
        self.alpha_end = alpha_end and float(alpha_end)
        self.horizon = horizon

    def __repr__(self):
        return 'LRSchedule(%r, alpha0=%r, decay=%r, alpha_end=%r, ' \
               'horizon=%r)' % (self.kind, self.alpha0, self.decay,
                                self.alpha_end, self.horizon)


def schedule_alpha(s, t):
    """
    Returns the learning rate at step `t`.

    :param s:
        Learning-rate schedule.
    :type s: LRSchedule

    :param t:
        Step index (from 0).
    :type t: int

    :return:
        Learning rate.
    :rtype: float
    """
    if s.kind == 'inverse_time':
        return s.alpha0 / (1.0 + t / s.decay)
    if s.kind == 'geometric' and s.horizon and s.horizon > 1:
        frac = min(t, s.horizon - 1) / (s.horizon - 1)
        return float(s.alpha0 * (s.alpha_end / s.alpha0) ** frac)
    return s.alpha0


class OptimConfig:
    """
    Update rule and its hyperparameters.
    """

    def __init__(self, rule='ignd', alpha=None, epsilon=None, eta=None,
                 beta_ngd=None, adam_beta1=None, adam_beta2=None,
                 adam_eps=None):
        v = dfl.values
        if rule not in RULES:
            raise ValueError('Unknown update rule %r!' % rule)
        if not isinstance(alpha, LRSchedule):
            alpha = LRSchedule(alpha0=alpha)
        self.rule, self.alpha = rule, alpha
        self.epsilon = v.epsilon if epsilon is None else float(epsilon)
        self.eta = v.eta if eta is None else float(eta)
        self.beta_ngd = v.beta_ngd if beta_ngd is None else float(beta_ngd)
        self.adam_beta1 = v.adam_beta1 if adam_beta1 is None else adam_beta1
        self.adam_beta2 = v.adam_beta2 if adam_beta2 is None else adam_beta2
        self.adam_eps = v.adam_eps if adam_eps is None else adam_eps
        if self.epsilon < 0 or self.beta_ngd < 0:
            raise ValueError('epsilon and beta_ngd must be non-negative!')
        if not self.eta > 0:
            raise ValueError('eta must be positive!')

    @classmethod
    def from_config(cls, config, horizon=None):
        """
        Builds the optimizer from the `optimizer.*` keys of a flat config.

        :param config:
            Validated experiment config.
        :type config: dict

        :param horizon:
            Steps of the geometric schedule.
        :type horizon: int, optional

        :rtype: OptimConfig
        """
        c = {k[10:]: v for k, v in config.items()
             if k.startswith('optimizer.')}
        alpha = LRSchedule(
            kind=c.get('schedule', 'constant'), alpha0=c.get('alpha'),
            decay=c.get('decay'), alpha_end=c.get('alpha_end'),
            horizon=horizon
        )
        return cls(
            rule=c.get('rule', 'ignd'), alpha=alpha, epsilon=c.get('epsilon'),
            eta=c.get('eta'), beta_ngd=c.get('beta_ngd'),
            adam_beta1=c.get('adam_beta1'), adam_beta2=c.get('adam_beta2'),
            adam_eps=c.get('adam_eps')
        )

    @property
    def uses_adam(self):
        return self.rule in ('adam', 'ignd_adam')


class OptimState:
    """
    Mutable state of one training run.

    :param n_params:
        Weight dimension.
    :type n_params: int

    :param adam:
        Allocate the Adam moment accumulators?
    :type adam: bool
    """

    def __init__(self, n_params, adam=False):
        self.n_params, self.step_count = int(n_params), 0
        self.max_grad_sq_seen = 0.0
        self.adam_m = self.adam_v = None
        if adam:
            self.adam_m, self.adam_v = np.zeros(n_params), np.zeros(n_params)

    @classmethod
    def new(cls, config, n_params):
        return cls(n_params, adam=config.uses_adam)


def ignd_scale(grad_sq_norm, epsilon):
    """
    Returns the scalar Gauss-Newton scaling `ξ = 1/(‖∇f‖² + ε)`.

    :param grad_sq_norm:
        Squared gradient norm `‖∇f‖²`.
    :type grad_sq_norm: float

    :param epsilon:
        Levenberg-Marquardt regularizer.
    :type epsilon: float

    :return:
        Scaling `ξ`.
    :rtype: float
    """
    den = grad_sq_norm + epsilon
    if not den > 0:
        raise DegenerateScale(
            'Gauss-Newton scaling is undefined (‖∇f‖² + ε = %r)!' % den
        )
    return 1.0 / den


def _adam(config, state, d, alpha):
    b1, b2 = config.adam_beta1, config.adam_beta2
    state.adam_m *= b1
    state.adam_m += (1 - b1) * d
    state.adam_v *= b2
    state.adam_v += (1 - b2) * d * d
    t = state.step_count + 1
    m_hat = state.adam_m / (1 - b1 ** t)
    v_hat = state.adam_v / (1 - b2 ** t)
    return -alpha * m_hat / (np.sqrt(v_hat) + config.adam_eps)


def step(config, state, w, ev):
    """
    Applies one incremental update.

    :param config:
        Update rule.
    :type config: OptimConfig

    :param state:
        Run state (updated in place).
    :type state: OptimState

    :param w:
        Current weights.
    :type w: numpy.array

    :param ev:
        Sample evaluation at `w`.
    :type ev: ignd.core.model.approximator.GradEval

    :return:
        Updated weights and step diagnostics.
    :rtype: (numpy.array, StepDiagnostics)
    """
    g, r = ev.gradient, ev.residual
    if g.shape != np.shape(w):
        raise DimensionMismatch(
            'Gradient shape %s differs from weights %s!' % (
                g.shape, np.shape(w)
            )
        )
    rule, alpha = config.rule, schedule_alpha(config.alpha, state.step_count)
    lg_norm = abs(r) * np.sqrt(ev.grad_sq_norm)

    if rule == 'sgd':
        xi = 1.0
    elif rule in ('ignd', 'ignd_adam'):
        xi = ignd_scale(ev.grad_sq_norm, config.epsilon)
    elif rule == 'cgd':
        xi = min(1 / config.eta, 1 / lg_norm) if lg_norm else 1 / config.eta
    elif rule == 'ngd':
        if not lg_norm + config.beta_ngd > 0:
            raise DegenerateScale('Normalized step is undefined (‖∇L‖ = 0)!')
        xi = 1.0 / (lg_norm + config.beta_ngd)
    else:  # adam
        xi = 1.0

    if config.uses_adam:
        dw = _adam(config, state, -xi * r * g, alpha)
    else:
        dw = (alpha * xi * r) * g

    state.step_count += 1
    state.max_grad_sq_seen = max(state.max_grad_sq_seen, ev.grad_sq_norm)
    return w + dw, StepDiagnostics(
        float(xi), float(lg_norm), float(np.linalg.norm(dw))
    )


def xi_within_bounds(xi, state, epsilon):
    """
    Checks the bounded-gradient assumption on the recorded scaling.

    With `ε > 0` every `ξ` must lie in `[1/(Q_max + ε), 1/ε]`, where `Q_max` is
    the largest `‖∇f‖²` seen so far.

    :rtype: bool
    """
    if not epsilon > 0:
        return True
    lo = 1.0 / (state.max_grad_sq_seen + epsilon)
    return lo * (1 - 1e-12) <= xi <= (1.0 / epsilon) * (1 + 1e-12)
