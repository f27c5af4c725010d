# -*- coding: utf-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
"""
It contains the property suite run by the `verify` family.

Every check draws its random cases from its own sub-stream of the run seed and
returns whether it passed together with the worst error it measured. The
closed-form updates are compared against the dense oracles of
:mod:`ignd.numkit` and against the defining properties of each component.
"""
import math
import logging
import collections
import numpy as np
from ...defaults import dfl
from ...utils import seeded_rng, CurvePoint
from ...numkit import (
    null_space_basis, solve_regularized_gn_oracle, riccati_fixed_point,
    spectral_radius
)
from .approximator import (
    LinearModel, MLP, layer_specs, eval_with_gradient
)
from .optim import OptimConfig, OptimState, LRSchedule, schedule_alpha, step
from .tabular import GridWorld, tabular_q_learning, sample_feature_scale
from .deep import (
    cartpole_mp_reward, acrobot_mp_reward, q_input, q_values, deep_q_train,
    QNetConfig
)
from .lqr import (
    LQRSystem, load_system, quadratic_features, M_to_weights, weights_to_M,
    policy_q_matrix, policy_evaluation, n_quadratic_features
)

log = logging.getLogger(__name__)

#: Outcome of one property check.
CheckResult = collections.namedtuple('CheckResult', ['name', 'ok', 'error'])

#: Case counts of the full and of the quick suite.
SIZES = {
    False: dict(cases=1000, grad_cases=200, steps=5000, draws=100000),
    True: dict(cases=50, grad_cases=20, steps=500, draws=10000),
}


def _ignd_unit():
    return OptimConfig('ignd', alpha=1.0, epsilon=0.0)


def _random_model(rng, max_params=30):
    if rng.random() < 0.5:
        return LinearModel(int(rng.integers(2, max_params + 1)))
    while True:
        hidden = tuple(rng.integers(1, 6, size=int(rng.integers(1, 3))))
        model = MLP(layer_specs(hidden), int(rng.integers(1, 4)))
        if 2 <= model.n_params <= max_params:
            return model


def _gn_cases(rng, n):
    for _ in range(n):
        model = _random_model(rng)
        w = rng.normal(size=model.n_params)
        x = rng.normal(size=model.input_dim)
        yield eval_with_gradient(model, w, x, rng.normal())


def check_null_space(rng, size):
    err = 0.0
    for _ in range(size['cases']):
        g = rng.normal(size=int(rng.integers(2, 21)))
        z = null_space_basis(g)
        err = max(
            err, np.abs(z.T @ z - np.eye(z.shape[1])).max(),
            np.abs(z.T @ g).max() / np.linalg.norm(g)
        )
    return err <= 1e-12, err


def check_oracle_equivalence(rng, size):
    err, config = 0.0, _ignd_unit()
    for ev in _gn_cases(rng, size['cases']):
        w = np.zeros(ev.gradient.size)
        dw = step(config, OptimState.new(config, w.size), w, ev)[0]
        oracle = solve_regularized_gn_oracle(ev.residual, -ev.gradient)
        err = max(err, np.abs(dw - oracle).max())
    return err <= 1e-9, err


def check_zero_linearized_residual(rng, size):
    err, config = 0.0, _ignd_unit()
    for ev in _gn_cases(rng, size['cases']):
        w = np.zeros(ev.gradient.size)
        dw = step(config, OptimState.new(config, w.size), w, ev)[0]
        err = max(err, abs(ev.residual - ev.gradient @ dw))
    return err <= 1e-10, err


def _pre_activations(model, w, x):
    a, pre = x, []
    for l, (mw, b) in zip(model.layout, model.unflatten(w)):
        z = a @ mw + b
        pre.append(z)
        a = np.maximum(z, 0.0) if l.activation == 'relu' else z
    return np.concatenate(pre[:-1]) if len(pre) > 1 else np.ones(1)


def check_gradient(rng, size, h=1e-6, kink=1e-4):
    err, done = 0.0, 0
    while done < size['grad_cases']:
        hidden = tuple(rng.integers(1, 8, size=int(rng.integers(1, 4))))
        model = MLP(layer_specs(hidden), int(rng.integers(1, 6)))
        w = rng.normal(size=model.n_params)
        x = rng.normal(size=model.input_dim)
        if np.abs(_pre_activations(model, w, x)).min() < kink:
            continue
        g = model.value_and_gradient(w, x)[1]
        for j in range(model.n_params):
            wp, wm = w.copy(), w.copy()
            wp[j] += h
            wm[j] -= h
            fd = (model.predict(wp, x) - model.predict(wm, x)) / (2 * h)
            err = max(err, abs(fd - g[j]) / max(1.0, abs(g[j])))
        done += 1
    return err <= 1e-5, err


def check_layout_round_trip(rng, size):
    for _ in range(size['grad_cases']):
        hidden = tuple(rng.integers(1, 10, size=int(rng.integers(0, 4))))
        model = MLP(layer_specs(hidden), int(rng.integers(1, 10)))
        w = rng.normal(size=model.n_params)
        if model.flatten(model.unflatten(w)).tobytes() != w.tobytes():
            return False, 1.0
    return True, 0.0


def check_linear_homogeneity(rng, size):
    err = 0.0
    for _ in range(size['grad_cases']):
        model = LinearModel(int(rng.integers(1, 30)))
        w, x, c = rng.normal(size=model.n_params), \
            rng.normal(size=model.input_dim), rng.normal() * 10
        v = model.predict(w, x)
        err = max(err, abs(model.predict(c * w, x) - c * v) / max(
            1.0, abs(c * v)
        ))
    return err <= 1e-12, err


def check_epsilon_monotone(rng, size):
    for ev in _gn_cases(rng, size['grad_cases']):
        norms = []
        for eps in np.logspace(-8, 8, 17):
            config = OptimConfig('ignd', alpha=1.0, epsilon=eps)
            norms.append(step(
                config, OptimState.new(config, ev.gradient.size),
                np.zeros(ev.gradient.size), ev
            )[1].effective_step_norm)
        if abs(ev.residual) > 0 and not np.all(np.diff(norms) < 0):
            return False, 1.0
    return True, 0.0


def check_adam_matches_ignd_adam(rng, size):
    seed, traces = int(rng.integers(2 ** 31)), []
    for rule in ('adam', 'ignd_adam'):
        trace = []
        tabular_q_learning(
            GridWorld(), OptimConfig(rule, alpha=0.1, epsilon=0.0), 0.99,
            size['steps'] // 5, 0.1, seed, trace=trace
        )
        traces.append(np.asarray(trace))
    if traces[0].shape != traces[1].shape:
        return False, np.inf
    err = float(np.nanmax(np.abs(traces[0] - traces[1]), initial=0.0))
    return np.array_equal(traces[0], traces[1], equal_nan=True), err


def check_tabular_scale_invariance(rng, size):
    env, seed = GridWorld(), int(rng.integers(2 ** 31))
    phi = sample_feature_scale(
        env.n_states * env.n_actions, dfl.values.phi_max, rng
    )
    runs = []
    for scale in (None, phi):
        trace = []
        curve = tabular_q_learning(
            env, _ignd_unit(), 0.99, size['steps'], 0.1, seed, phi=scale,
            trace=trace
        )
        runs.append((np.asarray(trace), [
            p for p in curve if p.metric in ('return', 'steps')
        ]))
    (t0, c0), (t1, c1) = runs
    if t0.shape != t1.shape or c0 != c1:
        return False, np.inf
    err = float((np.abs(t0 - t1) / np.maximum(1.0, np.abs(t0))).max())
    return err <= 1e-9, err


def check_quadratic_bijection(rng, size):
    err = 0.0
    for _ in range(size['cases']):
        n_s, n_a = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        d = n_s + n_a
        m = rng.normal(size=(d, d))
        m, c = (m + m.T) / 2, rng.normal()
        s, a = rng.normal(size=n_s), rng.normal(size=n_a)
        w = M_to_weights(m, c)
        z = np.concatenate((s, a))
        value = z @ m @ z + c
        mag = max(1.0, np.abs(np.outer(z, z) * m).sum() + abs(c))
        err = max(
            err, abs(w @ quadratic_features(s, a, n_s, n_a) - value) / mag,
            np.abs(weights_to_M(w, n_s, n_a).M - m).max()
        )
    return err <= 1e-12, err


def _lstd_weights(sys, K, n_samples, rng):
    # Least-squares TD fixed point over independent transitions.
    n = n_quadratic_features(sys.n_s, sys.n_a)
    lhs, rhs = np.zeros((n, n)), np.zeros(n)
    for _ in range(n_samples):
        s = rng.normal(size=sys.n_s)
        a = K @ s + rng.normal(size=sys.n_a)
        s_next = sys.A @ s + sys.B @ a + sys.noise(rng)
        x = quadratic_features(s, a)
        x_next = quadratic_features(s_next, K @ s_next)
        lhs += np.outer(x, x - sys.gamma * x_next)
        rhs += x * sys.reward(s, a)
    return np.linalg.lstsq(lhs, rhs, rcond=None)[0]


def check_exact_evaluation(rng, size):
    err = 0.0
    for name in sorted(dfl.functions.load_system.SYSTEMS):
        sys = load_system(name)
        sys = LQRSystem(sys.A, sys.B, sys.Q, sys.R, np.zeros_like(sys.Sigma),
                        sys.gamma)
        K = riccati_fixed_point(sys)[1]
        n = n_quadratic_features(sys.n_s, sys.n_a)
        q = weights_to_M(_lstd_weights(sys, K, 20 * n, rng), sys.n_s, sys.n_a)
        oracle = policy_q_matrix(sys, K)
        for block in ('M_ss', 'M_sa', 'M_aa'):
            err = max(err, np.abs(
                getattr(q, block) - getattr(oracle, block)
            ).max())
    return err <= 1e-3, err


def check_evaluation_scale_invariance(rng, size):
    sys, seed = load_system('uav'), int(rng.integers(2 ** 31))
    K, scale = np.full((sys.n_a, sys.n_s), -0.01), 1 + 99 * rng.random()
    n, traces = n_quadratic_features(sys.n_s, sys.n_a), []
    config = OptimConfig('ignd', alpha=0.5, epsilon=0.0)
    for c in (1.0, scale):
        trace = []
        policy_evaluation(
            sys, K, np.zeros(n), config, size['steps'] // 10,
            seeded_rng(seed), tol=0.0, scale=np.full(n, c), trace=trace
        )
        traces.append(np.asarray(trace))
    err = float((np.abs(traces[0] - traces[1]) / np.maximum(
        1.0, np.abs(traces[0])
    )).max())
    return err <= 1e-9, err


def check_riccati(rng, size):
    err, tol = 0.0, dfl.functions.riccati_fixed_point.tol
    for name in sorted(dfl.functions.load_system.SYSTEMS):
        sys = load_system(name)
        p, k = riccati_fixed_point(sys)
        a, b, g = sys.A, sys.B, sys.gamma
        k_p = -np.linalg.solve(sys.R + g * b.T @ p @ b, g * b.T @ p @ a)
        p_next = sys.Q + g * a.T @ p @ (a + b @ k_p)
        err = max(err, np.abs(p_next - p).max())
        if spectral_radius(a + b @ k) >= 1:
            return False, np.inf
    return err <= 10 * tol, err


def check_robbins_monro(rng, size, n=1000000):
    s = LRSchedule('inverse_time', alpha0=1.0, decay=1.0)
    alpha = schedule_alpha(s, np.arange(n, dtype=float))
    total, total_sq = math.fsum(alpha), math.fsum(alpha[::-1] ** 2)
    err = abs(total_sq - math.pi ** 2 / 6)
    return total >= 13 and err <= 1e-6, err


def check_mp_reward_ranges(rng, size):
    n = size['draws']
    states = np.column_stack((
        rng.uniform(-2.4, 2.4, n), rng.uniform(-5, 5, n),
        rng.uniform(-np.pi, np.pi, n), rng.uniform(-10, 10, n)
    ))
    r_cp = np.array([cartpole_mp_reward(s) for s in states])
    angles = rng.uniform(-np.pi, np.pi, size=(n, 2))
    torque = rng.integers(0, 4, size=n)
    r_ab = np.array([
        acrobot_mp_reward(t1, t2, int(a))
        for (t1, t2), a in zip(angles, torque)
    ])
    ok = r_cp.min() >= 0 and r_cp.max() <= 5 and r_ab.min() >= -17 and \
        r_ab.max() <= 0
    return bool(ok), 0.0 if ok else 1.0


def check_greedy_enumeration(rng, size):
    err = 0.0
    for _ in range(size['grad_cases']):
        model = MLP(layer_specs((8, 8)), 6)
        w, s = model.init(rng), rng.normal(size=4)
        batch = q_values(model, w, s)
        single = [model.predict(w, q_input(s, a)) for a in range(2)]
        err = max(err, np.abs(batch - single).max() / max(
            1.0, np.abs(single).max()
        ))
    return err <= 1e-12, err


def check_uniform_sampling(rng, size, n_items=10, n=1000000):
    counts = np.bincount(rng.integers(n_items, size=n), minlength=n_items)
    p = 1.0 / n_items
    z = np.abs(counts - n * p) / math.sqrt(n * p * (1 - p))
    return bool(z.max() <= 4), float(z.max())


def check_determinism(rng, size):
    seed = int(rng.integers(2 ** 31))
    runs = [tabular_q_learning(
        GridWorld(), _ignd_unit(), 0.99, size['steps'] // 5, 0.1, seed
    ) for _ in range(2)]
    model = MLP(layer_specs((8,)), 6)
    config = QNetConfig(hidden=(8,), total_steps=200)
    optim = OptimConfig('ignd', alpha=0.1)
    curves = [deep_q_train(model, config, optim, 2, seed) for _ in range(2)]
    ok = runs[0] == runs[1] and curves[0] == curves[1]
    return ok, 0.0 if ok else 1.0


#: Property checks in execution order.
CHECKS = (
    ('null_space', check_null_space),
    ('oracle_equivalence', check_oracle_equivalence),
    ('zero_linearized_residual', check_zero_linearized_residual),
    ('gradient', check_gradient),
    ('layout_round_trip', check_layout_round_trip),
    ('linear_homogeneity', check_linear_homogeneity),
    ('epsilon_monotone', check_epsilon_monotone),
    ('adam_matches_ignd_adam', check_adam_matches_ignd_adam),
    ('tabular_scale_invariance', check_tabular_scale_invariance),
    ('quadratic_bijection', check_quadratic_bijection),
    ('exact_evaluation', check_exact_evaluation),
    ('evaluation_scale_invariance', check_evaluation_scale_invariance),
    ('riccati', check_riccati),
    ('robbins_monro', check_robbins_monro),
    ('mp_reward_ranges', check_mp_reward_ranges),
    ('greedy_enumeration', check_greedy_enumeration),
    ('uniform_sampling', check_uniform_sampling),
    ('determinism', check_determinism),
)


def run_checks(seed, quick=False, names=None):
    """
    Runs the property checks.

    :param seed:
        Run seed.
    :type seed: int

    :param quick:
        Run the reduced case counts?
    :type quick: bool

    :param names:
        Checks to run (default: all).
    :type names: list[str], optional

    :return:
        Check outcomes.
    :rtype: list[CheckResult]
    """
    size, results = SIZES[bool(quick)], []
    for i, (name, func) in enumerate(CHECKS):
        if names is not None and name not in names:
            continue
        with np.errstate(over='ignore', invalid='ignore'):
            ok, err = func(seeded_rng(seed, 500 + i), size)
        results.append(CheckResult(name, bool(ok), float(err)))
        if ok:
            log.info('PASS %s (worst error %.3g)', name, err)
        else:
            log.error('FAIL %s (worst error %.3g)', name, err)
    return results


def run_verify(config, seed):
    """
    Runs the property suite of one seed.

    :param config:
        Validated experiment config.
    :type config: dict

    :param seed:
        Run seed.
    :type seed: int

    :return:
        Per check, `<name>` (1 pass, 0 fail) and `<name>.error`.
    :rtype: list[CurvePoint]
    """
    curve = []
    for i, r in enumerate(run_checks(seed, config['verify.quick']), 1):
        curve.append(CurvePoint(i, r.name, float(r.ok)))
        curve.append(CurvePoint(i, r.name + '.error', r.error))
    return curve
