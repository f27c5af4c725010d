# -*- coding: utf-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
"""
Functions and `dsp` model to model the Q-learning with a neural network.

The environment is the classic cart-pole (Euler integration, pinned constants
in :data:`ignd.defaults.dfl.functions.cartpole_step`). The network input is
the state concatenated with the one-hot action; TD targets come from a frozen
copy of the weights refreshed every `target_update` steps. There is no replay
buffer: every transition is learned once, when it happens.
"""
import math
import logging
import numpy as np
import schedula as sh
from ...defaults import dfl
from ...utils import seeded_rng, greedy_action, CurvePoint
from ...errors import SteppedTerminal, Diverged
from .approximator import MLP, layer_specs, eval_with_gradient
from .optim import OptimConfig, OptimState, step, xi_within_bounds

log = logging.getLogger(__name__)

dsp = sh.BlueDispatcher(
    name='cartpole', raises=True,
    description='Models the Q-learning with a neural network on CartPole.'
)

N_ACTIONS = 2  # push left, push right.


def cartpole_failed(state):
    """
    Returns True when the pole fell or the cart left the track.
    """
    c = dfl.functions.cartpole_step
    return abs(state[0]) > c.x_threshold or abs(state[2]) > c.theta_threshold


def cartpole_reset(rng):
    """
    Draws the initial state uniformly in `±init_range`.

    :rtype: numpy.array
    """
    r = dfl.functions.cartpole_step.init_range
    return rng.uniform(-r, r, size=4)


def cartpole_step(state, action):
    """
    Integrates the cart-pole dynamics over one step.

    :param state:
        Cart position [m], cart velocity [m/s], pole angle [rad] and pole
        angular velocity [rad/s].
    :type state: numpy.array

    :param action:
        0 pushes left, 1 pushes right.
    :type action: int

    :return:
        Next state and original reward (1 per step).
    :rtype: (numpy.array, float)
    """
    if cartpole_failed(state):
        raise SteppedTerminal('Cannot step a fallen pole!')
    c = dfl.functions.cartpole_step
    x, x_dot, theta, theta_dot = state
    force = c.force_mag if action == 1 else -c.force_mag
    cos, sin = math.cos(theta), math.sin(theta)
    total_mass = c.masspole + c.masscart
    pml = c.masspole * c.length
    temp = (force + pml * theta_dot ** 2 * sin) / total_mass
    theta_acc = (c.gravity * sin - cos * temp) / (
        c.length * (4.0 / 3.0 - c.masspole * cos ** 2 / total_mass)
    )
    x_acc = temp - pml * theta_acc * cos / total_mass
    return np.array([
        x + c.tau * x_dot, x_dot + c.tau * x_acc,
        theta + c.tau * theta_dot, theta_dot + c.tau * theta_acc
    ]), 1.0


def cartpole_mp_reward(state):
    """
    Returns the modified cart-pole reward `max{5 - 100θ² - θ̇², 0}`.

    :param state:
        Cart-pole state.
    :type state: numpy.array

    :rtype: float
    """
    return max(5.0 - 100.0 * state[2] ** 2 - state[3] ** 2, 0.0)


def acrobot_mp_reward(s1_angle, s2_angle, torque_action):
    """
    Returns the modified acrobot reward.

    It is minus the squared height gap of the free end from the top, minus one
    when torque is applied (`torque_action` in {1, 3}).

    :rtype: float
    """
    h = 2.0 + math.cos(s1_angle) + math.cos(s1_angle + s2_angle)
    return -h * h - float(torque_action in (1, 3))


class QNetConfig:
    """
    Deep Q-learning hyperparameters.
    """

    def __init__(self, hidden=(32, 64, 32), gamma=0.99, target_update=100,
                 epsilon_start=1.0, epsilon_end=0.05, exploration_fraction=1.0,
                 total_steps=20000, reward='mp'):
        if target_update < 1:
            raise ValueError('Target update period must be positive!')
        if reward not in ('mp', 'original'):
            raise ValueError('Unknown reward %r!' % reward)
        self.hidden, self.gamma = tuple(hidden), float(gamma)
        self.target_update = int(target_update)
        self.epsilon_start, self.epsilon_end = epsilon_start, epsilon_end
        self.exploration_fraction = exploration_fraction
        self.total_steps, self.reward = int(total_steps), reward

    def epsilon(self, t):
        """
        Linearly annealed exploration probability at global step `t`.
        """
        span = self.exploration_fraction * self.total_steps
        frac = min(t / span, 1.0) if span > 0 else 1.0
        return self.epsilon_start + frac * (
            self.epsilon_end - self.epsilon_start
        )


def q_input(state, action, n_actions=N_ACTIONS):
    """
    Returns the network input `[sᵀ onehot(a)ᵀ]ᵀ`.

    :rtype: numpy.array
    """
    x = np.zeros(len(state) + n_actions)
    x[:len(state)], x[len(state) + action] = state, 1.0
    return x


def q_values(model, w, state, n_actions=N_ACTIONS):
    """
    Returns the action values of a state by enumerating the actions.

    :rtype: numpy.array
    """
    x = np.stack([q_input(state, a, n_actions) for a in range(n_actions)])
    return np.atleast_1d(model.predict(w, x))


def deep_q_train(model, config, optim_config, episodes, seed, w0=None):
    """
    Trains the Q-network on CartPole with ε-greedy exploration.

    :param model:
        Q-network taking `[state, onehot(action)]`.
    :type model: ignd.core.model.approximator.MLP

    :param config:
        Deep Q-learning hyperparameters.
    :type config: QNetConfig

    :param optim_config:
        Update rule (`sgd` for Q-learning, `ignd` for IGNDQ).
    :type optim_config: ignd.core.model.optim.OptimConfig

    :param episodes:
        Number of episodes.
    :type episodes: int

    :param seed:
        Run seed.
    :type seed: int

    :param w0:
        Initial weights (default: network initialisation).
    :type w0: numpy.array, optional

    :return:
        Per-episode `return`, `steps`, `xi_mean`, `epsilon_greedy` and
        `td_error_abs_mean`, plus `xi_violations` when the Gauss-Newton
        scaling left its bounds.
    :rtype: list[CurvePoint]
    """
    init_rng, explore_rng = seeded_rng(seed, 301), seeded_rng(seed, 302)
    env_rng = seeded_rng(seed, 303)
    w = model.init(init_rng) if w0 is None else np.array(w0, dtype=float)
    w_target, state = w.copy(), OptimState.new(optim_config, model.n_params)
    max_steps = dfl.functions.cartpole_step.max_steps
    records, t, violations = [], 0, 0
    for episode in range(1, int(episodes) + 1):
        s = cartpole_reset(env_rng)
        ret, xi_sum, td_sum, n = 0.0, 0.0, 0.0, 0
        while True:
            eps = config.epsilon(t)
            if explore_rng.random() < eps:
                a = int(explore_rng.integers(N_ACTIONS))
            else:
                a = greedy_action(q_values(model, w, s))
            s_next, reward = cartpole_step(s, a)
            if config.reward == 'mp':
                reward = cartpole_mp_reward(s_next)
            failed = cartpole_failed(s_next)
            y = reward
            if not failed:
                y += config.gamma * q_values(model, w_target, s_next).max()
            ev = eval_with_gradient(model, w, q_input(s, a), y)
            w, diag = step(optim_config, state, w, ev)
            if not np.isfinite(w).all():
                raise Diverged('Q-network diverged at step %d!' % (t + 1))
            if optim_config.rule == 'ignd' and not xi_within_bounds(
                    diag.xi, state, optim_config.epsilon):
                if not violations:
                    log.warning('Gauss-Newton scaling out of its bounds at '
                                'step %d (xi = %g).', t + 1, diag.xi)
                violations += 1
            t, n = t + 1, n + 1
            if t % config.target_update == 0:
                w_target = w.copy()
            ret, xi_sum = ret + reward, xi_sum + diag.xi
            td_sum += abs(ev.residual)
            s = s_next
            if failed or n >= max_steps:
                break
        records.extend((
            CurvePoint(episode, 'return', ret),
            CurvePoint(episode, 'steps', float(n)),
            CurvePoint(episode, 'xi_mean', xi_sum / n),
            CurvePoint(episode, 'epsilon_greedy', float(eps)),
            CurvePoint(episode, 'td_error_abs_mean', td_sum / n)
        ))
    if violations:
        records.append(CurvePoint(
            int(episodes), 'xi_violations', float(violations)
        ))
    return records


def random_policy_returns(episodes, seed, reward='mp'):
    """
    Returns the per-episode returns of the uniformly random policy.

    :rtype: numpy.array
    """
    rng, env_rng = seeded_rng(seed, 304), seeded_rng(seed, 303)
    max_steps, returns = dfl.functions.cartpole_step.max_steps, []
    for _ in range(int(episodes)):
        s, ret, n = cartpole_reset(env_rng), 0.0, 0
        while True:
            s, r = cartpole_step(s, int(rng.integers(N_ACTIONS)))
            ret += cartpole_mp_reward(s) if reward == 'mp' else r
            n += 1
            if cartpole_failed(s) or n >= max_steps:
                break
        returns.append(ret)
    return np.asarray(returns)


@sh.add_function(dsp, outputs=['qnet_config'])
def define_qnet_config(config):
    """
    Defines the deep Q-learning hyperparameters of `cartpole.*`.

    :param config:
        Validated experiment config.
    :type config: dict

    :rtype: QNetConfig
    """
    return QNetConfig(
        hidden=config['cartpole.hidden'], gamma=config['cartpole.gamma'],
        target_update=config['cartpole.target_update'],
        epsilon_start=config['cartpole.epsilon_start'],
        epsilon_end=config['cartpole.epsilon_end'],
        exploration_fraction=config['cartpole.exploration_fraction'],
        total_steps=config['cartpole.total_steps'],
        reward=config['cartpole.reward']
    )


@sh.add_function(dsp, outputs=['approximator'])
def define_q_network(qnet_config):
    """
    Defines the Q-network (4 state inputs and 2 one-hot action inputs).

    :rtype: ignd.core.model.approximator.MLP
    """
    return MLP(layer_specs(qnet_config.hidden), 4 + N_ACTIONS)


@sh.add_function(dsp, outputs=['optim_config'])
def define_optim_config(config):
    """
    Defines the update rule from the `optimizer.*` keys.

    :rtype: ignd.core.model.optim.OptimConfig
    """
    return OptimConfig.from_config(
        config, horizon=config['cartpole.total_steps']
    )


@sh.add_function(dsp, outputs=['curve'])
def train_cartpole(config, seed, approximator, qnet_config, optim_config):
    """
    Runs the deep Q-learning of one seed.

    :param config:
        Validated experiment config.
    :type config: dict

    :param seed:
        Run seed.
    :type seed: int

    :param approximator:
        Q-network.
    :type approximator: ignd.core.model.approximator.MLP

    :param qnet_config:
        Deep Q-learning hyperparameters.
    :type qnet_config: QNetConfig

    :param optim_config:
        Update rule.
    :type optim_config: ignd.core.model.optim.OptimConfig

    :return:
        Learning curve.
    :rtype: list[CurvePoint]
    """
    return deep_q_train(
        approximator, qnet_config, optim_config, config['episodes'], seed
    )
