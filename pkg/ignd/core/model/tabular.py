# -*- coding: utf-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
"""
Functions and `dsp` model to model the tabular Q-learning on a 4x4 FrozenLake.

The action-value table is the linear model over (optionally scaled) one-hot
state-action features, so `q(s, a) = φ_j·w_j` with `j = s·n_actions + a`.
With the `sgd` rule the update is the classic Q-learning one, with `ignd` it is
scaled by `ξ = 1/(φ_j² + ε)` and the predicted values do not depend on `φ`.
"""
import logging
import collections
import numpy as np
import schedula as sh
from ...defaults import dfl
from ...utils import seeded_rng, greedy_action, CurvePoint
from ...errors import SteppedTerminal, IndexOutOfRange, ZeroScale
from .approximator import GradEval, tabular_features
from .optim import OptimConfig, OptimState, step

log = logging.getLogger(__name__)

dsp = sh.BlueDispatcher(
    name='frozenlake', raises=True,
    description='Models the tabular Q-learning on the FrozenLake grid world.'
)

#: Actions: left, down, right, up.
MOVES = ((0, -1), (1, 0), (0, 1), (-1, 0))

#: One environment transition.
Transition = collections.namedtuple(
    'Transition', ['state', 'action', 'reward', 'next_state', 'terminal']
)


class GridWorld:
    """
    FrozenLake-style grid world.

    Reaching the goal pays 1, everything else 0; episodes end on the goal, on a
    hole, or after `step_limit` steps.

    :param desc:
        Map rows (`S` start, `F` frozen, `H` hole, `G` goal).
    :type desc: tuple[str]

    :param slippery:
        Move in the intended or in one of the two perpendicular directions with
        probability 1/3 each?
    :type slippery: bool

    :param step_limit:
        Episode step limit.
    :type step_limit: int
    """
    n_actions = len(MOVES)

    def __init__(self, desc=None, slippery=False, step_limit=None):
        desc = dfl.values.frozenlake_map if desc is None else desc
        self.desc = tuple(desc)
        self.n_rows, self.n_cols = len(self.desc), len(self.desc[0])
        cells = ''.join(self.desc)
        self.n_states = len(cells)
        self.start, self.goal = cells.index('S'), cells.index('G')
        self.holes = frozenset(i for i, c in enumerate(cells) if c == 'H')
        self.slippery = bool(slippery)
        self.step_limit = int(
            dfl.values.frozenlake_step_limit if step_limit is None
            else step_limit
        )

    def is_absorbing(self, state):
        return state == self.goal or state in self.holes

    def move(self, state, direction):
        """
        Returns the cell reached from `state`; off-grid moves stay in place.
        """
        r, c = divmod(state, self.n_cols)
        dr, dc = MOVES[direction]
        r = min(max(r + dr, 0), self.n_rows - 1)
        c = min(max(c + dc, 0), self.n_cols - 1)
        return r * self.n_cols + c


def env_step(env, state, action, rng=None, elapsed=0):
    """
    Steps the grid world.

    :param env:
        Grid world.
    :type env: GridWorld

    :param state:
        Current cell.
    :type state: int

    :param action:
        Action index (0 left, 1 down, 2 right, 3 up).
    :type action: int

    :param rng:
        Random generator (slippery dynamics only).
    :type rng: numpy.random.Generator, optional

    :param elapsed:
        Steps already taken in the episode.
    :type elapsed: int

    :return:
        Transition.
    :rtype: Transition
    """
    if not (0 <= state < env.n_states and 0 <= action < env.n_actions):
        raise IndexOutOfRange('Invalid state-action (%r, %r)!' % (
            state, action
        ))
    if env.is_absorbing(state) or elapsed >= env.step_limit:
        raise SteppedTerminal('Cannot step from terminal state %d!' % state)
    direction = action
    if env.slippery:
        direction = (action + int(rng.integers(3)) - 1) % env.n_actions
    nxt = env.move(state, direction)
    terminal = env.is_absorbing(nxt) or elapsed + 1 >= env.step_limit
    return Transition(
        state, action, float(nxt == env.goal), nxt, terminal
    )


def sample_feature_scale(n, phi_max, rng):
    """
    Draws `n` scaling coefficients uniformly from the non-zero integers in
    `[-phi_max, phi_max]` (zeros are rejected and redrawn).

    :rtype: numpy.array
    """
    phi = rng.integers(-phi_max, phi_max + 1, size=n)
    while not phi.all():
        zeros = phi == 0
        phi[zeros] = rng.integers(-phi_max, phi_max + 1, size=zeros.sum())
    return phi.astype(float)


def tabular_q_learning(env, config, gamma, steps, exploration, seed,
                       phi=None, tie_break='random', trace=None):
    """
    Runs ε-greedy Q-learning on the one-hot linear model.

    :param env:
        Grid world.
    :type env: GridWorld

    :param config:
        Update rule (`sgd` for classic Q-learning, `ignd` for IGNDQ).
    :type config: ignd.core.model.optim.OptimConfig

    :param gamma:
        Discount factor.
    :type gamma: float

    :param steps:
        Environment step budget.
    :type steps: int

    :param exploration:
        Probability of a uniformly random action.
    :type exploration: float

    :param seed:
        Run seed.
    :type seed: int

    :param phi:
        Feature scaling coefficients.
    :type phi: numpy.array, optional

    :param tie_break:
        Greedy tie-break (`first` or `random`).
    :type tie_break: str

    :param trace:
        If given, the predicted `q(S_t, A_t)` of every step is appended.
    :type trace: list, optional

    :return:
        Per-episode `return`, `steps`, `xi_mean` and cumulative `env_steps`.
    :rtype: list[CurvePoint]
    """
    if not 0 <= gamma <= 1:
        raise ValueError('Discount factor must be in [0, 1]!')
    n_s, n_a = env.n_states, env.n_actions
    n = n_s * n_a
    scale = np.ones(n) if phi is None else np.asarray(phi, dtype=float)
    if scale.size != n:
        raise IndexOutOfRange('Expected %d scaling coefficients!' % n)
    if not scale.all():
        raise ZeroScale('Feature scaling coefficients must be non-zero!')

    explore_rng, env_rng = seeded_rng(seed, 201), seeded_rng(seed, 202)
    tie_rng = explore_rng if tie_break == 'random' else None
    w, state = np.zeros(n), OptimState.new(config, n)
    q_bound = 1.0 / (1.0 - gamma) if gamma < 1 else np.inf
    records, violations, t, episode = [], 0, 0, 0

    def _q(s):
        sl = slice(s * n_a, (s + 1) * n_a)
        return scale[sl] * w[sl]

    with np.errstate(over='ignore', invalid='ignore'):
        while t < steps:
            s, ret, xi_sum, elapsed = env.start, 0.0, 0.0, 0
            while True:
                if explore_rng.random() < exploration:
                    a = int(explore_rng.integers(n_a))
                else:
                    a = greedy_action(_q(s), tie_rng)
                tr = env_step(env, s, a, env_rng, elapsed)
                x = tabular_features(s, a, n_s, n_a, phi)
                j = s * n_a + a
                q = float(scale[j] * w[j])
                target = tr.reward
                if not env.is_absorbing(tr.next_state):
                    target += gamma * np.max(_q(tr.next_state))
                w, diag = step(config, state, w, GradEval(
                    q, x, target - q, float(x @ x)
                ))
                if trace is not None:
                    trace.append(q)
                if abs(q) > q_bound * (1 + 1e-9) or not np.isfinite(q):
                    if not violations:
                        log.warning('Action value %g exceeds its bound %g.',
                                    q, q_bound)
                    violations += 1
                ret, xi_sum, elapsed, t = ret + tr.reward, xi_sum + diag.xi, \
                    elapsed + 1, t + 1
                s = tr.next_state
                if tr.terminal or t >= steps:
                    break
            if not tr.terminal:
                break
            episode += 1
            records.extend((
                CurvePoint(episode, 'return', ret),
                CurvePoint(episode, 'steps', float(elapsed)),
                CurvePoint(episode, 'xi_mean', xi_sum / elapsed),
                CurvePoint(episode, 'env_steps', float(t))
            ))
    if violations:
        records.append(CurvePoint(
            episode, 'q_bound_violations', float(violations)
        ))
    return records


@sh.add_function(dsp, outputs=['env'])
def define_grid_world(config):
    """
    Defines the grid world of `frozenlake.*`.

    :param config:
        Validated experiment config.
    :type config: dict

    :rtype: GridWorld
    """
    return GridWorld(slippery=config['frozenlake.slippery'])


@sh.add_function(dsp, outputs=['phi'])
def define_feature_scale(config, seed, env):
    """
    Draws the feature scaling coefficients when `frozenlake.scaled` is set.

    :param config:
        Validated experiment config.
    :type config: dict

    :param seed:
        Run seed.
    :type seed: int

    :param env:
        Grid world.
    :type env: GridWorld

    :return:
        Scaling coefficients or None.
    :rtype: numpy.array | None
    """
    if not config['frozenlake.scaled']:
        return None
    return sample_feature_scale(
        env.n_states * env.n_actions, config['frozenlake.phi_max'],
        seeded_rng(seed, 203)
    )


@sh.add_function(dsp, outputs=['optim_config'])
def define_optim_config(config):
    """
    Defines the update rule from the `optimizer.*` keys.

    :rtype: ignd.core.model.optim.OptimConfig
    """
    return OptimConfig.from_config(config, horizon=config['steps'])


@sh.add_function(dsp, outputs=['curve'])
def train_frozenlake(config, seed, env, phi, optim_config):
    """
    Runs the tabular Q-learning of one seed.

    :param config:
        Validated experiment config.
    :type config: dict

    :param seed:
        Run seed.
    :type seed: int

    :param env:
        Grid world.
    :type env: GridWorld

    :param phi:
        Feature scaling coefficients or None.
    :type phi: numpy.array | None

    :param optim_config:
        Update rule.
    :type optim_config: ignd.core.model.optim.OptimConfig

    :return:
        Learning curve.
    :rtype: list[CurvePoint]
    """
    return tabular_q_learning(
        env, optim_config, config['frozenlake.gamma'], config['steps'],
        config['frozenlake.exploration'], seed, phi=phi,
        tie_break=config['frozenlake.tie_break']
    )
