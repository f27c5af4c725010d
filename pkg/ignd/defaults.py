#!/usr/bin/env python
# -*- coding: UTF-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
"""
Constants of the IGND toolkit.
"""
import math
import ignd.utils as ign_utl


#: Container of node default values.
# noinspection PyMissingOrEmptyDocstring,PyPep8Naming
class Values(ign_utl.Constants):
    #: Levenberg-Marquardt regularizer of the Gauss-Newton scaling [-].
    epsilon = 1e-8

    #: Default learning rate [-].
    alpha = 0.1

    #: Learning-rate schedule kind (constant, inverse_time, geometric).
    schedule = 'constant'

    #: Inverse-time decay constant `b` of `alpha0/(1+t/b)` [steps].
    decay = 1000.0

    #: Clipped-GD threshold `η` [-].
    eta = 1.0

    #: Normalized-GD offset `β` [-].
    beta_ngd = 1e-8

    #: Adam first moment decay [-].
    adam_beta1 = 0.9

    #: Adam second moment decay [-].
    adam_beta2 = 0.999

    #: Adam denominator offset [-].
    adam_eps = 1e-8

    #: Hidden layer widths of the feed-forward networks [-].
    hidden_widths = (32, 64, 32)

    #: Train split fraction [-].
    train_fraction = 0.8

    #: FrozenLake 4x4 map (S: start, F: frozen, H: hole, G: goal).
    frozenlake_map = ('SFFF', 'FHFH', 'FFFH', 'HFFG')

    #: FrozenLake episode step limit [steps].
    frozenlake_step_limit = 100

    #: Random integers range of the feature scaling coefficients [-].
    phi_max = 10000


# noinspection PyMissingOrEmptyDocstring,PyPep8Naming
class Functions(ign_utl.Constants):
    # noinspection PyMissingOrEmptyDocstring,PyPep8Naming
    class riccati_fixed_point(ign_utl.Constants):
        #: Convergence tolerance on `‖P_{k+1}-P_k‖∞` [-].
        tol = 1e-12

        #: Maximum number of value recursions [-].
        max_iter = 100000

    # noinspection PyMissingOrEmptyDocstring,PyPep8Naming
    class spectral_radius(ign_utl.Constants):
        #: Number of repeated squarings [-].
        n_squarings = 60

    # noinspection PyMissingOrEmptyDocstring,PyPep8Naming
    class greedy_action(ign_utl.Constants):
        #: Relative tolerance below which two action values are tied [-].
        tie_tol = 1e-9

    # noinspection PyMissingOrEmptyDocstring,PyPep8Naming
    class mape(ign_utl.Constants):
        #: Guard of the percentage denominator [-].
        eps = 1e-15

    # noinspection PyMissingOrEmptyDocstring,PyPep8Naming
    class policy_evaluation(ign_utl.Constants):
        #: Convergence tolerance `η` on `‖w_i - w_{i-1}‖∞` [-].
        tol = 1e-8

        #: Updates before `tol` is checked [-].
        min_steps = 100

        #: Exploration noise variance `σ²` of the actions [-].
        exploration_variance = 16.0

        #: Variance of the (re)start states `s ~ N(0, vI)` [-].
        initial_state_variance = 16.0

        #: Updates between two restarts of the trajectory [-].
        reset_every = 20

        #: Divergence threshold on `‖w‖∞` [-].
        max_abs_weight = 1e12

    # noinspection PyMissingOrEmptyDocstring,PyPep8Naming
    class generalized_policy_iteration(ign_utl.Constants):
        #: Convergence tolerance `η` on `‖K_p - K_{p-1}‖` [-].
        tol = 1e-8

    # noinspection PyMissingOrEmptyDocstring,PyPep8Naming
    class train_incremental(ign_utl.Constants):
        #: Divergence threshold on the absolute weights [-].
        max_abs_weight = 1e12

    # noinspection PyMissingOrEmptyDocstring,PyPep8Naming
    class select_best_alpha(ign_utl.Constants):
        #: Fraction of the final records averaged to score a run [-].
        window_fraction = 0.1

    # noinspection PyMissingOrEmptyDocstring,PyPep8Naming
    class cartpole_step(ign_utl.Constants):
        #: Gravity [m/s2].
        gravity = 9.8

        #: Cart mass [kg].
        masscart = 1.0

        #: Pole mass [kg].
        masspole = 0.1

        #: Half pole length [m].
        length = 0.5

        #: Force magnitude [N].
        force_mag = 10.0

        #: Integration step [s].
        tau = 0.02

        #: Pole angle threshold [rad].
        theta_threshold = 12 * 2 * math.pi / 360

        #: Cart position threshold [m].
        x_threshold = 2.4

        #: Episode step limit [steps].
        max_steps = 500

        #: Initial state half range [-].
        init_range = 0.05

    # noinspection PyMissingOrEmptyDocstring,PyPep8Naming
    class load_system(ign_utl.Constants):
        #: Shipped synthetic LQR benchmarks (`uav`: 2 states / 1 action,
        #: `bdt`: 4 states / 2 actions).
        SYSTEMS = {
            'uav': {
                'A': [[0.9, 0.2], [0.0, 0.8]],
                'B': [[0.1], [0.5]],
                'Q': [[-1.0, 0.0], [0.0, -1.0]],
                'R': [[-1.0]],
                'Sigma': [[0.01, 0.0], [0.0, 0.01]],
                'gamma': 0.9
            },
            'bdt': {
                'A': [[0.9, 0.1, 0.0, 0.0], [0.0, 0.85, 0.1, 0.0],
                      [0.0, 0.0, 0.8, 0.1], [0.0, 0.0, 0.0, 0.75]],
                'B': [[0.1, 0.0], [0.5, 0.0], [0.0, 0.1], [0.0, 0.5]],
                'Q': [[-1.0, 0.0, 0.0, 0.0], [0.0, -1.0, 0.0, 0.0],
                      [0.0, 0.0, -1.0, 0.0], [0.0, 0.0, 0.0, -1.0]],
                'R': [[-1.0, 0.0], [0.0, -1.0]],
                'Sigma': [[0.001, 0.0, 0.0, 0.0], [0.0, 0.001, 0.0, 0.0],
                          [0.0, 0.0, 0.001, 0.0], [0.0, 0.0, 0.0, 0.001]],
                'gamma': 0.9
            }
        }


# noinspection PyMissingOrEmptyDocstring,PyPep8Naming
class Experiments(ign_utl.Constants):
    """
    Default experiment configurations (flat dotted keys) per family.
    """

    # noinspection PyMissingOrEmptyDocstring,PyPep8Naming
    class common(ign_utl.Constants):
        CONFIG = {
            'run_id': None,
            'seeds': [0],
            'output_dir': './outputs',
            'jobs': 1,
            'optimizer.rule': 'ignd',
            'optimizer.alpha': 0.1,
            'optimizer.schedule': 'constant',
            'optimizer.alpha_end': None,
            'optimizer.decay': 1000.0,
            'optimizer.epsilon': 1e-8,
            'optimizer.eta': 1.0,
            'optimizer.beta_ngd': 1e-8,
            'optimizer.adam_beta1': 0.9,
            'optimizer.adam_beta2': 0.999,
            'optimizer.adam_eps': 1e-8,
            'grid.lo': None,
            'grid.hi': None,
            'grid.n': None,
            'grid.enabled': False,
            'grid.logspace': True,
        }

    # noinspection PyMissingOrEmptyDocstring,PyPep8Naming
    class supervised(ign_utl.Constants):
        CONFIG = {
            'steps': 20000,
            'optimizer.alpha': 0.1,
            'supervised.dataset': 'housing',
            'supervised.target': 'target',
            'supervised.columns': None,
            'supervised.n_samples': 2000,
            'supervised.model': 'mlp',
            'supervised.hidden': [32, 64, 32],
            'supervised.train_fraction': 0.8,
            'supervised.eval_every': 500,
        }

    # noinspection PyMissingOrEmptyDocstring,PyPep8Naming
    class frozenlake(ign_utl.Constants):
        CONFIG = {
            'steps': 5000,
            'optimizer.rule': 'ignd',
            'optimizer.alpha': 1.0,
            'optimizer.epsilon': 0.0,
            'frozenlake.gamma': 0.99,
            'frozenlake.exploration': 0.1,
            'frozenlake.slippery': False,
            'frozenlake.scaled': False,
            'frozenlake.phi_max': 10000,
            'frozenlake.tie_break': 'random',
        }

    # noinspection PyMissingOrEmptyDocstring,PyPep8Naming
    class cartpole(ign_utl.Constants):
        #: Hyperparameters of the CartPole-v1 experiments.
        CONFIG = {
            'episodes': 300,
            'optimizer.rule': 'ignd',
            'optimizer.alpha': 0.1,
            'cartpole.reward': 'mp',
            'cartpole.hidden': [32, 64, 32],
            'cartpole.gamma': 0.99,
            'cartpole.target_update': 100,
            'cartpole.epsilon_start': 1.0,
            'cartpole.epsilon_end': 0.05,
            'cartpole.exploration_fraction': 1.0,
            'cartpole.total_steps': 20000,
        }

    # noinspection PyMissingOrEmptyDocstring,PyPep8Naming
    class lqr(ign_utl.Constants):
        CONFIG = {
            'steps': 1000,
            'optimizer.rule': 'ignd',
            'optimizer.alpha': 1.0,
            'optimizer.schedule': 'geometric',
            'optimizer.alpha_end': 0.001,
            'lqr.system': 'uav',
            'lqr.improvements': 50,
            'lqr.k0': -0.01,
            'lqr.exploration_variance': None,
            'lqr.warm_start': True,
        }

    # noinspection PyMissingOrEmptyDocstring,PyPep8Naming
    class verify(ign_utl.Constants):
        CONFIG = {
            'steps': 1000,
            'verify.quick': False,
        }


# noinspection PyPep8Naming,PyMissingOrEmptyDocstring
class Defaults(ign_utl.Constants):
    values = Values()
    functions = Functions()
    experiments = Experiments()

    #: Machine error.
    EPS = 2.220446049250313e-16

    #: Infinite value.
    INF = 1e12


dfl = Defaults()
