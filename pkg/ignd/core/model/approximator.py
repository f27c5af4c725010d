# -*- coding: utf-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
"""
Functions and classes to model the function approximators `f_w`.

Every approximator maps a feature vector to a scalar and exposes the exact
gradient with respect to its flat weight vector (`FlatWeights`, a float64
:class:`numpy.ndarray`):

- :class:`LinearModel`: `f_w(x) = wᵀx` (the tabular model is this one fed with
  :func:`tabular_features`),
- :class:`MLP`: feed-forward network with ReLU hidden layers, identity scalar
  output and reverse-mode differentiation.
"""
import struct
import collections
import numpy as np
from ...errors import (
    DimensionMismatch, LengthMismatch, IndexOutOfRange, ZeroScale
)

#: Layer description (`activation` is `relu` or `identity`).
LayerSpec = collections.namedtuple('LayerSpec', ['width', 'activation'])

#: Per-sample evaluation: prediction, `∇_w f`, residual `y - f` and `‖∇_w f‖²`.
GradEval = collections.namedtuple(
    'GradEval', ['value', 'gradient', 'residual', 'grad_sq_norm']
)

#: Per-layer offsets inside the flat weights (weights row-major, then biases).
LayerLayout = collections.namedtuple(
    'LayerLayout', ['fan_in', 'fan_out', 'w_slice', 'b_slice', 'activation']
)

_activations = ('relu', 'identity')


def layer_specs(hidden_widths=()):
    """
    Returns the layer specs of a ReLU network with scalar identity output.

    :param hidden_widths:
        Hidden layer widths.
    :type hidden_widths: list[int] | tuple[int]

    :return:
        Layer specs.
    :rtype: list[LayerSpec]
    """
    specs = [LayerSpec(int(w), 'relu') for w in hidden_widths]
    specs.append(LayerSpec(1, 'identity'))
    return specs


class LinearModel:
    """
    Linear approximator `f_w(x) = wᵀx` (no bias).

    :param input_dim:
        Feature dimension.
    :type input_dim: int
    """

    def __init__(self, input_dim):
        if input_dim < 1:
            raise DimensionMismatch('Input dimension must be positive!')
        self.input_dim = self.n_params = int(input_dim)

    def __repr__(self):
        return '%s(%d)' % (self.__class__.__name__, self.input_dim)

    # noinspection PyUnusedLocal
    def init(self, rng=None):
        """
        Returns zero weights.
        """
        return np.zeros(self.n_params)

    def predict(self, w, x):
        """
        Evaluates the model on one (1-D) or many (2-D) feature rows.
        """
        return np.asarray(x, dtype=float) @ w

    def value_and_gradient(self, w, x):
        """
        Returns `f_w(x)` and `∇_w f_w(x) = x`.
        """
        x = np.asarray(x, dtype=float)
        return float(x @ w), x.copy()


def _layout(specs, input_dim):
    layout, off, fan_in = [], 0, int(input_dim)
    for spec in specs:
        width, act = int(spec.width), spec.activation
        if width < 1:
            raise DimensionMismatch('Layer width must be positive!')
        if act not in _activations:
            raise ValueError('Unknown activation %r!' % act)
        ws = slice(off, off + fan_in * width)
        bs = slice(ws.stop, ws.stop + width)
        layout.append(LayerLayout(fan_in, width, ws, bs, act))
        off, fan_in = bs.stop, width
    return layout


class MLP:
    """
    Feed-forward network with scalar output.

    :param specs:
        Layer specs; the last one must be `LayerSpec(1, 'identity')`.
    :type specs: list[LayerSpec]

    :param input_dim:
        Feature dimension.
    :type input_dim: int
    """

    def __init__(self, specs, input_dim):
        specs = [LayerSpec(*s) for s in specs]
        if input_dim < 1:
            raise DimensionMismatch('Input dimension must be positive!')
        if not specs or tuple(specs[-1]) != (1, 'identity'):
            raise DimensionMismatch(
                'Output layer must have width 1 and identity activation!'
            )
        self.specs, self.input_dim = specs, int(input_dim)
        self.layout = _layout(specs, input_dim)
        self.n_params = self.layout[-1].b_slice.stop

    def __repr__(self):
        dims = [self.input_dim] + [s.width for s in self.specs]
        return '%s(%s)' % (self.__class__.__name__, dims)

    def init(self, rng):
        """
        Returns Glorot-uniform weights and zero biases.
        """
        return mlp_init(self.specs, self.input_dim, rng)

    def unflatten(self, w):
        """
        Splits the flat weights into per-layer `(W, b)` views.

        :param w:
            Flat weights.
        :type w: numpy.array

        :return:
            Per-layer weight matrices `(fan_in, fan_out)` and bias vectors.
        :rtype: list[(numpy.array, numpy.array)]
        """
        w = np.asarray(w)
        if w.size != self.n_params:
            raise LengthMismatch(
                'Expected %d weights, got %d!' % (self.n_params, w.size)
            )
        return [
            (w[l.w_slice].reshape(l.fan_in, l.fan_out), w[l.b_slice])
            for l in self.layout
        ]

    def flatten(self, layers):
        """
        Joins per-layer `(W, b)` into flat weights.
        """
        w = np.empty(self.n_params)
        for l, (mw, b) in zip(self.layout, layers):
            w[l.w_slice], w[l.b_slice] = np.ravel(mw), b
        return w

    def predict(self, w, x):
        """
        Evaluates the network on one (1-D) or many (2-D) feature rows.
        """
        x = np.asarray(x, dtype=float)
        a = np.atleast_2d(x)
        for l, (mw, b) in zip(self.layout, self.unflatten(w)):
            a = a @ mw + b
            if l.activation == 'relu':
                a = np.maximum(a, 0.0)
        a = a[:, 0]
        return float(a[0]) if x.ndim == 1 else a

    def value_and_gradient(self, w, x):
        """
        Returns `f_w(x)` and the reverse-mode gradient `∇_w f_w(x)`.

        The ReLU derivative at exactly 0 is 0.
        """
        layers = self.unflatten(w)
        acts, pre = [np.asarray(x, dtype=float)], []
        for l, (mw, b) in zip(self.layout, layers):
            z = acts[-1] @ mw + b
            pre.append(z)
            acts.append(np.maximum(z, 0.0) if l.activation == 'relu' else z)

        grad, delta = np.empty(self.n_params), np.ones(1)
        for i in range(len(layers) - 1, -1, -1):
            l = self.layout[i]
            if l.activation == 'relu':
                delta = delta * (pre[i] > 0)
            grad[l.w_slice] = np.outer(acts[i], delta).ravel()
            grad[l.b_slice] = delta
            delta = layers[i][0] @ delta
        return float(acts[-1][0]), grad


def mlp_init(specs, input_dim, rng):
    """
    Draws initial network weights.

    Weights are uniform in `±√(6/(fan_in+fan_out))`, biases are zero.

    :param specs:
        Layer specs.
    :type specs: list[LayerSpec]

    :param input_dim:
        Feature dimension.
    :type input_dim: int

    :param rng:
        Random generator.
    :type rng: numpy.random.Generator

    :return:
        Flat weights.
    :rtype: numpy.array
    """
    layout = _layout([LayerSpec(*s) for s in specs], input_dim)
    w = np.zeros(layout[-1].b_slice.stop)
    for l in layout:
        lim = np.sqrt(6.0 / (l.fan_in + l.fan_out))
        w[l.w_slice] = rng.uniform(-lim, lim, l.fan_in * l.fan_out)
    return w


def eval_with_gradient(model, w, x, y):
    """
    Evaluates prediction, gradient and residual of one sample.

    :param model:
        Function approximator.
    :type model: LinearModel | MLP

    :param w:
        Flat weights.
    :type w: numpy.array

    :param x:
        Feature vector.
    :type x: numpy.array

    :param y:
        Target.
    :type y: float

    :return:
        Sample evaluation.
    :rtype: GradEval
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size != model.input_dim:
        raise DimensionMismatch(
            'Expected %d features, got shape %s!' % (model.input_dim, x.shape)
        )
    if np.size(w) != model.n_params:
        raise LengthMismatch(
            'Expected %d weights, got %d!' % (model.n_params, np.size(w))
        )
    value, grad = model.value_and_gradient(w, x)
    return GradEval(value, grad, y - value, float(grad @ grad))


def tabular_features(state_index, action_index, n_states, n_actions,
                     scale=None):
    """
    Returns the one-hot feature of a state-action pair.

    :param state_index:
        State index.
    :type state_index: int

    :param action_index:
        Action index.
    :type action_index: int

    :param n_states:
        Number of states.
    :type n_states: int

    :param n_actions:
        Number of actions.
    :type n_actions: int

    :param scale:
        Per-feature scaling coefficients `φ` (all non-zero).
    :type scale: numpy.array, optional

    :return:
        One-hot vector at `state_index·n_actions + action_index`, holding 1 or
        `φ_j`.
    :rtype: numpy.array
    """
    if not (0 <= state_index < n_states and 0 <= action_index < n_actions):
        raise IndexOutOfRange(
            'State-action (%r, %r) is out of %dx%d!' % (
                state_index, action_index, n_states, n_actions
            )
        )
    j = state_index * n_actions + action_index
    x = np.zeros(n_states * n_actions)
    if scale is None:
        x[j] = 1.0
    else:
        scale = np.asarray(scale, dtype=float)
        if scale.size != x.size:
            raise DimensionMismatch(
                'Expected %d scaling coefficients, got %d!' % (
                    x.size, scale.size
                )
            )
        if not scale.all():
            raise ZeroScale('Feature scaling coefficients must be non-zero!')
        x[j] = scale[j]
    return x


def save_weights(file, model, w):
    """
    Writes a network checkpoint.

    Byte layout: `<u4` number of dims `n`, `n` `<u4` dims
    `[input_dim, width_1, ..., 1]`, then the flat weights as `<f8`.

    :param file:
        Output file path.
    :type file: str

    :param model:
        Network.
    :type model: MLP

    :param w:
        Flat weights.
    :type w: numpy.array
    """
    dims = [model.input_dim] + [s.width for s in model.specs]
    w = np.asarray(w, dtype='<f8')
    if w.size != model.n_params:
        raise LengthMismatch(
            'Expected %d weights, got %d!' % (model.n_params, w.size)
        )
    with open(file, 'wb') as f:
        f.write(struct.pack('<%dI' % (len(dims) + 1), len(dims), *dims))
        f.write(w.tobytes())


def load_weights(file):
    """
    Reads a network checkpoint written by :func:`save_weights`.

    :param file:
        Input file path.
    :type file: str

    :return:
        Network and its flat weights.
    :rtype: (MLP, numpy.array)
    """
    with open(file, 'rb') as f:
        data = f.read()
    n, = struct.unpack_from('<I', data)
    dims = struct.unpack_from('<%dI' % n, data, 4)
    model = MLP(layer_specs(dims[1:-1]), dims[0])
    w = np.frombuffer(data, dtype='<f8', offset=4 * (n + 1)).astype(float)
    if w.size != model.n_params:
        raise LengthMismatch(
            'Checkpoint holds %d weights, layout needs %d!' % (
                w.size, model.n_params
            )
        )
    return model, w
