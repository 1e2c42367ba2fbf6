# docstrings not needed here (the activation handler interface is fully
# documented in base.py)

import numpy as np

from .base import Activation


LEAKY_SLOPE = 0.01


def _sigmoid(a):
    out = np.empty_like(a, dtype=np.float64)
    pos = a >= 0
    neg = ~pos
    out[pos] = 1.0 / (1.0 + np.exp(-a[pos]))
    ea = np.exp(a[neg])
    out[neg] = ea / (1.0 + ea)
    return out


class Softplus(Activation):

    NAMES = ['softplus']

    def forward(self, a):
        # max(a, 0) + ln(1 + e^-|a|) never overflows
        return np.maximum(a, 0.0) + np.log1p(np.exp(-np.abs(a)))

    def grad(self, a):
        return _sigmoid(a)


class Sigmoid(Activation):

    NAMES = ['sigmoid']

    def forward(self, a):
        return _sigmoid(a)

    def grad(self, a):
        s = _sigmoid(a)
        return s * (1.0 - s)


class Tanh(Activation):

    NAMES = ['tanh']

    def forward(self, a):
        return np.tanh(a)

    def grad(self, a):
        t = np.tanh(a)
        return 1.0 - t * t


class Relu(Activation):

    NAMES = ['relu']

    def forward(self, a):
        return np.maximum(a, 0.0)

    def grad(self, a):
        return (a > 0).astype(np.float64)


class LeakyRelu(Activation):

    NAMES = ['leaky_relu']

    def forward(self, a):
        return np.where(a > 0, a, LEAKY_SLOPE * a)

    def grad(self, a):
        return np.where(a > 0, 1.0, LEAKY_SLOPE)


class Linear(Activation):

    NAMES = ['linear']

    def forward(self, a):
        return np.array(a, dtype=np.float64, copy=True)

    def grad(self, a):
        return np.ones_like(a, dtype=np.float64)


def activate(a, kind):
    """
    Apply activation `kind` (a name or Activation) elementwise.

    >>> float(activate(np.zeros((1, 1)), 'sigmoid')[0, 0])
    0.5
    """
    return Activation.new(kind).forward(np.asarray(a, dtype=np.float64))


def activate_grad(a, kind):
    """
    Derivative of activation `kind` evaluated at pre-activation values `a`.

    >>> float(activate_grad(np.zeros((1, 1)), 'sigmoid')[0, 0])
    0.25
    """
    return Activation.new(kind).grad(np.asarray(a, dtype=np.float64))
