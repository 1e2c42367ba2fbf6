"""
Dense multilayer perceptrons with explicit forward caches and manual
backpropagation.

Weights follow the h(x) = f(Wx + b) convention: a layer mapping in_dim
to out_dim units holds W of shape (out_dim, in_dim) and b of length
out_dim, and a batch X (one row per sample) maps to f(X W^T + b).
"""

import logging

import numpy as np

from .base import Activation, ShapeError
from .rng import Rng

logger = logging.getLogger(__name__)


class LayerSpec(object):
    """
    Shape and activation of one affine layer.
    """
    __slots__ = ('in_dim', 'out_dim', 'activation')

    def __init__(self, in_dim, out_dim, activation='linear'):
        """
        :param in_dim: number of input units, at least 1
        :param out_dim: number of output units, at least 1
        :param activation: activation name or Activation instance
        """
        if int(in_dim) < 1 or int(out_dim) < 1:
            raise ShapeError("layer dimensions must be positive, got %r -> %r" % (in_dim, out_dim))
        self.in_dim = int(in_dim)
        self.out_dim = int(out_dim)
        self.activation = Activation.new(activation)

    def __repr__(self):
        return "LayerSpec(%i, %i, %r)" % (self.in_dim, self.out_dim, self.activation.name)

    def __eq__(self, other):
        return (isinstance(other, LayerSpec) and other.in_dim == self.in_dim
                and other.out_dim == self.out_dim and other.activation == self.activation)

    def to_list(self):
        return [self.in_dim, self.out_dim, self.activation.name]


def layer_specs(dims, activations):
    """
    Build the LayerSpec chain for unit counts `dims` (input first) and
    one activation per layer.

    >>> layer_specs([4, 3, 2], ['softplus', 'linear'])
    [LayerSpec(4, 3, 'softplus'), LayerSpec(3, 2, 'linear')]
    """
    if len(dims) - 1 != len(activations):
        raise ShapeError("%i layer widths need %i activations, got %i"
                         % (len(dims), len(dims) - 1, len(activations)))
    return [LayerSpec(dims[i], dims[i + 1], activations[i]) for i in range(len(activations))]


class Mlp(object):
    """
    An ordered list of affine layers with their parameters.
    """

    def __init__(self, layers, weights, biases):
        """
        :param layers: list of LayerSpec
        :param weights: one (out_dim, in_dim) array per layer
        :param biases: one length out_dim array per layer

        float64 arrays are taken over, not copied; use copy() for an
        independent network.
        """
        if not layers:
            raise ShapeError("an Mlp needs at least one layer")
        if not (len(layers) == len(weights) == len(biases)):
            raise ShapeError("layers, weights and biases differ in length")
        for prev, spec in zip(layers[:-1], layers[1:]):
            if prev.out_dim != spec.in_dim:
                raise ShapeError("layer %r does not feed layer %r" % (prev, spec))
        self.layers = list(layers)
        self.weights = []
        self.biases = []
        for spec, W, b in zip(layers, weights, biases):
            W = np.asarray(W, dtype=np.float64)
            b = np.asarray(b, dtype=np.float64).reshape(-1)
            if W.shape != (spec.out_dim, spec.in_dim) or b.shape != (spec.out_dim,):
                raise ShapeError("parameters of shape %r/%r do not match %r" % (W.shape, b.shape, spec))
            self.weights.append(W)
            self.biases.append(b)

    @classmethod
    def initialized(cls, layers, rng):
        """
        A new network with Xavier-initialized weights and zero biases;
        layers are initialized in order from the same generator.
        """
        params = [xavier_init(spec, rng) for spec in layers]
        return cls(layers, [W for W, b in params], [b for W, b in params])

    def __repr__(self):
        return "<ltae.Mlp %s>" % ' -> '.join(
            [str(self.in_dim)] + ['%i(%s)' % (s.out_dim, s.activation.name) for s in self.layers])

    @property
    def in_dim(self):
        return self.layers[0].in_dim

    @property
    def out_dim(self):
        return self.layers[-1].out_dim

    def copy(self):
        return Mlp(self.layers, [W.copy() for W in self.weights], [b.copy() for b in self.biases])

    def parameters(self):
        """Flat list [W0, b0, W1, b1, ...] of the live parameter arrays"""
        params = []
        for W, b in zip(self.weights, self.biases):
            params.append(W)
            params.append(b)
        return params

    def __call__(self, X):
        return mlp_forward(self, X)[0]


class ForwardCache(object):
    """
    Per-layer inputs and pre-activations recorded by mlp_forward, enough
    to backpropagate exactly.
    """
    __slots__ = ('shapes', 'inputs', 'pre_activations', 'outputs')

    def __init__(self, shapes):
        self.shapes = shapes
        self.inputs = []
        self.pre_activations = []
        self.outputs = []


def _shapes(net):
    return tuple((spec.in_dim, spec.out_dim, spec.activation.name) for spec in net.layers)


def _as_batch(X, what='batch'):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise ShapeError("%s must be 2-D, got shape %r" % (what, X.shape))
    return X


def linear_forward(W, b, X):
    """
    Rows of X mapped through the affine map: X W^T + b.

    >>> linear_forward(np.array([[1., 2.], [0., 1.]]), np.array([1., -1.]), np.array([[1., 1.]])).tolist()
    [[4.0, 0.0]]
    """
    W = np.asarray(W, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    X = _as_batch(X)
    if W.ndim != 2 or X.shape[1] != W.shape[1]:
        raise ShapeError("input width %i does not match weight shape %r" % (X.shape[1], W.shape))
    if b.shape[0] != W.shape[0]:
        raise ShapeError("bias length %i does not match weight shape %r" % (b.shape[0], W.shape))
    return X @ W.T + b


def mlp_forward(net, X):
    """
    Forward pass.

    :returns: (output, cache) where cache is a ForwardCache for mlp_backward
    """
    assert isinstance(net, Mlp)
    X = _as_batch(X)
    if X.shape[1] != net.in_dim:
        raise ShapeError("input width %i does not match network input %i" % (X.shape[1], net.in_dim))
    cache = ForwardCache(_shapes(net))
    h = X
    for spec, W, b in zip(net.layers, net.weights, net.biases):
        cache.inputs.append(h)
        a = h @ W.T + b
        cache.pre_activations.append(a)
        h = spec.activation.forward(a)
        cache.outputs.append(h)
    return h, cache


def mlp_backward(net, cache, upstream_grad):
    """
    Backpropagate `upstream_grad` (d loss / d output) through the layers
    recorded in `cache`.

    :returns: (param_grads, input_grad) where param_grads is a list of
              (dW, db) pairs, one per layer
    """
    assert isinstance(net, Mlp)
    if not isinstance(cache, ForwardCache) or cache.shapes != _shapes(net):
        raise ShapeError("forward cache does not belong to this network")
    g = _as_batch(upstream_grad, 'upstream gradient')
    if g.shape != cache.outputs[-1].shape:
        raise ShapeError("upstream gradient of shape %r does not match output shape %r"
                         % (g.shape, cache.outputs[-1].shape))
    grads = [None] * len(net.layers)
    for i in range(len(net.layers) - 1, -1, -1):
        spec = net.layers[i]
        delta = g * spec.activation.grad(cache.pre_activations[i])
        dW = delta.T @ cache.inputs[i]
        db = delta.sum(axis=0)
        grads[i] = (dW, db)
        g = delta @ net.weights[i]
    return grads, g


def xavier_init(spec, rng):
    """
    Uniform Xavier initialization: W ~ U(-L, L) with
    L = sqrt(6 / (in_dim + out_dim)), drawn row-major; b = 0.
    """
    assert isinstance(spec, LayerSpec)
    assert isinstance(rng, Rng)
    limit = np.sqrt(6.0 / (spec.in_dim + spec.out_dim))
    W = rng.uniform_array(-limit, limit, (spec.out_dim, spec.in_dim))
    return W, np.zeros(spec.out_dim)


def spectral_norm(W):
    """
    Largest singular value of W (the operator 2-norm), from the SVD, so
    products over layers bound the network up to rounding.

    >>> round(spectral_norm(np.diag([3.0, -2.0])), 12)
    3.0
    """
    W = np.asarray(W, dtype=np.float64)
    if W.size == 0:
        return 0.0
    return float(np.linalg.norm(W, 2))


def lipschitz_bound(net):
    """
    Upper bound on the Lipschitz constant of the network: the product
    over layers of the spectral norm of W times the activation's constant.
    """
    assert isinstance(net, Mlp)
    bound = 1.0
    for spec, W in zip(net.layers, net.weights):
        bound *= spectral_norm(W) * spec.activation.LIPSCHITZ
    logger.debug("lipschitz bound of %r: %r", net, bound)
    return bound
