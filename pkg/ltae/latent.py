"""
The transformation and latent networks placed between encoder and
decoder.

The transformation network is not learned: it normalizes a batch of
encoder outputs, per dimension, either to zero mean and unit (population)
standard deviation or to the [0, 1] range.  The latent network is a
learned per-dimension affine map z_L = alpha * (z + beta), trained to
reproduce the normalized batch; the normalized batch is a fixed
regression target and no gradient flows into it.

    >>> Z = LatentBatch(np.array([[0.0], [2.0]]))
    >>> standard_normalize(Z).matrix.ravel().tolist()
    [-1.0, 1.0]
    >>> minmax_normalize(Z).matrix.ravel().tolist()
    [0.0, 1.0]
"""

import numpy as np

from ltae import settings
from ltae.nn.base import ShapeError, DegenerateBatchError, NonInvertibleError, ConfigurationError
from ltae.nn.rng import Rng


SPACE_Z = 'Z'
SPACE_Z_N = 'Z_N'
SPACE_Z_L = 'Z_L'
SPACES = (SPACE_Z, SPACE_Z_N, SPACE_Z_L)

STANDARD = 'standard'
MINMAX = 'minmax'
VARIANTS = (STANDARD, MINMAX)

GAUSSIAN = 'gaussian'
UNIFORM = 'uniform'

NOISE_FOR_VARIANT = {STANDARD: GAUSSIAN, MINMAX: UNIFORM}


class LatentBatch(object):
    """
    A batch of latent vectors (one per row) tagged with the space it
    lives in.  The tag is fixed at construction.
    """
    __slots__ = ('_matrix', '_space')

    def __init__(self, matrix, space=SPACE_Z):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[1] < 1:
            raise ShapeError("latent batch must be 2-D with at least one column, got %r"
                             % (matrix.shape,))
        if space not in SPACES:
            raise ValueError("unknown latent space %r" % (space,))
        self._matrix = matrix
        self._space = space

    @property
    def matrix(self):
        return self._matrix

    @property
    def space(self):
        return self._space

    @property
    def batch_size(self):
        return self._matrix.shape[0]

    @property
    def dim(self):
        return self._matrix.shape[1]

    def __repr__(self):
        return "<ltae.LatentBatch %s %ix%i>" % (self._space, self.batch_size, self.dim)


def _matrix_of(z):
    if isinstance(z, LatentBatch):
        return z.matrix
    return LatentBatch(z).matrix


class BatchStats(object):
    """Per-dimension mean, population std, min and max of a batch"""

    def __init__(self, mean, std, minimum, maximum):
        self.mean = np.asarray(mean, dtype=np.float64)
        self.std = np.asarray(std, dtype=np.float64)
        self.min = np.asarray(minimum, dtype=np.float64)
        self.max = np.asarray(maximum, dtype=np.float64)

    @classmethod
    def of(cls, z):
        Z = _matrix_of(z)
        return cls(Z.mean(axis=0), Z.std(axis=0), Z.min(axis=0), Z.max(axis=0))


def _check_batch(Z):
    if Z.shape[0] < 2:
        raise DegenerateBatchError("normalizing needs at least 2 rows, got %i" % (Z.shape[0],))


def standard_normalize(z):
    """
    Per dimension (z - mean) / std with the population std.  Dimensions
    whose std is below settings.guard_epsilon map to zeros.
    """
    Z = _matrix_of(z)
    _check_batch(Z)
    stats = BatchStats.of(Z)
    ok = stats.std >= settings.guard_epsilon
    out = np.zeros_like(Z)
    out[:, ok] = (Z[:, ok] - stats.mean[ok]) / stats.std[ok]
    return LatentBatch(out, SPACE_Z_N)


def minmax_normalize(z):
    """
    Per dimension (z - min) / (max - min).  Dimensions whose range is
    below settings.guard_epsilon map to zeros.
    """
    Z = _matrix_of(z)
    _check_batch(Z)
    stats = BatchStats.of(Z)
    spread = stats.max - stats.min
    ok = spread >= settings.guard_epsilon
    out = np.zeros_like(Z)
    out[:, ok] = (Z[:, ok] - stats.min[ok]) / spread[ok]
    return LatentBatch(out, SPACE_Z_N)


def normalize(z, variant):
    if variant == STANDARD:
        return standard_normalize(z)
    elif variant == MINMAX:
        return minmax_normalize(z)
    raise ConfigurationError("unknown transformation variant %r" % (variant,))


def transform_targets(z, variant):
    """
    The (alpha, beta) for which latent_forward reproduces the normalized
    batch exactly: (1/std, -mean) for the standard variant, (1/range, -min)
    for min-max.  Degenerate dimensions get alpha = 0.

    >>> a, b = transform_targets(np.array([[0.0], [2.0]]), MINMAX)
    >>> a.tolist(), b.tolist()
    ([0.5], [-0.0])
    """
    Z = _matrix_of(z)
    _check_batch(Z)
    stats = BatchStats.of(Z)
    if variant == STANDARD:
        scale = stats.std
        shift = -stats.mean
    elif variant == MINMAX:
        scale = stats.max - stats.min
        shift = -stats.min
    else:
        raise ConfigurationError("unknown transformation variant %r" % (variant,))
    ok = scale >= settings.guard_epsilon
    alpha = np.zeros_like(scale)
    alpha[ok] = 1.0 / scale[ok]
    return alpha, shift


class LatentTransform(object):
    """
    Parameters of the latent network: z_L = alpha * (z + beta), plus the
    normalization variant it is trained against.
    """

    def __init__(self, alpha, beta, variant=STANDARD):
        alpha = np.array(alpha, dtype=np.float64).reshape(-1)
        beta = np.array(beta, dtype=np.float64).reshape(-1)
        if alpha.shape != beta.shape or alpha.size < 1:
            raise ShapeError("alpha and beta must be non-empty and of equal length")
        if not np.all(np.isfinite(alpha)) or not np.all(np.isfinite(beta)):
            raise ValueError("latent transform parameters must be finite")
        if variant not in VARIANTS:
            raise ConfigurationError("unknown transformation variant %r" % (variant,))
        self.alpha = alpha
        self.beta = beta
        self.variant = variant

    @classmethod
    def identity(cls, dim, variant=STANDARD):
        return cls(np.ones(dim), np.zeros(dim), variant)

    @property
    def dim(self):
        return self.alpha.size

    def __repr__(self):
        return "<ltae.LatentTransform %s m=%i>" % (self.variant, self.dim)

    def is_invertible(self):
        return bool(np.all(np.abs(self.alpha) > settings.invert_epsilon))

    def normalize(self, z):
        return normalize(z, self.variant)


def _check_dim(Z, t):
    if Z.shape[1] != t.dim:
        raise ShapeError("latent width %i does not match transform width %i" % (Z.shape[1], t.dim))


def latent_forward(z, t):
    """
    z_L = alpha * (z + beta), row by row.

    >>> t = LatentTransform([2.0, 3.0], [1.0, -1.0])
    >>> latent_forward(np.array([[1.0, 2.0]]), t).matrix.tolist()
    [[4.0, 3.0]]
    """
    assert isinstance(t, LatentTransform)
    Z = _matrix_of(z)
    _check_dim(Z, t)
    return LatentBatch(t.alpha * (Z + t.beta), SPACE_Z_L)


def latent_inverse(z_l, t):
    """
    z = z_L / alpha - beta; the map is a homeomorphism whenever no alpha
    entry is (near) zero.
    """
    assert isinstance(t, LatentTransform)
    Z_L = _matrix_of(z_l)
    _check_dim(Z_L, t)
    if not t.is_invertible():
        raise NonInvertibleError("alpha has entries with |alpha| <= %g: %r"
                                 % (settings.invert_epsilon, t.alpha.tolist()))
    return LatentBatch(Z_L / t.alpha - t.beta, SPACE_Z)


def latent_backward(upstream, z, t):
    """
    Gradients of a loss through latent_forward.

    :param upstream: d loss / d z_L, one row per sample
    :param z: the latent network input
    :returns: (d alpha, d beta, d z)
    """
    assert isinstance(t, LatentTransform)
    G = np.asarray(upstream, dtype=np.float64)
    Z = _matrix_of(z)
    if G.shape != Z.shape:
        raise ShapeError("upstream gradient shape %r does not match latent shape %r" % (G.shape, Z.shape))
    _check_dim(Z, t)
    d_alpha = (G * (Z + t.beta)).sum(axis=0)
    d_beta = (G * t.alpha).sum(axis=0)
    d_z = G * t.alpha
    return d_alpha, d_beta, d_z


class NoiseSpec(object):
    """
    Latent noise: N(0, sigma^2) for the standard variant, U(-sigma, sigma)
    for min-max.
    """

    def __init__(self, sigma, distribution=GAUSSIAN):
        if sigma < 0:
            raise ConfigurationError("noise sigma must be non-negative, got %r" % (sigma,))
        if distribution not in (GAUSSIAN, UNIFORM):
            raise ConfigurationError("unknown noise distribution %r" % (distribution,))
        self.sigma = float(sigma)
        self.distribution = distribution

    @classmethod
    def for_variant(cls, variant, sigma):
        return cls(sigma, NOISE_FOR_VARIANT[variant])

    def __repr__(self):
        return "NoiseSpec(%r, %r)" % (self.sigma, self.distribution)


def inject_noise(z, spec, rng):
    """
    Add iid noise to every element; sigma = 0 returns the batch unchanged
    without drawing from the generator.
    """
    assert isinstance(spec, NoiseSpec)
    assert isinstance(rng, Rng)
    space = z.space if isinstance(z, LatentBatch) else SPACE_Z
    Z = _matrix_of(z)
    if spec.sigma == 0.0:
        return LatentBatch(Z, space)
    if spec.distribution == GAUSSIAN:
        noise = spec.sigma * rng.standard_normal(Z.shape)
    else:
        noise = rng.uniform_array(-spec.sigma, spec.sigma, Z.shape)
    return LatentBatch(Z + noise, space)


def transform_loss(z_n, z_l):
    """
    Mean over the batch of the Euclidean distance between target and
    latent rows, and its gradient with respect to z_L.  Rows at zero
    distance get a zero gradient.

    >>> loss, grad = transform_loss(np.array([[0.0, 0.0]]), np.array([[3.0, 4.0]]))
    >>> loss, grad.tolist()
    (5.0, [[0.6, 0.8]])
    """
    Z_N = _matrix_of(z_n)
    Z_L = _matrix_of(z_l)
    if Z_N.shape != Z_L.shape:
        raise ShapeError("target shape %r does not match latent shape %r" % (Z_N.shape, Z_L.shape))
    diff = Z_N - Z_L
    dist = np.sqrt((diff * diff).sum(axis=1))
    n = Z_L.shape[0]
    grad = np.zeros_like(Z_L)
    nz = dist > 0.0
    grad[nz] = -diff[nz] / (dist[nz, None] * n)
    return float(dist.mean()), grad
