"""
Trainable model variants assembled from an encoder, an optional latent
network and a decoder, together with their training loop and inference
(generation, reconstruction and denoising).

Variants:

 - AE: encoder and decoder only;
 - LTAE_S / LTAE_M: latent network trained against the standard / min-max
   normalization of each batch, with latent noise during training;
 - DLTAE_S / DLTAE_M: the same, trained on Gaussian-corrupted inputs with
   clean reconstruction targets;
 - VAE: Gaussian posterior with a standard normal prior;
 - DAE: AE trained on corrupted inputs.

The training objective of the latent variants is the reconstruction loss
plus the mean Euclidean distance between the latent network output and
the (fixed) normalized batch.
"""

import logging
import warnings

import numpy as np

from ltae import settings
from ltae import latent
from ltae.latent import LatentTransform, NoiseSpec, STANDARD, MINMAX
from ltae.metrics import ImageSet, diameter
from ltae.nn.base import Activation, ShapeError, ConfigurationError, TrainingError, \
     UnfittedError, VariantError, EmptySetError, ConfigWarning
from ltae.nn.rng import Rng
from ltae.nn.mlp import Mlp, layer_specs, mlp_forward, mlp_backward
from ltae.nn.optim import ClrSchedule, clr_rate, sgd_step

logger = logging.getLogger(__name__)

AE = 'AE'
LTAE_S = 'LTAE_S'
LTAE_M = 'LTAE_M'
DLTAE_S = 'DLTAE_S'
DLTAE_M = 'DLTAE_M'
VAE = 'VAE'
DAE = 'DAE'
VARIANTS = (AE, LTAE_S, LTAE_M, DLTAE_S, DLTAE_M, VAE, DAE)

_TRANSFORM_VARIANT = {LTAE_S: STANDARD, LTAE_M: MINMAX, DLTAE_S: STANDARD, DLTAE_M: MINMAX}
_DENOISING = (DLTAE_S, DLTAE_M, DAE)

DEFAULT_LATENT_SIGMA = {STANDARD: 0.02, MINMAX: 0.06}
DEFAULT_CORRUPTION_SIGMA = 0.5

CROSS_ENTROPY = 'cross_entropy'
L2 = 'l2'
RECON_LOSSES = (CROSS_ENTROPY, L2)

PRE_TRANSFORM = 'pre_transform'
POST_TRANSFORM = 'post_transform'
NOISE_SITES = (PRE_TRANSFORM, POST_TRANSFORM)


def has_transform(variant):
    """True for the variants with a latent network"""
    return variant in _TRANSFORM_VARIANT


def is_denoising(variant):
    return variant in _DENOISING


def transform_variant(variant):
    """The normalization a latent variant is trained against, else None"""
    return _TRANSFORM_VARIANT.get(variant)


def _pixels(X, dim=None, what='images'):
    if isinstance(X, ImageSet):
        X = X.pixels
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise ShapeError("%s must be 2-D, got shape %r" % (what, X.shape))
    if dim is not None and X.shape[1] != dim:
        raise ShapeError("%s have %i values per row, expected %i" % (what, X.shape[1], dim))
    return X


class ModelConfig(object):
    """
    Everything that determines a training run.  Fields the variant does
    not use (latent_sigma without a latent network, input_corruption_sigma
    without corruption) are dropped with a ConfigWarning.

    >>> ModelConfig(LTAE_M).latent_sigma
    0.06
    >>> ModelConfig(DAE).input_corruption_sigma
    0.5
    """

    FIELDS = ('variant', 'input_dim', 'latent_dim', 'hidden', 'hidden_activation',
              'recon_loss', 'latent_sigma', 'input_corruption_sigma', 'clr',
              'batch_size', 'iterations', 'seed', 'noise_site', 'transform_loss_weight')

    def __init__(self, variant, input_dim=784, latent_dim=2, hidden=(500, 500),
                 hidden_activation='softplus', recon_loss=CROSS_ENTROPY,
                 latent_sigma=None, input_corruption_sigma=None, clr=None,
                 batch_size=100, iterations=40000, seed=0, noise_site=None,
                 transform_loss_weight=1.0):
        if variant not in VARIANTS:
            raise ConfigurationError("unknown model variant %r (expected one of %s)"
                                     % (variant, ', '.join(VARIANTS)))
        self.variant = variant
        self.input_dim = self._positive('input_dim', input_dim)
        self.latent_dim = self._positive('latent_dim', latent_dim)
        if not isinstance(hidden, (list, tuple)):
            raise ConfigurationError("hidden must be a list of layer widths, got %r" % (hidden,))
        self.hidden = [self._positive('hidden', h) for h in hidden]
        self.hidden_activation = Activation.new(hidden_activation).name
        if recon_loss not in RECON_LOSSES:
            raise ConfigurationError("unknown reconstruction loss %r" % (recon_loss,))
        self.recon_loss = recon_loss

        if has_transform(variant):
            if latent_sigma is None:
                latent_sigma = DEFAULT_LATENT_SIGMA[transform_variant(variant)]
            self.latent_sigma = self._non_negative('latent_sigma', latent_sigma)
        else:
            self.latent_sigma = self._ignored('latent_sigma', latent_sigma, 0.0)

        if is_denoising(variant):
            if input_corruption_sigma is None:
                input_corruption_sigma = DEFAULT_CORRUPTION_SIGMA
            self.input_corruption_sigma = self._non_negative('input_corruption_sigma',
                                                             input_corruption_sigma)
        else:
            self.input_corruption_sigma = self._ignored('input_corruption_sigma',
                                                        input_corruption_sigma, 0.0)

        if has_transform(variant):
            self.transform_loss_weight = self._non_negative('transform_loss_weight',
                                                            transform_loss_weight)
        else:
            self.transform_loss_weight = self._ignored('transform_loss_weight',
                                                       transform_loss_weight, 1.0)

        if clr is None:
            clr = ClrSchedule()
        elif isinstance(clr, dict):
            clr = ClrSchedule.from_dict(clr)
        elif not isinstance(clr, ClrSchedule):
            raise ConfigurationError("clr must be a ClrSchedule or a dict, got %r" % (clr,))
        self.clr = clr
        self.batch_size = self._positive('batch_size', batch_size)
        if has_transform(variant) and self.batch_size < 2:
            raise ConfigurationError("%s normalizes each batch and needs batch_size >= 2, got %i"
                                     % (variant, self.batch_size))
        self.iterations = self._integer('iterations', iterations)
        if self.iterations < 0:
            raise ConfigurationError("iterations must be non-negative, got %r" % (iterations,))
        self.seed = self._integer('seed', seed)
        if noise_site is None:
            noise_site = settings.noise_site
        if noise_site not in NOISE_SITES:
            raise ConfigurationError("unknown noise site %r" % (noise_site,))
        self.noise_site = noise_site

    @staticmethod
    def _integer(name, value):
        try:
            if int(value) == value:
                return int(value)
        except (TypeError, ValueError):
            pass
        raise ConfigurationError("%s must be an integer, got %r" % (name, value))

    @classmethod
    def _positive(cls, name, value):
        value = cls._integer(name, value)
        if value < 1:
            raise ConfigurationError("%s must be a positive integer, got %r" % (name, value))
        return value

    @staticmethod
    def _non_negative(name, value):
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ConfigurationError("%s must be a number, got %r" % (name, value))
        if not (value >= 0.0):
            raise ConfigurationError("%s must be non-negative, got %r" % (name, value))
        return value

    def _ignored(self, name, value, neutral):
        if value is not None and float(value) != neutral:
            warnings.warn("%s=%r is ignored by the %s variant" % (name, value, self.variant),
                          ConfigWarning, stacklevel=3)
        return neutral

    def __repr__(self):
        return "<ltae.ModelConfig %s m=%i>" % (self.variant, self.latent_dim)

    def __eq__(self, other):
        return isinstance(other, ModelConfig) and self.to_dict() == other.to_dict()

    def to_dict(self):
        return {
            'variant': self.variant,
            'input_dim': self.input_dim,
            'latent_dim': self.latent_dim,
            'hidden': list(self.hidden),
            'hidden_activation': self.hidden_activation,
            'recon_loss': self.recon_loss,
            'latent_sigma': self.latent_sigma,
            'input_corruption_sigma': self.input_corruption_sigma,
            'clr': self.clr.to_dict(),
            'batch_size': self.batch_size,
            'iterations': self.iterations,
            'seed': self.seed,
            'noise_site': self.noise_site,
            'transform_loss_weight': self.transform_loss_weight,
        }

    @classmethod
    def from_dict(cls, d):
        unknown = sorted(set(d) - set(cls.FIELDS))
        if unknown:
            raise ConfigurationError("unknown configuration keys: %s" % ', '.join(unknown))
        if 'variant' not in d:
            raise ConfigurationError("configuration has no 'variant'")
        return cls(**d)

    def replace(self, **changes):
        """A new config with some fields changed"""
        d = self.to_dict()
        if 'variant' in changes and changes['variant'] != self.variant:
            # variant defaults must be re-derived
            for key in ('latent_sigma', 'input_corruption_sigma', 'transform_loss_weight'):
                d.pop(key)
        d.update(changes)
        return ModelConfig.from_dict(d)


class CorruptionSpec(object):
    """Additive Gaussian pixel noise N(0, sigma_hat^2)"""

    def __init__(self, sigma_hat):
        if not (float(sigma_hat) >= 0.0):
            raise ConfigurationError("sigma_hat must be non-negative, got %r" % (sigma_hat,))
        self.sigma_hat = float(sigma_hat)

    def __repr__(self):
        return "CorruptionSpec(%r)" % (self.sigma_hat,)


GAUSSIAN_STATS = 'gaussian'
UNIFORM_STATS = 'uniform'
STANDARD_NORMAL = 'standard_normal'
STATS_KINDS = (GAUSSIAN_STATS, UNIFORM_STATS, STANDARD_NORMAL)


class SamplingStats(object):
    """
    Per-dimension statistics of the training set in the sampling space:
    (mean, std) for 'gaussian', (min, max) for 'uniform', and the prior
    (zeros, ones) for 'standard_normal'.
    """

    def __init__(self, kind, first, second):
        if kind not in STATS_KINDS:
            raise ConfigurationError("unknown sampling statistics kind %r" % (kind,))
        first = np.array(first, dtype=np.float64).reshape(-1)
        second = np.array(second, dtype=np.float64).reshape(-1)
        if first.shape != second.shape or first.size < 1:
            raise ShapeError("sampling statistics must be non-empty and of equal length")
        if kind == UNIFORM_STATS and np.any(first > second):
            raise ValueError("uniform bounds out of order")
        if kind != UNIFORM_STATS and np.any(second < 0):
            raise ValueError("negative standard deviation")
        self.kind = kind
        self.first = first
        self.second = second

    @classmethod
    def standard_normal(cls, dim):
        return cls(STANDARD_NORMAL, np.zeros(dim), np.ones(dim))

    @classmethod
    def of(cls, Z, kind):
        Z = _pixels(Z, what='latent vectors')
        if kind == GAUSSIAN_STATS:
            return cls(kind, Z.mean(axis=0), Z.std(axis=0))
        elif kind == UNIFORM_STATS:
            return cls(kind, Z.min(axis=0), Z.max(axis=0))
        return cls.standard_normal(Z.shape[1])

    def __repr__(self):
        return "<ltae.SamplingStats %s m=%i>" % (self.kind, self.dim)

    @property
    def dim(self):
        return self.first.size

    @property
    def mean(self):
        if self.kind == UNIFORM_STATS:
            raise VariantError("uniform statistics have no mean")
        return self.first

    @property
    def std(self):
        if self.kind == UNIFORM_STATS:
            raise VariantError("uniform statistics have no std")
        return self.second

    @property
    def min(self):
        if self.kind != UNIFORM_STATS:
            raise VariantError("%s statistics have no bounds" % (self.kind,))
        return self.first

    @property
    def max(self):
        if self.kind != UNIFORM_STATS:
            raise VariantError("%s statistics have no bounds" % (self.kind,))
        return self.second

    def sample(self, n, rng):
        """n latent vectors drawn per the statistics kind, row-major"""
        assert isinstance(rng, Rng)
        shape = (int(n), self.dim)
        if self.kind == UNIFORM_STATS:
            u = rng.random(shape[0] * shape[1]).reshape(shape)
            return np.clip(self.first + (self.second - self.first) * u, self.first, self.second)
        return self.first + self.second * rng.standard_normal(shape)


HISTORY_FIELDS = ('iteration', 'lr', 'recon_loss', 'aux_loss')


class ModelBundle(object):
    """
    A model: its config, the encoder and decoder networks, the latent
    transform (None for AE, VAE and DAE), the fitted sampling statistics
    (None until fitted) and the training history, one
    (iteration, lr, recon_loss, aux_loss) tuple per step.  aux_loss is the
    transform loss for latent variants, the KL term for VAE, else 0.
    """

    def __init__(self, config, encoder, decoder, transform=None, sampling_stats=None,
                 history=None):
        assert isinstance(config, ModelConfig)
        assert isinstance(encoder, Mlp)
        assert isinstance(decoder, Mlp)
        m = config.latent_dim
        enc_out = 2 * m if config.variant == VAE else m
        if encoder.in_dim != config.input_dim or encoder.out_dim != enc_out:
            raise ShapeError("encoder %r does not map %i -> %i" % (encoder, config.input_dim, enc_out))
        if decoder.in_dim != m or decoder.out_dim != config.input_dim:
            raise ShapeError("decoder %r does not map %i -> %i" % (decoder, m, config.input_dim))
        if has_transform(config.variant):
            if transform is None:
                raise ConfigurationError("the %s variant needs a latent transform" % (config.variant,))
            assert isinstance(transform, LatentTransform)
            if transform.dim != m or transform.variant != transform_variant(config.variant):
                raise ShapeError("latent transform %r does not fit %r" % (transform, config))
        elif transform is not None:
            raise ConfigurationError("the %s variant has no latent transform" % (config.variant,))
        if sampling_stats is not None and sampling_stats.dim != m:
            raise ShapeError("sampling statistics of width %i for latent width %i"
                             % (sampling_stats.dim, m))
        self.config = config
        self.encoder = encoder
        self.decoder = decoder
        self.transform = transform
        self.sampling_stats = sampling_stats
        self.history = list(history or [])

    def __repr__(self):
        return "<ltae.ModelBundle %s m=%i%s>" % (
            self.config.variant, self.config.latent_dim,
            '' if self.sampling_stats is None else ' fitted')

    @property
    def variant(self):
        return self.config.variant

    def parameters(self):
        """
        The live parameter arrays: encoder [W0, b0, ...], then alpha and
        beta when there is a latent transform, then decoder [W0, b0, ...].
        """
        params = self.encoder.parameters()
        if self.transform is not None:
            params += [self.transform.alpha, self.transform.beta]
        return params + self.decoder.parameters()

    def parameter_names(self):
        names = []
        for net_name, net in (('encoder', self.encoder), ('decoder', self.decoder)):
            if net_name == 'decoder' and self.transform is not None:
                names += ['latent.alpha', 'latent.beta']
            for i in range(len(net.layers)):
                names += ['%s.W%i' % (net_name, i), '%s.b%i' % (net_name, i)]
        return names

    def with_parameters(self, params):
        """A bundle sharing config, stats and history, with new parameters
        in the order of parameters()"""
        params = list(params)
        n_enc = 2 * len(self.encoder.layers)
        n_dec = 2 * len(self.decoder.layers)
        n_lat = 0 if self.transform is None else 2
        if len(params) != n_enc + n_lat + n_dec:
            raise ShapeError("%i parameter arrays for a bundle with %i"
                             % (len(params), n_enc + n_lat + n_dec))
        enc = params[:n_enc]
        dec = params[n_enc + n_lat:]
        encoder = Mlp(self.encoder.layers, enc[0::2], enc[1::2])
        decoder = Mlp(self.decoder.layers, dec[0::2], dec[1::2])
        transform = None
        if self.transform is not None:
            transform = LatentTransform(params[n_enc], params[n_enc + 1], self.transform.variant)
        return ModelBundle(self.config, encoder, decoder, transform, self.sampling_stats,
                           self.history)


def network_layers(config):
    """(encoder layers, decoder layers) as LayerSpec lists"""
    assert isinstance(config, ModelConfig)
    m = config.latent_dim
    enc_out = 2 * m if config.variant == VAE else m
    acts = [config.hidden_activation] * len(config.hidden)
    return (layer_specs([config.input_dim] + config.hidden + [enc_out], acts + ['linear']),
            layer_specs([m] + config.hidden[::-1] + [config.input_dim], acts + ['sigmoid']))


def build_model(config, rng):
    """
    Xavier-initialized networks for `config`: the encoder maps the input
    through the hidden layers to m units (2m for VAE: mean then log
    variance) with a linear output, the decoder maps m units back through
    the hidden layers in reverse order to a sigmoid output.  Latent
    variants start from the identity transform.
    """
    assert isinstance(rng, Rng)
    enc_layers, dec_layers = network_layers(config)
    encoder = Mlp.initialized(enc_layers, rng)
    decoder = Mlp.initialized(dec_layers, rng)
    transform = None
    if has_transform(config.variant):
        transform = LatentTransform.identity(config.latent_dim, transform_variant(config.variant))
    bundle = ModelBundle(config, encoder, decoder, transform)
    logger.debug("built %r: encoder %r, decoder %r", bundle, encoder, decoder)
    return bundle


def reconstruction_loss(target, output, kind=CROSS_ENTROPY):
    """
    Reconstruction loss averaged over the batch, and its gradient with
    respect to `output`.  Cross-entropy is summed over pixels with the
    output clamped to [clamp_delta, 1 - clamp_delta] inside the logarithms;
    l2 is the squared Euclidean distance.

    >>> loss, grad = reconstruction_loss(np.array([[1.0, 0.0]]), np.array([[0.5, 0.5]]))
    >>> round(loss, 6)
    1.386294
    """
    target = np.asarray(target, dtype=np.float64)
    output = np.asarray(output, dtype=np.float64)
    if target.shape != output.shape:
        raise ShapeError("target shape %r does not match output shape %r" % (target.shape, output.shape))
    n = target.shape[0]
    if kind == CROSS_ENTROPY:
        delta = settings.clamp_delta
        p = np.clip(output, delta, 1.0 - delta)
        loss = -(target * np.log(p) + (1.0 - target) * np.log1p(-p)).sum() / n
        grad = ((1.0 - target) / (1.0 - p) - target / p) / n
    elif kind == L2:
        diff = output - target
        loss = (diff * diff).sum() / n
        grad = 2.0 * diff / n
    else:
        raise ConfigurationError("unknown reconstruction loss %r" % (kind,))
    return float(loss), grad


class ForwardPass(object):
    """
    Everything one forward pass computed, enough to backpropagate.

    x_out is the reconstruction, z the (possibly noisy) encoder output fed
    to the latent network, z_n the normalized batch and z_l the latent
    network output.  For VAE, mu and logvar are the posterior parameters
    and eta the standard normal draw (None at inference).  recon and aux
    are the two loss terms; total = recon + weight * aux.
    """

    def __init__(self, variant):
        self.variant = variant
        self.x_out = self.u = self.z = self.z_n = self.z_l = None
        self.mu = self.logvar = self.eta = None
        self.recon = self.aux = self.total = 0.0
        self.weight = 1.0
        self.encoder_cache = self.decoder_cache = None
        self.recon_grad = self.aux_grad = None

    @property
    def losses(self):
        return (self.recon, self.aux)


def _check_training_rng(rng, train_mode):
    if train_mode and not isinstance(rng, Rng):
        raise ValueError("training-mode forward passes need an Rng")


def _latent_noise(Z, bundle, rng, train_mode):
    sigma = bundle.config.latent_sigma if train_mode else 0.0
    if sigma == 0.0:
        return Z
    spec = NoiseSpec.for_variant(bundle.transform.variant, sigma)
    return latent.inject_noise(Z, spec, rng).matrix


def _finish(fp, bundle, target):
    fp.recon, fp.recon_grad = reconstruction_loss(target, fp.x_out, bundle.config.recon_loss)
    fp.total = fp.recon + fp.weight * fp.aux
    return fp


def forward_ltae(bundle, X, rng=None, train_mode=False, target=None):
    """
    Forward pass of a latent variant: u = encoder(X); z = u plus latent
    noise (training only, with noise_site 'pre_transform'); z_N = the
    normalized batch; z_L = alpha * (z + beta); with noise_site
    'post_transform' the noise goes on z_L instead; X' = decoder(z_L).

    :param target: clean images the reconstruction is scored against
                   (default X)
    :returns: a ForwardPass
    """
    assert isinstance(bundle, ModelBundle)
    if not has_transform(bundle.variant):
        raise VariantError("forward_ltae needs a latent variant, got %s" % (bundle.variant,))
    _check_training_rng(rng, train_mode)
    config = bundle.config
    X = _pixels(X, config.input_dim)
    target = X if target is None else _pixels(target, config.input_dim, 'targets')
    if target.shape != X.shape:
        raise ShapeError("targets and inputs differ in shape")
    fp = ForwardPass(bundle.variant)
    fp.weight = config.transform_loss_weight
    fp.u, fp.encoder_cache = mlp_forward(bundle.encoder, X)
    if config.noise_site == PRE_TRANSFORM:
        fp.z = _latent_noise(fp.u, bundle, rng, train_mode)
    else:
        fp.z = fp.u
    fp.z_n = latent.normalize(fp.z, bundle.transform.variant).matrix
    fp.z_l = latent.latent_forward(fp.z, bundle.transform).matrix
    decoder_input = fp.z_l
    if config.noise_site == POST_TRANSFORM:
        decoder_input = _latent_noise(fp.z_l, bundle, rng, train_mode)
    fp.x_out, fp.decoder_cache = mlp_forward(bundle.decoder, decoder_input)
    fp.aux, fp.aux_grad = latent.transform_loss(fp.z_n, fp.z_l)
    return _finish(fp, bundle, target)


def forward_vae(bundle, X, rng=None, train_mode=False, target=None):
    """
    Forward pass of the VAE.  In training z = mu + exp(logvar / 2) * eta
    with eta ~ N(0, I); at inference z = mu.  aux is the KL divergence
    from the prior, summed over dimensions and averaged over the batch.
    """
    assert isinstance(bundle, ModelBundle)
    if bundle.variant != VAE:
        raise VariantError("forward_vae needs the VAE variant, got %s" % (bundle.variant,))
    _check_training_rng(rng, train_mode)
    config = bundle.config
    m = config.latent_dim
    X = _pixels(X, config.input_dim)
    target = X if target is None else _pixels(target, config.input_dim, 'targets')
    fp = ForwardPass(VAE)
    h, fp.encoder_cache = mlp_forward(bundle.encoder, X)
    fp.mu = h[:, :m]
    fp.logvar = h[:, m:]
    if train_mode:
        fp.eta = rng.standard_normal(fp.mu.shape)
        fp.z = fp.mu + np.exp(0.5 * fp.logvar) * fp.eta
    else:
        fp.z = fp.mu
    fp.x_out, fp.decoder_cache = mlp_forward(bundle.decoder, fp.z)
    n = X.shape[0]
    fp.aux = float(-0.5 * (1.0 + fp.logvar - fp.mu * fp.mu - np.exp(fp.logvar)).sum() / n)
    return _finish(fp, bundle, target)


def forward_plain(bundle, X, target=None):
    """Forward pass of AE and DAE: X' = decoder(encoder(X))"""
    assert isinstance(bundle, ModelBundle)
    if bundle.variant not in (AE, DAE):
        raise VariantError("forward_plain needs AE or DAE, got %s" % (bundle.variant,))
    config = bundle.config
    X = _pixels(X, config.input_dim)
    target = X if target is None else _pixels(target, config.input_dim, 'targets')
    fp = ForwardPass(bundle.variant)
    fp.z, fp.encoder_cache = mlp_forward(bundle.encoder, X)
    fp.x_out, fp.decoder_cache = mlp_forward(bundle.decoder, fp.z)
    return _finish(fp, bundle, target)


def forward(bundle, X, rng=None, train_mode=False, target=None):
    """Dispatch to the forward pass of the bundle's variant"""
    if has_transform(bundle.variant):
        return forward_ltae(bundle, X, rng, train_mode, target)
    elif bundle.variant == VAE:
        return forward_vae(bundle, X, rng, train_mode, target)
    return forward_plain(bundle, X, target)


def _flat(pairs):
    flat = []
    for dW, db in pairs:
        flat.append(dW)
        flat.append(db)
    return flat


def backward(bundle, fp):
    """
    Gradients of fp.total with respect to bundle.parameters(), in the same
    order.  The normalized batch is a constant target.
    """
    assert isinstance(fp, ForwardPass)
    dec_grads, g_dec_in = mlp_backward(bundle.decoder, fp.decoder_cache, fp.recon_grad)
    if has_transform(bundle.variant):
        g_zl = g_dec_in + fp.weight * fp.aux_grad
        d_alpha, d_beta, d_z = latent.latent_backward(g_zl, fp.z, bundle.transform)
        enc_grads, dummy = mlp_backward(bundle.encoder, fp.encoder_cache, d_z)
        return _flat(enc_grads) + [d_alpha, d_beta] + _flat(dec_grads)
    if bundle.variant == VAE:
        n = fp.mu.shape[0]
        d_mu = g_dec_in + fp.mu / n
        d_logvar = 0.5 * (np.exp(fp.logvar) - 1.0) / n
        if fp.eta is not None:
            d_logvar = d_logvar + 0.5 * g_dec_in * fp.eta * np.exp(0.5 * fp.logvar)
        enc_grads, dummy = mlp_backward(bundle.encoder, fp.encoder_cache,
                                        np.hstack([d_mu, d_logvar]))
        return _flat(enc_grads) + _flat(dec_grads)
    enc_grads, dummy = mlp_backward(bundle.encoder, fp.encoder_cache, g_dec_in)
    return _flat(enc_grads) + _flat(dec_grads)


def loss_and_gradients(bundle, X, rng, target=None):
    """
    One training-mode forward pass on the (already corrupted, for the
    denoising variants) batch X and the gradients of its total loss.

    :returns: (ForwardPass, gradients in bundle.parameters() order)
    """
    fp = forward(bundle, X, rng, True, target)
    return fp, backward(bundle, fp)


def corrupt_input(X, spec, rng):
    """
    X plus iid N(0, sigma_hat^2) pixel noise, unclamped.  sigma_hat = 0
    returns a copy of X without drawing.  An ImageSet comes back as an
    unbounded ImageSet, an array as an array.
    """
    assert isinstance(spec, CorruptionSpec)
    pixels = _pixels(X)
    if spec.sigma_hat == 0.0:
        out = pixels.copy()
    else:
        assert isinstance(rng, Rng)
        out = pixels + spec.sigma_hat * rng.standard_normal(pixels.shape)
    if isinstance(X, ImageSet):
        return ImageSet(out, bounded=False)
    return out


def train(config, data, rng=None):
    """
    Build a model and run config.iterations SGD steps under the CLR
    schedule.  Batches are consecutive slices of a Fisher-Yates shuffle of
    the data, reshuffled whenever fewer than batch_size unseen rows
    remain.  Finally the sampling statistics are fitted on all of `data`.

    :param rng: generator for initialization, shuffling and noise
                (default Rng(config.seed))
    """
    assert isinstance(config, ModelConfig)
    if rng is None:
        rng = Rng(config.seed)
    X_all = _pixels(data, config.input_dim, 'training images')
    n = X_all.shape[0]
    if n == 0:
        raise EmptySetError("no training images")
    if has_transform(config.variant) and min(config.batch_size, n) < 2:
        raise ConfigurationError("%s normalizes each batch and needs at least 2 training "
                                 "images, got %i" % (config.variant, n))
    bundle = build_model(config, rng)
    batch = min(config.batch_size, n)
    corruption = CorruptionSpec(config.input_corruption_sigma)
    denoising = is_denoising(config.variant)
    order = None
    pos = n
    history = []
    logger.info("training %s (m=%i) on %i images for %i iterations",
                config.variant, config.latent_dim, n, config.iterations)
    for iteration in range(config.iterations):
        lr = clr_rate(iteration, config.clr)
        if pos + batch > n:
            order = rng.permutation(n)
            pos = 0
        X = X_all[order[pos:pos + batch]]
        pos += batch
        target = None
        if denoising:
            target = X
            X = corrupt_input(X, corruption, rng)
        fp, grads = loss_and_gradients(bundle, X, rng, target)
        if not np.isfinite(fp.total):
            raise TrainingError("non-finite loss %r" % (fp.total,), iteration=iteration, lr=lr)
        bundle = bundle.with_parameters(sgd_step(bundle.parameters(), grads, lr, iteration))
        history.append((iteration, lr, fp.recon, fp.aux))
        if settings.log_every and (iteration + 1) % settings.log_every == 0:
            logger.info("%s iteration %i: lr %.6f, recon %.4f, aux %.4f",
                        config.variant, iteration + 1, lr, fp.recon, fp.aux)
    bundle.history = history
    bundle.sampling_stats = fit_sampling_stats(bundle, X_all)
    return bundle


def encode_latent(bundle, X):
    """
    Noise-free latent codes: z_L for latent variants, mu for VAE, the
    encoder output for AE and DAE.
    """
    assert isinstance(bundle, ModelBundle)
    X = _pixels(X, bundle.config.input_dim)
    h = bundle.encoder(X)
    if bundle.variant == VAE:
        return h[:, :bundle.config.latent_dim].copy()
    if bundle.transform is not None:
        return latent.latent_forward(h, bundle.transform).matrix
    return h


def decode(bundle, Z):
    assert isinstance(bundle, ModelBundle)
    return bundle.decoder(_pixels(Z, bundle.config.latent_dim, 'latent vectors'))


def fit_sampling_stats(bundle, data):
    """
    Statistics of the noise-free codes of `data`: gaussian (mean and
    population std) for the standard variants, AE and DAE; uniform
    (min and max) for the min-max variants; the standard normal prior for
    VAE.
    """
    assert isinstance(bundle, ModelBundle)
    X = _pixels(data, bundle.config.input_dim, 'training images')
    if X.shape[0] == 0:
        raise EmptySetError("no images to fit sampling statistics on")
    if bundle.variant == VAE:
        return SamplingStats.standard_normal(bundle.config.latent_dim)
    kind = UNIFORM_STATS if transform_variant(bundle.variant) == MINMAX else GAUSSIAN_STATS
    return SamplingStats.of(encode_latent(bundle, X), kind)


def sample_latent(bundle, n, rng):
    assert isinstance(bundle, ModelBundle)
    if bundle.sampling_stats is None:
        raise UnfittedError("%r has no fitted sampling statistics" % (bundle,))
    return bundle.sampling_stats.sample(n, rng)


def generate(bundle, n, rng):
    """n new images decoded from latent vectors drawn per the sampling
    statistics"""
    n = int(n)
    if n < 0:
        raise ValueError("negative image count")
    Z = sample_latent(bundle, n, rng)
    if n == 0:
        return ImageSet(np.empty((0, bundle.config.input_dim)))
    return ImageSet(decode(bundle, Z))


def reconstruct(bundle, X):
    """Deterministic noise-free encode and decode"""
    return ImageSet(decode(bundle, encode_latent(bundle, X)))


def denoise(bundle, X_corrupted):
    """Reconstruct corrupted images with a DAE or DLTAE bundle"""
    assert isinstance(bundle, ModelBundle)
    if not is_denoising(bundle.variant):
        raise VariantError("denoising needs a DAE or DLTAE bundle, got %s" % (bundle.variant,))
    return reconstruct(bundle, X_corrupted)


def interpolate(bundle, x_a, x_b, steps):
    """
    Decode `steps` evenly spaced points on the segment between the codes
    of x_a and x_b, both endpoints included.
    """
    if int(steps) < 2:
        raise ConfigurationError("interpolation needs at least 2 steps, got %r" % (steps,))
    ends = np.vstack([_pixels(x_a, bundle.config.input_dim), _pixels(x_b, bundle.config.input_dim)])
    if ends.shape[0] != 2:
        raise ShapeError("interpolate takes one image at each end")
    Z = encode_latent(bundle, ends)
    t = np.linspace(0.0, 1.0, int(steps)).reshape(-1, 1)
    path = (1.0 - t) * Z[0] + t * Z[1]
    return ImageSet(decode(bundle, path))


def latent_diameter(bundle, data, g=None):
    """Diameter of the noise-free codes of `data`"""
    return diameter(ImageSet(encode_latent(bundle, data), bounded=False), g)
