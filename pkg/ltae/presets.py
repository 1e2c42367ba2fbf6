"""
Experiment presets: subset selection, training of the compared models,
generation or denoising, Hausdorff evaluation and artifact emission.

Four presets ship:

 - table1_generation: VAE, DLTAE_M and DLTAE_S trained on a random
   100-image subset; each generates several replicate sets whose
   Hausdorff distance to the subset is reported under both grounds;
 - table2_denoising: DAE, DLTAE_M and DLTAE_S trained on the subset; the
   subset is corrupted with N(0, 0.5^2) pixel noise and the corrupted set
   and each model's reconstruction are compared to the clean subset;
 - latent_scatter: VAE, LTAE_M and LTAE_S with a 2-D latent space; the
   noise-free codes of the training images are exported for plotting,
   with per-model diagnostics;
 - latent_grid: LTAE_M and LTAE_S for every latent noise sigma and latent
   dimension m of an exploration grid (by default sigma in {0.02, 0.06}
   and m in {2, 10, 20}); each cell reports its latent diameter and the
   Hausdorff distance of one generated set to the subset.

Every file a preset writes is listed, with its checksum, in the run
manifest written last.
"""

import os
import logging
import datetime

import numpy as np

from ltae import settings
from ltae import latent
from ltae.nn.base import ConfigurationError, ShapeError
from ltae.nn.rng import Rng
from ltae.nn.optim import ClrSchedule
from ltae.metrics import ImageSet, GroundMetric, hausdorff, ReplicateReport, GROUNDS
from ltae.models import ModelConfig, train, generate, denoise, encode_latent, interpolate, \
     latent_diameter, corrupt_input, CorruptionSpec, transform_variant, \
     VAE, DAE, LTAE_M, LTAE_S, DLTAE_M, DLTAE_S, HISTORY_FIELDS
from ltae.checkpoint import save_bundle
from ltae.idx import read_idx_images, read_idx_labels
from ltae.imagesink import write_image_grid
from ltae import utils
from ltae.utils import call_with_error_handling, SkipModel

logger = logging.getLogger(__name__)

TABLE1 = 'table1_generation'
TABLE2 = 'table2_denoising'
SCATTER = 'latent_scatter'
GRID = 'latent_grid'
PRESETS = (TABLE1, TABLE2, SCATTER, GRID)
ALIASES = {'table1': TABLE1, 'table2': TABLE2, 'scatter': SCATTER, 'grid': GRID}

GRID_SIGMAS = (0.02, 0.06)
GRID_LATENT_DIMS = (2, 10, 20)
GRID_FIELDS = ('model', 'variant', 'latent_dim', 'latent_sigma', 'latent_diameter') + GROUNDS

MANIFEST_VERSION = 1

TRAIN_IMAGES = 'train-images-idx3-ubyte'
TRAIN_LABELS = 'train-labels-idx1-ubyte'

VAE_CLR = ClrSchedule(0.0008, 0.002, 10)
LTAE_CLR = ClrSchedule(0.001, 0.005, 10)


def _default_models(name, latent_dim, iterations, scatter_step, grid_sigmas, grid_latent_dims):
    if name == GRID:
        return [ModelConfig(variant, latent_dim=m, latent_sigma=sigma, clr=LTAE_CLR,
                            iterations=iterations)
                for m in grid_latent_dims for sigma in grid_sigmas for variant in (LTAE_M, LTAE_S)]
    if name == TABLE1:
        variants = [(VAE, VAE_CLR), (DLTAE_M, LTAE_CLR), (DLTAE_S, LTAE_CLR)]
    elif name == TABLE2:
        variants = [(DAE, LTAE_CLR), (DLTAE_M, LTAE_CLR), (DLTAE_S, LTAE_CLR)]
    else:
        variants = [(VAE, ClrSchedule(VAE_CLR.base_lr, VAE_CLR.max_lr, scatter_step)),
                    (LTAE_M, ClrSchedule(LTAE_CLR.base_lr, LTAE_CLR.max_lr, scatter_step)),
                    (LTAE_S, ClrSchedule(LTAE_CLR.base_lr, LTAE_CLR.max_lr, scatter_step))]
    return [ModelConfig(variant, latent_dim=latent_dim, clr=clr, iterations=iterations)
            for variant, clr in variants]


class ExperimentPreset(object):
    """
    A named experiment: the models it trains, the size of the training
    subset, the replicate count and size (table1; the generated set size
    for latent_grid), and the output directory.

    Model k trains with seed ``seed ^ (k + 1)`` rather than
    ``seed ^ k``: Rng(seed) itself picks the subset and corrupts it, and
    the first model must not replay that stream.  The latent_grid cells
    take their latent dimension from grid_latent_dims, not latent_dim.
    """

    OVERRIDABLE = ('subset_size', 'replicates', 'replicate_size', 'iterations', 'latent_dim',
                   'seed', 'sheet_size', 'corruption_sigma', 'interpolation_steps', 'models',
                   'grid_sigmas', 'grid_latent_dims')

    def __init__(self, name, models=None, subset_size=None, replicates=10, replicate_size=10000,
                 iterations=40000, latent_dim=2, seed=0, out_dir=None, sheet_size=100,
                 corruption_sigma=0.5, interpolation_steps=10, grid_sigmas=GRID_SIGMAS,
                 grid_latent_dims=GRID_LATENT_DIMS):
        name = ALIASES.get(name, name)
        if name not in PRESETS:
            raise ConfigurationError("unknown preset %r (expected one of %s)"
                                     % (name, ', '.join(sorted(PRESETS + tuple(ALIASES)))))
        if int(replicates) < 1:
            raise ConfigurationError("a preset needs at least one replicate")
        if subset_size is None:
            subset_size = 1000 if name == SCATTER else 100
        if int(subset_size) < 2:
            raise ConfigurationError("the training subset needs at least 2 images")
        if name == SCATTER and int(latent_dim) != 2:
            raise ConfigurationError("the latent_scatter preset needs latent_dim 2")
        self.name = name
        self.subset_size = int(subset_size)
        self.replicates = int(replicates)
        self.replicate_size = int(replicate_size)
        self.iterations = int(iterations)
        self.latent_dim = int(latent_dim)
        self.seed = int(seed)
        self.out_dir = out_dir
        self.sheet_size = int(sheet_size)
        self.corruption_sigma = float(corruption_sigma)
        self.interpolation_steps = int(interpolation_steps)
        try:
            self.grid_sigmas = tuple(float(s) for s in grid_sigmas)
            self.grid_latent_dims = tuple(int(m) for m in grid_latent_dims)
        except (TypeError, ValueError):
            raise ConfigurationError("grid_sigmas and grid_latent_dims must be lists of numbers")
        if name == GRID and not (self.grid_sigmas and self.grid_latent_dims):
            raise ConfigurationError("the latent_grid preset needs at least one sigma and one latent_dim")
        if models is None:
            models = _default_models(name, self.latent_dim, self.iterations, 100,
                                     self.grid_sigmas, self.grid_latent_dims)
        self.models = []
        for k, config in enumerate(models):
            if isinstance(config, dict):
                config = ModelConfig.from_dict(config)
            assert isinstance(config, ModelConfig)
            self.models.append(config.replace(seed=self.seed ^ (k + 1)))
        if not self.models:
            raise ConfigurationError("a preset needs at least one model")
        names = [self.model_name(config) for config in self.models]
        if len(set(names)) != len(names):
            raise ConfigurationError("preset %s names a model twice: %s" % (name, ', '.join(names)))

    def model_name(self, config):
        """
        The file stem of `config` in this preset: the variant, or for a
        latent_grid cell the variant with its latent_dim and sigma.

        >>> ExperimentPreset('grid').model_name(ModelConfig('LTAE_S', latent_dim=10, latent_sigma=0.06))
        'LTAE_S_m10_s0.06'
        """
        if self.name != GRID:
            return config.variant
        return '%s_m%i_s%g' % (config.variant, config.latent_dim, config.latent_sigma)

    def __repr__(self):
        return "<ltae.ExperimentPreset %s seed=%i>" % (self.name, self.seed)

    def to_dict(self):
        out = {
            'name': self.name,
            'subset_size': self.subset_size,
            'replicates': self.replicates,
            'replicate_size': self.replicate_size,
            'iterations': self.iterations,
            'latent_dim': self.latent_dim,
            'seed': self.seed,
            'sheet_size': self.sheet_size,
            'corruption_sigma': self.corruption_sigma,
            'interpolation_steps': self.interpolation_steps,
            'models': [config.to_dict() for config in self.models],
        }
        if self.name == GRID:
            out['grid_sigmas'] = list(self.grid_sigmas)
            out['grid_latent_dims'] = list(self.grid_latent_dims)
        return out

    @classmethod
    def from_overrides(cls, name, overrides, out_dir=None):
        """
        A preset from its defaults updated by `overrides`.  Overriding
        'iterations' or 'latent_dim' applies to every default model;
        'models' maps a variant name to config fields to change.
        """
        overrides = dict(overrides)
        unknown = sorted(set(overrides) - set(cls.OVERRIDABLE))
        if unknown:
            raise ConfigurationError("unknown preset keys: %s" % ', '.join(unknown))
        model_changes = overrides.pop('models', {}) or {}
        preset = cls(name, out_dir=out_dir, **overrides)
        if model_changes:
            known = set(c.variant for c in preset.models)
            stray = sorted(set(model_changes) - known)
            if stray:
                raise ConfigurationError("preset %s has no models %s" % (preset.name, ', '.join(stray)))
            models = [c.replace(**model_changes.get(c.variant, {})) for c in preset.models]
            preset = cls(preset.name, models=models, out_dir=out_dir,
                         **dict((k, v) for k, v in overrides.items() if k != 'models'))
        return preset


class PresetPaths(object):
    """Where a preset reads MNIST from and writes its artifacts to"""

    def __init__(self, data_dir=None, out_dir='.'):
        if data_dir is None:
            data_dir = settings.data_dir
        if data_dir is None:
            raise ConfigurationError("no data directory: pass one or set LTAE_DATA_DIR")
        self.data_dir = data_dir
        self.out_dir = out_dir

    def find(self, base):
        for name in (base, base + '.gz'):
            path = os.path.join(self.data_dir, name)
            if os.path.exists(path):
                return path
        raise ConfigurationError("missing data file %s in %s" % (base, self.data_dir))

    @property
    def train_images(self):
        return self.find(TRAIN_IMAGES)

    @property
    def train_labels(self):
        return self.find(TRAIN_LABELS)


def _now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


class RunManifest(object):
    """
    What a preset run did: the resolved preset, the seed, the checksum of
    the training data, start and finish times, and every output file with
    its SHA-256.  Models skipped by the error handler are listed as failed.
    """

    def __init__(self, preset, data_path, data_checksum):
        self.preset = preset
        self.seed = preset.seed
        self.data_path = data_path
        self.data_checksum = data_checksum
        self.started = _now()
        self.finished = None
        self.outputs = []
        self.failed = []
        self.out_dir = preset.out_dir

    def add(self, path):
        """Record an emitted file; returns the path"""
        self.outputs.append({
            'path': os.path.relpath(path, self.out_dir),
            'sha256': utils.sha256_file(path),
            'bytes': os.path.getsize(path),
        })
        return path

    def to_dict(self):
        return {
            'version': MANIFEST_VERSION,
            'preset': self.preset.to_dict(),
            'seed': self.seed,
            'data': {'path': os.path.basename(self.data_path), 'sha256': self.data_checksum},
            'started': self.started,
            'finished': self.finished,
            'outputs': list(self.outputs),
            'failed': list(self.failed),
        }

    def write(self, path=None):
        self.finished = _now()
        if path is None:
            path = os.path.join(self.out_dir, 'manifest.json')
        utils.write_json(path, self.to_dict())
        return path


def subset_indices(n_total, n, rng):
    """
    The first n entries of a Fisher-Yates shuffle of range(n_total).

    >>> sorted(subset_indices(5, 5, Rng(1)).tolist())
    [0, 1, 2, 3, 4]
    """
    assert isinstance(rng, Rng)
    if not (0 < n <= n_total):
        raise ConfigurationError("cannot pick %i of %i images" % (n, n_total))
    return rng.permutation(n_total)[:n]


def sample_subset(images, n, rng):
    """n distinct images picked by a seeded shuffle"""
    return images.subset(subset_indices(images.n, n, rng))


def export_latent_scatter(bundle, data, labels, path):
    """
    Write the noise-free 2-D codes of `data` (z_L, or mu for VAE) as CSV
    rows ``z1,z2,label``.
    """
    if bundle.config.latent_dim != 2:
        raise ConfigurationError("latent scatter needs latent_dim 2, got %i" % (bundle.config.latent_dim,))
    Z = encode_latent(bundle, data)
    labels = np.asarray(labels).reshape(-1)
    if labels.shape[0] != Z.shape[0]:
        raise ShapeError("%i labels for %i images" % (labels.shape[0], Z.shape[0]))
    rows = [(float(z[0]), float(z[1]), int(label)) for z, label in zip(Z, labels)]
    return utils.write_csv(path, ('z1', 'z2', 'label'), rows)


def _train_model(config, data):
    rng = Rng(config.seed)
    return train(config, data, rng), rng


def _train_all(preset, data, manifest, paths):
    """Train every model; yields (config, bundle, run rng) for the survivors"""
    for config in preset.models:
        name = preset.model_name(config)
        logger.info("%s: training %s", preset.name, name)
        try:
            bundle, rng = call_with_error_handling(_train_model, (config, data), {}, name)
        except SkipModel:
            logger.warning("%s: %s failed and was skipped", preset.name, name)
            manifest.failed.append(name)
            continue
        manifest.add(save_bundle(bundle, os.path.join(paths.out_dir, '%s.ltae' % name)))
        manifest.add(utils.write_csv(os.path.join(paths.out_dir, '%s_history.csv' % name),
                                     HISTORY_FIELDS, bundle.history))
        yield config, bundle, rng


def _sheet(manifest, images, path, size):
    pixels = images.pixels[:size]
    if pixels.shape[0]:
        manifest.add(write_image_grid(pixels, 10, path))


def _run_table1(preset, paths, subset, manifest):
    results = {}
    for config, bundle, model_rng in _train_all(preset, subset, manifest, paths):
        name = config.variant
        reports = dict((g, []) for g in GROUNDS)
        for k in range(preset.replicates):
            replicate = generate(bundle, preset.replicate_size, model_rng)
            if k == 0:
                _sheet(manifest, replicate, os.path.join(paths.out_dir, '%s_samples.pgm' % name),
                       preset.sheet_size)
            for g in GROUNDS:
                reports[g].append(hausdorff(subset, replicate, GroundMetric(g)))
            logger.info("%s: %s replicate %i: l2 %.4f", preset.name, name, k,
                        reports[GROUNDS[0]][-1].distance)
        results[name] = {}
        for g in GROUNDS:
            table = ReplicateReport(reports[g])
            manifest.add(utils.write_csv(
                os.path.join(paths.out_dir, '%s_%s_replicates.csv' % (name, g)),
                ('replicate', 'forward', 'backward', 'distance'), table.rows()))
            results[name][g] = table.to_dict()
    return {'preset': preset.name, 'models': results, 'failed': list(manifest.failed)}


def _run_table2(preset, paths, subset, rng, manifest):
    corrupted = corrupt_input(subset, CorruptionSpec(preset.corruption_sigma), rng)
    _sheet(manifest, subset, os.path.join(paths.out_dir, 'clean.pgm'), preset.sheet_size)
    _sheet(manifest, corrupted, os.path.join(paths.out_dir, 'corrupted.pgm'), preset.sheet_size)
    columns = [('corrupted', corrupted)]
    for config, bundle, model_rng in _train_all(preset, subset, manifest, paths):
        restored = denoise(bundle, corrupted)
        _sheet(manifest, restored, os.path.join(paths.out_dir, '%s_denoised.pgm' % config.variant),
               preset.sheet_size)
        columns.append((config.variant, restored))
    results = {}
    for g in GROUNDS:
        metric = GroundMetric(g)
        results[g] = dict((name, hausdorff(subset, images, metric).to_dict())
                          for name, images in columns)
    return {'preset': preset.name, 'columns': [name for name, images in columns],
            'distances': results, 'failed': list(manifest.failed)}


def scatter_diagnostics(bundle, data):
    """
    Latent diameter, fitted sampling statistics and, for latent variants,
    the learned (alpha, beta) next to the closed-form targets for the
    encoder outputs of `data`.
    """
    out = {
        'variant': bundle.variant,
        'latent_diameter': latent_diameter(bundle, data),
        'sampling_stats': {
            'kind': bundle.sampling_stats.kind,
            'first': bundle.sampling_stats.first.tolist(),
            'second': bundle.sampling_stats.second.tolist(),
        },
    }
    if bundle.transform is not None:
        raw = bundle.encoder(data.pixels if isinstance(data, ImageSet) else data)
        alpha, beta = latent.transform_targets(raw, transform_variant(bundle.variant))
        out['alpha'] = bundle.transform.alpha.tolist()
        out['beta'] = bundle.transform.beta.tolist()
        out['alpha_target'] = alpha.tolist()
        out['beta_target'] = beta.tolist()
    return out


def _run_scatter(preset, paths, subset, manifest, labels):
    results = {}
    for config, bundle, model_rng in _train_all(preset, subset, manifest, paths):
        name = config.variant
        manifest.add(export_latent_scatter(bundle, subset, labels,
                                           os.path.join(paths.out_dir, '%s_scatter.csv' % name)))
        path = interpolate(bundle, subset.pixels[0], subset.pixels[1], preset.interpolation_steps)
        _sheet(manifest, path, os.path.join(paths.out_dir, '%s_interpolation.pgm' % name),
               preset.sheet_size)
        _sheet(manifest, generate(bundle, preset.sheet_size, model_rng),
               os.path.join(paths.out_dir, '%s_samples.pgm' % name), preset.sheet_size)
        results[name] = scatter_diagnostics(bundle, subset)
    return {'preset': preset.name, 'models': results, 'failed': list(manifest.failed)}


def _run_grid(preset, paths, subset, manifest):
    cells = []
    for config, bundle, model_rng in _train_all(preset, subset, manifest, paths):
        name = preset.model_name(config)
        samples = generate(bundle, preset.replicate_size, model_rng)
        _sheet(manifest, samples, os.path.join(paths.out_dir, '%s_samples.pgm' % name),
               preset.sheet_size)
        cell = {
            'model': name,
            'variant': config.variant,
            'latent_dim': config.latent_dim,
            'latent_sigma': config.latent_sigma,
            'latent_diameter': latent_diameter(bundle, subset),
        }
        for g in GROUNDS:
            cell[g] = hausdorff(subset, samples, GroundMetric(g)).distance
        logger.info("%s: %s diameter %.4f, l2 %.4f", preset.name, name,
                    cell['latent_diameter'], cell[GROUNDS[0]])
        cells.append(cell)
    manifest.add(utils.write_csv(os.path.join(paths.out_dir, 'grid.csv'), GRID_FIELDS,
                                 [tuple(cell[k] for k in GRID_FIELDS) for cell in cells]))
    return {'preset': preset.name, 'cells': cells, 'failed': list(manifest.failed)}


def run_preset(preset, paths, rng=None):
    """
    Run `preset`, reading MNIST from paths.data_dir and writing every
    artifact, then the manifest, to paths.out_dir.

    :param rng: generator for subset selection and corruption (default
                Rng(preset.seed))
    :returns: the RunManifest
    """
    assert isinstance(preset, ExperimentPreset)
    assert isinstance(paths, PresetPaths)
    if rng is None:
        rng = Rng(preset.seed)
    preset.out_dir = paths.out_dir
    os.makedirs(paths.out_dir, exist_ok=True)
    images_path = paths.train_images
    manifest = RunManifest(preset, images_path, utils.sha256_file(images_path))
    images = read_idx_images(images_path)
    logger.info("%s: read %i training images", preset.name, images.n)
    indices = subset_indices(images.n, preset.subset_size, rng)
    subset = images.subset(indices)
    if preset.name == TABLE1:
        report = _run_table1(preset, paths, subset, manifest)
    elif preset.name == TABLE2:
        report = _run_table2(preset, paths, subset, rng, manifest)
    elif preset.name == GRID:
        report = _run_grid(preset, paths, subset, manifest)
    else:
        labels = read_idx_labels(paths.train_labels)[indices]
        report = _run_scatter(preset, paths, subset, manifest, labels)
    manifest.add(utils.write_json(os.path.join(paths.out_dir, '%s.json' % preset.name), report))
    manifest.write()
    logger.info("%s: wrote %i files to %s", preset.name, len(manifest.outputs) + 1, paths.out_dir)
    return manifest
