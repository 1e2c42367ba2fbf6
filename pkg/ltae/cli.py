"""
Command-line interface: ``ltae <command> ...`` or ``python -m ltae``.

Exit status is 0 on success, 1 when the library reports an error and 2
on usage errors.
"""

import os
import sys
import json
import logging
import argparse

from ltae import settings
from ltae import utils
from ltae.nn.base import LtaeError, ConfigurationError
from ltae.nn.rng import Rng
from ltae.metrics import GroundMetric, hausdorff, GROUNDS, L2
from ltae.models import ModelConfig, train, generate, denoise, corrupt_input, CorruptionSpec, \
     HISTORY_FIELDS
from ltae.checkpoint import save_bundle, load_bundle
from ltae.idx import read_idx_images, read_idx_labels, write_idx_images
from ltae.imagesink import write_image_grid
from ltae.presets import ExperimentPreset, PresetPaths, run_preset, export_latent_scatter, \
     subset_indices, ALIASES, PRESETS

logger = logging.getLogger("ltae.cli")

SHEET_SIZE = 100


def _read_config_file(path):
    if path is None:
        return {}
    try:
        config = utils.read_json(path)
    except ValueError as ex:
        raise ConfigurationError("%s is not valid JSON: %s" % (path, ex))
    if not isinstance(config, dict):
        raise ConfigurationError("%s does not hold a JSON object" % (path,))
    return config


def _training_data(args, rng):
    """The training images, and the indices of the subset if --subset
    (picked with rng)"""
    paths = PresetPaths(args.data_dir, getattr(args, 'out_dir', '.'))
    images = read_idx_images(paths.train_images)
    indices = None
    if getattr(args, 'subset', None):
        indices = subset_indices(images.n, args.subset, rng)
        images = images.subset(indices)
    return paths, images, indices


def _write_images(images, out_dir, stem):
    idx_path = os.path.join(out_dir, stem + '.idx')
    write_idx_images(images, idx_path, dtype='float64')
    outputs = [idx_path]
    if images.n:
        outputs.append(write_image_grid(images.pixels[:SHEET_SIZE], 10,
                                        os.path.join(out_dir, stem + '.pgm')))
    return outputs


def cmd_train(args):
    d = _read_config_file(args.config)
    if args.seed is not None:
        d['seed'] = args.seed
    if args.iterations is not None:
        d['iterations'] = args.iterations
    config = ModelConfig.from_dict(d)
    paths, images, indices = _training_data(args, Rng(config.seed))
    os.makedirs(args.out_dir, exist_ok=True)
    bundle = train(config, images)
    checkpoint = save_bundle(bundle, os.path.join(args.out_dir, '%s.ltae' % config.variant))
    history = utils.write_csv(os.path.join(args.out_dir, '%s_history.csv' % config.variant),
                              HISTORY_FIELDS, bundle.history)
    print(checkpoint)
    print(history)


def cmd_generate(args):
    bundle = load_bundle(args.checkpoint)
    seed = bundle.config.seed if args.seed is None else args.seed
    os.makedirs(args.out_dir, exist_ok=True)
    images = generate(bundle, args.n, Rng(seed))
    for path in _write_images(images, args.out_dir, 'generated'):
        print(path)


def cmd_denoise(args):
    bundle = load_bundle(args.checkpoint)
    seed = bundle.config.seed if args.seed is None else args.seed
    sigma_hat = args.sigma_hat
    if sigma_hat is None:
        sigma_hat = bundle.config.input_corruption_sigma
    os.makedirs(args.out_dir, exist_ok=True)
    rng = Rng(seed)
    paths, images, indices = _training_data(args, rng)
    corrupted = corrupt_input(images, CorruptionSpec(sigma_hat), rng)
    restored = denoise(bundle, corrupted)
    for path in _write_images(corrupted, args.out_dir, 'corrupted') + \
            _write_images(restored, args.out_dir, 'denoised'):
        print(path)


def cmd_eval_hausdorff(args):
    left = read_idx_images(args.left)
    right = read_idx_images(args.right)
    report = hausdorff(left, right, GroundMetric(args.ground))
    text = json.dumps(report.to_dict(), sort_keys=True, indent=2)
    if args.out:
        with open(args.out, 'w', encoding='utf-8') as fh:
            fh.write(text + '\n')
    print(text)


def cmd_export_latent(args):
    bundle = load_bundle(args.checkpoint)
    paths, images, indices = _training_data(args, Rng(bundle.config.seed))
    labels = read_idx_labels(paths.train_labels)
    if indices is not None:
        labels = labels[indices]
    print(export_latent_scatter(bundle, images, labels, args.out))


def cmd_preset(args):
    overrides = _read_config_file(args.config)
    if args.seed is not None:
        overrides['seed'] = args.seed
    if args.iterations is not None:
        overrides['iterations'] = args.iterations
    preset = ExperimentPreset.from_overrides(args.name, overrides, args.out_dir)
    manifest = run_preset(preset, PresetPaths(args.data_dir, args.out_dir))
    for entry in manifest.outputs:
        print(os.path.join(args.out_dir, entry['path']))
    if manifest.failed:
        logger.warning("failed models: %s", ', '.join(manifest.failed))


def build_parser():
    parser = argparse.ArgumentParser(prog='ltae', description=__doc__.strip().splitlines()[0])
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help="log progress (repeat for debug output)")
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    def data_dir(p):
        p.add_argument('--data-dir', default=settings.data_dir,
                       help="directory holding the MNIST IDX files (default $LTAE_DATA_DIR)")

    p = commands.add_parser('train', help="train one model")
    p.add_argument('--config', help="model configuration JSON file")
    data_dir(p)
    p.add_argument('--out-dir', required=True)
    p.add_argument('--seed', type=int)
    p.add_argument('--iterations', type=int)
    p.add_argument('--subset', type=int, help="train on this many randomly picked images")
    p.set_defaults(func=cmd_train)

    p = commands.add_parser('generate', help="generate images from a trained model")
    p.add_argument('--checkpoint', required=True)
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--out-dir', required=True)
    p.add_argument('--seed', type=int)
    p.set_defaults(func=cmd_generate)

    p = commands.add_parser('denoise', help="corrupt training images and denoise them")
    p.add_argument('--checkpoint', required=True)
    data_dir(p)
    p.add_argument('--out-dir', required=True)
    p.add_argument('--sigma-hat', type=float)
    p.add_argument('--seed', type=int)
    p.add_argument('--subset', type=int)
    p.set_defaults(func=cmd_denoise)

    p = commands.add_parser('eval-hausdorff', help="Hausdorff distance between two IDX image files")
    p.add_argument('--left', required=True)
    p.add_argument('--right', required=True)
    p.add_argument('--ground', choices=GROUNDS, default=L2)
    p.add_argument('--out', help="also write the JSON report here")
    p.set_defaults(func=cmd_eval_hausdorff)

    p = commands.add_parser('export-latent', help="write the 2-D latent codes of the training set as CSV")
    p.add_argument('--checkpoint', required=True)
    data_dir(p)
    p.add_argument('--out', required=True)
    p.add_argument('--subset', type=int)
    p.set_defaults(func=cmd_export_latent)

    p = commands.add_parser('preset', help="run an experiment preset")
    p.add_argument('name', choices=sorted(ALIASES) + list(PRESETS))
    data_dir(p)
    p.add_argument('--out-dir', required=True)
    p.add_argument('--seed', type=int)
    p.add_argument('--iterations', type=int)
    p.add_argument('--config', help="preset overrides JSON file")
    p.set_defaults(func=cmd_preset)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING
    if args.verbose == 1:
        level = logging.INFO
    elif args.verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s: %(message)s")
    try:
        args.func(args)
    except (LtaeError, OSError) as ex:
        sys.stderr.write("ltae %s: %s\n" % (args.command, ex))
        return 1
    return 0
