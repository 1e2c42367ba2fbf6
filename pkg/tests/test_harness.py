import io
import os
import struct
import tempfile
import unittest
import contextlib
from unittest import mock

import numpy as np

from ltae import cli
from ltae import idx
from ltae import models
from ltae import presets
from ltae import settings
from ltae import utils
from ltae.idx import read_idx_images, read_idx_labels, write_idx_images, write_idx_labels, \
     parse_idx
from ltae.imagesink import tile_images, encode_pgm, FileImageSink, MemoryImageSink, \
     write_image_grid
from ltae.checkpoint import save_bundle
from ltae.metrics import ImageSet, GROUNDS
from ltae.models import ModelConfig, train, LTAE_S, DLTAE_M, VAE, AE
from ltae.nn.base import FormatError, ShapeError, ConfigurationError, TrainingError
from ltae.nn.rng import Rng
from ltae.presets import ExperimentPreset, PresetPaths, run_preset, subset_indices, \
     sample_subset, export_latent_scatter, TABLE1, TABLE2, SCATTER, GRID


def quantized_images(n, dim=16, seed=1):
    """Images whose pixels are multiples of 1/255"""
    return np.round(Rng(seed).uniform_array(0.0, 1.0, (n, dim)) * 255.0) / 255.0


def write_dataset(data_dir, n=60, gz=False):
    suffix = '.gz' if gz else ''
    images = quantized_images(n)
    rng = Rng(2)
    labels = np.array([rng.bounded(10) for i in range(n)])
    write_idx_images(images, os.path.join(data_dir, presets.TRAIN_IMAGES + suffix), shape=(4, 4))
    write_idx_labels(labels, os.path.join(data_dir, presets.TRAIN_LABELS + suffix))
    return images, labels


class TempDirTestCase(unittest.TestCase):

    def mkdtemp(self):
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        return tmp.name


class IdxTests(TempDirTestCase):

    def testUbyteImages(self):
        images = quantized_images(3)
        buf = io.BytesIO()
        write_idx_images(images, buf, shape=(4, 4))
        data = buf.getvalue()
        self.assertEqual(struct.unpack('>I', data[:4])[0], idx.IMAGES_MAGIC)
        self.assertEqual(struct.unpack('>III', data[4:16]), (3, 4, 4))
        self.assertEqual(len(data), 16 + 3 * 16)
        back = read_idx_images(data)
        self.assertTrue(back.bounded)
        np.testing.assert_allclose(back.pixels, images, atol=1e-15)

    def testFloatImages(self):
        pixels = np.array([[-0.25, 1.5, 0.125, 0.0]])
        buf = io.BytesIO()
        write_idx_images(pixels, buf, dtype='float64')
        data = buf.getvalue()
        self.assertEqual(struct.unpack('>I', data[:4])[0], idx.FLOAT_IMAGES_MAGIC)
        back = read_idx_images(data)
        self.assertFalse(back.bounded)
        np.testing.assert_array_equal(back.pixels, pixels)
        buf = io.BytesIO()
        write_idx_images(np.array([[0.5, 0.25, 1.0, 0.0]]), buf, dtype='float64')
        self.assertTrue(read_idx_images(buf.getvalue()).bounded)

    def testLabels(self):
        buf = io.BytesIO()
        write_idx_labels(np.array([3, 0, 9]), buf)
        data = buf.getvalue()
        self.assertEqual(struct.unpack('>I', data[:4])[0], idx.LABELS_MAGIC)
        self.assertEqual(read_idx_labels(data).tolist(), [3, 0, 9])
        self.assertRaises(ValueError, write_idx_labels, np.array([10]), io.BytesIO())

    def testGzip(self):
        data_dir = self.mkdtemp()
        images, labels = write_dataset(data_dir, n=5, gz=True)
        paths = PresetPaths(data_dir, data_dir)
        self.assertTrue(paths.train_images.endswith('.gz'))
        np.testing.assert_allclose(read_idx_images(paths.train_images).pixels, images, atol=1e-15)
        self.assertEqual(read_idx_labels(paths.train_labels).tolist(), labels.tolist())

    def testFormatErrorOffsets(self):
        good = struct.pack('>HBBIII', 0, idx.UBYTE, 3, 2, 2, 2) + bytes(8)
        self.assertEqual(parse_idx(good)[1], (2, 2, 2))
        cases = [
            (b'\x01' + good[1:], 0),
            (good[:2] + b'\x0d' + good[3:], 2),
            (good[:-1], len(good) - 1),
            (good + b'\x00', len(good)),
            (good[:6], 6),
        ]
        for data, offset in cases:
            with self.assertRaises(FormatError) as cm:
                parse_idx(data)
            self.assertEqual(cm.exception.offset, offset)

    def testLabelOutOfRange(self):
        data = struct.pack('>HBBI', 0, idx.UBYTE, 1, 4) + bytes([1, 2, 10, 3])
        with self.assertRaises(FormatError) as cm:
            read_idx_labels(data)
        self.assertEqual(cm.exception.offset, 10)

    def testNonFiniteFloatPixel(self):
        buf = io.BytesIO()
        write_idx_images(np.array([[0.5, 0.0], [np.nan, 1.0]]), buf, dtype='float64', shape=(1, 2))
        with self.assertRaises(FormatError) as cm:
            read_idx_images(buf.getvalue())
        self.assertEqual(cm.exception.offset, 16 + 2 * 8)

    def testImagesNeedTwoDimensions(self):
        data = struct.pack('>HBBI', 0, idx.UBYTE, 1, 2) + bytes(2)
        self.assertRaises(FormatError, read_idx_images, data)

    def testNonSquareNeedsShape(self):
        self.assertRaises(ShapeError, write_idx_images, np.zeros((1, 6)), io.BytesIO())
        write_idx_images(np.zeros((1, 6)), io.BytesIO(), shape=(2, 3))


class ImageSinkTests(TempDirTestCase):

    def testMnistSheet(self):
        grid = tile_images(np.ones((100, 784)), 10)
        self.assertEqual(grid.shape, (280, 280))
        self.assertTrue(np.all(grid == 255))
        data = encode_pgm(grid)
        self.assertTrue(data.startswith(b'P5\n280 280\n255\n'))
        self.assertEqual(len(data), len(b'P5\n280 280\n255\n') + 280 * 280)

    def testFewerImagesThanColumns(self):
        grid = tile_images(ImageSet(np.zeros((3, 16))), 10)
        self.assertEqual(grid.shape, (4, 12))

    def testPartialRowIsBlack(self):
        grid = tile_images(np.full((3, 4), 0.5), 2)
        self.assertEqual(grid.shape, (4, 4))
        self.assertEqual(grid[2:, 2:].tolist(), [[0, 0], [0, 0]])
        self.assertEqual(int(grid[0, 0]), 128)

    def testValidation(self):
        self.assertRaises(ShapeError, tile_images, np.zeros((0, 4)), 2)
        self.assertRaises(ShapeError, tile_images, np.zeros((1, 5)), 2)
        self.assertRaises(ValueError, tile_images, np.zeros((1, 4)), 0)

    def testMemorySinkFlushTo(self):
        memory = MemoryImageSink(cols=2)
        memory.write_grid(np.zeros((2, 4)))
        memory.write_grid(np.ones((1, 4)))
        out = io.BytesIO()
        memory.flush_to(FileImageSink(out))
        self.assertEqual(out.getvalue(), encode_pgm(tile_images(np.zeros((2, 4)), 2)) +
                         encode_pgm(tile_images(np.ones((1, 4)), 2)))
        self.assertEqual(memory.flush(), b'')

    def testWriteFile(self):
        path = os.path.join(self.mkdtemp(), 'sheet.pgm')
        self.assertEqual(write_image_grid(np.zeros((5, 9)), 5, path), path)
        with open(path, 'rb') as fh:
            self.assertEqual(fh.read(), b'P5\n15 3\n255\n' + bytes(45))


class SubsetTests(unittest.TestCase):

    def testDeterministic(self):
        a = subset_indices(100, 10, Rng(5))
        b = subset_indices(100, 10, Rng(5))
        self.assertEqual(a.tolist(), b.tolist())
        self.assertEqual(len(set(a.tolist())), 10)
        self.assertNotEqual(a.tolist(), subset_indices(100, 10, Rng(6)).tolist())

    def testBounds(self):
        self.assertRaises(ConfigurationError, subset_indices, 5, 6, Rng(1))
        self.assertRaises(ConfigurationError, subset_indices, 5, 0, Rng(1))
        images = ImageSet(quantized_images(8))
        self.assertEqual(sample_subset(images, 3, Rng(1)).n, 3)


class PresetConfigTests(unittest.TestCase):

    def testTable1Defaults(self):
        preset = ExperimentPreset('table1')
        self.assertEqual(preset.name, TABLE1)
        self.assertEqual(preset.subset_size, 100)
        self.assertEqual([c.variant for c in preset.models], [VAE, models.DLTAE_M, models.DLTAE_S])
        self.assertEqual([c.seed for c in preset.models], [1, 2, 3])
        self.assertEqual(preset.models[0].clr, presets.VAE_CLR)

    def testScatterDefaults(self):
        preset = ExperimentPreset(SCATTER, seed=4)
        self.assertEqual(preset.subset_size, 1000)
        self.assertEqual([c.variant for c in preset.models], [VAE, models.LTAE_M, LTAE_S])
        self.assertEqual([c.clr.step_size for c in preset.models], [100, 100, 100])
        self.assertEqual([c.seed for c in preset.models], [5, 6, 7])
        self.assertRaises(ConfigurationError, ExperimentPreset, SCATTER, latent_dim=3)

    def testGridDefaults(self):
        preset = ExperimentPreset('grid', seed=4)
        self.assertEqual(preset.name, GRID)
        self.assertEqual(len(preset.models), 12)
        cells = set((c.variant, c.latent_dim, c.latent_sigma) for c in preset.models)
        self.assertEqual(cells, set((v, m, s) for v in (models.LTAE_M, LTAE_S)
                                    for m in (2, 10, 20) for s in (0.02, 0.06)))
        names = [preset.model_name(c) for c in preset.models]
        self.assertEqual(names[:4], ['LTAE_M_m2_s0.02', 'LTAE_S_m2_s0.02',
                                     'LTAE_M_m2_s0.06', 'LTAE_S_m2_s0.06'])
        self.assertEqual(len(set(names)), 12)
        self.assertEqual(preset.to_dict()['grid_latent_dims'], [2, 10, 20])
        self.assertNotIn('grid_sigmas', ExperimentPreset(TABLE1).to_dict())
        self.assertRaises(ConfigurationError, ExperimentPreset, GRID, grid_sigmas=[])
        self.assertRaises(ConfigurationError, ExperimentPreset, GRID, grid_latent_dims=5)

    def testModelSeedsAvoidPresetSeed(self):
        for seed in range(8):
            for name in (TABLE1, TABLE2, SCATTER, GRID):
                preset = ExperimentPreset(name, seed=seed)
                seeds = [c.seed for c in preset.models]
                self.assertNotIn(seed, seeds)
                self.assertEqual(len(set(seeds)), len(seeds))

    def testOverrides(self):
        preset = ExperimentPreset.from_overrides('table2', {
            'iterations': 7, 'models': {'DAE': {'hidden': [8]}}})
        self.assertEqual(preset.name, TABLE2)
        self.assertEqual([c.iterations for c in preset.models], [7, 7, 7])
        self.assertEqual(preset.models[0].hidden, [8])
        self.assertEqual(preset.models[1].hidden, [500, 500])
        self.assertRaises(ConfigurationError, ExperimentPreset.from_overrides, 'table2',
                          {'epochs': 3})
        self.assertRaises(ConfigurationError, ExperimentPreset.from_overrides, 'table2',
                          {'models': {'VAE': {}}})
        self.assertRaises(ConfigurationError, ExperimentPreset, 'table3')

    def testPaths(self):
        with mock.patch.object(settings, 'data_dir', None):
            self.assertRaises(ConfigurationError, PresetPaths)
        paths = PresetPaths(tempfile.gettempdir())
        with self.assertRaises(ConfigurationError):
            paths.find('no-such-idx-file')


def small_overrides(variants, **extra):
    model = {'input_dim': 16, 'hidden': [8], 'batch_size': 10}
    overrides = {'iterations': 15, 'subset_size': 30, 'replicates': 2, 'replicate_size': 20,
                 'sheet_size': 20, 'interpolation_steps': 5,
                 'models': dict((v, dict(model)) for v in variants)}
    overrides.update(extra)
    return overrides


class PresetRunTests(TempDirTestCase):

    def setUp(self):
        self.data_dir = self.mkdtemp()
        self.images, self.labels = write_dataset(self.data_dir)

    def run_preset(self, name, variants, **extra):
        out_dir = self.mkdtemp()
        preset = ExperimentPreset.from_overrides(name, small_overrides(variants, **extra), out_dir)
        return run_preset(preset, PresetPaths(self.data_dir, out_dir)), out_dir

    def testTable1(self):
        manifest, out_dir = self.run_preset(TABLE1, [VAE, models.DLTAE_M, models.DLTAE_S])
        paths = [entry['path'] for entry in manifest.outputs]
        self.assertEqual(len(paths), 16)
        for name in ('VAE.ltae', 'DLTAE_M_history.csv', 'DLTAE_S_samples.pgm',
                     'VAE_cross_entropy_replicates.csv', 'table1_generation.json'):
            self.assertIn(name, paths)
        report = utils.read_json(os.path.join(out_dir, 'table1_generation.json'))
        self.assertEqual(report['failed'], [])
        self.assertEqual(sorted(report['models']['VAE']), sorted(GROUNDS))
        self.assertEqual(len(report['models']['DLTAE_S']['l2']['distances']), 2)
        written = utils.read_json(os.path.join(out_dir, 'manifest.json'))
        self.assertEqual(written['version'], presets.MANIFEST_VERSION)
        self.assertEqual(written['data']['sha256'],
                         utils.sha256_file(os.path.join(self.data_dir, presets.TRAIN_IMAGES)))
        self.assertIsNotNone(written['finished'])
        for entry in written['outputs']:
            self.assertEqual(utils.sha256_file(os.path.join(out_dir, entry['path'])), entry['sha256'])

    def testTable1IsDeterministic(self):
        variants = [VAE, models.DLTAE_M, models.DLTAE_S]
        first, out_a = self.run_preset(TABLE1, variants, replicates=1)
        second, out_b = self.run_preset(TABLE1, variants, replicates=1)
        self.assertEqual(first.outputs, second.outputs)
        with open(os.path.join(out_a, 'table1_generation.json'), 'rb') as fh:
            a = fh.read()
        with open(os.path.join(out_b, 'table1_generation.json'), 'rb') as fh:
            b = fh.read()
        self.assertEqual(a, b)

    def testTable2(self):
        manifest, out_dir = self.run_preset(TABLE2, [models.DAE, models.DLTAE_M, models.DLTAE_S])
        report = utils.read_json(os.path.join(out_dir, 'table2_denoising.json'))
        self.assertEqual(report['columns'], ['corrupted', 'DAE', 'DLTAE_M', 'DLTAE_S'])
        for g in GROUNDS:
            self.assertEqual(sorted(report['distances'][g]), sorted(report['columns']))
        paths = [entry['path'] for entry in manifest.outputs]
        for name in ('clean.pgm', 'corrupted.pgm', 'DAE_denoised.pgm'):
            self.assertIn(name, paths)

    def testScatter(self):
        manifest, out_dir = self.run_preset(SCATTER, [VAE, models.LTAE_M, LTAE_S])
        with open(os.path.join(out_dir, 'LTAE_M_scatter.csv')) as fh:
            lines = fh.read().splitlines()
        self.assertEqual(lines[0], 'z1,z2,label')
        self.assertEqual(len(lines), 31)
        report = utils.read_json(os.path.join(out_dir, 'latent_scatter.json'))
        self.assertIn('alpha_target', report['models']['LTAE_M'])
        self.assertNotIn('alpha', report['models']['VAE'])
        self.assertEqual(report['models']['LTAE_M']['sampling_stats']['kind'], models.UNIFORM_STATS)
        self.assertIn('VAE_interpolation.pgm', [entry['path'] for entry in manifest.outputs])

    def testGrid(self):
        manifest, out_dir = self.run_preset(GRID, [models.LTAE_M, LTAE_S],
                                            grid_latent_dims=[2, 3], grid_sigmas=[0.02, 0.06])
        paths = [entry['path'] for entry in manifest.outputs]
        self.assertEqual(len(paths), 26)
        for name in ('LTAE_M_m2_s0.02.ltae', 'LTAE_S_m3_s0.06_history.csv',
                     'LTAE_S_m2_s0.06_samples.pgm', 'grid.csv', 'latent_grid.json'):
            self.assertIn(name, paths)
        report = utils.read_json(os.path.join(out_dir, 'latent_grid.json'))
        self.assertEqual(report['failed'], [])
        self.assertEqual(len(report['cells']), 8)
        for cell in report['cells']:
            self.assertIn(cell['latent_dim'], (2, 3))
            self.assertIn(cell['latent_sigma'], (0.02, 0.06))
            self.assertGreaterEqual(cell['latent_diameter'], 0.0)
            for g in GROUNDS:
                self.assertGreaterEqual(cell[g], 0.0)
        with open(os.path.join(out_dir, 'grid.csv')) as fh:
            lines = fh.read().splitlines()
        self.assertEqual(lines[0], ','.join(presets.GRID_FIELDS))
        self.assertEqual(len(lines), 9)

    def testErrorHandlerSkipsModel(self):
        real_train = models.train

        def failing_train(config, data, rng=None):
            if config.variant == VAE:
                raise TrainingError("non-finite loss", iteration=0, lr=0.001)
            return real_train(config, data, rng)

        class Skip(settings.ErrorHandler):
            def __init__(self):
                self.seen = []

            def handle_error(self, model_name, exception, traceback_):
                self.seen.append((model_name, type(exception)))
                return True
        handler = Skip()
        variants = [VAE, models.DLTAE_M, models.DLTAE_S]
        with mock.patch.object(settings, 'error_handler', handler), \
                mock.patch.object(presets, 'train', failing_train):
            manifest, out_dir = self.run_preset(TABLE1, variants, replicates=1)
        self.assertEqual(handler.seen, [(VAE, TrainingError)])
        self.assertEqual(manifest.failed, [VAE])
        report = utils.read_json(os.path.join(out_dir, 'table1_generation.json'))
        self.assertEqual(report['failed'], [VAE])
        self.assertEqual(sorted(report['models']), ['DLTAE_M', 'DLTAE_S'])

    def testErrorsPropagateWithoutHandler(self):
        def failing_train(config, data, rng=None):
            raise TrainingError("non-finite loss", iteration=3, lr=0.002)
        with mock.patch.object(settings, 'error_handler', None), \
                mock.patch.object(presets, 'train', failing_train):
            self.assertRaises(TrainingError, self.run_preset, TABLE1, [VAE, models.DLTAE_M,
                                                                      models.DLTAE_S])


class ErrorHandlingTests(unittest.TestCase):

    def testHandlerDeclines(self):
        class Decline(settings.ErrorHandler):
            def handle_error(self, model_name, exception, traceback_):
                return False

        def fail():
            raise TrainingError("boom")
        with mock.patch.object(settings, 'error_handler', Decline()):
            self.assertRaises(TrainingError, utils.call_with_error_handling, fail, (), {}, 'AE')

    def testOtherErrorsAreNotHandled(self):
        class Accept(settings.ErrorHandler):
            def handle_error(self, model_name, exception, traceback_):
                return True

        def fail():
            raise ShapeError("bad")
        with mock.patch.object(settings, 'error_handler', Accept()):
            self.assertRaises(ShapeError, utils.call_with_error_handling, fail, (), {}, 'AE')

    def testTrainingErrorMessage(self):
        ex = TrainingError("non-finite loss", iteration=12, lr=0.004)
        self.assertIn('12', str(ex))

    def testCanonicalJson(self):
        self.assertEqual(utils.canonical_json({'b': [1.0], 'a': None}), '{"a":null,"b":[1.0]}')
        self.assertRaises(ValueError, utils.canonical_json, {'x': float('nan')})


class LatentScatterTests(TempDirTestCase):

    def testExport(self):
        data = quantized_images(12)
        bundle = train(ModelConfig(LTAE_S, input_dim=16, hidden=(8,), iterations=2), data)
        path = export_latent_scatter(bundle, data, list(range(10)) + [0, 1],
                                     os.path.join(self.mkdtemp(), 'scatter.csv'))
        with open(path) as fh:
            lines = fh.read().splitlines()
        self.assertEqual(lines[0], 'z1,z2,label')
        self.assertEqual(len(lines), 13)
        self.assertEqual(lines[-1].split(',')[-1], '1')
        self.assertRaises(ShapeError, export_latent_scatter, bundle, data, [0], path)
        wide = train(ModelConfig(AE, input_dim=16, latent_dim=3, hidden=(8,), iterations=0), data)
        self.assertRaises(ConfigurationError, export_latent_scatter, wide, data, [0] * 12, path)


class CliTests(TempDirTestCase):

    def main(self, *argv):
        out = io.StringIO()
        with contextlib.redirect_stdout(out):
            status = cli.main(list(argv))
        return status, out.getvalue()

    def testUsageError(self):
        with contextlib.redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as cm:
                cli.main(['preset', 'table9', '--out-dir', self.mkdtemp()])
        self.assertEqual(cm.exception.code, 2)

    def testTrainGenerateExport(self):
        data_dir = self.mkdtemp()
        out_dir = self.mkdtemp()
        write_dataset(data_dir)
        config = os.path.join(out_dir, 'config.json')
        utils.write_json(config, {'variant': 'LTAE_S', 'input_dim': 16, 'hidden': [8],
                                  'batch_size': 10})
        status, out = self.main('train', '--config', config, '--data-dir', data_dir,
                                '--out-dir', out_dir, '--iterations', '5', '--subset', '20')
        self.assertEqual(status, 0)
        checkpoint = os.path.join(out_dir, 'LTAE_S.ltae')
        self.assertEqual(out.splitlines()[0], checkpoint)
        with open(os.path.join(out_dir, 'LTAE_S_history.csv')) as fh:
            self.assertEqual(len(fh.read().splitlines()), 6)

        status, out = self.main('generate', '--checkpoint', checkpoint, '--n', '7',
                                '--out-dir', out_dir, '--seed', '3')
        self.assertEqual(status, 0)
        generated = read_idx_images(os.path.join(out_dir, 'generated.idx'))
        self.assertEqual((generated.n, generated.dim), (7, 16))
        self.assertTrue(os.path.exists(os.path.join(out_dir, 'generated.pgm')))

        scatter = os.path.join(out_dir, 'scatter.csv')
        status, out = self.main('export-latent', '--checkpoint', checkpoint, '--data-dir', data_dir,
                                '--out', scatter, '--subset', '20')
        self.assertEqual(status, 0)
        with open(scatter) as fh:
            self.assertEqual(len(fh.read().splitlines()), 21)

        with contextlib.redirect_stderr(io.StringIO()) as err:
            status, out = self.main('denoise', '--checkpoint', checkpoint, '--data-dir', data_dir,
                                    '--out-dir', out_dir)
        self.assertEqual(status, 1)
        self.assertIn('DAE or DLTAE', err.getvalue())

    def testDenoise(self):
        data_dir = self.mkdtemp()
        out_dir = self.mkdtemp()
        write_dataset(data_dir)
        bundle = train(ModelConfig(DLTAE_M, input_dim=16, hidden=(8,), iterations=3),
                       quantized_images(20))
        checkpoint = save_bundle(bundle, os.path.join(out_dir, 'DLTAE_M.ltae'))
        status, out = self.main('denoise', '--checkpoint', checkpoint, '--data-dir', data_dir,
                                '--out-dir', out_dir, '--subset', '8', '--sigma-hat', '0.3')
        self.assertEqual(status, 0)
        self.assertEqual(read_idx_images(os.path.join(out_dir, 'denoised.idx')).n, 8)
        self.assertFalse(read_idx_images(os.path.join(out_dir, 'corrupted.idx')).bounded)

    def testEvalHausdorff(self):
        tmp = self.mkdtemp()
        left = os.path.join(tmp, 'left.idx')
        right = os.path.join(tmp, 'right.idx')
        write_idx_images(np.array([[0.0], [1.0]]), left, dtype='float64', shape=(1, 1))
        write_idx_images(np.array([[0.5], [3.0]]), right, dtype='float64', shape=(1, 1))
        report_path = os.path.join(tmp, 'report.json')
        status, out = self.main('eval-hausdorff', '--left', left, '--right', right,
                                '--out', report_path)
        self.assertEqual(status, 0)
        report = utils.read_json(report_path)
        self.assertEqual((report['forward'], report['backward'], report['distance']), (0.5, 2.0, 2.0))
        self.assertIn('"distance": 2.0', out)

    def testMissingInputs(self):
        tmp = self.mkdtemp()
        with contextlib.redirect_stderr(io.StringIO()):
            status, out = self.main('eval-hausdorff', '--left', os.path.join(tmp, 'nope.idx'),
                                    '--right', os.path.join(tmp, 'nope.idx'))
            self.assertEqual(status, 1)
            status, out = self.main('preset', 'table1', '--data-dir', tmp, '--out-dir', tmp)
            self.assertEqual(status, 1)

    def testBadConfigExitsWithError(self):
        data_dir = self.mkdtemp()
        out_dir = self.mkdtemp()
        write_dataset(data_dir)
        config = os.path.join(out_dir, 'config.json')
        for bad in ({'variant': 'LTAE_S', 'clr': {'base_lr': 0.001}},
                    {'variant': 'LTAE_S', 'clr': {'base_lr': 0.001, 'max_lr': 0.005,
                                                  'step_size': 10, 'gamma': 0.9}},
                    {'variant': 'LTAE_S', 'batch_size': 1},
                    {'variant': 'AE', 'seed': 'seven'}):
            utils.write_json(config, bad)
            with contextlib.redirect_stderr(io.StringIO()) as err:
                status, out = self.main('train', '--config', config, '--data-dir', data_dir,
                                        '--out-dir', out_dir, '--iterations', '2')
            self.assertEqual(status, 1, bad)
            self.assertNotIn('Traceback', err.getvalue())

    def testNonFiniteOperandExitsWithError(self):
        tmp = self.mkdtemp()
        left = os.path.join(tmp, 'left.idx')
        write_idx_images(np.array([[np.inf], [1.0]]), left, dtype='float64', shape=(1, 1))
        with contextlib.redirect_stderr(io.StringIO()) as err:
            status, out = self.main('eval-hausdorff', '--left', left, '--right', left)
        self.assertEqual(status, 1)
        self.assertIn('non-finite', err.getvalue())


if __name__ == '__main__':
    unittest.main()
