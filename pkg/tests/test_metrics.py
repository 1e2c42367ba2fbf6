import unittest

import numpy as np

from ltae.metrics import ImageSet, GroundMetric, ground_distance, pairwise_distances, hausdorff, \
     diameter, replicate_report, ReplicateReport, L2, CROSS_ENTROPY
from ltae.nn.base import ShapeError, EmptySetError, ConfigurationError
from ltae.nn.rng import Rng


def random_set(seed, n, dim=5):
    return ImageSet(Rng(seed).uniform_array(0.0, 1.0, (n, dim)))


def brute_force(U, V, g):
    """Directed terms by explicit loops over ground_distance"""
    U = U.pixels
    V = V.pixels
    d = [[ground_distance(u, v, g) for v in V] for u in U]
    forward = max(min(row) for row in d)
    backward = max(min(d[i][j] for i in range(len(U))) for j in range(len(V)))
    return forward, backward


class ImageSetTests(unittest.TestCase):

    def testValidation(self):
        self.assertRaises(ValueError, ImageSet, np.array([[0.5, 1.5]]))
        self.assertRaises(ValueError, ImageSet, np.array([[0.5, np.nan]]), bounded=False)
        self.assertRaises(ShapeError, ImageSet, np.zeros((2, 2, 2)))
        self.assertEqual(ImageSet(np.array([[0.5, 1.5]]), bounded=False).n, 1)

    def testSubset(self):
        s = ImageSet(np.array([[0.0], [0.5], [1.0]]))
        sub = s.subset([2, 0])
        self.assertEqual(sub.pixels.tolist(), [[1.0], [0.0]])
        self.assertEqual((len(s), s.dim), (3, 1))


class GroundMetricTests(unittest.TestCase):

    def testValidation(self):
        self.assertRaises(ConfigurationError, GroundMetric, 'l1')
        self.assertRaises(ConfigurationError, GroundMetric, CROSS_ENTROPY, 0.0)
        self.assertRaises(ConfigurationError, GroundMetric, CROSS_ENTROPY, 0.5)
        self.assertEqual(GroundMetric(CROSS_ENTROPY, 1e-3).clamp_delta, 1e-3)

    def testL2Distance(self):
        self.assertAlmostEqual(ground_distance([0.0, 0.0], [0.6, 0.8], GroundMetric(L2)), 1.0, places=15)
        self.assertRaises(ShapeError, ground_distance, [0.0], [0.0, 1.0], GroundMetric(L2))

    def testCrossEntropyAsymmetric(self):
        g = GroundMetric(CROSS_ENTROPY)
        u = np.array([0.9, 0.1])
        v = np.array([0.3, 0.6])
        self.assertNotAlmostEqual(ground_distance(u, v, g), ground_distance(v, u, g))
        self.assertGreater(ground_distance(u, u, g), 0.0)

    def testCrossEntropyClampsSecondArgument(self):
        g = GroundMetric(CROSS_ENTROPY, 1e-7)
        d = ground_distance([1.0], [0.0], g)
        self.assertAlmostEqual(d, -np.log(1e-7), places=9)
        self.assertEqual(ground_distance([1.0], [1.0], g), ground_distance([1.0], [1.0 - 1e-7], g))


class HausdorffTests(unittest.TestCase):

    def testMatchesBruteForce(self):
        for seed in range(4):
            U = random_set(2 * seed, 7)
            V = random_set(2 * seed + 1, 9)
            for g in (GroundMetric(L2), GroundMetric(CROSS_ENTROPY)):
                forward, backward = brute_force(U, V, g)
                for block_size in (1, 2, 4, None):
                    report = hausdorff(U, V, g, block_size)
                    self.assertEqual((report.forward, report.backward), (forward, backward))
                    self.assertEqual(report.distance, max(forward, backward))

    def testMatchesBruteForceOnManyPairs(self):
        rng = Rng(7)
        grounds = (GroundMetric(L2), GroundMetric(CROSS_ENTROPY))
        for k in range(500):
            dim = rng.bounded(10) + 1
            U = ImageSet(rng.uniform_array(0.0, 1.0, (rng.bounded(20) + 1, dim)))
            V = ImageSet(rng.uniform_array(0.0, 1.0, (rng.bounded(20) + 1, dim)))
            g = grounds[k % 2]
            block_size = (1, 3, 8, None)[rng.bounded(4)]
            report = hausdorff(U, V, g, block_size)
            self.assertEqual((report.forward, report.backward), brute_force(U, V, g), k)

    def testL2AxiomsOnManyTriples(self):
        rng = Rng(8)
        g = GroundMetric(L2)
        for k in range(1000):
            dim = rng.bounded(4) + 1
            A, B, C = [ImageSet(rng.uniform_array(-1.0, 2.0, (rng.bounded(6) + 1, dim)),
                                bounded=False) for dummy in range(3)]
            ab = hausdorff(A, B, g).distance
            self.assertEqual(hausdorff(A, A, g).distance, 0.0)
            self.assertAlmostEqual(ab, hausdorff(B, A, g).distance, delta=1e-12)
            self.assertLessEqual(hausdorff(A, C, g).distance,
                                 ab + hausdorff(B, C, g).distance + 1e-12)

    def testDuplicatePointChangesNothing(self):
        for seed in range(10):
            U = random_set(70 + seed, 6)
            V = random_set(90 + seed, 5)
            doubled = ImageSet(np.vstack([V.pixels, V.pixels[seed % 5:seed % 5 + 1]]))
            for g in (GroundMetric(L2), GroundMetric(CROSS_ENTROPY)):
                self.assertEqual(hausdorff(U, doubled, g).distance, hausdorff(U, V, g).distance)

    def testArgpairsAttainTerms(self):
        U = random_set(10, 6)
        V = random_set(11, 8)
        for g in (GroundMetric(L2), GroundMetric(CROSS_ENTROPY)):
            report = hausdorff(U, V, g, block_size=3)
            i, j = report.forward_pair
            self.assertEqual(ground_distance(U.pixels[i], V.pixels[j], g), report.forward)
            i, j = report.backward_pair
            self.assertEqual(ground_distance(U.pixels[i], V.pixels[j], g), report.backward)

    def testTiesGoToLowestIndex(self):
        U = ImageSet(np.array([[0.0], [0.0]]), bounded=False)
        V = ImageSet(np.array([[-1.0], [1.0]]), bounded=False)
        report = hausdorff(U, V, GroundMetric(L2), block_size=1)
        self.assertEqual(report.forward_pair, (0, 0))
        self.assertEqual(report.backward_pair, (0, 0))
        self.assertEqual(report.distance, 1.0)

    def testL2Axioms(self):
        g = GroundMetric(L2)
        A = random_set(20, 5)
        B = random_set(21, 6)
        C = random_set(22, 4)
        self.assertEqual(hausdorff(A, A, g).distance, 0.0)
        self.assertEqual(hausdorff(A, B, g).distance, hausdorff(B, A, g).distance)
        self.assertLessEqual(hausdorff(A, C, g).distance,
                             hausdorff(A, B, g).distance + hausdorff(B, C, g).distance + 1e-12)

    def testCrossEntropyOperandOrderMatters(self):
        g = GroundMetric(CROSS_ENTROPY)
        A = random_set(30, 5)
        B = random_set(31, 5)
        self.assertNotEqual(hausdorff(A, B, g).forward, hausdorff(B, A, g).backward)

    def testOperandErrors(self):
        g = GroundMetric(L2)
        self.assertRaises(EmptySetError, hausdorff, np.zeros((0, 3)), np.zeros((2, 3)), g)
        self.assertRaises(EmptySetError, hausdorff, np.zeros((2, 3)), np.zeros((0, 3)), g)
        self.assertRaises(ShapeError, hausdorff, np.zeros((2, 3)), np.zeros((2, 4)), g)

    def testReportDict(self):
        g = GroundMetric(L2)
        d = hausdorff(ImageSet(np.array([[0.0], [1.0]])),
                      ImageSet(np.array([[0.5], [3.0]]), bounded=False), g).to_dict()
        self.assertEqual(sorted(d), ['argpairs', 'backward', 'clamp_delta', 'distance',
                                     'forward', 'ground', 'n_u', 'n_v'])
        self.assertEqual(d['argpairs'], {'forward': [0, 0], 'backward': [1, 1]})
        self.assertEqual((d['forward'], d['backward'], d['distance']), (0.5, 2.0, 2.0))


class PairwiseTests(unittest.TestCase):

    def testBlockSizeIndependent(self):
        U = random_set(40, 7)
        V = random_set(41, 5)
        for g in (GroundMetric(L2), GroundMetric(CROSS_ENTROPY)):
            full = pairwise_distances(U, V, g, block_size=100)
            for block_size in (1, 3):
                np.testing.assert_array_equal(pairwise_distances(U, V, g, block_size), full)
            self.assertEqual(full[2, 4], ground_distance(U.pixels[2], V.pixels[4], g))

    def testDiameter(self):
        U = ImageSet(np.array([[0.0, 0.0], [3.0, 4.0], [1.0, 1.0]]), bounded=False)
        self.assertEqual(diameter(U), 5.0)
        self.assertEqual(diameter(U, block_size=1), 5.0)
        self.assertEqual(diameter(np.array([[0.25]])), 0.0)
        self.assertRaises(ConfigurationError, diameter, U, GroundMetric(CROSS_ENTROPY))
        self.assertRaises(EmptySetError, diameter, np.zeros((0, 2)))

    def testDiameterTranslationInvariant(self):
        rng = Rng(9)
        for k in range(20):
            U = rng.uniform_array(-1.0, 1.0, (rng.bounded(15) + 2, 4))
            shift = rng.uniform(-50.0, 50.0, 4)
            moved = ImageSet(U + shift, bounded=False)
            self.assertAlmostEqual(diameter(moved), diameter(ImageSet(U, bounded=False)), delta=1e-12)


class ReplicateTests(unittest.TestCase):

    def testSingleReplicateHasZeroStd(self):
        report = replicate_report(random_set(50, 4), [random_set(51, 3)], GroundMetric(L2))
        self.assertEqual(report.std, 0.0)
        self.assertEqual(report.mean, report.distances[0])

    def testMeanAndSampleStd(self):
        train = random_set(60, 5)
        reps = [random_set(61 + k, 5) for k in range(3)]
        report = replicate_report(train, reps, GroundMetric(L2))
        d = [hausdorff(train, r, GroundMetric(L2)).distance for r in reps]
        self.assertAlmostEqual(report.mean, np.mean(d), places=12)
        self.assertAlmostEqual(report.std, np.std(d, ddof=1), places=12)
        self.assertEqual([row[0] for row in report.rows()], [0, 1, 2])
        self.assertEqual(report.to_dict()['distances'], d)

    def testEmpty(self):
        self.assertRaises(EmptySetError, replicate_report, random_set(70, 2), [], GroundMetric(L2))
        self.assertRaises(EmptySetError, ReplicateReport, [])


if __name__ == '__main__':
    unittest.main()
