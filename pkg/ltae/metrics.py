"""
Similarity between sets of images.

The Hausdorff distance between finite sets U and V under a ground
distance d is max(sup_u inf_v d(u, v), sup_v inf_u d(u, v)).  With the
L2 ground it is a metric on finite sets.  The cross-entropy ground is
not symmetric and d(u, u) is not zero; its first argument is always the
target (taken from U, the left operand) and only the second argument is
clamped away from 0 and 1.

    >>> U = ImageSet(np.array([[0.0], [1.0]]))
    >>> V = ImageSet(np.array([[0.5], [3.0]]), bounded=False)
    >>> report = hausdorff(U, V, GroundMetric('l2'))
    >>> report.forward, report.backward, report.distance
    (0.5, 2.0, 2.0)
"""

import logging

import numpy as np

from ltae import settings
from ltae.nn.base import ShapeError, EmptySetError, ConfigurationError

logger = logging.getLogger(__name__)

L2 = 'l2'
CROSS_ENTROPY = 'cross_entropy'
GROUNDS = (L2, CROSS_ENTROPY)


class ImageSet(object):
    """
    A set of flattened images, one per row.  Unless `bounded` is False
    every entry must lie in [0, 1]; corrupted images and latent vectors
    are held with bounded=False.
    """

    def __init__(self, pixels, bounded=True):
        pixels = np.asarray(pixels, dtype=np.float64)
        if pixels.ndim == 1:
            pixels = pixels.reshape(1, -1)
        if pixels.ndim != 2:
            raise ShapeError("image set must be 2-D, got shape %r" % (pixels.shape,))
        if not np.all(np.isfinite(pixels)):
            raise ValueError("image set has non-finite entries")
        if bounded and pixels.size and (pixels.min() < 0.0 or pixels.max() > 1.0):
            raise ValueError("bounded image set has entries outside [0, 1]")
        self.pixels = pixels
        self.bounded = bool(bounded)

    @property
    def n(self):
        return self.pixels.shape[0]

    @property
    def dim(self):
        return self.pixels.shape[1]

    def __len__(self):
        return self.pixels.shape[0]

    def __repr__(self):
        return "<ltae.ImageSet n=%i dim=%i%s>" % (self.n, self.dim, '' if self.bounded else ' unbounded')

    def subset(self, indices):
        return ImageSet(self.pixels[np.asarray(indices, dtype=np.int64)], self.bounded)


def _pixels_of(s):
    if isinstance(s, ImageSet):
        return s.pixels
    return ImageSet(s, bounded=False).pixels


class GroundMetric(object):
    """
    The per-pair distance inside the Hausdorff distance.
    """

    def __init__(self, kind=L2, clamp_delta=None):
        if kind not in GROUNDS:
            raise ConfigurationError("unknown ground distance %r" % (kind,))
        if clamp_delta is None:
            clamp_delta = settings.clamp_delta
        if not (0.0 < clamp_delta < 0.5):
            raise ConfigurationError("clamp_delta must lie in (0, 0.5), got %r" % (clamp_delta,))
        self.kind = kind
        self.clamp_delta = float(clamp_delta)

    def __repr__(self):
        return "GroundMetric(%r, %r)" % (self.kind, self.clamp_delta)

    def _prepare(self, V):
        """per-block precomputation on the second operand"""
        if self.kind == L2:
            return V
        q = np.clip(V, self.clamp_delta, 1.0 - self.clamp_delta)
        return np.log(q), np.log1p(-q)

    def _row(self, u, prepared):
        """distances from one first-operand row to every prepared row"""
        if self.kind == L2:
            diff = prepared - u
            return np.sqrt((diff * diff).sum(axis=1))
        log_q, log_1mq = prepared
        return -(u * log_q + (1.0 - u) * log_1mq).sum(axis=1)


def ground_distance(u, v, g):
    """
    d(u, v) for two images.

    >>> round(ground_distance(np.array([0.5]), np.array([0.5]), GroundMetric('cross_entropy')), 4)
    0.6931
    """
    assert isinstance(g, GroundMetric)
    u = np.asarray(u, dtype=np.float64).reshape(-1)
    v = np.asarray(v, dtype=np.float64).reshape(1, -1)
    if u.shape[0] != v.shape[1]:
        raise ShapeError("image dimensions differ: %i vs %i" % (u.shape[0], v.shape[1]))
    return float(g._row(u, g._prepare(v))[0])


def _check_operands(U, V):
    if U.shape[0] == 0 or V.shape[0] == 0:
        raise EmptySetError("set operands must be non-empty")
    if U.shape[1] != V.shape[1]:
        raise ShapeError("image dimensions differ: %i vs %i" % (U.shape[1], V.shape[1]))


def _blocks(n, size):
    for start in range(0, n, size):
        yield start, min(start + size, n)


def _for_each_block(U, V, g, block_size, visit):
    block_size = block_size or settings.hausdorff_block_size
    for j0, j1 in _blocks(V.shape[0], block_size):
        prepared = g._prepare(V[j0:j1])
        for i0, i1 in _blocks(U.shape[0], block_size):
            block = np.empty((i1 - i0, j1 - j0))
            for i in range(i0, i1):
                block[i - i0] = g._row(U[i], prepared)
            visit(i0, j0, block)


def pairwise_distances(U, V, g, block_size=None):
    """
    The n_U x n_V matrix of ground distances, computed block by block.
    """
    assert isinstance(g, GroundMetric)
    U = _pixels_of(U)
    V = _pixels_of(V)
    _check_operands(U, V)
    out = np.empty((U.shape[0], V.shape[0]))

    def visit(i0, j0, block):
        out[i0:i0 + block.shape[0], j0:j0 + block.shape[1]] = block
    _for_each_block(U, V, g, block_size, visit)
    return out


class HausdorffReport(object):
    """
    Both directed terms of the Hausdorff distance, and the index pairs
    attaining them: forward_pair = (i, j) with U_i the farthest point of
    U from V and V_j its nearest neighbour; backward_pair likewise for V.
    """

    def __init__(self, forward, backward, ground, forward_pair, backward_pair, n_u, n_v):
        self.forward = float(forward)
        self.backward = float(backward)
        self.distance = max(self.forward, self.backward)
        self.ground = ground
        self.forward_pair = tuple(int(i) for i in forward_pair)
        self.backward_pair = tuple(int(i) for i in backward_pair)
        self.n_u = int(n_u)
        self.n_v = int(n_v)

    def __repr__(self):
        return "<ltae.HausdorffReport %s distance=%r>" % (self.ground.kind, self.distance)

    def to_dict(self):
        return {
            'ground': self.ground.kind,
            'clamp_delta': self.ground.clamp_delta,
            'forward': self.forward,
            'backward': self.backward,
            'distance': self.distance,
            'n_u': self.n_u,
            'n_v': self.n_v,
            'argpairs': {'forward': list(self.forward_pair), 'backward': list(self.backward_pair)},
        }


def hausdorff(U, V, g, block_size=None):
    """
    Hausdorff distance between image sets U and V.  Ties resolve to the
    lowest index.
    """
    assert isinstance(g, GroundMetric)
    U = _pixels_of(U)
    V = _pixels_of(V)
    _check_operands(U, V)
    row_min = np.full(U.shape[0], np.inf)
    row_arg = np.zeros(U.shape[0], dtype=np.int64)
    col_min = np.full(V.shape[0], np.inf)
    col_arg = np.zeros(V.shape[0], dtype=np.int64)

    def visit(i0, j0, block):
        i1 = i0 + block.shape[0]
        j1 = j0 + block.shape[1]
        bmin = block.min(axis=1)
        barg = block.argmin(axis=1) + j0
        better = bmin < row_min[i0:i1]
        row_min[i0:i1][better] = bmin[better]
        row_arg[i0:i1][better] = barg[better]
        cmin = block.min(axis=0)
        carg = block.argmin(axis=0) + i0
        better = cmin < col_min[j0:j1]
        col_min[j0:j1][better] = cmin[better]
        col_arg[j0:j1][better] = carg[better]

    _for_each_block(U, V, g, block_size, visit)
    i_far = int(np.argmax(row_min))
    j_far = int(np.argmax(col_min))
    report = HausdorffReport(row_min[i_far], col_min[j_far], g,
                             (i_far, row_arg[i_far]), (col_arg[j_far], j_far),
                             U.shape[0], V.shape[0])
    logger.debug("hausdorff %ix%i (%s): %r", U.shape[0], V.shape[0], g.kind, report.distance)
    return report


def diameter(U, g=None, block_size=None):
    """
    Largest pairwise distance within a set.

    >>> diameter(ImageSet(np.array([[0.0], [3.0], [1.0]]), bounded=False))
    3.0
    """
    if g is None:
        g = GroundMetric(L2)
    assert isinstance(g, GroundMetric)
    if g.kind != L2:
        raise ConfigurationError("diameter is defined for the l2 ground only")
    U = _pixels_of(U)
    _check_operands(U, U)
    best = [0.0]

    def visit(i0, j0, block):
        best[0] = max(best[0], float(block.max()))
    _for_each_block(U, U, g, block_size, visit)
    return best[0]


class ReplicateReport(object):
    """Hausdorff distances from one reference set to several replicates"""

    def __init__(self, reports):
        if not reports:
            raise EmptySetError("need at least one replicate")
        self.reports = list(reports)
        self.distances = np.array([r.distance for r in self.reports])
        self.mean = float(self.distances.mean())
        if len(self.reports) > 1:
            self.std = float(self.distances.std(ddof=1))
        else:
            self.std = 0.0

    def to_dict(self):
        return {
            'ground': self.reports[0].ground.kind,
            'mean': self.mean,
            'std': self.std,
            'distances': self.distances.tolist(),
        }

    def rows(self):
        """(replicate, forward, backward, distance) table rows"""
        return [(k, r.forward, r.backward, r.distance) for k, r in enumerate(self.reports)]


def replicate_report(train, replicates, g, block_size=None):
    """
    hausdorff(train, replicate) for every replicate, with the mean and the
    sample standard deviation (0 for a single replicate).
    """
    if not replicates:
        raise EmptySetError("need at least one replicate")
    reports = []
    for k, rep in enumerate(replicates):
        reports.append(hausdorff(train, rep, g, block_size))
        logger.info("replicate %i (%s): %.4f", k, g.kind, reports[-1].distance)
    return ReplicateReport(reports)
