"""
Objects that receive images, tile them into a grid and write the grid
as a binary (P5) 8-bit grayscale PGM to a file or to memory.
"""

import numpy as np

from ltae.nn.base import ShapeError
from ltae.metrics import ImageSet


def tile_images(images, cols, shape=None):
    """
    Tile images row-major into one 2-D array of bytes; pixel bytes are
    round(255 * value clamped to [0, 1]) and empty cells are black.

    >>> tile_images(np.array([[1.0], [0.0], [0.5]]), 2, shape=(1, 1)).tolist()
    [[255, 0], [128, 0]]
    """
    pixels = images.pixels if isinstance(images, ImageSet) else np.asarray(images, dtype=np.float64)
    if pixels.ndim == 1:
        pixels = pixels.reshape(1, -1)
    if pixels.shape[0] < 1:
        raise ShapeError("no images to tile")
    if int(cols) < 1:
        raise ValueError("a grid needs at least one column")
    if shape is None:
        side = int(round(np.sqrt(pixels.shape[1])))
        shape = (side, side)
    rows_px, cols_px = shape
    if rows_px * cols_px != pixels.shape[1]:
        raise ShapeError("images of %i values do not fill %r" % (pixels.shape[1], shape))
    cols = min(int(cols), pixels.shape[0])
    rows = -(-pixels.shape[0] // cols)
    grid = np.zeros((rows * rows_px, cols * cols_px), dtype=np.uint8)
    values = np.round(255.0 * np.clip(pixels, 0.0, 1.0)).astype(np.uint8)
    for k in range(pixels.shape[0]):
        r, c = divmod(k, cols)
        grid[r * rows_px:(r + 1) * rows_px, c * cols_px:(c + 1) * cols_px] = \
            values[k].reshape(rows_px, cols_px)
    return grid


def encode_pgm(grid):
    """P5 PGM bytes for a 2-D uint8 array"""
    grid = np.asarray(grid, dtype=np.uint8)
    height, width = grid.shape
    return b'P5\n%d %d\n255\n' % (width, height) + grid.tobytes()


class ImageSink(object):
    """Abstract base class for image sinks"""

    def __init__(self, cols=10, shape=None):
        """
        :param cols: grid columns (fewer when there are fewer images)
        :param shape: per-image (rows, cols); default square
        """
        self.cols = cols
        self.shape = shape

    def write_grid(self, images):
        """Tile `images` and write them as one PGM"""
        self._write(encode_pgm(tile_images(images, self.cols, self.shape)))

    def _write(self, data):
        raise NotImplementedError


class FileImageSink(ImageSink):
    """An image sink that writes to a path or a binary file-like object"""

    def __init__(self, target, cols=10, shape=None):
        super(FileImageSink, self).__init__(cols, shape)
        self.target = target

    def __repr__(self):
        return "<ltae.imagesink.FileImageSink %r>" % (getattr(self.target, 'name', self.target),)

    def _write(self, data):
        if hasattr(self.target, 'write'):
            self.target.write(data)
        else:
            with open(self.target, 'wb') as fh:
                fh.write(data)


class MemoryImageSink(ImageSink):
    """An image sink that keeps the encoded grids in memory

    >>> sink = MemoryImageSink(cols=1)
    >>> sink.write_grid(np.ones((1, 4)))
    >>> sink.flush()
    b'P5\\n2 2\\n255\\n\\xff\\xff\\xff\\xff'
    """

    def __init__(self, cols=10, shape=None):
        super(MemoryImageSink, self).__init__(cols, shape)
        self.chunks = []

    def _write(self, data):
        self.chunks.append(data)

    def flush_to(self, sink):
        """Flushes the kept grids to another image sink"""
        assert isinstance(sink, ImageSink)
        for data in self.chunks:
            sink._write(data)
        self.chunks = []

    def flush(self):
        "Flushes the kept grids and returns them concatenated"
        data = b''.join(self.chunks)
        self.chunks = []
        return data


def write_image_grid(images, cols, path, shape=None):
    """Write `images` tiled `cols` wide as a PGM file at `path`"""
    FileImageSink(path, cols, shape).write_grid(images)
    return path
