"""
Reading and writing IDX files, the format the MNIST images and labels
ship in.

An IDX file starts with a big-endian magic word: two zero bytes, the
element type and the number of dimensions, followed by one big-endian
u32 per dimension and the elements themselves.  Element types
understood here are 0x08 (unsigned byte; images are scaled by 1/255) and
0x0E (big-endian float64, taken as-is).  Files whose name ends in
``.gz`` are decompressed transparently.

    >>> import io
    >>> buf = io.BytesIO()
    >>> write_idx_images(np.array([[0.0, 1.0, 0.5, 0.25]]), buf, shape=(2, 2))
    >>> [round(v, 4) for v in read_idx_images(buf.getvalue()).pixels[0]]
    [0.0, 1.0, 0.502, 0.251]
"""

import gzip
import struct
import logging

import numpy as np

from ltae.nn.base import FormatError, ShapeError
from ltae.metrics import ImageSet

logger = logging.getLogger(__name__)

UBYTE = 0x08
FLOAT64 = 0x0E
IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801
FLOAT_IMAGES_MAGIC = 0x00000E03

_ITEM_SIZE = {UBYTE: 1, FLOAT64: 8}
_DTYPE_CODE = {'ubyte': UBYTE, 'float64': FLOAT64}


def _read_bytes(source):
    if isinstance(source, (bytes, bytearray)):
        return bytes(source)
    if hasattr(source, 'read'):
        return source.read()
    source = str(source)
    opener = gzip.open if source.endswith('.gz') else open
    with opener(source, 'rb') as fh:
        return fh.read()


def _write_bytes(target, data):
    if hasattr(target, 'write'):
        target.write(data)
        return
    target = str(target)
    opener = gzip.open if target.endswith('.gz') else open
    with opener(target, 'wb') as fh:
        fh.write(data)


def parse_idx(data):
    """
    Split raw IDX bytes into (element type, dims, element array).

    The declared element count must match the payload length exactly.
    """
    if len(data) < 4:
        raise FormatError("truncated IDX magic", len(data))
    zero, type_code, ndim = struct.unpack('>HBB', data[:4])
    if zero != 0:
        raise FormatError("bad IDX magic 0x%08x" % struct.unpack('>I', data[:4]), 0)
    if type_code not in _ITEM_SIZE:
        raise FormatError("unsupported IDX element type 0x%02x" % (type_code,), 2)
    if ndim < 1:
        raise FormatError("IDX file declares no dimensions", 3)
    header_end = 4 + 4 * ndim
    if len(data) < header_end:
        raise FormatError("truncated IDX dimensions", len(data))
    dims = struct.unpack('>%iI' % ndim, data[4:header_end])
    count = 1
    for d in dims:
        count *= d
    expected = header_end + count * _ITEM_SIZE[type_code]
    if len(data) != expected:
        raise FormatError("IDX dims %r declare %i payload bytes but the file has %i"
                          % (dims, expected - header_end, len(data) - header_end),
                          min(len(data), expected))
    if type_code == UBYTE:
        values = np.frombuffer(data, dtype=np.uint8, count=count, offset=header_end)
    else:
        values = np.frombuffer(data, dtype='>f8', count=count, offset=header_end).astype(np.float64)
    return type_code, dims, values


def read_idx_images(source):
    """
    Images from an IDX file with dims [n, rows, cols] (any number of
    trailing dims), flattened to one row per image.

    :param source: a path, a binary file object or the raw bytes
    """
    data = _read_bytes(source)
    type_code, dims, values = parse_idx(data)
    if len(dims) < 2:
        raise FormatError("image files need at least 2 dimensions, got %i" % (len(dims),), 3)
    n = dims[0]
    pixels = values.reshape(n, -1) if n else np.empty((0, int(np.prod(dims[1:]))))
    if type_code == UBYTE:
        images = ImageSet(pixels.astype(np.float64) / 255.0)
    else:
        bad = np.nonzero(~np.isfinite(values))[0]
        if bad.size:
            raise FormatError("non-finite pixel value %r" % (values[bad[0]],),
                              4 + 4 * len(dims) + 8 * int(bad[0]))
        images = ImageSet(pixels, bounded=bool(pixels.size == 0 or (pixels.min() >= 0 and pixels.max() <= 1)))
    logger.debug("read %r", images)
    return images


def read_idx_labels(source):
    """Labels 0-9 from a 1-dimensional ubyte IDX file"""
    data = _read_bytes(source)
    type_code, dims, values = parse_idx(data)
    if type_code != UBYTE or len(dims) != 1:
        raise FormatError("label files hold one dimension of unsigned bytes", 2)
    bad = np.nonzero(values > 9)[0]
    if bad.size:
        raise FormatError("label %i out of range 0-9" % (values[bad[0]],), 8 + int(bad[0]))
    return values.astype(np.int64)


def write_idx_images(images, target, dtype='ubyte', shape=None):
    """
    Write images as IDX: dtype 'ubyte' stores round(255 * clamp(v, 0, 1)),
    'float64' stores the values unchanged.

    :param shape: per-image (rows, cols); default square
    """
    pixels = images.pixels if isinstance(images, ImageSet) else np.asarray(images, dtype=np.float64)
    if pixels.ndim != 2:
        raise ShapeError("images must be 2-D, got shape %r" % (pixels.shape,))
    if dtype not in _DTYPE_CODE:
        raise ValueError("unknown IDX element type %r" % (dtype,))
    if shape is None:
        side = int(round(np.sqrt(pixels.shape[1])))
        if side * side != pixels.shape[1]:
            raise ShapeError("images of %i values are not square; pass shape" % (pixels.shape[1],))
        shape = (side, side)
    if shape[0] * shape[1] != pixels.shape[1]:
        raise ShapeError("image shape %r does not hold %i values" % (shape, pixels.shape[1]))
    type_code = _DTYPE_CODE[dtype]
    header = struct.pack('>HBBIII', 0, type_code, 3, pixels.shape[0], shape[0], shape[1])
    if type_code == UBYTE:
        payload = np.round(255.0 * np.clip(pixels, 0.0, 1.0)).astype(np.uint8).tobytes()
    else:
        payload = pixels.astype('>f8').tobytes()
    _write_bytes(target, header + payload)


def write_idx_labels(labels, target):
    labels = np.asarray(labels)
    if labels.ndim != 1 or (labels.size and (labels.min() < 0 or labels.max() > 9)):
        raise ValueError("labels must be a vector of values 0-9")
    _write_bytes(target, struct.pack('>HBBI', 0, UBYTE, 1, labels.size) + labels.astype(np.uint8).tobytes())
