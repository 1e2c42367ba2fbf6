"""
Binary checkpoints of model bundles.

Layout, all integers little-endian:

 - the magic bytes ``LTAE``;
 - u32 format version;
 - u32 header length, then the header: canonical (key-sorted, compact)
   UTF-8 JSON with the model config, the sampling statistics kind (or
   null) and the number of training history rows;
 - every parameter array in ModelBundle.parameters() order, then the two
   sampling statistics vectors (if any), then the history as rows of
   (iteration, lr, recon_loss, aux_loss), all as float64.

Array shapes follow from the config, so the payload carries no shape
information of its own.
"""

import json
import struct
import logging

import numpy as np

from ltae.nn.base import FormatError
from ltae.nn.mlp import Mlp
from ltae.latent import LatentTransform
from ltae.models import ModelConfig, ModelBundle, SamplingStats, network_layers, \
     has_transform, transform_variant, HISTORY_FIELDS
from ltae.utils import canonical_json

logger = logging.getLogger(__name__)

MAGIC = b'LTAE'
VERSION = 1

_F64 = np.dtype('<f8')


def bundle_to_bytes(bundle):
    assert isinstance(bundle, ModelBundle)
    stats = bundle.sampling_stats
    header = {
        'config': bundle.config.to_dict(),
        'sampling_stats': None if stats is None else stats.kind,
        'history_length': len(bundle.history),
    }
    header_bytes = canonical_json(header).encode('utf-8')
    chunks = [MAGIC, struct.pack('<II', VERSION, len(header_bytes)), header_bytes]
    arrays = list(bundle.parameters())
    if stats is not None:
        arrays += [stats.first, stats.second]
    if bundle.history:
        arrays.append(np.array(bundle.history, dtype=np.float64))
    for array in arrays:
        chunks.append(np.ascontiguousarray(array, dtype=_F64).tobytes())
    return b''.join(chunks)


def save_bundle(bundle, path):
    """Write `bundle` to `path`"""
    data = bundle_to_bytes(bundle)
    with open(path, 'wb') as fh:
        fh.write(data)
    logger.debug("saved %r to %s (%i bytes)", bundle, path, len(data))
    return path


class _Reader(object):

    def __init__(self, data):
        self.data = data
        self.offset = 0

    def take(self, size, what):
        if self.offset + size > len(self.data):
            raise FormatError("truncated checkpoint: %s needs %i bytes, %i left"
                              % (what, size, len(self.data) - self.offset), self.offset)
        chunk = self.data[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def array(self, shape, what):
        count = int(np.prod(shape))
        raw = self.take(count * 8, what)
        return np.frombuffer(raw, dtype=_F64).astype(np.float64).reshape(shape)


def bundle_from_bytes(data):
    reader = _Reader(data)
    if reader.take(4, 'magic') != MAGIC:
        raise FormatError("not an LTAE checkpoint (bad magic)", 0)
    version, header_length = struct.unpack('<II', reader.take(8, 'version'))
    if version != VERSION:
        raise FormatError("unsupported checkpoint version %i" % (version,), 4)
    header_offset = reader.offset
    try:
        header = json.loads(reader.take(header_length, 'header').decode('utf-8'))
        config = ModelConfig.from_dict(header['config'])
        stats_kind = header['sampling_stats']
        history_length = int(header['history_length'])
    except (ValueError, KeyError, TypeError) as ex:
        raise FormatError("bad checkpoint header: %s" % (ex,), header_offset)

    def network(layers, name):
        weights = []
        biases = []
        for i, spec in enumerate(layers):
            weights.append(reader.array((spec.out_dim, spec.in_dim), '%s.W%i' % (name, i)))
            biases.append(reader.array((spec.out_dim,), '%s.b%i' % (name, i)))
        return Mlp(layers, weights, biases)

    enc_layers, dec_layers = network_layers(config)
    encoder = network(enc_layers, 'encoder')
    transform = None
    m = config.latent_dim
    if has_transform(config.variant):
        alpha = reader.array((m,), 'latent.alpha')
        beta = reader.array((m,), 'latent.beta')
        transform = LatentTransform(alpha, beta, transform_variant(config.variant))
    decoder = network(dec_layers, 'decoder')
    stats = None
    if stats_kind is not None:
        stats = SamplingStats(stats_kind, reader.array((m,), 'stats'), reader.array((m,), 'stats'))
    history = []
    if history_length:
        rows = reader.array((history_length, len(HISTORY_FIELDS)), 'history')
        history = [(int(it), float(lr), float(recon), float(aux)) for it, lr, recon, aux in rows]
    if reader.offset != len(data):
        raise FormatError("%i trailing bytes after checkpoint" % (len(data) - reader.offset,),
                          reader.offset)
    return ModelBundle(config, encoder, decoder, transform, stats, history)


def load_bundle(path):
    """Read a bundle written by save_bundle"""
    with open(path, 'rb') as fh:
        data = fh.read()
    bundle = bundle_from_bytes(data)
    logger.debug("loaded %r from %s", bundle, path)
    return bundle
