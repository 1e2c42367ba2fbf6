"""
Seeded random number generation.

The generator is xoshiro256++ with its four state words seeded from a
splitmix64 stream, so that a seed names one stream on every platform.
Small requests step the state in pure Python.  Large requests are
served by several copies of the same stream running side by side in
numpy arrays; each copy is started at its offset with an exact jump
computed from the (linear, over GF(2)) state transition, and the
outputs are concatenated, so the words produced are identical to
stepping one word at a time.

    >>> rng = Rng(42)
    >>> words = rng.random_u64(5)
    >>> rng2 = Rng(42)
    >>> [rng2.next_u64() for i in range(5)] == [int(w) for w in words]
    True
"""

import math
import logging

import numpy as np

from ltae import settings

logger = logging.getLogger(__name__)

MASK64 = 0xFFFFFFFFFFFFFFFF
TWO_POW_M53 = 1.0 / (1 << 53)

_U23 = np.uint64(23)
_U17 = np.uint64(17)
_U45 = np.uint64(45)
_U41 = np.uint64(64 - 23)
_U19 = np.uint64(64 - 45)


def splitmix64(x):
    """
    One splitmix64 step: returns (new_state, output).
    """
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return x, z ^ (z >> 31)


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


def _advance(s0, s1, s2, s3):
    t = (s1 << 17) & MASK64
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, 45)
    return s0, s1, s2, s3


def _words_to_bits(words):
    """bit 64*w + b of the result is bit b of state word w"""
    w = np.ascontiguousarray(np.asarray(words, dtype='<u8'))
    return np.unpackbits(w.view(np.uint8), bitorder='little')


def _bits_to_words(bits):
    """inverse of _words_to_bits; `bits` is (..., 256)"""
    packed = np.packbits(np.ascontiguousarray(bits, dtype=np.uint8), axis=-1, bitorder='little')
    return np.ascontiguousarray(packed).view('<u8')


def _mul_gf2(a, b):
    # entries are 0/1 and sums stay below 2**53, so float products are exact
    return np.mod(a @ b, 2.0)


class _Transition(object):
    """
    The xoshiro256++ state update as a 256x256 matrix over GF(2), with
    a cache of its repeated squares.
    """

    def __init__(self):
        columns = []
        for i in range(256):
            words = [0, 0, 0, 0]
            words[i // 64] = 1 << (i % 64)
            columns.append(_words_to_bits(_advance(*words)))
        self._squares = [np.array(columns, dtype=np.float64).T]
        self._jumps = {}

    def square(self, k):
        """T^(2^k)"""
        while len(self._squares) <= k:
            last = self._squares[-1]
            self._squares.append(_mul_gf2(last, last))
        return self._squares[k]

    def power(self, n):
        """T^n"""
        result = np.eye(256)
        k = 0
        while n:
            if n & 1:
                result = _mul_gf2(self.square(k), result)
            n >>= 1
            k += 1
        return result

    def apply(self, n, bits):
        """T^n applied to a bit vector or to the columns of a bit matrix"""
        bits = np.asarray(bits, dtype=np.float64)
        k = 0
        while n:
            if n & 1:
                bits = _mul_gf2(self.square(k), bits)
            n >>= 1
            k += 1
        return bits

    def lane_starts(self, bits, stride, count):
        """
        Columns T^(j*stride) bits for j = 0 .. count-1, built by doubling.
        """
        jumps = self._jumps.get(stride)
        if jumps is None:
            jumps = self._jumps[stride] = [self.power(stride)]
        cols = np.asarray(bits, dtype=np.float64).reshape(256, 1)
        level = 0
        while cols.shape[1] < count:
            if len(jumps) <= level:
                jumps.append(_mul_gf2(jumps[-1], jumps[-1]))
            cols = np.hstack([cols, _mul_gf2(jumps[level], cols)])
            level += 1
        return cols[:, :count]


_transition = None

def _get_transition():
    global _transition
    if _transition is None:
        logger.debug("building xoshiro256++ transition matrix")
        _transition = _Transition()
    return _transition


class Rng(object):
    """
    A xoshiro256++ generator.  Instances are single-owner: never share
    one between threads.
    """

    def __init__(self, seed):
        """
        :param seed: integer seed; only its low 64 bits are used
        """
        self.seed = int(seed) & MASK64
        x = self.seed
        words = []
        for dummy in range(4):
            x, out = splitmix64(x)
            words.append(out)
        self._s = tuple(words)

    def __repr__(self):
        return "<ltae.Rng seed=%i>" % (self.seed,)

    def _get_state(self):
        return self._s

    def _set_state(self, words):
        words = tuple(int(w) & MASK64 for w in words)
        if len(words) != 4:
            raise ValueError("xoshiro256++ state has four words")
        if not any(words):
            raise ValueError("xoshiro256++ state cannot be all zeros")
        self._s = words

    state = property(_get_state, _set_state)

    def next_u64(self):
        """Return the next 64-bit output as a Python int"""
        s0, s1, s2, s3 = self._s
        result = (_rotl((s0 + s3) & MASK64, 23) + s0) & MASK64
        self._s = _advance(s0, s1, s2, s3)
        return result

    def random_u64(self, n):
        """
        Return the next `n` outputs as a uint64 array.
        """
        n = int(n)
        if n < 0:
            raise ValueError("negative draw count")
        if n < max(settings.bulk_rng_threshold, 2):
            out = np.empty(n, dtype=np.uint64)
            for i in range(n):
                out[i] = self.next_u64()
            return out
        return self._bulk_u64(n)

    def _bulk_u64(self, n):
        transition = _get_transition()
        stride = max(64, math.isqrt(n))
        count = -(-n // stride)
        bits = _words_to_bits(self._s)
        starts = transition.lane_starts(bits, stride, count)
        lanes = _bits_to_words(starts.T.astype(np.uint8))
        s0 = lanes[:, 0].astype(np.uint64)
        s1 = lanes[:, 1].astype(np.uint64)
        s2 = lanes[:, 2].astype(np.uint64)
        s3 = lanes[:, 3].astype(np.uint64)
        out = np.empty((count, stride), dtype=np.uint64)
        for step in range(stride):
            x = s0 + s3
            out[:, step] = ((x << _U23) | (x >> _U41)) + s0
            t = s1 << _U17
            s2 ^= s0
            s3 ^= s1
            s1 ^= s2
            s0 ^= s3
            s2 ^= t
            s3 = (s3 << _U45) | (s3 >> _U19)
        new_bits = transition.apply(n, bits).astype(np.uint8)
        self._s = tuple(int(w) for w in _bits_to_words(new_bits))
        return out.reshape(-1)[:n]

    def random(self, n):
        """
        `n` uniform reals in [0, 1) with 53 random bits each.
        """
        words = self.random_u64(n)
        return (words >> np.uint64(11)).astype(np.float64) * TWO_POW_M53

    def uniform(self, lo, hi, n):
        """
        `n` uniform reals in [lo, hi].

        >>> vals = Rng(1).uniform(-0.06, 0.06, 1000)
        >>> bool(vals.min() >= -0.06 and vals.max() <= 0.06)
        True
        """
        if hi < lo:
            raise ValueError("uniform bounds out of order: %r > %r" % (lo, hi))
        out = lo + (hi - lo) * self.random(n)
        return np.clip(out, lo, hi)

    def gaussian(self, n):
        """
        `n` standard normal draws by the Box-Muller transform.  Uniforms
        are consumed in pairs and each pair yields two draws (cosine
        then sine); an odd request drops the final sine draw.
        """
        n = int(n)
        pairs = -(-n // 2)
        u = self.random(2 * pairs)
        radius = np.sqrt(-2.0 * np.log1p(-u[0::2]))
        theta = 2.0 * math.pi * u[1::2]
        out = np.empty(2 * pairs, dtype=np.float64)
        out[0::2] = radius * np.cos(theta)
        out[1::2] = radius * np.sin(theta)
        return out[:n]

    def standard_normal(self, shape):
        """Standard normal draws filling an array of `shape`, row-major"""
        size = 1
        for dim in shape:
            size *= int(dim)
        return self.gaussian(size).reshape(shape)

    def uniform_array(self, lo, hi, shape):
        """Uniform draws on [lo, hi] filling an array of `shape`, row-major"""
        size = 1
        for dim in shape:
            size *= int(dim)
        return self.uniform(lo, hi, size).reshape(shape)

    def bounded(self, n):
        """
        An integer uniform on [0, n), by multiply-shift with rejection.
        """
        n = int(n)
        if n <= 0:
            raise ValueError("bound must be positive")
        x = self.next_u64()
        m = x * n
        low = m & MASK64
        if low < n:
            threshold = ((1 << 64) - n) % n
            while low < threshold:
                x = self.next_u64()
                m = x * n
                low = m & MASK64
        return m >> 64

    def permutation(self, n):
        """
        A permutation of range(n) by Fisher-Yates, swapping from the end.

        >>> sorted(Rng(3).permutation(5).tolist())
        [0, 1, 2, 3, 4]
        """
        perm = np.arange(n, dtype=np.int64)
        for i in range(n - 1, 0, -1):
            j = self.bounded(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm

    def spawn(self, index):
        """A new generator seeded with this seed xor `index`."""
        return Rng(self.seed ^ int(index))


def gaussian(rng, n):
    assert isinstance(rng, Rng)
    return rng.gaussian(n)


def uniform(rng, lo, hi, n):
    assert isinstance(rng, Rng)
    return rng.uniform(lo, hi, n)
