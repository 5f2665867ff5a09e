"""Counter-keyed Gaussian streams for reproducible parallel Monte Carlo.

Every normal variate produced here is a pure function of the tuple
(seed, stream, tag, channel, index): a Philox-4x64 counter generator is
keyed by a splitmix64 hash of (seed, stream), and the word consumed for
a given variate sits at a fixed counter position determined by
(tag, channel, index).  Consequences relied on throughout the package:

* regenerating a tableau from (seed, stream, q, p) is bit-identical;
* extending a stream from p to N > p modes reproduces the first p
  values exactly and only appends fresh ones;
* sampling order, batching and thread count cannot change any value.

Tags partition a stream's counter space into independent segments:
tag 0 holds the cosine coefficients x, tag 1 the sine coefficients y,
tag 2 the Wiener increment components, tag 3 auxiliary draws (candidate
Gaussians, variance top-ups).  Each (tag, channel) segment is MAX_INDEX
words long, so channel and index ranges never collide.
"""

import numpy as np
from scipy.special import ndtri

# Fixed counter geometry.  Changing these constants changes every stream.
MAX_INDEX = 16384      # words per (tag, channel) segment; must be mult of 4
MAX_CHANNELS = 8       # Wiener dimensions supported by the layout
TAG_X, TAG_Y, TAG_W, TAG_AUX = 0, 1, 2, 3

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)


def _splitmix64(z):
    """One splitmix64 scrambling round (vectorised over uint64 arrays)."""
    z = (z + _GOLDEN) & _MASK
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & _MASK
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & _MASK
    return z ^ (z >> np.uint64(31))


def stream_key(seed, stream):
    """Philox key (2 uint64 words) for a (seed, stream) pair."""
    s = np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)
    t = np.uint64(int(stream) & 0xFFFFFFFFFFFFFFFF)
    k0 = _splitmix64(_splitmix64(s) ^ t)
    k1 = _splitmix64(k0 ^ _GOLDEN)
    return np.array([k0, k1], dtype=np.uint64)


def _uniform_open(words):
    """Map uint64 words to doubles in the open interval (0, 1)."""
    return ((words >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


class StreamSampler:
    """Draws counter-addressed standard normals, reusing one Philox core.

    Not thread-safe; create one per worker.  All methods are pure
    functions of their arguments and the (seed, stream) identity.
    """

    def __init__(self):
        self._bg = np.random.Philox(key=np.zeros(2, dtype=np.uint64))
        self._template = self._bg.state

    def _raw(self, key, block, count):
        st = self._template
        st["state"]["key"] = key
        ctr = st["state"]["counter"]
        ctr[:] = 0
        ctr[0] = block
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        self._bg.state = st
        return self._bg.random_raw(count)

    def words(self, seed, stream, tag, channel, start, count):
        """Raw uint64 words at indices [start, start+count) of a segment."""
        if channel >= MAX_CHANNELS:
            raise ValueError(f"channel {channel} exceeds layout capacity {MAX_CHANNELS}")
        if start + count > MAX_INDEX:
            raise ValueError(f"index range [{start}, {start + count}) exceeds segment capacity {MAX_INDEX}")
        key = stream_key(seed, stream)
        seg = (tag * MAX_CHANNELS + channel) * MAX_INDEX
        first = seg + start
        blk, off = divmod(first, 4)
        w = self._raw(key, blk, off + count)
        return w[off:]

    def normals(self, seed, stream, tag, channel, start, count):
        """Standard normals at indices [start, start+count) of a segment."""
        return ndtri(_uniform_open(self.words(seed, stream, tag, channel, start, count)))


def tableau_normals(seed, stream, q, p, r0=0, sampler=None):
    """(w1, x, y) normal arrays for one stream.

    x and y have shape (q, p - r0) covering mode indices r0+1 .. p
    (1-based); w1 has shape (q,).  With r0 > 0 only the tail modes are
    drawn, bit-identical to the corresponding columns of a full draw.
    """
    s = sampler or StreamSampler()
    count = p - r0
    x = np.empty((q, count))
    y = np.empty((q, count))
    for j in range(q):
        x[j] = s.normals(seed, stream, TAG_X, j, r0, count)
        y[j] = s.normals(seed, stream, TAG_Y, j, r0, count)
    w1 = s.normals(seed, stream, TAG_W, 0, 0, q)
    return w1, x, y


def batch_tableau_normals(seed, stream0, n, q, p, r0=0, sampler=None):
    """Normals for n consecutive streams; row i is stream stream0 + i."""
    s = sampler or StreamSampler()
    count = p - r0
    x = np.empty((n, q, count))
    y = np.empty((n, q, count))
    w1 = np.empty((n, q))
    for i in range(n):
        w1[i], x[i], y[i] = tableau_normals(seed, stream0 + i, q, p, r0=r0, sampler=s)
    return w1, x, y


def aux_normals(seed, stream, start, count, sampler=None):
    """Auxiliary normals (candidate Gaussians, variance top-ups)."""
    s = sampler or StreamSampler()
    return s.normals(seed, stream, TAG_AUX, 0, start, count)


def batch_aux_normals(seed, stream0, n, start, count, sampler=None):
    s = sampler or StreamSampler()
    out = np.empty((n, count))
    for i in range(n):
        out[i] = s.normals(seed, stream0 + i, TAG_AUX, 0, start, count)
    return out


def unit_directions(seed, stream, n, dim, sampler=None):
    """n deterministic unit vectors in R^dim (for sliced projections)."""
    s = sampler or StreamSampler()
    g = s.normals(seed, stream, TAG_AUX, 1, 0, n * dim).reshape(n, dim)
    return g / np.linalg.norm(g, axis=1, keepdims=True)
