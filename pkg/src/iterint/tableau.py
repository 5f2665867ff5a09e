"""Gaussian coefficient tableaus and their truncated coefficient sums.

A tableau holds the raw randomness of one stream: the Wiener increment
W1 and the N(0,1) coefficient arrays x_{jr}, y_{jr} for r = 1..p.  All
sampling is counter-keyed (see :mod:`iterint.rng`), so a tableau is a
pure function of (seed, stream, q, p) and extending p to N > p
reproduces the first p modes bit-identically.
"""

import io
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import polygamma

from . import rng, sums
from .lyndon import enumerate_lyndon3, layout, pairs_strict, pairs_upper

FORMAT_VERSION = "iterint-tableau/1"


@dataclass(frozen=True)
class Tableau:
    q: int
    p: int
    seed: int
    stream: int
    w1: np.ndarray  # (q,)
    x: np.ndarray   # (q, p)
    y: np.ndarray   # (q, p)

    def __post_init__(self):
        if self.x.shape != (self.q, self.p) or self.y.shape != (self.q, self.p):
            raise ValueError("coefficient arrays must have shape (q, p)")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))
                and np.all(np.isfinite(self.w1))):
            raise ValueError("tableau entries must be finite")


def sample_tableau(q, p, seed=0, stream=0, sampler=None):
    """Draw the tableau of a single stream."""
    if q < 1 or p < 1:
        raise ValueError(f"q and p must be >= 1, got q={q}, p={p}")
    w1, x, y = rng.tableau_normals(seed, stream, q, p, sampler=sampler)
    return Tableau(q=q, p=p, seed=seed, stream=stream, w1=w1, x=x, y=y)


def sample_batch(q, p, seed, stream0, n, sampler=None):
    """(w1, x, y) arrays for n consecutive streams, shapes (n,q), (n,q,p)."""
    return rng.batch_tableau_normals(seed, stream0, n, q, p, sampler=sampler)


def extend_tableau(t, N, sampler=None):
    """Tableau with modes 1..N; the first p columns are t's own."""
    if N <= t.p:
        raise ValueError(f"N={N} must exceed p={t.p}")
    _, xe, ye = rng.tableau_normals(t.seed, t.stream, t.q, N, r0=t.p, sampler=sampler)
    return replace(t, p=N, x=np.concatenate([t.x, xe], axis=1),
                   y=np.concatenate([t.y, ye], axis=1))


def _pack(mat, pairs):
    return np.stack([mat[..., j - 1, k - 1] for j, k in pairs], axis=-1) \
        if pairs else np.zeros(mat.shape[:-2] + (0,))


@dataclass(frozen=True)
class PartialSums:
    """Truncated coefficient sums V_p in packed block form.

    lam and nu hold the strict upper triangle (pairs j < k,
    lexicographic); mu1 and mu2 the upper triangle including the
    diagonal; delta is indexed by Lyndon words in lexicographic order.
    """

    q: int
    p: int
    z: np.ndarray
    u: np.ndarray
    lam: np.ndarray
    mu1: np.ndarray
    mu2: np.ndarray
    nu: np.ndarray
    delta: np.ndarray

    def flatten(self):
        return np.concatenate([self.z, self.u, self.lam, self.mu1,
                               self.mu2, self.nu, self.delta], axis=-1)

    @classmethod
    def from_flat(cls, vec, q, p):
        lay = layout(q)
        if vec.shape[-1] != lay.d:
            raise ValueError(f"flat vector has length {vec.shape[-1]}, expected {lay.d}")
        kw = {name: vec[..., lay.block_slice(name)].copy() for name in
              ("z", "u", "mu1", "mu2", "delta")}
        kw["lam"] = vec[..., lay.block_slice("lambda")].copy()
        kw["nu"] = vec[..., lay.block_slice("nu")].copy()
        return cls(q=q, p=p, **kw)

    def _unpack(self, packed, pairs, anti=False):
        q = self.q
        out = np.zeros(packed.shape[:-1] + (q, q))
        for i, (j, k) in enumerate(pairs):
            out[..., j - 1, k - 1] = packed[..., i]
            if (j, k) != (k, j):
                out[..., k - 1, j - 1] = -packed[..., i] if anti else packed[..., i]
        return out

    def lambda_matrix(self):
        """Full antisymmetric lambda matrix."""
        return self._unpack(self.lam, pairs_strict(self.q), anti=True)

    def mu1_matrix(self):
        return self._unpack(self.mu1, pairs_upper(self.q))

    def mu2_matrix(self):
        return self._unpack(self.mu2, pairs_upper(self.q))

    def nu_matrix(self):
        """Full nu matrix, lower triangle and diagonal reconstructed from
        nu_jk + nu_kj = z_j z_k - mu1_jk."""
        q = self.q
        mu1 = self.mu1_matrix()
        nu_up = np.zeros(self.z.shape + (q,))
        for i, (j, k) in enumerate(pairs_strict(q)):
            nu_up[..., j - 1, k - 1] = self.nu[..., i]
        return sums.nu_full_from_parts(self.z, mu1, nu_up)

    def delta_tensor(self):
        """delta over Lyndon words as a dict keyed by the word."""
        return {w: self.delta[..., i] for i, w in enumerate(enumerate_lyndon3(self.q))}


def partial_sums(t):
    """All truncated coefficient sums of a tableau."""
    flat = sums.flat_sums(t.x, t.y)
    return PartialSums.from_flat(flat, t.q, t.p)


def partial_sums_direct(t):
    """Reference route (explicit summation); used as a test oracle."""
    return PartialSums.from_flat(sums.flat_sums_direct(t.x, t.y), t.q, t.p)


@dataclass(frozen=True)
class TailSums:
    """Blockwise tail V_N - V_p of one stream (same packing as PartialSums)."""

    q: int
    p: int
    N: int
    z: np.ndarray
    u: np.ndarray
    lam: np.ndarray
    mu1: np.ndarray
    mu2: np.ndarray
    nu: np.ndarray
    delta: np.ndarray

    def flatten(self):
        return np.concatenate([self.z, self.u, self.lam, self.mu1,
                               self.mu2, self.nu, self.delta], axis=-1)


def tail_flat(x, y, p):
    """Flattened V_N - V_p from full coefficient arrays (..., q, N).

    The tail of every block is the difference of the two truncations,
    so chained tails telescope exactly: tail(p, N1) + tail(N1, N2)
    equals tail(p, N2) in floating point.
    """
    N = x.shape[-1]
    if N <= p:
        raise ValueError(f"N={N} must exceed p={p}")
    return sums.flat_sums(x, y) - sums.flat_sums(x[..., :p], y[..., :p])


def tail_sample(t, N, sampler=None):
    """TailSums of V_N - V_p, sharing the tableau's retained modes."""
    full = extend_tableau(t, N, sampler=sampler)
    flat = tail_flat(full.x, full.y, t.p)
    ps = PartialSums.from_flat(flat, t.q, N)
    return TailSums(q=t.q, p=t.p, N=N, z=ps.z, u=ps.u, lam=ps.lam,
                    mu1=ps.mu1, mu2=ps.mu2, nu=ps.nu, delta=ps.delta)


def tail_series_s2(p, N=None):
    """sum_{p < r <= N} r^-2; N=None gives the infinite tail."""
    if N is None:
        return float(polygamma(1, p + 1))
    return float(polygamma(1, p + 1) - polygamma(1, N + 1))


def tail_series_s4(p, N=None):
    """sum_{p < r <= N} r^-4."""
    if N is None:
        return float(polygamma(3, p + 1)) / 6.0
    return float(polygamma(3, p + 1) - polygamma(3, N + 1)) / 6.0


def conditional_tail_mean(t, N=None):
    """E[tail | tableau] as a flattened d-vector.

    Every block is centred except the mu1/mu2 diagonals, whose entries
    equal sum_{r>p} r^-2 (truncated at N when given).  The value does
    not depend on the tableau's coefficients, only on (q, p).
    """
    lay = layout(t.q)
    out = np.zeros(lay.d)
    s2 = tail_series_s2(t.p, N)
    for i, (j, k) in enumerate(pairs_upper(t.q)):
        if j == k:
            out[lay.offsets["mu1"][0] + i] = s2
            out[lay.offsets["mu2"][0] + i] = s2
    return out


# ---------------------------------------------------------------------------
# Bridge evaluation.

def bridge_eval(t, time):
    """Value of the truncated Brownian bridge at a point of [0, 1].

    The spectral factor 1/r multiplies both coefficient families and
    the constant term is fixed to -2 z^(p) so the truncated bridge
    vanishes at both endpoints; see README for the convention.
    """
    time = np.asarray(time, dtype=float)
    if np.any(time < 0.0) or np.any(time > 1.0):
        raise ValueError("time must lie in [0, 1]")
    r = np.arange(1.0, t.p + 1)
    ang = 2.0 * np.pi * np.multiply.outer(time, r)  # (..., p)
    c = (np.cos(ang) - 1.0) / r
    s = np.sin(ang) / r
    scale = 1.0 / (np.sqrt(2.0) * np.pi)
    return scale * (np.tensordot(c, t.x, axes=([-1], [1]))
                    + np.tensordot(s, t.y, axes=([-1], [1])))


def wiener_path_eval(t, time):
    """W_time = time * W1 + bridge(time) for the truncated path."""
    time = np.asarray(time, dtype=float)
    return np.multiply.outer(time, t.w1) + bridge_eval(t, time)


# ---------------------------------------------------------------------------
# Container I/O (binary, bit-exact round trip).

def dump_tableau(t, path):
    """Write a self-describing binary container (npz)."""
    header = np.array([t.q, t.p, t.seed, t.stream], dtype=np.int64)
    payload = dict(format=np.bytes_(FORMAT_VERSION), header=header,
                   w1=t.w1, x=t.x, y=t.y)
    if hasattr(path, "write"):
        np.savez(path, **payload)
    else:
        with open(path, "wb") as fh:
            np.savez(fh, **payload)


def load_tableau(path):
    with np.load(path) as data:
        fmt = bytes(data["format"]).decode()
        if fmt != FORMAT_VERSION:
            raise ValueError(f"unsupported container format {fmt!r}")
        q, p, seed, stream = (int(v) for v in data["header"])
        return Tableau(q=q, p=p, seed=seed, stream=stream,
                       w1=data["w1"], x=data["x"], y=data["y"])


def dumps_tableau(t):
    buf = io.BytesIO()
    dump_tableau(t, buf)
    return buf.getvalue()
