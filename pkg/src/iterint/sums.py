"""Partial sums of the Fourier coefficient series.

Given coefficient arrays x, y of shape (..., q, P) (mode index r = 1..P
along the last axis), this module evaluates the truncated sums

    z_j   = sum_r x_{jr}/r                  u_j  = sum_r y_{jr}/r^2
    lam_{jk} = sum_r (x_{jr} y_{kr} - y_{jr} x_{kr})/r
    mu1_{jk} = sum_r x_{jr} x_{kr}/r^2      mu2 likewise with y
    nu_{jk}  = sum_{r != s} ((r/s) x_{jr} x_{ks} - y_{jr} y_{ks})/(r^2 - s^2)
    delta_{jkl} = triple sum over r + s <= rmax (see delta_direct)

Two routes are provided.  The direct route sums the defining formulas
over explicit (r, s) grids; it is the reference oracle and costs
O(P^2) per tableau.  The fast route used by the batch samplers rewrites
nu through the partial fractions

    (r/s)/(r^2-s^2) = 1/(rs) + 1/(2r(r-s)) - 1/(2r(r+s))
    1/(r^2-s^2)     = 1/(2r(r-s)) + 1/(2r(r+s))

and delta through linear convolutions over t = r + s, so one batch
costs O(n q^2 P log P).  The two routes agree to rounding; tests pin
them against each other.
"""

import numpy as np

from .lyndon import enumerate_lyndon3, layout, pairs_strict, pairs_upper


def _fft_len(n):
    """Power-of-two FFT length >= n."""
    return 1 << max(0, (n - 1).bit_length())


class ConvBank:
    """FFT spectra and pairwise linear convolutions of coefficient rows.

    Sequences are indexed r = 1..P.  conv(f, g)[t] with t = 2..2P is
    addressed through ``pair(fa, fb, a, b)`` which returns the full
    convolution array; entry m corresponds to t = m + 2.
    """

    def __init__(self, x, y):
        # x, y: (..., q, P)
        self.P = x.shape[-1]
        self.q = x.shape[-2]
        r = np.arange(1.0, self.P + 1)
        self.L = _fft_len(2 * self.P)
        self.spec = {
            "x": np.fft.rfft(x, n=self.L, axis=-1),
            "y": np.fft.rfft(y, n=self.L, axis=-1),
            "xh": np.fft.rfft(x / r, n=self.L, axis=-1),
            "yh": np.fft.rfft(y / r, n=self.L, axis=-1),
        }
        self._hilbert_kernel = None

    def pair(self, fa, a, fb, b):
        """Linear convolution of family fa channel a with fb channel b."""
        prod = self.spec[fa][..., a, :] * self.spec[fb][..., b, :]
        return np.fft.irfft(prod, n=self.L, axis=-1)

    def hilbert(self, fam, a):
        """H[g](r) = sum_{s != r} g_s / (r - s) for r = 1..P."""
        if self._hilbert_kernel is None:
            kern = np.zeros(self.L)
            d = np.arange(1, self.P)
            kern[d] = 1.0 / d
            kern[self.L - d] = -1.0 / d
            self._hilbert_kernel = np.fft.rfft(kern)
        prod = self.spec[fam][..., a, :] * self._hilbert_kernel
        return np.fft.irfft(prod, n=self.L, axis=-1)[..., : self.P]


def low_order_sums(x, y):
    """z, u, lam (full antisym matrix), mu1, mu2 (full sym matrices)."""
    P = x.shape[-1]
    r = np.arange(1.0, P + 1)
    xh, yh = x / r, y / r
    z = xh.sum(axis=-1)
    u = (y / r**2).sum(axis=-1)
    lam = np.einsum("...jr,...kr->...jk", xh, y) - np.einsum("...jr,...kr->...jk", yh, x)
    mu1 = np.einsum("...jr,...kr->...jk", xh, xh)
    mu2 = np.einsum("...jr,...kr->...jk", yh, yh)
    return z, u, lam, mu1, mu2


def nu_fast(x, y, bank=None):
    """Full nu matrix (all j, k) via the partial-fraction route."""
    if bank is None:
        bank = ConvBank(x, y)
    P = bank.P
    r = np.arange(1.0, P + 1)
    xh, yh = x / r, y / r
    z, _, _, mu1, mu2 = low_order_sums(x, y)
    t = np.arange(2.0, 2 * P + 1)
    wt = np.zeros(bank.L)
    wt[: 2 * P - 1] = 1.0 / t

    q = bank.q
    shape = x.shape[:-2] + (q, q)
    nu = np.empty(shape)
    for j in range(q):
        for k in range(q):
            hx = bank.hilbert("x", k)
            hy = bank.hilbert("y", k)
            bxx = bank.pair("xh", j, "x", k) @ wt
            byy = bank.pair("yh", j, "y", k) @ wt
            nu[..., j, k] = (
                z[..., j] * z[..., k]
                - 0.75 * mu1[..., j, k]
                + 0.25 * mu2[..., j, k]
                + 0.5 * np.einsum("...r,...r->...", xh[..., j, :], hx)
                - 0.5 * np.einsum("...r,...r->...", yh[..., j, :], hy)
                - 0.5 * bxx
                - 0.5 * byy
            )
    return nu


def delta_fast(x, y, words, rmax=None, bank=None):
    """delta_{jkl} truncated at r + s <= rmax for each word in ``words``.

    words are 1-based triples; output has the word list along the last
    axis.  rmax defaults to P and may not exceed it.
    """
    if bank is None:
        bank = ConvBank(x, y)
    P = bank.P
    if rmax is None:
        rmax = P
    if rmax > P:
        raise ValueError(f"rmax={rmax} exceeds available modes P={P}")
    nt = max(rmax - 1, 0)  # t = 2..rmax
    out = np.zeros(x.shape[:-2] + (len(words),))
    if nt == 0:
        return out
    inv_t = 1.0 / np.arange(2.0, rmax + 1)
    xt = x[..., 1:rmax]  # x_{., t} for t = 2..rmax
    yt = y[..., 1:rmax]

    cache = {}

    def conv(fa, a, fb, b):
        key = (fa, a, fb, b)
        if key not in cache:
            cache[key] = bank.pair(fa, a, fb, b)[..., :nt]
        return cache[key]

    for w, (j, k, l) in enumerate(words):
        j, k, l = j - 1, k - 1, l - 1
        a1 = conv("xh", j, "y", k) + conv("yh", j, "x", k)
        a2 = conv("yh", j, "y", k) - conv("xh", j, "x", k)
        b1 = conv("xh", j, "yh", l) + conv("xh", l, "yh", j)
        b2 = conv("yh", j, "yh", l) - conv("xh", j, "xh", l)
        c1 = conv("xh", l, "y", k) - conv("yh", l, "x", k)
        c2 = conv("xh", l, "x", k) + conv("yh", l, "y", k)
        acc = (
            -inv_t * (a1 * xt[..., l, :] + a2 * yt[..., l, :])
            + b1 * xt[..., k, :]
            + b2 * yt[..., k, :]
            + inv_t * (c1 * xt[..., j, :] + c2 * yt[..., j, :])
        )
        out[..., w] = acc.sum(axis=-1)
    return out


def flat_sums(x, y, rmax=None, bank=None, lay=None):
    """Flattened coefficient vector(s) of shape (..., d).

    Block order and packing follow :func:`iterint.lyndon.layout`:
    z, u, lambda (j < k), mu1 and mu2 (j <= k), nu (j < k), delta
    (Lyndon words).  nu and delta use the fast route.
    """
    q = x.shape[-2]
    if lay is None:
        lay = layout(q)
    if bank is None:
        bank = ConvBank(x, y)
    z, u, lam, mu1, mu2 = low_order_sums(x, y)
    nu = nu_fast(x, y, bank=bank)
    words = enumerate_lyndon3(q)
    delta = delta_fast(x, y, words, rmax=rmax, bank=bank)

    out = np.empty(x.shape[:-2] + (lay.d,))
    out[..., lay.block_slice("z")] = z
    out[..., lay.block_slice("u")] = u
    sl = pairs_strict(q)
    up = pairs_upper(q)
    out[..., lay.block_slice("lambda")] = np.stack(
        [lam[..., j - 1, k - 1] for j, k in sl], axis=-1) if sl else np.zeros(x.shape[:-2] + (0,))
    out[..., lay.block_slice("mu1")] = np.stack([mu1[..., j - 1, k - 1] for j, k in up], axis=-1)
    out[..., lay.block_slice("mu2")] = np.stack([mu2[..., j - 1, k - 1] for j, k in up], axis=-1)
    out[..., lay.block_slice("nu")] = np.stack(
        [nu[..., j - 1, k - 1] for j, k in sl], axis=-1) if sl else np.zeros(x.shape[:-2] + (0,))
    out[..., lay.block_slice("delta")] = delta
    return out


# ---------------------------------------------------------------------------
# Direct-summation reference route (oracle; O(P^2) per tableau).

def nu_direct(x, y, rmax=None):
    """Full nu matrix by explicit summation over the (r, s) grid."""
    P = x.shape[-1]
    if rmax is None:
        rmax = P
    r = np.arange(1.0, rmax + 1)
    rr, ss = np.meshgrid(r, r, indexing="ij")
    off = rr != ss
    with np.errstate(divide="ignore", invalid="ignore"):
        cx = np.where(off, (rr / ss) / (rr**2 - ss**2), 0.0)
        cy = np.where(off, 1.0 / (rr**2 - ss**2), 0.0)
    xs, ys = x[..., :rmax], y[..., :rmax]
    return np.einsum("...jr,rs,...ks->...jk", xs, cx, xs) - np.einsum(
        "...jr,rs,...ks->...jk", ys, cy, ys)


def delta_direct(x, y, word, rmax):
    """delta for one word by explicit summation over r + s <= rmax."""
    j, k, l = (i - 1 for i in word)
    P = x.shape[-1]
    if rmax > P:
        raise ValueError(f"rmax={rmax} exceeds available modes P={P}")
    n1 = max(rmax - 1, 0)
    if n1 == 0:
        return np.zeros(x.shape[:-2])
    r = np.arange(1.0, n1 + 1)
    rr, ss = np.meshgrid(r, r, indexing="ij")
    mask = rr + ss <= rmax
    tt = (rr + ss).astype(int)  # t = r + s, valid where mask
    c_a = np.where(mask, 1.0 / (rr * (rr + ss)), 0.0)
    c_b = np.where(mask, 1.0 / (rr * ss), 0.0)
    c_c = np.where(mask, 1.0 / (ss * (rr + ss)), 0.0)

    def grid(arr, a):
        return arr[..., a, :n1]

    idx = np.clip(tt - 1, 0, P - 1)

    def third(arr, a):
        return np.where(mask, arr[..., a, idx], 0.0)

    xj, yj = grid(x, j), grid(y, j)
    xk, yk = grid(x, k), grid(y, k)
    xl, yl = grid(x, l), grid(y, l)
    xlt, ylt = third(x, l), third(y, l)
    xkt, ykt = third(x, k), third(y, k)
    xjt, yjt = third(x, j), third(y, j)

    t1 = -c_a * (
        (xj[..., :, None] * yk[..., None, :] + yj[..., :, None] * xk[..., None, :]) * xlt
        + (-xj[..., :, None] * xk[..., None, :] + yj[..., :, None] * yk[..., None, :]) * ylt
    )
    t2 = c_b * (
        (xj[..., :, None] * yl[..., None, :] + yj[..., :, None] * xl[..., None, :]) * xkt
        + (-xj[..., :, None] * xl[..., None, :] + yj[..., :, None] * yl[..., None, :]) * ykt
    )
    t3 = c_c * (
        (-xk[..., :, None] * yl[..., None, :] + yk[..., :, None] * xl[..., None, :]) * xjt
        + (xk[..., :, None] * xl[..., None, :] + yk[..., :, None] * yl[..., None, :]) * yjt
    )
    return (t1 + t2 + t3).sum(axis=(-2, -1))


def flat_sums_direct(x, y, rmax=None):
    """Flattened vector via the direct route (reference oracle)."""
    q = x.shape[-2]
    lay = layout(q)
    P = x.shape[-1]
    if rmax is None:
        rmax = P
    xs, ys = x[..., :rmax], y[..., :rmax]
    z, u, lam, mu1, mu2 = low_order_sums(xs, ys)
    nu = nu_direct(xs, ys)
    out = np.empty(x.shape[:-2] + (lay.d,))
    out[..., lay.block_slice("z")] = z
    out[..., lay.block_slice("u")] = u
    for i, (j, k) in enumerate(pairs_strict(q)):
        out[..., lay.offsets["lambda"][0] + i] = lam[..., j - 1, k - 1]
        out[..., lay.offsets["nu"][0] + i] = nu[..., j - 1, k - 1]
    for i, (j, k) in enumerate(pairs_upper(q)):
        out[..., lay.offsets["mu1"][0] + i] = mu1[..., j - 1, k - 1]
        out[..., lay.offsets["mu2"][0] + i] = mu2[..., j - 1, k - 1]
    for i, w in enumerate(enumerate_lyndon3(q)):
        out[..., lay.offsets["delta"][0] + i] = delta_direct(x, y, w, rmax)
    return out


def nu_complement(z, mu1, nu_upper_value, j, k):
    """nu_{kj} from the pairing identity nu_jk + nu_kj = z_j z_k - mu1_jk."""
    return z[..., j] * z[..., k] - mu1 - nu_upper_value


def nu_full_from_parts(z, mu1_mat, nu_mat_upper):
    """Full nu matrix from stored strict-upper values via the identity.

    mu1_mat is the full symmetric mu1 matrix; nu_mat_upper holds
    nu_{jk} for j < k (other entries ignored).  Diagonal entries follow
    from 2 nu_jj = z_j^2 - mu1_jj.
    """
    q = z.shape[-1]
    out = np.zeros(z.shape + (q,))
    for j in range(q):
        out[..., j, j] = 0.5 * (z[..., j] ** 2 - mu1_mat[..., j, j])
        for k in range(j + 1, q):
            v = nu_mat_upper[..., j, k]
            out[..., j, k] = v
            out[..., k, j] = z[..., j] * z[..., k] - mu1_mat[..., j, k] - v
    return out
