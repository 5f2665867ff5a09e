"""Level-3 signature sets: assembly from coefficient sums, quadrature
oracle, Ito/Stratonovich conversion, interval scaling and Chen
concatenation.

An IntegralSet holds, for one interval of length h, the increment dw,
the matrix i2[j, k] = int (W^j - W^j_a) dW^k, the tensor
i3[j, k, l] = int int int dW^j dW^k dW^l (innermost index first) and
the mixed time integral iw0[j] = int_a^b (W^j_t - W^j_a) dt.  iw0 rides
along because the level-3 Ito/Stratonovich conversion and the
order-1.5 Taylor scheme need it; it costs one extra vector.
"""

import csv
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from . import sums
from .tableau import bridge_eval, partial_sums, wiener_path_eval

SQRT2 = np.sqrt(2.0)
PI = np.pi

STRATONOVICH = "stratonovich"
ITO = "ito"


@dataclass(frozen=True)
class IntegralSet:
    h: float
    dw: np.ndarray          # (..., q)
    i2: np.ndarray          # (..., q, q)
    i3: np.ndarray          # (..., q, q, q)
    convention: str
    iw0: np.ndarray = None  # (..., q), int (W - W_a) dt

    @property
    def q(self):
        return self.dw.shape[-1]


def double_integral(w1, ps):
    """Stratonovich I2[j, k] from the increment and coefficient sums."""
    return double_integral_parts(w1, ps.z, ps.lambda_matrix())


def double_integral_parts(w1, z, lam):
    """I2 = W1^j W1^k / 2 + (W1^j z_k - W1^k z_j)/(sqrt(2) pi) + lam/(2 pi)."""
    wz = np.einsum("...j,...k->...jk", w1, z)
    return (0.5 * np.einsum("...j,...k->...jk", w1, w1)
            + (wz - np.swapaxes(wz, -1, -2)) / (SQRT2 * PI)
            + lam / (2.0 * PI))


def triple_integral(w1, ps, delta_full):
    """Stratonovich I3 for every (j, k, l); delta_full holds the
    (..., q, q, q) tensor of delta values over all index triples."""
    return triple_integral_parts(w1, ps.z, ps.u, ps.lambda_matrix(),
                                 ps.mu1_matrix() + ps.mu2_matrix(),
                                 ps.nu_matrix(), delta_full)


def triple_integral_parts(w1, z, u, lam, mu, nu, delta):
    """Assemble I3 from full coefficient matrices (mu = mu1 + mu2)."""
    c1 = 1.0 / (2.0 * SQRT2 * PI)
    c2 = 1.0 / (SQRT2 * PI**2)
    c3 = 1.0 / (2.0 * PI**2)
    c4 = 1.0 / (2.0 * PI)
    c5 = 1.0 / (4.0 * PI**2)
    c6 = 1.0 / (2.0 * SQRT2 * PI**2)
    c7 = 1.0 / (4.0 * SQRT2 * PI)

    w = w1
    zu = z - u / PI

    out = np.einsum("...j,...k,...l->...jkl", w, w, w) / 6.0
    out -= c1 * np.einsum("...j,...k,...l->...jkl", w, w, zu)
    out -= c1 * np.einsum("...j,...k,...l->...jkl", zu, w, w)
    out -= c2 * np.einsum("...j,...k,...l->...jkl", w, u, w)
    out -= c3 * (np.einsum("...j,...k,...l->...jkl", z, w, z)
                 - np.einsum("...j,...k,...l->...jkl", z, z, w))
    # W1^l (lam_jk / 2 + nu_kj / pi)
    out += c4 * (0.5 * lam[..., :, :, None] + np.swapaxes(nu, -1, -2)[..., :, :, None] / PI) \
        * w[..., None, None, :]
    # W1^j (lam_kl / 2 - nu_kl / pi)
    out += c4 * (0.5 * lam[..., None, :, :] - nu[..., None, :, :] / PI) * w[..., :, None, None]
    out += c5 * (mu[..., None, :, :] * w[..., :, None, None]
                 - mu[..., :, None, :] * w[..., None, :, None])
    out -= c6 * z[..., :, None, None] * lam[..., None, :, :]
    out += c7 * delta
    return out


def mixed_time_integral(w1, z):
    """iw0[j] = int_0^1 (W^j_t) dt = W1^j / 2 - z_j / (sqrt(2) pi)."""
    return 0.5 * w1 - z / (SQRT2 * PI)


def integral_set(t):
    """Stratonovich IntegralSet of a tableau's truncated path on [0, 1]."""
    ps = partial_sums(t)
    words = [(j, k, l) for j in range(1, t.q + 1)
             for k in range(1, t.q + 1) for l in range(1, t.q + 1)]
    delta = sums.delta_fast(t.x, t.y, words).reshape(t.q, t.q, t.q)
    return IntegralSet(
        h=1.0,
        dw=t.w1.copy(),
        i2=double_integral(t.w1, ps),
        i3=triple_integral(t.w1, ps, delta),
        convention=STRATONOVICH,
        iw0=mixed_time_integral(t.w1, ps.z),
    )


def batch_integral_sets(w1, x, y):
    """Vectorised IntegralSet over a batch: arrays (n, q), (n, q, P)."""
    q = x.shape[-2]
    z, u, lam, mu1, mu2 = sums.low_order_sums(x, y)
    bank = sums.ConvBank(x, y)
    nu = sums.nu_fast(x, y, bank=bank)
    words = [(j, k, l) for j in range(1, q + 1)
             for k in range(1, q + 1) for l in range(1, q + 1)]
    delta = sums.delta_fast(x, y, words, bank=bank).reshape(x.shape[:-2] + (q, q, q))
    return IntegralSet(
        h=1.0,
        dw=np.asarray(w1).copy(),
        i2=double_integral_parts(w1, z, lam),
        i3=triple_integral_parts(w1, z, u, lam, mu1 + mu2, nu, delta),
        convention=STRATONOVICH,
        iw0=mixed_time_integral(w1, z),
    )


def quadrature_oracle(t, nsteps):
    """IntegralSet of the truncated path by composite Simpson quadrature.

    The truncated path is smooth, so its Stratonovich integrals are
    plain Riemann integrals; this pins the sign conventions of the
    closed-form assembly independently of any series manipulation.
    """
    if nsteps < 4 or nsteps % 2:
        raise ValueError("nsteps must be even and >= 4")
    grid = np.linspace(0.0, 1.0, nsteps + 1)
    w = wiener_path_eval(t, grid)              # (nsteps+1, q)
    r = np.arange(1.0, t.p + 1)
    ang = 2.0 * PI * np.multiply.outer(grid, r)
    dbridge = SQRT2 * (np.sin(ang) @ (-t.x.T) + np.cos(ang) @ t.y.T)
    dwdt = t.w1[None, :] + dbridge             # path derivative, (nsteps+1, q)

    q = t.q
    i2 = np.empty((q, q))
    i2_path = np.empty((nsteps + 1, q, q))
    for j in range(q):
        for k in range(q):
            f = w[:, j] * dwdt[:, k]
            i2[j, k] = simpson(f, x=grid)
            i2_path[:, j, k] = cumulative_simpson(f, x=grid, initial=0.0)
    i3 = np.empty((q, q, q))
    for j in range(q):
        for k in range(q):
            for l in range(q):
                i3[j, k, l] = simpson(i2_path[:, j, k] * dwdt[:, l], x=grid)
    iw0 = np.array([simpson(w[:, j], x=grid) for j in range(q)])
    return IntegralSet(h=1.0, dw=w[-1].copy(), i2=i2, i3=i3,
                       convention=STRATONOVICH, iw0=iw0)


def scale_to_interval(s, h):
    """Brownian rescaling of a set on [0, h0] to [0, h]:
    dw by (h/h0)^(1/2), i2 by h/h0, i3 and iw0 by (h/h0)^(3/2)."""
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    ratio = h / s.h
    root = np.sqrt(ratio)
    return IntegralSet(
        h=h, dw=s.dw * root, i2=s.i2 * ratio, i3=s.i3 * ratio * root,
        convention=s.convention,
        iw0=None if s.iw0 is None else s.iw0 * ratio * root,
    )


def stratonovich_to_ito(s):
    """Exact conversion; needs iw0 for the level-3 diagonal corrections.

    Level 2: I_jk = J_jk - h delta_jk / 2.
    Level 3: I_jkl = J_jkl - delta_jk I_(0,l) / 2 - delta_kl I_(j,0) / 2,
    with I_(j,0) = iw0_j and I_(0,l) = h dw_l - iw0_l.
    """
    if s.convention != STRATONOVICH:
        raise ValueError(f"expected a stratonovich set, got {s.convention}")
    if s.iw0 is None:
        raise ValueError("level-3 conversion requires the iw0 field")
    q = s.q
    eye = np.eye(q)
    i2 = s.i2 - 0.5 * s.h * eye
    i0l = s.h * s.dw - s.iw0
    ij0 = s.iw0
    corr = (0.5 * np.einsum("jk,...l->...jkl", eye, i0l)
            + 0.5 * np.einsum("kl,...j->...jkl", eye, ij0))
    return replace(s, i2=i2, i3=s.i3 - corr, convention=ITO)


def ito_to_stratonovich(s):
    if s.convention != ITO:
        raise ValueError(f"expected an ito set, got {s.convention}")
    if s.iw0 is None:
        raise ValueError("level-3 conversion requires the iw0 field")
    q = s.q
    eye = np.eye(q)
    i2 = s.i2 + 0.5 * s.h * eye
    i0l = s.h * s.dw - s.iw0
    corr = (0.5 * np.einsum("jk,...l->...jkl", eye, i0l)
            + 0.5 * np.einsum("kl,...j->...jkl", eye, s.iw0))
    return replace(s, i2=i2, i3=s.i3 + corr, convention=STRATONOVICH)


def chen_concat(a, b):
    """Concatenation of adjacent Stratonovich signatures (Chen relation)."""
    if a.q != b.q:
        raise ValueError(f"dimension mismatch q={a.q} vs {b.q}")
    if a.convention != STRATONOVICH or b.convention != STRATONOVICH:
        raise ValueError("chen_concat requires stratonovich sets")
    dw = a.dw + b.dw
    i2 = a.i2 + b.i2 + np.einsum("...j,...k->...jk", a.dw, b.dw)
    i3 = (a.i3 + b.i3
          + np.einsum("...jk,...l->...jkl", a.i2, b.dw)
          + np.einsum("...j,...kl->...jkl", a.dw, b.i2))
    iw0 = None
    if a.iw0 is not None and b.iw0 is not None:
        iw0 = a.iw0 + b.h * a.dw + b.iw0
    return IntegralSet(h=a.h + b.h, dw=dw, i2=i2, i3=i3,
                       convention=STRATONOVICH, iw0=iw0)


def zero_set(q, convention=STRATONOVICH):
    """Neutral element for chen_concat."""
    return IntegralSet(h=0.0, dw=np.zeros(q), i2=np.zeros((q, q)),
                       i3=np.zeros((q, q, q)), convention=convention,
                       iw0=np.zeros(q))


def emit_integral_csv(fh, sets, path_ids=None):
    """Write IntegralSets as rows (path_id, h, entity, indices, value)."""
    writer = csv.writer(fh)
    writer.writerow(["path_id", "h", "entity", "j", "k", "l", "value"])
    for idx, s in enumerate(sets):
        pid = idx if path_ids is None else path_ids[idx]
        q = s.q
        for j in range(q):
            writer.writerow([pid, repr(s.h), "dw", j + 1, "", "", repr(float(s.dw[j]))])
        for j in range(q):
            for k in range(q):
                writer.writerow([pid, repr(s.h), "i2", j + 1, k + 1, "",
                                 repr(float(s.i2[j, k]))])
        for j in range(q):
            for k in range(q):
                for l in range(q):
                    writer.writerow([pid, repr(s.h), "i3", j + 1, k + 1, l + 1,
                                     repr(float(s.i3[j, k, l]))])
