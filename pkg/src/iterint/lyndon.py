"""Length-3 Lyndon words over {1..q} and the block layout of the
coefficient vector (z, u, lambda, mu1, mu2, nu, delta).

A word is Lyndon when it is strictly smaller than all of its proper
right factors; for triples this reduces to j < min(k, l) or j = k < l.
There are (q^3 - q)/3 such triples, and together with the q-vectors z, u
and the triangular blocks they index a vector of total dimension
d = 2q^2 + 2q + (q^3 - q)/3.
"""

from dataclasses import dataclass


def _check_range(value, q, name):
    if not 1 <= value <= q:
        raise ValueError(f"{name}={value} out of range 1..{q}")


def is_lyndon3(j, k, l, q=None):
    """True iff (j, k, l) is a Lyndon word of length 3.

    If q is given, components are validated against 1..q.
    """
    if q is not None:
        _check_range(j, q, "j")
        _check_range(k, q, "k")
        _check_range(l, q, "l")
    elif min(j, k, l) < 1:
        raise ValueError(f"word components must be positive, got {(j, k, l)}")
    return j < min(k, l) or (j == k and k < l)


def enumerate_lyndon3(q):
    """All length-3 Lyndon words over {1..q}, lexicographically sorted."""
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    return [
        (j, k, l)
        for j in range(1, q + 1)
        for k in range(1, q + 1)
        for l in range(1, q + 1)
        if j < min(k, l) or (j == k and k < l)
    ]


def pairs_strict(q):
    """Ordered pairs (j, k) with j < k, lexicographic (1-based)."""
    return [(j, k) for j in range(1, q + 1) for k in range(j + 1, q + 1)]


def pairs_upper(q):
    """Ordered pairs (j, k) with j <= k, lexicographic (1-based)."""
    return [(j, k) for j in range(1, q + 1) for k in range(j, q + 1)]


@dataclass(frozen=True)
class IndexLayout:
    """Positions of the coefficient blocks inside the flattened vector.

    Block order is z, u, lambda (strict upper triangle), mu1 and mu2
    (upper triangles including the diagonal), nu (strict upper
    triangle), delta (Lyndon words in lexicographic order).
    """

    q: int
    d: int
    offsets: dict

    def block_slice(self, name):
        start, size = self.offsets[name]
        return slice(start, start + size)

    def block_size(self, name):
        return self.offsets[name][1]


BLOCK_NAMES = ("z", "u", "lambda", "mu1", "mu2", "nu", "delta")


def layout(q):
    """IndexLayout for dimension q; d = 2q^2 + 2q + (q^3 - q)/3."""
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    tri_strict = q * (q - 1) // 2
    tri_upper = q * (q + 1) // 2
    n_lyndon = (q**3 - q) // 3
    sizes = {
        "z": q,
        "u": q,
        "lambda": tri_strict,
        "mu1": tri_upper,
        "mu2": tri_upper,
        "nu": tri_strict,
        "delta": n_lyndon,
    }
    offsets = {}
    pos = 0
    for name in BLOCK_NAMES:
        offsets[name] = (pos, sizes[name])
        pos += sizes[name]
    d = 2 * q * q + 2 * q + n_lyndon
    assert pos == d
    return IndexLayout(q=q, d=d, offsets=offsets)
