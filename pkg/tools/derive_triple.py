"""Exact derivation of the iterated-integral kernels of the truncated path.

Functions on [0,1] are dicts {(m, tpow): sympy coeff} meaning
sum coeff * t^tpow * exp(2*pi*I*m*t).  All arithmetic exact.
"""
import sympy as sp
from collections import defaultdict

PI = sp.pi
I = sp.I
HALF = sp.Rational(1, 2)


def mul(f, g):
    out = defaultdict(lambda: sp.Integer(0))
    for (m1, p1), c1 in f.items():
        for (m2, p2), c2 in g.items():
            out[(m1 + m2, p1 + p2)] += c1 * c2
    return {k: sp.simplify(v) for k, v in out.items() if v != 0}


def antider(f):
    """F with F' = f and F(0) = 0."""
    out = defaultdict(lambda: sp.Integer(0))
    for (m, p), c in f.items():
        if m == 0:
            out[(0, p + 1)] += c / (p + 1)
        else:
            w = 2 * PI * I * m
            fact = sp.Integer(1)
            for i in range(p + 1):
                # iterate integration by parts
                out[(m, p - i)] += c * fact * (-1) ** i / w ** (i + 1) * sp.ff(p, i) / sp.factorial(i) * sp.factorial(i)
            # simpler: recompute cleanly below
    # The loop above is wrong-prone; redo directly
    out = defaultdict(lambda: sp.Integer(0))
    for (m, p), c in f.items():
        if m == 0:
            out[(0, p + 1)] += c / (p + 1)
        else:
            w = 2 * PI * I * m
            coef = c
            for i in range(p + 1):
                # \int t^p e^{wt} = sum_{i} (-1)^i p!/(p-i)! t^{p-i} e^{wt} / w^{i+1}
                term = c * (-1) ** i * sp.factorial(p) / sp.factorial(p - i) / w ** (i + 1)
                out[(m, p - i)] += term
    # fix F(0) = 0: subtract constant sum_{(m,0)} coeff
    const = sp.Integer(0)
    for (m, p), cc in list(out.items()):
        if p == 0:
            const += cc
    out[(0, 0)] -= const
    return {k: sp.nsimplify(sp.simplify(v)) for k, v in out.items() if sp.simplify(v) != 0}


def integrate01(f):
    F = antider(f)
    # F(1): exp(2 pi i m) = 1
    return sp.simplify(sum(c for (m, p), c in F.items()))


def basis(kind, r):
    """(path, derivative) dicts for one unscaled basis element."""
    if kind == "T":
        return {(0, 1): sp.Integer(1)}, {(0, 0): sp.Integer(1)}
    if kind == "C":   # (cos(2 pi r t) - 1) / (sqrt2 pi r)
        amp = 1 / (sp.sqrt(2) * PI * r)
        path = {(r, 0): HALF * amp, (-r, 0): HALF * amp, (0, 0): -amp}
        der = {(r, 0): I * PI * r * amp, (-r, 0): -I * PI * r * amp}
        return path, der
    if kind == "S":   # sin(2 pi r t) / (sqrt2 pi r)
        amp = 1 / (sp.sqrt(2) * PI * r)
        path = {(r, 0): -I * HALF * amp, (-r, 0): I * HALF * amp}
        der = {(r, 0): PI * r * amp, (-r, 0): PI * r * amp}
        return path, der
    raise ValueError(kind)


def kernel(spec_j, spec_k, spec_l):
    """I3 of basis paths: innermost spec_j, middle spec_k, outer spec_l."""
    pj, dj = basis(*spec_j)
    pk, dk = basis(*spec_k)
    pl, dl = basis(*spec_l)
    i1 = antider(dj)                    # int_0^u dW_j = W_j(u)
    i2 = antider(mul(i1, dk))
    return integrate01(mul(i2, dl))


if __name__ == "__main__":
    import sys
    # sanity: K[T,T,T] = 1/6
    print("TTT:", kernel(("T", 0), ("T", 0), ("T", 0)))
