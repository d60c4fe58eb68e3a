"""Independent reference computations used by the test suite."""
import itertools
import math

import numpy as np


# ---- fusion ---------------------------------------------------------------


def brute_force_fusion(p, q):
    """Fusion table from the degenerate-field selection rules, checked on the full Kac grid.

    Every pair of integer points is tested against the triangle, parity and
    truncation conditions separately, then folded onto canonical labels.
    """
    def canon(r, s):
        return min((r, s), (p - r, q - s))

    def allowed(a, b, c, level):
        return (abs(a - b) < c < a + b and (a + b + c) % 2 == 1
                and a + b + c < 2 * level)

    grid = [(r, s) for r in range(1, p) for s in range(1, q)]
    table = {}
    for x, y in itertools.product(grid, grid):
        for z in grid:
            if allowed(x[0], y[0], z[0], p) and allowed(x[1], y[1], z[1], q):
                table[canon(*x), canon(*y), canon(*z)] = 1
    return table


def verlinde_fusion(model):
    s = model.s_array
    one = model.index[model.identity]
    out = np.einsum("im,jm,km,m->ijk", s, s, s, 1.0 / s[one])
    return out


# ---- quantum 6j ------------------------------------------------------------


def _qnum(n, theta):
    return math.sin(math.pi * n * theta) / math.sin(math.pi * theta)


def _qfact(n, theta):
    out = 1.0
    for k in range(1, n + 1):
        out *= _qnum(k, theta)
    return out


def _delta_sq(a, b, c, theta):
    # a, b, c are twice the spins
    return (_qfact((a + b - c) // 2, theta) * _qfact((a - b + c) // 2, theta)
            * _qfact((-a + b + c) // 2, theta) / _qfact((a + b + c) // 2 + 1, theta))


def racah_sq(j1, j2, j3, j4, j5, j6, theta):
    """Square of the q-deformed Racah-Wigner symbol {j1 j2 j3; j4 j5 j6}, doubled spins."""
    tri = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)]
    pref = 1.0
    for t in tri:
        pref *= _delta_sq(*t, theta)
    lo = max(sum(t) // 2 for t in tri)
    hi = min((j1 + j2 + j4 + j5) // 2, (j2 + j3 + j5 + j6) // 2, (j3 + j1 + j6 + j4) // 2)
    total = 0.0
    for z in range(lo, hi + 1):
        den = 1.0
        for t in tri:
            den *= _qfact(z - sum(t) // 2, theta)
        den *= _qfact((j1 + j2 + j4 + j5) // 2 - z, theta)
        den *= _qfact((j2 + j3 + j5 + j6) // 2 - z, theta)
        den *= _qfact((j3 + j1 + j6 + j4) // 2 - z, theta)
        total += (-1) ** z * _qfact(z + 1, theta) / den
    return pref * total * total


def _su2_ok(a, b, c, level):
    return abs(a - b) < c < a + b and (a + b + c) % 2 == 1 and a + b + c < 2 * level


def recoupling_invariant(p, q, key):
    """F_{pq}[j k; i l] * (F^-1)_{qp}[j k; i l] from two su(2) factors.

    This product is unchanged by any vertex normalisation, so it can be
    compared with the unitary recoupling coefficients.
    """
    labels = dict(zip("PQJKIL", key))
    options = {n: [(a.r, a.s), (p - a.r, q - a.s)] for n, a in labels.items()}
    for choice in itertools.product(*(options[n] for n in "PQJKIL")):
        P, Q, J, K, I, L = choice
        verts = [(I, J, P), (P, K, L), (J, K, Q), (I, Q, L)]
        if all(_su2_ok(x[0], y[0], z[0], p) and _su2_ok(x[1], y[1], z[1], q) for x, y, z in verts):
            break
    else:
        raise ValueError(f"no consistent representatives for {key}")
    out = 1.0
    for comp, theta in ((0, q / p), (1, p / q)):
        i, j, k, l, pp, qq = (x[comp] - 1 for x in (I, J, K, L, P, Q))
        out *= _qnum(pp + 1, theta) * _qnum(qq + 1, theta) * racah_sq(i, j, pp, k, l, qq, theta)
    return out
