"""Independent slow reference implementations used only by the tests."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import mpmath as mp
import numpy as np


def bump_mp(x, dps=40):
    """The cutoff in extended precision from its closed form."""
    with mp.workdps(dps):
        a = abs(mp.mpf(x))
        if a <= 0.5:
            return mp.mpf(1)
        if a >= 1:
            return mp.mpf(0)
        up = mp.exp(-1 / (1 - a))
        down = mp.exp(-1 / (a - mp.mpf(1) / 2))
        return up / (up + down)


def kernel_mp(alpha, beta, weights, N, t, x, dps=40):
    """Direct sum of the kernel in extended precision for the given weight vector."""
    with mp.workdps(dps):
        total = mp.mpc(0)
        a, b, t = mp.mpf(alpha), mp.mpf(beta), mp.mpf(t)
        x1, x2 = mp.mpf(x[0]), mp.mpf(x[1])
        for i, n1 in enumerate(range(-(N - 1), N)):
            for j, n2 in enumerate(range(-(N - 1), N)):
                q = n1 * n1 + 2 * b * n1 * n2 + a * n2 * n2
                w = mp.mpf(weights[i]) * mp.mpf(weights[j])
                total += w * mp.expjpi(2 * (x1 * n1 + x2 * n2 + t * q))
        return complex(total)


def combo_brute(alpha, beta, R, tau, delta):
    g = np.arange(-R, R + 1, dtype=np.float64)
    A, B, C = np.meshgrid(g, g, g, indexing="ij")
    return int(np.count_nonzero(np.abs(A + B * alpha + C * beta - tau) < delta))


def pair_count_loops(A, B, C):
    """Pairs of integer 3-vectors with given norms and dot product, by plain loops."""
    ra, rb = math.isqrt(A), math.isqrt(B)
    K = [v for v in itertools.product(range(-ra, ra + 1), repeat=3) if sum(c * c for c in v) == A]
    L = [v for v in itertools.product(range(-rb, rb + 1), repeat=3) if sum(c * c for c in v) == B]
    return sum(1 for k in K for l in L if sum(p * q for p, q in zip(k, l)) == C)


def omega_loops(q, N, signs, target):
    rng = range(-(N - 1), N)
    pts = [(k, l) for k in rng for l in rng]
    count = 0
    for tup in itertools.product(pts, repeat=q):
        s = (
            sum(e * k for e, (k, _) in zip(signs, tup)),
            sum(e * l for e, (_, l) in zip(signs, tup)),
            sum(e * k * k for e, (k, _) in zip(signs, tup)),
            sum(e * l * l for e, (_, l) in zip(signs, tup)),
            sum(e * k * l for e, (k, l) in zip(signs, tup)),
        )
        count += s == tuple(target)
    return count


def _F(alpha, beta, t, N, v):
    n1, n2, m1, m2 = v
    L1 = n1 + beta * n2
    L2 = beta * n1 + alpha * n2
    return max(Fraction(abs(n1), N), Fraction(abs(n2), N), N * abs(t * L1 - m1), N * abs(t * L2 - m2))


def _canon(v):
    for c in v:
        if c:
            return v if c > 0 else tuple(-x for x in v)
    return v


def _rank(v):
    return sum(abs(c) for c in v), tuple(-c for c in v)


def minima_exhaustive(alpha, beta, t, N, n_box=None, m_slack=2):
    """Successive minima over ``|n_i| <= 8N`` and every ``m`` with ``|m_i - t L_i(n)| <= 2``.

    Float values only shortlist candidates; the ranking is in exact rationals.
    """
    n_box = 8 * N if n_box is None else n_box
    a, b, tt = Fraction(alpha), Fraction(beta), Fraction(t)
    g = np.arange(-n_box, n_box + 1)
    n1, n2 = (x.ravel() for x in np.meshgrid(g, g, indexing="ij"))
    tl1 = t * (n1 + beta * n2)
    tl2 = t * (beta * n1 + alpha * n2)
    vecs, fs = [], []
    for d1 in range(-m_slack - 1, m_slack + 2):
        m1 = np.floor(tl1).astype(np.int64) + d1
        ok1 = np.abs(m1 - tl1) <= m_slack
        for d2 in range(-m_slack - 1, m_slack + 2):
            m2 = np.floor(tl2).astype(np.int64) + d2
            ok = ok1 & (np.abs(m2 - tl2) <= m_slack)
            F = np.maximum.reduce([np.abs(n1) / N, np.abs(n2) / N, N * np.abs(tl1 - m1), N * np.abs(tl2 - m2)])
            ok &= (n1 != 0) | (n2 != 0) | (m1 != 0) | (m2 != 0)
            vecs.append(np.stack([n1[ok], n2[ok], m1[ok], m2[ok]], axis=1))
            fs.append(F[ok])
    vecs, fs = np.concatenate(vecs), np.concatenate(fs)
    order = np.argsort(fs, kind="stable")
    vecs, fs = vecs[order], fs[order]

    def best(mask):
        f0 = fs[mask][0]
        pool = {_canon(tuple(int(c) for c in v)) for v in vecs[mask & (fs <= f0 + 1e-7)]}
        return min(pool, key=lambda v: (_F(a, b, tt, N, v), _rank(v)))

    v1 = best(np.ones(len(vecs), dtype=bool))
    u = np.array(v1)
    minors = [u[i] * vecs[:, j] - u[j] * vecs[:, i] for i in range(4) for j in range(i + 1, 4)]
    indep = np.any(np.stack(minors) != 0, axis=0)
    v2 = best(indep)
    return _F(a, b, tt, N, v1), _F(a, b, tt, N, v2), v1, v2
