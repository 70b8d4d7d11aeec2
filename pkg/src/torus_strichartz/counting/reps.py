"""Brute-force representation counts by sums of three squares.

These are the oracles for the closed-form count in ``pall``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

THREE = (1, 1, 1)
THREE_PLUS_FIVE = (1, 1, 1, 5)


def sum_of_three_squares(n: int) -> np.ndarray:
    """All integer triples with ``x^2 + y^2 + z^2 = n`` as an ``(r3(n), 3)`` array."""
    if n < 0:
        return np.zeros((0, 3), dtype=np.int64)
    out = []
    rx = math.isqrt(n)
    for x in range(-rx, rx + 1):
        rem = n - x * x
        ry = math.isqrt(rem)
        for y in range(-ry, ry + 1):
            z2 = rem - y * y
            z = math.isqrt(z2)
            if z * z == z2:
                out.append((x, y, z))
                if z:
                    out.append((x, y, -z))
    return np.array(out, dtype=np.int64).reshape(-1, 3)


def r3(n: int) -> int:
    return len(sum_of_three_squares(n))


def representations(n: int, weights=THREE) -> np.ndarray:
    """Integer vectors ``v`` with ``sum w_i v_i^2 = n`` for weights (1,1,1) or (1,1,1,5)."""
    weights = tuple(weights)
    if weights == THREE:
        return sum_of_three_squares(n)
    if weights == THREE_PLUS_FIVE:
        rows = []
        rw = math.isqrt(max(n, 0) // 5)
        for w in range(-rw, rw + 1):
            base = sum_of_three_squares(n - 5 * w * w)
            if len(base):
                rows.append(np.column_stack([base, np.full(len(base), w)]))
        if not rows:
            return np.zeros((0, 4), dtype=np.int64)
        return np.concatenate(rows)
    raise ValueError(f"unsupported weights {weights}")


def brute_pair_count(Ap: int, Bp: int, Cp: int, weights=THREE) -> int:
    """Pairs ``(k, l)`` with ``|k|^2 = Ap``, ``|l|^2 = Bp``, ``<k, l> = Cp`` (weighted)."""
    if Ap < 0 or Bp < 0:
        return 0
    K = representations(Ap, weights)
    L = representations(Bp, weights)
    if not len(K) or not len(L):
        return 0
    dots = (K * np.asarray(weights)) @ L.T
    return int(np.count_nonzero(dots == Cp))


def brute_pair_table(M: int, chunk: int = 1024) -> np.ndarray:
    """Counts for every ``0 <= A, B <= M`` and ``|C| <= M`` at once.

    Entry ``[A, B, C + M]`` equals ``brute_pair_count(A, B, C)``; pairs with
    ``|C| > M`` cannot occur when ``AB - C^2 >= 0`` is required, and are dropped.
    """
    r = math.isqrt(M)
    g = np.arange(-r, r + 1)
    V = np.stack(np.meshgrid(g, g, g, indexing="ij"), axis=-1).reshape(-1, 3)
    norms = (V * V).sum(axis=1)
    keep = norms <= M
    V, norms = V[keep], norms[keep]
    W = 2 * M + 1
    size = (M + 1) * (M + 1) * W
    table = np.zeros(size, dtype=np.int64)
    for s in range(0, len(V), chunk):
        dots = V[s : s + chunk] @ V.T
        ok = np.abs(dots) <= M
        key = (norms[s : s + chunk, None] * (M + 1) + norms[None, :]) * W + dots + M
        table += np.bincount(key[ok], minlength=size)
    return table.reshape(M + 1, M + 1, W)


class DegenerateSplit(NamedTuple):
    is_rank_one: bool
    params: tuple[int, int, int] | None  # (m, p, q)


def degenerate_split(Ap: int, Bp: int, Cp: int) -> DegenerateSplit:
    """Collinear solutions when ``Ap Bp = Cp^2``: ``k = p z``, ``l = sign(Cp) q z``, ``|z|^2 = m``.

    ``p, q >= 0`` are coprime; the pair count is then ``r3(m)``. Data that is
    rank one over the rationals but not realisable over the integers returns
    ``(True, None)``, meaning zero solutions.
    """
    if Ap * Bp != Cp * Cp:
        raise ValueError("degenerate_split needs Ap*Bp == Cp^2")
    if Ap < 0 or Bp < 0 or (Ap == 0 and Bp == 0):
        raise ValueError("need Ap, Bp >= 0, not both zero")
    m = math.gcd(Ap, Bp)
    p = math.isqrt(Ap // m)
    q = math.isqrt(Bp // m)
    if p * p * m != Ap or q * q * m != Bp:
        return DegenerateSplit(True, None)
    return DegenerateSplit(True, (m, p, q))


def degenerate_count(Ap: int, Bp: int, Cp: int) -> int:
    split = degenerate_split(Ap, Bp, Cp)
    if split.params is None:
        return 0
    return r3(split.params[0])
