"""Counting tuples of lattice points with prescribed signed moments.

A query asks for the number of ``q``-tuples of points ``(k_i, l_i)`` with
``|k_i|, |l_i| < N`` and::

    sum s_i k_i = a,  sum s_i l_i = b,
    sum s_i k_i^2 = A,  sum s_i l_i^2 = B,  sum s_i k_i l_i = C

for a sign pattern ``s``. The fast count splits the indices into two halves
and matches the five moment sums of one half against the other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "OmegaQuery",
    "alternating_signs",
    "omega_count",
    "omega_counts",
    "omega_naive",
    "omega_naive_histogram",
    "omega_naive_counts",
    "kookaburra_map",
]

_INT63 = (1 << 63) - 1
MAX_Q = 6


def alternating_signs(q: int) -> tuple[int, ...]:
    """``(-1)^i`` for ``i = 1..q``."""
    return tuple(-1 if i % 2 else 1 for i in range(1, q + 1))


@dataclass(frozen=True)
class OmegaQuery:
    q: int
    N: int
    signs: tuple[int, ...]
    a: int
    b: int
    A: int
    B: int
    C: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if len(self.signs) != self.q or any(s not in (1, -1) for s in self.signs):
            raise ValueError(f"signs must be {self.q} entries of +-1")

    @property
    def target(self) -> tuple[int, int, int, int, int]:
        return (self.a, self.b, self.A, self.B, self.C)


def _points(N: int) -> tuple[np.ndarray, np.ndarray]:
    g = np.arange(-(N - 1), N, dtype=np.int64)
    k, l = np.meshgrid(g, g, indexing="ij")
    return k.ravel(), l.ravel()


def _moments(N: int, signs) -> np.ndarray:
    """Signed moment sums of every tuple over a block of indices, shape ``(P^len, 5)``."""
    k, l = _points(N)
    single = np.stack([k, l, k * k, l * l, k * l], axis=1)
    acc = np.zeros((1, 5), dtype=np.int64)
    for s in signs:
        acc = (acc[:, None, :] + s * single[None, :, :]).reshape(-1, 5)
    return acc


class _Codec:
    """Mixed-radix encoding of five-moment keys into one int64."""

    def __init__(self, lo: np.ndarray, hi: np.ndarray):
        self.lo = lo
        self.width = hi - lo + 1
        total = 1
        for w in self.width.tolist():
            total *= w
        if total > _INT63:
            raise OverflowError("five-moment keys do not fit in 63 bits")

    def encode(self, keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Codes and a mask of keys lying inside the box."""
        off = keys - self.lo
        ok = np.all((off >= 0) & (off < self.width), axis=1)
        code = np.zeros(len(keys), dtype=np.int64)
        for j in range(5):
            code = code * self.width[j] + off[:, j]
        return code, ok

    def decode(self, code: np.ndarray) -> np.ndarray:
        out = np.empty((len(code), 5), dtype=np.int64)
        for j in range(4, -1, -1):
            code, out[:, j] = np.divmod(code, self.width[j])
        return out + self.lo


def _half_bounds(N: int, n_plus: int, n_minus: int):
    m = N - 1
    lin = (n_plus + n_minus) * m
    lo = np.array([-lin, -lin, -n_minus * m * m, -n_minus * m * m, -(n_plus + n_minus) * m * m])
    hi = np.array([lin, lin, n_plus * m * m, n_plus * m * m, (n_plus + n_minus) * m * m])
    return lo, hi


def omega_counts(q: int, N: int, signs, targets, chunk: int = 1 << 22) -> np.ndarray:
    """Meet-in-the-middle counts for many five-moment targets at once.

    The indices split at ``ceil(q/2)``; moment sums of the larger half are
    tabulated and the smaller half is subtracted from each target.
    """
    signs = tuple(signs)
    if q > MAX_Q:
        raise ValueError(f"q <= {MAX_Q} required")
    if len(signs) != q:
        raise ValueError("one sign per index")
    targets = np.asarray(targets, dtype=np.int64).reshape(-1, 5)
    split = (q + 1) // 2
    table_signs, probe_signs = signs[:split], signs[split:]
    table = _moments(N, table_signs)
    probe = _moments(N, probe_signs)
    codec = _Codec(*_half_bounds(N, table_signs.count(1), table_signs.count(-1)))
    codes, _ = codec.encode(table)
    table_codes, table_counts = np.unique(codes, return_counts=True)
    out = np.zeros(len(targets), dtype=np.int64)
    per = max(1, chunk // len(probe))
    for s in range(0, len(targets), per):
        need = targets[s : s + per, None, :] - probe[None, :, :]
        shape = need.shape[:2]
        code, ok = codec.encode(need.reshape(-1, 5))
        pos = np.minimum(np.searchsorted(table_codes, code), len(table_codes) - 1)
        hit = ok & (table_codes[pos] == code)
        out[s : s + per] = np.where(hit, table_counts[pos], 0).reshape(shape).sum(axis=1)
    return out


def omega_count(query: OmegaQuery) -> int:
    """Exact count by meet-in-the-middle on the five moment sums."""
    return int(omega_counts(query.q, query.N, query.signs, [query.target])[0])


def omega_naive(query: OmegaQuery) -> int:
    """Direct loop over all tuples; only for tiny ``q`` and ``N``."""
    rng = range(-(query.N - 1), query.N)
    pts = [(k, l) for k in rng for l in rng]
    count = 0
    for tup in itertools.product(pts, repeat=query.q):
        sums = [0, 0, 0, 0, 0]
        for s, (k, l) in zip(query.signs, tup):
            sums[0] += s * k
            sums[1] += s * l
            sums[2] += s * k * k
            sums[3] += s * l * l
            sums[4] += s * k * l
        count += tuple(sums) == query.target
    return count


def _full_enumeration(q: int, N: int, signs):
    """Yield ``(codec, codes)`` for all tuples, one block per value of the first point."""
    signs = tuple(signs)
    k, l = _points(N)
    single = np.stack([k, l, k * k, l * l, k * l], axis=1)
    rest = _moments(N, signs[1:])
    codec = _Codec(*_half_bounds(N, signs.count(1), signs.count(-1)))
    for row in single:
        yield codec, codec.encode(signs[0] * row + rest)[0]


def omega_naive_histogram(q: int, N: int, signs) -> dict[tuple[int, ...], int]:
    """Counts of every attained target by full enumeration (small ``q`` and ``N``)."""
    tally: dict[int, int] = {}
    codec = None
    for codec, code in _full_enumeration(q, N, signs):
        for c, n in zip(*np.unique(code, return_counts=True)):
            tally[int(c)] = tally.get(int(c), 0) + int(n)
    keys = codec.decode(np.array(list(tally), dtype=np.int64))
    return {tuple(key): n for key, n in zip(keys.tolist(), tally.values())}


def omega_naive_counts(q: int, N: int, signs, targets) -> np.ndarray:
    """Counts for the given targets by testing every tuple."""
    targets = np.asarray(targets, dtype=np.int64).reshape(-1, 5)
    uniq, back = np.unique(targets, axis=0, return_inverse=True)
    found = np.zeros(len(uniq), dtype=np.int64)
    wanted = None
    for codec, code in _full_enumeration(q, N, signs):
        if wanted is None:
            wanted, ok = codec.encode(uniq)
            wanted = np.where(ok, wanted, -1)  # out-of-box targets never match
        pos = np.minimum(np.searchsorted(wanted, code), len(wanted) - 1)
        hit = wanted[pos] == code
        found += np.bincount(pos[hit], minlength=len(wanted))
    return found[back.ravel()]


def kookaburra_map(ks, ls, a: int, b: int):
    """Change of variables sending a four-point solution to a pair of 3-vectors.

    With ``k'_i = 4 k_i - a`` the new vector is ``k'' = (k'_2 + k'_3,
    k'_1 + k'_3, k'_1 + k'_2)``, likewise for ``l``; returns
    ``(k'', l'', A', B', C')`` with ``A' = 16 sum k_i^2 - 4 a^2`` etc.
    """
    ks = [int(v) for v in ks]
    ls = [int(v) for v in ls]
    if len(ks) != 4 or len(ls) != 4:
        raise ValueError("need four points")
    if sum(ks) != a or sum(ls) != b:
        raise ValueError("coordinate sums must equal (a, b)")
    kp = [4 * v - a for v in ks]
    lp = [4 * v - b for v in ls]
    k2 = (kp[1] + kp[2], kp[0] + kp[2], kp[0] + kp[1])
    l2 = (lp[1] + lp[2], lp[0] + lp[2], lp[0] + lp[1])
    A1 = sum(v * v for v in ks)
    B1 = sum(v * v for v in ls)
    C1 = sum(u * v for u, v in zip(ks, ls))
    Ap = 16 * A1 - 4 * a * a
    Bp = 16 * B1 - 4 * b * b
    Cp = 16 * C1 - 4 * a * b
    assert sum(v * v for v in k2) == Ap
    assert sum(v * v for v in l2) == Bp
    assert sum(u * v for u, v in zip(k2, l2)) == Cp
    return k2, l2, Ap, Bp, Cp
