"""Successive minima of the box norm attached to a time ``t``.

For ``(n, m)`` in ``Z^2 x Z^2``::

    F(n, m) = max(|n_1|/N, |n_2|/N, N |t L_1(n) - m_1|, N |t L_2(n) - m_2|)

``M_1 <= M_2`` are the smallest values of ``F`` on two linearly independent
lattice vectors. For fixed ``n`` the best ``m`` is ``round(t L(n))``, and any
vector with ``F <= r`` has ``|n_i| <= r N`` and ``|t L_i(n) - m_i| <= r / N``,
so enumerating that box is exhaustive for minima up to ``r``. Vectors with
``n = 0`` have ``F = N max|m_i| >= N`` and enter the same enumeration.

Ranking is done on exact rationals (``t``, ``alpha`` and ``beta`` are
binary floats, hence exact dyadic rationals). Ties in ``F`` go to the
vector of smaller l1 size, then to the lexicographically larger vector
after fixing the sign of its first nonzero entry; at ``t = 0`` this gives
``v1 = ((1,0),(0,0))`` and ``v2 = ((0,1),(0,0))``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .cutoff import CutoffProfile
from .quadform import QuadForm
from .weyl_kernel import sup_over_x

__all__ = [
    "BoxNormParams",
    "MinimaResult",
    "box_norm",
    "box_norm_exact",
    "successive_minima",
    "davenport_ratio",
    "independent",
    "minima_csv",
]

# float prefilter margin before exact re-ranking
_SLACK = 1e-9


@dataclass(frozen=True)
class BoxNormParams:
    form: QuadForm
    N: int
    t: float

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")


class MinimaResult(NamedTuple):
    m1: float
    m2: float
    v1: tuple[int, int, int, int]
    v2: tuple[int, int, int, int]


def box_norm(params: BoxNormParams, n, m) -> float:
    f, N, t = params.form, params.N, params.t
    L1 = n[0] + f.beta * n[1]
    L2 = f.beta * n[0] + f.alpha * n[1]
    return max(abs(n[0]) / N, abs(n[1]) / N, N * abs(t * L1 - m[0]), N * abs(t * L2 - m[1]))


def box_norm_exact(params: BoxNormParams, n, m) -> Fraction:
    f = params.form
    a, b, t, N = Fraction(f.alpha), Fraction(f.beta), Fraction(params.t), params.N
    L1 = n[0] + b * n[1]
    L2 = b * n[0] + a * n[1]
    return max(
        Fraction(abs(n[0]), N),
        Fraction(abs(n[1]), N),
        N * abs(t * L1 - m[0]),
        N * abs(t * L2 - m[1]),
    )


def independent(u, v) -> bool:
    """True iff the 2x4 integer matrix with rows ``u``, ``v`` has rank 2."""
    return any(u[i] * v[j] - u[j] * v[i] != 0 for i in range(4) for j in range(i + 1, 4))


def _canonical(v):
    for c in v:
        if c != 0:
            return v if c > 0 else tuple(-x for x in v)
    return v


def _rank_key(params, v):
    return (box_norm_exact(params, v[:2], v[2:]), sum(abs(c) for c in v), tuple(-c for c in v))


def _candidates(params: BoxNormParams, radius: float):
    """All nonzero ``(n, m)`` with float ``F <= radius``, as an ``(K, 4)`` array and F-values."""
    f, N, t = params.form, params.N, params.t
    R = int(np.floor(radius * N))
    g = np.arange(-R, R + 1)
    n1, n2 = (a.ravel() for a in np.meshgrid(g, g, indexing="ij"))
    tl1 = t * (n1 + f.beta * n2)
    tl2 = t * (f.beta * n1 + f.alpha * n2)
    w = radius / N
    span = int(np.ceil(w)) + 1
    offs = np.arange(-span, span + 1)
    base1 = np.rint(tl1).astype(np.int64)
    base2 = np.rint(tl2).astype(np.int64)
    out_v, out_f = [], []
    for d1 in offs:
        m1 = base1 + d1
        e1 = N * np.abs(tl1 - m1)
        ok1 = e1 <= radius + _SLACK
        if not ok1.any():
            continue
        for d2 in offs:
            m2 = base2 + d2
            e2 = N * np.abs(tl2 - m2)
            ok = ok1 & (e2 <= radius + _SLACK)
            if not ok.any():
                continue
            F = np.maximum.reduce([np.abs(n1) / N, np.abs(n2) / N, e1, e2])
            ok &= F <= radius + _SLACK
            ok &= (n1 != 0) | (n2 != 0) | (m1 != 0) | (m2 != 0)
            out_v.append(np.stack([n1[ok], n2[ok], m1[ok], m2[ok]], axis=1))
            out_f.append(F[ok])
    if not out_v:
        return np.zeros((0, 4), dtype=np.int64), np.zeros(0)
    return np.concatenate(out_v), np.concatenate(out_f)


def _pick_two(params, vecs, fvals):
    """Exact selection of ``(v1, v2)`` from float-ranked candidates."""
    order = np.argsort(fvals, kind="stable")
    vecs, fvals = vecs[order], fvals[order]
    if len(vecs) == 0:
        return None
    # exact minimum among everything within slack of the float minimum
    head = fvals <= fvals[0] * (1 + 1e-9) + _SLACK
    pool = {_canonical(tuple(int(c) for c in v)) for v in vecs[head]}
    v1 = min(pool, key=lambda v: _rank_key(params, v))
    indep = np.array([independent(v1, tuple(v)) for v in vecs])
    if not indep.any():
        return None
    f2 = fvals[indep][0]
    head2 = indep & (fvals <= f2 * (1 + 1e-9) + _SLACK)
    pool2 = {_canonical(tuple(int(c) for c in v)) for v in vecs[head2]}
    v2 = min(pool2, key=lambda v: _rank_key(params, v))
    return v1, v2


def successive_minima(params: BoxNormParams, radius: float | None = None) -> MinimaResult:
    """``(M_1, M_2)`` with achieving vectors.

    With ``radius=None`` the search starts at radius 1 and doubles until two
    independent vectors are found; radius ``N`` always suffices because
    ``((1,0), round)`` and ``((0,1), round)`` have ``F <= max(1/N, N/2)``.
    """
    if radius is not None:
        if radius < 1:
            raise ValueError("radius must be >= 1")
        radii = [radius]
    else:
        radii, r = [], 1.0
        while r < params.N:
            radii.append(r)
            r *= 2
        radii.append(float(max(params.N, 1)))
    for r in radii:
        vecs, fvals = _candidates(params, r)
        picked = _pick_two(params, vecs, fvals)
        if picked is None:
            continue
        v1, v2 = picked
        f1 = box_norm_exact(params, v1[:2], v1[2:])
        f2 = box_norm_exact(params, v2[:2], v2[2:])
        if f2 > r:
            # a vector just outside the float box could beat v2
            continue
        return MinimaResult(float(f1), float(f2), v1, v2)
    raise ValueError(f"radius too small: fewer than 2 independent vectors with F <= {radii[-1]}")


def davenport_ratio(params: BoxNormParams, chi: CutoffProfile, oversample: int = 8) -> float:
    """``sup_x |K_N(t, x)|^2 * M_1 * M_2 / N^2``."""
    mins = successive_minima(params)
    sup = sup_over_x(params.form, chi, params.N, params.t, oversample).sup_abs
    return sup * sup * mins.m1 * mins.m2 / params.N**2


def minima_csv(rows) -> str:
    """Rows of ``(N, t, m1, m2, sup_abs, davenport_ratio, seed)``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "t", "m1", "m2", "sup_abs", "davenport_ratio", "seed"])
    for r in rows:
        w.writerow([r[0], repr(r[1]), repr(r[2]), repr(r[3]), repr(r[4]), repr(r[5]), r[6]])
    return buf.getvalue()
