"""Free evolution on the torus, space-time norms and the bounds they are compared with.

Data are trigonometric polynomials ``f(y) = sum_k c_k e(k.y)`` with
``|k| < N``; the evolution multiplies ``c_k`` by ``e(t Q(k))``.

Quadrature for ``||e^{it D} f||_{L^p([0,T] x T^2)}``: the field is sampled on
a ``G x G`` grid by FFT. For even ``p`` the function ``|u|^p`` is a
trigonometric polynomial of degree below ``p N`` per axis, so the grid mean
is exact once ``G >= p N``; for other ``p`` the grid mean converges
spectrally and the contract is self-convergence. In time a midpoint rule
with a fixed step is used; the final partial cell reuses the value of its
full cell, which makes the result nondecreasing in ``T``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .cutoff import DEFAULT_CUTOFF
from .quadform import QuadForm
from .weyl_kernel import kernel_grid

__all__ = [
    "FourierData",
    "NormResult",
    "RefocusResult",
    "evolve",
    "field_on_grid",
    "lp_spacetime_norm",
    "conjecture_bound",
    "conjecture_bound_d2_table",
    "theorem_bounds",
    "refocus_search",
    "exponent_fit",
    "bump_data",
    "max_time_step",
    "experiment_csv",
]

TWO_PI = 2.0 * math.pi
BATCH = 64
BUMP_KINDS = ("full-bump", "line", "indicator-ball")


@dataclass(frozen=True)
class FourierData:
    support: np.ndarray  # (K, 2) integer frequencies
    amps: np.ndarray  # (K,) complex
    N: int

    def __post_init__(self):
        sup = np.asarray(self.support, dtype=np.int64).reshape(-1, 2)
        amps = np.asarray(self.amps, dtype=np.complex128).reshape(-1)
        if len(sup) != len(amps):
            raise ValueError("one amplitude per support point")
        if len(sup) and np.any((sup**2).sum(axis=1) >= self.N**2):
            raise ValueError(f"support must lie in the open ball of radius {self.N}")
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "amps", amps)

    @property
    def l2(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))

    def dense(self) -> np.ndarray:
        """Coefficients on the ``(2N-1)^2`` index square ``-(N-1)..N-1``."""
        out = np.zeros((2 * self.N - 1, 2 * self.N - 1), dtype=np.complex128)
        np.add.at(out, (self.support[:, 0] + self.N - 1, self.support[:, 1] + self.N - 1), self.amps)
        return out


class NormResult(NamedTuple):
    p: float
    T: float
    N: int
    value: float
    x_grid: int
    t_step: float


class RefocusResult(NamedTuple):
    q: int  # smallest qualifying q, or the best q seen when not found
    worst: float  # max(||q alpha||, ||q beta||) at that q
    N: int
    found: bool


def _q_values(form: QuadForm, support: np.ndarray) -> np.ndarray:
    k1 = support[:, 0].astype(np.float64)
    k2 = support[:, 1].astype(np.float64)
    return k1 * k1 + 2.0 * form.beta * k1 * k2 + form.alpha * k2 * k2


def evolve(form: QuadForm, f: FourierData, t: float) -> FourierData:
    phase = np.exp(1j * TWO_PI * t * _q_values(form, f.support))
    return FourierData(f.support, f.amps * phase, f.N)


def max_time_step(form: QuadForm, N: int) -> float:
    return 1.0 / (8.0 * form.norm * N * N)


def _q_dense(form: QuadForm, N: int) -> np.ndarray:
    n = np.arange(-(N - 1), N, dtype=np.float64)
    return n[:, None] ** 2 + 2.0 * form.beta * n[:, None] * n[None, :] + form.alpha * n[None, :] ** 2


def field_on_grid(form: QuadForm, f: FourierData, ts, G: int) -> np.ndarray:
    """``u(t, j/G)`` for each ``t`` in ``ts``; shape ``(len(ts), G, G)``."""
    ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
    c = f.dense()
    phase = np.exp(1j * TWO_PI * ts[:, None, None] * _q_dense(form, f.N)[None])
    return kernel_grid(c[None] * phase, f.N, G)


def _time_nodes(T: float, t_step: float, max_slices: int | None, rng):
    """Nodes and weights of the time rule on ``[0, T]``."""
    full = int(math.floor(T / t_step + 1e-12))
    rest = T - full * t_step
    if rest <= 1e-12 * t_step:
        rest = 0.0
    n_cells = full + (rest > 0)
    if max_slices is None or n_cells <= max_slices:
        nodes = (np.arange(n_cells) + 0.5) * t_step
        weights = np.full(n_cells, t_step)
        if rest > 0:
            weights[-1] = rest
        return nodes, weights
    # stratified subsampling: one random node per stratum of equal length
    if rng is None:
        raise ValueError("subsampled time quadrature needs an rng")
    width = T / max_slices
    nodes = (np.arange(max_slices) + rng.random(max_slices)) * width
    return nodes, np.full(max_slices, width)


def lp_spacetime_norm(
    form: QuadForm,
    f: FourierData,
    p: float,
    T: float,
    x_grid: int | None = None,
    t_step: float | None = None,
    max_slices: int | None = None,
    rng=None,
) -> NormResult:
    """``(int_0^T mean_x |u(t, x)|^p dt)^(1/p)`` with the torus of unit area.

    Defaults are the coarsest admissible grids: ``x_grid = 8N`` and
    ``t_step = 1/(8 max(1,|alpha|,|beta|) N^2)``. With ``max_slices`` set, long
    time intervals are sampled by one random node per stratum.
    """
    N = f.N
    if p < 1:
        raise ValueError("p must be >= 1")
    if T <= 0:
        raise ValueError("T must be positive")
    G = 8 * N if x_grid is None else int(x_grid)
    h = max_time_step(form, N) if t_step is None else float(t_step)
    if G < 4 * 2 * N:
        raise ValueError(f"x_grid={G} below 4 * 2N = {8 * N}")
    if not 0 < h <= max_time_step(form, N) * (1 + 1e-12):
        raise ValueError(f"t_step={h} exceeds 1/(8 max(1,|alpha|,|beta|) N^2)")
    nodes, weights = _time_nodes(T, h, max_slices, rng)
    total = 0.0
    for s in range(0, len(nodes), BATCH):
        u = field_on_grid(form, f, nodes[s : s + BATCH], G)
        means = np.mean(np.abs(u) ** p, axis=(1, 2))
        total += float(np.dot(weights[s : s + BATCH], means))
    return NormResult(p, T, N, total ** (1.0 / p), G, h)


def conjecture_bound(d: int, p: float, N: int, T: float) -> float:
    """``N^(d/2 - (d+2)/p) + T^(1/p) sum_{n=0}^d N^(n/2 - (n^2+2n)/p)``."""
    if d < 1 or p < 2 or N < 1 or T < 1:
        raise ValueError("need d >= 1, p >= 2, N >= 1, T >= 1")
    s = sum(N ** (n / 2 - (n * n + 2 * n) / p) for n in range(d + 1))
    return N ** (d / 2 - (d + 2) / p) + T ** (1 / p) * s


def conjecture_bound_d2_table(p: float, N: int, T: float) -> float:
    """Piecewise two-dimensional form of the same bound, dominant terms only."""
    if p <= 4:
        return T ** (1 / p)
    if p <= 6:
        return N ** (1 - 4 / p) + T ** (1 / p)
    if p <= 10:
        return N ** (1 - 4 / p) + T ** (1 / p) * N ** (0.5 - 3 / p)
    return N ** (1 - 4 / p) + T ** (1 / p) * N ** (1 - 8 / p)


def theorem_bounds(p: float, N: int, T: float) -> tuple[float, float | None]:
    """Proven bounds: the Weyl-sum bound for ``p > 4`` and the sharp one for ``p >= 8``."""
    if p <= 4:
        raise ValueError("p > 4 required")
    head = N ** (1 - 4 / p)
    weyl = head + T ** (1 / p) * N ** ((2 / 3) * (1 - 4 / p))
    if p < 8:
        return weyl, None
    if p <= 10:
        return weyl, head + T ** (1 / p) * N ** (0.5 - 3 / p)
    return weyl, head + N ** (1 - 8 / p) * T ** (1 / p)


def refocus_search(form: QuadForm, N: int, q_max: int, chunk: int = 1 << 20) -> RefocusResult:
    """Smallest ``q <= q_max`` with ``||q alpha||, ||q beta|| < 1/N^2``."""
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    target = 1.0 / (N * N)
    best_q, best = 1, math.inf
    for start in range(1, q_max + 1, chunk):
        q = np.arange(start, min(q_max, start + chunk - 1) + 1, dtype=np.float64)
        da = np.abs(q * form.alpha - np.rint(q * form.alpha))
        db = np.abs(q * form.beta - np.rint(q * form.beta))
        worst = np.maximum(da, db)
        hit = np.flatnonzero(worst < target)
        if hit.size:
            i = hit[0]
            return RefocusResult(int(q[i]), float(worst[i]), N, True)
        i = int(np.argmin(worst))
        if worst[i] < best:
            best_q, best = int(q[i]), float(worst[i])
    return RefocusResult(best_q, best, N, False)


def exponent_fit(samples) -> tuple[float, float]:
    """Least-squares slope of ``log value`` against ``log scale``, and ``r^2``."""
    arr = np.asarray(samples, dtype=np.float64).reshape(-1, 2)
    if len(arr) < 2:
        raise ValueError("need at least two samples")
    if np.any(arr <= 0):
        raise ValueError("scales and values must be positive")
    x, y = np.log(arr[:, 0]), np.log(arr[:, 1])
    if np.ptp(x) == 0:
        raise ValueError("all scales coincide")
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss if ss > 0 else 1.0
    return float(slope), r2


def bump_data(N: int, kind: str) -> FourierData:
    """Test data: a frequency-space bump, a bump on the line ``k2 = 0``, or the ball indicator.

    The bump kinds are normalised to unit ``L^2`` norm; the indicator has
    ``||f||_2^2`` equal to the number of lattice points in the ball.
    """
    if N < 2:
        raise ValueError("N >= 2 required")
    g = np.arange(-(N - 1), N)
    k1, k2 = (a.ravel() for a in np.meshgrid(g, g, indexing="ij"))
    r = np.sqrt(k1 * k1 + k2 * k2) / N
    inside = r < 1
    if kind == "indicator-ball":
        sup = np.stack([k1[inside], k2[inside]], axis=1)
        return FourierData(sup, np.ones(len(sup)), N)
    if kind == "full-bump":
        amps = DEFAULT_CUTOFF(r)
    elif kind == "line":
        amps = np.where(k2 == 0, DEFAULT_CUTOFF(np.abs(k1) / N), 0.0)
    else:
        raise ValueError(f"kind must be one of {BUMP_KINDS}")
    keep = inside & (amps != 0)
    sup = np.stack([k1[keep], k2[keep]], axis=1)
    amps = amps[keep] / np.sqrt(np.sum(amps[keep] ** 2))
    out = FourierData(sup, amps.astype(np.complex128), N)
    assert 0.9 <= out.l2 <= 1.1
    return out


EXPERIMENT_HEADER = ["seed", "p", "N", "T", "norm", "conj_bound", "thm_weyl", "thm_p8", "ratio"]


def experiment_csv(rows) -> str:
    """Rows of ``(seed, p, N, T, norm, conj_bound, thm_weyl, thm_p8, ratio)``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EXPERIMENT_HEADER)
    for r in rows:
        w.writerow([r[0], repr(r[1]), r[2], repr(r[3]), *("" if v is None else repr(v) for v in r[4:])])
    return buf.getvalue()
