"""Smooth even cutoff equal to 1 on [-1/2, 1/2] and vanishing off (-1, 1)."""

from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicSpline

TABLE_SIZE = 4096


def _glue(s):
    s = np.asarray(s, dtype=np.float64)
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = np.exp(-1.0 / s[pos])
    return out


def bump_exact(x):
    """Closed form: ``g(1-|x|) / (g(1-|x|) + g(|x|-1/2))`` with ``g(s) = exp(-1/s)``."""
    a = np.abs(np.asarray(x, dtype=np.float64))
    up = _glue(1.0 - a)
    down = _glue(a - 0.5)
    denom = up + down
    with np.errstate(invalid="ignore"):
        out = np.where(denom > 0, up / np.where(denom > 0, denom, 1.0), 0.0)
    out = np.where(a <= 0.5, 1.0, out)
    return np.where(a >= 1.0, 0.0, out)


class CutoffProfile:
    """Tabulated bump: 4096 samples of ``bump_exact`` on ``[0, 1]`` plus a cubic spline.

    Every caller sums the same table values, so coefficient arrays do not
    depend on the platform's ``exp``.
    """

    def __init__(self, size: int = TABLE_SIZE):
        self.grid = np.linspace(0.0, 1.0, size)
        self.table = bump_exact(self.grid)
        self._spline = CubicSpline(self.grid, self.table)

    def __call__(self, x):
        a = np.abs(np.asarray(x, dtype=np.float64))
        out = np.clip(self._spline(np.minimum(a, 1.0)), 0.0, 1.0)
        out = np.where(a <= 0.5, 1.0, out)
        return np.where(a >= 1.0, 0.0, out)

    def exact(self, x):
        return bump_exact(x)

    def weights(self, N: int) -> np.ndarray:
        """``chi(n / N)`` for ``n = -(N-1), ..., N-1``."""
        n = np.arange(-(N - 1), N)
        return self(n / N)


DEFAULT_CUTOFF = CutoffProfile()
