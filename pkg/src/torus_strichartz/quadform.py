"""Coefficient matrix of the flat torus and the forms built from it.

The torus geometry is the symmetric matrix ``[[1, beta], [beta, alpha]]``;
the leading entry is normalised to 1 throughout the package.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "QuadForm",
    "LatticePoint",
    "ComboCount",
    "eval_q",
    "linear_forms",
    "sample_generic",
    "count_small_combos",
    "small_combo_census",
]

MAX_REJECTIONS = 10_000


class LatticePoint(NamedTuple):
    k1: int
    k2: int


@dataclass(frozen=True)
class QuadForm:
    """Symmetric form ``Q(k) = k1^2 + 2 beta k1 k2 + alpha k2^2``.

    ``strict=False`` lifts the box constraint ``|alpha|, |beta| <= 2`` so
    that arbitrary (e.g. integer or far-out indefinite) matrices can be
    represented for testing.
    """

    alpha: float
    beta: float
    seed: int | None = None
    strict: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError("form coefficients must be finite")
        if self.strict and (abs(self.alpha) > 2 or abs(self.beta) > 2):
            raise ValueError(
                f"|alpha|, |beta| must be <= 2 (got {self.alpha}, {self.beta}); "
                "pass strict=False for out-of-box forms"
            )

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[1.0, self.beta], [self.beta, self.alpha]])

    @property
    def eigenvalues(self) -> tuple[float, float]:
        lo, hi = np.linalg.eigvalsh(self.matrix)
        return float(lo), float(hi)

    @property
    def in_E(self) -> bool:
        """Both eigenvalues exceed 1 in absolute value (and box holds)."""
        if abs(self.alpha) > 2 or abs(self.beta) > 2:
            return False
        return min(abs(v) for v in self.eigenvalues) > 1.0

    @property
    def norm(self) -> float:
        """``max(1, |alpha|, |beta|)``; bounds ``|Q(n)| <= 4 norm |n|_inf^2``."""
        return max(1.0, abs(self.alpha), abs(self.beta))

    def to_json(self) -> str:
        return json.dumps({"alpha": self.alpha, "beta": self.beta, "seed": self.seed})

    @classmethod
    def from_json(cls, text: str) -> "QuadForm":
        d = json.loads(text)
        return cls(float(d["alpha"]), float(d["beta"]), d.get("seed"))


def eval_q(form: QuadForm, k) -> float:
    k1, k2 = k
    return k1 * k1 + 2.0 * form.beta * k1 * k2 + form.alpha * k2 * k2


def linear_forms(form: QuadForm, r) -> tuple[float, float]:
    """``(L1(r), L2(r))`` with ``L_j(r) = sum_i alpha_ij r_i``."""
    r1, r2 = r
    return r1 + form.beta * r2, form.beta * r1 + form.alpha * r2


def sample_generic(seed: int) -> QuadForm:
    """Uniform draw of ``(alpha, beta)`` from ``[-2, 2]^2`` conditioned on ``in_E``.

    With the leading entry fixed at 1 every accepted form is indefinite:
    a positive definite matrix has smallest eigenvalue at most its
    smallest diagonal entry.
    """
    rng = np.random.default_rng(seed)
    for _ in range(MAX_REJECTIONS):
        alpha, beta = rng.uniform(-2.0, 2.0, size=2)
        form = QuadForm(float(alpha), float(beta), seed=seed)
        if form.in_E:
            return form
    raise RuntimeError(f"rejection sampler failed for seed {seed}; RNG is broken")


class ComboCount(NamedTuple):
    count: int
    guard_band: int


def small_combo_census(form: QuadForm, R: int, tau: float, delta: float) -> ComboCount:
    """Count triples ``|A|, |B|, |C| <= R`` with ``|A + B alpha + C beta - tau| < delta``.

    For each ``(B, C)`` the admissible ``A`` form an integer interval. Its
    ends are located with floor/ceil of the real bounds and then confirmed by
    evaluating the defining predicate at the neighbouring integers, so
    rounding can never drop or add an endpoint. ``guard_band`` counts
    accepted or rejected end values lying within 4 ulp of the boundary.
    """
    if R < 0:
        raise ValueError("R must be >= 0")
    if not delta > 0:
        raise ValueError("delta must be > 0")
    g = np.arange(-R, R + 1, dtype=np.float64)
    x = (g[:, None] * form.alpha + g[None, :] * form.beta - tau).ravel()

    def pred(a):
        return np.abs(a + x) < delta

    a_lo = np.ceil(-x - delta)
    a_hi = np.floor(-x + delta)
    first = np.full_like(x, np.inf)
    for off in (1.0, 0.0, -1.0):
        cand = a_lo + off
        first = np.where(pred(cand), cand, first)
    last = np.full_like(x, -np.inf)
    for off in (-1.0, 0.0, 1.0):
        cand = a_hi + off
        last = np.where(pred(cand), cand, last)
    first = np.maximum(first, -R)
    last = np.minimum(last, R)
    per_bc = np.where(last >= first, last - first + 1, 0)
    count = int(per_bc.sum())

    # end candidates of one (B, C) may coincide when delta is small
    ends = np.sort(np.stack([a_lo - 1, a_lo, a_lo + 1, a_hi - 1, a_hi, a_hi + 1]), axis=0)
    fresh = np.ones_like(ends, dtype=bool)
    fresh[1:] = ends[1:] != ends[:-1]
    tol = 4 * np.spacing(delta)
    near = np.abs(np.abs(ends + x) - delta) <= tol
    guard = int((fresh & near & (np.abs(ends) <= R)).sum())
    return ComboCount(count, guard)


def count_small_combos(form: QuadForm, R: int, tau: float, delta: float) -> int:
    return small_combo_census(form, R, tau, delta).count
