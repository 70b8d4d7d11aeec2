"""Small-integer arithmetic: valuations, Legendre symbols, sieve factorisation."""

from __future__ import annotations

import math

import numpy as np
from sympy import factorint

_SPF: np.ndarray | None = None
_SPF_LIST: list[int] = []


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def legendre(a: int, p: int) -> int:
    """Legendre symbol for an odd prime ``p`` (Euler's criterion)."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) >> 1, p) == 1 else -1


def smallest_prime_factors(limit: int) -> np.ndarray:
    """Sieve of smallest prime factors for ``0..limit``; cached and grown on demand."""
    global _SPF
    if _SPF is not None and _SPF.size > limit:
        return _SPF
    size = max(limit + 1, 1 << 16)
    spf = np.zeros(size, dtype=np.int64)
    for p in range(2, math.isqrt(size - 1) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    zero = spf == 0
    spf[zero] = np.arange(size)[zero]
    _SPF = spf
    _SPF_LIST[:] = spf.tolist()
    return spf


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation of ``n >= 1``."""
    if n < 1:
        raise ValueError("factorize expects n >= 1")
    if n < (1 << 22):
        if n >= len(_SPF_LIST):
            smallest_prime_factors(n)
        spf = _SPF_LIST
        out: dict[int, int] = {}
        while n > 1:
            p = spf[n]
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
        return out
    return {int(p): int(e) for p, e in factorint(n).items()}


def largest_square_divisor_root(n: int) -> int:
    """Largest ``h`` with ``h^2 | n``."""
    h = 1
    for p, e in factorize(abs(n)).items():
        h *= p ** (e // 2)
    return h
