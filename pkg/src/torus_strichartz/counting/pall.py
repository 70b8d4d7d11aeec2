"""Closed-form count of pairs of integer 3-vectors with prescribed Gram matrix.

For a positive definite ``phi = A x^2 + 2 C xy + B y^2`` the number of
``(k, l)`` in ``Z^3 x Z^3`` with ``|k|^2 = A``, ``|l|^2 = B``, ``<k, l> = C`` is::

    24 * 2^nu * chi(2) * prod_{odd p | k Delta} chi(p)

with ``k = gcd(A, B, C)``, ``Delta = (AB - C^2) / k^2`` and ``nu`` the number
of distinct odd primes dividing ``k Delta``.

Odd primes. Write ``p^u1 || k``, ``p^(u2-u1) || Delta``, ``delta1 = floor((u1+1)/2)``
and ``chi(p) = kappa1 (p^delta1 - 1)/(p - 1) + kappa2 p^delta1`` where, with
``s`` the product of Legendre symbols shown,

====================  ===================================  ==============================
parities (u1, u2)     kappa1                               kappa2
====================  ===================================  ==============================
even, even            1                                    1/2 + (1+s)(u2-u1)/4,  s = (-k'/p)(phi1/p)
even, odd             (1+s)/2, s = (-k'/p)(phi1/p)         (1+s)(u2+1-u1)/4
odd, even             (1+s)/2, s = (-k'D'/p)(phi1/p)       0
odd, odd              (1+s)/2, s = (-D'/p)                 0
====================  ===================================  ==============================

``k'`` and ``D'`` are the prime-to-``p`` parts of ``k`` and ``Delta`` and
``phi1 = phi / k``. ``(phi1/p)`` is the symbol of any value of ``phi1`` prime
to ``p``; it is only consulted when ``p | Delta``, where all such values lie
in one square class. In the last row the symbol carries no ``(phi1/p)``
factor: with it the formula disagrees with direct enumeration (e.g.
``(6, 27, 0)`` has 48 solutions), without it agreement is exact.

The prime 2. ``chi(2)`` is 1 when ``phi`` is represented by ``x^2+y^2+z^2``
over the 2-adic integers and 0 otherwise; see ``two_adic_representable``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .arith import factorize, largest_square_divisor_root, legendre, valuation

__all__ = [
    "PallQuery",
    "PrimeData",
    "PallFactorization",
    "square_divisor_h",
    "phi1_symbol",
    "chi_odd_p",
    "two_adic_reduce",
    "two_adic_representable",
    "two_adic_density",
    "gram_solution_counts",
    "pall_factorization",
    "pall_count",
]


class PallQuery(NamedTuple):
    Ap: int
    Bp: int
    Cp: int


class PrimeData(NamedTuple):
    p: int
    u1: int
    u2: int
    delta1: int
    kappa1: Fraction
    kappa2: Fraction
    chi: Fraction


@dataclass(frozen=True)
class PallFactorization:
    k: int
    Delta: int
    nu: int
    h: int
    chi2: int
    per_prime: list[PrimeData] = field(default_factory=list)

    @property
    def count(self) -> int:
        total = Fraction(24 * 2**self.nu * self.chi2)
        for d in self.per_prime:
            total *= d.chi
        if total.denominator != 1:
            raise ArithmeticError(f"non-integral Pall count {total}")
        return int(total)


def square_divisor_h(Ap: int, Bp: int, Cp: int) -> int:
    """Largest ``h`` with ``h^2 | gcd(Ap, Bp, Cp)``."""
    g = math.gcd(Ap, Bp, Cp)
    if g == 0:
        raise ValueError("(0, 0, 0) has no square divisor")
    return largest_square_divisor_root(g)


def phi1_symbol(a1: int, b1: int, c1: int, p: int) -> int:
    """Legendre symbol of the first value of ``a1 x^2 + 2 c1 xy + b1 y^2`` prime to ``p``.

    ``(x, y)`` runs over ``[0, p)^2`` with ``x`` outer.
    """
    for x in range(p):
        for y in range(p):
            v = a1 * x * x + 2 * c1 * x * y + b1 * y * y
            if v % p:
                return legendre(v, p)
    raise ArithmeticError(f"phi1 = ({a1}, {b1}, {c1}) has no unit value mod {p}")


def _check_definite(Ap, Bp, Cp):
    if Ap * Bp - Cp * Cp <= 0 or Ap <= 0:
        raise ValueError(f"({Ap}, {Bp}, {Cp}) is not positive definite")


def chi_odd_p(Ap: int, Bp: int, Cp: int, p: int) -> PrimeData:
    """Local factor at an odd prime ``p`` dividing ``k Delta``."""
    _check_definite(Ap, Bp, Cp)
    if p == 2:
        raise ValueError("chi_odd_p needs an odd prime")
    k = math.gcd(Ap, Bp, Cp)
    Delta = (Ap * Bp - Cp * Cp) // (k * k)
    if (k * Delta) % p:
        raise ValueError(f"{p} does not divide k*Delta")
    u1 = valuation(k, p)
    dv = valuation(Delta, p)
    u2 = u1 + dv
    d1 = (u1 + 1) // 2
    k_unit = k // p**u1
    D_unit = Delta // p**dv

    def phi_sym():
        return phi1_symbol(Ap // k, Bp // k, Cp // k, p)

    half, quarter = Fraction(1, 2), Fraction(1, 4)
    if u1 % 2 == 0 and u2 % 2 == 0:
        k1 = Fraction(1)
        k2 = half if u2 == u1 else half + quarter * (1 + legendre(-k_unit, p) * phi_sym()) * (u2 - u1)
    elif u1 % 2 == 0:
        s = legendre(-k_unit, p) * phi_sym()
        k1 = half * (1 + s)
        k2 = quarter * (1 + s) * (u2 + 1 - u1)
    elif u2 % 2 == 0:
        k1 = half * (1 + legendre(-k_unit * D_unit, p) * phi_sym())
        k2 = Fraction(0)
    else:
        k1 = half * (1 + legendre(-D_unit, p))
        k2 = Fraction(0)
    pd = p**d1
    chi = k1 * Fraction(pd - 1, p - 1) + k2 * pd
    return PrimeData(p, u1, u2, d1, k1, k2, chi)


# --- the prime 2 ---------------------------------------------------------------


def two_adic_reduce(Ap: int, Bp: int, Cp: int):
    """Strip factors of 4 that every 2-adic representation must carry.

    ``x^2 + y^2 + z^2 = 0 mod 4`` forces ``x, y, z`` even, so if a primitive
    vector has ``phi``-value divisible by 4 its image is twice a lattice
    vector. Moving that vector into first position and halving it divides
    the determinant by 4. Returns ``None`` when the halving is impossible
    (then ``phi`` is not represented), otherwise a form whose values at
    ``(1,0)``, ``(0,1)``, ``(1,1)`` are all nonzero mod 4. Such a form has
    ``v_2(AB - C^2) <= 2``.
    """
    A, B, C = Ap, Bp, Cp
    while True:
        if A % 4 == 0:
            if C % 2:
                return None
            A, C = A // 4, C // 2
        elif B % 4 == 0:
            if C % 2:
                return None
            B, C = B // 4, C // 2
        elif (A + B + 2 * C) % 4 == 0:
            A, C = A + B + 2 * C, C + B  # basis (1, 1), (0, 1)
        else:
            return A, B, C


@lru_cache(maxsize=None)
def gram_solution_counts(e: int) -> np.ndarray:
    """``counts[A, B, C]`` = number of 3x2 matrices ``X`` mod ``2^e`` with
    ``X^T X = [[A, C], [C, B]] mod 2^e``.

    Each row of ``X`` contributes ``(x^2, y^2, xy)``; the table is the
    threefold additive convolution of that row distribution on ``(Z/2^e)^3``.
    """
    mod = 1 << e
    row = np.zeros((mod, mod, mod), dtype=np.int64)
    for x in range(mod):
        for y in range(mod):
            row[x * x % mod, y * y % mod, x * y % mod] += 1
    support = np.argwhere(row)
    acc = row
    for _ in range(2):
        nxt = np.zeros_like(acc)
        for a, b, c in support:
            nxt += row[a, b, c] * np.roll(acc, (a, b, c), axis=(0, 1, 2))
        acc = nxt
    return acc


def two_adic_density(Ap: int, Bp: int, Cp: int, e: int) -> Fraction:
    """Solutions mod ``2^e`` divided by ``2^(3e)`` (6 unknowns, 3 equations)."""
    mod = 1 << e
    return Fraction(int(gram_solution_counts(e)[Ap % mod, Bp % mod, Cp % mod]), 1 << (3 * e))


def two_adic_representable(Ap: int, Bp: int, Cp: int) -> int:
    """``chi(2)``: 1 if ``phi`` is a sum of three squares of 2-adic linear forms, else 0.

    After ``two_adic_reduce`` the determinant ``D`` has ``v_2(D) <= 2``. Any
    solution modulo ``2^(v_2(D)+3)`` has a 2x2 minor of valuation at most
    ``v_2(D)/2`` (the squared minors sum to ``D``), so it lifts; the question
    is therefore decided modulo ``2^5`` and depends only on residues mod 32.

    Lifting: if ``X^T X = G mod 2^j`` and some 2x2 minor ``M`` of ``X`` has
    valuation ``v`` with ``j >= 2v + 3``, then ``X + 2^(j-v-1) H`` with
    ``H`` supported on the rows of ``M`` and ``M^T H_M = 2^v E`` (``E`` the
    error matrix divided by ``2^j``) solves the system mod ``2^(j+1)``
    without changing ``v``; ``H_M`` is 2-integral because ``det M / 2^v`` is odd.
    """
    red = two_adic_reduce(Ap, Bp, Cp)
    if red is None:
        return 0
    A, B, C = red
    D = A * B - C * C
    e = valuation(D, 2) + 3
    if e > 5:
        raise ArithmeticError(f"2-adic reduction of {(Ap, Bp, Cp)} left v2(D) = {e - 3}")
    mod = 1 << e
    return int(gram_solution_counts(e)[A % mod, B % mod, C % mod] > 0)


# --- assembly ------------------------------------------------------------------


def pall_factorization(query) -> PallFactorization:
    Ap, Bp, Cp = query
    _check_definite(Ap, Bp, Cp)
    k = math.gcd(Ap, Bp, Cp)
    Delta = (Ap * Bp - Cp * Cp) // (k * k)
    odd = sorted(p for p in factorize(k * Delta) if p != 2)
    per_prime = [chi_odd_p(Ap, Bp, Cp, p) for p in odd]
    return PallFactorization(
        k=k,
        Delta=Delta,
        nu=len(odd),
        h=largest_square_divisor_root(k),
        chi2=two_adic_representable(Ap, Bp, Cp),
        per_prime=per_prime,
    )


def pall_count(query) -> int:
    """Closed-form solution count; integer arithmetic throughout.

    Each odd factor is carried as ``4 chi(p)`` so the product is an integer;
    the final division by ``2^nu`` is checked to be exact.
    """
    Ap, Bp, Cp = query
    D = Ap * Bp - Cp * Cp
    if D <= 0 or Ap <= 0:
        raise ValueError(f"({Ap}, {Bp}, {Cp}) is not positive definite")
    if not two_adic_representable(Ap, Bp, Cp):
        return 0
    k = math.gcd(Ap, Bp, Cp)
    Delta = D // (k * k)
    a1, b1, c1 = Ap // k, Bp // k, Cp // k
    num = 24
    nu = 0
    for p, e_all in factorize(k * Delta).items():
        if p == 2:
            continue
        nu += 1
        u1 = 0
        kk = k
        while kk % p == 0:
            kk //= p
            u1 += 1
        dv = e_all - u1
        u2 = u1 + dv
        pd = p ** ((u1 + 1) // 2)
        geo = (pd - 1) // (p - 1)
        if u1 % 2 == 0:
            if u2 % 2 == 0:
                if dv == 0:
                    four_chi = 4 * geo + 2 * pd
                else:
                    s = legendre(-kk, p) * phi1_symbol(a1, b1, c1, p)
                    four_chi = 4 * geo + (2 + (1 + s) * dv) * pd
            else:
                s = legendre(-kk, p) * phi1_symbol(a1, b1, c1, p)
                four_chi = (1 + s) * (2 * geo + (dv + 1) * pd)
        else:
            if u2 % 2 == 0:
                s = legendre(-kk * (Delta // p**dv), p) * phi1_symbol(a1, b1, c1, p)
            else:
                s = legendre(-(Delta // p**dv), p)
            four_chi = 2 * (1 + s) * geo
        if four_chi == 0:
            return 0
        num *= four_chi
    q, r = divmod(num, 1 << nu)
    if r:
        raise ArithmeticError(f"non-integral Pall count for {(Ap, Bp, Cp)}")
    return q
