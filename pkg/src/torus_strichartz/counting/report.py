"""Sweeps comparing the closed-form pair count with brute force."""

from __future__ import annotations

import csv
import io
import math
from typing import NamedTuple

from .pall import pall_count, pall_factorization, square_divisor_h
from .reps import brute_pair_table

CSV_HEADER = ["Ap", "Bp", "Cp", "k", "Delta", "nu", "h", "pall", "brute", "match"]


class PallSweep(NamedTuple):
    M: int
    checked: int
    mismatches: list[tuple[int, int, int, int, int]]  # (Ap, Bp, Cp, pall, brute)
    divisor_constant: float  # max brute / ((Ap Bp)^eps h)
    divisor_argmax: tuple[int, int, int]


def definite_triples(M: int):
    """All ``(Ap, Bp, Cp)`` with ``1 <= Ap, Bp <= M`` and ``Ap Bp - Cp^2 > 0``."""
    for A in range(1, M + 1):
        for B in range(1, M + 1):
            lim = math.isqrt(A * B - 1)
            for C in range(-lim, lim + 1):
                yield A, B, C


def pall_sweep(M: int, eps: float = 0.1, rows: list | None = None) -> PallSweep:
    """Check every definite triple up to ``M``; optionally collect CSV rows."""
    table = brute_pair_table(M)
    bad = []
    n = 0
    best, arg = 0.0, (0, 0, 0)
    for A, B, C in definite_triples(M):
        n += 1
        brute = int(table[A, B, C + M])
        got = pall_count((A, B, C))
        if got != brute:
            bad.append((A, B, C, got, brute))
        if brute:
            ratio = brute / ((A * B) ** eps * square_divisor_h(A, B, C))
            if ratio > best:
                best, arg = ratio, (A, B, C)
        if rows is not None:
            f = pall_factorization((A, B, C))
            rows.append((A, B, C, f.k, f.Delta, f.nu, f.h, got, brute, int(got == brute)))
    return PallSweep(M, n, bad, best, arg)


def pall_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(rows)
    return buf.getvalue()
