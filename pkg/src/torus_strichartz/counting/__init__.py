"""Exact integer counts: moment systems, pair representations and their oracles."""

from .omega import (
    OmegaQuery,
    alternating_signs,
    kookaburra_map,
    omega_count,
    omega_counts,
    omega_naive,
    omega_naive_counts,
    omega_naive_histogram,
)
from .pall import (
    PallFactorization,
    PallQuery,
    PrimeData,
    chi_odd_p,
    pall_count,
    pall_factorization,
    square_divisor_h,
    two_adic_representable,
)
from .report import PallSweep, definite_triples, pall_csv, pall_sweep
from .reps import (
    DegenerateSplit,
    brute_pair_count,
    brute_pair_table,
    degenerate_count,
    degenerate_split,
    r3,
    representations,
    sum_of_three_squares,
)

__all__ = [
    "OmegaQuery",
    "alternating_signs",
    "kookaburra_map",
    "omega_count",
    "omega_counts",
    "omega_naive",
    "omega_naive_counts",
    "omega_naive_histogram",
    "PallFactorization",
    "PallQuery",
    "PrimeData",
    "chi_odd_p",
    "pall_count",
    "pall_factorization",
    "square_divisor_h",
    "two_adic_representable",
    "PallSweep",
    "definite_triples",
    "pall_csv",
    "pall_sweep",
    "DegenerateSplit",
    "brute_pair_count",
    "brute_pair_table",
    "degenerate_count",
    "degenerate_split",
    "r3",
    "representations",
    "sum_of_three_squares",
]
