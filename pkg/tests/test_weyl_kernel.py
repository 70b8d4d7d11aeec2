import numpy as np
import pytest
from scipy.optimize import minimize

from oracles import kernel_mp
from torus_strichartz.cutoff import DEFAULT_CUTOFF as CHI
from torus_strichartz.quadform import QuadForm, sample_generic
from torus_strichartz.weyl_kernel import (
    KernelSample,
    SweepTable,
    _coefficients,
    dispersive_ratio,
    kernel_direct,
    kernel_grid,
    kernel_peak,
    l4_time_integral,
    l4_time_integrals,
    log_times,
    sup_over_x,
    weyl_rhs,
)


def test_peak_value():
    # sum_n chi(n/N) = 3N/2 exactly, so K_N(0, 0) = 9N^2/4
    for N in (2, 8, 32):
        assert kernel_peak(CHI, N) == pytest.approx(2.25 * N * N, rel=1e-12)
        assert N * N <= kernel_peak(CHI, N) <= (2 * N + 1) ** 2
    f = sample_generic(0)
    assert kernel_direct(f, CHI, 8, 0.0, (0.0, 0.0)) == pytest.approx(144.0, rel=1e-12)


def test_direct_matches_extended_precision():
    rng = np.random.default_rng(1)
    w = CHI.weights(2)
    for s in range(5):
        f = sample_generic(s)
        t, x = rng.uniform(-3, 3), rng.uniform(0, 1, 2)
        ref = kernel_mp(f.alpha, f.beta, w, 2, t, x)
        assert abs(kernel_direct(f, CHI, 2, t, x) - ref) < 1e-12


def test_triangle_inequality():
    rng = np.random.default_rng(2)
    f = sample_generic(1)
    peak = kernel_peak(CHI, 6)
    for _ in range(20):
        assert abs(kernel_direct(f, CHI, 6, rng.uniform(0, 5), rng.uniform(0, 1, 2))) <= peak + 1e-9


def test_grid_matches_direct():
    rng = np.random.default_rng(3)
    f = sample_generic(2)
    N, G, t = 8, 128, 0.37
    grid = kernel_grid(_coefficients(f, CHI, N, [t]), N, G)[0]
    for j in rng.integers(0, G, size=(50, 2)):
        ref = kernel_direct(f, CHI, N, t, j / G)
        assert abs(grid[j[0], j[1]] - ref) <= 1e-9 * abs(ref) + 1e-12


def test_sup_at_time_zero():
    s = sup_over_x(sample_generic(0), CHI, 8, 0.0)
    assert s.sup_abs == pytest.approx(kernel_peak(CHI, 8), rel=1e-12)
    assert s.x_star == (0.0, 0.0)


def test_sup_symmetric_in_time():
    f = sample_generic(4)
    for t in (0.013, 0.4, 7.7):
        assert sup_over_x(f, CHI, 8, t).sup_abs == pytest.approx(sup_over_x(f, CHI, 8, -t).sup_abs, rel=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_sup_against_dense_grid_and_optimiser(seed):
    rng = np.random.default_rng(100 + seed)
    f, N, t = sample_generic(seed), 8, rng.uniform(0, 10)
    deep = sup_over_x(f, CHI, N, t, refine_depth=40)
    dense = np.abs(kernel_grid(_coefficients(f, CHI, N, [t]), N, 8 * 16 * N)).max()
    assert deep.sup_abs >= dense - 1e-6
    res = minimize(lambda x: -abs(kernel_direct(f, CHI, N, t, x)), deep.x_star, method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14})
    assert deep.sup_abs == pytest.approx(-res.fun, rel=1e-9)
    # the default three rounds stay within the documented factor
    assert sup_over_x(f, CHI, N, t).sup_abs >= deep.sup_abs / 1.003


def test_sup_ceiling_and_grid_floor():
    f = sample_generic(5)
    for t in (0.05, 1.3, 40.0):
        s = sup_over_x(f, CHI, 8, t)
        coarse = np.abs(kernel_grid(_coefficients(f, CHI, 8, [t]), 8, 128)).max()
        assert coarse - 1e-9 <= s.sup_abs <= kernel_peak(CHI, 8) + 1e-9


def test_dispersive_examples():
    f = sample_generic(0)
    assert dispersive_ratio(f, CHI, 16, 1 / 256) <= 5
    limit = dispersive_ratio(f, CHI, 16, 1e-9)
    assert limit == pytest.approx(2.25, rel=1e-6)
    assert 1 <= limit <= 4.5
    assert dispersive_ratio(f, CHI, 16, -0.01) == pytest.approx(dispersive_ratio(f, CHI, 16, 0.01))
    with pytest.raises(ValueError):
        dispersive_ratio(f, CHI, 16, 0.1)


def test_weyl_rhs_values():
    f = sample_generic(0)
    for N in (2, 5, 8):
        assert weyl_rhs(f, N, 0.0) == (4 * N + 1) ** 2 * N**2
    rng = np.random.default_rng(4)
    for t in rng.uniform(0, 100, 10):
        assert weyl_rhs(f, 6, t) <= 25**2 * 36


def test_weyl_rhs_matches_loop():
    f, N, t = sample_generic(7), 4, 0.731
    total = 0.0
    for r1 in range(-2 * N, 2 * N + 1):
        for r2 in range(-2 * N, 2 * N + 1):
            term = 1.0
            for L in (r1 + f.beta * r2, f.beta * r1 + f.alpha * r2):
                y = 2 * t * L
                d = abs(y - round(y))
                term *= N if d == 0 else min(N, 1 / d)
            total += term
    assert weyl_rhs(f, N, t) == pytest.approx(total, rel=1e-12)


def test_weyl_majorant_small_sweep():
    rng = np.random.default_rng(5)
    worst = 0.0
    for s in range(100):
        f = sample_generic(s)
        t, x = rng.uniform(0, 10), rng.uniform(0, 1, 2)
        worst = max(worst, abs(kernel_direct(f, CHI, 8, t, x)) ** 2 / weyl_rhs(f, 8, t))
    assert worst <= 8


def test_sweep_table_csv_and_order():
    tab = SweepTable(sample_generic(1), 1)
    tab.append(KernelSample(8, 0.1, 3.0, 128, 3), 5.0, 0.5)
    with pytest.raises(ValueError):
        tab.append(KernelSample(8, 0.1, 3.0, 128, 3))
    lines = tab.to_csv().splitlines()
    assert lines[0] == "N,t,sup_abs,weyl_rhs,ratio_disp,seed"
    assert lines[1] == "8,0.1,3.0,5.0,0.5,1"


def test_log_times_endpoints():
    ts = log_times(1e-3, 10.0, 5)
    assert ts[0] == pytest.approx(1e-3) and ts[-1] == pytest.approx(10.0)
    assert np.all(np.diff(np.log(ts)) == pytest.approx(np.log(10)))


def test_l4_integral_basics():
    f = sample_generic(2)  # norm 1
    dt = 1 / (8 * 64)
    assert l4_time_integral(f, CHI, 8, 1.0, dt).value == 0.0
    r = l4_time_integral(f, CHI, 8, 4.0, dt)
    assert 0 < r.value <= 3.0 * kernel_peak(CHI, 8) ** 4
    half = l4_time_integral(f, CHI, 8, 4.0, dt / 2)
    assert abs(half.value / r.value - 1) < 0.02
    with pytest.raises(ValueError):
        l4_time_integral(f, CHI, 8, 4.0, 2 * dt)


def test_l4_prefix_sums_match_single_runs():
    f = sample_generic(2)
    dt = 1 / (8 * 64)
    multi = l4_time_integrals(f, CHI, 8, [2.0, 3.0], dt)
    for T, r in zip((2.0, 3.0), multi):
        assert r.value == pytest.approx(l4_time_integral(f, CHI, 8, T, dt).value, rel=1e-9)


def test_integer_form_is_periodic():
    f = QuadForm(1.0, 0.0)
    a = sup_over_x(f, CHI, 6, 0.3).sup_abs
    assert sup_over_x(f, CHI, 6, 1.3).sup_abs == pytest.approx(a, rel=1e-9)
