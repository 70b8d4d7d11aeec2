import math

import numpy as np
import pytest

from torus_strichartz.propagator import (
    FourierData,
    bump_data,
    conjecture_bound,
    conjecture_bound_d2_table,
    evolve,
    experiment_csv,
    exponent_fit,
    field_on_grid,
    lp_spacetime_norm,
    max_time_step,
    refocus_search,
    theorem_bounds,
)
from torus_strichartz.quadform import QuadForm, sample_generic

FORM = sample_generic(0)


def random_data(N, seed, K=12):
    rng = np.random.default_rng(seed)
    g = np.arange(-(N - 1), N)
    pts = np.array([(a, b) for a in g for b in g if a * a + b * b < N * N])
    pick = pts[rng.choice(len(pts), size=min(K, len(pts)), replace=False)]
    amps = rng.normal(size=len(pick)) + 1j * rng.normal(size=len(pick))
    return FourierData(pick, amps, N)


def test_fourier_data_validation():
    with pytest.raises(ValueError):
        FourierData([[4, 0]], [1.0], 4)
    with pytest.raises(ValueError):
        FourierData([[1, 0], [0, 1]], [1.0], 4)
    f = FourierData([[1, -2]], [2.0], 4)
    assert f.dense()[1 + 3, -2 + 3] == 2.0 and f.l2 == 2.0


def test_evolve_identity_unitarity_group_law():
    f = random_data(8, 0)
    assert np.array_equal(evolve(FORM, f, 0.0).amps, f.amps)
    g = evolve(FORM, f, 1.234)
    assert g.l2 == pytest.approx(f.l2, rel=1e-12)
    ab = evolve(FORM, evolve(FORM, f, 0.3), 0.45).amps
    assert np.allclose(ab, evolve(FORM, f, 0.75).amps, atol=1e-12)


def test_field_on_grid_matches_direct_sum():
    f = random_data(5, 1, K=6)
    G, t = 40, 0.37
    u = field_on_grid(FORM, f, [t], G)[0]
    g = evolve(FORM, f, t)
    for j1, j2 in [(0, 0), (3, 17), (39, 5)]:
        x = np.array([j1, j2]) / G
        want = np.sum(g.amps * np.exp(2j * np.pi * (g.support @ x)))
        assert u[j1, j2] == pytest.approx(want, abs=1e-11)


@pytest.mark.parametrize("p", [2.0, 3.0, 6.0])
def test_single_mode_norm_is_exact(p):
    f = FourierData([[2, -1]], [1.5], 4)
    for T in (1.0, 2.5):
        r = lp_spacetime_norm(FORM, f, p, T)
        assert r.value == pytest.approx(1.5 * T ** (1 / p), rel=1e-12)


def test_l2_norm_is_conserved():
    f = random_data(6, 2)
    r = lp_spacetime_norm(FORM, f, 2.0, 1.0)
    assert r.value == pytest.approx(f.l2, rel=1e-10)


def test_two_mode_l4_closed_form():
    # |a e1 + b e2|^4 averages to |a|^4 + |b|^4 + 4|a|^2|b|^2 for distinct frequencies
    f = FourierData([[1, 0], [0, 2]], [1.0, 0.5j], 4)
    r = lp_spacetime_norm(FORM, f, 4.0, 1.0)
    assert r.value**4 == pytest.approx(1 + 0.0625 + 4 * 0.25, rel=1e-4)


def test_self_convergence_in_grids():
    f = bump_data(6, "full-bump")
    a = lp_spacetime_norm(FORM, f, 6.0, 1.0).value
    h = max_time_step(FORM, 6)
    b = lp_spacetime_norm(FORM, f, 6.0, 1.0, x_grid=96, t_step=h / 4).value
    assert a == pytest.approx(b, rel=1e-4)


def test_norm_monotone_in_T():
    f = random_data(4, 3)
    vals = [lp_spacetime_norm(FORM, f, 6.0, T).value for T in np.linspace(0.05, 1.0, 12)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_norm_grid_guards():
    f = random_data(4, 4)
    with pytest.raises(ValueError):
        lp_spacetime_norm(FORM, f, 6.0, 1.0, x_grid=16)
    with pytest.raises(ValueError):
        lp_spacetime_norm(FORM, f, 6.0, 1.0, t_step=2 * max_time_step(FORM, 4))
    with pytest.raises(ValueError):
        lp_spacetime_norm(FORM, f, 6.0, 1.0, max_slices=5)


def test_subsampled_norm_close_to_full():
    f = bump_data(4, "full-bump")
    full = lp_spacetime_norm(FORM, f, 6.0, 2.0).value
    sub = lp_spacetime_norm(FORM, f, 6.0, 2.0, max_slices=400, rng=np.random.default_rng(0)).value
    assert sub == pytest.approx(full, rel=0.05)


def test_bound_examples():
    assert conjecture_bound(2, 6, 1, 1) == pytest.approx(1 + 3)
    assert conjecture_bound(1, 6, 16, 1) == pytest.approx(16 ** (0.5 - 0.5) + 1 + 16 ** (0.5 - 0.5))
    with pytest.raises(ValueError):
        conjecture_bound(2, 1.5, 8, 1)


def test_theorem_values():
    weyl, sharp = theorem_bounds(8, 16, 1)
    assert weyl == pytest.approx(16**0.5 + 16 ** (1 / 3))
    assert sharp == pytest.approx(16**0.5 + 16 ** (0.5 - 3 / 8))
    assert theorem_bounds(6, 16, 1)[1] is None
    assert theorem_bounds(12, 16, 2)[1] == pytest.approx(16 ** (2 / 3) + 16 ** (1 / 3) * 2 ** (1 / 12))
    with pytest.raises(ValueError):
        theorem_bounds(4, 16, 1)


@pytest.mark.parametrize("p", [3.0, 5.0, 6.0, 8.0, 12.0])
def test_d2_table_within_constant_of_general(p):
    for N in (4, 64, 1024):
        for T in (1.0, 100.0):
            r = conjecture_bound(2, p, N, T) / conjecture_bound_d2_table(p, N, T)
            assert 1 / 4 <= r <= 4


def test_refocus_integer_and_rational():
    assert refocus_search(QuadForm(2.0, 1.0), 8, 100) == (1, 0.0, 8, True)
    r = refocus_search(QuadForm(5 / 3, 3 / 7), 8, 100)
    assert r.found and r.q <= 21
    assert r.q == 21


def test_refocus_matches_rescan():
    f = sample_generic(5)
    N = 6
    r = refocus_search(f, N, 10**6, chunk=1000)
    q = np.arange(1, r.q + 1)
    worst = np.maximum(np.abs(q * f.alpha - np.rint(q * f.alpha)), np.abs(q * f.beta - np.rint(q * f.beta)))
    assert r.found and worst[-1] < 1 / N**2 and np.all(worst[:-1] >= 1 / N**2)


def test_refocus_not_found():
    r = refocus_search(sample_generic(1), 100, 10)
    assert not r.found and 1 <= r.q <= 10


def test_exponent_fit():
    s, r2 = exponent_fit([(N, 3 * N**1.5) for N in (4, 8, 16, 32)])
    assert s == pytest.approx(1.5) and r2 == pytest.approx(1.0)
    with pytest.raises(ValueError):
        exponent_fit([(4, 1.0)])
    with pytest.raises(ValueError):
        exponent_fit([(4, 1.0), (4, 2.0)])


@pytest.mark.parametrize("kind", ["full-bump", "line"])
def test_bump_data_unit_norm(kind):
    f = bump_data(16, kind)
    assert f.l2 == pytest.approx(1.0)
    assert np.all((f.support**2).sum(axis=1) < 16**2)
    if kind == "line":
        assert np.all(f.support[:, 1] == 0)


def test_indicator_ball():
    f = bump_data(8, "indicator-ball")
    count = sum(1 for a in range(-7, 8) for b in range(-7, 8) if a * a + b * b < 64)
    assert len(f.support) == count and f.l2 == pytest.approx(math.sqrt(count))
    with pytest.raises(ValueError):
        bump_data(8, "ring")


def test_experiment_csv():
    text = experiment_csv([(0, 6.0, 8, 1.0, 2.5, 3.0, 4.0, None, 0.8)])
    assert text.splitlines() == [
        "seed,p,N,T,norm,conj_bound,thm_weyl,thm_p8,ratio",
        "0,6.0,8,1.0,2.5,3.0,4.0,,0.8",
    ]


def test_indicator_ball_p6_exponent():
    # concentration near t = 0 forces ||u||_6 / ||f||_2 >~ N^(1 - 4/6)
    form = sample_generic(0)
    pts = []
    for N in (8, 16, 32):
        f = bump_data(N, "indicator-ball")
        pts.append((N, lp_spacetime_norm(form, f, 6.0, 1.0).value / f.l2))
    slope, _ = exponent_fit(pts)
    assert abs(slope - 1 / 3) <= 0.15
