import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sizeloc.decomposition import SeriesProfiles
from sizeloc.errors import InsufficientDataError, ValidationError
from sizeloc.limits import (
    ar1_inflation,
    chebyshev_check,
    ensemble_mean,
    ensemble_norms,
    fit_loglog,
    half_split_stationarity,
    halving_ratios,
    lln_decay_sweep,
    make_grid,
    mse_rate_sweep,
    partial_sum_norm,
)
from sizeloc.process import AR1Params, TriangleParams, disc_profiles, gen_ar1, gen_triangle_series
from sizeloc.sphere import equal_angle_grid

DS = equal_angle_grid(16)


def iid_disc(n, seed):
    return disc_profiles(2.0 + np.random.default_rng(seed).standard_normal(n), DS)


def ar_disc(n, seed, phi=0.6):
    return disc_profiles(gen_ar1(AR1Params(phi, 1.0, 2.0), n, seed), DS)


def test_constant_series_norm_zero():
    xs = disc_profiles(np.full(20, 3.0), DS)
    assert partial_sum_norm(xs, "size", 3.0) == 0.0


def test_single_term_with_population_mean():
    xs = disc_profiles(np.array([2.5]), DS)
    assert partial_sum_norm(xs, "size", 2.0) == pytest.approx(0.5)


def test_iid_energy_is_variance_over_n():
    n = 1024
    norms = np.array([partial_sum_norm(iid_disc(n, s), "size", 2.0) for s in range(200)])
    assert np.mean(norms**2) == pytest.approx(1 / n, rel=0.2)


@given(st.integers(0, 10**6))
def test_partial_sum_energy_additivity(seed):
    xs = SeriesProfiles.from_bodies(gen_triangle_series(TriangleParams(), 30, seed), DS)
    mean_tot = xs.h.mean(axis=0) * 0.9  # any fixed centering profile
    from sizeloc.decomposition import split_parity

    mw, mc = split_parity(mean_tot, DS)
    tot = partial_sum_norm(xs, "tot", mean_tot) ** 2
    parts = partial_sum_norm(xs, "size", mw) ** 2 + partial_sum_norm(xs, "loc", mc) ** 2
    assert tot == pytest.approx(parts, rel=1e-10)


def test_ar1_inflation_closed_form():
    phi, n = 0.6, 50
    k = np.arange(1, n)
    brute = 1 + 2 * sum((1 - kk / n) * phi**kk for kk in k)
    assert ar1_inflation(phi, n) == pytest.approx(brute, rel=1e-14)
    # large-n limit (1 + phi) / (1 - phi)
    assert ar1_inflation(phi, 100_000) == pytest.approx(4.0, rel=1e-3)
    assert ar1_inflation(0.0, 10) == 1.0


def test_ar_energy_inflated_relative_to_iid():
    n, reps = 256, 400
    ar = np.mean([partial_sum_norm(ar_disc(n, s), "size", 2.0) ** 2 for s in range(reps)])
    sd2 = 1.0 / (1 - 0.36)
    assert ar == pytest.approx(sd2 * ar1_inflation(0.6, n) / n, rel=0.15)


def test_chebyshev_bound():
    norms = [partial_sum_norm(iid_disc(256, s), "size", 2.0) for s in range(300)]
    eps = 2 * math.sqrt(1 / 256)
    res = chebyshev_check(norms, eps)
    assert res.empirical_prob <= 0.25 + res.se
    assert not res.violated
    big = chebyshev_check(norms, 1e6)
    assert big.empirical_prob == 0.0 and big.bound < 1e-12


def test_chebyshev_requires_reps():
    with pytest.raises(InsufficientDataError):
        chebyshev_check(np.ones(50), 1.0)
    with pytest.raises(ValidationError):
        chebyshev_check(np.ones(100), 0.0)


def test_decay_sweep_iid_slope():
    sw = lln_decay_sweep(iid_disc, [64, 128, 256, 512, 1024], 300, "size", seed=1)
    assert sw.slope == pytest.approx(-1.0, abs=0.1)
    assert sw.norms_sq.shape == (5, 300)


def test_decay_sweep_degenerate():
    sw = lln_decay_sweep(lambda n, s: disc_profiles(np.full(n, 2.0), DS), [64, 128], 20, "size")
    assert sw.degenerate and math.isnan(sw.slope)


def test_decay_sweep_validation():
    with pytest.raises(ValidationError):
        lln_decay_sweep(iid_disc, [128, 64], 20, "size")
    with pytest.raises(ValidationError):
        lln_decay_sweep(iid_disc, [64, 128], 5, "size")


def test_fit_loglog_drops_outlying_first_point():
    # with few grid points the first point's leverage keeps its residual under
    # 2 RMSE, so a long grid is needed to exercise the rule
    n = 2.0 ** np.arange(6, 18)
    y = 1.0 / n
    y[0] *= 3.0
    slope, _, excluded = fit_loglog(n, y)
    assert excluded == [64]
    assert slope == pytest.approx(-1.0, abs=1e-12)


def test_fit_loglog_keeps_clean_points():
    n = 2.0 ** np.arange(6, 13)
    y = 5.0 / n * (1 + 0.01 * np.sin(np.arange(7)))
    slope, _, excluded = fit_loglog(n, y)
    assert excluded == []
    assert slope == pytest.approx(-1.0, abs=0.02)


def test_ensemble_centering():
    ens = [ar_disc(100, s) for s in range(30)]
    m = ensemble_mean(ens, "size")
    np.testing.assert_allclose(m, np.mean([e.W.mean() for e in ens]))
    assert ensemble_norms(ens, "size").shape == (30,)


def test_mse_sweep_equal_angle_disc_independent_of_m():
    # disc size profiles are constant in u, so M cannot matter on a deterministic grid
    def pair(n, ds, seed):
        r = gen_ar1(AR1Params(0.6, 0.3, 2.0), n, seed)
        xs = disc_profiles(r, ds)
        return xs, xs

    truth = 0.09 / (1 - 0.36)
    cells = mse_rate_sweep(pair, truth, [100], [8, 16, 32], 10, "size", grid="equal_angle")
    mses = [c.mse for c in cells]
    assert mses == pytest.approx([mses[0]] * 3, rel=1e-12)
    assert halving_ratios(cells, "M") == pytest.approx([1.0, 1.0], rel=1e-12)


def test_make_grid():
    assert make_grid("equal_angle", 8).size == 8
    assert make_grid("random", 8, 1).size == 8
    with pytest.raises(ValidationError):
        make_grid("random", 7)
    with pytest.raises(ValidationError):
        make_grid("sobol", 8)


def test_half_split_stationarity():
    assert half_split_stationarity(ar_disc(4000, 1), "size")
    trend = disc_profiles(np.linspace(1, 5, 4000) + 0.01 * np.random.default_rng(0).standard_normal(4000), DS)
    assert not half_split_stationarity(trend, "size")
