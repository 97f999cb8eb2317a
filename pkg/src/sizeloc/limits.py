"""Empirical checks of the sphere-integrated Chebyshev bound, the LLN rate and estimator MSE rates.

Centering of partial sums needs the per-node expectation E Phi(u). Centering
a series by its own sample mean makes the partial sum vanish identically, so
callers pass the expectation explicitly, or the sweeps estimate it by the
ensemble mean across independent replications.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .decomposition import SeriesProfiles
from .dependence import COMPONENTS, cov_component
from .errors import InsufficientDataError, ValidationError
from .sphere import DirectionSet, equal_angle_grid, sample_uniform_antithetic

MIN_CHEBYSHEV_REPS = 100
MIN_SWEEP_REPS = 20


def partial_sum(series: SeriesProfiles, comp: str, mean) -> np.ndarray:
    """S_n(u) = (1/n) sum_i (Phi_i(u) - mean(u)) on the series' nodes."""
    phi = series.component(comp)
    if series.n < 1:
        raise InsufficientDataError("partial sum needs at least one observation")
    m = np.broadcast_to(np.asarray(mean, dtype=float), (series.ds.size,))
    return phi.mean(axis=0) - m


def partial_sum_norm(series: SeriesProfiles, comp: str, mean) -> float:
    """||S_n||_{2,sigma} with the supplied per-node expectation profile."""
    s = partial_sum(series, comp, mean)
    return math.sqrt(series.ds.integrate(s * s))


def ensemble_mean(ensemble: Sequence[SeriesProfiles], comp: str) -> np.ndarray:
    """Per-node mean over all times of all replications."""
    return np.mean([s.component(comp).mean(axis=0) for s in ensemble], axis=0)


def ensemble_norms(ensemble: Sequence[SeriesProfiles], comp: str, mean=None) -> np.ndarray:
    if mean is None:
        mean = ensemble_mean(ensemble, comp)
    return np.array([partial_sum_norm(s, comp, mean) for s in ensemble])


def ar1_inflation(phi: float, n: int) -> float:
    """1 + 2 sum_{k=1}^{n-1} (1 - k/n) phi^k, the AR(1) variance factor of a mean."""
    k = np.arange(1, n)
    return float(1.0 + 2.0 * np.sum((1.0 - k / n) * phi**k))


@dataclass(frozen=True)
class ChebyshevResult:
    eps: float
    empirical_prob: float
    bound: float
    se: float
    reps: int

    @property
    def violated(self) -> bool:
        return self.empirical_prob > self.bound + 3.0 * self.se


def chebyshev_check(norms: Sequence[float], eps: float, var_integral: Optional[float] = None) -> ChebyshevResult:
    """Frequency of ||S_n|| >= eps against (1/eps^2) * integral of Var(S_n(u)).

    ``norms`` holds one partial-sum norm per independent replication. The
    variance integral defaults to its Monte Carlo estimate, the mean of norm^2.
    """
    norms = np.asarray(norms, dtype=float)
    if norms.size < MIN_CHEBYSHEV_REPS:
        raise InsufficientDataError(f"chebyshev_check needs >= {MIN_CHEBYSHEV_REPS} replications, got {norms.size}")
    if eps <= 0:
        raise ValidationError(f"eps must be positive, got {eps}")
    if var_integral is None:
        var_integral = float(np.mean(norms**2))
    p = float(np.mean(norms >= eps))
    se = math.sqrt(max(p * (1.0 - p), 1.0 / norms.size) / norms.size)
    return ChebyshevResult(float(eps), p, float(var_integral) / eps**2, se, int(norms.size))


@dataclass
class DecaySweep:
    n_grid: list
    reps: int
    comp: str
    norms_sq: np.ndarray  # (len(n_grid), reps)
    slope: float
    intercept: float
    degenerate: bool
    excluded: list = field(default_factory=list)

    @property
    def mean_norm_sq(self) -> np.ndarray:
        return self.norms_sq.mean(axis=1)


def fit_loglog(n_grid: Sequence[int], values: Sequence[float]) -> tuple[float, float, list]:
    """Least-squares slope of log(values) on log(n).

    The smallest n is dropped and the fit redone when its residual exceeds
    twice the fit RMSE.
    """
    x, y = np.log(np.asarray(n_grid, dtype=float)), np.log(np.asarray(values, dtype=float))
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    rmse = math.sqrt(float(np.mean(resid**2)))
    excluded = []
    if len(x) > 2 and abs(resid[0]) > 2.0 * rmse:
        excluded.append(int(n_grid[0]))
        slope, icpt = np.polyfit(x[1:], y[1:], 1)
    return float(slope), float(icpt), excluded


def lln_decay_sweep(
    generator: Callable[[int, int], SeriesProfiles],
    n_grid: Sequence[int],
    reps: int,
    comp: str,
    seed: int = 0,
    mean=None,
) -> DecaySweep:
    """Mean ||S_n||^2 over replications for each n and its log-log slope.

    ``generator(n, seed)`` returns one replication. Without ``mean`` each n is
    centered by its own ensemble mean.
    """
    n_grid = [int(n) for n in n_grid]
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValidationError(f"n_grid must be strictly increasing, got {n_grid}")
    if reps < MIN_SWEEP_REPS:
        raise ValidationError(f"reps must be >= {MIN_SWEEP_REPS}, got {reps}")
    if comp not in COMPONENTS:
        raise ValidationError(f"unknown component {comp!r}")
    norms_sq = np.empty((len(n_grid), reps))
    for i, n in enumerate(n_grid):
        ensemble = [generator(n, _sweep_seed(seed, i, r)) for r in range(reps)]
        norms_sq[i] = ensemble_norms(ensemble, comp, mean) ** 2
    means = norms_sq.mean(axis=1)
    scale = max(float(np.max(means)), 0.0)
    if scale == 0.0 or np.any(means <= 1e-300):
        return DecaySweep(n_grid, reps, comp, norms_sq, float("nan"), float("nan"), True)
    slope, icpt, excluded = fit_loglog(n_grid, means)
    return DecaySweep(n_grid, reps, comp, norms_sq, slope, icpt, False, excluded)


def make_grid(grid: str, m: int, seed: int = 0) -> DirectionSet:
    """2-D direction set with ``m`` nodes: equal-angle, or m/2 random antithetic pairs."""
    if grid == "equal_angle":
        return equal_angle_grid(m)
    if grid == "random":
        if int(m) != m or m < 2 or m % 2:
            raise ValidationError(f"random grid needs an even node count, got {m}")
        return sample_uniform_antithetic(int(m) // 2, seed, 2)
    raise ValidationError(f"grid must be 'equal_angle' or 'random', got {grid!r}")


def _sweep_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence(int(seed), spawn_key=key).generate_state(1)[0])


@dataclass(frozen=True)
class RateCell:
    n: int
    M: int
    mse: float
    reps: int


def mse_rate_sweep(
    pair_generator: Callable[[int, DirectionSet, int], tuple[SeriesProfiles, SeriesProfiles]],
    truth: float,
    n_grid: Sequence[int],
    m_grid: Sequence[int],
    reps: int,
    comp: str,
    grid: str = "random",
    seed: int = 0,
) -> list[RateCell]:
    """Empirical MSE of the integrated covariance estimator on an (n, M) grid.

    M is the node count. With ``grid="random"`` each replication draws fresh
    directions (M/2 antithetic pairs, so M must be even).
    """
    make_grid(grid, m_grid[0])  # fail early on a bad grid kind or M
    cells = []
    for i, n in enumerate(n_grid):
        for j, m in enumerate(m_grid):
            err = np.empty(reps)
            for r in range(reps):
                # the data stream ignores j, so every M sees the same series
                ds = make_grid(grid, m, _sweep_seed(seed, i, j, r, 1))
                xs, ys = pair_generator(int(n), ds, _sweep_seed(seed, i, r, 0))
                err[r] = cov_component(xs, ys, comp) - truth
            cells.append(RateCell(int(n), int(m), float(np.mean(err**2)), int(reps)))
    return cells


def halving_ratios(cells: Sequence[RateCell], along: str) -> list[float]:
    """MSE(next) / MSE(prev) for consecutive grid points along ``n`` or ``M``."""
    if along not in ("n", "M"):
        raise ValidationError(f"along must be 'n' or 'M', got {along!r}")
    other = "M" if along == "n" else "n"
    groups: dict = {}
    for c in cells:
        groups.setdefault(getattr(c, other), []).append(c)
    ratios = []
    for _, group in sorted(groups.items()):
        group = sorted(group, key=lambda c: getattr(c, along))
        ratios += [b.mse / a.mse for a, b in zip(group, group[1:])]
    return ratios


def half_split_stationarity(series: SeriesProfiles, comp: str, z: float = 4.0) -> bool:
    """Per-node means of the two halves agree within ``z`` standard errors.

    Standard errors use a Bartlett (Newey-West) long-run variance so that
    serial dependence does not make the check spuriously strict.
    """
    phi = series.component(comp)
    half = series.n // 2
    a, b = phi[:half], phi[half : 2 * half]
    se = np.sqrt(_long_run_var(a) / half + _long_run_var(b) / half)
    diff = np.abs(a.mean(axis=0) - b.mean(axis=0))
    scale = math.sqrt(max(series.scale2, np.finfo(float).tiny))
    return bool(np.all(diff <= z * se + 1e-12 * scale))


def _long_run_var(x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    xc = x - x.mean(axis=0)
    lags = int(math.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))
    v = np.einsum("ij,ij->j", xc, xc) / n
    for k in range(1, min(lags, n - 1) + 1):
        v = v + 2.0 * (1.0 - k / (lags + 1)) * np.einsum("ij,ij->j", xc[:-k], xc[k:]) / n
    return np.maximum(v, 0.0)
