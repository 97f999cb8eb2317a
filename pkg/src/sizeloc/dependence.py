"""Size, location and total covariance/correlation for pairs of set-valued series.

Per-direction covariances are Bessel-corrected sample covariances across time,
with centering pointwise in u, and are then integrated over the direction set.
Undefined correlations (a variance at or below the floor) are reported as None.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .decomposition import SeriesProfiles
from .errors import DegeneracyError, InsufficientDataError, StructuralError, ValidationError

COMPONENTS = ("size", "loc", "loc_res", "tot")
MIXING_COMPONENTS = ("size", "loc", "tot")
VAR_FLOOR = 1e-12
CLAMP_TOL = 1e-12


def _check_pair(xs: SeriesProfiles, ys: SeriesProfiles) -> None:
    if not xs.ds.same_as(ys.ds):
        raise StructuralError(f"series use different direction sets ({xs.ds.ident} vs {ys.ds.ident})")
    if xs.n != ys.n:
        raise StructuralError(f"series lengths differ: {xs.n} vs {ys.n}")
    if xs.n < 2:
        raise InsufficientDataError(f"covariance needs n >= 2, got n={xs.n}")


def _check_comp(comp: str) -> None:
    if comp not in COMPONENTS:
        raise ValidationError(f"unknown component {comp!r}; expected one of {COMPONENTS}")


def _centered(a: np.ndarray) -> np.ndarray:
    return a - a.mean(axis=0)


def node_covariance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Bessel-corrected covariance of two ``(n, N)`` matrices, column by column."""
    n = a.shape[0]
    return np.einsum("ij,ij->j", _centered(a), _centered(b)) / (n - 1)


def cov_component(xs: SeriesProfiles, ys: SeriesProfiles, comp: str) -> float:
    _check_comp(comp)
    _check_pair(xs, ys)
    return xs.ds.integrate(node_covariance(xs.component(comp), ys.component(comp)))


def _floor(series: SeriesProfiles) -> float:
    return VAR_FLOOR * max(series.scale2, np.finfo(float).tiny)


def _corr(cov: float, vx: float, vy: float, floor_x: float, floor_y: float) -> Optional[float]:
    if vx <= floor_x or vy <= floor_y:
        return None
    r = cov / math.sqrt(vx * vy)
    if abs(r) > 1.0:
        if abs(r) - 1.0 > CLAMP_TOL:
            raise DegeneracyError(f"correlation {r!r} exceeds 1 beyond rounding tolerance")
        r = math.copysign(1.0, r)
    return r


def corr_component(xs: SeriesProfiles, ys: SeriesProfiles, comp: str) -> Optional[float]:
    """cov / sqrt(var_x var_y), or None when either variance is degenerate."""
    cov = cov_component(xs, ys, comp)
    vx = cov_component(xs, xs, comp)
    vy = cov_component(ys, ys, comp)
    return _corr(cov, vx, vy, _floor(xs), _floor(ys))


def steiner_trace_cov(sx: np.ndarray, sy: np.ndarray) -> float:
    """tr of the Bessel-corrected cross-covariance of two point sequences."""
    n = sx.shape[0]
    return float(np.sum(_centered(sx) * _centered(sy)) / (n - 1))


@dataclass(frozen=True)
class DependenceReport:
    n: int
    cov_size: float
    cov_loc: float
    cov_loc_res: float
    cov_tot: float
    var_size_x: float
    var_loc_x: float
    var_loc_res_x: float
    var_tot_x: float
    var_size_y: float
    var_loc_y: float
    var_loc_res_y: float
    var_tot_y: float
    corr_size: Optional[float]
    corr_loc: Optional[float]
    corr_loc_res: Optional[float]
    corr_tot: Optional[float]
    kappa_size: Optional[float]
    kappa_loc: Optional[float]
    pi_size_x: Optional[float]
    pi_loc_x: Optional[float]
    pi_size_y: Optional[float]
    pi_loc_y: Optional[float]
    corr_steiner: Optional[float]

    def to_dict(self) -> dict:
        return asdict(self)


REPORT_COLUMNS = tuple(DependenceReport.__dataclass_fields__)


def report(xs: SeriesProfiles, ys: SeriesProfiles) -> DependenceReport:
    _check_pair(xs, ys)
    fx, fy = _floor(xs), _floor(ys)
    cx = {c: _centered(xs.component(c)) for c in COMPONENTS}
    cy = {c: _centered(ys.component(c)) for c in COMPONENTS}
    n, w = xs.n, xs.ds.weights

    def icov(a, b):
        return float(np.einsum("ij,ij->j", a, b) @ w / (n - 1))

    cov = {c: icov(cx[c], cy[c]) for c in COMPONENTS}
    vx = {c: icov(cx[c], cx[c]) for c in COMPONENTS}
    vy = {c: icov(cy[c], cy[c]) for c in COMPONENTS}
    corr = {c: _corr(cov[c], vx[c], vy[c], fx, fy) for c in COMPONENTS}

    kappa_size = kappa_loc = None
    pi_x = pi_y = (None, None)
    tot_ok_x, tot_ok_y = vx["tot"] > fx, vy["tot"] > fy
    if tot_ok_x:
        pi_x = (vx["size"] / vx["tot"], vx["loc"] / vx["tot"])
    if tot_ok_y:
        pi_y = (vy["size"] / vy["tot"], vy["loc"] / vy["tot"])
    if tot_ok_x and tot_ok_y:
        denom = math.sqrt(vx["tot"] * vy["tot"])
        kappa_size, kappa_loc = cov["size"] / denom, cov["loc"] / denom

    sx, sy = xs.steiner, ys.steiner
    fsx = VAR_FLOOR * max(float(np.mean(sx * sx)), 0.0) + np.finfo(float).tiny
    fsy = VAR_FLOOR * max(float(np.mean(sy * sy)), 0.0) + np.finfo(float).tiny
    corr_steiner = _corr(
        steiner_trace_cov(sx, sy), steiner_trace_cov(sx, sx), steiner_trace_cov(sy, sy),
        max(fsx, fx), max(fsy, fy),
    )

    return DependenceReport(
        n=n,
        cov_size=cov["size"], cov_loc=cov["loc"], cov_loc_res=cov["loc_res"], cov_tot=cov["tot"],
        var_size_x=vx["size"], var_loc_x=vx["loc"], var_loc_res_x=vx["loc_res"], var_tot_x=vx["tot"],
        var_size_y=vy["size"], var_loc_y=vy["loc"], var_loc_res_y=vy["loc_res"], var_tot_y=vy["tot"],
        corr_size=corr["size"], corr_loc=corr["loc"], corr_loc_res=corr["loc_res"], corr_tot=corr["tot"],
        kappa_size=kappa_size, kappa_loc=kappa_loc,
        pi_size_x=pi_x[0], pi_loc_x=pi_x[1], pi_size_y=pi_y[0], pi_loc_y=pi_y[1],
        corr_steiner=corr_steiner,
    )


def psd_check(series_list: Sequence[SeriesProfiles], comp: str) -> tuple[np.ndarray, float]:
    """Matrix of pairwise integrated covariances and its smallest eigenvalue."""
    _check_comp(comp)
    if len(series_list) < 1:
        raise InsufficientDataError("psd_check needs at least one series")
    first = series_list[0]
    for s in series_list:
        _check_pair(first, s)
    m = len(series_list)
    centered = [_centered(s.component(comp)) for s in series_list]
    a = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            a[i, j] = a[j, i] = float(np.einsum("ij,ij->j", centered[i], centered[j]) @ first.ds.weights / (first.n - 1))
    return a, float(np.linalg.eigvalsh(a)[0])


def lag_corr_proxy(xs: SeriesProfiles, k: int, comp: Optional[str] = None) -> Optional[float]:
    """Linear-correlation lower bound for the compatible rho-mixing coefficient.

    Max over components (or the one requested) and over sampled directions of
    |Pearson corr(Phi_i(u), Phi_{i+k}(u))|. Directions where either lagged
    slice has (near) zero variance are skipped; returns None if all are.
    """
    k = int(k)
    if k < 0 or k >= xs.n - 2:
        raise ValidationError(f"lag must satisfy 0 <= k < n - 2 = {xs.n - 2}, got {k}")
    comps = MIXING_COMPONENTS if comp is None else (comp,)
    floor = _floor(xs)
    best = None
    for c in comps:
        _check_comp(c)
        phi = xs.component(c)
        a = _centered(phi[: xs.n - k])
        b = _centered(phi[k:])
        va = np.einsum("ij,ij->j", a, a)
        vb = np.einsum("ij,ij->j", b, b)
        cab = np.einsum("ij,ij->j", a, b)
        m = xs.n - k
        ok = (va / (m - 1) > floor) & (vb / (m - 1) > floor)
        if not ok.any():
            continue
        r = float(np.max(np.abs(cab[ok]) / np.sqrt(va[ok] * vb[ok])))
        r = min(r, 1.0)
        best = r if best is None else max(best, r)
    return best


def lag_corr_sweep(xs: SeriesProfiles, lags: Sequence[int]) -> list[dict]:
    """Rows of (k, proxy_size, proxy_loc, proxy_tot)."""
    return [
        {"k": int(k), **{f"proxy_{c}": lag_corr_proxy(xs, k, c) for c in MIXING_COMPONENTS}}
        for k in lags
    ]
