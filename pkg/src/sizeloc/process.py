"""Weakly stationary set-valued series: AR(1) triangles (scenarios S1-S4), discs, singletons.

Seed splitting: every random stream is ``SeedSequence(seed, spawn_key=(role, part))``
where ``role`` is 0 for X, 1 for Y and 2 for the auxiliary copy Z, and ``part``
indexes the driving process (0/1 center x/y, 2-4 shape factors, 5 orientation).
Replication ``r`` of a run with base seed ``s`` uses ``replication_seed(s, r)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.signal import lfilter

from .decomposition import SeriesProfiles
from .errors import ConfigError, GenerationError, ValidationError
from .geometry import (
    CONVEX_TOL,
    ConvexBody,
    Disc2D,
    Polygon2D,
    Singleton,
    _canonical_start,
    _frozen,
    minkowski_sum,
    negate,
    polygon_steiner_batch,
    scale,
)
from .sphere import DirectionSet

SCENARIOS = ("S1", "S2", "S3", "S4")
DEFAULT_TEMPLATE = ((0.0, 0.0), (1.4, 0.2), (0.3, 1.0))
RADIUS_FLOOR = 0.05
MAX_CLAMP_FRACTION = 1e-3


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def stream(seed: int, role: int, part: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(seed), spawn_key=(role, part))


def replication_seed(seed: int, rep: int) -> int:
    return int(np.random.SeedSequence(int(seed), spawn_key=(1000, rep)).generate_state(1)[0])


@dataclass(frozen=True)
class AR1Params:
    phi: float
    innovation_sd: float
    mean: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.phi, self.innovation_sd, self.mean)):
            raise ValidationError("AR(1) parameters must be finite")
        if abs(self.phi) >= 1.0:
            raise ValidationError(f"AR(1) requires |phi| < 1 for stationarity, got phi={self.phi}")
        if self.innovation_sd < 0:
            raise ValidationError(f"innovation_sd must be >= 0, got {self.innovation_sd}")

    @property
    def stationary_sd(self) -> float:
        return self.innovation_sd / math.sqrt(1.0 - self.phi**2)


def gen_ar1(p: AR1Params, n: int, seed) -> np.ndarray:
    """Stationary Gaussian AR(1): X_0 from the stationary law, then the recursion."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    z = _rng(seed).standard_normal(n)
    e = p.innovation_sd * z
    e[0] = p.stationary_sd * z[0]
    return p.mean + lfilter([1.0], [1.0, -p.phi], e)


# -- triangles ---------------------------------------------------------------

@dataclass(frozen=True)
class TriangleParams:
    """Template triangle plus AR(1) drivers.

    Shape: three multiplicative factors (mean 1) scale each vertex's offset from
    the template centroid, changing side lengths and skewness together; factors
    are clamped to ``shape_clamp``. Positive factors keep the triangle
    non-degenerate. Each perturbed triangle is re-centered at its Steiner point
    before rotation, so its Steiner point equals the center process exactly.
    """

    base_vertices: tuple = DEFAULT_TEMPLATE
    center_ar: AR1Params = AR1Params(0.6, 0.3, 0.0)
    shape_ar: AR1Params = AR1Params(0.5, 0.15, 1.0)
    orientation_ar: AR1Params = AR1Params(0.7, 0.2, 0.0)
    shape_clamp: tuple = (0.4, 2.5)

    def __post_init__(self):
        v = np.asarray(self.base_vertices, dtype=float)
        if v.shape != (3, 2):
            raise ValidationError(f"base_vertices must be 3 points in R^2, got shape {v.shape}")
        Polygon2D(v)  # validates counterclockwise strict convexity
        lo, hi = self.shape_clamp
        if not 0 < lo <= 1 <= hi:
            raise ValidationError(f"shape_clamp must satisfy 0 < lo <= 1 <= hi, got {self.shape_clamp}")


@dataclass
class TrianglePaths:
    center: np.ndarray  # (n, 2)
    shape: np.ndarray  # (n, 3)
    theta: np.ndarray  # (n,)
    n_clamped: int = 0


def triangle_paths(tp: TriangleParams, n: int, seed: int, role: int = 0) -> TrianglePaths:
    center = np.column_stack([gen_ar1(tp.center_ar, n, stream(seed, role, a)) for a in (0, 1)])
    raw = np.column_stack([gen_ar1(tp.shape_ar, n, stream(seed, role, 2 + k)) for k in range(3)])
    lo, hi = tp.shape_clamp
    shape = np.clip(raw, lo, hi)
    theta = gen_ar1(tp.orientation_ar, n, stream(seed, role, 5))
    return TrianglePaths(center, shape, theta, int(np.count_nonzero(shape != raw)))


def triangle_vertices(tp: TriangleParams, paths: TrianglePaths) -> np.ndarray:
    """``(n, 3, 2)`` vertex stack for the given driving paths."""
    base = np.asarray(tp.base_vertices, dtype=float)
    g = base.mean(axis=0)
    v = g + paths.shape[:, :, None] * (base - g)
    v = v - polygon_steiner_batch(v)[:, None, :]
    c, s = np.cos(paths.theta), np.sin(paths.theta)
    rot = np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)  # (n, 2, 2)
    v = np.einsum("nij,nkj->nki", rot, v)
    return v + paths.center[:, None, :]


def _validate_batch(v: np.ndarray) -> None:
    out = v[:, [1, 2, 0]] - v
    inc = out[:, [2, 0, 1]]
    cross = inc[..., 0] * out[..., 1] - inc[..., 1] * out[..., 0]
    extent = np.max(np.ptp(v, axis=1), axis=1)
    bad = np.flatnonzero(np.any(cross <= CONVEX_TOL * extent[:, None] ** 2, axis=1) | ~np.isfinite(cross).all(axis=1))
    if bad.size:
        i = int(bad[0])
        raise GenerationError(
            f"{bad.size} generated triangles are degenerate; first at t={i} with vertices {v[i].tolist()}"
        )


def polygons_from_stack(v: np.ndarray) -> list[Polygon2D]:
    _validate_batch(v)
    return [Polygon2D._trusted(_frozen(_canonical_start(vi))) for vi in v]


def gen_triangle_series(tp: TriangleParams, n: int, seed: int) -> list[Polygon2D]:
    return polygons_from_stack(triangle_vertices(tp, triangle_paths(tp, n, seed, role=0)))


# -- scenarios ---------------------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    id: str
    n: int
    seed: int
    alpha: Optional[float] = None
    triangle: TriangleParams = field(default_factory=TriangleParams)

    def __post_init__(self):
        if self.id not in SCENARIOS:
            raise ValidationError(f"scenario id must be one of {SCENARIOS}, got {self.id!r}")
        if int(self.n) < 2:
            raise ValidationError(f"scenario length n must be >= 2, got {self.n}")
        if self.id == "S4":
            if self.alpha is None or not 0.0 <= float(self.alpha) <= 1.0:
                raise ValidationError(f"S4 requires alpha in [0, 1], got {self.alpha!r}")


def build_scenario(sc: Scenario) -> tuple[list[ConvexBody], list[ConvexBody]]:
    """Generate the (X, Y) pair of series for one scenario.

    S1  Y = -X.
    S2  Y shares the center path of X; shape and orientation are fresh.
    S3  Y shares shape and orientation paths of X; the center path is fresh.
    S4  Y = (-alpha) X + (1 - alpha) Z with Z an independent copy of X.
    """
    tp, n, seed = sc.triangle, int(sc.n), int(sc.seed)
    px = triangle_paths(tp, n, seed, role=0)
    xs = polygons_from_stack(triangle_vertices(tp, px))
    if sc.id == "S1":
        return xs, [negate(x) for x in xs]
    if sc.id in ("S2", "S3"):
        fresh = triangle_paths(tp, n, seed, role=1)
        if sc.id == "S2":
            py = TrianglePaths(px.center, fresh.shape, fresh.theta)
        else:
            py = TrianglePaths(fresh.center, px.shape, px.theta)
        return xs, polygons_from_stack(triangle_vertices(tp, py))
    alpha = float(sc.alpha)
    zs = polygons_from_stack(triangle_vertices(tp, triangle_paths(tp, n, seed, role=2)))
    ys = [minkowski_sum(scale(x, -alpha), scale(z, 1.0 - alpha)) for x, z in zip(xs, zs)]
    return xs, ys


def _ar_from_dict(data, default: AR1Params, name: str) -> AR1Params:
    if data is None:
        return default
    if not isinstance(data, dict):
        raise ConfigError(f"field '{name}' must be a table/object, got {data!r}")
    unknown = set(data) - {"phi", "innovation_sd", "mean"}
    if unknown:
        raise ConfigError(f"field '{name}' has unknown keys {sorted(unknown)}")
    try:
        return replace(default, **{k: float(v) for k, v in data.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field '{name}': {exc}") from None


def scenario_from_dict(data: dict) -> Scenario:
    """Scenario from a config mapping: {id, n, seed, alpha?, center_ar?, shape_ar?, orientation_ar?, base_vertices?}."""
    allowed = {"id", "n", "seed", "alpha", "center_ar", "shape_ar", "orientation_ar", "base_vertices", "shape_clamp"}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown scenario fields {sorted(unknown)}")
    for key in ("id", "n", "seed"):
        if key not in data:
            raise ConfigError(f"scenario config is missing required field '{key}'")
    base = TriangleParams()
    try:
        tp = TriangleParams(
            base_vertices=tuple(map(tuple, data.get("base_vertices", base.base_vertices))),
            center_ar=_ar_from_dict(data.get("center_ar"), base.center_ar, "center_ar"),
            shape_ar=_ar_from_dict(data.get("shape_ar"), base.shape_ar, "shape_ar"),
            orientation_ar=_ar_from_dict(data.get("orientation_ar"), base.orientation_ar, "orientation_ar"),
            shape_clamp=tuple(data.get("shape_clamp", base.shape_clamp)),
        )
        alpha = data.get("alpha")
        return Scenario(str(data["id"]), int(data["n"]), int(data["seed"]),
                        None if alpha is None else float(alpha), tp)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid scenario config: {exc}") from None


def scenario_to_dict(sc: Scenario) -> dict:
    tp = sc.triangle

    def ar(p):
        return {"phi": p.phi, "innovation_sd": p.innovation_sd, "mean": p.mean}

    out = {
        "id": sc.id, "n": sc.n, "seed": sc.seed,
        "base_vertices": [list(v) for v in tp.base_vertices],
        "center_ar": ar(tp.center_ar), "shape_ar": ar(tp.shape_ar),
        "orientation_ar": ar(tp.orientation_ar), "shape_clamp": list(tp.shape_clamp),
    }
    if sc.alpha is not None:
        out["alpha"] = sc.alpha
    return out


# -- discs and singletons ----------------------------------------------------

DEFAULT_DISC_AR = AR1Params(0.6, 0.3, 2.0)


def gen_disc_radii(r_params: AR1Params, n: int, seed, radius_floor: float = RADIUS_FLOOR) -> tuple[np.ndarray, int]:
    """AR(1) radii floored at ``radius_floor``; also returns how many were floored."""
    r = gen_ar1(r_params, n, seed)
    clamped = int(np.count_nonzero(r < radius_floor))
    return np.maximum(r, radius_floor), clamped


def gen_disc_series(r_params: AR1Params = DEFAULT_DISC_AR, n: int = 1000, seed=0,
                    radius_floor: float = RADIUS_FLOOR) -> list[Disc2D]:
    """Origin-centered discs with AR(1) radius."""
    r, clamped = gen_disc_radii(r_params, n, seed, radius_floor)
    if clamped > MAX_CLAMP_FRACTION * n:
        warnings.warn(f"{clamped}/{n} disc radii hit the floor {radius_floor}; run is not valid", stacklevel=2)
    origin = np.zeros(2)
    return [Disc2D(origin, ri) for ri in r]


def disc_profiles(radii: np.ndarray, ds: DirectionSet) -> SeriesProfiles:
    """Profiles of origin-centered discs straight from their radii."""
    h = np.repeat(np.asarray(radii, dtype=float)[:, None], ds.size, axis=1)
    return SeriesProfiles.from_support(h, ds, np.zeros((len(radii), ds.dim)))


def gen_gaussian_points(cov: np.ndarray, n: int, seed, mean=None) -> np.ndarray:
    """i.i.d. Gaussian rows with the given (possibly singular) covariance."""
    cov = np.asarray(cov, dtype=float)
    lam, vec = np.linalg.eigh(cov)
    if lam[0] < -1e-12 * max(lam[-1], 1.0):
        raise ValidationError("covariance matrix is not positive semidefinite")
    factor = vec * np.sqrt(np.clip(lam, 0.0, None))
    z = _rng(seed).standard_normal((n, cov.shape[0]))
    pts = z @ factor.T
    return pts if mean is None else pts + np.asarray(mean, dtype=float)


def gen_singleton_series(points: np.ndarray) -> list[Singleton]:
    return [Singleton(p) for p in np.asarray(points, dtype=float)]


def singleton_profiles(points: np.ndarray, ds: DirectionSet) -> SeriesProfiles:
    """Profiles of singleton bodies {xi_i}: h = <u, xi_i>, Steiner point xi_i."""
    points = np.asarray(points, dtype=float)
    return SeriesProfiles.from_support(points @ ds.nodes.T, ds, points)


def gaussian_pair_points(cov_diag, rho: float, n: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """(xi_i, eta_i) i.i.d. with xi ~ N(0, D), eta = rho xi + sqrt(1 - rho^2) zeta, zeta ~ N(0, D) independent.

    D = diag(cov_diag), so Cov(xi, eta) = rho D and the integrated location
    covariance on the circle is rho * tr(D) / 2.
    """
    if not -1.0 <= rho <= 1.0:
        raise ValidationError(f"rho must lie in [-1, 1], got {rho}")
    d = np.asarray(cov_diag, dtype=float)
    if d.ndim != 1 or np.any(d < 0):
        raise ValidationError("cov_diag must be a vector of nonnegative variances")
    xi = gen_gaussian_points(np.diag(d), n, stream(seed, 0, 0))
    zeta = gen_gaussian_points(np.diag(d), n, stream(seed, 1, 0))
    return xi, rho * xi + math.sqrt(1.0 - rho * rho) * zeta


def gaussian_pair_profiles(cov_diag, rho: float, n: int, ds: DirectionSet, seed) -> tuple[SeriesProfiles, SeriesProfiles]:
    xi, eta = gaussian_pair_points(cov_diag, rho, n, seed)
    return singleton_profiles(xi, ds), singleton_profiles(eta, ds)
