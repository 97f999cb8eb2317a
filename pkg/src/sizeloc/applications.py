"""Interval-valued regression through the support loss, and interval robust-constraint checks."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import qr

from .errors import DataError, StructuralError, ValidationError
from .sphere import two_point_1d

COND_WARN = 1e10
RANK_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class IntervalDataset:
    """Responses Y_i = [c_i - r_i, c_i + r_i] with covariate rows x_i."""

    x: np.ndarray
    c: np.ndarray
    r: np.ndarray
    columns: tuple = ()

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.x, dtype=float))
        c = np.asarray(self.c, dtype=float).reshape(-1)
        r = np.asarray(self.r, dtype=float).reshape(-1)
        if x.shape[0] != c.size or c.size != r.size:
            raise StructuralError(f"row counts differ: x has {x.shape[0]}, c has {c.size}, r has {r.size}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(c)) and np.all(np.isfinite(r))):
            raise DataError("dataset contains non-finite values")
        if np.any(r < 0):
            raise DataError(f"radius must be >= 0; row {int(np.argmax(r < 0))} has r={r[r < 0][0]}")
        if x.shape[0] <= x.shape[1]:
            raise DataError(f"need more rows than covariates, got n={x.shape[0]}, p={x.shape[1]}")
        cols = tuple(self.columns) or tuple(f"x{j + 1}" for j in range(x.shape[1]))
        if len(cols) != x.shape[1]:
            raise StructuralError("column names do not match the covariate count")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "columns", cols)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    @classmethod
    def from_csv(cls, path) -> "IntervalDataset":
        """Read columns x1..xp, c, r (header required)."""
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise DataError(f"{path}: empty file")
        header = [h.strip() for h in rows[0]]
        if "c" not in header or "r" not in header:
            raise DataError(f"{path}: header must contain 'c' and 'r' columns, got {header}")
        xcols = [h for h in header if h not in ("c", "r")]
        if not xcols:
            raise DataError(f"{path}: no covariate columns")
        try:
            data = np.array([[float(v) for v in row] for row in rows[1:] if row], dtype=float)
        except ValueError as exc:
            raise DataError(f"{path}: {exc}") from None
        if data.ndim != 2 or data.shape[1] != len(header):
            raise DataError(f"{path}: ragged rows")
        idx = {h: j for j, h in enumerate(header)}
        return cls(data[:, [idx[h] for h in xcols]], data[:, idx["c"]], data[:, idx["r"]], tuple(xcols))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(list(self.columns) + ["c", "r"])
            for xi, ci, ri in zip(self.x, self.c, self.r):
                w.writerow([repr(float(v)) for v in xi] + [repr(float(ci)), repr(float(ri))])


@dataclass(frozen=True)
class IntervalFit:
    beta: np.ndarray
    gamma: np.ndarray
    loss: float
    negative_radius_count: int
    condition_number: float

    def to_dict(self) -> dict:
        return {
            "beta": [float(b) for b in self.beta],
            "gamma": [float(g) for g in self.gamma],
            "loss": float(self.loss),
            "negative_radius_count": int(self.negative_radius_count),
            "condition_number": float(self.condition_number),
        }


def _coef(v, p: int, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size != p:
        raise StructuralError(f"{name} has length {v.size}, expected {p}")
    return v


def support_loss(data: IntervalDataset, beta, gamma) -> float:
    """Mean over rows of the L2(sigma) distance^2 between observed and fitted interval supports on S^0.

    The fitted interval has midpoint x_i.beta and radius |x_i.gamma|.
    """
    beta, gamma = _coef(beta, data.p, "beta"), _coef(gamma, data.p, "gamma")
    s0 = two_point_1d()
    u = s0.nodes[:, 0]
    # h_{[c-r, c+r]}(u) = c u + r |u|
    h_obs = data.c[:, None] * u + data.r[:, None] * np.abs(u)
    h_fit = (data.x @ beta)[:, None] * u + np.abs(data.x @ gamma)[:, None] * np.abs(u)
    d = h_obs - h_fit
    return float(np.mean((d * d) @ s0.weights))


def midpoint_radius_loss(data: IntervalDataset, beta, gamma) -> float:
    beta, gamma = _coef(beta, data.p, "beta"), _coef(gamma, data.p, "gamma")
    em = data.c - data.x @ beta
    er = data.r - np.abs(data.x @ gamma)
    return float(np.mean(em * em) + np.mean(er * er))


def _rank_check(x: np.ndarray, columns: Sequence[str]) -> float:
    _, rmat, perm = qr(x, mode="economic", pivoting=True)
    diag = np.abs(np.diag(rmat))
    tol = RANK_TOL * max(diag[0], np.finfo(float).tiny) if diag.size else 0.0
    bad = np.flatnonzero(diag <= tol)
    if bad.size:
        col = int(perm[bad[0]])
        raise DataError(f"design matrix is rank deficient: column {col} ({columns[col]!r}) is linearly dependent on the others")
    return float(np.linalg.cond(x))


def fit(data: IntervalDataset) -> IntervalFit:
    """Separate least-squares fits of midpoints and radii on the same design.

    Radii are regressed without a sign constraint; rows with x_i.gamma < 0 are
    counted in ``negative_radius_count``.
    """
    cond = _rank_check(data.x, data.columns)
    if cond > COND_WARN:
        warnings.warn(f"design matrix is ill-conditioned (cond={cond:.3g})", stacklevel=2)
    coef, *_ = np.linalg.lstsq(data.x, np.column_stack([data.c, data.r]), rcond=None)
    beta, gamma = coef[:, 0], coef[:, 1]
    neg = int(np.count_nonzero(data.x @ gamma < 0))
    return IntervalFit(beta, gamma, support_loss(data, beta, gamma), neg, cond)


# -- robust constraints with interval data -----------------------------------

@dataclass(frozen=True)
class IntervalRow:
    """Constraint a.x <= b with a_k in [a_lo_k, a_hi_k] and b in [b_lo, b_hi]."""

    a_lo: np.ndarray
    a_hi: np.ndarray
    b_lo: float
    b_hi: float

    def __post_init__(self):
        a_lo = np.asarray(self.a_lo, dtype=float).reshape(-1)
        a_hi = np.asarray(self.a_hi, dtype=float).reshape(-1)
        if a_lo.shape != a_hi.shape:
            raise ValidationError("interval coefficient bounds have different lengths")
        vals = np.concatenate([a_lo, a_hi, [self.b_lo, self.b_hi]])
        if not np.all(np.isfinite(vals)):
            raise ValidationError("interval bounds must be finite")
        if np.any(a_lo > a_hi) or self.b_lo > self.b_hi:
            raise ValidationError("malformed interval: lower bound exceeds upper bound")
        object.__setattr__(self, "a_lo", a_lo)
        object.__setattr__(self, "a_hi", a_hi)
        object.__setattr__(self, "b_lo", float(self.b_lo))
        object.__setattr__(self, "b_hi", float(self.b_hi))

    @classmethod
    def from_dict(cls, data: dict) -> "IntervalRow":
        try:
            a = np.asarray(data["a"], dtype=float)
            b = np.asarray(data["b"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"constraint row must have 'a': [[lo, hi], ...] and 'b': [lo, hi] ({exc})") from None
        if a.ndim != 2 or a.shape[1] != 2 or b.shape != (2,):
            raise ValidationError("constraint row must have 'a': [[lo, hi], ...] and 'b': [lo, hi]")
        return cls(a[:, 0], a[:, 1], b[0], b[1])

    def to_dict(self) -> dict:
        return {"a": [[float(lo), float(hi)] for lo, hi in zip(self.a_lo, self.a_hi)], "b": [self.b_lo, self.b_hi]}


@dataclass(frozen=True)
class RobustCheck:
    feasible: bool
    slack: np.ndarray  # C_j(x) + S_j(x) per row
    center: np.ndarray  # C_j(x)
    spread: np.ndarray  # S_j(x)

    def to_dict(self) -> dict:
        return {
            "feasible": bool(self.feasible),
            "slack": [float(v) for v in self.slack],
            "center": [float(v) for v in self.center],
            "spread": [float(v) for v in self.spread],
        }


def robust_feasible(x, rows: Sequence[IntervalRow]) -> RobustCheck:
    """Check a.x <= b for every realization of the interval data.

    Worst case of row j is C_j(x) + S_j(x), with C the midpoint residual and
    S the radius-weighted |x| spread.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise ValidationError("decision vector must be finite")
    rows = [r if isinstance(r, IntervalRow) else IntervalRow.from_dict(r) for r in rows]
    if not rows:
        raise ValidationError("no constraint rows given")
    center = np.empty(len(rows))
    spread = np.empty(len(rows))
    for j, row in enumerate(rows):
        if row.a_lo.size != x.size:
            raise StructuralError(f"row {j} has {row.a_lo.size} coefficients, x has {x.size}")
        mid_a, rad_a = 0.5 * (row.a_lo + row.a_hi), 0.5 * (row.a_hi - row.a_lo)
        center[j] = mid_a @ x - 0.5 * (row.b_lo + row.b_hi)
        spread[j] = rad_a @ np.abs(x) + 0.5 * (row.b_hi - row.b_lo)
    slack = center + spread
    return RobustCheck(bool(np.max(slack) <= 0.0), slack, center, spread)
