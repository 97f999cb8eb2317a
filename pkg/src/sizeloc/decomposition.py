"""Sampled support profiles and their even/odd and Steiner-residual parts.

For a body X sampled on an antithetic direction set::

    W(u)     = (h(u) + h(-u)) / 2        size (even) part
    C(u)     = (h(u) - h(-u)) / 2        location (odd) part
    C_res(u) = C(u) - <s(X), u>          location beyond the Steiner point
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DataError, StructuralError, ValidationError
from .geometry import ConvexBody, Polygon2D, _check_body, polygon_steiner_batch, steiner_exact
from .sphere import DirectionSet


@dataclass(frozen=True, eq=False)
class SupportProfile:
    h: np.ndarray
    ds: DirectionSet

    @property
    def ds_ref(self) -> str:
        return self.ds.ident


@dataclass(frozen=True, eq=False)
class DecompProfile:
    W: np.ndarray
    C: np.ndarray
    C_res: np.ndarray
    steiner: np.ndarray
    ds: DirectionSet
    steiner_source: str = "exact"

    @property
    def h(self) -> np.ndarray:
        return self.W + self.C

    def write_csv(self, path) -> None:
        nodes, w = self.ds.nodes, self.ds.weights
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["ux", "uy", "weight", "h", "W", "C", "C_res"])
            for j in range(self.ds.size):
                uy = repr(float(nodes[j, 1])) if self.ds.dim > 1 else ""
                out.writerow(
                    [repr(float(nodes[j, 0])), uy, repr(float(w[j]))]
                    + [repr(float(v[j])) for v in (self.h, self.W, self.C, self.C_res)]
                )


def _check_dims(body: ConvexBody, ds: DirectionSet) -> None:
    if body.dim != ds.dim:
        raise StructuralError(f"body dimension {body.dim} does not match direction set dimension {ds.dim}")


def profile(body: ConvexBody, ds: DirectionSet) -> SupportProfile:
    _check_body(body)
    _check_dims(body, ds)
    return SupportProfile(body.support(ds.nodes), ds)


def quadrature_steiner(h: np.ndarray, ds: DirectionSet) -> np.ndarray:
    """d * sum_j w_j u_j h(u_j); works row-wise on an ``(n, N)`` stack."""
    h = np.asarray(h, dtype=float)
    return ds.dim * (h * ds.weights) @ ds.nodes


def split_parity(h: np.ndarray, ds: DirectionSet) -> tuple[np.ndarray, np.ndarray]:
    """Even and odd parts along the last axis using the stored antipode index."""
    h = np.asarray(h, dtype=float)
    if h.shape[-1] != ds.size:
        raise StructuralError(f"profile has {h.shape[-1]} values, direction set has {ds.size} nodes")
    flipped = np.take(h, ds.antipode, axis=-1)
    return 0.5 * (h + flipped), 0.5 * (h - flipped)


def decompose(p: SupportProfile, steiner=None, source: str = "exact") -> DecompProfile:
    """Split a profile into W, C and C_res.

    ``steiner`` defaults to the quadrature Steiner point of the profile itself,
    in which case ``source`` is recorded as ``"quadrature"``.
    """
    W, C = split_parity(p.h, p.ds)
    if steiner is None:
        steiner, source = quadrature_steiner(p.h, p.ds), "quadrature"
    s = np.atleast_1d(np.asarray(steiner, dtype=float))
    if s.shape != (p.ds.dim,):
        raise ValidationError(f"steiner point must have dimension {p.ds.dim}, got shape {s.shape}")
    return DecompProfile(W, C, C - p.ds.nodes @ s, s, p.ds, source)


def decompose_body(body: ConvexBody, ds: DirectionSet) -> DecompProfile:
    return decompose(profile(body, ds), steiner_exact(body), "exact")


# -- batched evaluation over a series of bodies -----------------------------

def support_matrix(bodies: Sequence[ConvexBody], ds: DirectionSet) -> np.ndarray:
    """``(n, N)`` matrix of support values; polygons of equal size are batched."""
    n = len(bodies)
    h = np.empty((n, ds.size))
    groups: dict[int, list[int]] = {}
    for i, b in enumerate(bodies):
        if isinstance(b, Polygon2D):
            groups.setdefault(b.vertices.shape[0], []).append(i)
        else:
            _check_body(b)
            _check_dims(b, ds)
            h[i] = b.support(ds.nodes)
    if groups and ds.dim != 2:
        raise StructuralError("polygons need a 2-D direction set")
    for idx in groups.values():
        verts = np.stack([bodies[i].vertices for i in idx])
        h[idx] = np.max(verts @ ds.nodes.T, axis=1)
    return h


def steiner_matrix(bodies: Sequence[ConvexBody]) -> np.ndarray:
    """``(n, d)`` exact Steiner points; polygons of equal size are batched."""
    n = len(bodies)
    d = bodies[0].dim if n else 2
    s = np.empty((n, d))
    groups: dict[int, list[int]] = {}
    for i, b in enumerate(bodies):
        if b.dim != d:
            raise StructuralError("bodies in a series must share a dimension")
        if isinstance(b, Polygon2D):
            groups.setdefault(b.vertices.shape[0], []).append(i)
        else:
            s[i] = steiner_exact(b)
    for idx in groups.values():
        s[idx] = polygon_steiner_batch(np.stack([bodies[i].vertices for i in idx]))
    return s


@dataclass(frozen=True, eq=False)
class SeriesProfiles:
    """Decomposed support profiles of a set-valued series on one direction set.

    Rows are time points, columns are direction nodes.
    """

    ds: DirectionSet
    h: np.ndarray
    W: np.ndarray
    C: np.ndarray
    C_res: np.ndarray
    steiner: np.ndarray
    steiner_source: str = "exact"
    _scale2: float = field(default=0.0, repr=False)

    def __post_init__(self):
        n = self.h.shape[0]
        for name in ("h", "W", "C", "C_res"):
            arr = getattr(self, name)
            if arr.shape != (n, self.ds.size):
                raise StructuralError(f"{name} has shape {arr.shape}, expected {(n, self.ds.size)}")
            if not np.all(np.isfinite(arr)):
                raise DataError(f"non-finite values in {name} profile")
        if self.steiner.shape != (n, self.ds.dim) or not np.all(np.isfinite(self.steiner)):
            raise DataError("Steiner points are missing or non-finite")
        object.__setattr__(self, "_scale2", float(np.mean(self.h * self.h)) if n else 0.0)

    @classmethod
    def from_support(cls, h, ds: DirectionSet, steiner=None) -> "SeriesProfiles":
        """Build from an ``(n, N)`` support matrix; quadrature Steiner points if none given."""
        h = np.asarray(h, dtype=float)
        if h.ndim != 2:
            raise StructuralError(f"support matrix must be 2-D, got shape {h.shape}")
        if not np.all(np.isfinite(h)):
            raise DataError("non-finite support values")
        W, C = split_parity(h, ds)
        if steiner is None:
            steiner, source = quadrature_steiner(h, ds), "quadrature"
        else:
            steiner, source = np.asarray(steiner, dtype=float).reshape(h.shape[0], ds.dim), "exact"
        return cls(ds, h, W, C, C - steiner @ ds.nodes.T, steiner, source)

    @classmethod
    def from_bodies(cls, bodies: Sequence[ConvexBody], ds: DirectionSet, steiner: str = "exact") -> "SeriesProfiles":
        if steiner not in ("exact", "quadrature"):
            raise ValidationError(f"steiner must be 'exact' or 'quadrature', got {steiner!r}")
        h = support_matrix(bodies, ds)
        s = steiner_matrix(bodies) if steiner == "exact" else None
        return cls.from_support(h, ds, s)

    @property
    def n(self) -> int:
        return self.h.shape[0]

    def __len__(self):
        return self.n

    def __getitem__(self, i: int) -> DecompProfile:
        return DecompProfile(self.W[i], self.C[i], self.C_res[i], self.steiner[i], self.ds, self.steiner_source)

    @property
    def scale2(self) -> float:
        """Mean squared support value, the data scale used for variance floors."""
        return self._scale2

    def component(self, comp: str) -> np.ndarray:
        try:
            return {"size": self.W, "loc": self.C, "loc_res": self.C_res, "tot": self.h}[comp]
        except KeyError:
            raise ValidationError(f"unknown component {comp!r}; expected size, loc, loc_res or tot") from None
