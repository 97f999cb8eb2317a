"""Convex compact sets in R^1 and R^2: support functions, Minkowski algebra, Steiner points.

Bodies are immutable. Four variants are supported::

    Polygon2D(vertices)      counterclockwise, strictly convex, canonical start vertex
    Interval1D(lo, hi)
    Disc2D(center, radius)
    Singleton(point)         any dimension

Every body exposes ``dim`` and ``support(dirs)`` which evaluates the support
function on an ``(N, dim)`` array of unit directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import UnsupportedCombinationError, ValidationError

UNIT_TOL = 1e-12
CONVEX_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def _canonical_start(vertices: np.ndarray) -> np.ndarray:
    """Rotate a cyclic vertex list so it starts at the lexicographically smallest vertex."""
    start = int(np.lexsort((vertices[:, 1], vertices[:, 0]))[0])
    if start == 0:
        return vertices
    return np.concatenate((vertices[start:], vertices[:start]))


def _turns(vertices: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Incoming edges, outgoing edges and their cross products at each vertex."""
    outgoing = np.concatenate((vertices[1:], vertices[:1])) - vertices
    incoming = np.concatenate((outgoing[-1:], outgoing[:-1]))
    cross = incoming[:, 0] * outgoing[:, 1] - incoming[:, 1] * outgoing[:, 0]
    return incoming, outgoing, cross


def _exterior_angles(vertices: np.ndarray) -> np.ndarray:
    """Turning angle at each vertex of a closed counterclockwise polygon."""
    incoming, outgoing, cross = _turns(vertices)
    dot = np.einsum("ij,ij->i", incoming, outgoing)
    return np.arctan2(cross, dot)


def _check_convex(vertices: np.ndarray) -> None:
    if vertices.ndim != 2 or vertices.shape[1] != 2:
        raise ValidationError(f"polygon vertices must have shape (k, 2), got {vertices.shape}")
    k = vertices.shape[0]
    if k < 3:
        raise ValidationError(f"polygon needs at least 3 vertices, got {k}")
    if not np.all(np.isfinite(vertices)):
        raise ValidationError("polygon vertices must be finite")
    extent = float(np.max(np.ptp(vertices, axis=0)))
    if extent == 0.0:
        raise ValidationError("polygon vertices coincide")
    _, _, cross = _turns(vertices)
    tol = CONVEX_TOL * extent * extent
    bad = np.flatnonzero(cross <= tol)
    if bad.size:
        i = int(bad[0])
        raise ValidationError(
            f"polygon is not strictly convex counterclockwise at vertex {i} "
            f"{vertices[i].tolist()} (turn cross product {cross[i]:.3e})"
        )
    turning = float(np.sum(_exterior_angles(vertices)))
    if abs(turning - 2.0 * math.pi) > 1e-9:
        raise ValidationError(f"polygon winds more than once (total turning {turning:.6f})")


@dataclass(frozen=True, eq=False)
class Polygon2D:
    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        _check_convex(v)
        object.__setattr__(self, "vertices", _frozen(_canonical_start(v)))

    @classmethod
    def _trusted(cls, vertices: np.ndarray) -> "Polygon2D":
        # caller guarantees validity and canonical order; used by batch generators
        obj = object.__new__(cls)
        object.__setattr__(obj, "vertices", vertices)
        return obj

    @classmethod
    def from_points(cls, points) -> "Polygon2D":
        """Convex hull of an arbitrary point cloud (collinear points dropped)."""
        from scipy.spatial import ConvexHull

        pts = np.asarray(points, dtype=float)
        try:
            hull = ConvexHull(pts)
        except Exception as exc:  # qhull raises its own error type
            raise ValidationError(f"cannot build a 2-D hull: {exc}") from None
        return cls(pts[hull.vertices])

    dim = 2

    def support(self, dirs: np.ndarray) -> np.ndarray:
        return np.max(dirs @ self.vertices.T, axis=1)

    def __eq__(self, other):
        return isinstance(other, Polygon2D) and np.array_equal(self.vertices, other.vertices)

    def __hash__(self):
        return hash(self.vertices.tobytes())

    def __repr__(self):
        return f"Polygon2D({self.vertices.tolist()})"


@dataclass(frozen=True)
class Interval1D:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValidationError("interval endpoints must be finite")
        if lo > hi:
            raise ValidationError(f"interval requires lo <= hi, got [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    dim = 1

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def rad(self) -> float:
        return 0.5 * (self.hi - self.lo)

    def support(self, dirs: np.ndarray) -> np.ndarray:
        u = dirs[:, 0]
        return np.maximum(u * self.lo, u * self.hi)


@dataclass(frozen=True, eq=False)
class Disc2D:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.array(self.center, dtype=float)
        r = float(self.radius)
        if c.shape != (2,) or not np.all(np.isfinite(c)):
            raise ValidationError(f"disc center must be a finite 2-vector, got {self.center!r}")
        if not math.isfinite(r) or r < 0:
            raise ValidationError(f"disc radius must be finite and >= 0, got {r}")
        object.__setattr__(self, "center", _frozen(c))
        object.__setattr__(self, "radius", r)

    dim = 2

    def support(self, dirs: np.ndarray) -> np.ndarray:
        return dirs @ self.center + self.radius

    def __eq__(self, other):
        return (
            isinstance(other, Disc2D)
            and np.array_equal(self.center, other.center)
            and self.radius == other.radius
        )

    def __hash__(self):
        return hash((self.center.tobytes(), self.radius))

    def __repr__(self):
        return f"Disc2D(center={self.center.tolist()}, radius={self.radius})"


@dataclass(frozen=True, eq=False)
class Singleton:
    point: np.ndarray

    def __post_init__(self):
        p = np.atleast_1d(np.array(self.point, dtype=float))
        if p.ndim != 1 or p.size not in (1, 2) or not np.all(np.isfinite(p)):
            raise ValidationError(f"singleton point must be a finite 1- or 2-vector, got {self.point!r}")
        object.__setattr__(self, "point", _frozen(p))

    @property
    def dim(self) -> int:
        return self.point.size

    def support(self, dirs: np.ndarray) -> np.ndarray:
        return dirs @ self.point

    def __eq__(self, other):
        return isinstance(other, Singleton) and np.array_equal(self.point, other.point)

    def __hash__(self):
        return hash(self.point.tobytes())

    def __repr__(self):
        return f"Singleton({self.point.tolist()})"


ConvexBody = Union[Polygon2D, Interval1D, Disc2D, Singleton]
_BODY_TYPES = (Polygon2D, Interval1D, Disc2D, Singleton)


def _check_body(body) -> None:
    if not isinstance(body, _BODY_TYPES):
        raise ValidationError(f"not a convex body: {body!r}")


def as_direction(u, dim: int) -> np.ndarray:
    """Validate a single unit direction and return it as a ``(dim,)`` array."""
    arr = np.atleast_1d(np.asarray(u, dtype=float))
    if arr.shape != (dim,):
        raise ValidationError(f"direction must have dimension {dim}, got shape {arr.shape}")
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > UNIT_TOL:
        raise ValidationError(f"direction must be a unit vector, |u| = {norm!r}")
    return arr


def support_eval(body: ConvexBody, u) -> float:
    """Support function sup_{x in body} <u, x> at a single unit direction."""
    _check_body(body)
    d = as_direction(u, body.dim)
    return float(body.support(d[None, :])[0])


def translate(body: ConvexBody, c) -> ConvexBody:
    _check_body(body)
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if c.shape != (body.dim,):
        raise ValidationError(f"translation must have dimension {body.dim}, got shape {c.shape}")
    if isinstance(body, Polygon2D):
        return Polygon2D._trusted(_frozen(_canonical_start(body.vertices + c)))
    if isinstance(body, Interval1D):
        return Interval1D(body.lo + c[0], body.hi + c[0])
    if isinstance(body, Disc2D):
        return Disc2D(body.center + c, body.radius)
    return Singleton(body.point + c)


def negate(body: ConvexBody) -> ConvexBody:
    """The reflected body {-x : x in body}."""
    _check_body(body)
    if isinstance(body, Polygon2D):
        # a half turn keeps counterclockwise order; only the start vertex moves
        return Polygon2D._trusted(_frozen(_canonical_start(-body.vertices)))
    if isinstance(body, Interval1D):
        return Interval1D(-body.hi, -body.lo)
    if isinstance(body, Disc2D):
        return Disc2D(-body.center, body.radius)
    return Singleton(-body.point)


def scale(body: ConvexBody, a: float) -> ConvexBody:
    _check_body(body)
    a = float(a)
    if a == 0.0:
        return Singleton(np.zeros(body.dim))
    if a < 0:
        return negate(scale(body, -a))
    if isinstance(body, Polygon2D):
        return Polygon2D._trusted(_frozen(_canonical_start(a * body.vertices)))
    if isinstance(body, Interval1D):
        return Interval1D(a * body.lo, a * body.hi)
    if isinstance(body, Disc2D):
        return Disc2D(a * body.center, a * body.radius)
    return Singleton(a * body.point)


def _polygon_sum(p: np.ndarray, q: np.ndarray) -> Polygon2D:
    # both inputs start at their lexicographically smallest vertex, whose
    # outgoing edge angles lie in (-pi/2, 3pi/2]; merge edges by angle there
    edges = np.concatenate([_turns(p)[1], _turns(q)[1]])
    ang = np.arctan2(edges[:, 1], edges[:, 0])
    ang = np.where(ang <= -0.5 * math.pi, ang + 2.0 * math.pi, ang)
    edges = edges[np.argsort(ang, kind="stable")]
    pts = p[0] + q[0] + np.concatenate([np.zeros((1, 2)), np.cumsum(edges[:-1], axis=0)])

    # parallel edges from the two inputs leave collinear vertices behind
    extent = max(float(np.max(np.ptp(pts, axis=0))), 1e-300)
    tol = CONVEX_TOL * extent * extent
    keep = pts
    while True:
        cross = _turns(keep)[2]
        mask = cross > tol
        if mask.all() or mask.sum() < 3:
            break
        keep = keep[mask]
    return Polygon2D(keep)


def minkowski_sum(a: ConvexBody, b: ConvexBody) -> ConvexBody:
    """Exact Minkowski sum for representable pairs.

    Raises UnsupportedCombinationError for mixed curved/polygonal pairs such as
    polygon + disc; sum sampled support profiles for those instead.
    """
    _check_body(a)
    _check_body(b)
    if a.dim != b.dim:
        raise ValidationError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if isinstance(a, Singleton):
        return translate(b, a.point)
    if isinstance(b, Singleton):
        return translate(a, b.point)
    if isinstance(a, Interval1D) and isinstance(b, Interval1D):
        return Interval1D(a.lo + b.lo, a.hi + b.hi)
    if isinstance(a, Disc2D) and isinstance(b, Disc2D):
        return Disc2D(a.center + b.center, a.radius + b.radius)
    if isinstance(a, Polygon2D) and isinstance(b, Polygon2D):
        return _polygon_sum(a.vertices, b.vertices)
    raise UnsupportedCombinationError(
        f"Minkowski sum of {type(a).__name__} and {type(b).__name__} is not representable exactly"
    )


def steiner_exact(body: ConvexBody) -> np.ndarray:
    """Steiner point, normalized as s(K) = d * integral of u h_K(u) dsigma(u).

    For polygons this is (1/2pi) * sum_k theta_k v_k with theta_k the exterior
    angle at vertex v_k; for intervals the midpoint; for discs the center.
    """
    _check_body(body)
    if isinstance(body, Polygon2D):
        theta = _exterior_angles(body.vertices)
        return theta @ body.vertices / (2.0 * math.pi)
    if isinstance(body, Interval1D):
        return np.array([body.mid])
    if isinstance(body, Disc2D):
        return np.array(body.center)
    return np.array(body.point)


def polygon_steiner_batch(vertices: np.ndarray) -> np.ndarray:
    """Steiner points of a stack of ``(n, k, 2)`` counterclockwise polygons."""
    k = vertices.shape[1]
    outgoing = vertices[:, (np.arange(k) + 1) % k] - vertices
    incoming = outgoing[:, (np.arange(k) - 1) % k]
    cross = incoming[..., 0] * outgoing[..., 1] - incoming[..., 1] * outgoing[..., 0]
    dot = np.einsum("nkj,nkj->nk", incoming, outgoing)
    theta = np.arctan2(cross, dot)
    return np.einsum("nk,nkj->nj", theta, vertices) / (2.0 * math.pi)


# -- serialization ----------------------------------------------------------

def body_to_dict(body: ConvexBody) -> dict:
    _check_body(body)
    if isinstance(body, Polygon2D):
        return {"type": "polygon", "vertices": body.vertices.tolist()}
    if isinstance(body, Interval1D):
        return {"type": "interval", "lo": body.lo, "hi": body.hi}
    if isinstance(body, Disc2D):
        return {"type": "disc", "center": body.center.tolist(), "radius": body.radius}
    return {"type": "singleton", "point": body.point.tolist()}


def body_from_dict(data: dict) -> ConvexBody:
    if not isinstance(data, dict) or "type" not in data:
        raise ValidationError(f"body JSON must be an object with a 'type' field, got {data!r}")
    kind = data["type"]
    try:
        if kind == "polygon":
            return Polygon2D(data["vertices"])
        if kind == "interval":
            return Interval1D(data["lo"], data["hi"])
        if kind == "disc":
            return Disc2D(data["center"], data["radius"])
        if kind == "singleton":
            return Singleton(data["point"])
    except KeyError as exc:
        raise ValidationError(f"{kind} body is missing field {exc.args[0]!r}") from None
    raise ValidationError(f"unknown body type {kind!r}")
