import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from strategies import coord, polygons
from sizeloc.errors import UnsupportedCombinationError, ValidationError
from sizeloc.geometry import (
    Disc2D,
    Interval1D,
    Polygon2D,
    Singleton,
    body_from_dict,
    body_to_dict,
    minkowski_sum,
    negate,
    polygon_steiner_batch,
    scale,
    steiner_exact,
    support_eval,
    translate,
)

TRI = Polygon2D([[0, 0], [1, 0], [0, 1]])


def unit(theta):
    return np.array([math.cos(theta), math.sin(theta)])


def brute_support(points, u):
    return max(float(np.dot(u, p)) for p in points)


def dense_dirs(m=4096):
    t = 2 * math.pi * (np.arange(m) + 0.5) / m
    return np.column_stack([np.cos(t), np.sin(t)])


def test_triangle_support_values():
    assert support_eval(TRI, [1.0, 0.0]) == 1.0
    assert support_eval(TRI, [-1.0, 0.0]) == 0.0
    assert support_eval(TRI, unit(math.pi / 4)) == pytest.approx(math.sqrt(0.5), abs=1e-15)


def test_interval_and_disc_support():
    iv = Interval1D(-1.0, 3.0)
    assert support_eval(iv, [1.0]) == 3.0
    assert support_eval(iv, [-1.0]) == 1.0
    d = Disc2D([1.0, 2.0], 0.5)
    u = unit(0.3)
    assert support_eval(d, u) == pytest.approx(u @ [1.0, 2.0] + 0.5, abs=1e-15)


def test_non_unit_direction_rejected():
    with pytest.raises(ValidationError):
        support_eval(TRI, [1.0, 1.0])


@pytest.mark.parametrize("verts", [
    [[0, 0], [1, 0], [2, 0]],          # collinear
    [[0, 0], [0, 1], [1, 0]],          # clockwise
    [[0, 0], [1, 0], [1, 1], [0.5, 0.2]],  # reflex vertex
    [[0, 0], [1, 0]],
    [[0, 0], [1, 0], [float("nan"), 1]],
])
def test_invalid_polygons(verts):
    with pytest.raises(ValidationError):
        Polygon2D(verts)


def test_interval_order_enforced():
    with pytest.raises(ValidationError):
        Interval1D(2.0, 1.0)


def test_disc_negative_radius():
    with pytest.raises(ValidationError):
        Disc2D([0, 0], -1.0)


def test_canonical_start_makes_equality_order_free():
    a = Polygon2D([[1, 0], [0, 1], [0, 0]])
    assert a == TRI
    assert hash(a) == hash(TRI)


@given(polygons(), st.floats(0, 2 * math.pi))
def test_support_matches_brute_force(p, theta):
    u = unit(theta)
    assert support_eval(p, u) == pytest.approx(brute_support(p.vertices, u), abs=1e-12)


@given(polygons(), polygons())
def test_minkowski_sum_matches_hull_of_pairwise_sums(p, q):
    s = minkowski_sum(p, q)
    pts = (p.vertices[:, None, :] + q.vertices[None, :, :]).reshape(-1, 2)
    hull = ConvexHull(pts)
    dirs = dense_dirs(512)
    expected = np.max(dirs @ pts[hull.vertices].T, axis=1)
    np.testing.assert_allclose(s.support(dirs), expected, atol=1e-10)
    np.testing.assert_allclose(s.support(dirs), p.support(dirs) + q.support(dirs), atol=1e-10)


def test_square_plus_square_drops_collinear_vertices():
    sq = Polygon2D([[0, 0], [1, 0], [1, 1], [0, 1]])
    s = minkowski_sum(sq, sq)
    assert s == Polygon2D([[0, 0], [2, 0], [2, 2], [0, 2]])


def test_minkowski_closed_forms():
    assert minkowski_sum(Interval1D(0, 1), Interval1D(-2, 3)) == Interval1D(-2, 4)
    d = minkowski_sum(Disc2D([1, 0], 1), Disc2D([0, 1], 2))
    assert d == Disc2D([1, 1], 3)
    t = minkowski_sum(TRI, Singleton([2.0, 3.0]))
    assert t == translate(TRI, [2.0, 3.0])


def test_unsupported_minkowski_pairs():
    with pytest.raises(UnsupportedCombinationError):
        minkowski_sum(TRI, Disc2D([0, 0], 1))
    with pytest.raises(ValidationError):
        minkowski_sum(TRI, Interval1D(0, 1))


def test_triangle_steiner_exterior_angles():
    np.testing.assert_allclose(steiner_exact(TRI), [0.375, 0.375], atol=1e-15)


def test_steiner_closed_forms():
    assert steiner_exact(Interval1D(-1, 5))[0] == 2.0
    np.testing.assert_array_equal(steiner_exact(Disc2D([3, -1], 2)), [3, -1])
    np.testing.assert_array_equal(steiner_exact(Singleton([1, 2])), [1, 2])


@given(polygons())
def test_steiner_matches_dense_quadrature(p):
    dirs = dense_dirs(8192)
    quad = 2.0 * (p.support(dirs) @ dirs) / dirs.shape[0]
    np.testing.assert_allclose(steiner_exact(p), quad, atol=1e-4 * (1 + np.abs(p.vertices).max()))


@given(polygons(), polygons(), coord, coord, st.floats(-3, 3))
def test_steiner_equivariance(p, q, cx, cy, a):
    c = np.array([cx, cy])
    np.testing.assert_allclose(steiner_exact(translate(p, c)), steiner_exact(p) + c, atol=1e-10)
    np.testing.assert_allclose(steiner_exact(minkowski_sum(p, q)), steiner_exact(p) + steiner_exact(q), atol=1e-10)
    np.testing.assert_allclose(steiner_exact(scale(p, a)), a * steiner_exact(p), atol=1e-10)


@given(st.lists(polygons(3, 3), min_size=1, max_size=5))
def test_batch_steiner_matches_single(ps):
    tris = [p for p in ps if p.vertices.shape[0] == 3]
    if not tris:
        return
    batch = polygon_steiner_batch(np.stack([p.vertices for p in tris]))
    for b, p in zip(batch, tris):
        np.testing.assert_allclose(b, steiner_exact(p), atol=1e-14)


@given(polygons(), st.floats(0, 2 * math.pi))
def test_negate_support_is_reflected(p, theta):
    u = unit(theta)
    assert support_eval(negate(p), u) == pytest.approx(support_eval(p, -u), abs=1e-12)


def test_scale_zero_is_origin():
    assert scale(TRI, 0.0) == Singleton([0.0, 0.0])


@pytest.mark.parametrize("body", [TRI, Interval1D(-1, 2), Disc2D([1, 2], 3), Singleton([1.5, -2])])
def test_body_dict_round_trip(body):
    assert body_from_dict(body_to_dict(body)) == body


def test_body_from_dict_errors():
    with pytest.raises(ValidationError):
        body_from_dict({"type": "blob"})
    with pytest.raises(ValidationError):
        body_from_dict({"type": "disc", "center": [0, 0]})
