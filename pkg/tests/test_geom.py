"""Geometry layer: predicates, sizes, angles, canonical chords."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diskpath import geom
from diskpath.geom import Disk, FatTriangle

TWO_PI = 2.0 * math.pi
ALPHA6 = math.pi / 6.0


def circ_close(a, b, tol=1e-9):
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d) < tol


def tri_area(v):
    v = np.asarray(v, dtype=float)
    return 0.5 * abs(geom.orient(v[0, 0], v[0, 1], v[1, 0], v[1, 1],
                                 v[2, 0], v[2, 1]))


# ---------------------------------------------------------------------------
# construction and sizes

def test_disk_validation():
    with pytest.raises(ValueError):
        Disk(0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        Disk(0.0, 0.0, -1.0)
    with pytest.raises(ValueError):
        Disk(math.inf, 0.0, 1.0)


def test_triangle_validation():
    with pytest.raises(ValueError):
        FatTriangle([(0, 0), (1, 1), (2, 2)])
    with pytest.raises(ValueError):
        FatTriangle([(0, 0), (1, 0), (math.nan, 1)])


def test_triangle_cw_input_reversed():
    t = FatTriangle([(0, 0), (0, 1), (1, 0)])
    assert geom.orient(*t.verts[0], *t.verts[1], *t.verts[2]) > 0


def test_sizes():
    assert geom.size_of(Disk(0, 0, 1)) == 2.0
    assert geom.size_of(FatTriangle([(0, 0), (1, 0), (0.5, 0.866)])) == 1.0
    assert geom.size_of(Disk(3, -7, 0.25)) == 0.5


def test_size_of_rejects_other_types():
    with pytest.raises(TypeError):
        geom.size_of((0.0, 0.0, 1.0))


def test_triangle_sizes_vectorized():
    v = np.array([[(0, 0), (1, 0), (0.5, 0.866)],
                  [(0, 0), (4, 0), (0, 3)]], dtype=float)
    assert np.allclose(geom.triangle_sizes(v), [1.0, 4.0])


def test_reference_points():
    assert geom.reference_point(Disk(1, 2, 0.5)) == (1, 2)
    cx, cy = geom.reference_point(FatTriangle([(0, 0), (2, 0), (1, 2)]))
    assert abs(cx - 1.0) < 1e-15 and abs(cy - 2.0 / 3.0) < 1e-15


# ---------------------------------------------------------------------------
# intersection predicates

def test_disk_pairs():
    assert geom.objects_intersect(Disk(0, 0, 1), Disk(1.5, 0, 1))
    assert not geom.objects_intersect(Disk(0, 0, 1), Disk(3, 0, 1))


def test_tangent_disks_touch():
    # closed sets: exact tangency counts as intersecting
    assert geom.objects_intersect(Disk(0, 0, 1), Disk(2, 0, 1))


def test_mixed_kinds_rejected():
    with pytest.raises(TypeError):
        geom.objects_intersect(Disk(0, 0, 1), FatTriangle([(0, 0), (1, 0), (0, 1)]))


def test_triangle_containment_counts():
    outer = FatTriangle([(0, 0), (2, 0), (1, 2)])
    inner = FatTriangle([(1, 0.5), (1.2, 0.6), (1.1, 0.8)])
    assert geom.objects_intersect(outer, inner)
    assert geom.objects_intersect(inner, outer)


def test_star_of_david():
    # edges cross but neither triangle holds a vertex of the other
    s3 = math.sqrt(3) / 2
    t1 = FatTriangle([(0, 1), (-s3, -0.5), (s3, -0.5)])
    t2 = FatTriangle([(0, -1), (s3, 0.5), (-s3, 0.5)])
    for k in range(3):
        assert not geom.point_in_triangle(t1.verts, *t2.verts[k])
        assert not geom.point_in_triangle(t2.verts, *t1.verts[k])
    assert geom.objects_intersect(t1, t2)


def test_disjoint_triangles():
    t1 = FatTriangle([(0, 0), (1, 0), (0.5, 0.9)])
    t2 = FatTriangle([(5, 5), (6, 5), (5.5, 5.9)])
    assert not geom.objects_intersect(t1, t2)


def test_point_in_triangle_boundary():
    v = np.array([(0, 0), (1, 0), (0, 1)], dtype=float)
    assert geom.point_in_triangle(v, 0.0, 0.0)
    assert geom.point_in_triangle(v, 0.5, 0.0)
    assert geom.point_in_triangle(v, 0.5, 0.5)
    assert geom.point_in_triangle(v, 0.25, 0.25)
    assert not geom.point_in_triangle(v, 0.6, 0.6)


def test_segments():
    assert geom.segments_intersect(0, 0, 1, 1, 0, 1, 1, 0)
    assert not geom.segments_intersect(0, 0, 1, 0, 0, 1, 1, 1)
    assert geom.segments_intersect(0, 0, 2, 0, 1, 0, 3, 0)
    assert not geom.segments_intersect(0, 0, 1, 0, 2, 0, 3, 0)
    assert geom.segments_intersect(0, 0, 2, 0, 1, 0, 1, 1)
    assert geom.segments_intersect(0, 0, 2, 0, 2, 0, 3, 5)


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0.01, 5),
       st.floats(-10, 10), st.floats(-10, 10), st.floats(0.01, 5))
def test_disk_predicate_matches_distance(ax, ay, ar, bx, by, br):
    d = math.hypot(ax - bx, ay - by)
    got = bool(geom.disks_intersect(ax, ay, ar, bx, by, br))
    if d < (ar + br) * (1 - 1e-9):
        assert got
    elif d > (ar + br) * (1 + 1e-9):
        assert not got
    assert got == bool(geom.disks_intersect(bx, by, br, ax, ay, ar))


# ---------------------------------------------------------------------------
# angles

def test_min_angle_values():
    s3 = math.sqrt(3) / 2
    assert abs(geom.min_angle([(0, 0), (1, 0), (0.5, s3)]) - math.pi / 3) < 1e-12
    assert abs(geom.min_angle([(0, 0), (1, 0), (0, 1)]) - math.pi / 4) < 1e-12
    assert geom.min_angle([(0, 0), (4, 0), (0, 3)]) == pytest.approx(
        0.6435011087932844, abs=1e-15)


def test_min_angle_degenerate():
    with pytest.raises(ValueError):
        geom.min_angle([(0, 0), (1, 1), (2, 2)])


def test_min_angles_matches_scalar():
    rng = np.random.default_rng(3)
    v = rng.random((40, 3, 2))
    keep = np.abs(geom.orient(v[:, 0, 0], v[:, 0, 1], v[:, 1, 0], v[:, 1, 1],
                              v[:, 2, 0], v[:, 2, 1])) > 1e-6
    v = v[keep]
    batch = geom.min_angles(v)
    for i in range(v.shape[0]):
        assert batch[i] == pytest.approx(geom.min_angle(v[i]), abs=1e-12)


def test_canonical_directions_pi_over_6():
    dirs = geom.canonical_directions(ALPHA6)
    assert len(dirs) == 25
    assert np.allclose(np.diff(dirs), math.pi / 12)
    assert dirs[0] == 0.0
    assert dirs[-1] == pytest.approx(TWO_PI, abs=1e-12)


def test_direction_key():
    assert geom.direction_key(0.0, ALPHA6) == 0
    assert geom.direction_key(math.pi / 12, ALPHA6) == 1
    # the wrapped endpoint is the same direction as 0
    assert geom.direction_key(TWO_PI, ALPHA6) == 0
    assert geom.direction_key(math.pi / 12 + 1e-12, ALPHA6) == 1
    with pytest.raises(ValueError):
        geom.direction_key(0.1, ALPHA6)


# ---------------------------------------------------------------------------
# canonical chords and semi-canonical parts

def fat_triangles(alpha, margin=0.02):
    def build(draw_pts):
        v = np.array(draw_pts, dtype=float).reshape(3, 2)
        return v
    return st.lists(st.floats(0, 1, allow_nan=False), min_size=6, max_size=6) \
        .map(build) \
        .filter(lambda v: tri_area(v) > 1e-4) \
        .map(lambda v: FatTriangle(v)) \
        .filter(lambda t: geom.min_angle(t.verts) >= alpha + margin)


def test_right_isoceles_chord():
    t = FatTriangle([(0, 0), (1, 0), (0, 1)])
    chords, dirs, points = geom.canonical_chords(t, math.pi / 4)
    assert dirs[0] == pytest.approx(math.pi / 4, abs=1e-12)
    assert np.allclose(chords[0, 1], (0.5, 0.5))
    assert points.shape == (6, 2)
    assert np.allclose(points[:3], t.verts)


def test_canonical_chords_rejects_thin_triangle():
    thin = FatTriangle([(0, 0), (1, 0), (0.5, 0.02)])
    with pytest.raises(ValueError):
        geom.canonical_chords(thin, math.pi / 3)


@settings(max_examples=60, deadline=None)
@given(fat_triangles(ALPHA6))
def test_chord_properties(t):
    """Each chord leaves its vertex at a canonical angle and ends on the
    opposite side."""
    chords, dirs, points = geom.canonical_chords(t, ALPHA6)
    members = geom.canonical_directions(ALPHA6)
    for i in range(3):
        assert np.min(np.abs(members - dirs[i])) < 1e-12
        vtx, foot = chords[i]
        assert np.allclose(vtx, t.verts[i])
        e1 = t.verts[(i + 1) % 3]
        e2 = t.verts[(i + 2) % 3]
        assert abs(geom.orient(e1[0], e1[1], e2[0], e2[1], foot[0], foot[1])) < 1e-9
        got = math.atan2(foot[1] - vtx[1], foot[0] - vtx[0])
        assert circ_close(got, dirs[i])


@settings(max_examples=60, deadline=None)
@given(fat_triangles(ALPHA6))
def test_semi_canonical_parts_tile(t):
    parts = geom.semi_canonical_parts(t, ALPHA6)
    assert len(parts) == 4
    total = sum(tri_area(p[0]) for p in parts)
    assert total == pytest.approx(tri_area(t.verts), rel=1e-9)
    for tri, apex, d1, d2, base in parts:
        assert tri_area(tri) > 0
        # apex is a vertex, base joins the other two
        dist_to = [math.hypot(*(tri[i] - apex)) for i in range(3)]
        assert min(dist_to) < 1e-12
        corners = {tuple(np.round(tri[i], 9)) for i in range(3)}
        assert tuple(np.round(base[0], 9)) in corners
        assert tuple(np.round(base[1], 9)) in corners
        # the two apex rays run along the two non-base edges
        others = [tri[i] for i in range(3) if math.hypot(*(tri[i] - apex)) > 1e-12]
        angles = [math.atan2(o[1] - apex[1], o[0] - apex[0]) for o in others]
        for d in (d1, d2):
            assert any(circ_close(a, d, 1e-7) for a in angles)
        # apex rays are canonical up to reversal
        for d in (d1, d2):
            fwd = d % TWO_PI
            rev = (d - math.pi) % TWO_PI
            ok = False
            for cand in (fwd, rev):
                k = round(cand / (ALPHA6 / 2))
                if abs(cand - k * (ALPHA6 / 2)) < 1e-9:
                    ok = True
            assert ok
