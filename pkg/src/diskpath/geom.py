"""Geometric primitives for disks and fat triangles.

Scalar wrappers (Disk, FatTriangle, objects_intersect, ...) sit on top of
array helpers that broadcast over numpy inputs; the array forms are what the
indexing and BFS layers call. Every predicate uses closed-set semantics, so
touching objects count as intersecting, and comparisons happen on squared
quantities where possible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# Relative slack on the squared center-distance comparison; tangency within
# 1e-12 relative distance counts as touching. Generators keep every pair at
# least 1e-9 * scale away from tangency, so the slack never decides anything
# on generated inputs.
DISK_TOL = 2.0e-12

# Relative slack for cross-product sign tests.
ORIENT_TOL = 1.0e-12

# Radians within which an angle must sit to be snapped to a canonical one.
ANGLE_SNAP = 1.0e-9

DEFAULT_ALPHA = math.pi / 6.0


@dataclass(frozen=True)
class Disk:
    x: float
    y: float
    r: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("disk center must be finite")
        if not (self.r > 0):
            raise ValueError("disk radius must be positive")


class FatTriangle:
    """Triangle with counterclockwise vertices. Clockwise input is reversed."""

    __slots__ = ("verts",)

    def __init__(self, verts):
        v = np.array(verts, dtype=float)
        if v.shape != (3, 2) or not np.all(np.isfinite(v)):
            raise ValueError("triangle needs three finite vertices")
        area2 = orient(v[0, 0], v[0, 1], v[1, 0], v[1, 1], v[2, 0], v[2, 1])
        if area2 == 0.0:
            raise ValueError("degenerate triangle")
        if area2 < 0.0:
            v = v[::-1].copy()
        self.verts = v

    def __repr__(self):
        return "FatTriangle(%r)" % (self.verts.tolist(),)


def size_of(obj) -> float:
    """Side of the smallest axis-aligned enclosing square."""
    if isinstance(obj, Disk):
        return 2.0 * obj.r
    if isinstance(obj, FatTriangle):
        v = obj.verts
        return float(max(v[:, 0].max() - v[:, 0].min(), v[:, 1].max() - v[:, 1].min()))
    raise TypeError("size_of expects Disk or FatTriangle")


def triangle_sizes(verts):
    """Vectorized size for an (n, 3, 2) vertex array."""
    w = verts[:, :, 0].max(axis=1) - verts[:, :, 0].min(axis=1)
    h = verts[:, :, 1].max(axis=1) - verts[:, :, 1].min(axis=1)
    return np.maximum(w, h)


# ---------------------------------------------------------------------------
# predicates

def disks_intersect(ax, ay, ar, bx, by, br):
    dx = ax - bx
    dy = ay - by
    s = ar + br
    return dx * dx + dy * dy <= s * s * (1.0 + DISK_TOL)


def point_in_disk(px, py, cx, cy, r):
    dx = px - cx
    dy = py - cy
    return dx * dx + dy * dy <= r * r * (1.0 + DISK_TOL)


def orient(ax, ay, bx, by, cx, cy):
    """Twice the signed area of (a, b, c); positive for counterclockwise."""
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def orient_sign(ax, ay, bx, by, cx, cy):
    """-1/0/+1 with a relative slack band around zero. Broadcasts."""
    ex = bx - ax
    ey = by - ay
    qx = cx - ax
    qy = cy - ay
    t1 = ex * qy
    t2 = ey * qx
    c = t1 - t2
    slack = ORIENT_TOL * (np.abs(t1) + np.abs(t2))
    return np.where(c > slack, 1, np.where(c < -slack, -1, 0))


def point_in_triangle(verts, px, py):
    """Closed membership in a CCW triangle. verts is (3, 2) or (..., 3, 2)
    matching the broadcast shape of px/py."""
    v = np.asarray(verts, dtype=float)
    inside = np.full(np.broadcast(px, py).shape, True)
    for i in range(3):
        ax = v[..., i, 0]
        ay = v[..., i, 1]
        bx = v[..., (i + 1) % 3, 0]
        by = v[..., (i + 1) % 3, 1]
        t1 = (bx - ax) * (py - ay)
        t2 = (by - ay) * (px - ax)
        c = t1 - t2
        slack = ORIENT_TOL * (np.abs(t1) + np.abs(t2))
        inside = inside & (c >= -slack)
    return inside


def _in_seg_box(cx, cy, ax, ay, bx, by):
    ex = ORIENT_TOL * (np.abs(ax) + np.abs(bx) + np.abs(cx))
    ey = ORIENT_TOL * (np.abs(ay) + np.abs(by) + np.abs(cy))
    okx = (cx >= np.minimum(ax, bx) - ex) & (cx <= np.maximum(ax, bx) + ex)
    oky = (cy >= np.minimum(ay, by) - ey) & (cy <= np.maximum(ay, by) + ey)
    return okx & oky


def segments_intersect(p1x, p1y, p2x, p2y, q1x, q1y, q2x, q2y):
    """Closed segment intersection, collinear overlap included. Broadcasts."""
    d1 = orient_sign(q1x, q1y, q2x, q2y, p1x, p1y)
    d2 = orient_sign(q1x, q1y, q2x, q2y, p2x, p2y)
    d3 = orient_sign(p1x, p1y, p2x, p2y, q1x, q1y)
    d4 = orient_sign(p1x, p1y, p2x, p2y, q2x, q2y)
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)
    touch = ((d1 == 0) & _in_seg_box(p1x, p1y, q1x, q1y, q2x, q2y)) \
        | ((d2 == 0) & _in_seg_box(p2x, p2y, q1x, q1y, q2x, q2y)) \
        | ((d3 == 0) & _in_seg_box(q1x, q1y, p1x, p1y, p2x, p2y)) \
        | ((d4 == 0) & _in_seg_box(q2x, q2y, p1x, p1y, p2x, p2y))
    return proper | touch


def triangles_intersect_pairs(verts_a, verts_b):
    """Pairwise intersection of closed triangles.

    verts_a, verts_b: (p, 3, 2) arrays, row i tested against row i.
    """
    A = np.asarray(verts_a, dtype=float)
    B = np.asarray(verts_b, dtype=float)
    hit = np.zeros(A.shape[0], dtype=bool)
    for k in range(3):
        hit |= point_in_triangle(A, B[:, k, 0], B[:, k, 1])
        hit |= point_in_triangle(B, A[:, k, 0], A[:, k, 1])
    for i in range(3):
        a1 = A[:, i]
        a2 = A[:, (i + 1) % 3]
        for j in range(3):
            b1 = B[:, j]
            b2 = B[:, (j + 1) % 3]
            hit |= segments_intersect(a1[:, 0], a1[:, 1], a2[:, 0], a2[:, 1],
                                      b1[:, 0], b1[:, 1], b2[:, 0], b2[:, 1])
    return hit


def objects_intersect(a, b) -> bool:
    """Edge predicate of the intersection graph. Mixed kinds are an error."""
    if isinstance(a, Disk) and isinstance(b, Disk):
        return bool(disks_intersect(a.x, a.y, a.r, b.x, b.y, b.r))
    if isinstance(a, FatTriangle) and isinstance(b, FatTriangle):
        return bool(triangles_intersect_pairs(a.verts[None], b.verts[None])[0])
    raise TypeError("objects_intersect needs two objects of the same kind")


# ---------------------------------------------------------------------------
# angles, canonical directions and chords

def min_angle(t) -> float:
    """Smallest interior angle of a triangle, in radians."""
    v = t.verts if isinstance(t, FatTriangle) else np.asarray(t, dtype=float)
    if abs(orient(v[0, 0], v[0, 1], v[1, 0], v[1, 1], v[2, 0], v[2, 1])) == 0.0:
        raise ValueError("degenerate triangle has no interior angles")
    best = math.pi
    for i in range(3):
        ux, uy = v[(i + 1) % 3] - v[i]
        wx, wy = v[(i + 2) % 3] - v[i]
        ang = math.atan2(abs(ux * wy - uy * wx), ux * wx + uy * wy)
        best = min(best, ang)
    return best


def min_angles(verts):
    """Vectorized minimum interior angle for an (n, 3, 2) array."""
    v = np.asarray(verts, dtype=float)
    out = np.full(v.shape[0], math.pi)
    for i in range(3):
        u = v[:, (i + 1) % 3] - v[:, i]
        w = v[:, (i + 2) % 3] - v[:, i]
        ang = np.arctan2(np.abs(u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0]),
                         u[:, 0] * w[:, 0] + u[:, 1] * w[:, 1])
        out = np.minimum(out, ang)
    return out


def _n_direction_steps(alpha: float) -> int:
    # floor(4*pi/alpha), nudged so exact divisors are not lost to rounding
    # (4*pi / (pi/6) must give 24, not 23.999...).
    return int(math.floor(4.0 * math.pi / alpha + 1e-9))


def canonical_directions(alpha: float):
    """The direction set {i * alpha/2 : 0 <= i <= floor(4*pi/alpha)}."""
    return np.arange(_n_direction_steps(alpha) + 1, dtype=float) * (alpha / 2.0)


def direction_key(theta: float, alpha: float) -> int:
    """Snap an angle to its canonical index; reject off-grid directions.

    When the set wraps exactly (2*pi is a multiple of alpha/2) the two
    endpoints 0 and 2*pi collapse to the same key, so equal directions always
    share a key.
    """
    half = alpha / 2.0
    k = int(round(theta / half))
    if abs(theta - k * half) > ANGLE_SNAP:
        raise ValueError("direction %r is not canonical for alpha=%r" % (theta, alpha))
    nmax = _n_direction_steps(alpha)
    period = nmax if abs(nmax * half - TWO_PI) <= ANGLE_SNAP else nmax + 1
    return k % period


def _closest_canonical_in_cone(a_start: float, width: float, alpha: float) -> float:
    # Member of the canonical set strictly inside the cone that starts at
    # a_start and sweeps counterclockwise by width. Consecutive members are
    # alpha/2 apart, including across the 2*pi wrap, so any cone of width
    # >= alpha contains one; ties go to the member nearest the bisector.
    dirs = canonical_directions(alpha)
    rel = (dirs - a_start) % TWO_PI
    inside = (rel > 1e-13) & (rel < width - 1e-13)
    if not np.any(inside):
        raise AssertionError("no canonical direction inside a cone of width %r" % width)
    off = np.where(inside, np.abs(rel - width / 2.0), np.inf)
    return float(dirs[int(np.argmin(off))])


def _ray_segment_hit(origin, theta, p, q):
    # Intersection of the ray (origin, theta) with segment [p, q].
    d = np.array([math.cos(theta), math.sin(theta)])
    e = q - p
    denom = d[0] * e[1] - d[1] * e[0]
    if denom == 0.0:
        raise AssertionError("chord ray parallel to the opposite side")
    w = p - origin
    t = (w[0] * e[1] - w[1] * e[0]) / denom
    s = (w[0] * d[1] - w[1] * d[0]) / denom
    if not (t > 0 and -1e-9 <= s <= 1 + 1e-9):
        raise AssertionError("chord ray misses the opposite side")
    return p + min(max(s, 0.0), 1.0) * e


def canonical_chords(t, alpha: float):
    """Three canonical chords of a fat triangle, one per vertex.

    Returns (chords, dirs, points) where chords is (3, 2, 2) as
    [vertex, foot], dirs holds the chord angles (members of the canonical
    set), and points is the 6-point set P: vertices then feet.
    """
    v = t.verts if isinstance(t, FatTriangle) else np.asarray(t, dtype=float)
    if min_angle(v) < alpha - ANGLE_SNAP:
        raise ValueError("triangle is not alpha-fat")
    chords = np.empty((3, 2, 2))
    dirs = np.empty(3)
    for i in range(3):
        nxt = v[(i + 1) % 3]
        prv = v[(i + 2) % 3]
        a_start = math.atan2(nxt[1] - v[i][1], nxt[0] - v[i][0])
        a_end = math.atan2(prv[1] - v[i][1], prv[0] - v[i][0])
        width = (a_end - a_start) % TWO_PI
        theta = _closest_canonical_in_cone(a_start, width, alpha)
        foot = _ray_segment_hit(v[i], theta, nxt, prv)
        chords[i, 0] = v[i]
        chords[i, 1] = foot
        dirs[i] = theta
    points = np.vstack([v, chords[:, 1]])
    return chords, dirs, points


def semi_canonical_parts(t, alpha: float):
    """Split a fat triangle into four triangles with two canonical edges each.

    Returns a list of (tri, apex, d1, d2, base) tuples: tri is the (3, 2) CCW
    piece, apex the vertex joining its two canonical edges, d1/d2 the angles
    of the rays from the apex along those edges, and base the remaining edge
    as a (2, 2) array. The pieces tile the input triangle.
    """
    v = t.verts if isinstance(t, FatTriangle) else np.asarray(t, dtype=float)
    chords, dirs, _ = canonical_chords(v, alpha)
    f0 = chords[0, 1]
    th0 = dirs[0]

    # Chord from v1 inside part (v0, v1, f0): its interior cone runs CCW from
    # the direction v1->f0 to the direction v1->v0, same width as the original
    # angle at v1 because f0 lies on the segment [v1, v2].
    a_start = math.atan2(f0[1] - v[1][1], f0[0] - v[1][0])
    a_end = math.atan2(v[0][1] - v[1][1], v[0][0] - v[1][0])
    th1 = _closest_canonical_in_cone(a_start, (a_end - a_start) % TWO_PI, alpha)
    g1 = _ray_segment_hit(v[1], th1, v[0], f0)

    th2raw, g2 = _part2_chord(v, f0, alpha)

    def ccw(tri):
        tri = np.asarray(tri, dtype=float)
        if orient(tri[0, 0], tri[0, 1], tri[1, 0], tri[1, 1], tri[2, 0], tri[2, 1]) < 0:
            return tri[::-1].copy()
        return tri

    pi_ = math.pi
    parts = [
        (ccw([v[0], v[1], g1]), g1, (th0 + pi_) % TWO_PI, (th1 + pi_) % TWO_PI,
         np.array([v[0], v[1]])),
        (ccw([v[1], f0, g1]), g1, (th1 + pi_) % TWO_PI, th0,
         np.array([v[1], f0])),
        (ccw([v[0], g2, v[2]]), g2, (th0 + pi_) % TWO_PI, (th2raw + pi_) % TWO_PI,
         np.array([v[2], v[0]])),
        (ccw([g2, f0, v[2]]), g2, th0, (th2raw + pi_) % TWO_PI,
         np.array([f0, v[2]])),
    ]
    return parts


def _part2_chord(v, f0, alpha):
    # canonical chord from v2 inside the part (v0, f0, v2)
    a_start = math.atan2(v[0][1] - v[2][1], v[0][0] - v[2][0])
    a_end = math.atan2(f0[1] - v[2][1], f0[0] - v[2][0])
    width = (a_end - a_start) % TWO_PI
    theta = _closest_canonical_in_cone(a_start, width, alpha)
    foot = _ray_segment_hit(v[2], theta, v[0], f0)
    return theta, foot


def reference_point(obj):
    """Disk center, or the centroid for a triangle."""
    if isinstance(obj, Disk):
        return (obj.x, obj.y)
    if isinstance(obj, FatTriangle):
        c = obj.verts.mean(axis=0)
        return (float(c[0]), float(c[1]))
    raise TypeError("reference_point expects Disk or FatTriangle")
