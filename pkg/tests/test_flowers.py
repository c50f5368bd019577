"""Union boundary envelopes of stabbed cliques, checked pointwise."""

import math

import numpy as np
from hypothesis import given, settings, strategies as st

from diskpath.flowers import (MAX_PIECES_DISK, MAX_PIECES_TRI, build_flowers,
                              contains_points, locate_pieces, rho_at)

TWO_PI = 2.0 * math.pi


def ray_disk(px, py, cx, cy, r, theta):
    # farthest intersection of the ray from (px, py) with the circle;
    # assumes the ray origin is inside the disk
    dx, dy = math.cos(theta), math.sin(theta)
    ex, ey = cx - px, cy - py
    b = ex * dx + ey * dy
    disc = r * r - (ex * ex + ey * ey - b * b)
    return b + math.sqrt(disc)


def ray_triangle(px, py, verts, theta):
    dx, dy = math.cos(theta), math.sin(theta)
    best = -math.inf
    for i in range(3):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % 3]
        ex, ey = bx - ax, by - ay
        den = dx * ey - dy * ex
        if den == 0.0:
            continue
        t = ((ax - px) * ey - (ay - py) * ex) / den
        s = ((ax - px) * dy - (ay - py) * dx) / den
        if -1e-12 <= s <= 1 + 1e-12 and t > best:
            best = t
    return best


def envelope_brute(kind, stab, objs, theta):
    px, py = stab
    if kind == "disks":
        return max(ray_disk(px, py, c[0], c[1], c[2], theta) for c in objs)
    return max(ray_triangle(px, py, v, theta) for v in objs)


def eval_flower(fs, theta):
    cids = np.zeros(theta.shape[0], dtype=np.int64)
    pids = locate_pieces(fs, cids, theta)
    return rho_at(fs, pids, theta)


def random_disk_clique(rng, m):
    # every disk strictly contains the stab point (0.5, 0.5)
    ang = rng.uniform(0, TWO_PI, m)
    d = rng.uniform(0.0, 0.15, m)
    cx = 0.5 + d * np.cos(ang)
    cy = 0.5 + d * np.sin(ang)
    r = d + rng.uniform(0.02, 0.25, m)
    return cx, cy, r


def random_tri_clique(rng, m):
    verts = np.empty((m, 3, 2))
    for i in range(m):
        gaps = rng.uniform(0.6, 2.4, 3)
        gaps *= TWO_PI / gaps.sum()
        phi = rng.uniform(0, TWO_PI) + np.concatenate([[0], np.cumsum(gaps[:2])])
        rad = rng.uniform(0.08, 0.35, 3)
        verts[i, :, 0] = 0.5 + rad * np.cos(phi)
        verts[i, :, 1] = 0.5 + rad * np.sin(phi)
    return verts


def test_two_disk_flower_pieces():
    # unit disks at (0,0) and (1,0) stabbed at (0.5,0): the circles meet
    # at (0.5, +-sqrt(3)/2), so the boundary splits at angles +-pi/2
    cx = np.array([0.0, 1.0])
    cy = np.zeros(2)
    r = np.ones(2)
    fs = build_flowers("disks", np.array([[0.5, 0.0]]), np.array([0, 2]),
                       np.array([0, 1]), cx=cx, cy=cy, r=r)
    assert fs.n_pieces == 2
    assert np.allclose(np.sort(fs.tstart), [-math.pi / 2, math.pi / 2])
    th = np.array([0.0, math.pi])
    pids = locate_pieces(fs, np.zeros(2, np.int64), th)
    assert list(fs.src[pids]) == [1, 0]
    assert np.allclose(rho_at(fs, pids, th), [1.5, 1.5])


def test_single_disk_flower_is_full_circle():
    fs = build_flowers("disks", np.array([[0.5, 0.5]]), np.array([0, 1]),
                       np.array([0]), cx=np.array([0.5]), cy=np.array([0.5]),
                       r=np.array([0.2]))
    assert fs.n_pieces == 1
    assert bool(fs.full[0])
    th = np.linspace(-math.pi, math.pi, 50)
    assert np.allclose(eval_flower(fs, th), 0.2)


def test_identical_disks_collapse_to_one_piece():
    # union is idempotent: the duplicate contributes no boundary
    fs = build_flowers("disks", np.array([[0.5, 0.5]]), np.array([0, 2]),
                       np.array([0, 1]), cx=np.array([0.5, 0.5]),
                       cy=np.array([0.5, 0.5]), r=np.array([0.2, 0.2]))
    assert fs.n_pieces == 1
    assert bool(fs.full[0])


def test_single_triangle_flower_has_three_pieces():
    verts = np.array([[[0.2, 0.2], [0.8, 0.3], [0.4, 0.9]]])
    stab = np.array([[0.45, 0.45]])
    fs = build_flowers("triangles", stab, np.array([0, 1]), np.array([0]),
                       verts=verts)
    assert fs.n_pieces == 3
    th = np.linspace(-math.pi, math.pi, 720, endpoint=False)
    want = [envelope_brute("triangles", stab[0], verts, t) for t in th]
    assert np.allclose(eval_flower(fs, th), want, rtol=1e-9, atol=1e-9)


def test_disk_envelope_matches_brute_max():
    rng = np.random.default_rng(7)
    for m in (2, 3, 5, 9):
        cx, cy, r = random_disk_clique(rng, m)
        fs = build_flowers("disks", np.array([[0.5, 0.5]]),
                           np.array([0, m]), np.arange(m), cx=cx, cy=cy, r=r)
        th = np.linspace(-math.pi, math.pi, 1500, endpoint=False)
        want = [envelope_brute("disks", (0.5, 0.5),
                               np.stack([cx, cy, r], 1), t) for t in th]
        assert np.allclose(eval_flower(fs, th), want, rtol=1e-9, atol=1e-9)
        assert fs.n_pieces <= MAX_PIECES_DISK * m


def test_triangle_envelope_matches_brute_max():
    rng = np.random.default_rng(8)
    for m in (2, 3, 6):
        verts = random_tri_clique(rng, m)
        fs = build_flowers("triangles", np.array([[0.5, 0.5]]),
                           np.array([0, m]), np.arange(m), verts=verts)
        th = np.linspace(-math.pi, math.pi, 1500, endpoint=False)
        want = [envelope_brute("triangles", (0.5, 0.5), verts, t) for t in th]
        assert np.allclose(eval_flower(fs, th), want, rtol=1e-9, atol=1e-9)
        assert fs.n_pieces <= MAX_PIECES_TRI * m


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 7))
def test_disk_envelope_property(seed, m):
    rng = np.random.default_rng(seed)
    cx, cy, r = random_disk_clique(rng, m)
    fs = build_flowers("disks", np.array([[0.5, 0.5]]), np.array([0, m]),
                       np.arange(m), cx=cx, cy=cy, r=r)
    th = rng.uniform(-math.pi, math.pi, 200)
    want = [envelope_brute("disks", (0.5, 0.5),
                           np.stack([cx, cy, r], 1), t) for t in th]
    assert np.allclose(eval_flower(fs, th), want, rtol=1e-8, atol=1e-8)


def test_piece_sources_are_member_ids():
    rng = np.random.default_rng(9)
    cx, cy, r = random_disk_clique(rng, 4)
    members = np.array([10, 11, 12, 13])
    full_r = np.zeros(14)
    full_x = np.zeros(14)
    full_y = np.zeros(14)
    full_x[10:] = cx
    full_y[10:] = cy
    full_r[10:] = r
    fs = build_flowers("disks", np.array([[0.5, 0.5]]), np.array([0, 4]),
                       members, cx=full_x, cy=full_y, r=full_r)
    assert set(fs.src.tolist()) <= {10, 11, 12, 13}


def test_contains_points_inside_and_out():
    rng = np.random.default_rng(10)
    cx, cy, r = random_disk_clique(rng, 5)
    fs = build_flowers("disks", np.array([[0.5, 0.5]]), np.array([0, 5]),
                       np.arange(5), cx=cx, cy=cy, r=r)
    # member centers are inside; points just past the envelope are not
    inside = contains_points(fs, np.zeros(5, np.int64), cx, cy)
    assert inside.all()
    th = rng.uniform(-math.pi, math.pi, 40)
    rho = eval_flower(fs, th)
    qx_in = 0.5 + (rho - 1e-6) * np.cos(th)
    qy_in = 0.5 + (rho - 1e-6) * np.sin(th)
    qx_out = 0.5 + (rho + 1e-6) * np.cos(th)
    qy_out = 0.5 + (rho + 1e-6) * np.sin(th)
    zeros = np.zeros(40, np.int64)
    assert contains_points(fs, zeros, qx_in, qy_in).all()
    assert not contains_points(fs, zeros, qx_out, qy_out).any()


def test_contains_points_triangles():
    rng = np.random.default_rng(11)
    verts = random_tri_clique(rng, 3)
    fs = build_flowers("triangles", np.array([[0.5, 0.5]]), np.array([0, 3]),
                       np.arange(3), verts=verts)
    cent = verts.mean(axis=1)
    assert contains_points(fs, np.zeros(3, np.int64),
                           cent[:, 0], cent[:, 1]).all()
    far = np.array([2.0, -1.0])
    assert not contains_points(fs, np.zeros(2, np.int64), far, far).any()


def test_locate_wraps_before_first_piece():
    # two-disk flower splits at +-pi/2; angles below -pi/2 belong to the
    # piece that starts at +pi/2 and wraps through pi
    cx = np.array([0.0, 1.0])
    cy = np.zeros(2)
    r = np.ones(2)
    fs = build_flowers("disks", np.array([[0.5, 0.0]]), np.array([0, 2]),
                       np.array([0, 1]), cx=cx, cy=cy, r=r)
    pid = locate_pieces(fs, np.array([0]), np.array([-math.pi / 2 - 0.1]))
    assert fs.src[pid[0]] == 0


def test_piece_bboxes_cover_samples():
    rng = np.random.default_rng(12)
    cx, cy, r = random_disk_clique(rng, 6)
    fs = build_flowers("disks", np.array([[0.5, 0.5]]), np.array([0, 6]),
                       np.arange(6), cx=cx, cy=cy, r=r)
    th = np.linspace(-math.pi, math.pi, 800, endpoint=False)
    rho = eval_flower(fs, th)
    pids = locate_pieces(fs, np.zeros(800, np.int64), th)
    qx = 0.5 + rho * np.cos(th)
    qy = 0.5 + rho * np.sin(th)
    bb = fs.bbox[pids]
    pad = 1e-9
    ok = ((bb[:, 0] - pad <= qx) & (qx <= bb[:, 2] + pad)
          & (bb[:, 1] - pad <= qy) & (qy <= bb[:, 3] + pad))
    assert ok.all()
