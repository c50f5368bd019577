"""Instance containers, text formats, normalization and generators.

An instance holds n disks (centers + radii) or n alpha-fat triangles
(vertex array + alpha). The text format is line oriented:

    disks 3
    0.5 0.5 0.1
    ...

    triangles 2 0.5235987755982988
    x1 y1 x2 y2 x3 y3
    ...

Result files carry one "id dist parent" line per object, -1 for
unreachable distances and for missing parents.
"""

from __future__ import annotations

import math
from typing import Iterable, List, Optional, Tuple

import numpy as np

from . import geom
from .geom import ANGLE_SNAP, Disk, FatTriangle

# Generated instances keep every pair at least this far (relative to object
# scale) from flipping an intersection predicate.
TANGENCY_GAP = 1e-9

# Minimum clearance of min_angle above alpha for generated triangles.
FATNESS_MARGIN = 1e-2

_REJECTION_CAP = 5000
_FLOAT_FMT = "%.17g"


class Instance:
    """n disks or n alpha-fat triangles, stored as flat arrays."""

    __slots__ = ("kind", "centers", "radii", "verts", "alpha")

    def __init__(self, kind: str, centers=None, radii=None, verts=None,
                 alpha: Optional[float] = None):
        if kind == "disks":
            self.centers = np.asarray(centers, dtype=float).reshape(-1, 2)
            self.radii = np.asarray(radii, dtype=float).reshape(-1)
            if self.centers.shape[0] != self.radii.shape[0]:
                raise ValueError("centers and radii length mismatch")
            if not np.all(np.isfinite(self.centers)) or not np.all(np.isfinite(self.radii)):
                raise ValueError("disk coordinates must be finite")
            if not np.all(self.radii > 0):
                raise ValueError("disk radii must be positive")
            self.verts = None
            self.alpha = None
        elif kind == "triangles":
            v = np.asarray(verts, dtype=float).reshape(-1, 3, 2)
            if not np.all(np.isfinite(v)):
                raise ValueError("triangle vertices must be finite")
            if alpha is None or not (0 < alpha <= math.pi / 3 + ANGLE_SNAP):
                raise ValueError("triangles need alpha in (0, pi/3]")
            cr = geom.orient(v[:, 0, 0], v[:, 0, 1], v[:, 1, 0], v[:, 1, 1],
                             v[:, 2, 0], v[:, 2, 1])
            if np.any(cr == 0.0):
                raise ValueError("degenerate triangle in instance")
            flip = cr < 0.0
            if np.any(flip):
                v = v.copy()
                v[flip] = v[flip, ::-1]
            if np.any(geom.min_angles(v) < alpha - ANGLE_SNAP):
                raise ValueError("instance contains a triangle that is not alpha-fat")
            self.verts = v
            self.alpha = float(alpha)
            self.centers = None
            self.radii = None
        else:
            raise ValueError("kind must be 'disks' or 'triangles'")
        self.kind = kind

    @property
    def n(self) -> int:
        if self.kind == "disks":
            return self.centers.shape[0]
        return self.verts.shape[0]

    def object(self, i: int):
        if self.kind == "disks":
            return Disk(float(self.centers[i, 0]), float(self.centers[i, 1]),
                        float(self.radii[i]))
        return FatTriangle(self.verts[i])

    def objects(self) -> list:
        return [self.object(i) for i in range(self.n)]

    def sizes(self):
        """Side of the smallest enclosing axis-aligned square, per object."""
        if self.kind == "disks":
            return 2.0 * self.radii
        return geom.triangle_sizes(self.verts)

    def ref_points(self):
        """One point inside each object: center, or centroid."""
        if self.kind == "disks":
            return self.centers.copy()
        return self.verts.mean(axis=1)

    def bboxes(self):
        """(n, 4) array of lox, loy, hix, hiy."""
        if self.kind == "disks":
            return np.column_stack([
                self.centers[:, 0] - self.radii,
                self.centers[:, 1] - self.radii,
                self.centers[:, 0] + self.radii,
                self.centers[:, 1] + self.radii,
            ])
        return np.column_stack([
            self.verts[:, :, 0].min(axis=1),
            self.verts[:, :, 1].min(axis=1),
            self.verts[:, :, 0].max(axis=1),
            self.verts[:, :, 1].max(axis=1),
        ])

    def __eq__(self, other):
        if not isinstance(other, Instance) or self.kind != other.kind:
            return NotImplemented
        if self.kind == "disks":
            return (np.array_equal(self.centers, other.centers)
                    and np.array_equal(self.radii, other.radii))
        return (np.array_equal(self.verts, other.verts)
                and self.alpha == other.alpha)

    def __repr__(self):
        return "Instance(%s, n=%d)" % (self.kind, self.n)


# ---------------------------------------------------------------------------
# text formats

def emit_instance(inst: Instance) -> str:
    lines: List[str] = []
    if inst.kind == "disks":
        lines.append("disks %d" % inst.n)
        for i in range(inst.n):
            lines.append(" ".join(_FLOAT_FMT % v for v in
                                  (inst.centers[i, 0], inst.centers[i, 1], inst.radii[i])))
    else:
        lines.append("triangles %d %s" % (inst.n, _FLOAT_FMT % inst.alpha))
        for i in range(inst.n):
            lines.append(" ".join(_FLOAT_FMT % v for v in inst.verts[i].ravel()))
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> Instance:
    rows = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not rows:
        raise ValueError("empty instance file")
    head = rows[0].split()
    kind = head[0]
    if kind == "disks":
        if len(head) != 2:
            raise ValueError("disk header must be 'disks n'")
        n = int(head[1])
        if len(rows) - 1 != n:
            raise ValueError("record count %d does not match n=%d" % (len(rows) - 1, n))
        data = np.array([[float(tok) for tok in ln.split()] for ln in rows[1:]],
                        dtype=float).reshape(n, 3)
        return Instance("disks", centers=data[:, :2], radii=data[:, 2])
    if kind == "triangles":
        if len(head) != 3:
            raise ValueError("triangle header must be 'triangles n alpha'")
        n = int(head[1])
        alpha = float(head[2])
        if len(rows) - 1 != n:
            raise ValueError("record count %d does not match n=%d" % (len(rows) - 1, n))
        data = np.array([[float(tok) for tok in ln.split()] for ln in rows[1:]],
                        dtype=float).reshape(n, 3, 2)
        return Instance("triangles", verts=data, alpha=alpha)
    raise ValueError("unknown kind %r" % kind)


def save_instance(path: str, inst: Instance) -> None:
    with open(path, "w") as fh:
        fh.write(emit_instance(inst))


def load_instance(path: str) -> Instance:
    with open(path) as fh:
        return parse_instance(fh.read())


def format_result(dist, parent) -> str:
    dist = np.asarray(dist)
    parent = np.asarray(parent)
    lines = ["%d %d %d" % (i, dist[i], parent[i]) for i in range(len(dist))]
    return "\n".join(lines) + "\n"


def parse_result(text: str):
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    n = len(rows)
    dist = np.full(n, -1, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    for ln in rows:
        i, d, p = int(ln[0]), int(ln[1]), int(ln[2])
        dist[i] = d
        parent[i] = p
    return dist, parent


# ---------------------------------------------------------------------------
# normalization

def normalize(inst: Instance) -> Tuple[Instance, Tuple[float, float, float]]:
    """Scale and translate so the global bounding square maps into
    [0.05, 0.95]^2.

    Returns (instance, (scale, tx, ty)) with new = old * scale + t.
    Graph distances are invariant: intersection is preserved under
    similarity transforms.
    """
    bb = inst.bboxes()
    lox, loy = bb[:, 0].min(), bb[:, 1].min()
    hix, hiy = bb[:, 2].max(), bb[:, 3].max()
    extent = max(hix - lox, hiy - loy)
    if not (extent > 0) or not math.isfinite(extent):
        raise ValueError("degenerate input: zero spatial extent")
    scale = 0.9 / extent
    # center each axis inside the margin band
    tx = 0.05 + (0.9 - (hix - lox) * scale) / 2.0 - lox * scale
    ty = 0.05 + (0.9 - (hiy - loy) * scale) / 2.0 - loy * scale
    if inst.kind == "disks":
        out = Instance("disks", centers=inst.centers * scale + (tx, ty),
                       radii=inst.radii * scale)
    else:
        out = Instance("triangles", verts=inst.verts * scale + (tx, ty),
                       alpha=inst.alpha)
    return out, (scale, tx, ty)


# ---------------------------------------------------------------------------
# generators

def generate(kind: str, n: int, seed: int, profile: str = "uniform",
             alpha: float = geom.DEFAULT_ALPHA) -> Instance:
    """Deterministic random instance; same arguments give identical output."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if kind == "triangles" and alpha > math.pi / 3 - 2 * FATNESS_MARGIN:
        raise ValueError("generator needs alpha at most pi/3 - %g" % (2 * FATNESS_MARGIN))
    rng = np.random.default_rng(seed)
    if kind == "disks":
        if profile == "uniform":
            centers, radii = _disks_uniform(rng, n)
        elif profile == "cluster":
            centers, radii = _disks_cluster(rng, n)
        elif profile == "path":
            centers, radii = _disks_path(rng, n)
        else:
            raise ValueError("unknown profile %r" % profile)
        if n <= _REJECTION_CAP:
            centers, radii = _separate_disks(rng, centers, radii,
                                             grow_only=(profile == "path"))
        inst = Instance("disks", centers=centers, radii=radii)
        if profile == "path":
            _check_chain(inst)
        return inst
    if kind == "triangles":
        if profile == "uniform":
            verts = _tris_uniform(rng, n, alpha)
        elif profile == "cluster":
            verts = _tris_cluster(rng, n, alpha)
        elif profile == "path":
            verts = _tris_path(rng, n, alpha)
        else:
            raise ValueError("unknown profile %r" % profile)
        if n <= _REJECTION_CAP and profile != "path":
            verts = _separate_triangles(rng, verts, alpha)
        inst = Instance("triangles", verts=verts, alpha=alpha)
        if profile == "path":
            _check_chain(inst)
        return inst
    raise ValueError("kind must be 'disks' or 'triangles'")


def _log_uniform(rng, lo, hi, size):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size))


def _density_cap(n, cap, factor):
    # top of the size range; shrinks like sqrt(log n / n) above a few
    # thousand objects so expected coverage of a point grows with log n
    # rather than n (keeps flower ply and crossing counts linearithmic)
    return min(cap, factor * math.sqrt((1.0 + math.log2(n)) / n))


def _disks_uniform(rng, n):
    centers = rng.uniform(0.0, 1.0, (n, 2))
    hi = _density_cap(n, 1e-1, 1.9)
    radii = _log_uniform(rng, hi / 100.0, hi, n)
    return centers, radii


def _disks_cluster(rng, n):
    k = max(1, int(round(math.sqrt(n) / 2.0)))
    hubs = rng.uniform(0.15, 0.85, (k, 2))
    which = rng.integers(0, k, n)
    centers = hubs[which] + rng.normal(0.0, 0.04, (n, 2))
    centers = np.clip(centers, 0.0, 1.0)
    radii = _log_uniform(rng, 1e-3, 2e-2, n)
    return centers, radii


def _disks_path(rng, n):
    # chain along a reflected random walk; consecutive steps stay strictly
    # shorter than the radius sum so consecutive disks always intersect
    radii = _log_uniform(rng, 5e-3, 3e-2, n)
    centers = np.empty((n, 2))
    pos = np.array([0.1, 0.5])
    heading = 0.0
    centers[0] = pos
    for i in range(1, n):
        heading += rng.uniform(-0.9, 0.9)
        step = (radii[i - 1] + radii[i]) * rng.uniform(0.35, 0.8)
        nxt = pos + step * np.array([math.cos(heading), math.sin(heading)])
        for ax in range(2):
            if nxt[ax] < 0.02:
                nxt[ax] = 0.04 - nxt[ax]
                heading = heading + math.pi / 2
            elif nxt[ax] > 0.98:
                nxt[ax] = 1.96 - nxt[ax]
                heading = heading + math.pi / 2
        pos = nxt
        centers[i] = pos
    return centers, radii


def _near_tangent_offenders(centers, radii, block=1024):
    # higher index of every pair sitting within TANGENCY_GAP of exact outer
    # or internal tangency; chunked so the all-pairs scan stays small
    n = len(radii)
    hit = np.zeros(n, dtype=bool)
    for a in range(0, n, block):
        b = min(a + block, n)
        dx = centers[a:b, None, 0] - centers[None, :, 0]
        dy = centers[a:b, None, 1] - centers[None, :, 1]
        d = np.sqrt(dx * dx + dy * dy)
        s = radii[a:b, None] + radii[None, :]
        m = np.abs(radii[a:b, None] - radii[None, :])
        bad = (np.abs(d - s) < TANGENCY_GAP * s) | (np.abs(d - m) < TANGENCY_GAP * s)
        ii, jj = np.nonzero(bad)
        ii += a
        keep = ii != jj
        ii, jj = ii[keep], jj[keep]
        hit[np.maximum(ii, jj)] = True
    return np.nonzero(hit)[0]


def _separate_disks(rng, centers, radii, grow_only=False, rounds=200):
    """Push every pair away from exact tangency.

    Offending disks are resampled (or, for chains, slightly grown, which
    cannot break an existing intersection). Bounded number of rounds; in
    practice 0 or 1 fire.
    """
    for _ in range(rounds):
        offenders = _near_tangent_offenders(centers, radii)
        if len(offenders) == 0:
            return centers, radii
        if grow_only:
            radii = radii.copy()
            radii[offenders] *= 1.0 + 1e-3
        else:
            centers = centers.copy()
            centers[offenders] = rng.uniform(0.0, 1.0, (len(offenders), 2))
    raise AssertionError("could not separate disks from tangency")


def _fat_shape(rng, alpha, floor=None, cap=200000):
    # unit-extent triangle with min angle comfortably above alpha
    floor = alpha + FATNESS_MARGIN if floor is None else floor
    for _ in range(cap):
        v = rng.uniform(-0.5, 0.5, (3, 2))
        cr = geom.orient(v[0, 0], v[0, 1], v[1, 0], v[1, 1], v[2, 0], v[2, 1])
        if cr == 0.0:
            continue
        if cr < 0.0:
            v = v[::-1]
        if geom.min_angle(v) < floor:
            continue
        ext = max(np.ptp(v[:, 0]), np.ptp(v[:, 1]))
        return (v - v.mean(axis=0)) / ext
    raise AssertionError("rejection sampling found no fat triangle shape")


def _tris_uniform(rng, n, alpha):
    verts = np.empty((n, 3, 2))
    hi = _density_cap(n, 1.5e-1, 2.85)
    sizes = _log_uniform(rng, hi / 50.0, hi, n)
    pos = rng.uniform(0.0, 1.0, (n, 2))
    for i in range(n):
        verts[i] = _fat_shape(rng, alpha) * sizes[i] + pos[i]
    return verts


def _tris_cluster(rng, n, alpha):
    k = max(1, int(round(math.sqrt(n) / 2.0)))
    hubs = rng.uniform(0.15, 0.85, (k, 2))
    which = rng.integers(0, k, n)
    pos = hubs[which] + rng.normal(0.0, 0.04, (n, 2))
    pos = np.clip(pos, 0.0, 1.0)
    sizes = _log_uniform(rng, 2e-3, 3e-2, n)
    verts = np.empty((n, 3, 2))
    for i in range(n):
        verts[i] = _fat_shape(rng, alpha) * sizes[i] + pos[i]
    return verts


def _tris_path(rng, n, alpha):
    # near-equilateral links; the next centroid lands deep inside the
    # previous triangle, so consecutive links overlap robustly
    shape_floor = max(alpha + FATNESS_MARGIN, math.pi / 4)
    sizes = _log_uniform(rng, 8e-3, 4e-2, n)
    verts = np.empty((n, 3, 2))
    pos = np.array([0.1, 0.5])
    heading = 0.0
    for i in range(n):
        shape = _fat_shape(rng, alpha, floor=shape_floor)
        verts[i] = shape * sizes[i] + pos
        if i + 1 < n:
            heading += rng.uniform(-0.9, 0.9)
            step = 0.15 * min(sizes[i], sizes[i + 1])
            nxt = pos + step * np.array([math.cos(heading), math.sin(heading)])
            for ax in range(2):
                if nxt[ax] < 0.05:
                    nxt[ax] = 0.10 - nxt[ax]
                elif nxt[ax] > 0.95:
                    nxt[ax] = 1.90 - nxt[ax]
            pos = nxt
    return verts


def _separate_triangles(rng, verts, alpha, rounds=60):
    """Resample triangles whose intersection status flips under a tiny
    similarity perturbation; survivors are robust against coordinate noise
    far above TANGENCY_GAP."""
    n = verts.shape[0]
    for _ in range(rounds):
        bad = _fragile_rows(verts)
        if not bad.any():
            return verts
        verts = verts.copy()
        sizes = geom.triangle_sizes(verts)
        for i in np.nonzero(bad)[0]:
            verts[i] = _fat_shape(rng, alpha) * sizes[i] + rng.uniform(0.0, 1.0, 2)
    raise AssertionError("could not separate triangles from tangency")


def _fragile_rows(verts):
    n = verts.shape[0]
    cent = verts.mean(axis=1)
    lo = verts.min(axis=1)
    hi = verts.max(axis=1)
    pad = 1e-5 * np.maximum(hi - lo, 1e-12).max(axis=1)
    bad = np.zeros(n, dtype=bool)
    idx = np.arange(n)
    for i in range(n - 1):
        js = idx[i + 1:]
        slack = (pad[js] + pad[i])[:, None]
        near = np.all(lo[js] <= hi[i][None, :] + slack, axis=1) \
            & np.all(hi[js] >= lo[i][None, :] - slack, axis=1)
        js = js[near]
        if len(js) == 0:
            continue
        A = np.broadcast_to(verts[i], (len(js), 3, 2))
        B = verts[js]
        base = geom.triangles_intersect_pairs(A, B)
        ca = cent[i]
        cb = cent[js][:, None, :]
        for f in (1.0 - 1e-6, 1.0 + 1e-6):
            As = (A - ca) * f + ca
            Bs = (B - cb) * f + cb
            flip = geom.triangles_intersect_pairs(As, Bs) != base
            if flip.any():
                bad[js[flip]] = True
    return bad


def _check_chain(inst: Instance) -> None:
    for i in range(inst.n - 1):
        if not geom.objects_intersect(inst.object(i), inst.object(i + 1)):
            raise AssertionError("chain link %d..%d broken" % (i, i + 1))
