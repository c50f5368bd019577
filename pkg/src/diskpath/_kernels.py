"""Hot loops, compiled with numba when available.

Every kernel has one implementation; the module exposes a compiled and an
interpreted handle to the same source (``*_fast`` vs ``*_ref``) so tests can
diff the two routes. Keys are Morton codes of 53-bit lattice coordinates,
split into a 54-bit high word and a 52-bit low word (106 bits total); the
y coordinate is flipped before interleaving so key order is NW, NE, SW, SE.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE = os.environ.get("DISKPATH_NO_NUMBA", "") not in ("", "0")

if not _DISABLE:
    try:
        from numba import njit

        HAVE_NUMBA = True
    except Exception:        # pragma: no cover
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False

if not HAVE_NUMBA:
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


FULL = np.int64(1) << 53          # lattice extent per axis
_M26 = (np.int64(1) << 26) - 1

# region types
SQUARE = 0
EMPTY = 1
DONUT = 2


@njit(cache=True)
def _msb(x):
    # index of the highest set bit; x > 0
    r = 0
    if x >= 1 << 32:
        x >>= 32
        r += 32
    if x >= 1 << 16:
        x >>= 16
        r += 16
    if x >= 1 << 8:
        x >>= 8
        r += 8
    if x >= 1 << 4:
        x >>= 4
        r += 4
    if x >= 1 << 2:
        x >>= 2
        r += 2
    if x >= 1 << 1:
        r += 1
    return r


@njit(cache=True)
def _spread(x):
    # interleave zeros between the low 27 bits
    x &= 0x7FFFFFF
    x = (x | (x << 16)) & 0x0000FFFF0000FFFF
    x = (x | (x << 8)) & 0x00FF00FF00FF00FF
    x = (x | (x << 4)) & 0x0F0F0F0F0F0F0F0F
    x = (x | (x << 2)) & 0x3333333333333333
    x = (x | (x << 1)) & 0x5555555555555555
    return x


@njit(cache=True)
def _morton(u, vb):
    # u, vb in [0, 2^53); vb is the flipped y. high word = top 27 bit pairs.
    hi = (_spread(vb >> 26) << 1) | _spread(u >> 26)
    lo = (_spread(vb & _M26) << 1) | _spread(u & _M26)
    return hi, lo


@njit(cache=True)
def _lca_depth(h1, l1, h2, l2):
    # depth of the smallest cell containing both keys; 53 for equal keys
    xh = h1 ^ h2
    if xh != 0:
        g = 52 + _msb(xh)
    else:
        xl = l1 ^ l2
        if xl == 0:
            return 53
        g = _msb(xl)
    return (105 - g) >> 1


@njit(cache=True)
def _quad_at(hi, lo, d):
    # child quadrant chosen when stepping from depth d to d+1
    if d <= 26:
        return (hi >> (52 - 2 * d)) & 3
    return (lo >> (104 - 2 * d)) & 3


@njit(cache=True)
def _key_add(hi, lo, p):
    # add 2^p to the 106-bit pair (hi, lo); p in [0, 105]
    if p >= 52:
        return hi + (np.int64(1) << (p - 52)), lo
    lo = lo + (np.int64(1) << p)
    if lo >= (np.int64(1) << 52):
        hi += lo >> 52
        lo &= (np.int64(1) << 52) - 1
    return hi, lo


@njit(cache=True)
def _key_lt(h1, l1, h2, l2):
    return h1 < h2 or (h1 == h2 and l1 < l2)


@njit(cache=True)
def _lower_bound(khi, klo, a, b, depth, code):
    # first index in [a, b) whose quadrant at `depth` is >= code
    lo, hi = a, b
    while lo < hi:
        mid = (lo + hi) >> 1
        if _quad_at(khi[mid], klo[mid], depth) < code:
            lo = mid + 1
        else:
            hi = mid
    return lo


def _subdivide_impl(khi, klo, u, vb,
                    rtype, rdepth, ru0, rvb0, rhd, rhu0, rhvb0, rpidx,
                    shi, slo, sreg, stack):
    """Compressed-quadtree subdivision of sorted unique keys.

    Emits regions in Z-order and the interval table of the key space: one
    start per covered stretch, ends implicit. A donut (compressed chain)
    covers up to two stretches around its hole. Returns (nreg, nint), or
    (-1, -1) if a buffer would overflow.
    """
    m = khi.shape[0]
    cap_r = rtype.shape[0]
    cap_i = shi.shape[0]
    cap_s = stack.shape[0]
    nreg = 0
    nint = 0
    sp = 0
    # stack row: kind, a, b, depth, u0, vb0, x1, x2
    stack[sp, 0] = 0
    stack[sp, 1] = 0
    stack[sp, 2] = m
    stack[sp, 3] = 0
    stack[sp, 4] = 0
    stack[sp, 5] = 0
    sp += 1
    while sp > 0:
        sp -= 1
        kind = stack[sp, 0]
        if kind == 1:
            # second stretch of a donut, after its hole
            if nint >= cap_i:
                return -1, -1
            shi[nint] = stack[sp, 6]
            slo[nint] = stack[sp, 7]
            sreg[nint] = stack[sp, 1]
            nint += 1
            continue
        a = stack[sp, 1]
        b = stack[sp, 2]
        depth = stack[sp, 3]
        u0 = stack[sp, 4]
        vb0 = stack[sp, 5]
        if nreg >= cap_r or nint >= cap_i or sp + 5 >= cap_s:
            return -1, -1
        if b - a <= 1:
            rtype[nreg] = EMPTY if b == a else SQUARE
            rdepth[nreg] = depth
            ru0[nreg] = u0
            rvb0[nreg] = vb0
            rhd[nreg] = -1
            rhu0[nreg] = -1
            rhvb0[nreg] = -1
            rpidx[nreg] = a if b > a else -1
            h, l = _morton(u0, vb0)
            shi[nint] = h
            slo[nint] = l
            sreg[nint] = nreg
            nint += 1
            nreg += 1
            continue
        dc = _lca_depth(khi[a], klo[a], khi[b - 1], klo[b - 1])
        if dc > depth:
            # all points live in one strictly smaller cell: donut around it
            hs = 53 - dc
            hu0 = (u[a] >> hs) << hs
            hvb0 = (vb[a] >> hs) << hs
            rtype[nreg] = DONUT
            rdepth[nreg] = depth
            ru0[nreg] = u0
            rvb0[nreg] = vb0
            rhd[nreg] = dc
            rhu0[nreg] = hu0
            rhvb0[nreg] = hvb0
            rpidx[nreg] = -1
            ch, cl = _morton(u0, vb0)
            hh, hl = _morton(hu0, hvb0)
            if _key_lt(ch, cl, hh, hl):
                shi[nint] = ch
                slo[nint] = cl
                sreg[nint] = nreg
                nint += 1
            eh, el = _key_add(hh, hl, 106 - 2 * dc)
            oh, ol = _key_add(ch, cl, 106 - 2 * depth)
            if _key_lt(eh, el, oh, ol):
                stack[sp, 0] = 1
                stack[sp, 1] = nreg
                stack[sp, 6] = eh
                stack[sp, 7] = el
                sp += 1
            stack[sp, 0] = 0
            stack[sp, 1] = a
            stack[sp, 2] = b
            stack[sp, 3] = dc
            stack[sp, 4] = hu0
            stack[sp, 5] = hvb0
            sp += 1
            nreg += 1
            continue
        # split into the four quadrants at this depth
        half = np.int64(1) << (52 - depth)
        i1 = _lower_bound(khi, klo, a, b, depth, 1)
        i2 = _lower_bound(khi, klo, i1, b, depth, 2)
        i3 = _lower_bound(khi, klo, i2, b, depth, 3)
        for c in range(3, -1, -1):
            if c == 0:
                ca, cb = a, i1
            elif c == 1:
                ca, cb = i1, i2
            elif c == 2:
                ca, cb = i2, i3
            else:
                ca, cb = i3, b
            stack[sp, 0] = 0
            stack[sp, 1] = ca
            stack[sp, 2] = cb
            stack[sp, 3] = depth + 1
            stack[sp, 4] = u0 + (c & 1) * half
            stack[sp, 5] = vb0 + (c >> 1) * half
            sp += 1
    return nreg, nint


subdivide_ref = _subdivide_impl
if HAVE_NUMBA:
    subdivide_fast = njit(cache=True)(_subdivide_impl)
else:
    subdivide_fast = _subdivide_impl
