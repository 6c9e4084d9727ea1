"""Hot numeric loops shared by the public modules.

Every function here takes and returns plain numpy arrays / floats so that it
compiles under numba. Public wrappers live in the domain modules and do the
validation; nothing in this file checks its inputs.
"""

import numpy as np

from ._accel import USE_NUMBA, kernel


@kernel
def truncvar_prefix(x, eps):
    """Running truncated variations of ``x`` over every prefix ``x[:i+1]``.

    One left-to-right pass tracking alternating eps-extrema. A leg is
    confirmed once the path moves more than ``eps`` away from the running
    extremum; each finished leg adds ``amplitude - eps``. The open leg is
    added provisionally at every index, which is exactly the end-leg rule
    applied to that prefix.

    Returns three arrays ``(ttv, utv, dtv)`` of length ``len(x)``.
    """
    n = x.shape[0]
    ttv = np.zeros(n)
    utv = np.zeros(n)
    dtv = np.zeros(n)
    if n == 0:
        return ttv, utv, dtv

    # Kahan-compensated accumulators for completed up / down legs
    up_sum = 0.0
    up_c = 0.0
    dn_sum = 0.0
    dn_c = 0.0

    direction = 0
    lo = x[0]
    hi = x[0]
    start = x[0]
    ext = x[0]
    for i in range(1, n):
        v = x[i]
        if direction == 0:
            if v < lo:
                lo = v
            if v > hi:
                hi = v
            if v - lo > eps:
                direction = 1
                start = lo
                ext = v
            elif hi - v > eps:
                direction = -1
                start = hi
                ext = v
        elif direction == 1:
            if v > ext:
                ext = v
            elif ext - v > eps:
                y = (ext - start - eps) - up_c
                t = up_sum + y
                up_c = (t - up_sum) - y
                up_sum = t
                direction = -1
                start = ext
                ext = v
        else:
            if v < ext:
                ext = v
            elif v - ext > eps:
                y = (start - ext - eps) - dn_c
                t = dn_sum + y
                dn_c = (t - dn_sum) - y
                dn_sum = t
                direction = 1
                start = ext
                ext = v

        if direction == 1:
            u = up_sum + (ext - start - eps)
            d = dn_sum
        elif direction == -1:
            u = up_sum
            d = dn_sum + (start - ext - eps)
        else:
            u = 0.0
            d = 0.0
        utv[i] = u
        dtv[i] = d
        ttv[i] = u + d
    return ttv, utv, dtv


@kernel
def truncvar_dp(x, eps):
    """Quadratic-time dynamic program for the truncated-variation supremum.

    ``best[j]`` is the largest truncated sum over index chains ending at
    ``j``; since every summand is non-negative the supremum over all chains
    is ``max(best)``. Used only as a reference for the one-pass kernel.
    """
    n = x.shape[0]
    bt = np.zeros(n)
    bu = np.zeros(n)
    bd = np.zeros(n)
    for j in range(1, n):
        xj = x[j]
        mt = 0.0
        mu = 0.0
        md = 0.0
        for i in range(j):
            diff = xj - x[i]
            gt = abs(diff) - eps
            gu = diff - eps
            gd = -diff - eps
            ct = bt[i] + (gt if gt > 0.0 else 0.0)
            cu = bu[i] + (gu if gu > 0.0 else 0.0)
            cd = bd[i] + (gd if gd > 0.0 else 0.0)
            if ct > mt:
                mt = ct
            if cu > mu:
                mu = cu
            if cd > md:
                md = cd
        bt[j] = mt
        bu[j] = mu
        bd[j] = md
    if n == 0:
        return 0.0, 0.0, 0.0
    return bt.max(), bu.max(), bd.max()


@kernel
def backlash(x, h):
    """Play operator with band half-width ``h`` started at ``y[0] = x[0]``."""
    n = x.shape[0]
    y = np.empty(n)
    if n == 0:
        return y
    prev = x[0]
    y[0] = prev
    for i in range(1, n):
        v = x[i]
        upper = v + h
        lower = v - h
        cur = prev
        if cur > upper:
            cur = upper
        if cur < lower:
            cur = lower
        y[i] = cur
        prev = cur
    return y


@kernel
def kahan_sum(a):
    s = 0.0
    c = 0.0
    for i in range(a.shape[0]):
        y = a[i] - c
        t = s + y
        c = (t - s) - y
        s = t
    return s


@kernel
def kahan_cumsum(a):
    n = a.shape[0]
    out = np.empty(n)
    s = 0.0
    c = 0.0
    for i in range(n):
        y = a[i] - c
        t = s + y
        c = (t - s) - y
        s = t
        out[i] = s
    return out


@kernel
def _crossing_counts_loop(x, levels, eps):
    m = levels.shape[0]
    ups = np.zeros(m, dtype=np.int64)
    downs = np.zeros(m, dtype=np.int64)
    n = x.shape[0]
    for k in range(m):
        lo = levels[k]
        hi = lo + eps
        # down family: look for x > hi, then x < lo
        seek_hi = True
        d = 0
        # up family: look for x < lo, then x > hi
        seek_lo = True
        u = 0
        for i in range(n):
            v = x[i]
            if seek_hi:
                if v > hi:
                    seek_hi = False
            elif v < lo:
                d += 1
                seek_hi = True
            if seek_lo:
                if v < lo:
                    seek_lo = False
            elif v > hi:
                u += 1
                seek_lo = True
        ups[k] = u
        downs[k] = d
    return ups, downs


def _crossing_counts_vectorized(x, levels, eps):
    levels = np.asarray(levels, dtype=float)
    his = levels + eps
    m = levels.shape[0]
    ups = np.zeros(m, dtype=np.int64)
    downs = np.zeros(m, dtype=np.int64)
    seek_hi = np.ones(m, dtype=bool)
    seek_lo = np.ones(m, dtype=bool)
    for v in np.asarray(x, dtype=float):
        above = v > his
        below = v < levels
        d_hit = ~seek_hi & below
        u_hit = ~seek_lo & above
        downs += d_hit
        ups += u_hit
        seek_hi = np.where(seek_hi, ~above, d_hit)
        seek_lo = np.where(seek_lo, ~below, u_hit)
    return ups, downs


_crossing_counts_vectorized.py_func = _crossing_counts_vectorized

# Up- and down-crossing counts of the bands [y, y+eps] for every level y,
# returned as (ups, downs). The numba path loops level by level; the numpy
# path vectorizes across levels and loops over samples.
if USE_NUMBA:
    crossing_counts_levels = _crossing_counts_loop
else:
    crossing_counts_levels = _crossing_counts_vectorized
