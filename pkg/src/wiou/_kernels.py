"""Compiled inner loops for the distance transforms and per-instance reductions.

All kernels take a boolean ``fg`` mask (C-contiguous, 2-D) and return integer
distances to the nearest ``False`` pixel.  Pixels with no reachable background
get ``INF``.  Out-of-image pixels are never background.
"""

import numpy as np
from numba import njit

INF = np.int64(1) << 60


@njit(cache=True, nogil=True)
def _column_distance(fg):
    # 1-D distance to the nearest background pixel along each column
    h, w = fg.shape
    g = np.empty((h, w), dtype=np.int64)
    for x in range(w):
        g[0, x] = INF if fg[0, x] else 0
    for y in range(1, h):
        for x in range(w):
            if fg[y, x]:
                prev = g[y - 1, x]
                g[y, x] = prev + 1 if prev < INF else INF
            else:
                g[y, x] = 0
    for y in range(h - 2, -1, -1):
        for x in range(w):
            nxt = g[y + 1, x] + 1
            if nxt < g[y, x]:
                g[y, x] = nxt
    return g


@njit(cache=True, nogil=True)
def squared_euclidean(fg):
    """Exact squared Euclidean transform (lower envelope of parabolas per row)."""
    h, w = fg.shape
    g = _column_distance(fg)
    out = np.empty((h, w), dtype=np.int64)
    v = np.empty(w, dtype=np.int64)
    z = np.empty(w + 1, dtype=np.float64)
    f = np.empty(w, dtype=np.int64)
    for y in range(h):
        for x in range(w):
            gx = g[y, x]
            f[x] = gx * gx if gx < INF else INF
        k = -1
        for q in range(w):
            if f[q] >= INF:
                continue
            if k < 0:
                k = 0
                v[0] = q
                z[0] = -np.inf
                z[1] = np.inf
                continue
            fq = f[q] + q * q
            while True:
                p = v[k]
                s = (fq - (f[p] + p * p)) / (2.0 * (q - p))
                if s <= z[k]:
                    k -= 1
                    if k < 0:
                        break
                else:
                    break
            k += 1
            v[k] = q
            if k == 0:
                z[0] = -np.inf
            else:
                p = v[k - 1]
                z[k] = (fq - (f[p] + p * p)) / (2.0 * (q - p))
            z[k + 1] = np.inf
        if k < 0:
            for x in range(w):
                out[y, x] = INF
            continue
        j = 0
        for x in range(w):
            while z[j + 1] < x:
                j += 1
            p = v[j]
            dx = x - p
            out[y, x] = dx * dx + f[p]
    return out


@njit(cache=True, nogil=True)
def manhattan(fg):
    """Exact city-block transform: column pass, then forward/backward row sweeps."""
    h, w = fg.shape
    g = _column_distance(fg)
    for y in range(h):
        for x in range(1, w):
            c = g[y, x - 1] + 1
            if c < g[y, x]:
                g[y, x] = c
        for x in range(w - 2, -1, -1):
            c = g[y, x + 1] + 1
            if c < g[y, x]:
                g[y, x] = c
    for y in range(h):
        for x in range(w):
            if g[y, x] >= INF:
                g[y, x] = INF
    return g


@njit(cache=True, nogil=True)
def chessboard(fg):
    """Exact chessboard transform via a two-pass 8-neighbour raster scan."""
    h, w = fg.shape
    d = np.empty((h, w), dtype=np.int64)
    for y in range(h):
        for x in range(w):
            d[y, x] = INF if fg[y, x] else 0
    for y in range(h):
        for x in range(w):
            best = d[y, x]
            if best == 0:
                continue
            if x > 0 and d[y, x - 1] + 1 < best:
                best = d[y, x - 1] + 1
            if y > 0:
                for dx in range(-1, 2):
                    xx = x + dx
                    if 0 <= xx < w and d[y - 1, xx] + 1 < best:
                        best = d[y - 1, xx] + 1
            d[y, x] = best
    for y in range(h - 1, -1, -1):
        for x in range(w - 1, -1, -1):
            best = d[y, x]
            if best == 0:
                continue
            if x < w - 1 and d[y, x + 1] + 1 < best:
                best = d[y, x + 1] + 1
            if y < h - 1:
                for dx in range(-1, 2):
                    xx = x + dx
                    if 0 <= xx < w and d[y + 1, xx] + 1 < best:
                        best = d[y + 1, xx] + 1
            d[y, x] = best
    for y in range(h):
        for x in range(w):
            if d[y, x] >= INF:
                d[y, x] = INF
    return d


@njit(cache=True, nogil=True)
def instance_max(values, ids, count):
    out = np.zeros(count + 1, dtype=np.float64)
    h, w = values.shape
    for y in range(h):
        for x in range(w):
            i = ids[y, x]
            if i > 0 and values[y, x] > out[i]:
                out[i] = values[y, x]
    return out


@njit(cache=True, nogil=True)
def _find(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


@njit(cache=True, nogil=True)
def label_components(fg, eight):
    """Two-pass union-find labelling; ids follow row-major first-pixel order."""
    h, w = fg.shape
    prov = np.zeros((h, w), dtype=np.int64)
    parent = np.empty(h * w // 2 + 2, dtype=np.int64)
    n = 0
    for y in range(h):
        for x in range(w):
            if not fg[y, x]:
                continue
            best = 0
            # already-visited neighbours: W, N, and for 8-connectivity NW, NE
            for k in range(4):
                if k == 0:
                    yy, xx = y, x - 1
                elif k == 1:
                    yy, xx = y - 1, x
                elif k == 2:
                    if not eight:
                        continue
                    yy, xx = y - 1, x - 1
                else:
                    if not eight:
                        continue
                    yy, xx = y - 1, x + 1
                if yy < 0 or xx < 0 or xx >= w:
                    continue
                lab = prov[yy, xx]
                if lab == 0:
                    continue
                r = _find(parent, lab)
                if best == 0:
                    best = r
                elif r != best:
                    if r < best:
                        parent[best] = r
                        best = r
                    else:
                        parent[r] = best
            if best == 0:
                n += 1
                if n >= parent.shape[0]:
                    grown = np.empty(parent.shape[0] * 2, dtype=np.int64)
                    grown[: parent.shape[0]] = parent
                    parent = grown
                parent[n] = n
                best = n
            prov[y, x] = best
    # roots are the smallest provisional label of each set, so renumbering
    # roots in increasing order reproduces row-major first-pixel order
    final = np.zeros(n + 1, dtype=np.int64)
    count = 0
    for i in range(1, n + 1):
        r = _find(parent, i)
        if r == i:
            count += 1
            final[i] = count
    for y in range(h):
        for x in range(w):
            lab = prov[y, x]
            if lab:
                prov[y, x] = final[_find(parent, lab)]
    return prov, count
