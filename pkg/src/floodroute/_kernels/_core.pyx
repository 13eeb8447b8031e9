# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Expression-for-expression twin of fallback.py (same libm calls, same
evaluation order); compiled with -ffp-contract=off so results stay
bit-identical to the pure-Python backend. Keep the two in sync.
"""

from libc.math cimport M_PI, asin, atan2, ceil, cos, exp, fabs, floor, sin, sqrt
from libc.stdlib cimport free, malloc, realloc

import numpy as np

BACKEND_NAME = "compiled"

cdef double DEG2RAD = M_PI / 180.0
cdef double SQRT2 = sqrt(2.0)
cdef double SQRT2_M1 = sqrt(2.0) - 1.0
cdef double INF = float("inf")

cdef int[8] NBR_DR = [-1, -1, -1, 0, 0, 1, 1, 1]
cdef int[8] NBR_DC = [-1, 0, 1, -1, 1, -1, 0, 1]

cdef enum:
    UNSEEN = 0
    OPEN = 1
    CLOSED = 2


cdef inline double _haversine(double lat1, double lon1, double lat2,
                              double lon2, double radius_m) noexcept:
    cdef double phi1 = lat1 * DEG2RAD
    cdef double phi2 = lat2 * DEG2RAD
    cdef double dphi = (lat2 - lat1) * DEG2RAD
    cdef double dlmb = (lon2 - lon1) * DEG2RAD
    cdef double sp = sin(dphi * 0.5)
    cdef double sl = sin(dlmb * 0.5)
    cdef double a = sp * sp + cos(phi1) * cos(phi2) * (sl * sl)
    return 2.0 * atan2(sqrt(a), sqrt(1.0 - a)) * radius_m


def accumulate_decay(double[:, ::1] depth, const unsigned char[:, ::1] invalid,
                     double origin_lat, double origin_lon, double cell_size_m,
                     double m_per_deg_lat, double m_per_deg_lon,
                     double obs_lat, double obs_lon, double obs_depth,
                     double obs_elev, const double[:, ::1] elev,
                     double bandwidth_m, double cutoff_m, double radius_m):
    """Max-fuse one observation's decayed depth field into `depth` in place."""
    cdef Py_ssize_t rows = depth.shape[0]
    cdef Py_ssize_t cols = depth.shape[1]
    cdef double inv_cell = 1.0 / cell_size_m

    cdef double y0 = (obs_lat - origin_lat) * m_per_deg_lat * inv_cell
    cdef double dy = cutoff_m * inv_cell
    cdef long r_min = <long>floor(y0 - 0.5 - dy) - 1
    cdef long r_max = <long>ceil(y0 - 0.5 + dy) + 1
    if r_min < 0:
        r_min = 0
    if r_max > rows - 1:
        r_max = rows - 1
    if r_min > r_max:
        return

    cdef double lat_lo = origin_lat + (r_min + 0.5) * cell_size_m / m_per_deg_lat
    cdef double lat_hi = origin_lat + (r_max + 0.5) * cell_size_m / m_per_deg_lat
    cdef double abs_lat = fabs(lat_lo)
    if fabs(lat_hi) > abs_lat:
        abs_lat = fabs(lat_hi)
    cdef double band_cos = cos(abs_lat * DEG2RAD)
    cdef double denom = cos(obs_lat * DEG2RAD) * band_cos
    cdef double sinhalf = sin(cutoff_m / (2.0 * radius_m))
    cdef long c_min, c_max
    cdef double dlmb, dx, x0
    if denom <= 0.0 or sinhalf * sinhalf >= denom:
        c_min = 0
        c_max = cols - 1
    else:
        dlmb = 2.0 * asin(sqrt(sinhalf * sinhalf / denom))
        dx = (dlmb / DEG2RAD) * m_per_deg_lon * inv_cell
        x0 = (obs_lon - origin_lon) * m_per_deg_lon * inv_cell
        c_min = <long>floor(x0 - 0.5 - dx) - 1
        c_max = <long>ceil(x0 - 0.5 + dx) + 1
        if c_min < 0:
            c_min = 0
        if c_max > cols - 1:
            c_max = cols - 1
    if c_min > c_max:
        return

    cdef Py_ssize_t r, c
    cdef double lat, lon, d, q, v
    for r in range(r_min, r_max + 1):
        lat = origin_lat + (r + 0.5) * cell_size_m / m_per_deg_lat
        for c in range(c_min, c_max + 1):
            if invalid[r, c]:
                continue
            lon = origin_lon + (c + 0.5) * cell_size_m / m_per_deg_lon
            d = _haversine(obs_lat, obs_lon, lat, lon, radius_m)
            if d > cutoff_m:
                continue
            q = d / bandwidth_m
            v = obs_depth * exp(-0.5 * (q * q)) + (obs_elev - elev[r, c])
            if v < 0.0:
                v = 0.0
            if v > depth[r, c]:
                depth[r, c] = v


cdef struct Entry:
    double f
    double g
    int r
    int c


cdef inline bint _less(Entry a, Entry b) noexcept:
    # f ascending, then g descending, then (row, col) ascending.
    if a.f != b.f:
        return a.f < b.f
    if a.g != b.g:
        return a.g > b.g
    if a.r != b.r:
        return a.r < b.r
    return a.c < b.c


cdef struct Heap:
    Entry* items
    Py_ssize_t size
    Py_ssize_t cap


cdef inline int _heap_push(Heap* h, Entry e) except -1:
    cdef Py_ssize_t i, p
    cdef Entry* grown
    if h.size == h.cap:
        h.cap *= 2
        grown = <Entry*>realloc(h.items, h.cap * sizeof(Entry))
        if grown == NULL:
            raise MemoryError()
        h.items = grown
    i = h.size
    h.size += 1
    while i > 0:
        p = (i - 1) >> 1
        if _less(e, h.items[p]):
            h.items[i] = h.items[p]
            i = p
        else:
            break
    h.items[i] = e
    return 0


cdef inline Entry _heap_pop(Heap* h) noexcept:
    cdef Entry top = h.items[0]
    cdef Entry last = h.items[h.size - 1]
    h.size -= 1
    cdef Py_ssize_t i = 0, child
    while True:
        child = 2 * i + 1
        if child >= h.size:
            break
        if child + 1 < h.size and _less(h.items[child + 1], h.items[child]):
            child += 1
        if _less(h.items[child], last):
            h.items[i] = h.items[child]
            i = child
        else:
            break
    if h.size > 0:
        h.items[i] = last
    return top


cdef inline double _heuristic(int r, int c, int goal_r, int goal_c,
                              int mode) noexcept:
    cdef int dr = r - goal_r
    cdef int dc = c - goal_c
    if dr < 0:
        dr = -dr
    if dc < 0:
        dc = -dc
    cdef int hi, lo
    if mode == 0:
        return <double>(dr + dc)
    if mode == 1:
        if dr >= dc:
            hi = dr
            lo = dc
        else:
            hi = dc
            lo = dr
        return <double>hi + SQRT2_M1 * <double>lo
    return 0.0


def grid_search(const double[:, ::1] depth, const unsigned char[:, ::1] impassable,
                int start_r, int start_c, int goal_r, int goal_c,
                int heuristic_mode, double penalty, bint reparent):
    """Best-first search over an 8-connected grid.

    Same contract as the fallback backend: (path, cost, expanded), path is
    None when the goal is unreachable; caller guarantees endpoints are in
    bounds and passable.
    """
    cdef int rows = <int>depth.shape[0]
    cdef int cols = <int>depth.shape[1]
    cdef Py_ssize_t n = <Py_ssize_t>rows * cols

    cdef unsigned char* state = <unsigned char*>malloc(n * sizeof(unsigned char))
    cdef double* best_g = <double*>malloc(n * sizeof(double))
    cdef int* parent = <int*>malloc(n * sizeof(int))
    cdef Heap heap
    heap.cap = 256
    heap.size = 0
    heap.items = <Entry*>malloc(heap.cap * sizeof(Entry))
    if state == NULL or best_g == NULL or parent == NULL or heap.items == NULL:
        free(state); free(best_g); free(parent); free(heap.items)
        raise MemoryError()

    cdef Py_ssize_t i
    for i in range(n):
        state[i] = UNSEEN
        best_g[i] = INF
        parent[i] = -1

    cdef Entry e
    cdef int expanded = 0
    cdef int r, c, nr, nc, k, idx
    cdef double g, base, step, g2
    cdef bint diagonal
    cdef list path

    try:
        best_g[start_r * cols + start_c] = 0.0
        state[start_r * cols + start_c] = OPEN
        e.f = _heuristic(start_r, start_c, goal_r, goal_c, heuristic_mode)
        e.g = 0.0
        e.r = start_r
        e.c = start_c
        _heap_push(&heap, e)

        while heap.size > 0:
            e = _heap_pop(&heap)
            r = e.r
            c = e.c
            g = e.g
            idx = r * cols + c
            if state[idx] == CLOSED or best_g[idx] != g:
                continue
            if r == goal_r and c == goal_c:
                path = []
                while idx >= 0:
                    path.append((idx // cols, idx % cols))
                    idx = parent[idx]
                path.reverse()
                return path, g, expanded
            state[idx] = CLOSED
            expanded += 1
            for k in range(8):
                nr = r + NBR_DR[k]
                nc = c + NBR_DC[k]
                if nr < 0 or nr >= rows or nc < 0 or nc >= cols:
                    continue
                if impassable[nr, nc]:
                    continue
                diagonal = NBR_DR[k] != 0 and NBR_DC[k] != 0
                if diagonal and (impassable[r + NBR_DR[k], c] or
                                 impassable[r, c + NBR_DC[k]]):
                    continue
                if state[nr * cols + nc] == CLOSED:
                    continue
                base = SQRT2 if diagonal else 1.0
                step = base + penalty * depth[nr, nc]
                g2 = g + step
                if state[nr * cols + nc] == UNSEEN:
                    state[nr * cols + nc] = OPEN
                    best_g[nr * cols + nc] = g2
                    parent[nr * cols + nc] = idx
                    e.f = g2 + _heuristic(nr, nc, goal_r, goal_c, heuristic_mode)
                    e.g = g2
                    e.r = nr
                    e.c = nc
                    _heap_push(&heap, e)
                elif reparent and g2 < best_g[nr * cols + nc]:
                    best_g[nr * cols + nc] = g2
                    parent[nr * cols + nc] = idx
                    e.f = g2 + _heuristic(nr, nc, goal_r, goal_c, heuristic_mode)
                    e.g = g2
                    e.r = nr
                    e.c = nc
                    _heap_push(&heap, e)

        return None, INF, expanded
    finally:
        free(state)
        free(best_g)
        free(parent)
        free(heap.items)
