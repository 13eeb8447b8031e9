"""Pure-Python kernel backend.

Mirrors the compiled backend expression-for-expression (same libm calls,
same evaluation order, no re-association), so the two backends produce
bit-identical rasters and routes. Keep the two in sync when editing.
"""

from __future__ import annotations

import math
from heapq import heappop, heappush

import numpy as np

BACKEND_NAME = "python"

_DEG2RAD = math.pi / 180.0
_SQRT2 = math.sqrt(2.0)
_SQRT2_M1 = math.sqrt(2.0) - 1.0

# Fixed traversal order; part of the determinism contract.
_NEIGHBORS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))

_UNSEEN, _OPEN, _CLOSED = 0, 1, 2


def _haversine(lat1, lon1, lat2, lon2, radius_m):
    phi1 = lat1 * _DEG2RAD
    phi2 = lat2 * _DEG2RAD
    dphi = (lat2 - lat1) * _DEG2RAD
    dlmb = (lon2 - lon1) * _DEG2RAD
    sp = math.sin(dphi * 0.5)
    sl = math.sin(dlmb * 0.5)
    a = sp * sp + math.cos(phi1) * math.cos(phi2) * (sl * sl)
    return 2.0 * math.atan2(math.sqrt(a), math.sqrt(1.0 - a)) * radius_m


def accumulate_decay(depth, invalid, origin_lat, origin_lon, cell_size_m,
                     m_per_deg_lat, m_per_deg_lon, obs_lat, obs_lon,
                     obs_depth, obs_elev, elev, bandwidth_m, cutoff_m,
                     radius_m):
    """Max-fuse one observation's decayed depth field into `depth` in place.

    Only cells within `cutoff_m` great-circle meters of the observation are
    touched; `invalid` (nodata) cells are skipped. The scan window is a
    conservative superset of the cutoff disc, derived from the haversine
    identity, so the per-cell distance test is what decides membership.
    """
    rows, cols = depth.shape
    inv_cell = 1.0 / cell_size_m

    y0 = (obs_lat - origin_lat) * m_per_deg_lat * inv_cell
    dy = cutoff_m * inv_cell
    r_min = max(math.floor(y0 - 0.5 - dy) - 1, 0)
    r_max = min(math.ceil(y0 - 0.5 + dy) + 1, rows - 1)
    if r_min > r_max:
        return

    lat_lo = origin_lat + (r_min + 0.5) * cell_size_m / m_per_deg_lat
    lat_hi = origin_lat + (r_max + 0.5) * cell_size_m / m_per_deg_lat
    band_cos = math.cos(max(abs(lat_lo), abs(lat_hi)) * _DEG2RAD)
    denom = math.cos(obs_lat * _DEG2RAD) * band_cos
    sinhalf = math.sin(cutoff_m / (2.0 * radius_m))
    if denom <= 0.0 or sinhalf * sinhalf >= denom:
        c_min, c_max = 0, cols - 1
    else:
        dlmb = 2.0 * math.asin(math.sqrt(sinhalf * sinhalf / denom))
        dx = (dlmb / _DEG2RAD) * m_per_deg_lon * inv_cell
        x0 = (obs_lon - origin_lon) * m_per_deg_lon * inv_cell
        c_min = max(math.floor(x0 - 0.5 - dx) - 1, 0)
        c_max = min(math.ceil(x0 - 0.5 + dx) + 1, cols - 1)
    if c_min > c_max:
        return

    depth_rows = depth.tolist()
    elev_rows = elev.tolist()
    invalid_rows = invalid.tolist()
    for r in range(r_min, r_max + 1):
        lat = origin_lat + (r + 0.5) * cell_size_m / m_per_deg_lat
        drow = depth_rows[r]
        erow = elev_rows[r]
        irow = invalid_rows[r]
        for c in range(c_min, c_max + 1):
            if irow[c]:
                continue
            lon = origin_lon + (c + 0.5) * cell_size_m / m_per_deg_lon
            d = _haversine(obs_lat, obs_lon, lat, lon, radius_m)
            if d > cutoff_m:
                continue
            q = d / bandwidth_m
            v = obs_depth * math.exp(-0.5 * (q * q)) + (obs_elev - erow[c])
            if v < 0.0:
                v = 0.0
            if v > drow[c]:
                drow[c] = v
        depth[r, c_min:c_max + 1] = drow[c_min:c_max + 1]


def grid_search(depth, impassable, start_r, start_c, goal_r, goal_c,
                heuristic_mode, penalty, reparent):
    """Best-first search over an 8-connected grid.

    heuristic_mode: 0 = Manhattan, 1 = octile, 2 = zero. Diagonal moves cost
    sqrt(2) and are forbidden when either adjacent orthogonal cell is
    impassable. Ties on f break toward larger g, then (row, col) order.
    When `reparent` is false, a node already in the open list never has its
    cost improved (first insertion wins).

    Returns (path, cost, expanded); path is None when the goal is
    unreachable. The caller guarantees start and goal are in bounds and
    passable.
    """
    rows, cols = depth.shape
    depths = depth.tolist()
    blocked = impassable.tolist()

    def h(r, c):
        dr = abs(r - goal_r)
        dc = abs(c - goal_c)
        if heuristic_mode == 0:
            return float(dr + dc)
        if heuristic_mode == 1:
            hi, lo = (dr, dc) if dr >= dc else (dc, dr)
            return hi + _SQRT2_M1 * lo
        return 0.0

    state = [[_UNSEEN] * cols for _ in range(rows)]
    best_g = [[math.inf] * cols for _ in range(rows)]
    parent = [[-1] * cols for _ in range(rows)]

    heap = []
    best_g[start_r][start_c] = 0.0
    state[start_r][start_c] = _OPEN
    heappush(heap, (h(start_r, start_c), -0.0, start_r, start_c))
    expanded = 0

    while heap:
        _, ng, r, c = heappop(heap)
        g = -ng
        if state[r][c] == _CLOSED or best_g[r][c] != g:
            continue
        if r == goal_r and c == goal_c:
            return _reconstruct(parent, cols, r, c), g, expanded
        state[r][c] = _CLOSED
        expanded += 1
        for dr, dc in _NEIGHBORS:
            nr = r + dr
            nc = c + dc
            if not (0 <= nr < rows and 0 <= nc < cols):
                continue
            if blocked[nr][nc]:
                continue
            if dr != 0 and dc != 0 and (blocked[r + dr][c] or blocked[r][c + dc]):
                continue
            if state[nr][nc] == _CLOSED:
                continue
            base = _SQRT2 if dr != 0 and dc != 0 else 1.0
            step = base + penalty * depths[nr][nc]
            g2 = g + step
            if state[nr][nc] == _UNSEEN:
                state[nr][nc] = _OPEN
                best_g[nr][nc] = g2
                parent[nr][nc] = r * cols + c
                heappush(heap, (g2 + h(nr, nc), -g2, nr, nc))
            elif reparent and g2 < best_g[nr][nc]:
                best_g[nr][nc] = g2
                parent[nr][nc] = r * cols + c
                heappush(heap, (g2 + h(nr, nc), -g2, nr, nc))

    return None, math.inf, expanded


def _reconstruct(parent, cols, r, c):
    path = [(r, c)]
    link = parent[r][c]
    while link >= 0:
        r, c = divmod(link, cols)
        path.append((r, c))
        link = parent[r][c]
    path.reverse()
    return path
