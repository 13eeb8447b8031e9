"""Flood-aware route search over a depth raster.

Search runs on the raster's 8-connected cell lattice. A cell is
impassable when its depth exceeds the request's wade-depth threshold (or
the cell has no terrain data); moves cost 1 orthogonally and sqrt(2)
diagonally, plus an optional linear penalty on the destination cell's
depth. Diagonal moves require both adjacent orthogonal cells passable.

Three heuristics are offered: `octile` (admissible and consistent for
this cost model; the default, provably optimal), `zero` (uniform-cost
degeneration), and `manhattan_paper` (the classic Manhattan estimate,
kept verbatim for comparison; inadmissible on 8-connected grids, so its
routes are valid but may be suboptimal).
"""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ValidationError
from .geo import GeoPoint, GridSpec, cell_center, haversine_distance, point_to_cell
from .inundation import FloodRaster, threshold_mask

SQRT2 = math.sqrt(2.0)
_SQRT2_M1 = math.sqrt(2.0) - 1.0


class Heuristic(enum.Enum):
    MANHATTAN_PAPER = "manhattan_paper"
    OCTILE = "octile"
    ZERO = "zero"


_HEURISTIC_MODE = {Heuristic.MANHATTAN_PAPER: 0, Heuristic.OCTILE: 1, Heuristic.ZERO: 2}


class NoRouteReason(enum.Enum):
    OUTSIDE_FOOTPRINT = "outside_footprint"
    ORIGIN_FLOODED = "origin_flooded"
    DESTINATION_FLOODED = "destination_flooded"
    DISCONNECTED = "disconnected"


@dataclass(frozen=True)
class RouteRequest:
    """One origin -> destination query with a vehicle wade-depth threshold."""

    origin: GeoPoint
    destination: GeoPoint
    max_depth_m: float
    heuristic: Heuristic = Heuristic.OCTILE
    depth_penalty_per_m: float = 0.0

    def __post_init__(self):
        if math.isnan(self.max_depth_m) or self.max_depth_m < 0:
            raise ValidationError(f"max_depth_m must be >= 0, got {self.max_depth_m}")
        if not (math.isfinite(self.depth_penalty_per_m)
                and self.depth_penalty_per_m >= 0):
            raise ValidationError(
                f"depth_penalty_per_m must be >= 0, got {self.depth_penalty_per_m}")


@dataclass(frozen=True)
class Route:
    """A found path: ordered cells, accumulated cost, search statistics."""

    cells: tuple[tuple[int, int], ...]
    total_cost: float
    expanded: int
    path_length_m: float


@dataclass(frozen=True)
class NoRoute:
    """Search outcome when no passable path exists."""

    reason: NoRouteReason
    expanded: int = 0


def step_cost(from_cell: tuple[int, int], to_cell: tuple[int, int],
              raster: FloodRaster, depth_penalty_per_m: float = 0.0) -> float:
    """Cost of one move between 8-adjacent cells, in cell units."""
    rows, cols = raster.spec.rows, raster.spec.cols
    for cell in (from_cell, to_cell):
        if not (0 <= cell[0] < rows and 0 <= cell[1] < cols):
            raise ValidationError(f"cell {cell} is out of bounds")
    dr = to_cell[0] - from_cell[0]
    dc = to_cell[1] - from_cell[1]
    if not (abs(dr) <= 1 and abs(dc) <= 1) or (dr == 0 and dc == 0):
        raise ValidationError(f"cells {from_cell} and {to_cell} are not 8-adjacent")
    if raster.nodata_mask[to_cell]:
        raise ValidationError(f"target cell {to_cell} is impassable (nodata)")
    base = SQRT2 if dr != 0 and dc != 0 else 1.0
    return base + depth_penalty_per_m * float(raster.depth_m[to_cell])


def heuristic(cell: tuple[int, int], goal: tuple[int, int],
              mode: Heuristic) -> float:
    """Estimated remaining cost from cell to goal under the given mode."""
    dr = abs(cell[0] - goal[0])
    dc = abs(cell[1] - goal[1])
    if mode is Heuristic.MANHATTAN_PAPER:
        return float(dr + dc)
    if mode is Heuristic.OCTILE:
        hi, lo = (dr, dc) if dr >= dc else (dc, dr)
        return hi + _SQRT2_M1 * lo
    return 0.0


def _resolve_endpoints(request: RouteRequest, raster: FloodRaster,
                       impassable: np.ndarray):
    """Map request endpoints to cells, or a NoRoute with the failure reason."""
    start = point_to_cell(raster.spec, request.origin)
    goal = point_to_cell(raster.spec, request.destination)
    if start is None or goal is None:
        return NoRoute(NoRouteReason.OUTSIDE_FOOTPRINT)
    if impassable[start]:
        return NoRoute(NoRouteReason.ORIGIN_FLOODED)
    if impassable[goal]:
        return NoRoute(NoRouteReason.DESTINATION_FLOODED)
    return start, goal


def _finish(path, cost: float, expanded: int, spec: GridSpec):
    if path is None:
        return NoRoute(NoRouteReason.DISCONNECTED, expanded=expanded)
    length = 0.0
    for a, b in zip(path, path[1:]):
        length += haversine_distance(cell_center(spec, *a), cell_center(spec, *b))
    return Route(cells=tuple(path), total_cost=cost, expanded=expanded,
                 path_length_m=length)


def astar(request: RouteRequest, raster: FloodRaster,
          *, reparent_open: bool = True) -> Route | NoRoute:
    """Best-first search from origin to destination over the flood raster.

    Pops the minimum-f node, moves it to the closed set, and relaxes its
    eight neighbors; ties on f break toward larger g, then (row, col)
    order, so identical requests yield identical routes.

    reparent_open=False reproduces the verbatim open-list discipline in
    which a queued node's cost is never improved; kept for comparison,
    it can return suboptimal costs even with admissible heuristics.
    """
    impassable = threshold_mask(raster, request.max_depth_m)
    endpoints = _resolve_endpoints(request, raster, impassable)
    if isinstance(endpoints, NoRoute):
        return endpoints
    start, goal = endpoints
    path, cost, expanded = _kernels.grid_search(
        raster.depth_m, np.ascontiguousarray(impassable, dtype=np.uint8),
        start[0], start[1], goal[0], goal[1],
        _HEURISTIC_MODE[request.heuristic], request.depth_penalty_per_m,
        reparent_open)
    return _finish(path, cost, expanded, raster.spec)


def dijkstra_oracle(request: RouteRequest, raster: FloodRaster) -> Route | NoRoute:
    """Exhaustive uniform-cost search; the optimal-cost reference.

    Deliberately self-contained (own heap loop, inline cost model) and
    independent of the search kernels, so it can vouch for them. The
    request's heuristic field is ignored.
    """
    impassable = threshold_mask(raster, request.max_depth_m)
    endpoints = _resolve_endpoints(request, raster, impassable)
    if isinstance(endpoints, NoRoute):
        return endpoints
    (sr, sc), (gr, gc) = endpoints

    rows, cols = raster.spec.rows, raster.spec.cols
    depth = raster.depth_m
    penalty = request.depth_penalty_per_m
    dist = {(sr, sc): 0.0}
    parent: dict[tuple[int, int], tuple[int, int]] = {}
    done: set[tuple[int, int]] = set()
    frontier: list[tuple[float, int, int]] = [(0.0, sr, sc)]
    expanded = 0
    while frontier:
        g, r, c = heapq.heappop(frontier)
        if (r, c) in done or g != dist[(r, c)]:
            continue
        if (r, c) == (gr, gc):
            path = [(r, c)]
            while (r, c) != (sr, sc):
                r, c = parent[(r, c)]
                path.append((r, c))
            path.reverse()
            return _finish(path, g, expanded, raster.spec)
        done.add((r, c))
        expanded += 1
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                if dr == 0 and dc == 0:
                    continue
                nr, nc = r + dr, c + dc
                if not (0 <= nr < rows and 0 <= nc < cols):
                    continue
                if impassable[nr, nc] or (nr, nc) in done:
                    continue
                if dr != 0 and dc != 0 and (impassable[r + dr, c] or impassable[r, c + dc]):
                    continue
                move = math.sqrt(2.0) if dr != 0 and dc != 0 else 1.0
                g2 = g + move + penalty * float(depth[nr, nc])
                if g2 < dist.get((nr, nc), math.inf):
                    dist[(nr, nc)] = g2
                    parent[(nr, nc)] = (r, c)
                    heapq.heappush(frontier, (g2, nr, nc))
    return NoRoute(NoRouteReason.DISCONNECTED, expanded=expanded)


def route_to_geojson(route: Route, spec: GridSpec) -> dict:
    """GeoJSON Feature with the route as a LineString of cell centers."""
    coordinates = []
    for r, c in route.cells:
        p = cell_center(spec, r, c)
        coordinates.append([p.lon, p.lat])
    return {
        "type": "Feature",
        "geometry": {"type": "LineString", "coordinates": coordinates},
        "properties": {
            "total_cost": route.total_cost,
            "path_length_m": route.path_length_m,
            "expanded": route.expanded,
        },
    }
