"""Geodesy, grid geometry, and coordinate <-> cell mapping.

A grid is a regular lattice of square metric cells anchored at a WGS84
southwest corner. Points map to cells through a local equirectangular
projection about the grid origin (meters per degree of longitude scaled
by cos(origin.lat)); distances between points are great-circle meters on
a sphere of radius 6,371,000 m. At the kilometer scale these maps serve,
the projection distortion is far below one cell.
"""

from __future__ import annotations

import math
from dataclasses import InitVar, dataclass, field

import numpy as np

from .errors import (
    GridIndexError,
    NodataElevationError,
    OutsideFootprintError,
    ValidationError,
)

EARTH_RADIUS_M = 6_371_000.0
M_PER_DEG_LAT = EARTH_RADIUS_M * math.pi / 180.0

#: Default ceiling on rows*cols, to bound memory.
DEFAULT_MAX_GRID_CELLS = 25_000_000

DEFAULT_NODATA = -9999.0

# Snap tolerance (in cells) when sampling: queries within this distance of
# an exact cell-center lattice coordinate are treated as on it, so
# cell-center lookups are exact despite projection round-trip noise.
_LATTICE_SNAP = 1e-9


@dataclass(frozen=True)
class GeoPoint:
    """A WGS84 coordinate pair in degrees."""

    lat: float
    lon: float

    def __post_init__(self):
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise ValidationError(f"non-finite coordinate ({self.lat}, {self.lon})")
        if not -90.0 <= self.lat <= 90.0:
            raise ValidationError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise ValidationError(f"longitude {self.lon} outside [-180, 180]")


def _haversine_raw(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in meters between two degree coordinate pairs.

    Kept as a scalar helper (identical expression structure to the compiled
    kernel) so both backends produce bit-identical distances.
    """
    phi1 = math.radians(lat1)
    phi2 = math.radians(lat2)
    dphi = math.radians(lat2 - lat1)
    dlmb = math.radians(lon2 - lon1)
    sp = math.sin(dphi * 0.5)
    sl = math.sin(dlmb * 0.5)
    a = sp * sp + math.cos(phi1) * math.cos(phi2) * (sl * sl)
    return 2.0 * math.atan2(math.sqrt(a), math.sqrt(1.0 - a)) * EARTH_RADIUS_M


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters between two points."""
    return _haversine_raw(a.lat, a.lon, b.lat, b.lon)


@dataclass(frozen=True)
class GridSpec:
    """Geometry of a regular grid: southwest origin, square metric cells.

    The footprint must stay inside WGS84 bounds (north edge <= 90 degrees,
    east edge <= 180) and span less than 180 degrees of longitude; within
    these limits every in-bounds (row, col) maps to exactly one cell-center
    point and back.
    """

    origin: GeoPoint
    cell_size_m: float
    rows: int
    cols: int
    max_cells: InitVar[int] = DEFAULT_MAX_GRID_CELLS

    def __post_init__(self, max_cells: int):
        if not (math.isfinite(self.cell_size_m) and self.cell_size_m > 0):
            raise ValidationError(f"cell_size_m must be > 0, got {self.cell_size_m}")
        if self.rows <= 0 or self.cols <= 0:
            raise ValidationError(f"grid must be non-empty, got {self.rows}x{self.cols}")
        if self.rows * self.cols > max_cells:
            raise ValidationError(
                f"{self.rows}x{self.cols} exceeds the {max_cells}-cell cap")
        if abs(self.origin.lat) >= 90.0:
            raise ValidationError("grid origin latitude must be strictly inside the poles")
        north = self.origin.lat + self.rows * self.cell_size_m / M_PER_DEG_LAT
        if north > 90.0:
            raise ValidationError("grid extends past the north pole")
        lon_span = self.cols * self.cell_size_m / self.m_per_deg_lon
        if lon_span >= 180.0:
            raise ValidationError("grid spans 180 degrees of longitude or more")
        if self.origin.lon + lon_span > 180.0:
            raise ValidationError("grid extends past longitude 180")

    @property
    def m_per_deg_lat(self) -> float:
        return M_PER_DEG_LAT

    @property
    def m_per_deg_lon(self) -> float:
        return M_PER_DEG_LAT * math.cos(math.radians(self.origin.lat))

    @property
    def footprint_area_m2(self) -> float:
        return self.rows * self.cols * self.cell_size_m ** 2

    def fractional_cell(self, p: GeoPoint) -> tuple[float, float]:
        """Continuous (y, x) cell coordinates of p; (0, 0) is the SW corner."""
        x = (p.lon - self.origin.lon) * self.m_per_deg_lon / self.cell_size_m
        y = (p.lat - self.origin.lat) * self.m_per_deg_lat / self.cell_size_m
        return y, x


def point_to_cell(spec: GridSpec, p: GeoPoint) -> tuple[int, int] | None:
    """Return the (row, col) cell containing p, or None outside the footprint."""
    y, x = spec.fractional_cell(p)
    row = math.floor(y)
    col = math.floor(x)
    if 0 <= row < spec.rows and 0 <= col < spec.cols:
        return row, col
    return None


def cell_center(spec: GridSpec, row: int, col: int) -> GeoPoint:
    """Center point of an in-bounds cell; inverse of point_to_cell on centers."""
    if not (0 <= row < spec.rows and 0 <= col < spec.cols):
        raise GridIndexError(
            f"cell ({row}, {col}) outside {spec.rows}x{spec.cols} grid")
    lat = spec.origin.lat + (row + 0.5) * spec.cell_size_m / spec.m_per_deg_lat
    lon = spec.origin.lon + (col + 0.5) * spec.cell_size_m / spec.m_per_deg_lon
    return GeoPoint(lat, lon)


@dataclass(frozen=True)
class ElevationGrid:
    """Terrain elevations in meters on a GridSpec lattice.

    values[0, 0] is the southwest cell (row index grows northward). Cells
    equal to the nodata sentinel carry no elevation; they are treated as
    impassable downstream.
    """

    spec: GridSpec
    values: np.ndarray
    nodata: float = DEFAULT_NODATA
    nodata_mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.spec.rows, self.spec.cols):
            raise ValidationError(
                f"values shape {values.shape} != grid "
                f"{(self.spec.rows, self.spec.cols)}")
        mask = values == self.nodata
        if not np.all(np.isfinite(values[~mask])):
            raise ValidationError("elevation values must be finite or nodata")
        values = values.copy()
        values.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "nodata_mask", mask)

    def elevation_at_cell(self, row: int, col: int) -> float:
        """Elevation of a cell; raises on out-of-bounds or nodata."""
        if not (0 <= row < self.spec.rows and 0 <= col < self.spec.cols):
            raise GridIndexError(f"cell ({row}, {col}) out of bounds")
        if self.nodata_mask[row, col]:
            raise NodataElevationError(f"cell ({row}, {col}) is nodata")
        return float(self.values[row, col])

    def sample_bilinear(self, p: GeoPoint) -> float:
        """Bilinearly interpolated elevation at p.

        Interpolates between the four surrounding cell centers (clamped at
        the grid edge, so the whole footprint is covered). The result is
        bounded by the min/max of the corners used. Raises
        OutsideFootprintError beyond the footprint and NodataElevationError
        when a corner that would contribute weight is nodata.
        """
        if point_to_cell(self.spec, p) is None:
            raise OutsideFootprintError(
                f"({p.lat}, {p.lon}) outside the grid footprint")
        y, x = self.spec.fractional_cell(p)
        return self._bilinear_lattice(y - 0.5, x - 0.5, p)

    def _bilinear_lattice(self, gy: float, gx: float, p: GeoPoint) -> float:
        # Snap to the center lattice so cell-center queries are exact.
        if abs(gy - round(gy)) < _LATTICE_SNAP:
            gy = round(gy)
        if abs(gx - round(gx)) < _LATTICE_SNAP:
            gx = round(gx)
        rows, cols = self.spec.rows, self.spec.cols
        r0 = min(max(math.floor(gy), 0), max(rows - 2, 0))
        c0 = min(max(math.floor(gx), 0), max(cols - 2, 0))
        fy = min(max(gy - r0, 0.0), 1.0)
        fx = min(max(gx - c0, 0.0), 1.0)
        r1 = min(r0 + 1, rows - 1)
        c1 = min(c0 + 1, cols - 1)
        corners = (
            (r0, c0, (1.0 - fy) * (1.0 - fx)),
            (r0, c1, (1.0 - fy) * fx),
            (r1, c0, fy * (1.0 - fx)),
            (r1, c1, fy * fx),
        )
        total = 0.0
        for r, c, w in corners:
            if w == 0.0:
                continue
            if self.nodata_mask[r, c]:
                raise NodataElevationError(
                    f"({p.lat}, {p.lon}) interpolates a nodata cell ({r}, {c})")
            total += w * float(self.values[r, c])
        return total
