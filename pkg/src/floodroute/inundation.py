"""Area-wide flood depth rasters from point observations.

Each observation spreads a Gaussian distance-decay depth field, corrected
by the elevation difference between the observation point and the target
cell, and clamped at zero. Influence is cut off beyond
support_radius_factor * bandwidth: the elevation term does not vanish
with distance, so without a finite support a single observation would
wet every low-lying cell on the map. Multiple observations fuse by
per-cell maximum, which is conservative for routing and makes the result
independent of observation order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime

import numpy as np

from . import _kernels
from .errors import FormatError, ValidationError
from .depth import DepthObservation
from .geo import EARTH_RADIUS_M, ElevationGrid, GeoPoint, GridSpec, haversine_distance
from .rfc3339 import format_rfc3339, parse_rfc3339

RASTER_FORMAT_VERSION = 1

DEFAULT_BANDWIDTH_M = 100.0
DEFAULT_SUPPORT_RADIUS_FACTOR = 3.0


@dataclass(frozen=True)
class DecayParams:
    """Gaussian decay shape: bandwidth in meters and support cutoff factor."""

    bandwidth_m: float = DEFAULT_BANDWIDTH_M
    support_radius_factor: float = DEFAULT_SUPPORT_RADIUS_FACTOR

    def __post_init__(self):
        if not (math.isfinite(self.bandwidth_m) and self.bandwidth_m > 0):
            raise ValidationError(f"bandwidth_m must be > 0, got {self.bandwidth_m}")
        if not (math.isfinite(self.support_radius_factor)
                and self.support_radius_factor > 0):
            raise ValidationError(
                f"support_radius_factor must be > 0, got {self.support_radius_factor}")

    @property
    def cutoff_m(self) -> float:
        return self.support_radius_factor * self.bandwidth_m


@dataclass(frozen=True)
class FloodRaster:
    """Estimated floodwater depth per cell, on the elevation grid's lattice.

    nodata_mask marks cells with no terrain data; their depth is 0 and
    they are impassable for routing.
    """

    spec: GridSpec
    depth_m: np.ndarray
    nodata_mask: np.ndarray
    generated_at: datetime
    params: DecayParams

    def __post_init__(self):
        depth = np.asarray(self.depth_m, dtype=np.float64)
        mask = np.asarray(self.nodata_mask, dtype=bool)
        shape = (self.spec.rows, self.spec.cols)
        if depth.shape != shape or mask.shape != shape:
            raise ValidationError(
                f"raster arrays must be {shape}, got {depth.shape} and {mask.shape}")
        valid = depth[~mask]
        if valid.size and not (np.all(np.isfinite(valid)) and np.all(valid >= 0)):
            raise ValidationError("cell depths must be finite and >= 0")
        if self.generated_at.tzinfo is None:
            raise ValidationError("generated_at must be timezone-aware")
        depth = depth.copy()
        depth[mask] = 0.0
        depth.setflags(write=False)
        mask = mask.copy()
        mask.setflags(write=False)
        object.__setattr__(self, "depth_m", depth)
        object.__setattr__(self, "nodata_mask", mask)

    def to_json_document(self) -> dict:
        """Versioned plain-dict form; nodata cells serialize as null."""
        flat = self.depth_m.ravel().tolist()
        for i in np.flatnonzero(self.nodata_mask.ravel()).tolist():
            flat[i] = None
        return {
            "version": RASTER_FORMAT_VERSION,
            "spec": {
                "origin_lat": self.spec.origin.lat,
                "origin_lon": self.spec.origin.lon,
                "cell_size_m": self.spec.cell_size_m,
                "rows": self.spec.rows,
                "cols": self.spec.cols,
            },
            "params": {
                "bandwidth_m": self.params.bandwidth_m,
                "support_radius_factor": self.params.support_radius_factor,
            },
            "generated_at": format_rfc3339(self.generated_at),
            "depth_m": flat,
        }

    def to_json_str(self) -> str:
        return json.dumps(self.to_json_document(), separators=(",", ":"))


def raster_from_json_document(doc) -> FloodRaster:
    """Inverse of FloodRaster.to_json_document, with strict validation."""
    if not isinstance(doc, dict):
        raise FormatError("raster document must be a JSON object")
    version = doc.get("version")
    if version != RASTER_FORMAT_VERSION:
        raise FormatError(f"unsupported raster format version: {version!r}")
    for key in ("spec", "params", "generated_at", "depth_m"):
        if key not in doc:
            raise FormatError(f"raster document missing {key!r}")
    spec_doc = doc["spec"]
    params_doc = doc["params"]
    if not isinstance(spec_doc, dict) or not isinstance(params_doc, dict):
        raise FormatError("spec and params must be JSON objects")
    try:
        spec = GridSpec(
            origin=GeoPoint(_num(spec_doc, "origin_lat"), _num(spec_doc, "origin_lon")),
            cell_size_m=_num(spec_doc, "cell_size_m"),
            rows=_int(spec_doc, "rows"),
            cols=_int(spec_doc, "cols"),
        )
        params = DecayParams(
            bandwidth_m=_num(params_doc, "bandwidth_m"),
            support_radius_factor=_num(params_doc, "support_radius_factor"),
        )
    except ValidationError as exc:
        raise FormatError(str(exc)) from None
    flat = doc["depth_m"]
    if not isinstance(flat, list) or len(flat) != spec.rows * spec.cols:
        raise FormatError(
            f"depth_m must be a {spec.rows * spec.cols}-element array")
    depth = np.zeros((spec.rows, spec.cols), dtype=np.float64)
    mask = np.zeros((spec.rows, spec.cols), dtype=bool)
    for i, value in enumerate(flat):
        r, c = divmod(i, spec.cols)
        if value is None:
            mask[r, c] = True
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            depth[r, c] = float(value)
        else:
            raise FormatError(f"depth_m[{i}] must be a number or null")
    try:
        return FloodRaster(spec=spec, depth_m=depth, nodata_mask=mask,
                           generated_at=parse_rfc3339(doc["generated_at"]),
                           params=params)
    except ValidationError as exc:
        raise FormatError(str(exc)) from None


def _num(doc: dict, key: str) -> float:
    value = doc.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise FormatError(f"{key} must be a number, got {value!r}")
    return float(value)


def _int(doc: dict, key: str) -> int:
    value = doc.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise FormatError(f"{key} must be an integer, got {value!r}")
    return value


def decay_depth_at(obs: DepthObservation, target: GeoPoint, i0: float,
                   ij: float, params: DecayParams) -> float:
    """Decayed depth contribution of one observation at one target point.

    i0 and ij are the elevations at the observation and the target.
    Returns exactly 0 beyond the support cutoff; never negative.
    """
    d = haversine_distance(obs.location, target)
    if d > params.cutoff_m:
        return 0.0
    q = d / params.bandwidth_m
    v = obs.depth_m * math.exp(-0.5 * (q * q)) + (i0 - ij)
    return max(0.0, v)


def build_flood_raster(observations: list[DepthObservation],
                       elev: ElevationGrid,
                       params: DecayParams | None = None,
                       *, generated_at: datetime | None = None) -> FloodRaster:
    """Fuse observations into a flood depth raster on the elevation lattice.

    Each observation's anchor elevation is sampled bilinearly at its
    location (raises outside the footprint or on nodata terrain). Cell
    depth is the per-cell maximum over observations; nodata cells stay at
    depth 0 and are flagged in the raster's nodata_mask.

    generated_at defaults to the newest observation timestamp, so
    identical inputs produce identical rasters.
    """
    if not observations:
        raise ValidationError("at least one observation is required")
    if params is None:
        params = DecayParams()
    anchors = [(obs, elev.sample_bilinear(obs.location)) for obs in observations]

    spec = elev.spec
    depth = np.zeros((spec.rows, spec.cols), dtype=np.float64)
    invalid = np.ascontiguousarray(elev.nodata_mask, dtype=np.uint8)
    values = np.ascontiguousarray(elev.values, dtype=np.float64)
    for obs, i0 in anchors:
        _kernels.accumulate_decay(
            depth, invalid,
            spec.origin.lat, spec.origin.lon, spec.cell_size_m,
            spec.m_per_deg_lat, spec.m_per_deg_lon,
            obs.location.lat, obs.location.lon, obs.depth_m, i0,
            values, params.bandwidth_m, params.cutoff_m, EARTH_RADIUS_M)

    if generated_at is None:
        generated_at = max(obs.timestamp for obs in observations)
    return FloodRaster(spec=spec, depth_m=depth, nodata_mask=elev.nodata_mask,
                       generated_at=generated_at, params=params)


def threshold_mask(raster: FloodRaster, max_depth_m: float) -> np.ndarray:
    """Boolean grid of impassable cells: depth above threshold, or nodata.

    Depth exactly equal to the threshold is passable. max_depth_m may be
    +inf (only nodata cells impassable then).
    """
    if math.isnan(max_depth_m) or max_depth_m < 0:
        raise ValidationError(f"max_depth_m must be >= 0, got {max_depth_m}")
    return (raster.depth_m > max_depth_m) | raster.nodata_mask


def export_flood_geojson(raster: FloodRaster, max_depth_m: float) -> dict:
    """FeatureCollection of per-cell rectangles for impassable cells.

    Flooded cells carry their depth in the depth_m property; nodata cells
    carry depth_m null plus nodata true. Coordinates are lon,lat; each
    ring is closed (5 points) and counterclockwise.
    """
    mask = threshold_mask(raster, max_depth_m)
    spec = raster.spec
    m_lat = spec.m_per_deg_lat
    m_lon = spec.m_per_deg_lon
    features = []
    for r, c in np.argwhere(mask):
        r = int(r)
        c = int(c)
        south = spec.origin.lat + r * spec.cell_size_m / m_lat
        north = spec.origin.lat + (r + 1) * spec.cell_size_m / m_lat
        west = spec.origin.lon + c * spec.cell_size_m / m_lon
        east = spec.origin.lon + (c + 1) * spec.cell_size_m / m_lon
        nodata = bool(raster.nodata_mask[r, c])
        properties = {
            "depth_m": None if nodata else float(raster.depth_m[r, c]),
            "row": r,
            "col": c,
        }
        if nodata:
            properties["nodata"] = True
        features.append({
            "type": "Feature",
            "geometry": {
                "type": "Polygon",
                "coordinates": [[
                    [west, south], [east, south], [east, north],
                    [west, north], [west, south],
                ]],
            },
            "properties": properties,
        })
    return {"type": "FeatureCollection", "features": features}
