"""File ingestion, persistence, and elevation providers.

CSV loaders are strict-reject: every bad row is reported with its line
number and one bad row fails the whole file, because silently dropping
flood observations is worse than a loud error. Grid rasters use the
Esri ASCII format (north row first on disk, flipped to the southwest-
origin convention in memory). Elevation can come from a local raster,
a remote JSON-over-HTTP service, or a recorded fixture.
"""

from __future__ import annotations

import abc
import csv
import json
import math
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .depth import (
    DepthObservation,
    PolePairMeasurement,
    estimate_depth,
)
from .errors import (
    CsvValidationError,
    FileAccessError,
    FormatError,
    NotCoveredError,
    ProtocolError,
    ProviderUnavailableError,
    ValidationError,
)
from .geo import DEFAULT_NODATA, ElevationGrid, GeoPoint, GridSpec, cell_center
from .inundation import (
    DEFAULT_BANDWIDTH_M,
    DEFAULT_SUPPORT_RADIUS_FACTOR,
    DecayParams,
    FloodRaster,
    raster_from_json_document,
)
from .rfc3339 import format_rfc3339, parse_rfc3339
from .routing import Heuristic

OBSERVATION_HEADER = ("id", "lat", "lon", "depth_m", "timestamp")
POLE_PAIR_HEADER = ("id", "lat", "lon", "pre_len_px", "pre_scale_px_per_m",
                    "post_len_px", "post_scale_px_per_m", "timestamp")

ENV_ELEVATION_ENDPOINT = "FLOODROUTE_ELEVATION_ENDPOINT"
ENV_ELEVATION_MODE = "FLOODROUTE_ELEVATION_MODE"
ELEVATION_MODES = ("raster", "remote", "recorded")

REMOTE_BATCH_LIMIT = 100
REMOTE_ATTEMPTS = 3


# ---------------------------------------------------------------------------
# CSV loaders


def _check_header(actual: list[str] | None, expected: tuple[str, ...],
                  path: str) -> None:
    if actual is None:
        raise FormatError("file is empty, expected a header row", path=path)
    stripped = [col.strip() for col in actual]
    if stripped == list(expected):
        return
    missing = [col for col in expected if col not in stripped]
    if missing:
        raise FormatError(
            f"header is missing column(s): {', '.join(missing)}",
            path=path, line=1)
    raise FormatError(
        f"header must be exactly {','.join(expected)}, got {','.join(stripped)}",
        path=path, line=1)


def _parse_float(text: str) -> float:
    cleaned = text.strip()
    # float() tolerates underscores and inf/nan spellings; CSV fields must not.
    if not cleaned or "_" in cleaned:
        raise ValueError
    value = float(cleaned)
    if not math.isfinite(value):
        raise ValueError
    return value


def _load_rows(path: str | Path, expected: tuple[str, ...],
               build_row: Callable[[dict[str, str]], object]) -> list:
    path = str(path)
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise FileAccessError(f"{path}: {exc}") from exc
    rows: list = []
    row_errors: list[tuple[int, str]] = []
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            header = None
        except csv.Error as exc:
            raise FormatError(f"malformed CSV: {exc}", path=path, line=1) from exc
        _check_header(header, expected, path)
        for line_no, raw in enumerate(reader, start=2):
            if not raw:
                continue
            if len(raw) != len(expected):
                row_errors.append(
                    (line_no, f"expected {len(expected)} fields, got {len(raw)}"))
                continue
            record = dict(zip(expected, raw))
            try:
                rows.append(build_row(record))
            except (ValidationError, FormatError, ValueError) as exc:
                row_errors.append((line_no, str(exc) or "invalid value"))
    if row_errors:
        raise CsvValidationError(path, row_errors)
    return rows


def _row_point(record: dict[str, str]) -> GeoPoint:
    try:
        lat = _parse_float(record["lat"])
    except ValueError:
        raise ValidationError(f"lat is not a number: {record['lat']!r}") from None
    try:
        lon = _parse_float(record["lon"])
    except ValueError:
        raise ValidationError(f"lon is not a number: {record['lon']!r}") from None
    return GeoPoint(lat=lat, lon=lon)


def _row_id(record: dict[str, str]) -> str:
    value = record["id"].strip()
    if not value:
        raise ValidationError("id must be non-empty")
    return value


def _row_number(record: dict[str, str], name: str) -> float:
    try:
        return _parse_float(record[name])
    except ValueError:
        raise ValidationError(f"{name} is not a number: {record[name]!r}") from None


def load_observations(path: str | Path) -> list[DepthObservation]:
    """Load depth observations from CSV (header id,lat,lon,depth_m,timestamp).

    Any invalid row fails the whole file; the raised error lists every
    bad line.
    """
    def build(record: dict[str, str]) -> DepthObservation:
        return DepthObservation(
            id=_row_id(record),
            location=_row_point(record),
            depth_m=_row_number(record, "depth_m"),
            timestamp=parse_rfc3339(record["timestamp"]),
        )
    return _load_rows(path, OBSERVATION_HEADER, build)


def load_pole_pairs(path: str | Path) -> list[PolePairMeasurement]:
    """Load pole-pair measurements from CSV (strict header, see module doc)."""
    def build(record: dict[str, str]) -> PolePairMeasurement:
        return PolePairMeasurement(
            id=_row_id(record),
            location=_row_point(record),
            pre_len_px=_row_number(record, "pre_len_px"),
            pre_scale_px_per_m=_row_number(record, "pre_scale_px_per_m"),
            post_len_px=_row_number(record, "post_len_px"),
            post_scale_px_per_m=_row_number(record, "post_scale_px_per_m"),
            timestamp=parse_rfc3339(record["timestamp"]),
        )
    return _load_rows(path, POLE_PAIR_HEADER, build)


def save_observations(observations: Sequence[DepthObservation],
                      path: str | Path) -> None:
    """Write observations as CSV in the loader's format.

    Floats are written with repr so a save/load round-trip is bit-exact.
    """
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(OBSERVATION_HEADER)
        for obs in observations:
            writer.writerow([
                obs.id,
                repr(obs.location.lat),
                repr(obs.location.lon),
                repr(obs.depth_m),
                format_rfc3339(obs.timestamp),
            ])


# ---------------------------------------------------------------------------
# Esri ASCII elevation grids

_ASCII_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize")


def load_elevation_ascii(path: str | Path, *,
                         max_cells: int | None = None) -> ElevationGrid:
    """Parse an Esri ASCII grid into an ElevationGrid.

    Mandatory headers: ncols, nrows, xllcorner, yllcorner, cellsize
    (cellsize in meters). Optional NODATA_value defaults to -9999.
    Data rows are stored north-first on disk and flipped so row 0 is the
    southernmost row in memory.
    """
    path = str(path)
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise FileAccessError(f"{path}: {exc}") from exc

    headers: dict[str, float] = {}
    nodata = DEFAULT_NODATA
    index = 0
    while index < len(lines):
        parts = lines[index].split()
        if not parts:
            index += 1
            continue
        key = parts[0].lower()
        if key in _ASCII_HEADER_KEYS or key == "nodata_value":
            if len(parts) != 2:
                raise FormatError(f"header line needs exactly one value: {lines[index]!r}",
                                  path=path, line=index + 1)
            try:
                value = float(parts[1])
            except ValueError:
                raise FormatError(f"header {key} is not a number: {parts[1]!r}",
                                  path=path, line=index + 1) from None
            if key == "nodata_value":
                nodata = value
            else:
                headers[key] = value
            index += 1
        else:
            break

    for key in _ASCII_HEADER_KEYS:
        if key not in headers:
            raise FormatError(f"missing required header: {key}",
                              path=path, line=index + 1)
    rows_f, cols_f = headers["nrows"], headers["ncols"]
    if rows_f != int(rows_f) or cols_f != int(cols_f):
        raise FormatError("nrows/ncols must be integers", path=path)
    rows, cols = int(rows_f), int(cols_f)
    if rows <= 0 or cols <= 0:
        raise FormatError("nrows and ncols must be positive", path=path)

    values = np.empty((rows, cols), dtype=np.float64)
    data_row = 0
    for line_no in range(index, len(lines)):
        parts = lines[line_no].split()
        if not parts:
            continue
        if data_row >= rows:
            raise FormatError(f"more than {rows} data rows", path=path,
                              line=line_no + 1)
        if len(parts) != cols:
            raise FormatError(
                f"data row has {len(parts)} values, expected {cols}",
                path=path, line=line_no + 1)
        try:
            row_values = [float(p) for p in parts]
        except ValueError:
            raise FormatError(f"non-numeric data value in row: {lines[line_no]!r}",
                              path=path, line=line_no + 1) from None
        # Disk order is north-first; memory row 0 is the south edge.
        values[rows - 1 - data_row, :] = row_values
        data_row += 1
    if data_row != rows:
        raise FormatError(f"expected {rows} data rows, found {data_row}", path=path)

    kwargs = {} if max_cells is None else {"max_cells": max_cells}
    try:
        spec = GridSpec(
            origin=GeoPoint(lat=headers["yllcorner"], lon=headers["xllcorner"]),
            cell_size_m=headers["cellsize"],
            rows=rows,
            cols=cols,
            **kwargs,
        )
        return ElevationGrid(spec=spec, values=values, nodata=nodata)
    except ValidationError as exc:
        raise FormatError(f"invalid grid definition: {exc}", path=path) from exc


def save_elevation_ascii(grid: ElevationGrid, path: str | Path) -> None:
    """Write an ElevationGrid in Esri ASCII form (north row first).

    Values are written with repr so load(save(g)) reproduces g bit-exactly.
    """
    spec = grid.spec
    out = [
        f"ncols {spec.cols}",
        f"nrows {spec.rows}",
        f"xllcorner {spec.origin.lon!r}",
        f"yllcorner {spec.origin.lat!r}",
        f"cellsize {spec.cell_size_m!r}",
        f"NODATA_value {grid.nodata!r}",
    ]
    for row in range(spec.rows - 1, -1, -1):
        out.append(" ".join(repr(v) for v in grid.values[row].tolist()))
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(out) + "\n")


# ---------------------------------------------------------------------------
# Flood raster files


def save_flood_raster(raster: FloodRaster, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(raster.to_json_str())


def load_flood_raster(path: str | Path) -> FloodRaster:
    path = str(path)
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise FileAccessError(f"{path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}", path=path) from exc
    try:
        return raster_from_json_document(doc)
    except FormatError as exc:
        raise FormatError(f"invalid raster document: {exc}", path=path) from exc


# ---------------------------------------------------------------------------
# Elevation providers


@dataclass(frozen=True)
class ProviderInfo:
    """Capability descriptor: who answers, where, and how finely."""

    name: str
    footprint: GridSpec | None
    resolution_m: float | None


class ElevationProvider(abc.ABC):
    """Source of ground elevations in meters.

    Implementations must be safe for concurrent queries and must return
    the same value for the same point within a process.
    """

    @property
    @abc.abstractmethod
    def info(self) -> ProviderInfo: ...

    @abc.abstractmethod
    def elevation_at(self, point: GeoPoint) -> float:
        """Elevation in meters, or a NotCoveredError subclass."""

    def elevations_at(self, points: Sequence[GeoPoint]) -> list[float]:
        return [self.elevation_at(p) for p in points]


class RasterElevationProvider(ElevationProvider):
    """Bilinear sampling over a local ElevationGrid."""

    def __init__(self, grid: ElevationGrid, name: str = "raster"):
        self._grid = grid
        self._info = ProviderInfo(name=name, footprint=grid.spec,
                                  resolution_m=grid.spec.cell_size_m)

    @property
    def info(self) -> ProviderInfo:
        return self._info

    @property
    def grid(self) -> ElevationGrid:
        return self._grid

    def elevation_at(self, point: GeoPoint) -> float:
        return self._grid.sample_bilinear(point)


def raster_elevation_provider(grid: ElevationGrid) -> RasterElevationProvider:
    return RasterElevationProvider(grid)


def _cache_key(point: GeoPoint) -> tuple[float, float]:
    # ~1 cm key resolution; dedups float noise without merging real points.
    return (round(point.lat, 7), round(point.lon, 7))


class RemoteElevationClient(ElevationProvider):
    """JSON-over-HTTP elevation lookups with retry and a lifetime cache.

    Protocol: POST {"locations": [{"lat", "lon"}, ...]} (at most 100 per
    request) answered by {"results": [{"lat", "lon", "elevation_m"}, ...]}
    in request order. The query is idempotent, so transport failures and
    5xx responses are retried up to 3 attempts with exponential backoff.
    """

    def __init__(self, endpoint: str, *, transport=None,
                 sleep: Callable[[float], None] = time.sleep,
                 backoff_base_s: float = 0.5, timeout_s: float = 10.0,
                 name: str = "remote"):
        import httpx

        self._endpoint = endpoint
        self._client = httpx.Client(transport=transport, timeout=timeout_s)
        self._sleep = sleep
        self._backoff_base_s = backoff_base_s
        self._cache: dict[tuple[float, float], float] = {}
        self._lock = threading.Lock()
        self._info = ProviderInfo(name=name, footprint=None, resolution_m=None)
        self.request_count = 0

    @property
    def info(self) -> ProviderInfo:
        return self._info

    def close(self) -> None:
        self._client.close()

    def elevation_at(self, point: GeoPoint) -> float:
        return self.elevations_at([point])[0]

    def elevations_at(self, points: Sequence[GeoPoint]) -> list[float]:
        if not points:
            return []
        results: dict[int, float] = {}
        with self._lock:
            misses = []
            for idx, p in enumerate(points):
                hit = self._cache.get(_cache_key(p))
                if hit is None:
                    misses.append((idx, p))
                else:
                    results[idx] = hit
            for start in range(0, len(misses), REMOTE_BATCH_LIMIT):
                batch = misses[start:start + REMOTE_BATCH_LIMIT]
                values = self._fetch_batch([p for _, p in batch])
                for (idx, p), value in zip(batch, values):
                    self._cache[_cache_key(p)] = value
                    results[idx] = value
        return [results[i] for i in range(len(points))]

    def _fetch_batch(self, points: list[GeoPoint]) -> list[float]:
        import httpx

        body = {"locations": [{"lat": p.lat, "lon": p.lon} for p in points]}
        last_error: Exception | None = None
        for attempt in range(REMOTE_ATTEMPTS):
            if attempt:
                self._sleep(self._backoff_base_s * (2 ** (attempt - 1)))
            try:
                self.request_count += 1
                response = self._client.post(self._endpoint, json=body)
            except httpx.TransportError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = ProviderUnavailableError(
                    f"server error {response.status_code} from {self._endpoint}")
                continue
            if response.status_code != 200:
                raise ProviderUnavailableError(
                    f"unexpected status {response.status_code} from {self._endpoint}")
            return self._parse_response(response, points)
        raise ProviderUnavailableError(
            f"elevation endpoint {self._endpoint} unreachable after "
            f"{REMOTE_ATTEMPTS} attempts: {last_error}")

    def _parse_response(self, response, points: list[GeoPoint]) -> list[float]:
        try:
            doc = response.json()
        except ValueError as exc:
            raise ProtocolError(f"response is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict) or not isinstance(doc.get("results"), list):
            raise ProtocolError("response must be an object with a results array")
        rows = doc["results"]
        if len(rows) != len(points):
            raise ProtocolError(
                f"asked for {len(points)} points, got {len(rows)} results")
        values = []
        for row, requested in zip(rows, points):
            if not isinstance(row, dict):
                raise ProtocolError("each result must be an object")
            try:
                lat = float(row["lat"])
                lon = float(row["lon"])
                elevation = float(row["elevation_m"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ProtocolError(f"malformed result row: {row!r}") from exc
            if abs(lat - requested.lat) > 1e-7 or abs(lon - requested.lon) > 1e-7:
                raise ProtocolError(
                    f"result echoes ({lat}, {lon}) for request "
                    f"({requested.lat}, {requested.lon})")
            if not math.isfinite(elevation):
                raise ProtocolError(f"non-finite elevation for ({lat}, {lon})")
            values.append(elevation)
        return values


class RecordedElevationClient(ElevationProvider):
    """Replays elevations captured earlier; offline and deterministic."""

    def __init__(self, path: str | Path, name: str = "recorded"):
        path = str(path)
        try:
            with open(path, encoding="utf-8") as handle:
                doc = json.load(handle)
        except OSError as exc:
            raise FileAccessError(f"{path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise FormatError(f"not valid JSON: {exc}", path=path) from exc
        if not isinstance(doc, dict) or not isinstance(doc.get("entries"), list):
            raise FormatError("recorded elevations need an entries array",
                              path=path)
        self._values: dict[tuple[float, float], float] = {}
        for entry in doc["entries"]:
            try:
                point = GeoPoint(lat=float(entry["lat"]), lon=float(entry["lon"]))
                elevation = float(entry["elevation_m"])
            except (KeyError, TypeError, ValueError, ValidationError) as exc:
                raise FormatError(f"malformed entry: {entry!r}", path=path) from exc
            if not math.isfinite(elevation):
                raise FormatError(f"non-finite elevation: {entry!r}", path=path)
            self._values[_cache_key(point)] = elevation
        self._info = ProviderInfo(name=name, footprint=None, resolution_m=None)

    @property
    def info(self) -> ProviderInfo:
        return self._info

    def elevation_at(self, point: GeoPoint) -> float:
        try:
            return self._values[_cache_key(point)]
        except KeyError:
            raise NotCoveredError(
                f"no recorded elevation for ({point.lat}, {point.lon})") from None


def record_elevations(provider: ElevationProvider, points: Sequence[GeoPoint],
                      path: str | Path) -> None:
    """Capture provider responses into a RecordedElevationClient fixture."""
    values = provider.elevations_at(list(points))
    doc = {"entries": [
        {"lat": p.lat, "lon": p.lon, "elevation_m": v}
        for p, v in zip(points, values)
    ]}
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=2)
        handle.write("\n")


def fetch_elevation_grid(provider: ElevationProvider, spec: GridSpec,
                         *, nodata: float = DEFAULT_NODATA) -> ElevationGrid:
    """Sample a provider at every cell center of spec.

    Points the provider does not cover become nodata cells.
    """
    centers = [cell_center(spec, r, c)
               for r in range(spec.rows) for c in range(spec.cols)]
    values = np.empty((spec.rows, spec.cols), dtype=np.float64)
    flat = values.reshape(-1)
    try:
        sampled = provider.elevations_at(centers)
    except NotCoveredError:
        sampled = None
    if sampled is not None:
        flat[:] = sampled
    else:
        for i, center in enumerate(centers):
            try:
                flat[i] = provider.elevation_at(center)
            except NotCoveredError:
                flat[i] = nodata
    return ElevationGrid(spec=spec, values=values, nodata=nodata)


# ---------------------------------------------------------------------------
# Scenarios


@dataclass(frozen=True)
class Scenario:
    """A named, self-contained run configuration.

    Paths are absolute after loading. elevation_mode selects where
    elevations come from; grid_spec is required for the non-raster modes
    (it defines the lattice to sample the provider on).
    """

    name: str
    elevation_mode: str
    elevation_path: Path | None
    endpoint: str | None
    grid_spec: GridSpec | None
    observations_path: Path | None
    pole_pairs_path: Path | None
    decay_params: DecayParams
    route_defaults: dict = field(default_factory=dict)

    def build_provider(self) -> ElevationProvider:
        if self.elevation_mode == "raster":
            return RasterElevationProvider(load_elevation_ascii(self.elevation_path))
        if self.elevation_mode == "recorded":
            return RecordedElevationClient(self.elevation_path)
        return RemoteElevationClient(self.endpoint)

    def load_elevation(self) -> ElevationGrid:
        provider = self.build_provider()
        if isinstance(provider, RasterElevationProvider):
            return provider.grid
        return fetch_elevation_grid(provider, self.grid_spec)

    def load_observations(self) -> list[DepthObservation]:
        observations: list[DepthObservation] = []
        if self.observations_path is not None:
            observations.extend(load_observations(self.observations_path))
        if self.pole_pairs_path is not None:
            observations.extend(estimate_depth(m)
                                for m in load_pole_pairs(self.pole_pairs_path))
        return observations


def _scenario_error(message: str, path: str) -> FormatError:
    return FormatError(f"invalid scenario: {message}", path=path)


def load_scenario(path: str | Path) -> Scenario:
    """Load and validate a scenario JSON file.

    Relative file references resolve against the scenario file's
    directory. Environment overrides: FLOODROUTE_ELEVATION_MODE replaces
    the configured mode, FLOODROUTE_ELEVATION_ENDPOINT the remote URL.
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise FileAccessError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}", path=str(path)) from exc
    if not isinstance(doc, dict):
        raise _scenario_error("top level must be an object", str(path))

    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise _scenario_error("name must be a non-empty string", str(path))

    elevation = doc.get("elevation")
    if not isinstance(elevation, dict):
        raise _scenario_error("elevation must be an object", str(path))
    mode = os.environ.get(ENV_ELEVATION_MODE) or elevation.get("mode", "raster")
    if mode not in ELEVATION_MODES:
        raise _scenario_error(
            f"elevation mode must be one of {ELEVATION_MODES}, got {mode!r}",
            str(path))

    base = path.resolve().parent

    def resolve_file(key_value, label: str) -> Path:
        if not isinstance(key_value, str) or not key_value:
            raise _scenario_error(f"{label} must be a path string", str(path))
        resolved = (base / key_value).resolve()
        if not resolved.is_file():
            raise _scenario_error(f"{label} does not exist: {resolved}", str(path))
        return resolved

    elevation_path: Path | None = None
    endpoint: str | None = None
    grid_spec: GridSpec | None = None
    if mode in ("raster", "recorded"):
        elevation_path = resolve_file(elevation.get("path"), "elevation.path")
    if mode == "remote":
        endpoint = os.environ.get(ENV_ELEVATION_ENDPOINT) or elevation.get("endpoint")
        if not isinstance(endpoint, str) or not endpoint:
            raise _scenario_error("elevation.endpoint required for remote mode",
                                  str(path))
    if mode in ("remote", "recorded"):
        grid_doc = elevation.get("grid")
        if not isinstance(grid_doc, dict):
            raise _scenario_error(
                f"elevation.grid required for {mode} mode", str(path))
        try:
            grid_spec = GridSpec(
                origin=GeoPoint(lat=float(grid_doc["origin_lat"]),
                                lon=float(grid_doc["origin_lon"])),
                cell_size_m=float(grid_doc["cell_size_m"]),
                rows=int(grid_doc["rows"]),
                cols=int(grid_doc["cols"]),
            )
        except (KeyError, TypeError, ValueError, ValidationError) as exc:
            raise _scenario_error(f"bad elevation.grid: {exc}", str(path)) from exc

    observations_path = None
    if doc.get("observations") is not None:
        observations_path = resolve_file(doc["observations"], "observations")
    pole_pairs_path = None
    if doc.get("pole_pairs") is not None:
        pole_pairs_path = resolve_file(doc["pole_pairs"], "pole_pairs")

    decay_doc = doc.get("decay", {})
    if not isinstance(decay_doc, dict):
        raise _scenario_error("decay must be an object", str(path))
    try:
        decay = DecayParams(
            bandwidth_m=float(decay_doc.get("bandwidth_m", DEFAULT_BANDWIDTH_M)),
            support_radius_factor=float(
                decay_doc.get("support_radius_factor",
                              DEFAULT_SUPPORT_RADIUS_FACTOR)),
        )
    except (TypeError, ValueError, ValidationError) as exc:
        raise _scenario_error(f"bad decay parameters: {exc}", str(path)) from exc

    route_defaults = doc.get("route_defaults", {})
    if not isinstance(route_defaults, dict):
        raise _scenario_error("route_defaults must be an object", str(path))
    allowed = {"max_depth_m", "heuristic", "depth_penalty_per_m"}
    unknown = set(route_defaults) - allowed
    if unknown:
        raise _scenario_error(
            f"unknown route_defaults key(s): {sorted(unknown)}", str(path))
    if "max_depth_m" in route_defaults:
        value = route_defaults["max_depth_m"]
        if not isinstance(value, (int, float)) or isinstance(value, bool) \
                or not math.isfinite(value) or value < 0:
            raise _scenario_error("route_defaults.max_depth_m must be >= 0",
                                  str(path))
    if "depth_penalty_per_m" in route_defaults:
        value = route_defaults["depth_penalty_per_m"]
        if not isinstance(value, (int, float)) or isinstance(value, bool) \
                or not math.isfinite(value) or value < 0:
            raise _scenario_error(
                "route_defaults.depth_penalty_per_m must be >= 0", str(path))
    if "heuristic" in route_defaults:
        try:
            Heuristic(route_defaults["heuristic"])
        except ValueError:
            raise _scenario_error(
                f"unknown heuristic: {route_defaults['heuristic']!r}",
                str(path)) from None

    return Scenario(
        name=name,
        elevation_mode=mode,
        elevation_path=elevation_path,
        endpoint=endpoint,
        grid_spec=grid_spec,
        observations_path=observations_path,
        pole_pairs_path=pole_pairs_path,
        decay_params=decay,
        route_defaults=dict(route_defaults),
    )
