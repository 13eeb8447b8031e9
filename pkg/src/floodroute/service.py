"""HTTP service: observation intake, raster builds, and route queries.

State lives in immutable snapshots swapped atomically under a writer
lock. Readers pin one snapshot per request, so a route computed while
an ingest lands never mixes two raster versions. Errors are problem-
detail JSON objects with a machine-readable code.
"""

from __future__ import annotations

import asyncio
import math
import threading
from dataclasses import dataclass
from typing import Sequence

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response

from .depth import DepthObservation
from .errors import (
    FloodRouteError,
    NotCoveredError,
    ValidationError,
)
from .geo import ElevationGrid, GeoPoint
from .inundation import (
    DecayParams,
    FloodRaster,
    build_flood_raster,
    export_flood_geojson,
    threshold_mask,
)
from .io import Scenario
from .rfc3339 import parse_rfc3339
from .routing import Heuristic, NoRoute, RouteRequest, astar, route_to_geojson

DEFAULT_TIMEOUT_S = 30.0


@dataclass(frozen=True)
class Snapshot:
    """One immutable engine state; never mutated after publication."""

    version: int
    elevation: ElevationGrid
    observations: tuple[DepthObservation, ...]
    params: DecayParams
    raster: FloodRaster | None
    raster_bytes: bytes | None


class Engine:
    """Snapshot holder: many concurrent readers, serialized writers.

    Reads take the current snapshot reference (an atomic pointer read);
    writers rebuild under a lock and publish a complete replacement with
    a strictly larger version. Version 0 is the boot state with no
    raster built yet.
    """

    def __init__(self, elevation: ElevationGrid,
                 observations: Sequence[DepthObservation] = (),
                 params: DecayParams | None = None,
                 route_defaults: dict | None = None,
                 name: str = "engine"):
        self.name = name
        self.route_defaults = dict(route_defaults or {})
        self._write_lock = threading.Lock()
        self._snapshot = Snapshot(
            version=0,
            elevation=elevation,
            observations=tuple(observations),
            params=params or DecayParams(),
            raster=None,
            raster_bytes=None,
        )

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> "Engine":
        return cls(
            elevation=scenario.load_elevation(),
            observations=scenario.load_observations(),
            params=scenario.decay_params,
            route_defaults=scenario.route_defaults,
            name=scenario.name,
        )

    @property
    def snapshot(self) -> Snapshot:
        return self._snapshot

    def _publish(self, snap: Snapshot, observations: tuple[DepthObservation, ...],
                 params: DecayParams) -> Snapshot:
        raster = build_flood_raster(list(observations), snap.elevation, params)
        new = Snapshot(
            version=snap.version + 1,
            elevation=snap.elevation,
            observations=observations,
            params=params,
            raster=raster,
            raster_bytes=raster.to_json_str().encode("utf-8"),
        )
        self._snapshot = new
        return new

    def ingest(self, new_observations: Sequence[DepthObservation]) -> Snapshot:
        """Append observations and rebuild with the current parameters."""
        if not new_observations:
            raise ValidationError("no observations to ingest")
        with self._write_lock:
            snap = self._snapshot
            return self._publish(
                snap, snap.observations + tuple(new_observations), snap.params)

    def build(self, params: DecayParams | None = None) -> Snapshot:
        """Rebuild the raster, optionally with new decay parameters."""
        with self._write_lock:
            snap = self._snapshot
            if not snap.observations:
                raise ValidationError("cannot build a raster with no observations")
            return self._publish(snap, snap.observations, params or snap.params)


# ---------------------------------------------------------------------------
# HTTP layer


def _problem(status: int, code: str, detail: str, extra: dict | None = None):
    body = {"title": code.replace("_", " "), "status": status,
            "detail": detail, "code": code}
    if extra:
        body.update(extra)
    return JSONResponse(status_code=status, content=body,
                        media_type="application/problem+json")


def _record_to_observation(record) -> DepthObservation:
    if not isinstance(record, dict):
        raise ValidationError("record must be an object")
    missing = [k for k in ("id", "lat", "lon", "depth_m", "timestamp")
               if k not in record]
    if missing:
        raise ValidationError(f"missing field(s): {', '.join(missing)}")
    obs_id = record["id"]
    if not isinstance(obs_id, str) or not obs_id:
        raise ValidationError("id must be a non-empty string")

    def num(key):
        value = record[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"{key} must be a number")
        return float(value)

    return DepthObservation(
        id=obs_id,
        location=GeoPoint(lat=num("lat"), lon=num("lon")),
        depth_m=num("depth_m"),
        timestamp=parse_rfc3339(record["timestamp"]),
    )


def _json_number(body: dict, key: str, default=None):
    value = body.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{key} must be a number")
    return float(value)


def _raster_stats(raster: FloodRaster) -> dict:
    valid = ~raster.nodata_mask
    depths = raster.depth_m[valid]
    max_depth = float(depths.max()) if depths.size else 0.0
    flooded = int((depths > 0.0).sum())
    return {"max_depth_m": max_depth, "flooded_cell_count": flooded}


def create_app(engine: Engine, *, timeout_s: float = DEFAULT_TIMEOUT_S,
               ui_dir: str | None = None):
    """Build the FastAPI application around an engine instance."""
    app = FastAPI(title="floodroute", docs_url=None, redoc_url=None)
    app.state.engine = engine

    @app.middleware("http")
    async def deadline(request: Request, call_next):
        try:
            return await asyncio.wait_for(call_next(request), timeout=timeout_s)
        except asyncio.TimeoutError:
            return _problem(503, "timeout",
                            f"request exceeded {timeout_s:g}s deadline")

    @app.exception_handler(FloodRouteError)
    async def on_domain_error(request: Request, exc: FloodRouteError):
        return _problem(422, "validation_error", str(exc))

    @app.exception_handler(RequestValidationError)
    async def on_request_error(request: Request, exc: RequestValidationError):
        return _problem(422, "validation_error", str(exc.errors()))

    @app.get("/health")
    def health():
        snap = engine.snapshot
        return {"status": "ok", "snapshot_version": snap.version}

    @app.post("/observations")
    async def post_observations(request: Request):
        try:
            payload = await request.json()
        except Exception:
            return _problem(422, "invalid_json", "request body is not valid JSON")
        if not isinstance(payload, list):
            return _problem(422, "validation_error",
                            "body must be an array of observation records")
        if not payload:
            return _problem(422, "validation_error",
                            "observation array must be non-empty")
        records: list[DepthObservation] = []
        errors: list[dict] = []
        for index, record in enumerate(payload):
            try:
                records.append(_record_to_observation(record))
            except FloodRouteError as exc:
                errors.append({"index": index, "message": str(exc)})
        if errors:
            return _problem(422, "validation_error",
                            f"{len(errors)} invalid record(s)",
                            extra={"errors": errors})
        try:
            snap = engine.ingest(records)
        except NotCoveredError as exc:
            return _problem(422, "observation_not_covered", str(exc))
        return {"accepted_count": len(records),
                "snapshot_version": snap.version}

    @app.post("/map/build")
    async def post_map_build(request: Request):
        body_bytes = await request.body()
        if body_bytes:
            try:
                body = await request.json()
            except Exception:
                return _problem(422, "invalid_json",
                                "request body is not valid JSON")
        else:
            body = {}
        if not isinstance(body, dict):
            return _problem(422, "validation_error", "body must be an object")
        current = engine.snapshot.params
        try:
            bandwidth = _json_number(body, "bandwidth_m")
            factor = _json_number(body, "support_radius_factor")
            params = DecayParams(
                bandwidth_m=current.bandwidth_m if bandwidth is None else bandwidth,
                support_radius_factor=(current.support_radius_factor
                                       if factor is None else factor),
            )
            snap = engine.build(params)
        except NotCoveredError as exc:
            return _problem(422, "observation_not_covered", str(exc))
        except ValidationError as exc:
            return _problem(422, "validation_error", str(exc))
        spec = snap.raster.spec
        return {
            "rows": spec.rows,
            "cols": spec.cols,
            "cell_size_m": spec.cell_size_m,
            "snapshot_version": snap.version,
            **_raster_stats(snap.raster),
        }

    @app.get("/map/flood.geojson")
    def get_flood_geojson(max_depth_m: float = 0.0):
        snap = engine.snapshot
        if snap.raster is None:
            return _problem(409, "raster_not_built",
                            "build the flood raster before querying the map")
        if not math.isfinite(max_depth_m) or max_depth_m < 0:
            return _problem(422, "validation_error",
                            "max_depth_m must be finite and >= 0")
        doc = export_flood_geojson(snap.raster, max_depth_m)
        doc["snapshot_version"] = snap.version
        return JSONResponse(content=doc, media_type="application/geo+json")

    @app.get("/map/raster")
    def get_raster():
        snap = engine.snapshot
        if snap.raster is None:
            return _problem(409, "raster_not_built",
                            "build the flood raster before fetching it")
        return Response(content=snap.raster_bytes,
                        media_type="application/json",
                        headers={"X-Snapshot-Version": str(snap.version)})

    @app.post("/route")
    async def post_route(request: Request):
        snap = engine.snapshot
        if snap.raster is None:
            return _problem(409, "raster_not_built",
                            "build the flood raster before routing")
        try:
            body = await request.json()
        except Exception:
            return _problem(422, "invalid_json", "request body is not valid JSON")
        if not isinstance(body, dict):
            return _problem(422, "validation_error", "body must be an object")
        defaults = engine.route_defaults

        def endpoint(key: str) -> GeoPoint:
            value = body.get(key)
            if not isinstance(value, dict):
                raise ValidationError(f"{key} must be an object with lat and lon")
            return GeoPoint(lat=_json_number(value, "lat"),
                            lon=_json_number(value, "lon"))

        try:
            origin = endpoint("origin")
            destination = endpoint("destination")
            max_depth = _json_number(body, "max_depth_m",
                                     defaults.get("max_depth_m"))
            if max_depth is None:
                raise ValidationError("max_depth_m is required")
            heuristic_name = body.get(
                "heuristic", defaults.get("heuristic", Heuristic.OCTILE.value))
            try:
                heuristic = Heuristic(heuristic_name)
            except ValueError:
                raise ValidationError(
                    f"unknown heuristic: {heuristic_name!r}") from None
            penalty = _json_number(body, "depth_penalty_per_m",
                                   defaults.get("depth_penalty_per_m", 0.0))
            route_request = RouteRequest(
                origin=origin, destination=destination,
                max_depth_m=max_depth, heuristic=heuristic,
                depth_penalty_per_m=penalty)
        except ValidationError as exc:
            return _problem(422, "validation_error", str(exc))
        result = astar(route_request, snap.raster)
        if isinstance(result, NoRoute):
            return _problem(409, result.reason.value,
                            f"no route: {result.reason.value}",
                            extra={"reason": result.reason.value,
                                   "expanded": result.expanded,
                                   "snapshot_version": snap.version})
        feature = route_to_geojson(result, snap.raster.spec)
        return {"snapshot_version": snap.version, "route": feature}

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
