"""Flood-depth mapping and flood-aware route planning.

Builds water-depth rasters from crowdsourced observations with a
Gaussian distance-decay kernel corrected for elevation, then plans
routes over the raster with grid search honoring a wade-depth
threshold. Ships a CLI and an HTTP service on top.
"""

from ._kernels import available_backends, backend_name
from .depth import (
    METERS_PER_INCH,
    DepthObservation,
    ObservationSource,
    PolePairMeasurement,
    estimate_depth,
    inches_to_meters,
    meters_to_inches,
    rmse,
)
from .errors import (
    CsvValidationError,
    FileAccessError,
    FloodRouteError,
    FormatError,
    GridIndexError,
    NodataElevationError,
    NotCoveredError,
    OutsideFootprintError,
    ProtocolError,
    ProviderUnavailableError,
    ValidationError,
)
from .geo import (
    DEFAULT_MAX_GRID_CELLS,
    DEFAULT_NODATA,
    EARTH_RADIUS_M,
    ElevationGrid,
    GeoPoint,
    GridSpec,
    cell_center,
    haversine_distance,
    point_to_cell,
)
from .inundation import (
    DEFAULT_BANDWIDTH_M,
    DEFAULT_SUPPORT_RADIUS_FACTOR,
    RASTER_FORMAT_VERSION,
    DecayParams,
    FloodRaster,
    build_flood_raster,
    decay_depth_at,
    export_flood_geojson,
    raster_from_json_document,
    threshold_mask,
)
from .io import (
    ElevationProvider,
    ProviderInfo,
    RasterElevationProvider,
    RecordedElevationClient,
    RemoteElevationClient,
    Scenario,
    fetch_elevation_grid,
    load_elevation_ascii,
    load_flood_raster,
    load_observations,
    load_pole_pairs,
    load_scenario,
    raster_elevation_provider,
    record_elevations,
    save_elevation_ascii,
    save_flood_raster,
    save_observations,
)
from .rfc3339 import format_rfc3339, parse_rfc3339
from .service import Engine, Snapshot, create_app
from .routing import (
    Heuristic,
    NoRoute,
    NoRouteReason,
    Route,
    RouteRequest,
    astar,
    dijkstra_oracle,
    heuristic,
    route_to_geojson,
    step_cost,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
