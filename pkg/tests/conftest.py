"""Shared fixtures, random-instance builders, and the acceptance report.

Tests in test_acceptance.py map one-to-one onto the package's acceptance
checklist; the terminal summary prints a PASS/FAIL line for each so the
gate is readable without scrolling the pytest output.
"""

from __future__ import annotations

from datetime import datetime, timezone

import numpy as np
import pytest

from floodroute import (
    DecayParams,
    DepthObservation,
    ElevationGrid,
    FloodRaster,
    GeoPoint,
    GridSpec,
    RouteRequest,
    cell_center,
)

TS = datetime(2024, 5, 1, 12, 0, 0, tzinfo=timezone.utc)

# Houston-ish origin; all fixtures use northern-hemisphere mid latitudes.
ORIGIN = GeoPoint(lat=29.70, lon=-95.40)


def make_spec(rows=20, cols=20, cell_size_m=10.0, origin=ORIGIN) -> GridSpec:
    return GridSpec(origin=origin, cell_size_m=cell_size_m, rows=rows, cols=cols)


def flat_elevation(spec: GridSpec, value: float = 0.0) -> ElevationGrid:
    return ElevationGrid(
        spec=spec,
        values=np.full((spec.rows, spec.cols), value, dtype=np.float64),
        nodata=-9999.0,
    )


def observation(spec: GridSpec, row: int, col: int, depth_m: float,
                obs_id: str = "obs", ts: datetime = TS) -> DepthObservation:
    return DepthObservation(id=obs_id, location=cell_center(spec, row, col),
                            depth_m=depth_m, timestamp=ts)


def raster_from_depths(depths, cell_size_m: float = 10.0,
                       nodata_mask=None, params: DecayParams | None = None,
                       origin=ORIGIN) -> FloodRaster:
    """FloodRaster straight from an array, for routing-focused tests."""
    depths = np.asarray(depths, dtype=np.float64)
    spec = GridSpec(origin=origin, cell_size_m=cell_size_m,
                    rows=depths.shape[0], cols=depths.shape[1])
    if nodata_mask is None:
        nodata_mask = np.zeros(depths.shape, dtype=bool)
    return FloodRaster(spec=spec, depth_m=depths,
                       nodata_mask=np.asarray(nodata_mask, dtype=bool),
                       generated_at=TS, params=params or DecayParams())


def random_instance(rng: np.random.Generator, rows=20, cols=20):
    """Random raster + route request used by optimality sweeps.

    Depths are uniform in [0, 1) with a random patch of flooded cells;
    threshold and endpoints are random, endpoints forced passable so the
    interesting outcomes are route-vs-oracle and disconnected.
    """
    depths = rng.uniform(0.0, 1.0, (rows, cols))
    # Carve some fully dry cells so instances are not all-blocked.
    dry = rng.random((rows, cols)) < 0.4
    depths[dry] = 0.0
    nodata = rng.random((rows, cols)) < 0.03
    threshold = float(rng.uniform(0.2, 0.8))
    passable = np.argwhere((depths <= threshold) & ~nodata)
    if len(passable) < 2:
        depths[0, 0] = depths[rows - 1, cols - 1] = 0.0
        nodata[0, 0] = nodata[rows - 1, cols - 1] = False
        passable = np.array([[0, 0], [rows - 1, cols - 1]])
    start, goal = passable[rng.choice(len(passable), 2, replace=False)]
    raster = raster_from_depths(depths, nodata_mask=nodata)
    penalty = float(rng.choice([0.0, 0.0, 0.5, 2.0]))
    request = RouteRequest(
        origin=cell_center(raster.spec, int(start[0]), int(start[1])),
        destination=cell_center(raster.spec, int(goal[0]), int(goal[1])),
        max_depth_m=threshold,
        depth_penalty_per_m=penalty,
    )
    return raster, request


def assert_route_valid(route, raster: FloodRaster, request: RouteRequest):
    """Route invariants: adjacency, no repeats, threshold safety."""
    from floodroute import point_to_cell

    cells = route.cells
    assert cells[0] == point_to_cell(raster.spec, request.origin)
    assert cells[-1] == point_to_cell(raster.spec, request.destination)
    assert len(set(cells)) == len(cells)
    for (r1, c1), (r2, c2) in zip(cells, cells[1:]):
        assert max(abs(r1 - r2), abs(c1 - c2)) == 1
    for r, c in cells:
        assert not raster.nodata_mask[r, c]
        assert raster.depth_m[r, c] <= request.max_depth_m


@pytest.fixture
def spec20():
    return make_spec()


@pytest.fixture
def flat20(spec20):
    return flat_elevation(spec20)


# ---------------------------------------------------------------------------
# Acceptance reporting

ACCEPTANCE_LABELS = {
    "test_decay_field_matches_scalar_oracle":
        "decay field equals independent per-cell oracle (20x20, <1s, 1e-9)",
    "test_decay_analytic_points_and_clamp":
        "analytic kernel values; clamp holds on 1000 adversarial fields",
    "test_astar_optimality_500_instances":
        "astar octile+zero == uniform-cost oracle on 500 instances (<30s)",
    "test_verbatim_heuristic_gap_report":
        "verbatim-heuristic mode valid everywhere; gap reported",
    "test_detour_scenario_15x15":
        "15x15 flooded-region detour reaches goal around deep cells",
    "test_depth_estimation_suite":
        "depth arithmetic, clamp, scale invariance, rmse, unit round-trip",
    "test_format_round_trips_and_corrupt_inputs":
        "lossless format round-trips; corrupt inputs rejected with typed errors",
    "test_service_snapshot_isolation":
        "snapshot isolation under concurrent load; byte-identical rebuilds",
}

_acceptance_results: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1].split("[")[0]
    if name not in ACCEPTANCE_LABELS:
        return
    if report.when == "call":
        _acceptance_results[name] = report.outcome
    elif report.when == "setup" and report.outcome != "passed":
        _acceptance_results[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, label in ACCEPTANCE_LABELS.items():
        outcome = _acceptance_results.get(name)
        if outcome is None:
            continue
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}.get(
            outcome, outcome.upper())
        terminalreporter.write_line(f"[{status}] {label}")
