"""Command-line interface.

Exit codes: 0 success, 2 validation/parse failure, 3 no route found,
4 file or network I/O failure.
"""

from __future__ import annotations

import csv
import functools
import json
import math
import sys

import click

from . import io as fio
from .depth import estimate_depth, meters_to_inches, rmse
from .errors import (
    CsvValidationError,
    FileAccessError,
    FloodRouteError,
    FormatError,
    ProtocolError,
    ProviderUnavailableError,
    ValidationError,
)
from .geo import GeoPoint
from .inundation import DecayParams, build_flood_raster, export_flood_geojson
from .routing import Heuristic, NoRoute, RouteRequest, astar, route_to_geojson

EXIT_VALIDATION = 2
EXIT_NO_ROUTE = 3
EXIT_IO = 4

_HEURISTIC_NAMES = [h.value for h in Heuristic]


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def handled(fn):
    """Map domain exceptions to the documented exit codes."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (FileAccessError, ProviderUnavailableError, ProtocolError) as exc:
            _fail(EXIT_IO, str(exc))
        except OSError as exc:
            _fail(EXIT_IO, str(exc))
        except (ValidationError, FormatError) as exc:
            _fail(EXIT_VALIDATION, str(exc))
        except FloodRouteError as exc:
            _fail(EXIT_VALIDATION, str(exc))
    return wrapper


def _parse_latlon(text: str, label: str) -> GeoPoint:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValidationError(f"{label} must be lat,lon - got {text!r}")
    try:
        lat, lon = float(parts[0]), float(parts[1])
    except ValueError:
        raise ValidationError(f"{label} must be numeric lat,lon - got {text!r}") \
            from None
    return GeoPoint(lat=lat, lon=lon)


@click.group()
def cli():
    """Flood-depth mapping and flood-aware route planning."""


@cli.command("depth")
@click.option("--pairs", "pairs_path", required=True,
              type=click.Path(), help="Pole-pair CSV input.")
@click.option("-o", "out_path", required=True, type=click.Path(),
              help="Observation CSV output.")
@handled
def depth_cmd(pairs_path, out_path):
    """Convert pole-pair measurements into depth observations."""
    pairs = fio.load_pole_pairs(pairs_path)
    observations = [estimate_depth(m) for m in pairs]
    fio.save_observations(observations, out_path)
    click.echo(f"wrote {len(observations)} observation(s) to {out_path}")


@cli.command("map")
@click.option("--obs", "obs_path", required=True, type=click.Path(),
              help="Observation CSV input.")
@click.option("--dem", "dem_path", required=True, type=click.Path(),
              help="Elevation grid (Esri ASCII).")
@click.option("--bandwidth", "bandwidth_m", type=float, default=100.0,
              show_default=True, help="Gaussian bandwidth in meters.")
@click.option("--support-radius-factor", "support_radius_factor", type=float,
              default=3.0, show_default=True,
              help="Influence cutoff radius as a multiple of the bandwidth.")
@click.option("-o", "out_path", required=True, type=click.Path(),
              help="Flood raster JSON output.")
@handled
def map_cmd(obs_path, dem_path, bandwidth_m, support_radius_factor, out_path):
    """Build a flood-depth raster from observations and elevation."""
    observations = fio.load_observations(obs_path)
    if not observations:
        raise ValidationError("observation file has no rows")
    elevation = fio.load_elevation_ascii(dem_path)
    params = DecayParams(bandwidth_m=bandwidth_m,
                         support_radius_factor=support_radius_factor)
    raster = build_flood_raster(observations, elevation, params)
    fio.save_flood_raster(raster, out_path)
    flooded = int((raster.depth_m > 0).sum())
    click.echo(f"built {raster.spec.rows}x{raster.spec.cols} raster, "
               f"{flooded} flooded cell(s), wrote {out_path}")


@cli.command("route")
@click.option("--map", "map_path", required=True, type=click.Path(),
              help="Flood raster JSON input.")
@click.option("--from", "from_", required=True, metavar="LAT,LON",
              help="Origin (use --from=lat,lon for negative latitudes).")
@click.option("--to", "to_", required=True, metavar="LAT,LON",
              help="Destination.")
@click.option("--max-depth", "max_depth_m", required=True, type=float,
              help="Maximum passable water depth in meters.")
@click.option("--heuristic", type=click.Choice(_HEURISTIC_NAMES),
              default=Heuristic.OCTILE.value, show_default=True)
@click.option("--depth-penalty", "depth_penalty_per_m", type=float, default=0.0,
              show_default=True, help="Extra cost per meter of water depth.")
@click.option("-o", "out_path", type=click.Path(), default=None,
              help="Route GeoJSON output (default: stdout).")
@handled
def route_cmd(map_path, from_, to_, max_depth_m, heuristic,
              depth_penalty_per_m, out_path):
    """Plan a route over a flood raster."""
    raster = fio.load_flood_raster(map_path)
    request = RouteRequest(
        origin=_parse_latlon(from_, "--from"),
        destination=_parse_latlon(to_, "--to"),
        max_depth_m=max_depth_m,
        heuristic=Heuristic(heuristic),
        depth_penalty_per_m=depth_penalty_per_m,
    )
    result = astar(request, raster)
    if isinstance(result, NoRoute):
        _fail(EXIT_NO_ROUTE, f"no route: {result.reason.value}")
    feature = route_to_geojson(result, raster.spec)
    text = json.dumps(feature, indent=2)
    if out_path is None:
        click.echo(text)
    else:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
        click.echo(f"cost {result.total_cost:.6f}, "
                   f"length {result.path_length_m:.1f} m, "
                   f"expanded {result.expanded}, wrote {out_path}")


EVAL_HEADER = ("id", "depth_m")


def _load_depth_table(path) -> dict[str, float]:
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise FileAccessError(f"{path}: {exc}") from exc
    table: dict[str, float] = {}
    errors: list[tuple[int, str]] = []
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError("file is empty, expected a header row",
                              path=str(path)) from None
        if [c.strip() for c in header] != list(EVAL_HEADER):
            raise FormatError(f"header must be exactly {','.join(EVAL_HEADER)}",
                              path=str(path), line=1)
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                errors.append((line_no, f"expected 2 fields, got {len(row)}"))
                continue
            key = row[0].strip()
            if not key:
                errors.append((line_no, "id must be non-empty"))
                continue
            if key in table:
                errors.append((line_no, f"duplicate id {key!r}"))
                continue
            try:
                value = float(row[1])
            except ValueError:
                errors.append((line_no, f"depth_m is not a number: {row[1]!r}"))
                continue
            if not math.isfinite(value) or value < 0:
                errors.append((line_no, f"depth_m must be finite and >= 0, "
                                        f"got {row[1]}"))
                continue
            table[key] = value
    if errors:
        raise CsvValidationError(str(path), errors)
    if not table:
        raise ValidationError(f"{path}: no data rows")
    return table


@cli.command("eval")
@click.option("--estimates", "estimates_path", required=True, type=click.Path(),
              help="Estimated depths CSV (id,depth_m).")
@click.option("--truth", "truth_path", required=True, type=click.Path(),
              help="Ground-truth depths CSV (id,depth_m).")
@handled
def eval_cmd(estimates_path, truth_path):
    """Report estimation error against ground truth, joined on id."""
    estimates = _load_depth_table(estimates_path)
    truth = _load_depth_table(truth_path)
    missing = sorted(set(estimates) - set(truth))
    if missing:
        raise ValidationError(
            f"estimate id(s) missing from truth: {', '.join(missing)}")
    ids = sorted(estimates)
    error_m = rmse([estimates[i] for i in ids], [truth[i] for i in ids])
    click.echo(f"n={len(ids)} RMSE: {error_m:.6f} m ({meters_to_inches(error_m):.4f} in)")


@cli.command("serve")
@click.option("--scenario", "scenario_path", required=True, type=click.Path(),
              help="Scenario JSON file.")
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--ui-dir", "ui_dir", type=click.Path(), default=None,
              help="Directory of static web client files to serve at /.")
@handled
def serve_cmd(scenario_path, port, host, ui_dir):
    """Run the HTTP service for a scenario."""
    import uvicorn

    from .service import Engine, create_app

    scenario = fio.load_scenario(scenario_path)
    engine = Engine.from_scenario(scenario)
    app = create_app(engine, ui_dir=ui_dir)
    click.echo(f"scenario {scenario.name!r}: "
               f"{len(engine.snapshot.observations)} observation(s) loaded")
    uvicorn.run(app, host=host, port=port, log_level="warning")


main = cli

if __name__ == "__main__":
    main()
