"""Regenerate the checked-in fixture files.

Run from the repository root: python fixtures/generate.py
Deterministic by construction; the outputs are committed so tests and
the demo scenario work without running this.
"""

from pathlib import Path

import numpy as np

from floodroute import (
    DepthObservation,
    ElevationGrid,
    GeoPoint,
    GridSpec,
    cell_center,
    parse_rfc3339,
    save_elevation_ascii,
    save_observations,
)

HERE = Path(__file__).parent
SPEC = GridSpec(origin=GeoPoint(29.70, -95.40), cell_size_m=10.0,
                rows=24, cols=24)


def make_dem() -> None:
    # gentle west-to-east rise with a shallow basin around (12, 12)
    r = np.arange(SPEC.rows)[:, None]
    c = np.arange(SPEC.cols)[None, :]
    values = 0.02 * c + 0.01 * r
    basin = 0.6 * np.exp(-(((r - 12.0) ** 2 + (c - 12.0) ** 2) / 40.0))
    values = values - basin
    grid = ElevationGrid(spec=SPEC, values=values.astype(np.float64))
    save_elevation_ascii(grid, HERE / "dem.asc")


def make_observations() -> None:
    rows = [
        ("hydrant-12", 12, 12, 0.85, "2024-05-01T12:00:00Z"),
        ("curb-10", 10, 14, 0.40, "2024-05-01T12:05:00Z"),
        ("underpass-15", 15, 9, 0.55, "2024-05-01T12:10:00Z"),
    ]
    observations = [
        DepthObservation(id=name, location=cell_center(SPEC, r, c),
                         depth_m=depth, timestamp=parse_rfc3339(ts))
        for name, r, c, depth, ts in rows
    ]
    save_observations(observations, HERE / "obs.csv")


def make_pole_pairs() -> None:
    center = cell_center(SPEC, 8, 16)
    lines = [
        "id,lat,lon,pre_len_px,pre_scale_px_per_m,"
        "post_len_px,post_scale_px_per_m,timestamp",
        f"stopsign-8,{center.lat!r},{center.lon!r},"
        "210.0,105.0,170.0,100.0,2024-05-01T12:15:00Z",
    ]
    (HERE / "pairs.csv").write_text("\n".join(lines) + "\n")


def make_scenario() -> None:
    (HERE / "scenario.json").write_text("""{
  "name": "basin-demo",
  "elevation": {"mode": "raster", "path": "dem.asc"},
  "observations": "obs.csv",
  "pole_pairs": "pairs.csv",
  "decay": {"bandwidth_m": 45.0, "support_radius_factor": 3.0},
  "route_defaults": {"max_depth_m": 0.3, "heuristic": "octile",
                     "depth_penalty_per_m": 0.0}
}
""")


if __name__ == "__main__":
    make_dem()
    make_observations()
    make_pole_pairs()
    make_scenario()
    print(f"wrote fixtures to {HERE}")
