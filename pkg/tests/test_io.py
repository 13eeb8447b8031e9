"""File formats, elevation providers, and scenario loading."""

import json
import math

import httpx
import numpy as np
import pytest

from floodroute import (
    CsvValidationError,
    DecayParams,
    ElevationGrid,
    FileAccessError,
    FormatError,
    GeoPoint,
    NotCoveredError,
    ProtocolError,
    ProviderUnavailableError,
    RasterElevationProvider,
    RecordedElevationClient,
    RemoteElevationClient,
    build_flood_raster,
    cell_center,
    estimate_depth,
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
from .conftest import TS, flat_elevation, make_spec, observation

OBS_CSV = """id,lat,lon,depth_m,timestamp
a1,29.71,-95.39,0.5,2024-05-01T12:00:00Z
a2,29.72,-95.38,0.0,2024-05-01T12:05:00Z
a3,29.73,-95.37,1.25,2024-05-01T12:10:00+00:00
"""


class TestObservationCsv:
    def test_load_valid(self, tmp_path):
        path = tmp_path / "obs.csv"
        path.write_text(OBS_CSV)
        obs = load_observations(path)
        assert [o.id for o in obs] == ["a1", "a2", "a3"]
        assert obs[0].location == GeoPoint(29.71, -95.39)
        assert obs[2].depth_m == 1.25
        assert obs[1].timestamp.isoformat() == "2024-05-01T12:05:00+00:00"

    def test_missing_column_is_named(self, tmp_path):
        path = tmp_path / "obs.csv"
        path.write_text("id,lat,lon,timestamp\na,29.7,-95.4,2024-05-01T12:00:00Z\n")
        with pytest.raises(FormatError) as err:
            load_observations(path)
        assert "depth_m" in str(err.value)

    def test_reordered_header_rejected(self, tmp_path):
        path = tmp_path / "obs.csv"
        path.write_text("lat,id,lon,depth_m,timestamp\n")
        with pytest.raises(FormatError):
            load_observations(path)

    def test_row_errors_collected_with_line_numbers(self, tmp_path):
        path = tmp_path / "obs.csv"
        path.write_text(
            "id,lat,lon,depth_m,timestamp\n"
            "a,29.7,-95.4,-0.5,2024-05-01T12:00:00Z\n"   # negative depth
            "b,29.7,-95.4,0.5,2024-05-01T12:00:00Z\n"    # fine
            "c,91.0,-95.4,0.5,2024-05-01T12:00:00Z\n"    # bad latitude
            ",29.7,-95.4,0.5,2024-05-01T12:00:00Z\n"     # empty id
        )
        with pytest.raises(CsvValidationError) as err:
            load_observations(path)
        lines = [line for line, _ in err.value.row_errors]
        assert lines == [2, 4, 5]

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "obs.csv"
        path.write_text("id,lat,lon,depth_m,timestamp\n\n"
                        "a,29.7,-95.4,0.5,2024-05-01T12:00:00Z\n\n")
        assert len(load_observations(path)) == 1

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "obs.csv"
        path.write_text("")
        with pytest.raises(FormatError):
            load_observations(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileAccessError):
            load_observations(tmp_path / "nope.csv")

    def test_save_load_round_trip(self, tmp_path, spec20):
        original = [observation(spec20, 3, 4, 0.123456789123),
                    observation(spec20, 7, 1, 0.0, obs_id="zero")]
        path = tmp_path / "out.csv"
        save_observations(original, path)
        loaded = load_observations(path)
        assert loaded == original

    def test_non_numeric_depth(self, tmp_path):
        path = tmp_path / "obs.csv"
        path.write_text("id,lat,lon,depth_m,timestamp\n"
                        "a,29.7,-95.4,deep,2024-05-01T12:00:00Z\n")
        with pytest.raises(CsvValidationError) as err:
            load_observations(path)
        assert "depth_m" in err.value.row_errors[0][1]


class TestPolePairCsv:
    HEADER = ("id,lat,lon,pre_len_px,pre_scale_px_per_m,"
              "post_len_px,post_scale_px_per_m,timestamp\n")

    def test_load_and_estimate(self, tmp_path):
        path = tmp_path / "pairs.csv"
        path.write_text(self.HEADER +
                        "p1,29.7,-95.4,200.0,100.0,140.0,100.0,2024-05-01T12:00:00Z\n")
        pairs = load_pole_pairs(path)
        assert len(pairs) == 1
        assert estimate_depth(pairs[0]).depth_m == pytest.approx(0.6, abs=1e-12)

    def test_zero_scale_rejected_per_row(self, tmp_path):
        path = tmp_path / "pairs.csv"
        path.write_text(self.HEADER +
                        "p1,29.7,-95.4,200.0,0.0,140.0,100.0,2024-05-01T12:00:00Z\n")
        with pytest.raises(CsvValidationError) as err:
            load_pole_pairs(path)
        assert err.value.row_errors[0][0] == 2


ASCII_2X2 = """ncols 2
nrows 2
xllcorner -95.40
yllcorner 29.70
cellsize 10.0
NODATA_value -9999
1.5 2.5
3.5 -9999
"""


class TestElevationAscii:
    def test_parse_with_north_first_flip(self, tmp_path):
        path = tmp_path / "dem.asc"
        path.write_text(ASCII_2X2)
        grid = load_elevation_ascii(path)
        assert grid.spec.rows == 2 and grid.spec.cols == 2
        assert grid.spec.origin == GeoPoint(29.70, -95.40)
        assert grid.spec.cell_size_m == 10.0
        # first disk row is the north edge, so it lands in memory row 1
        assert grid.values[1, 0] == 1.5 and grid.values[1, 1] == 2.5
        assert grid.values[0, 0] == 3.5
        assert grid.nodata_mask[0, 1] and not grid.nodata_mask[0, 0]

    def test_round_trip_bit_exact(self, tmp_path, spec20):
        rng = np.random.default_rng(5)
        values = rng.uniform(-10, 10, (spec20.rows, spec20.cols))
        values[3, 3] = -9999.0
        grid = ElevationGrid(spec=spec20, values=values)
        path = tmp_path / "dem.asc"
        save_elevation_ascii(grid, path)
        back = load_elevation_ascii(path)
        assert np.array_equal(back.values, grid.values)
        assert back.spec == grid.spec
        assert back.nodata == grid.nodata
        assert np.array_equal(back.nodata_mask, grid.nodata_mask)

    def test_missing_header_named_with_line(self, tmp_path):
        path = tmp_path / "dem.asc"
        path.write_text("ncols 2\nnrows 2\nxllcorner -95.4\nyllcorner 29.7\n1 2\n3 4\n")
        with pytest.raises(FormatError) as err:
            load_elevation_ascii(path)
        assert "cellsize" in str(err.value)

    def test_wrong_row_width(self, tmp_path):
        path = tmp_path / "dem.asc"
        path.write_text(ASCII_2X2.replace("1.5 2.5", "1.5 2.5 9.9"))
        with pytest.raises(FormatError) as err:
            load_elevation_ascii(path)
        assert err.value.line == 7

    def test_missing_data_row(self, tmp_path):
        path = tmp_path / "dem.asc"
        path.write_text(ASCII_2X2.replace("3.5 -9999\n", ""))
        with pytest.raises(FormatError) as err:
            load_elevation_ascii(path)
        assert "expected 2 data rows" in str(err.value)

    def test_extra_data_row(self, tmp_path):
        path = tmp_path / "dem.asc"
        path.write_text(ASCII_2X2 + "5.0 6.0\n")
        with pytest.raises(FormatError):
            load_elevation_ascii(path)

    def test_non_numeric_value(self, tmp_path):
        path = tmp_path / "dem.asc"
        path.write_text(ASCII_2X2.replace("3.5", "wet"))
        with pytest.raises(FormatError) as err:
            load_elevation_ascii(path)
        assert err.value.line == 8

    def test_bad_header_value(self, tmp_path):
        path = tmp_path / "dem.asc"
        path.write_text(ASCII_2X2.replace("cellsize 10.0", "cellsize ten"))
        with pytest.raises(FormatError) as err:
            load_elevation_ascii(path)
        assert err.value.line == 5

    def test_cell_cap_override(self, tmp_path):
        path = tmp_path / "dem.asc"
        path.write_text(ASCII_2X2)
        with pytest.raises(FormatError):
            load_elevation_ascii(path, max_cells=2)


class TestFloodRasterFile:
    def build(self, spec):
        obs = [observation(spec, 5, 5, 0.8)]
        return build_flood_raster(obs, flat_elevation(spec),
                                  DecayParams(bandwidth_m=40.0))

    def test_round_trip(self, tmp_path, spec20):
        raster = self.build(spec20)
        path = tmp_path / "flood.json"
        save_flood_raster(raster, path)
        back = load_flood_raster(path)
        assert back.to_json_str() == raster.to_json_str()

    def test_corrupt_json(self, tmp_path):
        path = tmp_path / "flood.json"
        path.write_text("{not json")
        with pytest.raises(FormatError):
            load_flood_raster(path)

    def test_wrong_shape(self, tmp_path, spec20):
        raster = self.build(spec20)
        doc = raster.to_json_document()
        doc["depth_m"] = doc["depth_m"][:-1]
        path = tmp_path / "flood.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(FormatError):
            load_flood_raster(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileAccessError):
            load_flood_raster(tmp_path / "nope.json")


class TestRasterProvider:
    def test_center_exact_and_interpolated(self, spec20):
        values = np.fromfunction(lambda r, c: r * 2.0 + c,
                                 (spec20.rows, spec20.cols))
        provider = raster_elevation_provider(ElevationGrid(spec=spec20,
                                                           values=values))
        assert isinstance(provider, RasterElevationProvider)
        center = cell_center(spec20, 4, 7)
        assert provider.elevation_at(center) == values[4, 7]
        info = provider.info
        assert info.resolution_m == spec20.cell_size_m
        assert info.footprint is not None

    def test_outside_footprint(self, spec20, flat20):
        provider = raster_elevation_provider(flat20)
        with pytest.raises(NotCoveredError):
            provider.elevation_at(GeoPoint(0.0, 0.0))

    def test_batch_matches_pointwise(self, spec20):
        rng = np.random.default_rng(9)
        grid = ElevationGrid(spec=spec20,
                             values=rng.uniform(0, 5, (spec20.rows, spec20.cols)))
        provider = raster_elevation_provider(grid)
        points = [cell_center(spec20, r, c) for r, c in [(0, 0), (3, 9), (19, 19)]]
        assert provider.elevations_at(points) == \
            [provider.elevation_at(p) for p in points]


def echo_handler(fail_first: int = 0, status_after: int = 200):
    """Transport handler that echoes lat/lon with elevation = lat + lon."""
    state = {"calls": 0, "batch_sizes": []}

    def handle(request: httpx.Request) -> httpx.Response:
        state["calls"] += 1
        body = json.loads(request.content)
        state["batch_sizes"].append(len(body["locations"]))
        if state["calls"] <= fail_first:
            return httpx.Response(503, text="busy")
        if status_after != 200:
            return httpx.Response(status_after, text="nope")
        results = [{"lat": p["lat"], "lon": p["lon"],
                    "elevation_m": p["lat"] + p["lon"]}
                   for p in body["locations"]]
        return httpx.Response(200, json={"results": results})

    return handle, state


def remote(handler, **kwargs) -> RemoteElevationClient:
    sleeps: list[float] = []
    client = RemoteElevationClient(
        "http://elevation.test/lookup",
        transport=httpx.MockTransport(handler),
        sleep=sleeps.append, **kwargs)
    client.sleeps = sleeps
    return client


class TestRemoteClient:
    def test_single_lookup(self):
        handler, state = echo_handler()
        client = remote(handler)
        value = client.elevation_at(GeoPoint(29.7, -95.4))
        assert value == pytest.approx(29.7 + -95.4)
        assert state["calls"] == 1

    def test_batching_limit(self):
        handler, state = echo_handler()
        client = remote(handler)
        points = [GeoPoint(29.0 + i * 1e-4, -95.0) for i in range(250)]
        values = client.elevations_at(points)
        assert len(values) == 250
        assert state["batch_sizes"] == [100, 100, 50]

    def test_empty_list_no_request(self):
        handler, state = echo_handler()
        client = remote(handler)
        assert client.elevations_at([]) == []
        assert state["calls"] == 0

    def test_cache_prevents_repeat_requests(self):
        handler, state = echo_handler()
        client = remote(handler)
        point = GeoPoint(29.7, -95.4)
        first = client.elevation_at(point)
        second = client.elevation_at(point)
        assert first == second
        assert state["calls"] == 1
        assert client.request_count == 1

    def test_retry_then_success_with_backoff(self):
        handler, state = echo_handler(fail_first=2)
        client = remote(handler, backoff_base_s=0.25)
        value = client.elevation_at(GeoPoint(29.7, -95.4))
        assert value == pytest.approx(29.7 - 95.4)
        assert state["calls"] == 3
        assert client.sleeps == [0.25, 0.5]

    def test_exhausted_retries(self):
        handler, state = echo_handler(fail_first=99)
        client = remote(handler)
        with pytest.raises(ProviderUnavailableError):
            client.elevation_at(GeoPoint(29.7, -95.4))
        assert state["calls"] == 3

    def test_client_error_not_retried(self):
        handler, state = echo_handler(status_after=404)
        client = remote(handler)
        with pytest.raises(ProviderUnavailableError):
            client.elevation_at(GeoPoint(29.7, -95.4))
        assert state["calls"] == 1

    def test_transport_error_retried(self):
        calls = {"n": 0}

        def handle(request: httpx.Request) -> httpx.Response:
            calls["n"] += 1
            if calls["n"] < 3:
                raise httpx.ConnectError("refused")
            body = json.loads(request.content)
            results = [{"lat": p["lat"], "lon": p["lon"], "elevation_m": 7.0}
                       for p in body["locations"]]
            return httpx.Response(200, json={"results": results})

        client = remote(handle)
        assert client.elevation_at(GeoPoint(29.7, -95.4)) == 7.0
        assert calls["n"] == 3

    def test_echo_mismatch(self):
        def handle(request: httpx.Request) -> httpx.Response:
            return httpx.Response(200, json={"results": [
                {"lat": 0.0, "lon": 0.0, "elevation_m": 1.0}]})

        client = remote(handle)
        with pytest.raises(ProtocolError):
            client.elevation_at(GeoPoint(29.7, -95.4))

    def test_truncated_results(self):
        def handle(request: httpx.Request) -> httpx.Response:
            return httpx.Response(200, json={"results": []})

        client = remote(handle)
        with pytest.raises(ProtocolError):
            client.elevation_at(GeoPoint(29.7, -95.4))

    def test_non_finite_elevation(self):
        def handle(request: httpx.Request) -> httpx.Response:
            body = json.loads(request.content)
            p = body["locations"][0]
            return httpx.Response(200, json={"results": [
                {"lat": p["lat"], "lon": p["lon"], "elevation_m": "NaN"}]})

        client = remote(handle)
        with pytest.raises(ProtocolError):
            client.elevation_at(GeoPoint(29.7, -95.4))

    def test_body_not_json(self):
        def handle(request: httpx.Request) -> httpx.Response:
            return httpx.Response(200, text="<html>oops</html>")

        client = remote(handle)
        with pytest.raises(ProtocolError):
            client.elevation_at(GeoPoint(29.7, -95.4))


class TestRecordedClient:
    def fixture(self, tmp_path):
        path = tmp_path / "recorded.json"
        entries = [{"lat": 29.7 + i * 0.001, "lon": -95.4, "elevation_m": float(i)}
                   for i in range(4)]
        path.write_text(json.dumps({"entries": entries}))
        return path

    def test_replays(self, tmp_path):
        client = RecordedElevationClient(self.fixture(tmp_path))
        assert client.elevation_at(GeoPoint(29.702, -95.4)) == 2.0

    def test_miss(self, tmp_path):
        client = RecordedElevationClient(self.fixture(tmp_path))
        with pytest.raises(NotCoveredError):
            client.elevation_at(GeoPoint(10.0, 10.0))

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "recorded.json"
        path.write_text(json.dumps({"entries": [{"lat": 1.0}]}))
        with pytest.raises(FormatError):
            RecordedElevationClient(path)

    def test_record_round_trip(self, tmp_path, spec20, flat20):
        source = raster_elevation_provider(ElevationGrid(
            spec=spec20,
            values=np.fromfunction(lambda r, c: r + c * 0.5,
                                   (spec20.rows, spec20.cols))))
        points = [cell_center(spec20, r, c) for r, c in [(0, 0), (5, 5), (9, 2)]]
        path = tmp_path / "recorded.json"
        record_elevations(source, points, path)
        replay = RecordedElevationClient(path)
        for p in points:
            assert replay.elevation_at(p) == source.elevation_at(p)


class TestFetchElevationGrid:
    def test_full_coverage(self, tmp_path, spec20):
        handler, state = echo_handler()
        client = remote(handler)
        small = make_spec(rows=4, cols=4)
        grid = fetch_elevation_grid(client, small)
        assert grid.spec == small
        center = cell_center(small, 2, 3)
        assert grid.values[2, 3] == pytest.approx(center.lat + center.lon)
        assert not grid.nodata_mask.any()

    def test_partial_coverage_fills_nodata(self, tmp_path):
        small = make_spec(rows=3, cols=3)
        covered = [cell_center(small, r, c)
                   for r in range(3) for c in range(3) if (r, c) != (1, 1)]
        path = tmp_path / "recorded.json"
        path.write_text(json.dumps({"entries": [
            {"lat": p.lat, "lon": p.lon, "elevation_m": 5.0} for p in covered]}))
        grid = fetch_elevation_grid(RecordedElevationClient(path), small)
        assert grid.nodata_mask[1, 1]
        assert grid.nodata_mask.sum() == 1
        assert grid.values[0, 0] == 5.0


def write_scenario(tmp_path, doc):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc))
    return path


def base_scenario_doc(tmp_path, spec):
    dem = tmp_path / "dem.asc"
    save_elevation_ascii(flat_elevation(spec, 1.0), dem)
    obs = tmp_path / "obs.csv"
    save_observations([observation(spec, 3, 3, 0.5)], obs)
    return {
        "name": "demo",
        "elevation": {"mode": "raster", "path": "dem.asc"},
        "observations": "obs.csv",
        "decay": {"bandwidth_m": 50.0},
        "route_defaults": {"max_depth_m": 0.3, "heuristic": "octile"},
    }


class TestScenario:
    def test_load_and_materialize(self, tmp_path, spec20):
        doc = base_scenario_doc(tmp_path, spec20)
        scenario = load_scenario(write_scenario(tmp_path, doc))
        assert scenario.name == "demo"
        assert scenario.elevation_mode == "raster"
        assert scenario.decay_params.bandwidth_m == 50.0
        assert scenario.route_defaults["max_depth_m"] == 0.3
        grid = scenario.load_elevation()
        assert grid.spec.rows == spec20.rows
        obs = scenario.load_observations()
        assert len(obs) == 1 and obs[0].depth_m == 0.5

    def test_pole_pairs_become_observations(self, tmp_path, spec20):
        doc = base_scenario_doc(tmp_path, spec20)
        pairs = tmp_path / "pairs.csv"
        center = cell_center(spec20, 2, 2)
        pairs.write_text(
            "id,lat,lon,pre_len_px,pre_scale_px_per_m,"
            "post_len_px,post_scale_px_per_m,timestamp\n"
            f"p1,{center.lat},{center.lon},200,100,140,100,2024-05-01T12:00:00Z\n")
        doc["pole_pairs"] = "pairs.csv"
        scenario = load_scenario(write_scenario(tmp_path, doc))
        obs = scenario.load_observations()
        assert len(obs) == 2
        assert obs[1].depth_m == pytest.approx(0.6, abs=1e-12)

    def test_missing_referenced_file(self, tmp_path, spec20):
        doc = base_scenario_doc(tmp_path, spec20)
        doc["observations"] = "missing.csv"
        with pytest.raises(FormatError):
            load_scenario(write_scenario(tmp_path, doc))

    def test_unknown_route_default_rejected(self, tmp_path, spec20):
        doc = base_scenario_doc(tmp_path, spec20)
        doc["route_defaults"]["speed"] = 3
        with pytest.raises(FormatError):
            load_scenario(write_scenario(tmp_path, doc))

    def test_bad_heuristic_rejected(self, tmp_path, spec20):
        doc = base_scenario_doc(tmp_path, spec20)
        doc["route_defaults"]["heuristic"] = "teleport"
        with pytest.raises(FormatError):
            load_scenario(write_scenario(tmp_path, doc))

    def test_remote_mode_requires_grid(self, tmp_path, spec20):
        doc = base_scenario_doc(tmp_path, spec20)
        doc["elevation"] = {"mode": "remote", "endpoint": "http://x/lookup"}
        with pytest.raises(FormatError) as err:
            load_scenario(write_scenario(tmp_path, doc))
        assert "grid" in str(err.value)

    def test_env_overrides_mode_and_endpoint(self, tmp_path, spec20,
                                             monkeypatch):
        doc = base_scenario_doc(tmp_path, spec20)
        doc["elevation"]["grid"] = {
            "origin_lat": spec20.origin.lat, "origin_lon": spec20.origin.lon,
            "cell_size_m": spec20.cell_size_m,
            "rows": spec20.rows, "cols": spec20.cols}
        monkeypatch.setenv("FLOODROUTE_ELEVATION_MODE", "remote")
        monkeypatch.setenv("FLOODROUTE_ELEVATION_ENDPOINT", "http://env/lookup")
        scenario = load_scenario(write_scenario(tmp_path, doc))
        assert scenario.elevation_mode == "remote"
        assert scenario.endpoint == "http://env/lookup"
        assert scenario.grid_spec is not None

    def test_bad_decay_rejected(self, tmp_path, spec20):
        doc = base_scenario_doc(tmp_path, spec20)
        doc["decay"] = {"bandwidth_m": 0.0}
        with pytest.raises(FormatError):
            load_scenario(write_scenario(tmp_path, doc))

    def test_not_json(self, tmp_path):
        path = tmp_path / "scenario.json"
        path.write_text("]]]")
        with pytest.raises(FormatError):
            load_scenario(path)
