"""Bit-level parity between the compiled and pure-Python kernel backends."""

import subprocess
import sys

import numpy as np
import pytest

from floodroute import EARTH_RADIUS_M
from floodroute._kernels import available_backends, backend_name

BACKENDS = available_backends()
needs_compiled = pytest.mark.skipif(
    "compiled" not in BACKENDS, reason="compiled backend not built")


def random_decay_inputs(rng, rows=24, cols=24, n_obs=4):
    spec_origin = (29.70, -95.40)
    cell = 10.0
    m_lat = 111194.92664455873
    m_lon = m_lat * np.cos(np.radians(spec_origin[0]))
    depth = np.zeros((rows, cols))
    invalid = (rng.random((rows, cols)) < 0.05).astype(np.uint8)
    elev = rng.uniform(-3.0, 3.0, (rows, cols))
    obs = []
    for _ in range(n_obs):
        r = int(rng.integers(0, rows))
        c = int(rng.integers(0, cols))
        while invalid[r, c]:
            r = int(rng.integers(0, rows))
            c = int(rng.integers(0, cols))
        lat = spec_origin[0] + (r + 0.5) * cell / m_lat
        lon = spec_origin[1] + (c + 0.5) * cell / m_lon
        obs.append((lat, lon, float(rng.uniform(0.1, 2.0)), float(elev[r, c])))
    return dict(depth=depth, invalid=invalid,
                origin_lat=spec_origin[0], origin_lon=spec_origin[1],
                cell_size_m=cell, m_per_deg_lat=m_lat, m_per_deg_lon=m_lon,
                observations=obs, elev=elev,
                bandwidth_m=60.0, cutoff_m=180.0, radius_m=EARTH_RADIUS_M)


def run_decay(mod, inputs):
    depth = inputs["depth"].copy()
    for lat, lon, d, oe in inputs["observations"]:
        mod.accumulate_decay(
            depth, inputs["invalid"], inputs["origin_lat"],
            inputs["origin_lon"], inputs["cell_size_m"],
            inputs["m_per_deg_lat"], inputs["m_per_deg_lon"],
            lat, lon, d, oe, inputs["elev"],
            inputs["bandwidth_m"], inputs["cutoff_m"], inputs["radius_m"])
    return depth


@needs_compiled
class TestParity:
    def test_accumulate_decay_bit_identical(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            inputs = random_decay_inputs(rng)
            fields = {name: run_decay(mod, inputs)
                      for name, mod in BACKENDS.items()}
            a = fields["python"]
            b = fields["compiled"]
            assert a.shape == b.shape
            # exact equality, not approx: both backends must evaluate the
            # same expression tree in the same order
            assert np.array_equal(a, b)

    def test_grid_search_identical(self):
        rng = np.random.default_rng(12)
        for _ in range(40):
            rows, cols = 18, 18
            depth = np.where(rng.random((rows, cols)) < 0.4, 0.0,
                             rng.uniform(0.0, 1.0, (rows, cols)))
            impassable = (depth > 0.45).astype(np.uint8)
            impassable[0, 0] = 0
            impassable[rows - 1, cols - 1] = 0
            results = {}
            for name, mod in BACKENDS.items():
                results[name] = mod.grid_search(
                    depth, impassable, 0, 0, rows - 1, cols - 1,
                    1, 0.5, True)
            pa, ca, ea = results["python"]
            pb, cb, eb = results["compiled"]
            assert pa == pb
            assert ca == cb
            assert ea == eb


def test_backend_names_exposed():
    for name, mod in BACKENDS.items():
        assert mod.BACKEND_NAME == name
    assert backend_name in BACKENDS


def test_env_var_forces_python_backend():
    code = ("import floodroute._kernels as k; print(k.backend_name)")
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"PATH": "/usr/bin:/bin", "FLOODROUTE_KERNEL": "python"},
        capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_env_var_rejects_unknown_backend():
    code = "import floodroute._kernels"
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"PATH": "/usr/bin:/bin", "FLOODROUTE_KERNEL": "sparkle"},
        capture_output=True, text=True)
    assert out.returncode != 0
    assert "sparkle" in out.stderr


@needs_compiled
def test_raster_documents_identical_across_backends():
    """End-to-end: the JSON text of a built raster matches byte for byte."""
    script = r"""
import json, hashlib
import numpy as np
from datetime import datetime, timezone
from floodroute import (DecayParams, DepthObservation, ElevationGrid,
                        GeoPoint, GridSpec, build_flood_raster, cell_center)
rng = np.random.default_rng(77)
spec = GridSpec(origin=GeoPoint(29.70, -95.40), cell_size_m=10.0,
                rows=30, cols=30)
elev = ElevationGrid(spec=spec, values=rng.uniform(-2, 2, (30, 30)))
ts = datetime(2024, 5, 1, 12, 0, 0, tzinfo=timezone.utc)
obs = [DepthObservation(id=f"o{i}",
                        location=cell_center(spec, 5 + 4 * i, 7 + 3 * i),
                        depth_m=0.4 + 0.2 * i, timestamp=ts)
       for i in range(4)]
raster = build_flood_raster(obs, elev, DecayParams(bandwidth_m=80.0))
print(hashlib.sha256(raster.to_json_str().encode()).hexdigest())
"""
    digests = {}
    for name in BACKENDS:
        out = subprocess.run(
            [sys.executable, "-c", script],
            env={"PATH": "/usr/bin:/bin", "FLOODROUTE_KERNEL": name},
            capture_output=True, text=True, check=True)
        digests[name] = out.stdout.strip()
    assert digests["python"] == digests["compiled"]
