"""Compare the compiled and pure-Python kernel backends.

Usage: python benchmarks/bench_kernels.py [--rows N] [--cols N] [--repeat K]

Times the two hot loops (raster accumulation, grid search) against each
importable backend and prints a table with the speedup. Results also
double as a parity check: both backends must return identical outputs.
"""

import argparse
import time

import numpy as np

from floodroute._kernels import available_backends
from floodroute.geo import EARTH_RADIUS_M, M_PER_DEG_LAT


def time_call(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        started = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - started)
    return best, result


def bench_accumulate(mod, rows, cols, repeat):
    rng = np.random.default_rng(1)
    origin_lat, origin_lon = 29.70, -95.40
    cell = 10.0
    m_lon = M_PER_DEG_LAT * np.cos(np.radians(origin_lat))
    invalid = np.zeros((rows, cols), dtype=np.uint8)
    elev = rng.uniform(-2.0, 2.0, (rows, cols))
    observations = []
    for i in range(8):
        r = int(rng.integers(0, rows))
        c = int(rng.integers(0, cols))
        observations.append((
            origin_lat + (r + 0.5) * cell / M_PER_DEG_LAT,
            origin_lon + (c + 0.5) * cell / m_lon,
            float(rng.uniform(0.2, 1.5)),
            float(elev[r, c]),
        ))

    def run():
        depth = np.zeros((rows, cols))
        for lat, lon, d, oe in observations:
            mod.accumulate_decay(depth, invalid, origin_lat, origin_lon,
                                 cell, M_PER_DEG_LAT, m_lon,
                                 lat, lon, d, oe, elev,
                                 200.0, 600.0, EARTH_RADIUS_M)
        return depth

    return time_call(run, repeat)


def bench_search(mod, rows, cols, repeat):
    rng = np.random.default_rng(2)
    depth = np.where(rng.random((rows, cols)) < 0.55, 0.0,
                     rng.uniform(0.0, 1.0, (rows, cols)))
    impassable = (depth > 0.5).astype(np.uint8)
    impassable[0, 0] = 0
    impassable[rows - 1, cols - 1] = 0

    def run():
        return mod.grid_search(depth, impassable, 0, 0,
                               rows - 1, cols - 1, 1, 0.5, True)

    return time_call(run, repeat)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=400)
    parser.add_argument("--cols", type=int, default=400)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"grid: {args.rows}x{args.cols}, best of {args.repeat}\n")

    for label, bench in (("accumulate_decay (8 observations)", bench_accumulate),
                         ("grid_search (octile A*)", bench_search)):
        print(label)
        timings = {}
        outputs = {}
        for name, mod in backends.items():
            elapsed, result = bench(mod, args.rows, args.cols, args.repeat)
            timings[name] = elapsed
            outputs[name] = result
            print(f"  {name:10s} {elapsed * 1000:10.2f} ms")
        if len(outputs) == 2:
            python_out, compiled_out = outputs["python"], outputs["compiled"]
            if isinstance(python_out, np.ndarray):
                identical = np.array_equal(python_out, compiled_out)
            else:
                identical = python_out == compiled_out
            speedup = timings["python"] / timings["compiled"]
            print(f"  identical outputs: {identical}; "
                  f"compiled speedup: {speedup:.1f}x")
        print()


if __name__ == "__main__":
    main()
