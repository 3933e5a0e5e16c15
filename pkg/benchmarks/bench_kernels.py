#!/usr/bin/env python3
"""Benchmark the compiled geometry kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--pairs N]
"""

from __future__ import annotations

import argparse
import math
import random
import time
from array import array

from geoask import _pykernels

try:
    from geoask import _geokernels
except ImportError:
    _geokernels = None


def star_polygon(rng, n=24, radius=2.0):
    cx, cy = rng.uniform(-30, 30), rng.uniform(-30, 30)
    angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(n))
    pts = [(cx + rng.uniform(0.4, 1.0) * radius * math.cos(a),
            cy + rng.uniform(0.4, 1.0) * radius * math.sin(a)) for a in angles]
    pts.append(pts[0])
    return array("d", (p[0] for p in pts)), array("d", (p[1] for p in pts))


def bench(kernels, rings, points, dense):
    timings = {}

    t0 = time.perf_counter()
    hits = 0
    for x, y in points:
        for xs, ys in rings:
            hits += kernels.ring_crossings(x, y, xs, ys) % 2
    timings["point-in-ring"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    crossings = 0
    for i in range(len(rings)):
        xs1, ys1 = rings[i]
        xs2, ys2 = rings[(i * 13 + 7) % len(rings)]
        crossings += kernels.polylines_cross(xs1, ys1, xs2, ys2, 0)
        crossings += kernels.polylines_cross(xs1, ys1, xs2, ys2, 1)
    timings["segment-intersection"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    total = 0.0
    for i in range(0, len(dense) - 1, 2):
        xs1, ys1 = dense[i]
        xs2, ys2 = dense[i + 1]
        total += kernels.min_haversine_m(xs1, ys1, xs2, ys2)
    timings["min-haversine"] = time.perf_counter() - t0

    return timings, (hits, crossings, round(total, 3))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--pairs", type=int, default=200, help="number of random polygons")
    args = parser.parse_args()

    rng = random.Random(12345)
    rings = [star_polygon(rng) for _ in range(args.pairs)]
    points = [(rng.uniform(-35, 35), rng.uniform(-35, 35)) for _ in range(2000)]
    dense = []
    for _ in range(40):
        xs = array("d", (rng.uniform(-10, 10) for _ in range(400)))
        ys = array("d", (rng.uniform(-10, 10) for _ in range(400)))
        dense.append((xs, ys))

    results = {}
    checks = {}
    backends = [("python", _pykernels)]
    if _geokernels is not None:
        backends.insert(0, ("cython", _geokernels))
    for name, kernels in backends:
        results[name], checks[name] = bench(kernels, rings, points, dense)

    if len(checks) == 2 and checks["cython"] != checks["python"]:
        raise SystemExit(f"backend results disagree: {checks}")

    print(f"{'kernel':<22} " + " ".join(f"{name:>12}" for name, _ in backends) + "     speedup")
    for key in results[backends[0][0]]:
        row = [results[name][key] for name, _ in backends]
        speed = f"{row[-1] / row[0]:.1f}x" if len(row) == 2 and row[0] > 0 else "-"
        print(f"{key:<22} " + " ".join(f"{v * 1000:>10.1f}ms" for v in row) + f" {speed:>10}")


if __name__ == "__main__":
    main()
