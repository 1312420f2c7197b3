#!/usr/bin/env python3
"""Compare the compiled cell kernel against the pure-numpy fallback.

Times the two hot paths on identical inputs: typical-cell construction
(vertex enumeration with the certified stopping rule) and one box-experiment
replicate. Run after building the extension:

    python benchmarks/bench_kernel.py
"""

import argparse
import time

import numpy as np

from pvextremes import _kernel_py, kernel
from pvextremes.extremes import default_buffer
from pvextremes.sampling import (IntensityModel, fence_directions, initial_radius,
                                 poisson_annulus, rng_stream)


def bench_cell_vertices(impl, d, n_cells, seed=1234):
    model = IntensityModel.homogeneous()
    fence = fence_directions(d)
    r0 = initial_radius(d, model)
    clouds = []
    for i in range(n_cells):
        rng = rng_stream(seed, i)
        pts = poisson_annulus(d, model, 0.0, 2 * r0, rng)
        clouds.append(np.vstack([pts, 4 * r0 * fence]))
    t0 = time.perf_counter()
    total = 0
    for pts in clouds:
        verts, _, _, _, _ = impl.cell_vertices(pts, d * 2 * r0)
        total += len(verts)
    dt = time.perf_counter() - t0
    return dt, total


def bench_box(impl, n_side, seed=99):
    buf = default_buffer(2, n_side)
    r0 = initial_radius(2, IntensityModel.homogeneous())
    fence = fence_directions(2)
    g = rng_stream(seed, 0).generator
    lo, hi = -buf, n_side + buf
    pts = lo + g.random((int(g.poisson((hi - lo) ** 2)), 2)) * (hi - lo)
    t0 = time.perf_counter()
    max_d, n_nuclei, ok, _ = impl.box_replicate_maxima(pts, n_side, buf, r0, 1.5, fence)
    dt = time.perf_counter() - t0
    assert ok
    return dt, n_nuclei, max_d


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cells", type=int, default=400)
    ap.add_argument("--box-side", type=float, default=40.0)
    args = ap.parse_args()

    if kernel.BACKEND != "compiled":
        print("NOTE: compiled backend unavailable; comparing pure against itself")
    impls = [("compiled", kernel), ("pure", _kernel_py)]

    print(f"{'path':<28}{'backend':<10}{'time':>10}{'rate':>16}")
    rows = {}
    for d in (2, 3):
        for name, impl in impls:
            dt, total = bench_cell_vertices(impl, d, args.cells)
            rows[(d, name)] = dt
            print(f"{'cell_vertices d=%d' % d:<28}{name:<10}{dt:>9.3f}s"
                  f"{args.cells / dt:>12.0f} c/s")
        speedup = rows[(d, 'pure')] / rows[(d, 'compiled')]
        print(f"{'':<28}{'speedup':<10}{speedup:>9.1f}x")

    box = {}
    for name, impl in impls:
        dt, n_nuclei, max_d = bench_box(impl, args.box_side)
        box[name] = dt
        print(f"{'box replicate n=%.0f' % args.box_side:<28}{name:<10}{dt:>9.3f}s"
              f"{n_nuclei / dt:>12.0f} nuc/s")
    print(f"{'':<28}{'speedup':<10}{box['pure'] / box['compiled']:>9.1f}x")


if __name__ == "__main__":
    main()
