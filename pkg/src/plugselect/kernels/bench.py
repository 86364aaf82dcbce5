"""Side-by-side timing of the numpy and compiled kernel backends.

Run as ``python -m plugselect.kernels.bench``.  Times each primitive and
a composed forward+backward chain shaped like the decoder's hot loop.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from . import available_backends, get_backend


def _time(fn, reps: int) -> float:
    fn()  # warm up caches and lazy allocations
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps


def _chain(backend, x, tw, tb, sw, sb, pool):
    def run():
        a1 = backend.temporal_forward(x, tw, tb)
        a2 = backend.spatial_forward(a1, sw, sb)
        a3 = backend.avgpool_forward(a2, pool)
        g3 = a3  # stand-in upstream gradient, same shape
        g2 = backend.avgpool_backward(g3, pool, a2.shape[2])
        g1 = backend.spatial_backward_input(g2, sw)
        backend.spatial_backward_params(g2, a1)
        backend.temporal_backward_params(g1, x, tw.shape[1])
        backend.temporal_backward_input(g1, tw)

    return run


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--batch", type=int, default=16)
    parser.add_argument("--channels", type=int, default=16)
    parser.add_argument("--samples", type=int, default=64)
    parser.add_argument("--temporal", type=int, default=8)
    parser.add_argument("--width", type=int, default=9)
    parser.add_argument("--spatial", type=int, default=8)
    parser.add_argument("--pool", type=int, default=4)
    parser.add_argument("--reps", type=int, default=200)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(0)
    x = rng.normal(size=(args.batch, args.channels, args.samples))
    tw = rng.normal(size=(args.temporal, args.width))
    tb = rng.normal(size=args.temporal)
    sw = rng.normal(size=(args.spatial, args.temporal, args.channels))
    sb = rng.normal(size=args.spatial)

    a1 = get_backend("numpy").temporal_forward(x, tw, tb)
    a2 = get_backend("numpy").spatial_forward(a1, sw, sb)

    cases = {
        "temporal_forward": lambda be: (lambda: be.temporal_forward(x, tw, tb)),
        "temporal_backward_input": lambda be: (lambda: be.temporal_backward_input(a1, tw)),
        "spatial_forward": lambda be: (lambda: be.spatial_forward(a1, sw, sb)),
        "spatial_backward_input": lambda be: (lambda: be.spatial_backward_input(a2, sw)),
        "avgpool_forward": lambda be: (lambda: be.avgpool_forward(a2, args.pool)),
        "fwd+bwd chain": lambda be: _chain(be, x, tw, tb, sw, sb, args.pool),
    }

    names = available_backends()
    print(
        f"batch={args.batch} C={args.channels} T={args.samples} "
        f"K={args.temporal} W={args.width} S={args.spatial} pool={args.pool} "
        f"reps={args.reps}"
    )
    header = f"{'primitive':<26}" + "".join(f"{n + ' (ms)':>14}" for n in names)
    if len(names) == 2:
        header += f"{'cython speedup':>16}"
    print(header)
    for case, make in cases.items():
        times = {n: 1e3 * _time(make(get_backend(n)), args.reps) for n in names}
        row = f"{case:<26}" + "".join(f"{times[n]:>14.4f}" for n in names)
        if len(times) == 2 and times["cython"] > 0:
            row += f"{times['numpy'] / times['cython']:>15.2f}x"
        print(row)
    if "cython" not in names:
        print("note: compiled backend unavailable; showing numpy only")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
