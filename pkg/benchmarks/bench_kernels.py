"""Time the numba and numpy implementations of each kernel on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--points 4096] [--cells 512x1000]

Outputs agree to round-off before any timing is reported.
"""
import argparse
import math
import time

import numpy as np

from koop import _kernels as kr


def _best(fn, repeat):
    fn()  # warm-up (numba compiles here)
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def _cases(points, modes, cells, q):
    rng = np.random.default_rng(0)
    k = np.arange(-modes, modes + 1).astype(float)
    c = rng.standard_normal(k.size) + 1j * rng.standard_normal(k.size)
    x = np.linspace(0, 2 * math.pi, points, endpoint=False)
    nodes, weights = np.polynomial.legendre.leggauss(16)
    m, L = cells
    heights = np.full(m, L, dtype=np.int64)
    heights[: m // 3] = L - 7
    offsets = np.concatenate([[0], np.cumsum(heights)])
    shift = round(m * (math.sqrt(5) - 1) / 2)
    return {
        "trig_eval": ((c, k, x), kr.trig_eval_numpy, kr.trig_eval_numba),
        "orbit_quadrature": ((c, k, x, 0.5 + 0.5 * nodes, 0.5 * weights),
                             kr.orbit_quadrature_numpy, kr.orbit_quadrature_numba),
        "cell_targets": ((heights, offsets, shift, q),
                         kr.cell_targets_numpy, kr.cell_targets_numba),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--points", type=int, default=4096)
    p.add_argument("--modes", type=int, default=16)
    p.add_argument("--cells", default="512x1000", help="base cells x levels")
    p.add_argument("--steps", type=int, default=2500, help="vertical steps for cell_targets")
    args = p.parse_args(argv)
    m, L = (int(v) for v in args.cells.lower().split("x"))

    if not kr.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':<18}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, (inputs, np_fn, nb_fn) in _cases(args.points, args.modes, (m, L), args.steps).items():
        a, b = np_fn(*inputs), nb_fn(*inputs)
        if not np.allclose(a, b, rtol=1e-12, atol=1e-9):
            raise SystemExit(f"{name}: backends disagree")
        tn = _best(lambda: np_fn(*inputs), args.repeat)
        tb = _best(lambda: nb_fn(*inputs), args.repeat)
        print(f"{name:<18}{tn:>12.4g}{tb:>12.4g}{tn / tb:>9.1f}x")


if __name__ == "__main__":
    main()
