"""Inner loops with a numba backend and a pure-numpy fallback.

The backend is chosen at import time from the ``KOOP_NUMBA`` environment
variable (``KOOP_NUMBA=0`` forces numpy).  Both implementations of every
kernel are importable by name so they can be compared directly, see
``benchmarks/bench_kernels.py``.
"""
from __future__ import annotations

import contextlib
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None


def _numba_requested() -> bool:
    flag = os.environ.get("KOOP_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "no", "off")


_backend = "numba" if (HAVE_NUMBA and _numba_requested()) else "numpy"


def backend() -> str:
    """Name of the active kernel backend."""
    return _backend


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily switch the kernel backend (``"numba"`` or ``"numpy"``)."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    previous = _backend
    _backend = name
    try:
        yield
    finally:
        _backend = previous


# ---------------------------------------------------------------------------
# trigonometric polynomial evaluation at arbitrary points

_CHUNK = 2048


def trig_eval_numpy(coeffs, modes, points):
    out = np.empty(points.shape[0], dtype=np.complex128)
    for start in range(0, points.shape[0], _CHUNK):
        p = points[start:start + _CHUNK]
        out[start:start + _CHUNK] = np.exp(1j * np.outer(p, modes)) @ coeffs
    return out


def orbit_quadrature_numpy(coeffs, modes, x, nodes, weights):
    out = np.zeros(x.shape[0], dtype=np.complex128)
    for s, w in zip(nodes, weights):
        out += w * (np.exp(1j * np.outer(x + s, modes)) @ coeffs)
    return out


# ---------------------------------------------------------------------------
# special-flow cell transport


def cell_targets_numpy(heights, offsets, base_shift, q):
    m = heights.shape[0]
    col = np.repeat(np.arange(m, dtype=np.int64), heights)
    lev = np.arange(offsets[m], dtype=np.int64) - offsets[col] + q
    while True:
        up = lev >= heights[col]
        if not up.any():
            break
        lev[up] -= heights[col[up]]
        col[up] = (col[up] + base_shift) % m
    while True:
        down = lev < 0
        if not down.any():
            break
        col[down] = (col[down] - base_shift) % m
        lev[down] += heights[col[down]]
    return offsets[col] + lev


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def trig_eval_numba(coeffs, modes, points):
        out = np.empty(points.shape[0], dtype=np.complex128)
        for j in range(points.shape[0]):
            acc = 0j
            x = points[j]
            for k in range(modes.shape[0]):
                acc += coeffs[k] * np.exp(1j * (modes[k] * x))
            out[j] = acc
        return out

    @numba.njit(cache=True)
    def orbit_quadrature_numba(coeffs, modes, x, nodes, weights):
        out = np.zeros(x.shape[0], dtype=np.complex128)
        for n in range(nodes.shape[0]):
            s = nodes[n]
            w = weights[n]
            for j in range(x.shape[0]):
                acc = 0j
                xs = x[j] + s
                for k in range(modes.shape[0]):
                    acc += coeffs[k] * np.exp(1j * (modes[k] * xs))
                out[j] += w * acc
        return out

    @numba.njit(cache=True)
    def cell_targets_numba(heights, offsets, base_shift, q):
        m = heights.shape[0]
        out = np.empty(offsets[m], dtype=np.int64)
        for i in range(m):
            for level in range(heights[i]):
                col = i
                lev = level + q
                while lev >= heights[col]:
                    lev -= heights[col]
                    col = (col + base_shift) % m
                while lev < 0:
                    col = (col - base_shift) % m
                    lev += heights[col]
                out[offsets[i] + level] = offsets[col] + lev
        return out

else:  # pragma: no cover
    trig_eval_numba = orbit_quadrature_numba = cell_targets_numba = None


# ---------------------------------------------------------------------------
# dispatch


def trig_eval(coeffs, modes, points):
    """Evaluate ``sum_k coeffs[k] * exp(i modes[k] x)`` at every ``x`` in ``points``."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    modes = np.ascontiguousarray(modes, dtype=np.float64)
    points = np.ascontiguousarray(points, dtype=np.float64)
    if _backend == "numba":
        return trig_eval_numba(coeffs, modes, points)
    return trig_eval_numpy(coeffs, modes, points)


def orbit_quadrature(coeffs, modes, x, nodes, weights):
    """Weighted sum over quadrature nodes of the trigonometric polynomial at ``x + s``."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    modes = np.ascontiguousarray(modes, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float64)
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if _backend == "numba":
        return orbit_quadrature_numba(coeffs, modes, x, nodes, weights)
    return orbit_quadrature_numpy(coeffs, modes, x, nodes, weights)


def cell_targets(heights, offsets, base_shift, q):
    """Flat index of the cell reached from each cell after ``q`` vertical steps.

    Columns are stacked in ``offsets`` order; leaving the top of column ``i``
    re-enters column ``(i + base_shift) % m`` at level 0, and symmetrically
    for negative ``q``.
    """
    heights = np.ascontiguousarray(heights, dtype=np.int64)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    if _backend == "numba":
        return cell_targets_numba(heights, offsets, int(base_shift), int(q))
    return cell_targets_numpy(heights, offsets, int(base_shift), int(q))
