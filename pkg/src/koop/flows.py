"""Concrete flows and their Koopman action on grid functions.

``koopman_apply(flow, t, f)`` returns ``f o T_t``.  Rotation acts exactly in
the Fourier view (and as an exact grid permutation at times ``2 pi m / N``);
the special flow transports cells vertically with a roof-crossing handoff;
a finite map acts by a permutation table at integer times.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .space import (CircleSpace, FiniteSpace, GridFunction, SpaceMismatchError,
                    SpecialFlowSpace, constant, indicator, make_function)

__all__ = [
    "Flow",
    "RotationFlow",
    "SpecialFlow",
    "FiniteMapFlow",
    "PushforwardDensity",
    "rotation_flow",
    "special_flow",
    "finite_map",
    "koopman_apply",
    "pushforward_density",
    "strip_indicator",
    "strip_symmetric_difference",
    "flow_to_json",
    "flow_from_json",
]

COMMENSURATE_TOL = 1e-9


@dataclass(frozen=True)
class PushforwardDensity:
    t: float
    density: GridFunction


class Flow:
    kind = "abstract"
    measure_preserving = True

    def __init__(self, space):
        self.space = space

    def apply(self, t: float, f: GridFunction) -> GridFunction:
        raise NotImplementedError

    def pushforward_density(self, t: float) -> PushforwardDensity:
        return PushforwardDensity(float(t), constant(self.space, 1.0))

    def params(self) -> dict:
        return {}

    def descriptor(self) -> dict:
        return {"kind": self.kind, "params": self.params()}

    def _check(self, f: GridFunction):
        if f.space != self.space:
            raise SpaceMismatchError(f"function on {f.space!r}, flow on {self.space!r}")

    def __eq__(self, other):
        return type(other) is type(self) and self.descriptor() == other.descriptor()

    def __hash__(self):
        return hash(json.dumps(self.descriptor(), sort_keys=True))

    def __repr__(self):
        return f"{type(self).__name__}({self.space!r})"


class RotationFlow(Flow):
    """``T_t z = exp(i t) z``, i.e. ``x -> x + t`` on angles."""

    kind = "rotation"

    def __init__(self, space: CircleSpace):
        if not isinstance(space, CircleSpace):
            raise TypeError("rotation flow lives on a CircleSpace")
        super().__init__(space)

    def params(self):
        return self.space.descriptor()

    def grid_steps(self, t: float):
        """``m`` if ``t = 2 pi m / N`` (within tolerance), else ``None``."""
        r = float(t) * self.space.N / (2.0 * np.pi)
        m = round(r)
        if abs(r - m) <= COMMENSURATE_TOL * max(1.0, abs(r)):
            return int(m)
        return None

    def phase(self, t: float) -> np.ndarray:
        """Fourier multiplier of ``f -> f o T_t`` in FFT order."""
        N = self.space.N
        ph = np.exp(1j * self.space.modes * float(t))
        nyq = self.space.nyquist_bin
        if nyq is not None:
            # real trigonometric interpolation: cos(N x / 2) -> cos(N (x + t) / 2)
            ph[nyq] = math.cos(N * float(t) / 2.0)
        return ph

    def apply(self, t, f):
        self._check(f)
        steps = self.grid_steps(t)
        if steps is not None:
            return make_function(self.space, np.roll(f.samples, -steps), f.band, f.flags)
        c = np.fft.fft(f.samples) * self.phase(t)
        return make_function(self.space, np.fft.ifft(c), f.band, f.flags)

    def point(self, t: float, x):
        """Angle ``x + t`` reduced to ``[0, 2 pi)``; complex input is rotated as ``exp(i t) z``."""
        if np.iscomplexobj(x):
            return np.exp(1j * t) * x
        return np.mod(np.asarray(x, dtype=float) + t, 2.0 * np.pi)


class SpecialFlow(Flow):
    """Unit-speed vertical flow under the roof with handoff ``(y, F(y)) ~ (S y, 0)``.

    Cell transport is exact at times that are multiples of the cell height;
    other times round to the nearest multiple and the result carries the
    ``"interpolated"`` flag.
    """

    kind = "special_flow"

    def __init__(self, base: SpecialFlowSpace):
        if not isinstance(base, SpecialFlowSpace):
            raise TypeError("special flow needs a SpecialFlowSpace")
        super().__init__(base)
        self._targets = {}

    def params(self):
        return self.space.descriptor()

    def cell_shift(self, t: float):
        r = float(t) * self.space.L
        q = round(r)
        return int(q), abs(r - q) <= COMMENSURATE_TOL * max(1.0, abs(r))

    def targets(self, q: int) -> np.ndarray:
        q = int(q)
        hit = self._targets.get(q)
        if hit is None:
            sp = self.space
            hit = _kernels.cell_targets(sp.heights, sp.offsets, sp.base_shift, q)
            hit.flags.writeable = False
            self._targets[q] = hit
        return hit

    def apply(self, t, f):
        self._check(f)
        q, exact = self.cell_shift(t)
        flags = f.flags if exact else f.flags | {"interpolated"}
        if q == 0:
            return make_function(self.space, f.samples, None, flags)
        return make_function(self.space, f.samples[self.targets(q)], None, flags)

    def point(self, t: float, point):
        """Continuum action on ``(y, s)`` with the base rotation ``y -> y + alpha``."""
        sp = self.space
        y, s = float(point[0]), float(point[1]) + float(t)

        def roof(y):
            return sp.roof[min(int(y * sp.m), sp.m - 1)]

        while s >= roof(y):
            s -= roof(y)
            y = (y + sp.alpha) % 1.0
        while s < 0:
            y = (y - sp.alpha) % 1.0
            s += roof(y)
        return y, s


class FiniteMapFlow(Flow):
    """Integer-time flow ``T_n = P^n`` from a permutation table ``P``."""

    kind = "finite_map"

    def __init__(self, space: FiniteSpace, table):
        table = np.asarray(table, dtype=np.int64)
        if table.shape != (space.size,) or not np.array_equal(np.sort(table), np.arange(space.size)):
            raise ValueError("table must be a permutation of range(m)")
        super().__init__(space)
        table.flags.writeable = False
        self.table = table
        self.measure_preserving = bool(np.allclose(space.weights[table], space.weights, rtol=0, atol=1e-15))

    def params(self):
        return {"table": self.table.tolist(), "weights": self.space.weights.tolist()}

    def power(self, t) -> np.ndarray:
        n = int(round(float(t)))
        if abs(float(t) - n) > COMMENSURATE_TOL:
            raise ValueError(f"finite maps act at integer times only, got t={t}")
        idx = np.arange(self.space.size)
        step = self.table if n >= 0 else np.argsort(self.table)
        for _ in range(abs(n)):
            idx = step[idx]
        return idx

    def apply(self, t, f):
        self._check(f)
        return make_function(self.space, f.samples[self.power(t)], None, f.flags)

    def point(self, t, x):
        return int(self.power(t)[int(x)])

    def pushforward_density(self, t):
        # d(T_* mu)/dmu (x) = mu(T^{-1}{x}) / mu({x})
        w = self.space.weights
        pre = self.power(-t)
        return PushforwardDensity(float(t), make_function(self.space, w[pre] / w))


def rotation_flow(space: CircleSpace) -> RotationFlow:
    return RotationFlow(space)


def special_flow(base: SpecialFlowSpace) -> SpecialFlow:
    return SpecialFlow(base)


def finite_map(space: FiniteSpace, table) -> FiniteMapFlow:
    return FiniteMapFlow(space, table)


def koopman_apply(flow: Flow, t: float, f: GridFunction) -> GridFunction:
    """``f o T_t``."""
    return flow.apply(t, f)


def pushforward_density(flow: Flow, t: float) -> PushforwardDensity:
    return flow.pushforward_density(t)


# ---------------------------------------------------------------------------
# strips in the special flow


def strip_indicator(base: SpecialFlowSpace, a: float, b: float) -> GridFunction:
    """Indicator of ``H = Y x [a, b]`` (cells whose center height lies in ``[a, b]``)."""
    s = base.heights_at_cells
    return indicator(base, (s >= a) & (s <= b))


def _check_strip(base, a, b, t):
    c = base.floor
    if not (0 < a < b < c <= base.effective_roof.min()):
        raise ValueError(f"need 0 < a < b < c <= min F, got a={a}, b={b}, c={c}")
    window = min(a, c - b, b - a)
    if abs(t) >= window:
        raise ValueError(f"|t|={abs(t)} outside the admissible window {window}")


def strip_symmetric_difference(base: SpecialFlowSpace, a: float, b: float, t: float) -> float:
    """Mass of ``H triangle T_t(H)`` for the strip ``H = Y x [a, b]``."""
    _check_strip(base, a, b, t)
    flow = SpecialFlow(base)
    h = strip_indicator(base, a, b)
    moved = flow.apply(-t, h)  # indicator of T_t(H)
    return float(np.dot(base.weights, np.abs(h.samples - moved.samples)))


# ---------------------------------------------------------------------------
# serialization


def flow_to_json(flow: Flow) -> str:
    return json.dumps(flow.descriptor())


def flow_from_json(text: str) -> Flow:
    d = json.loads(text)
    p = d["params"]
    if d["kind"] == "rotation":
        return RotationFlow(CircleSpace(p["N"], p["K"]))
    if d["kind"] == "special_flow":
        return SpecialFlow(SpecialFlowSpace(p["m"], p["alpha"], p["roof"], p["L"], p["floor"]))
    if d["kind"] == "finite_map":
        return FiniteMapFlow(FiniteSpace(p["weights"]), p["table"])
    raise ValueError(f"unknown flow kind {d['kind']!r}")
