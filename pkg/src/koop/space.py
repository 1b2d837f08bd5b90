"""Discrete probability spaces and the functions living on them.

Three spaces are provided:

* :class:`CircleSpace` -- the circle with normalized Haar measure, sampled on
  an equispaced grid of ``N`` points.  Grid samples are the storage format;
  Fourier coefficients are a derived view.
* :class:`FiniteSpace` -- ``m`` atoms with arbitrary positive weights.
* :class:`SpecialFlowSpace` -- the region under a roof function over the unit
  interval, cut into cells of equal mass.

Functions are immutable sample vectors (:class:`GridFunction`,
:class:`CircleFunction`).
"""
from __future__ import annotations

import json
from functools import cached_property
from typing import NamedTuple

import numpy as np

__all__ = [
    "SpaceMismatchError",
    "CircleSpace",
    "FiniteSpace",
    "SpecialFlowSpace",
    "GridFunction",
    "CircleFunction",
    "make_circle_space",
    "make_function",
    "constant",
    "character",
    "indicator",
    "from_coefficients",
    "inner_product",
    "multiply",
    "norms",
    "Norms",
    "random_bandlimited",
    "function_to_json",
    "function_from_json",
]

REAL_TOL = 1e-12


class SpaceMismatchError(ValueError):
    """Two functions on different spaces were combined."""


# ---------------------------------------------------------------------------
# spaces


class CircleSpace:
    """Equispaced grid ``x_j = 2 pi j / N`` on the circle, each point of mass ``1/N``.

    ``K`` is the advisory alias-free band: test functions are generated with
    modes ``|k| <= K``.
    """

    kind = "circle"

    def __init__(self, N: int, K: int):
        N, K = int(N), int(K)
        if N < 8:
            raise ValueError(f"grid size N={N} is below the minimum of 8")
        if K < 0:
            raise ValueError(f"band limit K={K} must be nonnegative")
        if 2 * K + 1 > N:
            raise ValueError(f"band exceeds Nyquist: 2*{K}+1 > {N}")
        self.N = N
        self.K = K

    def __eq__(self, other):
        return isinstance(other, CircleSpace) and (self.N, self.K) == (other.N, other.K)

    def __hash__(self):
        return hash(("circle", self.N, self.K))

    def __repr__(self):
        return f"CircleSpace(N={self.N}, K={self.K})"

    @property
    def size(self) -> int:
        return self.N

    @cached_property
    def weights(self) -> np.ndarray:
        w = np.full(self.N, 1.0 / self.N)
        w.flags.writeable = False
        return w

    @cached_property
    def points(self) -> np.ndarray:
        x = 2.0 * np.pi * np.arange(self.N) / self.N
        x.flags.writeable = False
        return x

    @cached_property
    def modes(self) -> np.ndarray:
        """Integer frequency of every FFT bin (Nyquist bin reported as ``-N/2``)."""
        k = np.fft.fftfreq(self.N, 1.0 / self.N).round().astype(np.int64)
        k.flags.writeable = False
        return k

    @property
    def nyquist_bin(self) -> int | None:
        return self.N // 2 if self.N % 2 == 0 else None

    @property
    def alias_free_band(self) -> int:
        """Largest combined band whose modes occupy distinct FFT bins."""
        return (self.N - 1) // 2

    def descriptor(self) -> dict:
        return {"N": self.N, "K": self.K}


def make_circle_space(N: int, K: int) -> CircleSpace:
    return CircleSpace(N, K)


class FiniteSpace:
    """``m`` atoms with strictly positive weights summing to one."""

    kind = "finite"

    def __init__(self, weights):
        w = np.array(weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty 1-d sequence")
        if not np.all(w > 0):
            raise ValueError("weights must be strictly positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        w.flags.writeable = False
        self.weights = w

    @classmethod
    def uniform(cls, m: int) -> "FiniteSpace":
        return cls(np.full(int(m), 1.0 / int(m)))

    def __eq__(self, other):
        return isinstance(other, FiniteSpace) and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash(("finite", self.weights.tobytes()))

    def __repr__(self):
        return f"FiniteSpace(m={self.size})"

    @property
    def size(self) -> int:
        return self.weights.size

    def descriptor(self) -> dict:
        return {"kind": "finite", "weights": self.weights.tolist()}


class SpecialFlowSpace:
    """Region ``{(y, s): 0 <= s < F(y)}`` over ``Y = [0, 1)`` cut into equal cells.

    The base is split into ``m`` columns; column ``i`` carries
    ``round(F_i * L)`` cells of height ``1/L``.  Every cell has the same mass
    once the total area is normalized to one, so the cell transport of the
    flow is measure preserving by construction.  ``floor`` is the constant
    ``c`` with ``F > c`` everywhere.
    """

    kind = "special_flow"

    def __init__(self, m: int, alpha: float, roof, L: int, floor: float):
        m, L = int(m), int(L)
        if m < 1 or L < 1:
            raise ValueError("base size m and level count L must be positive")
        roof = np.broadcast_to(np.asarray(roof, dtype=np.float64), (m,)).copy()
        if not np.all(np.isfinite(roof)) or roof.min() <= 0:
            raise ValueError("roof values must be finite and positive")
        heights = np.maximum(1, np.rint(roof * L)).astype(np.int64)
        floor = float(floor)
        if not 0 < floor < heights.min() / L:
            raise ValueError(
                f"floor c={floor} must satisfy 0 < c < min F = {heights.min() / L}")
        self.m = m
        self.L = L
        self.alpha = float(alpha)
        self.floor = floor
        roof.flags.writeable = False
        self.roof = roof
        heights.flags.writeable = False
        self.heights = heights
        offsets = np.concatenate([[0], np.cumsum(heights)]).astype(np.int64)
        offsets.flags.writeable = False
        self.offsets = offsets
        # base rotation y -> y + alpha realised as a shift of the column index
        self.base_shift = int(round(self.alpha * m)) % m

    def __eq__(self, other):
        return (isinstance(other, SpecialFlowSpace)
                and (self.m, self.L, self.alpha, self.floor) == (other.m, other.L, other.alpha, other.floor)
                and np.array_equal(self.roof, other.roof))

    def __hash__(self):
        return hash(("special_flow", self.m, self.L, self.alpha, self.floor, self.roof.tobytes()))

    def __repr__(self):
        return f"SpecialFlowSpace(m={self.m}, L={self.L}, alpha={self.alpha!r})"

    @property
    def size(self) -> int:
        return int(self.offsets[-1])

    @property
    def cell_height(self) -> float:
        return 1.0 / self.L

    @property
    def area(self) -> float:
        """Unnormalized area ``int F d rho`` of the discretized region."""
        return self.size / (self.m * self.L)

    @property
    def effective_roof(self) -> np.ndarray:
        return self.heights / self.L

    @cached_property
    def weights(self) -> np.ndarray:
        w = np.full(self.size, 1.0 / self.size)
        w.flags.writeable = False
        return w

    @cached_property
    def columns(self) -> np.ndarray:
        c = np.repeat(np.arange(self.m, dtype=np.int64), self.heights)
        c.flags.writeable = False
        return c

    @cached_property
    def levels(self) -> np.ndarray:
        lev = np.arange(self.size, dtype=np.int64) - self.offsets[self.columns]
        lev.flags.writeable = False
        return lev

    @cached_property
    def heights_at_cells(self) -> np.ndarray:
        """Vertical coordinate ``s`` of each cell center."""
        s = (self.levels + 0.5) / self.L
        s.flags.writeable = False
        return s

    def row_measure(self) -> float:
        """Mass of one horizontal row of cells, ``Y x [s, s + 1/L)``."""
        return self.m / self.size

    def descriptor(self) -> dict:
        roof = self.roof
        roof_out = float(roof[0]) if np.all(roof == roof[0]) else roof.tolist()
        return {"kind": "special_flow", "m": self.m, "L": self.L, "alpha": self.alpha,
                "roof": roof_out, "floor": self.floor}


# ---------------------------------------------------------------------------
# functions


class GridFunction:
    """Immutable complex sample vector on a discrete space.

    ``band`` is the tracked band limit (``None`` when unknown).  ``flags`` is
    a frozenset of markers such as ``"aliased"`` or ``"interpolated"``.
    """

    __slots__ = ("space", "samples", "band", "flags")

    def __init__(self, space, samples, band: int | None = None, flags=()):
        arr = np.array(samples, dtype=np.complex128)
        if arr.shape != (space.size,):
            raise ValueError(f"expected {space.size} samples, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "band", None if band is None else int(band))
        object.__setattr__(self, "flags", frozenset(flags))

    def __setattr__(self, key, value):
        raise AttributeError("GridFunction is immutable")

    def __repr__(self):
        return f"{type(self).__name__}({self.space!r}, band={self.band}, flags={sorted(self.flags)})"

    # -- helpers ----------------------------------------------------------
    def _new(self, samples, band=None, flags=()):
        return make_function(self.space, samples, band=band, flags=self.flags | frozenset(flags))

    def _check(self, other: "GridFunction"):
        if not isinstance(other, GridFunction):
            raise TypeError(f"expected a GridFunction, got {type(other).__name__}")
        if other.space != self.space:
            raise SpaceMismatchError(f"{self.space!r} vs {other.space!r}")

    @property
    def is_real(self) -> bool:
        return bool(np.all(np.abs(self.samples.imag) <= REAL_TOL))

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            band = None if self.band is None or other.band is None else max(self.band, other.band)
            return make_function(self.space, self.samples + other.samples, band,
                                 self.flags | other.flags)
        c = complex(other)
        band = self.band if self.band is not None else None
        return self._new(self.samples + c, band)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.samples, self.band)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            return multiply(self, other)
        return self._new(self.samples * complex(other), self.band)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return make_function(self.space, self.samples / other.samples, None,
                                 self.flags | other.flags)
        return self._new(self.samples / complex(other), self.band)

    def __rtruediv__(self, other):
        return self._new(complex(other) / self.samples, None)

    def conj(self):
        return self._new(self.samples.conj(), self.band)

    def abs(self):
        return self._new(np.abs(self.samples))

    def exp(self):
        return self._new(np.exp(self.samples))

    def min_abs(self) -> float:
        return float(np.abs(self.samples).min())

    def integral(self) -> complex:
        return complex(np.dot(self.space.weights, self.samples))


class CircleFunction(GridFunction):
    """Function on a :class:`CircleSpace`, with the Fourier coefficient view."""

    __slots__ = ()

    @property
    def band_limit_hint(self):
        return "unknown" if self.band is None else self.band

    def coefficients(self) -> np.ndarray:
        """Coefficients ``c_k`` with ``f(x_j) = sum_k c_k exp(i k x_j)``, in FFT order."""
        return np.fft.fft(self.samples) / self.space.N

    def coefficient(self, k: int) -> complex:
        return complex(self.coefficients()[int(k) % self.space.N])

    def numerical_band(self, tol: float = 1e-12) -> int:
        """Largest ``|k|`` whose coefficient exceeds ``tol``, read from the samples."""
        c = np.abs(self.coefficients())
        nz = np.abs(self.space.modes)[c > tol]
        return int(nz.max()) if nz.size else 0

    @property
    def aliased(self) -> bool:
        return "aliased" in self.flags


def make_function(space, samples, band=None, flags=()):
    cls = CircleFunction if isinstance(space, CircleSpace) else GridFunction
    if not isinstance(space, CircleSpace):
        band = None
    return cls(space, samples, band=band, flags=flags)


def constant(space, value: complex = 1.0) -> GridFunction:
    return make_function(space, np.full(space.size, complex(value)), band=0)


def character(space: CircleSpace, k: int) -> CircleFunction:
    """``e_k(x) = exp(i k x)`` sampled on the grid."""
    return make_function(space, np.exp(1j * int(k) * space.points), band=abs(int(k)))


def indicator(space, mask) -> GridFunction:
    mask = np.asarray(mask, dtype=bool)
    return make_function(space, mask.astype(np.complex128))


def from_coefficients(space: CircleSpace, coeffs: dict) -> CircleFunction:
    """Synthesize ``sum_k c_k e_k`` from a ``{k: c_k}`` mapping."""
    full = np.zeros(space.N, dtype=np.complex128)
    band = 0
    for k, c in coeffs.items():
        k = int(k)
        if 2 * abs(k) >= space.N:
            raise ValueError(f"mode {k} is not representable on N={space.N}")
        full[k % space.N] += complex(c)
        band = max(band, abs(k))
    return make_function(space, np.fft.ifft(full) * space.N, band=band)


def inner_product(f: GridFunction, g: GridFunction) -> complex:
    """``(f, g) = int f conj(g) dmu``."""
    f._check(g)
    return complex(np.dot(f.space.weights, f.samples * g.samples.conj()))


def multiply(f: GridFunction, g: GridFunction) -> GridFunction:
    """Pointwise product; flagged ``"aliased"`` when the combined band leaves the grid."""
    f._check(g)
    flags = set(f.flags | g.flags)
    band = None
    if f.band is not None and g.band is not None:
        band = f.band + g.band
        if isinstance(f.space, CircleSpace) and band > f.space.alias_free_band:
            flags.add("aliased")
    return make_function(f.space, f.samples * g.samples, band, flags)


class Norms(NamedTuple):
    L1: float
    L2: float
    Linf: float


def norms(f: GridFunction) -> Norms:
    a = np.abs(f.samples)
    w = f.space.weights
    return Norms(float(np.dot(w, a)), float(np.sqrt(np.dot(w, a * a))), float(a.max()))


def l2(f: GridFunction) -> float:
    a = np.abs(f.samples)
    return float(np.sqrt(np.dot(f.space.weights, a * a)))


def linf(f: GridFunction) -> float:
    return float(np.abs(f.samples).max())


def random_bandlimited(space: CircleSpace, seed: int, max_mode: int,
                       real_valued: bool = False, mean_zero: bool = False,
                       scale: float = 1.0) -> CircleFunction:
    """Seeded random trigonometric polynomial with modes ``|k| <= max_mode``.

    Coefficients are complex Gaussians normalized so the expected L2 norm is
    ``scale``.  ``real_valued`` imposes conjugate symmetry, ``mean_zero``
    removes the constant mode.
    """
    max_mode = int(max_mode)
    if max_mode < 0 or max_mode > space.K:
        raise ValueError(f"max_mode={max_mode} is outside the band [0, {space.K}]")
    rng = np.random.default_rng(seed)
    ks = np.arange(-max_mode, max_mode + 1)
    c = (rng.standard_normal(ks.size) + 1j * rng.standard_normal(ks.size))
    c *= scale / np.sqrt(2.0 * ks.size)
    if real_valued:
        c = 0.5 * (c + c[::-1].conj())
    if mean_zero:
        c[max_mode] = 0.0
    full = np.zeros(space.N, dtype=np.complex128)
    full[ks % space.N] = c
    samples = np.fft.ifft(full) * space.N
    if real_valued:
        samples = samples.real
    return make_function(space, samples, band=max_mode)


# ---------------------------------------------------------------------------
# serialization


def function_to_json(f: CircleFunction) -> str:
    if not isinstance(f.space, CircleSpace):
        raise TypeError("only circle functions have a JSON wire format")
    payload = {"space": f.space.descriptor(),
               "samples": [[float(z.real), float(z.imag)] for z in f.samples]}
    return json.dumps(payload)


def function_from_json(text: str) -> CircleFunction:
    payload = json.loads(text)
    space = CircleSpace(payload["space"]["N"], payload["space"]["K"])
    samples = np.array([complex(re, im) for re, im in payload["samples"]])
    return make_function(space, samples)
