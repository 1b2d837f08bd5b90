"""Cocycles ``t -> psi_t`` over a flow.

A cocycle satisfies ``psi_{t+s} = psi_t * (psi_s o T_t)``.  Three
constructions are provided: from a derivative ``zeta`` (exponential of the
orbit integral of ``zeta``), from a transfer function ``theta``
(``psi_t = (theta o T_t) / theta``), and from an explicit rule.  Over the
rotation the transfer-function problem is solved in closed form, including
the winding obstruction ``int zeta not in iZ``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .flows import COMMENSURATE_TOL, Flow, RotationFlow, SpecialFlow
from .space import (CircleFunction, GridFunction, SpaceMismatchError, constant,
                    l2, make_function)

__all__ = [
    "Cocycle",
    "cocycle_from_derivative",
    "coboundary_cocycle",
    "explicit_cocycle",
    "orbit_integral",
    "orbit_integral_quadrature",
    "orbit_integral_cells",
    "rotation_derivative",
    "cocycle_identity_residual",
    "inverse_relation_residual",
    "derivative_residual",
    "TransferFunction",
    "ObstructionReport",
    "solve_transfer_function",
    "C0DecayReport",
    "c0_decay_report",
    "uniqueness_crosscheck",
]

NONZERO_TOL = 1e-8


class Cocycle:
    """``t -> psi_t`` over ``flow``; values are memoized per ``t``.

    ``derivative`` is the known derivative ``zeta`` when the construction
    provides one in closed form, else ``None``.
    """

    def __init__(self, flow: Flow, kind: str, evaluator, derivative=None, data=None):
        self.flow = flow
        self.kind = kind
        self._evaluator = evaluator
        self.derivative = derivative
        self.data = data or {}
        self._cache = {}

    def __call__(self, t: float) -> GridFunction:
        t = float(t)
        hit = self._cache.get(t)
        if hit is None:
            hit = self._evaluator(t)
            if hit.space != self.flow.space:
                raise SpaceMismatchError("cocycle value lives on the wrong space")
            self._cache[t] = hit
        return hit

    psi = __call__

    def __repr__(self):
        return f"Cocycle(kind={self.kind!r}, flow={self.flow!r})"

    def descriptor(self) -> dict:
        return {"kind": self.kind, "flow": self.flow.descriptor()}


# ---------------------------------------------------------------------------
# orbit integrals  int_0^t zeta o T_s ds


def _closed_form_factor(space, t: float) -> np.ndarray:
    k = space.modes.astype(np.float64)
    fac = np.empty(space.N, dtype=np.complex128)
    nz = k != 0
    fac[nz] = (np.exp(1j * k[nz] * t) - 1.0) / (1j * k[nz])
    fac[~nz] = t
    nyq = space.nyquist_bin
    if nyq is not None:
        # consistent with the real interpolation convention of RotationFlow.phase
        fac[nyq] = math.sin(space.N * t / 2.0) / (space.N / 2.0)
    return fac


def orbit_integral(flow: RotationFlow, zeta: CircleFunction, t: float) -> CircleFunction:
    """Mode-wise closed form of ``int_0^t zeta o T_s ds`` over the rotation.

    Mode ``k != 0`` contributes ``zeta_k e_k (e^{ikt} - 1)/(ik)``; the mean
    contributes ``zeta_0 t``.
    """
    flow._check(zeta)
    c = np.fft.fft(zeta.samples) * _closed_form_factor(zeta.space, float(t))
    return make_function(zeta.space, np.fft.ifft(c), zeta.band)


def _gauss_legendre_panels(t: float, nodes_per_unit: int, panels: int):
    x, w = np.polynomial.legendre.leggauss(nodes_per_unit)
    edges = np.linspace(0.0, t, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def orbit_integral_quadrature(flow: Flow, zeta: GridFunction, t: float,
                              nodes_per_unit: int = 32, tol: float = 1e-9,
                              max_nodes: int = 1024):
    """Composite Gauss--Legendre quadrature of ``s -> zeta o T_s`` on ``[0, t]``.

    Starts with one 32-node panel per unit time and doubles the panel count
    until successive results differ by less than ``tol`` in sup norm or the
    node count would exceed ``max_nodes``.  Over the rotation the integrand
    is evaluated pointwise from the trigonometric interpolant of ``zeta``
    (``_kernels.orbit_quadrature``); otherwise through the flow action.

    Returns ``(integral, nodes_used, converged)``.
    """
    flow._check(zeta)
    t = float(t)
    if t == 0.0:
        return make_function(zeta.space, np.zeros(zeta.space.size)), 0, True
    rotation = isinstance(flow, RotationFlow)
    if rotation:
        space = zeta.space
        coeffs = np.fft.fft(zeta.samples) / space.N
        modes = space.modes.astype(np.float64)
        nyq = space.nyquist_bin
        if nyq is not None:
            # split the Nyquist coefficient into +/- N/2 halves (cosine interpolant)
            coeffs = np.append(coeffs, 0.5 * coeffs[nyq])
            coeffs[nyq] *= 0.5
            modes = np.append(modes, -modes[nyq])

    def integrate(panels):
        nodes, weights = _gauss_legendre_panels(t, nodes_per_unit, panels)
        if rotation:
            vals = _kernels.orbit_quadrature(coeffs, modes, space.points, nodes, weights)
            return vals
        acc = np.zeros(zeta.space.size, dtype=np.complex128)
        for s, w in zip(nodes, weights):
            acc += w * flow.apply(s, zeta).samples
        return acc

    panels = max(1, math.ceil(abs(t)))
    prev = integrate(panels)
    converged = False
    while nodes_per_unit * panels * 2 <= max_nodes:
        panels *= 2
        cur = integrate(panels)
        diff = float(np.abs(cur - prev).max())
        prev = cur
        if diff < tol:
            converged = True
            break
    return make_function(zeta.space, prev), nodes_per_unit * panels, converged


def orbit_integral_cells(flow: SpecialFlow, zeta: GridFunction, t: float) -> GridFunction:
    """Exact ``int_0^t zeta o T_s ds`` for the cell transport of a special flow.

    The discrete orbit dwells ``1/L`` in each cell, so ``s -> zeta o T_s`` is
    piecewise constant and the integral is a finite sum over dwell times.
    """
    flow._check(zeta)
    L = flow.space.L
    r = float(t) * L
    n = math.floor(r)
    if abs(r - round(r)) <= COMMENSURATE_TOL * max(1.0, abs(r)):
        n = r = round(r)
    step = flow.targets(1)
    acc = np.zeros(zeta.space.size, dtype=np.complex128)
    if n >= 0:
        g = zeta.samples
        for _ in range(n):
            acc += g
            g = g[step]
        acc = acc / L + (r - n) / L * g
    else:
        back = flow.targets(-1)
        g = zeta.samples[back]
        for _ in range(-n - 1):
            acc += g
            g = g[back]
        # g now holds zeta o T_{n/L}
        acc = -(acc / L + (n + 1 - r) / L * g)
    return make_function(zeta.space, acc)


def rotation_derivative(f: CircleFunction) -> CircleFunction:
    """Generator of the rotation Koopman group: mode ``k`` times ``ik`` (Nyquist bin to 0)."""
    space = f.space
    sym = 1j * space.modes.astype(np.float64)
    if space.nyquist_bin is not None:
        sym[space.nyquist_bin] = 0.0
    return make_function(space, np.fft.ifft(np.fft.fft(f.samples) * sym), f.band, f.flags)


# ---------------------------------------------------------------------------
# constructions


def cocycle_from_derivative(flow: Flow, zeta: GridFunction, method: str = "auto") -> Cocycle:
    """``psi_t = exp(int_0^t zeta o T_s ds)``.

    ``method`` is ``"closed"`` (rotation only), ``"cells"`` (special flow
    only), ``"quadrature"``, or ``"auto"`` (closed form over the rotation,
    exact dwell-time sums over special flows, quadrature elsewhere).
    """
    flow._check(zeta)
    if method == "auto":
        if isinstance(flow, RotationFlow):
            method = "closed"
        elif isinstance(flow, SpecialFlow):
            method = "cells"
        else:
            method = "quadrature"
    if method == "cells":
        if not isinstance(flow, SpecialFlow):
            raise ValueError("dwell-time sums exist for special flows only")

        def evaluate(t):
            return orbit_integral_cells(flow, zeta, t).exp()
    elif method == "closed":
        if not isinstance(flow, RotationFlow):
            raise ValueError("closed-form orbit integrals exist for the rotation only")

        def evaluate(t):
            return orbit_integral(flow, zeta, t).exp()
    elif method == "quadrature":
        def evaluate(t):
            phi, _, _ = orbit_integral_quadrature(flow, zeta, t)
            return phi.exp()
    else:
        raise ValueError(f"unknown method {method!r}")
    return Cocycle(flow, "from_derivative", evaluate, derivative=zeta,
                   data={"zeta": zeta, "method": method})


def coboundary_cocycle(flow: Flow, theta: GridFunction, delta: float = NONZERO_TOL) -> Cocycle:
    """``psi_t = (theta o T_t) / theta``; ``theta`` must stay ``delta`` away from zero."""
    flow._check(theta)
    if theta.min_abs() < delta:
        raise ValueError(f"transfer function vanishes: min |theta| = {theta.min_abs():.3g} < {delta}")

    def evaluate(t):
        return flow.apply(t, theta) / theta

    derivative = None
    if isinstance(flow, RotationFlow):
        derivative = rotation_derivative(theta) / theta
    return Cocycle(flow, "coboundary", evaluate, derivative=derivative, data={"theta": theta})


def explicit_cocycle(flow: Flow, rule, derivative=None) -> Cocycle:
    """Cocycle given by an arbitrary rule ``t -> psi_t`` (the identity is not enforced)."""
    return Cocycle(flow, "explicit", lambda t: rule(t), derivative=derivative)


# ---------------------------------------------------------------------------
# identities


def cocycle_identity_residual(psi: Cocycle, t: float, s: float) -> float:
    """``|| psi_{t+s} - psi_t (psi_s o T_t) ||_2``."""
    lhs = psi(t + s)
    rhs = psi(t) * psi.flow.apply(t, psi(s))
    return l2(lhs - rhs)


def inverse_relation_residual(psi: Cocycle, t: float, delta: float = NONZERO_TOL) -> float:
    """``|| 1/psi_t - psi_{-t} o T_t ||_2``."""
    pt = psi(t)
    if pt.min_abs() < delta:
        raise ValueError(f"psi_{t} vanishes on the grid (min |psi| = {pt.min_abs():.3g})")
    return l2(1.0 / pt - psi.flow.apply(t, psi(-t)))


def derivative_residual(psi: Cocycle, zeta: GridFunction, t: float) -> float:
    """``|| (psi_t - 1)/t - zeta ||_2``."""
    if t == 0:
        raise ValueError("derivative residual needs t != 0")
    return l2((psi(t) - 1.0) / t - zeta)


# ---------------------------------------------------------------------------
# transfer functions over the rotation


@dataclass
class TransferFunction:
    """Transfer function ``theta = e_m exp(Theta)`` solving ``zeta = B theta / theta``."""

    theta: CircleFunction
    log_part: CircleFunction
    winding: int
    residual: float
    probe_times: tuple = ()

    def cocycle(self, flow) -> Cocycle:
        return coboundary_cocycle(flow, self.theta)


@dataclass
class ObstructionReport:
    """``int zeta`` is not in ``iZ``: no transfer function exists."""

    mean_zeta: complex
    nearest_integer_multiple: int
    distance: float
    periodicity_defect: float = field(default=float("nan"))

    def to_dict(self) -> dict:
        return {"mean_zeta": [self.mean_zeta.real, self.mean_zeta.imag],
                "nearest_integer_multiple": self.nearest_integer_multiple,
                "distance": self.distance}


def default_probe_times(space) -> tuple:
    # times 2 pi m / N so that theta o T_t is an exact grid shift
    return tuple(2 * np.pi * m / space.N for m in (1, 3, space.N // 4, space.N // 2 + 1))


def solve_transfer_function(flow: RotationFlow, zeta: CircleFunction, tol: float = 1e-8,
                            probe_times=None):
    """Solve ``zeta = B theta / theta`` over the rotation, or report the obstruction.

    A solution exists iff ``int zeta = i m`` for an integer ``m``.  Then
    ``theta = e_m exp(Theta)`` with ``Theta_k = zeta_k / (ik)`` for
    ``k != 0`` and ``Theta_0 = 0``; no logarithm of sampled data is taken.
    The returned ``residual`` compares the coboundary with
    ``cocycle_from_derivative(zeta)`` at ``probe_times``.
    """
    if not isinstance(flow, RotationFlow):
        raise ValueError("transfer functions are solved over the rotation only")
    flow._check(zeta)
    space = zeta.space
    mean = zeta.integral()
    m = int(round(mean.imag))
    distance = abs(mean - 1j * m)
    if distance > tol:
        psi = cocycle_from_derivative(flow, zeta)
        defect = l2(psi(2 * np.pi) - 1.0)
        return ObstructionReport(mean, m, float(distance), defect)
    c = np.fft.fft(zeta.samples) / space.N
    k = space.modes.astype(np.float64)
    log_c = np.zeros_like(c)
    nz = k != 0
    log_c[nz] = c[nz] / (1j * k[nz])
    if space.nyquist_bin is not None:
        log_c[space.nyquist_bin] = 0.0
    log_part = make_function(space, np.fft.ifft(log_c) * space.N, zeta.band)
    theta = make_function(space, np.exp(1j * m * space.points) * np.exp(log_part.samples))
    if probe_times is None:
        probe_times = default_probe_times(space)
    cob = coboundary_cocycle(flow, theta)
    ref = cocycle_from_derivative(flow, zeta)
    residual = max(l2(cob(t) - ref(t)) for t in probe_times)
    return TransferFunction(theta, log_part, m, float(residual), tuple(probe_times))


# ---------------------------------------------------------------------------
# continuity and uniqueness


@dataclass
class C0DecayReport:
    t: list
    distance: list
    consistent: bool
    noise: float = 0.10
    final_bound: float = 1e-3

    def rows(self):
        return list(zip(self.t, self.distance))


def c0_decay_report(psi: Cocycle, t_list, noise: float = 0.10,
                    final_bound: float = 1e-3) -> C0DecayReport:
    """``|| psi_t - 1 ||_2`` along decreasing ``t``.

    Consistent when every value is at most ``(1 + noise)`` times its
    predecessor and the last value is at most ``final_bound``.
    """
    t_list = [float(t) for t in t_list]
    if any(t <= 0 for t in t_list) or any(b >= a for a, b in zip(t_list, t_list[1:])):
        raise ValueError("t_list must be positive and strictly decreasing")
    d = [l2(psi(t) - 1.0) for t in t_list]
    monotone = all(b <= (1 + noise) * a for a, b in zip(d, d[1:]))
    return C0DecayReport(t_list, d, bool(monotone and d[-1] <= final_bound), noise, final_bound)


def uniqueness_crosscheck(flow: RotationFlow, zeta: CircleFunction, t: float) -> float:
    """L2 distance between closed-form and quadrature constructions of ``psi_t``."""
    if not isinstance(flow, RotationFlow):
        raise ValueError("uniqueness crosscheck runs over the rotation")
    closed = cocycle_from_derivative(flow, zeta, method="closed")(t)
    quad = cocycle_from_derivative(flow, zeta, method="quadrature")(t)
    return l2(closed - quad)
