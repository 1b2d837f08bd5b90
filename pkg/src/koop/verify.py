"""Residuals, bounds and verdicts for Koopman and weighted groups.

Every checker returns either a nonnegative residual or a :class:`Verdict`
whose ``passed`` flag is exactly ``residual <= threshold``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .cocycles import Cocycle, cocycle_from_derivative, orbit_integral
from .flows import Flow, RotationFlow
from .groups import (Group, GeneratorUnavailable, KoopmanGroup, WeightedGroup,
                     estimate_generator, operator_matrix)
from .space import (CircleSpace, GridFunction, constant, from_coefficients, l2,
                    linf, make_function, random_bandlimited)

__all__ = [
    "Verdict",
    "verdict",
    "GrowthFit",
    "HolderFit",
    "SlidingAverage",
    "UnboundedA1Report",
    "AliasingError",
    "derivation_residual",
    "perturbed_derivation_residual",
    "multiplicativity_residual",
    "koopman_detector",
    "linf_growth_fit",
    "weighted_nonsingular_check",
    "unitary_modulus_residual",
    "rn_bound_check",
    "generator_relation_residual",
    "holder_scaling_probe",
    "sliding_average",
    "unbounded_A1_study",
]


class AliasingError(ValueError):
    """A product left the alias-free band of the grid."""


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    residual: float
    threshold: float
    context: dict = field(default_factory=dict)
    expected: bool = True

    @property
    def ok(self) -> bool:
        """The verdict matches its declared polarity."""
        return self.passed == self.expected

    def to_dict(self) -> dict:
        ctx = dict(self.context)
        ctx["expected_pass"] = self.expected
        return {"name": self.name, "pass": self.passed, "residual": self.residual,
                "threshold": self.threshold, "context": ctx}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def verdict(name, residual, threshold, context=None, expected=True) -> Verdict:
    residual = float(residual)
    threshold = float(threshold)
    return Verdict(name, bool(residual <= threshold), residual, threshold,
                   dict(context or {}), bool(expected))


def _generator_action(obj):
    if isinstance(obj, Group):
        return obj.generator
    return obj


def _require_alias_free(*pairs):
    for f, g in pairs:
        if isinstance(f.space, CircleSpace):
            if f.band is None or g.band is None:
                continue
            if f.band + g.band > f.space.alias_free_band:
                raise AliasingError(
                    f"band {f.band} + {g.band} exceeds {f.space.alias_free_band} on N={f.space.N}")


# ---------------------------------------------------------------------------
# derivations and multiplicativity


def derivation_residual(generator_action, f: GridFunction, g: GridFunction) -> float:
    """``|| A(fg) - (Af) g - f (Ag) ||_2``."""
    _require_alias_free((f, g))
    A = _generator_action(generator_action)
    return l2(A(f * g) - A(f) * g - f * A(g))


def perturbed_derivation_residual(generator_action, a1: GridFunction,
                                  f: GridFunction, g: GridFunction) -> float:
    """Derivation residual of ``f -> A f - (A 1) f``."""
    A = _generator_action(generator_action)
    return derivation_residual(lambda h: A(h) - a1 * h, f, g)


def multiplicativity_residual(group: Group, t: float, f: GridFunction, g: GridFunction) -> float:
    """``|| U_t(fg) - (U_t f)(U_t g) ||_2``."""
    _require_alias_free((f, g))
    return l2(group.apply(t, f * g) - group.apply(t, f) * group.apply(t, g))


def koopman_detector(group: Group, seed: int = 0, pairs: int = 50, band: int | None = None,
                     threshold: float = 1e-6, h: float = 1e-3) -> Verdict:
    """Max derivation residual over a seeded suite of random band-limited pairs.

    Uses the closed-form generator when the group has one, otherwise a
    fourth-order difference quotient with step ``h``.  Passing means the
    generator behaves as a derivation, i.e. the group looks Koopman.
    """
    space = group.space
    if band is None:
        band = min(space.K, space.alias_free_band // 2)
    try:
        def action(f):
            return group.generator(f)
        action(constant(space))
        how = "exact"
    except GeneratorUnavailable:
        def action(f):
            return estimate_generator(group, f, h, "richardson4").estimate
        how = "richardson4"
    worst = 0.0
    for i in range(pairs):
        f = random_bandlimited(space, seed + 2 * i, band)
        g = random_bandlimited(space, seed + 2 * i + 1, band)
        worst = max(worst, derivation_residual(action, f, g))
    return verdict("koopman_detector", worst, threshold,
                   {"pairs": pairs, "band": band, "seed": seed, "generator": how,
                    "group": group.kind})


# ---------------------------------------------------------------------------
# growth bounds


@dataclass
class GrowthFit:
    M: float
    omega: float
    fit_residual: float
    samples: list

    def envelope_ok(self, rtol: float = 1e-6) -> bool:
        return all(n <= self.M * math.exp(self.omega * abs(t)) * (1 + rtol) for t, n in self.samples)

    def envelope_excess(self) -> float:
        return max(n / (self.M * math.exp(self.omega * abs(t))) - 1.0 for t, n in self.samples)


def _flow_of(group):
    return getattr(group, "flow", None)


def linf_growth_fit(group: Group, t_grid) -> GrowthFit:
    """Fit ``||U_t||_{inf->inf} <= M exp(omega |t|)`` on exact dense norms.

    ``log ||U_t||`` is regressed on ``|t|`` separately for forward and
    backward times; ``omega`` is the larger slope (clipped at 0) and ``M``
    the smallest constant ``>= 1`` putting every sample under the envelope.
    """
    flow = _flow_of(group)
    if isinstance(flow, RotationFlow):
        bad = [t for t in t_grid if flow.grid_steps(t) is None]
        if bad:
            raise ValueError(f"times {bad} are not multiples of 2 pi / N")
    samples = [(float(t), operator_matrix(group, t).norm_inf()) for t in t_grid]
    ts = np.array([t for t, _ in samples])
    logs = np.log([n for _, n in samples])
    omega, sq, count = 0.0, 0.0, 0
    for side in (ts >= 0, ts <= 0):
        x, y = np.abs(ts[side]), logs[side]
        if x.size == 0:
            continue
        if np.ptp(x) > 0:
            slope, icpt = np.polyfit(x, y, 1)
        else:
            slope, icpt = 0.0, float(y.mean())
        omega = max(omega, float(slope))
        sq += float(np.sum((y - (icpt + slope * x)) ** 2))
        count += x.size
    fit_res = math.sqrt(sq / count)
    M = max(1.0, float(np.max(np.exp(logs - omega * np.abs(ts)))))
    return GrowthFit(M, omega, fit_res, samples)


# ---------------------------------------------------------------------------
# weighted structure


def weighted_nonsingular_check(group: Group, t_probe, delta: float = 1e-8) -> Verdict:
    """Pass iff ``min |U_t 1| >= delta`` on the grid for every probe time."""
    one = constant(group.space)
    worst = (math.inf, None, None)
    zero_mass = 0.0
    for t in t_probe:
        a = np.abs(group.apply(t, one).samples)
        j = int(np.argmin(a))
        if a[j] < worst[0]:
            worst = (float(a[j]), float(t), j)
        zero_mass = max(zero_mass, float(np.dot(group.space.weights, a < delta)))
    min_abs, t_min, j_min = worst
    ctx = {"t_min": t_min, "index_min": j_min, "min_abs": min_abs,
           "zero_set_measure": zero_mass, "delta": delta}
    # residual <= threshold  <=>  min |U_t 1| >= delta
    return verdict("weighted_nonsingular", max(0.0, delta - min_abs), 0.0, ctx)


def unitary_modulus_residual(group: Group, t: float) -> float:
    """``|| |U_t 1| - 1 ||_inf``."""
    return linf(group.apply(t, constant(group.space)).abs() - 1.0)


def rn_bound_check(flow: Flow, psi: Cocycle, t: float, rtol: float = 1e-8) -> Verdict:
    """Check ``|| |psi_t|^2 (d(T_t* mu)/dmu o T_t) ||_inf <= ||U_t||_{2->2}^2``.

    The right side comes from the dense operator matrix of the weighted group.
    """
    density = flow.pushforward_density(t).density
    lhs = linf(psi(t).abs() * psi(t).abs() * flow.apply(t, density))
    rhs = operator_matrix(WeightedGroup(flow, psi), t).norm_2() ** 2
    return verdict("rn_bound", lhs / rhs - 1.0, rtol,
                   {"t": float(t), "lhs": lhs, "rhs": rhs, "flow": flow.kind})


def generator_relation_residual(a_action, b_action, a1: GridFunction, f: GridFunction) -> float:
    """``|| B f - (A f - f A1) ||_2``."""
    A = _generator_action(a_action)
    B = _generator_action(b_action)
    return l2(B(f) - (A(f) - f * a1))


# ---------------------------------------------------------------------------
# scaling probes


@dataclass
class HolderFit:
    exponent: float
    t: list
    norms: list
    degenerate: bool = False


def holder_scaling_probe(flow: Flow, g: GridFunction, t_grid, floor: float = 1e-14) -> HolderFit:
    """Log-log slope of ``|| g - g o T_t ||_2`` against ``t``.

    Slope near 1/2 exhibits the square-root (non-Lipschitz) modulus of a
    function outside the generator domain; slope near 1 the differentiable
    case.  All norms below ``floor`` give a degenerate fit.
    """
    t_grid = [float(t) for t in t_grid]
    if any(t <= 0 for t in t_grid):
        raise ValueError("t_grid must be positive")
    vals = [l2(g - flow.apply(t, g)) for t in t_grid]
    if max(vals) < floor:
        return HolderFit(float("nan"), t_grid, vals, degenerate=True)
    keep = [(t, v) for t, v in zip(t_grid, vals) if v >= floor]
    lt = np.log([t for t, _ in keep])
    lv = np.log([v for _, v in keep])
    slope = float(np.polyfit(lt, lv, 1)[0])
    return HolderFit(slope, t_grid, vals)


@dataclass
class SlidingAverage:
    average: GridFunction
    ratio: float
    bound: float = 2 * math.pi

    @property
    def within_bound(self) -> bool:
        return self.ratio <= self.bound


def sliding_average(eta: GridFunction, t: float, mean_tol: float = 1e-12) -> SlidingAverage:
    """``(F_t eta)(x) = (1/t) int_x^{x+t} eta`` for mean-zero ``eta`` on the circle.

    Mode ``k`` is multiplied by ``(e^{ikt} - 1)/(ikt)``.  ``ratio`` is
    ``||F_t eta||_2 / ||eta||_2``, checked against the constant ``2 pi``.
    """
    if t == 0:
        raise ValueError("sliding average needs t != 0")
    if abs(eta.integral()) > mean_tol:
        raise ValueError("eta must have mean zero")
    flow = RotationFlow(eta.space)
    avg = orbit_integral(flow, eta, t) / t
    n = l2(eta)
    ratio = l2(avg) / n if n > 0 else 0.0
    return SlidingAverage(avg, ratio)


# ---------------------------------------------------------------------------
# unbounded A1


@dataclass
class UnboundedA1Report:
    rows: list               # (K, t, r, ||zeta_K||_inf, ||zeta_K||_2)
    C: float
    per_K_constant: dict
    sup_norms: dict
    growth_factor: float
    linear_spread: float     # max over K of (max r/t) / (min r/t) - 1

    header = "K,t,r,zeta_inf,zeta_l2"

    def to_csv(self) -> str:
        lines = [self.header]
        lines += [f"{K},{t!r},{r!r},{zi!r},{z2!r}" for K, t, r, zi, z2 in self.rows]
        return "\n".join(lines) + "\n"


def power_law_zeta(space: CircleSpace, K: int, exponent: float = -0.7,
                   scale: float = 1.0) -> GridFunction:
    """``sum_{1 <= |k| <= K} |k|^exponent e_k``; real, mean zero, unbounded as ``K -> inf``."""
    coeffs = {k: scale * abs(k) ** exponent for k in range(-K, K + 1) if k != 0}
    return from_coefficients(space, coeffs)


def unbounded_A1_study(K_list, t_list, N: int | None = None, scale: float = 1.0,
                       exponent: float = -0.7) -> UnboundedA1Report:
    """Difference quotient ``r(t,K) = ||(U_t 1 - 1)/t - zeta_K||_2`` for truncated ``zeta_K``.

    One grid with ``N >= 4 max K`` is shared by every truncation.
    """
    K_list = [int(K) for K in K_list]
    if any(b <= a for a, b in zip(K_list, K_list[1:])):
        raise ValueError("K_list must be increasing")
    if N is None:
        N = max(64, 1 << math.ceil(math.log2(4 * max(K_list))))
    space = CircleSpace(N, max(K_list))
    flow = RotationFlow(space)
    one = constant(space)
    rows, per_K, sups = [], {}, {}
    spread = 0.0
    for K in K_list:
        zeta = power_law_zeta(space, K, exponent, scale)
        group = WeightedGroup(flow, cocycle_from_derivative(flow, zeta))
        zi, z2 = linf(zeta), l2(zeta)
        sups[K] = zi
        ratios = []
        for t in t_list:
            r = l2((group.apply(t, one) - one) / t - zeta)
            rows.append((K, float(t), r, zi, z2))
            ratios.append(r / abs(t))
        per_K[K] = max(ratios)
        if min(ratios) > 0:
            spread = max(spread, max(ratios) / min(ratios) - 1.0)
    C = max(per_K.values())
    growth = sups[K_list[-1]] / sups[K_list[0]] if sups[K_list[0]] > 0 else float("inf")
    return UnboundedA1Report(rows, C, per_K, sups, growth, spread)
