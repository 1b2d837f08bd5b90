"""One-parameter operator groups on grid functions.

Kinds: Koopman (``f -> f o T_t``), weighted (``f -> psi_t (f o T_t)``),
Fourier multiplier (``e_k -> exp(t a_k) e_k``) and affine nilpotent
(``U_t = I + t A`` with ``A f = (f, 1_B) 1_{X \\ B}``).  The module also holds
difference-quotient generator estimates, the Trotter--Kato product and the
dense operator matrix used as a brute-force norm oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cocycles import Cocycle, cocycle_from_derivative, rotation_derivative
from .flows import Flow, RotationFlow
from .space import (CircleSpace, GridFunction, SpaceMismatchError, inner_product,
                    l2, make_function)

__all__ = [
    "Group",
    "KoopmanGroup",
    "WeightedGroup",
    "MultiplierGroup",
    "AffineNilpotentGroup",
    "GeneratorUnavailable",
    "GeneratorEstimate",
    "ConvergenceTable",
    "OperatorMatrix",
    "koopman_group",
    "weighted_group",
    "multiplier_group",
    "affine_nilpotent_group",
    "estimate_generator",
    "trotter_kato_product",
    "riemann_exponent_identity_residual",
    "trotter_kato_limit_study",
    "operator_matrix",
]

DENSE_LIMIT = 512


class GeneratorUnavailable(ValueError):
    """No closed-form generator for this group."""


class Group:
    kind = "abstract"
    unitary = False
    measure_preserving = False

    def __init__(self, space):
        self.space = space

    def apply(self, t: float, f: GridFunction) -> GridFunction:
        raise NotImplementedError

    def generator(self, f: GridFunction) -> GridFunction:
        raise GeneratorUnavailable(f"no closed-form generator for {self.kind} group")

    def __call__(self, t, f):
        return self.apply(t, f)

    def _check(self, f):
        if f.space != self.space:
            raise SpaceMismatchError(f"function on {f.space!r}, group on {self.space!r}")

    def descriptor(self) -> dict:
        return {"kind": self.kind, "params": {}}

    def __repr__(self):
        return f"{type(self).__name__}({self.space!r})"


class KoopmanGroup(Group):
    kind = "koopman"

    def __init__(self, flow: Flow):
        super().__init__(flow.space)
        self.flow = flow
        self.measure_preserving = flow.measure_preserving
        self.unitary = flow.measure_preserving

    def apply(self, t, f):
        return self.flow.apply(t, f)

    def generator(self, f):
        if isinstance(self.flow, RotationFlow):
            self._check(f)
            return rotation_derivative(f)
        return super().generator(f)

    def descriptor(self):
        return {"kind": self.kind, "params": {"flow": self.flow.descriptor()}}


class WeightedGroup(Group):
    """``U_t f = psi_t * (f o T_t)``; ``U_t 1 = psi_t``."""

    kind = "weighted"

    def __init__(self, flow: Flow, psi: Cocycle):
        if psi.flow != flow:
            raise ValueError("cocycle lives over a different flow")
        super().__init__(flow.space)
        self.flow = flow
        self.psi = psi
        self.measure_preserving = flow.measure_preserving

    def apply(self, t, f):
        return self.psi(t) * self.flow.apply(t, f)

    def generator(self, f):
        # A = B + zeta I when the cocycle has a closed-form derivative
        if isinstance(self.flow, RotationFlow) and self.psi.derivative is not None:
            self._check(f)
            return rotation_derivative(f) + self.psi.derivative * f
        return super().generator(f)

    def descriptor(self):
        return {"kind": self.kind,
                "params": {"flow": self.flow.descriptor(), "cocycle": self.psi.kind}}


class MultiplierGroup(Group):
    """``U_t e_k = exp(t a_k) e_k`` for a symbol ``k -> a_k``.

    The Nyquist bin of an even grid holds ``cos(N x / 2)`` and receives the
    average of the ``+N/2`` and ``-N/2`` actions.
    """

    kind = "multiplier"

    def __init__(self, space: CircleSpace, symbol):
        if not isinstance(space, CircleSpace):
            raise TypeError("multiplier groups act on circle functions")
        super().__init__(space)
        self.symbol = symbol
        k = space.modes
        self._a = np.array([complex(symbol(int(kk))) for kk in k])
        self._nyq = None
        if space.nyquist_bin is not None:
            half = space.N // 2
            self._nyq = (complex(symbol(half)), complex(symbol(-half)))
        band = np.abs(k) <= space.K
        self.unitary = bool(np.all(self._a[band].real == 0))

    def multiplier(self, t: float) -> np.ndarray:
        mult = np.exp(float(t) * self._a)
        if self._nyq is not None:
            a_plus, a_minus = self._nyq
            mult[self.space.nyquist_bin] = 0.5 * (np.exp(t * a_plus) + np.exp(t * a_minus))
        return mult

    def apply(self, t, f):
        self._check(f)
        c = np.fft.fft(f.samples) * self.multiplier(t)
        return make_function(self.space, np.fft.ifft(c), f.band, f.flags)

    def generator(self, f):
        self._check(f)
        sym = self._a.copy()
        if self._nyq is not None:
            sym[self.space.nyquist_bin] = 0.5 * sum(self._nyq)
        return make_function(self.space, np.fft.ifft(np.fft.fft(f.samples) * sym), f.band, f.flags)

    def descriptor(self):
        return {"kind": self.kind,
                "params": {"space": self.space.descriptor(),
                           "symbol": [[z.real, z.imag] for z in self._a]}}


class AffineNilpotentGroup(Group):
    """``U_t f = f + t (f, 1_B) 1_{X \\ B}``."""

    kind = "affine_nilpotent"

    def __init__(self, b_indicator: GridFunction):
        s = b_indicator.samples
        if not np.all((s == 0) | (s == 1)):
            raise ValueError("B must be given by a {0,1}-valued indicator")
        mu = float(np.dot(b_indicator.space.weights, s.real))
        if mu <= 0 or mu >= 1:
            raise ValueError(f"mu(B) = {mu} must lie strictly between 0 and 1")
        super().__init__(b_indicator.space)
        self.b = b_indicator
        self.complement = 1.0 - b_indicator
        self.mu_b = mu

    def generator(self, f):
        self._check(f)
        return inner_product(f, self.b) * self.complement

    def apply(self, t, f):
        return f + float(t) * self.generator(f)

    def descriptor(self):
        return {"kind": self.kind, "params": {"mu_B": self.mu_b}}


def koopman_group(flow: Flow) -> KoopmanGroup:
    return KoopmanGroup(flow)


def weighted_group(flow: Flow, psi: Cocycle) -> WeightedGroup:
    return WeightedGroup(flow, psi)


def multiplier_group(space: CircleSpace, symbol) -> MultiplierGroup:
    return MultiplierGroup(space, symbol)


def affine_nilpotent_group(b_indicator: GridFunction) -> AffineNilpotentGroup:
    return AffineNilpotentGroup(b_indicator)


# ---------------------------------------------------------------------------
# generators


@dataclass
class GeneratorEstimate:
    f: GridFunction
    estimate: GridFunction
    h: float
    method: str
    error_estimate: float


def _central(group, f, h):
    return (group.apply(h, f) - group.apply(-h, f)) / (2.0 * h)


def _richardson(group, f, h):
    return (4.0 * _central(group, f, h / 2) - _central(group, f, h)) / 3.0


def estimate_generator(group: Group, f: GridFunction, h: float = 1e-3,
                       method: str = "central") -> GeneratorEstimate:
    """Difference-quotient (or exact) approximation of ``A f``.

    ``central`` is ``(U_h f - U_{-h} f) / 2h``; ``richardson4`` combines
    steps ``h`` and ``h/2`` to fourth order.  The error estimate comes from
    step halving.  ``exact`` uses the closed-form generator.
    """
    if method == "exact":
        return GeneratorEstimate(f, group.generator(f), 0.0, "exact", 0.0)
    if not h > 0:
        raise ValueError("step h must be positive")
    if method == "central":
        d1, d2 = _central(group, f, h), _central(group, f, h / 2)
        err = l2(d1 - d2) * 4.0 / 3.0
        return GeneratorEstimate(f, d1, h, method, err)
    if method == "richardson4":
        r1, r2 = _richardson(group, f, h), _richardson(group, f, h / 2)
        err = l2(r1 - r2) * 16.0 / 15.0
        return GeneratorEstimate(f, r1, h, method, err)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Trotter--Kato


def trotter_kato_product(flow: Flow, zeta: GridFunction, t: float, n: int,
                         f: GridFunction) -> GridFunction:
    """``(V_{t/n} o exp((t/n) zeta) I)^n f``."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be at least 1")
    tau = float(t) / n
    step = np.exp(tau * zeta.samples)
    g = f
    for _ in range(n):
        g = flow.apply(tau, make_function(g.space, step * g.samples, None, g.flags))
    return g


def riemann_exponent_identity_residual(flow: Flow, zeta: GridFunction, t: float, n: int,
                                       f: GridFunction) -> float:
    """Distance between the product and ``exp((t/n) sum_j zeta o T_{jt/n}) V_t f``."""
    n = int(n)
    tau = float(t) / n
    expo = np.zeros(zeta.space.size, dtype=np.complex128)
    for j in range(1, n + 1):
        expo += flow.apply(j * tau, zeta).samples
    rhs = make_function(zeta.space, np.exp(tau * expo)) * flow.apply(t, f)
    return l2(trotter_kato_product(flow, zeta, t, n, f) - rhs)


@dataclass
class ConvergenceTable:
    """Rows ``(n, error, empirical order)``; the order of row ``i`` compares it with row ``i-1``."""

    rows: list = field(default_factory=list)
    header = "n,error,order"

    @classmethod
    def from_errors(cls, ns, errors):
        ns = [int(n) for n in ns]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("n must be strictly increasing")
        rows = []
        for i, (n, e) in enumerate(zip(ns, errors)):
            order = None
            if i > 0 and errors[i - 1] > 0 and e > 0:
                order = math.log(errors[i - 1] / e) / math.log(n / ns[i - 1])
            rows.append((n, float(e), order))
        return cls(rows)

    @property
    def orders(self):
        return [r[2] for r in self.rows if r[2] is not None]

    def to_csv(self) -> str:
        lines = [self.header]
        for n, e, o in self.rows:
            lines.append(f"{n},{e!r},{'' if o is None else repr(o)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str):
        lines = text.strip().splitlines()
        if lines[0] != cls.header:
            raise ValueError(f"bad header {lines[0]!r}")
        rows = []
        for line in lines[1:]:
            n, e, o = line.split(",")
            rows.append((int(n), float(e), None if o == "" else float(o)))
        return cls(rows)


def trotter_kato_limit_study(flow: Flow, zeta: GridFunction, t: float, n_list) -> ConvergenceTable:
    """Error of the Trotter--Kato product on ``1`` against ``psi_t`` for each ``n``."""
    psi_t = cocycle_from_derivative(flow, zeta)(t)
    one = make_function(zeta.space, np.ones(zeta.space.size), band=0)
    errors = [l2(trotter_kato_product(flow, zeta, t, n, one) - psi_t) for n in n_list]
    return ConvergenceTable.from_errors(n_list, errors)


# ---------------------------------------------------------------------------
# dense oracle


@dataclass
class OperatorMatrix:
    """Matrix of ``U_t`` acting on sample vectors, with the measure weights."""

    matrix: np.ndarray
    weights: np.ndarray

    def norm_inf(self) -> float:
        """``||U_t||_{inf -> inf}``: largest absolute row sum."""
        return float(np.abs(self.matrix).sum(axis=1).max())

    def norm_2(self) -> float:
        """``||U_t||_{2 -> 2}`` in ``L_2(mu)``: largest singular value of ``W^1/2 M W^-1/2``."""
        sw = np.sqrt(self.weights)
        return float(np.linalg.svd(sw[:, None] * self.matrix / sw[None, :], compute_uv=False)[0])


def operator_matrix(group: Group, t: float) -> OperatorMatrix:
    n = group.space.size
    if n > DENSE_LIMIT:
        raise ValueError(f"dense matrix of size {n} exceeds the limit {DENSE_LIMIT}")
    cols = np.empty((n, n), dtype=np.complex128)
    eye = np.eye(n)
    for j in range(n):
        cols[:, j] = group.apply(t, make_function(group.space, eye[j])).samples
    return OperatorMatrix(cols, np.asarray(group.space.weights))
