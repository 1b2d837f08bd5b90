"""Scenario configuration: embedded defaults, JSON loading and validation."""
from __future__ import annotations

import copy
import json
import math

import numpy as np

from .space import CircleSpace, GridFunction, from_coefficients

__all__ = ["DEFAULTS", "DEFAULT_TOLERANCES", "ConfigError", "load_config",
           "merge_config", "validate_config", "parse_function_spec", "print_defaults"]


class ConfigError(ValueError):
    pass


DEFAULT_TOLERANCES = {
    "exact": 1e-12,
    "spectral": 1e-10,
    "derivation": 1e-9,
    "multiplicativity": 1e-10,
    "quadrature": 1e-7,
    "uniqueness": 1e-8,
    "difference_quotient": 1e-5,
    "detector": 1e-6,
    "order_derivative": 0.1,
    "order_trotter": 0.15,
    "trotter_final": 1e-3,
    "trotter_extrapolated": 1e-5,
    "growth_unitary": 1e-6,
    "growth_weighted": 1e-3,
    "envelope": 1e-6,
    "rn": 1e-8,
    "holder_exponent": 0.05,
    "holder_value": 0.05,
    "transfer": 1e-8,
    "reconstruction": 1e-10,
    "unbounded_C": 100.0,
    "unbounded_growth": 2.0,
    "c0_final_cos": 2e-5,
    "c0_final_coboundary": 1e-4,
    "nonsingular_delta": 1e-8,
}

_GEOM_Q = [1, 2, 3, 5, 10, 20, 30, 50, 100]

DEFAULTS = {
    "space": {"N": 64, "K": 16},
    "special_flow": {"m": 512, "L": 1000, "alpha": (math.sqrt(5.0) - 1.0) / 2.0,
                     "roof": 1.0, "a": 0.3, "b": 0.5, "c": 0.99},
    "dense_special_flow": {"m": 8, "L": 50},
    "cocycle": {"zeta": "cos", "theta": "2+e1", "winding_zeta": "1"},
    "probes": {
        "t": [0.3, 1.0, -2.0],
        "ts_grid": [-2.0, -1.0, 0.0, 1.0, 2.0],
        "group_law_grid": [-2.0 + 4.0 * i / 9 for i in range(10)],
        "n_list": [8, 16, 32, 64, 128, 256, 512, 1024],
        "riemann_n": [1, 16, 128],
        "h_list": [1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3, 1e-3],
        "derivative_t": [1e-1, 1e-2, 1e-3],
        "c0_t": [1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
        "holder_t": [q * 1e-3 for q in _GEOM_Q],
        "growth_steps": [-16, -8, -4, -2, -1, 0, 1, 2, 4, 8, 16],
        "unbounded_K": [16, 64, 256],
        "unbounded_t": [1e-2, 1e-3],
    },
    "seeds": {"pairs": 1000, "detector": 2000, "family": 3000, "control": 3},
    "suite": {"pairs": 100, "detector_pairs": 50, "family_size": 20, "pair_band": 15,
              "planted_means": [[0.0, 0.0], [0.0, 1.0], [0.0, 2.0], [1.0, 0.0], [0.5, 1.0]],
              "family_band": 8, "family_scale": 0.5},
    "tolerances": dict(DEFAULT_TOLERANCES),
    "output_dir": "koop-out",
}

_SCHEMA = {k: (set(v) if isinstance(v, dict) else None) for k, v in DEFAULTS.items()}


def merge_config(overrides: dict | None) -> dict:
    """Deep-merge ``overrides`` into a copy of the defaults; unknown keys raise."""
    cfg = copy.deepcopy(DEFAULTS)
    for key, value in (overrides or {}).items():
        if key not in _SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        if _SCHEMA[key] is None:
            cfg[key] = value
            continue
        if not isinstance(value, dict):
            raise ConfigError(f"section {key!r} must be an object")
        for sub, v in value.items():
            if sub not in _SCHEMA[key]:
                raise ConfigError(f"unknown config key {key}.{sub}")
            cfg[key][sub] = v
    validate_config(cfg)
    return cfg


def load_config(path: str | None) -> dict:
    if path is None:
        return merge_config({})
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return merge_config(data)


def _need(cond, msg):
    if not cond:
        raise ConfigError(msg)


def validate_config(cfg: dict) -> None:
    sp = cfg["space"]
    try:
        CircleSpace(sp["N"], sp["K"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"space: {exc}") from exc
    sf = cfg["special_flow"]
    _need(0 < sf["a"] < sf["b"] < sf["c"] <= float(np.min(sf["roof"])),
          "special_flow: need 0 < a < b < c <= min roof")
    _need(int(sf["m"]) >= 1 and int(sf["L"]) >= 1, "special_flow: m and L must be positive")
    dsf = cfg["dense_special_flow"]
    _need(int(dsf["m"]) * int(dsf["L"]) <= 512, "dense_special_flow: more than 512 cells")
    pr = cfg["probes"]
    for key in ("n_list", "unbounded_K"):
        seq = pr[key]
        _need(all(b > a for a, b in zip(seq, seq[1:])), f"probes.{key} must increase")
    for key in ("derivative_t", "c0_t"):
        seq = pr[key]
        _need(all(t > 0 for t in seq) and all(b < a for a, b in zip(seq, seq[1:])),
              f"probes.{key} must be positive and decreasing")
    _need(all(t > 0 for t in pr["holder_t"]), "probes.holder_t must be positive")
    _need(max(pr["unbounded_K"]) * 4 <= 1 << 16, "probes.unbounded_K too large")
    su = cfg["suite"]
    _need(2 * su["pair_band"] <= (sp["N"] - 1) // 2,
          "suite.pair_band: products of pairs must stay alias-free")
    _need(su["pair_band"] <= sp["K"], "suite.pair_band exceeds K")
    tol = cfg["tolerances"]
    unknown = set(tol) - set(DEFAULT_TOLERANCES)
    _need(not unknown, f"unknown tolerances {sorted(unknown)}")
    _need(all(isinstance(v, (int, float)) and v >= 0 for v in tol.values()),
          "tolerances must be nonnegative numbers")
    for key in ("zeta", "theta", "winding_zeta"):
        parse_function_spec(cfg["cocycle"][key], CircleSpace(sp["N"], sp["K"]))
    _need(isinstance(cfg["output_dir"], str), "output_dir must be a string")


_NAMED = {
    "0": {},
    "1": {0: 1.0},
    "i": {0: 1j},
    "cos": {1: 0.5, -1: 0.5},
    "icos": {1: 0.5j, -1: 0.5j},
    "sin": {1: -0.5j, -1: 0.5j},
    "2+e1": {0: 2.0, 1: 1.0},
}


def parse_function_spec(spec, space: CircleSpace) -> GridFunction:
    """A named function (``"cos"``, ``"2+e1"``, ...) or ``{"k": [re, im]}`` coefficients."""
    if isinstance(spec, str):
        if spec not in _NAMED:
            raise ConfigError(f"unknown function {spec!r}; known: {sorted(_NAMED)}")
        coeffs = _NAMED[spec]
    elif isinstance(spec, dict):
        coeffs = {}
        for k, v in spec.items():
            try:
                kk = int(k)
                c = complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)
            except (TypeError, ValueError, IndexError) as exc:
                raise ConfigError(f"bad coefficient {k!r}: {v!r}") from exc
            coeffs[kk] = c
    else:
        raise ConfigError(f"function spec must be a name or a coefficient map, got {spec!r}")
    if any(abs(k) > space.K for k in coeffs):
        raise ConfigError(f"function spec {spec!r} exceeds band K={space.K}")
    return from_coefficients(space, coeffs)


def print_defaults() -> str:
    return json.dumps(DEFAULTS, indent=2, sort_keys=True)
