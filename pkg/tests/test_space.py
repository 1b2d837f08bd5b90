import json
import math

import numpy as np
import pytest

from koop import (CircleSpace, FiniteSpace, SpaceMismatchError, SpecialFlowSpace, character,
                  constant, from_coefficients, function_from_json, function_to_json,
                  inner_product, make_circle_space, make_function, multiply, norms,
                  random_bandlimited)


def test_make_circle_space_weights():
    sp = make_circle_space(64, 20)
    assert np.allclose(sp.weights, 1 / 64)
    assert math.isclose(sp.weights.sum(), 1.0, abs_tol=1e-15)


def test_smallest_grid_is_valid():
    assert make_circle_space(8, 3).N == 8


def test_band_above_nyquist_rejected():
    with pytest.raises(ValueError, match="band exceeds Nyquist"):
        make_circle_space(8, 4)


def test_tiny_grid_rejected():
    with pytest.raises(ValueError):
        make_circle_space(4, 1)


def test_inner_product_orthonormal(space):
    e1, e2 = character(space, 1), character(space, 2)
    assert abs(inner_product(e1, e1) - 1) < 1e-14
    assert abs(inner_product(e1, e2)) < 1e-14
    assert abs(inner_product(2 * e1 + 3 * e2, e2) - 3) < 1e-13


def test_inner_product_space_mismatch(space):
    other = CircleSpace(32, 8)
    with pytest.raises(SpaceMismatchError):
        inner_product(constant(space), constant(other))


def test_multiply_characters(space):
    e1 = character(space, 1)
    prod = multiply(e1, e1)
    assert np.max(np.abs(prod.samples - character(space, 2).samples)) < 1e-13
    assert prod.band == 2


def test_multiply_identity(space):
    f = random_bandlimited(space, 4, 10)
    assert np.array_equal((constant(space) * f).samples, f.samples)


def test_multiply_hand_convolution(space):
    one = constant(space)
    lhs = (one + character(space, 1)) * (one + character(space, -1))
    rhs = 2 * one + character(space, 1) + character(space, -1)
    assert np.max(np.abs(lhs.samples - rhs.samples)) < 1e-13


def test_multiply_flags_aliasing(space):
    f = random_bandlimited(space, 1, 16)
    g = random_bandlimited(space, 2, 16)
    assert "aliased" in (f * g).flags
    assert (random_bandlimited(space, 1, 15) * random_bandlimited(space, 2, 15)).aliased is False


def test_norms_examples(space):
    assert norms(constant(space)) == pytest.approx((1, 1, 1), abs=1e-14)
    assert norms(character(space, 3)) == pytest.approx((1, 1, 1), abs=1e-14)
    n = norms(2 * character(space, 1) + constant(space))
    assert n.Linf == pytest.approx(3.0, abs=1e-14)
    assert n.L2 == pytest.approx(math.sqrt(5), abs=1e-13)


def test_random_zero_mode_mean_zero_is_zero(space):
    f = random_bandlimited(space, 1, 0, mean_zero=True)
    assert np.all(f.samples == 0)


def test_random_real_valued(space):
    f = random_bandlimited(space, 7, 5, real_valued=True)
    assert np.max(np.abs(f.samples.imag)) <= 1e-12
    assert f.is_real


def test_random_deterministic(space):
    a = random_bandlimited(space, 11, 9)
    b = random_bandlimited(space, 11, 9)
    assert a.samples.tobytes() == b.samples.tobytes()


def test_random_band_checked(space):
    with pytest.raises(ValueError):
        random_bandlimited(space, 0, 17)


def test_parseval_and_roundtrip():
    sp = CircleSpace(64, 20)
    f = random_bandlimited(sp, 5, 20)
    c = f.coefficients()
    assert abs(norms(f).L2 - math.sqrt(np.sum(np.abs(c) ** 2))) < 1e-10
    back = np.fft.ifft(c * sp.N)
    assert np.max(np.abs(back - f.samples)) < 1e-10
    assert f.numerical_band() <= 20


def test_samples_must_be_finite(space):
    bad = np.zeros(space.N)
    bad[3] = np.nan
    with pytest.raises(ValueError):
        make_function(space, bad)


def test_functions_are_immutable(space):
    f = constant(space)
    with pytest.raises(AttributeError):
        f.band = 3
    with pytest.raises(ValueError):
        f.samples[0] = 2


def test_from_coefficients(space):
    f = from_coefficients(space, {1: 0.5, -1: 0.5})
    assert np.allclose(f.samples, np.cos(space.points), atol=1e-14)
    assert f.band == 1
    assert f.band_limit_hint == 1
    assert make_function(space, f.samples).band_limit_hint == "unknown"


def test_json_roundtrip_bit_exact(space):
    f = random_bandlimited(space, 3, 12)
    g = function_from_json(function_to_json(f))
    assert g.samples.tobytes() == f.samples.tobytes()
    payload = json.loads(function_to_json(f))
    assert payload["space"] == {"N": 64, "K": 16}
    assert len(payload["samples"]) == 64


def test_finite_space_checks():
    FiniteSpace([0.25, 0.25, 0.5])
    with pytest.raises(ValueError):
        FiniteSpace([0.5, 0.6])
    with pytest.raises(ValueError):
        FiniteSpace([1.0, 0.0])


def test_special_flow_space_cells():
    sp = SpecialFlowSpace(16, 0.3, np.linspace(1.0, 2.0, 16), 20, 0.9)
    assert abs(sp.weights.sum() - 1.0) < 1e-10
    assert sp.size == int(np.rint(np.linspace(1.0, 2.0, 16) * 20).sum())
    with pytest.raises(ValueError):
        SpecialFlowSpace(4, 0.3, 1.0, 10, 1.2)
    with pytest.raises(ValueError):
        SpecialFlowSpace(4, 0.3, [1.0, -1.0, 1.0, 1.0], 10, 0.5)
