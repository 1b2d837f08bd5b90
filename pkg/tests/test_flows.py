import math

import numpy as np
import pytest

from koop import (FiniteMapFlow, FiniteSpace, RotationFlow, SpecialFlow, SpaceMismatchError,
                  CircleSpace, character, constant, flow_from_json, flow_to_json,
                  koopman_apply, pushforward_density, random_bandlimited, strip_indicator,
                  strip_symmetric_difference)
from koop.space import l2

from conftest import GOLDEN


def test_rotation_identity_and_periodicity(rot, space):
    f = random_bandlimited(space, 2, 16)
    assert np.array_equal(koopman_apply(rot, 0.0, f).samples, f.samples)
    assert l2(koopman_apply(rot, 2 * math.pi, f) - f) <= 1e-12


@pytest.mark.parametrize("t", [0.3, -1.7, 2.0, 5.1])
@pytest.mark.parametrize("k", [0, 1, -3, 16])
def test_rotation_character_phase(rot, space, t, k):
    e = character(space, k)
    assert l2(rot.apply(t, e) - np.exp(1j * k * t) * e) <= 1e-12


def test_rotation_examples(rot, space):
    one = constant(space)
    assert l2(rot.apply(0.77, one) - one) <= 1e-14
    e1 = character(space, 1)
    assert l2(rot.apply(math.pi, e1) + e1) <= 1e-14


def test_rotation_commensurate_is_roll(rot, space):
    f = random_bandlimited(space, 9, 16)
    t = 2 * math.pi * 5 / space.N
    assert rot.grid_steps(t) == 5
    assert np.array_equal(rot.apply(t, f).samples, np.roll(f.samples, -5))


def test_rotation_group_law_grid(rot, space):
    f = random_bandlimited(space, 3, 16)
    grid = np.linspace(-2, 2, 10)
    worst = max(l2(rot.apply(t, rot.apply(s, f)) - rot.apply(t + s, f)) for t in grid for s in grid)
    assert worst <= 1e-10


def test_rotation_point_action(rot):
    assert rot.point(1.0, 0.5) == pytest.approx(1.5)
    assert rot.point(math.pi, 1 + 0j) == pytest.approx(-1 + 0j)


def test_space_mismatch(rot):
    with pytest.raises(SpaceMismatchError):
        rot.apply(0.1, constant(CircleSpace(32, 8)))


def test_special_flow_identity(strip_base):
    flow = SpecialFlow(strip_base)
    h = strip_indicator(strip_base, 0.3, 0.5)
    assert np.array_equal(flow.apply(0.0, h).samples, h.samples)


def test_special_flow_point_examples():
    from koop import SpecialFlowSpace
    base = SpecialFlowSpace(10, GOLDEN, 1.0, 100, 0.99)
    flow = SpecialFlow(base)
    y, s = flow.point(0.5, (0.25, 0.3))
    assert (y, s) == pytest.approx((0.25, 0.8), abs=1e-12)
    y, s = flow.point(0.5, (0.25, 0.7))
    assert (y, s) == pytest.approx(((0.25 + GOLDEN) % 1.0, 0.2), abs=1e-12)
    y2, s2 = flow.point(-0.5, (y, s))
    assert (y2, s2) == pytest.approx((0.25, 0.7), abs=1e-12)


def test_special_flow_shifted_strip(strip_base):
    flow = SpecialFlow(strip_base)
    h = strip_indicator(strip_base, 0.3, 0.5)
    moved = flow.apply(-0.05, h)  # indicator of T_t H
    assert np.array_equal(moved.samples, strip_indicator(strip_base, 0.35, 0.55).samples)
    assert abs(l2(moved) - l2(h)) < 1e-14


def test_special_flow_interpolated_flag(small_base):
    flow = SpecialFlow(small_base)
    f = constant(small_base)
    assert "interpolated" in flow.apply(0.013, f).flags
    assert "interpolated" not in flow.apply(0.02, f).flags


def test_special_flow_group_law_and_inverse(small_base):
    flow = SpecialFlow(small_base)
    rng = np.random.default_rng(0)
    from koop import make_function
    f = make_function(small_base, rng.standard_normal(small_base.size))
    for t, s in [(0.02, 0.5), (1.3, -0.7), (-2.0, 3.1)]:
        assert np.array_equal(flow.apply(t, flow.apply(s, f)).samples, flow.apply(t + s, f).samples)
    assert np.array_equal(flow.apply(-0.74, flow.apply(0.74, f)).samples, f.samples)


def test_special_flow_nonconstant_roof_preserves_measure():
    from koop import SpecialFlowSpace, make_function
    base = SpecialFlowSpace(7, 0.41, np.linspace(1.0, 1.6, 7), 10, 0.9)
    flow = SpecialFlow(base)
    perm = flow.targets(13)
    assert np.array_equal(np.sort(perm), np.arange(base.size))
    f = make_function(base, np.arange(base.size, dtype=float))
    assert np.array_equal(flow.apply(-1.3, flow.apply(1.3, f)).samples, f.samples)


def test_pushforward_densities(rot, strip_base):
    d = pushforward_density(rot, 0.4).density
    assert np.all(d.samples == 1)
    d = pushforward_density(SpecialFlow(strip_base), 0.1).density
    assert np.all(d.samples == 1)
    fs = FiniteSpace.uniform(5)
    fm = FiniteMapFlow(fs, [1, 2, 3, 4, 0])
    assert np.allclose(pushforward_density(fm, 2).density.samples, 1)


def test_pushforward_density_nonuniform():
    fs = FiniteSpace([0.1, 0.2, 0.7])
    fm = FiniteMapFlow(fs, [1, 2, 0])
    d = pushforward_density(fm, 1).density
    assert not fm.measure_preserving
    assert np.all(d.samples.real > 0)
    assert abs(d.integral() - 1.0) < 1e-10


def test_finite_map_integer_times():
    fm = FiniteMapFlow(FiniteSpace.uniform(4), [2, 0, 3, 1])
    with pytest.raises(ValueError):
        fm.apply(0.5, constant(fm.space))
    from koop import make_function
    f = make_function(fm.space, [1.0, 2.0, 3.0, 4.0])
    assert np.array_equal(fm.apply(-3, fm.apply(3, f)).samples, f.samples)
    with pytest.raises(ValueError):
        FiniteMapFlow(FiniteSpace.uniform(3), [0, 0, 1])


@pytest.mark.parametrize("t", [0.02, 0.1, -0.05])
def test_strip_symmetric_difference(strip_base, t):
    d = strip_symmetric_difference(strip_base, 0.3, 0.5, t)
    assert abs(d - 2 * abs(t)) <= strip_base.row_measure()


def test_strip_symmetric_difference_zero(strip_base):
    assert strip_symmetric_difference(strip_base, 0.3, 0.5, 0.0) == 0.0


def test_strip_window_enforced(strip_base):
    with pytest.raises(ValueError):
        strip_symmetric_difference(strip_base, 0.3, 0.5, 0.2)
    with pytest.raises(ValueError):
        strip_symmetric_difference(strip_base, 0.5, 0.3, 0.01)


def test_strip_sqrt_identity(strip_base):
    flow = SpecialFlow(strip_base)
    h = strip_indicator(strip_base, 0.3, 0.5)
    for t in (0.01, 0.05):
        d = strip_symmetric_difference(strip_base, 0.3, 0.5, t)
        assert l2(h - flow.apply(t, h)) == pytest.approx(math.sqrt(d), rel=1e-12)


def test_flow_json_roundtrip(rot, small_base):
    assert flow_from_json(flow_to_json(rot)) == rot
    sf = SpecialFlow(small_base)
    assert flow_from_json(flow_to_json(sf)) == sf
    fm = FiniteMapFlow(FiniteSpace.uniform(3), [1, 2, 0])
    assert flow_from_json(flow_to_json(fm)) == fm
    assert set(map(str, __import__("json").loads(flow_to_json(rot)))) == {"kind", "params"}
