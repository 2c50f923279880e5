"""Test rotationally symmetric profiles and Reissner–Nordström data."""

import numpy as np
import pytest

from bartnik import config
from bartnik.errors import DimensionError, ExtremalityError, ParameterError
from bartnik.rotsym_core import (
    BRIDGE,
    PLAIN,
    RN_TAIL,
    RadialProfile,
    RNParams,
    RNSolution,
    area_charge_check,
    bridge_conditions,
    charged_hawking_profile,
    charged_hawking_values,
    concatenate,
    dec_margin,
    electric_field,
    hawking_mass_surface,
    minimal_bartnik_bound,
    penrose_bound,
    rn_profile,
    scalar_curvature,
    segment_ranges,
)


def test_horizon_radius():
    """Test r_+ = m + √(m² - Q²) and its inverse."""
    params = RNParams(1.0, 0.6)
    assert params.r_plus == pytest.approx(1.8, abs=1e-15)
    back = RNParams.from_horizon(1.8, 0.6)
    assert back.mass == pytest.approx(1.0, abs=1e-15)


def test_extremal_parameters_rejected():
    """Test that m <= |Q| raises ExtremalityError."""
    with pytest.raises(ExtremalityError):
        RNParams(0.5, 0.5)
    with pytest.raises(ExtremalityError):
        RNParams(0.5, -0.7)


def test_rn_profile_self_consistency():
    """Test zero DEC margin, R = 2Q²/u⁴ and constant mass on random RN."""
    rng = np.random.default_rng(11)
    for _ in range(10):
        mass = rng.uniform(0.5, 2.0)
        charge = rng.uniform(-0.9, 0.9) * mass
        params = RNParams(mass, charge)
        pr = rn_profile(params, 5.0, 1e-2)

        assert pr.f[0] == params.r_plus
        assert np.all(pr.segments == RN_TAIL)
        assert np.max(np.abs(dec_margin(pr))) < 1e-8
        assert np.allclose(
            scalar_curvature(pr), 2 * charge**2 / pr.f**4, atol=1e-8
        )
        assert np.allclose(charged_hawking_values(pr), mass, atol=1e-9)


def test_rn_first_integral():
    """Test u'² = 1 - 2m/u + Q²/u² along the solution."""
    sol = RNSolution(RNParams(1.0, 0.6), 10.0)
    s = np.linspace(0.0, 10.0, 1001)
    assert np.max(np.abs(sol.first_integral_residual(s))) <= 1e-10
    u, du, _ = sol.jet(s)
    assert np.all(np.diff(u) > 0)
    assert du[0] == pytest.approx(0.0, abs=1e-12)
    assert sol.s_at(3.0) == pytest.approx(
        s[np.argmin(np.abs(u - 3.0))], abs=1e-2
    )
    assert sol.u(sol.s_at(3.0)) == pytest.approx(3.0, abs=1e-12)


def test_rn_profile_matches_fixed_step():
    """Test the sampled profile against classical RK4 at the same step."""
    params = RNParams(1.0, 0.6)
    h = 1e-2
    pr = rn_profile(params, 5.0, h)

    def rhs(y):
        return np.array([y[1], (1.0 * y[0] - 0.36) / y[0] ** 3])

    y = np.array([params.r_plus, 0.0])
    fixed = [y[0]]
    for _ in range(pr.s.size - 1):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        fixed.append(y[0])

    assert np.allclose(np.diff(pr.s), h, atol=1e-12)
    assert np.allclose(pr.f, fixed, atol=1e-8)
    residual = pr.fprime**2 - (1.0 - 2.0 / pr.f + 0.36 / pr.f**2)
    assert np.max(np.abs(residual)) <= config.TOL_RN_RESIDUAL


def test_rn_profile_bad_arguments():
    """Test that non-positive extents are rejected."""
    with pytest.raises(ParameterError):
        rn_profile(RNParams(1.0, 0.0), 0.0, 1e-2)


def test_hawking_mass_between_nodes():
    """Test the interpolated charged Hawking mass on an RN profile."""
    pr = rn_profile(RNParams(1.0, 0.6), 4.0, 1e-2)
    assert charged_hawking_profile(pr, 0.1234) == pytest.approx(
        1.0, abs=1e-8
    )
    assert charged_hawking_profile(pr, pr.s[10]) == pytest.approx(
        1.0, abs=1e-9
    )


def test_electric_field_is_divergence_free():
    """Test that E = Q f⁻² ∂_s carries constant flux."""
    pr = rn_profile(RNParams(1.0, 0.6), 4.0, 1e-2)
    field = electric_field(pr)
    assert np.allclose(field.normal * pr.f**2, 0.6, atol=1e-14)
    assert np.max(np.abs(field.divergence)) < 1e-10


def test_from_samples_recovers_derivatives():
    """Test that spline derivatives of f = 1 + s² are exact."""
    s = np.linspace(0.0, 2.0, 41)
    pr = RadialProfile.from_samples(s, 1.0 + s**2, charge=0.0)

    assert np.allclose(pr.fprime, 2 * s, atol=1e-10)
    assert np.allclose(pr.fsecond, 2.0, atol=1e-9)
    assert np.all(pr.segments == PLAIN)


def test_profile_slicing_and_concatenation():
    """Test restrict, after, shifted and concatenate."""
    s = np.linspace(0.0, 1.0, 11)
    pr = RadialProfile.from_samples(s, 1.0 + s, charge=0.2)

    head = pr.restrict(0.0, 0.5)
    tail = pr.after(0.5)
    assert head.end == pytest.approx(0.5)
    assert tail.start > 0.5
    joined = concatenate(head, tail)
    assert np.array_equal(joined.s, pr.s)
    assert np.array_equal(joined.f, pr.f)
    assert pr.shifted(2.0).start == pytest.approx(2.0)
    assert pr.with_charge(0.5).charge == 0.5


def test_segment_ranges():
    """Test runs of equal segment tags."""
    tags = np.array([PLAIN, PLAIN, BRIDGE, BRIDGE, BRIDGE, RN_TAIL], object)
    assert segment_ranges(tags) == [(0, 2), (2, 5), (5, 6)]


def test_profile_validation():
    """Test that bad grids, values and dimensions are rejected."""
    s = np.array([0.0, 1.0, 0.5])
    z = np.zeros(3)
    tags = np.full(3, PLAIN, dtype=object)
    with pytest.raises(ParameterError):
        RadialProfile(s, np.ones(3), z, z, tags, 0.0)
    with pytest.raises(ParameterError):
        RadialProfile.from_samples(np.arange(4.0), -np.ones(4), 0.0)
    with pytest.raises(DimensionError):
        RadialProfile.from_samples(np.arange(4.0), np.ones(4), 0.0, dim=1)


def test_higher_dimension_has_no_hawking_mass():
    """Test that the charged Hawking mass needs n = 2."""
    pr = RadialProfile.from_samples(
        np.arange(5.0), np.arange(1.0, 6.0), 0.0, dim=3
    )
    with pytest.raises(DimensionError):
        charged_hawking_values(pr)


def test_bridge_conditions_arithmetic():
    """Test f = 1.5, f' = 0.9, Q = 0.3: 0.64 < 0.81 fails the slope bound."""
    res = bridge_conditions(1.5, 0.9, 0.3)
    assert res["radius_exceeds_charge"] is True
    assert res["slope_bound"] is False
    assert res["hawking_exceeds_charge"] is False

    assert all(bridge_conditions(2.0, 0.1, 0.3).values())


def test_slope_bound_equals_hawking_condition():
    """Test that the slope bound is m_H > |Q| in three dimensions."""
    rng = np.random.default_rng(3)
    for f, fp, q in rng.uniform([0.2, -1.5, -1.0], [3.0, 1.5, 1.0], (100, 3)):
        res = bridge_conditions(f, fp, q)
        assert res["slope_bound"] == res["hawking_exceeds_charge"]


def test_bounds_agree_on_round_spheres():
    """Test that the Penrose bound of a round sphere is r/2 + Q²/(2r)."""
    for r, q in [(1.0, 0.5), (2.0, 0.0), (0.7, 0.3)]:
        surface = 4 * np.pi * r**2
        expected = minimal_bartnik_bound(r, q)
        assert penrose_bound(surface, q) == pytest.approx(expected)
        assert hawking_mass_surface(surface, q, 0.0) == pytest.approx(
            expected
        )


def test_area_charge_check():
    """Test the strict and non-strict area-charge inequality."""
    assert area_charge_check(1.0, 0.5)
    assert not area_charge_check(1.0, 1.0)
    assert area_charge_check(1.0, -1.0, strict=False)
    assert not area_charge_check(1.0, 1.2, strict=False)
