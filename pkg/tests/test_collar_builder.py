"""Test charged collars over normalized metric paths."""

from dataclasses import replace

import numpy as np
import pytest

from bartnik.collar_builder import (
    assemble_collar,
    closed_slice_mass,
    collar_dec_field,
    collar_diagonal,
    collar_margin_fields,
    collar_neck_profile,
    eigen_path,
    field_divergence,
    margin_lower_bound,
    neck_factor,
    scalar_curvature_diagonal,
    select_amplitude,
    select_epsilon,
    selection_report,
    slice_diagnostics,
)
from bartnik.errors import (
    AdmissibilityError,
    CollarDECError,
    EpsilonSearchError,
    NeckError,
    PathCoherenceError,
)
from bartnik.metric_path import conformal_path, normalize_path
from bartnik.rotsym_core import NECK, charged_hawking_values, dec_margin
from bartnik.sphere_geometry import (
    ConformalData,
    EigenPair,
    ScalarField,
    make_grid,
)

CHARGE = 0.5
MASS = 0.7


def make_path(ntheta, nt, w_scale=0.0, theta_cut=0.75):
    grid = make_grid(ntheta)
    w = w_scale * np.cos(2 * grid.theta)
    cd = ConformalData.normalized(grid, w, 1.0)
    res = normalize_path(conformal_path(cd, nt), theta_cut, cd.metric())
    return res


@pytest.fixture(scope="module")
def round_block():
    path = make_path(33, 17)
    eig = eigen_path(path)
    amplitude = select_amplitude(
        eig, CHARGE, path.alpha, path.kappa, path.r_o
    )
    eps, masses = select_epsilon(
        MASS, amplitude, float(eig.u[-1].mean()), path.r_o, CHARGE
    )
    block = assemble_collar(path, eig, amplitude, eps, CHARGE)
    return block, masses


def test_neck_factor():
    """Test F = (1 + εt²)^{1/2} and its derivatives."""
    t = np.array([0.0, 0.5, 1.0])
    f, fp, fpp = neck_factor(t, 0.5)
    assert np.allclose(f, np.sqrt(1 + 0.5 * t**2))
    assert np.allclose(fp, 0.5 * t / f)
    assert fpp[0] == pytest.approx(0.5)


class TestRoundCollarLogic:
    """Test the collar over a round sphere of radius 1 with Q = 0.5."""

    def test_amplitude(self, round_block):
        """Test A² = 16π/0.75 and A²u² = 16/3."""
        block, _ = round_block
        assert block.eigen.inf_u2 == pytest.approx(1 / (4 * np.pi), rel=1e-9)
        assert block.amplitude == pytest.approx(
            np.sqrt(16 * np.pi / 0.75), rel=1e-6
        )
        assert block.amplitude**2 * block.u_end**2 == pytest.approx(
            16 / 3, rel=1e-6
        )

    def test_epsilon_and_masses(self, round_block):
        """Test that ε = 0.5 is accepted with masses 0.625 and 0.6953."""
        block, masses = round_block
        assert block.epsilon == 0.5
        assert masses["mass_start"] == pytest.approx(0.625, abs=1e-12)
        assert masses["mass_end"] == pytest.approx(0.695298, abs=1e-5)
        assert closed_slice_mass(block, -1) == pytest.approx(
            masses["mass_end"], abs=1e-12
        )

    def test_margin_at_boundary(self, round_block):
        """Test the DEC margin 2 - 0.375 - 0.5 = 1.125 at t = 0."""
        block, _ = round_block
        margin = collar_dec_field(block)
        assert np.allclose(margin[0], 1.125, atol=1e-6)
        assert np.all(margin > 0)

    def test_margin_above_lower_bound(self, round_block):
        """Test that the margin dominates its lower bound, 0.75 at t = 0."""
        block, _ = round_block
        margin = collar_dec_field(block)
        bound = margin_lower_bound(block, block.path.alpha)
        assert np.allclose(bound[0], 0.75, atol=1e-6)
        assert np.all(margin >= bound - 1e-9)

    def test_field_is_divergence_free(self, round_block):
        """Test div E = 0 on the collar."""
        block, _ = round_block
        assert field_divergence(block) < 1e-10

    def test_boundary_slice(self, round_block):
        """Test that Σ₀ is minimal with mass r/2 + Q²/(2r) and flux Q."""
        block, masses = round_block
        diag = slice_diagnostics(block, 0).diagnostics
        assert diag["area"] == pytest.approx(4 * np.pi, rel=1e-10)
        assert diag["h_max"] == pytest.approx(0.0, abs=1e-15)
        assert diag["mass"] == pytest.approx(masses["mass_start"], abs=1e-9)
        assert diag["flux"] == pytest.approx(CHARGE, abs=1e-12)

    def test_outer_slice(self, round_block):
        """Test that the integrated mass of Σ₁ matches the closed form."""
        block, masses = round_block
        fields = slice_diagnostics(block, -1)
        assert np.all(fields.h > 0)
        assert fields.diagnostics["mass"] == pytest.approx(
            masses["mass_end"], abs=1e-9
        )
        assert fields.diagnostics["flux"] == pytest.approx(CHARGE, abs=1e-12)

    def test_neck_profile(self, round_block):
        """Test the frozen part written as a rotationally symmetric neck."""
        block, masses = round_block
        pr = collar_neck_profile(block, ds=1e-3)
        scale = block.amplitude * block.u_end

        assert np.all(pr.segments == NECK)
        assert pr.start == pytest.approx(0.75 * scale)
        assert pr.end == pytest.approx(scale)
        assert pr.f[-1] == pytest.approx(np.sqrt(1.5))
        assert np.min(dec_margin(pr)) > 0
        assert charged_hawking_values(pr)[-1] == pytest.approx(
            masses["mass_end"], abs=1e-9
        )

    def test_selection_report(self, round_block):
        """Test that all three neck conditions hold."""
        block, masses = round_block
        report = selection_report(block, masses, MASS)
        assert all(report["conditions"].values())
        assert report["beta"] == pytest.approx(1.0, abs=1e-8)


def test_amplitude_needs_spare_eigenvalue(round_block):
    """Test that κ <= Q²/r_o⁴ raises AdmissibilityError."""
    block, _ = round_block
    with pytest.raises(AdmissibilityError):
        select_amplitude(block.eigen, 1.0, 0.0, 1.0, 1.0)


def test_epsilon_search_fails_below_boundary_mass(round_block):
    """Test that a mass below the boundary mass admits no neck."""
    block, _ = round_block
    with pytest.raises(EpsilonSearchError):
        select_epsilon(0.6, block.amplitude, block.u_end, 1.0, CHARGE)


def test_small_amplitude_breaks_dec(round_block):
    """Test that 0.4 A makes the margin negative."""
    block, _ = round_block
    weak = assemble_collar(
        block.path, block.eigen, 0.4 * block.amplitude, 0.5, CHARGE
    )
    with pytest.raises(CollarDECError) as err:
        collar_dec_field(weak)
    assert err.value.details["margin"] < 0
    assert len(err.value.location) == 2


def test_incoherent_eigenfunctions(round_block):
    """Test that a jump between successive eigenfunctions is detected."""
    block, _ = round_block
    path = block.path
    last = path.eigen[-1]
    bumped = EigenPair(
        last.value,
        ScalarField(path.grid, 3.0 * last.function.values),
        last.residual,
    )
    broken = replace(path, eigen=[*path.eigen[:-1], bumped])
    with pytest.raises(PathCoherenceError):
        eigen_path(broken)


def test_neck_requires_round_frozen_slices():
    """Test that a cut before the path is round raises NeckError."""
    path = make_path(33, 17, w_scale=0.2)
    eig = eigen_path(path)
    early = replace(path, theta_cut=0.25)
    block = assemble_collar(early, eig, 10.0, 0.1, 0.0)
    with pytest.raises(NeckError):
        collar_neck_profile(block)


def curvature_error(ntheta, nt):
    """max |R_spectral - R_differences| over an interior band."""
    path = make_path(ntheta, nt, w_scale=0.2)
    eig = eigen_path(path)
    block = assemble_collar(path, eig, 10.0, 0.5, CHARGE)
    f = block.neck[0][:, None]
    spectral = collar_margin_fields(
        block.t, path.metrics, block.v, block.neck, CHARGE, 1.0
    ) + 2 * CHARGE**2 / f**4
    theta = path.grid.theta
    direct = scalar_curvature_diagonal(
        block.t, theta, collar_diagonal(block)
    )
    band = (theta > np.pi / 4) & (theta < 3 * np.pi / 4)
    inner = slice(2, nt - 2)
    return float(np.max(np.abs(spectral - direct)[inner][:, band]))


def test_curvature_two_routes_converge():
    """Test that spectral and finite-difference curvature agree on refining."""
    coarse = curvature_error(65, 33)
    fine = curvature_error(129, 65)
    assert fine < 0.5 * coarse
