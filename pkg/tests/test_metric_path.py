"""Test the conformal metric path and its normalization."""

import numpy as np
import pytest

from bartnik.errors import ParameterError
from bartnik.metric_path import (
    conformal_path,
    normalize_path,
    reparametrization,
    roundness_defect,
    verify_path_lambda,
)
from bartnik.sphere_geometry import (
    ConformalData,
    area,
    first_eigenpair,
    make_grid,
)


@pytest.fixture(scope="module")
def wavy_path():
    grid = make_grid(49)
    cd = ConformalData.normalized(grid, 0.2 * np.cos(2 * grid.theta), 1.0)
    raw = conformal_path(cd, 17)
    res = normalize_path(raw, theta_cut=0.75, source=cd.metric())
    return res


def test_reparametrization():
    """Test that η rises from 0 to 1 and is frozen after θ_cut."""
    t = np.linspace(0.0, 1.0, 101)
    eta = reparametrization(t, 0.75)

    assert eta[0] == 0.0
    assert np.all(eta[t >= 0.75] == 1.0)
    assert np.all(np.diff(eta) >= 0)


def test_reparametrization_bad_cut():
    """Test that θ_cut outside (0, 1) is rejected."""
    with pytest.raises(ParameterError):
        reparametrization(np.linspace(0, 1, 5), 1.0)


def test_conformal_path_needs_two_nodes():
    """Test that a single-node path is rejected."""
    grid = make_grid(33)
    cd = ConformalData.normalized(grid, np.zeros(grid.n), 1.0)
    with pytest.raises(ParameterError):
        conformal_path(cd, 1)


def test_lambda_along_conformal_path():
    """Test λ(t_k) > 0.9 min(λ₁(g₀), r_o⁻²) for random small exponents."""
    rng = np.random.default_rng(7)
    grid = make_grid(49)
    for _ in range(10):
        coeffs = rng.uniform(-1.0, 1.0, 3)
        w = sum(
            c * np.cos((k + 1) * grid.theta) for k, c in enumerate(coeffs)
        )
        w = 0.3 * w / np.max(np.abs(w))
        r_o = rng.uniform(0.5, 2.0)
        cd = ConformalData.normalized(grid, w, r_o)
        raw = conformal_path(cd, 9)
        lambda0 = first_eigenpair(raw.metrics[0]).value
        target = 0.9 * min(lambda0, r_o**-2)

        verdict = verify_path_lambda(raw, target)
        assert verdict.verdict, f"{coeffs=}, {r_o=}, {verdict.margin=}"


def test_normalized_path_keeps_area_form(wavy_path):
    """Test that q p is the same at every node."""
    source = wavy_path.metrics[0]
    for m in wavy_path.metrics:
        assert np.allclose(m.q * m.p, source.q * source.p, rtol=1e-12)
        assert area(m) == pytest.approx(4 * np.pi, rel=1e-9)


def test_normalized_path_freezes(wavy_path):
    """Test that nodes after θ_cut share the round end metric."""
    frozen = [
        m
        for tk, m in zip(wavy_path.t, wavy_path.metrics)
        if tk >= wavy_path.theta_cut
    ]
    assert len(frozen) > 1
    assert all(m is frozen[-1] for m in frozen)
    assert roundness_defect(frozen[-1], wavy_path.r_o) < 1e-6


def test_normalized_path_constants(wavy_path):
    """Test κ, α and β of the wavy path."""
    assert wavy_path.kappa == pytest.approx(np.min(wavy_path.lambdas))
    assert wavy_path.kappa > 0
    assert wavy_path.alpha > 0
    assert wavy_path.beta < 1.0
    assert wavy_path.lambdas[-1] == pytest.approx(1.0, abs=1e-6)


def test_round_path_is_trivial():
    """Test that round data gives κ = 1/r_o² and α = 0."""
    grid = make_grid(33)
    cd = ConformalData.normalized(grid, np.zeros(grid.n), 2.0)
    path = normalize_path(conformal_path(cd, 17), source=cd.metric())

    assert path.kappa == pytest.approx(0.25, abs=1e-8)
    assert path.alpha == pytest.approx(0.0, abs=1e-10)
    assert path.beta == pytest.approx(1.0, abs=1e-8)
