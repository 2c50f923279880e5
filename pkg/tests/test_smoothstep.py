"""Test the C^∞ transition functions."""

import numpy as np

from bartnik.smoothstep import smoothstep, smoothstep_jet


def test_smoothstep_limits_and_symmetry():
    """Test that S is 0 below 0, 1 above 1 and satisfies S(x) + S(1-x) = 1."""
    x = np.linspace(-0.5, 1.5, 401)
    s = smoothstep(x)

    assert np.all(s[x <= 0] == 0.0)
    assert np.all(s[x >= 1] == 1.0)
    assert np.allclose(s + smoothstep(1.0 - x), 1.0, atol=1e-14)
    assert np.all(np.diff(s) >= 0)
    assert smoothstep(0.5) == 0.5


def test_smoothstep_jet_matches_differences():
    """Test S' and S'' against centered differences."""
    x = np.linspace(0.05, 0.95, 181)
    h = 1e-5
    _, d1, d2 = smoothstep_jet(x)

    fd1 = (smoothstep(x + h) - smoothstep(x - h)) / (2 * h)
    fd2 = (smoothstep(x + h) - 2 * smoothstep(x) + smoothstep(x - h)) / h**2
    assert np.allclose(d1, fd1, atol=1e-8)
    assert np.allclose(d2, fd2, atol=1e-4)


def test_smoothstep_jet_is_flat_outside():
    """Test that all derivatives vanish outside (0, 1)."""
    value, d1, d2 = smoothstep_jet(np.array([-1.0, 0.0, 1.0, 2.0]))
    assert np.array_equal(value, [0.0, 0.0, 1.0, 1.0])
    assert np.all(d1 == 0.0)
    assert np.all(d2 == 0.0)
