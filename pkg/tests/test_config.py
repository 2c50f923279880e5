"""Test configuration module functionality."""

import pytest

from bartnik import config
from bartnik.config import RunConfig, load_run_config
from bartnik.errors import ConfigError


def test_grid_defaults():
    """Test that grid defaults respect their minimums."""
    assert config.NTHETA_DEFAULT >= config.NTHETA_MIN
    assert config.NT_DEFAULT >= config.NT_MIN
    assert 0 < config.THETA_CUT < 1
    assert config.DS_DEFAULT > 0


def test_exit_codes_are_distinct():
    """Test that every outcome has its own exit code."""
    codes = [
        config.EXIT_PASS,
        config.EXIT_USAGE,
        config.EXIT_ADMISSIBILITY,
        config.EXIT_CONSTRUCTION,
        config.EXIT_VERIFICATION,
    ]
    assert codes == [0, 1, 2, 3, 4]


def test_search_constants():
    """Test the neck and bend search constants."""
    assert config.EPSILON_START == 0.5
    assert config.AMPLITUDE_SAFETY == 2.0
    assert config.BEND_WIDTH_FACTOR > 1
    assert 0 < config.BEND_GAIN < 1e-2


def test_load_run_config(tmp_path):
    """Test reading a complete run file."""
    path = tmp_path / "run.toml"
    path.write_text(
        'name = "Round Q 0.5"\n'
        "[bartnik]\n"
        'metric = "round"\n'
        "radius = 1.0\n"
        "charge = 0.5\n"
        "[target]\n"
        "mass = 0.7\n"
        "[grid]\n"
        "ntheta = 65\n"
    )
    cfg = load_run_config(path)

    assert isinstance(cfg, RunConfig)
    assert cfg.name == "Round Q 0.5"
    assert cfg.bartnik.charge == 0.5
    assert cfg.target.mass == 0.7
    assert cfg.grid.ntheta == 65
    assert cfg.grid.nt == config.NT_DEFAULT
    assert cfg.tolerances.junction == config.TOL_JUNCTION


def test_relative_metric_file_is_resolved(tmp_path):
    """Test that metric files are resolved against the run file's folder."""
    path = tmp_path / "run.toml"
    path.write_text(
        '[bartnik]\nmetric = "axisym"\nfile = "g.csv"\n[target]\nmass = 1.0\n'
    )
    cfg = load_run_config(path)
    assert cfg.bartnik.file == tmp_path / "g.csv"


def test_missing_config_file(tmp_path):
    """Test that a missing run file raises ConfigError."""
    with pytest.raises(ConfigError):
        load_run_config(tmp_path / "absent.toml")


def test_invalid_config_values(tmp_path):
    """Test that validation failures raise ConfigError."""
    path = tmp_path / "bad.toml"
    path.write_text("[target]\nmass = -1.0\n")
    with pytest.raises(ConfigError):
        load_run_config(path)

    path.write_text('[bartnik]\nmetric = "axisym"\n[target]\nmass = 1.0\n')
    with pytest.raises(ConfigError):
        load_run_config(path)

    path.write_text("not toml [")
    with pytest.raises(ConfigError) as err:
        load_run_config(path)
    assert err.value.exit_code == config.EXIT_USAGE
