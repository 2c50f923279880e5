"""Test CSV and JSON dumps."""

import json

import numpy as np
import pandas as pd
import pytest

from bartnik.errors import ConfigError, GridMismatchError
from bartnik.exporters import (
    COLLAR_COLUMNS,
    PROFILE_COLUMNS,
    plain,
    read_extension,
    read_json,
    read_metric_csv,
    read_path,
    read_profile_csv,
    run_directory,
    write_conformal_csv,
    write_extension,
    write_metric_csv,
    write_path,
    write_profile_csv,
)
from bartnik.pipeline import build_extension, round_data, verify_fields
from bartnik.rotsym_core import RNParams, rn_profile
from bartnik.sphere_geometry import (
    ConformalData,
    conformal_metric,
    make_grid,
)


@pytest.fixture(scope="module")
def small_run():
    data = round_data(1.0, 0.5, 0.7, 33)
    return build_extension(data, nt=17, ds=1e-3, verbose=False)


def test_run_directory(tmp_path):
    """Test that run names are slugified into created folders."""
    out = run_directory(tmp_path, "Round Q 0.5")
    assert out == tmp_path / "round-q-0-5"
    assert out.is_dir()


def test_plain_converts_numpy():
    """Test JSON conversion of numpy scalars, arrays and paths."""
    obj = {
        "a": np.float64(0.1),
        "b": np.arange(3),
        "c": np.bool_(True),
        "d": (np.int64(2), "x"),
    }
    res = plain(obj)
    assert json.loads(json.dumps(res)) == {
        "a": 0.1,
        "b": [0, 1, 2],
        "c": True,
        "d": [2, "x"],
    }


def test_read_json_missing(tmp_path):
    """Test that a missing JSON file raises ConfigError."""
    with pytest.raises(ConfigError):
        read_json(tmp_path / "absent.json")


def test_metric_csv_round_trip(tmp_path):
    """Test that q and p survive a CSV dump bit for bit."""
    grid = make_grid(33)
    m = conformal_metric(grid, 0.1 * np.cos(2 * grid.theta), 1.2)
    path = write_metric_csv(m, tmp_path / "metric.csv")
    back = read_metric_csv(path, grid)

    assert np.array_equal(back.q, m.q)
    assert np.array_equal(back.p, m.p)


def test_metric_csv_wrong_grid(tmp_path):
    """Test that samples from another grid are rejected."""
    m = conformal_metric(make_grid(33), np.zeros(33), 1.0)
    path = write_metric_csv(m, tmp_path / "metric.csv")
    with pytest.raises(GridMismatchError):
        read_metric_csv(path, make_grid(65))


def test_conformal_csv_keeps_radius(tmp_path):
    """Test that the r_o sidecar is read back."""
    grid = make_grid(33)
    cd = ConformalData.normalized(grid, 0.2 * np.cos(grid.theta), 1.7)
    path = write_conformal_csv(cd, tmp_path / "w.csv")
    back = read_metric_csv(path, grid)

    assert isinstance(back, ConformalData)
    assert back.r_o == 1.7
    assert np.allclose(back.w, cd.w, atol=1e-15)


def test_missing_columns(tmp_path):
    """Test that a CSV without the needed columns raises ConfigError."""
    path = tmp_path / "bad.csv"
    pd.DataFrame({"x": [1.0]}).to_csv(path, index=False)
    with pytest.raises(ConfigError):
        read_profile_csv(path, 0.0)


def test_profile_csv_round_trip(tmp_path):
    """Test the profile dump and its derived columns."""
    pr = rn_profile(RNParams(1.0, 0.6), 2.0, 1e-2)
    path = write_profile_csv(pr, tmp_path / "profile.csv")
    df = pd.read_csv(path)
    back = read_profile_csv(path, 0.6)

    assert list(df.columns) == PROFILE_COLUMNS
    assert np.allclose(df["mH_CH"], 1.0, atol=1e-9)
    assert np.allclose(df["Qflux"], 0.6, atol=1e-14)
    assert np.array_equal(back.f, pr.f)
    assert np.array_equal(back.segments, pr.segments)


def test_path_round_trip(small_run, tmp_path):
    """Test that a reloaded path reproduces κ, α and β."""
    ext, _ = small_run
    path = ext.collar.path
    write_path(path, tmp_path / "path")
    back = read_path(tmp_path / "path", path.grid)

    assert back.kappa == pytest.approx(path.kappa, abs=1e-12)
    assert back.alpha == pytest.approx(path.alpha, abs=1e-12)
    assert back.theta_cut == path.theta_cut
    assert np.array_equal(back.round_map, path.round_map)


def test_extension_dump_verifies(small_run, tmp_path):
    """Test that a dumped extension re-verifies with the same flags."""
    ext, report = small_run
    files = write_extension(ext, report, tmp_path)
    assert set(files) == {
        "collar",
        "slices",
        "profile",
        "junctions",
        "gate",
        "report",
        "manifest",
    }
    collar = pd.read_csv(files["collar"])
    assert COLLAR_COLUMNS + ["H"] == list(collar.columns)
    assert len(collar) == 17 * 33

    fields = read_extension(tmp_path)
    again = verify_fields(fields)
    assert again["flags"] == report["flags"]
    assert again["gap"] == pytest.approx(report["gap"], abs=1e-12)
    assert again["min_margin_profile"] == report["min_margin_profile"]
    assert np.array_equal(fields.profile.f, ext.profile.f)
    assert np.array_equal(fields.profile.fsecond, ext.profile.fsecond)
    assert np.array_equal(fields.v, ext.fields().v)


def test_truncated_dump(small_run, tmp_path):
    """Test that a collar with missing rows is rejected."""
    ext, report = small_run
    files = write_extension(ext, report, tmp_path)
    collar = pd.read_csv(files["collar"])
    collar.iloc[:-1].to_csv(files["collar"], index=False)
    with pytest.raises(GridMismatchError):
        read_extension(tmp_path)
