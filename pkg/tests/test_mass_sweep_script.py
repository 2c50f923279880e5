"""
Tests for the mass-sweep.py script.

The script is loaded from its file; builds are mocked so that only the sweep
logic and the summary table are exercised.
"""

import importlib.util
from pathlib import Path
from unittest.mock import patch

import pandas as pd
import pytest

from bartnik.errors import EpsilonSearchError

SCRIPT = Path(__file__).parent.parent / "scripts" / "mass-sweep.py"


@pytest.fixture(scope="module")
def sweep():
    spec = importlib.util.spec_from_file_location("mass_sweep", SCRIPT)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


@pytest.fixture
def run_file(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(
        'name = "Sweep Me"\n'
        "[bartnik]\ncharge = 0.5\n"
        "[target]\nmass = 0.7\n"
        "[grid]\nntheta = 33\nnt = 17\n"
    )
    return path


def test_sweep_masses(sweep):
    """Test masses approaching the bound tenfold per step."""
    masses = sweep.sweep_masses(0.625, 3)
    assert masses == pytest.approx([0.6875, 0.63125, 0.625625])


def test_dry_run(sweep, run_file, capsys):
    """Test that a dry run lists the masses without building."""
    argv = ["mass-sweep.py", "--config", str(run_file), "--dry-run"]
    with patch("sys.argv", argv), patch.object(
        sweep, "build_extension"
    ) as mock_build:
        sweep.main()
    out = capsys.readouterr().out
    assert "DRY RUN" in out
    assert out.count("Would build") == 3
    mock_build.assert_not_called()


def test_failed_masses_are_tabulated(sweep, run_file, tmp_path):
    """Test that construction failures end up in sweep.csv and exit 4."""
    argv = [
        "mass-sweep.py",
        "--config",
        str(run_file),
        "--steps",
        "2",
        "--out-dir",
        str(tmp_path / "out"),
    ]
    err = EpsilonSearchError("no neck", stage="collar")
    with patch("sys.argv", argv), patch.object(
        sweep, "build_extension", side_effect=err
    ):
        with pytest.raises(SystemExit) as exit_info:
            sweep.main()
    assert exit_info.value.code == 4

    table = pd.read_csv(tmp_path / "out" / "sweep-me-sweep" / "sweep.csv")
    assert len(table) == 2
    assert not table["passed"].any()
