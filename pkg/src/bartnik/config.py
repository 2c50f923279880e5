"""Configuration constants and run-file models for the extension toolkit.

This module contains the tolerances and defaults used throughout the
construction, and the pydantic models a TOML run file is validated into.
"""

import tomllib
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, ValidationError, model_validator

from .errors import ConfigError

# ==== Grids ====

# Colatitude nodes on the slice sphere
NTHETA_MIN = 33
NTHETA_DEFAULT = 129
# Path parameter nodes on [0, 1]
NT_MIN = 17
NT_DEFAULT = 65
# Radial step for rotationally symmetric profiles
DS_DEFAULT = 1e-3
# Path freezes to the round metric from here on
THETA_CUT = 0.75

# ==== Tolerances ====

TOL_AREA = 1e-8
TOL_POLE = 1e-6
TOL_EIG = 1e-6
TOL_NORMALIZATION = 1e-9
TOL_STRICT = 1e-10
TOL_FLUX = 1e-9
TOL_FLUX_REPORT = 1e-8
TOL_MINIMAL = 1e-10
TOL_RN_RESIDUAL = 1e-10
TOL_MARGIN_FLOOR = 1e-9
TOL_JUNCTION = 1e-8
TOL_CONSISTENCY_F = 1e-8
TOL_CONSISTENCY_FPRIME = 1e-5
# DEC and Penrose slack when certifying the equality case
TOL_RIGIDITY = 1e-8
PATH_COHERENCE = 0.5

# ==== Searches ====

EPSILON_START = 0.5
HALVING_FLOOR = 1e-12
AMPLITUDE_SAFETY = 2.0
# Bend transition width in units of the bend length δ
BEND_WIDTH_FACTOR = 3.0
# σ' - 1 = BEND_GAIN ((s₀ - s)/ℓ)³ in front of the bend location
BEND_GAIN = 3e-3
# Minimum samples across a bent region
BEND_SAMPLES = 200
# Samples of the bridge slope ζ
BRIDGE_SAMPLES = 2049
# Gauss–Legendre nodes per smooth piece of a mollifier convolution
MOLLIFIER_NODES = 48
MAX_INVERSE_ITERATIONS = 500

# ==== Exit codes ====

EXIT_PASS = 0
EXIT_USAGE = 1
EXIT_ADMISSIBILITY = 2
EXIT_CONSTRUCTION = 3
EXIT_VERIFICATION = 4

# Significant digits for every serialized float
FLOAT_DIGITS = 17


class BartnikSection(BaseModel):
    """Boundary data of a run.

    Attributes:
        metric: How the boundary metric is given: a round sphere, a conformal
            factor over a round sphere, or a (q, p) metric file
        radius: Area radius for ``round`` and ``conformal`` metrics
        w_cos: Cosine coefficients of the conformal exponent w(θ)
        file: CSV file with ``theta,w`` or ``theta,q,p`` columns
        charge: Total charge Q_o carried by the boundary
    """

    metric: Literal["round", "conformal", "axisym"] = "round"
    radius: float = Field(default=1.0, gt=0)
    w_cos: List[float] = Field(default_factory=list)
    file: Optional[Path] = None
    charge: float = 0.0

    @model_validator(mode="after")
    def _needs_source(self) -> "BartnikSection":
        if self.metric == "axisym" and self.file is None:
            raise ValueError("metric = 'axisym' requires a file")
        return self


class TargetSection(BaseModel):
    """Requested ADM mass of the extension."""

    mass: float = Field(gt=0)


class GridSection(BaseModel):
    """Discretization sizes."""

    ntheta: int = Field(default=NTHETA_DEFAULT, ge=NTHETA_MIN)
    nt: int = Field(default=NT_DEFAULT, ge=NT_MIN)
    ds: float = Field(default=DS_DEFAULT, gt=0)
    theta_cut: float = Field(default=THETA_CUT, gt=0, lt=1)


class ToleranceSection(BaseModel):
    """Overridable verification tolerances."""

    eig: float = TOL_EIG
    flux: float = TOL_FLUX_REPORT
    junction: float = TOL_JUNCTION


class RunConfig(BaseModel):
    """A complete run file.

    Attributes:
        name: Run name, slugified into the output directory name
        bartnik: Boundary data
        target: Requested mass
        grid: Discretization
        tolerances: Verification tolerances
    """

    name: str = "extension"
    bartnik: BartnikSection = Field(default_factory=BartnikSection)
    target: TargetSection
    grid: GridSection = Field(default_factory=GridSection)
    tolerances: ToleranceSection = Field(default_factory=ToleranceSection)


def load_run_config(path: Path) -> RunConfig:
    """Read and validate a TOML run file.

    Relative metric file paths are resolved against the run file's folder.

    Raises:
        ConfigError: If the file is missing, not TOML, or fails validation
    """
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}", stage="config")
    try:
        with path.open("rb") as f:
            raw = tomllib.load(f)
        res = RunConfig.model_validate(raw)
    except (tomllib.TOMLDecodeError, ValidationError) as e:
        raise ConfigError(f"Invalid config {path}: {e}", stage="config")
    if res.bartnik.file is not None and not res.bartnik.file.is_absolute():
        res.bartnik.file = path.parent / res.bartnik.file
    return res
