"""CSV and JSON dumps of metrics, paths, profiles and extensions.

Every float in a CSV is written with 17 significant digits; JSON floats use
their round-trip representation. An extension dump holds ``collar.csv``,
``slices.csv``, ``profile.csv``, ``junctions.json``, ``report.json`` and a
``manifest.json`` with the scalars ``read_extension`` needs.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd
from slugify import slugify

from . import config
from .errors import ConfigError, GridMismatchError
from .metric_path import MetricPath, path_constants, path_eigenpairs
from .pipeline import Extension, ExtensionFields, collar_slices
from .rotsym_core import (
    RadialProfile,
    charged_hawking_values,
    dec_margin,
    electric_field,
    scalar_curvature,
)
from .sphere_geometry import AxisymMetric, ConformalData, PolarGrid

FLOAT_FORMAT = f"%.{config.FLOAT_DIGITS}g"


def run_directory(out_dir: Path, name: str) -> Path:
    """``out_dir/<slug of name>``, created if missing."""
    res = Path(out_dir) / slugify(name)
    res.mkdir(parents=True, exist_ok=True)
    return res


def plain(obj: Any) -> Any:
    """Recursively convert numpy scalars, arrays and paths for JSON."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(obj: Any, path: Path) -> Path:
    path.write_text(json.dumps(plain(obj), indent=2, ensure_ascii=False))
    return path


def read_json(path: Path) -> Dict[str, Any]:
    if not path.exists():
        raise ConfigError(f"File not found: {path}", stage="io")
    return json.loads(path.read_text())


def _write_frame(df: pd.DataFrame, path: Path) -> Path:
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def _read_frame(path: Path, columns: List[str]) -> pd.DataFrame:
    if not Path(path).exists():
        raise ConfigError(f"File not found: {path}", stage="io")
    df = pd.read_csv(path, float_precision="round_trip")
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise ConfigError(f"{path} lacks columns {missing}", stage="io")
    return df


# ==== Metrics ====


def write_metric_csv(m: AxisymMetric, path: Path) -> Path:
    df = pd.DataFrame({"theta": m.grid.theta, "q": m.q, "p": m.p})
    return _write_frame(df, path)


def write_conformal_csv(cd: ConformalData, path: Path) -> Path:
    """``theta,w`` samples plus a ``<stem>.json`` sidecar holding r_o."""
    df = pd.DataFrame({"theta": cd.grid.theta, "w": cd.w})
    write_json({"r_o": cd.r_o}, path.with_suffix(".json"))
    return _write_frame(df, path)


def read_metric_csv(
    path: Path, grid: PolarGrid, radius: float = 1.0
) -> Union[AxisymMetric, ConformalData]:
    """Metric samples on ``grid`` from ``theta,q,p`` or ``theta,w`` columns.

    Raises:
        ConfigError: If the file or its columns are missing
        GridMismatchError: If the colatitudes are not the grid's nodes
    """
    df = _read_frame(path, ["theta"])
    theta = df["theta"].to_numpy(dtype=float)
    if theta.shape != grid.theta.shape or not np.allclose(
        theta, grid.theta, rtol=0.0, atol=1e-12
    ):
        raise GridMismatchError(
            f"{path} is not sampled on the {grid.n}-node polar grid",
            stage="io",
            details={"rows": int(theta.size), "ntheta": grid.n},
        )
    if "w" in df.columns:
        sidecar = Path(path).with_suffix(".json")
        r_o = read_json(sidecar)["r_o"] if sidecar.exists() else radius
        return ConformalData.normalized(
            grid, df["w"].to_numpy(dtype=float), float(r_o)
        )
    df = _read_frame(path, ["theta", "q", "p"])
    res = AxisymMetric(
        grid, df["q"].to_numpy(dtype=float), df["p"].to_numpy(dtype=float)
    )
    return res


# ==== Paths ====


def write_path(path: MetricPath, out_dir: Path) -> Path:
    """One metric CSV per node and a ``manifest.json``."""
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    for k, m in enumerate(path.metrics):
        name = f"node_{k:03d}.csv"
        write_metric_csv(m, out_dir / name)
        files.append(name)
    manifest = {
        "t": path.t,
        "lambdas": path.lambdas,
        "kappa": path.kappa,
        "alpha": path.alpha,
        "beta": path.beta,
        "theta_cut": path.theta_cut,
        "r_o": path.r_o,
        "round_map": path.round_map,
        "files": files,
    }
    return write_json(manifest, out_dir / "manifest.json")


def read_path(out_dir: Path, grid: PolarGrid) -> MetricPath:
    """Reload a path dump; eigenpairs and constants are recomputed."""
    manifest = read_json(out_dir / "manifest.json")
    metrics: List[AxisymMetric] = []
    for name in manifest["files"]:
        m = read_metric_csv(out_dir / name, grid)
        # identical nodes share one object, as in a freshly built path
        if metrics and np.array_equal(m.q, metrics[-1].q) and np.array_equal(
            m.p, metrics[-1].p
        ):
            m = metrics[-1]
        metrics.append(m)
    eigen = path_eigenpairs(metrics)
    draft = MetricPath(
        t=np.asarray(manifest["t"], dtype=float),
        metrics=metrics,
        theta_cut=float(manifest["theta_cut"]),
        eigen=eigen,
        kappa=0.0,
        alpha=0.0,
        beta=0.0,
        r_o=float(manifest["r_o"]),
        round_map=np.asarray(manifest["round_map"], dtype=float),
    )
    kappa, alpha, beta = path_constants(draft)
    res = MetricPath(
        t=draft.t,
        metrics=metrics,
        theta_cut=draft.theta_cut,
        eigen=eigen,
        kappa=kappa,
        alpha=alpha,
        beta=beta,
        r_o=draft.r_o,
        round_map=draft.round_map,
    )
    return res


# ==== Profiles ====

PROFILE_COLUMNS = [
    "segment",
    "s",
    "f",
    "fprime",
    "fsecond",
    "R",
    "E2",
    "margin",
    "mH_CH",
    "Qflux",
]


def profile_frame(pr: RadialProfile) -> pd.DataFrame:
    field = electric_field(pr)
    mass = (
        charged_hawking_values(pr)
        if pr.dim == 2
        else np.full(pr.s.size, np.nan)
    )
    res = pd.DataFrame(
        {
            "segment": pr.segments,
            "s": pr.s,
            "f": pr.f,
            "fprime": pr.fprime,
            "fsecond": pr.fsecond,
            "R": scalar_curvature(pr),
            "E2": field.norm_sq,
            "margin": dec_margin(pr),
            "mH_CH": mass,
            "Qflux": field.normal * pr.f**pr.dim,
        }
    )
    return res[PROFILE_COLUMNS]


def write_profile_csv(pr: RadialProfile, path: Path) -> Path:
    return _write_frame(profile_frame(pr), path)


def read_profile_csv(path: Path, charge: float, dim: int = 2) -> RadialProfile:
    df = _read_frame(path, ["segment", "s", "f", "fprime", "fsecond"])
    res = RadialProfile(
        df["s"].to_numpy(dtype=float),
        df["f"].to_numpy(dtype=float),
        df["fprime"].to_numpy(dtype=float),
        df["fsecond"].to_numpy(dtype=float),
        df["segment"].to_numpy(dtype=object),
        float(charge),
        dim,
    )
    return res


# ==== Collars and extensions ====

COLLAR_COLUMNS = ["t", "theta", "v", "q", "p", "F", "dF", "d2F"]


def collar_frame(
    fields: ExtensionFields,
    margin: Optional[np.ndarray] = None,
) -> pd.DataFrame:
    """Long format collar samples, one row per (t_k, θ_i)."""
    n_t, n_theta = fields.v.shape
    f, fp, fpp = (np.repeat(x, n_theta) for x in fields.neck)
    res = pd.DataFrame(
        {
            "t": np.repeat(fields.t, n_theta),
            "theta": np.tile(fields.theta, n_t),
            "v": fields.v.ravel(),
            "q": fields.q.ravel(),
            "p": fields.p.ravel(),
            "F": f,
            "dF": fp,
            "d2F": fpp,
        }
    )
    if margin is not None:
        res["margin"] = margin.ravel()
    res["H"] = 2.0 * fp / (res["v"].to_numpy() * f)
    return res


def slices_frame(fields: ExtensionFields) -> pd.DataFrame:
    res = pd.DataFrame(collar_slices(fields)).rename(
        columns={"mass": "mH_CH", "h_min": "Hmin", "h_max": "Hmax"}
    )
    return res[["t", "area", "mH_CH", "flux", "Hmin", "Hmax"]]


def write_collar(
    fields: ExtensionFields,
    out_dir: Path,
    margin: Optional[np.ndarray] = None,
) -> Dict[str, Path]:
    """``collar.csv`` and ``slices.csv`` of a collar."""
    out_dir.mkdir(parents=True, exist_ok=True)
    res = {
        "collar": _write_frame(
            collar_frame(fields, margin), out_dir / "collar.csv"
        ),
        "slices": _write_frame(slices_frame(fields), out_dir / "slices.csv"),
    }
    return res


def write_extension(
    ext: Extension,
    report: Dict[str, Any],
    out_dir: Path,
    margin: Optional[np.ndarray] = None,
) -> Dict[str, Path]:
    """Dump an extension and its report into ``out_dir``."""
    fields = ext.fields()
    res = {
        **write_collar(fields, out_dir, margin),
        "profile": write_profile_csv(ext.profile, out_dir / "profile.csv"),
        "junctions": write_json(ext.junctions(), out_dir / "junctions.json"),
        "gate": write_json(ext.gate, out_dir / "gate.json"),
        "report": write_json(report, out_dir / "report.json"),
        "manifest": write_json(
            {
                "mass": fields.mass,
                "charge": fields.charge,
                "theta_cut": fields.theta_cut,
                "nt": int(fields.t.size),
                "ntheta": int(fields.theta.size),
            },
            out_dir / "manifest.json",
        ),
    }
    return res


def read_extension(out_dir: Path) -> ExtensionFields:
    """Raw extension arrays from a dump written by ``write_extension``.

    Raises:
        ConfigError: If a file or column is missing
        GridMismatchError: If the collar rows do not form a (t, θ) grid
    """
    manifest = read_json(out_dir / "manifest.json")
    df = _read_frame(out_dir / "collar.csv", COLLAR_COLUMNS)
    df = df.sort_values(["t", "theta"], kind="stable")
    n_t, n_theta = int(manifest["nt"]), int(manifest["ntheta"])
    if len(df) != n_t * n_theta:
        raise GridMismatchError(
            f"collar.csv has {len(df)} rows, expected {n_t}×{n_theta}",
            stage="io",
        )

    def grid_of(column: str) -> np.ndarray:
        return df[column].to_numpy(dtype=float).reshape(n_t, n_theta)

    neck = tuple(grid_of(c)[:, 0] for c in ("F", "dF", "d2F"))
    res = ExtensionFields(
        t=grid_of("t")[:, 0],
        theta=grid_of("theta")[0],
        v=grid_of("v"),
        q=grid_of("q"),
        p=grid_of("p"),
        neck=neck,
        theta_cut=float(manifest["theta_cut"]),
        profile=read_profile_csv(
            out_dir / "profile.csv", float(manifest["charge"])
        ),
        mass=float(manifest["mass"]),
        charge=float(manifest["charge"]),
    )
    return res
