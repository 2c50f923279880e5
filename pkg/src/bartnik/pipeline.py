"""End-to-end construction and certification of charged extensions.

Bartnik data (a minimal 2-sphere with charge) goes through the normalized
path, the collar and its neck, and is glued to a Reissner–Nordström exterior
of the requested mass. ``verify_extension`` recomputes every certificate from
the raw arrays an extension is made of, so the same check runs on dumps.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydash import py_

from . import config
from .collar_builder import (
    CollarBlock,
    assemble_collar,
    collar_dec_field,
    collar_margin_fields,
    collar_neck_profile,
    eigen_path,
    select_amplitude,
    select_epsilon,
    selection_report,
    slice_geometry,
)
from .config import RunConfig, ToleranceSection
from .data_types.construction import AttachmentReport, SelectionReport
from .data_types.report import ExtensionReport, GateReport, SliceDiagnostics
from .errors import AdmissibilityError, GridMismatchError, ParameterError
from .glue_bend import glue_to_rn
from .metric_path import MetricPath, conformal_path, normalize_path
from .rotsym_core import (
    BENT_RN,
    BRIDGE,
    NECK,
    RN_TAIL,
    RadialProfile,
    RNParams,
    area_charge_check,
    dec_margin,
    electric_field,
    hawking_mass_slice,
    minimal_bartnik_bound,
    penrose_bound,
)
from .sphere_geometry import (
    AxisymMetric,
    ConformalData,
    area_radius,
    conformal_representation,
    make_grid,
)

STRICT_SEGMENTS = (NECK, BRIDGE, BENT_RN)


@dataclass(frozen=True, eq=False)
class BartnikDataInput:
    """Minimal Bartnik data (Σ, g_o, H_o = 0, Q_o) and a target mass.

    Attributes:
        metric: g_o in its own coordinates
        charge: Q_o
        mass: Requested ADM mass m
        conformal: g_o as e^{2w} r_o² g_* when known in that form
    """

    metric: AxisymMetric
    charge: float
    mass: float
    conformal: Optional[ConformalData] = None

    @classmethod
    def from_conformal(
        cls, cd: ConformalData, charge: float, mass: float
    ) -> "BartnikDataInput":
        return cls(cd.metric(), float(charge), float(mass), cd)

    @classmethod
    def from_metric(
        cls, m: AxisymMetric, charge: float, mass: float
    ) -> "BartnikDataInput":
        return cls(m, float(charge), float(mass))

    @property
    def r_o(self) -> float:
        return area_radius(self.metric)

    def conformal_data(self) -> ConformalData:
        return self.conformal or conformal_representation(self.metric)


def input_from_config(cfg: RunConfig, ntheta: int) -> BartnikDataInput:
    """Bartnik data described by a run file.

    Raises:
        ParameterError: If a metric file does not fit the requested kind
    """
    # exporters imports this module
    from .exporters import read_metric_csv

    section = cfg.bartnik
    grid = make_grid(ntheta)
    charge, mass = section.charge, cfg.target.mass
    if section.metric == "axisym":
        loaded = read_metric_csv(section.file, grid, section.radius)
        if isinstance(loaded, ConformalData):
            return BartnikDataInput.from_conformal(loaded, charge, mass)
        return BartnikDataInput.from_metric(loaded, charge, mass)
    if section.metric == "conformal" and section.file is not None:
        loaded = read_metric_csv(section.file, grid, section.radius)
        if not isinstance(loaded, ConformalData):
            raise ParameterError(
                f"{section.file} has no w column", stage="config"
            )
        return BartnikDataInput.from_conformal(loaded, charge, mass)
    w = np.zeros(grid.n)
    for k, c in enumerate(section.w_cos):
        w = w + c * np.cos(k * grid.theta)
    cd = ConformalData.normalized(grid, w, section.radius)
    return BartnikDataInput.from_conformal(cd, charge, mass)


def snap_theta_cut(nt: int, theta_cut: float) -> float:
    """The t-node closest to ``theta_cut`` inside (0, 1)."""
    t = np.linspace(0.0, 1.0, nt)
    k = int(np.clip(np.rint(theta_cut * (nt - 1)), 1, nt - 2))
    return float(t[k])


def build_path(
    data: BartnikDataInput,
    nt: int = config.NT_DEFAULT,
    theta_cut: float = config.THETA_CUT,
) -> MetricPath:
    """Normalized path from g_o to the round sphere of radius r_o."""
    raw = conformal_path(data.conformal_data(), nt)
    res = normalize_path(
        raw, snap_theta_cut(nt, theta_cut), source=data.metric
    )
    return res


# ==== Admissibility ====


def check_admissibility(
    data: BartnikDataInput,
    nt: int = config.NT_DEFAULT,
    theta_cut: float = config.THETA_CUT,
    path: Optional[MetricPath] = None,
) -> GateReport:
    """Evaluate the hypotheses of the construction without raising."""
    path = path or build_path(data, nt, theta_cut)
    r_o, q = path.r_o, data.charge
    lambda1 = float(path.lambdas[0])
    ratio = q**2 / r_o**4
    bound = minimal_bartnik_bound(r_o, q)
    gates = {
        "lambda1_positive": lambda1 > 0,
        "area_charge": area_charge_check(r_o, q),
        "kappa_exceeds_charge": path.kappa > ratio,
        "mass_exceeds_bound": data.mass > bound,
    }
    violated = py_.chain(gates.items()).reject(lambda kv: kv[1]).map(
        lambda kv: kv[0]
    ).value()
    res: GateReport = {
        "r_o": r_o,
        "charge": q,
        "lambda1": lambda1,
        "kappa": path.kappa,
        "charge_ratio": ratio,
        "lambda1_positive": bool(gates["lambda1_positive"]),
        "area_charge": bool(gates["area_charge"]),
        "kappa_exceeds_charge": bool(gates["kappa_exceeds_charge"]),
        "mass": data.mass,
        "mass_bound": bound,
        "mass_exceeds_bound": bool(gates["mass_exceeds_bound"]),
        "passed": not violated,
        "violated": violated,
    }
    return res


# ==== Extension ====


@dataclass(frozen=True, eq=False)
class ExtensionFields:
    """Raw arrays an extension is certified from.

    Attributes:
        t: Collar path nodes
        theta: Colatitude nodes
        v: Lapse v(t_k, θ_i)
        q: dθ coefficient of g(t_k), shape (N_t, N_θ)
        p: dφ coefficient of g(t_k), shape (N_t, N_θ)
        neck: (F, F', F'') per t-node
        theta_cut: Node where the collar hands over to the profile
        profile: Neck, bridge, bent exterior and exterior tail (None for
            a bare collar)
        mass: Mass parameter of the exterior
        charge: Q_o
    """

    t: np.ndarray
    theta: np.ndarray
    v: np.ndarray
    q: np.ndarray
    p: np.ndarray
    neck: Tuple[np.ndarray, np.ndarray, np.ndarray]
    theta_cut: float
    profile: Optional[RadialProfile]
    mass: float
    charge: float


def collar_fields(
    block: CollarBlock,
    profile: Optional[RadialProfile] = None,
    mass: float = 0.0,
) -> ExtensionFields:
    """Raw arrays of a collar, with the profile that follows it if any."""
    path = block.path
    res = ExtensionFields(
        t=path.t,
        theta=path.grid.theta,
        v=block.v,
        q=np.array([m.q for m in path.metrics]),
        p=np.array([m.p for m in path.metrics]),
        neck=block.neck,
        theta_cut=path.theta_cut,
        profile=profile,
        mass=mass,
        charge=block.charge,
    )
    return res


@dataclass(frozen=True, eq=False)
class Extension:
    """A charged extension: collar on [0, θ_cut] followed by a profile.

    Attributes:
        collar: The collar block over the whole path
        profile: Rotationally symmetric part from s(θ_cut) outwards
        params: The exterior's Reissner–Nordström parameters
        gate: Admissibility report
        selection: Amplitude and neck selection
        attachment: Bend and bridge reports
    """

    collar: CollarBlock
    profile: RadialProfile
    params: RNParams
    gate: GateReport
    selection: SelectionReport
    attachment: AttachmentReport

    def fields(self) -> ExtensionFields:
        return collar_fields(self.collar, self.profile, self.params.mass)

    def junctions(self) -> Dict[str, Any]:
        res = {
            "theta_cut": self.collar.path.theta_cut,
            "neck_start": self.profile.start,
            "selection": self.selection,
            "attachment": self.attachment,
        }
        return res


def build_extension(
    data: BartnikDataInput,
    nt: int = config.NT_DEFAULT,
    ds: float = config.DS_DEFAULT,
    theta_cut: float = config.THETA_CUT,
    tolerances: Optional[ToleranceSection] = None,
    verbose: bool = True,
) -> Tuple[Extension, ExtensionReport]:
    """Construct and certify an extension of ``data`` with mass data.mass.

    Raises:
        AdmissibilityError: If a hypothesis of the construction fails
        BartnikError: Any construction failure, tagged with its stage
    """
    say = print if verbose else (lambda *a, **k: None)
    q, m = data.charge, data.mass

    # ==== Path ====
    say(f"Building path: nt={nt}, ntheta={data.metric.grid.n}")
    path = build_path(data, nt, theta_cut)
    say(f"  κ={path.kappa:.6g}, α={path.alpha:.6g}, β={path.beta:.6g}")

    # ==== Admissibility ====
    gate = check_admissibility(data, path=path)
    if not gate["passed"]:
        say(f"✗ admissibility: {gate['violated']}")
        raise AdmissibilityError(
            f"Bartnik data violate {', '.join(gate['violated'])}",
            stage="admissibility",
            details=gate,
        )
    say("✓ admissibility")

    # ==== Collar ====
    eig = eigen_path(path, config.PATH_COHERENCE)
    amplitude = select_amplitude(eig, q, path.alpha, path.kappa, path.r_o)
    u_end = float(np.mean(eig.u[-1]))
    eps, masses = select_epsilon(m, amplitude, u_end, path.r_o, q)
    block = assemble_collar(path, eig, amplitude, eps, q)
    margin = collar_dec_field(block)
    say(f"✓ collar: {amplitude=:.6g}, {eps=:.6g}")
    say(f"  min margin {margin.min():.3e}")

    # ==== Neck and exterior ====
    neck = collar_neck_profile(block, ds)
    attached = glue_to_rn(neck, m, q, ds, verbose=verbose)
    say(f"✓ glued to Reissner–Nordström with mass {m}")

    ext = Extension(
        collar=block,
        profile=attached.profile,
        params=attached.params,
        gate=gate,
        selection=selection_report(block, masses, m),
        attachment=attached.report,
    )
    report = verify_extension(ext, tolerances)
    mark = "✓" if report["passed"] else "✗"
    say(f"{mark} verification, gap {report['gap']:.6g}")
    return ext, report


# ==== Verification ====


class _Certificate:
    """Per-region values recomputed from raw fields."""

    def __init__(self, fields: ExtensionFields):
        grid = make_grid(fields.theta.size)
        if not np.allclose(grid.theta, fields.theta, rtol=0.0, atol=1e-12):
            raise GridMismatchError(
                "collar colatitudes are not polar grid nodes", stage="verify"
            )
        self.fields = fields
        self.metrics = [
            AxisymMetric(grid, q, p) for q, p in zip(fields.q, fields.p)
        ]
        self.r_o = area_radius(self.metrics[0])
        f, fp, _ = fields.neck
        self.margin = collar_margin_fields(
            fields.t,
            self.metrics,
            fields.v,
            fields.neck,
            fields.charge,
            self.r_o,
        )
        slices = [
            slice_geometry(
                fields.t[k],
                metric,
                f[k],
                fp[k],
                fields.v[k],
                fields.charge,
                self.r_o,
            )
            for k, metric in enumerate(self.metrics)
        ]
        self.h = np.array([s.h for s in slices])
        self.slices: List[SliceDiagnostics] = [s.diagnostics for s in slices]

    def junction_jump(self) -> float:
        fields, pr = self.fields, self.fields.profile
        k = int(np.argmin(np.abs(fields.t - fields.theta_cut)))
        radius = fields.neck[0][k] * area_radius(self.metrics[k])
        h_collar = float(np.mean(self.h[k]))
        h_profile = 2.0 * pr.fprime[0] / pr.f[0]
        return float(max(abs(radius - pr.f[0]), abs(h_collar - h_profile)))


def collar_slices(fields: ExtensionFields) -> List[SliceDiagnostics]:
    """Slice diagnostics of every collar node."""
    return _Certificate(fields).slices


def _consistency(pr: RadialProfile) -> Tuple[float, float]:
    """Trapezoid defects of f against f' and of f' against f''."""
    h = np.diff(pr.s)
    f_err = np.abs(np.diff(pr.f) - 0.5 * h * (pr.fprime[1:] + pr.fprime[:-1]))
    fp_err = np.abs(
        np.diff(pr.fprime) - 0.5 * h * (pr.fsecond[1:] + pr.fsecond[:-1])
    )
    return float(np.max(f_err)), float(np.max(fp_err))


def verify_fields(
    fields: ExtensionFields,
    tolerances: Optional[ToleranceSection] = None,
    strict: bool = True,
) -> ExtensionReport:
    """Certify an extension from its raw arrays.

    Args:
        fields: Collar and profile samples
        tolerances: Flux and junction tolerances
        strict: Require strictly positive DEC margins on the collar and on
            neck, bridge and bent segments; otherwise margins within the
            rigidity slack pass, which is how exact Reissner–Nordström data
            verify

    Returns:
        The report with every flag recomputed
    """
    tol = tolerances or ToleranceSection()
    cert = _Certificate(fields)
    pr, q, m = fields.profile, fields.charge, fields.mass

    floor = 0.0 if strict else -config.TOL_RIGIDITY
    margin_collar = float(np.min(cert.margin))
    profile_margin = dec_margin(pr)
    tight = np.isin(pr.segments, STRICT_SEGMENTS)
    margin_profile = (
        float(np.min(profile_margin[tight])) if tight.any() else np.inf
    )
    loose_ok = bool(
        np.all(profile_margin[~tight] >= -config.TOL_MARGIN_FLOOR)
    )

    profile_flux = electric_field(pr).normal * pr.f**pr.dim
    flux_drift = float(
        max(
            max(abs(s["flux"] - q) for s in cert.slices),
            np.max(np.abs(profile_flux - q)),
        )
    )
    boundary = cert.slices[0]
    lower = boundary["mass"]
    penrose = penrose_bound(boundary["area"], q)
    boundary_h = float(np.max(np.abs(cert.h[0])))
    min_h = float(
        min(np.min(cert.h[1:]), np.min(2.0 * pr.fprime / pr.f))
    )
    junction = cert.junction_jump()
    f_err, fp_err = _consistency(pr)

    tail = pr.segments == RN_TAIL
    tail_dev = (
        float(
            np.max(
                np.abs(hawking_mass_slice(pr.f[tail], pr.fprime[tail], q) - m)
            )
        )
        if tail.any()
        else np.inf
    )
    flags = {
        "collar_dec": margin_collar > floor,
        "profile_dec": margin_profile > floor and loose_ok,
        "flux": flux_drift <= tol.flux,
        "minimal_boundary": boundary_h <= config.TOL_STRICT,
        "mean_convex": min_h > 0,
        "junction": junction <= tol.junction,
        "profile_consistent": f_err <= config.TOL_CONSISTENCY_F
        and fp_err <= config.TOL_CONSISTENCY_FPRIME,
        "rn_tail": tail_dev <= config.TOL_CONSISTENCY_F,
        "subextremal": m > abs(q),
        "penrose": m >= penrose - config.TOL_RIGIDITY,
        "bartnik_sandwich": lower <= m + config.TOL_RIGIDITY,
    }
    flags = {k: bool(v) for k, v in flags.items()}
    res: ExtensionReport = {
        "mass": m,
        "charge": q,
        "lower_bound": lower,
        "gap": m - lower,
        "penrose_bound": penrose,
        "min_margin_collar": margin_collar,
        "min_margin_profile": margin_profile,
        "max_flux_drift": flux_drift,
        "boundary_h_max": boundary_h,
        "min_h": min_h,
        "junction_jump": junction,
        "tail_mass_deviation": tail_dev,
        "flags": flags,
        "passed": all(flags.values()),
    }
    return res


def verify_extension(
    ext: Extension, tolerances: Optional[ToleranceSection] = None
) -> ExtensionReport:
    """Recompute the certificate of ``ext`` from its raw fields."""
    return verify_fields(ext.fields(), tolerances)


def failure_report(err: Exception) -> Dict[str, Any]:
    """JSON-ready description of a failed run."""
    res = {
        "passed": False,
        "error": type(err).__name__,
        "message": str(err),
        "stage": getattr(err, "stage", ""),
        "details": getattr(err, "details", {}),
    }
    return res


def round_data(
    radius: float, charge: float, mass: float, ntheta: int
) -> BartnikDataInput:
    """Bartnik data of a round sphere."""
    grid = make_grid(ntheta)
    cd = ConformalData(grid, np.zeros(grid.n), radius)
    return BartnikDataInput.from_conformal(cd, charge, mass)
