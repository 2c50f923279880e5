"""Charged collars γ = v² dt² + F(t)² g(t) over a normalized metric path.

The lapse is v = A u with u the first eigenfunction of -Δ + K along the
path and F(t) = (1 + εt²)^{1/2}. The electric field E = Q/(r_o² v F²) ∂_t
is divergence free because the area form of g(t) does not depend on t.
"""

from dataclasses import dataclass
from typing import Dict, NamedTuple, Tuple

import numpy as np

from . import config
from .data_types.construction import SelectionReport
from .data_types.report import SliceDiagnostics
from .errors import (
    AdmissibilityError,
    CollarDECError,
    EpsilonSearchError,
    NeckError,
    PathCoherenceError,
)
from .metric_path import MetricPath, metric_rates, roundness_defect
from .rotsym_core import NECK, RadialProfile, hawking_mass_surface
from .sphere_geometry import (
    AxisymMetric,
    PolarGrid,
    ScalarField,
    area,
    charge_flux,
    gaussian_curvature,
    integrate,
    laplace_beltrami,
)


@dataclass(frozen=True, eq=False)
class EigenData:
    """Eigenpairs along a path with their t-derivative data.

    Attributes:
        t: Path nodes
        lambdas: λ(t_k)
        u: u(t_k, θ_i), positive and L²(g(t_k)) normalized
        dlogu: ∂_t log u by centered differences
        inf_u2: inf u²
        sup_dlogu: sup |∂_t log u|
    """

    t: np.ndarray
    lambdas: np.ndarray
    u: np.ndarray
    dlogu: np.ndarray
    inf_u2: float
    sup_dlogu: float


def eigen_path(
    path: MetricPath, coherence: float = config.PATH_COHERENCE
) -> EigenData:
    """Collect the path's eigenfunctions and check they vary coherently.

    Raises:
        PathCoherenceError: If successive eigenfunctions differ by more
            than ``coherence`` in relative sup norm
    """
    u = path.eigenfunctions
    jumps = np.max(np.abs(np.diff(u, axis=0)), axis=1) / np.max(
        np.abs(u[1:]), axis=1
    )
    if jumps.size and np.max(jumps) > coherence:
        k = int(np.argmax(jumps)) + 1
        raise PathCoherenceError(
            f"eigenfunction jumps by {jumps[k - 1]:.3g} at t={path.t[k]}",
            stage="collar",
            details={"t": float(path.t[k])},
        )
    dlogu = np.gradient(np.log(u), path.t, axis=0, edge_order=2)
    res = EigenData(
        t=path.t,
        lambdas=path.lambdas,
        u=u,
        dlogu=dlogu,
        inf_u2=float(np.min(u**2)),
        sup_dlogu=float(np.max(np.abs(dlogu))),
    )
    return res


def select_amplitude(
    eig: EigenData, charge: float, alpha: float, kappa: float, r_o: float
) -> float:
    """A with A² inf u² (κ - Q²/r_o⁴) = 2 (2 + α + 2 sup|∂_t log u|).

    Raises:
        AdmissibilityError: If κ <= Q²/r_o⁴
    """
    spare = kappa - charge**2 / r_o**4
    if spare <= 0:
        raise AdmissibilityError(
            f"κ={kappa} does not exceed Q²/r_o⁴={charge**2 / r_o**4}",
            stage="collar",
            details={"kappa": kappa, "charge_ratio": charge**2 / r_o**4},
        )
    need = 2.0 + alpha + 2.0 * eig.sup_dlogu
    res = float(np.sqrt(config.AMPLITUDE_SAFETY * need / (eig.inf_u2 * spare)))
    assert res**2 * eig.inf_u2 * spare - need > 0
    return res


def neck_factor(t, eps: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """F, F' and F'' of F(t) = (1 + εt²)^{1/2}."""
    t = np.asarray(t, dtype=float)
    f = np.sqrt(1.0 + eps * t**2)
    return f, eps * t / f, eps / f**3


def neck_hawking_mass(
    f, fprime, r_o: float, charge: float, amplitude: float, u_end: float
):
    """Charged Hawking mass of a slice on which g(t) = r_o² g_*."""
    return (
        0.5
        * f
        * r_o
        * (
            1.0
            + charge**2 / (f**2 * r_o**2)
            - r_o**2 * fprime**2 / (amplitude**2 * u_end**2)
        )
    )


def select_epsilon(
    mass: float, amplitude: float, u_end: float, r_o: float, charge: float
) -> Tuple[float, Dict[str, float]]:
    """Halve ε from 0.5 until the neck raises the mass but stays below m.

    The conditions are m > m_H(Σ₁), m_H(Σ₁) > m_H(Σ₀) and m_H(Σ₁) > |Q|.

    Returns:
        ε and the slice masses at t = 0 and t = 1

    Raises:
        EpsilonSearchError: If ε falls below the halving floor
    """
    start = float(neck_hawking_mass(1.0, 0.0, r_o, charge, amplitude, u_end))
    eps = config.EPSILON_START
    while eps >= config.HALVING_FLOOR:
        f1, fp1, _ = neck_factor(1.0, eps)
        end = float(neck_hawking_mass(f1, fp1, r_o, charge, amplitude, u_end))
        if mass > end and end > start and end > abs(charge):
            return eps, {"mass_start": start, "mass_end": end}
        eps /= 2
    raise EpsilonSearchError(
        f"no neck parameter for m={mass} (boundary mass {start})",
        stage="collar",
        details={"mass": mass, "mass_start": start},
    )


@dataclass(frozen=True, eq=False)
class CollarBlock:
    """A collar with its lapse, neck factor and charge.

    Attributes:
        path: The normalized path g(t)
        eigen: Eigen data along the path
        amplitude: A
        epsilon: ε
        charge: Q_o
        v: Lapse A u(t_k, θ_i)
        neck: (F, F', F'') per t-node
    """

    path: MetricPath
    eigen: EigenData
    amplitude: float
    epsilon: float
    charge: float
    v: np.ndarray
    neck: Tuple[np.ndarray, np.ndarray, np.ndarray]

    @property
    def t(self) -> np.ndarray:
        return self.path.t

    @property
    def grid(self) -> PolarGrid:
        return self.path.grid

    @property
    def r_o(self) -> float:
        return self.path.r_o

    @property
    def u_end(self) -> float:
        return float(np.mean(self.eigen.u[-1]))


def assemble_collar(
    path: MetricPath,
    eig: EigenData,
    amplitude: float,
    eps: float,
    charge: float,
) -> CollarBlock:
    """Lapse, neck factor and field of the collar over ``path``."""
    v = amplitude * eig.u
    assert np.all(v > 0), "lapse must be positive"
    res = CollarBlock(
        path=path,
        eigen=eig,
        amplitude=amplitude,
        epsilon=eps,
        charge=charge,
        v=v,
        neck=neck_factor(path.t, eps),
    )
    divergence = field_divergence(res)
    assert divergence <= 1e-6, f"{divergence=}"
    return res


def field_divergence(block: CollarBlock) -> float:
    """max |div_γ E| with √det γ E^t = Q q p / r_o²."""
    qp = np.array([m.q * m.p for m in block.path.metrics])
    volume = block.v * block.neck[0][:, None] ** 2 * qp
    flow = block.charge * qp / block.r_o**2
    div = np.gradient(flow, block.t, axis=0, edge_order=2) / volume
    return float(np.max(np.abs(div)))


# ==== Curvature ====


def collar_margin_fields(
    t: np.ndarray,
    metrics,
    v: np.ndarray,
    neck: Tuple[np.ndarray, np.ndarray, np.ndarray],
    charge: float,
    r_o: float,
) -> np.ndarray:
    """R(γ) - 2|E|² at every (t_k, θ_i) from raw collar fields.

    Uses the scalar curvature of v² dt² + F² g(t) for area preserving
    paths: 2v⁻¹(-Δ_{F²g} v + K(F²g) v) + v⁻²((-2F'² - 4FF'')/F²
    - |g'|²/4 + 4 (∂_t v/v)(F'/F)).
    """
    f, fp, fpp = neck
    dq, dp = metric_rates(t, metrics)
    rate = dq**2 + dp**2
    dlogv = np.gradient(np.log(v), t, axis=0, edge_order=2)
    res = np.empty_like(v)
    for k, m in enumerate(metrics):
        slice_metric = m.scaled(f[k])
        vk = ScalarField(m.grid, v[k])
        lap = laplace_beltrami(slice_metric, vk).values
        kk = gaussian_curvature(slice_metric).values
        spatial = 2.0 / v[k] * (-lap + kk * v[k])
        normal = (
            (-2.0 * fp[k] ** 2 - 4.0 * f[k] * fpp[k]) / f[k] ** 2
            - 0.25 * rate[k]
            + 4.0 * dlogv[k] * fp[k] / f[k]
        ) / v[k] ** 2
        field = 2.0 * charge**2 / (r_o**4 * f[k] ** 4)
        res[k] = spatial + normal - field
    return res


def collar_dec_field(block: CollarBlock) -> np.ndarray:
    """DEC margin field of the collar.

    Raises:
        CollarDECError: If the margin is not positive at some node
    """
    res = collar_margin_fields(
        block.t,
        block.path.metrics,
        block.v,
        block.neck,
        block.charge,
        block.r_o,
    )
    k, i = np.unravel_index(np.argmin(res), res.shape)
    if res[k, i] <= 0:
        location = (float(block.t[k]), float(block.grid.theta[i]))
        raise CollarDECError(
            f"collar margin {res[k, i]:.3e} at (t, θ)={location}",
            location=location,
            stage="collar",
            details={"margin": float(res[k, i])},
        )
    return res


def margin_lower_bound(block: CollarBlock, alpha: float) -> np.ndarray:
    """2u⁻²/(A²F²) [A² inf u² (κ - Q²/r_o⁴) - 2 - α - 2 sup|∂_t log u|]."""
    eig = block.eigen
    f = block.neck[0][:, None]
    kappa = float(np.min(eig.lambdas))
    core = (
        block.amplitude**2
        * eig.inf_u2
        * (kappa - block.charge**2 / block.r_o**4)
        - 2.0
        - alpha
        - 2.0 * eig.sup_dlogu
    )
    return 2.0 / (eig.u**2 * block.amplitude**2 * f**2) * core


def scalar_curvature_diagonal(
    t: np.ndarray, theta: np.ndarray, diagonal: np.ndarray
) -> np.ndarray:
    """Scalar curvature of diag(g_tt, g_θθ, g_φφ)(t, θ) by finite differences.

    The metric components do not depend on φ. Christoffel symbols and the
    Ricci tensor are assembled from second order ``np.gradient`` stencils.

    Args:
        t: First coordinate nodes
        theta: Second coordinate nodes (uniform)
        diagonal: Array of shape (3, N_t, N_θ)

    Returns:
        R at every node, shape (N_t, N_θ)
    """

    def d(arr, axis):
        if axis == 2:
            return np.zeros_like(arr)
        coords = t if axis == 0 else theta
        return np.gradient(arr, coords, axis=axis, edge_order=2)

    g = diagonal
    inv = 1.0 / g
    dg = np.array([[d(g[a], c) for c in range(3)] for a in range(3)])
    # gamma[k, i, j] for diagonal metrics; dg[a, c] = ∂_c g_aa
    gamma = np.zeros((3, 3, 3) + g.shape[1:])
    for k in range(3):
        for i in range(3):
            for j in range(3):
                val = 0.0
                if k == j:
                    val = val + dg[k, i]
                if k == i:
                    val = val + dg[k, j]
                if i == j:
                    val = val - dg[i, k]
                gamma[k, i, j] = 0.5 * inv[k] * val
    ricci = np.zeros((3,) + g.shape[1:])
    for i in range(3):
        acc = np.zeros(g.shape[1:])
        for k in range(3):
            acc = acc + d(gamma[k, i, i], k)
            acc = acc - d(gamma[k, i, k], i)
            for m in range(3):
                acc = acc + gamma[k, k, m] * gamma[m, i, i]
                acc = acc - gamma[k, i, m] * gamma[m, i, k]
        ricci[i] = acc
    return np.sum(inv * ricci, axis=0)


def collar_diagonal(block: CollarBlock) -> np.ndarray:
    """(v², F² q², F² p²) on the block's nodes."""
    f = block.neck[0][:, None]
    q = np.array([m.q for m in block.path.metrics])
    p = np.array([m.p for m in block.path.metrics])
    return np.array([block.v**2, (f * q) ** 2, (f * p) ** 2])


# ==== Slices ====


class SliceFields(NamedTuple):
    h: np.ndarray
    diagnostics: SliceDiagnostics


def slice_geometry(
    t: float,
    metric: AxisymMetric,
    f: float,
    fprime: float,
    v: np.ndarray,
    charge: float,
    r_o: float,
) -> SliceFields:
    """Diagnostics of the slice F² g with lapse v and neck factor F."""
    grid = metric.grid
    induced = metric.scaled(f)
    h = 2.0 * fprime / (v * f)
    surface = area(induced)
    h2 = integrate(induced, ScalarField(grid, h**2))
    normal = np.full(grid.n, charge / (r_o**2 * f**2))
    diag: SliceDiagnostics = {
        "t": float(t),
        "area": surface,
        "mass": hawking_mass_surface(surface, charge, h2),
        "flux": charge_flux(induced, ScalarField(grid, normal)),
        "h_min": float(np.min(h)),
        "h_max": float(np.max(h)),
    }
    return SliceFields(h, diag)


def slice_diagnostics(block: CollarBlock, k: int) -> SliceFields:
    """Mean curvature, area, charged Hawking mass and flux of Σ_{t_k}."""
    res = slice_geometry(
        block.t[k],
        block.path.metrics[k],
        block.neck[0][k],
        block.neck[1][k],
        block.v[k],
        block.charge,
        block.r_o,
    )
    return res


def closed_slice_mass(block: CollarBlock, k: int) -> float:
    """Charged Hawking mass of a frozen slice from the neck formula."""
    f, fp, _ = (x[k] for x in block.neck)
    return float(
        neck_hawking_mass(
            f, fp, block.r_o, block.charge, block.amplitude, block.u_end
        )
    )


def collar_neck_profile(
    block: CollarBlock, ds: float = config.DS_DEFAULT
) -> RadialProfile:
    """The frozen part of the collar as ds² + f(s)² g_*.

    With s = A u(1) t the neck is f(s) = r_o (1 + ε s²/(A² u(1)²))^{1/2}
    on [A u(1) θ_cut, A u(1)].

    Raises:
        NeckError: If the frozen slices are not round or u is not constant
    """
    path = block.path
    frozen = np.flatnonzero(path.t >= path.theta_cut)
    for k in frozen:
        defect = roundness_defect(path.metrics[k], block.r_o)
        spread = np.ptp(block.eigen.u[k]) / np.max(block.eigen.u[k])
        if defect > config.TOL_POLE or spread > config.TOL_EIG:
            raise NeckError(
                f"slice t={path.t[k]} is not round ({defect=}, {spread=})",
                stage="neck",
            )
    scale = block.amplitude * block.u_end
    c = block.epsilon / scale**2
    a, b = scale * path.theta_cut, scale
    s = np.linspace(a, b, max(int(np.ceil((b - a) / ds)), 2) + 1)
    root = np.sqrt(1.0 + c * s**2)
    res = RadialProfile(
        s,
        block.r_o * root,
        block.r_o * c * s / root,
        block.r_o * c / root**3,
        np.full(s.size, NECK, dtype=object),
        block.charge,
        2,
    )
    return res


def selection_report(
    block: CollarBlock, masses: Dict[str, float], mass: float
) -> SelectionReport:
    path = block.path
    res: SelectionReport = {
        "amplitude": block.amplitude,
        "epsilon": block.epsilon,
        "kappa": path.kappa,
        "alpha": path.alpha,
        "beta": path.beta,
        "inf_u2": block.eigen.inf_u2,
        "sup_dlogu": block.eigen.sup_dlogu,
        "mass_start": masses["mass_start"],
        "mass_end": masses["mass_end"],
        "conditions": {
            "mass_above_neck": mass > masses["mass_end"],
            "neck_gains_mass": masses["mass_end"] > masses["mass_start"],
            "neck_mass_above_charge": masses["mass_end"] > abs(block.charge),
        },
    }
    return res
