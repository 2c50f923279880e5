"""Paths of slice metrics from the Bartnik metric to a round sphere.

The raw path is the conformal interpolation g(t) = e^{2(1-t)w} g_{r_o}.
Normalization then
- rescales each metric to area 4π r_o²,
- reparametrizes time so that the path is frozen on [θ_cut, 1],
- pulls every metric back by the colatitude diffeomorphism that matches
  cumulative areas with the input metric, so that the area form does not
  depend on t (tr_{g(t)} g'(t) = 0).

Eigenpairs of -Δ + K and the constants κ, α, β are computed on the result.
"""

from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from . import config
from .errors import ParameterError
from .smoothstep import smoothstep
from .sphere_geometry import (
    AxisymMetric,
    ConformalData,
    EigenPair,
    PolarGrid,
    area_radius,
    conformal_metric,
    cumulative_area,
    evaluate_even,
    first_eigenpair,
    gaussian_curvature,
)


@dataclass(frozen=True, eq=False)
class RawPath:
    """Conformal path sampled at t-nodes.

    Attributes:
        t: Nodes in [0, 1]
        metrics: e^{2(1-t)w} r_o² g_* per node, in round coordinates
        conformal: The conformal data the path starts from
    """

    t: np.ndarray
    metrics: List[AxisymMetric]
    conformal: ConformalData


@dataclass(frozen=True, eq=False)
class MetricPath:
    """Normalized path with its spectral data.

    Attributes:
        t: Nodes in [0, 1]
        metrics: g(t_k) in the coordinates of the input metric
        theta_cut: Metrics are identical for t >= theta_cut
        eigen: First eigenpair per node
        kappa: min_k λ(t_k)
        alpha: (1/4) max |g'|²
        beta: r_o² min K (reported only)
        r_o: Area radius
        round_map: Colatitude of the round sphere at each grid node on the
            frozen part, i.e. the diffeomorphism making g(1) = r_o² g_*
    """

    t: np.ndarray
    metrics: List[AxisymMetric]
    theta_cut: float
    eigen: List[EigenPair]
    kappa: float
    alpha: float
    beta: float
    r_o: float
    round_map: np.ndarray

    @property
    def grid(self) -> PolarGrid:
        return self.metrics[0].grid

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([e.value for e in self.eigen])

    @property
    def eigenfunctions(self) -> np.ndarray:
        """u(t_k, θ_i) as an (N_t, N_θ) array."""
        return np.array([e.function.values for e in self.eigen])


class LambdaVerdict(NamedTuple):
    verdict: bool
    margin: float
    lambdas: np.ndarray


def conformal_path(cd: ConformalData, n_t: int) -> RawPath:
    """g(t) = e^{2(1-t)w} g_{r_o} at ``n_t`` equally spaced nodes."""
    if n_t < 2:
        raise ParameterError(f"need at least two path nodes, got {n_t}")
    t = np.linspace(0.0, 1.0, n_t)
    metrics = [
        conformal_metric(cd.grid, (1.0 - tk) * cd.w, cd.r_o) for tk in t
    ]
    # e^0 = 1 makes the last node round; use the exact round samples
    metrics[-1] = conformal_metric(cd.grid, np.zeros(cd.grid.n), cd.r_o)
    return RawPath(t, metrics, cd)


def path_eigenpairs(
    metrics: List[AxisymMetric], tol_eig: float = config.TOL_EIG
) -> List[EigenPair]:
    """First eigenpair per node; consecutive identical metrics share one."""
    res: List[EigenPair] = []
    for i, m in enumerate(metrics):
        if i > 0 and m is metrics[i - 1]:
            res.append(res[-1])
        else:
            res.append(first_eigenpair(m, tol_eig))
    return res


def verify_path_lambda(
    path, kappa_target: float, tol_eig: float = config.TOL_EIG
) -> LambdaVerdict:
    """Check λ₁(g(t_k)) > κ_target at every node of a raw or normal path."""
    if isinstance(path, MetricPath):
        lambdas = path.lambdas
    else:
        lambdas = np.array(
            [e.value for e in path_eigenpairs(path.metrics, tol_eig)]
        )
    margin = float(np.min(lambdas) - kappa_target)
    return LambdaVerdict(margin > config.TOL_STRICT, margin, lambdas)


# ==== Time reparametrization ====


def reparametrization(t, theta_cut: float):
    """η(t) = S(t/θ_cut), equal to 1 on [θ_cut, 1]."""
    if not 0.0 < theta_cut < 1.0:
        raise ParameterError(f"theta_cut must lie in (0, 1), got {theta_cut}")
    res = smoothstep(np.asarray(t, dtype=float) / theta_cut)
    if np.any(np.diff(res) < 0) or not np.all(np.isfinite(res)):
        raise ParameterError("time reparametrization is not monotone")
    return res


# ==== Area-form normalization ====


def invert_cumulative_area(
    m: AxisymMetric, targets: np.ndarray, iterations: int = 64
) -> np.ndarray:
    """Colatitudes Θ with cap area A_m(Θ) = targets (vectorized bisection)."""
    lo = np.zeros_like(targets)
    hi = np.full_like(targets, np.pi)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        below = cumulative_area(m, mid) < targets
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def _area_matched(
    source: AxisymMetric, exponent: np.ndarray, r_o: float
) -> Tuple[AxisymMetric, np.ndarray]:
    grid = source.grid
    ratio = 0.5 * np.sum(grid.weights * grid.sin * np.exp(2 * exponent))
    exponent = exponent - 0.5 * np.log(ratio)
    target = conformal_metric(grid, exponent, r_o)
    caps = cumulative_area(source, grid.theta)
    big_theta = invert_cumulative_area(target, caps)
    assert np.all(np.diff(big_theta) > 0), "cap areas must be monotone"
    p = (
        r_o
        * np.exp(evaluate_even(grid, exponent, big_theta))
        * np.sin(big_theta)
    )
    q = source.q * source.p / p
    return AxisymMetric(grid, q, p), big_theta


def normalize_path(
    raw: RawPath,
    theta_cut: float = config.THETA_CUT,
    source: Optional[AxisymMetric] = None,
    tol_eig: float = config.TOL_EIG,
) -> MetricPath:
    """Reparametrize and pull back the raw path; recompute spectral data.

    Args:
        raw: Path from ``conformal_path``
        theta_cut: Start of the frozen, round part of the path
        source: The Bartnik metric in its own coordinates; defaults to the
            t = 0 metric of the raw path
        tol_eig: Eigen residual tolerance

    Returns:
        The normalized path with κ, α, β
    """
    cd = raw.conformal
    source = source or raw.metrics[0]
    eta = reparametrization(raw.t, theta_cut)
    metrics: List[AxisymMetric] = []
    round_map = source.grid.theta
    for k, s in enumerate(eta):
        if s == 0.0:
            metrics.append(source)
        elif k > 0 and s == eta[k - 1]:
            metrics.append(metrics[-1])
        else:
            g, big_theta = _area_matched(source, (1.0 - s) * cd.w, cd.r_o)
            metrics.append(g)
            if s == 1.0:
                round_map = big_theta
    eigen = path_eigenpairs(metrics, tol_eig)
    r_o = area_radius(source)
    kappa, alpha, beta = _constants(raw.t, metrics, eigen, r_o)
    res = MetricPath(
        t=raw.t,
        metrics=metrics,
        theta_cut=theta_cut,
        eigen=eigen,
        kappa=kappa,
        alpha=alpha,
        beta=beta,
        r_o=r_o,
        round_map=round_map,
    )
    return res


# ==== Constants ====


def metric_rates(
    t: np.ndarray, metrics: List[AxisymMetric]
) -> Tuple[np.ndarray, np.ndarray]:
    """∂_t(q²)/q² and ∂_t(p²)/p² as (N_t, N_θ) arrays."""
    q2 = np.array([m.q**2 for m in metrics])
    p2 = np.array([m.p**2 for m in metrics])
    dq = np.gradient(q2, t, axis=0, edge_order=2) / q2
    dp = np.gradient(p2, t, axis=0, edge_order=2) / p2
    return dq, dp


def trace_rate(path: MetricPath) -> np.ndarray:
    """tr_{g(t)} g'(t) per node."""
    dq, dp = metric_rates(path.t, path.metrics)
    return dq + dp


def metric_rate_norm_sq(path: MetricPath) -> np.ndarray:
    """|g'(t)|²_{g(t)} per node."""
    dq, dp = metric_rates(path.t, path.metrics)
    return dq**2 + dp**2


def _constants(t, metrics, eigen, r_o) -> Tuple[float, float, float]:
    kappa = float(min(e.value for e in eigen))
    dq, dp = metric_rates(t, metrics)
    alpha = 0.25 * float(np.max(dq**2 + dp**2))
    k_min = min(float(np.min(gaussian_curvature(m).values)) for m in metrics)
    return kappa, alpha, r_o**2 * k_min


def path_constants(path: MetricPath) -> Tuple[float, float, float]:
    """(κ, α, β) recomputed from the path's metrics and eigenpairs."""
    return _constants(path.t, path.metrics, path.eigen, path.r_o)


def roundness_defect(m: AxisymMetric, r_o: float) -> float:
    """max |K r_o² - 1|; zero for a round sphere of radius r_o."""
    return float(np.max(np.abs(gaussian_curvature(m).values * r_o**2 - 1.0)))
