"""Discrete geometry of axisymmetric metrics on the 2-sphere.

A slice metric is written q(θ)² dθ² + p(θ)² dφ² and sampled on a polar grid
of Chebyshev–Gauss nodes in cos θ. Functions that are smooth on the sphere
are even in θ about both poles and are expanded as Chebyshev series in
x = cos θ; odd quantities such as p carry an explicit factor sin θ. This
gives spectrally accurate derivatives and quadrature without ever touching a
pole, which is where the nodes are excluded.

Main entry points:
- gaussian_curvature, laplace_beltrami, area, charge_flux
- first_eigenpair: first eigenpair of -Δ_g + K(g)
- conformal_representation: g = e^{2w} r_o² g_* up to an axis-preserving
  diffeomorphism
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Optional, Tuple

import numpy as np
import scipy.fft
import scipy.linalg
from numpy.polynomial import chebyshev as cheb
from scipy.optimize import brentq

from . import config
from .errors import (
    EigenSolveError,
    GridMismatchError,
    ParameterError,
    PoleRegularityError,
    SimplicityViolationError,
    UniformizationError,
)


@dataclass(frozen=True, eq=False)
class PolarGrid:
    """Colatitude nodes θ_i = (i + 1/2)π/N with Fejér quadrature.

    Attributes:
        n: Node count N
        theta: Nodes in (0, π), increasing and symmetric about π/2
        weights: Quadrature weights for ∫₀^π F dθ when F/sin θ is smooth;
            they satisfy Σ w_i sin θ_i = 2
        scheme: Differentiation scheme identifier
    """

    n: int
    theta: np.ndarray
    weights: np.ndarray
    scheme: str = "chebyshev-gauss-cos"
    x: np.ndarray = field(init=False, repr=False)
    sin: np.ndarray = field(init=False, repr=False)
    vander: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "x", np.cos(self.theta))
        object.__setattr__(self, "sin", np.sin(self.theta))
        object.__setattr__(
            self, "vander", cheb.chebvander(np.cos(self.theta), self.n - 1)
        )


@lru_cache(maxsize=None)
def make_grid(n: int) -> PolarGrid:
    """Build (and cache) the polar grid with ``n`` nodes.

    Raises:
        ParameterError: If ``n`` is below the supported minimum
    """
    if n < config.NTHETA_MIN:
        raise ParameterError(
            f"ntheta must be >= {config.NTHETA_MIN}, got {n}",
            stage="grid",
        )
    theta = (np.arange(n) + 0.5) * np.pi / n
    k = np.arange(1, n // 2 + 1)
    # Fejér's first rule in x = cos θ, divided by sin θ for dθ-measure
    fejer = (2.0 / n) * (
        1.0
        - 2.0
        * np.sum(
            np.cos(2.0 * np.outer(theta, k)) / (4.0 * k**2 - 1.0), axis=1
        )
    )
    res = PolarGrid(n=n, theta=theta, weights=fejer / np.sin(theta))
    return res


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Axisymmetric function sampled on a polar grid."""

    grid: PolarGrid
    values: np.ndarray

    def __post_init__(self):
        assert self.values.shape == (self.grid.n,)
        assert np.all(np.isfinite(self.values)), "non-finite field values"

    def pole_limits(self) -> Tuple[float, float]:
        """Values at θ = 0 and θ = π by even extension."""
        a = even_coefficients(self.grid, self.values)
        return float(np.sum(a)), float(np.sum(a * (-1.0) ** np.arange(a.size)))


@dataclass(frozen=True, eq=False)
class AxisymMetric:
    """The metric q² dθ² + p² dφ² on S².

    Attributes:
        grid: Polar grid the coefficients are sampled on
        q: Coefficient of dθ (length), positive
        p: Coefficient of dφ (length), positive at every node
        pole_defect: |p'(0) - q(0)| and |p'(π) + q(π)|, relative to max q
    """

    grid: PolarGrid
    q: np.ndarray
    p: np.ndarray
    pole_defect: Tuple[float, float] = field(init=False)

    def __post_init__(self):
        if self.q.shape != (self.grid.n,) or self.p.shape != (self.grid.n,):
            raise GridMismatchError(
                "metric samples do not match the grid", stage="metric"
            )
        if not (np.all(self.q > 0) and np.all(self.p > 0)):
            raise ParameterError(
                "metric coefficients must be positive", stage="metric"
            )
        dp0, dpi = odd_derivative_at_poles(self.grid, self.p)
        a = even_coefficients(self.grid, self.q)
        q0, qpi = np.sum(a), np.sum(a * (-1.0) ** np.arange(a.size))
        scale = float(np.max(self.q))
        defect = (abs(dp0 - q0) / scale, abs(dpi + qpi) / scale)
        object.__setattr__(self, "pole_defect", defect)
        if max(defect) > config.TOL_POLE:
            raise PoleRegularityError(
                f"metric does not close smoothly at the poles: {defect=}",
                stage="metric",
                details={"pole_defect": list(defect)},
            )

    def scaled(self, factor: float) -> "AxisymMetric":
        """The metric factor² g."""
        return AxisymMetric(self.grid, factor * self.q, factor * self.p)


@dataclass(frozen=True, eq=False)
class ConformalData:
    """Conformal exponent w over a round sphere of area radius r_o.

    The metric e^{2w} r_o² g_* has area 4π r_o², which fixes the additive
    constant in w.
    """

    grid: PolarGrid
    w: np.ndarray
    r_o: float

    def __post_init__(self):
        grid = self.grid
        ratio = 0.5 * np.sum(grid.weights * grid.sin * np.exp(2 * self.w))
        if abs(ratio - 1.0) > config.TOL_AREA:
            raise ParameterError(
                f"conformal exponent is not area normalized: {ratio=}",
                stage="conformal",
            )

    @classmethod
    def normalized(
        cls, grid: PolarGrid, w: np.ndarray, r_o: float
    ) -> "ConformalData":
        """Shift ``w`` by the constant that makes the area 4π r_o²."""
        ratio = 0.5 * np.sum(grid.weights * grid.sin * np.exp(2 * w))
        res = cls(grid=grid, w=w - 0.5 * np.log(ratio), r_o=r_o)
        return res

    def metric(self) -> AxisymMetric:
        return conformal_metric(self.grid, self.w, self.r_o)


class EigenPair(NamedTuple):
    value: float
    function: ScalarField
    residual: float


# ==== Series helpers ====


def even_coefficients(grid: PolarGrid, values: np.ndarray) -> np.ndarray:
    """Chebyshev coefficients in cos θ of samples of an even function.

    Works along axis 0, so a matrix of column samples is accepted.
    """
    a = scipy.fft.dct(values, type=2, axis=0) / grid.n
    a[0] = a[0] / 2.0
    return a


def evaluate_even(
    grid: PolarGrid, values: np.ndarray, theta: np.ndarray
) -> np.ndarray:
    """Interpolate an even function at arbitrary colatitudes."""
    return cheb.chebval(np.cos(theta), even_coefficients(grid, values))


def evaluate_odd(
    grid: PolarGrid, values: np.ndarray, theta: np.ndarray
) -> np.ndarray:
    """Interpolate an odd function (sin θ times an even one)."""
    inner = even_coefficients(grid, values / grid.sin)
    return np.sin(theta) * cheb.chebval(np.cos(theta), inner)


def diff_even(grid: PolarGrid, values: np.ndarray) -> np.ndarray:
    """d/dθ of an even function; the result is odd."""
    da = cheb.chebder(even_coefficients(grid, values), axis=0)
    res = -_column(grid.sin, values) * (grid.vander[:, : grid.n - 1] @ da)
    return res


def diff_odd(grid: PolarGrid, values: np.ndarray) -> np.ndarray:
    """d/dθ of an odd function f = sin θ G(cos θ); the result is even."""
    s = _column(grid.sin, values)
    c = _column(grid.x, values)
    g = even_coefficients(grid, values / s)
    dg = cheb.chebder(g, axis=0)
    res = c * (grid.vander @ g) - s**2 * (grid.vander[:, : grid.n - 1] @ dg)
    return res


def odd_derivative_at_poles(
    grid: PolarGrid, values: np.ndarray
) -> Tuple[float, float]:
    """f'(0) and f'(π) of an odd function."""
    g = even_coefficients(grid, values / grid.sin)
    return float(np.sum(g)), float(-np.sum(g * (-1.0) ** np.arange(g.size)))


def _column(v: np.ndarray, like: np.ndarray) -> np.ndarray:
    return v if like.ndim == 1 else v[:, None]


def _check_same_grid(m: AxisymMetric, f: ScalarField):
    if f.grid is not m.grid and (
        f.grid.n != m.grid.n or not np.array_equal(f.grid.theta, m.grid.theta)
    ):
        raise GridMismatchError(
            f"field on {f.grid.n} nodes, metric on {m.grid.n}",
            stage="sphere",
        )


# ==== Metric constructors ====


def round_metric(grid: PolarGrid, radius: float) -> AxisymMetric:
    return AxisymMetric(
        grid, np.full(grid.n, float(radius)), radius * grid.sin
    )


def conformal_metric(
    grid: PolarGrid, w: np.ndarray, radius: float
) -> AxisymMetric:
    """e^{2w} radius² g_* in round coordinates."""
    ew = radius * np.exp(w)
    return AxisymMetric(grid, ew, ew * grid.sin)


# ==== Geometry ====


def gaussian_curvature(m: AxisymMetric) -> ScalarField:
    """K = -(1/(q p)) d/dθ (p'/q).

    Raises:
        PoleRegularityError: If the derivative chain produces non-finite
            values
    """
    grid = m.grid
    dp = diff_odd(grid, m.p)
    k = -diff_even(grid, dp / m.q) / (m.q * m.p)
    if not np.all(np.isfinite(k)):
        raise PoleRegularityError(
            "non-finite curvature near the poles", stage="curvature"
        )
    return ScalarField(grid, k)


def laplace_beltrami(m: AxisymMetric, phi: ScalarField) -> ScalarField:
    """Δ_g φ = (1/(q p)) d/dθ ((p/q) φ')."""
    _check_same_grid(m, phi)
    grid = m.grid
    flux = (m.p / m.q) * diff_even(grid, phi.values)
    res = ScalarField(grid, diff_even(grid, flux) / (m.q * m.p))
    return res


def area(m: AxisymMetric) -> float:
    return float(2.0 * np.pi * np.sum(m.grid.weights * m.q * m.p))


def area_radius(m: AxisymMetric) -> float:
    return float(np.sqrt(area(m) / (4.0 * np.pi)))


def integrate(m: AxisymMetric, f: ScalarField) -> float:
    """∫ f dA_g."""
    _check_same_grid(m, f)
    return float(2.0 * np.pi * np.sum(m.grid.weights * m.q * m.p * f.values))


def charge_flux(m: AxisymMetric, e_normal: ScalarField) -> float:
    """Charge (1/4π) ∫ γ(E, ν) dσ enclosed by the slice."""
    return integrate(m, e_normal) / (4.0 * np.pi)


def cumulative_area(m: AxisymMetric, theta: np.ndarray) -> np.ndarray:
    """Area of the polar cap {θ' < θ}."""
    density = even_coefficients(m.grid, m.q * m.p / m.grid.sin)
    prim = cheb.chebint(density)
    top = cheb.chebval(1.0, prim)
    res = 2.0 * np.pi * (top - cheb.chebval(np.cos(theta), prim))
    return res


# ==== Spectrum ====


def derivative_matrix(grid: PolarGrid) -> np.ndarray:
    """Matrix of d/dθ acting on samples of even functions."""
    return diff_even(grid, np.eye(grid.n))


def quadratic_form(m: AxisymMetric) -> Tuple[np.ndarray, np.ndarray]:
    """Matrices of ∫(|∇φ|² + Kφ²) dA and ∫φ² dA on grid samples."""
    grid = m.grid
    d = derivative_matrix(grid)
    k = gaussian_curvature(m).values
    dens = 2.0 * np.pi * grid.weights * m.q * m.p
    stiff = d.T @ (((2.0 * np.pi * grid.weights * m.p / m.q))[:, None] * d)
    a = stiff + np.diag(dens * k)
    a = 0.5 * (a + a.T)
    return a, np.diag(dens)


def collocation_operator(m: AxisymMetric) -> np.ndarray:
    """Matrix of -Δ_g + K(g) on grid samples of even functions.

    Column j is the operator applied to the j-th cardinal function, so
    ``collocation_operator(m) @ u`` equals ``-laplace_beltrami + K u``.
    """
    grid = m.grid
    flux = (m.p / m.q)[:, None] * diff_even(grid, np.eye(grid.n))
    lap = diff_even(grid, flux) / (m.q * m.p)[:, None]
    return np.diag(gaussian_curvature(m).values) - lap


def _inverse_iteration(solve, x, bd, tol: float) -> Tuple[np.ndarray, bool]:
    """Normalized inverse iteration ∫x² dA = 1, x of positive mean."""
    for _ in range(config.MAX_INVERSE_ITERATIONS):
        y = solve(bd * x)
        y = y / np.sqrt(np.sum(bd * y * y))
        if np.sum(bd * y) < 0:
            y = -y
        step = np.max(np.abs(y - x)) / np.max(np.abs(y))
        x = y
        if step < tol:
            return x, True
    return x, False


def first_eigenpair(
    m: AxisymMetric, tol_eig: float = config.TOL_EIG
) -> EigenPair:
    """First eigenpair of -Δ_g + K(g), u > 0 and ∫u² dA = 1.

    Shifted inverse iteration on the symmetric quadratic form from a
    constant start vector. The shift sits below min K, which bounds λ₁ from
    below, so the iteration converges to the first eigenvalue. The quadrature
    of that form is inexact in its top modes, so the eigenvector is then
    polished by inverse iteration on the collocation operator, shifted just
    below the Galerkin eigenvalue, and the strong-form residual is measured
    on the polished pair.

    Raises:
        EigenSolveError: If an iteration stalls or the residual of the
            strong form exceeds ``tol_eig``
        SimplicityViolationError: If the eigenvector changes sign
    """
    grid = m.grid
    a, b = quadratic_form(m)
    bd = np.diag(b)
    k = gaussian_curvature(m).values
    shift = float(np.min(k)) - 4.0 * np.pi / area(m)
    lu = scipy.linalg.lu_factor(a - shift * b)
    start = np.ones(grid.n) / np.sqrt(np.sum(bd))
    x, converged = _inverse_iteration(
        lambda v: scipy.linalg.lu_solve(lu, v), start, bd, 1e-11
    )
    if not converged:
        raise EigenSolveError(
            "inverse iteration did not converge", stage="eigen"
        )
    galerkin = float(x @ a @ x)

    # polish on the strong form
    op = collocation_operator(m)
    sigma = galerkin - 1e-8 * max(1.0, abs(galerkin))
    lu = scipy.linalg.lu_factor(op - sigma * np.eye(grid.n))
    x, converged = _inverse_iteration(
        lambda v: scipy.linalg.lu_solve(lu, v / bd), x, bd, 1e-10
    )
    lam = float(np.sum(bd * x * (op @ x)))
    if np.any(x <= 0):
        raise SimplicityViolationError(
            "first eigenfunction changes sign; refine the grid",
            stage="eigen",
        )
    residual = float(np.max(np.abs(op @ x - lam * x)))
    if residual > tol_eig:
        raise EigenSolveError(
            f"eigen residual {residual:.3e} exceeds {tol_eig:.1e}",
            stage="eigen",
            details={
                "residual": residual,
                "lambda": lam,
                "polished": converged,
            },
        )
    return EigenPair(lam, ScalarField(grid, x), residual)


def rayleigh_quotient(m: AxisymMetric, phi: ScalarField) -> float:
    """∫(|∇φ|² + Kφ²) / ∫φ², evaluated as ∫φ(-Δφ + Kφ) / ∫φ²."""
    _check_same_grid(m, phi)
    v = phi.values
    lv = collocation_operator(m) @ v
    dens = m.grid.weights * m.q * m.p
    return float(np.sum(dens * v * lv) / np.sum(dens * v * v))


# ==== Uniformization ====


@dataclass(frozen=True, eq=False)
class IsothermalMap:
    """θ ↦ ϑ with log tan(ϑ/2) = ∫ q/p dθ + c.

    The regular part ρ = q/p - 1/sin θ is integrated as a Chebyshev series,
    so the logarithmic divergence at the poles is handled analytically.
    """

    grid: PolarGrid
    rho_coefficients: np.ndarray
    shift: float
    primitive: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "primitive", cheb.chebint(self.rho_coefficients)
        )

    def xi_regular(self, theta: np.ndarray) -> np.ndarray:
        return -cheb.chebval(np.cos(theta), self.primitive) + self.shift

    def __call__(self, theta):
        t = np.tan(np.asarray(theta, dtype=float) / 2.0)
        return 2.0 * np.arctan(t * np.exp(self.xi_regular(theta)))

    def derivative(self, theta):
        """dϑ/dθ = sin ϑ · (q/p)(θ)."""
        theta = np.asarray(theta, dtype=float)
        x = np.cos(theta)
        rho = np.sin(theta) * cheb.chebval(x, self.rho_coefficients)
        return np.sin(self(theta)) * (1.0 / np.sin(theta) + rho)

    def inverse(self, vartheta: float) -> float:
        return brentq(lambda th: self(th) - vartheta, 0.0, np.pi, xtol=1e-15)


def isothermal_map(m: AxisymMetric) -> IsothermalMap:
    """Isothermal map sending the equatorial area bisector of m to π/2.

    Raises:
        UniformizationError: If the map does not reach both poles
    """
    grid = m.grid
    rho = m.q / m.p - 1.0 / grid.sin
    coeffs = even_coefficients(grid, rho / grid.sin)
    total = area(m)
    bisector = brentq(
        lambda th: cumulative_area(m, th) - 0.5 * total, 0.0, np.pi, xtol=1e-15
    )
    draft = IsothermalMap(grid, coeffs, 0.0)
    shift = -np.log(np.tan(bisector / 2.0)) - draft.xi_regular(bisector)
    res = IsothermalMap(grid, coeffs, float(shift))
    ends = res(np.array([1e-12, np.pi - 1e-12]))
    closes = ends[0] < 1e-6 and ends[1] > np.pi - 1e-6
    if not (np.all(np.isfinite(ends)) and closes):
        raise UniformizationError(
            "isothermal coordinate fails to match the poles",
            stage="conformal",
        )
    return res


def conformal_representation(
    m: AxisymMetric, iso: Optional[IsothermalMap] = None
) -> ConformalData:
    """Write m as e^{2w} r_o² g_* in the coordinates of ``isothermal_map``.

    Raises:
        UniformizationError: If the pulled back exponent is not area
            normalized, which signals a pole-matching failure
    """
    grid = m.grid
    iso = iso or isothermal_map(m)
    r_o = area_radius(m)
    source = np.array([iso.inverse(v) for v in grid.theta])
    p_src = evaluate_odd(grid, m.p, source)
    w = np.log(p_src / (r_o * grid.sin))
    ratio = 0.5 * np.sum(grid.weights * grid.sin * np.exp(2 * w))
    if not np.isfinite(ratio) or abs(ratio - 1.0) > 1e-6:
        raise UniformizationError(
            f"conformal exponent off normalization by {ratio - 1.0:.2e}",
            stage="conformal",
        )
    res = ConformalData.normalized(grid, w, r_o)
    return res


def pullback_metric(
    cd: ConformalData, iso: IsothermalMap, grid: Optional[PolarGrid] = None
) -> AxisymMetric:
    """Pull e^{2w} r_o² g_* back through ``iso`` to the source coordinates."""
    grid = grid or iso.grid
    vt = iso(grid.theta)
    ew = cd.r_o * np.exp(evaluate_even(cd.grid, cd.w, vt))
    p = ew * np.sin(vt)
    q = ew * iso.derivative(grid.theta)
    return AxisymMetric(grid, q, p)
