"""Rotationally symmetric charged metrics ds² + f(s)² g_* on [a, b] × Sⁿ.

Profiles are sampled with their first two derivatives. Constructions that
know the derivatives in closed form store them directly; ``from_samples``
recovers them from f with per-segment not-a-knot cubic splines.

Geometrized units throughout (G = c = 1, charge in length units).
"""

from dataclasses import dataclass
from typing import Dict, NamedTuple, Optional, Union

import numpy as np
from pydash import py_
from scipy.integrate import solve_ivp
from scipy.interpolate import BPoly, CubicSpline
from scipy.optimize import brentq

from . import config
from .errors import DimensionError, ExtremalityError, ParameterError

# Segment tags
NECK = "COLLAR_NECK"
BRIDGE = "BRIDGE"
BENT_RN = "BENT_RN"
RN_TAIL = "RN_TAIL"
PLAIN = "PROFILE"


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Sampled profile f with derivatives, charge and dimension.

    Attributes:
        s: Radial grid, strictly increasing (length)
        f: Profile values, positive (length)
        fprime: df/ds
        fsecond: d²f/ds² (1/length)
        segments: Segment tag per node
        charge: Charge Q of the field E = Q f^{-n} ∂_s
        dim: Sphere dimension n
    """

    s: np.ndarray
    f: np.ndarray
    fprime: np.ndarray
    fsecond: np.ndarray
    segments: np.ndarray
    charge: float
    dim: int = 2

    def __post_init__(self):
        size = self.s.shape
        assert all(
            a.shape == size
            for a in (self.f, self.fprime, self.fsecond, self.segments)
        ), "profile arrays differ in length"
        if self.dim < 2:
            raise DimensionError(f"dimension must be >= 2, got {self.dim}")
        if np.any(np.diff(self.s) <= 0):
            raise ParameterError("s-grid must be strictly increasing")
        if np.any(self.f <= 0):
            raise ParameterError("profile must be positive")

    @classmethod
    def from_samples(
        cls,
        s: np.ndarray,
        f: np.ndarray,
        charge: float,
        dim: int = 2,
        segments: Optional[np.ndarray] = None,
    ) -> "RadialProfile":
        """Profile whose derivatives come from per-segment cubic splines."""
        s = np.asarray(s, dtype=float)
        f = np.asarray(f, dtype=float)
        tags = (
            np.full(s.size, PLAIN, dtype=object)
            if segments is None
            else np.asarray(segments, dtype=object)
        )
        fp = np.empty_like(f)
        fpp = np.empty_like(f)
        for lo, hi in segment_ranges(tags):
            spline = CubicSpline(s[lo:hi], f[lo:hi], bc_type="not-a-knot")
            fp[lo:hi] = spline(s[lo:hi], 1)
            fpp[lo:hi] = spline(s[lo:hi], 2)
        return cls(s, f, fp, fpp, tags, float(charge), dim)

    @property
    def start(self) -> float:
        return float(self.s[0])

    @property
    def end(self) -> float:
        return float(self.s[-1])

    def interpolant(self) -> BPoly:
        """Quintic Hermite interpolant through (f, f', f'') at the nodes."""
        data = np.column_stack([self.f, self.fprime, self.fsecond])
        return BPoly.from_derivatives(self.s, data)

    def restrict(self, start: float, end: float) -> "RadialProfile":
        """Nodes with start <= s <= end."""
        keep = (self.s >= start) & (self.s <= end)
        return self._take(keep)

    def after(self, start: float) -> "RadialProfile":
        """Nodes with s > start."""
        return self._take(self.s > start)

    def shifted(self, offset: float) -> "RadialProfile":
        return RadialProfile(
            self.s + offset,
            self.f,
            self.fprime,
            self.fsecond,
            self.segments,
            self.charge,
            self.dim,
        )

    def with_charge(self, charge: float) -> "RadialProfile":
        return RadialProfile(
            self.s, self.f, self.fprime, self.fsecond, self.segments,
            float(charge), self.dim,
        )

    def _take(self, keep: np.ndarray) -> "RadialProfile":
        return RadialProfile(
            self.s[keep],
            self.f[keep],
            self.fprime[keep],
            self.fsecond[keep],
            self.segments[keep],
            self.charge,
            self.dim,
        )


def segment_ranges(tags: np.ndarray):
    """(start, stop) index pairs of maximal runs of equal tags."""
    breaks = np.flatnonzero(tags[1:] != tags[:-1]) + 1
    edges = np.concatenate([[0], breaks, [tags.size]])
    return list(zip(edges[:-1], edges[1:]))


def concatenate(*pieces: RadialProfile) -> RadialProfile:
    """Join profiles that follow one another on the s-axis."""
    first = pieces[0]
    assert all(
        p.charge == first.charge and p.dim == first.dim for p in pieces
    ), "pieces disagree on charge or dimension"
    pieces = py_.filter(list(pieces), lambda p: p.s.size > 0)
    return RadialProfile(
        np.concatenate([p.s for p in pieces]),
        np.concatenate([p.f for p in pieces]),
        np.concatenate([p.fprime for p in pieces]),
        np.concatenate([p.fsecond for p in pieces]),
        np.concatenate([p.segments for p in pieces]),
        first.charge,
        first.dim,
    )


# ==== Reissner–Nordström ====


@dataclass(frozen=True)
class RNParams:
    """Sub-extremal Reissner–Nordström parameters.

    Attributes:
        mass: m > |Q| (length)
        charge: Q (length)
    """

    mass: float
    charge: float

    def __post_init__(self):
        if self.mass <= abs(self.charge):
            raise ExtremalityError(
                f"need m > |Q|, got m={self.mass}, Q={self.charge}",
                stage="rn",
            )

    @property
    def r_plus(self) -> float:
        return self.mass + np.sqrt(self.mass**2 - self.charge**2)

    @classmethod
    def from_horizon(cls, r_plus: float, charge: float) -> "RNParams":
        """Parameters whose outer horizon has area radius ``r_plus``."""
        return cls((r_plus**2 + charge**2) / (2.0 * r_plus), charge)


class RNSolution:
    """u_{m,Q}(s) on [0, s_max] with u(0) = r_+ and u'(0) = 0.

    Integrates u'' = (m u - Q²)/u³, which is regular at the horizon; the
    first integral u'² = 1 - 2m/u + Q²/u² then serves as the error gauge.
    """

    def __init__(self, params: RNParams, s_max: float):
        self.params = params
        self.s_max = float(s_max)
        m, q2 = params.mass, params.charge**2
        sol = solve_ivp(
            lambda s, y: [y[1], (m * y[0] - q2) / y[0] ** 3],
            (0.0, self.s_max),
            [params.r_plus, 0.0],
            method="DOP853",
            rtol=1e-13,
            atol=1e-14 * params.r_plus,
            dense_output=True,
        )
        assert sol.success, sol.message
        self._dense = sol.sol

    def u(self, s):
        return self._dense(s)[0]

    def du(self, s):
        return self._dense(s)[1]

    def d2u(self, s):
        u = self.u(s)
        return (self.params.mass * u - self.params.charge**2) / u**3

    def jet(self, s):
        """(u, u', u''); u' comes from the first integral off the horizon."""
        u = self.u(s)
        m, q = self.params.mass, self.params.charge
        lapse = 1.0 - 2.0 * m / u + q**2 / u**2
        du = np.where(
            lapse > 1e-8, np.sqrt(np.clip(lapse, 0.0, None)), self.du(s)
        )
        return u, du, (m * u - q**2) / u**3

    def first_integral_residual(self, s) -> np.ndarray:
        u = self.u(s)
        m, q = self.params.mass, self.params.charge
        return self.du(s) ** 2 - (1.0 - 2.0 * m / u + q**2 / u**2)

    def s_at(self, radius: float) -> float:
        """The s with u(s) = radius (radius >= r_+)."""
        if radius <= self.params.r_plus:
            return 0.0
        assert self.u(self.s_max) > radius, "extend s_max"
        return brentq(
            lambda s: self.u(s) - radius, 0.0, self.s_max, xtol=1e-15
        )


def rn_profile(p: RNParams, s_max: float, h: float) -> RadialProfile:
    """Sampled RN profile from the horizon out to ``s_max``.

    The DOP853 dense output is evaluated on the uniform nodes s_k = k h
    (with h shrunk so they end at ``s_max``), so the samples stand in for
    a fixed-step integration at step h. Every node satisfies the first
    integral u'² = 1 - 2m/u + Q²/u² to ``config.TOL_RN_RESIDUAL``.
    """
    if s_max <= 0 or h <= 0:
        raise ParameterError(f"need s_max, h > 0: {s_max=}, {h=}")
    sol = RNSolution(p, s_max)
    s = np.linspace(0.0, s_max, int(np.ceil(s_max / h)) + 1)
    residual = np.max(np.abs(sol.first_integral_residual(s)))
    assert residual <= config.TOL_RN_RESIDUAL, f"{residual=}"
    res = RadialProfile(
        s,
        sol.u(s),
        sol.du(s),
        sol.d2u(s),
        np.full(s.size, RN_TAIL, dtype=object),
        p.charge,
        2,
    )
    return res


# ==== Curvature and fields ====


def omega(f, fprime, charge: float, dim: int = 2):
    """Ω[f] = (n-1)/(2f) (1 - f'² - Q²/f^{2(n-1)})."""
    return (dim - 1) / (2.0 * f) * (
        1.0 - fprime**2 - charge**2 / f ** (2 * (dim - 1))
    )


def scalar_curvature(pr: RadialProfile) -> np.ndarray:
    """R(γ) = n/f² [(n-1) - (n-1) f'² - 2 f f'']."""
    n = pr.dim
    return n / pr.f**2 * (
        (n - 1) - (n - 1) * pr.fprime**2 - 2.0 * pr.f * pr.fsecond
    )


class ElectricField(NamedTuple):
    normal: np.ndarray
    norm_sq: np.ndarray
    divergence: np.ndarray


def electric_field(pr: RadialProfile) -> ElectricField:
    """E = Q f^{-n} ∂_s, its squared norm and discrete divergence."""
    n = pr.dim
    normal = pr.charge / pr.f**n
    volume = pr.f**n
    if pr.s.size > 2:
        div = np.gradient(volume * normal, pr.s, edge_order=2) / volume
    else:
        div = np.zeros_like(normal)
    return ElectricField(normal, normal**2, div)


def dec_margin(pr: RadialProfile) -> np.ndarray:
    """Ω[f] - f''; DEC holds where this is non-negative."""
    return omega(pr.f, pr.fprime, pr.charge, pr.dim) - pr.fsecond


def charged_hawking_values(pr: RadialProfile) -> np.ndarray:
    if pr.dim != 2:
        raise DimensionError("charged Hawking mass needs n = 2")
    return hawking_mass_slice(pr.f, pr.fprime, pr.charge)


def hawking_mass_slice(f, fprime, charge: float):
    """(f/2)(1 + Q²/f² - f'²) of a coordinate sphere."""
    return 0.5 * f * (1.0 + charge**2 / f**2 - fprime**2)


def charged_hawking_profile(pr: RadialProfile, s: float) -> float:
    """Charged Hawking mass of the slice {s} × S².

    Raises:
        DimensionError: If the profile is not three dimensional
    """
    if pr.dim != 2:
        raise DimensionError("charged Hawking mass needs n = 2")
    hit = np.flatnonzero(pr.s == s)
    if hit.size:
        f, fp = pr.f[hit[0]], pr.fprime[hit[0]]
    else:
        poly = pr.interpolant()
        f, fp = poly(s), poly.derivative()(s)
    return float(hawking_mass_slice(f, fp, pr.charge))


def bridge_conditions(
    f: float, fprime: float, charge: float, dim: int = 2
) -> Dict[str, bool]:
    """Endpoint inequalities a bridge needs on either side."""
    q = abs(charge)
    res = {
        "radius_exceeds_charge": bool(f ** (dim - 1) > q),
        "slope_bound": bool(
            1.0 + charge**2 / f ** (2 * (dim - 1)) - 2.0 * q / f > fprime**2
        ),
    }
    if dim == 2:
        res["hawking_exceeds_charge"] = bool(
            hawking_mass_slice(f, fprime, charge) > q
        )
    return res


def hypotheses_34(
    pr: RadialProfile, endpoint: Union[str, float] = "end"
) -> Dict[str, bool]:
    """Bridge hypotheses (3)/(4) at a boundary of the profile."""
    if endpoint == "end":
        i = -1
    elif endpoint == "start":
        i = 0
    else:
        hits = np.flatnonzero(pr.s == endpoint)
        assert hits.size, f"{endpoint=} is not a grid node"
        i = int(hits[0])
    return bridge_conditions(pr.f[i], pr.fprime[i], pr.charge, pr.dim)


# ==== Quasi-local masses ====


def hawking_mass_surface(
    surface_area: float, charge: float, h2_integral: float
) -> float:
    """√(|Σ|/16π)(1 + 4πQ²/|Σ| - (1/16π)∫H²)."""
    return float(
        np.sqrt(surface_area / (16.0 * np.pi))
        * (
            1.0
            + 4.0 * np.pi * charge**2 / surface_area
            - h2_integral / (16.0 * np.pi)
        )
    )


def penrose_bound(surface_area: float, charge: float) -> float:
    """√(A/16π) + √(π/A) Q², the charged Penrose lower bound."""
    return float(
        np.sqrt(surface_area / (16.0 * np.pi))
        + np.sqrt(np.pi / surface_area) * charge**2
    )


def minimal_bartnik_bound(r_o: float, charge: float) -> float:
    """Charged Hawking mass of minimal data with area radius r_o."""
    return r_o / 2.0 + charge**2 / (2.0 * r_o)


def area_charge_check(r_o: float, charge: float, strict: bool = True) -> bool:
    """4π|Σ| >= 16π²Q², i.e. |Q| <= r_o (strict form Q² < r_o²)."""
    if strict:
        return bool(charge**2 < r_o**2)
    return bool(abs(charge) <= r_o)
