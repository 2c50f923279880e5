"""Bridges, bends and the gluing of a neck to a Reissner–Nordström exterior.

A bridge joins two strictly DEC profiles f₁ on [a₁, b₁] and f₂ on [a₂, b₂]:
the right profile is translated, the gap is filled with the primitive of a
decreasing slope ζ, and the resulting C^{1,1} function is mollified near
the gap while being left untouched on the outer halves of both pieces.

A bend reparametrizes a profile in front of s₀ by a map σ with σ' > 1 so
that an equality case of the DEC becomes strict there.
"""

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import BPoly
from scipy.optimize import brentq

from . import config
from .data_types.construction import (
    AttachmentReport,
    BendReport,
    JunctionReport,
)
from .errors import (
    BendPreconditionError,
    BendSearchError,
    DimensionError,
    EpsilonSearchError,
    GlueHypothesisError,
    MassTooSmallError,
    MollificationError,
    ParameterError,
    UngluableError,
    ZetaConstructionError,
)
from .rotsym_core import (
    BENT_RN,
    BRIDGE,
    RadialProfile,
    RNParams,
    RNSolution,
    bridge_conditions,
    concatenate,
    dec_margin,
    hawking_mass_slice,
    omega,
    rn_profile,
)
from .smoothstep import smoothstep, smoothstep_jet

Jet = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray, np.ndarray]]


def profile_jet(pr: RadialProfile) -> Jet:
    """(f, f', f'') anywhere on the profile via its quintic interpolant."""
    poly = pr.interpolant()
    d1, d2 = poly.derivative(), poly.derivative(2)
    return lambda s: (poly(s), d1(s), d2(s))


# ==== Translation ====


class Translation(NamedTuple):
    length: float
    offset: float
    equal_slopes: bool


def gap_length(
    left_slope: float, right_slope: float, gap: float
) -> Tuple[float, bool]:
    """Length L of the gap [b₁, a₂] for the given endpoint slopes.

    Returns:
        (L, equal_slopes); with unequal slopes L satisfies
        f₁'(b₁) L > gap > f₂'(a₂) L

    Raises:
        GlueHypothesisError: If gap <= 0 or f₂'(a₂) > f₁'(b₁)
        UngluableError: If no positive L exists (e.g. both slopes zero)
    """
    if gap <= 0 or right_slope > left_slope:
        raise GlueHypothesisError(
            f"need f₁(b₁) < f₂(a₂) and f₂'(a₂) <= f₁'(b₁): "
            f"{gap=}, {left_slope=}, {right_slope=}",
            condition=2,
            stage="glue",
        )
    if left_slope == right_slope:
        if left_slope <= 0:
            raise UngluableError(
                f"no translation closes a gap of {gap} with slope "
                f"{left_slope}",
                stage="glue",
            )
        return gap / left_slope, True
    if right_slope > 0:
        length = gap / (0.5 * (left_slope + right_slope))
    elif left_slope > 0:
        length = 2.0 * gap / left_slope
    else:
        raise UngluableError(
            f"slopes {left_slope}, {right_slope} cannot climb a gap of {gap}",
            stage="glue",
        )
    assert left_slope * length > gap > right_slope * length
    return length, False


def translate_for_gluing(
    left: RadialProfile, right: RadialProfile
) -> Translation:
    """Shift for the right profile's s-grid so that a₂ = b₁ + L."""
    gap = float(right.f[0] - left.f[-1])
    length, equal = gap_length(
        float(left.fprime[-1]), float(right.fprime[0]), gap
    )
    offset = left.end + length - right.start
    return Translation(length, offset, equal)


# ==== Bridge slope ====


@dataclass(frozen=True)
class BridgeSlope:
    """ζ(y) = c₂ + (c₁ - c₂) S(1 - y/L)^γ for y = s - b₁ in [0, L].

    Attributes:
        left: c₁ = f₁'(b₁)
        right: c₂ = f₂'(a₂)
        length: L
        gamma: Exponent fixing the integral of ζ
    """

    left: float
    right: float
    length: float
    gamma: float

    def __call__(self, y):
        base = smoothstep(1.0 - np.asarray(y, dtype=float) / self.length)
        return self.right + (self.left - self.right) * base**self.gamma

    def derivative(self, y):
        s, ds, _ = smoothstep_jet(
            1.0 - np.asarray(y, dtype=float) / self.length
        )
        with np.errstate(divide="ignore", over="ignore"):
            power = np.where(s > 0, self.gamma * s ** (self.gamma - 1), 0.0)
        return -(self.left - self.right) / self.length * power * ds

    def integral(self) -> float:
        """∫₀^L ζ by adaptive quadrature."""
        res = quad(
            lambda y: float(self(y)),
            0.0,
            self.length,
            epsabs=1e-14,
            epsrel=1e-13,
            limit=200,
        )[0]
        return res


def slope_fraction(gamma: float) -> float:
    """∫₀¹ S(x)^γ dx, decreasing from 1 to 0 as γ runs over (0, ∞)."""
    res = quad(
        lambda x: float(smoothstep(x)) ** gamma,
        0.0,
        1.0,
        epsabs=1e-15,
        epsrel=1e-13,
        limit=200,
    )[0]
    return res


def make_bridge_zeta(
    left_slope: float, right_slope: float, gap: float, length: float
) -> BridgeSlope:
    """Decreasing ζ from f₁'(b₁) to f₂'(a₂) whose integral over [0, L] is gap.

    Raises:
        ZetaConstructionError: If the required integral lies outside what
            the exponent family reaches (translation outside the open band)
    """
    if length <= 0:
        raise ZetaConstructionError(f"gap length must be positive: {length}")
    if left_slope == right_slope:
        if abs(gap - left_slope * length) > 1e-12 * max(1.0, abs(gap)):
            raise ZetaConstructionError(
                f"constant slope {left_slope} over {length} misses {gap=}",
                stage="glue",
            )
        return BridgeSlope(left_slope, right_slope, length, 1.0)
    if right_slope > left_slope:
        raise ZetaConstructionError(
            "slope would have to increase across the gap", stage="glue"
        )
    target = (gap / length - right_slope) / (left_slope - right_slope)
    lo, hi = np.log(1e-3), np.log(1e3)
    residual = lambda y: slope_fraction(np.exp(y)) - target  # noqa: E731
    if not residual(hi) < 0 < residual(lo):
        raise ZetaConstructionError(
            f"mean slope fraction {target} is out of reach",
            stage="glue",
            details={"target": target, "length": length, "gap": gap},
        )
    gamma = float(np.exp(brentq(residual, lo, hi, xtol=1e-14, rtol=1e-14)))
    res = BridgeSlope(left_slope, right_slope, length, gamma)
    return res


# ==== C^{1,1} join ====


@dataclass(frozen=True, eq=False)
class BridgeSpec:
    """Inputs of a bridge.

    Attributes:
        left: f₁ on [a₁, b₁]
        right: f₂ on [a₂, b₂] before translation
        charge: Bridge charge, Q² <= min(Q₁², Q₂²)
        ds: Step of the resampled zone (defaults to the left spacing)
    """

    left: RadialProfile
    right: RadialProfile
    charge: float
    ds: Optional[float] = None

    def __post_init__(self):
        if self.left.dim != self.right.dim:
            raise DimensionError("bridge pieces differ in dimension")
        bound = min(abs(self.left.charge), abs(self.right.charge))
        if abs(self.charge) > bound * (1 + 1e-15):
            raise ParameterError(
                f"bridge charge {self.charge} exceeds min(|Q₁|, |Q₂|)={bound}",
                stage="glue",
            )

    @property
    def dim(self) -> int:
        return self.left.dim


def check_bridge_hypotheses(spec: BridgeSpec) -> None:
    """Raise GlueHypothesisError with the first violated hypothesis."""
    left, right = spec.left, spec.right
    gap = right.f[0] - left.f[-1]
    if not (gap > 0 and right.fprime[0] <= left.fprime[-1]):
        raise GlueHypothesisError(
            "endpoint values or slopes are out of order",
            condition=2,
            stage="glue",
            details={"gap": float(gap)},
        )
    ends = (
        (3, left.f[-1], left.fprime[-1], left.charge),
        (4, right.f[0], right.fprime[0], right.charge),
    )
    for condition, f, fp, q in ends:
        checks = bridge_conditions(f, fp, q, spec.dim)
        if not (checks["radius_exceeds_charge"] and checks["slope_bound"]):
            raise GlueHypothesisError(
                f"endpoint f={f}, f'={fp} too small for charge {q}",
                condition=condition,
                stage="glue",
                details={"checks": checks},
            )
    for pr in (left, right):
        worst = float(np.min(dec_margin(pr)))
        if worst <= 0:
            raise GlueHypothesisError(
                f"piece is not strictly DEC (min margin {worst})",
                condition=1,
                stage="glue",
            )


class _Join:
    """f̃: f₁ on [a₁, b₁], the bridge on (b₁, a₂), f₂ on [a₂, b₂]."""

    def __init__(
        self, left: RadialProfile, right: RadialProfile, slope: BridgeSlope
    ):
        self.b1, self.a2 = left.end, right.start
        y = np.linspace(0.0, slope.length, config.BRIDGE_SAMPLES)
        ramp = BPoly.from_derivatives(
            y, np.column_stack([slope(y), slope.derivative(y)])
        )
        lift = ramp.antiderivative()
        base = float(left.f[-1])
        drop = abs(float(lift(slope.length)) - (right.f[0] - base))
        if drop > 1e-10 * max(1.0, right.f[0] - base):
            raise ZetaConstructionError(
                f"bridge misses the right endpoint by {drop}", stage="glue"
            )
        curve = ramp.derivative()
        self.pieces = (
            profile_jet(left),
            lambda s: (
                base + lift(s - self.b1),
                ramp(s - self.b1),
                curve(s - self.b1),
            ),
            profile_jet(right),
        )

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        out = [np.empty_like(s) for _ in range(3)]
        masks = (s <= self.b1, (s > self.b1) & (s < self.a2), s >= self.a2)
        for mask, jet in zip(masks, self.pieces):
            if np.any(mask):
                for o, v in zip(out, jet(s[mask])):
                    o[mask] = v
        return tuple(out)

    def one_sided(self, s: float):
        """Left and right limits of f̃'' at a junction."""
        left_side = self.pieces[0 if s == self.b1 else 1](np.array([s]))
        right_side = self.pieces[1 if s == self.b1 else 2](np.array([s]))
        return left_side, right_side


# ==== Mollification ====


def _bump(z):
    z = np.asarray(z, dtype=float)
    inside = np.abs(z) < 1
    res = np.zeros_like(z)
    res[inside] = np.exp(-1.0 / (1.0 - z[inside] ** 2))
    return res


def mollify(
    join: Callable, s: np.ndarray, eps: float, kinks: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(ρ_ε∗f̃, ρ_ε∗f̃', ρ_ε∗f̃'') with Gauss–Legendre split at the kinks."""
    xi, wi = np.polynomial.legendre.leggauss(config.MOLLIFIER_NODES)
    out = [np.empty_like(s) for _ in range(3)]
    for lo in range(0, s.size, 2048):
        x = s[lo : lo + 2048]
        cuts = np.clip((x[:, None] - kinks[None, :]) / eps, -1.0, 1.0)
        edges = np.sort(
            np.column_stack([-np.ones(x.size), cuts, np.ones(x.size)]), axis=1
        )
        half = 0.5 * (edges[:, 1:] - edges[:, :-1])
        mid = 0.5 * (edges[:, 1:] + edges[:, :-1])
        z = mid[..., None] + half[..., None] * xi
        weights = half[..., None] * wi * _bump(z)
        values = join((x[:, None, None] - eps * z).ravel())
        norm = weights.sum(axis=(1, 2))
        for o, v in zip(out, values):
            o[lo : lo + 2048] = (weights * v.reshape(z.shape)).sum(
                axis=(1, 2)
            ) / norm
    return tuple(out)


def _cutoff(s, m1, b1, a2, m2):
    left, dl, d2l = smoothstep_jet((s - m1) / (b1 - m1))
    right, dr, d2r = smoothstep_jet((m2 - s) / (m2 - a2))
    on_left, on_right = s < b1, s > a2
    chi = np.where(on_left, left, np.where(on_right, right, 1.0))
    dchi = np.where(
        on_left, dl / (b1 - m1), np.where(on_right, -dr / (m2 - a2), 0.0)
    )
    d2chi = np.where(
        on_left,
        d2l / (b1 - m1) ** 2,
        np.where(on_right, d2r / (m2 - a2) ** 2, 0.0),
    )
    return chi, dchi, d2chi


def _zone_nodes(m1, m2, kinks, step, eps):
    count = max(int(np.ceil((m2 - m1) / step)), 2)
    parts = [np.linspace(m1, m2, count + 1), kinks]
    fine = eps / 8.0
    for k in kinks:
        parts.append(np.arange(k - 2 * eps, k + 2 * eps + fine / 2, fine))
    nodes = np.unique(np.concatenate(parts))
    return nodes[(nodes > m1) & (nodes < m2)]


class GlueResult(NamedTuple):
    profile: RadialProfile
    translation: Translation
    slope: BridgeSlope
    report: JunctionReport


def glue_profiles(spec: BridgeSpec) -> GlueResult:
    """Strictly DEC bridge from f₁ to the translated f₂.

    The output equals f₁ on [a₁, (a₁+b₁)/2] and f₂ on [(a₂+b₂)/2, b₂]
    sample for sample; the nodes in between are tagged ``BRIDGE``.

    Raises:
        GlueHypothesisError: With the violated hypothesis number
        MollificationError: If no mollification scale keeps the DEC strict
    """
    check_bridge_hypotheses(spec)
    left = spec.left
    move = translate_for_gluing(left, spec.right)
    right = spec.right.shifted(move.offset)
    gap = float(right.f[0] - left.f[-1])
    slope = make_bridge_zeta(
        float(left.fprime[-1]), float(right.fprime[0]), gap, move.length
    )
    join = _Join(left, right, slope)
    q, n = spec.charge, spec.dim

    a1, b1, a2, b2 = left.start, left.end, right.start, right.end
    m1, m2 = 0.5 * (a1 + b1), 0.5 * (a2 + b2)
    kinks = np.array([b1, a2])
    ds = spec.ds or float(np.median(np.diff(left.s)))
    step = min(ds, move.length / 64, (b1 - m1) / 16, (m2 - a2) / 16)

    # C^{1,1} margin, with one-sided values at the two junctions
    base_nodes = _zone_nodes(m1, m2, kinks, step, step)
    f, fp, fpp = join(base_nodes)
    floor = [np.min(omega(f, fp, q, n) - fpp)]
    for k in kinks:
        for fk, fpk, fppk in join.one_sided(k):
            floor.append(float(omega(fk, fpk, q, n)[0] - fppk[0]))
    d = float(min(floor)) / 3.0
    if d <= 0:
        raise MollificationError(
            f"C^{{1,1}} join is not strictly DEC ({d=})", stage="glue"
        )

    eps = 0.25 * min(b1 - m1, m2 - a2, move.length)
    eps_floor = config.HALVING_FLOOR * max(1.0, b2 - a1)
    while eps >= eps_floor:
        nodes = _zone_nodes(m1, m2, kinks, step, eps)
        f, fp, fpp = join(nodes)
        g, gp, gpp = mollify(join, nodes, eps, kinks)
        chi, dchi, d2chi = _cutoff(nodes, m1, b1, a2, m2)
        fe = f + chi * (g - f)
        fep = fp + chi * (gp - fp) + dchi * (g - f)
        fepp = (
            fpp
            + chi * (gpp - fpp)
            + 2 * dchi * (gp - fp)
            + d2chi * (g - f)
        )
        change = float(
            np.max(np.abs(omega(fe, fep, q, n) - omega(f, fp, q, n)))
        )
        margin = float(np.min(omega(fe, fep, q, n) - fepp))
        if change < d and margin > 0:
            break
        eps /= 2
    else:
        raise MollificationError(
            f"mollification scale fell below {eps_floor}",
            stage="glue",
            details={"d": d},
        )

    zone = RadialProfile(
        nodes, fe, fep, fepp, np.full(nodes.size, BRIDGE, dtype=object), q, n
    )
    res_profile = concatenate(
        left.restrict(a1, m1).with_charge(q),
        zone,
        right.restrict(m2, b2).with_charge(q),
    )
    report: JunctionReport = {
        "length": move.length,
        "offset": move.offset,
        "equal_slopes": move.equal_slopes,
        "gamma": slope.gamma,
        "epsilon": eps,
        "d": d,
        "sup_omega_change": change,
        "min_margin": margin,
        "zone_start": float(nodes[0]),
        "zone_end": float(nodes[-1]),
    }
    return GlueResult(res_profile, move, slope, report)


# ==== Bending ====


@dataclass(frozen=True)
class BendSpec:
    """Reparametrization σ of [s₀ - δ, s₀).

    With x = (s₀ - s)/ℓ and c = ``config.BEND_GAIN``,
    σ' = 1 + c x³ and σ(s) = s - c ℓ x⁴/4, so σ(s₀) = s₀, σ'(s₀) = 1 and
    σ''(s₀) = 0; σ(s) = s for s >= s₀. The bent profile is C² at s₀ and
    its margin gain vanishes only to second order there, so it stays
    representable at every node in front of s₀.

    Attributes:
        s0: Bend location
        delta: Bend length δ
        width: Transition width ℓ
        alpha_floor: Lower bound for f̃(s₀ - δ), if any
        k_delta: σ(s₀ - δ)
    """

    s0: float
    delta: float
    width: float
    alpha_floor: Optional[float] = None
    k_delta: float = 0.0

    def __post_init__(self):
        if self.delta < 0 or self.width < 0:
            raise ParameterError(
                f"bend needs δ, ℓ >= 0: {self.delta=}, {self.width=}"
            )

    @property
    def p_delta(self) -> float:
        """σ'(s₀ - δ)² - 1."""
        if self.delta == 0:
            return 0.0
        sd = bend_map(self, np.array([self.s0 - self.delta]))[1]
        return float(sd[0] ** 2 - 1)


def bend_map(spec: BendSpec, s: np.ndarray):
    """(σ, σ', σ'') at s."""
    s = np.asarray(s, dtype=float)
    if spec.width == 0:
        return s.copy(), np.ones_like(s), np.zeros_like(s)
    c = config.BEND_GAIN
    x = np.clip((spec.s0 - s) / spec.width, 0.0, None)
    sigma = s - 0.25 * c * spec.width * x**4
    return sigma, 1.0 + c * x**3, -3.0 * c * x**2 / spec.width


def _gain_factor(spec: BendSpec, s, f, fp, fpp, dim):
    """Margin gain of the bend divided by c x²."""
    x = np.clip((spec.s0 - s) / spec.width, 0.0, None)
    curl = fpp + (dim - 1) * fp**2 / (2.0 * f)
    return 3.0 * fp / spec.width - (2.0 * x + config.BEND_GAIN * x**4) * curl


class BendResult(NamedTuple):
    profile: RadialProfile
    spec: BendSpec
    report: BendReport


def bend_profile(
    pr: RadialProfile,
    s0: float,
    alpha_floor: Optional[float] = None,
    jet: Optional[Jet] = None,
    h: Optional[float] = None,
) -> BendResult:
    """Make the DEC strict on [s₀ - δ, s₀) and keep the profile beyond s₀.

    δ is halved until the sampled margin Ω[f̃] - f̃'' is positive at every
    bent node and the floor and slope conditions hold.

    Args:
        pr: Profile with margin >= 0 in front of s₀
        s0: Bend location, f'(s₀) > 0
        alpha_floor: Optional lower bound for f̃(s₀ - δ)
        jet: Exact (f, f', f'') of the profile; defaults to its interpolant
        h: Sampling step of the bent region

    Returns:
        The bent profile (from s₀ - δ on), the bend and its report

    Raises:
        BendPreconditionError: If f'(s₀) <= 0 or the margin is negative
        BendSearchError: If δ falls below the halving floor
    """
    jet = jet or profile_jet(pr)
    q, n = pr.charge, pr.dim
    f0, fp0, fpp0 = (float(np.asarray(v)) for v in jet(np.array(s0)))
    if fp0 <= 0:
        raise BendPreconditionError(
            f"bend needs f'(s₀) > 0, got {fp0}", stage="bend"
        )
    margin0 = float(omega(f0, fp0, q, n) - fpp0)
    if margin0 < -config.TOL_MARGIN_FLOOR:
        raise BendPreconditionError(
            f"margin {margin0} at s₀ is negative", stage="bend"
        )
    if margin0 > config.TOL_STRICT:
        spec = BendSpec(s0, 0.0, 0.0, alpha_floor, s0)
        report: BendReport = {
            "s0": s0,
            "delta": 0.0,
            "width": 0.0,
            "k_delta": s0,
            "p_delta": 0.0,
            "min_margin": margin0,
            "floor_ok": None,
            "slope_ok": None,
        }
        return BendResult(pr, spec, report)

    h = h or float(np.median(np.diff(pr.s)))
    need_floor = alpha_floor is not None and f0 > alpha_floor
    need_slope = fpp0 > 0
    delta = 0.1 * (s0 - pr.start)
    delta_floor = config.HALVING_FLOOR * max(1.0, s0 - pr.start)
    while delta >= delta_floor:
        width = config.BEND_WIDTH_FACTOR * delta
        count = int(np.ceil(delta / min(h, delta / config.BEND_SAMPLES)))
        s = s0 - delta + np.arange(count) * (delta / count)
        trial = BendSpec(s0, delta, width, alpha_floor)
        sigma, sd, sdd = bend_map(trial, s)
        f, fp, fpp = jet(sigma)
        base = omega(f, fp, q, n) - fpp
        ft, ftp, ftpp = f, fp * sd, fpp * sd**2 + fp * sdd
        bent_margin = omega(ft, ftp, q, n) - ftpp
        strict = bool(
            np.all(base >= -config.TOL_MARGIN_FLOOR)
            and np.all(_gain_factor(trial, s, f, fp, fpp, n) > 0)
            and np.all(bent_margin > 0)
        )
        floor_ok = bool(ft[0] > alpha_floor) if need_floor else None
        slope_ok = bool(ftp[0] < fp0) if need_slope else None
        if strict and floor_ok is not False and slope_ok is not False:
            break
        delta /= 2
    else:
        raise BendSearchError(
            f"bend length fell below {delta_floor}",
            stage="bend",
            details={"s0": s0},
        )

    spec = BendSpec(s0, delta, width, alpha_floor, float(sigma[0]))
    bent = RadialProfile(
        s, ft, ftp, ftpp, np.full(s.size, BENT_RN, dtype=object), q, n
    )
    res_profile = concatenate(bent, pr.restrict(s0, pr.end))
    report = {
        "s0": s0,
        "delta": delta,
        "width": width,
        "k_delta": spec.k_delta,
        "p_delta": spec.p_delta,
        "min_margin": float(np.min(bent_margin)),
        "floor_ok": floor_ok,
        "slope_ok": slope_ok,
    }
    return BendResult(res_profile, spec, report)


# ==== Gluing to Reissner–Nordström ====


class AttachmentResult(NamedTuple):
    profile: RadialProfile
    params: RNParams
    report: AttachmentReport


def glue_to_rn(
    neck: RadialProfile,
    mass: float,
    charge: Optional[float] = None,
    ds: float = config.DS_DEFAULT,
    tail_length: Optional[float] = None,
    verbose: bool = False,
) -> AttachmentResult:
    """Attach a Reissner–Nordström exterior of mass ``mass`` to a neck.

    Args:
        neck: Strictly DEC profile on [a, b] with f'(b) > 0 and
            m_H(Σ_b) > |Q|
        mass: Exterior mass m_e
        charge: Exterior charge (defaults to the neck's)
        ds: Radial step of the exterior
        tail_length: Extent of the sampled exterior (defaults to 20 m_e)
        verbose: Print the chosen attachment point

    Returns:
        Neck, bridge, bent exterior and exterior tail as one profile

    Raises:
        MassTooSmallError: If m_e <= m_H(Σ_b)
        GlueHypothesisError: If the neck or the bent slice fails a bridge
            hypothesis
    """
    if neck.dim != 2:
        raise DimensionError("Reissner–Nordström gluing needs n = 2")
    q = neck.charge if charge is None else float(charge)
    f_b, fp_b = float(neck.f[-1]), float(neck.fprime[-1])
    neck_mass = float(hawking_mass_slice(f_b, fp_b, q))
    if mass <= neck_mass:
        raise MassTooSmallError(
            f"exterior mass {mass} must exceed the neck mass {neck_mass}",
            stage="glue",
            details={"mass": mass, "neck_mass": neck_mass},
        )
    if not (fp_b > 0 and f_b > abs(q) and neck_mass > abs(q)):
        raise GlueHypothesisError(
            f"neck end f={f_b}, f'={fp_b}, m_H={neck_mass} unfit for Q={q}",
            condition=3,
            stage="glue",
        )
    params = RNParams(mass, q)
    r_plus = params.r_plus
    mu = 2.0 * (mass - neck_mass) / f_b
    s_max = tail_length or 20.0 * mass + 2.0 * f_b
    sol = RNSolution(params, s_max)
    floor = config.HALVING_FLOOR * f_b

    above = f_b >= r_plus
    if above:
        eps_att = 0.1 * f_b
        while eps_att >= floor:
            s0 = sol.s_at(f_b + eps_att)
            if sol.jet(s0)[1] ** 2 < fp_b**2 - mu / 2:
                break
            eps_att /= 2
        else:
            raise EpsilonSearchError(
                "no attachment radius above the neck", stage="glue"
            )
    else:
        eps_att = 0.0
        s0 = 0.1 * r_plus
        while sol.du(s0) > fp_b / 2:
            s0 /= 2
            if s0 < floor:
                raise EpsilonSearchError(
                    "no attachment point near the horizon", stage="glue"
                )
    if verbose:
        print(f"  attaching at {s0=:.6g} ({above=}, {eps_att=:.3g})")

    exterior = rn_profile(params, s_max, ds)
    bend = bend_profile(
        exterior, float(s0), alpha_floor=f_b, jet=sol.jet, h=ds
    )
    assert bend.spec.delta > 0, "exterior is DEC-critical and must be bent"
    piece = bend.profile.restrict(
        bend.profile.start, s0 - bend.spec.delta / 2
    )
    bent_mass = float(hawking_mass_slice(piece.f[0], piece.fprime[0], q))
    if bent_mass <= abs(q):
        raise GlueHypothesisError(
            f"bent slice mass {bent_mass} does not exceed |Q|={abs(q)}",
            condition=4,
            stage="glue",
        )
    glued = glue_profiles(BridgeSpec(neck.with_charge(q), piece, q, ds))
    rest = bend.profile.after(piece.end).shifted(glued.translation.offset)
    res_profile = concatenate(glued.profile, rest)
    report: AttachmentReport = {
        "mass": mass,
        "neck_mass": neck_mass,
        "mu": mu,
        "above_horizon": bool(above),
        "s_attach": float(s0),
        "eps_att": eps_att,
        "bent_slice_mass": bent_mass,
        "bend": bend.report,
        "bridge": glued.report,
    }
    return AttachmentResult(res_profile, params, report)
