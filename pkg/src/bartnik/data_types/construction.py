"""Data types for the construction stages.

This module defines the reports emitted while a collar is assembled and
while rotationally symmetric pieces are bent and bridged together.
"""

from typing import Dict, Optional, TypedDict


class SelectionReport(TypedDict):
    """Amplitude and neck parameter chosen for a collar.

    Attributes:
        amplitude: Lapse amplitude A
        epsilon: Neck parameter ε of F(t) = (1 + εt²)^{1/2}
        kappa: min_t λ(t) along the normalized path
        alpha: (1/4) max |g'|²
        beta: r_o² min K (reported only)
        inf_u2: inf u² over the path
        sup_dlogu: sup |∂_t log u|
        mass_start: Charged Hawking mass of the t = 0 slice
        mass_end: Charged Hawking mass of the t = 1 slice
        conditions: The three neck conditions and whether each holds
    """

    amplitude: float
    epsilon: float
    kappa: float
    alpha: float
    beta: float
    inf_u2: float
    sup_dlogu: float
    mass_start: float
    mass_end: float
    conditions: Dict[str, bool]


class BendReport(TypedDict):
    """A strict-DEC bend of a profile in front of s₀.

    Attributes:
        s0: Bend location; the profile is unchanged from here on
        delta: Bend length δ (0 when no bend was needed)
        width: Transition width ℓ of σ
        k_delta: σ(s₀ - δ)
        p_delta: σ'(s₀ - δ)² - 1
        min_margin: Smallest DEC margin on [s₀ - δ, s₀)
        floor_ok: f̃(s₀ - δ) > α_floor (None without a floor)
        slope_ok: f̃'(s₀ - δ) < f'(s₀) (None when f''(s₀) <= 0)
    """

    s0: float
    delta: float
    width: float
    k_delta: float
    p_delta: float
    min_margin: float
    floor_ok: Optional[bool]
    slope_ok: Optional[bool]


class JunctionReport(TypedDict):
    """A bridge between two profiles.

    Attributes:
        length: Gap length L = a₂ - b₁ after translation
        offset: Shift applied to the right profile's s-grid
        equal_slopes: Whether f₁'(b₁) = f₂'(a₂)
        gamma: Exponent of the slope family ζ
        epsilon: Accepted mollification scale
        d: One third of the smallest C^{1,1} DEC margin
        sup_omega_change: sup |Ω[f̃] - Ω[f_ε]| over the modified zone
        min_margin: Smallest DEC margin over the modified zone
        zone_start: First modified s
        zone_end: Last modified s
    """

    length: float
    offset: float
    equal_slopes: bool
    gamma: float
    epsilon: float
    d: float
    sup_omega_change: float
    min_margin: float
    zone_start: float
    zone_end: float


class AttachmentReport(TypedDict):
    """Gluing of a neck to a Reissner–Nordström exterior.

    Attributes:
        mass: Exterior mass m_e
        neck_mass: Charged Hawking mass m_* of the neck's outer slice
        mu: 2(m_e - m_*)/f(b)
        above_horizon: Whether f(b) >= r_+(m_e, Q)
        s_attach: Attachment point s_ε on the exterior
        eps_att: u(s_ε) - f(b) (0 below the horizon)
        bent_slice_mass: Charged Hawking mass of the bent slice s_ε - δ
        bend: The bend of the exterior
        bridge: The bridge from the neck to the bent exterior
    """

    mass: float
    neck_mass: float
    mu: float
    above_horizon: bool
    s_attach: float
    eps_att: float
    bent_slice_mass: float
    bend: BendReport
    bridge: JunctionReport
