"""Data types for admissibility and verification reports."""

from typing import Dict, List, TypedDict


class GateReport(TypedDict):
    """Admissibility of Bartnik data.

    Attributes:
        r_o: Area radius of the boundary
        charge: Boundary charge Q_o
        lambda1: λ₁(-Δ + K) of the boundary metric
        kappa: κ of the normalized path
        charge_ratio: Q_o²/r_o⁴
        lambda1_positive: λ₁ > 0
        area_charge: Q_o² < r_o²
        kappa_exceeds_charge: κ > Q_o²/r_o⁴
        mass: Requested mass m
        mass_bound: r_o/2 + Q_o²/(2 r_o)
        mass_exceeds_bound: m > mass_bound
        passed: All gates hold
        violated: Names of the failing gates
    """

    r_o: float
    charge: float
    lambda1: float
    kappa: float
    charge_ratio: float
    lambda1_positive: bool
    area_charge: bool
    kappa_exceeds_charge: bool
    mass: float
    mass_bound: float
    mass_exceeds_bound: bool
    passed: bool
    violated: List[str]


class SliceDiagnostics(TypedDict):
    """Geometry of one collar slice Σ_t.

    Attributes:
        t: Path parameter of the slice
        area: Area of Σ_t in the collar metric
        mass: Charged Hawking mass of Σ_t
        flux: (1/4π) ∫ E·ν over Σ_t
        h_min: Smallest mean curvature on Σ_t
        h_max: Largest mean curvature on Σ_t
    """

    t: float
    area: float
    mass: float
    flux: float
    h_min: float
    h_max: float


class ExtensionReport(TypedDict):
    """Recomputed certificate of an extension.

    Attributes:
        mass: ADM mass m_e of the Reissner–Nordström tail
        charge: Total charge Q_o
        lower_bound: Charged Hawking mass of the boundary
        gap: mass - lower_bound
        penrose_bound: √(A/16π) + √(π/A) Q_o² with A the boundary area
        min_margin_collar: Smallest DEC margin over the collar
        min_margin_profile: Smallest DEC margin over strict profile segments
        max_flux_drift: max |flux - Q_o| over slices and profile
        boundary_h_max: max |H| on the boundary
        min_h: Smallest mean curvature for t > 0 and along the profile
        junction_jump: Mismatch of collar and profile at their junction
        tail_mass_deviation: max |m_H - m_e| over the exterior tail
        flags: Every individual check
        passed: All flags hold
    """

    mass: float
    charge: float
    lower_bound: float
    gap: float
    penrose_bound: float
    min_margin_collar: float
    min_margin_profile: float
    max_flux_drift: float
    boundary_h_max: float
    min_h: float
    junction_jump: float
    tail_mass_deviation: float
    flags: Dict[str, bool]
    passed: bool
