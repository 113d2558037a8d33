"""Cavity figures of merit for ensemble qubits.

The ensemble-cavity coupling is scaled from a measured single-atom anchor
(g0 at a reference length and mode diameter) through

    g = g0 (d0/d) sqrt(L0/L) sqrt(N),

and the passive cavity figures follow from the mirror transmittivity of a
matched lossless pair: finesse pi/T, free spectral range c/2L, half-width
decay rate fsr/(2 finesse), and lifetime equal to the inverse angular half
width (so lifetime scales as (T0/T)(L/L0)). A first-principles coupling
from the single-photon field amplitude sqrt(2 hbar omega / (eps0 V)) is
provided as a cross-check of the anchor, with the effective dipole moment
an explicit input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import EPSILON_0, GAMMA_HZ, GAMMA_SI, HBAR, SPEED_OF_LIGHT
from .errors import InvalidGeometryError, InvalidParameterError
from .ladder import LadderParams, light_shifts

# Cross-check inputs that reproduce the default anchor: the D2-line angular
# frequency of rubidium and an effective dipole moment (sqrt(2) times the
# reduced D2 dipole of 3.584e-29 C m) chosen once to land on g0.
RUBIDIUM_D2_ANGULAR_FREQUENCY = 2.0 * math.pi * 384.230e12  # rad/s
ANCHOR_EFFECTIVE_DIPOLE = 5.0685e-29  # C m


@dataclass(frozen=True)
class CavityAnchor:
    """Reference single-atom vacuum Rabi coupling at a known geometry."""

    g0: float = 54.25        # decay-rate units
    length: float = 40e-6    # m
    diameter: float = 5e-6   # m

    def __post_init__(self):
        if self.g0 <= 0 or self.length <= 0 or self.diameter <= 0:
            raise InvalidGeometryError("anchor coupling and dimensions must be positive")


@dataclass(frozen=True)
class CavityGeometry:
    """Cavity inputs: length, effective mode diameter, transmittivity, atom number."""

    length: float
    mode_diameter: float
    mirror_transmittivity: float
    n_atoms: int = 1
    anchor: CavityAnchor = CavityAnchor()

    def __post_init__(self):
        if self.length <= 0 or self.mode_diameter <= 0:
            raise InvalidGeometryError("cavity length and mode diameter must be positive")
        if not 0.0 < self.mirror_transmittivity < 1.0:
            raise InvalidGeometryError(
                f"mirror transmittivity must lie in (0, 1), got {self.mirror_transmittivity}"
            )
        if self.n_atoms < 1:
            raise InvalidGeometryError(f"n_atoms must be >= 1, got {self.n_atoms}")


@dataclass(frozen=True)
class CavityFigures:
    """Derived cavity figures; rates in decay-rate units, SI alongside."""

    g: float                 # sqrt(N)-enhanced vacuum Rabi frequency, decay-rate units
    finesse: float
    fsr_hz: float
    gamma_hwhm: float        # decay-rate units
    gamma_hwhm_hz: float
    lifetime_s: float
    mode_volume_m3: float


def cavity_figures(geometry: CavityGeometry) -> CavityFigures:
    """Mode volume, coupling, finesse, free spectral range, decay rate, lifetime."""
    anchor = geometry.anchor
    length = geometry.length
    diameter = geometry.mode_diameter
    mode_volume = 0.25 * math.pi * diameter**2 * length
    g = (
        anchor.g0
        * (anchor.diameter / diameter)
        * math.sqrt(anchor.length / length)
        * math.sqrt(geometry.n_atoms)
    )
    finesse = math.pi / geometry.mirror_transmittivity
    fsr_hz = SPEED_OF_LIGHT / (2.0 * length)
    gamma_hwhm_hz = fsr_hz / (2.0 * finesse)
    gamma_hwhm = gamma_hwhm_hz / GAMMA_HZ
    lifetime_s = 1.0 / (2.0 * math.pi * gamma_hwhm_hz)
    return CavityFigures(
        g=g,
        finesse=finesse,
        fsr_hz=fsr_hz,
        gamma_hwhm=gamma_hwhm,
        gamma_hwhm_hz=gamma_hwhm_hz,
        lifetime_s=lifetime_s,
        mode_volume_m3=mode_volume,
    )


def first_principles_g(omega: float, mode_volume: float, dipole_moment: float) -> float:
    """Single-atom coupling from the single-photon field amplitude.

    Returns dipole * sqrt(2 hbar omega / (eps0 V)) / (2 hbar) in decay-rate
    units; a cross-check of the anchor coupling, not a replacement for it.
    """
    if omega <= 0 or mode_volume <= 0 or dipole_moment <= 0:
        raise InvalidParameterError("omega, mode_volume and dipole_moment must be positive")
    field = math.sqrt(2.0 * HBAR * omega / (EPSILON_0 * mode_volume))
    return dipole_moment * field / (2.0 * HBAR) / GAMMA_SI


@dataclass(frozen=True)
class GateFeasibility:
    """Collective pi-pulse time against the cavity lifetime."""

    pi_time_s: float
    lifetime_s: float
    ratio: float
    feasible: bool


def gate_feasibility(geometry: CavityGeometry, params: LadderParams) -> GateFeasibility:
    """Check that a collective pi pulse fits well inside the cavity lifetime."""
    rabi = light_shifts(params).rabi_collective
    if rabi <= 0:
        raise InvalidParameterError(
            "collective Raman rate is zero; both omega1 and omega2 must be positive"
        )
    pi_time_s = (math.pi / rabi) / GAMMA_SI
    lifetime_s = cavity_figures(geometry).lifetime_s
    return GateFeasibility(
        pi_time_s=pi_time_s,
        lifetime_s=lifetime_s,
        ratio=pi_time_s / lifetime_s,
        feasible=pi_time_s < lifetime_s,
    )
