"""Physical constants and unit conversions.

All rates, energies and times inside the simulator are dimensionless
multiples of the natural decay rate of the optically excited state (and its
inverse for times). Conversion to SI units happens only at reporting
boundaries, through the single anchor ``GAMMA_SI``.
"""

import math

# Natural linewidth of the excited state, as an angular rate (rad/s).
GAMMA_SI = 2.0 * math.pi * 6.0e6
# The same linewidth expressed as an ordinary frequency (Hz).
GAMMA_HZ = 6.0e6

SPEED_OF_LIGHT = 2.99792458e8      # m/s
HBAR = 1.054571817e-34             # J s
EPSILON_0 = 8.8541878128e-12       # F/m


def gamma_time_to_seconds(t: float) -> float:
    """Convert a time in units of 1/Gamma to seconds."""
    return t / GAMMA_SI


def seconds_to_gamma_time(t: float) -> float:
    """Convert a time in seconds to units of 1/Gamma."""
    return t * GAMMA_SI
