"""CODATA physical constants in SI units.

Every frequency-like quantity inside the package is angular (rad/s); the
I/O layer converts Hz-tagged values on the way in and out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants (CODATA 2018). Values are fixed, not tunable.

    Non-default instances exist only so tests can inject scaled constants;
    the defaults satisfy c^2 eps0 mu0 = 1 to float precision.
    """

    hbar: float = 1.054571817e-34  # J s, reduced Planck constant
    mu0: float = 1.25663706212e-6  # T m / A, vacuum permeability
    eps0: float = 8.8541878128e-12  # F / m, vacuum permittivity
    c: float = 2.99792458e8  # m / s, speed of light (exact)
    muB: float = 9.2740100783e-24  # J / T, Bohr magneton


CODATA = PhysicalConstants()
