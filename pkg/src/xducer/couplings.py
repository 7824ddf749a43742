"""Single-ion and collective coupling rates.

The microwave cavity couples to each spin with

    g_mu = sqrt(omega_mu * mu0 / (2 hbar V_mu)) * mu_g1 * chi

and the optical cavity to each optical transition with

    g_o = sqrt(omega_o / (2 hbar eps0 V_o)) * d_g2 * phi,

where chi, phi in [0, 1] are the local (projected) mode amplitudes.  With N
ions the uniform-mode collective couplings are sqrt(N) times the single-ion
values; the two-photon Raman route to the spin mode picks up Omega0/delta_o
and the spatial overlap F of the two optical modes.  All rates are rad/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import CODATA, PhysicalConstants
from .errors import NumericFailure


def _check_unit_interval(value: float, name: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


def _finite(value: float, context: str) -> float:
    if not math.isfinite(value):
        raise NumericFailure(f"non-finite result in {context}")
    return value


def single_ion_mu_coupling(
    omega_mu: float,
    v_mu: float,
    mu_g1: float,
    chi: float,
    constants: PhysicalConstants = CODATA,
) -> float:
    """Coupling of one spin to the microwave cavity (rad/s).

    chi is the projection of the local microwave mode amplitude onto the
    anisotropic transition dipole; 0 and 1 are the physical extremes.
    """
    if omega_mu <= 0 or v_mu <= 0 or mu_g1 < 0:
        raise ValueError("omega_mu, v_mu must be positive and mu_g1 non-negative")
    _check_unit_interval(chi, "chi")
    value = math.sqrt(omega_mu * constants.mu0 / (2.0 * constants.hbar * v_mu)) * mu_g1 * chi
    return _finite(value, "single_ion_mu_coupling")


def single_ion_o_coupling(
    omega_o: float,
    v_o: float,
    d_g2: float,
    phi: float,
    constants: PhysicalConstants = CODATA,
) -> float:
    """Coupling of one ion's optical transition to the optical cavity (rad/s)."""
    if omega_o <= 0 or v_o <= 0 or d_g2 < 0:
        raise ValueError("omega_o, v_o must be positive and d_g2 non-negative")
    _check_unit_interval(phi, "phi")
    value = math.sqrt(omega_o / (2.0 * constants.hbar * constants.eps0 * v_o)) * d_g2 * phi
    return _finite(value, "single_ion_o_coupling")


def collective_mu_coupling(
    rho: float,
    v_c: float,
    omega_mu: float,
    v_mu: float,
    mu_g1: float,
    constants: PhysicalConstants = CODATA,
) -> float:
    """Collective spin-mode coupling sqrt(rho V_c) * g_mu(chi=1) in rad/s.

    Valid for a microwave mode that is uniform over the sample, so the sum
    over ions collapses to sqrt(N) times the single-ion rate.
    """
    if rho < 0 or v_c <= 0:
        raise ValueError("rho must be non-negative and v_c positive")
    n_ions = rho * v_c
    value = math.sqrt(n_ions) * single_ion_mu_coupling(omega_mu, v_mu, mu_g1, 1.0, constants)
    return _finite(value, "collective_mu_coupling")


def collective_raman_coupling(
    rho: float,
    v_c: float,
    omega_o: float,
    v_o: float,
    d_g2: float,
    omega0: float,
    delta_o: float,
    overlap: float,
    constants: PhysicalConstants = CODATA,
) -> float:
    """Collective two-photon (pump + cavity) coupling to the spin mode (rad/s).

    Continuum form sqrt(rho V_c) * g_o(phi=1) * (Omega0/|delta_o|) * F where
    F is the optical overlap integral over the sample.  Requires the pump
    detuning delta_o to be nonzero (far off resonance); a vanishing detuning
    breaks the adiabatic condition behind this expression.
    """
    if delta_o == 0.0:
        raise NumericFailure(
            "delta_o = 0: the optical transition must stay far detuned for the "
            "two-photon coupling to be well defined"
        )
    if rho < 0 or v_c <= 0 or omega0 < 0:
        raise ValueError("rho, omega0 must be non-negative and v_c positive")
    _check_unit_interval(overlap, "overlap")
    n_ions = rho * v_c
    g_o = single_ion_o_coupling(omega_o, v_o, d_g2, 1.0, constants)
    value = math.sqrt(n_ions) * g_o * (omega0 / abs(delta_o)) * overlap
    return _finite(value, "collective_raman_coupling")


@dataclass(frozen=True)
class ConversionCoupling:
    """Magnitude of the cavity-cavity coupling with its phase sign.

    Only the magnitude enters the conversion efficiency; the sign records
    whether the mediating mode sits above or below the drive frequencies.
    """

    magnitude: float
    phase_sign: int

    def __float__(self) -> float:
        return self.magnitude


def conversion_coupling(g_mu: float, g_o_omega: float, delta_m: float) -> ConversionCoupling:
    """Effective microwave-optical coupling |G_mu G_oOmega / delta_M| (rad/s)."""
    if delta_m == 0.0:
        raise NumericFailure("delta_M = 0: no off-resonant spin mode to mediate conversion")
    magnitude = abs(g_mu) * abs(g_o_omega) / abs(delta_m)
    return ConversionCoupling(_finite(magnitude, "conversion_coupling"), 1 if delta_m > 0 else -1)


def discrete_collective_sums(
    g_mu_unit: float,
    g_o_unit: float,
    omega0: float,
    chi,
    phi,
    eps,
    delta_o,
):
    """Exact per-ion sums for the two collective couplings (no continuum limit).

    g_mu_unit and g_o_unit are the single-ion rates at unit mode amplitude;
    chi, phi, eps are the sampled mode amplitudes at each ion and delta_o the
    per-ion optical detuning.  Returns the complex pair

        G_mu       = g_mu_unit / sqrt(n) * sum_k chi_k
        G_o_omega  = g_o_unit * omega0 / sqrt(n) * sum_k conj(eps_k) phi_k / delta_o_k
    """
    chi = np.asarray(chi)
    phi = np.asarray(phi)
    eps = np.asarray(eps)
    delta_o = np.asarray(delta_o, dtype=float)
    n = chi.size
    if n == 0:
        raise ValueError("at least one ion sample is required")
    if not (phi.size == n and eps.size == n and delta_o.size == n):
        raise ValueError("per-ion sample arrays must have equal length")
    if np.any(delta_o == 0.0):
        raise NumericFailure("per-ion delta_o contains a zero detuning")
    g_mu = g_mu_unit * np.sum(chi) / math.sqrt(n)
    g_o_omega = g_o_unit * omega0 * np.sum(np.conj(eps) * phi / delta_o) / math.sqrt(n)
    return complex(g_mu), complex(g_o_omega)


@dataclass(frozen=True)
class CouplingSet:
    """Derived coupling rates with a token identifying the inputs used."""

    g_mu: float
    g_o: float
    Omega0: float
    G_mu: float
    G_o_omega: float
    xi: float
    phase_sign: int
    inputs_digest: str


def coupling_set(
    inputs,
    chi: float,
    omega0: float,
    delta_o: float,
    delta_m: float,
    overlap: float,
) -> CouplingSet:
    """Evaluate every coupling for a validated parameter set at one operating point."""
    from .config import inputs_digest

    c = inputs.constants
    g_mu = single_ion_mu_coupling(
        inputs.microwave_cavity.omega, inputs.microwave_cavity.v_mode, inputs.ion.mu_g1, 1.0, c
    )
    g_o = single_ion_o_coupling(
        inputs.optical_cavity.omega, inputs.optical_cavity.v_mode, inputs.ion.d_g2, 1.0, c
    )
    big_g_mu = chi * collective_mu_coupling(
        inputs.crystal.rho,
        inputs.crystal.volume,
        inputs.microwave_cavity.omega,
        inputs.microwave_cavity.v_mode,
        inputs.ion.mu_g1,
        c,
    )
    big_g_o = collective_raman_coupling(
        inputs.crystal.rho,
        inputs.crystal.volume,
        inputs.optical_cavity.omega,
        inputs.optical_cavity.v_mode,
        inputs.ion.d_g2,
        omega0,
        delta_o,
        overlap,
        c,
    )
    xi = conversion_coupling(big_g_mu, big_g_o, delta_m)
    return CouplingSet(
        g_mu=g_mu,
        g_o=g_o,
        Omega0=omega0,
        G_mu=big_g_mu,
        G_o_omega=big_g_o,
        xi=xi.magnitude,
        phase_sign=xi.phase_sign,
        inputs_digest=inputs_digest(inputs),
    )
