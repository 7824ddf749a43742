"""Domain parameter types and validation.

All frequencies are angular (rad/s), lengths in m, powers in W, fields in T.
Objects are frozen after validation; every downstream operation is a pure
function of them, so concurrent use needs no locking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .constants import CODATA, PhysicalConstants
from .errors import ValidationError, Violation


@dataclass(frozen=True)
class IonSpecies:
    """Dipole moments and linewidth of the active rare-earth ion.

    mu_g1 is the magnetic dipole (J/T) of the spin transition, d_g2 the
    electric dipole (C m) of the cavity-coupled optical transition and d_12
    the (optional) dipole of the pump transition.  gamma_o is the optical
    FWHM in rad/s.  rabi_calibration is an optional (Omega0_ref rad/s,
    P_ref W) pair anchoring the sqrt(P) pump scaling.
    """

    name: str
    mu_g1: float
    d_g2: float
    gamma_o: float
    g_lande: Optional[float] = None
    d_12: Optional[float] = None
    rabi_calibration: Optional[Tuple[float, float]] = None


@dataclass(frozen=True)
class CrystalSample:
    """Spherical sample: radius (m) and ion number density (m^-3)."""

    radius: float
    rho: float

    @property
    def volume(self) -> float:
        """Sample volume (4/3) pi r^3 in m^3."""
        return 4.0 / 3.0 * math.pi * self.radius**3

    @property
    def ion_count(self) -> float:
        """Total number of ions rho * V."""
        return self.rho * self.volume


@dataclass(frozen=True)
class CavitySpec:
    """One resonator: band label, angular frequency, decay rate and volume.

    kappa is the full energy decay rate (rad/s) so that Q = omega / kappa;
    it may be left unset when the matching solver is expected to choose it.
    Q_max is the best quality factor the hardware can reach.
    """

    band: str  # "microwave" | "optical"
    omega: float
    v_mode: float
    kappa: Optional[float] = None
    q_max: Optional[float] = None
    waist: Optional[float] = None
    fsr: Optional[float] = None
    overlap: Optional[float] = None

    @property
    def quality_factor(self) -> Optional[float]:
        if self.kappa is None:
            return None
        return self.omega / self.kappa


@dataclass(frozen=True)
class MagnonSpec:
    """Operating point of the collective spin mode.

    delta_M is the detuning of the drive fields from the uniform-precession
    mode, mode_spacing the gap to the next magnetostatic mode.  gamma_m is
    an optional mode linewidth used only by the multimode oracles (the
    two-mode efficiency formula has no magnon damping term).
    """

    delta_M: float
    mode_spacing: float
    gamma_m: float = 0.0
    B0: Optional[float] = None


@dataclass(frozen=True)
class DriveSpec:
    """Classical pump: power, Rabi frequency and detunings (rad/s)."""

    pump_power: float
    delta_o: Optional[float] = None
    Omega0: Optional[float] = None
    omega_Omega: Optional[float] = None


@dataclass(frozen=True)
class DesignInputs:
    """Validated, immutable bundle of all device parameters."""

    ion: IonSpecies
    crystal: CrystalSample
    microwave_cavity: CavitySpec
    optical_cavity: CavitySpec
    magnon: MagnonSpec
    drive: DriveSpec
    constants: PhysicalConstants = field(default=CODATA)


def kittel_field(g_lande: float, omega_target: float, constants: PhysicalConstants = CODATA) -> float:
    """Static field B0 (T) that Zeeman-tunes the spin transition to omega_target.

    Uses hbar * omega = g * muB * B0.  omega_target = 0 returns 0 T.
    """
    if g_lande <= 0.0:
        raise ValueError("g_lande must be positive")
    if omega_target < 0.0:
        raise ValueError("omega_target must be non-negative")
    return constants.hbar * omega_target / (g_lande * constants.muB)


def _positive(value, name, violations, strict=True):
    if value is None:
        return
    if not math.isfinite(value):
        violations.append(Violation("NonFiniteValue", name, f"value {value!r} is not finite"))
    elif strict and value <= 0.0:
        violations.append(Violation("NonPositiveValue", name, f"value {value:g} must be > 0"))
    elif not strict and value < 0.0:
        violations.append(Violation("NegativeValue", name, f"value {value:g} must be >= 0"))


def validate(config) -> DesignInputs:
    """Check every type invariant and return the immutable DesignInputs.

    All violations are collected and reported together in a single
    ValidationError.  The pump frequency is not taken from the file: it is
    derived from omega_Omega = omega_o - omega_mu so the three-photon
    resonance holds exactly.  If B0 is absent and a Lande factor is given,
    the Zeeman field for the microwave frequency is filled in.
    """
    from .config import SystemConfig  # local import to avoid a cycle

    if not isinstance(config, SystemConfig):
        raise TypeError("validate() expects a SystemConfig from load_config()")

    v: list[Violation] = []
    ion = config.ion
    crystal = config.crystal
    mw = config.microwave_cavity
    opt = config.optical_cavity
    magnon = config.magnon
    drive = config.drive

    _positive(ion.get("mu_g1"), "ion.mu_g1", v, strict=False)
    _positive(ion.get("d_g2"), "ion.d_g2", v)
    _positive(ion.get("gamma_o"), "ion.gamma_o", v)
    _positive(ion.get("g_lande"), "ion.g_lande", v)
    _positive(ion.get("d_12"), "ion.d_12", v)
    calib = ion.get("rabi_calibration")
    if calib is not None:
        _positive(calib[0], "ion.rabi_calibration.Omega0_ref", v)
        _positive(calib[1], "ion.rabi_calibration.P_ref", v)

    _positive(crystal.get("radius"), "crystal.radius", v)
    _positive(crystal.get("rho"), "crystal.rho", v)

    for label, cav in (("microwave_cavity", mw), ("optical_cavity", opt)):
        _positive(cav.get("omega"), f"{label}.omega", v)
        _positive(cav.get("V_mode"), f"{label}.V_mode", v)
        _positive(cav.get("Q_max"), f"{label}.Q_max", v)
        _positive(cav.get("kappa"), f"{label}.kappa", v)
        kappa = cav.get("kappa")
        q_max = cav.get("Q_max")
        omega = cav.get("omega")
        if kappa and q_max and omega and omega > 0 and kappa > 0:
            if omega / kappa > q_max * (1.0 + 1e-12):
                v.append(
                    Violation(
                        "QualityFactorExceedsMax",
                        f"{label}.kappa",
                        f"Q = {omega / kappa:.6g} exceeds Q_max = {q_max:.6g}",
                    )
                )
    _positive(opt.get("waist"), "optical_cavity.waist", v)
    _positive(opt.get("fsr"), "optical_cavity.fsr", v)
    overlap = opt.get("overlap_F")
    if overlap is not None and not 0.0 <= overlap <= 1.0:
        v.append(Violation("OverlapOutOfRange", "optical_cavity.overlap_F", f"F = {overlap:g} not in [0, 1]"))

    _positive(magnon.get("mode_spacing"), "magnon.mode_spacing", v)
    _positive(magnon.get("gamma_m"), "magnon.gamma_m", v, strict=False)
    _positive(magnon.get("B0"), "magnon.B0", v)
    delta_m = magnon.get("delta_M")
    spacing = magnon.get("mode_spacing")
    if delta_m is not None and spacing is not None and abs(delta_m) > spacing * (1.0 + 1e-12):
        v.append(
            Violation(
                "DetuningOutsideModeWindow",
                "magnon.delta_M",
                f"|delta_M| = {abs(delta_m):.6g} exceeds mode spacing {spacing:.6g}",
            )
        )

    _positive(drive.get("pump_power"), "drive.pump_power", v, strict=False)
    _positive(drive.get("Omega0"), "drive.Omega0", v, strict=False)
    if drive.get("delta_o") == 0.0:
        v.append(Violation("ZeroOpticalDetuning", "drive.delta_o", "delta_o must be nonzero when given"))

    omega_mu = mw.get("omega")
    omega_o = opt.get("omega")
    omega_pump = None
    if omega_mu is not None and omega_o is not None:
        omega_pump = omega_o - omega_mu
        stated = drive.get("omega_Omega")
        if stated is not None and not math.isclose(stated, omega_pump, rel_tol=1e-12):
            v.append(
                Violation(
                    "ThreePhotonResonanceViolated",
                    "drive.omega_Omega",
                    f"stated {stated:.12g} != omega_o - omega_mu = {omega_pump:.12g}",
                )
            )

    if v:
        raise ValidationError(v)

    b0 = magnon.get("B0")
    if b0 is None and ion.get("g_lande") and omega_mu:
        b0 = kittel_field(ion["g_lande"], omega_mu, config.constants)

    return DesignInputs(
        ion=IonSpecies(
            name=ion.get("name", ""),
            mu_g1=ion["mu_g1"],
            d_g2=ion["d_g2"],
            gamma_o=ion["gamma_o"],
            g_lande=ion.get("g_lande"),
            d_12=ion.get("d_12"),
            rabi_calibration=calib,
        ),
        crystal=CrystalSample(radius=crystal["radius"], rho=crystal["rho"]),
        microwave_cavity=CavitySpec(
            band="microwave",
            omega=mw["omega"],
            v_mode=mw["V_mode"],
            kappa=mw.get("kappa"),
            q_max=mw.get("Q_max"),
        ),
        optical_cavity=CavitySpec(
            band="optical",
            omega=opt["omega"],
            v_mode=opt["V_mode"],
            kappa=opt.get("kappa"),
            q_max=opt.get("Q_max"),
            waist=opt.get("waist"),
            fsr=opt.get("fsr"),
            overlap=opt.get("overlap_F"),
        ),
        magnon=MagnonSpec(
            delta_M=magnon["delta_M"],
            mode_spacing=magnon["mode_spacing"],
            gamma_m=magnon.get("gamma_m", 0.0),
            B0=b0,
        ),
        drive=DriveSpec(
            pump_power=drive["pump_power"],
            delta_o=drive.get("delta_o"),
            Omega0=drive.get("Omega0"),
            omega_Omega=omega_pump,
        ),
        constants=config.constants,
    )
