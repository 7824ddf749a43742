"""Gaussian-beam resonator geometry, mode volumes and the optical overlap integral.

Mode profiles are peak-normalized amplitudes (1 at the brightest point).  A
standing-wave Gaussian mode is

    A(rho, z) = (w0 / w(z)) exp(-rho^2 / w(z)^2) |cos k (z - z0)|

with w(z) = w0 sqrt(1 + ((z - z0)/zR)^2).  The axial |cos| factor can either
be resolved explicitly or replaced by its long-range average 2/pi, which is
the right thing to do when the two optical modes have incommensurate wave
numbers.  The overlap integral

    F = (1/V_c) * Int_{sphere} |phi(r)| |eps(r)| d^3 r

is evaluated by axisymmetric quadrature: composite Gauss-Legendre panels in
z (aligned with the cosine arches when resolved) times an adaptive radial
rule per panel, refined until the result is stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .constants import CODATA, PhysicalConstants
from .errors import ConvergenceError, NumericFailure

UNIFORM = "uniform"
GAUSSIAN_STANDING_WAVE = "gaussian_standing_wave"

# Gaussian tails are truncated at this many beam radii; exp(-2*8^2) ~ 1e-56
_RADIAL_CUT = 8.0


@dataclass(frozen=True)
class ModeProfile:
    """Parametric spatial mode amplitude, normalized to peak 1.

    axial_offset displaces the focus and the standing-wave phase reference
    along the axis.  resolve_axial selects explicit |cos kz| factors instead
    of the 2/pi average.
    """

    kind: str
    waist: Optional[float] = None
    wavelength: Optional[float] = None
    axial_offset: float = 0.0
    resolve_axial: bool = False

    def __post_init__(self):
        if self.kind not in (UNIFORM, GAUSSIAN_STANDING_WAVE):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.kind == GAUSSIAN_STANDING_WAVE:
            if self.waist is None or self.waist <= 0:
                raise ValueError("gaussian profile needs a positive waist")
            if self.wavelength is None or self.wavelength <= 0:
                raise ValueError("gaussian profile needs a positive wavelength")

    @property
    def wavenumber(self) -> float:
        if self.kind == UNIFORM:
            return 0.0
        return 2.0 * math.pi / self.wavelength

    @property
    def rayleigh_range(self) -> float:
        if self.kind == UNIFORM:
            return math.inf
        return math.pi * self.waist**2 / self.wavelength

    def beam_radius(self, z):
        """w(z); infinite (flat) for a uniform profile."""
        if self.kind == UNIFORM:
            return np.full_like(np.asarray(z, dtype=float), np.inf)
        zr = self.rayleigh_range
        return self.waist * np.sqrt(1.0 + ((np.asarray(z, dtype=float) - self.axial_offset) / zr) ** 2)

    def radial_amplitude(self, rho, z):
        if self.kind == UNIFORM:
            return np.ones(np.broadcast(np.asarray(rho), np.asarray(z)).shape)
        w = self.beam_radius(z)
        return (self.waist / w) * np.exp(-np.asarray(rho, dtype=float) ** 2 / w**2)

    def axial_amplitude(self, z):
        """Explicit |cos| factor when resolved; 1 otherwise."""
        if self.kind == GAUSSIAN_STANDING_WAVE and self.resolve_axial:
            return np.abs(np.cos(self.wavenumber * (np.asarray(z, dtype=float) - self.axial_offset)))
        return np.ones_like(np.asarray(z, dtype=float))

    @property
    def axial_mean(self) -> float:
        """Average of the unresolved standing-wave factor (2/pi), else 1."""
        if self.kind == GAUSSIAN_STANDING_WAVE and not self.resolve_axial:
            return 2.0 / math.pi
        return 1.0

    def amplitude(self, rho, z):
        """Pointwise amplitude; the unresolved axial average is not included."""
        return self.radial_amplitude(rho, z) * self.axial_amplitude(z)


def uniform_profile() -> ModeProfile:
    return ModeProfile(kind=UNIFORM)


def gaussian_standing_wave(
    waist: float,
    wavelength: float,
    axial_offset: float = 0.0,
    resolve_axial: bool = False,
) -> ModeProfile:
    return ModeProfile(
        kind=GAUSSIAN_STANDING_WAVE,
        waist=waist,
        wavelength=wavelength,
        axial_offset=axial_offset,
        resolve_axial=resolve_axial,
    )


def length_from_fsr(fsr: float, constants: PhysicalConstants = CODATA) -> float:
    """Linear-cavity length from an angular free spectral range: L = pi c / FSR."""
    if fsr <= 0:
        raise ValueError("fsr must be positive")
    return math.pi * constants.c / fsr


def mode_volume(waist: float, length: float) -> float:
    """Standing-wave Gaussian mode volume (pi w0^2 / 4) L.

    Convention: integral of the squared peak-normalized amplitude, with the
    transverse Gaussian contributing pi w0^2 / 2 and the cos^2 another 1/2.
    """
    if waist <= 0 or length < 0:
        raise ValueError("waist must be positive and length non-negative")
    return math.pi * waist**2 * length / 4.0


@dataclass(frozen=True)
class ResonatorGeometry:
    """Derived linear-resonator geometry for a fundamental Gaussian mode."""

    length: float
    fsr: float
    waist: float
    wavelength: float
    rayleigh_range: float
    v_mode: float

    @classmethod
    def from_fsr(
        cls, fsr: float, waist: float, wavelength: float, constants: PhysicalConstants = CODATA
    ) -> "ResonatorGeometry":
        length = length_from_fsr(fsr, constants)
        return cls(
            length=length,
            fsr=fsr,
            waist=waist,
            wavelength=wavelength,
            rayleigh_range=math.pi * waist**2 / wavelength,
            v_mode=mode_volume(waist, length),
        )


def _cos_arch_edges(k: float, offset: float, lo: float, hi: float):
    """Zeros of cos(k(z - offset)) inside [lo, hi]: panel edges for |cos|."""
    if k <= 0:
        return np.array([])
    half = math.pi / k
    n_lo = math.ceil((lo - offset) / half - 0.5)
    n_hi = math.floor((hi - offset) / half - 0.5)
    if n_hi < n_lo:
        return np.array([])
    return offset + (np.arange(n_lo, n_hi + 1) + 0.5) * half


def _volume_integral(
    phi: ModeProfile,
    eps: ModeProfile,
    radius: float,
    edges: np.ndarray,
    axial_order: int,
    radial_order: int,
) -> float:
    """Int 2 pi rho A_phi A_eps drho dz over the sphere via tensor Gauss-Legendre."""
    xz, wz = np.polynomial.legendre.leggauss(axial_order)
    xr, wr = np.polynomial.legendre.leggauss(radial_order)
    xr = (xr + 1.0) / 2.0  # map to [0, 1]
    wr = wr / 2.0

    both_uniform = phi.kind == UNIFORM and eps.kind == UNIFORM
    total = 0.0
    # chunk panels to bound the (n_z, n_rho) work arrays
    chunk = max(1, 65536 // max(radial_order, 1))
    starts = edges[:-1]
    stops = edges[1:]
    for i0 in range(0, starts.size, chunk):
        a = starts[i0 : i0 + chunk]
        b = stops[i0 : i0 + chunk]
        half_w = (b - a) / 2.0
        z = (a + b)[:, None] / 2.0 + half_w[:, None] * xz[None, :]  # (panels, axial_order)
        z_flat = z.ravel()
        wz_flat = (half_w[:, None] * wz[None, :]).ravel()

        chord = np.sqrt(np.maximum(radius**2 - z_flat**2, 0.0))
        if both_uniform:
            upper = chord
        else:
            w_max = np.zeros_like(chord)
            for profile in (phi, eps):
                if profile.kind == GAUSSIAN_STANDING_WAVE:
                    w_max = np.maximum(w_max, profile.beam_radius(z_flat))
            upper = np.minimum(chord, _RADIAL_CUT * w_max)

        rho = upper[:, None] * xr[None, :]
        rad = phi.radial_amplitude(rho, z_flat[:, None]) * eps.radial_amplitude(rho, z_flat[:, None])
        inner = upper * ((2.0 * math.pi) * np.sum(wr[None, :] * rho * rad, axis=1))

        ax = phi.axial_amplitude(z_flat) * eps.axial_amplitude(z_flat)
        total += float(np.sum(wz_flat * inner * ax))
    return total * phi.axial_mean * eps.axial_mean


def overlap_integral(
    phi: ModeProfile,
    eps: ModeProfile,
    sample_radius: float,
    rel_tol: float = 1e-6,
    initial_axial_panels: int = 16,
    axial_order: int = 8,
    radial_order: int = 48,
    max_refinements: int = 8,
) -> float:
    """Normalized overlap F of two mode amplitudes over a centered sphere.

    The quadrature doubles its axial panel count and radial order until two
    successive estimates agree to rel_tol; failure to stabilize raises
    ConvergenceError.  The result lies in [0, 1] (1 for two uniform modes).
    """
    if sample_radius <= 0:
        raise ValueError("sample_radius must be positive")
    base_edges = [-sample_radius, sample_radius]
    for profile in (phi, eps):
        if profile.kind == GAUSSIAN_STANDING_WAVE and profile.resolve_axial:
            base_edges.extend(
                _cos_arch_edges(profile.wavenumber, profile.axial_offset, -sample_radius, sample_radius)
            )
    edges = np.unique(np.asarray(base_edges, dtype=float))
    if edges.size - 1 < initial_axial_panels:
        # refine the coarse segments up to the requested panel count
        splits = math.ceil(initial_axial_panels / (edges.size - 1))
        edges = np.unique(
            np.concatenate([np.linspace(a, b, splits + 1) for a, b in zip(edges[:-1], edges[1:])])
        )

    v_c = 4.0 / 3.0 * math.pi * sample_radius**3
    previous = None
    order = radial_order
    for _ in range(max_refinements):
        value = _volume_integral(phi, eps, sample_radius, edges, axial_order, order) / v_c
        if not math.isfinite(value):
            raise NumericFailure("overlap quadrature produced a non-finite value")
        if previous is not None and abs(value - previous) <= rel_tol * max(abs(value), 1e-300):
            if value > 1.0 + 1e-6:
                raise NumericFailure(f"overlap F = {value:g} exceeds 1; profiles not peak-normalized?")
            return min(max(value, 0.0), 1.0)
        previous = value
        mid = (edges[:-1] + edges[1:]) / 2.0
        edges = np.unique(np.concatenate([edges, mid]))
        order = min(2 * order, 192)
    raise ConvergenceError(
        f"overlap quadrature did not reach rel_tol={rel_tol:g} within {max_refinements} refinements"
    )


def pump_rabi(
    power: float,
    geometry: Optional[ResonatorGeometry] = None,
    kappa_o: Optional[float] = None,
    calibration: Optional[Tuple[float, float]] = None,
    d_12: Optional[float] = None,
    constants: PhysicalConstants = CODATA,
) -> float:
    """Peak Rabi frequency (rad/s) of the intracavity pump at input power P (W).

    With a calibration pair (Omega0_ref, P_ref) the sqrt(P) law
    Omega0 = Omega0_ref sqrt(P / P_ref) is used.  Otherwise a physics model:
    the resonant one-sided cavity stores U = 4 P / kappa_o, the peak field of
    the peak-normalized standing-wave mode follows from
    U = eps0 E0^2 V_mode / 2, and Omega0 = d_12 E0 / hbar.  The stored-energy
    convention is the documented choice here; measured calibrations should be
    preferred when available.
    """
    if power < 0:
        raise ValueError("power must be non-negative")
    if calibration is not None:
        omega_ref, p_ref = calibration
        if p_ref <= 0:
            raise ValueError("calibration reference power must be positive")
        return omega_ref * math.sqrt(power / p_ref)
    if d_12 is None:
        raise NumericFailure("physics model for the pump Rabi frequency requires d_12")
    if geometry is None or kappa_o is None or kappa_o <= 0:
        raise ValueError("physics model requires a geometry and a positive kappa_o")
    energy = 4.0 * power / kappa_o
    e_peak = math.sqrt(2.0 * energy / (constants.eps0 * geometry.v_mode))
    return d_12 * e_peak / constants.hbar
