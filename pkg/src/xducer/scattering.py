"""Two-mode input-output theory for the linearly coupled cavity pair.

With coupling xi between the microwave and optical cavity fields and
one-sided decay rates kappa_mu, kappa_o, the scattering coefficients at
common detuning omega from both resonances are

    D      = |xi|^2 + (kappa_o/2 + i omega)(kappa_mu/2 + i omega)
    r_mu   = -(|xi|^2 - (kappa_o/2 - i omega)(kappa_mu/2 + i omega)) / D
    r_o    = -(|xi|^2 - (kappa_mu/2 - i omega)(kappa_o/2 + i omega)) / D
    t_mo   = -i xi        sqrt(kappa_mu kappa_o) / D
    t_om   = -i conj(xi)  sqrt(kappa_mu kappa_o) / D

and the photon-number conversion efficiency is eta = |t_mo|^2.  The two-port
is lossless: |r|^2 + |t|^2 = 1 exactly at every real omega.  Impedance
matching 2|xi| = sqrt(kappa_mu kappa_o) gives eta(0) = 1; the matched
symmetric device has a sqrt(2) kappa conversion bandwidth.

Sign convention: positive omega labels an e^{+i omega t} drive, so the
time-domain oracle driven with exp(+i omega t) reproduces t_mo(omega)
including its phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import bisect

from .errors import NumericFailure


@dataclass(frozen=True)
class TwoPortS:
    """Scattering coefficients of the two-port converter at one detuning."""

    omega: float
    r_mu: complex
    r_o: complex
    t_mo: complex
    t_om: complex

    @property
    def eta(self) -> float:
        return abs(self.t_mo) ** 2


def _coefficients(xi, kappa_mu, kappa_o, omega):
    xi = complex(xi)
    x2 = abs(xi) ** 2
    p = kappa_mu / 2.0
    q = kappa_o / 2.0
    d = x2 + (q + 1j * omega) * (p + 1j * omega)
    # d = 0 needs omega = 0 and |xi|^2 = -pq, impossible for positive rates
    assert np.all(np.abs(d) > 0.0)
    root = math.sqrt(kappa_mu * kappa_o)
    r_mu = -(x2 - (q - 1j * omega) * (p + 1j * omega)) / d
    r_o = -(x2 - (p - 1j * omega) * (q + 1j * omega)) / d
    t_mo = -1j * xi * root / d
    t_om = -1j * np.conj(xi) * root / d
    return r_mu, r_o, t_mo, t_om


def smatrix(xi, kappa_mu: float, kappa_o: float, omega: float) -> TwoPortS:
    """Two-port scattering coefficients at detuning omega (all rad/s)."""
    if kappa_mu <= 0 or kappa_o <= 0:
        raise ValueError("cavity decay rates must be positive")
    r_mu, r_o, t_mo, t_om = _coefficients(xi, kappa_mu, kappa_o, omega)
    return TwoPortS(omega=float(omega), r_mu=complex(r_mu), r_o=complex(r_o), t_mo=complex(t_mo), t_om=complex(t_om))


def efficiency(xi, kappa_mu: float, kappa_o: float, omega: float = 0.0) -> float:
    """Photon-number conversion efficiency eta(omega) = |t_mo|^2."""
    if kappa_mu <= 0 or kappa_o <= 0:
        raise ValueError("cavity decay rates must be positive")
    _, _, t_mo, _ = _coefficients(xi, kappa_mu, kappa_o, omega)
    return float(abs(t_mo) ** 2)


@dataclass(frozen=True)
class ScatteringSpectrum:
    """S-matrix entries and efficiency on a detuning grid."""

    omegas: np.ndarray
    r_mu: np.ndarray
    r_o: np.ndarray
    t_mo: np.ndarray
    t_om: np.ndarray
    eta: np.ndarray

    CSV_HEADER = "omega_hz,eta,re_r_mu,im_r_mu,re_t_mo,im_t_mo,re_r_o,im_r_o,re_t_om,im_t_om"

    def to_csv(self) -> str:
        """Deterministic CSV body, 17 significant digits, one row per grid point."""
        lines = [self.CSV_HEADER]
        for i, omega in enumerate(self.omegas):
            row = (
                omega / (2.0 * math.pi),
                self.eta[i],
                self.r_mu[i].real,
                self.r_mu[i].imag,
                self.t_mo[i].real,
                self.t_mo[i].imag,
                self.r_o[i].real,
                self.r_o[i].imag,
                self.t_om[i].real,
                self.t_om[i].imag,
            )
            lines.append(",".join(f"{x:.17g}" for x in row))
        return "\n".join(lines) + "\n"


def efficiency_spectrum(xi, kappa_mu: float, kappa_o: float, omegas) -> ScatteringSpectrum:
    """Vectorized S-matrix over a finite, sorted detuning grid."""
    if kappa_mu <= 0 or kappa_o <= 0:
        raise ValueError("cavity decay rates must be positive")
    omegas = np.asarray(omegas, dtype=float)
    if omegas.ndim != 1 or omegas.size == 0:
        raise ValueError("omega grid must be a non-empty 1-d array")
    if not np.all(np.isfinite(omegas)):
        raise ValueError("omega grid must be finite")
    if np.any(np.diff(omegas) < 0):
        raise ValueError("omega grid must be sorted ascending")
    r_mu, r_o, t_mo, t_om = _coefficients(xi, kappa_mu, kappa_o, omegas)
    return ScatteringSpectrum(
        omegas=omegas,
        r_mu=np.asarray(r_mu),
        r_o=np.asarray(r_o),
        t_mo=np.asarray(t_mo),
        t_om=np.asarray(t_om),
        eta=np.abs(t_mo) ** 2,
    )


class BandwidthResult(NamedTuple):
    value: float  # full width at half maximum, rad/s
    split_resonance: bool
    peak_omega: float
    peak_eta: float


def bandwidth_fwhm(xi, kappa_mu: float, kappa_o: float) -> BandwidthResult:
    """Full width of eta(omega) at half its peak, by bracketing and bisection.

    eta is even in omega.  Over-coupled devices (2|xi| > sqrt of the mean
    square decay rate) develop two symmetric peaks; the width then refers to
    half the height of those peaks and the split_resonance flag is set.
    """
    if kappa_mu <= 0 or kappa_o <= 0:
        raise ValueError("cavity decay rates must be positive")
    x2 = abs(complex(xi)) ** 2
    p = kappa_mu / 2.0
    q = kappa_o / 2.0
    if efficiency(xi, kappa_mu, kappa_o, 0.0) <= 0.0:
        raise NumericFailure("eta(0) = 0: no conversion peak to measure")
    # |D|^2 = (x2 + pq - w^2)^2 + w^2 (p+q)^2 is minimized at w^2 = u_star
    u_star = x2 + p * q - (p + q) ** 2 / 2.0
    scale = x2 + p * q + (p + q) ** 2
    split = u_star > 1e-9 * scale
    peak_omega = math.sqrt(u_star) if split else 0.0
    peak_eta = efficiency(xi, kappa_mu, kappa_o, peak_omega)
    level = peak_eta / 2.0

    hi = peak_omega + kappa_mu + kappa_o + math.sqrt(x2)
    for _ in range(200):
        if efficiency(xi, kappa_mu, kappa_o, hi) < level:
            break
        hi *= 2.0
    else:
        raise NumericFailure("no half-maximum crossing found within the search window")
    crossing = bisect(
        lambda w: efficiency(xi, kappa_mu, kappa_o, w) - level,
        peak_omega,
        hi,
        rtol=1e-12,
        maxiter=500,
    )
    return BandwidthResult(value=2.0 * crossing, split_resonance=bool(split), peak_omega=peak_omega, peak_eta=peak_eta)


@dataclass(frozen=True)
class MatchingSolution:
    """Decay rate and quality factors solving the impedance-matching condition."""

    kappa: float
    q_mu: float
    q_o: float
    physical: bool


def impedance_solve(
    g_mu: float, g_o_omega: float, delta_m: float, omega_mu: float, omega_o: float
) -> MatchingSolution:
    """Symmetric-kappa matching: kappa = 2 G_mu G_oOmega / delta_M.

    Returns the common decay rate and the implied quality factors
    Q = omega / kappa for both cavities.  A vanishing coupling gives
    kappa = 0, flagged as unphysical (no matching possible).
    """
    if delta_m <= 0 or omega_mu <= 0 or omega_o <= 0:
        raise ValueError("delta_m and cavity frequencies must be positive")
    if g_mu < 0 or g_o_omega < 0:
        raise ValueError("collective couplings must be non-negative")
    kappa = 2.0 * g_mu * g_o_omega / delta_m
    if kappa == 0.0:
        return MatchingSolution(kappa=0.0, q_mu=math.inf, q_o=math.inf, physical=False)
    return MatchingSolution(kappa=kappa, q_mu=omega_mu / kappa, q_o=omega_o / kappa, physical=True)


@dataclass(frozen=True)
class TimeDomainResult:
    """Sampled waveforms from the equation-of-motion integration."""

    t: np.ndarray
    a: np.ndarray
    b: np.ndarray
    a_out: np.ndarray
    b_out: np.ndarray


def time_domain_oracle(
    xi,
    kappa_mu: float,
    kappa_o: float,
    a_in: Callable[[float], complex],
    duration: float,
    b_in: Optional[Callable[[float], complex]] = None,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    n_samples: int = 1000,
) -> TimeDomainResult:
    """Integrate the classical cavity equations of motion and apply input-output.

        da/dt = -i conj(xi) b - (kappa_mu/2) a + sqrt(kappa_mu) a_in(t)
        db/dt = -i xi       a - (kappa_o/2)  b + sqrt(kappa_o)  b_in(t)
        a_out = sqrt(kappa_mu) a - a_in,   b_out = sqrt(kappa_o) b - b_in

    The system is linear, so the classical response determines the full
    S-matrix; vacuum inputs carry no signal.
    """
    if kappa_mu <= 0 or kappa_o <= 0:
        raise ValueError("cavity decay rates must be positive")
    if duration <= 0:
        raise ValueError("duration must be positive")
    xi = complex(xi)
    b_in = b_in or (lambda t: 0.0)
    s_mu = math.sqrt(kappa_mu)
    s_o = math.sqrt(kappa_o)

    def rhs(t, y):
        a, b = y
        return [
            -1j * np.conj(xi) * b - 0.5 * kappa_mu * a + s_mu * a_in(t),
            -1j * xi * a - 0.5 * kappa_o * b + s_o * b_in(t),
        ]

    t_eval = np.linspace(0.0, duration, n_samples)
    sol = solve_ivp(
        rhs,
        (0.0, duration),
        np.zeros(2, dtype=complex),
        t_eval=t_eval,
        rtol=rtol,
        atol=atol,
        method="DOP853",
    )
    if not sol.success:
        raise NumericFailure(f"equation-of-motion integration failed: {sol.message}")
    a = sol.y[0]
    b = sol.y[1]
    a_in_s = np.array([a_in(t) for t in t_eval], dtype=complex)
    b_in_s = np.array([b_in(t) for t in t_eval], dtype=complex)
    return TimeDomainResult(t=t_eval, a=a, b=b, a_out=s_mu * a - a_in_s, b_out=s_o * b - b_in_s)


def steady_state_transmission(
    xi,
    kappa_mu: float,
    kappa_o: float,
    omega: float,
    settle: float = 40.0,
    rtol: float = 1e-10,
    atol: float = 1e-13,
) -> complex:
    """Steady-state b_out / a_in under a monochromatic exp(+i omega t) drive.

    Integrates for `settle` cavity lifetimes of the slower cavity and checks
    that the transient has actually died out before reporting the ratio.
    """
    kappa_min = min(kappa_mu, kappa_o)
    duration = settle / kappa_min
    result = time_domain_oracle(
        xi,
        kappa_mu,
        kappa_o,
        lambda t: np.exp(1j * omega * t),
        duration,
        rtol=rtol,
        atol=atol,
        n_samples=256,
    )
    demod = result.b_out * np.exp(-1j * omega * result.t)
    final = complex(demod[-1])
    earlier = complex(demod[int(0.9 * demod.size)])
    scale = max(abs(final), 1e-30)
    if abs(final - earlier) > 1e-6 * scale:
        raise NumericFailure("monochromatic drive did not reach steady state within the duration")
    return final
