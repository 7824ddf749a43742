"""Brute-force multimode oracles for the two adiabatic-elimination steps.

The two-mode model rests on removing (1) the optically excited level of each
ion, which leaves an effective spin-cavity coupling g_o Omega*/delta_o plus
an AC Stark shift |Omega|^2/delta_o, and (2) the far-detuned collective spin
mode, which leaves the cavity-cavity coupling xi = G_mu G_oOmega / delta_M
plus a pull |G|^2/delta_M on each cavity resonance.  The oracles here solve
the unreduced linear systems exactly and measure how well those effective
parameters describe them, establishing the validity envelope of the reduced
model.  Everything is pure linear algebra: deterministic and parallel-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import NumericFailure
from .scattering import TwoPortS, efficiency


def cavity_pull(g: float, delta_m: float) -> float:
    """Resonance shift |G|^2 / delta_M a cavity acquires from the detuned spin mode.

    Compensating the shift means retuning the cavity by exactly this amount.
    """
    if delta_m == 0.0:
        raise NumericFailure("delta_M = 0: the pull expression requires a detuned mode")
    return abs(g) ** 2 / abs(delta_m)


@dataclass(frozen=True)
class ThreeModeSystem:
    """Microwave cavity + optical cavity + spin mode, before the second elimination.

    delta_mu and delta_o2 are deliberate cavity detunings (set them to the
    pulls to compensate).  gamma_m > 0 adds spin-mode damping that the
    two-mode efficiency formula does not model.
    """

    g_mu: float
    g_o_omega: float
    delta_m: float
    kappa_mu: float
    kappa_o: float
    gamma_m: float = 0.0
    delta_mu: float = 0.0
    delta_o2: float = 0.0

    @classmethod
    def matched(
        cls,
        g_mu: float,
        g_o_omega: float,
        delta_m: float,
        compensate_pulls: bool = True,
        gamma_m: float = 0.0,
    ) -> "ThreeModeSystem":
        """Impedance-matched symmetric system at the given operating point."""
        kappa = 2.0 * abs(g_mu) * abs(g_o_omega) / abs(delta_m)
        if kappa == 0.0:
            raise NumericFailure("matching is unphysical for vanishing couplings")
        pull_mu = cavity_pull(g_mu, delta_m) if compensate_pulls else 0.0
        pull_o = cavity_pull(g_o_omega, delta_m) if compensate_pulls else 0.0
        return cls(
            g_mu=g_mu,
            g_o_omega=g_o_omega,
            delta_m=delta_m,
            kappa_mu=kappa,
            kappa_o=kappa,
            gamma_m=gamma_m,
            delta_mu=pull_mu,
            delta_o2=pull_o,
        )

    @property
    def xi(self) -> float:
        return self.g_mu * self.g_o_omega / abs(self.delta_m)


def three_mode_smatrix(system: ThreeModeSystem, omega: float) -> TwoPortS:
    """Exact two-port response of the three-mode network at detuning omega.

    Solves the 3x3 frequency-domain system for the modes (a, b, m) with
    input-output ports on a and b only.  The spin mode couples as +G_mu to
    the microwave side and -G_oOmega to the optical side; only |xi| is
    observable in the efficiency, which the sign-flip test confirms.
    """
    entries = _three_mode_entries(system, np.asarray([omega], dtype=float))
    r_mu, r_o, t_mo, t_om = (complex(x[0]) for x in entries)
    return TwoPortS(omega=float(omega), r_mu=r_mu, r_o=r_o, t_mo=t_mo, t_om=t_om)


def _three_mode_entries(system: ThreeModeSystem, omegas: np.ndarray):
    n = omegas.size
    m = np.zeros((n, 3, 3), dtype=complex)
    m[:, 0, 0] = system.kappa_mu / 2.0 + 1j * (omegas + system.delta_mu)
    m[:, 0, 2] = 1j * system.g_mu
    m[:, 1, 1] = system.kappa_o / 2.0 + 1j * (omegas + system.delta_o2)
    m[:, 1, 2] = -1j * system.g_o_omega
    m[:, 2, 0] = 1j * system.g_mu
    m[:, 2, 1] = -1j * system.g_o_omega
    m[:, 2, 2] = system.gamma_m / 2.0 + 1j * (omegas + system.delta_m)
    rhs = np.zeros((n, 3, 2), dtype=complex)
    rhs[:, 0, 0] = math.sqrt(system.kappa_mu)
    rhs[:, 1, 1] = math.sqrt(system.kappa_o)
    try:
        fields = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"three-mode response is singular at this detuning: {exc}") from exc
    a = fields[:, 0, :]
    b = fields[:, 1, :]
    r_mu = math.sqrt(system.kappa_mu) * a[:, 0] - 1.0
    t_om = math.sqrt(system.kappa_mu) * a[:, 1]
    t_mo = math.sqrt(system.kappa_o) * b[:, 0]
    r_o = math.sqrt(system.kappa_o) * b[:, 1] - 1.0
    return r_mu, r_o, t_mo, t_om


def three_mode_efficiency(system: ThreeModeSystem, omegas) -> np.ndarray:
    """eta(omega) of the exact three-mode network over a grid."""
    omegas = np.asarray(omegas, dtype=float)
    _, _, t_mo, _ = _three_mode_entries(system, omegas)
    return np.abs(t_mo) ** 2


def peak_efficiency(system: ThreeModeSystem, window: Optional[float] = None):
    """Location and height of the conversion peak of the three-mode network."""
    kappa = min(system.kappa_mu, system.kappa_o)
    window = window if window is not None else 5.0 * kappa
    coarse = np.linspace(-window, window, 401)
    eta = three_mode_efficiency(system, coarse)
    omega0 = float(coarse[int(np.argmax(eta))])
    half = window / 100.0
    result = minimize_scalar(
        lambda w: -three_mode_efficiency(system, [w])[0],
        bounds=(omega0 - half, omega0 + half),
        method="bounded",
        options={"xatol": kappa * 1e-12},
    )
    return float(result.x), float(-result.fun)


@dataclass(frozen=True)
class RamanStageSystem:
    """Optical cavity plus n <= 20 ions, each with a spin and an optical level.

    Per-ion arrays: coupling g_o to the cavity, pump Rabi frequency Omega,
    optical detuning delta_o (nonzero) and spin detuning delta_mu.  The
    linearized single-excitation dynamics matrix over (cavity, optical_k,
    spin_k) is exact in the low-excitation regime.
    """

    g_o: np.ndarray
    omega_rabi: np.ndarray
    delta_o: np.ndarray
    delta_mu: np.ndarray
    kappa_o: float
    delta_cavity: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "g_o", np.atleast_1d(np.asarray(self.g_o, dtype=complex)))
        object.__setattr__(self, "omega_rabi", np.atleast_1d(np.asarray(self.omega_rabi, dtype=complex)))
        object.__setattr__(self, "delta_o", np.atleast_1d(np.asarray(self.delta_o, dtype=float)))
        object.__setattr__(self, "delta_mu", np.atleast_1d(np.asarray(self.delta_mu, dtype=float)))
        n = self.g_o.size
        if not (self.omega_rabi.size == n and self.delta_o.size == n and self.delta_mu.size == n):
            raise ValueError("per-ion arrays must have equal length")
        if n == 0 or n > 20:
            raise ValueError("ion count must be between 1 and 20")
        if np.any(self.delta_o == 0.0):
            raise ValueError("every delta_o must be nonzero")

    @property
    def n_ions(self) -> int:
        return self.g_o.size


def _dynamics_matrix(system: RamanStageSystem) -> np.ndarray:
    """Frequency matrix over (cavity, optical levels, spins); poles are its eigenvalues."""
    n = system.n_ions
    dim = 1 + 2 * n
    m = np.zeros((dim, dim), dtype=complex)
    m[0, 0] = system.delta_cavity - 0.5j * system.kappa_o
    for k in range(n):
        e = 1 + k
        s = 1 + n + k
        m[e, e] = system.delta_o[k]
        m[s, s] = system.delta_mu[k]
        m[e, 0] = system.g_o[k]
        m[0, e] = np.conj(system.g_o[k])
        m[e, s] = system.omega_rabi[k]
        m[s, e] = np.conj(system.omega_rabi[k])
    return m


def _polish_eigenpair(m: np.ndarray, lam: complex, vec: np.ndarray, sweeps: int = 3):
    """Sharpen one eigenpair by inverse iteration with Rayleigh-quotient updates.

    The spin eigenvalues sit many orders of magnitude below the matrix norm,
    so the raw QR eigenvalues carry absolute errors ~ eps * ||m|| that this
    refinement removes.
    """
    dim = m.shape[0]
    eye = np.eye(dim)
    for _ in range(sweeps):
        try:
            vec = np.linalg.solve(m - lam * eye, vec)
        except np.linalg.LinAlgError:
            break  # exactly converged: the shifted matrix is singular
        norm = np.linalg.norm(vec)
        if not np.isfinite(norm) or norm == 0.0:
            break
        vec = vec / norm
        lam = complex(vec.conj() @ (m @ vec))
    return lam, vec


@dataclass(frozen=True)
class IonExtraction:
    """Effective parameters of one ion measured from the exact response."""

    coupling_extracted: complex
    coupling_reference: complex
    coupling_relative_error: float
    stark_extracted: float
    stark_reference: float
    stark_relative_error: float
    adiabaticity: float
    flagged: bool


@dataclass(frozen=True)
class RamanExtraction:
    """Result of fitting the exact multimode response with the reduced model."""

    ions: Sequence[IonExtraction]
    cavity_pull_extracted: float
    cavity_pull_reference: float
    poles: np.ndarray = field(repr=False)


def raman_stage_oracle(system: RamanStageSystem) -> RamanExtraction:
    """Extract effective spin-cavity couplings and level shifts per ion.

    Diagonalizes the exact dynamics matrix, identifies the spin-dominated and
    cavity-dominated poles, and reads off

      * the level shift of each spin pole relative to its bare detuning,
        compared against the Stark expression -|Omega|^2/delta_o, and
      * the effective coupling from the residue of the spin pole in the
        spin <- cavity transfer function, |g_eff| = |residue * (p_s - p_b)|,
        compared against |g_o Omega / delta_o|.

    Ions with |Omega/delta_o| > 0.3 are flagged: the expansion behind the
    reduced model is no longer small there.
    """
    m = _dynamics_matrix(system)
    eigvals, eigvecs = np.linalg.eig(m)
    dominant = np.argmax(np.abs(eigvecs), axis=0)

    n = system.n_ions
    cavity_candidates = np.flatnonzero(dominant == 0)
    if cavity_candidates.size != 1:
        raise NumericFailure("could not resolve a unique cavity-dominated pole")
    idx_cavity = int(cavity_candidates[0])
    lam_cavity, _ = _polish_eigenpair(m, eigvals[idx_cavity], eigvecs[:, idx_cavity])

    ions = []
    for k in range(n):
        s_row = 1 + n + k
        candidates = np.flatnonzero(dominant == s_row)
        if candidates.size != 1:
            raise NumericFailure(f"could not resolve the spin pole of ion {k} (degenerate response)")
        idx = int(candidates[0])
        lam, vec = _polish_eigenpair(m, eigvals[idx], eigvecs[:, idx])

        # recompute the residue with the polished eigenvector folded back in
        vecs = eigvecs.copy()
        vecs[:, idx] = vec
        try:
            left = np.linalg.inv(vecs)
        except np.linalg.LinAlgError as exc:
            raise NumericFailure("eigenvector matrix is singular; poles not resolvable") from exc
        residue = vecs[s_row, idx] * left[idx, 0]
        coupling_extracted = np.conj(residue * (lam - lam_cavity))
        coupling_reference = -system.g_o[k] * np.conj(system.omega_rabi[k]) / system.delta_o[k]

        stark_extracted = float(np.real(lam)) - system.delta_mu[k]
        stark_reference = -abs(system.omega_rabi[k]) ** 2 / system.delta_o[k]

        ref_scale = max(abs(coupling_reference), 1e-300)
        coupling_err = abs(abs(coupling_extracted) - abs(coupling_reference)) / ref_scale
        stark_scale = max(abs(stark_reference), 1e-300)
        stark_err = abs(stark_extracted - stark_reference) / stark_scale
        adiabaticity = float(abs(system.omega_rabi[k]) / abs(system.delta_o[k]))
        ions.append(
            IonExtraction(
                coupling_extracted=complex(coupling_extracted),
                coupling_reference=complex(coupling_reference),
                coupling_relative_error=float(coupling_err),
                stark_extracted=stark_extracted,
                stark_reference=float(stark_reference),
                stark_relative_error=float(stark_err),
                adiabaticity=adiabaticity,
                flagged=adiabaticity > 0.3,
            )
        )

    pull_extracted = float(np.real(lam_cavity)) - system.delta_cavity
    pull_reference = float(-np.sum(np.abs(system.g_o) ** 2 / system.delta_o))
    return RamanExtraction(
        ions=tuple(ions),
        cavity_pull_extracted=pull_extracted,
        cavity_pull_reference=pull_reference,
        poles=eigvals,
    )


@dataclass(frozen=True)
class ScalingFit:
    """Log-log fit of the reduced-model error against the spin-mode detuning."""

    exponent: float
    delta_ms: np.ndarray
    deviations: np.ndarray


def band_deviation(system: ThreeModeSystem, n_points: int = 201) -> float:
    """sup over |omega| <= kappa of |eta_3(omega) - eta_2(omega)|.

    eta_2 is the reduced two-mode efficiency with xi = G_mu G_oOmega/delta_M
    and the same decay rates.  This is the quantity that shrinks
    quadratically in G/delta_M; the band-center efficiency itself is exact
    once the pulls are compensated.
    """
    kappa = min(system.kappa_mu, system.kappa_o)
    omegas = np.linspace(-kappa, kappa, n_points)
    eta3 = three_mode_efficiency(system, omegas)
    eta2 = np.array([efficiency(system.xi, system.kappa_mu, system.kappa_o, w) for w in omegas])
    return float(np.max(np.abs(eta3 - eta2)))


def elimination_error_scaling(base: ThreeModeSystem, multipliers: Sequence[float]) -> ScalingFit:
    """Fit how the reduced-model error falls as delta_M grows at fixed couplings.

    For each multiplier the spin-mode detuning is scaled, the decay rates are
    re-solved to keep the device impedance matched, the pulls are
    re-compensated and the in-band deviation from the two-mode model is
    measured.  Returns the slope of log(deviation) against log(delta_M);
    quadratic convergence of the elimination shows up as a slope of -2.
    """
    multipliers = list(multipliers)
    if len(multipliers) < 3:
        raise ValueError("at least 3 multipliers are required to fit a scaling exponent")
    if any(m < 1.0 for m in multipliers):
        raise ValueError("multipliers must be >= 1")
    delta_ms = []
    deviations = []
    for mult in multipliers:
        delta_m = base.delta_m * mult
        kappa = 2.0 * base.g_mu * base.g_o_omega / delta_m
        system = replace(
            base,
            delta_m=delta_m,
            kappa_mu=kappa,
            kappa_o=kappa,
            delta_mu=cavity_pull(base.g_mu, delta_m),
            delta_o2=cavity_pull(base.g_o_omega, delta_m),
        )
        delta_ms.append(delta_m)
        deviations.append(band_deviation(system))
    delta_ms = np.asarray(delta_ms)
    deviations = np.asarray(deviations)
    if np.any(deviations <= 0.0):
        raise NumericFailure("deviation vanished; nothing to fit")
    slope = float(np.polyfit(np.log(delta_ms), np.log(deviations), 1)[0])
    return ScalingFit(exponent=slope, delta_ms=delta_ms, deviations=deviations)
