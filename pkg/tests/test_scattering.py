"""Two-port S-matrix, efficiency spectrum, bandwidth, matching and the ODE oracle."""

import math

import numpy as np
import pytest

from xducer import (
    TWO_PI,
    NumericFailure,
    bandwidth_fwhm,
    efficiency,
    efficiency_spectrum,
    impedance_solve,
    smatrix,
    steady_state_transmission,
    time_domain_oracle,
)

KAPPA = TWO_PI * 2e6


def test_matched_full_conversion():
    xi = KAPPA / 2  # 2|xi| = sqrt(kappa^2)
    s = smatrix(xi, KAPPA, KAPPA, 0.0)
    assert abs(s.t_mo) == pytest.approx(1.0, abs=1e-12)
    assert abs(s.r_mu) == pytest.approx(0.0, abs=1e-12)
    assert abs(s.r_o) == pytest.approx(0.0, abs=1e-12)


def test_decoupled_cavities_reflect():
    s = smatrix(0.0, KAPPA, 3 * KAPPA, 0.0)
    assert s.r_mu == pytest.approx(1.0 + 0.0j, abs=1e-14)
    assert s.r_o == pytest.approx(1.0 + 0.0j, abs=1e-14)
    assert s.t_mo == 0.0


def test_half_maximum_point():
    # matched symmetric case: eta(kappa/sqrt(2)) = 1/2
    assert efficiency(KAPPA / 2, KAPPA, KAPPA, KAPPA / math.sqrt(2)) == pytest.approx(0.5, abs=1e-12)


def test_overcoupled_band_center():
    assert efficiency(KAPPA, KAPPA, KAPPA, 0.0) == pytest.approx(0.64, abs=1e-12)


def test_reciprocal_magnitudes():
    rng = np.random.default_rng(11)
    for _ in range(50):
        kmu = 10 ** rng.uniform(5, 8)
        ko = kmu * 10 ** rng.uniform(-1.5, 1.5)
        xi = math.sqrt(kmu * ko) * rng.uniform(0.1, 2.0) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        w = rng.uniform(-5, 5) * math.sqrt(kmu * ko)
        s = smatrix(xi, kmu, ko, w)
        assert abs(s.t_mo) == pytest.approx(abs(s.t_om), rel=1e-12)


def test_unitarity_random_draws():
    rng = np.random.default_rng(5)
    for _ in range(200):
        kmu = 10 ** rng.uniform(5, 8)
        ko = kmu * 10 ** rng.uniform(-2, 2)
        xi = math.sqrt(kmu * ko) * rng.uniform(0, 3) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        w = rng.uniform(-10, 10) * math.sqrt(kmu * ko)
        s = smatrix(xi, kmu, ko, w)
        assert abs(abs(s.r_mu) ** 2 + abs(s.t_mo) ** 2 - 1) < 1e-10
        assert abs(abs(s.r_o) ** 2 + abs(s.t_om) ** 2 - 1) < 1e-10


def test_phase_invariance_of_efficiency():
    for theta in (0.3, 1.1, 2.9):
        assert efficiency(KAPPA / 2 * np.exp(1j * theta), KAPPA, KAPPA, 0.4 * KAPPA) == pytest.approx(
            efficiency(KAPPA / 2, KAPPA, KAPPA, 0.4 * KAPPA), rel=1e-12
        )


def test_spectrum_even_symmetry():
    omegas = np.linspace(-5 * KAPPA, 5 * KAPPA, 801)
    spec = efficiency_spectrum(KAPPA / 2, KAPPA, KAPPA, omegas)
    assert np.allclose(spec.eta, spec.eta[::-1], rtol=1e-12, atol=1e-15)
    assert np.allclose(spec.eta, np.abs(spec.t_mo) ** 2, rtol=1e-12, atol=0)
    assert np.all(spec.eta <= 1 + 1e-12)


def test_spectrum_grid_validation():
    with pytest.raises(ValueError):
        efficiency_spectrum(KAPPA / 2, KAPPA, KAPPA, [1.0, 0.0])
    with pytest.raises(ValueError):
        efficiency_spectrum(KAPPA / 2, KAPPA, KAPPA, [0.0, np.inf])


def test_spectrum_csv_format():
    spec = efficiency_spectrum(KAPPA / 2, KAPPA, KAPPA, np.linspace(-KAPPA, KAPPA, 5))
    text = spec.to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == spec.CSV_HEADER
    assert len(lines) == 6
    assert len(lines[1].split(",")) == 10
    assert spec.to_csv() == text  # deterministic


def test_bandwidth_matched_sqrt2_kappa():
    result = bandwidth_fwhm(KAPPA / 2, KAPPA, KAPPA)
    assert result.value == pytest.approx(math.sqrt(2) * KAPPA, rel=1e-6)
    assert not result.split_resonance


def test_bandwidth_rate_scaling():
    small = bandwidth_fwhm(KAPPA / 2, KAPPA, KAPPA)
    large = bandwidth_fwhm(10 * KAPPA / 2, 10 * KAPPA, 10 * KAPPA)
    assert large.value == pytest.approx(10 * small.value, rel=1e-9)


def test_bandwidth_split_resonance():
    # xi = kappa: peaks at +-sqrt(3)/2 kappa reach 1; envelope half-maximum at
    # u^2 - (3/2) kappa^2 u - (7/16) kappa^4 = 0 -> outer crossing sqrt(1.75) kappa
    result = bandwidth_fwhm(KAPPA, KAPPA, KAPPA)
    assert result.split_resonance
    assert result.peak_eta == pytest.approx(1.0, abs=1e-12)
    assert result.peak_omega == pytest.approx(math.sqrt(3) / 2 * KAPPA, rel=1e-9)
    assert result.value == pytest.approx(2 * math.sqrt(1.75) * KAPPA, rel=1e-6)
    assert result.value > math.sqrt(2) * KAPPA


def test_bandwidth_zero_coupling_rejected():
    with pytest.raises(NumericFailure):
        bandwidth_fwhm(0.0, KAPPA, KAPPA)


def test_impedance_solve_reference_point():
    sol = impedance_solve(TWO_PI * 1e7, TWO_PI * 1e7, TWO_PI * 1e8, TWO_PI * 5e9, TWO_PI * 1.95e14)
    assert sol.kappa == pytest.approx(TWO_PI * 2e6, rel=1e-12)
    assert sol.q_mu == pytest.approx(2.5e3, rel=1e-12)
    assert sol.q_o == pytest.approx(9.75e7, rel=1e-12)
    assert sol.physical


def test_impedance_solve_degenerate():
    sol = impedance_solve(0.0, TWO_PI * 1e7, TWO_PI * 1e8, TWO_PI * 5e9, TWO_PI * 1.95e14)
    assert sol.kappa == 0.0
    assert not sol.physical


def test_time_domain_zero_input():
    res = time_domain_oracle(KAPPA / 2, KAPPA, KAPPA, lambda t: 0.0, 10 / KAPPA)
    assert np.all(res.a_out == 0)
    assert np.all(res.b_out == 0)


def test_time_domain_matched_steady_state():
    ratio = steady_state_transmission(KAPPA / 2, KAPPA, KAPPA, 0.0)
    assert abs(ratio) == pytest.approx(1.0, abs=1e-6)


def test_time_domain_matches_smatrix_random_draws():
    rng = np.random.default_rng(77)
    checked = 0
    while checked < 10:
        kmu = 10 ** rng.uniform(5.5, 6.5)
        ko = kmu * 10 ** rng.uniform(-0.5, 0.5)
        xi = math.sqrt(kmu * ko) / 2 * rng.uniform(0.5, 1.5) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        w = rng.uniform(-2, 2) * min(kmu, ko)
        analytic = smatrix(xi, kmu, ko, w).t_mo
        if abs(analytic) < 0.05:
            continue
        numeric = steady_state_transmission(xi, kmu, ko, w)
        assert abs(numeric - analytic) / abs(analytic) < 1e-6
        checked += 1


def test_time_domain_gaussian_pulse_energy():
    # quasi-static pulse: output energy fraction equals eta at the carrier
    xi = KAPPA / 2
    sigma = 20 / KAPPA
    center = 5 * sigma

    def pulse(t):
        return math.exp(-((t - center) ** 2) / (2 * sigma**2))

    res = time_domain_oracle(xi, KAPPA, KAPPA, pulse, 12 * sigma, rtol=1e-10, atol=1e-13, n_samples=4000)
    energy_in = np.trapezoid(np.abs([pulse(t) for t in res.t]) ** 2, res.t)
    energy_out = np.trapezoid(np.abs(res.b_out) ** 2, res.t)
    assert energy_out / energy_in == pytest.approx(efficiency(xi, KAPPA, KAPPA, 0.0), abs=1e-3)
