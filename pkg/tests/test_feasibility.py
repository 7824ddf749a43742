"""Design recipe, condition checks and the feasibility report document."""

import dataclasses
import json
import math

import numpy as np
import pytest

from xducer import (
    CODATA,
    TWO_PI,
    all_pass,
    bandwidth_fwhm,
    check_conditions,
    emit_report,
    heuristic_design,
    load_config,
    report_json,
    serialize,
    validate,
)


def _modified_inputs(reference_inputs, **section_updates):
    raw = serialize(reference_inputs)
    for path, value in section_updates.items():
        section, key = path.split(".")
        raw[section][key] = value
    return validate(load_config(json.dumps(raw)))


def test_reference_design_point(reference_inputs):
    design = heuristic_design(reference_inputs)
    assert design.delta_o == pytest.approx(TWO_PI * 6.2e9, rel=1e-12)
    assert design.delta_m == pytest.approx(TWO_PI * 1e8, rel=1e-12)
    assert design.g_mu == pytest.approx(TWO_PI * 1e7, rel=1e-12)
    assert design.g_o_omega == pytest.approx(TWO_PI * 1e7, rel=1e-12)
    assert design.kappa == pytest.approx(TWO_PI * 2e6, rel=1e-12)
    assert design.q_mu == pytest.approx(2.5e3, rel=1e-9)
    assert design.q_o == pytest.approx(9.75e7, rel=1e-9)
    assert design.bandwidth == pytest.approx(math.sqrt(2) * TWO_PI * 2e6, rel=1e-6)


def test_reference_design_clamp_metadata(reference_inputs):
    design = heuristic_design(reference_inputs)
    n_ions = reference_inputs.crystal.ion_count
    g_o = math.sqrt(TWO_PI * 1.95e14 / (2 * CODATA.hbar * CODATA.eps0 * 2.9e-11)) * 2.0e-32
    required = (TWO_PI * 1e7) * (TWO_PI * 6.2e9) / (math.sqrt(n_ions) * g_o * 2.4e-4)
    assert design.omega0_required == pytest.approx(required, rel=1e-9)
    assert design.omega0_available == pytest.approx(TWO_PI * 68e6, rel=1e-12)
    assert design.raman_clamped
    assert design.raman_shortfall == pytest.approx(required / (TWO_PI * 68e6), rel=1e-9)
    assert design.omega0 == design.omega0_available
    assert design.chi_required == pytest.approx(TWO_PI * 1e7 / design.g_mu_max, rel=1e-12)
    assert design.chi_required < 1.0


def test_reference_achievable_block(reference_inputs):
    design = heuristic_design(reference_inputs)
    assert design.g_o_omega_achievable == pytest.approx(design.g_o_omega_max, rel=1e-12)
    expected_kappa = 2 * design.g_mu_achievable * design.g_o_omega_achievable / design.delta_m
    assert design.kappa_achievable == pytest.approx(expected_kappa, rel=1e-12)
    assert design.bandwidth_achievable == pytest.approx(math.sqrt(2) * expected_kappa, rel=1e-6)
    # even the pump-limited design clears a megahertz of bandwidth
    assert design.bandwidth_achievable / TWO_PI > 1e6
    assert design.q_feasible


def test_bandwidth_field_consistency(reference_inputs):
    design = heuristic_design(reference_inputs)
    assert design.bandwidth == pytest.approx(
        bandwidth_fwhm(design.xi, design.kappa, design.kappa).value, rel=1e-6
    )


def test_conditions_pass_on_reference(reference_inputs):
    design = heuristic_design(reference_inputs)
    checks = {c.id: c for c in check_conditions(design, reference_inputs)}
    assert abs(checks["a_impedance"].ratio - 1.0) <= 1e-9
    assert checks["b_adiabatic_optical"].ratio == pytest.approx(6.2e9 / 68e6, rel=1e-6)
    assert checks["c_adiabatic_magnon"].ratio == pytest.approx(10.0, rel=1e-9)
    assert checks["d_linewidth"].ratio == pytest.approx(5.0, rel=1e-9)
    assert all(c.passed for c in checks.values())


def test_condition_a_reports_mismatch(reference_inputs):
    design = heuristic_design(reference_inputs)
    # doubling kappa at fixed xi breaks matching; eta(0) collapses to 0.64
    mismatched = dataclasses.replace(design, kappa=2 * design.kappa)
    checks = {c.id: c for c in check_conditions(mismatched, reference_inputs)}
    assert not checks["a_impedance"].passed
    assert checks["a_impedance"].ratio == pytest.approx(0.5, rel=1e-12)
    assert "0.64" in checks["a_impedance"].detail


def test_condition_c_fails_at_unit_ratio(reference_inputs):
    design = heuristic_design(reference_inputs)
    bad = dataclasses.replace(design, g_mu=design.delta_m, g_o_omega=design.delta_m)
    checks = {c.id: c for c in check_conditions(bad, reference_inputs)}
    assert checks["c_adiabatic_magnon"].ratio == pytest.approx(1.0, rel=1e-12)
    assert not checks["c_adiabatic_magnon"].passed


def test_condition_e_fails_when_q_unreachable(reference_inputs):
    inputs = _modified_inputs(reference_inputs, **{"magnon.mode_spacing": 1e3, "magnon.delta_M": 1e3})
    design = heuristic_design(inputs)
    checks = {c.id: c for c in check_conditions(design, inputs)}
    assert not design.q_feasible
    assert not checks["e_bandwidth"].passed
    assert not all_pass(checks.values())


def test_zero_linewidth_rejected(reference_inputs):
    ion = dataclasses.replace(reference_inputs.ion, gamma_o=0.0)
    broken = dataclasses.replace(reference_inputs, ion=ion)
    with pytest.raises(ValueError):
        heuristic_design(broken)


def test_configured_delta_o_overrides_policy(reference_inputs):
    inputs = _modified_inputs(reference_inputs, **{"drive.delta_o": 9.9e9})
    design = heuristic_design(inputs)
    assert design.delta_o == pytest.approx(TWO_PI * 9.9e9, rel=1e-12)


def test_mode_spacing_scaling(reference_inputs):
    # ten times the spacing scales kappa and bandwidth tenfold until a clamp binds
    inputs = _modified_inputs(
        reference_inputs, **{"magnon.mode_spacing": 1e9, "magnon.delta_M": 1e9}
    )
    base = heuristic_design(reference_inputs)
    wide = heuristic_design(inputs)
    assert wide.kappa == pytest.approx(10 * base.kappa, rel=1e-9)
    assert wide.bandwidth == pytest.approx(10 * base.bandwidth, rel=1e-6)


def test_report_contents(reference_inputs):
    design = heuristic_design(reference_inputs)
    checks = check_conditions(design, reference_inputs)
    report = emit_report(design, checks, {"eta_peak": 1.0, "bandwidth": design.bandwidth}, reference_inputs)
    assert report["schema"] == 1
    assert report["eta_peak"] == 1.0
    assert report["design"]["nominal"]["kappa"]["hz"] == pytest.approx(2e6, rel=1e-9)
    assert report["design"]["nominal"]["kappa"]["rad_per_s"] == pytest.approx(TWO_PI * 2e6, rel=1e-9)
    assert len(report["conditions"]) == 5
    assert report["flags"]["raman_coupling_clamped"]
    assert report["warnings"] == []
    assert len(report["inputs_digest"]) == 64


def test_report_determinism(reference_inputs):
    design = heuristic_design(reference_inputs)
    checks = check_conditions(design, reference_inputs)
    summary = {"eta_peak": 1.0, "bandwidth": design.bandwidth}
    first = report_json(emit_report(design, checks, summary, reference_inputs))
    second = report_json(emit_report(design, checks, summary, reference_inputs))
    assert first.encode() == second.encode()


def test_report_empty_checks_warns(reference_inputs):
    design = heuristic_design(reference_inputs)
    report = emit_report(design, [], {"eta_peak": 1.0, "bandwidth": design.bandwidth}, reference_inputs)
    assert report["conditions"] == []
    assert report["warnings"] == ["no conditions evaluated"]


def test_construction_conditions_hold_near_reference(reference_inputs):
    # conditions (a), (c), (d) pass by construction across a neighborhood
    rng = np.random.default_rng(31)
    for _ in range(10):
        updates = {
            "crystal.rho": 4.0e27 * rng.uniform(0.8, 1.2),
            "ion.gamma_o": 1.24e9 * rng.uniform(0.8, 1.2),
            "magnon.mode_spacing": 1e8 * rng.uniform(0.8, 1.2),
        }
        updates["magnon.delta_M"] = updates["magnon.mode_spacing"]
        inputs = _modified_inputs(reference_inputs, **updates)
        design = heuristic_design(inputs)
        checks = {c.id: c for c in check_conditions(design, inputs)}
        assert checks["a_impedance"].passed
        assert checks["c_adiabatic_magnon"].passed
        assert checks["d_linewidth"].passed
