"""Command-line interface: exit codes, file outputs and determinism."""

import json

import numpy as np
import pytest

from xducer import TWO_PI, efficiency, heuristic_design, load_reference_inputs
from xducer.cli import main, parse_frequency
from xducer.config import reference_config_path


@pytest.fixture()
def reference_raw():
    with open(reference_config_path(), "r", encoding="utf-8") as fh:
        return json.load(fh)


def _write_config(tmp_path, raw, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(raw))
    return str(path)


def test_parse_frequency_suffixes():
    assert parse_frequency("5GHz") == 5e9
    assert parse_frequency("2e6Hz") == 2e6
    assert parse_frequency("1.5 MHz") == 1.5e6
    assert parse_frequency("-3e6") == -3e6


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    for sub in ("feasibility", "efficiency", "match", "sweep", "oracle"):
        assert main([sub, "--help"]) == 0
    capsys.readouterr()


def test_feasibility_reference_config(tmp_path):
    out = tmp_path / "report.json"
    code = main(["feasibility", "--config", reference_config_path(), "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["design"]["nominal"]["Q_o"] == pytest.approx(9.75e7, rel=1e-6)
    assert all(c["pass"] for c in report["conditions"])


def test_feasibility_missing_file():
    assert main(["feasibility", "--config", "/nonexistent/config.json", "--out", "-"]) == 1


def test_feasibility_invalid_config(tmp_path, reference_raw, capsys):
    reference_raw["magnon"]["delta_M"] = {"value": 500, "unit": "MHz"}
    path = _write_config(tmp_path, reference_raw)
    assert main(["feasibility", "--config", path, "--out", str(tmp_path / "r.json")]) == 1
    assert "DetuningOutsideModeWindow" in capsys.readouterr().err


def test_feasibility_infeasible_still_writes_report(tmp_path, reference_raw):
    reference_raw["magnon"]["mode_spacing"] = {"value": 1, "unit": "kHz"}
    reference_raw["magnon"]["delta_M"] = {"value": 1, "unit": "kHz"}
    path = _write_config(tmp_path, reference_raw)
    out = tmp_path / "report.json"
    assert main(["feasibility", "--config", path, "--out", str(out)]) == 2
    report = json.loads(out.read_text())
    assert not report["flags"]["q_feasible"]


def test_efficiency_spectrum_csv(tmp_path):
    out = tmp_path / "spectrum.csv"
    code = main(
        [
            "efficiency",
            "--config",
            reference_config_path(),
            "--omega-min=-10MHz",
            "--omega-max=10MHz",
            "--points",
            "1001",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert len(lines) == 1002
    header = lines[0].split(",")
    assert header[0] == "omega_hz" and header[1] == "eta"
    rows = [line.split(",") for line in lines[1:]]
    etas = np.array([float(r[1]) for r in rows])
    center = rows[500]
    assert float(center[0]) == 0.0
    assert float(center[1]) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(etas, etas[::-1], rtol=1e-9)


def test_efficiency_rejects_single_point():
    code = main(
        [
            "efficiency",
            "--config",
            reference_config_path(),
            "--omega-min=-1MHz",
            "--omega-max=1MHz",
            "--points",
            "1",
            "--out",
            "-",
        ]
    )
    assert code == 1


def test_match_prints_solution(capsys):
    code = main(
        [
            "match",
            "--g-mu",
            "10MHz",
            "--g-o-omega",
            "10MHz",
            "--delta-m",
            "100MHz",
            "--omega-mu",
            "5GHz",
            "--omega-o",
            "1.95e14",
        ]
    )
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kappa"]["hz"] == pytest.approx(2e6, rel=1e-9)
    assert doc["Q_mu"] == pytest.approx(2.5e3, rel=1e-9)
    assert doc["Q_o"] == pytest.approx(9.75e7, rel=1e-9)


def test_match_requires_frequencies():
    assert main(["match", "--g-mu", "10MHz", "--g-o-omega", "10MHz", "--delta-m", "100MHz"]) == 1


def test_sweep_pump_power_sqrt_scaling(tmp_path):
    spec = {
        "parameter": "drive.pump_power",
        "values": [0.25e-6, 1e-6, 4e-6],
        "outputs": ["G_oOmega"],
    }
    spec_path = tmp_path / "sweep.json"
    spec_path.write_text(json.dumps(spec))
    out = tmp_path / "sweep.csv"
    code = main(["sweep", "--config", reference_config_path(), "--spec", str(spec_path), "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "drive.pump_power,G_oOmega,error"
    values = [float(line.split(",")[1]) for line in lines[1:]]
    assert values[0] / values[1] == pytest.approx(0.5, rel=1e-9)
    assert values[2] / values[1] == pytest.approx(2.0, rel=1e-9)


def test_sweep_optical_q_plateau(tmp_path):
    spec = {
        "parameter": "optical_cavity.Q",
        "values": {"from": 1e6, "to": 3e8, "count": 25, "scale": "log"},
        "outputs": ["eta_peak"],
    }
    spec_path = tmp_path / "sweep.json"
    spec_path.write_text(json.dumps(spec))
    out = tmp_path / "sweep.csv"
    code = main(["sweep", "--config", reference_config_path(), "--spec", str(spec_path), "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().split("\n")[1:]
    q_values = np.array([float(line.split(",")[0]) for line in lines])
    etas = np.array([float(line.split(",")[1]) for line in lines])
    # independent check against the efficiency formula with the design xi
    inputs = load_reference_inputs()
    design = heuristic_design(inputs)
    omega_o = inputs.optical_cavity.omega
    expected = np.array([efficiency(design.xi, design.kappa, omega_o / q, 0.0) for q in q_values])
    assert np.allclose(etas, expected, rtol=1e-9)
    peak = int(np.argmax(etas))
    assert etas.max() > 0.99  # plateau reaches full conversion near matching
    assert np.all(np.diff(etas[: peak + 1]) > 0)  # monotone approach
    # exact matching point: kappa_o = omega_o / Q = design kappa
    assert efficiency(design.xi, design.kappa, design.kappa, 0.0) == pytest.approx(1.0, abs=1e-12)


def test_sweep_rejects_single_count(tmp_path):
    spec = {"parameter": "optical_cavity.Q", "values": {"from": 1e6, "to": 1e8, "count": 1}}
    spec_path = tmp_path / "sweep.json"
    spec_path.write_text(json.dumps(spec))
    assert main(["sweep", "--config", reference_config_path(), "--spec", str(spec_path), "--out", "-"]) == 1


def test_sweep_rejects_unknown_path(tmp_path):
    spec = {"parameter": "magnon.flux", "values": [1.0, 2.0]}
    spec_path = tmp_path / "sweep.json"
    spec_path.write_text(json.dumps(spec))
    assert main(["sweep", "--config", reference_config_path(), "--spec", str(spec_path), "--out", "-"]) == 1


def test_sweep_per_point_errors_recorded(tmp_path):
    spec = {"parameter": "magnon.mode_spacing", "values": [0.0, 1e8], "outputs": ["kappa"]}
    spec_path = tmp_path / "sweep.json"
    spec_path.write_text(json.dumps(spec))
    out = tmp_path / "sweep.csv"
    code = main(["sweep", "--config", reference_config_path(), "--spec", str(spec_path), "--out", str(out)])
    assert code == 0  # one point still succeeded
    lines = out.read_text().strip().split("\n")
    first = lines[1].split(",")
    assert first[1] == "" and first[2] != ""
    second = lines[2].split(",")
    assert float(second[1]) == pytest.approx(2e6, rel=1e-9) and second[2] == ""


def test_sweep_all_points_failing_is_numeric_failure(tmp_path):
    spec = {"parameter": "magnon.mode_spacing", "values": [0.0, -1e8], "outputs": ["kappa"]}
    spec_path = tmp_path / "sweep.json"
    spec_path.write_text(json.dumps(spec))
    assert main(["sweep", "--config", reference_config_path(), "--spec", str(spec_path), "--out", "-"]) == 3


def test_sweep_parallel_determinism(tmp_path):
    spec = {
        "parameter": "optical_cavity.Q",
        "values": {"from": 1e7, "to": 1e8, "count": 12, "scale": "log"},
        "outputs": ["eta_peak", "bandwidth"],
    }
    spec_path = tmp_path / "sweep.json"
    spec_path.write_text(json.dumps(spec))
    out1 = tmp_path / "s1.csv"
    out2 = tmp_path / "s2.csv"
    assert main(["sweep", "--config", reference_config_path(), "--spec", str(spec_path), "--out", str(out1), "--jobs", "1"]) == 0
    assert main(["sweep", "--config", reference_config_path(), "--spec", str(spec_path), "--out", str(out2), "--jobs", "4"]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_oracle_scaling_report(tmp_path):
    out = tmp_path / "oracle.json"
    code = main(["oracle", "--config", reference_config_path(), "--mode", "scaling", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["fitted_exponent"] == pytest.approx(-2.0, abs=0.3)


def test_oracle_three_mode_report(tmp_path):
    out = tmp_path / "oracle.json"
    code = main(["oracle", "--config", reference_config_path(), "--mode", "three_mode", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["compensated"]["eta_peak"] == pytest.approx(1.0, abs=0.04)
    assert abs(report["compensated"]["omega_peak"]["rad_per_s"]) < 0.1 * TWO_PI * 2e6
    assert report["compensated"]["unitarity_residual"] < 1e-10


def test_oracle_raman_zero_drive(tmp_path, reference_raw):
    reference_raw["drive"]["pump_power"] = 0.0
    path = _write_config(tmp_path, reference_raw)
    out = tmp_path / "oracle.json"
    code = main(["oracle", "--config", path, "--mode", "raman", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    ion = report["ions"][0]
    assert abs(complex(*ion["coupling_extracted_rad_per_s"])) < 1e-9
    assert abs(ion["stark_extracted_rad_per_s"]) < 1e-9


def test_oracle_unknown_mode():
    assert main(["oracle", "--config", reference_config_path(), "--mode", "bogus", "--out", "-"]) == 1
