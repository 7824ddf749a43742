"""Command-line front end.

Subcommands: feasibility, efficiency, match, sweep, oracle.  Frequencies on
flags are Hz by default and accept unit suffixes (5GHz, 2e6Hz).  Exit codes:
0 success, 1 usage or validation error, 2 design infeasible (report still
written), 3 numeric failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .config import SystemConfig, dual_frequency, load_config
from .constants import TWO_PI
from .errors import NumericFailure, ValidationError, XducerError
from .feasibility import Policy, all_pass, check_conditions, emit_report, heuristic_design, report_json
from .params import validate
from .reduction import (
    RamanStageSystem,
    ThreeModeSystem,
    band_deviation,
    elimination_error_scaling,
    peak_efficiency,
    raman_stage_oracle,
    three_mode_smatrix,
)
from .couplings import single_ion_o_coupling
from .scattering import efficiency, efficiency_spectrum, impedance_solve

_FREQ_RE = re.compile(r"^\s*([-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?)\s*(GHz|MHz|kHz|Hz)?\s*$")
_FREQ_SCALE = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9, None: 1.0}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 instead of argparse's default 2
        raise _UsageError(message)


def parse_frequency(text: str) -> float:
    """Flag value in Hz; bare numbers are Hz, suffixes GHz/MHz/kHz/Hz scale."""
    match = _FREQ_RE.match(str(text))
    if not match:
        raise _UsageError(f"cannot parse frequency {text!r}")
    return float(match.group(1)) * _FREQ_SCALE[match.group(2)]


def _freq_flag(text: str) -> float:
    try:
        return parse_frequency(text)
    except _UsageError:
        raise argparse.ArgumentTypeError(f"cannot parse frequency {text!r}")


def _load_raw(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise _UsageError(f"cannot read config: {exc}")
    except json.JSONDecodeError as exc:
        raise _UsageError(f"malformed config document: {exc}")


def _config_from_raw(raw: dict) -> SystemConfig:
    return load_config(json.dumps(raw))


def _write(path, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _policy(args) -> Policy:
    return Policy(
        linewidth_multiple=args.linewidth_multiple,
        separation_factor=args.separation_factor,
        mode_spacing_derate=args.mode_spacing_derate,
    )


def _operating_rates(config: SystemConfig, policy: Policy):
    """Design-point xi plus the actual cavity rates (config overrides the solver)."""
    inputs = validate(config)
    design = heuristic_design(inputs, policy)
    kappa_mu = inputs.microwave_cavity.kappa if inputs.microwave_cavity.kappa else design.kappa
    kappa_o = inputs.optical_cavity.kappa if inputs.optical_cavity.kappa else design.kappa
    return inputs, design, kappa_mu, kappa_o


def cmd_feasibility(args) -> int:
    config = _config_from_raw(_load_raw(args.config))
    inputs = validate(config)
    policy = _policy(args)
    design = heuristic_design(inputs, policy)
    checks = check_conditions(design, inputs, policy)
    summary = {
        "eta_peak": efficiency(design.xi, design.kappa, design.kappa, 0.0),
        "bandwidth": design.bandwidth,
    }
    report = emit_report(design, checks, summary, inputs)
    _write(args.out, report_json(report))
    return 0 if all_pass(checks) else 2


def cmd_efficiency(args) -> int:
    if args.points < 2:
        raise _UsageError("--points must be at least 2")
    if args.omega_max <= args.omega_min:
        raise _UsageError("--omega-max must exceed --omega-min")
    config = _config_from_raw(_load_raw(args.config))
    _, design, kappa_mu, kappa_o = _operating_rates(config, _policy(args))
    omegas = np.linspace(args.omega_min * TWO_PI, args.omega_max * TWO_PI, args.points)
    spectrum = efficiency_spectrum(design.xi, kappa_mu, kappa_o, omegas)
    _write(args.out, spectrum.to_csv())
    return 0


def cmd_match(args) -> int:
    if args.config:
        config = _config_from_raw(_load_raw(args.config))
        inputs = validate(config)
        omega_mu = args.omega_mu * TWO_PI if args.omega_mu else inputs.microwave_cavity.omega
        omega_o = args.omega_o * TWO_PI if args.omega_o else inputs.optical_cavity.omega
    else:
        if not (args.omega_mu and args.omega_o):
            raise _UsageError("provide --omega-mu and --omega-o or a --config")
        omega_mu = args.omega_mu * TWO_PI
        omega_o = args.omega_o * TWO_PI
    solution = impedance_solve(
        args.g_mu * TWO_PI, args.g_o_omega * TWO_PI, args.delta_m * TWO_PI, omega_mu, omega_o
    )
    doc = {
        "kappa": dual_frequency(solution.kappa),
        "Q_mu": solution.q_mu,
        "Q_o": solution.q_o,
        "physical": solution.physical,
    }
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return 0


_OBSERVABLES = ("eta_peak", "bandwidth", "kappa", "Q_mu", "Q_o", "G_mu", "G_oOmega", "xi")


def _sweep_values(spec: dict):
    values = spec.get("values")
    if isinstance(values, list):
        if len(values) < 1:
            raise _UsageError("sweep values list is empty")
        return [float(v) for v in values]
    if isinstance(values, dict):
        for key in values:
            if key not in ("from", "to", "count", "scale"):
                raise _UsageError(f"unknown sweep range key {key!r}")
        try:
            lo = float(values["from"])
            hi = float(values["to"])
            count = int(values["count"])
        except KeyError as exc:
            raise _UsageError(f"sweep range needs {exc.args[0]!r}")
        scale = values.get("scale", "linear")
        if count < 2:
            raise _UsageError("sweep range count must be at least 2")
        if scale == "linear":
            return list(np.linspace(lo, hi, count))
        if scale == "log":
            if lo <= 0 or hi <= 0:
                raise _UsageError("log-scale sweep endpoints must be positive")
            return list(np.geomspace(lo, hi, count))
        raise _UsageError(f"unknown sweep scale {scale!r}")
    raise _UsageError("sweep spec needs a 'values' list or range object")


def _sweep_point(raw: dict, section: str, field_name: str, value: float, outputs, policy: Policy) -> dict:
    point = copy.deepcopy(raw)
    point.setdefault(section, {})[field_name] = value  # bare number, base I/O units
    config = _config_from_raw(point)
    inputs, design, kappa_mu, kappa_o = _operating_rates(config, policy)
    row = {
        "eta_peak": efficiency(design.xi, kappa_mu, kappa_o, 0.0),
        "bandwidth": design.bandwidth / TWO_PI,
        "kappa": design.kappa / TWO_PI,
        "Q_mu": design.q_mu,
        "Q_o": design.q_o,
        "G_mu": design.g_mu_max / TWO_PI,
        "G_oOmega": design.g_o_omega_max / TWO_PI,
        "xi": design.xi / TWO_PI,
    }
    return {name: row[name] for name in outputs}


def cmd_sweep(args) -> int:
    from .config import _SCHEMA  # schema-backed path check

    raw = _load_raw(args.config)
    spec = _load_raw(args.spec)
    for key in spec:
        if key not in ("parameter", "values", "outputs"):
            raise _UsageError(f"unknown sweep spec key {key!r}")
    parameter = spec.get("parameter")
    if not isinstance(parameter, str) or parameter.count(".") != 1:
        raise _UsageError("sweep 'parameter' must be a dotted section.field path")
    section, field_name = parameter.split(".")
    if section not in _SCHEMA or field_name not in _SCHEMA[section]:
        raise _UsageError(f"unknown parameter path {parameter!r}")
    values = _sweep_values(spec)
    if isinstance(spec.get("values"), list) and len(values) < 2:
        raise _UsageError("explicit sweep lists need at least 2 values")
    outputs = spec.get("outputs", ["eta_peak"])
    for name in outputs:
        if name not in _OBSERVABLES:
            raise _UsageError(f"unknown observable {name!r}; choose from {', '.join(_OBSERVABLES)}")

    policy = _policy(args)

    def evaluate(value):
        try:
            return _sweep_point(raw, section, field_name, value, outputs, policy), ""
        except (XducerError, ValueError, ZeroDivisionError, FloatingPointError) as exc:
            return None, str(exc).replace(",", ";").replace("\n", " ")

    jobs = args.jobs
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(evaluate, values))
    else:
        results = [evaluate(v) for v in values]

    lines = [",".join([parameter, *outputs, "error"])]
    successes = 0
    for value, (row, error) in zip(values, results):
        if row is None:
            cells = [f"{value:.17g}"] + ["" for _ in outputs] + [error]
        else:
            successes += 1
            cells = [f"{value:.17g}"] + [f"{row[name]:.17g}" for name in outputs] + [""]
        lines.append(",".join(cells))
    _write(args.out, "\n".join(lines) + "\n")
    if successes == 0:
        raise NumericFailure("every sweep point failed")
    return 0


def _oracle_three_mode(design) -> dict:
    compensated = ThreeModeSystem.matched(design.g_mu, design.g_o_omega, design.delta_m, compensate_pulls=True)
    uncompensated = ThreeModeSystem.matched(
        design.g_mu, design.g_o_omega, design.delta_m, compensate_pulls=False
    )
    omega_c, eta_c = peak_efficiency(compensated)
    omega_u, eta_u = peak_efficiency(uncompensated)
    kappa = compensated.kappa_mu
    omegas = np.linspace(-kappa, kappa, 101)
    residual = 0.0
    for w in omegas:
        s = three_mode_smatrix(compensated, float(w))
        residual = max(
            residual,
            abs(abs(s.r_mu) ** 2 + abs(s.t_mo) ** 2 - 1.0),
            abs(abs(s.r_o) ** 2 + abs(s.t_om) ** 2 - 1.0),
        )
    return {
        "mode": "three_mode",
        "system": {
            "G_mu": dual_frequency(design.g_mu),
            "G_oOmega": dual_frequency(design.g_o_omega),
            "delta_M": dual_frequency(design.delta_m),
            "kappa": dual_frequency(kappa),
        },
        "compensated": {
            "pull_delta_mu": dual_frequency(compensated.delta_mu),
            "pull_delta_o2": dual_frequency(compensated.delta_o2),
            "omega_peak": dual_frequency(omega_c),
            "eta_peak": eta_c,
            "band_sup_deviation": band_deviation(compensated),
            "unitarity_residual": residual,
        },
        "uncompensated": {
            "omega_peak": dual_frequency(omega_u),
            "eta_peak": eta_u,
            "band_sup_deviation": band_deviation(uncompensated),
        },
        "two_mode_reference": {"eta_peak": 1.0},
    }


def _oracle_raman(inputs, design) -> dict:
    g_o = single_ion_o_coupling(
        inputs.optical_cavity.omega, inputs.optical_cavity.v_mode, inputs.ion.d_g2, 1.0, inputs.constants
    )
    system = RamanStageSystem(
        g_o=[g_o],
        omega_rabi=[design.omega0_available],
        delta_o=[design.delta_o],
        delta_mu=[0.0],
        kappa_o=design.kappa,
    )
    extraction = raman_stage_oracle(system)
    ions = [
        {
            "coupling_extracted_rad_per_s": [ion.coupling_extracted.real, ion.coupling_extracted.imag],
            "coupling_reference_rad_per_s": [ion.coupling_reference.real, ion.coupling_reference.imag],
            "coupling_relative_error": ion.coupling_relative_error,
            "stark_extracted_rad_per_s": ion.stark_extracted,
            "stark_reference_rad_per_s": ion.stark_reference,
            "stark_relative_error": ion.stark_relative_error,
            "adiabaticity": ion.adiabaticity,
            "flagged": ion.flagged,
        }
        for ion in extraction.ions
    ]
    return {
        "mode": "raman",
        "inputs": {
            "g_o": dual_frequency(g_o),
            "Omega0": dual_frequency(design.omega0_available),
            "delta_o": dual_frequency(design.delta_o),
            "kappa_o": dual_frequency(design.kappa),
        },
        "ions": ions,
        "cavity_pull": {
            "extracted_rad_per_s": extraction.cavity_pull_extracted,
            "reference_rad_per_s": extraction.cavity_pull_reference,
        },
    }


def _oracle_scaling(design, multipliers) -> dict:
    base = ThreeModeSystem.matched(design.g_mu, design.g_o_omega, design.delta_m)
    fit = elimination_error_scaling(base, multipliers)
    return {
        "mode": "scaling",
        "multipliers": list(multipliers),
        "delta_M_rad_per_s": [float(x) for x in fit.delta_ms],
        "band_sup_deviation": [float(x) for x in fit.deviations],
        "fitted_exponent": fit.exponent,
    }


def cmd_oracle(args) -> int:
    config = _config_from_raw(_load_raw(args.config))
    inputs = validate(config)
    policy = _policy(args)
    design = heuristic_design(inputs, policy)
    if args.mode == "three_mode":
        report = _oracle_three_mode(design)
    elif args.mode == "raman":
        report = _oracle_raman(inputs, design)
    else:
        report = _oracle_scaling(design, [1.0, 2.0, 4.0, 8.0])
    _write(args.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0


def _add_policy_flags(parser) -> None:
    parser.add_argument(
        "--linewidth-multiple",
        type=float,
        default=5.0,
        help="optical detuning as a multiple of the optical linewidth (dimensionless, default 5)",
    )
    parser.add_argument(
        "--separation-factor",
        type=float,
        default=10.0,
        help="required ratio of detunings to couplings (dimensionless, default 10)",
    )
    parser.add_argument(
        "--mode-spacing-derate",
        type=float,
        default=1.0,
        help="fraction of the magnon mode spacing used as delta_M (dimensionless, default 1)",
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="xducer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("feasibility", help="run the design recipe and emit a feasibility report")
    p.add_argument("--config", required=True, help="path to a JSON config document")
    p.add_argument("--out", default="-", help="report path (JSON); '-' for stdout")
    _add_policy_flags(p)
    p.set_defaults(func=cmd_feasibility)

    p = sub.add_parser("efficiency", help="write the conversion-efficiency spectrum as CSV")
    p.add_argument("--config", required=True, help="path to a JSON config document")
    p.add_argument("--omega-min", type=_freq_flag, required=True, help="grid start in Hz (suffixes: GHz, MHz, kHz, Hz)")
    p.add_argument("--omega-max", type=_freq_flag, required=True, help="grid end in Hz (suffixes allowed)")
    p.add_argument("--points", type=int, default=1001, help="number of grid points (>= 2)")
    p.add_argument("--out", default="-", help="CSV path; '-' for stdout")
    _add_policy_flags(p)
    p.set_defaults(func=cmd_efficiency)

    p = sub.add_parser("match", help="solve the impedance-matching condition, JSON to stdout")
    p.add_argument("--g-mu", type=_freq_flag, required=True, help="collective microwave coupling in Hz")
    p.add_argument("--g-o-omega", type=_freq_flag, required=True, help="collective two-photon coupling in Hz")
    p.add_argument("--delta-m", type=_freq_flag, required=True, help="spin-mode detuning in Hz")
    p.add_argument("--omega-mu", type=_freq_flag, help="microwave cavity frequency in Hz")
    p.add_argument("--omega-o", type=_freq_flag, help="optical cavity frequency in Hz")
    p.add_argument("--config", help="config supplying cavity frequencies when flags are omitted")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("sweep", help="sweep one config parameter and tabulate observables as CSV")
    p.add_argument("--config", required=True, help="path to a JSON config document")
    p.add_argument("--spec", required=True, help="sweep spec JSON: parameter, values, outputs")
    p.add_argument("--out", default="-", help="CSV path; '-' for stdout")
    p.add_argument(
        "--jobs",
        type=int,
        default=int(os.environ.get("XDUCER_JOBS", "1")),
        help="parallel evaluations (default: XDUCER_JOBS or 1); output order is input order",
    )
    _add_policy_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="run a multimode reduction oracle and emit its JSON report")
    p.add_argument("--config", required=True, help="path to a JSON config document")
    p.add_argument("--mode", required=True, choices=["three_mode", "raman", "scaling"], help="oracle to run")
    p.add_argument("--out", default="-", help="report path (JSON); '-' for stdout")
    _add_policy_flags(p)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except XducerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
