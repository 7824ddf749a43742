"""Configuration ingestion: JSON documents with explicit unit tags.

A config document has six top-level objects: ``ion``, ``crystal``,
``microwave_cavity``, ``optical_cavity``, ``magnon``, ``drive``.  Each field
is either a bare number (base I/O units: Hz, m, W, T) or an object
``{"value": x, "unit": "GHz"}``.  Internally everything is converted to
rad/s, m, W, T; ``serialize`` writes frequencies back with "rad/s" tags so a
round trip reproduces every float bit for bit.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Dict

from .constants import CODATA, TWO_PI, PhysicalConstants
from .errors import ConfigError, MissingFieldError, UnknownFieldError, UnknownUnitError
from .params import DesignInputs

# unit tag -> (dimension, factor to internal units)
_UNITS = {
    "Hz": ("frequency", TWO_PI),
    "kHz": ("frequency", TWO_PI * 1e3),
    "MHz": ("frequency", TWO_PI * 1e6),
    "GHz": ("frequency", TWO_PI * 1e9),
    "rad/s": ("frequency", 1.0),
    "m": ("length", 1.0),
    "mm": ("length", 1e-3),
    "W": ("power", 1.0),
    "uW": ("power", 1e-6),
    "T": ("field", 1.0),
}

# bare numbers are interpreted in the dimension's base I/O unit
_BASE_FACTOR = {"frequency": TWO_PI, "length": 1.0, "power": 1.0, "field": 1.0, "bare": 1.0}

# section -> field -> (dimension, required)
_SCHEMA: Dict[str, Dict[str, tuple]] = {
    "ion": {
        "name": ("text", False),
        "mu_g1": ("bare", True),
        "d_g2": ("bare", True),
        "gamma_o": ("frequency", True),
        "g_lande": ("bare", False),
        "d_12": ("bare", False),
        "rabi_calibration": ("calibration", False),
    },
    "crystal": {
        "radius": ("length", True),
        "rho": ("bare", True),
    },
    "microwave_cavity": {
        "omega": ("frequency", True),
        "V_mode": ("bare", True),
        "kappa": ("frequency", False),
        "Q": ("bare", False),
        "Q_max": ("bare", False),
    },
    "optical_cavity": {
        "omega": ("frequency", True),
        "V_mode": ("bare", True),
        "kappa": ("frequency", False),
        "Q": ("bare", False),
        "Q_max": ("bare", False),
        "waist": ("length", False),
        "fsr": ("frequency", False),
        "overlap_F": ("bare", False),
    },
    "magnon": {
        "delta_M": ("frequency", True),
        "mode_spacing": ("frequency", True),
        "gamma_m": ("frequency", False),
        "B0": ("field", False),
    },
    "drive": {
        "pump_power": ("power", True),
        "delta_o": ("frequency", False),
        "Omega0": ("frequency", False),
        "omega_Omega": ("frequency", False),
    },
}


@dataclass
class SystemConfig:
    """Parsed configuration with units resolved; not yet validated."""

    ion: Dict[str, Any]
    crystal: Dict[str, float]
    microwave_cavity: Dict[str, float]
    optical_cavity: Dict[str, float]
    magnon: Dict[str, float]
    drive: Dict[str, float]
    constants: PhysicalConstants = field(default=CODATA)

    def section(self, name: str) -> Dict[str, Any]:
        if name not in _SCHEMA:
            raise UnknownFieldError(name)
        return getattr(self, name)


def parse_quantity(raw, dimension: str, name: str) -> float:
    """Convert a bare number or a {"value", "unit"} object to internal units."""
    if isinstance(raw, dict):
        extra = set(raw) - {"value", "unit"}
        if extra:
            raise UnknownFieldError(f"{name}.{sorted(extra)[0]}")
        if "value" not in raw:
            raise MissingFieldError(f"{name}.value")
        unit = raw.get("unit")
        if unit is None:
            return float(raw["value"]) * _BASE_FACTOR[dimension]
        if unit not in _UNITS:
            raise UnknownUnitError(name, str(unit))
        dim, factor = _UNITS[unit]
        if dim != dimension:
            raise UnknownUnitError(name, str(unit))
        return float(raw["value"]) * factor
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"field '{name}' must be a number or a value/unit object")
    return float(raw) * _BASE_FACTOR[dimension]


def _parse_section(name: str, data: dict) -> Dict[str, Any]:
    if not isinstance(data, dict):
        raise ConfigError(f"section '{name}' must be an object")
    schema = _SCHEMA[name]
    out: Dict[str, Any] = {}
    for key, raw in data.items():
        if key not in schema:
            raise UnknownFieldError(f"{name}.{key}")
        dimension, _ = schema[key]
        path = f"{name}.{key}"
        if dimension == "text":
            out[key] = str(raw)
        elif dimension == "calibration":
            if not isinstance(raw, dict):
                raise ConfigError(f"field '{path}' must be an object")
            for sub in raw:
                if sub not in ("Omega0_ref", "P_ref"):
                    raise UnknownFieldError(f"{path}.{sub}")
            if "Omega0_ref" not in raw:
                raise MissingFieldError(f"{path}.Omega0_ref")
            if "P_ref" not in raw:
                raise MissingFieldError(f"{path}.P_ref")
            out[key] = (
                parse_quantity(raw["Omega0_ref"], "frequency", f"{path}.Omega0_ref"),
                parse_quantity(raw["P_ref"], "power", f"{path}.P_ref"),
            )
        else:
            out[key] = parse_quantity(raw, dimension, path)
    for key, (dimension, required) in schema.items():
        if required and key not in out:
            raise MissingFieldError(f"{name}.{key}")
    # a configured Q is shorthand for kappa = omega / Q
    if "Q" in out:
        q = out.pop("Q")
        if q <= 0:
            raise ConfigError(f"field '{name}.Q' must be positive")
        if "kappa" in out:
            raise ConfigError(f"section '{name}' sets both kappa and Q")
        out["kappa"] = out["omega"] / q
    return out


def load_config(text: str) -> SystemConfig:
    """Parse a JSON config document into a SystemConfig (internal units)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    for key in doc:
        if key not in _SCHEMA:
            raise UnknownFieldError(key)
    sections = {}
    for name in _SCHEMA:
        if name not in doc:
            raise MissingFieldError(name)
        sections[name] = _parse_section(name, doc[name])
    return SystemConfig(**sections)


def load_config_file(path) -> SystemConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return load_config(fh.read())


def load_inputs(path) -> DesignInputs:
    """Load and validate a config file in one step."""
    from .params import validate

    return validate(load_config_file(path))


def _rad(value: float) -> dict:
    return {"value": value, "unit": "rad/s"}


def serialize(inputs: DesignInputs) -> dict:
    """Write DesignInputs back to a raw config dict.

    Frequencies carry "rad/s" tags so load_config(serialize(x)) reproduces
    every field bit for bit.
    """
    ion = {
        "name": inputs.ion.name,
        "mu_g1": inputs.ion.mu_g1,
        "d_g2": inputs.ion.d_g2,
        "gamma_o": _rad(inputs.ion.gamma_o),
    }
    if inputs.ion.g_lande is not None:
        ion["g_lande"] = inputs.ion.g_lande
    if inputs.ion.d_12 is not None:
        ion["d_12"] = inputs.ion.d_12
    if inputs.ion.rabi_calibration is not None:
        omega_ref, p_ref = inputs.ion.rabi_calibration
        ion["rabi_calibration"] = {"Omega0_ref": _rad(omega_ref), "P_ref": p_ref}
    mw = {"omega": _rad(inputs.microwave_cavity.omega), "V_mode": inputs.microwave_cavity.v_mode}
    if inputs.microwave_cavity.kappa is not None:
        mw["kappa"] = _rad(inputs.microwave_cavity.kappa)
    if inputs.microwave_cavity.q_max is not None:
        mw["Q_max"] = inputs.microwave_cavity.q_max
    opt = {"omega": _rad(inputs.optical_cavity.omega), "V_mode": inputs.optical_cavity.v_mode}
    if inputs.optical_cavity.kappa is not None:
        opt["kappa"] = _rad(inputs.optical_cavity.kappa)
    if inputs.optical_cavity.q_max is not None:
        opt["Q_max"] = inputs.optical_cavity.q_max
    if inputs.optical_cavity.waist is not None:
        opt["waist"] = inputs.optical_cavity.waist
    if inputs.optical_cavity.fsr is not None:
        opt["fsr"] = _rad(inputs.optical_cavity.fsr)
    if inputs.optical_cavity.overlap is not None:
        opt["overlap_F"] = inputs.optical_cavity.overlap
    magnon = {
        "delta_M": _rad(inputs.magnon.delta_M),
        "mode_spacing": _rad(inputs.magnon.mode_spacing),
        "gamma_m": _rad(inputs.magnon.gamma_m),
    }
    if inputs.magnon.B0 is not None:
        magnon["B0"] = inputs.magnon.B0
    drive = {"pump_power": inputs.drive.pump_power}
    if inputs.drive.delta_o is not None:
        drive["delta_o"] = _rad(inputs.drive.delta_o)
    if inputs.drive.Omega0 is not None:
        drive["Omega0"] = _rad(inputs.drive.Omega0)
    if inputs.drive.omega_Omega is not None:
        drive["omega_Omega"] = _rad(inputs.drive.omega_Omega)
    return {
        "ion": ion,
        "crystal": {"radius": inputs.crystal.radius, "rho": inputs.crystal.rho},
        "microwave_cavity": mw,
        "optical_cavity": opt,
        "magnon": magnon,
        "drive": drive,
    }


def inputs_digest(inputs: DesignInputs) -> str:
    """Opaque token identifying a DesignInputs value."""
    canonical = json.dumps(serialize(inputs), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def dual_frequency(omega: float) -> dict:
    """Report an angular frequency in both conventions."""
    return {"hz": omega / TWO_PI, "rad_per_s": omega}


def reference_config_path() -> str:
    """Path of the bundled reference configuration (erbium chloride hexahydrate)."""
    return str(resources.files("xducer").joinpath("data/erclh.json"))


def load_reference_inputs() -> DesignInputs:
    return load_inputs(reference_config_path())
