"""Design and simulation toolkit for a cavity-based microwave-to-optical converter.

The device couples a microwave resonator and an optical resonator through the
uniform spin-precession mode of a magnetically ordered rare-earth crystal,
driven by an off-resonant optical pump.  The package evaluates the coupling
rates, solves the impedance-matching condition, computes the two-port
conversion spectrum, and validates the reduced two-mode model against exact
multimode solves.
"""

from .config import (
    dual_frequency,
    inputs_digest,
    load_config,
    load_config_file,
    load_inputs,
    load_reference_inputs,
    reference_config_path,
    serialize,
)
from .constants import CODATA, TWO_PI, PhysicalConstants
from .couplings import (
    ConversionCoupling,
    CouplingSet,
    collective_mu_coupling,
    collective_raman_coupling,
    conversion_coupling,
    coupling_set,
    discrete_collective_sums,
    single_ion_mu_coupling,
    single_ion_o_coupling,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    MissingFieldError,
    NumericFailure,
    UnknownFieldError,
    UnknownUnitError,
    ValidationError,
    XducerError,
)
from .feasibility import (
    ConditionCheck,
    DesignPoint,
    Policy,
    all_pass,
    check_conditions,
    emit_report,
    heuristic_design,
    report_json,
)
from .optics import (
    ModeProfile,
    ResonatorGeometry,
    gaussian_standing_wave,
    length_from_fsr,
    mode_volume,
    overlap_integral,
    pump_rabi,
    uniform_profile,
)
from .params import (
    CavitySpec,
    CrystalSample,
    DesignInputs,
    DriveSpec,
    IonSpecies,
    MagnonSpec,
    kittel_field,
    validate,
)
from .reduction import (
    RamanStageSystem,
    ScalingFit,
    ThreeModeSystem,
    band_deviation,
    cavity_pull,
    elimination_error_scaling,
    peak_efficiency,
    raman_stage_oracle,
    three_mode_efficiency,
    three_mode_smatrix,
)
from .scattering import (
    BandwidthResult,
    MatchingSolution,
    ScatteringSpectrum,
    TwoPortS,
    bandwidth_fwhm,
    efficiency,
    efficiency_spectrum,
    impedance_solve,
    smatrix,
    steady_state_transmission,
    time_domain_oracle,
)

__version__ = "0.1.0"
