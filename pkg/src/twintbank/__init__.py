"""Analysis toolkit for an active twin-T bandpass comb filterbank.

Closed-form transfer functions, an independent netlist MNA engine,
two-trimmer calibration, and whole-bank frequency sweeps.
"""

from .calibrate import (
    Attenuation,
    CalibrationFailure,
    CalibrationResult,
    ChannelSpec,
    DEFAULT_CHANNEL_SPECS,
    calibrate_all,
    calibrate_channel,
    chain_gain_constant,
    channel_response,
)
from .errors import ToolkitError
from .filterbank import (
    BankConfig,
    FilterKind,
    SallenKeyConfig,
    SweepResult,
    channel_sweep,
    default_bank,
    load_bank,
    ripple_db,
    sallen_key_tf,
    summed_sweep,
)
from .mna import Netlist, noninverting_variant, parse_netlist, transfer_function
from .ratfunc import (
    BandpassFactors,
    Polynomial,
    RationalFunction,
    cancel_pole_zero,
    poly_eval,
    ratfunc_eval,
    real_roots_cubic,
    to_bandpass_factors,
)
from .twint import (
    CanonicalBandpass,
    PeakPoint,
    TwinTParams,
    canonical_special_case,
    coefficients,
    find_peak,
    initial_r2,
)

__version__ = "0.1.0"

__all__ = [
    "Attenuation",
    "BandpassFactors",
    "BankConfig",
    "CalibrationFailure",
    "CalibrationResult",
    "CanonicalBandpass",
    "ChannelSpec",
    "DEFAULT_CHANNEL_SPECS",
    "FilterKind",
    "Netlist",
    "PeakPoint",
    "Polynomial",
    "RationalFunction",
    "SallenKeyConfig",
    "SweepResult",
    "ToolkitError",
    "TwinTParams",
    "calibrate_all",
    "calibrate_channel",
    "canonical_special_case",
    "cancel_pole_zero",
    "chain_gain_constant",
    "channel_response",
    "channel_sweep",
    "coefficients",
    "default_bank",
    "find_peak",
    "initial_r2",
    "load_bank",
    "noninverting_variant",
    "parse_netlist",
    "poly_eval",
    "ratfunc_eval",
    "real_roots_cubic",
    "ripple_db",
    "sallen_key_tf",
    "summed_sweep",
    "to_bandpass_factors",
    "transfer_function",
    "__version__",
]
