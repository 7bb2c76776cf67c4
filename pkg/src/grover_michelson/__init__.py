"""Simulation of directionally-unbiased four-port scatterers and the Grover-Michelson interferometer."""

from .core import apply, is_unitary, probability_matrix
from .errors import DimensionMismatchError, InvalidDataError, InvalidParameterError, ResonanceError
from .imperfections import (
    CalibrationResult,
    ProbabilityMatrix,
    calibrate,
    predict_probability_matrix,
    renormalize_columns,
)
from .metrics import (
    DeviceParams,
    EnhancementReport,
    InterferogramCurve,
    Model,
    SweepSpec,
    enhancement_report,
    find_slope_configuration,
    max_slope,
    peak_slope,
    sweep,
    visibility,
)
from .resonator import (
    GmiAmplitudes,
    GmiConfig,
    RoundTripReport,
    b_c_coefficients,
    gmi_closed_form,
    iterate_round_trips,
    michelson_reference,
    round_trip_eigenmodes,
    steady_state,
)
from .scatterers import (
    BeamSplitterParams,
    CoinPhases,
    beam_splitter,
    compose_network,
    generalized_coin,
    grover_coin,
    reduce_phases,
)

__version__ = "0.1.0"
