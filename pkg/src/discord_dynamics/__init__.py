"""Decoherence of quantum discord and entanglement for two qubits with
Dzyaloshinskii-Moriya coupling under independent thermal Markovian baths."""

from .correlations import (
    CorrelationReport,
    MeasurementBasis,
    classical_correlation,
    correlation_report,
    correlation_reports,
    discord_numeric,
    discord_xstate,
    entanglement_xstate,
    mutual_information,
)
from .dampchan import apply_two_qubit_channel, closed_form_bell, kraus_ops, p_of_t
from .errors import (
    ConsistencyError,
    DegeneracyError,
    FallbackRequired,
    InvariantViolation,
    ShapeError,
    ValidationError,
)
from .liouville import BathParams, build_liouvillian, evolve, evolve_diag, evolve_rk4
from .qmat import DensityMatrix, XStateEntries, as_xstate, partial_trace, vn_entropy
from .spinmodel import (
    ModelParams,
    build_hamiltonian,
    exact_spectrum,
    ground_state,
    nbar_from_temperature,
    thermal_state,
)

__version__ = "0.1.0"
