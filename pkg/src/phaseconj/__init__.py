"""Optimal phase-covariant conjugation channels for equatorial qudit states.

Build the channels from null-diagonal symmetric bistochastic matrices, check
their defining properties, explore the simplex structure behind them, and
realize them unitarily with minimal ancillas.
"""

from .channel import (
    ChoiOperator,
    CptReport,
    KrausChannel,
    apply,
    apply_kraus,
    choi_from_kraus,
    is_cpt,
    is_phase_covariant,
    kraus_from_choi,
    maxent_vector,
    twirl,
)
from .dilation import (
    ControlledUnitary,
    DilationReport,
    DilationSpec,
    ShiftFormulaReport,
    apply_dilation,
    control_matchings,
    controlled_unitary,
    extremal_channel,
    generic_stinespring,
    matching_unitary,
    mixed_ancilla_check,
    pair_swap,
    shift_formula_unitary,
    verify_dilation,
)
from .nsb import (
    MatchingPermutation,
    NsbMatrix,
    NsbValidationError,
    canonical,
    complete_lower_triangle,
    decompose_d4,
    family_d4,
    matchings,
    random_nsb,
    validate,
)
from .optimal import (
    FidelityReport,
    OracleConvergenceError,
    OracleResult,
    analytic_fidelity,
    choi_fidelity,
    fidelity_report,
    fidelity_table,
    monte_carlo_fidelity,
    optimal_choi,
    optimal_kraus,
    oracle_max_fidelity,
    phase_estimation_fidelity,
    pointwise_fidelity,
    universal_fidelity,
)
from .states import (
    PhaseVector,
    conjugated_state,
    equatorial_state,
    phase_unitary,
    random_phase_vector,
    seed_state,
)

__version__ = "0.1.0"
