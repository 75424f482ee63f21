"""Quantum-erasure simulation toolkit.

Schmidt-decomposition machinery for bipartite pure states, distant
(measurement-steered) state preparation, detector coupling, and a two-slit
screen model on which simple and delayed-choice erasure pipelines are run
and compared.
"""

from .coherence import (
    CoherenceBasisParams,
    SymmetryClass,
    classify_symmetry,
    coherence_pair,
    exchange_operator,
    search_symmetric_bases,
)
from .erasure import (
    DetectorArray,
    EqualityReport,
    ErasureConfig,
    ProbabilityTable,
    SlitModel,
    bin_probability,
    fringe_visibility,
    run_delayed_choice,
    run_simple_erasure,
    screen_amplitude,
    verify_equality,
)
from .measurement import (
    Branch,
    CutComparison,
    MeasurementOutcome,
    controlled_shift_unitary,
    couple_detector,
    couple_shift_register,
    cut_compare,
    distant_measure,
    mark_which_way,
    which_way_marker,
)
from .schmidt import (
    CorrelationOperator,
    SchmidtDecomposition,
    correlation_operator,
    is_epr_type,
    reschmidt,
    schmidt_decompose,
)
from .states import (
    DensityOperator,
    HilbertShape,
    StateVector,
    UnitaryOperator,
    apply_unitary,
    basis_state,
    haar_random_unitary,
    partial_trace,
    state_vector,
    tensor,
    trace_norm_distance,
)

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "CoherenceBasisParams",
    "CorrelationOperator",
    "CutComparison",
    "DensityOperator",
    "DetectorArray",
    "EqualityReport",
    "ErasureConfig",
    "HilbertShape",
    "MeasurementOutcome",
    "ProbabilityTable",
    "SchmidtDecomposition",
    "SlitModel",
    "StateVector",
    "SymmetryClass",
    "UnitaryOperator",
    "apply_unitary",
    "basis_state",
    "bin_probability",
    "classify_symmetry",
    "coherence_pair",
    "controlled_shift_unitary",
    "correlation_operator",
    "couple_detector",
    "couple_shift_register",
    "cut_compare",
    "distant_measure",
    "exchange_operator",
    "fringe_visibility",
    "haar_random_unitary",
    "is_epr_type",
    "mark_which_way",
    "partial_trace",
    "reschmidt",
    "run_delayed_choice",
    "run_simple_erasure",
    "schmidt_decompose",
    "screen_amplitude",
    "search_symmetric_bases",
    "state_vector",
    "tensor",
    "trace_norm_distance",
    "verify_equality",
    "which_way_marker",
]
