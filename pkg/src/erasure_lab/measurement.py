"""Projective measurement, distant measurement, and detector coupling.

Measuring one subsystem of an entangled pair projectively steers the
unmeasured remainder into the partner state of the chosen basis, with no
interaction, purely through the correlations.  Coupling a subsystem to a
detector register relocates that correlation onto the enlarged system
without changing the Schmidt structure seen from the untouched side.

Measurement here is selective and ideal (von Neumann); a non-selective
measurement is represented as a list of weighted branches.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .schmidt import VectorLike, _as_vector
from .states import (
    HilbertShape,
    StateVector,
    UnitaryOperator,
    apply_unitary,
    partial_trace,
    tensor,
)

COMPLETENESS_TOL = 1e-10
ORTHONORMALITY_TOL = 1e-10
NULL_OUTCOME_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class MeasurementOutcome:
    """One selective outcome: label, Born probability, conditional remainder state.

    `post_state` is None for outcomes of (numerically) zero probability; such
    outcomes are retained so outcome sets always mirror the basis.
    """

    label: str
    probability: float
    post_state: StateVector | None


@dataclass(frozen=True, eq=False)
class Branch:
    """One term of a non-selective measurement record."""

    weight: float
    state: StateVector

    def __post_init__(self):
        if not 0.0 <= self.weight <= 1.0 + 1e-12:
            raise ValueError(f"branch weight {self.weight} outside [0, 1]")


@dataclass(frozen=True)
class CutComparison:
    """Trace-norm distance between the traced-out state and a branch ensemble."""

    distance: float
    branches_complete: bool


def mark_which_way(alpha: complex, beta: complex) -> StateVector:
    """Entangle a marker with a two-level system: alpha|1,1> + beta|2,2>.

    The superposition alpha|1> + beta|2> is not destroyed; it moves to the
    pair, leaving the marked subsystem with no off-diagonal coherence.
    Both amplitudes must be nonzero, else nothing is marked.
    """
    alpha = complex(alpha)
    beta = complex(beta)
    if abs(alpha) <= 1e-12 or abs(beta) <= 1e-12:
        raise ValueError("mark_which_way requires both amplitudes nonzero")
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > 1e-10:
        raise ValueError("amplitudes must satisfy |alpha|^2 + |beta|^2 = 1")
    amps = np.zeros(4, dtype=np.complex128)
    amps[0] = alpha
    amps[3] = beta
    return StateVector(HilbertShape((2, 2)), amps)


def distant_measure(
    state: StateVector,
    split: Sequence[int],
    basis: Sequence[VectorLike],
    labels: Sequence[str] | None = None,
) -> list[MeasurementOutcome]:
    """Measure the `split` subsystems in `basis`; return all outcomes.

    Outcome k has probability ||(<b_k| x 1)|state>||^2 and the normalized
    projection as its conditional state on the remaining subsystems.  The
    basis must be orthonormal and complete on the measured part's support
    (probabilities must sum to 1).
    """
    split = state.shape.validate_subsystems(split)
    if not split or len(split) == state.shape.n_subsystems:
        raise ValueError("split must be a nonempty proper subset of the subsystems")
    rest = state.shape.complement(split)
    rest_dims = tuple(state.dims[i] for i in rest)
    d_meas = state.shape.subset_dim(split)

    vectors = np.array([_as_vector(b) for b in basis])
    if vectors.ndim != 2 or vectors.shape[1] != d_meas:
        raise ValueError(f"basis vectors must have dimension {d_meas}")
    gram = vectors.conj() @ vectors.T
    if np.max(np.abs(gram - np.eye(len(vectors)))) > ORTHONORMALITY_TOL:
        raise ValueError("measurement basis is not orthonormal within tolerance")
    if labels is None:
        labels = [str(k) for k in range(len(vectors))]
    elif len(labels) != len(vectors):
        raise ValueError("need one label per basis vector")

    psi = state.tensor_view().transpose(split + rest).reshape(d_meas, -1)
    projections = vectors.conj() @ psi
    probabilities = np.einsum("kr,kr->k", projections, projections.conj()).real

    total = float(np.sum(probabilities))
    if total < 1.0 - COMPLETENESS_TOL:
        raise ValueError(
            f"measurement basis is incomplete on the state's support "
            f"(probabilities sum to {total!r})"
        )

    outcomes = []
    for k, p in enumerate(probabilities):
        p = float(max(p, 0.0))
        if p <= NULL_OUTCOME_TOL:
            outcomes.append(MeasurementOutcome(str(labels[k]), p, None))
        else:
            post = StateVector(HilbertShape(rest_dims), projections[k] / np.sqrt(p))
            outcomes.append(MeasurementOutcome(str(labels[k]), p, post))
    return outcomes


def couple_detector(
    state: StateVector,
    detector_init: StateVector,
    u: UnitaryOperator,
    targets: Sequence[int],
) -> StateVector:
    """Append a detector in `detector_init` and evolve `targets` jointly by `u`.

    Target indices refer to the combined system, whose subsystems are the
    input's followed by the detector's.  Unitarity keeps images of orthogonal
    inputs orthogonal, so the Schmidt coefficients seen from any untouched
    subsystem are preserved.
    """
    return apply_unitary(tensor(state, detector_init), u, targets)


def controlled_shift_unitary(
    control_dim: int,
    register_dim: int,
    shifts: Sequence[int],
) -> UnitaryOperator:
    """Permutation unitary |j>|m> -> |j>|m + shifts[j] mod register_dim>.

    With a register prepared in |0>, shift amounts act as outcome flags:
    shifts[j] = j records the control state in place, shifts[j] = j + 1
    keeps flag 0 free to mean "untriggered".
    """
    shifts = [int(s) for s in shifts]
    if len(shifts) != control_dim:
        raise ValueError("need one register shift per control basis state")
    dim = control_dim * register_dim
    mat = np.zeros((dim, dim))
    for j in range(control_dim):
        for m in range(register_dim):
            mat[j * register_dim + (m + shifts[j]) % register_dim, j * register_dim + m] = 1.0
    return UnitaryOperator(dim, mat)


def which_way_marker(dim: int) -> UnitaryOperator:
    """Ideal marking interaction |j>|0> -> |j>|j> on an equal-sized register."""
    return controlled_shift_unitary(dim, dim, list(range(dim)))


def couple_shift_register(
    state: StateVector,
    shifts: Sequence[int],
    register_dim: int,
) -> StateVector:
    """Append a register in |0> and apply the controlled shift keyed on the last subsystem.

    Same action as `couple_detector` with `controlled_shift_unitary`, but the
    permutation is applied by indexing so large control spaces (position
    grids) never materialize a matrix.
    """
    shifts = np.asarray(shifts, dtype=int) % register_dim
    d_ctrl = state.dims[-1]
    if shifts.shape != (d_ctrl,):
        raise ValueError("need one register shift per control basis state")
    amp = state.amplitudes.reshape(-1, d_ctrl)
    out = np.zeros((amp.shape[0], d_ctrl, register_dim), dtype=np.complex128)
    out[:, np.arange(d_ctrl), shifts] = amp
    return StateVector(HilbertShape(state.dims + (register_dim,)), out.reshape(-1))


def cut_compare(
    global_state: StateVector,
    split: Sequence[int],
    branches: Sequence[Branch],
    compare: Sequence[int] | None = None,
) -> CutComparison:
    """Ignorance mixture of measurement branches vs the traced-out global state.

    `split` names the measured subsystems (branch states live on the
    complement); `compare` names the global subsystems on which the two
    descriptions are compared, defaulting to the whole complement.  When
    the branch set is complete the two are the same operator and the
    distance vanishes; an incomplete branch set is flagged and the (large)
    distance returned as a diagnostic.
    """
    split = global_state.shape.validate_subsystems(split)
    rest = global_state.shape.complement(split)
    compare = tuple(compare) if compare is not None else rest
    for i in compare:
        if i not in rest:
            raise ValueError(f"subsystem {i} is not part of the unmeasured remainder")

    improper = partial_trace(global_state, compare)

    local = tuple(rest.index(i) for i in compare)
    total_weight = float(sum(b.weight for b in branches))
    mixture = np.zeros((improper.dim, improper.dim), dtype=np.complex128)
    for branch in branches:
        if branch.state.dims != tuple(global_state.dims[i] for i in rest):
            raise ValueError("branch state dimensions do not match the unmeasured remainder")
        if len(local) == len(rest):
            reduced = branch.state.density_matrix()
        else:
            reduced = partial_trace(branch.state, local).matrix
        mixture = mixture + branch.weight * reduced

    diff = improper.matrix - mixture
    distance = float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
    complete = abs(total_weight - 1.0) <= COMPLETENESS_TOL
    return CutComparison(distance=distance, branches_complete=complete)


def branches_from_outcomes(outcomes: Sequence[MeasurementOutcome]) -> list[Branch]:
    """Non-selective record of a measurement: one branch per realized outcome."""
    return [
        Branch(weight=o.probability, state=o.post_state)
        for o in outcomes
        if o.post_state is not None
    ]


def ensemble_density(outcomes: Sequence[MeasurementOutcome]) -> np.ndarray:
    """Weighted mixture sum_k p_k |post_k><post_k| over the realized outcomes."""
    realized = [o for o in outcomes if o.post_state is not None]
    if not realized:
        raise ValueError("no realized outcomes")
    dim = realized[0].post_state.shape.total_dim
    rho = np.zeros((dim, dim), dtype=np.complex128)
    for o in realized:
        rho += o.probability * o.post_state.density_matrix()
    return rho
