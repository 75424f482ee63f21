"""Canonical Schmidt decompositions and the antiunitary partner map.

A bipartite pure state always admits an expansion in biorthonormal bases
with positive coefficients.  The squared coefficients are the common
nonzero spectrum of the two reduced density operators; degeneracy in that
spectrum is what allows mutually incompatible distant measurements, so
degenerate states admit a continuum of distinct decompositions.  The
antiunitary correlation operator is the one fixed object connecting them:
it sends each left-side vector to its right-side partner in every
decomposition of the same state.

Conventions:
  * decomposition bases are stored as 2-D arrays with one vector per row;
  * coefficients from `schmidt_decompose` are descending (SVD order);
  * each left vector's first component above 1e-12 is made real-positive,
    with the compensating phase pushed onto its right partner, so outputs
    are deterministic;
  * singular values at or below `SCHMIDT_CUTOFF` are dropped, and the rank
    is the number of retained terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .states import HilbertShape, StateVector

SCHMIDT_CUTOFF = 1e-10
DEGENERACY_TOL = 1e-8
RECONSTRUCTION_TOL = 1e-9
ORTHONORMALITY_TOL = 1e-10
BIORTHOGONALITY_TOL = 1e-8
_PHASE_TOL = 1e-12

VectorLike = Union[np.ndarray, StateVector, Sequence[complex]]


def _as_vector(v: VectorLike) -> np.ndarray:
    if isinstance(v, StateVector):
        return v.amplitudes
    return np.asarray(v, dtype=np.complex128).reshape(-1)


def _fix_phase(left: np.ndarray, right: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rotate the pair so the left vector's first significant entry is real-positive."""
    nonzero = np.nonzero(np.abs(left) > _PHASE_TOL)[0]
    if nonzero.size == 0:
        return left, right
    phase = left[nonzero[0]] / abs(left[nonzero[0]])
    return left * np.conj(phase), right * phase


def _coefficient_matrix(state: StateVector, split: Sequence[int]) -> np.ndarray:
    """State amplitudes as a (dim_left x dim_right) matrix under the bipartition."""
    split = state.shape.validate_subsystems(split)
    if not split or len(split) == state.shape.n_subsystems:
        raise ValueError("split must be a nonempty proper subset of the subsystems")
    rest = state.shape.complement(split)
    d_left = state.shape.subset_dim(split)
    return state.tensor_view().transpose(split + rest).reshape(d_left, -1)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """Biorthonormal expansion of a bipartite pure state.

    ``sum_k coefficients[k] * kron(basis_left[k], basis_right[k])``
    reproduces the source state (in left-then-right subsystem order).
    """

    coefficients: np.ndarray
    basis_left: np.ndarray
    basis_right: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coefficients, dtype=float)
        left = np.array(self.basis_left, dtype=np.complex128)
        right = np.array(self.basis_right, dtype=np.complex128)
        if coeffs.ndim != 1 or left.ndim != 2 or right.ndim != 2:
            raise ValueError("expected 1-D coefficients and 2-D basis arrays")
        if not (len(coeffs) == len(left) == len(right)):
            raise ValueError("coefficients and bases must have one entry per term")
        if np.any(coeffs <= 0):
            raise ValueError("Schmidt coefficients must be strictly positive")
        if abs(float(np.sum(coeffs**2)) - 1.0) > 1e-8:
            raise ValueError("squared coefficients must sum to 1")
        for arr in (coeffs, left, right):
            arr.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "basis_left", left)
        object.__setattr__(self, "basis_right", right)

    @property
    def rank(self) -> int:
        return len(self.coefficients)

    @property
    def dim_left(self) -> int:
        return self.basis_left.shape[1]

    @property
    def dim_right(self) -> int:
        return self.basis_right.shape[1]

    def weights(self) -> np.ndarray:
        """Squared coefficients; the shared reduced-density spectrum."""
        return self.coefficients**2

    def term(self, k: int) -> np.ndarray:
        """The k-th product term, coefficient included, as a flat bipartite vector."""
        return self.coefficients[k] * np.kron(self.basis_left[k], self.basis_right[k])

    def matrix(self) -> np.ndarray:
        """Coefficient matrix sum_k c_k |left_k><right_k*| of shape (dim_left, dim_right)."""
        return (self.basis_left.T * self.coefficients) @ self.basis_right

    def reconstruct(self) -> StateVector:
        """The expanded state on the (left, right) ordered bipartite space."""
        return StateVector(
            HilbertShape((self.dim_left, self.dim_right)),
            self.matrix().reshape(-1),
        )


def schmidt_decompose(state: StateVector, split: Sequence[int]) -> SchmidtDecomposition:
    """Canonical decomposition across `split` (left) vs the remaining subsystems.

    Computed by SVD of the coefficient matrix; product states come back with
    rank 1 rather than an error.
    """
    matrix = _coefficient_matrix(state, split)
    u, s, vh = np.linalg.svd(matrix, full_matrices=False)
    retained = s > SCHMIDT_CUTOFF
    s = s[retained]
    left = u[:, retained].T.copy()
    right = vh[retained].copy()
    for k in range(len(s)):
        left[k], right[k] = _fix_phase(left[k], right[k])
    dec = SchmidtDecomposition(s, left, right)
    error = np.linalg.norm(dec.matrix() - matrix)
    if error > RECONSTRUCTION_TOL:
        raise ValueError(f"decomposition failed to reconstruct the state (error {error:.3e})")
    return dec


def is_epr_type(dec: SchmidtDecomposition, degeneracy_tol: float = DEGENERACY_TOL) -> bool:
    """True when two retained squared coefficients agree within `degeneracy_tol`."""
    r = np.sort(dec.weights())
    return bool(np.any(np.diff(r) <= degeneracy_tol)) if dec.rank >= 2 else False


@dataclass(frozen=True, eq=False)
class CorrelationOperator:
    """Antilinear map from the left reduced support onto the right one.

    Fixed by the bipartite state alone: conjugate the coordinates in
    `domain_basis`, then apply the isometry whose columns are the right
    partners.  Components outside the support are annihilated.
    """

    domain_basis: np.ndarray
    isometry: np.ndarray

    def __post_init__(self):
        basis = np.array(self.domain_basis, dtype=np.complex128)
        iso = np.array(self.isometry, dtype=np.complex128)
        gram = iso.conj().T @ iso
        if np.linalg.norm(gram - np.eye(iso.shape[1])) > ORTHONORMALITY_TOL:
            raise ValueError("isometry columns are not orthonormal on the support")
        basis.setflags(write=False)
        iso.setflags(write=False)
        object.__setattr__(self, "domain_basis", basis)
        object.__setattr__(self, "isometry", iso)

    def apply(self, vector: VectorLike) -> np.ndarray:
        coords = self.domain_basis.conj() @ _as_vector(vector)
        return self.isometry @ np.conj(coords)


def correlation_operator(dec: SchmidtDecomposition) -> CorrelationOperator:
    """Partner map read off a decomposition: each left vector goes to its right partner."""
    return CorrelationOperator(dec.basis_left, dec.basis_right.T)


def reschmidt(
    state: StateVector,
    split: Sequence[int],
    basis_left: Sequence[VectorLike],
) -> SchmidtDecomposition:
    """Re-expand `state` so the left basis is exactly `basis_left`.

    Each partner is the projection of the state onto the corresponding left
    vector, normalized; this yields a canonical decomposition exactly when
    those partners come out mutually orthogonal, which is guaranteed on any
    support where the squared coefficients are degenerate.  Otherwise the
    expansion is not biorthogonal and the call is rejected.

    The caller's vectors are kept verbatim (order and phases); coefficients
    are therefore in the caller's order, not sorted.
    """
    matrix = _coefficient_matrix(state, split)
    basis = np.array([_as_vector(v) for v in basis_left])
    if basis.shape[1] != matrix.shape[0]:
        raise ValueError("basis vectors do not match the left subsystem dimension")
    gram = basis.conj() @ basis.T
    if np.max(np.abs(gram - np.eye(len(basis)))) > ORTHONORMALITY_TOL:
        raise ValueError("basis_left is not orthonormal within tolerance")

    partners = basis.conj() @ matrix
    coeffs = np.linalg.norm(partners, axis=1)
    if np.any(coeffs <= SCHMIDT_CUTOFF):
        raise ValueError(
            "a basis vector lies outside the state's correlated support; "
            "no positive-coefficient term exists for it"
        )
    partners = partners / coeffs[:, None]
    overlap = partners.conj() @ partners.T
    off_diag = np.max(np.abs(overlap - np.eye(len(basis))))
    if off_diag > BIORTHOGONALITY_TOL:
        raise ValueError(
            "expansion in the requested basis is not biorthogonal "
            f"(partner overlap {off_diag:.3e}); the state is not degenerate "
            "on the span of basis_left"
        )
    residual = np.linalg.norm((basis.T * coeffs) @ partners - matrix)
    if residual > RECONSTRUCTION_TOL:
        raise ValueError(
            f"basis_left does not span the state's correlated support (residual {residual:.3e})"
        )
    return SchmidtDecomposition(coeffs, basis, partners)
