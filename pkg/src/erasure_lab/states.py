"""Finite-dimensional Hilbert-space primitives.

State vectors over composite systems, density operators, unitaries, tensor
products and partial traces.  Amplitudes are stored flat in row-major
multi-index order with subsystem 0 as the slowest index, so serialized
output is reproducible across implementations at a given precision.

All values are immutable after construction and every operation is a pure
function; complex numbers are 64-bit per component throughout.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

# The identities this library checks are exact, so a violation at these
# scales indicates a bug rather than physics.
NORM_TOL = 1e-10
HERM_TOL = 1e-12
TRACE_TOL = 1e-10
EIG_TOL = 1e-10
UNITARY_TOL = 1e-10

_EINSUM_LETTERS = string.ascii_lowercase + string.ascii_uppercase


def _readonly(values, dtype=np.complex128) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class HilbertShape:
    """Ordered subsystem dimensions of a composite Hilbert space."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise ValueError("HilbertShape needs at least one subsystem")
        if any(d < 1 for d in dims):
            raise ValueError(f"subsystem dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    def subset_dim(self, subsystems: Sequence[int]) -> int:
        return int(np.prod([self.dims[i] for i in subsystems]))

    def complement(self, subsystems: Sequence[int]) -> tuple[int, ...]:
        """Subsystem indices not listed in `subsystems`, ascending."""
        chosen = set(self.validate_subsystems(subsystems))
        return tuple(i for i in range(len(self.dims)) if i not in chosen)

    def validate_subsystems(self, subsystems: Sequence[int]) -> tuple[int, ...]:
        subsystems = tuple(int(i) for i in subsystems)
        if len(set(subsystems)) != len(subsystems):
            raise ValueError(f"duplicate subsystem indices in {subsystems}")
        for i in subsystems:
            if not 0 <= i < len(self.dims):
                raise ValueError(
                    f"subsystem index {i} out of range for {len(self.dims)} subsystems"
                )
        return subsystems


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of a composite system.

    `amplitudes` is flat, length ``shape.total_dim``, row-major over the
    subsystem multi-index.
    """

    shape: HilbertShape
    amplitudes: np.ndarray
    tolerance: float = NORM_TOL

    def __post_init__(self):
        amps = _readonly(self.amplitudes)
        if amps.ndim != 1 or amps.size != self.shape.total_dim:
            raise ValueError(
                f"expected {self.shape.total_dim} amplitudes, got array of shape {amps.shape}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > self.tolerance:
            raise ValueError(f"state vector norm {norm!r} deviates from 1 beyond tolerance")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.shape.dims

    def tensor_view(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per subsystem."""
        return self.amplitudes.reshape(self.dims)

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def density_matrix(self) -> np.ndarray:
        return np.outer(self.amplitudes, np.conj(self.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, unit-trace, positive-semidefinite operator."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = _readonly(self.matrix)
        if mat.shape != (self.dim, self.dim):
            raise ValueError(f"expected {self.dim}x{self.dim} matrix, got {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > HERM_TOL:
            raise ValueError("density matrix is not Hermitian within tolerance")
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {trace!r} deviates from 1")
        if float(np.min(np.linalg.eigvalsh(mat))) < -EIG_TOL:
            raise ValueError("density matrix has a negative eigenvalue beyond tolerance")
        object.__setattr__(self, "matrix", mat)

    def eigenvalues(self) -> np.ndarray:
        """Real spectrum in ascending order."""
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = _readonly(self.matrix)
        if mat.shape != (self.dim, self.dim):
            raise ValueError(f"expected {self.dim}x{self.dim} matrix, got {mat.shape}")
        defect = np.linalg.norm(mat.conj().T @ mat - np.eye(self.dim))
        if defect > UNITARY_TOL:
            raise ValueError(f"matrix is not unitary (Frobenius defect {defect:.3e})")
        object.__setattr__(self, "matrix", mat)


def state_vector(amplitudes, dims: Sequence[int] | None = None) -> StateVector:
    """Build a StateVector; `dims` defaults to a single subsystem."""
    amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    if dims is None:
        dims = (amps.size,)
    return StateVector(HilbertShape(tuple(dims)), amps)


def basis_state(dims: Sequence[int], indices: Sequence[int]) -> StateVector:
    """Computational basis ket |indices> of the composite space."""
    dims = tuple(int(d) for d in dims)
    indices = tuple(int(i) for i in indices)
    if len(indices) != len(dims):
        raise ValueError("need one basis index per subsystem")
    amps = np.zeros(int(np.prod(dims)), dtype=np.complex128)
    amps[int(np.ravel_multi_index(indices, dims))] = 1.0
    return StateVector(HilbertShape(dims), amps)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product; the result's shape is the concatenation of inputs'."""
    return StateVector(
        HilbertShape(a.dims + b.dims),
        np.kron(a.amplitudes, b.amplitudes),
    )


def apply_unitary(state: StateVector, u: UnitaryOperator, targets: Sequence[int]) -> StateVector:
    """Apply `u` to the listed subsystems (identity elsewhere).

    `targets` is ordered: the row/column multi-index of `u` runs over the
    target dimensions in the given order.
    """
    targets = state.shape.validate_subsystems(targets)
    if not targets:
        raise ValueError("apply_unitary needs at least one target subsystem")
    target_dims = [state.dims[t] for t in targets]
    if int(np.prod(target_dims)) != u.dim:
        raise ValueError(
            f"unitary dimension {u.dim} does not match target dimensions {target_dims}"
        )
    k = len(targets)
    psi = state.tensor_view()
    u_tensor = u.matrix.reshape(target_dims + target_dims)
    out = np.tensordot(u_tensor, psi, axes=(tuple(range(k, 2 * k)), targets))
    out = np.moveaxis(out, range(k), targets)
    return StateVector(state.shape, out.reshape(-1), tolerance=state.tolerance)


def partial_trace(
    state: Union[StateVector, DensityOperator],
    keep: Sequence[int],
    shape: HilbertShape | None = None,
) -> DensityOperator:
    """Reduced density operator on the `keep` subsystems (in the given order).

    For a StateVector the subsystem structure is taken from the state; for a
    DensityOperator it must be supplied via `shape`.
    """
    if isinstance(state, StateVector):
        shape = state.shape
    elif shape is None:
        raise ValueError("partial_trace of a DensityOperator requires an explicit shape")
    keep = shape.validate_subsystems(keep)
    if not keep or len(keep) == shape.n_subsystems:
        raise ValueError("keep must be a nonempty proper subset of the subsystems")
    traced = shape.complement(keep)
    d_keep = shape.subset_dim(keep)

    if isinstance(state, StateVector):
        psi = state.tensor_view().transpose(keep + traced).reshape(d_keep, -1)
        rho = psi @ psi.conj().T
        return DensityOperator(d_keep, rho)

    if state.dim != shape.total_dim:
        raise ValueError("shape does not match the operator dimension")
    n = shape.n_subsystems
    if 2 * n > len(_EINSUM_LETTERS):
        raise ValueError("too many subsystems for the einsum contraction")
    mat = state.matrix.reshape(shape.dims + shape.dims)
    row = list(_EINSUM_LETTERS[:n])
    col = [row[i] if i in traced else _EINSUM_LETTERS[n + i] for i in range(n)]
    out = [row[i] for i in keep] + [_EINSUM_LETTERS[n + i] for i in keep]
    rho = np.einsum("".join(row + col) + "->" + "".join(out), mat)
    return DensityOperator(d_keep, rho.reshape(d_keep, d_keep))


def trace_norm_distance(a: DensityOperator, b: DensityOperator) -> float:
    """Trace norm of the difference, tr|a - b| (no 1/2 prefactor)."""
    if a.dim != b.dim:
        raise ValueError("operators must have equal dimension")
    return float(np.sum(np.abs(np.linalg.eigvalsh(a.matrix - b.matrix))))


def haar_random_unitary(dim: int, rng: np.random.Generator) -> UnitaryOperator:
    """Haar-distributed random unitary via QR with phase correction."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return UnitaryOperator(dim, q * phases)
