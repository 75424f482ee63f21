"""Shared test utilities: random states and independent reference computations."""

from __future__ import annotations

import numpy as np

from erasure_lab import HilbertShape, StateVector


def random_state(rng: np.random.Generator, dims) -> StateVector:
    n = int(np.prod(dims))
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return StateVector(HilbertShape(tuple(dims)), v / np.linalg.norm(v))


def reduced_density_oracle(state: StateVector, keep_axis: int) -> np.ndarray:
    """Reduced density matrix of one subsystem of a bipartite state via einsum.

    Deliberately independent of the library's partial_trace path.
    """
    psi = state.amplitudes.reshape(state.dims)
    if keep_axis == 0:
        return np.einsum("ab,cb->ac", psi, psi.conj())
    return np.einsum("ab,ac->bc", psi, psi.conj())


def trace_distance_oracle(a: np.ndarray, b: np.ndarray) -> float:
    """Sum of singular values of the difference (trace norm, no 1/2)."""
    return float(np.sum(np.linalg.svd(a - b, compute_uv=False)))
