"""Coherence bases of a balanced two-level pair and their exchange symmetry.

A coherence vector is a superposition of the two which-way states with both
components nonzero.  Re-expanding the maximally entangled pair in such a
basis produces product terms whose behaviour under the two-particle exchange
operator singles out two special bases: the one whose terms are each
exchange-invariant, and the one whose terms are swapped.  A brute-force grid
search over the basis phases verifies that, up to an overall phase on either
basis vector, exactly one basis of each kind exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .schmidt import SchmidtDecomposition, reschmidt
from .states import HilbertShape, StateVector, UnitaryOperator, state_vector

CLASSIFY_TOL = 1e-9
_TWO_PI = 2.0 * math.pi


class SymmetryClass(Enum):
    TERMWISE_SYMMETRIC = "termwise-symmetric"
    TERM_SWAPPING = "term-swapping"
    NEITHER = "neither"


@dataclass(frozen=True)
class CoherenceBasisParams:
    """Moduli and phases defining a coherence vector and its orthogonal mate.

    The first vector is ``e^{i lam} p |1> + e^{i delta} q |2>`` with
    0 < p, q < 1 and p^2 + q^2 = 1; `gamma` is the free overall phase of the
    second vector.  Angles are wrapped into [0, 2*pi).
    """

    p: float
    q: float
    lam: float = 0.0
    delta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.p < 1.0 and 0.0 < self.q < 1.0):
            raise ValueError("p and q must lie strictly between 0 and 1")
        if abs(self.p**2 + self.q**2 - 1.0) > 1e-12:
            raise ValueError("p^2 + q^2 must equal 1")
        for name in ("lam", "delta", "gamma"):
            object.__setattr__(self, name, float(getattr(self, name)) % _TWO_PI)

    @classmethod
    def balanced(cls, lam: float = 0.0, delta: float = 0.0, gamma: float = 0.0) -> "CoherenceBasisParams":
        """Equal-modulus parameters p = q = sqrt(1/2)."""
        r = math.sqrt(0.5)
        return cls(p=r, q=r, lam=lam, delta=delta, gamma=gamma)

    def canonical(self) -> "CoherenceBasisParams":
        """Representative with the first vector's leading component real-positive.

        Multiplying either basis vector by an overall phase leaves the basis
        physically unchanged; stripping `lam` (and fixing gamma = 0) picks one
        member of that orbit.
        """
        return CoherenceBasisParams(
            p=self.p, q=self.q, lam=0.0, delta=(self.delta - self.lam) % _TWO_PI, gamma=0.0
        )


def coherence_pair(params: CoherenceBasisParams) -> tuple[StateVector, StateVector]:
    """The coherence vector and its (phase-convention) orthogonal partner."""
    a = np.array(
        [
            np.exp(1j * params.lam) * params.p,
            np.exp(1j * params.delta) * params.q,
        ]
    )
    b = np.array(
        [
            np.exp(1j * params.gamma) * params.q,
            np.exp(1j * (params.gamma + params.delta - params.lam + math.pi)) * params.p,
        ]
    )
    return state_vector(a), state_vector(b)


def exchange_operator(d: int) -> UnitaryOperator:
    """Two-particle exchange |j>|k> -> |k>|j> on a d x d bipartite space."""
    if d < 1:
        raise ValueError("dimension must be positive")
    mat = np.zeros((d * d, d * d))
    for j in range(d):
        for k in range(d):
            mat[k * d + j, j * d + k] = 1.0
    return UnitaryOperator(d * d, mat)


def _matches_up_to_phase(u: np.ndarray, v: np.ndarray, tol: float) -> bool:
    """True when u equals e^{i theta} v for some theta, within tol in 2-norm."""
    z = np.vdot(v, u)
    if abs(z) < tol:
        return bool(np.linalg.norm(u) < tol and np.linalg.norm(v) < tol)
    return bool(np.linalg.norm(u - (z / abs(z)) * v) <= tol)


def classify_symmetry(dec: SchmidtDecomposition, tol: float = CLASSIFY_TOL) -> SymmetryClass:
    """Exchange behaviour of a rank-2 decomposition on a 2x2 space.

    A term is mapped to itself (or to the other term) when the exchanged
    product vector matches it up to an overall phase, so the result is
    invariant under rephasing any basis vector.
    """
    if dec.rank != 2 or dec.dim_left != 2 or dec.dim_right != 2:
        raise ValueError("classification requires a rank-2 decomposition on a 2x2 space")
    e = exchange_operator(2).matrix
    t0, t1 = dec.term(0), dec.term(1)
    if _matches_up_to_phase(e @ t0, t0, tol) and _matches_up_to_phase(e @ t1, t1, tol):
        return SymmetryClass.TERMWISE_SYMMETRIC
    if _matches_up_to_phase(e @ t0, t1, tol) and _matches_up_to_phase(e @ t1, t0, tol):
        return SymmetryClass.TERM_SWAPPING
    return SymmetryClass.NEITHER


def _maximally_entangled_pair() -> StateVector:
    amps = np.zeros(4, dtype=np.complex128)
    amps[0] = amps[3] = math.sqrt(0.5)
    return StateVector(HilbertShape((2, 2)), amps)


def search_symmetric_bases(
    grid_steps: int,
    canonical: bool = True,
) -> list[tuple[CoherenceBasisParams, SymmetryClass]]:
    """Grid search for exchange-symmetric coherence expansions of the balanced pair.

    Sweeps lam, delta over {2*pi*k/grid_steps} with gamma = 0 and
    p = q = sqrt(1/2), re-expands the maximally entangled pair in each basis
    and keeps the grid points whose terms are exchange-symmetric or
    exchange-swapped.

    Raw hits fill whole lines delta - lam = const, since an overall phase on a
    basis vector never changes the expansion terms.  With ``canonical=True``
    (default) each hit is reduced to its phase-convention representative
    (lam = 0) and duplicates are dropped, so the returned points are the
    distinct bases themselves.
    """
    if grid_steps < 8:
        raise ValueError("grid_steps must be at least 8")
    pair = _maximally_entangled_pair()
    hits: list[tuple[int, int, SymmetryClass]] = []
    for k_lam in range(grid_steps):
        for k_delta in range(grid_steps):
            params = CoherenceBasisParams.balanced(
                lam=_TWO_PI * k_lam / grid_steps,
                delta=_TWO_PI * k_delta / grid_steps,
            )
            a, b = coherence_pair(params)
            dec = reschmidt(pair, (0,), [a, b])
            cls = classify_symmetry(dec)
            if cls is not SymmetryClass.NEITHER:
                hits.append((k_lam, k_delta, cls))

    if not canonical:
        return [
            (
                CoherenceBasisParams.balanced(
                    lam=_TWO_PI * k_lam / grid_steps,
                    delta=_TWO_PI * k_delta / grid_steps,
                ),
                cls,
            )
            for k_lam, k_delta, cls in hits
        ]

    reduced = {((k_delta - k_lam) % grid_steps, cls) for k_lam, k_delta, cls in hits}
    ordered = sorted(reduced, key=lambda item: (item[1].value, item[0]))
    return [
        (CoherenceBasisParams.balanced(lam=0.0, delta=_TWO_PI * k / grid_steps), cls)
        for k, cls in ordered
    ]


def search_results_csv(results: list[tuple[CoherenceBasisParams, SymmetryClass]]) -> str:
    """CSV rows `lambda,delta,class` for a search result list."""
    lines = ["lambda,delta,class"]
    for params, cls in results:
        lines.append(f"{params.lam:.17g},{params.delta:.17g},{cls.value}")
    return "\n".join(lines) + "\n"
