"""Two-slit screen model and the erasure probability pipelines.

The source is a balanced marked pair: a marker particle entangled with a
screen particle whose two which-way states reach the detector plane as the
wavefunctions of a two-slit model.  Two pipelines produce the joint
probability table p(d, n) over marker outcomes d and detector bins n:

* simple (before-detection) erasure measures the marker first, then bins
  each conditional screen wavefunction with the chosen Born rule;
* delayed-choice (after-detection) erasure couples the screen particle to a
  localization register on a position grid first, measures the marker
  afterwards, and reads the joint statistics off the composite state.

Both pipelines are built from the same quadrature grid, so their tables can
be compared elementwise; `verify_equality` reports the maximum deviation.

Screen model: both slit modes share a uniform window envelope on the
detector span and differ by opposite phase gradients +-kappa, so the
coherence combinations (psi_1 +- psi_2)/sqrt(2) carry cos^2/sin^2 fringes
while |psi_1|^2 = |psi_2|^2 is flat.  The modes are exactly orthogonal
whenever kappa * span is an integer multiple of pi, which the default
geometry satisfies (kappa = 3*pi/8, span = 8).

Detection rules: `intensity` integrates |psi|^2 over the bin (the standard
Born rule); `amplitude` squares the integrated amplitude instead.  The
amplitude rule does not normalize across bins for generic wavefunctions and
tables built with it are left unnormalized.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Sequence

import numpy as np

from .measurement import couple_shift_register, distant_measure, mark_which_way
from .states import StateVector, UnitaryOperator, apply_unitary, state_vector

SUM_TOL = 1e-6
COVERAGE_TOL = 1e-6
DEFAULT_EQUALITY_TOL = 1e-9

MODES = ("simple", "delayed", "whichway")
BASIS_CHOICES = ("pm", "pmi", "whichway")
BORN_RULES = ("intensity", "amplitude")

_SQRT_HALF = math.sqrt(0.5)

# Marker measurement kets per basis choice, with outcome labels.
_BASIS_KETS: dict[str, tuple[tuple[str, np.ndarray], ...]] = {
    "pm": (
        ("+", np.array([_SQRT_HALF, _SQRT_HALF])),
        ("-", np.array([_SQRT_HALF, -_SQRT_HALF])),
    ),
    "pmi": (
        ("+i", np.array([_SQRT_HALF, 1j * _SQRT_HALF])),
        ("-i", np.array([_SQRT_HALF, -1j * _SQRT_HALF])),
    ),
    "whichway": (
        ("1", np.array([1.0, 0.0])),
        ("2", np.array([0.0, 1.0])),
    ),
}

# Screen wavefunction coefficients (over the two slit modes) per outcome
# label.  The coherence outcomes pair with the conjugate-coefficient screen
# state, so "+i" detects the (psi_1 - i psi_2)/sqrt(2) pattern.
_LABEL_COEFFS: dict[str, np.ndarray] = {
    "1": np.array([1.0, 0.0]),
    "2": np.array([0.0, 1.0]),
    "+": np.array([_SQRT_HALF, _SQRT_HALF]),
    "-": np.array([_SQRT_HALF, -_SQRT_HALF]),
    "+i": np.array([_SQRT_HALF, -1j * _SQRT_HALF]),
    "-i": np.array([_SQRT_HALF, 1j * _SQRT_HALF]),
}


@dataclass(frozen=True)
class SlitModel:
    """Far-field two-slit screen amplitudes.

    psi_j(x) = g(x) * exp(i * (-1)^j * phase_gradient * x) for j in {1, 2},
    where g is the uniform window envelope of half-width
    4 * envelope_width centered on the screen origin.  `slit_separation`
    records the aperture geometry; the fringe spacing itself is set by
    `phase_gradient` (see `from_geometry`).
    """

    slit_separation: float = 1.0
    envelope_width: float = 1.0
    phase_gradient: float = 3.0 * math.pi / 8.0

    def __post_init__(self):
        for name in ("slit_separation", "envelope_width", "phase_gradient"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_geometry(
        cls,
        slit_separation: float,
        wavenumber: float,
        screen_distance: float,
        envelope_width: float = 1.0,
    ) -> "SlitModel":
        """Phase gradient from aperture geometry: kappa = k * s / (2 L)."""
        return cls(
            slit_separation=slit_separation,
            envelope_width=envelope_width,
            phase_gradient=wavenumber * slit_separation / (2.0 * screen_distance),
        )

    @property
    def support_half_width(self) -> float:
        return 4.0 * self.envelope_width

    def envelope(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        height = 1.0 / math.sqrt(2.0 * self.support_half_width)
        return np.where(np.abs(x) <= self.support_half_width, height, 0.0)

    def slit_amplitude(self, slit: int, x: np.ndarray) -> np.ndarray:
        """Amplitude of slit mode `slit` (1 or 2) at screen positions x."""
        if slit not in (1, 2):
            raise ValueError("slit must be 1 or 2")
        sign = -1.0 if slit == 1 else 1.0
        return self.envelope(x) * np.exp(1j * sign * self.phase_gradient * np.asarray(x, float))

    def wavefunction(self, coefficients: Sequence[complex], x: np.ndarray) -> np.ndarray:
        """Screen amplitude of c_1 |slit 1> + c_2 |slit 2|."""
        c = np.asarray(coefficients, dtype=np.complex128)
        if c.shape != (2,):
            raise ValueError("expected two slit coefficients")
        return c[0] * self.slit_amplitude(1, x) + c[1] * self.slit_amplitude(2, x)


@dataclass(frozen=True)
class DetectorArray:
    """N contiguous detector bins of equal width, centered on the origin by default."""

    n_bins: int
    bin_width: float
    first_center: float | None = None

    def __post_init__(self):
        if self.n_bins < 1:
            raise ValueError("n_bins must be positive")
        if self.bin_width <= 0:
            raise ValueError("bin_width must be positive")
        if self.first_center is None:
            object.__setattr__(
                self, "first_center", -(self.n_bins - 1) * self.bin_width / 2.0
            )

    @property
    def centers(self) -> np.ndarray:
        return self.first_center + self.bin_width * np.arange(self.n_bins)

    @property
    def span(self) -> float:
        return self.n_bins * self.bin_width

    def edges(self, n: int) -> tuple[float, float]:
        """Bounds of 1-based bin n."""
        if not 1 <= n <= self.n_bins:
            raise ValueError(f"bin index {n} out of range 1..{self.n_bins}")
        center = self.first_center + (n - 1) * self.bin_width
        return center - self.bin_width / 2.0, center + self.bin_width / 2.0


@lru_cache(maxsize=8)
def _gauss_legendre(points: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(points)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def quadrature_grid(
    array: DetectorArray, points_per_bin: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes, weights, and 1-based bin index across the array.

    Nodes are strictly interior to their bins, so every grid point belongs to
    exactly one detector.
    """
    if points_per_bin < 1:
        raise ValueError("points_per_bin must be positive")
    base_x, base_w = _gauss_legendre(points_per_bin)
    half = array.bin_width / 2.0
    nodes = (array.centers[:, None] + half * base_x[None, :]).reshape(-1)
    weights = np.tile(half * base_w, array.n_bins)
    bin_index = np.repeat(np.arange(1, array.n_bins + 1), points_per_bin)
    return nodes, weights, bin_index


def screen_amplitude(model: SlitModel, d: str, x) -> np.ndarray | complex:
    """Screen wavefunction for outcome label d at position(s) x.

    Labels "1"/"2" give the bare slit modes; "+"/"-" the symmetric and
    antisymmetric combinations (psi_1 +- psi_2)/sqrt(2); "+i"/"-i" the
    partner patterns (psi_1 -+ i psi_2)/sqrt(2).
    """
    if d not in _LABEL_COEFFS:
        raise ValueError(f"unknown outcome label {d!r}")
    values = model.wavefunction(_LABEL_COEFFS[d], np.atleast_1d(np.asarray(x, float)))
    return values if np.ndim(x) else complex(values[0])


def _bin_values(
    psi: np.ndarray, weights: np.ndarray, bin_index: np.ndarray, n_bins: int, rule: str
) -> np.ndarray:
    """Per-bin detection values of sampled wavefunction `psi` under a Born rule."""
    if rule == "intensity":
        contrib = weights * np.abs(psi) ** 2
        return np.bincount(bin_index, weights=contrib, minlength=n_bins + 1)[1:]
    if rule == "amplitude":
        sums = np.zeros(n_bins + 1, dtype=np.complex128)
        np.add.at(sums, bin_index, weights * psi)
        return np.abs(sums[1:]) ** 2
    raise ValueError(f"unknown Born rule {rule!r}")


def bin_probability(
    model: SlitModel,
    array: DetectorArray,
    d: str,
    n: int,
    rule: str = "intensity",
    points_per_bin: int = 256,
) -> float:
    """Detection value of outcome-d's wavefunction in 1-based bin n.

    `intensity` integrates |psi_d|^2 over the bin; `amplitude` is the squared
    modulus of the integrated amplitude.
    """
    array.edges(n)  # range check
    nodes, weights, bin_index = quadrature_grid(array, points_per_bin)
    psi = screen_amplitude(model, d, nodes)
    return float(_bin_values(psi, weights, bin_index, array.n_bins, rule)[n - 1])


def coverage(
    model: SlitModel,
    array: DetectorArray,
    labels: Sequence[str] = ("1", "2", "+", "-", "+i", "-i"),
    points_per_bin: int = 256,
) -> float:
    """Smallest total detection probability over the array among the labels."""
    nodes, weights, bin_index = quadrature_grid(array, points_per_bin)
    totals = []
    for d in labels:
        psi = screen_amplitude(model, d, nodes)
        totals.append(float(np.sum(_bin_values(psi, weights, bin_index, array.n_bins, "intensity"))))
    return min(totals)


@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    """Joint probabilities p(d, n) over outcome labels d and 1-based bins n."""

    mode: str
    labels: tuple[str, ...]
    centers: np.ndarray
    values: np.ndarray
    born_rule: str = "intensity"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.born_rule not in BORN_RULES:
            raise ValueError(f"born_rule must be one of {BORN_RULES}")
        values = np.array(self.values, dtype=float)
        centers = np.array(self.centers, dtype=float)
        if values.shape != (len(self.labels), centers.size):
            raise ValueError("values must have shape (len(labels), n_bins)")
        if np.min(values) < -1e-12:
            raise ValueError("probabilities must be nonnegative")
        # The integrated-amplitude rule is not normalizable across bins, so
        # only intensity tables are required to sum to one.
        if self.born_rule == "intensity":
            total = float(values.sum())
            if abs(total - 1.0) > SUM_TOL:
                raise ValueError(f"table total {total!r} deviates from 1 beyond {SUM_TOL}")
        values.setflags(write=False)
        centers.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n_bins(self) -> int:
        return self.centers.size

    def entry(self, d: str, n: int) -> float:
        """p(d, n) with 1-based bin index n."""
        return float(self.values[self.labels.index(d), n - 1])

    def row(self, d: str) -> np.ndarray:
        return self.values[self.labels.index(d)]

    def label_marginals(self) -> np.ndarray:
        """Total probability per outcome label."""
        return self.values.sum(axis=1)

    def bin_marginal(self) -> np.ndarray:
        """Unconditioned screen distribution: sum over outcome labels per bin."""
        return self.values.sum(axis=0)

    def to_csv(self) -> str:
        """Deterministic CSV with header mode,d,n,x_center,p (17 significant digits)."""
        out = io.StringIO()
        out.write("mode,d,n,x_center,p\n")
        for i, d in enumerate(self.labels):
            for n in range(1, self.n_bins + 1):
                out.write(
                    f"{self.mode},{d},{n},{self.centers[n - 1]:.17g},{self.values[i, n - 1]:.17g}\n"
                )
        return out.getvalue()


@dataclass(frozen=True)
class ErasureConfig:
    """Experiment parameters; also the JSON schema of the configuration file."""

    slit_separation: float = 1.0
    envelope_width: float = 1.0
    phase_gradient: float = 3.0 * math.pi / 8.0
    n_bins: int = 16
    bin_width: float = 0.5
    span: float = 8.0
    basis: str = "pm"
    born_rule: str = "intensity"
    quadrature_points: int = 256

    def __post_init__(self):
        for name in ("slit_separation", "envelope_width", "phase_gradient", "bin_width", "span"):
            value = float(getattr(self, name))
            if value <= 0:
                raise ValueError(f"{name} must be positive")
            object.__setattr__(self, name, value)
        for name in ("n_bins", "quadrature_points"):
            raw = getattr(self, name)
            value = int(raw)
            if value != raw:
                raise ValueError(f"{name} must be an integer")
            if value <= 0:
                raise ValueError(f"{name} must be positive")
            object.__setattr__(self, name, value)
        if self.basis not in BASIS_CHOICES:
            raise ValueError(f"basis must be one of {BASIS_CHOICES}")
        if self.born_rule not in BORN_RULES:
            raise ValueError(f"born_rule must be one of {BORN_RULES}")
        if abs(self.span - self.n_bins * self.bin_width) > 1e-9 * self.span:
            raise ValueError("span must equal n_bins * bin_width")
        if self.span < 8.0 * self.envelope_width - 1e-12:
            raise ValueError("span must cover the envelope support (8 * envelope_width)")

    def model(self) -> SlitModel:
        return SlitModel(
            slit_separation=self.slit_separation,
            envelope_width=self.envelope_width,
            phase_gradient=self.phase_gradient,
        )

    def array(self) -> DetectorArray:
        return DetectorArray(n_bins=self.n_bins, bin_width=self.bin_width)

    def with_updates(self, **changes) -> "ErasureConfig":
        return replace(self, **changes)


def _table_mode(basis: str, pipeline: str) -> str:
    return "whichway" if basis == "whichway" else pipeline


def _source_pair() -> StateVector:
    return mark_which_way(_SQRT_HALF, _SQRT_HALF)


def run_simple_erasure(
    config: ErasureConfig,
    marker_unitary: UnitaryOperator | None = None,
) -> ProbabilityTable:
    """Marker measured first; conditional screen patterns binned afterwards.

    Each marker outcome steers the screen particle into its partner
    superposition of slit modes, whose wavefunction is then integrated over
    the detector bins: p(d, n) = p(d) * p_n(d).

    `marker_unitary` is an optional free evolution of the marker before its
    measurement (identity by default); injecting the same unitary into both
    pipelines must leave their equality intact.
    """
    model, array = config.model(), config.array()
    nodes, weights, bin_index = quadrature_grid(array, config.quadrature_points)
    source = _source_pair()
    if marker_unitary is not None:
        source = apply_unitary(source, marker_unitary, (0,))
    kets = _BASIS_KETS[config.basis]
    outcomes = distant_measure(
        source, (0,), [ket for _, ket in kets], labels=[lbl for lbl, _ in kets]
    )
    rows = []
    for outcome in outcomes:
        psi = model.wavefunction(outcome.post_state.amplitudes, nodes)
        rows.append(
            outcome.probability
            * _bin_values(psi, weights, bin_index, array.n_bins, config.born_rule)
        )
    return ProbabilityTable(
        mode=_table_mode(config.basis, "simple"),
        labels=tuple(lbl for lbl, _ in kets),
        centers=array.centers,
        values=np.array(rows),
        born_rule=config.born_rule,
    )


def run_delayed_choice(
    config: ErasureConfig,
    marker_unitary: UnitaryOperator | None = None,
) -> ProbabilityTable:
    """Screen detection first, marker measurement afterwards.

    The screen particle is discretized on the quadrature grid and coupled to
    a localization register of dimension n_bins + 1 (state 0 untriggered, one
    state per bin) by the shift coupling |x>|0> -> |x>|bin(x)>.  The marker is
    then measured on the composite state, and p(d, n) is read from the
    register blocks of each conditional state.

    `marker_unitary` evolves the marker during the delay, after the screen
    detection and before the marker measurement.
    """
    model, array = config.model(), config.array()
    nodes, weights, bin_index = quadrature_grid(array, config.quadrature_points)
    sqrt_w = np.sqrt(weights)

    # Marked pair with the screen particle expanded on the grid: grid
    # amplitudes carry sqrt(weight) so norms match the continuum integrals.
    modes = np.array([
        model.slit_amplitude(1, nodes) * sqrt_w,
        model.slit_amplitude(2, nodes) * sqrt_w,
    ])
    source = state_vector((modes * _SQRT_HALF).reshape(-1), dims=(2, nodes.size))

    coupled = couple_shift_register(source, bin_index, register_dim=array.n_bins + 1)
    if marker_unitary is not None:
        coupled = apply_unitary(coupled, marker_unitary, (0,))

    kets = _BASIS_KETS[config.basis]
    outcomes = distant_measure(
        coupled, (0,), [ket for _, ket in kets], labels=[lbl for lbl, _ in kets]
    )
    rows = []
    for outcome in outcomes:
        blocks = outcome.post_state.amplitudes.reshape(nodes.size, array.n_bins + 1)
        if config.born_rule == "intensity":
            per_bin = np.sum(np.abs(blocks[:, 1:]) ** 2, axis=0)
        else:
            # Integrated amplitude of the bin-n component: undo the sqrt(w)
            # scaling and apply the quadrature weights.
            per_bin = np.abs(sqrt_w @ blocks[:, 1:]) ** 2
        rows.append(outcome.probability * per_bin)
    return ProbabilityTable(
        mode=_table_mode(config.basis, "delayed"),
        labels=tuple(lbl for lbl, _ in kets),
        centers=array.centers,
        values=np.array(rows),
        born_rule=config.born_rule,
    )


@dataclass(frozen=True)
class EqualityReport:
    """Elementwise comparison of two probability tables."""

    max_deviation: float
    tolerance: float
    passed: bool
    worst_label: str
    worst_bin: int


def verify_equality(
    t1: ProbabilityTable,
    t2: ProbabilityTable,
    tolerance: float = DEFAULT_EQUALITY_TOL,
) -> EqualityReport:
    """Maximum elementwise deviation between two tables on the same index grid.

    Entries are compared positionally (outcome slot by outcome slot), so
    tables from different pipelines or bases can be set against each other
    as long as their shapes and detector geometries agree.
    """
    if t1.values.shape != t2.values.shape:
        raise ValueError("tables are indexed by different outcome/bin sets")
    if not np.allclose(t1.centers, t2.centers, atol=1e-12):
        raise ValueError("tables use different detector geometries")
    diff = np.abs(t1.values - t2.values)
    flat = int(np.argmax(diff))
    i, j = np.unravel_index(flat, diff.shape)
    max_dev = float(diff[i, j])
    return EqualityReport(
        max_deviation=max_dev,
        tolerance=float(tolerance),
        passed=bool(max_dev <= tolerance),
        worst_label=t1.labels[i],
        worst_bin=int(j + 1),
    )


def fringe_visibility(pattern: Sequence[float]) -> float:
    """(max - min) / (max + min) over a probability pattern's extrema."""
    values = np.asarray(pattern, dtype=float)
    if values.size == 0:
        raise ValueError("empty pattern")
    hi, lo = float(values.max()), float(values.min())
    return 0.0 if hi + lo == 0.0 else (hi - lo) / (hi + lo)
