"""Unitary dynamics of labeled states under piecewise-constant pulses.

Propagation is by exact Hermitian eigendecomposition of each constant
segment, so there is no integrator tolerance anywhere. A recorded
trajectory samples the same decomposition on a uniform time grid, which
makes population values at shared grid points independent of the sampling
step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BasisMismatchError, FitFailureError, InvalidParameterError
from .ladder import (
    HamiltonianMatrix,
    LadderParams,
    build_full_ladder,
    resonant_two_photon,
)

NORM_TOL = 1e-10


@dataclass(frozen=True)
class QuantumState:
    """Labeled complex amplitude vector of unit norm."""

    basis: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        basis = tuple(self.basis)
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.shape[0] != len(basis):
            raise InvalidParameterError(
                f"amplitude vector of length {amps.shape} does not match {len(basis)} labels"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidParameterError(f"state norm {norm} deviates from 1 beyond 1e-10")
        amps.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_label(cls, basis, label) -> "QuantumState":
        """Basis state with all amplitude on one label."""
        basis = tuple(basis)
        amps = np.zeros(len(basis), dtype=complex)
        amps[_label_index(basis, label)] = 1.0
        return cls(basis, amps)

    def label_names(self) -> tuple:
        return tuple(str(label) for label in self.basis)

    def population(self, label) -> float:
        return float(abs(self.amplitudes[_label_index(self.basis, label)]) ** 2)

    def populations(self) -> dict:
        return {str(l): float(abs(a) ** 2) for l, a in zip(self.basis, self.amplitudes)}

    def overlap(self, other: "QuantumState") -> complex:
        if self.label_names() != other.label_names():
            raise BasisMismatchError("states are labeled with different bases")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "QuantumState") -> float:
        """Squared overlap; insensitive to global phase."""
        return float(abs(self.overlap(other)) ** 2)


def _label_index(basis, label) -> int:
    name = str(label)
    for i, candidate in enumerate(basis):
        if str(candidate) == name:
            return i
    raise BasisMismatchError(f"label {name!r} not in basis {tuple(str(l) for l in basis)}")


@dataclass(frozen=True)
class PulseSegment:
    """One constant-Hamiltonian pulse: matrix, duration (1/Gamma), drive phase.

    A nonzero phase multiplies the couplings above the diagonal by
    exp(i phase) and those below by its conjugate.
    """

    hamiltonian: HamiltonianMatrix
    duration: float
    phase: float = 0.0

    def __post_init__(self):
        if self.duration < 0:
            raise InvalidParameterError(f"duration must be >= 0, got {self.duration}")


def _phase_dressed(matrix: np.ndarray, phase: float) -> np.ndarray:
    if phase == 0.0:
        return matrix
    factor = complex(math.cos(phase), math.sin(phase))
    dressed = matrix.copy()
    upper = np.triu_indices_from(dressed, k=1)
    lower = np.tril_indices_from(dressed, k=-1)
    dressed[upper] *= factor
    dressed[lower] *= factor.conjugate()
    return dressed


def propagate(state: QuantumState, segment: PulseSegment) -> QuantumState:
    """Apply exp(-i H t) to the state via Hermitian eigendecomposition."""
    ham = segment.hamiltonian
    if state.label_names() != ham.label_names():
        raise BasisMismatchError(
            f"state basis {state.label_names()} does not match "
            f"Hamiltonian basis {ham.label_names()}"
        )
    if segment.duration == 0.0:
        return state
    h = _phase_dressed(ham.matrix, segment.phase)
    eigvals, eigvecs = np.linalg.eigh(h)
    coeffs = eigvecs.conj().T @ state.amplitudes
    amps = eigvecs @ (np.exp(-1j * eigvals * segment.duration) * coeffs)
    return QuantumState(state.basis, amps)


@dataclass(frozen=True)
class TrajectoryRecord:
    """Sampled populations of every basis label plus the final state."""

    basis: tuple
    times: np.ndarray
    populations: np.ndarray
    final_state: QuantumState

    def __post_init__(self):
        basis = tuple(self.basis)
        times = np.array(self.times, dtype=float)
        pops = np.array(self.populations, dtype=float)
        if times.ndim != 1 or np.any(np.diff(times) <= 0):
            raise InvalidParameterError("times must be a strictly increasing 1-D grid")
        if pops.shape != (times.shape[0], len(basis)):
            raise InvalidParameterError(
                f"populations shape {pops.shape} does not match "
                f"{times.shape[0]} samples x {len(basis)} labels"
            )
        if float(np.abs(pops.sum(axis=1) - 1.0).max()) > 1e-9:
            raise InvalidParameterError("populations at some sample do not sum to 1 within 1e-9")
        if pops.min() < 0.0 or pops.max() > 1.0 + 1e-12:
            raise InvalidParameterError("populations must lie in [0, 1 + 1e-12]")
        times.setflags(write=False)
        pops.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "populations", pops)

    def label_names(self) -> tuple:
        return tuple(str(label) for label in self.basis)

    def population(self, label) -> np.ndarray:
        """Population time series of one label."""
        return self.populations[:, _label_index(self.basis, label)].copy()

    def max_population(self, label) -> float:
        return float(self.population(label).max())

    def csv_text(self) -> str:
        """CSV form: header ``t,<label>,...``, full-precision decimal values."""
        header = "t," + ",".join(self.label_names())
        lines = [header]
        for t, row in zip(self.times, self.populations):
            lines.append(",".join([repr(float(t))] + [repr(float(p)) for p in row]))
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.csv_text())


def evolve_recorded(
    hamiltonian: HamiltonianMatrix,
    initial_state: QuantumState,
    duration: float,
    sample_step: float,
    phase: float = 0.0,
) -> TrajectoryRecord:
    """Evolve under one constant Hamiltonian, sampling on the grid k*sample_step.

    One eigendecomposition serves every sample, so shared grid points agree
    bit-for-bit between different step choices.
    """
    if duration <= 0:
        raise InvalidParameterError(f"duration must be > 0, got {duration}")
    if sample_step <= 0 or sample_step > duration:
        raise InvalidParameterError(
            f"sample_step must lie in (0, duration], got {sample_step} for duration {duration}"
        )
    if initial_state.label_names() != hamiltonian.label_names():
        raise BasisMismatchError("initial state and Hamiltonian bases differ")
    h = _phase_dressed(hamiltonian.matrix, phase)
    eigvals, eigvecs = np.linalg.eigh(h)
    coeffs = eigvecs.conj().T @ initial_state.amplitudes
    n_steps = max(1, int(round(duration / sample_step)))
    times = np.arange(n_steps + 1) * sample_step
    phases = np.exp(-1j * np.outer(times, eigvals))
    amplitudes = (eigvecs @ (phases * coeffs).T).T
    populations = np.abs(amplitudes) ** 2
    final = QuantumState(initial_state.basis, amplitudes[-1])
    return TrajectoryRecord(initial_state.basis, times, populations, final)


def simulate_blockade(
    params: LadderParams,
    duration: float,
    sample_step: float,
    two_photon="dressed",
    include_trailing_g: bool = False,
) -> TrajectoryRecord:
    """Drive the full ladder from A at the collective Raman resonance.

    ``two_photon`` selects the explicit two-photon detuning: "dressed"
    (default) solves the exact light-shift resonance, "first" uses the
    first-order balance value, and a number is taken as given (for
    detuning scans). Note the first-order choice leaves the line detuned
    by a few collective Rabi widths once second-order shifts matter, so it
    mainly serves comparison runs.
    """
    if isinstance(two_photon, str):
        detuning = resonant_two_photon(params, shifts=two_photon)
    else:
        detuning = float(two_photon)
    run_params = params.with_two_photon(detuning)
    ham = build_full_ladder(run_params, include_trailing_g=include_trailing_g)
    initial = QuantumState.from_label(ham.basis, "A")
    return evolve_recorded(ham, initial, duration, sample_step)


@dataclass(frozen=True)
class RabiFit:
    """Oscillation frequency, contrast and refined first peak time."""

    frequency: float
    contrast: float
    first_pi_time: float


def fit_rabi(trajectory: TrajectoryRecord, label) -> RabiFit:
    """Extract the Rabi frequency of one population from its first peak.

    The first prominent interior maximum (at least half the contrast above
    the minimum, which rejects small ripples riding on the main
    oscillation) is refined by a local quadratic fit; the frequency is pi
    over the refined peak time.
    """
    pops = trajectory.population(label)
    times = trajectory.times
    contrast = float(pops.max() - pops.min())
    if contrast < 1e-6:
        raise FitFailureError(
            f"population of {label} shows no oscillation (contrast {contrast:.2e})"
        )
    floor = pops.min() + 0.5 * contrast
    peak = None
    for i in range(1, len(pops) - 1):
        if pops[i] >= pops[i - 1] and pops[i] >= pops[i + 1] and pops[i] >= floor:
            peak = i
            break
    if peak is None:
        raise FitFailureError(
            f"no interior maximum of {label}; the trajectory must cover at least "
            "one full oscillation"
        )
    curvature = pops[peak - 1] - 2.0 * pops[peak] + pops[peak + 1]
    if curvature < 0.0:
        step = times[peak] - times[peak - 1]
        t_peak = times[peak] + 0.5 * step * (pops[peak - 1] - pops[peak + 1]) / curvature
    else:
        t_peak = times[peak]
    return RabiFit(
        frequency=math.pi / float(t_peak),
        contrast=contrast,
        first_pi_time=float(t_peak),
    )
