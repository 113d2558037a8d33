"""Two-ensemble gate protocols on an explicit register.

The register is ensemble-I x photon mode {0, 1} x ensemble-II, where each
ensemble lives in its five single-excitation collective labels
(A, S1, B1, C1, D1) and the photon mode is a shared cavity mode (two-qubit
gate) or a free-space mode (inter-computer link). Interlink runs may carry
an extra two-level ancilla entangled with the sending qubit.

Pulse maps (ideal mode), written as ordered (label, photon) pairs:

    ensemble-I  photon swap:   (A, 0) <-> (C1, 1)
        the (C1, 0) component is blockade-protected and stays put;
        (A, 1) would be driven to two photons and is treated as a risk
        state (leakage recorded, untouched).
    ensemble-II photon swap:   (C1, 1) <-> (S1, 0)  and  (D1, 1) <-> (B1, 0)
        simultaneously; risk states (S1, 1), (B1, 1).
    target flip (no photon):   C1 <-> D1 on one ensemble.
    link read  (Q1 side):      (A, 0) <-> (C1, 1); risk (A, 1).
    link write (Q2 side):      (A, 1) <-> (C1, 0); the photon is absorbed.

A pi pulse maps the first pair member to the second with phase
exp(i drive_phase) and the second back to the first with
-exp(-i drive_phase); these are the Raman pi-rotation signs with the i
factors folded into the free classical drive phase. Applying the same
pulse again with the drive phase advanced by pi therefore undoes it
exactly. "chain" mode replaces each ideal swap by the propagated
three-level Raman chain of the pulse, quantifying leakage into the
optically excited intermediate state and residual light-shift phases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import GAMMA_SI
from .errors import (
    InvalidParameterError,
    PreconditionError,
    ProtocolViolationError,
)
from .ladder import dressed_shift

ENSEMBLE_LABELS = ("A", "S1", "B1", "C1", "D1")
MODES = ("ideal", "chain", "strict")
_RISK_TOL = 1e-12


def _ensemble_index(label: str) -> int:
    try:
        return ENSEMBLE_LABELS.index(label)
    except ValueError:
        raise InvalidParameterError(
            f"ensemble label must be one of {ENSEMBLE_LABELS}, got {label!r}"
        ) from None


@dataclass(frozen=True)
class RegisterState:
    """Pure state over ensemble-I x photon {0,1} x ensemble-II (optional ancilla).

    ``amplitudes`` has shape (5, 2, 5), or (2, 5, 2, 5) with a leading
    two-level ancilla axis.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape not in ((5, 2, 5), (2, 5, 2, 5)):
            raise InvalidParameterError(
                f"register shape must be (5, 2, 5) or (2, 5, 2, 5), got {amps.shape}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > 1e-10:
            raise InvalidParameterError(f"register norm {norm} deviates from 1 beyond 1e-10")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def has_ancilla(self) -> bool:
        return self.amplitudes.ndim == 4

    @staticmethod
    def _axis_vector(spec, labels) -> np.ndarray:
        vec = np.zeros(len(labels), dtype=complex)
        if isinstance(spec, dict):
            for key, value in spec.items():
                vec[labels.index(key)] = value
        else:
            vec[labels.index(spec)] = 1.0
        return vec

    @classmethod
    def product(cls, first, photon, second, ancilla=None) -> "RegisterState":
        """Product state from per-subsystem specs (a label/index or a dict of amplitudes)."""
        v1 = cls._axis_vector(first, list(ENSEMBLE_LABELS))
        vp = cls._axis_vector(photon, [0, 1])
        v2 = cls._axis_vector(second, list(ENSEMBLE_LABELS))
        amps = np.einsum("i,j,k->ijk", v1, vp, v2)
        if ancilla is not None:
            va = cls._axis_vector(ancilla, [0, 1])
            amps = np.einsum("a,ijk->aijk", va, amps)
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise InvalidParameterError("product state has zero norm")
        return cls(amps / norm)

    def component(self, first: str, photon: int, second: str, ancilla: int | None = None) -> complex:
        idx = (_ensemble_index(first), photon, _ensemble_index(second))
        if self.has_ancilla:
            idx = ((0 if ancilla is None else ancilla),) + idx
        return complex(self.amplitudes[idx])

    def probability(self, first=None, photon=None, second=None) -> float:
        """Marginal probability of the given subsystem labels."""
        pops = np.abs(self.amplitudes) ** 2
        if self.has_ancilla:
            pops = pops.sum(axis=0)
        if first is not None:
            pops = pops[_ensemble_index(first)]
        else:
            pops = pops.sum(axis=0)
        if photon is not None:
            pops = pops[photon]
        else:
            pops = pops.sum(axis=0)
        if second is not None:
            pops = pops[_ensemble_index(second)]
        else:
            pops = pops.sum()
        return float(pops)

    def overlap(self, other: "RegisterState") -> complex:
        if self.amplitudes.shape != other.amplitudes.shape:
            raise InvalidParameterError("register shapes differ")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "RegisterState") -> float:
        """Squared overlap; insensitive to global phase."""
        return float(abs(self.overlap(other)) ** 2)

    def component_dict(self, tol: float = 1e-12) -> dict:
        """Nonzero components keyed like "A|0|C1" (ancilla prepended when present)."""
        out = {}
        for idx in np.ndindex(self.amplitudes.shape):
            value = self.amplitudes[idx]
            if abs(value) <= tol:
                continue
            if self.has_ancilla:
                anc, i, n, j = idx
                key = f"{anc}|{ENSEMBLE_LABELS[i]}|{n}|{ENSEMBLE_LABELS[j]}"
            else:
                i, n, j = idx
                key = f"{ENSEMBLE_LABELS[i]}|{n}|{ENSEMBLE_LABELS[j]}"
            out[key] = complex(value)
        return out


@dataclass(frozen=True)
class StepSpec:
    """One protocol pulse: the register pairs it swaps and its physical rate.

    ``transition_pairs`` holds ordered ((label, photon), (label, photon))
    pairs; a photon entry of None means the pulse does not involve the
    photon mode (plain ensemble pair). ``risk_states`` are components whose
    physical couplings lead outside the register. The chain fields describe
    the underlying Raman chain (classical-leg coupling, photon-leg
    coupling, detuning magnitude and sign) for diagnostic propagation;
    ``stark_compensated`` retunes the chain onto its dressed two-photon
    resonance the way a calibrated experiment would.
    """

    name: str
    target: str
    transition_pairs: tuple
    effective_rate: float
    pulse_area: float = math.pi
    drive_phase: float = 0.0
    risk_states: tuple = ()
    chain_couplings: tuple | None = None
    chain_detuning: float | None = None
    detuning_sign: int = 1
    stark_compensated: bool = True

    def __post_init__(self):
        if self.target not in ("E-I", "E-II", "interlink-Q1", "interlink-Q2"):
            raise InvalidParameterError(f"unknown pulse target {self.target!r}")
        if self.effective_rate <= 0:
            raise InvalidParameterError("effective_rate must be > 0")
        if self.pulse_area < 0:
            raise InvalidParameterError("pulse_area must be >= 0")
        if self.detuning_sign not in (-1, 1):
            raise InvalidParameterError("detuning_sign must be +1 or -1")

    @property
    def duration(self) -> float:
        """Pulse duration in units of 1/Gamma."""
        return self.pulse_area / self.effective_rate

    def with_drive_phase(self, phase: float) -> "StepSpec":
        return replace(self, drive_phase=phase)


@dataclass(frozen=True)
class ProtocolRates:
    """Drive strengths shared by the protocol pulses (decay-rate units).

    ``omega1``/``omega2`` drive the blockaded single-qubit rotations,
    ``omega_cavity_*`` are the classical legs of the two cavity transfer
    pulses with vacuum coupling ``g_cavity``, ``omega_prime1/2`` drive the
    target-flip Raman pair, and the link fields describe the free-space
    read and write pulses.
    """

    n_atoms: int = 1225
    delta: float = 1000.0
    omega1: float = 1e-3
    omega2: float = 100.0
    omega_cavity_i: float = 2.0
    omega_cavity_ii: float = 2.0
    omega_prime1: float = 100.0
    omega_prime2: float = 1.0
    g_cavity: float = 54.25
    omega_link_read: float = 2.0
    omega_link_write: float = 2.0
    g_free: float = 1.0
    detuning_sign: int = 1

    @property
    def rabi_collective(self) -> float:
        return math.sqrt(self.n_atoms) * self.omega1 * self.omega2 / (2.0 * self.delta)

    @property
    def rabi_prime(self) -> float:
        # no sqrt(N): single-excitation manifolds carry bare coupling rates
        return self.omega_prime1 * self.omega_prime2 / (2.0 * self.delta)


def ensemble_photon_swap_spec(rates: ProtocolRates, ensemble: str, drive_phase: float = 0.0) -> StepSpec:
    """Transfer pulse between one ensemble and the photon mode (pi area)."""
    root_n = math.sqrt(rates.n_atoms)
    if ensemble == "I":
        return StepSpec(
            name="ensemble_I_photon_swap",
            target="E-I",
            transition_pairs=((("A", 0), ("C1", 1)),),
            effective_rate=root_n * rates.omega_cavity_i * rates.g_cavity / (2.0 * rates.delta),
            drive_phase=drive_phase,
            risk_states=(("A", 1),),
            chain_couplings=(root_n * rates.omega_cavity_i, rates.g_cavity),
            chain_detuning=rates.delta,
            detuning_sign=rates.detuning_sign,
        )
    if ensemble == "II":
        return StepSpec(
            name="ensemble_II_photon_swap",
            target="E-II",
            transition_pairs=((("C1", 1), ("S1", 0)), (("D1", 1), ("B1", 0))),
            effective_rate=rates.omega_cavity_ii * rates.g_cavity / (2.0 * rates.delta),
            drive_phase=drive_phase,
            risk_states=(("S1", 1), ("B1", 1)),
            chain_couplings=(rates.omega_cavity_ii, rates.g_cavity),
            chain_detuning=rates.delta,
            detuning_sign=rates.detuning_sign,
        )
    raise InvalidParameterError(f"ensemble must be 'I' or 'II', got {ensemble!r}")


def target_flip_spec(rates: ProtocolRates, drive_phase: float = 0.0) -> StepSpec:
    """Pi pulse exchanging the C1 and D1 amplitudes of ensemble II."""
    return StepSpec(
        name="target_flip",
        target="E-II",
        transition_pairs=((("C1", None), ("D1", None)),),
        effective_rate=rates.rabi_prime,
        drive_phase=drive_phase,
        chain_couplings=(rates.omega_prime1, rates.omega_prime2),
        chain_detuning=rates.delta,
        detuning_sign=rates.detuning_sign,
    )


def link_read_spec(rates: ProtocolRates, drive_phase: float = 0.0) -> StepSpec:
    """Read pulse mapping the Q1 qubit onto the free-space photon mode."""
    root_n = math.sqrt(rates.n_atoms)
    return StepSpec(
        name="link_read",
        target="interlink-Q1",
        transition_pairs=((("A", 0), ("C1", 1)),),
        effective_rate=root_n * rates.omega_link_read * rates.g_free / (2.0 * rates.delta),
        drive_phase=drive_phase,
        risk_states=(("A", 1),),
        chain_couplings=(root_n * rates.omega_link_read, rates.g_free),
        chain_detuning=rates.delta,
        detuning_sign=rates.detuning_sign,
    )


def link_write_spec(rates: ProtocolRates, drive_phase: float = 0.0) -> StepSpec:
    """Write pulse absorbing the free-space photon into the Q2 qubit."""
    root_n = math.sqrt(rates.n_atoms)
    return StepSpec(
        name="link_write",
        target="interlink-Q2",
        transition_pairs=((("A", 1), ("C1", 0)),),
        effective_rate=root_n * rates.omega_link_write * rates.g_free / (2.0 * rates.delta),
        drive_phase=drive_phase,
        chain_couplings=(root_n * rates.omega_link_write, rates.g_free),
        chain_detuning=rates.delta,
        detuning_sign=rates.detuning_sign,
    )


def _pair_slices(target: str, member) -> tuple:
    """Index tuple selecting one (label, photon) register component family."""
    label, photon = member
    i = _ensemble_index(label)
    if target in ("E-I", "interlink-Q1"):
        core = (i, slice(None), slice(None)) if photon is None else (i, photon, slice(None))
    else:
        core = (slice(None), slice(None), i) if photon is None else (slice(None), photon, i)
    return (Ellipsis,) + core


def _apply_two_by_two(amplitudes: np.ndarray, target: str, pairs, u: np.ndarray) -> np.ndarray:
    """Apply a 2x2 matrix on each listed pair of register component families."""
    out = amplitudes.copy()
    for x_member, y_member in pairs:
        sx = _pair_slices(target, x_member)
        sy = _pair_slices(target, y_member)
        ax = amplitudes[sx]
        ay = amplitudes[sy]
        out[sx] = u[0, 0] * ax + u[0, 1] * ay
        out[sy] = u[1, 0] * ax + u[1, 1] * ay
    return out


def _rotation_matrix(theta: float, phase: float) -> np.ndarray:
    """Raman rotation by area theta: [[cos, i e^{i phase} sin], [i e^{-i phase} sin, cos]]."""
    c = math.cos(0.5 * theta)
    s = math.sin(0.5 * theta)
    f = complex(math.cos(phase), math.sin(phase))
    return np.array([[c, 1j * f * s], [1j * f.conjugate() * s, c]])


def _swap_family_matrix(theta: float, phase: float) -> np.ndarray:
    """Rotation family whose pi member maps x -> e^{i phase} y, y -> -e^{-i phase} x."""
    c = math.cos(0.5 * theta)
    s = math.sin(0.5 * theta)
    f = complex(math.cos(phase), math.sin(phase))
    return np.array([[c, -f.conjugate() * s], [f * s, c]])


def prepare_rotation(state: RegisterState, target: str, pair, theta: float, phase: float = 0.0) -> RegisterState:
    """Coherent Raman rotation on one ensemble label pair.

    Applies [[cos(t/2), i e^{i phase} sin(t/2)], [i e^{-i phase} sin(t/2),
    cos(t/2)]] on the (x, y) pair of the target ensemble. The target
    ensemble must carry no amplitude outside span{x, y}; used for state
    preparation (A <-> C1 blockaded collective rotation and C1 <-> D1
    single-excitation rotation).
    """
    if target in ("interlink-Q1",):
        target = "E-I"
    if target in ("interlink-Q2",):
        target = "E-II"
    if target not in ("E-I", "E-II"):
        raise InvalidParameterError(f"rotation target must be E-I or E-II, got {target!r}")
    x_label, y_label = pair
    allowed = {_ensemble_index(x_label), _ensemble_index(y_label)}
    axis = -3 if target == "E-I" else -1
    moved = np.moveaxis(state.amplitudes, axis, 0)
    for i in range(len(ENSEMBLE_LABELS)):
        if i in allowed:
            continue
        stray = float(np.abs(moved[i]).max()) if moved[i].size else 0.0
        if stray > 1e-9:
            raise PreconditionError(
                f"{target} carries amplitude {stray:.3e} on {ENSEMBLE_LABELS[i]}, outside "
                f"the rotation span {{{x_label}, {y_label}}}"
            )
    u = _rotation_matrix(theta, phase)
    pairs = (((x_label, None), (y_label, None)),)
    return RegisterState(_apply_two_by_two(state.amplitudes, target, pairs, u))


def _risk_population(state: RegisterState, spec: StepSpec) -> float:
    total = 0.0
    for member in spec.risk_states:
        sl = _pair_slices(spec.target, member)
        total += float((np.abs(state.amplitudes[sl]) ** 2).sum())
    return total


def _chain_block(spec: StepSpec) -> np.ndarray:
    """2x2 register-pair block of the propagated three-level Raman chain.

    The chain is x -- g1 -- (excited) -- g2 -- y with the intermediate
    level at -sign*delta. With Stark compensation each end level is offset
    by minus its own dressed shift, putting the dressed pair on two-photon
    resonance. The block is phase-calibrated so its forward element carries
    exactly exp(i drive_phase), absorbing the Raman i factors into the
    classical phase the way drive_phase is defined for ideal pulses.
    """
    if spec.chain_couplings is None or spec.chain_detuning is None:
        raise InvalidParameterError(
            f"pulse {spec.name!r} carries no chain description; chain mode needs "
            "chain_couplings and chain_detuning"
        )
    g1, g2 = spec.chain_couplings
    delta = spec.detuning_sign * spec.chain_detuning
    e_x = -dressed_shift(g1, delta) if spec.stark_compensated else 0.0
    e_y = -dressed_shift(g2, delta) if spec.stark_compensated else 0.0
    h = np.array(
        [
            [e_x, 0.5 * g1, 0.0],
            [0.5 * g1, -delta, 0.5 * g2],
            [0.0, 0.5 * g2, e_y],
        ],
        dtype=complex,
    )
    eigvals, eigvecs = np.linalg.eigh(h)
    u = eigvecs @ np.diag(np.exp(-1j * eigvals * spec.duration)) @ eigvecs.conj().T
    block = u[np.ix_((0, 2), (0, 2))]
    forward = block[1, 0]
    if abs(forward) < 1e-12:
        return block
    # re-phase the y frame so the forward element lands on exp(i drive_phase)
    mu = spec.drive_phase - math.atan2(forward.imag, forward.real)
    rot = complex(math.cos(mu), math.sin(mu))
    calibrated = block.copy()
    calibrated[1, 0] *= rot
    calibrated[0, 1] *= rot.conjugate()
    return calibrated


def pi_pulse(state: RegisterState, spec: StepSpec, mode: str = "ideal"):
    """Apply one protocol pulse; returns (new_state, leakage).

    Ideal mode applies the exact subspace swap with the documented phase
    convention (forward e^{i drive_phase}, backward -e^{-i drive_phase});
    areas other than pi rotate partially within the same family. Risk
    states are left untouched with their population reported as leakage;
    strict mode raises on them instead. Chain mode propagates the pulse's
    physical Raman chain, so leakage additionally counts amplitude left in
    the optically excited intermediate state (the register is renormalized
    after recording it).
    """
    if mode not in MODES:
        raise InvalidParameterError(f"mode must be one of {MODES}, got {mode!r}")
    leakage = _risk_population(state, spec)
    if mode == "strict" and leakage > _RISK_TOL:
        raise ProtocolViolationError(
            f"pulse {spec.name!r} found population {leakage:.3e} on states its couplings "
            "would drive outside the register (photon occupation above one)"
        )
    if mode == "chain":
        if abs(spec.pulse_area - math.pi) > 1e-12:
            raise InvalidParameterError("chain mode is defined for pi pulses")
        u = _chain_block(spec)
        amps = _apply_two_by_two(state.amplitudes, spec.target, spec.transition_pairs, u)
        norm = float(np.linalg.norm(amps))
        leakage += max(0.0, 1.0 - norm**2)
        amps = amps / norm
        return RegisterState(amps), leakage
    u = _swap_family_matrix(spec.pulse_area, spec.drive_phase)
    amps = _apply_two_by_two(state.amplitudes, spec.target, spec.transition_pairs, u)
    return RegisterState(amps), leakage


# ---------------------------------------------------------------------------
# protocol runs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StepRecord:
    """Post-step snapshot: durations in both unit systems, leakage, state."""

    name: str
    duration: float
    duration_seconds: float
    leakage: float
    state: dict


@dataclass(frozen=True)
class GateReport:
    """Outcome of one protocol run.

    ``fidelity_vs_target`` compares the final register against the designed
    output modulo global phase; ``per_step_leakage`` lists the population
    found outside each pulse's designed subspace.
    """

    inputs: dict
    final_state: RegisterState
    fidelity_vs_target: float
    per_step_leakage: tuple
    steps: tuple
    ancilla_entropy_bits: float | None = None

    @property
    def timings(self) -> tuple:
        return tuple((s.name, s.duration, s.duration_seconds) for s in self.steps)

    def to_dict(self) -> dict:
        """JSON-compatible report; complex amplitudes become [re, im] pairs."""
        out = {
            "inputs": {k: _json_number(v) for k, v in self.inputs.items()},
            "fidelity_vs_target": self.fidelity_vs_target,
            "per_step_leakage": list(self.per_step_leakage),
            "steps": [
                {
                    "name": s.name,
                    "duration_gamma": s.duration,
                    "duration_seconds": s.duration_seconds,
                    "leakage": s.leakage,
                    "state": {k: [v.real, v.imag] for k, v in s.state.items()},
                }
                for s in self.steps
            ],
            "final_state": {
                k: [v.real, v.imag] for k, v in self.final_state.component_dict().items()
            },
        }
        if self.ancilla_entropy_bits is not None:
            out["ancilla_entropy_bits"] = self.ancilla_entropy_bits
        return out


def _json_number(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def _check_normalized(pair, names) -> None:
    total = abs(pair[0]) ** 2 + abs(pair[1]) ** 2
    if abs(total - 1.0) > 1e-9:
        raise PreconditionError(
            f"|{names[0]}|^2 + |{names[1]}|^2 = {total} must equal 1 within 1e-9"
        )


def _rotation_angles(first: complex, second: complex) -> tuple:
    """Rotation area and drive phase creating first|x> + second|y> from |x>.

    The pair is taken with the first amplitude's phase factored out (a
    global phase), so the prepared state equals the request exactly up to
    that global factor.
    """
    a = complex(first)
    b = complex(second)
    ref = math.atan2(a.imag, a.real) if abs(a) > 0 else 0.0
    b_rel = b * complex(math.cos(-ref), math.sin(-ref))
    theta = 2.0 * math.atan2(abs(b), abs(a))
    if abs(b_rel) == 0.0:
        return theta, 0.0
    phase = 0.5 * math.pi - math.atan2(b_rel.imag, b_rel.real)
    return theta, phase


def cnot_target(alpha: complex, beta: complex, xi: complex, eta_amp: complex) -> RegisterState:
    """Designed controlled-NOT output for inputs (alpha, beta) x (xi, eta)."""
    amps = np.zeros((5, 2, 5), dtype=complex)
    amps[_ensemble_index("A"), 0, _ensemble_index("C1")] = alpha * xi
    amps[_ensemble_index("A"), 0, _ensemble_index("D1")] = alpha * eta_amp
    amps[_ensemble_index("C1"), 0, _ensemble_index("D1")] = beta * xi
    amps[_ensemble_index("C1"), 0, _ensemble_index("C1")] = beta * eta_amp
    return RegisterState(amps)


def run_cnot(
    alpha: complex,
    beta: complex,
    xi: complex,
    eta_amp: complex,
    rates: ProtocolRates | None = None,
    mode: str = "ideal",
) -> GateReport:
    """Ensemble controlled-NOT through the shared cavity mode.

    Prepares ensemble I in alpha|A> + beta|C1> and ensemble II in
    xi|C1> + eta_amp|D1>, transfers the control qubit onto the cavity,
    writes it into ensemble II, flips the target pair, and plays both
    transfers back, leaving the cavity empty and the ensembles in the
    entangled controlled-NOT output. Drive phases are fixed per step so the
    composed map carries a single global phase.
    """
    _check_normalized((alpha, beta), ("alpha", "beta"))
    _check_normalized((xi, eta_amp), ("xi", "eta"))
    rates = rates or ProtocolRates()
    rabi = rates.rabi_collective
    if rabi <= 0:
        raise InvalidParameterError("collective Raman rate must be positive; check omega1, omega2")

    state = RegisterState.product("A", 0, "A")
    steps = []
    leaks = []

    def record(name, duration, leakage, current):
        steps.append(
            StepRecord(
                name=name,
                duration=float(duration),
                duration_seconds=float(duration) / GAMMA_SI,
                leakage=float(leakage),
                state=current.component_dict(),
            )
        )
        leaks.append(float(leakage))

    theta_i, phi_i = _rotation_angles(alpha, beta)
    state = prepare_rotation(state, "E-I", ("A", "C1"), theta_i, phi_i)
    record("prepare_control_rotation", theta_i / rabi, 0.0, state)

    state = prepare_rotation(state, "E-II", ("A", "C1"), math.pi, 0.5 * math.pi)
    record("prepare_target_pi", math.pi / rabi, 0.0, state)

    theta_ii, phi_ii = _rotation_angles(xi, eta_amp)
    state = prepare_rotation(state, "E-II", ("C1", "D1"), theta_ii, phi_ii)
    record("prepare_target_rotation", theta_ii / rates.rabi_prime, 0.0, state)

    # drive phases (pi/2, 0, pi/2, 0, 0) make the composed five-pulse core
    # reproduce the designed output with one overall phase
    core = (
        ensemble_photon_swap_spec(rates, "I", drive_phase=0.5 * math.pi),
        ensemble_photon_swap_spec(rates, "II"),
        target_flip_spec(rates, drive_phase=0.5 * math.pi),
        ensemble_photon_swap_spec(rates, "II"),
        ensemble_photon_swap_spec(rates, "I"),
    )
    for spec in core:
        state, leakage = pi_pulse(state, spec, mode=mode)
        record(spec.name, spec.duration, leakage, state)

    target = cnot_target(alpha, beta, xi, eta_amp)
    return GateReport(
        inputs={"alpha": alpha, "beta": beta, "xi": xi, "eta": eta_amp, "mode": mode},
        final_state=state,
        fidelity_vs_target=min(1.0, state.fidelity(target)),
        per_step_leakage=tuple(leaks),
        steps=tuple(steps),
    )


def run_interlink(
    alpha: complex,
    beta: complex,
    with_ancilla: bool = False,
    rates: ProtocolRates | None = None,
    mode: str = "ideal",
) -> GateReport:
    """Transfer one ensemble qubit to another over the free-space photon mode.

    A read pulse maps Q1's qubit onto the photon, a write pulse absorbs the
    photon into Q2, and a local pi rotation on each ensemble restores the
    (A, C1) labeling: Q2 ends in alpha|A> + beta|C1> with Q1 and the photon
    in their ground/vacuum states. With ``with_ancilla`` Q1 instead starts
    maximally entangled with a two-level ancilla (alpha, beta are ignored)
    and the ancilla ends up maximally entangled with Q2.
    """
    rates = rates or ProtocolRates()
    if with_ancilla:
        alpha = beta = math.sqrt(0.5)
        state = RegisterState(
            np.array(
                [
                    RegisterState.product("A", 0, "A").amplitudes * math.sqrt(0.5),
                    RegisterState.product("C1", 0, "A").amplitudes * math.sqrt(0.5),
                ]
            )
        )
    else:
        _check_normalized((alpha, beta), ("alpha", "beta"))
        state = RegisterState.product({"A": alpha, "C1": beta}, 0, "A")

    steps = []
    leaks = []

    def record(name, duration, leakage, current):
        steps.append(
            StepRecord(
                name=name,
                duration=float(duration),
                duration_seconds=float(duration) / GAMMA_SI,
                leakage=float(leakage),
                state=current.component_dict(),
            )
        )
        leaks.append(float(leakage))

    read = link_read_spec(rates)
    write = link_write_spec(rates)
    state, leakage = pi_pulse(state, read, mode=mode)
    record(read.name, read.duration, leakage, state)
    if state.probability(photon=1) > 1.0 + 1e-10:
        raise ProtocolViolationError("photon mode occupation above one")
    state, leakage = pi_pulse(state, write, mode=mode)
    record(write.name, write.duration, leakage, state)

    rabi = rates.rabi_collective
    state = prepare_rotation(state, "E-I", ("A", "C1"), math.pi, 0.0)
    record("q1_label_restore", math.pi / rabi, 0.0, state)
    state = prepare_rotation(state, "E-II", ("A", "C1"), math.pi, 0.0)
    record("q2_label_restore", math.pi / rabi, 0.0, state)

    if with_ancilla:
        target = RegisterState(
            np.array(
                [
                    RegisterState.product("A", 0, "A").amplitudes * math.sqrt(0.5),
                    RegisterState.product("A", 0, "C1").amplitudes * math.sqrt(0.5),
                ]
            )
        )
        entropy = ancilla_entanglement_entropy(state)
    else:
        target = RegisterState.product("A", 0, {"A": alpha, "C1": beta})
        entropy = None

    return GateReport(
        inputs={"alpha": alpha, "beta": beta, "with_ancilla": with_ancilla, "mode": mode},
        final_state=state,
        fidelity_vs_target=min(1.0, state.fidelity(target)),
        per_step_leakage=tuple(leaks),
        steps=tuple(steps),
        ancilla_entropy_bits=entropy,
    )


def ancilla_entanglement_entropy(state: RegisterState) -> float:
    """Entanglement entropy (bits) between the ancilla and the rest of the register."""
    if not state.has_ancilla:
        raise InvalidParameterError("state carries no ancilla axis")
    flat = state.amplitudes.reshape(2, -1)
    rho = flat @ flat.conj().T
    eigvals = np.linalg.eigvalsh(rho)
    entropy = 0.0
    for value in eigvals:
        if value > 1e-300:
            entropy -= float(value) * math.log2(float(value))
    return entropy


def coincidence_probabilities(state: RegisterState) -> dict:
    """Detection statistics of the two heralding photons.

    The first herald fires when ensemble I is in A, the second when
    ensemble II is in C1; their joint rate witnesses the correlation the
    gate created. Requires the photon mode to be empty.
    """
    if state.probability(photon=1) > 1e-12:
        raise PreconditionError("heralding requires the photon mode in its vacuum state")
    return {
        "p_photon1": state.probability(first="A"),
        "p_photon2": state.probability(second="C1"),
        "p_coincidence": state.probability(first="A", second="C1"),
    }
