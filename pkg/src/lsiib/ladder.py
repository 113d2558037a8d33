"""Collective excitation ladder of a Raman-driven atomic ensemble.

N three-level atoms (metastable states ``a`` and ``c``, optically excited
state ``g``) share two drive fields: a weak field of Rabi frequency
``omega1`` on the a-g leg with detuning ``delta1``, and a strong field
``omega2`` on the c-g leg with detuning ``delta2``. The fully symmetric
collective states form a ladder ordered by the number of c excitations,

    A, G1, C1, G11, C2, G12, C3, ...

where ``Cn`` carries n atoms in ``c`` and the intermediate states ``G1,
G11, G12, ...`` carry one atom in ``g`` on top of 0, 1, 2, ... c
excitations. In decay-rate units the truncated ladder Hamiltonian has
diagonal entries

    A: +D/2      G(n): -(d + (n-1) D)      C(n): -(2n-1) D/2

with common detuning d = (delta1 + delta2)/2 and two-photon detuning
D = delta1 - delta2, and nearest-neighbour couplings

    C(n-1) <-> G(n):  sqrt(N-n+1) omega1 / 2     (C0 meaning A)
    G(n)   <-> C(n):  sqrt(n)     omega2 / 2.

Only the a-leg couplings inherit the collective sqrt(N) enhancement.

Light shifts control whether the ladder stays resonant as it is climbed.
To first order the shifts of A, C1, C2 are equally spaced, so a two-photon
detuning tuned to the A <-> C1 Raman resonance would leave C1 <-> C2
resonant as well. The exact dressed shifts break that balance: the second
excitation is pushed off resonance by the blockade shift

    -(omega2**4 + omega1**4) / (8 d**3)

while A <-> C1 stays resonant, which is what closes the collective
excitation into an effective two-level system.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, PhysicsRegimeWarning

HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class LadderParams:
    """Drive and ensemble parameters of the collective Raman system.

    Rates are in units of the excited-state decay rate. ``delta1`` detunes
    the a-g leg, ``delta2`` the c-g leg; ``truncation`` is the largest
    c-excitation number kept when building the ladder.
    """

    n_atoms: int
    omega1: float
    omega2: float
    delta1: float
    delta2: float
    truncation: int = 2

    def __post_init__(self):
        if self.n_atoms < 1:
            raise InvalidParameterError(f"n_atoms must be >= 1, got {self.n_atoms}")
        if self.truncation < 1:
            raise InvalidParameterError(f"truncation must be >= 1, got {self.truncation}")
        if self.truncation > self.n_atoms:
            raise InvalidParameterError(
                f"truncation {self.truncation} exceeds n_atoms {self.n_atoms}; "
                "the ladder couplings would need square roots of negative atom counts"
            )
        if self.omega1 < 0 or self.omega2 < 0:
            raise InvalidParameterError("Rabi frequencies omega1, omega2 must be >= 0")

    @property
    def delta(self) -> float:
        """Common (average) detuning of the two legs."""
        return 0.5 * (self.delta1 + self.delta2)

    @property
    def two_photon(self) -> float:
        """Two-photon detuning delta1 - delta2."""
        return self.delta1 - self.delta2

    @classmethod
    def from_common(cls, n_atoms, omega1, omega2, delta, two_photon=0.0, truncation=2):
        """Build parameters from the common and two-photon detunings."""
        return cls(
            n_atoms=n_atoms,
            omega1=omega1,
            omega2=omega2,
            delta1=delta + 0.5 * two_photon,
            delta2=delta - 0.5 * two_photon,
            truncation=truncation,
        )

    def with_two_photon(self, two_photon: float) -> "LadderParams":
        """Same drives and common detuning, different two-photon detuning."""
        return LadderParams.from_common(
            self.n_atoms, self.omega1, self.omega2, self.delta, two_photon, self.truncation
        )


@dataclass(frozen=True)
class CollectiveLabel:
    """Label of one collective ladder state.

    ``kind`` is "A" (all atoms in a), "C" (n atoms in c) or "G" (one atom
    in g plus n-1 c excitations). Text form follows the ladder convention:
    A, G1, C1, G11, C2, G12, C3, ...
    """

    kind: str
    n: int = 0

    def __post_init__(self):
        if self.kind not in ("A", "G", "C"):
            raise InvalidParameterError(f"label kind must be A, G or C, got {self.kind!r}")
        if self.kind == "A" and self.n != 0:
            raise InvalidParameterError("the shared ground label A carries no excitation number")
        if self.kind != "A" and self.n < 1:
            raise InvalidParameterError(f"{self.kind} labels need n >= 1, got {self.n}")

    def __str__(self) -> str:
        if self.kind == "A":
            return "A"
        if self.kind == "C":
            return f"C{self.n}"
        return "G1" if self.n == 1 else f"G1{self.n - 1}"


A_LABEL = CollectiveLabel("A")
C1_LABEL = CollectiveLabel("C", 1)
C2_LABEL = CollectiveLabel("C", 2)


def ladder_basis(truncation: int, include_trailing_g: bool = False) -> tuple:
    """Ordered ladder basis up to C(truncation).

    The default basis ends at C(truncation); with ``include_trailing_g`` the
    intermediate state above the last C state is appended, which for
    truncation 2 reproduces the conventional six-level basis
    (A, G1, C1, G11, C2, G12).
    """
    if truncation < 1:
        raise InvalidParameterError(f"truncation must be >= 1, got {truncation}")
    labels = [A_LABEL]
    for n in range(1, truncation + 1):
        labels.append(CollectiveLabel("G", n))
        labels.append(CollectiveLabel("C", n))
    if include_trailing_g:
        labels.append(CollectiveLabel("G", truncation + 1))
    return tuple(labels)


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Labeled Hermitian matrix in decay-rate units."""

    basis: tuple
    matrix: np.ndarray
    regime_warning: str | None = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        basis = tuple(self.basis)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != len(basis):
            raise InvalidParameterError(
                f"matrix shape {m.shape} does not match a basis of {len(basis)} labels"
            )
        scale = max(1.0, float(np.abs(m).max()) if m.size else 1.0)
        if float(np.abs(m - m.conj().T).max()) > HERMITICITY_TOL * scale:
            raise InvalidParameterError("matrix is not Hermitian to 1e-12 relative tolerance")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def label_names(self) -> tuple:
        return tuple(str(label) for label in self.basis)

    def index(self, label) -> int:
        name = str(label)
        for i, candidate in enumerate(self.basis):
            if str(candidate) == name:
                return i
        raise KeyError(f"label {name!r} not in basis {self.label_names()}")

    def entry(self, row, col) -> complex:
        return complex(self.matrix[self.index(row), self.index(col)])


def build_full_ladder(params: LadderParams, include_trailing_g: bool = False) -> HamiltonianMatrix:
    """Hamiltonian of the collective ladder truncated at ``params.truncation``.

    Diagonal and coupling entries follow the pattern in the module
    docstring; with ``include_trailing_g`` the basis keeps the intermediate
    state above the last C state as well.
    """
    basis = ladder_basis(params.truncation, include_trailing_g)
    n_atoms = params.n_atoms
    d = params.delta
    two_photon = params.two_photon
    dim = len(basis)
    h = np.zeros((dim, dim), dtype=complex)
    for i, label in enumerate(basis):
        if label.kind == "A":
            h[i, i] = 0.5 * two_photon
        elif label.kind == "G":
            n = label.n
            h[i, i] = -(d + (n - 1) * two_photon)
            coupling = 0.5 * math.sqrt(n_atoms - n + 1) * params.omega1
            h[i - 1, i] = h[i, i - 1] = coupling
        else:
            n = label.n
            h[i, i] = -0.5 * (2 * n - 1) * two_photon
            coupling = 0.5 * math.sqrt(n) * params.omega2
            h[i - 1, i] = h[i, i - 1] = coupling
    return HamiltonianMatrix(basis, h)


@dataclass(frozen=True)
class LightShifts:
    """First-order light shifts, blockade shift and collective Raman rate.

    ``eps_a``, ``eps_c1``, ``eps_c2`` are the first-order ac-Stark shifts
    of A, C1, C2; ``blockade_shift`` is the closed-form residual detuning of
    the second excitation; ``rabi_collective`` is the effective two-photon
    Rabi frequency of the A <-> C1 transition. All in decay-rate units.
    """

    eps_a: float
    eps_c1: float
    eps_c2: float
    blockade_shift: float
    rabi_collective: float

    @property
    def two_photon_resonance(self) -> float:
        """First-order two-photon detuning of the A <-> C1 resonance."""
        return self.eps_c1 - self.eps_a

    @property
    def first_order_balance(self) -> float:
        """(eps_c1 - eps_a) - (eps_c2 - eps_c1); identically zero at first order."""
        return (self.eps_c1 - self.eps_a) - (self.eps_c2 - self.eps_c1)


def light_shifts(params: LadderParams) -> LightShifts:
    """Closed-form shifts of the lowest ladder states at the common detuning.

    eps_a = N omega1^2/(4 d), eps_c1 = [omega2^2 + (N-1) omega1^2]/(4 d),
    eps_c2 = [2 omega2^2 + (N-2) omega1^2]/(4 d), blockade shift
    -(omega2^4 + omega1^4)/(8 d^3), and collective Raman rate
    sqrt(N) omega1 omega2/(2 d).
    """
    d = params.delta
    if d == 0.0:
        raise ZeroDivisionError(
            "light shifts diverge at zero common detuning (delta1 = -delta2); "
            "choose detunings with a nonzero average"
        )
    n = params.n_atoms
    w1, w2 = params.omega1, params.omega2
    return LightShifts(
        eps_a=n * w1**2 / (4.0 * d),
        eps_c1=(w2**2 + (n - 1) * w1**2) / (4.0 * d),
        eps_c2=(2.0 * w2**2 + (n - 2) * w1**2) / (4.0 * d),
        blockade_shift=-(w2**4 + w1**4) / (8.0 * d**3),
        rabi_collective=math.sqrt(n) * w1 * w2 / (2.0 * d),
    )


def dressed_shift(omega: float, detuning: float) -> float:
    """Exact ac-Stark shift of the far-detuned level of one driven pair.

    For the two-level Hamiltonian [[0, omega/2], [omega/2, -detuning]] this
    is the displacement of the eigenvalue adiabatically connected to the
    undriven level: sign(detuning) (sqrt(detuning^2 + omega^2) - |detuning|)/2,
    evaluated in a cancellation-free form.
    """
    if detuning == 0.0:
        raise ZeroDivisionError("dressed shift is undefined at zero detuning (degenerate pair)")
    root = math.hypot(detuning, omega)
    return math.copysign(omega * omega / (2.0 * (root + abs(detuning))), detuning)


def blockade_shift_numeric(params: LadderParams) -> float:
    """Residual detuning of the second excitation from exact dressed shifts.

    Each ladder state's shift is summed from exact two-level dressed shifts
    of its couplings at the common detuning, and the returned value is the
    balance residual (eps_c2 - eps_c1) - (eps_c1 - eps_a). The second
    differences are rearranged into an exactly equivalent product form so
    no precision is lost to cancellation:

        leg1 = -omega1^4 / [(gN+gN1)(gN1+gN2)(gN+gN2)],  g_k = sqrt(d^2 + k omega1^2)
        leg2 = -omega2^4 / [(g0+g1)(g1+g2)(g0+g2)],      g_m = sqrt(d^2 + m omega2^2)

    This agrees with the closed-form blockade shift when the common
    detuning dominates both sqrt(N) omega1 and omega2, and quantifies the
    deviation outside that regime.
    """
    if params.n_atoms < 2:
        raise InvalidParameterError("the second collective excitation requires n_atoms >= 2")
    d = params.delta
    if d == 0.0:
        raise ZeroDivisionError("dressed shifts are undefined at zero common detuning")
    n = params.n_atoms
    w1, w2 = params.omega1, params.omega2

    g_n = math.hypot(d, math.sqrt(n) * w1)
    g_n1 = math.hypot(d, math.sqrt(n - 1) * w1)
    g_n2 = math.hypot(d, math.sqrt(n - 2) * w1)
    leg1 = -(w1**4) / ((g_n + g_n1) * (g_n1 + g_n2) * (g_n + g_n2))

    g_0 = abs(d)
    g_1 = math.hypot(d, w2)
    g_2 = math.hypot(d, math.sqrt(2.0) * w2)
    leg2 = -(w2**4) / ((g_0 + g_1) * (g_1 + g_2) * (g_0 + g_2))

    return math.copysign(1.0, d) * (leg1 + leg2)


def _dressed_eps(params: LadderParams, delta1: float, delta2: float) -> tuple:
    """Exact dressed shifts of A, C1, C2 with per-leg detunings."""
    n, w1, w2 = params.n_atoms, params.omega1, params.omega2
    eps_a = dressed_shift(math.sqrt(n) * w1, delta1)
    eps_c1 = dressed_shift(math.sqrt(n - 1) * w1, delta1) + dressed_shift(w2, delta2)
    eps_c2 = dressed_shift(math.sqrt(n - 2) * w1, delta1) + dressed_shift(
        math.sqrt(2.0) * w2, delta2
    )
    return eps_a, eps_c1, eps_c2


def resonant_two_photon(params: LadderParams, shifts: str = "dressed") -> float:
    """Two-photon detuning that puts the collective A <-> C1 line on resonance.

    ``shifts="first"`` returns the first-order value eps_c1 - eps_a.
    ``shifts="dressed"`` (default) solves the self-consistent condition with
    exact dressed shifts evaluated at the per-leg detunings d +- D/2, which
    is what the full ladder requires once second-order shifts matter; the
    fixed point converges geometrically with rate of order shift/detuning.
    """
    first = light_shifts(params).two_photon_resonance
    if shifts == "first":
        return first
    if shifts != "dressed":
        raise InvalidParameterError(f"shifts must be 'dressed' or 'first', got {shifts!r}")
    n, w1 = params.n_atoms, params.omega1
    d = params.delta
    two_photon = first
    for _ in range(64):
        delta1 = d + 0.5 * two_photon
        delta2 = d - 0.5 * two_photon
        eps_a = dressed_shift(math.sqrt(n) * w1, delta1)
        eps_c1 = dressed_shift(math.sqrt(max(n - 1, 0)) * w1, delta1) + dressed_shift(
            params.omega2, delta2
        )
        updated = eps_c1 - eps_a
        if abs(updated - two_photon) <= 1e-15 * max(1.0, abs(updated)):
            return updated
        two_photon = updated
    return two_photon


def adiabatic_eliminate(
    params: LadderParams,
    resonant: bool = False,
    blockade_override: float | None = None,
    shifts: str = "dressed",
) -> HamiltonianMatrix:
    """Effective three-level Hamiltonian on (A, C1, C2) after eliminating the G states.

    The couplings are rabi/2 between A and C1 and sqrt(2(N-1)/N) rabi/2
    between C1 and C2, with rabi = sqrt(N) omega1 omega2/(2 d). The default
    diagonal carries the dressed light shifts (at the per-leg detunings)
    plus the explicit two-photon pattern (+D/2, -D/2, -3D/2);
    ``shifts="first"`` substitutes the first-order shift formulas.

    With ``resonant=True`` the two-photon detuning is taken at the A <-> C1
    resonance and the energy zero is moved there, leaving only the blockade
    shift on C2 (closed form, or ``blockade_override`` when given, e.g. 0.0
    for an unblockaded control).

    Valid when the common detuning dominates the couplings and the
    two-photon detuning; outside that regime the result carries a
    ``regime_warning`` note (and a PhysicsRegimeWarning is emitted) rather
    than raising.
    """
    if params.n_atoms < 2:
        raise InvalidParameterError("the effective three-level form requires n_atoms >= 2")
    shift_values = light_shifts(params)
    n = params.n_atoms
    d = params.delta
    rabi = shift_values.rabi_collective
    c_a_c1 = 0.5 * rabi
    c_c1_c2 = 0.5 * math.sqrt(2.0 * (n - 1) / n) * rabi

    if resonant:
        blockade = shift_values.blockade_shift if blockade_override is None else blockade_override
        diagonal = (0.0, 0.0, blockade)
    else:
        two_photon = params.two_photon
        if shifts == "dressed":
            eps_a, eps_c1, eps_c2 = _dressed_eps(
                params, d + 0.5 * two_photon, d - 0.5 * two_photon
            )
        elif shifts == "first":
            eps_a, eps_c1, eps_c2 = (
                shift_values.eps_a,
                shift_values.eps_c1,
                shift_values.eps_c2,
            )
        else:
            raise InvalidParameterError(f"shifts must be 'dressed' or 'first', got {shifts!r}")
        diagonal = (
            eps_a + 0.5 * two_photon,
            eps_c1 - 0.5 * two_photon,
            eps_c2 - 1.5 * two_photon,
        )

    matrix = np.array(
        [
            [diagonal[0], c_a_c1, 0.0],
            [c_a_c1, diagonal[1], c_c1_c2],
            [0.0, c_c1_c2, diagonal[2]],
        ],
        dtype=complex,
    )

    note = None
    drive_scale = max(params.omega2, math.sqrt(n) * params.omega1, abs(params.two_photon))
    if abs(d) < 10.0 * drive_scale:
        note = (
            f"common detuning |{d}| does not dominate "
            f"max(omega2, sqrt(N) omega1, |two-photon|) = {drive_scale}; "
            "adiabatic elimination is uncontrolled here"
        )
        warnings.warn(note, PhysicsRegimeWarning, stacklevel=2)

    return HamiltonianMatrix((A_LABEL, C1_LABEL, C2_LABEL), matrix, regime_warning=note)
