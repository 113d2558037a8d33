"""Light-shift-imbalance-induced blockade of collective atomic excitations.

Simulation and design toolkit: collective ladder Hamiltonians and light
shifts, exact pulse dynamics, two-ensemble gate protocols over a shared
photon mode, and cavity figures of merit.
"""

from .cavity import (
    CavityAnchor,
    CavityFigures,
    CavityGeometry,
    GateFeasibility,
    cavity_figures,
    first_principles_g,
    gate_feasibility,
)
from .constants import GAMMA_HZ, GAMMA_SI, gamma_time_to_seconds, seconds_to_gamma_time
from .dynamics import (
    PulseSegment,
    QuantumState,
    RabiFit,
    TrajectoryRecord,
    evolve_recorded,
    fit_rabi,
    propagate,
    simulate_blockade,
)
from .errors import (
    BasisMismatchError,
    ConfigError,
    FitFailureError,
    InvalidGeometryError,
    InvalidParameterError,
    LsiibError,
    PhysicsRegimeWarning,
    PreconditionError,
    ProtocolViolationError,
)
from .ladder import (
    CollectiveLabel,
    HamiltonianMatrix,
    LadderParams,
    LightShifts,
    adiabatic_eliminate,
    blockade_shift_numeric,
    build_full_ladder,
    dressed_shift,
    ladder_basis,
    light_shifts,
    resonant_two_photon,
)
from .protocol import (
    ENSEMBLE_LABELS,
    GateReport,
    ProtocolRates,
    RegisterState,
    StepSpec,
    ancilla_entanglement_entropy,
    cnot_target,
    coincidence_probabilities,
    ensemble_photon_swap_spec,
    link_read_spec,
    link_write_spec,
    pi_pulse,
    prepare_rotation,
    run_cnot,
    run_interlink,
    target_flip_spec,
)

__version__ = "0.1.0"
