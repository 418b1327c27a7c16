"""Heralded remote phonon entanglement on a coupled optomechanical crystal.

Desk-scale simulator of a pulsed write/herald/readout protocol on two
optically coupled nanobeam cavities: classical mean-field dynamics, a
displaced-frame Lindblad master equation over a truncated 4-mode Fock
space, single-photon heralding by projection, and entanglement metrics
(concurrence, negativity, Bell fidelity, interference visibility).
"""
from .errors import (
    AccuracyFailure,
    ConfigError,
    CutoffTooSmall,
    DivergenceError,
    PositivityFailure,
    ProtocolViolation,
    SimulationError,
    ZeroProbabilityHerald,
)
from .fockspace import (
    DensityMatrix,
    FockOperator,
    ModeLayout,
    canonical_layout,
    destroy,
    displacement,
    embed,
    partial_trace,
    partial_transpose,
    project_and_normalize,
)
from .herald import HeraldedState, herald_single_photon, optical_basis_rotation, reconstruct_full
from .lindblad import BathSpec, QuantumTrajectory, evolve, initial_state, thermal_state
from .meanfield import (
    ClassicalTrajectory,
    integrate_classical,
    local_from_normal,
    normal_from_local,
)
from .metrics import (
    FringePattern,
    bell_fidelity,
    bell_fidelity_max,
    concurrence,
    heralding_rate,
    negativity,
    visibility,
)
from .protocol import (
    InterferenceResult,
    HeraldRunResult,
    ProtocolConfig,
    default_config,
    run_interference,
    run_temperature_sweep,
    run_write_herald,
    scan_herald_time,
)
from .system import (
    FrameConvention,
    PulseSpec,
    SystemParams,
    build_fluctuation_hamiltonian,
    default_params,
    pulse_value,
    thermal_occupation,
)

__version__ = "0.1.0"
