"""spinreg: simulation and optimal control of electron-nuclear spin registers."""

from .linalg import (
    HERMITIAN_TOL,
    UNITARY_TOL,
    embed_operator,
    evolve,
    gate_fidelity,
    kron,
)
from .register import (
    LocalFrame,
    RegisterSpec,
    control_hamiltonian,
    drift_hamiltonian,
    local_frame,
    make_register,
    validate_window,
)
from .pulses import (
    GateSpec,
    PulseSegment,
    PulseSequence,
    compile_decoupled_gate,
    compile_plain_gate,
    min_clock_time,
    read_schedule,
    reduced_rabi,
    suggest_clock_time,
    ul_propagator,
    write_schedule,
)
from .simulate import simulate_sequence

__version__ = "0.1.0"
