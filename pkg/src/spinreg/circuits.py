"""Gate-level circuits, the two controlled-gate constructions, and lowering
to pulse schedules.

Register convention: qubit 0 is the electron, qubits 1..n are nuclei.  A
nuclear qubit's computational basis is its local (tilde) ms=1 frame, so a
2x2 gate matrix on a nucleus is interpreted in that frame when lowering.

The electron-target controlled gate uses the identity u = e^{i a} A Z B Z C
with A B C = 1; the phase bookkeeping is closed with a pair of X-conjugated
controlled phase gates carrying e^{i a} on the control-1 branch (the
equality to the controlled gate is exact, verified by brute force).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    HADAMARD,
    ID2,
    SX,
    SZ,
    UNITARY_TOL,
    embed_operator,
    is_unitary,
    rot_x,
    rot_y,
    rot_z,
)
from .pulses import GateSpec, PulseSegment, PulseSequence, compile_plain_gate
from .pulses import ideal_plain_gate_ms1


class CircuitError(ValueError):
    pass


GATE_KINDS = ("x", "z", "h", "u2", "phase")


@dataclass(frozen=True)
class Gate:
    """One circuit gate: kind, target, optional control qubit.

    ``matrix`` holds the 2x2 unitary for kind "u2"; ``alpha`` parameterizes
    the phase gate diag(1, e^{i alpha / 2}).
    """

    kind: str
    target: int
    control: int = None
    matrix: np.ndarray = None
    alpha: float = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if self.kind == "u2":
            if self.matrix is None:
                raise CircuitError("u2 gate needs a matrix")
            m = np.asarray(self.matrix, dtype=complex)
            if m.shape != (2, 2):
                raise CircuitError("u2 matrix must be 2x2")
            if not is_unitary(m, UNITARY_TOL):
                raise CircuitError("u2 matrix is not unitary within tolerance")
            object.__setattr__(self, "matrix", m)
        if self.kind == "phase" and self.alpha is None:
            raise CircuitError("phase gate needs an angle")
        if self.control is not None and self.control == self.target:
            raise CircuitError("control and target must be distinct")

    def base_matrix(self) -> np.ndarray:
        if self.kind == "x":
            return SX.copy()
        if self.kind == "z":
            return SZ.copy()
        if self.kind == "h":
            return HADAMARD.copy()
        if self.kind == "u2":
            return self.matrix.copy()
        return np.array(
            [[1.0, 0.0], [0.0, np.exp(0.5j * self.alpha)]], dtype=complex
        )


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple = field(default_factory=tuple)

    def __post_init__(self):
        gates = tuple(self.gates)
        for g in gates:
            for q in (g.target, g.control):
                if q is not None and not 0 <= q < self.n_qubits:
                    raise CircuitError(
                        f"gate qubit {q} out of range for {self.n_qubits} qubits"
                    )
        object.__setattr__(self, "gates", gates)

    def __len__(self):
        return len(self.gates)


def gate_unitary(gate: Gate, n_qubits: int) -> np.ndarray:
    """Full-register matrix of one gate."""
    base = gate.base_matrix()
    if gate.control is None:
        return embed_operator(base, gate.target, n_qubits)
    p0 = np.array([[1, 0], [0, 0]], dtype=complex)
    p1 = np.array([[0, 0], [0, 1]], dtype=complex)
    return embed_operator(p0, gate.control, n_qubits) + embed_operator(
        p1, gate.control, n_qubits
    ) @ embed_operator(base, gate.target, n_qubits)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Total unitary; the first gate in the list acts first."""
    u = np.eye(2**circuit.n_qubits, dtype=complex)
    for gate in circuit.gates:
        u = gate_unitary(gate, circuit.n_qubits) @ u
    return u


# ---------------------------------------------------------------------------
# Euler decompositions.

def zyz_euler(v: np.ndarray):
    """Angles (a, b, c) with v = Rz(a) Ry(b) Rz(c) for v in SU(2)."""
    b = 2.0 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    if abs(v[0, 0]) < 1e-12:
        a = 2.0 * np.angle(v[1, 0])
        c = 0.0
    elif abs(v[1, 0]) < 1e-12:
        a = -2.0 * np.angle(v[0, 0])
        c = 0.0
    else:
        half_sum = -np.angle(v[0, 0])
        half_diff = np.angle(v[1, 0])
        a = half_sum + half_diff
        c = half_sum - half_diff
    return float(a), float(b), float(c)


def zxz_euler(v: np.ndarray):
    """Angles (a, b, c) with v = Rz(a) Rx(b) Rz(c) for v in SU(2)."""
    b = 2.0 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    if abs(v[0, 0]) < 1e-12:
        a = 2.0 * (np.angle(v[1, 0]) + 0.5 * math.pi)
        c = 0.0
    elif abs(v[1, 0]) < 1e-12:
        a = -2.0 * np.angle(v[0, 0])
        c = 0.0
    else:
        half_sum = -np.angle(v[0, 0])
        half_diff = np.angle(v[1, 0]) + 0.5 * math.pi
        a = half_sum + half_diff
        c = half_sum - half_diff
    return float(a), float(b), float(c)


def su2_part(u: np.ndarray):
    """Split a 2x2 unitary into (phase, special-unitary part)."""
    u = np.asarray(u, dtype=complex)
    det = u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
    delta = 0.5 * np.angle(det)
    return float(delta), u * np.exp(-1j * delta)


def abc_decompose(u: np.ndarray):
    """Factors (a_mat, b_mat, c_mat, alpha) with ABC = 1 and
    e^{i alpha} A Z B Z C = u, for any 2x2 unitary u.

    Built from the standard Euler-angle construction in the Hadamard-rotated
    frame (where the Z conjugations act like X conjugations).
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not is_unitary(u):
        raise CircuitError("abc_decompose needs a 2x2 unitary")
    alpha, v = su2_part(u)
    v_t = HADAMARD @ v @ HADAMARD
    p, q, r = zyz_euler(v_t)
    a_t = rot_z(p) @ rot_y(q / 2.0)
    b_t = rot_y(-q / 2.0) @ rot_z(-(r + p) / 2.0)
    c_t = rot_z((r - p) / 2.0)
    a_mat = HADAMARD @ a_t @ HADAMARD
    b_mat = HADAMARD @ b_t @ HADAMARD
    c_mat = HADAMARD @ c_t @ HADAMARD
    return a_mat, b_mat, c_mat, alpha


# ---------------------------------------------------------------------------
# The two controlled-gate constructions.

def controlled_u_nn(u: np.ndarray) -> Circuit:
    """Controlled-u between two nuclei on a 3-qubit register (e, C1, C2).

    The electron shuttles the control value: the Hadamard-conjugated CZ
    pairs swap the control into the electron, a single electron-controlled
    u hits the target, and the sequence is undone.  The total equals
    1_e (x) controlled-u(C1 -> C2).
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not is_unitary(u):
        raise CircuitError("controlled_u_nn needs a 2x2 unitary")
    g = [
        Gate("x", target=1, control=0),
        Gate("h", target=0),
        Gate("z", target=1, control=0),
        Gate("h", target=0),
        Gate("u2", target=2, control=0, matrix=u),
        Gate("h", target=0),
        Gate("z", target=1, control=0),
        Gate("h", target=0),
        Gate("x", target=1, control=0),
    ]
    return Circuit(n_qubits=3, gates=tuple(g))


def controlled_u_electron(u: np.ndarray) -> Circuit:
    """Controlled-u with a nucleus as control and the electron as target,
    on a 2-qubit register (e, C), using only electron gates and
    electron-nucleus controlled gates.

    Sequence: C, CZ, B, CZ, A, X(e), CPhi, X(e), CPhi with the controlled
    phase carrying e^{i alpha} on the doubly-1 branch (angle 2*alpha in the
    Phi convention diag(1, e^{i angle/2})); this closes the phase exactly,
    with no extra single-qubit phase gate.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not is_unitary(u):
        raise CircuitError("controlled_u_electron needs a 2x2 unitary")
    a_mat, b_mat, c_mat, alpha = abc_decompose(u)
    g = [
        Gate("u2", target=0, matrix=c_mat),
        Gate("z", target=1, control=0),
        Gate("u2", target=0, matrix=b_mat),
        Gate("z", target=1, control=0),
        Gate("u2", target=0, matrix=a_mat),
        Gate("x", target=0),
        Gate("phase", target=1, control=0, alpha=2.0 * alpha),
        Gate("x", target=0),
        Gate("phase", target=1, control=0, alpha=2.0 * alpha),
    ]
    return Circuit(n_qubits=2, gates=tuple(g))


# ---------------------------------------------------------------------------
# Lowering to pulse schedules.

def _mw_segment(spec, angle, phase):
    """One resonant microwave pulse rotating the electron by ``angle``."""
    if spec.max_rabi_e <= 0:
        raise CircuitError("register needs a positive max_rabi_e to lower")
    duration = angle / spec.max_rabi_e
    return PulseSegment(
        duration=duration, mw_amp=spec.max_rabi_e, mw_phase=phase
    )


def _lower_electron_unitary(spec, u):
    """Segments realizing a 2x2 electron gate (up to global phase).

    z rotations are synthesized from pairs of equatorial pi pulses:
    R_{phi}(pi) R_0(pi) = -Rz(2 phi).
    """
    _, v = su2_part(u)
    a, b, c = zxz_euler(v)
    segs = []

    def add_rz(theta):
        theta = theta % (2.0 * math.pi)
        if abs(theta) < 1e-14 or abs(theta - 2.0 * math.pi) < 1e-14:
            return
        segs.append(_mw_segment(spec, math.pi, 0.0))
        segs.append(_mw_segment(spec, math.pi, theta / 2.0))

    add_rz(c)
    b = b % (2.0 * math.pi)
    if abs(b) > 1e-14:
        segs.append(_mw_segment(spec, b, 0.0))
    add_rz(a)
    return segs


def _lower_controlled_rotation(spec, j, v, rf_amp, t_clock):
    """Plain-gate block for a controlled SU(2) rotation on nucleus j.

    Returns (segments, branch_phase): the compiled block acts as
    branch_phase * v on the ms=1 branch of nucleus j (exact closed form).
    """
    a, b, c = zxz_euler(v)
    gate = GateSpec(
        target_nucleus=j - 1, euler_alpha=c, euler_beta=b, euler_gamma=a
    )
    seq = compile_plain_gate(spec, gate, rf_amp, T=t_clock)
    achieved = ideal_plain_gate_ms1(spec, seq, gate)
    overlap = np.trace(v.conj().T @ achieved) / 2.0
    if abs(abs(overlap) - 1.0) > 1e-6:
        raise CircuitError("compiled block does not realize the target")
    return list(seq.segments), np.angle(overlap)


def lower_to_pulses(
    circuit: Circuit,
    spec,
    t_clock: float,
    rf_amp: float = None,
) -> PulseSequence:
    """Lower a circuit to one concatenated pulse schedule.

    Supported gates: electron one-qubit gates, nucleus one-qubit gates
    (realized as two controlled blocks around electron pi pulses),
    electron-controlled nucleus gates (one clock block each), controlled
    gates targeting the electron (rewritten via the A-Z-B-Z-C construction)
    and nucleus-nucleus controlled gates (rewritten via the
    electron-shuttle construction).  ``t_clock`` must lie on the even
    Larmor-period grid so each block closes the undriven manifold.
    """
    if circuit.n_qubits != spec.n_nuclei + 1:
        raise CircuitError(
            f"circuit has {circuit.n_qubits} qubits but register has "
            f"{spec.n_nuclei + 1}"
        )
    if rf_amp is None:
        rf_amp = spec.max_rabi_rf
    if rf_amp <= 0:
        raise CircuitError("need a positive rf amplitude to lower")
    period = 2.0 * math.pi / spec.omega_larmor
    if abs(t_clock / (2 * period) - round(t_clock / (2 * period))) > 1e-9:
        raise CircuitError(
            "clock time must be an even multiple of the Larmor period"
        )
    segs = []

    def add_electron_phase(phi):
        """diag(1, e^{i phi}) on the electron, up to global phase."""
        phi = phi % (2.0 * math.pi)
        if abs(phi) < 1e-12 or abs(phi - 2.0 * math.pi) < 1e-12:
            return
        segs.extend(_lower_electron_unitary(spec, rot_z(phi)))

    def add_controlled(j, u):
        delta, v = su2_part(np.asarray(u, dtype=complex))
        block, branch_phase = _lower_controlled_rotation(
            spec, j, v, rf_amp, t_clock
        )
        segs.extend(block)
        add_electron_phase(delta - branch_phase)

    for gate in circuit.gates:
        base = gate.base_matrix()
        if gate.control is None:
            if gate.target == 0:
                segs.extend(_lower_electron_unitary(spec, base))
            else:
                # unconditional nuclear gate: controlled block, electron pi,
                # controlled block, electron pi
                _, v = su2_part(base)
                block, _ = _lower_controlled_rotation(
                    spec, gate.target, v, rf_amp, t_clock
                )
                segs.extend(block)
                segs.append(_mw_segment(spec, math.pi, 0.0))
                segs.extend(block)
                segs.append(_mw_segment(spec, math.pi, 0.0))
        elif gate.control == 0 and gate.target != 0:
            add_controlled(gate.target, base)
        elif gate.target == 0:
            sub = controlled_u_electron(base)
            remap = {0: 0, 1: gate.control}
            for g in sub.gates:
                tgt = remap[g.target]
                ctl = None if g.control is None else remap[g.control]
                inner = Gate(
                    g.kind, target=tgt, control=ctl, matrix=g.matrix,
                    alpha=g.alpha,
                )
                seq_part = lower_to_pulses(
                    Circuit(circuit.n_qubits, (inner,)), spec, t_clock, rf_amp
                )
                segs.extend(seq_part.segments)
        else:
            sub = controlled_u_nn(base)
            remap = {0: 0, 1: gate.control, 2: gate.target}
            for g in sub.gates:
                tgt = remap[g.target]
                ctl = None if g.control is None else remap[g.control]
                inner = Gate(
                    g.kind, target=tgt, control=ctl, matrix=g.matrix,
                    alpha=g.alpha,
                )
                seq_part = lower_to_pulses(
                    Circuit(circuit.n_qubits, (inner,)), spec, t_clock, rf_amp
                )
                segs.extend(seq_part.segments)
    return PulseSequence.from_segments(segs)


def logical_frame_map(spec) -> np.ndarray:
    """Unitary mapping physical lab amplitudes to logical (tilde) ones.

    The logical basis of nucleus j is its tilde frame; the electron basis is
    unchanged.  Conjugate a simulated lab propagator with this matrix before
    comparing against :func:`circuit_unitary`.
    """
    from .register import local_frame

    d_total = np.eye(1, dtype=complex)
    for j in range(spec.n_nuclei):
        d_total = np.kron(d_total, local_frame(spec, j).alignment())
    full = np.kron(ID2, d_total)
    return full


# ---------------------------------------------------------------------------
# Circuit files: "kind target [control=c] [alpha=x | matrix entries]".

def format_circuit(circuit: Circuit) -> str:
    lines = [f"qubits {circuit.n_qubits}"]
    for g in circuit.gates:
        parts = [g.kind, str(g.target)]
        if g.control is not None:
            parts.append(str(g.control))
        else:
            parts.append("-")
        if g.kind == "phase":
            parts.append(f"{g.alpha:.17g}")
        if g.kind == "u2":
            for entry in np.asarray(g.matrix).ravel():
                parts.append(f"{entry.real:.17g}")
                parts.append(f"{entry.imag:.17g}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    n_qubits = None
    gates = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n_qubits is None:
            if parts[0] != "qubits" or len(parts) != 2:
                raise CircuitError(
                    f"line {lineno}: expected 'qubits <n>' header"
                )
            n_qubits = int(parts[1])
            continue
        kind = parts[0]
        if kind not in GATE_KINDS:
            raise CircuitError(f"line {lineno}: unknown gate kind {kind!r}")
        if len(parts) < 3:
            raise CircuitError(f"line {lineno}: missing target/control fields")
        try:
            target = int(parts[1])
            control = None if parts[2] == "-" else int(parts[2])
            rest = parts[3:]
            alpha = None
            matrix = None
            if kind == "phase":
                if len(rest) != 1:
                    raise CircuitError(
                        f"line {lineno}: phase gate needs one angle"
                    )
                alpha = float(rest[0])
            elif kind == "u2":
                if len(rest) != 8:
                    raise CircuitError(
                        f"line {lineno}: u2 gate needs 8 real numbers"
                    )
                vals = [float(x) for x in rest]
                matrix = np.array(
                    [complex(vals[2 * i], vals[2 * i + 1]) for i in range(4)]
                ).reshape(2, 2)
            elif rest:
                raise CircuitError(f"line {lineno}: unexpected extra fields")
        except CircuitError:
            raise
        except ValueError as exc:
            raise CircuitError(f"line {lineno}: {exc}") from None
        try:
            gates.append(
                Gate(kind, target=target, control=control, matrix=matrix,
                     alpha=alpha)
            )
        except CircuitError as exc:
            raise CircuitError(f"line {lineno}: {exc}") from None
    if n_qubits is None:
        raise CircuitError("circuit file has no 'qubits' header")
    return Circuit(n_qubits=n_qubits, gates=tuple(gates))


def read_circuit(path) -> Circuit:
    with open(path) as fh:
        return parse_circuit(fh.read())


def write_circuit(path, circuit: Circuit) -> None:
    with open(path, "w") as fh:
        fh.write(format_circuit(circuit))
