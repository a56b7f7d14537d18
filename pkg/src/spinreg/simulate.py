"""Schedule simulation: exact lab-frame integration and the analytic backend.

Both backends work in the electron rotating frame, so microwave segments are
time-independent and delays are exact single exponentials.  They differ only
in how an oscillating rf carrier is treated:

* ``lab``: the linearly polarized cosine drive is kept explicitly and
  integrated with a fourth-order (two-point Gauss / Magnus) commutator
  scheme, sub-stepped at ``steps_per_period`` points per carrier period.
  All nuclei feel the coil; off-resonance and counter-rotating effects are
  included.
* ``rwa``: per-manifold rotating-frame treatment.  The nucleus addressed by
  the carrier gets the static co-rotating half-amplitude drive in its ms=1
  frame (an exact closed form per segment); the drive on all other spins and
  on the ms=0 manifold is dropped as off-resonant.

Electron dephasing enters as a detuning of the ms=1 manifold: a static value
plus an optional externally sampled piecewise-constant trajectory.
"""

from __future__ import annotations

import math

import numpy as np

from .linalg import expm_hermitian, kron, matrix_product, P0, P1
from .pulses import PulseSequence, PulseError
from .register import (
    RegisterSpec,
    corotating_drive,
    detuning_operator,
    local_frame,
    manifold_hamiltonians,
    mw_drive_operator,
    rf_drive_operator,
    rf_drive_operator_y,
)

_SQRT3 = math.sqrt(3.0)


class SimulationError(ValueError):
    pass


class _Workspace:
    """Per-run cache of operators derived from the register."""

    def __init__(self, spec: RegisterSpec):
        self.spec = spec
        self.n = spec.n_nuclei
        self.dim_nuc = 2**self.n
        self.h0, self.h1 = manifold_hamiltonians(spec)
        self.drift = kron(P0, self.h0) + kron(P1, self.h1)
        self.detune_op = detuning_operator(spec)
        self.rf_x = rf_drive_operator(spec)
        self.rf_y = rf_drive_operator_y(spec)
        self.frames = [local_frame(spec, j) for j in range(self.n)]
        self._axis_ops = {}

    def mw_op(self, phase):
        return mw_drive_operator(self.spec, phase)

    def addressed(self, carrier):
        return int(
            np.argmin([abs(f.omega1 - carrier) for f in self.frames])
        )

    def axis_op(self, j):
        """n_hat_j . I_j on the nuclear space."""
        if j not in self._axis_ops:
            from .register import _nuclear_operator

            self._axis_ops[j] = _nuclear_operator(
                self.frames[j].axis, j, self.n
            )
        return self._axis_ops[j]


def _iter_noise_pieces(t0, duration, static_detuning, trajectory):
    """Split [t0, t0+duration) at trajectory sample boundaries.

    ``trajectory`` is None or a pair (dt, values) with values[k] holding on
    [k dt, (k+1) dt).  Yields (start, length, detuning).
    """
    if trajectory is None or duration == 0.0:
        yield t0, duration, static_detuning
        return
    dt, values = trajectory
    if dt <= 0:
        raise SimulationError("trajectory dt must be positive")
    values = np.asarray(values, dtype=float)
    end = t0 + duration
    if end > dt * len(values) * (1 + 1e-12) + 1e-30:
        raise SimulationError(
            "noise trajectory shorter than the pulse sequence"
        )
    t = t0
    while t < end - 1e-30:
        k = min(int(t / dt + 1e-12), len(values) - 1)
        seg_end = min((k + 1) * dt, end)
        yield t, seg_end - t, static_detuning + values[k]
        t = seg_end


def _ms1_pulse_block(ws, seg, seg_start, t_start, length, delta):
    """Exact rwa propagator of the ms=1 nuclear block for an rf piece.

    Works in the frame co-rotating with the carrier about the addressed
    nucleus's quantization axis; any zz coupling involving that nucleus is
    kept through its secular projection onto the axis.  ``seg_start`` is the
    absolute segment start (the carrier phase reference), ``t_start`` the
    start of this constant-detuning piece.
    """
    spec = ws.spec
    j = ws.addressed(seg.rf_carrier)
    frame = ws.frames[j]
    g_op = ws.axis_op(j)
    # Remove the full j-coupling and re-add its axis-secular part.
    h1 = ws.h1.copy()
    n = ws.n
    if np.any(spec.dipolar):
        from .linalg import SZ, embed_operator

        cos_t = math.cos(frame.theta1)
        for k in range(n):
            if k == j:
                continue
            b = spec.dipolar[min(j, k), max(j, k)]
            if b:
                izk = embed_operator(0.5 * SZ, k, n)
                izj = embed_operator(0.5 * SZ, j, n)
                h1 = h1 - b * (izj @ izk) + b * cos_t * (g_op @ izk)
    omega_rot = spec.enhancement[j] * seg.rf_amp / 2.0
    psi_clock = seg.rf_phase - seg.rf_carrier * seg_start
    drive = corotating_drive(frame, omega_rot, psi_clock, j, n)
    h_rot = h1 - seg.rf_carrier * g_op + drive
    u_rot = expm_hermitian(h_rot, length)
    # Frame V(t) = exp(+i w_c t G): U_lab = V(t2)^dag exp(-i H_rot dt) V(t1).
    wrap_out = expm_hermitian(g_op, seg.rf_carrier * (t_start + length))
    wrap_in = expm_hermitian(g_op, -seg.rf_carrier * t_start)
    phase = np.exp(-1j * delta * length)
    return phase * (wrap_out @ u_rot @ wrap_in)


def _rwa_segment(ws, seg, seg_start, static_detuning, trajectory):
    ops = []
    for t0, length, delta in _iter_noise_pieces(
        seg_start, seg.duration, static_detuning, trajectory
    ):
        if length == 0.0:
            continue
        if seg.rf_amp and seg.rf_carrier:
            if seg.mw_amp:
                raise SimulationError(
                    "rwa backend cannot mix a microwave drive with a "
                    "carrier rf segment; use a baseband (carrier 0) segment"
                )
            u0 = expm_hermitian(ws.h0, length)
            u1 = _ms1_pulse_block(ws, seg, seg_start, t0, length, delta)
            ops.append(kron(P0, u0) + kron(P1, u1))
        else:
            h = ws.drift + delta * ws.detune_op
            if seg.mw_amp:
                h = h + seg.mw_amp * ws.mw_op(seg.mw_phase)
            if seg.rf_amp:  # baseband static field
                h = h + seg.rf_amp * (
                    math.cos(seg.rf_phase) * ws.rf_x
                    + math.sin(seg.rf_phase) * ws.rf_y
                )
            ops.append(expm_hermitian(h, length))
    return ops


def _lab_segment(ws, seg, seg_start, static_detuning, trajectory, steps_per_period):
    ops = []
    for t0, length, delta in _iter_noise_pieces(
        seg_start, seg.duration, static_detuning, trajectory
    ):
        if length == 0.0:
            continue
        h_static = ws.drift + delta * ws.detune_op
        if seg.mw_amp:
            h_static = h_static + seg.mw_amp * ws.mw_op(seg.mw_phase)
        if seg.rf_amp and seg.rf_carrier == 0.0:
            h_static = h_static + seg.rf_amp * (
                math.cos(seg.rf_phase) * ws.rf_x
                + math.sin(seg.rf_phase) * ws.rf_y
            )
        if not (seg.rf_amp and seg.rf_carrier):
            ops.append(expm_hermitian(h_static, length))
            continue
        period = 2.0 * math.pi / seg.rf_carrier
        dt_max = period / steps_per_period
        n_sub = max(1, int(math.ceil(length / dt_max - 1e-12)))
        dt = length / n_sub
        # Gauss-Legendre nodes of each sub-step, relative to segment start.
        rel0 = t0 - seg_start
        k = np.arange(n_sub)
        c1 = rel0 + (k + 0.5 - _SQRT3 / 6.0) * dt
        c2 = rel0 + (k + 0.5 + _SQRT3 / 6.0) * dt
        f1 = seg.rf_amp * np.cos(seg.rf_carrier * c1 + seg.rf_phase)
        f2 = seg.rf_amp * np.cos(seg.rf_carrier * c2 + seg.rf_phase)
        comm = 1j * (h_static @ ws.rf_x - ws.rf_x @ h_static)
        a = 0.5 * (f1 + f2) * dt
        b = (_SQRT3 * dt * dt / 12.0) * (f2 - f1)
        mats = (
            dt * h_static
            + a[:, None, None] * ws.rf_x
            + b[:, None, None] * comm
        )
        w, v = np.linalg.eigh(mats)
        phases = np.exp(-1j * w)
        steps = np.matmul(v * phases[:, None, :], np.conj(np.swapaxes(v, -1, -2)))
        ops.append(matrix_product(list(steps)))
    return ops


def simulate_sequence(
    spec: RegisterSpec,
    seq: PulseSequence,
    backend: str = "rwa",
    static_detuning: float = 0.0,
    ou_trajectory=None,
    steps_per_period: int = 20,
) -> np.ndarray:
    """Total propagator of a schedule on the full register space.

    ``ou_trajectory`` is an optional pair (dt, values) of a piecewise-constant
    detuning path sampled from the sequence start; it must cover the whole
    sequence.  ``steps_per_period`` controls the lab-backend sub-stepping
    (at least 20 sub-steps per carrier period).
    """
    if backend not in ("lab", "rwa"):
        raise SimulationError(f"unknown backend {backend!r}")
    if backend == "lab" and steps_per_period < 20:
        raise SimulationError("lab backend requires >= 20 steps per period")
    ws = _Workspace(spec)
    ops = []
    t = 0.0
    for seg in seq.segments:
        if seg.duration == 0.0:
            t += 0.0
            continue
        if backend == "rwa":
            ops.extend(_rwa_segment(ws, seg, t, static_detuning, ou_trajectory))
        else:
            ops.extend(
                _lab_segment(
                    ws, seg, t, static_detuning, ou_trajectory, steps_per_period
                )
            )
        t += seg.duration
    if not ops:
        return np.eye(spec.dim, dtype=complex)
    return matrix_product(ops)


def ms0_block(u: np.ndarray) -> np.ndarray:
    half = u.shape[0] // 2
    return u[:half, :half]


def ms1_block(u: np.ndarray) -> np.ndarray:
    half = u.shape[0] // 2
    return u[half:, half:]


def tilde_frame_gate(spec: RegisterSpec, j: int, u_block: np.ndarray):
    """Express a single-nucleus ms=1 block in the local (tilde) frame."""
    if u_block.shape != (2, 2):
        raise SimulationError("tilde_frame_gate expects a 2x2 block")
    d = local_frame(spec, j).alignment()
    return d.conj().T @ u_block @ d


def electron_coherence(u: np.ndarray) -> complex:
    """<0|rho_e|1> after applying ``u`` to |+> (x) maximally mixed nuclei."""
    half = u.shape[0] // 2
    u00, u01 = u[:half, :half], u[:half, half:]
    u10, u11 = u[half:, :half], u[half:, half:]
    return complex(
        np.trace((u00 + u01) @ (u10 + u11).conj().T) / (2.0 * 2.0 * half)
    )


def coherence_recovery(u_noisy, u_reference) -> float:
    """Fraction of the reference electron coherence recovered, with phase."""
    c_ref = electron_coherence(u_reference)
    c = electron_coherence(u_noisy)
    if abs(c_ref) == 0.0:
        raise SimulationError("reference evolution has no electron coherence")
    return float((c * np.conj(c_ref)).real / abs(c_ref) ** 2)
