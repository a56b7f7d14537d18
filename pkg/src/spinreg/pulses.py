"""Piecewise-constant pulse schedules and the analytic gate constructions.

Conventions
-----------
* A segment's rf field is ``rf_amp * cos(rf_carrier*(t - t_seg) + rf_phase)``
  along the lab x-axis, i.e. the carrier phase is referenced to the segment's
  own start time.  ``rf_amp`` is the lab cosine amplitude; the rotating-frame
  (nutation) amplitude seen by the addressed nucleus is
  ``kappa_j * rf_amp / 2``.
* ``rf_carrier == 0`` marks a static baseband field
  ``rf_amp * (cos(rf_phase) Ix + sin(rf_phase) Iy)`` (two quadrature coils);
  this is the segment type the numerical optimizer emits.
* Microwave segments drive the electron resonantly, so they are
  time-independent in the electron rotating frame:
  ``mw_amp/2 * (cos(mw_phase) sx + sin(mw_phase) sy)``.

The analytic single-nucleus gate writes an arbitrary target
``Rz~(gamma) Rx~(beta) Rz~(alpha)`` (tilde = local ms=1 frame) as one rf
pulse of duration beta/omega_bar plus an rf echo pair whose timing absorbs
the z-angles and refocuses the lab-frame precession at a fixed clock time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import rot_x, rot_z
from .register import LocalFrame, RegisterSpec, local_frame

TWO_PI = 2.0 * math.pi


class PulseError(ValueError):
    """Raised for invalid schedules or unsatisfiable timing constraints."""


@dataclass(frozen=True)
class PulseSegment:
    duration: float
    mw_amp: float = 0.0
    mw_phase: float = 0.0
    rf_amp: float = 0.0
    rf_phase: float = 0.0
    rf_carrier: float = 0.0

    def __post_init__(self):
        if self.duration < 0:
            raise PulseError(f"segment duration must be >= 0, got {self.duration}")
        if self.mw_amp < 0 or self.rf_amp < 0 or self.rf_carrier < 0:
            raise PulseError("amplitudes and carrier must be >= 0")


@dataclass(frozen=True)
class PulseSequence:
    segments: tuple
    total_time: float

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        total = sum(s.duration for s in segs)
        ref = max(abs(self.total_time), abs(total), 1e-300)
        if abs(total - self.total_time) > 1e-12 * ref:
            raise PulseError(
                f"total_time {self.total_time} != sum of durations {total}"
            )

    @classmethod
    def from_segments(cls, segments) -> "PulseSequence":
        segs = tuple(segments)
        return cls(segments=segs, total_time=sum(s.duration for s in segs))

    def __len__(self):
        return len(self.segments)

    def start_times(self):
        """Absolute start time of each segment."""
        starts = []
        t = 0.0
        for seg in self.segments:
            starts.append(t)
            t += seg.duration
        return starts


@dataclass(frozen=True)
class GateSpec:
    """Single-nucleus target Rz~(gamma) Rx~(beta) Rz~(alpha) in the local frame."""

    target_nucleus: int
    euler_alpha: float
    euler_beta: float
    euler_gamma: float

    def __post_init__(self):
        for name in ("euler_alpha", "euler_beta", "euler_gamma"):
            if not math.isfinite(getattr(self, name)):
                raise PulseError(f"{name} must be finite")
        if self.target_nucleus < 0:
            raise PulseError("target nucleus index must be >= 0")

    def target_unitary(self) -> np.ndarray:
        return (
            rot_z(self.euler_gamma)
            @ rot_x(self.euler_beta)
            @ rot_z(self.euler_alpha)
        )


def reduced_rabi(frame: LocalFrame, omega_rf: float):
    """Reduced nutation rate of a tilted nucleus driven along lab x.

    ``omega_rf`` is the rotating-frame Rabi amplitude (hyperfine-enhanced,
    half the lab cosine amplitude).  Returns (omega_bar, lam).
    """
    if omega_rf < 0:
        raise PulseError("rf amplitude must be >= 0")
    return omega_rf * frame.omega_bar_scale, frame.lam


def ul_propagator(
    frame: LocalFrame, omega_rf: float, t_p: float, psi: float
) -> np.ndarray:
    """Closed-form lab propagator of one resonant rf pulse, tilde-frame 2x2.

    Three-factor form for a pulse of duration t_p starting at t = 0 with
    carrier phase psi:

        exp(-i[w t_p - (lam-psi)] sz/2) exp(-i wbar t_p sx/2)
            exp(-i (lam-psi) sz/2)
    """
    if t_p < 0:
        raise PulseError("pulse time must be >= 0")
    omega_bar, lam = reduced_rabi(frame, omega_rf)
    w = frame.omega1
    return (
        rot_z(w * t_p - (lam - psi))
        @ rot_x(omega_bar * t_p)
        @ rot_z(lam - psi)
    )


def min_clock_time(frames, omega_rf: float) -> float:
    """Minimum common gate duration 4 pi max_j(1/omega_bar_j + 1/omega1_j)."""
    frames = list(frames)
    if not frames:
        raise PulseError("need at least one local frame")
    if omega_rf <= 0:
        raise PulseError("rf amplitude must be positive")
    worst = 0.0
    for f in frames:
        omega_bar, _ = reduced_rabi(f, omega_rf)
        if omega_bar == 0.0:
            raise PulseError(
                "nucleus with zero reduced Rabi frequency is unreachable"
            )
        worst = max(worst, 1.0 / omega_bar + 1.0 / f.omega1)
    return 4.0 * math.pi * worst


def suggest_clock_time(
    spec: RegisterSpec, omega_rf: float, scheme: str = "plain"
) -> float:
    """Smallest valid clock time rounded up to a full-revival grid.

    The ms=0 manifold precesses at the bare Larmor frequency; choosing the
    clock on the grid below makes the undriven manifold return exactly to
    the identity, so compiled gates are clean controlled gates:

    * plain: even multiples of the Larmor period,
    * decoupled: multiples of eight Larmor periods (each quarter-cycle
      window must close, with even parity).
    """
    frames = [local_frame(spec, j) for j in range(spec.n_nuclei)]
    t_min = min_clock_time(frames, omega_rf)
    # The analytic schedules also need room for a worst-case (beta -> 2 pi)
    # pulse plus the echo pulses in each free interval.
    worst = 0.0
    for f in frames:
        omega_bar, _ = reduced_rabi(f, omega_rf)
        if scheme == "plain":
            need = 6.0 * math.pi / omega_bar + 2.0 * math.pi / f.omega1
        else:
            # eight intervals, each able to hold the main pulse and half an
            # rf pi, plus the timing corrections
            need = 20.0 * math.pi / omega_bar + 4.0 * math.pi / f.omega1
        worst = max(worst, need)
    t_min = max(t_min, worst)
    period = TWO_PI / spec.omega_larmor
    grid = 2.0 * period if scheme == "plain" else 8.0 * period
    k = max(1, math.ceil(t_min / grid - 1e-12))
    return k * grid


def _wrap_half(angle: float, period: float) -> float:
    """Wrap ``angle`` into [-period/2, period/2)."""
    return (angle + period / 2.0) % period - period / 2.0


def _enhanced_rabi(spec: RegisterSpec, j: int, rf_amp: float) -> float:
    """Rotating-frame Rabi amplitude for nucleus j from a lab cosine amp."""
    return spec.enhancement[j] * rf_amp / 2.0


def compile_plain_gate(
    spec: RegisterSpec,
    gate: GateSpec,
    rf_amp: float,
    t_pi: float = None,
    T: float = None,
) -> PulseSequence:
    """Rf-only schedule for one conditional nuclear gate at clock time T.

    Layout: [rf pulse t_p][rf pi][delay t1][rf pi][delay t2], all at the
    target's ms=1 resonance.  With pulse-start-referenced carrier phases the
    working assignment is

        psi_1 = lam - alpha,  psi_pi = pi - lam,
        t1 = T/2 - t_pi - (alpha+gamma)/(2 w)   (mod pi/w),

    locked in by the simulation tests.  ``rf_amp`` is the lab cosine
    amplitude; beta is realized through the reduced Rabi frequency.
    """
    j = gate.target_nucleus
    if j >= spec.n_nuclei:
        raise PulseError(f"target nucleus {j} out of range")
    if rf_amp <= 0:
        raise PulseError("rf amplitude must be positive")
    frame = local_frame(spec, j)
    omega_rot = _enhanced_rabi(spec, j, rf_amp)
    omega_bar, lam = reduced_rabi(frame, omega_rot)
    w = frame.omega1

    alpha = gate.euler_alpha
    beta = gate.euler_beta % (2.0 * math.pi)
    gamma = gate.euler_gamma
    t_p = beta / omega_bar
    if t_pi is None:
        t_pi = math.pi / omega_bar
    if T is None:
        T = suggest_clock_time(spec, omega_rot, "plain")

    psi_1 = lam - alpha
    psi_pi = math.pi - lam
    shift = _wrap_half(0.5 * (alpha + gamma), math.pi) / w
    t1 = T / 2.0 - t_pi - shift
    t2 = T - t_p - 2.0 * t_pi - t1
    if t1 < 0 or t2 < 0:
        raise PulseError(
            f"clock time {T} too short: delays t1={t1}, t2={t2} "
            "(negative delay; increase T)"
        )

    def rf(duration, phase):
        return PulseSegment(
            duration=duration, rf_amp=rf_amp, rf_phase=phase, rf_carrier=w
        )

    segments = [
        rf(t_p, psi_1),
        rf(t_pi, psi_pi),
        PulseSegment(duration=t1),
        rf(t_pi, psi_pi),
        PulseSegment(duration=t2),
    ]
    return PulseSequence(segments=tuple(segments), total_time=T)


def compile_decoupled_gate(
    spec: RegisterSpec,
    gate: GateSpec,
    rf_amp: float,
    t_pi_rf: float = None,
    t_pi_mw: float = None,
    T: float = None,
) -> PulseSequence:
    """Nuclear gate interleaved with an electron echo train.

    Eight free intervals separated by four microwave pi pulses (after
    intervals 1, 3, 5, 7) and three further rf pi pulses (after intervals
    2, 4 and 6; a fourth rf pi directly follows the initial rf pulse).
    Each electron branch then spends T/2 in either manifold, refocusing a
    quasi-static electron detuning, while each branch also sees exactly one
    echoed rf pi pair.  With tau = T/8 - t_pi_rf/2 the intervals are

        tau-tp_phi, tau, tau, tau-tp_phi, tau+tp_phi, tau, tau,
        tau+tp_phi-t_p,      tp_phi = (alpha+gamma)/(4 w)  (mod pi/(2w)),

    with half of each microwave pulse duration borrowed from the adjacent
    intervals so the clock time stays exactly T.
    """
    j = gate.target_nucleus
    if j >= spec.n_nuclei:
        raise PulseError(f"target nucleus {j} out of range")
    if rf_amp <= 0:
        raise PulseError("rf amplitude must be positive")
    frame = local_frame(spec, j)
    omega_rot = _enhanced_rabi(spec, j, rf_amp)
    omega_bar, lam = reduced_rabi(frame, omega_rot)
    w = frame.omega1

    alpha = gate.euler_alpha
    beta = gate.euler_beta % (2.0 * math.pi)
    gamma = gate.euler_gamma
    t_p = beta / omega_bar
    if t_pi_rf is None:
        t_pi_rf = math.pi / omega_bar
    if t_pi_mw is None:
        if spec.max_rabi_e <= 0:
            raise PulseError("need t_pi_mw or a positive max_rabi_e")
        t_pi_mw = math.pi / spec.max_rabi_e
    if T is None:
        T = suggest_clock_time(spec, omega_rot, "decoupled")

    tau = T / 8.0 - t_pi_rf / 2.0
    t_phi = _wrap_half(0.25 * (alpha + gamma), math.pi / 2.0) / w
    gaps = [
        tau - t_phi,
        tau,
        tau,
        tau - t_phi,
        tau + t_phi,
        tau,
        tau,
        tau + t_phi - t_p,
    ]
    half_mw = t_pi_mw / 2.0
    delays = [g - half_mw for g in gaps]
    if min(delays) < 0:
        raise PulseError(
            f"clock time {T} too short for the decoupled schedule "
            f"(min interval {min(delays)})"
        )

    psi_1 = lam - alpha
    psi_pi = math.pi - lam
    mw_amp = math.pi / t_pi_mw
    if spec.max_rabi_e and mw_amp > spec.max_rabi_e * (1 + 1e-9):
        raise PulseError("t_pi_mw requires mw amplitude above max_rabi_e")

    def rf(duration, phase):
        return PulseSegment(
            duration=duration, rf_amp=rf_amp, rf_phase=phase, rf_carrier=w
        )

    def mw_pi():
        return PulseSegment(duration=t_pi_mw, mw_amp=mw_amp, mw_phase=0.0)

    def delay(duration):
        return PulseSegment(duration=duration)

    segments = [rf(t_p, psi_1), rf(t_pi_rf, psi_pi)]
    pulse_after = {
        0: mw_pi,
        1: lambda: rf(t_pi_rf, psi_pi),
        2: mw_pi,
        3: lambda: rf(t_pi_rf, psi_pi),
        4: mw_pi,
        5: lambda: rf(t_pi_rf, psi_pi),
        6: mw_pi,
    }
    for i, d in enumerate(delays):
        segments.append(delay(d))
        if i in pulse_after:
            segments.append(pulse_after[i]())
    seq = PulseSequence.from_segments(segments)
    if abs(seq.total_time - T) > 1e-9 * T:
        raise PulseError("internal timing bookkeeping error")
    return PulseSequence(segments=seq.segments, total_time=T)


def ideal_plain_gate_ms1(
    spec: RegisterSpec, seq: PulseSequence, gate: GateSpec
) -> np.ndarray:
    """Closed-form ms=1 tilde-frame propagator of an rf-only schedule.

    Composes the analytic single-pulse propagators (with the correct
    absolute-time carrier phases) and free precession; used as the fast
    cross-check against the numerical backends.
    """
    frame = local_frame(spec, gate.target_nucleus)
    w = frame.omega1
    u = np.eye(2, dtype=complex)
    t = 0.0
    for seg in seq.segments:
        if seg.mw_amp:
            raise PulseError("analytic composition handles rf-only schedules")
        if seg.rf_amp:
            omega_rot = _enhanced_rabi(spec, gate.target_nucleus, seg.rf_amp)
            psi_clock = seg.rf_phase - seg.rf_carrier * t
            u = (
                rot_z(w * (t + seg.duration))
                @ _rot_frame_pulse(frame, omega_rot, seg.duration, psi_clock)
                @ rot_z(-w * t)
            ) @ u
        else:
            u = rot_z(w * seg.duration) @ u
        t += seg.duration
    return u


def _rot_frame_pulse(frame, omega_rot, duration, psi_clock):
    """Rotating-frame factor Z(-(lam-psi)) X(wbar t) Z(lam-psi)."""
    omega_bar, lam = reduced_rabi(frame, omega_rot)
    ang = lam - psi_clock
    return rot_z(-ang) @ rot_x(omega_bar * duration) @ rot_z(ang)


# ---------------------------------------------------------------------------
# Schedule files: line-oriented text, one segment per line.

SCHEDULE_HEADER = (
    "# duration_us mw_amp_MHz mw_phase_rad rf_amp_MHz rf_phase_rad rf_carrier_MHz"
)
_US = 1e-6
_MHZ = TWO_PI * 1e6


def format_schedule(seq: PulseSequence) -> str:
    lines = [SCHEDULE_HEADER]
    for s in seq.segments:
        cols = (
            s.duration / _US,
            s.mw_amp / _MHZ,
            s.mw_phase,
            s.rf_amp / _MHZ,
            s.rf_phase,
            s.rf_carrier / _MHZ,
        )
        lines.append(" ".join(f"{c:.17g}" for c in cols))
    return "\n".join(lines) + "\n"


def write_schedule(path, seq: PulseSequence) -> None:
    with open(path, "w") as fh:
        fh.write(format_schedule(seq))


def parse_schedule(text: str) -> PulseSequence:
    segments = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 6:
            raise PulseError(
                f"schedule line {lineno}: expected 6 columns, got {len(parts)}"
            )
        try:
            vals = [float(p) for p in parts]
        except ValueError as exc:
            raise PulseError(f"schedule line {lineno}: {exc}") from None
        segments.append(
            PulseSegment(
                duration=vals[0] * _US,
                mw_amp=vals[1] * _MHZ,
                mw_phase=vals[2],
                rf_amp=vals[3] * _MHZ,
                rf_phase=vals[4],
                rf_carrier=vals[5] * _MHZ,
            )
        )
    if not segments:
        raise PulseError("schedule file contains no segments")
    return PulseSequence.from_segments(segments)


def read_schedule(path) -> PulseSequence:
    with open(path) as fh:
        return parse_schedule(fh.read())
