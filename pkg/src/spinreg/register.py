"""Physical register model: one electron qubit hyperfine-coupled to nuclei.

The electron is a pseudo-spin {ms=0, ms=1} (other Zeeman levels are pushed
away by the static field and only enter through the frequency-window check).
All frequencies are angular (rad/s); nuclear spin operators are sigma/2.

Drift Hamiltonian, in the electron rotating frame and with the electron as
the leftmost tensor factor:

    H = P0 (x) (omega_L sum_j Iz_j) + P1 (x) (sum_j w1_j . I_j)
        + 1 (x) sum_{j<k} b_jk Iz_j Iz_k

where w1_j = A_j + omega_L z is the effective field seen by nucleus j when
ms=1 (hyperfine plus bare Larmor, g-tensor enhancement folded into A_j).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    ID2,
    P0,
    P1,
    SX,
    SY,
    SZ,
    LinalgError,
    embed_operator,
    kron,
)


class RegisterError(ValueError):
    """Raised for inconsistent register specifications."""


@dataclass(frozen=True)
class LocalFrame:
    """Quantization data of one nucleus in the ms=1 manifold.

    omega1: effective precession frequency |A + omega_L z| (rad/s)
    theta1, phi1: polar/azimuthal angles of the quantization axis
    lam: phase angle with tan(lam) = tan(phi1)/cos(theta1), branch
        atan2(sin phi1, cos phi1 cos theta1) so it is continuous and
        reduces to phi1 at theta1 = 0
    omega_bar_scale: reduced-Rabi factor sqrt(cos^2 phi1 cos^2 theta1
        + sin^2 phi1) in [0, 1]
    """

    omega1: float
    theta1: float
    phi1: float
    lam: float
    omega_bar_scale: float

    @property
    def axis(self) -> np.ndarray:
        """Unit quantization axis (z-tilde) in lab coordinates."""
        st, ct = np.sin(self.theta1), np.cos(self.theta1)
        return np.array(
            [st * np.cos(self.phi1), st * np.sin(self.phi1), ct]
        )

    @property
    def x_axis(self) -> np.ndarray:
        """Unit x-tilde axis in lab coordinates."""
        ct, st = np.cos(self.theta1), np.sin(self.theta1)
        return np.array(
            [ct * np.cos(self.phi1), ct * np.sin(self.phi1), -st]
        )

    @property
    def y_axis(self) -> np.ndarray:
        """Unit y-tilde axis in lab coordinates."""
        return np.array([-np.sin(self.phi1), np.cos(self.phi1), 0.0])

    def alignment(self) -> np.ndarray:
        """SU(2) rotation D with D sz D^dag = axis . sigma.

        Maps tilde-frame matrices to lab-frame ones: U_lab = D U_tilde D^dag.
        """
        def rz(a):
            return np.array(
                [[np.exp(-0.5j * a), 0], [0, np.exp(0.5j * a)]], dtype=complex
            )

        def ry(a):
            c, s = np.cos(a / 2), np.sin(a / 2)
            return np.array([[c, -s], [s, c]], dtype=complex)

        return rz(self.phi1) @ ry(self.theta1)


@dataclass(frozen=True)
class RegisterSpec:
    """Static description of the register and its control-power limits.

    hyperfine: (n, 3) array of per-nucleus hyperfine vectors A_j in rad/s
        (enhancement effects folded in by the user).
    enhancement: per-nucleus rf Rabi enhancement kappa_j active when ms=1.
    dipolar: symmetric (n, n) matrix of secular zz couplings b_jk in rad/s.
    delta_e_e: Zeeman gap to the spectator ms=-1 level (rad/s), used only
        by the frequency-window check.
    max_rabi_e / max_rabi_rf: control amplitude ceilings in rad/s.
    """

    omega_larmor: float
    hyperfine: np.ndarray
    enhancement: np.ndarray
    dipolar: np.ndarray
    delta_e_e: float = 0.0
    max_rabi_e: float = 0.0
    max_rabi_rf: float = 0.0
    omega_max: float = field(default=0.0)

    def __post_init__(self):
        hf = np.atleast_2d(np.asarray(self.hyperfine, dtype=float))
        if hf.shape[1] != 3:
            raise RegisterError("hyperfine must be an (n, 3) array")
        n = hf.shape[0]
        if not 1 <= n <= 6:
            raise RegisterError(f"register supports 1..6 nuclei, got {n}")
        enh = np.asarray(self.enhancement, dtype=float)
        if enh.shape != (n,):
            raise RegisterError("enhancement must have one entry per nucleus")
        if np.any(enh < 1.0):
            raise RegisterError("enhancements must be >= 1")
        dip = np.asarray(self.dipolar, dtype=float)
        if dip.shape != (n, n):
            raise RegisterError("dipolar must be an (n, n) matrix")
        if np.any(np.abs(np.diag(dip)) > 0):
            raise RegisterError("dipolar matrix must have zero diagonal")
        if np.max(np.abs(dip - dip.T)) > 0:
            raise RegisterError("dipolar matrix must be symmetric")
        if self.omega_larmor <= 0:
            raise RegisterError("omega_larmor must be positive")
        object.__setattr__(self, "hyperfine", hf)
        object.__setattr__(self, "enhancement", enh)
        object.__setattr__(self, "dipolar", dip)
        w1 = hf + np.array([0.0, 0.0, self.omega_larmor])
        omega_max = float(np.max(np.linalg.norm(w1, axis=1)))
        if self.omega_max:
            if not np.isclose(self.omega_max, omega_max, rtol=1e-9):
                raise RegisterError(
                    "omega_max inconsistent with hyperfine couplings: "
                    f"given {self.omega_max}, computed {omega_max}"
                )
        object.__setattr__(self, "omega_max", omega_max)

    @property
    def n_nuclei(self) -> int:
        return self.hyperfine.shape[0]

    @property
    def dim(self) -> int:
        return 2 ** (self.n_nuclei + 1)


def make_register(
    omega_larmor,
    hyperfine,
    enhancement=None,
    dipolar=None,
    delta_e_e=0.0,
    max_rabi_e=0.0,
    max_rabi_rf=0.0,
):
    """Convenience constructor with default enhancements and zero dipolar."""
    hf = np.atleast_2d(np.asarray(hyperfine, dtype=float))
    n = hf.shape[0]
    if enhancement is None:
        enhancement = np.ones(n)
    if dipolar is None:
        dipolar = np.zeros((n, n))
    return RegisterSpec(
        omega_larmor=float(omega_larmor),
        hyperfine=hf,
        enhancement=np.asarray(enhancement, dtype=float),
        dipolar=np.asarray(dipolar, dtype=float),
        delta_e_e=float(delta_e_e),
        max_rabi_e=float(max_rabi_e),
        max_rabi_rf=float(max_rabi_rf),
    )


def local_frame(spec: RegisterSpec, j: int) -> LocalFrame:
    """ms=1 quantization data for nucleus j: w1 = A_j + omega_L z."""
    if not 0 <= j < spec.n_nuclei:
        raise RegisterError(f"nucleus index {j} out of range")
    w1 = spec.hyperfine[j] + np.array([0.0, 0.0, spec.omega_larmor])
    omega1 = float(np.linalg.norm(w1))
    if omega1 == 0.0:
        raise RegisterError(f"degenerate ms=1 axis for nucleus {j}")
    theta1 = float(np.arccos(np.clip(w1[2] / omega1, -1.0, 1.0)))
    phi1 = float(np.arctan2(w1[1], w1[0])) if (w1[0] or w1[1]) else 0.0
    lam = float(np.arctan2(np.sin(phi1), np.cos(phi1) * np.cos(theta1)))
    scale = float(
        np.sqrt(
            (np.cos(phi1) * np.cos(theta1)) ** 2 + np.sin(phi1) ** 2
        )
    )
    return LocalFrame(
        omega1=omega1,
        theta1=theta1,
        phi1=phi1,
        lam=lam,
        omega_bar_scale=scale,
    )


def _nuclear_operator(vec_or_axis, j: int, n: int) -> np.ndarray:
    """sum of components: (v . I_j) on the n-nucleus space (I = sigma/2)."""
    vx, vy, vz = vec_or_axis
    op = 0.5 * (vx * SX + vy * SY + vz * SZ)
    return embed_operator(op, j, n)


def nuclear_iz_total(n: int) -> np.ndarray:
    return sum(embed_operator(0.5 * SZ, j, n) for j in range(n))


def dipolar_hamiltonian(spec: RegisterSpec) -> np.ndarray:
    """sum_{j<k} b_jk Iz_j Iz_k on the nuclear space."""
    n = spec.n_nuclei
    h = np.zeros((2**n, 2**n), dtype=complex)
    for j in range(n):
        for k in range(j + 1, n):
            b = spec.dipolar[j, k]
            if b:
                h += b * (
                    embed_operator(0.5 * SZ, j, n)
                    @ embed_operator(0.5 * SZ, k, n)
                )
    return h


def manifold_hamiltonians(spec: RegisterSpec):
    """Nuclear-space drift blocks (h0, h1) for ms=0 and ms=1.

    The dipolar part is common to both blocks.
    """
    n = spec.n_nuclei
    hdip = dipolar_hamiltonian(spec)
    h0 = spec.omega_larmor * nuclear_iz_total(n) + hdip
    h1 = np.zeros_like(h0)
    for j in range(n):
        w1 = spec.hyperfine[j] + np.array([0.0, 0.0, spec.omega_larmor])
        h1 = h1 + _nuclear_operator(w1, j, n)
    h1 = h1 + hdip
    return h0, h1


def drift_hamiltonian(spec: RegisterSpec) -> np.ndarray:
    """Full drift on the 2^(n+1)-dimensional register space."""
    h0, h1 = manifold_hamiltonians(spec)
    return kron(P0, h0) + kron(P1, h1)


def rf_drive_operator(spec: RegisterSpec) -> np.ndarray:
    """Lab rf coupling operator: sum_j kappa_j^(ms) Ix_j, enhanced when ms=1."""
    n = spec.n_nuclei
    bare = sum(embed_operator(0.5 * SX, j, n) for j in range(n))
    enhanced = sum(
        spec.enhancement[j] * embed_operator(0.5 * SX, j, n) for j in range(n)
    )
    return kron(P0, bare) + kron(P1, enhanced)


def rf_drive_operator_y(spec: RegisterSpec) -> np.ndarray:
    """Quadrature partner of :func:`rf_drive_operator` (Iy instead of Ix)."""
    n = spec.n_nuclei
    bare = sum(embed_operator(0.5 * SY, j, n) for j in range(n))
    enhanced = sum(
        spec.enhancement[j] * embed_operator(0.5 * SY, j, n) for j in range(n)
    )
    return kron(P0, bare) + kron(P1, enhanced)


def mw_drive_operator(spec: RegisterSpec, phase: float) -> np.ndarray:
    """Resonant electron drive (amplitude 1): (cos p sx + sin p sy)/2 (x) 1."""
    n = spec.n_nuclei
    sigma = np.cos(phase) * SX + np.sin(phase) * SY
    return kron(0.5 * sigma, np.eye(2**n, dtype=complex))


def detuning_operator(spec: RegisterSpec) -> np.ndarray:
    """Electron dephasing operator: unit detuning shifts the ms=1 level."""
    return kron(P1, np.eye(2**spec.n_nuclei, dtype=complex))


def control_hamiltonian(
    spec: RegisterSpec,
    mw_amp: float,
    mw_phase: float,
    rf_amp: float,
    rf_phase: float,
    rf_carrier: float,
    t: float,
    frame: str = "lab",
) -> np.ndarray:
    """Control Hamiltonian at time t for given drive settings.

    The microwave term is the resonant electron drive in its rotating frame.
    The rf term depends on the backend:

    * ``lab``: rf_amp * cos(rf_carrier * t + rf_phase) * sum_j kappa^(ms) Ix_j
      -- the full linearly polarized coil field, all nuclei.
    * ``rwa``: the time-independent co-rotating half-amplitude drive on the
      nucleus addressed by the carrier only (evaluated for a pulse that
      started at t = 0).  If rf_carrier == 0 the field is the static
      two-quadrature form rf_amp*(cos Ix + sin Iy), identical in both
      backends.
    """
    if mw_amp < 0 or rf_amp < 0:
        raise RegisterError("drive amplitudes must be nonnegative")
    if spec.max_rabi_e and mw_amp > spec.max_rabi_e * (1 + 1e-12):
        warnings.warn("mw amplitude exceeds max_rabi_e ceiling", stacklevel=2)
    if spec.max_rabi_rf and rf_amp > spec.max_rabi_rf * (1 + 1e-12):
        warnings.warn("rf amplitude exceeds max_rabi_rf ceiling", stacklevel=2)
    dim = spec.dim
    h = np.zeros((dim, dim), dtype=complex)
    if mw_amp:
        h = h + mw_amp * mw_drive_operator(spec, mw_phase)
    if rf_amp:
        if frame == "lab" or rf_carrier == 0.0:
            if rf_carrier == 0.0:
                h = h + rf_amp * (
                    np.cos(rf_phase) * rf_drive_operator(spec)
                    + np.sin(rf_phase) * rf_drive_operator_y(spec)
                )
            else:
                h = h + rf_amp * np.cos(rf_carrier * t + rf_phase) * (
                    rf_drive_operator(spec)
                )
        elif frame == "rwa":
            j = addressed_nucleus(spec, rf_carrier)
            frame_j = local_frame(spec, j)
            kappa = spec.enhancement[j]
            drive = corotating_drive(
                frame_j, kappa * rf_amp / 2.0, rf_phase, j, spec.n_nuclei
            )
            h = h + kron(P1, drive)
        else:
            raise RegisterError(f"unknown frame {frame!r}")
    return h


def addressed_nucleus(spec: RegisterSpec, rf_carrier: float) -> int:
    """Nucleus whose ms=1 frequency lies closest to the rf carrier."""
    freqs = [local_frame(spec, j).omega1 for j in range(spec.n_nuclei)]
    return int(np.argmin([abs(f - rf_carrier) for f in freqs]))


def corotating_drive(
    frame: LocalFrame, omega_rot: float, psi: float, j: int, n: int
) -> np.ndarray:
    """Static co-rotating drive operator on nucleus j (nuclear space).

    ``omega_rot`` is the rotating-frame Rabi amplitude (already enhanced and
    halved relative to the lab cosine amplitude).  In the rotating frame
    referenced to t = 0 the drive points along
    cos(lam - psi) x_tilde - sin(lam - psi) y_tilde, with magnitude reduced
    by the tilt factor, so the nutation rate is omega_rot * omega_bar_scale.
    """
    ang = frame.lam - psi
    direction = np.cos(ang) * frame.x_axis - np.sin(ang) * frame.y_axis
    return omega_rot * frame.omega_bar_scale * _nuclear_operator(direction, j, n)


@dataclass(frozen=True)
class WindowCheck:
    name: str
    ratio: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class WindowReport:
    checks: tuple
    margin: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def validate_window(
    spec: RegisterSpec, omega_e: float, omega_rf: float, margin: float = 5.0
) -> WindowReport:
    """Frequency-window validity check for selective addressing of n spins.

    The chain tested, with Delta_E_N = (n+1) omega_M / 2 the hyperfine-induced
    nuclear frequency spread:

        Delta_E_e >> Omega_e >> Delta_E_N / 2 > omega_M / n >> Omega_rf

    Each ">>" is operationalized as a ratio >= margin; the single ">" is
    checked literally.  The half-spread Delta_E_N / 2 is what the microwave
    power must dominate (the carrier sits at the band center).
    """
    if margin <= 1:
        raise RegisterError("margin must exceed 1")
    n = spec.n_nuclei
    omega_m = spec.omega_max
    spread_half = (n + 1) * omega_m / 4.0
    min_splitting = omega_m / n

    def ratio(num, den):
        if den == 0:
            return np.inf if num > 0 else 0.0
        return num / den

    checks = (
        WindowCheck(
            "electron_gap_over_mw_power",
            ratio(spec.delta_e_e, omega_e),
            margin,
            ratio(spec.delta_e_e, omega_e) >= margin,
        ),
        WindowCheck(
            "mw_power_over_nuclear_halfspread",
            ratio(omega_e, spread_half),
            margin,
            ratio(omega_e, spread_half) >= margin,
        ),
        WindowCheck(
            "nuclear_halfspread_over_min_splitting",
            ratio(spread_half, min_splitting),
            1.0,
            spread_half > min_splitting,
        ),
        WindowCheck(
            "min_splitting_over_rf_power",
            ratio(min_splitting, omega_rf),
            margin,
            ratio(min_splitting, omega_rf) >= margin,
        ),
    )
    return WindowReport(checks=checks, margin=margin)
