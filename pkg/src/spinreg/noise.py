"""Decoherence models: bath echo envelope, Ornstein-Uhlenbeck dephasing,
cumulant echo decay, and off-resonance (selectivity) error formulas.

Echo-time convention: throughout this module ``t`` is the free-evolution
time per arm of a two-arm echo (refocusing pulse at t, readout at 2t).
The closed-form envelope, the cumulant law and the Monte Carlo engine all
share this convention, so they are directly comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class NoiseError(ValueError):
    pass


@dataclass(frozen=True)
class BathSpec:
    """Unpolarized bath nuclei seen by the electron.

    spins: sequence of (omega1, theta1) pairs; omega1 is the effective ms=1
    precession frequency and theta1 the tilt of its axis (rad).
    """

    spins: tuple
    omega_larmor: float

    def __post_init__(self):
        spins = tuple((float(w), float(th)) for (w, th) in self.spins)
        for w, _ in spins:
            if w <= 0:
                raise NoiseError("bath omega1 must be positive")
        if self.omega_larmor <= 0:
            raise NoiseError("omega_larmor must be positive")
        object.__setattr__(self, "spins", spins)


@dataclass(frozen=True)
class NoiseModel:
    """Quasi-static Gaussian detuning plus Ornstein-Uhlenbeck wander.

    sigma_static: rms of the static Gaussian electron detuning (rad/s).
    g0: OU variance (rad^2/s^2); the noise rms is sqrt(g0).
    tau_c: OU correlation time (s).
    """

    sigma_static: float = 0.0
    g0: float = 0.0
    tau_c: float = 1e-3
    n_static_samples: int = 7
    n_trajectories: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.sigma_static < 0 or self.g0 < 0:
            raise NoiseError("noise strengths must be nonnegative")
        if self.g0 > 0 and self.tau_c <= 0:
            raise NoiseError("tau_c must be positive when g0 > 0")


def echo_envelope(bath: BathSpec, t: float) -> float:
    """Closed-form electron echo envelope at arm time t.

    prod_j [1 - 2 sin^2(theta1_j) sin^2(omega1_j t/2) sin^2(omega_L t/2)];
    revives to exactly 1 whenever omega_L t is a multiple of 2 pi.
    """
    if t < 0:
        raise NoiseError("time must be nonnegative")
    s_l = math.sin(0.5 * bath.omega_larmor * t) ** 2
    out = 1.0
    for w1, th in bath.spins:
        out *= 1.0 - 2.0 * math.sin(th) ** 2 * math.sin(0.5 * w1 * t) ** 2 * s_l
    return out


def sample_ou_trajectory(
    model: NoiseModel, dt: float, n_steps: int, rng_stream
) -> np.ndarray:
    """One stationary OU path of length n_steps sampled every dt.

    Uses the exact AR(1) discretization, valid for any dt:
        x_{k+1} = x_k e^{-dt/tau_c} + sqrt(g0 (1 - e^{-2 dt/tau_c})) xi_k,
    with x_0 ~ N(0, g0).  ``rng_stream`` is a numpy Generator or a seed.
    """
    if dt <= 0:
        raise NoiseError("dt must be positive")
    rng = np.random.default_rng(rng_stream)
    if model.g0 == 0.0:
        return np.zeros(n_steps)
    rho = math.exp(-dt / model.tau_c)
    sigma_step = math.sqrt(model.g0 * (1.0 - rho * rho))
    x = np.empty(n_steps)
    x[0] = rng.normal(0.0, math.sqrt(model.g0))
    noise = rng.normal(0.0, sigma_step, n_steps - 1)
    for k in range(n_steps - 1):
        x[k + 1] = x[k] * rho + noise[k]
    return x


def _ou_ensemble(model: NoiseModel, dt: float, n_steps: int, n_traj: int, seed):
    """(n_traj, n_steps) stationary OU paths, vectorized over trajectories."""
    rng = np.random.default_rng(seed)
    rho = math.exp(-dt / model.tau_c)
    sigma_step = math.sqrt(model.g0 * (1.0 - rho * rho))
    x = np.empty((n_traj, n_steps))
    x[:, 0] = rng.normal(0.0, math.sqrt(model.g0), n_traj)
    noise = rng.normal(0.0, sigma_step, (n_traj, n_steps - 1))
    for k in range(n_steps - 1):
        x[:, k + 1] = x[:, k] * rho + noise[:, k]
    return x


def echo_decay(model: NoiseModel, t: float):
    """Short-time cumulant echo decay exp(-(2 g0 / 3 tau_c) t^3).

    ``t`` is the arm time (refocusing pulse at t, echo at 2t).  Returns
    (value, valid) where ``valid`` is False outside the t << tau_c regime
    (flagged at t > tau_c / 3).
    """
    if t < 0:
        raise NoiseError("time must be nonnegative")
    if model.g0 == 0.0:
        return 1.0, True
    value = math.exp(-(2.0 * model.g0 / (3.0 * model.tau_c)) * t**3)
    return value, t <= model.tau_c / 3.0


def echo_decay_exact(model: NoiseModel, t: float) -> float:
    """Exact Gaussian-OU echo decay at arm time t (total duration 2t).

    The phase variance of the +/- weighted integral of a stationary OU
    process has the closed form
        <phi^2> = g0 [4 tau_c t - 4 tau_c^2 (1 - e^{-t/tau_c})
                      - 2 tau_c^2 (1 - e^{-t/tau_c})^2],
    and the echo amplitude is exp(-<phi^2>/2).  Used as a validity
    reference for the cumulant t^3 law.
    """
    if model.g0 == 0.0:
        return 1.0
    tc = model.tau_c
    em = -math.expm1(-t / tc)  # 1 - e^{-t/tau_c}
    var = model.g0 * (4.0 * tc * t - 4.0 * tc * tc * em - 2.0 * tc * tc * em * em)
    return math.exp(-0.5 * var)


def monte_carlo_echo(
    model: NoiseModel,
    t: float,
    n_trajectories: int = None,
    n_steps_per_arm: int = 256,
    seed=None,
) -> float:
    """Monte Carlo echo amplitude at arm time t over OU trajectories.

    Each trajectory accumulates the echo phase
    phi = int_0^t delta dt' - int_t^{2t} delta dt' (pure dephasing; the
    detuning commutes with the refocusing pulse), and the echo amplitude is
    the ensemble mean of cos(phi).
    """
    if t < 0:
        raise NoiseError("time must be nonnegative")
    if model.g0 == 0.0 or t == 0.0:
        return 1.0
    n_traj = n_trajectories or model.n_trajectories
    if seed is None:
        seed = model.seed
    dt = t / n_steps_per_arm
    paths = _ou_ensemble(model, dt, 2 * n_steps_per_arm, n_traj, seed)
    phase = (
        paths[:, :n_steps_per_arm].sum(axis=1)
        - paths[:, n_steps_per_arm:].sum(axis=1)
    ) * dt
    return float(np.mean(np.cos(phase)))


def calibrate_noise(
    t2_star: float,
    t2: float,
    tau_c: float = 1e-3,
    n_static_samples: int = 7,
    n_trajectories: int = 1000,
    seed: int = 0,
) -> NoiseModel:
    """Noise model from measured dephasing times.

    The static Gaussian detuning is fixed by a Gaussian free-induction decay
    exp(-(t/T2*)^2), giving sigma = sqrt(2)/T2*.  The OU variance is fixed by
    the cumulant echo law exp(-(t/T2)^3), giving g0 = 3 tau_c / (2 T2^3).
    """
    if t2_star <= 0 or t2 <= 0 or tau_c <= 0:
        raise NoiseError("calibration times must be positive")
    sigma_static = math.sqrt(2.0) / t2_star if math.isfinite(t2_star) else 0.0
    g0 = 3.0 * tau_c / (2.0 * t2**3)
    return NoiseModel(
        sigma_static=sigma_static,
        g0=g0,
        tau_c=tau_c,
        n_static_samples=n_static_samples,
        n_trajectories=n_trajectories,
        seed=seed,
    )


def selectivity_shifts(rf_amp: float, delta_omega: float, omega_max: float, n: int):
    """Off-resonance frequency shifts of driven and bystander spins.

    rf_amp is the rotating-frame Rabi amplitude.  Returns
    (bs_shift, rwa_shift, worst_bs):

    * bs_shift: shift of a spin detuned by delta_omega from the carrier,
      -rf_amp^2 / (2 delta_omega).
    * rwa_shift: first-order correction to the rotating-wave approximation
      for the resonant spin, +rf_amp^2 / (4 omega_max).
    * worst_bs: n-spin worst case -n rf_amp^2 / (2 omega_max), for a
      neighbor at the minimum splitting omega_max / n.
    """
    if delta_omega == 0.0:
        raise NoiseError("delta_omega must be nonzero")
    if rf_amp < 0:
        raise NoiseError("rf_amp must be nonnegative")
    bs = -(rf_amp**2) / (2.0 * delta_omega)
    rwa = (rf_amp**2) / (4.0 * omega_max) if omega_max else 0.0
    worst = -(n * rf_amp**2) / (2.0 * omega_max) if omega_max else 0.0
    return bs, rwa, worst


def exact_constant_drive_shift(rf_amp: float, delta_omega: float) -> float:
    """Exact dressed-frequency shift delta - sqrt(rf_amp^2 + delta^2)."""
    sign = 1.0 if delta_omega > 0 else -1.0
    return delta_omega - sign * math.sqrt(rf_amp**2 + delta_omega**2)
