"""Development cross-checks (not part of the test suite)."""
import numpy as np
from scipy.integrate import solve_ivp

from spinreg.linalg import SX, SY, SZ, gate_fidelity, rot_x, rot_z
from spinreg.register import make_register, local_frame
from spinreg.pulses import (
    GateSpec,
    compile_plain_gate,
    compile_decoupled_gate,
    ideal_plain_gate_ms1,
    min_clock_time,
    suggest_clock_time,
    reduced_rabi,
    ul_propagator,
)
from spinreg.simulate import (
    simulate_sequence,
    ms1_block,
    ms0_block,
    tilde_frame_gate,
    coherence_recovery,
)

TWO_PI = 2 * np.pi
rng = np.random.default_rng(7)


def lab_two_level(frame, omega_enh_lab, t_p, psi, n_steps=200000):
    """Brute-force integration of one driven nucleus in the ms=1 manifold."""
    w = frame.omega1
    n = frame.axis
    h0 = 0.5 * w * (n[0] * SX + n[1] * SY + n[2] * SZ)

    def rhs(t, y):
        u = y.reshape(2, 2)
        h = h0 + 0.5 * omega_enh_lab * np.cos(w * t + psi) * SX
        return (-1j * h @ u).ravel()

    y0 = np.eye(2, dtype=complex).ravel()
    sol = solve_ivp(rhs, (0, t_p), y0, rtol=1e-10, atol=1e-12, method="DOP853")
    return sol.y[:, -1].reshape(2, 2)


def check_ul():
    spec = make_register(
        omega_larmor=TWO_PI * 0.8e6,
        hyperfine=[[TWO_PI * 6e6, TWO_PI * 1e6, TWO_PI * 10e6]],
    )
    frame = local_frame(spec, 0)
    print("frame: omega1/2pi =", frame.omega1 / TWO_PI, "theta1 =", frame.theta1,
          "phi1 =", frame.phi1, "lam =", frame.lam, "scale =", frame.omega_bar_scale)
    omega_rot = frame.omega1 / 200.0     # rotating-frame amplitude
    omega_lab = 2 * omega_rot            # lab cosine amplitude (kappa = 1)
    omega_bar, lam = reduced_rabi(frame, omega_rot)
    for psi in (0.0, 0.7, 2.1):
        t_p = np.pi / omega_bar  # pi pulse
        u_formula_tilde = ul_propagator(frame, omega_rot, t_p, psi)
        d = frame.alignment()
        u_formula_lab = d @ u_formula_tilde @ d.conj().T
        u_exact = lab_two_level(frame, omega_lab, t_p, psi)
        f = gate_fidelity(u_formula_lab, u_exact)
        print(f"  UL vs lab integration, psi={psi:.2f}: F = {1 - f:.3e} infidelity")


def check_plain():
    spec = make_register(
        omega_larmor=TWO_PI * 0.8e6,
        hyperfine=[[TWO_PI * 8.0e6, 0.0, TWO_PI * 11.9e6]],
    )
    frame = local_frame(spec, 0)
    print("omega1/2pi MHz:", frame.omega1 / TWO_PI / 1e6)
    omega_rot = TWO_PI * 20e3
    rf_amp = 2 * omega_rot
    T = suggest_clock_time(spec, omega_rot, "plain")
    print("min clock us:", min_clock_time([frame], omega_rot) * 1e6, "T us:", T * 1e6)
    for trial in range(6):
        a, b, g = rng.uniform(-np.pi, np.pi, 3)
        if trial == 0:
            a = b = g = 0.0
        gate = GateSpec(0, a, b, g)
        seq = compile_plain_gate(spec, gate, rf_amp, T=T)
        target = gate.target_unitary()
        u_analytic = ideal_plain_gate_ms1(spec, seq, gate)
        f_closed = gate_fidelity(target, u_analytic)
        u = simulate_sequence(spec, seq, backend="rwa")
        u_tilde = tilde_frame_gate(spec, 0, ms1_block(u))
        f_rwa = gate_fidelity(target, u_tilde)
        print(f"  abg=({a:+.2f},{b:+.2f},{g:+.2f}) closed-form F={f_closed:.9f}  rwa F={f_rwa:.9f}")


def check_plain_lab():
    spec = make_register(
        omega_larmor=TWO_PI * 0.8e6,
        hyperfine=[[TWO_PI * 8.0e6, 0.0, TWO_PI * 11.9e6]],
    )
    omega_rot = TWO_PI * 20e3
    rf_amp = 2 * omega_rot
    T = suggest_clock_time(spec, omega_rot, "plain")
    a, b, g = 0.5, 1.3, -0.7
    gate = GateSpec(0, a, b, g)
    seq = compile_plain_gate(spec, gate, rf_amp, T=T)
    u_rwa = simulate_sequence(spec, seq, backend="rwa")
    import time

    t0 = time.time()
    u_lab = simulate_sequence(spec, seq, backend="lab")
    print(f"  lab sim took {time.time()-t0:.1f}s")
    print("  rwa vs lab full fidelity:", gate_fidelity(u_rwa, u_lab))
    target = gate.target_unitary()
    f_lab = gate_fidelity(target, tilde_frame_gate(spec, 0, ms1_block(u_lab)))
    print("  lab ms1 gate fidelity:", f_lab)
    print("  ms0 block vs identity:", gate_fidelity(np.eye(2), ms0_block(u_lab)))


def check_decoupled():
    spec = make_register(
        omega_larmor=TWO_PI * 0.8e6,
        hyperfine=[[TWO_PI * 1.2e6, 0.0, TWO_PI * 1.6e6]],
        max_rabi_e=TWO_PI * 50e6,
    )
    frame = local_frame(spec, 0)
    print("omega1/2pi MHz:", frame.omega1 / TWO_PI / 1e6)
    omega_rot = TWO_PI * 20e3
    rf_amp = 2 * omega_rot
    T = suggest_clock_time(spec, omega_rot, "decoupled")
    print("T us:", T * 1e6)
    for trial in range(4):
        a, b, g = rng.uniform(-np.pi, np.pi, 3)
        if trial == 0:
            a = b = g = 0.0
        gate = GateSpec(0, a, b, g)
        seq = compile_decoupled_gate(spec, gate, rf_amp, T=T)
        target = gate.target_unitary()
        u = simulate_sequence(spec, seq, backend="rwa")
        u_tilde = tilde_frame_gate(spec, 0, ms1_block(u))
        f1 = gate_fidelity(target, u_tilde)
        f0 = gate_fidelity(np.eye(2), ms0_block(u))
        # full controlled-gate fidelity
        d = frame.alignment()
        full_target = np.zeros((4, 4), dtype=complex)
        full_target[:2, :2] = np.eye(2)
        full_target[2:, 2:] = d @ target @ d.conj().T
        f_full = gate_fidelity(full_target, u)
        print(f"  abg=({a:+.2f},{b:+.2f},{g:+.2f}) ms1 F={f1:.6f} ms0 F={f0:.6f} full F={f_full:.6f}")
        # detuning refocusing
        delta = TWO_PI * 50e3
        u_noisy = simulate_sequence(spec, seq, backend="rwa", static_detuning=delta)
        rec = coherence_recovery(u_noisy, u)
        print(f"    coherence recovery at 50 kHz detuning: {rec:.4f}")


if __name__ == "__main__":
    print("== UL propagator vs integration ==")
    check_ul()
    print("== plain gate (rwa) ==")
    check_plain()
    print("== plain gate (lab backend) ==")
    check_plain_lab()
    print("== decoupled gate ==")
    check_decoupled()
