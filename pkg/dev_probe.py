import numpy as np

from spinreg.register import make_register
from spinreg.pulses import GateSpec, compile_decoupled_gate, suggest_clock_time
from spinreg.simulate import simulate_sequence, coherence_recovery

TWO_PI = 2 * np.pi

spec = make_register(
    omega_larmor=TWO_PI * 0.8e6,
    hyperfine=[[TWO_PI * 1.2e6, 0.0, TWO_PI * 1.6e6]],
    max_rabi_e=TWO_PI * 50e6,
)
omega_rot = TWO_PI * 20e3
rf_amp = 2 * omega_rot
T = suggest_clock_time(spec, omega_rot, "decoupled")
delta = TWO_PI * 50e3

print("sweep alpha (gamma=0, beta=1):")
for a in np.linspace(-np.pi, np.pi, 13):
    gate = GateSpec(0, float(a), 1.0, 0.0)
    seq = compile_decoupled_gate(spec, gate, rf_amp, T=T)
    u = simulate_sequence(spec, seq, backend="rwa")
    u_noisy = simulate_sequence(spec, seq, backend="rwa", static_detuning=delta)
    rec = coherence_recovery(u_noisy, u)
    print(f"  alpha={a:+.3f}  t_phi_ns={1e9*((a/4) - ((a/4+np.pi/4)%(np.pi/2)-np.pi/4))/ (TWO_PI*2.683e6)*0:+.1f} rec={rec:.5f}")

print("beta sweep (alpha=gamma=0):")
for b in np.linspace(0.05, 6.2, 9):
    gate = GateSpec(0, 0.0, float(b), 0.0)
    seq = compile_decoupled_gate(spec, gate, rf_amp, T=T)
    u = simulate_sequence(spec, seq, backend="rwa")
    u_noisy = simulate_sequence(spec, seq, backend="rwa", static_detuning=delta)
    rec = coherence_recovery(u_noisy, u)
    print(f"  beta={b:.2f}  rec={rec:.5f}")

print("the failing triple, smaller t_pi_mw:")
gate = GateSpec(0, -2.92, 0.09, -0.21)
for t_mw in (1e-8, 1e-9, 1e-10):
    seq = compile_decoupled_gate(spec, gate, rf_amp, t_pi_mw=t_mw, T=T)
    u = simulate_sequence(spec, seq, backend="rwa")
    u_noisy = simulate_sequence(spec, seq, backend="rwa", static_detuning=delta)
    print(f"  t_mw={t_mw:.0e}  rec={coherence_recovery(u_noisy, u):.5f}")

print("failing triple, detuning sweep:")
seq = compile_decoupled_gate(spec, gate, rf_amp, T=T)
u = simulate_sequence(spec, seq, backend="rwa")
for d in (0.5, 1.0, 2.0):
    u_noisy = simulate_sequence(spec, seq, backend="rwa", static_detuning=d * delta)
    print(f"  delta={d*50:.0f} kHz rec={coherence_recovery(u_noisy, u):.5f}")
