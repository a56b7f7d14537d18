import time

import numpy as np

from spinreg.linalg import gate_fidelity, max_abs
from spinreg.register import make_register
from spinreg.pulses import GateSpec, compile_decoupled_gate, compile_plain_gate, suggest_clock_time
from spinreg.simulate import simulate_sequence, coherence_recovery

TWO_PI = 2 * np.pi

spec = make_register(
    omega_larmor=TWO_PI * 0.8e6,
    hyperfine=[[TWO_PI * 1.2e6, 0.0, TWO_PI * 1.6e6]],
    max_rabi_e=TWO_PI * 50e6,
)
omega_rot = TWO_PI * 50e3
rf_amp = 2 * omega_rot

# --- criterion-6 style check at T = 110 us
T = 110e-6
gate = GateSpec(0, 0.0, 0.0, 0.0)
seq4 = compile_decoupled_gate(spec, gate, rf_amp, T=T)
seq3 = compile_plain_gate(spec, gate, rf_amp, T=T)
delta = TWO_PI * 50e3
u4 = simulate_sequence(spec, seq4, backend="rwa")
u4n = simulate_sequence(spec, seq4, backend="rwa", static_detuning=delta)
u3 = simulate_sequence(spec, seq3, backend="rwa")
u3n = simulate_sequence(spec, seq3, backend="rwa", static_detuning=delta)
print("decoupled recovery:", coherence_recovery(u4n, u4))
print("plain recovery:", coherence_recovery(u3n, u3))

# and in the lab backend
t0 = time.time()
u4_lab = simulate_sequence(spec, seq4, backend="lab")
u4n_lab = simulate_sequence(spec, seq4, backend="lab", static_detuning=delta)
print(f"lab decoupled recovery: {coherence_recovery(u4n_lab, u4_lab):.5f} ({time.time()-t0:.1f}s)")
print("lab vs rwa decoupled fidelity:", gate_fidelity(u4, u4_lab))

# --- step halving convergence (plain schedule piece)
gate2 = GateSpec(0, 0.4, 1.1, -0.3)
Tp = suggest_clock_time(spec, omega_rot, "plain")
seqp = compile_plain_gate(spec, gate2, rf_amp, T=Tp)
u20 = simulate_sequence(spec, seqp, backend="lab", steps_per_period=20)
u40 = simulate_sequence(spec, seqp, backend="lab", steps_per_period=40)
u80 = simulate_sequence(spec, seqp, backend="lab", steps_per_period=80)
print("halving delta (20 vs 40):", max_abs(u20 - u40))
print("halving delta (40 vs 80):", max_abs(u40 - u80))
print("order estimate:", np.log2(max_abs(u20 - u40) / max(max_abs(u40 - u80), 1e-300)))

# --- OU trajectory plumbing
rng = np.random.default_rng(3)
dt = 1e-6
n = int(np.ceil(seqp.total_time / dt)) + 1
vals = rng.normal(0, 2 * np.pi * 20e3, n)
u_ou_rwa = simulate_sequence(spec, seqp, backend="rwa", ou_trajectory=(dt, vals))
u_ou_lab = simulate_sequence(spec, seqp, backend="lab", ou_trajectory=(dt, vals))
print("ou rwa vs lab fidelity:", gate_fidelity(u_ou_rwa, u_ou_lab))
