"""Ground energy by bisection with a quantum judge.

Each step rescales the Hamiltonian so the midpoint of the current bracket
sits at pi, amplifies the filter output from a random seed state, and keeps
the half of the bracket that the verdict points to.
"""

import math

from qhes import FilterConfig, brute_force_eigs, dichotomy_lowest, ising_chain

h = ising_chain(3)
ref = brute_force_eigs(h)
print(f"Ising chain on {h.n_qubits} qubits, exact spectrum {sorted(set(round(float(e), 6) for e in ref.eigenvalues))}")

for R in (4, 6):
    cfg = FilterConfig.default(h.n_qubits, R)
    trace = dichotomy_lowest(h, cfg, seed=0, reference=ref)
    print(f"\nR = {R} (Q = {cfg.Q} rounds, W = {cfg.W} shifts), {trace.iterations} judge calls")
    for s in trace.steps:
        print(f"  threshold {s.threshold:+.5f}  p = {s.verdict.mark0_probability:.4f}  -> {s.verdict.decision}")
    print(f"  E_c = {trace.E_c:+.6f}, error {trace.eps_v:.3g} (bound {2 * math.pi / 2 ** (R - 1):.3g})")
