"""Phase estimation as an energy filter.

A single eigenvalue E is read by QPE into an R-qubit register with amplitudes
kappa(E, x).  Keeping only outcomes in the lower half of the register marks
eigenvalues below pi; repeating the round Q times sharpens the cut.
"""

import math

import numpy as np

from qhes import FilterConfig, PauliHamiltonian
from qhes.heaviside import filter_circuit, filter_layout
from qhes.qpe import kappa_vector
from qhes.state import pattern_probability, zero_state

R = 4
print(f"QPE readout of E on {R} qubits (probability of each outcome x)")
for E in (2 * math.pi * 3 / 16, 2 * math.pi * 3.5 / 16):
    probs = np.abs(kappa_vector(E, R)) ** 2
    top = np.argsort(probs)[::-1][:3]
    print(f"  E = {E:.4f}: " + ", ".join(f"x={x}: {probs[x]:.3f}" for x in top))

print("\nMark-0 probability of the filter versus energy (threshold pi)")
print("  E/pi    Q=1      Q=2      Q=3      frozen Q=3")
for E in np.linspace(0.2, 1.8, 9) * math.pi:
    h = PauliHamiltonian(1, (), E)
    row = []
    for Q, strategy in ((1, "primary"), (2, "primary"), (3, "primary"), (3, "frozen")):
        cfg = FilterConfig(R=R, Q=Q)
        lay = filter_layout(1, cfg, strategy)
        out = filter_circuit(lay, h, cfg, strategy).apply(zero_state(lay))
        row.append(pattern_probability(out, lay, "mark", "0"))
    print(f"  {E / math.pi:4.2f}  " + "  ".join(f"{p:7.5f}" for p in row))
print("\nThe recycled (frozen) filter reuses one register; its probability is the")
print("square of the primary one because every round runs QPE and its inverse.")
