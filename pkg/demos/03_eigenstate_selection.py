"""Eigenstate selection with recycled coins.

Each coin toss multiplies the amplitude of an eigenstate with normalized
energy E by cos(E).  Pinning the target energy at 0 and tossing M coins
leaves the target untouched while every other eigenstate shrinks by
cos^M; a counting register of K qubits replaces M physical coins.
"""

import numpy as np

from qhes import CoinConfig, brute_force_eigs, ising_chain, quantum_selector

h = ising_chain(2)
ref = brute_force_eigs(h)
print("Ising chain on 2 qubits: ground space spanned by |00> and |11>\n")
print("  K    M    eps_s       amplitudes |00>, |01>, |10>, |11>")
for K in range(2, 8):
    res = quantum_selector(h, ref.ground, seed=1, coin=CoinConfig(2 ** (K - 1), K), reference=ref)
    amps = np.abs(res.physical_state.amplitudes)
    print(f"  {K}  {res.coin.M:3d}    {res.eps_s:.3e}   " + ", ".join(f"{a:.4f}" for a in amps))

res = quantum_selector(h, ref.ground, seed=1, reference=ref)
print(f"\nDesigned from the exact gap: M = {res.coin.M}, K = {res.coin.K}, eps_s = {res.eps_s:.3g}")
