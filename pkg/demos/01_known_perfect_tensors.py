# Three 6x6 phase arrays that give 2-unitary gates on two qudits of dimension six,
# and everything the certification module says about them.

# %%
import numpy as np

from biunimodular import block_structure, build_diagonal_unitary, certify, chm_construct, known_vectors, lu_probe

arrays = known_vectors()
gates = {name: build_diagonal_unitary(lam) for name, lam in arrays.items()}

for name, lam in arrays.items():
    print(name, "distinct roots of unity:", lam.distinct_phases())

# %% 2-unitarity, marginals and the local stabilizer group
for name, u in gates.items():
    report = certify(u, stabilizers=True)
    print(f"--- {name}")
    print(report.to_text())

# %% block structure: six unitary 6x6 blocks, few distinct moduli
for name, u in gates.items():
    b = block_structure(u)
    print(name, b.pattern, b.sizes, [f"{v:.6f} x{m}" for v, m in b.distinct_values])

# %% conjugating by a local Fourier gate gives complex Hadamard matrices
for name, u in gates.items():
    h = chm_construct(u)
    print(name, "max | |h_ij| - 1/6 |:", np.max(np.abs(np.abs(h) - 1 / 6)), "2-unitary:", certify(h).is_two_unitary)

# %% cheap fingerprints; they separate gates but cannot prove local equivalence
probe = lu_probe(gates["L2"], gates["L3"])
for f in probe.fingerprints:
    print(f"{f.name:36s} LU-invariant={f.lu_invariant!s:5s} differs={f.differs}")
