# Phase arrays lam[a, b] = omega**F(a, b) with F quadratic. The correlations of such
# an array vanish except where two linear forms in the shift (k, l) vanish mod d.

# %%
from math import gcd

from biunimodular import (
    correlation_residual,
    modular_solutions_dual,
    modular_solutions_tdual,
    quadratic_ansatz,
)

# %% a^2 + ab - b^2 works in odd d coprime to 5; a^2 + ab + b^2 in odd d coprime to 3
for d in range(3, 22, 2):
    row = []
    for coeffs in [(1, 1, -1), (1, 1, 1)]:
        lam = quadratic_ansatz(d, *coeffs)
        ok = correlation_residual(lam) < 1e-9 and correlation_residual(lam, weighted=True) < 1e-9
        row.append("2-unitary" if ok else "-")
    print(f"d={d:2d}  gcd(d,15)={gcd(d, 15):2d}  a2+ab-b2: {row[0]:9s}  a2+ab+b2: {row[1]}")

# %% the shifts where things go wrong
print("d=5, a2+ab-b2, dual failures:", sorted(modular_solutions_dual(5).nontrivial()))
print("d=6, a2+ab-b2, dual failures:", sorted(modular_solutions_dual(6).nontrivial()))
print("d=6, a2+ab-b2, T-dual failures:", sorted(modular_solutions_tdual(6).nontrivial()))
