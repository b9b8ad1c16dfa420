# Iterating U -> polar(U^R) and U -> polar((U^R)^Gamma) on unitaries.

# %%
import numpy as np

from biunimodular import SearchConfig, block_structure, run_ensemble

# %% the R map from random diagonal seeds, d=3
ens = run_ensemble(SearchConfig(3, "polar_R", max_iterations=2000), 100)
print("polar_R, d=3: dual fraction", ens.fraction_dual())
print("outcomes still diagonal in the maximally entangled basis:",
      sum(o.phase_array is not None for o in ens.outcomes))

# %% the Gamma R map reaches perfect tensors
ens = run_ensemble(SearchConfig(3, "polar_GammaR", max_iterations=1000), 100)
print("polar_GammaR, d=3: perfect", len(ens.perfect()))
ens6 = run_ensemble(SearchConfig(6, "polar_GammaR", max_iterations=1000), 20)
for o in ens6.perfect():
    b = block_structure(o.unitary)
    print(f"d=6 seed {o.seed}: block pattern {b.pattern}, sizes {b.sizes}, "
          f"max block residual {max(x.residual for x in b.blocks):.1e}")
print("realizations that hit a rank-deficient step:", int(np.sum([o.rank_deficient for o in ens6.outcomes])))
