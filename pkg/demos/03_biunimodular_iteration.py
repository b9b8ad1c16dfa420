# The fixed-point map lam -> phase((F x F) lam), started from random phases.
# Writes ensemble and histogram CSVs that can be plotted directly.

# %%
import sys
from pathlib import Path

import numpy as np

from biunimodular import SearchConfig, run_ensemble, run_search

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

# %% one realization with its residual trace
o = run_search(SearchConfig(3, "biuni", rng_seed=5, max_iterations=2000, record_trace=True))
print("converged:", o.converged, "after", o.iterations_used, "iterations")
print("residual every 100 steps:", np.array2string(o.trace[::100], precision=2))

# %% ensembles: most outcomes are dual; at d=3 a few are perfect tensors, at d=6 none
for d, seeds, iters in [(3, 200, 2000), (6, 100, 2000)]:
    ens = run_ensemble(SearchConfig(d, "biuni", max_iterations=iters), seeds)
    print(f"d={d}: dual fraction {ens.fraction_dual():.2f}, "
          f"perfect {len(ens.perfect())}, min Delta(U^Gamma) {ens.delta_Gamma.min():.3f}, "
          f"random control min Delta(U^R) {ens.random_delta_R.min():.3f}")
    (out / f"ensemble_d{d}.csv").write_text(ens.to_csv())
    (out / f"histogram_delta_R_d{d}.csv").write_text(ens.histogram_csv("delta_R"))
    (out / f"histogram_delta_Gamma_d{d}.csv").write_text(ens.histogram_csv("delta_Gamma"))
print("CSV files in", out)
