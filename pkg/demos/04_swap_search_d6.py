# Multiplying by the SWAP phase vector at every step steers the iteration towards
# arrays whose gates are 2-unitary, even in dimension six. Takes about half a minute.

# %%
from biunimodular import SearchConfig, block_structure, certify, search_perfect

found, examined = search_perfect(SearchConfig(6, "biuni_swap", max_iterations=10_000), 5000, batch=500)
print(f"{len(found)} perfect tensor(s) among {examined} seeds")

# %%
for o in found:
    print("seed", o.seed, "iterations", o.iterations_used)
    print(certify(o.unitary, tol=1e-8, stabilizers=True).to_text())
    b = block_structure(o.unitary)
    print("blocks", b.sizes, "distinct |entries|:", len(b.distinct_values))
    print(o.phase_array.to_json())
