# %% [markdown]
# # One angle per mixer versus one angle per layer
#
# Ten connected G(10, 0.3) graphs.  Independent mixer angles at depth 1 use
# n + 1 parameters; shared angles at depth 3 use 6.

# %%
import statistics

from constrained_qaoa import erdos_renyi, solve_qao

graphs = [erdos_renyi(10, 0.3, seed=2000 + i, connected=True) for i in range(10)]

# %%
rows = []
for i, g in enumerate(graphs):
    vec = solve_qao(g, 1, vector_beta=True, seed=i)
    scal = solve_qao(g, 3, vector_beta=False, seed=i)
    rows.append((vec.approximation_ratio, scal.approximation_ratio))
    print(f"graph {i}: vector {rows[-1][0]:.3f}  scalar {rows[-1][1]:.3f}  "
          f"params {vec.resources.free_parameters} vs {scal.resources.free_parameters}")

print("mean vector", statistics.fmean(r[0] for r in rows))
print("mean scalar", statistics.fmean(r[1] for r in rows))

# %% [markdown]
# Starting from the W state spreads weight over many small sets, so more of
# the output lands on sub-optimal independent sets.

# %%
for i, g in enumerate(graphs[:4]):
    z = solve_qao(g, 1, True, "zero", seed=i)
    w = solve_qao(g, 1, True, "w", seed=i)
    print(f"graph {i}: SP_sub zero {z.sp_subopt:.3f}  W {w.sp_subopt:.3f}")
