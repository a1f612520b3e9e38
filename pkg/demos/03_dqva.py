# %% [markdown]
# # Warm-started search with a mixer budget
#
# Each iteration only places partial mixers on nodes that are not yet in the
# set, so the circuit stays small even when the graph grows.

# %%
from constrained_qaoa import DqvaConfig, count_resources, build_qao, erdos_renyi, exact_mis, solve_dqva
from constrained_qaoa.solver import rounds_to_weight

g = erdos_renyi(12, 0.2, seed=12, connected=True)
e_max, optima = exact_mis(g)
print(g.describe(), "e_max =", e_max, "optima:", sorted(optima)[:3])
print("full-mixer Toffolis at p=1:", count_resources(build_qao(g, 1, True)).multi_controlled_toffolis)

# %%
for budget in (3, 5, 7):
    rec = solve_dqva(g, DqvaConfig(mixer_budget=budget, m=4, warm_starts=("zero",), seed=0))
    print(f"budget {budget}: best {rec.best_bitstring} (weight {rec.best_weight}), "
          f"rounds to optimum {rounds_to_weight(rec, e_max)}, evals {rec.evals}")

# %% [markdown]
# The trace lists one entry per inner optimisation.

# %%
rec = solve_dqva(g, DqvaConfig(mixer_budget=3, m=3, seed=1))
for entry in rec.trace:
    print(entry)
