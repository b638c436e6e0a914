"""
An isolated population
======================

SEIP keeps one resident per number of covered elements, so a cheap partial
cover never has to compete with a more complete but expensive one.
"""

from fractions import Fraction

from seipcover import EaConfig, IsolationFunction, ProblemISpec, gen_problem_i, seip_run

inst, opt = gen_problem_i(ProblemISpec(k=3, L=5, epsilon=Fraction(1, 100)))
iso = IsolationFunction.for_instance(inst, "covered-elements")
budget = 50 * inst.m * inst.n ** 2

for mutation in ("one-bit", "bit-wise"):
    res = seip_run(inst, iso, EaConfig(mutation=mutation, budget=20_000, seed=3))
    print(f"{res.algorithm}: best cost {res.best_cost} (OPT {opt.value}), "
          f"population {len(res.population)} of at most {iso.q + 1}")

# The residents, from empty to full cover
res = seip_run(inst, iso, EaConfig(budget=20_000, seed=3))
for card, x in res.population[::3]:
    print(f"  covers {card:2d}: sets {x.indices()}")

# how many seeds land at or below 5/3 of the optimum within the budget
target = Fraction(5, 3) * opt.value
hits = sum(
    seip_run(inst, iso, EaConfig(budget=budget, seed=s, target_cost=target)).best_cost <= target
    for s in range(20)
)
print(f"lseip reached ratio <= 5/3 in {hits}/20 seeded runs (budget {budget})")
