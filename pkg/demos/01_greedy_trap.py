"""
Where greedy goes wrong
=======================

Each column of the trap instance can be covered by one big set costing
1 + eps, or by its singletons costing 1, 1/2, ..., 1/k.  Greedy always grabs
the cheapest per-element singleton first and ends up paying H_k per column.
"""

from fractions import Fraction

from seipcover import ProblemISpec, cost, exact_solve, extend_closure, gaww_solve, gen_problem_i, greedy_solve, price_audit

inst, opt = gen_problem_i(ProblemISpec(k=3, L=4, epsilon=Fraction(1, 100)))
print(inst.name, "n =", inst.n, "m =", inst.m)

g = greedy_solve(inst)
print("greedy cost", cost(inst, g.solution), "ratio", cost(inst, g.solution) / opt.value)

# withdrawals let the algorithm trade two singletons back for the big set
w = gaww_solve(extend_closure(inst))
print("gaww cost  ", cost(extend_closure(inst), w.solution))
print("exact      ", exact_solve(inst).value)

# every greedy price stays under its column's per-element share
report = price_audit(inst, g.prices, g.trace, opt)
for row in report.rows[:4]:
    print(f"  element {row.element}: price {row.price} <= {row.bound}  ({row.status})")
print("audit passed:", report.passed, "| sum of prices", report.total_price)
