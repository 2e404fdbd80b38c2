"""
An LP relaxation and its rounding
=================================

The relaxation has one variable per color and interval of steps during
which the server is *not* on that color.  Rounding it needs more buffer
space, about ``(k - 1) / (1/2 - 2 eps)`` slots, but stays within a
constant times ``1/eps`` of the LP value.
"""

import numpy as np

from bufsort import build_lp, gen_random, lp_round, solve_exact, solve_lp
from bufsort.lp import integral_solution

inst = gen_random(10, 3, 3, seed=21)
print("sequence:", inst.sequence, "k =", inst.k)

# %%
# Bracket the LP between the color count and the optimum.
model = build_lp(inst)
frac = solve_lp(model)
best, program = solve_exact(inst)
print(f"C = {inst.C} <= LP = {frac.objective:.4f} <= OPT = {best.switches}")

# %%
# The optimal schedule itself is a 0/1 point of the same polytope.
y = integral_solution(model, program)
print("integral point feasible:", y.is_feasible(), "value:", y.objective)

# %%
# Round with several eps and compare switches to the LP value.
for eps in (0.05, 0.1, 0.2):
    rep = lp_round(inst, frac, eps)
    print(f"eps={eps:<5} switches={rep.switches:>2}  ratio={rep.ratio:.2f}  "
          f"peak={rep.peak_occupancy} <= {rep.occupancy_bound:.2f}  buffer used={rep.augmented_k}")

# %%
# Coverage of each color over time; the low-coverage color is the one
# the rounding switches to.
rep = lp_round(inst, frac, 0.1)
np.set_printoptions(precision=2, suppress=True)
print(rep.series.x[1:].T)
print([(s.step, s.color, s.kind) for s in rep.switch_log])
