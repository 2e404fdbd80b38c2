"""
Buffer size two in linear time
==============================

For ``k = 2`` the optimum follows from one sweep that keeps the set of
colors that can end an optimal order of the prefix.  The sweep logs every
change so that an optimal order can be rebuilt backwards.
"""

import time

from bufsort import Instance, dp2_reconstruct, dp2_solve, gen_random, solve_exact
from bufsort.core import cost_of_order
from bufsort.dp2 import history_stats, replay_history

# %%
# A short input where the set of finishing colors jumps from one color
# to three in a single step.
inst = Instance((0, 1, 0, 2, 0, 1, 0), 2)
res = dp2_solve(inst)
print("prefix optima:", res.opt)
for i in range(1, inst.n + 1):
    print(f"  after item {i}: finishing sizes {replay_history(res.history, inst.C, i)}")
print("exact search agrees:", solve_exact(inst)[0].switches == res.cost)

# %%
# Rebuild an order from the log and check it.
order = dp2_reconstruct(inst, res)
print("order:", order, "cost:", cost_of_order(inst, order).switches)

# %%
# Runtime grows linearly; the log stays below 7 entries per item.
for n in (50_000, 100_000, 200_000, 400_000):
    big = gen_random(n, 100, 2, seed=n)
    start = time.perf_counter()
    res = dp2_solve(big)
    elapsed = time.perf_counter() - start
    entries = history_stats(res.history)["entries"]
    print(f"n={n:>7}  {elapsed:6.3f}s  cost={res.cost:>7}  log/n={entries / n:.2f}")
