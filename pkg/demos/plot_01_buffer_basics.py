"""
Reordering a color stream through a small buffer
================================================

A stream of colored items passes through a buffer of ``k`` slots.  The
server picks a color, everything of that color leaves, and new items
flow in until the buffer is full again.  We pay one unit per run of
equal colors in the output.
"""

from bufsort import Instance, canonicalize, simulate, solve_exact
from bufsort.core import cost_of_order, order_to_program

# %%
# Labels can be anything hashable; they are mapped to dense ids.
labels, inst = canonicalize(["red", "blue", "red", "green", "red", "blue", "red"], k=2)
print("ids:", inst.sequence, "labels:", labels)

# %%
# Without a buffer (k = 1) the cost is just the number of input runs.
print("k=1 cost:", solve_exact(inst.with_k(1))[0].switches)

# %%
# With two slots the server can hold one item back.
report, program = solve_exact(inst)
print("k=2 optimum:", report.switches, "program:", [labels[c] for c in program])
_, order = simulate(inst, program)
print("serving order (0-based items):", order)

# %%
# A serving order is feasible when no item leaves before it could have
# entered: order[t] <= t + k - 1.  Orders compress back into programs.
print("order cost:", cost_of_order(inst, order).switches)
print("program again:", order_to_program(inst, order))

# %%
# With room for every item the cost drops to the number of colors.
print("k=n cost:", solve_exact(inst.with_k(inst.n))[0].switches, "C =", inst.C)
