"""
Hard instance families
======================

Three constructions: inputs on which longest-forward-distance is far
from optimal, the instance built from a 3-Partition instance (solved by
a schedule of cost ``C + 3q`` when the partition exists), and the gadget
that adds a server.
"""

from bufsort import (
    Instance,
    ReductionParams,
    build_partition_witness,
    gen_3partition_reduction,
    gen_lfd_adversary,
    gen_multiserver_gadget,
    simulate,
    solve_exact,
    solve_exact_multi,
)
from bufsort.gen import audit_reduction
from bufsort.heuristics import run_fifo, run_lfd, run_lru

# %%
# LFD pays about n^2/2 switches where n + 1 suffice.
for n in range(2, 7):
    inst, witness = gen_lfd_adversary(n)
    costs = {name: simulate(inst, f(inst))[0].switches
             for name, f in (("lfd", run_lfd), ("fifo", run_fifo), ("lru", run_lru))}
    print(f"n={n} k={inst.k:>3}  witness={simulate(inst, witness)[0].switches}  {costs}")

# %%
# The reduction: a yes-instance of 3-Partition gives a schedule of cost C + 3q.
params = ReductionParams(q=2, A=18, a=(5, 5, 6, 6, 7, 7))
red = gen_3partition_reduction(params)
print("items:", red.instance.n, "colors:", params.color_count, "buffer:", params.V)
print("audit:", audit_reduction(red) or "clean")
program = build_partition_witness(red, [[0, 2, 4], [1, 3, 5]])
print("witness cost:", simulate(red.instance, program)[0].switches, "= C + 6")

# %%
# The gadget puts k items of a fresh color between consecutive items; a
# second server then costs exactly one extra switch.
rho = Instance((0, 1, 1, 0), 2)
g = gen_multiserver_gadget(rho, 2)
print("gadget:", g.sequence)
print("one server on rho:", solve_exact(rho)[0].switches,
      " two servers on gadget:", solve_exact_multi(Instance(g.sequence, 2, 2))[0])
