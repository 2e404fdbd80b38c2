"""Offline sorting buffer: exact solvers, an LP rounding scheme, heuristics
and instance generators."""

from .core import (
    Buffer,
    CostReport,
    Instance,
    canonicalize,
    cost_of_order,
    load_instance,
    order_to_program,
    save_instance,
    simulate,
)
from .dp2 import dp2_reconstruct, dp2_solve
from .errors import BufsortError
from .exact import solve_bruteforce, solve_exact
from .gen import (
    ReductionParams,
    build_partition_witness,
    gen_3partition_reduction,
    gen_lfd_adversary,
    gen_multiserver_gadget,
    gen_random,
)
from .heuristics import run_fifo, run_lfd, run_lru
from .lp import build_lp, export_lp, lp_round, solve_lp
from .multiserver import MultiDecision, simulate_multi, solve_exact_multi

__version__ = "0.1.0"
