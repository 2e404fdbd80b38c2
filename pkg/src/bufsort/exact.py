"""Exact optimum for small instances.

``solve_exact`` searches over buffer states (input pointer plus the multiset
of buffered colors).  ``solve_bruteforce`` enumerates serving orders
directly and exists to cross-check it.
"""

from __future__ import annotations

import os
import sys

from .core import CostReport, Instance, run_lengths, simulate
from .errors import BudgetExceeded, InvalidInstance

DEFAULT_BUDGET = 10_000_000


def default_budget() -> int:
    return int(os.environ.get("BUFSORT_BUDGET", DEFAULT_BUDGET))


def _admit(seq, k, p, counts, size, color):
    n = len(seq)
    while size < k and p < n:
        c = seq[p]
        if c != color:
            counts[c] += 1
            size += 1
        p += 1
    return p, size


def solve_exact(instance: Instance, budget: int | None = None):
    """Return ``(report, program)`` for an optimal schedule.

    Every decision flushes its color completely, so consecutive decisions
    always differ and the cost is simply the number of decisions.
    """
    if instance.m != 1:
        raise InvalidInstance("solve_exact handles a single server; see multiserver")
    budget = default_budget() if budget is None else budget
    seq, k, C = instance.sequence, instance.k, instance.C

    counts = [0] * C
    p, size = _admit(seq, k, 0, counts, 0, None)
    start = (p, tuple(counts))

    memo: dict = {}

    def best(state):
        hit = memo.get(state)
        if hit is not None:
            return hit[0]
        if len(memo) >= budget:
            raise BudgetExceeded(len(memo))
        p, counts = state
        size = sum(counts)
        if size == 0:
            memo[state] = (0, None)
            return 0
        best_cost, best_color = None, None
        for c, cnt in enumerate(counts):
            if not cnt:
                continue
            nxt = list(counts)
            nxt[c] = 0
            q, _ = _admit(seq, k, p, nxt, size - cnt, c)
            cost = 1 + best((q, tuple(nxt)))
            if best_cost is None or cost < best_cost:
                best_cost, best_color = cost, c
        memo[state] = (best_cost, best_color)
        return best_cost

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * instance.n + 1000))
    try:
        best(start)
    finally:
        sys.setrecursionlimit(limit)

    program = []
    state = start
    while True:
        _, color = memo[state]
        if color is None:
            break
        program.append(color)
        p, counts = state
        nxt = list(counts)
        size = sum(counts) - nxt[color]
        nxt[color] = 0
        q, _ = _admit(seq, k, p, nxt, size, color)
        state = (q, tuple(nxt))
    report, _ = simulate(instance, program)
    return report, program


def solve_bruteforce(instance: Instance, max_n: int = 8):
    """Minimum run count over every feasible permutation of the items.

    Enumerates exactly the permutations with ``order[t] <= t + k - 1`` by
    extending prefixes position by position; no cost-based pruning.
    Returns ``(report, order)``.
    """
    n, k, seq = instance.n, instance.k, instance.sequence
    if n > max_n:
        raise BudgetExceeded(0, f"brute force limited to n <= {max_n}, got n = {n}")

    used = [False] * n
    order: list[int] = []
    best = [n + 1, None]

    def extend(t, last, cost):
        if t == n:
            if cost < best[0]:
                best[0], best[1] = cost, list(order)
            return
        for item in range(min(n, t + k)):
            if used[item]:
                continue
            used[item] = True
            order.append(item)
            c = seq[item]
            extend(t + 1, c, cost + (c != last))
            order.pop()
            used[item] = False

    extend(0, None, 0)
    runs = run_lengths([seq[i] for i in best[1]])
    return CostReport(best[0], runs, min(n, k)), best[1]
