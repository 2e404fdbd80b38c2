"""Sorting buffer with several servers.

Each decision flushes one buffered color through one server.  It costs 1
when that server was last set to another color (or has never served) and
nothing otherwise.  With ``k = 1`` this is paging with ``m`` frames; with
``m = 1`` it is the plain problem.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Sequence

from .core import Buffer, CostReport, Instance, run_lengths
from .errors import BudgetExceeded, DeadDecision, IncompleteProgram, InvalidInstance
from .exact import default_budget

LIMITS = {"n": 10, "k": 3, "m": 2}


@dataclass(frozen=True)
class MultiDecision:
    server: int
    color: int


def simulate_multi(instance: Instance, program: Sequence[MultiDecision]) -> CostReport:
    m = instance.m
    buf = Buffer(instance.sequence, instance.k)
    servers: list[int | None] = [None] * m
    cost = 0
    colors = []
    for step, d in enumerate(program):
        if not 0 <= d.server < m:
            raise InvalidInstance(f"decision {step} names server {d.server}, only {m} exist")
        if d.color not in buf:
            raise DeadDecision(step, d.color)
        if servers[d.server] != d.color:
            cost += 1
            servers[d.server] = d.color
        colors.extend([d.color] * len(buf.serve(d.color)))
    if not buf.done:
        raise IncompleteProgram(instance.n - len(colors))
    return CostReport(cost, run_lengths(colors), buf.peak)


def solve_exact_multi(instance: Instance, budget: int | None = None, guard: bool = True):
    """Return ``(cost, program)`` for an optimal multi-server schedule.

    States are (input pointer, buffered color counts, server colors as a
    sorted multiset); servers are interchangeable, so which one holds which
    color does not matter.
    """
    n, k, m, C = instance.n, instance.k, instance.m, instance.C
    if guard and (n > LIMITS["n"] or k > LIMITS["k"] or m > LIMITS["m"]):
        raise BudgetExceeded(0, f"multi-server search is limited to n <= {LIMITS['n']}, "
                                f"k <= {LIMITS['k']}, m <= {LIMITS['m']}")
    budget = default_budget() if budget is None else budget
    seq = instance.sequence
    NONE = -1

    def admit(p, counts, size, color):
        while size < k and p < n:
            c = seq[p]
            if c != color:
                counts[c] += 1
                size += 1
            p += 1
        return p

    def moves(state):
        p, counts, servers = state
        size = sum(counts)
        for c, cnt in enumerate(counts):
            if not cnt:
                continue
            nxt = list(counts)
            nxt[c] = 0
            q = admit(p, nxt, size - cnt, c)
            counts_t = tuple(nxt)
            if c in servers:
                yield 0, c, c, (q, counts_t, servers)
                continue
            for old in sorted(set(servers)):
                s = list(servers)
                s[s.index(old)] = c
                yield 1, c, old, (q, counts_t, tuple(sorted(s)))

    counts0 = [0] * C
    p0 = admit(0, counts0, 0, None)
    start = (p0, tuple(counts0), tuple([NONE] * m))
    memo: dict = {}

    def best(state):
        hit = memo.get(state)
        if hit is not None:
            return hit[0]
        if len(memo) >= budget:
            raise BudgetExceeded(len(memo))
        if not any(state[1]):
            memo[state] = (0, None)
            return 0
        result = None
        for step_cost, c, old, nxt in moves(state):
            total = step_cost + best(nxt)
            if result is None or total < result[0]:
                result = (total, (c, old, nxt))
        memo[state] = result
        return result[0]

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * n + 1000))
    try:
        cost = best(start)
    finally:
        sys.setrecursionlimit(limit)

    program = []
    actual: list[int] = [NONE] * m
    state = start
    while memo[state][1] is not None:
        c, old, state = memo[state][1]
        server = actual.index(c) if c in actual else actual.index(old)
        actual[server] = c
        program.append(MultiDecision(server, c))
    return cost, program
