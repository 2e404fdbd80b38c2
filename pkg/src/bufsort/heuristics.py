"""Greedy strategies: longest forward distance, FIFO and LRU.

Every decision of a program is a forced switch (the buffer is full, or the
input is exhausted, and holds nothing of the current color), so a strategy
only has to say which buffered color to flush next.
"""

from __future__ import annotations

from typing import Callable

from .core import Buffer, Instance
from .errors import InvalidInstance


def next_occurrence(sequence) -> list[int]:
    """``nxt[i]`` is the next position holding the color of ``i``, or ``len(sequence)``."""
    n = len(sequence)
    nxt = [n] * n
    seen: dict[int, int] = {}
    for i in range(n - 1, -1, -1):
        c = sequence[i]
        nxt[i] = seen.get(c, n)
        seen[c] = i
    return nxt


def run_policy(instance: Instance, choose: Callable[[Buffer, int], int]) -> list[int]:
    if instance.m != 1:
        raise InvalidInstance("heuristics handle a single server")
    buf = Buffer(instance.sequence, instance.k)
    program: list[int] = []
    while not buf.done:
        color = choose(buf, len(program))
        program.append(color)
        buf.serve(color)
    return program


def run_lfd(instance: Instance) -> list[int]:
    """Flush the color whose buffered item reappears farthest in the future.

    A color's distance is the largest next-occurrence over its buffered
    items, which is that of its newest buffered item.  Ties go to the lowest
    color id.
    """
    nxt = next_occurrence(instance.sequence)

    def choose(buf, _):
        return min(buf.colors(), key=lambda c: (-nxt[buf.items(c)[-1]], c))

    return run_policy(instance, choose)


def run_fifo(instance: Instance) -> list[int]:
    def choose(buf, _):
        return min(buf.colors(), key=lambda c: buf.items(c)[0])

    return run_policy(instance, choose)


def run_lru(instance: Instance) -> list[int]:
    last_used: dict[int, int] = {}

    def choose(buf, step):
        c = min(buf.colors(), key=lambda c: (last_used.get(c, -1), buf.items(c)[0]))
        last_used[c] = step
        return c

    return run_policy(instance, choose)


HEURISTICS = {"lfd": run_lfd, "fifo": run_fifo, "lru": run_lru}
