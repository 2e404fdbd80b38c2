"""Linear-time exact solver for buffer size two.

The solver sweeps the input once and maintains, for the prefix of the first
``i`` items, the optimal cost ``opt[i-1]`` and the set ``S_i`` of *finishing
colors*: colors ``c`` such that some optimal order of that prefix serves an
item of color ``c`` last.  With a buffer of two, an order of the prefix is
always "order of items ``1..x-1``, then items ``x+1..i`` in input order, then
item ``x``", which gives the update rules below.  With ``c = c_i``,
``p = c_{i-1}``, ``u = [c in S_{i-2}]`` and ``inc = Opt_{i-1} - Opt_{i-2}``:

* ``c == p``: nothing changes except the size of ``c``.
* ``c in S_{i-1}``: ``S_i = {c}``, plus ``p`` when ``u and inc``.
* ``c not in S_{i-1}`` and ``u and inc``: ``S_i = {p}``, cost unchanged.
* otherwise the cost grows by one; ``c`` enters, ``p`` stays (with size 1)
  iff exactly one of ``u``, ``inc`` holds, all other colors stay.

``S`` is stored as an array of sizes plus a doubly linked list of its
members, and every change is appended to a flat history log so that any
earlier ``S_i`` can be recovered by replaying it backwards.

History layout, per step: one opt-increase bit, then ``(color + 1, delta)``
pairs, then a ``0`` separator.  Colors are shifted by one so that the
separator is unambiguous.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass

from .core import Instance
from .errors import ReconstructionFailure, WrongBufferSize


class FinishSet:
    """Color sizes with a linked list over the nonzero entries."""

    def __init__(self, C: int):
        self.size = [0] * C
        head = C
        self._next = [head] * (C + 1)
        self._prev = [head] * (C + 1)
        self._head = head
        self.count = 0

    def __contains__(self, c) -> bool:
        return c is not None and self.size[c] > 0

    def __len__(self) -> int:
        return self.count

    def __iter__(self):
        node = self._next[self._head]
        while node != self._head:
            yield node
            node = self._next[node]

    def first(self):
        node = self._next[self._head]
        return None if node == self._head else node

    def set(self, c: int, value: int) -> int:
        """Set the size of ``c`` and return the signed change."""
        old = self.size[c]
        if old == value:
            return 0
        if old == 0:
            tail = self._prev[self._head]
            self._next[tail] = c
            self._prev[c] = tail
            self._next[c] = self._head
            self._prev[self._head] = c
            self.count += 1
        elif value == 0:
            nxt, prv = self._next[c], self._prev[c]
            self._next[prv] = nxt
            self._prev[nxt] = prv
            self.count -= 1
        self.size[c] = value
        return value - old

    def snapshot(self) -> dict[int, int]:
        return {c: self.size[c] for c in self}


@dataclass
class DpResult:
    """``opt[i]`` is the optimum for items ``0..i``; kept as an int64 array
    because prefix costs above 256 would otherwise each be a heap object."""

    opt: array
    sizes: list[int]
    finish_colors: list[int]
    history: list[int]

    @property
    def cost(self) -> int:
        return self.opt[-1]


def dp2_solve(instance: Instance) -> DpResult:
    if instance.k != 2:
        raise WrongBufferSize(f"dp2 requires buffer size 2, got {instance.k}")
    if instance.m != 1:
        raise WrongBufferSize("dp2 handles a single server")
    seq = instance.sequence
    n = len(seq)
    S = FinishSet(instance.C)
    size = S.size
    H: list[int] = []
    opt = array("q", bytes(8 * n))

    def change(c, value):
        delta = S.set(c, value)
        if delta:
            H.append(c + 1)
            H.append(delta)

    opt[0] = 1
    H.append(1)
    change(seq[0], 1)
    H.append(0)

    in_prev2 = False  # c_i in S_{i-2}, carried over from the previous step
    for i in range(1, n):
        c, p = seq[i], seq[i - 1]
        # look-ahead bit: c_{i+1} in S_{i-1}
        next_bit = i + 1 < n and size[seq[i + 1]] > 0
        u = in_prev2
        inc = opt[i - 1] - (opt[i - 2] if i >= 2 else 0)
        cost = opt[i - 1]
        mark = len(H)
        H.append(0)

        if c == p:
            if size[c]:
                change(c, size[c] + 1)
        elif size[c]:
            keep_p = u and inc
            grown = size[c] + 1
            for x in list(S):
                if x != c and not (keep_p and x == p):
                    change(x, 0)
            change(c, grown)
            if keep_p:
                change(p, 1)
        elif u and inc:
            for x in list(S):
                if x != p:
                    change(x, 0)
            change(p, 1)
        else:
            cost += 1
            H[mark] = 1
            change(p, 1 if u != bool(inc) else 0)
            change(c, 1)

        H.append(0)
        opt[i] = cost
        in_prev2 = next_bit

    return DpResult(opt, list(size), list(S), H)


def _step_spans(history: list[int]):
    """Yield ``(start, end)`` of each step's pairs, last step first.

    Walks backwards: a candidate position ``r`` holds the opt bit iff an even
    number of entries follow it within the step and it opens the log or
    follows a separator.  Delta entries share the parity but always follow a
    nonzero color entry.
    """
    end = len(history) - 1
    while end > 0:
        if history[end] != 0:
            raise ReconstructionFailure(f"history entry {end} is not a separator")
        r = end - 1
        while True:
            if r < 0:
                raise ReconstructionFailure("history log is truncated")
            if (end - 1 - r) % 2 == 0 and (r == 0 or history[r - 1] == 0):
                break
            r -= 2
        yield r + 1, end
        end = r - 1


def replay_history(history: list[int], C: int, steps: int) -> dict[int, int]:
    """Rebuild ``S`` after the first ``steps`` items by a forward replay."""
    S = FinishSet(C)
    pos = 0
    for _ in range(steps):
        pos += 1  # opt bit
        while history[pos] != 0:
            c = history[pos] - 1
            S.set(c, S.size[c] + history[pos + 1])
            pos += 2
        pos += 1
    return S.snapshot()


def history_stats(history: list[int]) -> dict[str, int]:
    """Count enter, leave and size-drop events in a history log."""
    stats = {"entries": len(history), "enter": 0, "leave": 0, "drop": 0, "grow": 0}
    sizes: dict[int, int] = {}
    pos = 0
    while pos < len(history):
        pos += 1
        while history[pos] != 0:
            c, d = history[pos] - 1, history[pos + 1]
            old = sizes.get(c, 0)
            new = old + d
            if old == 0:
                stats["enter"] += 1
            elif new == 0:
                stats["leave"] += 1
            elif d < 0:
                stats["drop"] += 1
            else:
                stats["grow"] += 1
            sizes[c] = new
            pos += 2
        pos += 1
    return stats


def dp2_reconstruct(instance: Instance, result: DpResult) -> list[int]:
    """Recover an optimal serving order from the final set and the log.

    Pick a finishing color, serve its last occurrence ``x`` at the end with
    items ``x+1..i`` just before it, roll ``S`` back to ``S_{x-1}`` and
    continue with the color that merges into what follows, if it is a
    finishing color of the shorter prefix.
    """
    seq = instance.sequence
    n = len(seq)
    if len(result.opt) != n:
        raise ReconstructionFailure("result does not belong to this instance")
    S = FinishSet(instance.C)
    for c in result.finish_colors:
        S.set(c, result.sizes[c])
    spans = _step_spans(result.history)
    H = result.history

    def undo_step():
        try:
            start, end = next(spans)
        except StopIteration:
            raise ReconstructionFailure("history log is shorter than the input") from None
        for pos in range(end - 2, start - 1, -2):
            c = H[pos] - 1
            value = S.size[c] - H[pos + 1]
            if value < 0:
                raise ReconstructionFailure(f"negative size for color {c}")
            S.set(c, value)

    order = [0] * n
    hi = n  # current prefix is items 0..hi-1
    color = S.first()
    while hi > 0:
        if color is None:
            raise ReconstructionFailure(f"empty finishing set for prefix {hi}")
        x = hi - 1
        while x >= 0 and seq[x] != color:
            x -= 1
        if x < 0:
            raise ReconstructionFailure(f"color {color} does not occur in prefix {hi}")
        order[hi - 1] = x
        for t in range(x + 1, hi):
            order[t - 1] = t
        # roll S back from S_hi to S_x (the set for the prefix 0..x-1)
        for _ in range(hi - x):
            undo_step()
        follow = seq[x + 1] if x + 1 < hi else color
        color = follow if follow in S else S.first()
        hi = x
    return order
