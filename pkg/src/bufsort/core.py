"""Instances, schedules and the buffer simulator.

Items are 0-based input positions throughout the package.  A serving order
``order`` lists, for each output position ``t``, the input position of the
item served there; it is feasible for buffer size ``k`` iff
``order[t] <= t + k - 1`` for every ``t``.
"""

from __future__ import annotations

import csv
import io
import json
from collections import deque
from dataclasses import dataclass, field
from itertools import groupby
from pathlib import Path
from typing import Hashable, Iterable, Sequence

from .errors import DeadDecision, IncompleteProgram, InfeasibleOrder, InvalidInstance

CSV_FIELDS = (
    "instance_id",
    "n",
    "C",
    "k",
    "algorithm",
    "switches",
    "peak_occupancy",
    "wall_time_ms",
)


@dataclass(frozen=True)
class Instance:
    """A color sequence with buffer size ``k`` and ``m`` servers.

    Colors must be the dense ids ``0..C-1``; use :func:`canonicalize` to
    build an instance from arbitrary labels.
    """

    sequence: tuple[int, ...]
    k: int
    m: int = 1
    labels: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        seq = tuple(int(c) for c in self.sequence)
        object.__setattr__(self, "sequence", seq)
        if not seq:
            raise InvalidInstance("sequence must contain at least one item")
        if self.k < 1:
            raise InvalidInstance(f"buffer size must be positive, got {self.k}")
        if self.m < 1:
            raise InvalidInstance(f"server count must be positive, got {self.m}")
        present = set(seq)
        if min(present) < 0 or max(present) != len(present) - 1:
            raise InvalidInstance("color ids must form the contiguous range 0..C-1")
        if self.labels is not None and len(self.labels) != len(present):
            raise InvalidInstance("label table does not match the color count")

    @property
    def n(self) -> int:
        return len(self.sequence)

    @property
    def C(self) -> int:
        return max(self.sequence) + 1

    def with_k(self, k: int) -> Instance:
        return Instance(self.sequence, k, self.m, self.labels)

    def label_of(self, color: int):
        return color if self.labels is None else self.labels[color]

    def to_dict(self) -> dict:
        seq = list(self.sequence)
        if self.labels is not None:
            seq = [self.labels[c] for c in seq]
        return {"k": self.k, "m": self.m, "sequence": seq}


@dataclass(frozen=True)
class CostReport:
    switches: int
    run_lengths: tuple[tuple[int, int], ...]
    peak_occupancy: int

    def to_dict(self) -> dict:
        return {
            "switches": self.switches,
            "run_lengths": [list(r) for r in self.run_lengths],
            "peak_occupancy": self.peak_occupancy,
        }

    def csv_row(self, instance: Instance, instance_id: str, algorithm: str,
                wall_time_ms: float = 0.0) -> dict:
        return {
            "instance_id": instance_id,
            "n": instance.n,
            "C": instance.C,
            "k": instance.k,
            "algorithm": algorithm,
            "switches": self.switches,
            "peak_occupancy": self.peak_occupancy,
            "wall_time_ms": round(wall_time_ms, 3),
        }


def canonicalize(raw_sequence: Iterable[Hashable], k: int = 1, m: int = 1):
    """Map labels to dense ids in first-appearance order.

    Returns ``(labels, instance)`` where ``labels[id]`` is the original label.
    """
    ids: dict = {}
    seq = []
    for label in raw_sequence:
        seq.append(ids.setdefault(label, len(ids)))
    if not seq:
        raise InvalidInstance("empty sequence")
    labels = tuple(ids)
    return labels, Instance(tuple(seq), k, m, labels)


def count_runs(colors: Sequence[int]) -> int:
    return sum(1 for _ in groupby(colors))


def run_lengths(colors: Sequence[int]) -> tuple[tuple[int, int], ...]:
    return tuple((c, sum(1 for _ in g)) for c, g in groupby(colors))


class Buffer:
    """Mutable replay of the buffer process for one instance.

    ``serve(color)`` removes every buffered item of ``color`` and keeps
    admitting input, serving arrivals of ``color`` on the spot, until the
    buffer is full again or the input is exhausted.
    """

    def __init__(self, sequence: Sequence[int], k: int):
        self.sequence = sequence
        self.k = k
        self.pending: dict[int, deque] = {}
        self.size = 0
        self.pointer = 0
        self.peak = 0
        self._admit(None, [])

    def __contains__(self, color) -> bool:
        return color in self.pending

    def __len__(self) -> int:
        return self.size

    @property
    def done(self) -> bool:
        return self.size == 0 and self.pointer >= len(self.sequence)

    def colors(self):
        return self.pending.keys()

    def items(self, color) -> deque:
        return self.pending[color]

    def _admit(self, color, served: list):
        seq = self.sequence
        n = len(seq)
        while self.size < self.k and self.pointer < n:
            c = seq[self.pointer]
            if c == color:
                served.append(self.pointer)
            else:
                q = self.pending.get(c)
                if q is None:
                    q = self.pending[c] = deque()
                q.append(self.pointer)
                self.size += 1
            self.pointer += 1
        if self.size > self.peak:
            self.peak = self.size

    def serve(self, color) -> list[int]:
        q = self.pending.pop(color)
        served = list(q)
        self.size -= len(q)
        self._admit(color, served)
        return served


def simulate(instance: Instance, program: Sequence[int]) -> tuple[CostReport, list[int]]:
    """Replay a color program; return its cost report and serving order."""
    buf = Buffer(instance.sequence, instance.k)
    order: list[int] = []
    for step, color in enumerate(program):
        if color not in buf:
            raise DeadDecision(step, color)
        order.extend(buf.serve(color))
    if len(order) < instance.n:
        raise IncompleteProgram(instance.n - len(order))
    colors = [instance.sequence[i] for i in order]
    runs = run_lengths(colors)
    return CostReport(len(runs), runs, buf.peak), order


def check_order(instance: Instance, order: Sequence[int]) -> None:
    n, k = instance.n, instance.k
    if len(order) != n or sorted(order) != list(range(n)):
        raise InfeasibleOrder(-1, None, "order is not a permutation of the items")
    for t, item in enumerate(order):
        if item > t + k - 1:
            raise InfeasibleOrder(t, item)


def cost_of_order(instance: Instance, order: Sequence[int]) -> CostReport:
    """Check feasibility of a serving order and count its color runs.

    Admission is forced, so the occupancy of any feasible order is min(n, k).
    """
    check_order(instance, order)
    runs = run_lengths([instance.sequence[i] for i in order])
    return CostReport(len(runs), runs, min(instance.n, instance.k))


def order_to_program(instance: Instance, order: Sequence[int]) -> list[int]:
    """Compress a feasible order into one decision per maximal color run.

    A run whose items were all swept up by an earlier flush of the same
    color is dropped, so the program always replays; its cost never exceeds
    that of ``order`` and matches it whenever ``order`` is optimal.
    """
    check_order(instance, order)
    seq = instance.sequence
    buf = Buffer(seq, instance.k)
    program = []
    for color, _ in groupby(seq[i] for i in order):
        if color in buf:
            program.append(color)
            buf.serve(color)
    if not buf.done:
        raise IncompleteProgram(buf.size + len(seq) - buf.pointer)
    return program


# ---------------------------------------------------------------- file I/O


def instance_from_dict(data: dict) -> Instance:
    try:
        raw = data["sequence"]
        k = int(data["k"])
        m = int(data.get("m", 1))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInstance(f"malformed instance: {exc}") from exc
    _, inst = canonicalize(raw, k, m)
    return inst


def parse_text(text: str) -> Instance:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InvalidInstance("empty instance file")
    head = lines[0].split()
    try:
        k = int(head[0])
        m = int(head[1]) if len(head) > 1 else 1
    except (IndexError, ValueError) as exc:
        raise InvalidInstance(f"bad header line {lines[0]!r}") from exc
    _, inst = canonicalize(lines[1:], k, m)
    return inst


def load_instance(path) -> Instance:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInstance(f"{path}: {exc}") from exc
        return instance_from_dict(data)
    return parse_text(text)


def save_instance(instance: Instance, path) -> None:
    path = Path(path)
    if path.suffix == ".json":
        # streamed: reduction instances run to tens of thousands of items
        with path.open("w") as fh:
            fh.write('{"k": %d, "m": %d, "sequence": [' % (instance.k, instance.m))
            for idx, c in enumerate(instance.sequence):
                if idx:
                    fh.write(", ")
                fh.write(json.dumps(instance.label_of(c)))
            fh.write("]}\n")
    else:
        with path.open("w") as fh:
            fh.write(f"{instance.k} {instance.m}\n")
            for c in instance.sequence:
                fh.write(f"{instance.label_of(c)}\n")


def report_csv(rows: Iterable[dict], fields: Sequence[str] = CSV_FIELDS) -> str:
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=list(fields), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return out.getvalue()
