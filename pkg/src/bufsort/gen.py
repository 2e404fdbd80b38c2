"""Instance generators.

* ``gen_random``: seeded uniform sequences that use every color.
* ``gen_lfd_adversary``: a family on which longest-forward-distance pays
  about ``n(n+1)/2`` while ``n+1`` runs suffice.
* ``gen_3partition_reduction``: the sorting-buffer instance built from a
  3-Partition instance, with its layout, plus ``build_partition_witness``
  which turns a valid partition into a schedule of cost ``C + 3q``.
* ``gen_multiserver_gadget``: interleaves a fresh color between items.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import Instance, simulate
from .errors import InvalidInstance, WitnessFailed


def gen_random(n: int, C: int, k: int, seed=None, m: int = 1) -> Instance:
    if not 1 <= C <= n:
        raise InvalidInstance(f"need 1 <= C <= n, got C={C}, n={n}")
    rng = np.random.default_rng(seed)
    seq = np.concatenate([np.arange(C), rng.integers(0, C, size=n - C)])
    rng.shuffle(seq)
    # relabel by first appearance so the result is already canonical
    _, first = np.unique(seq, return_index=True)
    rank = np.empty(C, dtype=np.int64)
    rank[np.argsort(first)] = np.arange(C)
    return Instance(tuple(rank[seq].tolist()), k, m)


# ---------------------------------------------------------------- LFD family


def _repeats(top: int) -> list[int]:
    """The block 2, 3, 3, ..., top repeated top-1 times."""
    return [j for j in range(2, top + 1) for _ in range(j - 1)]


def lfd_adversary_lines(n: int, M: int) -> list[list[int]]:
    """Line ``0`` is ``0^M``; line 1 opens with colors ``1..n``; line
    ``i >= 2`` opens with ``0, 1, ..., n-i+1``.  Each line then repeats color
    ``j`` ``j-1`` times for ``j = 2..`` its top color."""
    lines = [[0] * M, list(range(1, n + 1)) + _repeats(n)]
    for i in range(2, n + 1):
        top = n - i + 1
        lines.append(list(range(top + 1)) + _repeats(top))
    return lines


def gen_lfd_adversary(n: int, M: int | None = None):
    """Return ``(instance, witness_program)`` with buffer size ``M + n``."""
    if n < 2:
        raise InvalidInstance(f"adversary needs n >= 2, got {n}")
    if M is None:
        M = n ** 3
    if M < n ** 3:
        warnings.warn(f"M = {M} is below n^3 = {n ** 3}; the lower bound argument does not apply",
                      stacklevel=2)
    seq = [c for line in lfd_adversary_lines(n, M) for c in line]
    instance = Instance(tuple(seq), M + n)
    witness = list(range(n + 1))
    return instance, witness


# ---------------------------------------------------------------- reduction


@dataclass(frozen=True)
class ReductionParams:
    q: int
    A: int
    a: tuple[int, ...]
    L: int | None = None
    eps: int | None = None
    strict: bool = False

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        object.__setattr__(self, "a", a)
        q, A = self.q, self.A
        if q < 1 or A < 1:
            raise InvalidInstance("q and A must be positive")
        if len(a) != 3 * q or min(a) < 1:
            raise InvalidInstance(f"need {3 * q} positive numbers, got {list(a)}")
        if sum(a) != q * A:
            raise InvalidInstance(f"numbers sum to {sum(a)}, expected qA = {q * A}")
        if self.strict and not all(4 * x > A and 2 * x < A for x in a):
            raise InvalidInstance("strict form needs A/4 < a_j < A/2")
        if self.L is None:
            object.__setattr__(self, "L", 2 * q * q * A)
        if self.eps is None:
            object.__setattr__(self, "eps", q * q * A)
        if not q * q * A <= self.eps or 2 * self.eps > self.L:
            raise InvalidInstance(f"need q^2 A <= eps <= L/2, got eps={self.eps}, L={self.L}")

    @property
    def b(self) -> tuple[int, ...]:
        return tuple(self.L * x for x in self.a)

    @property
    def B(self) -> int:
        return self.L * self.A

    @property
    def V(self) -> int:
        return self.q * self.B + self.eps

    @property
    def M(self) -> int:
        return self.q * (self.q + 1) // 2 * self.A

    @property
    def color_count(self) -> int:
        q, B = self.q, self.B
        return 3 * q + (q + 1) + sum(i * B for i in range(1, q + 1)) + self.V - self.M

    def to_dict(self) -> dict:
        return {"q": self.q, "A": self.A, "a": list(self.a), "L": self.L, "eps": self.eps,
                "B": self.B, "V": self.V, "M": self.M, "C": self.color_count}


@dataclass
class ReductionInstance:
    """The instance plus where each segment sits.

    ``layout`` maps segment names (``beta``, ``gamma1``, ``delta1``,
    ``alpha1``, ...) to half-open index ranges; ``gamma_colors[i]`` and
    ``delta_colors[i]`` hold the fresh ids of segment ``i + 1``.  Primary
    color ``j`` of the 3-Partition instance is id ``j - 1``.
    """

    params: ReductionParams
    instance: Instance
    layout: dict[str, tuple[int, int]]
    gamma_colors: list[range] = field(default_factory=list)
    delta_colors: list[int] = field(default_factory=list)

    @property
    def primary_colors(self) -> range:
        return range(3 * self.params.q)

    def metadata(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "primary_colors": [0, 3 * self.params.q],
            "gamma_colors": [[r.start, r.stop] for r in self.gamma_colors],
            "delta_colors": self.delta_colors,
            "layout": {k: list(v) for k, v in self.layout.items()},
        }


def gen_3partition_reduction(params: ReductionParams) -> ReductionInstance:
    q, V = params.q, params.V
    primaries = range(3 * q)
    seq: list[int] = []
    layout: dict[str, tuple[int, int]] = {}
    gammas: list[range] = []
    deltas: list[int] = []
    fresh = 3 * q

    def segment(name, items):
        start = len(seq)
        seq.extend(items)
        layout[name] = (start, len(seq))

    segment("beta", (j for j in primaries for _ in range(params.b[j])))
    for i in range(1, q + 2):
        width = i * params.B if i <= q else V - params.M
        colors = range(fresh, fresh + width)
        fresh += width
        segment(f"gamma{i}", list(colors) + list(colors))
        gammas.append(colors)
        segment(f"delta{i}", [fresh] * V)
        deltas.append(fresh)
        fresh += 1
        segment(f"alpha{i}", (j for j in primaries for _ in range(params.a[j])))
    return ReductionInstance(params, Instance(tuple(seq), V), layout, gammas, deltas)


def audit_reduction(red: ReductionInstance) -> list[str]:
    """Check segment lengths and color multiplicities; return the problems found."""
    p, seq = red.params, red.instance.sequence
    problems = []
    counts = np.bincount(np.asarray(seq))

    def expect(what, got, want):
        if got != want:
            problems.append(f"{what}: got {got}, expected {want}")

    expect("color count", red.instance.C, p.color_count)
    expect("buffer size", red.instance.k, p.V)
    lo, hi = red.layout["beta"]
    expect("beta length", hi - lo, p.q * p.B)
    for j in red.primary_colors:
        expect(f"beta items of color {j}", seq[lo:hi].count(j), p.b[j])
        expect(f"total items of color {j}", int(counts[j]), p.b[j] + (p.q + 1) * p.a[j])
    for i in range(1, p.q + 2):
        width = i * p.B if i <= p.q else p.V - p.M
        lo, hi = red.layout[f"gamma{i}"]
        expect(f"gamma{i} length", hi - lo, 2 * width)
        colors = red.gamma_colors[i - 1]
        expect(f"gamma{i} colors", len(colors), width)
        if set(seq[lo:hi]) != set(colors) or any(counts[c] != 2 for c in colors):
            problems.append(f"gamma{i} colors are not exactly its own, each twice")
        lo, hi = red.layout[f"delta{i}"]
        d = red.delta_colors[i - 1]
        expect(f"delta{i} length", hi - lo, p.V)
        if set(seq[lo:hi]) != {d} or counts[d] != p.V:
            problems.append(f"delta{i} is not {p.V} copies of a private color")
        lo, hi = red.layout[f"alpha{i}"]
        expect(f"alpha{i} length", hi - lo, p.q * p.A)
        for j in red.primary_colors:
            expect(f"alpha{i} items of color {j}", seq[lo:hi].count(j), p.a[j])
    expect("sequence length", len(seq), max(hi for _, hi in red.layout.values()))
    return problems


def check_partition(params: ReductionParams, partition) -> list[list[int]]:
    """Validate ``partition`` (q triples of 0-based indices into ``a``)."""
    groups = [sorted(int(j) for j in g) for g in partition]
    flat = sorted(j for g in groups for j in g)
    if len(groups) != params.q or flat != list(range(3 * params.q)):
        raise InvalidInstance("partition must split the indices 0..3q-1 into q groups")
    for g in groups:
        total = sum(params.a[j] for j in g)
        if total != params.A:
            raise InvalidInstance(f"group {g} sums to {total}, expected {params.A}")
    return groups


def build_partition_witness(red: ReductionInstance, partition) -> list[int]:
    """Schedule of cost ``C + 3q`` from a valid partition.

    Before each ``gamma_i`` the primaries of group ``i`` are flushed, which
    frees exactly ``iB`` slots in total, so every fresh color is served
    once.  The primaries come back once more at the very end.
    """
    groups = check_partition(red.params, partition)
    program: list[int] = []
    for i, colors in enumerate(red.gamma_colors):
        if i < len(groups):
            program.extend(groups[i])
        program.extend(colors)
        program.append(red.delta_colors[i])
    program.extend(red.primary_colors)
    try:
        report, _ = simulate(red.instance, program)
    except Exception as exc:
        raise WitnessFailed(f"witness does not replay: {exc}") from exc
    want = red.params.color_count + 3 * red.params.q
    if report.switches != want:
        raise WitnessFailed(f"witness costs {report.switches}, expected {want}")
    return program


# ---------------------------------------------------------------- gadget


def gen_multiserver_gadget(rho: Instance, k: int | None = None) -> Instance:
    """Put ``k`` items of a fresh color between consecutive items of ``rho``."""
    k = rho.k if k is None else k
    x = rho.C
    seq: list[int] = []
    for idx, c in enumerate(rho.sequence):
        if idx:
            seq.extend([x] * k)
        seq.append(c)
    return Instance(tuple(seq), rho.k, rho.m)
