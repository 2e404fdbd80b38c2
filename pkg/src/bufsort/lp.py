"""Interval LP relaxation and its rounding under buffer augmentation.

Time runs over steps ``1..T`` with ``T = n + k - 1``; item ``i`` (1-based)
enters the buffer at step ``i``.  Variable ``y[c, s, t]`` says that ``[s, t]``
is a maximal interval during which the server color is *not* ``c``.  The
objective is ``2 - C + sum(y)``.  Rows:

``r1_c_i``  intervals of ``c`` touching ``i`` or starting at ``i + 1``: ``<= 1``
``r2_i``    intervals covering ``i`` over all colors: ``== C - 1``
``r3_i``    buffered items after step ``i <= n - 1``: ``<= k - 1``
``r4_c``    arrivals of ``c`` inside intervals ending at ``T``: ``== 0``
"""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse

from . import simplex
from .core import Instance, order_to_program, simulate
from .errors import BadEpsilon, DeadDecision, InvalidInstance, ModelTooLarge

DEFAULT_MAX_COLUMNS = 200_000
FEAS_TOL = 1e-7


@dataclass
class LpModel:
    instance: Instance
    T: int
    columns: list[tuple[int, int, int]]
    index: dict[tuple[int, int, int], int]
    A_ub: sparse.csr_matrix
    b_ub: np.ndarray
    ub_names: list[str]
    A_eq: sparse.csr_matrix
    b_eq: np.ndarray
    eq_names: list[str]
    constant: float
    prefix: np.ndarray = field(repr=False)

    @property
    def n_columns(self) -> int:
        return len(self.columns)

    def arrivals(self, c: int, s: int, i: int) -> int:
        """Items of color ``c`` entering during steps ``s..i`` (inclusive)."""
        if s > i:
            return 0
        n = self.instance.n
        return int(self.prefix[c, min(i, n)] - self.prefix[c, min(s - 1, n)])


@dataclass
class FractionalSolution:
    model: LpModel
    vector: np.ndarray
    objective: float

    @property
    def y(self) -> dict[tuple[int, int, int], float]:
        cols = self.model.columns
        return {cols[j]: float(v) for j, v in enumerate(self.vector) if v > 1e-12}

    def violations(self) -> dict[str, float]:
        """Largest violation per row family (0 when satisfied)."""
        m = self.model
        ub = m.A_ub @ self.vector - m.b_ub
        eq = np.abs(m.A_eq @ self.vector - m.b_eq)
        out = {"nonneg": float(max(0.0, -self.vector.min(initial=0.0)))}
        for names, values in ((m.ub_names, ub), (m.eq_names, eq)):
            for name, v in zip(names, values):
                fam = name.split("_")[0]
                out[fam] = max(out.get(fam, 0.0), float(max(v, 0.0)))
        return out

    def is_feasible(self, tol: float = FEAS_TOL) -> bool:
        return all(v <= tol for v in self.violations().values())


def build_lp(instance: Instance, max_columns: int = DEFAULT_MAX_COLUMNS) -> LpModel:
    if instance.m != 1:
        raise InvalidInstance("the LP models a single server")
    n, k, C = instance.n, instance.k, instance.C
    T = n + k - 1
    n_cols = C * T * (T + 1) // 2
    if n_cols > max_columns:
        raise ModelTooLarge(f"{n_cols} columns exceeds the cap of {max_columns}")

    prefix = np.zeros((C, n + 1), dtype=np.int64)
    for i, c in enumerate(instance.sequence, start=1):
        prefix[c, i] = 1
    prefix = np.cumsum(prefix, axis=1)

    columns = [(c, s, t) for c in range(C) for s in range(1, T + 1) for t in range(s, T + 1)]
    index = {col: j for j, col in enumerate(columns)}

    model = LpModel(instance, T, columns, index, None, None, [], None, None, [],
                    2.0 - C, prefix)

    ub_rows, ub_cols, ub_vals, b_ub, ub_names = [], [], [], [], []
    eq_rows, eq_cols, eq_vals, b_eq, eq_names = [], [], [], [], []

    def ub_row(name, terms, rhs):
        r = len(b_ub)
        for j, v in terms:
            ub_rows.append(r)
            ub_cols.append(j)
            ub_vals.append(v)
        b_ub.append(rhs)
        ub_names.append(name)

    def eq_row(name, terms, rhs):
        r = len(b_eq)
        for j, v in terms:
            eq_rows.append(r)
            eq_cols.append(j)
            eq_vals.append(v)
        b_eq.append(rhs)
        eq_names.append(name)

    for c in range(C):
        for i in range(1, T + 1):
            terms = [(index[c, s, t], 1.0)
                     for s in range(1, min(i + 1, T) + 1)
                     for t in range(max(s, i), T + 1)]
            ub_row(f"r1_{c}_{i}", terms, 1.0)
    for i in range(1, T + 1):
        terms = [(index[c, s, t], 1.0)
                 for c in range(C) for s in range(1, i + 1) for t in range(i, T + 1)]
        eq_row(f"r2_{i}", terms, C - 1.0)
    for i in range(1, n):
        terms = []
        for c in range(C):
            for s in range(1, i + 1):
                a = model.arrivals(c, s, i)
                if a:
                    terms.extend((index[c, s, t], float(a)) for t in range(i, T + 1))
        ub_row(f"r3_{i}", terms, k - 1.0)
    for c in range(C):
        terms = [(index[c, s, T], float(model.arrivals(c, s, T)))
                 for s in range(1, T + 1) if model.arrivals(c, s, T)]
        eq_row(f"r4_{c}", terms, 0.0)

    model.A_ub = sparse.csr_matrix((ub_vals, (ub_rows, ub_cols)), shape=(len(b_ub), n_cols))
    model.b_ub = np.array(b_ub)
    model.ub_names = ub_names
    model.A_eq = sparse.csr_matrix((eq_vals, (eq_rows, eq_cols)), shape=(len(b_eq), n_cols))
    model.b_eq = np.array(b_eq)
    model.eq_names = eq_names
    return model


def solve_lp(model: LpModel, tol: float = simplex.PIVOT_TOL) -> FractionalSolution:
    """Optimal basic solution from the built-in dense simplex."""
    res = simplex.solve(
        np.ones(model.n_columns),
        model.A_ub.toarray(), model.b_ub,
        model.A_eq.toarray(), model.b_eq,
        tol=tol,
    )
    return FractionalSolution(model, res.x, res.objective + model.constant)


def objective_of(model: LpModel, vector) -> float:
    return float(np.sum(vector)) + model.constant


def occupancy(frac: FractionalSolution, c: int, j: int) -> float:
    """Fractional amount of color ``c`` buffered after step ``j``."""
    m = frac.model
    if not 1 <= j <= m.T:
        raise ValueError(f"step {j} outside 1..{m.T}")
    total = 0.0
    for s in range(1, j + 1):
        a = m.arrivals(c, s, j)
        if not a:
            continue
        for t in range(j, m.T + 1):
            total += a * frac.vector[m.index[c, s, t]]
    return total


# --------------------------------------------------------------- schedules


def step_colors(instance: Instance, program) -> list[int]:
    """Server color at each step ``1..T`` for a replayable program.

    The server stays on its color while the buffer fits in ``k - 1`` items
    (or, once the input is exhausted, until it is empty) and otherwise moves
    to the next decision.  Entry 0 is unused.
    """
    n, k, seq = instance.n, instance.k, instance.sequence
    T = n + k - 1
    counts = [0] * instance.C
    size = 0
    program = list(program)
    r = 0
    cur = program[0]
    cols = [None] * (T + 1)
    for i in range(1, T + 1):
        if i <= n:
            counts[seq[i - 1]] += 1
            size += 1
        size -= counts[cur]
        counts[cur] = 0
        if (i <= n and size > k - 1) or (i > n and size > 0):
            r += 1
            if r >= len(program) or counts[program[r]] == 0:
                raise DeadDecision(r, program[r] if r < len(program) else None)
            cur = program[r]
            size -= counts[cur]
            counts[cur] = 0
        cols[i] = cur
    if size:
        raise DeadDecision(r, None)
    return cols


def integral_solution(model: LpModel, program) -> FractionalSolution:
    """0/1 vector of maximal non-c intervals for a replayable program."""
    cols = step_colors(model.instance, program)
    T = model.T
    vec = np.zeros(model.n_columns)
    for c in range(model.instance.C):
        s = None
        for i in range(1, T + 2):
            inside = i <= T and cols[i] != c
            if inside and s is None:
                s = i
            elif not inside and s is not None:
                vec[model.index[c, s, i - 1]] = 1.0
                s = None
    return FractionalSolution(model, vec, objective_of(model, vec))


# ------------------------------------------------------------------- export


def _wrap(terms: list[str], width: int = 8) -> str:
    lines = [" ".join(terms[i:i + width]) for i in range(0, len(terms), width)]
    return "\n   ".join(lines)


def _expr(row: sparse.csr_matrix, names: list[str]) -> list[str]:
    out = []
    for j, v in zip(row.indices, row.data):
        coef = "" if v == 1 else f"{v:g} "
        out.append(f"+ {coef}{names[j]}")
    return out or ["0 " + names[0]]


def column_name(col: tuple[int, int, int]) -> str:
    return "y_%d_%d_%d" % col


def export_lp(model: LpModel, path) -> Path:
    """Write the model in CPLEX LP text format."""
    path = Path(path)
    names = [column_name(col) for col in model.columns]
    inst = model.instance
    with path.open("w") as fh:
        fh.write(f"\\ sorting buffer LP  n={inst.n} k={inst.k} C={inst.C} T={model.T}\n")
        fh.write(f"\\ objective constant {model.constant:g}\n")
        fh.write("Minimize\n")
        obj = [f"+ {nm}" for nm in names]
        const = f" {'+' if model.constant >= 0 else '-'} {abs(model.constant):g}"
        fh.write(f" obj: {_wrap(obj)}{const}\n")
        fh.write("Subject To\n")
        for A, b, rnames, sense in ((model.A_ub, model.b_ub, model.ub_names, "<="),
                                    (model.A_eq, model.b_eq, model.eq_names, "=")):
            for r, name in enumerate(rnames):
                terms = _expr(A.getrow(r), names)
                fh.write(f" {name}: {_wrap(terms)} {sense} {b[r]:g}\n")
        fh.write("Bounds\n")
        for nm in names:
            fh.write(f" {nm} >= 0\n")
        fh.write("End\n")
    return path


_TERM = re.compile(r"([+-])\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][\w.]*)?")


@dataclass
class LpText:
    variables: list[str]
    objective: np.ndarray
    constant: float
    A_ub: np.ndarray
    b_ub: np.ndarray
    ub_names: list[str]
    A_eq: np.ndarray
    b_eq: np.ndarray
    eq_names: list[str]


def _parse_expr(expr: str):
    expr = expr.strip()
    if expr and expr[0] not in "+-":
        expr = "+ " + expr
    terms, constant = [], 0.0
    for sign, num, var in _TERM.findall(expr):
        coef = float(num) if num else 1.0
        if sign == "-":
            coef = -coef
        if var:
            terms.append((var, coef))
        elif num:
            constant += coef
    return terms, constant


def read_lp(path) -> LpText:
    """Parse the subset of CPLEX LP format written by :func:`export_lp`."""
    section = None
    statements: dict[str, list[str]] = {"obj": [], "st": [], "bounds": []}
    current: list[str] = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        low = line.lower()
        if low in ("minimize", "subject to", "bounds", "end"):
            if current:
                statements[section].append(" ".join(current))
                current = []
            section = {"minimize": "obj", "subject to": "st", "bounds": "bounds"}.get(low)
            continue
        if section == "bounds":
            statements["bounds"].append(line)
            continue
        if re.match(r"^[A-Za-z_][\w.]*\s*:", line) and current:
            statements[section].append(" ".join(current))
            current = []
        current.append(line)
    if current and section:
        statements[section].append(" ".join(current))

    obj_text = statements["obj"][0].split(":", 1)[1]
    obj_terms, constant = _parse_expr(obj_text)
    variables: list[str] = []
    where: dict[str, int] = {}
    for var, _ in obj_terms:
        where.setdefault(var, len(variables))
        if len(where) > len(variables):
            variables.append(var)

    rows = []
    for stmt in statements["st"]:
        name, body = stmt.split(":", 1)
        m = re.match(r"(.*?)(<=|>=|=)\s*([-+]?[\d.eE+-]+)\s*$", body)
        terms, _ = _parse_expr(m.group(1))
        for var, _ in terms:
            if var not in where:
                where[var] = len(variables)
                variables.append(var)
        rows.append((name.strip(), terms, m.group(2), float(m.group(3))))

    nv = len(variables)
    objective = np.zeros(nv)
    for var, coef in obj_terms:
        objective[where[var]] += coef
    ub, eq = [], []
    for name, terms, sense, rhs in rows:
        vec = np.zeros(nv)
        for var, coef in terms:
            vec[where[var]] += coef
        if sense == "<=":
            ub.append((name, vec, rhs))
        elif sense == ">=":
            ub.append((name, -vec, -rhs))
        else:
            eq.append((name, vec, rhs))
    return LpText(
        variables, objective, constant,
        np.array([v for _, v, _ in ub]).reshape(len(ub), nv),
        np.array([r for _, _, r in ub]), [nm for nm, _, _ in ub],
        np.array([v for _, v, _ in eq]).reshape(len(eq), nv),
        np.array([r for _, _, r in eq]), [nm for nm, _, _ in eq],
    )


def solve_exported(path) -> float:
    """Optimal objective of an exported model according to HiGHS."""
    from scipy.optimize import linprog

    lp = read_lp(path)
    res = linprog(lp.objective, A_ub=lp.A_ub if lp.A_ub.size else None,
                  b_ub=lp.b_ub if lp.b_ub.size else None,
                  A_eq=lp.A_eq if lp.A_eq.size else None,
                  b_eq=lp.b_eq if lp.b_eq.size else None,
                  bounds=(0, None), method="highs")
    if res.status != 0:
        raise RuntimeError(f"HiGHS failed: {res.message}")
    return float(res.fun) + lp.constant


# ----------------------------------------------------------------- rounding


@dataclass
class RoundingSeries:
    """Per-step coverage ``x``, end mass ``z`` and its running sum ``Z``.

    Arrays have shape ``(T + 1, C)``; row 0 is all zeros.
    """

    x: np.ndarray
    z: np.ndarray
    Z: np.ndarray
    epsilon: float
    marks: set[tuple[int, int]]

    def mark_steps(self, c: int) -> list[int]:
        return sorted(i for cc, i in self.marks if cc == c)


def rounding_series(frac: FractionalSolution, epsilon: float, tol: float = 1e-9) -> RoundingSeries:
    m = frac.model
    T, C = m.T, m.instance.C
    cover = np.zeros((T + 2, C))
    z = np.zeros((T + 1, C))
    for j, (c, s, t) in enumerate(m.columns):
        v = frac.vector[j]
        if v:
            cover[s, c] += v
            cover[t + 1, c] -= v
            z[t, c] += v
    x = np.cumsum(cover, axis=0)[: T + 1]
    x[0] = 0.0
    Z = np.cumsum(z, axis=0)
    marks = set()
    for c in range(C):
        last = 0.0
        for i in range(1, T + 1):
            if Z[i, c] - last >= epsilon - tol:
                marks.add((c, i))
                last = Z[i, c]
    return RoundingSeries(x, z, Z, epsilon, marks)


@dataclass
class Switch:
    step: int
    color: int
    kind: str  # "free", "mark" or "low"


@dataclass
class RoundingReport:
    program: list[int]
    order: list[int]
    switches: int
    replay_switches: int
    lp_value: float
    ratio: float
    augmented_k: int
    occupancy_bound: float
    peak_occupancy: int
    peak_after_input: int
    switch_log: list[Switch]
    series: RoundingSeries

    def to_dict(self) -> dict:
        return {
            "lp_value": self.lp_value,
            "rounded_switches": self.switches,
            "replay_switches": self.replay_switches,
            "ratio": self.ratio,
            "augmented_k": self.augmented_k,
            "occupancy_bound": self.occupancy_bound,
            "peak_occupancy": self.peak_occupancy,
            "program": self.program,
        }


def augmented_buffer(k: int, epsilon: float) -> int:
    return math.ceil((k - 1) / (0.5 - 2 * epsilon)) + 1


def lp_round(instance: Instance, frac: FractionalSolution, epsilon: float = 0.1,
             tol: float = 1e-9) -> RoundingReport:
    """Round a feasible LP solution into a schedule for an enlarged buffer.

    Each step: admit the next item, serve it if it has the current color,
    flush every marked color (ascending id), then flush the unique color
    whose coverage has dropped to ``1/2 - epsilon``, if any.  Flushing a
    color with nothing buffered is skipped and costs nothing.
    """
    if not 0 < epsilon < 0.25:
        raise BadEpsilon(f"epsilon must lie in (0, 1/4), got {epsilon}")
    m = frac.model
    n, k, T, seq = instance.n, instance.k, m.T, instance.sequence
    series = rounding_series(frac, epsilon, tol)
    marks_at: dict[int, list[int]] = {}
    for c, i in series.marks:
        marks_at.setdefault(i, []).append(c)

    buffer: dict[int, deque] = {}
    size = 0
    cur = None
    order: list[int] = []
    log: list[Switch] = []
    program: list[int] = []
    peak = peak_after = 0

    def flush(c, step, kind):
        nonlocal cur, size
        items = buffer.pop(c, None)
        if not items:
            return
        if c != cur:
            log.append(Switch(step, c, kind))
            program.append(c)
            cur = c
        order.extend(items)
        size -= len(items)

    for i in range(1, T + 1):
        if i <= n:
            buffer.setdefault(seq[i - 1], deque()).append(i - 1)
            size += 1
        if cur is not None and cur in buffer:
            flush(cur, i, "free")
        for c in sorted(marks_at.get(i, ())):
            flush(c, i, "mark")
        low = np.nonzero(series.x[i] <= 0.5 - epsilon + tol)[0]
        if low.size:
            flush(int(low[0]), i, "low")
        if i <= n - 1:
            peak = max(peak, size)
        peak_after = max(peak_after, size)
    if size:
        raise DeadDecision(len(program), None)

    k_aug = augmented_buffer(k, epsilon)
    wide = instance.with_k(k_aug)
    replay = order_to_program(wide, order)
    report, _ = simulate(wide, replay)
    lp_value = frac.objective
    return RoundingReport(
        program=replay,
        order=order,
        switches=len(log),
        replay_switches=report.switches,
        lp_value=lp_value,
        ratio=len(log) / lp_value,
        augmented_k=k_aug,
        occupancy_bound=(k - 1) / (0.5 - 2 * epsilon),
        peak_occupancy=peak,
        peak_after_input=peak_after,
        switch_log=log,
        series=series,
    )
