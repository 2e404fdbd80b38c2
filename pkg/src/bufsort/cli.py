"""``bufsort`` command line: gen, solve, lp, verify, bench.

Reports go to stdout as JSON (or CSV for bench), diagnostics to stderr.
Exit codes: 0 ok, 2 infeasible schedule, 3 search budget exceeded,
4 bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from . import core, dp2, exact, gen, heuristics, lp, multiserver
from .errors import (
    BadEpsilon,
    BudgetExceeded,
    BufsortError,
    DeadDecision,
    IncompleteProgram,
    InfeasibleOrder,
    InvalidInstance,
    ModelTooLarge,
    WitnessFailed,
    WrongBufferSize,
)

EXIT_OK, EXIT_INFEASIBLE, EXIT_BUDGET, EXIT_BAD_INPUT = 0, 2, 3, 4
ALGOS = ("exact", "dp2", "lfd", "fifo", "lru")
BENCH_FIELDS = core.CSV_FIELDS + ("lp_value", "ratio_to_exact", "error")


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _labels(instance, colors):
    return [instance.label_of(c) for c in colors]


def run_algo(instance, algo: str):
    """Return ``(report, program)`` where ``program`` lists color ids."""
    if algo == "exact":
        return exact.solve_exact(instance)
    if algo == "dp2":
        result = dp2.dp2_solve(instance)
        order = dp2.dp2_reconstruct(instance, result)
        return core.cost_of_order(instance, order), core.order_to_program(instance, order)
    if algo in heuristics.HEURISTICS:
        program = heuristics.HEURISTICS[algo](instance)
        report, _ = core.simulate(instance, program)
        return report, program
    raise InvalidInstance(f"unknown algorithm {algo!r}")


# ---------------------------------------------------------------- gen


def cmd_gen(args) -> int:
    out = Path(args.output) if args.output else None
    extra = {}
    if args.family == "random":
        inst = gen.gen_random(args.n, args.C, args.k, args.seed)
    elif args.family == "lfd-adversary":
        inst, witness = gen.gen_lfd_adversary(args.n, args.M)
        extra["witness"] = witness
    elif args.family == "reduction":
        a = [int(x) for x in args.a.split(",")]
        params = gen.ReductionParams(args.q, args.A, a, args.L, args.eps)
        red = gen.gen_3partition_reduction(params)
        inst = red.instance
        meta = red.metadata()
        if args.partition:
            groups = [[int(j) for j in g.split(",")] for g in args.partition.split(";")]
            extra["witness"] = gen.build_partition_witness(red, groups)
        if out is not None:
            out.with_suffix(".meta.json").write_text(json.dumps(meta, indent=2) + "\n")
        else:
            extra["metadata"] = meta
    else:  # gadget
        rho = core.load_instance(args.input)
        inst = gen.gen_multiserver_gadget(rho, args.k)
        inst = core.Instance(inst.sequence, inst.k, rho.m + 1)
    if out is None:
        _emit({**inst.to_dict(), **extra})
        return EXIT_OK
    core.save_instance(inst, out)
    if "witness" in extra:
        out.with_suffix(".witness.json").write_text(json.dumps({"program": extra["witness"]}) + "\n")
    print(f"wrote {out} (n={inst.n}, C={inst.C}, k={inst.k})", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------- solve


def cmd_solve(args) -> int:
    inst = core.load_instance(args.instance)
    if args.servers is not None:
        inst = core.Instance(inst.sequence, inst.k, args.servers, inst.labels)
    start = time.perf_counter()
    if inst.m > 1:
        if args.algo != "exact":
            raise InvalidInstance("only --algo exact supports several servers")
        cost, program = multiserver.solve_exact_multi(inst)
        elapsed = (time.perf_counter() - start) * 1e3
        schedule = {"program": [{"server": d.server, "color": inst.label_of(d.color)}
                                for d in program]}
        report = {"algorithm": "exact", "servers": inst.m, "switches": cost,
                  "wall_time_ms": round(elapsed, 3)}
    else:
        result, program = run_algo(inst, args.algo)
        elapsed = (time.perf_counter() - start) * 1e3
        schedule = {"program": _labels(inst, program)}
        if args.emit_order:
            _, order = core.simulate(inst, program)
            schedule["order"] = order
        report = {"algorithm": args.algo, **result.to_dict(), "wall_time_ms": round(elapsed, 3)}
        report["run_lengths"] = [[inst.label_of(c), cnt] for c, cnt in result.run_lengths]
        if args.format == "csv":
            row = result.csv_row(inst, Path(args.instance).stem, args.algo, elapsed)
            sys.stdout.write(core.report_csv([row]))
    if args.schedule:
        Path(args.schedule).write_text(json.dumps(schedule) + "\n")
    if args.format == "json":
        _emit({**report, **schedule})
    return EXIT_OK


# ---------------------------------------------------------------- lp


def cmd_lp(args) -> int:
    inst = core.load_instance(args.instance)
    model = lp.build_lp(inst, args.max_columns)
    if args.export:
        lp.export_lp(model, args.export)
        print(f"wrote {args.export} ({model.n_columns} columns)", file=sys.stderr)
    frac = lp.solve_lp(model)
    rounded = lp.lp_round(inst, frac, args.epsilon)
    report = rounded.to_dict()
    report["program"] = _labels(inst, report["program"])
    report["epsilon"] = args.epsilon
    _emit(report)
    return EXIT_OK


# ---------------------------------------------------------------- verify


def cmd_verify(args) -> int:
    inst = core.load_instance(args.instance)
    data = json.loads(Path(args.schedule).read_text())
    ids = {inst.label_of(c): c for c in range(inst.C)}

    def color_id(label):
        if label in ids:
            return ids[label]
        # JSON turns numeric labels of text instances into numbers
        if str(label) in ids:
            return ids[str(label)]
        raise InvalidInstance(f"unknown color {label!r}")

    if "order" in data and "program" not in data:
        report = core.cost_of_order(inst, [int(i) for i in data["order"]])
    elif data.get("program") and isinstance(data["program"][0], dict):
        m = max(inst.m, 1 + max(int(d["server"]) for d in data["program"]))
        inst = core.Instance(inst.sequence, inst.k, m, inst.labels)
        program = [multiserver.MultiDecision(int(d["server"]), color_id(d["color"]))
                   for d in data["program"]]
        report = multiserver.simulate_multi(inst, program)
    else:
        program = [color_id(c) for c in data.get("program", [])]
        report, _ = core.simulate(inst, program)
    _emit({"feasible": True, "switches": report.switches,
           "peak_occupancy": report.peak_occupancy})
    return EXIT_OK


# ---------------------------------------------------------------- bench


def bench_rows(paths, algos, with_lp: bool = False) -> list[dict]:
    rows = []
    for path in paths:
        try:
            inst = core.load_instance(path)
        except (BufsortError, OSError) as exc:
            rows.append({"instance_id": Path(path).stem, "error": f"{type(exc).__name__}: {exc}"})
            continue
        lp_value = ""
        if with_lp:
            try:
                lp_value = round(lp.solve_lp(lp.build_lp(inst)).objective, 9)
            except BufsortError as exc:
                lp_value = f"{type(exc).__name__}"
        best = None
        results = []
        for algo in algos:
            start = time.perf_counter()
            try:
                report, _ = run_algo(inst, algo)
            except BufsortError as exc:
                results.append((algo, None, 0.0, f"{type(exc).__name__}: {exc}"))
                continue
            elapsed = (time.perf_counter() - start) * 1e3
            results.append((algo, report, elapsed, ""))
            if algo == "exact":
                best = report.switches
        for algo, report, elapsed, error in results:
            base = {"instance_id": Path(path).stem, "n": inst.n, "C": inst.C, "k": inst.k,
                    "algorithm": algo, "lp_value": lp_value, "error": error}
            if report is not None:
                base.update(report.csv_row(inst, Path(path).stem, algo, elapsed))
                if best:
                    base["ratio_to_exact"] = round(report.switches / best, 6)
            rows.append(base)
    return rows


def cmd_bench(args) -> int:
    corpus = Path(args.corpus)
    paths = sorted(p for p in corpus.iterdir() if p.suffix in (".json", ".txt")
                   and not p.name.endswith((".meta.json", ".witness.json")))
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    for a in algos:
        if a not in ALGOS:
            raise InvalidInstance(f"unknown algorithm {a!r}")
    text = core.report_csv(bench_rows(paths, algos, args.lp), BENCH_FIELDS)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bufsort", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("family", choices=("random", "lfd-adversary", "reduction", "gadget"))
    g.add_argument("-o", "--output", help="instance file (.json or .txt); stdout if omitted")
    g.add_argument("--n", type=int, default=10)
    g.add_argument("--C", type=int, default=3)
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--M", type=int, help="block length for lfd-adversary (default n^3)")
    g.add_argument("--q", type=int, default=2)
    g.add_argument("--A", type=int, default=18)
    g.add_argument("--a", default="5,5,6,6,7,7", help="comma separated 3-Partition numbers")
    g.add_argument("--L", type=int)
    g.add_argument("--eps", type=int)
    g.add_argument("--partition", help="0-based groups, e.g. '0,2,4;1,3,5', to emit a witness")
    g.add_argument("--input", help="source instance for gadget")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve an instance")
    s.add_argument("instance")
    s.add_argument("--algo", choices=ALGOS, default="exact")
    s.add_argument("--exact", action="store_const", dest="algo", const="exact")
    s.add_argument("--servers", type=int)
    s.add_argument("--emit-order", action="store_true")
    s.add_argument("--schedule", help="write the schedule to this JSON file")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(func=cmd_solve)

    p = sub.add_parser("lp", help="solve the LP relaxation and round it")
    p.add_argument("instance")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--export", help="write the model in LP text format")
    p.add_argument("--max-columns", type=int, default=lp.DEFAULT_MAX_COLUMNS)
    p.set_defaults(func=cmd_lp)

    v = sub.add_parser("verify", help="replay a schedule against an instance")
    v.add_argument("instance")
    v.add_argument("schedule", help='JSON with "program" or "order"')
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="run algorithms over a corpus directory")
    b.add_argument("corpus")
    b.add_argument("--algos", default="exact,lfd,fifo,lru")
    b.add_argument("--lp", action="store_true", help="also record the LP value")
    b.add_argument("--out", help="CSV output file; stdout if omitted")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DeadDecision, IncompleteProgram, InfeasibleOrder, WitnessFailed) as exc:
        print(f"infeasible: {type(exc).__name__}: {exc}", file=sys.stderr)
        if args.command == "verify":
            _emit({"feasible": False, "error": type(exc).__name__, "detail": str(exc)})
        return EXIT_INFEASIBLE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InvalidInstance, WrongBufferSize, BadEpsilon, ModelTooLarge, OSError,
            json.JSONDecodeError, ValueError) as exc:
        print(f"bad input: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except BufsortError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
