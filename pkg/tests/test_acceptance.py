"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with the measured numbers,
straight to the terminal so it shows up without ``-s``.
"""

import gc
import itertools
import math
import random
import time

import numpy as np
import pytest

from bufsort.core import Instance, canonicalize, cost_of_order, simulate
from bufsort.dp2 import dp2_reconstruct, dp2_solve, history_stats
from bufsort.exact import solve_bruteforce, solve_exact
from bufsort.gen import (
    ReductionParams,
    audit_reduction,
    build_partition_witness,
    gen_3partition_reduction,
    gen_lfd_adversary,
    gen_multiserver_gadget,
    gen_random,
)
from bufsort.heuristics import run_fifo, run_lfd, run_lru
from bufsort.lp import build_lp, export_lp, lp_round, solve_exported, solve_lp
from bufsort.multiserver import solve_exact_multi

SWITCH_CONSTANT = 5  # rounded switches <= SWITCH_CONSTANT / eps * LP value


@pytest.fixture
def report(pytestconfig):
    """Call ``report(ok, label, detail)`` once per criterion."""
    capman = pytestconfig.pluginmanager.getplugin("capturemanager")

    def emit(ok, label, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        with capman.global_and_fixture_disabled():
            print("\n" + line)
        return ok

    return emit


def lp_corpus():
    """50 seeded instances with n <= 12, C <= 4, k <= 3."""
    rng = random.Random(4)
    out = []
    for _ in range(50):
        n = rng.randint(1, 12)
        C = rng.randint(1, min(4, n))
        out.append(gen_random(n, C, rng.randint(1, 3), seed=rng.randrange(2**32)))
    return out


@pytest.fixture(scope="module")
def lp_results():
    results = []
    for inst in lp_corpus():
        frac = solve_lp(build_lp(inst))
        results.append((inst, frac, solve_exact(inst)[0].switches))
    return results


def test_1_exact_matches_bruteforce(report):
    start = time.perf_counter()
    cases = mismatches = 0
    for n in range(1, 8):
        for raw in itertools.product(range(3), repeat=n):
            for k in (1, 2, 3):
                _, inst = canonicalize(raw, k)
                cases += 1
                if solve_exact(inst)[0].switches != solve_bruteforce(inst)[0].switches:
                    mismatches += 1
    elapsed = time.perf_counter() - start
    ok = report(mismatches == 0 and elapsed < 120, "1 exact = brute force",
                f"{cases} cases, {mismatches} mismatches, {elapsed:.1f}s (limit 120s)")
    assert ok


def test_2_dp2_correct(report):
    start = time.perf_counter()
    cases = bad = 0

    def check(inst, want):
        res = dp2_solve(inst)
        order = dp2_reconstruct(inst, res)
        return res.cost == want and cost_of_order(inst, order).switches == want

    for n in range(1, 9):
        for raw in itertools.product(range(3), repeat=n):
            _, inst = canonicalize(raw, 2)
            cases += 1
            bad += not check(inst, solve_bruteforce(inst)[0].switches)
    rng = random.Random(2)
    for _ in range(1000):
        n = rng.randint(1, 14)
        _, inst = canonicalize([rng.randrange(5) for _ in range(n)], 2)
        cases += 1
        bad += not check(inst, solve_bruteforce(inst, max_n=14)[0].switches)
    elapsed = time.perf_counter() - start
    ok = report(bad == 0 and elapsed < 300, "2 dp2 = brute force, reconstruction feasible",
                f"{cases} cases, {bad} failures, {elapsed:.1f}s (limit 300s)")
    assert ok


def test_3_dp2_linear(report):
    sizes = [100_000, 200_000, 400_000, 1_000_000]
    insts = [gen_random(n, 100, 2, seed=n) for n in sizes]
    times = [math.inf] * len(sizes)
    worst_h = 0.0
    # timed like timeit: best of five with the cyclic collector paused; the
    # sizes are interleaved so a slow stretch of the machine hits all of them
    for rep in range(5):
        for j, inst in enumerate(insts):
            gc.collect()
            gc.disable()
            try:
                start = time.perf_counter()
                res = dp2_solve(inst)
                times[j] = min(times[j], time.perf_counter() - start)
            finally:
                gc.enable()
            if rep == 0:
                worst_h = max(worst_h, history_stats(res.history)["entries"] / inst.n)
    ratios = [b / a for a, b in zip(times, times[1:])]
    ok = report(max(ratios) <= 3 and worst_h <= 7, "3 dp2 linear time",
                f"times {[round(t, 3) for t in times]}s, ratios {[round(r, 2) for r in ratios]} "
                f"(limit 3), history entries <= {worst_h:.2f} n (limit 7n)")
    assert ok


def test_4_lp_sandwich(report, lp_results, tmp_path):
    worst = 0.0
    for inst, frac, best in lp_results:
        low = inst.C - frac.objective
        high = frac.objective - best
        worst = max(worst, low, high)
        assert frac.is_feasible()
    gaps = []
    for i, (inst, frac, _) in enumerate(lp_results[:5]):
        path = export_lp(frac.model, tmp_path / f"spot{i}.lp")
        gaps.append(abs(solve_exported(path) - frac.objective))
    ok = report(worst <= 1e-6 and max(gaps) <= 1e-6, "4 C <= LP <= OPT",
                f"{len(lp_results)} instances, worst bound violation {worst:.2e}; "
                f"HiGHS vs built-in simplex on 5 exports: max gap {max(gaps):.2e} (tol 1e-6)")
    assert ok


def test_5_rounding(report, lp_results):
    eps = 0.1
    worst_ratio, worst_peak, failures = 0.0, 0.0, 0
    for inst, frac, _ in lp_results:
        rep = lp_round(inst, frac, eps)
        k_aug = math.ceil((inst.k - 1) / 0.3) + 1
        try:
            replay, _ = simulate(inst.with_k(k_aug), rep.program)
        except Exception:
            failures += 1
            continue
        bound = (inst.k - 1) / (0.5 - 2 * eps)
        failures += rep.augmented_k != k_aug or rep.peak_occupancy > bound + 1e-9
        failures += replay.switches != rep.replay_switches
        worst_ratio = max(worst_ratio, rep.switches / frac.objective)
        worst_peak = max(worst_peak, rep.peak_occupancy / bound if bound else 0.0)
    limit = SWITCH_CONSTANT / eps
    ok = report(failures == 0 and worst_ratio <= limit, "5 LP rounding guarantees",
                f"{len(lp_results)} instances, {failures} failures; peak/bound <= {worst_peak:.2f}; "
                f"worst switches/LP = {worst_ratio:.2f} <= {SWITCH_CONSTANT}/eps = {limit:g}")
    assert ok


def test_6_lfd_lower_bound(report):
    start = time.perf_counter()
    rows, ok = [], True
    for n in (2, 3, 4, 5):
        inst, witness = gen_lfd_adversary(n, n ** 3)
        prog = run_lfd(inst)
        lfd = simulate(inst, prog)[0].switches
        wit = simulate(inst, witness)[0].switches
        target = n * (n + 1) // 2
        # the first choice matches the construction, so the equality is
        # checked on color changes after that first choice (runs - 1)
        ok &= prog[0] == 1 and lfd - 1 == target and lfd >= target
        ok &= wit <= n + 1 and lfd / wit >= n / 2
        rows.append(f"n={n}: first={prog[0]} runs={lfd} changes={lfd - 1} "
                    f"(n(n+1)/2={target}) witness={wit} ratio={lfd / wit:.2f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 30
    report(ok, "6 LFD lower bound", "; ".join(rows) + f"; {elapsed:.2f}s")
    assert ok


def test_7_reduction_witness(report):
    start = time.perf_counter()
    params = ReductionParams(2, 18, (5, 5, 6, 6, 7, 7))
    red = gen_3partition_reduction(params)
    problems = audit_reduction(red)
    prog = build_partition_witness(red, [[0, 2, 4], [1, 3, 5]])
    cost = simulate(red.instance, prog)[0].switches
    elapsed = time.perf_counter() - start
    C = params.color_count
    ok = report(not problems and cost == C + 6 and C == 12987 and elapsed < 60,
                "7 reduction witness",
                f"n={red.instance.n}, C={C}, audit problems={len(problems)}, "
                f"witness cost {cost} (C+6 = {C + 6}), {elapsed:.2f}s")
    assert ok


def test_8_multiserver_gadget(report):
    start = time.perf_counter()
    checked = bad = degenerate = 0
    for n in range(1, 5):
        for raw in itertools.product(range(2), repeat=n):
            _, rho = canonicalize(raw, 2)
            g = gen_multiserver_gadget(rho, 2)
            two = solve_exact_multi(Instance(g.sequence, 2, 2))[0]
            one = solve_exact(rho)[0].switches
            if n == 1:
                # no gap to fill: the gadget is the input itself
                degenerate += 1
                bad += g.sequence != rho.sequence or two != one
                continue
            checked += 1
            bad += two != one + 1
    elapsed = time.perf_counter() - start
    ok = report(bad == 0 and elapsed < 120, "8 multi-server gadget opt2 = opt1 + 1",
                f"{checked} inputs with n = 2..4 checked, {bad} mismatches; "
                f"{degenerate} single-item inputs get no fresh color; {elapsed:.2f}s")
    assert ok


def test_9_heuristics_sanity(report, lp_results):
    below = infeasible = 0
    worst = {}
    for inst, _, best in lp_results:
        for name, policy in (("lfd", run_lfd), ("fifo", run_fifo), ("lru", run_lru)):
            try:
                cost = simulate(inst, policy(inst))[0].switches
            except Exception:
                infeasible += 1
                continue
            below += cost < best
            worst[name] = max(worst.get(name, 0), cost / best)
    ok = report(below == 0 and infeasible == 0, "9 heuristics >= optimum",
                f"{len(lp_results)} instances x 3 policies, {below} below optimum, "
                f"{infeasible} infeasible; worst ratios "
                + ", ".join(f"{k}={v:.2f}" for k, v in worst.items()))
    assert ok
