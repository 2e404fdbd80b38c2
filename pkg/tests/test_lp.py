import math
import random

import numpy as np
import pytest
from hypothesis import given, settings

from bufsort.core import Instance, simulate
from bufsort.errors import BadEpsilon, ModelTooLarge
from bufsort.exact import solve_exact
from bufsort.lp import (
    augmented_buffer,
    build_lp,
    export_lp,
    integral_solution,
    lp_round,
    occupancy,
    read_lp,
    rounding_series,
    solve_exported,
    solve_lp,
    step_colors,
)

from conftest import instances, random_instance


class TestModel:
    def test_smallest(self):
        m = build_lp(Instance((0,), 1))
        assert m.T == 1 and m.n_columns == 1 and m.constant == 1

    def test_column_count(self):
        m = build_lp(Instance((0, 1, 0), 2))
        assert m.T == 4 and m.n_columns == 20
        assert m.columns[:3] == [(0, 1, 1), (0, 1, 2), (0, 1, 3)]

    def test_arrivals(self):
        m = build_lp(Instance((0, 1, 1, 0), 2))
        assert m.arrivals(0, 1, 4) == 2
        assert m.arrivals(1, 2, 2) == 1
        assert m.arrivals(0, 5, 5) == 0  # no arrivals after the input

    def test_row_families(self):
        m = build_lp(Instance((0, 1, 0), 2))
        assert sum(nm.startswith("r1_") for nm in m.ub_names) == 2 * 4
        assert sum(nm.startswith("r3_") for nm in m.ub_names) == 2
        assert m.eq_names == ["r2_1", "r2_2", "r2_3", "r2_4", "r4_0", "r4_1"]

    def test_size_guard(self):
        with pytest.raises(ModelTooLarge):
            build_lp(Instance(tuple(range(10)), 3), max_columns=100)


class TestSolve:
    def test_monochromatic(self):
        assert solve_lp(build_lp(Instance((0, 0, 0), 2))).objective == pytest.approx(1)

    def test_small(self):
        frac = solve_lp(build_lp(Instance((0, 1, 0), 2)))
        assert frac.objective == pytest.approx(2)
        assert frac.is_feasible()


@settings(max_examples=40, deadline=None)
@given(instances(max_n=7, max_C=3, max_k=3))
def test_integral_solution_value_is_schedule_cost(inst):
    model = build_lp(inst)
    rep, prog = solve_exact(inst)
    y = integral_solution(model, prog)
    assert y.is_feasible()
    assert y.objective == pytest.approx(rep.switches)


@settings(max_examples=30, deadline=None)
@given(instances(max_n=7, max_C=3, max_k=3))
def test_sandwich(inst):
    frac = solve_lp(build_lp(inst))
    assert frac.is_feasible()
    assert inst.C - 1e-6 <= frac.objective <= solve_exact(inst)[0].switches + 1e-6


def test_occupancy_respects_capacity(rng):
    for _ in range(10):
        inst = random_instance(rng, 9, 3, 3)
        frac = solve_lp(build_lp(inst))
        m = frac.model
        for j in range(1, inst.n):
            assert sum(occupancy(frac, c, j) for c in range(inst.C)) <= inst.k - 1 + 1e-7
        for c in range(inst.C):
            ends = sum(m.arrivals(c, s, m.T) * frac.vector[m.index[c, s, m.T]]
                       for s in range(1, m.T + 1))
            assert ends == pytest.approx(0, abs=1e-7)


def test_occupancy_of_single_run():
    # one color: the server is on it throughout, nothing is ever buffered
    inst = Instance((0, 0, 0), 2)
    y = integral_solution(build_lp(inst), [0])
    assert [occupancy(y, 0, j) for j in range(1, 5)] == [0, 0, 0, 0]


def test_step_colors():
    # the server holds 0 until the buffer overflows at step 4
    inst = Instance((0, 1, 0, 1), 2)
    assert step_colors(inst, [0, 1])[1:] == [0, 0, 0, 1, 1]


def test_export_round_trip(tmp_path):
    inst = Instance((0, 1, 0), 2)
    model = build_lp(inst)
    path = export_lp(model, tmp_path / "m.lp")
    text = read_lp(path)
    assert len(text.variables) == model.n_columns
    assert text.A_ub.shape == model.A_ub.shape and text.A_eq.shape == model.A_eq.shape
    assert text.constant == model.constant
    assert solve_exported(path) == pytest.approx(solve_lp(model).objective, abs=1e-6)


def test_export_single_variable(tmp_path):
    path = export_lp(build_lp(Instance((0,), 1)), tmp_path / "one.lp")
    assert read_lp(path).variables == ["y_0_1_1"]
    assert solve_exported(path) == pytest.approx(1)


class TestRounding:
    def test_bad_epsilon(self):
        frac = solve_lp(build_lp(Instance((0, 1), 2)))
        for eps in (0, 0.25, 0.3, -1):
            with pytest.raises(BadEpsilon):
                lp_round(frac.model.instance, frac, eps)

    def test_monochromatic(self):
        inst = Instance((0,) * 4, 3)
        rep = lp_round(inst, solve_lp(build_lp(inst)), 0.1)
        assert rep.switches == 1 and rep.peak_occupancy <= inst.k

    def test_small_bound(self):
        inst = Instance((0, 1, 0), 2)
        rep = lp_round(inst, solve_lp(build_lp(inst)), 0.1)
        assert rep.peak_occupancy <= rep.occupancy_bound
        assert rep.augmented_k == math.ceil(1 / 0.3) + 1 == 5
        assert simulate(inst.with_k(rep.augmented_k), rep.program)[0].switches == rep.replay_switches

    def test_augmented_buffer(self):
        assert augmented_buffer(3, 0.1) == math.ceil(2 / 0.3) + 1

    @pytest.mark.parametrize("eps", [0.05, 0.1, 0.2])
    def test_guarantees_on_random(self, eps):
        rng = random.Random(int(eps * 100))
        for _ in range(12):
            inst = random_instance(rng, 10, 3, 3)
            frac = solve_lp(build_lp(inst))
            rep = lp_round(inst, frac, eps)
            assert rep.peak_occupancy <= (inst.k - 1) / (0.5 - 2 * eps) + 1e-9
            assert rep.replay_switches <= rep.switches
            assert rep.switches <= 5 / eps * frac.objective
            series = rep.series
            # marks per color are bounded by Z/eps + 1
            for c in range(inst.C):
                assert len(series.mark_steps(c)) <= math.floor(series.Z[-1, c] / eps + 1e-9) + 1
            assert np.all(np.diff(series.Z, axis=0) >= -1e-12)

    def test_low_switch_spacing(self):
        # adjacent low-coverage switches to c' at i then c'' at j: Z of c''
        # grows by at least 2 eps between steps i-1 and j-1
        rng = random.Random(77)
        eps = 0.1
        for _ in range(60):
            inst = random_instance(rng, 10, 3, 3)
            rep = lp_round(inst, solve_lp(build_lp(inst)), eps)
            Z = rep.series.Z
            log = rep.switch_log
            for a, b in zip(log, log[1:]):
                if a.kind == b.kind == "low" and a.color != b.color:
                    assert Z[b.step - 1, b.color] - Z[a.step - 1, b.color] >= 2 * eps - 1e-7


def test_series_definitions():
    inst = Instance((0, 1, 0, 1), 2)
    frac = solve_lp(build_lp(inst))
    s = rounding_series(frac, 0.1)
    m = frac.model
    for c in range(inst.C):
        for i in range(1, m.T + 1):
            x = sum(v for (cc, a, b), v in frac.y.items() if cc == c and a <= i <= b)
            z = sum(v for (cc, a, b), v in frac.y.items() if cc == c and b == i)
            assert s.x[i, c] == pytest.approx(x) and s.z[i, c] == pytest.approx(z)
    # Z at the end is the mass of intervals per color; their sum is LP - constant
    assert s.Z[-1].sum() == pytest.approx(frac.objective - m.constant)
