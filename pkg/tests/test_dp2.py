import random

import pytest
from hypothesis import given, settings, strategies as st

from bufsort.core import Instance, canonicalize, cost_of_order
from bufsort.dp2 import (
    FinishSet,
    dp2_reconstruct,
    dp2_solve,
    history_stats,
    replay_history,
)
from bufsort.errors import WrongBufferSize
from bufsort.exact import solve_bruteforce, solve_exact

from conftest import canonical_sequences, perm_optimum


def finishing_colors(seq):
    """Colors that end some optimal order of ``seq`` (k=2), by enumeration."""
    import itertools
    from bufsort.core import count_runs
    best, ends = None, set()
    for order in itertools.permutations(range(len(seq))):
        if all(item <= t + 1 for t, item in enumerate(order)):
            cost = count_runs([seq[i] for i in order])
            if best is None or cost < best:
                best, ends = cost, set()
            if cost == best:
                ends.add(seq[order[-1]])
    return ends


def test_needs_lookahead_bit():
    # update rules without the look-ahead bit give 5 here
    inst = Instance((0, 1, 0, 2, 0, 1, 0), 2)
    res = dp2_solve(inst)
    assert res.cost == 4 == perm_optimum(inst.sequence, 2)


def test_finishing_set_can_grow_by_two():
    seq = (0, 1, 0, 2, 0, 1, 0)
    res = dp2_solve(Instance(seq, 2))
    assert replay_history(res.history, 3, 5) == {2: 1}
    assert set(replay_history(res.history, 3, 6)) == {0, 1, 2} == finishing_colors(seq[:6])


def test_prefix_optima():
    seq = (0, 1, 0, 2, 0, 1, 0)
    res = dp2_solve(Instance(seq, 2))
    assert list(res.opt) == [perm_optimum(seq[:i + 1], 2) for i in range(len(seq))]


def test_finishing_sets_match_enumeration():
    for n in range(1, 7):
        for seq in canonical_sequences(n, 3):
            res = dp2_solve(Instance(seq, 2))
            for i in range(1, n + 1):
                got = set(replay_history(res.history, max(seq) + 1, i))
                assert got == finishing_colors(seq[:i]), (seq, i)


def test_exhaustive_small():
    for n in range(1, 8):
        for seq in canonical_sequences(n, 3):
            inst = Instance(seq, 2)
            res = dp2_solve(inst)
            want = solve_bruteforce(inst)[0].switches
            assert res.cost == want, seq
            assert cost_of_order(inst, dp2_reconstruct(inst, res)).switches == want, seq


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=1, max_size=14))
def test_random_against_exact(raw):
    _, inst = canonicalize(raw, 2)
    res = dp2_solve(inst)
    want = solve_exact(inst)[0].switches
    assert res.cost == want
    assert cost_of_order(inst, dp2_reconstruct(inst, res)).switches == want


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=2, max_size=60))
def test_set_invariants(raw):
    _, inst = canonicalize(raw, 2)
    res = dp2_solve(inst)
    sizes = []
    for i in range(1, inst.n + 1):
        S = replay_history(res.history, inst.C, i)
        assert S, "finishing set is never empty"
        sizes.append(len(S))
    assert all(b <= a + 2 for a, b in zip(sizes, sizes[1:]))
    # opt grows by at most one per item
    assert all(0 <= b - a <= 1 for a, b in zip(res.opt, res.opt[1:]))
    assert history_stats(res.history)["entries"] <= 7 * inst.n


def test_history_layout():
    res = dp2_solve(Instance((0, 1), 2))
    # step 1: opt bit, color 0 enters; step 2: opt bit, color 1 enters
    assert res.history == [1, 1, 1, 0, 1, 2, 1, 0]


def test_wrong_buffer():
    with pytest.raises(WrongBufferSize):
        dp2_solve(Instance((0, 1), 3))


def test_finish_set_list():
    S = FinishSet(4)
    assert S.set(2, 1) == 1 and S.set(0, 3) == 3
    assert list(S) == [2, 0] and S.first() == 2
    assert S.set(2, 0) == -1 and list(S) == [0] and len(S) == 1
    assert S.snapshot() == {0: 3}


def test_long_input_runs():
    rnd = random.Random(5)
    seq = [rnd.randrange(50) for _ in range(20000)]
    _, inst = canonicalize(seq, 2)
    res = dp2_solve(inst)
    order = dp2_reconstruct(inst, res)
    assert cost_of_order(inst, order).switches == res.cost
