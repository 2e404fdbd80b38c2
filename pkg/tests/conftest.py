import itertools
import random

import pytest
from hypothesis import strategies as st

from bufsort.core import Instance, canonicalize, count_runs


def perm_optimum(seq, k):
    """Minimum run count over all feasible permutations, via itertools."""
    n = len(seq)
    best = None
    for order in itertools.permutations(range(n)):
        if all(item <= t + k - 1 for t, item in enumerate(order)):
            cost = count_runs([seq[i] for i in order])
            if best is None or cost < best:
                best = cost
    return best


def canonical_sequences(n, C):
    """All sequences of length n over C colors, each in first-appearance form once."""
    seen = set()
    for raw in itertools.product(range(C), repeat=n):
        _, inst = canonicalize(raw)
        if inst.sequence not in seen:
            seen.add(inst.sequence)
            yield inst.sequence


def random_instance(rng, n_max, C_max, k_max, n_min=1):
    n = rng.randint(n_min, n_max)
    C = rng.randint(1, min(C_max, n))
    _, inst = canonicalize([rng.randrange(C) for _ in range(n)], rng.randint(1, k_max))
    return inst


@st.composite
def instances(draw, max_n=8, max_C=3, max_k=3, min_k=1):
    n = draw(st.integers(1, max_n))
    raw = draw(st.lists(st.integers(0, max_C - 1), min_size=n, max_size=n))
    k = draw(st.integers(min_k, max_k))
    _, inst = canonicalize(raw, k)
    return inst


@pytest.fixture
def rng():
    return random.Random(20241016)
