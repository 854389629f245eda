import random

import pytest
from hypothesis import strategies as st

from topomaps.functions import FiniteFunction


def make_function(mapping, m):
    n = len(mapping)
    return FiniteFunction([f"x{j + 1}" for j in range(n)], [f"y{i + 1}" for i in range(m)], mapping)


def abs_function(N):
    """|x| from {-(N-1)..N-1} onto {0..N-1} (grid step 1)."""
    dom = list(range(-(N - 1), N))
    return FiniteFunction([str(k) for k in dom], [str(k) for k in range(N)], [abs(k) for k in dom])


def random_function(rng, n, m):
    return make_function([rng.randrange(m) for _ in range(n)], m)


def random_surjection(rng, n, m):
    mapping = list(range(m)) + [rng.randrange(m) for _ in range(n - m)]
    rng.shuffle(mapping)
    return make_function(mapping, m)


def random_injection(rng, n, m):
    return make_function(rng.sample(range(m), n), m)


def preimage_count(f, x):
    """Brute-force n_x: domain elements sharing x's image."""
    return sum(1 for j in range(f.n) if f.mapping[j] == f.mapping[x])


@st.composite
def functions(draw, max_n=8, max_m=8):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    return make_function(draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n)), m)


@pytest.fixture
def rng():
    return random.Random(20181121)
