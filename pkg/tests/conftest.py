import os
import random

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from torsionforge import corpus as cp

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def int_matrices(max_dim=6, bound=9, min_dim=0):
    return st.tuples(st.integers(min_dim, max_dim), st.integers(min_dim, max_dim)).flatmap(
        lambda mn: st.lists(st.lists(st.integers(-bound, bound), min_size=mn[1], max_size=mn[1]),
                            min_size=mn[0], max_size=mn[0]).map(lambda rows: (rows, mn)))


# random valid complexes come from the corpus generator, driven by a hypothesis seed
complexes = st.integers(0, 2 ** 32 - 1).map(lambda s: cp.random_complex(random.Random(s)))


@pytest.fixture
def rng():
    return random.Random(0)


def as_np(rows, shape):
    m, n = shape
    return np.array(rows, dtype=object).reshape(m, n)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
