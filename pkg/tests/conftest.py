import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from padiclab.matrix import IntMatrix

settings.register_profile(
    "default", max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def int_matrices(draw, min_dim=1, max_dim=6, lo=-20, hi=20, square=False):
    rows = draw(st.integers(min_dim, max_dim))
    cols = rows if square else draw(st.integers(min_dim, max_dim))
    entries = st.integers(lo, hi)
    data = draw(st.lists(st.lists(entries, min_size=cols, max_size=cols), min_size=rows, max_size=rows))
    return IntMatrix.from_rows(data)


def random_matrix(rnd: random.Random, rows, cols=None, lo=-20, hi=20, density=1.0):
    cols = rows if cols is None else cols
    return IntMatrix.from_rows(
        [[rnd.randint(lo, hi) if rnd.random() < density else 0 for _ in range(cols)] for _ in range(rows)]
    )


@pytest.fixture
def rnd():
    return random.Random(20240615)
