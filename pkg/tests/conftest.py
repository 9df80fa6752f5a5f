import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cmk.core import Instance, Item  # noqa: E402

RESULTS = {}


def make(items, m=1, k=1):
    return Instance(tuple(Item(i, w, v) for i, (w, v) in enumerate(items)), m, k)


def random_instance(rng, n, m, k, w_lo=0.05, w_hi=1.0):
    w = rng.uniform(w_lo, w_hi, n)
    v = rng.uniform(0.0, 1.0, n)
    return Instance(tuple(Item(i, float(w[i]), float(v[i])) for i in range(n)), m, k)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def acceptance():
    return RESULTS


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        ok, note = RESULTS[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {note}")
