import math

import pytest

from ttplon import backend
from ttplon.generator import ceil2d
from ttplon.model import Instance

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_instance(
    coords,
    profits,
    weights,
    capacity,
    item_city=None,
    renting_rate=1.0,
    drop_rate=1.0,
    v_max=1.0,
    v_min=0.1,
    dist=None,
):
    return Instance(
        coords=tuple(tuple(map(float, c)) for c in coords),
        dist=dist if dist is not None else ceil2d(coords),
        profits=tuple(map(float, profits)),
        weights=tuple(map(float, weights)),
        item_city=tuple(item_city or range(1, len(profits) + 1)),
        capacity=float(capacity),
        v_max=v_max,
        v_min=v_min,
        renting_rate=renting_rate,
        drop_rate=drop_rate,
    )


TOY_SPECS = [
    # coords, profits, weights, capacity, renting rate, drop rate
    (((0, 0), (3, 0), (3, 4), (0, 4)), (50, 40, 70), (30, 20, 40), 60, 1.5, 0.9),
    (((0, 0), (10, 0), (10, 10), (0, 10)), (100, 80, 30), (50, 40, 10), 70, 2.0, 0.95),
    (((5, 5), (0, 0), (9, 1), (2, 8)), (20, 90, 60), (15, 45, 30), 50, 0.7, 0.98),
    (((0, 0), (1, 7), (6, 3), (8, 8)), (300, 200, 100), (100, 80, 60), 150, 5.0, 0.9),
    (((2, 2), (7, 1), (4, 9), (9, 6)), (45, 45, 45), (20, 25, 30), 50, 1.0, 0.95),
    (((0, 0), (20, 0), (20, 15), (3, 12)), (500, 120, 240), (300, 60, 120), 200, 8.0, 0.98),
]


def toy_instance(i: int = 0) -> Instance:
    coords, p, w, cap, r, d = TOY_SPECS[i]
    return make_instance(coords, p, w, cap, renting_rate=r, drop_rate=d)


@pytest.fixture
def toy():
    return toy_instance(0)


@pytest.fixture(params=["cython", "numpy"])
def kernel_backend(request):
    """Run a test under each available kernel backend."""
    if request.param == "cython" and backend.compiled() is None:
        pytest.skip("compiled kernels not built")
    previous = backend.kernels.NAME
    backend.use(request.param)
    yield request.param
    backend.use(previous)


def close(a, b, rel=1e-12):
    return math.isclose(a, b, rel_tol=rel, abs_tol=rel)
