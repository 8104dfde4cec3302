import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from youngkit import measure as M

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

coord = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
weight = st.floats(min_value=0.01, max_value=1.0)


@st.composite
def measures(draw, dim=None, min_atoms=1, max_atoms=8, probability=False):
    k = draw(st.integers(1, 3)) if dim is None else dim
    n = draw(st.integers(min_atoms, max_atoms))
    pts = np.array(draw(st.lists(st.lists(coord, min_size=k, max_size=k), min_size=n, max_size=n)))
    w = np.array(draw(st.lists(weight, min_size=n, max_size=n)))
    mu = M.DiscreteMeasure(pts.reshape(n, k), w)
    return M.normalize(mu) if probability else mu


@st.composite
def grid_measures(draw, dim=1, max_atoms=6, probability=True):
    """Atoms on a quarter-integer lattice, so sums of positions are exact."""
    n = draw(st.integers(1, max_atoms))
    pts = np.array(draw(st.lists(st.lists(st.integers(-20, 20), min_size=dim, max_size=dim), min_size=n, max_size=n))) / 4.0
    w = np.array(draw(st.lists(st.integers(1, 8), min_size=n, max_size=n)), dtype=float)
    mu = M.DiscreteMeasure(pts.reshape(n, dim), w)
    return M.normalize(mu) if probability else mu


def random_measure(rng, n, dim, probability=True, scale=5.0):
    pts = rng.normal(scale=scale, size=(n, dim))
    w = rng.uniform(0.05, 1.0, size=n)
    mu = M.DiscreteMeasure(pts, w)
    return M.normalize(mu) if probability else mu


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_young(rng, n_sites, max_fiber, carrier_dim=1, fiber_dim=1, integer_grid=False):
    """Young function with distinct sites and random probability fibers."""
    from youngkit.young import YoungFunction

    if integer_grid:
        pts = rng.choice(10 * n_sites, size=n_sites, replace=False).reshape(-1, 1) / 4.0
        pts = np.hstack([pts] + [rng.integers(-5, 5, size=(n_sites, 1)) / 2.0 for _ in range(carrier_dim - 1)])
    else:
        pts = rng.normal(size=(n_sites, carrier_dim))
    fibers = []
    for _ in range(n_sites):
        k = int(rng.integers(1, max_fiber + 1))
        fibers.append(M.normalize(M.DiscreteMeasure(rng.normal(size=(k, fiber_dim)), rng.uniform(0.1, 1.0, size=k))))
    return YoungFunction(pts, rng.uniform(0.1, 2.0, size=n_sites), fibers, fiber_dim=fiber_dim)


@st.composite
def young_functions(draw, carrier_dim=1, fiber_dim=1, max_sites=6, max_fiber=4):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(1, max_sites))
    return random_young(np.random.default_rng(seed), n, max_fiber, carrier_dim, fiber_dim)


# one PASS/FAIL line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Record the outcome of an acceptance criterion; call with (number, text, ok)."""

    def record(number: int, text: str, ok: bool) -> bool:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {text}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
