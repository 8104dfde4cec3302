import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from youngkit import measure as M
from youngkit.errors import DegenerateMeasureError, DimensionMismatchError, InvalidInputError
from youngkit.testfunctions import bump

from conftest import grid_measures, measures


def test_dirac_single_atom():
    d = M.dirac([0])
    assert d.dim == 1 and len(d) == 1
    assert d.points.tolist() == [[0.0]] and d.weights.tolist() == [1.0]
    d2 = M.dirac([3, -4])
    assert d2.points.tolist() == [[3.0, -4.0]] and d2.total_mass() == 1.0


def test_dirac_rejects_nonfinite():
    with pytest.raises(InvalidInputError):
        M.dirac([np.nan])
    with pytest.raises(InvalidInputError):
        M.dirac([1.0, np.inf])


def test_dirac_evaluates_test_function():
    g = bump([2.5], 0.5, 1.5)
    assert M.integrate(M.dirac([2]), g) == pytest.approx(float(g([2.0])[0]), abs=0)


def test_total_mass_and_normalize():
    mu = M.DiscreteMeasure([[0], [1]], [2, 3])
    assert M.total_mass(mu) == 5
    nu = M.normalize(mu)
    assert isinstance(nu, M.ProbabilityMeasure)
    assert nu.weights.tolist() == [0.4, 0.6]


def test_normalize_zero_mass():
    with pytest.raises(DegenerateMeasureError):
        M.normalize(M.DiscreteMeasure(np.zeros((0, 1)), []))
    with pytest.raises(DegenerateMeasureError):
        M.normalize(M.DiscreteMeasure([[1.0]], [0.0]))


def test_rejects_bad_atoms():
    with pytest.raises(InvalidInputError):
        M.DiscreteMeasure([[0.0]], [-1.0])
    with pytest.raises(InvalidInputError):
        M.DiscreteMeasure([[np.nan]], [1.0])
    with pytest.raises(DegenerateMeasureError):
        M.ProbabilityMeasure([[0.0]], [0.5])


def test_integrate_examples():
    assert M.integrate(M.dirac([1]), lambda y: y[:, 0] ** 2) == 1.0
    sym = M.DiscreteMeasure([[-1], [1]], [0.5, 0.5])
    assert M.integrate(sym, lambda y: y[:, 0]) == 0.0
    x = (np.arange(100) + 0.5) / 100
    grid = M.DiscreteMeasure(x, np.full(100, 0.01))
    # midpoint grid: sum of (k + 1/2)/100 * 1/100 over k < 100 is 0.5; oracle by plain summation
    oracle = sum(((k + 0.5) / 100) * 0.01 for k in range(100))
    assert M.integrate(grid, lambda y: y[:, 0]) == pytest.approx(oracle, abs=1e-12)
    assert oracle == pytest.approx(0.5, abs=1e-12)


def test_integrate_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        M.integrate(M.dirac([0.0, 1.0]), bump([0.0], 1, 2))


def test_pushforward_examples():
    assert M.pushforward(M.dirac([2]), lambda y: y + 1) == M.dirac([3])
    sym = M.DiscreteMeasure([[-1], [1]], [0.5, 0.5])
    sq = M.pushforward(sym, lambda y: y**2)
    assert sq.points.tolist() == [[1.0]] and sq.weights.tolist() == [1.0]


def test_pushforward_undefined():
    with np.errstate(divide="ignore"), pytest.raises(InvalidInputError):
        M.pushforward(M.dirac([0.0]), lambda y: 1.0 / y)


def test_product_examples():
    assert M.product(M.dirac([1]), M.dirac([2])) == M.dirac([1, 2])
    mu = M.DiscreteMeasure([[0], [1], [2]], [1, 1, 1])
    nu = M.DiscreteMeasure([[0], [5]], [1, 2])
    assert len(M.product(mu, nu)) <= 6


def test_convolve_examples():
    assert M.convolve(M.dirac([1.5]), M.dirac([-4])) == M.dirac([-2.5])
    f = M.ProbabilityMeasure([[0], [1]], [0.25, 0.75])
    g = M.ProbabilityMeasure([[0], [2]], [0.5, 0.5])
    conv = M.convolve(f, g)
    # sum over pairs of f(x) g(y) delta_{x+y}
    oracle = {}
    for (x,), a in f:
        for (y,), b in g:
            oracle[x + y] = oracle.get(x + y, 0.0) + a * b
    assert conv.points[:, 0].tolist() == sorted(oracle)
    assert np.allclose(conv.weights, [oracle[k] for k in sorted(oracle)], atol=0)
    assert M.convolve(f, M.dirac([0.0])) == f


def test_convolve_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        M.convolve(M.dirac([0.0]), M.dirac([0.0, 1.0]))


def test_restrict_moment_coalesce_examples():
    mu = M.DiscreteMeasure([[1], [5]], [0.5, 0.5])
    r = M.restrict(mu, 2)
    assert r.points.tolist() == [[1.0]] and r.weights.tolist() == [0.5]
    assert M.first_moment(M.dirac([-3])) == 3.0
    c = M.coalesce(M.DiscreteMeasure([[1], [1]], [0.5, 0.5]), 0)
    assert c.points.tolist() == [[1.0]] and c.weights.tolist() == [1.0]


def test_coalesce_tolerance_groups_neighbors():
    mu = M.DiscreteMeasure([[0.0], [0.01], [1.0]], [1.0, 1.0, 2.0])
    c = M.coalesce(mu, 0.05)
    assert len(c) == 2
    assert c.points[0, 0] == pytest.approx(0.005, abs=1e-15)
    assert c.weights.tolist() == [2.0, 2.0]


def test_canonical_order_makes_equality_list_equality():
    a = M.DiscreteMeasure([[1, 0], [0, 1], [0, 0]], [1, 2, 3])
    b = M.DiscreteMeasure([[0, 0], [1, 0], [0, 1]], [3, 1, 2])
    assert a == b
    assert a.points.tolist() == [[0, 0], [0, 1], [1, 0]]


def test_immutable():
    mu = M.dirac([1.0])
    with pytest.raises(ValueError):
        mu.points[0, 0] = 3.0
    with pytest.raises(AttributeError):
        mu.points = np.zeros((1, 1))


def test_json_roundtrip():
    mu = M.DiscreteMeasure([[0.1, -2], [3, 1e-300]], [0.25, 0.75])
    text = json.dumps(mu.to_dict())
    assert M.DiscreteMeasure.from_dict(json.loads(text)) == mu


@given(measures(), st.floats(0, 20))
def test_pushforward_preserves_mass(mu, shift):
    nu = M.pushforward(mu, lambda y: np.round(y + shift))
    assert abs(nu.total_mass() - mu.total_mass()) <= 1e-12 * mu.total_mass()


@given(measures(dim=2))
def test_pushforward_change_of_variables(mu):
    h = lambda y: np.column_stack([np.sin(y[:, 0]), y[:, 0] * y[:, 1]])  # noqa: E731
    g = lambda z: np.cos(z[:, 0]) + z[:, 1] ** 2  # noqa: E731
    lhs = M.integrate(M.pushforward(mu, h), g)
    rhs = float(np.sum(mu.weights * g(h(mu.points))))
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-9)


@given(measures(), measures())
def test_product_marginals_recover_factors(mu, nu):
    p = M.product(mu, nu)
    assert abs(p.total_mass() - mu.total_mass() * nu.total_mass()) <= 1e-12 * max(1.0, p.total_mass())
    k = mu.dim
    left = M.marginal(p, range(k))
    right = M.marginal(p, range(k, k + nu.dim))
    assert left.allclose(M.coalesce(mu).scaled(nu.total_mass()), atol=1e-12)
    assert right.allclose(M.coalesce(nu).scaled(mu.total_mass()), atol=1e-12)


@given(grid_measures(), grid_measures(), grid_measures())
def test_convolution_commutative_associative(a, b, c):
    assert M.convolve(a, b).allclose(M.convolve(b, a), atol=1e-12)
    left = M.convolve(M.convolve(a, b), c)
    right = M.convolve(a, M.convolve(b, c))
    assert left.allclose(right, atol=1e-12)
    assert abs(left.total_mass() - 1.0) <= 1e-12


@given(measures(), st.floats(0, 1))
def test_coalesce_preserves_mass(mu, tol):
    c = M.coalesce(mu, tol)
    assert abs(c.total_mass() - mu.total_mass()) <= 1e-12 * mu.total_mass()
    assert len(c) <= len(mu)


@given(measures(), st.lists(st.floats(0, 30), min_size=2, max_size=6))
def test_restrict_mass_monotone(mu, radii):
    radii = sorted(radii)
    masses = [M.restrict(mu, s).total_mass() for s in radii]
    assert all(x <= y for x, y in zip(masses, masses[1:]))
    assert M.restrict(mu, mu.support_radius()).total_mass() == mu.total_mass()


def test_mixture_combines_and_coalesces():
    mix = M.mixture([M.dirac([0.0]), M.dirac([0.0]), M.dirac([1.0])], [0.25, 0.25, 0.5])
    assert mix.points.tolist() == [[0.0], [1.0]] and mix.weights.tolist() == [0.5, 0.5]
