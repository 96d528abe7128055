from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from czvar.errors import DomainError
from czvar.geometry import flat_graph
from czvar.kernels import cauchy
from czvar.measures import DiscreteMeasure, graph_measure
from czvar.operators import TruncationGrid, family_eval
from czvar.variation import (oscillation, oscillation_rows, rho_variation, rho_variation_bruteforce,
                             rho_variation_rows, variation_field)


def test_examples():
    r = rho_variation([0, 1, 0], 2)
    assert r.value == pytest.approx(math.sqrt(2)) and r.chain == [0, 1, 2]
    r = rho_variation([3, 2, 1], 2)
    assert r.value == pytest.approx(2.0) and r.chain == [0, 2]
    assert rho_variation([0, 1, 0], 1).value == pytest.approx(2.0)


def test_bruteforce_examples():
    assert rho_variation_bruteforce([2, 2, 2, 2], 2).value == 0
    assert rho_variation_bruteforce([0, 1], 5).value == 1
    with pytest.raises(DomainError):
        rho_variation_bruteforce(np.zeros(21), 2)


def test_errors_and_degenerate():
    with pytest.raises(DomainError):
        rho_variation([0, 1], 0.5)
    assert rho_variation([3.0], 2).value == 0


def test_dp_equals_bruteforce_random():
    rng = np.random.default_rng(0)
    for _ in range(300):
        m = int(rng.integers(2, 13))
        F = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        rho = float(rng.choice([1.0, 2.0, 2.1, 3.0]))
        a, b = rho_variation(F, rho), rho_variation_bruteforce(F, rho)
        assert a.value == pytest.approx(b.value, rel=1e-12)
        assert a.chain == b.chain


def test_chain_reproduces_value():
    rng = np.random.default_rng(1)
    for _ in range(200):
        F = rng.standard_normal(15) + 1j * rng.standard_normal(15)
        r = rho_variation(F, 2.1)
        assert all(np.diff(r.chain) > 0)
        s = np.sum(np.abs(np.diff(F[r.chain])) ** 2.1)
        assert s == pytest.approx(r.value ** 2.1, rel=1e-12)


def test_rows_match_scalar():
    rng = np.random.default_rng(2)
    V = rng.standard_normal((40, 9)) + 1j * rng.standard_normal((40, 9))
    ref = [rho_variation(v, 2.1).value for v in V]
    assert np.allclose(rho_variation_rows(V, 2.1), ref, rtol=1e-12)


def test_oscillation_example():
    g = TruncationGrid([4.0, 2.0, 1.0, 0.5])
    assert oscillation([0, 1, 0, 2], g, [4.0, 1.0, 0.25]) == pytest.approx(math.sqrt(5))
    assert oscillation([3, 3, 3, 3], g, [4.0, 1.0, 0.25]) == 0
    with pytest.raises(DomainError):
        oscillation([0, 1, 0, 2], g, [1.0, 4.0])


def test_oscillation_rows_match():
    rng = np.random.default_rng(3)
    g = TruncationGrid.dyadic(1.0, 10)
    r = [1.0, 0.3, 0.05, 0.002]
    V = rng.standard_normal((20, 10)) + 1j * rng.standard_normal((20, 10))
    assert np.allclose(oscillation_rows(V, g, r), [oscillation(v, g, r) for v in V])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=2, max_size=12), st.sampled_from([1.0, 2.0, 2.1, 3.0]))
def test_lower_bound_and_rho_monotone(F, rho):
    F = np.asarray(F)
    v = rho_variation(F, rho).value
    assert v >= np.max(np.abs(F[:, None] - F[None, :])) * (1 - 1e-12)
    assert rho_variation(F, rho + 0.5).value <= v * (1 + 1e-12)


def test_field_single_atom():
    nu = DiscreteMeasure.dirac([0.0, 0.5], 2.0)
    pts = np.array([[0.1, 0.0], [-0.3, 0.0]])
    grid = TruncationGrid.dyadic(4.0, 10)
    val = variation_field(cauchy(), nu, pts, grid)
    assert np.allclose(val, 2.0 / np.linalg.norm(pts - [0.0, 0.5], axis=1))


def test_field_symmetric_cancellation():
    nu = DiscreteMeasure(np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 0.7], [0.0, -0.7]]), np.ones(4))
    assert variation_field(cauchy(), nu, np.zeros((1, 2)), TruncationGrid.dyadic(4.0, 8))[0] == 0


def test_field_matches_bruteforce():
    mu = graph_measure(flat_graph(), [(-1, 1)], 0.01)
    nu = DiscreteMeasure.dirac([0.05, 0.2]) + DiscreteMeasure.dirac([-0.3, -0.1], -0.5j)
    grid = TruncationGrid.dyadic(2.0, 10)
    val = variation_field(cauchy(), nu, mu.points[::7], grid)
    fam = family_eval(cauchy(), nu, mu.points[::7], grid)
    assert np.allclose(val, [rho_variation_bruteforce(v, 2.1).value for v in fam.values], rtol=1e-12)
    osc = variation_field(cauchy(), nu, mu.points[::7], grid, functional="oscillation", r=[2.0, 0.5, 0.01])
    assert np.all(osc <= variation_field(cauchy(), nu, mu.points[::7], grid, rho=2) * (1 + 1e-12))
