from __future__ import annotations

import math
import warnings

import numpy as np
import pytest

from czvar.errors import DomainError, ResolutionWarning
from czvar.geometry import bumps_graph, flat_graph
from czvar.kernels import cauchy, riesz
from czvar.measures import DiscreteMeasure, graph_measure
from czvar.operators import (SMOOTHSTEP, TruncationGrid, family_eval, smooth_truncated, truncated,
                             truncated_window)


@pytest.fixture(scope="module")
def unit_segment():
    return graph_measure(flat_graph(), [(0, 1)], 1e-4)


def test_empty_truncation():
    nu = DiscreteMeasure.dirac([1.0, 0.0])
    assert truncated(cauchy(), nu, np.zeros(2), 2.0) == 0


def test_truncation_closed_form(unit_segment):
    val = truncated(cauchy(), unit_segment, np.zeros(2), 0.1)
    assert val.real == pytest.approx(-math.log(10), rel=1e-3)


def test_window_closed_form(unit_segment):
    val = truncated_window(cauchy(), unit_segment, np.zeros(2), 0.1, 0.5)
    assert val.real == pytest.approx(-math.log(5), rel=1e-3)


def test_window_edge_cases(unit_segment):
    k, x = cauchy(), np.array([-0.05, 0.0])
    assert truncated_window(k, unit_segment, x, 0.3, 0.3) == 0
    a = truncated_window(k, unit_segment, x, 0.1, 0.3)
    b = truncated_window(k, unit_segment, x, 0.3, 0.7)
    assert a + b == pytest.approx(truncated_window(k, unit_segment, x, 0.1, 0.7), abs=1e-12)
    with pytest.raises(DomainError):
        truncated_window(k, unit_segment, x, 0.5, 0.1)


def test_telescoping(unit_segment):
    k, x = cauchy(), np.array([0.3, 0.01])
    for eps, delta in ((0.01, 0.1), (0.05, 0.5), (0.2, 0.2)):
        lhs = truncated(k, unit_segment, x, eps)
        rhs = truncated(k, unit_segment, x, delta) + truncated_window(k, unit_segment, x, eps, delta)
        assert abs(lhs - rhs) <= 1e-12


def test_symmetric_cancellation():
    pts = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 2.0], [0.0, -2.0]])
    nu = DiscreteMeasure(pts, np.ones(4))
    for k in (cauchy(), riesz(1, 1), riesz(1, 2)):
        assert abs(truncated(k, nu, np.zeros(2), 0.5)) <= 1e-12


def test_linearity():
    rng = np.random.default_rng(0)
    a = DiscreteMeasure(rng.uniform(-1, 1, (50, 2)), rng.standard_normal(50) + 1j)
    b = DiscreteMeasure(rng.uniform(-1, 1, (40, 2)), rng.standard_normal(40))
    x, k = np.array([0.05, 0.05]), cauchy()
    al, be = 0.3 - 2j, 1.7
    lhs = truncated(k, a.scaled(al) + b.scaled(be), x, 0.2)
    rhs = al * truncated(k, a, x, 0.2) + be * truncated(k, b, x, 0.2)
    assert abs(lhs - rhs) <= 1e-12 * max(1, abs(rhs))


def test_smooth_cutoff_bounds():
    r = np.linspace(-1, 4, 5001)
    phi = SMOOTHSTEP(r)
    assert np.all((r >= 2) <= phi) and np.all(phi <= (r >= 0.5))
    assert np.all(np.diff(phi) >= 0)
    h = 1e-6
    for t in (0.5, 2.0):
        # first and second derivatives vanish at both ends
        assert abs(SMOOTHSTEP.derivative(t)) == 0
        assert abs((SMOOTHSTEP.derivative(t + h) - SMOOTHSTEP.derivative(t - h)) / (2 * h)) < 1e-4


def test_smooth_equals_rough_far_and_vanishes_near():
    k, x = cauchy(), np.zeros(2)
    far = DiscreteMeasure(np.array([[3.0, 0.0], [0.0, -2.5]]), np.array([1.0, 2.0]))
    assert smooth_truncated(k, far, x, 1.0) == truncated(k, far, x, 1.0)
    near = DiscreteMeasure(np.array([[0.3, 0.0], [0.0, -0.2]]), np.array([1.0, 2.0]))
    assert smooth_truncated(k, near, x, 1.0) == 0


def test_smooth_rough_shell_bound():
    mu = graph_measure(bumps_graph([{"amplitude": 0.2, "center": 0.0, "width": 0.4}]), [(-1, 1)], 1e-3)
    k, eps = cauchy(), 0.1
    for x in mu.points[::400]:
        diff = abs(smooth_truncated(k, mu, x, eps) - truncated(k, mu, x, eps))
        d = np.linalg.norm(mu.points - x, axis=1)
        shell = (d > eps / 2) & (d <= 2 * eps)
        assert diff <= mu.abs_weights[shell].sum() * k.C_K / (eps / 2) + 1e-12


def test_grid_validation():
    with pytest.raises(DomainError):
        TruncationGrid([1.0])
    with pytest.raises(DomainError):
        TruncationGrid([1.0, 1.0])
    with pytest.raises(DomainError):
        TruncationGrid([1.0, -0.5])
    g = TruncationGrid.dyadic(1.0, 4).refined()
    assert len(g) == 7 and g.scales[1] == pytest.approx(math.sqrt(0.5))


def test_family_single_atom():
    nu = DiscreteMeasure.dirac([1.0, 0.0], 2.0)
    fam = family_eval(cauchy(), nu, np.array([[0.0, 0.0]]), TruncationGrid([2.0, 0.5]))
    assert fam.values[0, 0] == 0 and fam.values[0, 1] == pytest.approx(-2.0)
    assert fam.maximal[0] == pytest.approx(2.0)


def test_family_matches_naive_loop():
    rng = np.random.default_rng(1)
    nu = DiscreteMeasure(rng.uniform(-1, 1, (10000, 2)), rng.standard_normal(10000) + 1j * rng.standard_normal(10000))
    grid = TruncationGrid.geometric(1.5, 1e-3, 12)
    pts = rng.uniform(-1, 1, (6, 2))
    fam = family_eval(cauchy(), nu, pts, grid)
    naive = np.array([[truncated(cauchy(), nu, p, e) for e in grid.scales] for p in pts])
    assert np.max(np.abs(fam.values - naive)) <= 1e-12 * np.max(np.abs(naive))
    smooth = family_eval(cauchy(), nu, pts[:2], grid, mode="smooth")
    ref = np.array([[smooth_truncated(cauchy(), nu, p, e) for e in grid.scales] for p in pts[:2]])
    assert np.max(np.abs(smooth.values - ref)) <= 1e-12 * np.max(np.abs(ref))


def test_family_atom_at_evaluation_point_excluded():
    nu = DiscreteMeasure(np.array([[0.0, 0.0], [1.0, 0.0]]), np.array([5.0, 1.0]))
    fam = family_eval(cauchy(), nu, np.array([[0.0, 0.0]]), TruncationGrid([2.0, 0.5]))
    assert fam.values[0, 1] == pytest.approx(-1.0)


def test_family_csv_header():
    nu = DiscreteMeasure.dirac([1.0, 0.0])
    fam = family_eval(cauchy(), nu, np.zeros((1, 2)), TruncationGrid([2.0, 0.5]))
    assert fam.to_csv().splitlines()[0] == "point_index,epsilon,re,im"


def test_resolution_guard_warns():
    mu = graph_measure(flat_graph(), [(0, 1)], 0.01)
    grid = TruncationGrid([1.0, 0.05])
    with pytest.warns(ResolutionWarning):
        family_eval(cauchy(), mu, np.array([[0.5, 0.1]]), grid)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        family_eval(cauchy(), mu, np.array([[0.5, 0.1]]), grid, allow_floor=True)
        family_eval(cauchy(), mu, np.array([[0.5, 0.1]]), TruncationGrid([1.0, 0.1]))


def test_resolution_contract():
    spec = bumps_graph([{"amplitude": 0.2, "center": 0.0, "width": 0.4}])
    grid = TruncationGrid.geometric(1.0, 0.02, 8)
    x = np.array([[0.3, 0.5], [-0.4, 0.3]])
    vals = []
    for h in (2e-3, 1e-3):
        mu = graph_measure(spec, [(-1, 1)], h)
        vals.append(family_eval(cauchy(), mu.with_density(np.cos(mu.params[:, 0])), x, grid).values)
    assert np.max(np.abs(vals[0] - vals[1]) / np.abs(vals[1])) < 5e-2
