"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Experiment-backed criteria load their acceptance-grade settings from
``configs/<name>.json``; the others call the library directly.
"""
from __future__ import annotations

import math
import os
import time
import warnings

import numpy as np
import pytest

from czvar.experiments import ExperimentConfig, run_experiment
from czvar.geometry import cone_inequality_ratio, flat_graph, sample_cone, upsilon_map
from czvar.kernels import cauchy
from czvar.measures import DiscreteMeasure, graph_measure
from czvar.operators import TruncationGrid, family_eval, truncated, truncated_window
from czvar.variation import (oscillation, oscillation_windows, rho_variation,
                             rho_variation_bruteforce)

pytestmark = pytest.mark.acceptance

CONFIGS = os.path.join(os.path.dirname(__file__), os.pardir, "configs")


def run_config(name: str):
    with open(os.path.join(CONFIGS, f"{name}.json")) as fh:
        cfg = ExperimentConfig.from_json(fh.read())
    cfg.experiment = name
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = run_experiment(cfg)
    return res, time.perf_counter() - t0


def check_experiment(report, number, name, limit):
    res, elapsed = run_config(name)
    failed = [c.name for c in res.checks if not c.passed]
    worst = "; ".join(f"{c.name}={c.measured:.4g} vs {c.threshold:.4g}" for c in res.checks[:4])
    ok = res.passed and elapsed < limit
    report(number, name, ok, f"{worst}; {elapsed:.1f}s < {limit}s; failed={failed}")
    assert res.passed, failed
    assert elapsed < limit


def test_01_variation_optimizer_exact(report):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        m = int(rng.integers(1, 13))
        F = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        rho = float(rng.choice([1.0, 2.0, 2.1, 3.0]))
        a = rho_variation(F, rho).value
        b = rho_variation_bruteforce(F, rho).value
        worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 10
    report(1, "variation optimizer", ok, f"max rel diff {worst:.2e} <= 1e-12; {elapsed:.1f}s < 10s")
    assert worst <= 1e-12 and elapsed < 10


def test_02_truncation_correctness(report):
    t0 = time.perf_counter()
    mu = graph_measure(flat_graph(), [(0, 1)], 1e-4)
    k, x = cauchy(), np.zeros(2)
    val = truncated(k, mu, x, 0.1)
    rel = abs(val - (-math.log(10))) / math.log(10)
    rng = np.random.default_rng(7)
    additivity = 0.0
    for _ in range(50):
        z = np.array([rng.uniform(-0.5, 1.5), rng.uniform(-0.2, 0.2)])
        e1, e2, e3 = np.sort(rng.uniform(1e-3, 2.0, 3))
        lhs = truncated_window(k, mu, z, e1, e2) + truncated_window(k, mu, z, e2, e3)
        additivity = max(additivity, abs(lhs - truncated_window(k, mu, z, e1, e3)))
        additivity = max(additivity, abs(truncated_window(k, mu, z, e1, e3)
                                         - (truncated(k, mu, z, e1) - truncated(k, mu, z, e3))))
    elapsed = time.perf_counter() - t0
    ok = rel <= 1e-3 and additivity <= 1e-12 and elapsed < 5
    report(2, "truncation", ok, f"rel err vs -ln 10 {rel:.2e} <= 1e-3; additivity {additivity:.1e} <= 1e-12; "
                                f"{elapsed:.1f}s < 5s")
    assert rel <= 1e-3 and additivity <= 1e-12 and elapsed < 5


def test_03_annulus_mass(report):
    check_experiment(report, 3, "annulus", 60)


def test_04_sharpness(report):
    check_experiment(report, 4, "sharpness", 30)


def test_05_cone_inequality(report):
    t0 = time.perf_counter()
    parts, ok = [], True
    for s in (0.1, 0.3, 0.5, 0.7, 0.9):
        rep = cone_inequality_ratio(s, 100000, seed=0)
        ok &= rep.max_ratio <= rep.bound
        parts.append(f"s={s}: {rep.max_ratio:.3g} <= {rep.bound:.3g}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 30
    report(5, "cone inequality", ok, "; ".join(parts) + f"; {elapsed:.1f}s < 30s")
    assert ok


def test_06_upsilon_roundtrip(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    worst = 0.0
    for s in (0.1, 0.5, 0.9):
        x = sample_cone(rng, 100000, s) * np.exp(rng.uniform(-5, 5, (100000, 1)))
        back = upsilon_map(upsilon_map(x, 1), 1, "inverse")
        worst = max(worst, float(np.max(np.linalg.norm(back - x, axis=1))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 5
    report(6, "upsilon roundtrip", ok, f"max error {worst:.1e} <= 1e-10; {elapsed:.1f}s < 5s")
    assert ok


def test_07_cz_decomposition(report):
    check_experiment(report, 7, "czdemo", 120)


def test_08_weak_type_11(report):
    check_experiment(report, 8, "weak11", 300)


def test_09_lp_boundedness(report):
    check_experiment(report, 9, "lp-ratio", 300)


def test_10_bmo(report):
    check_experiment(report, 10, "bmo", 120)


def test_11_principal_values(report):
    check_experiment(report, 11, "pv-converge", 60)


def test_12_structural_inequalities(report):
    rng = np.random.default_rng(12)
    t0 = time.perf_counter()
    bad = {"osc<=V2": 0, "rho monotone": 0, "refinement": 0, "locality": 0}
    k = cauchy()
    for _ in range(1000):
        m = int(rng.integers(4, 16))
        grid = TruncationGrid.dyadic(float(rng.uniform(0.5, 4.0)), m)
        F = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        r = np.sort(rng.uniform(grid.scales[-1] * 0.5, grid.scales[0] * 2.0, int(rng.integers(2, 6))))[::-1]
        r = np.unique(r)[::-1]
        if r.size < 2:
            r = np.array([grid.scales[0] * 2.0, grid.scales[-1] * 0.5])
        # oscillation is dominated by the 2-variation
        if oscillation(F, grid, r) > rho_variation(F, 2).value * (1 + 1e-12):
            bad["osc<=V2"] += 1
        # V_rho is nonincreasing in rho
        vals = [rho_variation(F, p).value for p in (1.0, 1.5, 2.0, 2.1, 3.0, 6.0)]
        if np.any(np.diff(vals) > 1e-12 * vals[0]):
            bad["rho monotone"] += 1
        # refining the grid can only increase V_rho
        pts = rng.uniform(-1, 1, (int(rng.integers(1, 6)), 2))
        pts[:, 1] *= 0.1
        nu = DiscreteMeasure(pts, rng.standard_normal(len(pts)) + 1j * rng.standard_normal(len(pts)))
        x = rng.uniform(-1, 1, (1, 2))
        fine = grid.refined()
        coarse_v = rho_variation(family_eval(k, nu, x, grid, allow_floor=True).values[0], 2.1).value
        fine_v = rho_variation(family_eval(k, nu, x, fine, allow_floor=True).values[0], 2.1).value
        if fine_v < coarse_v * (1 - 1e-12):
            bad["refinement"] += 1
        # changing values outside a window leaves that window's diameter unchanged
        D = oscillation_windows(F, grid, r)
        j = int(rng.integers(r.size - 1))
        inside = (grid.scales >= r[j + 1]) & (grid.scales <= r[j])
        G = F.copy()
        G[~inside] = rng.standard_normal((~inside).sum()) * 100
        if oscillation_windows(G, grid, r)[j] != D[j]:
            bad["locality"] += 1
    elapsed = time.perf_counter() - t0
    ok = not any(bad.values()) and elapsed < 10
    report(12, "structural inequalities", ok,
           ", ".join(f"{k} violations {v}/1000" for k, v in bad.items()) + f"; {elapsed:.1f}s < 10s")
    assert ok, bad
