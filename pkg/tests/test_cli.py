from __future__ import annotations

import json
import os

import pytest

from czvar.cli import main
from czvar.experiments import EXPERIMENTS, ExperimentResult, emit_report

CONFIGS = os.path.join(os.path.dirname(__file__), os.pardir, "configs")


def write(tmp_path, data):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(data))
    return str(p)


def test_every_experiment_has_a_config():
    assert set(EXPERIMENTS) == {f[:-5] for f in os.listdir(CONFIGS) if f.endswith(".json")}


def test_kernel_check_cauchy(tmp_path, capsys):
    code = main(["kernel-check", "--config", os.path.join(CONFIGS, "kernel-check.json"), "--out", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("check,measured,threshold,status")
    assert "c0,1.0000000000000004,1,PASS" in out or "c0,1,1,PASS" in out


def test_rho_must_exceed_two(tmp_path):
    assert main(["weak11", "--config", write(tmp_path, {"rho": 2.0})]) == 2


def test_resolution_floor(tmp_path):
    cfg = write(tmp_path, {"h": 0.01, "grid": {"kind": "dyadic", "eps_max": 1.0, "count": 24},
                           "params": {"points": 20}})
    assert main(["variation-field", "--config", cfg]) == 2
    assert main(["variation-field", "--config", cfg, "--allow-floor", "--out", str(tmp_path)]) == 0


def test_bad_inputs(tmp_path):
    assert main(["variation-field", "--config", str(tmp_path / "missing.json")]) == 2
    assert main(["variation-field", "--config", write(tmp_path, {"bogus": 1})]) == 2
    assert main(["not-an-experiment", "--config", write(tmp_path, {})]) == 2
    bad = tmp_path / "broken.json"
    bad.write_text("{")
    assert main(["annulus", "--config", str(bad)]) == 2


def test_failed_check_exit_code(tmp_path):
    cfg = write(tmp_path, {"h": 1e-3, "params": {"radius": 20.0, "growth_min": 2.5}})
    assert main(["sharpness", "--config", cfg]) == 1


def test_determinism(tmp_path):
    cfg = write(tmp_path, {"h": 2e-3, "grid": {"kind": "dyadic", "eps_max": 1.0, "count": 6},
                           "params": {"points": 50, "nu": {"kind": "dirac", "y": 0.3}}})
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["variation-field", "--config", cfg, "--seed", "3", "--out", str(a)]) == 0
    assert main(["variation-field", "--config", cfg, "--seed", "3", "--out", str(b)]) == 0
    for name in os.listdir(a):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    header = (a / "variation-field.csv").read_text().splitlines()[0]
    assert header == "point_index,x_1,x_2,value"


def test_empty_result_header_only(tmp_path):
    emit_report(ExperimentResult("empty", ["a", "b"], [], []), str(tmp_path))
    assert (tmp_path / "empty.csv").read_text() == "a,b\n"
    assert (tmp_path / "empty_summary.csv").read_text() == "check,measured,threshold,status\n"


def test_weak11_columns(tmp_path):
    cfg = write(tmp_path, {"h": 2e-3, "allow_floor": True, "lambdas": [1.0, 10.0, 100.0],
                           "grid": {"kind": "dyadic", "eps_max": 2.0, "count": 12}})
    main(["weak11", "--config", cfg, "--out", str(tmp_path)])
    header = (tmp_path / "weak11.csv").read_text().splitlines()[0]
    assert header == "lambda,levelset_mass,product,bound_constant"
