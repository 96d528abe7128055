"""Seeded numerical experiments, one per quantitative statement.

Each runner takes an :class:`ExperimentConfig` and returns an
:class:`ExperimentResult` holding a table (written as CSV) and a list of
checks.  Runners are deterministic given the config and its seed.
"""
from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .czdecomp import Check, cz_decompose, good_bad_split, reconstruction_error, verify_cz
from .errors import ConfigError, DomainError
from .geometry import (GraphSpec, bumps_graph, circle_arc_graph, eval_graph, flat_graph,
                       sawtooth_graph)
from .kernels import check_bounds, check_odd, kernel_from_name
from .measures import Annulus, DiscreteMeasure, graph_measure
from .norms import StripFamily, lp_norm, strip_bmo_norm, weak_l1_profile
from .operators import TruncationGrid, family_eval, resolution_ok
from .variation import oscillation_rows, rho_variation_rows

OPERATOR_BOUND_EXPERIMENTS = ("weak11", "lp-ratio", "bmo")
GRID_EXPERIMENTS = ("variation-field", "weak11", "lp-ratio", "bmo", "pv-converge")


# ---------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    experiment: str = ""
    graph: dict | None = None
    kernel: str = "cauchy"
    rho: float = 2.1
    grid: dict = field(default_factory=lambda: {"kind": "dyadic", "eps_max": 1.0, "count": 24})
    h: float = 1e-3
    box: list | None = None
    lambdas: list | None = None
    seed: int = 0
    out: str | None = None
    allow_floor: bool = False
    params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    # -- derived objects ----------------------------------------------
    def graph_spec(self) -> GraphSpec:
        return make_graph(self.graph)

    def box_bounds(self, n: int = 1):
        box = self.box if self.box is not None else [[-1.0, 1.0]] * n
        return np.asarray(box, dtype=float).reshape(n, 2)

    def truncation_grid(self, h: float | None = None) -> TruncationGrid:
        return make_grid(self.grid, self.h if h is None else h)


def make_graph(data) -> GraphSpec:
    """Graph from a config entry; ``None`` means the flat line in the plane."""
    if data is None:
        return flat_graph()
    if isinstance(data, GraphSpec):
        return data
    if "profile" in data and "n" in data:
        return GraphSpec.from_dict(data)
    kind = data.get("profile", "flat")
    if kind == "flat":
        return flat_graph(data.get("n", 1), data.get("d", 2))
    if kind == "sawtooth":
        # slope and period given; amplitude follows
        period = float(data.get("period", 0.4))
        return sawtooth_graph(float(data["slope"]) * period / 2, period)
    if kind == "bumps":
        return bumps_graph(data["bumps"])
    if kind == "circle_arc":
        return circle_arc_graph(float(data.get("radius", 1.0)))
    raise ConfigError(f"cannot build graph from {data!r}")


def make_grid(data: dict, h: float) -> TruncationGrid:
    """Truncation grid from a config entry.

    ``kind`` is ``dyadic`` (``eps_max``, ``count``) or ``geometric``
    (``eps_max``, ``eps_min`` or ``eps_min_h`` as a multiple of h,
    ``count``).  With ``snap`` each scale is moved to the nearest
    half-integer multiple of h, between two shells of quadrature atoms.
    """
    kind = data.get("kind", "dyadic")
    eps_max = float(data.get("eps_max", 1.0))
    if kind == "dyadic":
        scales = eps_max * 2.0 ** -np.arange(int(data.get("count", 24)))
    elif kind == "geometric":
        eps_min = float(data["eps_min"]) if "eps_min" in data else float(data["eps_min_h"]) * h
        scales = np.geomspace(eps_max, eps_min, int(data.get("count", 24)))
    else:
        raise ConfigError(f"unknown grid kind {kind!r}")
    if data.get("snap"):
        scales = np.unique((np.floor(scales / h) + 0.5) * h)[::-1]
    return TruncationGrid(scales)


def validate(cfg: ExperimentConfig):
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {cfg.experiment!r}; choose from {sorted(EXPERIMENTS)}")
    if cfg.experiment in OPERATOR_BOUND_EXPERIMENTS and not cfg.rho > 2:
        raise ConfigError(f"operator bound experiments need rho > 2, got {cfg.rho}")
    if not cfg.h > 0:
        raise ConfigError("h must be positive")
    if cfg.experiment in GRID_EXPERIMENTS:
        try:
            grid = cfg.truncation_grid()
        except DomainError as exc:
            raise ConfigError(str(exc)) from None
        if not cfg.allow_floor and not resolution_ok(cfg.h, grid):
            raise ConfigError(f"h = {cfg.h:g} exceeds eps_min / 10 = {grid.eps_min / 10:g}; "
                              "use --allow-floor to probe the resolution floor")


# ---------------------------------------------------------------------
# results and reports
# ---------------------------------------------------------------------

@dataclass
class ExperimentResult:
    name: str
    columns: list
    rows: list
    checks: list
    files: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def table_csv(columns, rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(columns)
    for row in rows:
        wr.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def summary_csv(checks) -> str:
    return table_csv(["check", "measured", "threshold", "status"],
                     [(c.name, float(c.measured), float(c.threshold), "PASS" if c.passed else "FAIL")
                      for c in checks])


def emit_report(result: ExperimentResult, out_dir: str | None = None) -> str:
    """Write ``<name>.csv``, ``<name>_summary.csv`` and extra tables; return the summary text."""
    summary = summary_csv(result.checks)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        outputs = {f"{result.name}.csv": table_csv(result.columns, result.rows),
                   f"{result.name}_summary.csv": summary, **result.files}
        for fname, text in outputs.items():
            with open(os.path.join(out_dir, fname), "w", newline="") as fh:
                fh.write(text)
    return summary


# ---------------------------------------------------------------------
# measures from config entries
# ---------------------------------------------------------------------

def build_nu(data: dict, mu: DiscreteMeasure, rng=None) -> DiscreteMeasure:
    """``dirac`` (on the graph at parameter ``y``, or at ``point``),
    ``density`` (``f`` in {"gauss", "ones"} times mu) or ``segment``
    (surface measure of a second graph over ``box``)."""
    kind = data.get("kind", "dirac")
    w = complex(data.get("weight", 1.0))
    if kind == "dirac":
        if "point" in data:
            p = np.asarray(data["point"], dtype=float)
        else:
            p = eval_graph(mu.graph, float(data.get("y", 0.1234)))
        return DiscreteMeasure.dirac(p, w)
    if kind == "density":
        y = mu.params
        name = data.get("f", "gauss")
        if name == "gauss":
            f = np.exp(-np.sum(y ** 2, axis=1))
        elif name == "ones":
            f = np.ones(len(mu))
        else:
            raise ConfigError(f"unknown density {name!r}")
        return mu.with_density(w * f)
    if kind == "segment":
        spec = make_graph(data.get("graph", {"profile": "affine", "n": 1, "d": 2, "slope": 0.0,
                                              "params": {"coef": [[0.0]], "offset": 0.5}}))
        seg = graph_measure(spec, data.get("box", [[-0.5, 0.5]]), float(data.get("h", 1e-3)))
        return DiscreteMeasure(seg.points, w * seg.weights, tag="singular")
    raise ConfigError(f"unknown measure kind {kind!r}")


def piecewise_families(k, mu, grid, pieces: int, allow_floor: bool):
    """Truncation families of ``chi_i mu`` for an equal partition of the parameter range.

    Any piecewise-constant ``f = sum c_i chi_i`` then has family values
    ``sum c_i values_i`` by linearity.
    """
    y = mu.params[:, 0]
    edges = np.linspace(y.min(), y.max(), pieces + 1)
    label = np.clip(np.searchsorted(edges, y, side="right") - 1, 0, pieces - 1)
    vals = np.empty((len(mu), len(grid), pieces), dtype=complex)
    for i in range(pieces):
        vals[:, :, i] = family_eval(k, mu.restrict(label == i), mu.points, grid,
                                    allow_floor=allow_floor).values
    return vals, label


# ---------------------------------------------------------------------
# runners
# ---------------------------------------------------------------------

def run_kernel_check(cfg: ExperimentConfig) -> ExperimentResult:
    d = int(cfg.params.get("d", 2))
    k = kernel_from_name(cfg.kernel, d)
    count = int(cfg.params.get("samples", 10000))
    odd = check_odd(k, count, cfg.seed)
    b = check_bounds(k, count, cfg.seed)
    rows = [(k.name, k.n, k.d, odd.max_defect, b.c0, b.c1, b.c2, len(b.nonfinite))]
    checks = [Check("odd", odd.passed, odd.max_defect, 1e-12),
              Check("c0", b.c0 <= k.C_K * (1 + 1e-9), b.c0, k.C_K),
              Check("finite", not b.nonfinite and np.isfinite([b.c1, b.c2]).all(), float(len(b.nonfinite)), 0.0)]
    return ExperimentResult("kernel-check", ["kernel", "n", "d", "odd_defect", "c0", "c1", "c2", "nonfinite"],
                            rows, checks)


def _delta_sweep(mu, z, r, delta_max, floor):
    """Ratios ``mass(A(z, r - delta, r + delta)) / (2 delta r^(n-1))`` for delta halving down to ``floor``."""
    n = mu.graph.n if mu.graph is not None else 1
    out = []
    delta = delta_max
    while delta >= floor * (1 - 1e-12):
        m = mu.mass(Annulus(z, r - delta, r + delta))
        out.append((delta, m, m / (2 * delta * r ** (n - 1))))
        delta /= 2
    return out


def run_annulus(cfg: ExperimentConfig) -> ExperimentResult:
    rng = np.random.default_rng(cfg.seed)
    slopes = cfg.params.get("slopes", [0.0, 0.5, 0.9])
    samples = int(cfg.params.get("samples", 20))
    delta_max = float(cfg.params.get("delta_max", 0.2))
    limit = float(cfg.params.get("growth_max", 1.2))
    r_range = cfg.params.get("r_range", [0.3, 1.0])
    box = cfg.box if cfg.box is not None else [[-2.0, 2.0]]
    rows, worst = [], 0.0
    for s in slopes:
        spec = flat_graph() if s == 0 else make_graph({"profile": "sawtooth", "slope": s})
        mu = graph_measure(spec, box, cfg.h)
        for i in range(samples):
            y0 = rng.uniform(-0.5, 0.5)
            r = rng.uniform(*r_range)
            z = eval_graph(spec, y0)
            sweep = _delta_sweep(mu, z, r, delta_max, 10 * mu.h)
            for j, (delta, m, ratio) in enumerate(sweep):
                growth = ratio / sweep[j - 1][2] if j else float("nan")
                if j:
                    worst = max(worst, growth)
                rows.append((s, i, z[0], z[1], r, delta, m, ratio, growth))
    checks = [Check("annulus_growth", worst <= limit, worst, limit)]
    return ExperimentResult("annulus", ["slope", "instance", "z_1", "z_2", "r", "delta", "mass", "ratio", "growth"],
                            rows, checks)


def run_sharpness(cfg: ExperimentConfig) -> ExperimentResult:
    radius = float(cfg.params.get("radius", 20.0))
    limit = float(cfg.params.get("growth_min", 1.8))
    spec = circle_arc_graph(radius)
    box = cfg.box if cfg.box is not None else [[0.5 * radius, 0.95 * radius]]
    mu = graph_measure(spec, box, cfg.h)
    sweep = _delta_sweep(mu, np.zeros(2), radius, float(cfg.params.get("delta_max", 0.2)), 10 * mu.h)
    rows, worst = [], float("inf")
    for j, (delta, m, ratio) in enumerate(sweep):
        growth = ratio / sweep[j - 1][2] if j else float("nan")
        if j:
            worst = min(worst, growth)
        rows.append((radius, delta, m, ratio, growth))
    checks = [Check("sharpness_growth", worst >= limit, worst, limit),
              Check("declared_slope_above_one", spec.slope > 1, spec.slope, 1.0)]
    return ExperimentResult("sharpness", ["radius", "delta", "mass", "ratio", "growth"], rows, checks)


def run_variation_field(cfg: ExperimentConfig) -> ExperimentResult:
    spec = cfg.graph_spec()
    mu = graph_measure(spec, cfg.box_bounds(spec.n), cfg.h)
    nu = build_nu(cfg.params.get("nu", {"kind": "dirac"}), mu)
    k = kernel_from_name(cfg.kernel, spec.d)
    grid = cfg.truncation_grid()
    pts = mu.points
    count = cfg.params.get("points")
    if count is not None and count < len(mu):
        rng = np.random.default_rng(cfg.seed)
        pts = pts[np.sort(rng.choice(len(mu), int(count), replace=False))]
    fam = family_eval(k, nu, pts, grid, allow_floor=cfg.allow_floor)
    if cfg.params.get("functional", "variation") == "oscillation":
        r = cfg.params.get("r") or grid.scales[::2].tolist()
        value = oscillation_rows(fam.values, grid, r)
    else:
        value = rho_variation_rows(fam.values, cfg.rho)
    rows = [(i, *p, v) for i, (p, v) in enumerate(zip(pts, value))]
    checks = [Check("finite", bool(np.all(np.isfinite(value))), float(np.max(value)), float("inf"))]
    cols = ["point_index"] + [f"x_{i + 1}" for i in range(spec.d)] + ["value"]
    return ExperimentResult("variation-field", cols, rows, checks,
                            files={"variation-field_maximal.csv": fam.maximal_to_csv()})


def _weak_constant(k, spec, box, h, nu_data, grid, rho, lambdas, allow_floor):
    mu = graph_measure(spec, box, h)
    nu = build_nu(nu_data, mu)
    field_values = rho_variation_rows(family_eval(k, nu, mu.points, grid, allow_floor=allow_floor).values, rho)
    prof = weak_l1_profile(mu, field_values, lambdas)
    return prof, nu.total_variation


def run_weak11(cfg: ExperimentConfig) -> ExperimentResult:
    graphs = cfg.params.get("graphs") or [cfg.graph]
    nus = cfg.params.get("nus", [{"kind": "dirac"}])
    lambdas = np.asarray(cfg.lambdas if cfg.lambdas is not None else np.logspace(0, 3, 25))
    grid = cfg.truncation_grid()
    checks, files, main = [], {}, None
    const = {}
    for gi, gdata in enumerate(graphs):
        spec = make_graph(gdata)
        k = kernel_from_name(cfg.kernel, spec.d)
        box = cfg.box_bounds(spec.n)
        for ni, nu_data in enumerate(nus):
            for ri, h in enumerate((cfg.h, cfg.h / 2)):
                prof, norm = _weak_constant(k, spec, box, h, nu_data, grid, cfg.rho, lambdas, cfg.allow_floor)
                const[gi, ni, ri] = prof.sup() / norm
                text = prof.to_csv(norm)
                files[f"weak11_g{gi}_nu{ni}_h{ri}.csv"] = text
                if main is None:
                    main = prof, norm
    vals = np.array(list(const.values()))
    checks.append(Check("finite", bool(np.all(np.isfinite(vals)) and np.all(vals > 0)), float(vals.max()), float("inf")))
    res = max(max(const[g, n, 0], const[g, n, 1]) / min(const[g, n, 0], const[g, n, 1])
              for g in range(len(graphs)) for n in range(len(nus)))
    checks.append(Check("resolution_stability", res < 2.0, res, 2.0))
    if len(graphs) > 1:
        spread = max(max(const[g, n, 0] for g in range(len(graphs))) / min(const[g, n, 0] for g in range(len(graphs)))
                     for n in range(len(nus)))
        checks.append(Check("graph_spread", spread < 10.0, spread, 10.0))
    prof, norm = main
    rows = [(lam, ms, pr, pr / norm) for lam, ms, pr in zip(prof.lambdas, prof.levelset_mass, prof.product)]
    return ExperimentResult("weak11", ["lambda", "levelset_mass", "product", "bound_constant"], rows, checks, files)


def run_lp_ratio(cfg: ExperimentConfig) -> ExperimentResult:
    spec = cfg.graph_spec()
    k = kernel_from_name(cfg.kernel, spec.d)
    box = cfg.box_bounds(spec.n)
    grid = cfg.truncation_grid()
    ps = cfg.params.get("ps", [1.5, 2.0, 4.0])
    count = int(cfg.params.get("functions", 20))
    pieces = int(cfg.params.get("pieces", 16))
    limit = float(cfg.params.get("drift_max", 0.2))
    rng = np.random.default_rng(cfg.seed)
    coef = rng.standard_normal((count, pieces)) + 1j * rng.standard_normal((count, pieces))
    ratios = {}
    for ri, h in enumerate((cfg.h, cfg.h / 2)):
        mu = graph_measure(spec, box, h)
        vals, label = piecewise_families(k, mu, grid, pieces, cfg.allow_floor)
        for fi in range(count):
            f = coef[fi][label]
            v = rho_variation_rows(vals @ coef[fi], cfg.rho)
            for p in ps:
                ratios[fi, p, ri] = lp_norm(mu, v, p) / lp_norm(mu, f, p)
    rows, worst = [], 0.0
    for fi in range(count):
        for p in ps:
            a, b = ratios[fi, p, 0], ratios[fi, p, 1]
            drift = abs(b / a - 1.0)
            worst = max(worst, drift)
            rows.append((fi, p, a, b, drift))
    checks = [Check("refinement_drift", worst < limit, worst, limit)]
    return ExperimentResult("lp-ratio", ["function", "p", "ratio_h", "ratio_h2", "drift"], rows, checks)


def run_bmo(cfg: ExperimentConfig) -> ExperimentResult:
    spec = cfg.graph_spec()
    k = kernel_from_name(cfg.kernel, spec.d)
    box = cfg.box_bounds(spec.n)
    grid = cfg.truncation_grid()
    count = int(cfg.params.get("functions", 5))
    pieces = int(cfg.params.get("pieces", 16))
    levels = int(cfg.params.get("levels", 3))
    limit = float(cfg.params.get("drift_max", 0.2))
    rng = np.random.default_rng(cfg.seed)
    signs = rng.choice([-1.0, 1.0], size=(count, pieces))
    base_strips = StripFamily.dyadic(box, levels=levels)
    rich_strips = StripFamily.dyadic(box, levels=levels + 1)
    variants = {"base": (cfg.h, grid, base_strips), "h_half": (cfg.h / 2, grid, base_strips),
                "grid_refined": (cfg.h, grid.refined(), base_strips), "strips_enriched": (cfg.h, grid, rich_strips)}
    cache = {}
    norms = {}
    for name, (h, g, strips) in variants.items():
        key = (h, len(g))
        if key not in cache:
            mu = graph_measure(spec, box, h)
            cache[key] = (mu, *piecewise_families(k, mu, g, pieces, cfg.allow_floor))
        mu, vals, label = cache[key]
        for fi in range(count):
            v = rho_variation_rows(vals @ signs[fi], cfg.rho)
            norms[name, fi] = strip_bmo_norm(mu, v, strips).value
    rows, worst = [], 0.0
    for fi in range(count):
        base = norms["base", fi]
        for name in variants:
            drift = abs(norms[name, fi] / base - 1.0)
            if name != "base":
                worst = max(worst, drift)
            rows.append((fi, name, norms[name, fi], drift))
    checks = [Check("finite", bool(np.all(np.isfinite(list(norms.values())))), max(norms.values()), float("inf")),
              Check("refinement_drift", worst < limit, worst, limit)]
    return ExperimentResult("bmo", ["function", "variant", "bmo_norm", "drift"], rows, checks)


def run_pv_converge(cfg: ExperimentConfig) -> ExperimentResult:
    spec = cfg.graph_spec()
    k = kernel_from_name(cfg.kernel, spec.d)
    box = cfg.box_bounds(spec.n)
    grid = cfg.truncation_grid()
    nus = cfg.params.get("nus", [{"kind": "density"}])
    count = int(cfg.params.get("points", 1000))
    tol = float(cfg.params.get("tail_max", 1e-3))
    frac_min = float(cfg.params.get("fraction_min", 0.99))
    interior = float(cfg.params.get("interior", 0.9))
    tail_index = int(cfg.params.get("tail_index", 4))
    mu = graph_measure(spec, box, cfg.h)
    rng = np.random.default_rng(cfg.seed)
    lo, hi = box[0]
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    inner = np.flatnonzero(np.all(np.abs(mu.params - mid) <= interior * half, axis=1))
    idx = np.sort(rng.choice(inner, min(count, inner.size), replace=False))
    pts = mu.points[idx]
    eps0 = grid.scales[-tail_index]
    cols = grid.scales <= eps0
    rows, checks = [], []
    for ni, nu_data in enumerate(nus):
        nu = build_nu(nu_data, mu)
        V = family_eval(k, nu, pts, grid, allow_floor=cfg.allow_floor).values[:, cols]
        tail = np.abs(V[:, :, None] - V[:, None, :]).max(axis=(1, 2))
        frac = float(np.mean(tail < tol))
        checks.append(Check(f"tail_fraction_{nu_data.get('kind', 'dirac')}_{ni}", frac >= frac_min, frac, frac_min))
        rows.extend((ni, int(i), eps0, t) for i, t in zip(idx, tail))
    return ExperimentResult("pv-converge", ["measure", "atom_index", "eps0", "tail"], rows, checks)


def cz_instance(seed: int, h: float = 0.02, box=((-1.0, 1.0),)):
    """Graph measure and a mixed measure nu (graph density plus off-graph atoms)."""
    rng = np.random.default_rng(seed)
    slope = (0.0, 0.5, 0.9)[seed % 3]
    spec = flat_graph() if slope == 0 else make_graph({"profile": "sawtooth", "slope": slope, "period": 0.5})
    mu = graph_measure(spec, box, h)
    f = rng.standard_normal(len(mu)) + 1j * rng.standard_normal(len(mu))
    f *= rng.uniform(size=len(mu)) < 0.3
    k = int(rng.integers(1, 6))
    atoms = DiscreteMeasure(np.column_stack([rng.uniform(-1, 1, k), rng.uniform(-0.5, 0.5, k)]),
                            5 * rng.standard_normal(k) + 1j * rng.standard_normal(k))
    return mu, mu.with_density(f) + atoms


def run_czdemo(cfg: ExperimentConfig) -> ExperimentResult:
    instances = int(cfg.params.get("instances", 50))
    factors = cfg.params.get("lambda_factors", [1.5, 15.0, 150.0, 1500.0])
    rows, failures = [], []
    worst_mass, worst_recon, worst_oh, worst_half = 0.0, 0.0, 0.0, float("inf")
    for i in range(instances):
        mu, nu = cz_instance(cfg.seed + i, h=cfg.h)
        base = 2.0 ** (mu.d + 1) * nu.total_variation / mu.total_variation
        for fac in factors:
            lam = base * fac
            r = cz_decompose(mu, nu, lam)
            rep = verify_cz(r, mu, nu)
            good, bad = good_bad_split(nu, r)
            mass0 = max((abs(b.total_mass) / nu.total_variation for b in bad), default=0.0)
            recon = reconstruction_error(nu, good, bad)
            worst_mass = max(worst_mass, mass0)
            worst_recon = max(worst_recon, recon)
            worst_oh = max(worst_oh, rep["omega_hat"].measured)
            worst_half = min(worst_half, rep["half_mass"].measured)
            failures += [f"{i}:{fac}:{c.name}" for c in rep.checks.values() if not c.passed]
            rows.append((i, lam, len(r), rep["(1)"].measured, rep["(2)"].measured, rep["(5)"].measured,
                         rep["(6)"].measured, rep["overlap"].measured, rep["omega_hat"].measured, mass0,
                         rep.passed))
    checks = [Check("invariants", not failures, float(len(failures)), 0.0),
              Check("bad_mass_zero", worst_mass <= 1e-12, worst_mass, 1e-12),
              Check("reconstruction", worst_recon <= 1e-12, worst_recon, 1e-12),
              Check("half_mass", worst_half >= 0.5, worst_half, 0.5),
              Check("omega_hat_constant", worst_oh <= 2.0 ** 3 * max(r[7] for r in rows), worst_oh,
                    2.0 ** 3 * max(r[7] for r in rows))]
    cols = ["instance", "lambda", "cubes", "ratio_1", "ratio_2", "c5", "c0", "overlap", "omega_hat", "bad_mass", "passed"]
    return ExperimentResult("czdemo", cols, rows, checks)


EXPERIMENTS = {
    "kernel-check": run_kernel_check,
    "annulus": run_annulus,
    "sharpness": run_sharpness,
    "variation-field": run_variation_field,
    "weak11": run_weak11,
    "lp-ratio": run_lp_ratio,
    "bmo": run_bmo,
    "pv-converge": run_pv_converge,
    "czdemo": run_czdemo,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    validate(cfg)
    return EXPERIMENTS[cfg.experiment](cfg)
