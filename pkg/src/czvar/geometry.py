"""Lipschitz graphs in R^d and the horizontal/vertical cone geometry.

A graph is ``{(y, A(y)) : y in R^n}`` up to a rigid motion of R^d, with
``A : R^n -> R^(d-n)``.  The profile ``A`` is one of a handful of closed
forms or a sampled table.  Besides evaluation and the area element, this
module holds the maps used to flatten annuli around a graph point:
the split ``x = x_H + x_V``, the radial rescaling ``upsilon_map`` and the
pseudo-distance ``phi_metric``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError, SingularityError

PROFILES = ("flat", "affine", "sawtooth", "bumps", "circle_arc", "table")

# circle_arc: the graph follows |x| = r for y in [ARC_LO*r, ARC_HI*r]
ARC_LO = 0.8
ARC_HI = 0.9


@dataclass(frozen=True)
class GraphSpec:
    """Parametric n-dimensional Lipschitz graph in R^d.

    Parameters
    ----------
    n, d : int
        Intrinsic and ambient dimension, ``1 <= n < d``.
    profile : str
        One of ``PROFILES``.
    params : dict
        Profile parameters (see ``profile_value``).
    slope : float
        Declared Lipschitz constant of the profile.
    motion : dict or None
        Optional ``{"rotation": (d, d), "translation": (d,)}``.
    """

    n: int
    d: int
    profile: str = "flat"
    params: dict = field(default_factory=dict)
    slope: float = 0.0
    motion: dict | None = None

    def __post_init__(self):
        if not (1 <= self.n < self.d):
            raise DomainError(f"need 1 <= n < d, got n={self.n}, d={self.d}")
        if self.profile not in PROFILES:
            raise DomainError(f"unknown profile {self.profile!r}")
        if self.slope < 0:
            raise DomainError("slope must be nonnegative")
        if self.profile in ("circle_arc", "table") and self.n != 1:
            raise DomainError(f"profile {self.profile!r} needs n = 1")
        if self.profile == "circle_arc" and self.d != 2:
            raise DomainError("circle_arc profile needs d = 2")
        if self.motion is not None:
            rot = self.rotation
            if rot.shape != (self.d, self.d) or not np.allclose(rot @ rot.T, np.eye(self.d), atol=1e-12):
                raise DomainError("motion rotation must be a d x d orthogonal matrix")

    # -- derived ------------------------------------------------------
    @property
    def codim(self) -> int:
        return self.d - self.n

    @property
    def rotation(self) -> np.ndarray:
        if self.motion is None or "rotation" not in self.motion:
            return np.eye(self.d)
        return np.asarray(self.motion["rotation"], dtype=float)

    @property
    def translation(self) -> np.ndarray:
        if self.motion is None or "translation" not in self.motion:
            return np.zeros(self.d)
        return np.asarray(self.motion["translation"], dtype=float)

    @property
    def sharpness_counterexample(self) -> bool:
        """True for profiles built to violate ``slope < 1`` on purpose."""
        return bool(self.params.get("sharpness_counterexample", self.profile == "circle_arc"))

    # -- serialization ------------------------------------------------
    def to_dict(self) -> dict:
        out = {"n": self.n, "d": self.d, "profile": self.profile,
               "params": _jsonable(self.params), "slope": self.slope}
        if self.motion is not None:
            out["motion"] = _jsonable(self.motion)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "GraphSpec":
        unknown = set(data) - {"n", "d", "profile", "params", "slope", "motion"}
        if unknown:
            raise DomainError(f"unknown graph keys: {sorted(unknown)}")
        return cls(n=int(data["n"]), d=int(data["d"]),
                   profile=data.get("profile", "flat"),
                   params=dict(data.get("params", {})),
                   slope=float(data.get("slope", 0.0)),
                   motion=data.get("motion"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GraphSpec":
        return cls.from_dict(json.loads(text))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


# ---------------------------------------------------------------------
# built-in constructors
# ---------------------------------------------------------------------

def flat_graph(n: int = 1, d: int = 2, **kw) -> GraphSpec:
    return GraphSpec(n=n, d=d, profile="flat", slope=0.0, **kw)


def affine_graph(coef, n: int = 1, d: int = 2, offset=0.0, **kw) -> GraphSpec:
    c = _affine_matrix(coef, n, d)
    return GraphSpec(n=n, d=d, profile="affine",
                     params={"coef": c.tolist(), "offset": offset},
                     slope=float(np.linalg.norm(c, 2)), **kw)


def sawtooth_graph(amplitude: float, period: float, n: int = 1, d: int = 2, **kw) -> GraphSpec:
    return GraphSpec(n=n, d=d, profile="sawtooth",
                     params={"amplitude": amplitude, "period": period},
                     slope=2.0 * abs(amplitude) / period, **kw)


def bumps_graph(bumps, n: int = 1, d: int = 2, slope: float | None = None, **kw) -> GraphSpec:
    """Sum of Gaussian bumps ``a * exp(-|y - c|^2 / w^2)`` in the first vertical coordinate."""
    bumps = [{"amplitude": float(b["amplitude"]),
              "center": list(np.atleast_1d(np.asarray(b["center"], dtype=float))),
              "width": float(b["width"])} for b in bumps]
    if slope is None:
        # each bump has Lipschitz constant |a| sqrt(2/e) / w
        slope = sum(abs(b["amplitude"]) * math.sqrt(2.0 / math.e) / b["width"] for b in bumps)
    return GraphSpec(n=n, d=d, profile="bumps", params={"bumps": bumps}, slope=slope, **kw)


def circle_arc_graph(radius: float = 1.0) -> GraphSpec:
    """Graph over R that contains an arc of the circle ``|x| = radius``.

    ``A(y) = 0.75 y`` for ``y <= 0.8 r``, ``sqrt(r^2 - y^2)`` on
    ``[0.8 r, 0.9 r]`` and constant afterwards.  The arc has slopes between
    4/3 and about 2.06, so the graph is a deliberate ``slope > 1`` case.
    """
    s = ARC_HI / math.sqrt(1.0 - ARC_HI ** 2)
    return GraphSpec(n=1, d=2, profile="circle_arc",
                     params={"radius": radius, "sharpness_counterexample": True}, slope=s)


def table_graph(knots, values, d: int = 2, slope: float | None = None) -> GraphSpec:
    knots = np.asarray(knots, dtype=float)
    vals = np.asarray(values, dtype=float).reshape(len(knots), -1)
    if vals.shape[1] != d - 1:
        raise DomainError("table values need d - 1 columns")
    if np.any(np.diff(knots) <= 0):
        raise DomainError("table knots must be strictly increasing")
    if slope is None:
        slope = float(np.max(np.linalg.norm(np.diff(vals, axis=0), axis=1) / np.diff(knots)))
    return GraphSpec(n=1, d=d, profile="table",
                     params={"knots": knots.tolist(), "values": vals.tolist()}, slope=slope)


def _affine_matrix(coef, n, d):
    c = np.asarray(coef, dtype=float)
    if c.ndim == 0:
        m = np.zeros((d - n, n))
        m[0, 0] = float(c)
        return m
    return c.reshape(d - n, n)


# ---------------------------------------------------------------------
# profile evaluation
# ---------------------------------------------------------------------

def _as_params(spec: GraphSpec, y) -> tuple[np.ndarray, bool]:
    # scalar -> one point (n = 1); 1-D of length n > 1 -> one point;
    # 1-D when n = 1 -> a batch of points; 2-D -> (N, n) batch
    y = np.asarray(y, dtype=float)
    single = y.ndim == 0 or (y.ndim == 1 and spec.n > 1)
    if y.ndim == 0:
        y = y.reshape(1, 1)
    elif y.ndim == 1:
        y = y.reshape(1, -1) if spec.n > 1 else y.reshape(-1, 1)
    if y.ndim != 2 or y.shape[1] != spec.n:
        raise DomainError(f"parameter points need {spec.n} coordinates")
    return y, single


def _tri(t):
    # triangle wave, 0 at integers, 1 at half-integers
    frac = t - np.floor(t)
    return 1.0 - np.abs(2.0 * frac - 1.0)


def profile_value(spec: GraphSpec, y) -> np.ndarray:
    """Evaluate the profile ``A`` at parameter points ``y`` of shape (N, n)."""
    y, _ = _as_params(spec, y)
    out = np.zeros((y.shape[0], spec.codim))
    p = spec.params
    if spec.profile == "flat":
        pass
    elif spec.profile == "affine":
        c = _affine_matrix(p.get("coef", 0.0), spec.n, spec.d)
        out = y @ c.T + np.asarray(p.get("offset", 0.0), dtype=float)
    elif spec.profile == "sawtooth":
        out[:, 0] = p["amplitude"] * _tri(y[:, 0] / p["period"])
    elif spec.profile == "bumps":
        for b in p["bumps"]:
            r2 = np.sum((y - np.asarray(b["center"])) ** 2, axis=1)
            out[:, 0] += b["amplitude"] * np.exp(-r2 / b["width"] ** 2)
    elif spec.profile == "circle_arc":
        r = p["radius"]
        t = y[:, 0]
        lo, hi = ARC_LO * r, ARC_HI * r
        arc = np.sqrt(np.clip(r * r - t * t, 0.0, None))
        out[:, 0] = np.where(t <= lo, 0.75 * t,
                             np.where(t <= hi, arc, math.sqrt(r * r - hi * hi)))
    elif spec.profile == "table":
        knots = np.asarray(p["knots"])
        vals = np.asarray(p["values"]).reshape(len(knots), -1)
        t = y[:, 0]
        if np.any(t < knots[0]) or np.any(t > knots[-1]):
            raise DomainError(f"parameter outside table range [{knots[0]}, {knots[-1]}]")
        for j in range(spec.codim):
            out[:, j] = np.interp(t, knots, vals[:, j])
    return out


def profile_jacobian(spec: GraphSpec, y) -> tuple[np.ndarray, np.ndarray]:
    """Jacobian ``DA`` of shape (N, d-n, n) and a kink mask of shape (N,).

    At kinks the right-sided derivative is returned and the mask is set.
    Sampled tables fall back to one-sided finite differences.
    """
    y, _ = _as_params(spec, y)
    N = y.shape[0]
    jac = np.zeros((N, spec.codim, spec.n))
    kink = np.zeros(N, dtype=bool)
    p = spec.params
    if spec.profile == "flat":
        pass
    elif spec.profile == "affine":
        jac[:] = _affine_matrix(p.get("coef", 0.0), spec.n, spec.d)
    elif spec.profile == "sawtooth":
        a, per = p["amplitude"], p["period"]
        t = y[:, 0] / per
        frac = t - np.floor(t)
        jac[:, 0, 0] = np.where(frac < 0.5, 2.0 * a / per, -2.0 * a / per)
        kink = np.isclose(frac, 0.0, atol=1e-12) | np.isclose(frac, 0.5, atol=1e-12) | np.isclose(frac, 1.0, atol=1e-12)
    elif spec.profile == "bumps":
        for b in p["bumps"]:
            diff = y - np.asarray(b["center"])
            e = np.exp(-np.sum(diff ** 2, axis=1) / b["width"] ** 2)
            jac[:, 0, :] += (b["amplitude"] * e * (-2.0 / b["width"] ** 2))[:, None] * diff
    elif spec.profile == "circle_arc":
        r = p["radius"]
        t = y[:, 0]
        lo, hi = ARC_LO * r, ARC_HI * r
        on_arc = (t >= lo) & (t < hi)
        slope_arc = -t / np.sqrt(np.clip(r * r - t * t, 1e-300, None))
        jac[:, 0, 0] = np.where(t < lo, 0.75, np.where(on_arc, slope_arc, 0.0))
        kink = np.isclose(t, lo, rtol=0, atol=1e-12 * r) | np.isclose(t, hi, rtol=0, atol=1e-12 * r)
    elif spec.profile == "table":
        knots = np.asarray(p["knots"])
        hg = 1e-5 * (knots[-1] - knots[0])
        t = y[:, 0]
        # one-sided stencil when a knot sits inside the central stencil
        near = np.abs(t[:, None] - knots[None, 1:-1]) < hg
        kink = near.any(axis=1) if knots.size > 2 else kink
        left = np.clip(t - hg, knots[0], knots[-1])
        right = np.clip(t + hg, knots[0], knots[-1])
        left = np.where(kink, t, left)
        fl = profile_value(spec, left[:, None])
        fr = profile_value(spec, right[:, None])
        jac[:, :, 0] = (fr - fl) / (right - left)[:, None]
    return jac, kink


def fd_jacobian(spec: GraphSpec, y, step: float | None = None) -> np.ndarray:
    """Central-difference Jacobian of the profile (reference evaluator)."""
    y, _ = _as_params(spec, y)
    if step is None:
        step = 1e-5 * _domain_diameter(spec)
    jac = np.zeros((y.shape[0], spec.codim, spec.n))
    for i in range(spec.n):
        e = np.zeros(spec.n)
        e[i] = step
        jac[:, :, i] = (profile_value(spec, y + e) - profile_value(spec, y - e)) / (2 * step)
    return jac


def _domain_diameter(spec: GraphSpec) -> float:
    p = spec.params
    if spec.profile == "table":
        return float(p["knots"][-1] - p["knots"][0])
    if spec.profile == "circle_arc":
        return float(p["radius"])
    return float(p.get("domain_diameter", 1.0))


# ---------------------------------------------------------------------
# graph points and surface weights
# ---------------------------------------------------------------------

def eval_graph(spec: GraphSpec, y) -> np.ndarray:
    """Map parameter points to graph points ``R (y, A(y)) + t``.

    Returns shape (d,) for a single point, (N, d) otherwise.
    """
    yy, single = _as_params(spec, y)
    pts = np.hstack([yy, profile_value(spec, yy)])
    if spec.motion is not None:
        pts = pts @ spec.rotation.T + spec.translation
    return pts[0] if single else pts


def area_weight(spec: GraphSpec, y, return_kink: bool = False):
    """Area element ``sqrt(det(I_n + DA^T DA))`` of the graph at ``y``.

    Always ``>= 1``.  With ``return_kink=True`` a boolean mask flags points
    where the derivative was taken one-sidedly.
    """
    yy, single = _as_params(spec, y)
    jac, kink = profile_jacobian(spec, yy)
    gram = np.eye(spec.n)[None] + np.einsum("kij,kil->kjl", jac, jac)
    w = np.sqrt(np.linalg.det(gram))
    if single:
        w, kink = float(w[0]), bool(kink[0])
    return (w, kink) if return_kink else w


def measure_slope(spec: GraphSpec, box, sample_count: int = 10000, seed=0) -> float:
    """Largest sampled difference quotient ``|A(y1)-A(y2)| / |y1-y2|`` over ``box``."""
    rng = np.random.default_rng(seed)
    lo, hi = _box_bounds(box, spec.n)
    y1 = rng.uniform(lo, hi, size=(sample_count, spec.n))
    # mix of far pairs and near pairs so that local slopes are seen
    scale = np.exp(rng.uniform(np.log(1e-6), 0.0, size=(sample_count, 1))) * (hi - lo)
    y2 = np.clip(y1 + scale * rng.standard_normal((sample_count, spec.n)), lo, hi)
    dy = np.linalg.norm(y1 - y2, axis=1)
    keep = dy > 0
    da = np.linalg.norm(profile_value(spec, y1) - profile_value(spec, y2), axis=1)
    return float(np.max(da[keep] / dy[keep]))


def _box_bounds(box, n):
    b = np.asarray(box, dtype=float).reshape(n, 2)
    return b[:, 0], b[:, 1]


# ---------------------------------------------------------------------
# horizontal / vertical machinery
# ---------------------------------------------------------------------

class HVSplit(NamedTuple):
    x_H: np.ndarray
    x_V: np.ndarray


def split_hv(x, n: int) -> HVSplit:
    """Split ``x`` into the first ``n`` coordinates and the rest (both in R^d)."""
    x = np.asarray(x, dtype=float)
    xh = np.zeros_like(x)
    xv = np.zeros_like(x)
    xh[..., :n] = x[..., :n]
    xv[..., n:] = x[..., n:]
    return HVSplit(xh, xv)


def upsilon_map(x, n: int, direction: str = "forward") -> np.ndarray:
    """Radial-horizontal rescaling and its inverse.

    forward: ``(|x| / |x_H|) x_H + x_V``
    inverse: ``sqrt(1 - |x_V|^2 / |x_H|^2) x_H + x_V``, defined for ``|x_V| < |x_H|``.
    """
    x = np.asarray(x, dtype=float)
    xh = x[..., :n]
    xv = x[..., n:]
    nh = np.linalg.norm(xh, axis=-1)
    if np.any(nh == 0):
        raise SingularityError("upsilon_map needs x_H != 0")
    nv = np.linalg.norm(xv, axis=-1)
    q = nv / nh
    if direction == "forward":
        factor = np.sqrt(1.0 + q * q)
    elif direction == "inverse":
        if np.any(q >= 1):
            raise DomainError("inverse upsilon_map needs |x_V| < |x_H|")
        factor = np.sqrt(1.0 - q * q)
    else:
        raise DomainError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    out = x.copy()
    out[..., :n] = xh * factor[..., None]
    return out


def phi_metric(x, y, n: int):
    """``| (|x|/|x_H|) x_H - (|y|/|y_H|) y_H |``; vectorized over leading axes."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xh, yh = x[..., :n], y[..., :n]
    nxh = np.linalg.norm(xh, axis=-1)
    nyh = np.linalg.norm(yh, axis=-1)
    if np.any(nxh == 0) or np.any(nyh == 0):
        raise SingularityError("phi_metric needs nonzero horizontal parts")
    u = (np.linalg.norm(x, axis=-1) / nxh)[..., None] * xh
    v = (np.linalg.norm(y, axis=-1) / nyh)[..., None] * yh
    out = np.linalg.norm(u - v, axis=-1)
    return float(out) if out.ndim == 0 else out


def sample_cone(rng: np.random.Generator, count: int, s: float, n: int = 1, d: int = 2,
                boundary_fraction: float = 0.25) -> np.ndarray:
    """Random points with ``|x_V| <= s |x_H|`` and ``|x_H| = 1``.

    A fraction of the samples sits exactly on the cone boundary, where
    the extremal ratios live.
    """
    xh = rng.standard_normal((count, n))
    xh /= np.linalg.norm(xh, axis=1, keepdims=True)
    vdir = rng.standard_normal((count, d - n))
    vdir /= np.linalg.norm(vdir, axis=1, keepdims=True)
    t = s * rng.uniform(0.0, 1.0, size=count) ** 0.5
    t[rng.uniform(size=count) < boundary_fraction] = s
    return np.hstack([xh, vdir * t[:, None]])


def cone_constants(s: float) -> dict:
    """Constants from the cone inequality argument for slope ``s`` in (0, 1).

    ``a = (1 - s^2) / (4 (1 + s^2))``; ``delta`` is half of the largest
    value satisfying both smallness conditions on it; ``bound`` is
    ``max(3, 3/a, s / sqrt(delta (2 - delta)))``.
    """
    if not (0.0 < s < 1.0):
        raise DomainError(f"cone slope must lie in (0, 1), got {s}")
    a = (1.0 - s * s) / (4.0 * (1.0 + s * s))
    # (3/2) delta (2 - delta) < a  and  1 - delta - s^2 > (1 - s^2) / 2
    d1 = 1.0 - math.sqrt(1.0 - 2.0 * a / 3.0)
    d2 = (1.0 - s * s) / 2.0
    delta = 0.5 * min(d1, d2)
    bound = max(3.0, 3.0 / a, s / math.sqrt(delta * (2.0 - delta)))
    return {"a": a, "delta": delta, "bound": bound}


class ConeReport(NamedTuple):
    max_ratio: float
    bound: float
    a: float
    delta: float
    samples: int


def _cone_pairs(rng, count, s, n, d):
    x = sample_cone(rng, count, s, n, d)
    # y = x + z with z itself in the cone, |z_H| log-uniform in [1e-4, 1e2]
    z = sample_cone(rng, count, s, n, d)
    z *= np.exp(rng.uniform(np.log(1e-4), np.log(1e2), size=(count, 1)))
    y = x + z
    hv = np.linalg.norm(y[:, n:], axis=1)
    hh = np.linalg.norm(y[:, :n], axis=1)
    keep = (hh > 0) & (hv <= s * hh)
    return x[keep], y[keep]


def cone_inequality_ratio(s: float, sample_count: int = 100000, seed=0,
                          n: int = 1, d: int = 2) -> ConeReport:
    """Largest sampled ``|x_V - y_V| / phi_metric(x, y)`` over admissible pairs.

    Pairs satisfy ``|x_V| <= s|x_H|``, ``|y_V| <= s|y_H|`` and
    ``|x_V - y_V| <= s|x_H - y_H|``; coincident pairs are skipped.
    """
    c = cone_constants(s)
    rng = np.random.default_rng(seed)
    x, y = _cone_pairs(rng, sample_count, s, n, d)
    num = np.linalg.norm(x[:, n:] - y[:, n:], axis=1)
    den = phi_metric(x, y, n)
    den = np.atleast_1d(den)
    ok = den > 0
    ratio = float(np.max(num[ok] / den[ok])) if ok.any() else 0.0
    return ConeReport(ratio, c["bound"], c["a"], c["delta"], int(ok.sum()))


def upsilon_lipschitz(s: float, sample_count: int = 100000, seed=0,
                      n: int = 1, d: int = 2) -> tuple[float, float]:
    """Empirical Lipschitz constants of ``upsilon_map`` on the cone and of its inverse."""
    rng = np.random.default_rng(seed)
    x, y = _cone_pairs(rng, sample_count, s, n, d)
    ux = upsilon_map(x, n)
    uy = upsilon_map(y, n)
    dxy = np.linalg.norm(x - y, axis=1)
    duv = np.linalg.norm(ux - uy, axis=1)
    ok = (dxy > 0) & (duv > 0)
    return float(np.max(duv[ok] / dxy[ok])), float(np.max(dxy[ok] / duv[ok]))
