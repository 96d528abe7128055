"""Finite complex measures as weighted atoms, graph quadrature and regions.

``graph_measure`` discretizes the surface measure of a graph patch by the
midpoint rule, so that masses of cubes, balls and annuli become exact
set operations on atoms.  Membership is always closed: a point on the
boundary of a region belongs to it.
"""
from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateResolutionError, DomainError, HypothesisWarning
from .geometry import GraphSpec, area_weight, eval_graph


# ---------------------------------------------------------------------
# regions
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class Cube:
    """Closed axis-parallel cube."""

    center: np.ndarray
    side: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not self.side > 0:
            raise DomainError("cube side must be positive")

    def scaled(self, a: float) -> "Cube":
        return Cube(self.center, a * self.side)

    def contains(self, points) -> np.ndarray:
        p = np.atleast_2d(points)
        return np.max(np.abs(p - self.center), axis=1) <= self.side / 2

    def intersects(self, other: "Cube") -> bool:
        return bool(np.max(np.abs(self.center - other.center)) <= (self.side + other.side) / 2)


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def contains(self, points) -> np.ndarray:
        p = np.atleast_2d(points)
        return np.linalg.norm(p - np.asarray(self.center, dtype=float), axis=1) <= self.radius


@dataclass(frozen=True)
class Annulus:
    """Closed annulus ``a <= |x - z| <= b``."""

    center: np.ndarray
    inner: float
    outer: float

    def __post_init__(self):
        if not (0 < self.inner <= self.outer):
            raise DomainError(f"annulus needs 0 < a <= b, got a={self.inner}, b={self.outer}")

    def contains(self, points) -> np.ndarray:
        p = np.atleast_2d(points)
        r = np.linalg.norm(p - np.asarray(self.center, dtype=float), axis=1)
        return (r >= self.inner) & (r <= self.outer)


# ---------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class DiscreteMeasure:
    """Weighted atoms ``sum_i w_i delta_{x_i}`` with complex weights.

    ``tag`` is ``"graph-quadrature"``, ``"singular"`` or ``"mixed"``.
    Graph quadratures also carry the graph, the resolution ``h`` and the
    parameter points ``params`` of their atoms.
    """

    points: np.ndarray
    weights: np.ndarray
    tag: str = "singular"
    graph: GraphSpec | None = None
    h: float | None = None
    params: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=complex))
        if pts.shape[0] != w.shape[0]:
            raise DomainError("points and weights differ in length")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(w))):
            raise DomainError("measure atoms must be finite")
        if np.any(w == 0):
            raise DomainError("zero weights are not allowed; drop those atoms")
        if self.tag not in ("graph-quadrature", "singular", "mixed"):
            raise DomainError(f"unknown measure tag {self.tag!r}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    # -- basic quantities ---------------------------------------------
    def __len__(self) -> int:
        return self.weights.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def abs_weights(self) -> np.ndarray:
        return np.abs(self.weights)

    @property
    def total_variation(self) -> float:
        return float(np.sum(np.abs(self.weights)))

    @property
    def total_mass(self) -> complex:
        return complex(np.sum(self.weights))

    # -- constructors -------------------------------------------------
    @classmethod
    def dirac(cls, point, weight=1.0) -> "DiscreteMeasure":
        return cls(np.atleast_2d(point), np.array([weight]), tag="singular")

    def with_density(self, f) -> "DiscreteMeasure":
        """The measure ``f * self`` (atoms where ``f = 0`` are dropped)."""
        f = np.broadcast_to(np.asarray(f, dtype=complex), self.weights.shape)
        w = f * self.weights
        keep = w != 0
        return DiscreteMeasure(self.points[keep], w[keep], tag=self.tag, graph=self.graph, h=self.h,
                               params=None if self.params is None else self.params[keep])

    def scaled(self, alpha) -> "DiscreteMeasure":
        return self.with_density(alpha)

    def restrict(self, mask) -> "DiscreteMeasure":
        mask = np.asarray(mask, dtype=bool)
        return DiscreteMeasure(self.points[mask], self.weights[mask], tag=self.tag, graph=self.graph,
                               h=self.h, params=None if self.params is None else self.params[mask])

    def __add__(self, other: "DiscreteMeasure") -> "DiscreteMeasure":
        return combine([self, other])

    # -- queries ------------------------------------------------------
    def mass(self, region) -> float:
        """Total variation of the measure on a closed region."""
        return float(np.sum(self.abs_weights[region.contains(self.points)]))

    # -- text io ------------------------------------------------------
    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        for p, w in zip(self.points, self.weights):
            wr.writerow([repr(float(v)) for v in p] + [repr(float(w.real)), repr(float(w.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, tag: str = "singular") -> "DiscreteMeasure":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        arr = np.array([[float(v) for v in r] for r in rows], dtype=float)
        if arr.ndim != 2 or arr.shape[1] < 3:
            raise DomainError("measure rows need x_1..x_d, re(w), im(w)")
        return cls(arr[:, :-2], arr[:, -2] + 1j * arr[:, -1], tag=tag)


def combine(measures) -> DiscreteMeasure:
    """Sum of measures; coincident atoms are kept as separate atoms."""
    measures = list(measures)
    tags = {m.tag for m in measures}
    tag = tags.pop() if len(tags) == 1 else "mixed"
    graph = measures[0].graph if tag == "graph-quadrature" and all(m.graph == measures[0].graph for m in measures) else None
    if tag == "graph-quadrature" and graph is None:
        tag = "mixed"
    return DiscreteMeasure(np.vstack([m.points for m in measures]),
                           np.concatenate([m.weights for m in measures]), tag=tag, graph=graph,
                           h=measures[0].h if graph is not None else None)


def graph_measure(spec: GraphSpec, box, h: float) -> DiscreteMeasure:
    """Midpoint-rule quadrature of the surface measure of the graph over ``box``.

    Parameters
    ----------
    spec : GraphSpec
    box : sequence of (lo, hi)
        Parameter rectangle in R^n; a single pair is accepted when n = 1.
    h : float
        Target cell size.  Each side is split into ``ceil(L/h)`` equal
        cells, so the actual cell size is ``L / ceil(L/h) <= h``.

    Returns
    -------
    DiscreteMeasure
        Atoms at graph points over cell midpoints with weights
        ``area_weight * cell volume``.
    """
    b = np.asarray(box, dtype=float).reshape(spec.n, 2)
    lengths = b[:, 1] - b[:, 0]
    if np.any(lengths <= 0):
        raise DomainError("box must be nonempty")
    if not h > 0:
        raise DomainError("resolution must be positive")
    if h > lengths.min():
        raise DegenerateResolutionError(f"h = {h} exceeds the box side {lengths.min()}")
    counts = np.ceil(lengths / h - 1e-9).astype(int)
    steps = lengths / counts
    axes = [b[i, 0] + (np.arange(counts[i]) + 0.5) * steps[i] for i in range(spec.n)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, spec.n)
    w = area_weight(spec, grid) * np.prod(steps)
    return DiscreteMeasure(eval_graph(spec, grid).reshape(-1, spec.d), w, tag="graph-quadrature",
                           graph=spec, h=float(steps.max()), params=grid)


def region_mass(m: DiscreteMeasure, region) -> float:
    return m.mass(region)


def is_doubling(m: DiscreteMeasure, q: Cube, a: float, b: float) -> bool:
    """``|m|(aQ) <= b |m|(Q)``; empty cubes count as doubling."""
    return m.mass(q.scaled(a)) <= b * m.mass(q)


def find_doubling_cube(m: DiscreteMeasure, x, a: float, b: float,
                       side_max: float, side_min: float) -> Cube | None:
    """Largest doubling cube centered at ``x`` on the ladder ``side_max * 2^-k``.

    Scans sides ``side_max, side_max/2, ...`` down to ``side_min`` and
    returns the first (largest) ``(a, b)``-doubling cube, or ``None``.
    """
    if b <= a ** m.d:
        warnings.warn(f"b = {b} <= a^d = {a ** m.d}; doubling cubes need not exist",
                      HypothesisWarning, stacklevel=2)
    if not (0 < side_min <= side_max):
        raise DomainError("need 0 < side_min <= side_max")
    side = side_max
    while side >= side_min:
        q = Cube(x, side)
        if is_doubling(m, q, a, b):
            return q
        side /= 2
    return None


def max_overlap(cubes, points) -> int:
    """Largest number of cubes containing any of ``points``."""
    pts = np.atleast_2d(points)
    if not cubes or pts.size == 0:
        return 0
    count = np.zeros(pts.shape[0], dtype=int)
    for q in cubes:
        count += q.contains(pts)
    return int(count.max())
