"""Norms of per-atom functions: L^p, weak-L^1 profiles, BMO over strips.

Strips are sets ``D = D~ x R^(d-n)`` with ``D~`` a cube in the first
``n`` coordinates.  Averages over a strip use the absolute atom weights
of the underlying measure.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .measures import DiscreteMeasure


def lp_norm(mu: DiscreteMeasure, f, p: float) -> float:
    """``(sum_i |f_i|^p |w_i|)^(1/p)``."""
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    f = np.asarray(f)
    return float(np.sum(np.abs(f) ** p * mu.abs_weights) ** (1.0 / p))


@dataclass
class WeakProfile:
    lambdas: np.ndarray
    levelset_mass: np.ndarray

    @property
    def product(self) -> np.ndarray:
        return self.lambdas * self.levelset_mass

    def sup(self) -> float:
        return float(self.product.max()) if self.lambdas.size else 0.0

    def pairs(self) -> list:
        return list(zip(self.lambdas.tolist(), self.product.tolist()))

    def to_csv(self, norm: float = 1.0) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["lambda", "levelset_mass", "product", "bound_constant"])
        for lam, ms, pr in zip(self.lambdas, self.levelset_mass, self.product):
            wr.writerow([f"{lam:.17g}", f"{ms:.17g}", f"{pr:.17g}", f"{pr / norm:.17g}"])
        return buf.getvalue()


def weak_l1_profile(mu: DiscreteMeasure, g, lambdas, method: str = "sorted") -> WeakProfile:
    """Level-set masses ``mu{|g| > lambda}`` for each lambda.

    ``method="sorted"`` sorts the values once and reads each level set as
    a tail of the sorted order; ``"scan"`` masks the atoms for every
    lambda.  Sums are exactly rounded, so both methods agree bit for bit.
    """
    lam = np.asarray(lambdas, dtype=float).ravel()
    if np.any(lam <= 0):
        raise DomainError("lambda must be positive")
    a = np.abs(np.asarray(g)).ravel()
    w = mu.abs_weights
    if method == "scan":
        mass = np.array([math.fsum(w[a > t]) for t in lam])
    elif method == "sorted":
        order = np.argsort(a, kind="stable")
        a_sorted, w_sorted = a[order], w[order]
        start = np.searchsorted(a_sorted, lam, side="right")
        tails = {k: math.fsum(w_sorted[k:]) for k in np.unique(start)}
        mass = np.array([tails[k] for k in start])
    else:
        raise DomainError(f"unknown method {method!r}")
    return WeakProfile(lam, mass)


# ---------------------------------------------------------------------
# strips
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class StripFamily:
    """Strips over base cubes in R^n given by centers (K, n) and sides (K,)."""

    centers: np.ndarray
    sides: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        s = np.atleast_1d(np.asarray(self.sides, dtype=float))
        if c.shape[0] != s.shape[0] or np.any(s <= 0):
            raise DomainError("strip sides must be positive, one per center")
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "sides", s)

    @property
    def n(self) -> int:
        return self.centers.shape[1]

    def __len__(self):
        return self.sides.size

    def membership(self, points) -> np.ndarray:
        """Boolean (K, N): strip k contains point i (closed, first n coordinates)."""
        p = np.atleast_2d(points)[:, :self.n]
        dist = np.max(np.abs(p[None, :, :] - self.centers[:, None, :]), axis=2)
        return dist <= self.sides[:, None] / 2

    @classmethod
    def dyadic(cls, box, levels: int = 3, translates: int = 2, top_side: float | None = None) -> "StripFamily":
        """Dyadic ladder of base cubes covering ``box``.

        Level ``k`` uses side ``top_side / 2^k`` and centers spaced by
        ``side / translates`` (``translates = 2`` gives half-overlapping
        cubes).
        """
        b = np.atleast_2d(np.asarray(box, dtype=float)).reshape(-1, 2)
        lengths = b[:, 1] - b[:, 0]
        top = float(lengths.max()) if top_side is None else top_side
        centers, sides = [], []
        for k in range(levels):
            side = top / 2 ** k
            step = side / translates
            axes = []
            for lo, hi in b:
                cnt = max(1, int(np.ceil((hi - lo - side) / step - 1e-9)) + 1)
                first = lo + side / 2 if hi - lo >= side else (lo + hi) / 2
                axes.append(first + step * np.arange(cnt))
            grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, b.shape[0])
            centers.append(grid)
            sides.append(np.full(grid.shape[0], side))
        return cls(np.vstack(centers), np.concatenate(sides))


def weighted_median(values, weights) -> float:
    """Smallest ``v`` with at least half the weight at or below it."""
    order = np.argsort(values, kind="stable")
    v = np.asarray(values)[order]
    cw = np.cumsum(np.asarray(weights)[order])
    return float(v[np.searchsorted(cw, 0.5 * cw[-1])])


class BMOReport(NamedTuple):
    value: float
    argmax: int
    center: np.ndarray
    side: float


def _median_center(g, w):
    if np.iscomplexobj(g):
        return weighted_median(g.real, w) + 1j * weighted_median(g.imag, w)
    return weighted_median(g, w)


def strip_bmo_norm(mu: DiscreteMeasure, g, strips: StripFamily) -> BMOReport:
    """Largest mean deviation from the weighted median over the strips.

    For real ``g`` the median attains ``inf_c`` of the mean deviation; for
    complex ``g`` the coordinatewise median is within a factor sqrt(2).
    Strips without mass are skipped with a warning.
    """
    g = np.asarray(g)
    w = mu.abs_weights
    member = strips.membership(mu.points)
    best, arg = 0.0, -1
    empty = 0
    for k in range(len(strips)):
        idx = member[k]
        mass = w[idx].sum()
        if mass <= 0:
            empty += 1
            continue
        gk, wk = g[idx], w[idx]
        c = _median_center(gk, wk)
        dev = float(np.sum(np.abs(gk - c) * wk) / mass)
        if dev > best or arg < 0:
            best, arg = dev, k
    if empty:
        warnings.warn(f"{empty} strips carry no mass and were skipped", stacklevel=2)
    if arg < 0:
        raise DomainError("no strip carries mass")
    return BMOReport(best, arg, strips.centers[arg], float(strips.sides[arg]))


def strip_maximals(mu: DiscreteMeasure, g, strips: StripFamily, x) -> tuple[float, float]:
    """``(M g(x), M# g(x))`` over the strips that contain ``x``."""
    g = np.asarray(g)
    w = mu.abs_weights
    hit = strips.membership(np.atleast_2d(x))[:, 0]
    if not hit.any():
        raise DomainError("no strip contains the point")
    member = strips.membership(mu.points)
    M = Ms = 0.0
    for k in np.flatnonzero(hit):
        idx = member[k]
        mass = w[idx].sum()
        if mass <= 0:
            continue
        gk, wk = g[idx], w[idx]
        M = max(M, float(np.sum(np.abs(gk) * wk) / mass))
        mean = np.sum(gk * wk) / mass
        Ms = max(Ms, float(np.sum(np.abs(gk - mean) * wk) / mass))
    return M, Ms
