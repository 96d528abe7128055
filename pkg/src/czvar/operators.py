"""Truncated singular integrals of discrete measures.

``T_eps nu(x) = sum_{|x - p| > eps} K(x - p) w_p``; the window operator
sums over ``eps < |x - p| <= delta``.  ``family_eval`` evaluates a whole
grid of truncations at many points in one pass over the atoms: each
atom is binned by the number of grid scales below its distance, and a
cumulative sum over bins gives every truncation at once.
"""
from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResolutionWarning
from .kernels import KernelSpec
from .measures import DiscreteMeasure

# evaluation points per chunk; bounds the (points x atoms) work arrays
CHUNK_ELEMENTS = 2_000_000


@dataclass(frozen=True)
class TruncationGrid:
    """Strictly decreasing positive scales ``eps_1 > ... > eps_m``, ``m >= 2``."""

    scales: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.scales, dtype=float).ravel()
        if s.size < 2:
            raise DomainError("a truncation grid needs at least two scales")
        if np.any(s <= 0) or np.any(np.diff(s) >= 0):
            raise DomainError("grid scales must be positive and strictly decreasing")
        object.__setattr__(self, "scales", s)

    def __len__(self):
        return self.scales.size

    @classmethod
    def dyadic(cls, eps_max: float, count: int = 24) -> "TruncationGrid":
        return cls(eps_max * 2.0 ** -np.arange(count))

    @classmethod
    def geometric(cls, eps_max: float, eps_min: float, count: int) -> "TruncationGrid":
        return cls(np.geomspace(eps_max, eps_min, count))

    def refined(self) -> "TruncationGrid":
        """Grid with the geometric midpoint inserted between neighbors."""
        s = self.scales
        mid = np.sqrt(s[:-1] * s[1:])
        out = np.empty(2 * s.size - 1)
        out[0::2] = s
        out[1::2] = mid
        return TruncationGrid(out)

    @property
    def eps_min(self) -> float:
        return float(self.scales[-1])


@dataclass(frozen=True)
class SmoothCutoff:
    """C^2 ramp: 0 on (-inf, 1/2], 1 on [2, inf), quintic smoothstep between."""

    lo: float = 0.5
    hi: float = 2.0

    def __call__(self, r) -> np.ndarray:
        t = np.clip((np.asarray(r, dtype=float) - self.lo) / (self.hi - self.lo), 0.0, 1.0)
        return t * t * t * (t * (6.0 * t - 15.0) + 10.0)

    def derivative(self, r) -> np.ndarray:
        t = np.clip((np.asarray(r, dtype=float) - self.lo) / (self.hi - self.lo), 0.0, 1.0)
        return 30.0 * t * t * (1.0 - t) ** 2 / (self.hi - self.lo)


SMOOTHSTEP = SmoothCutoff()


def _offsets(x, nu: DiscreteMeasure):
    diff = np.asarray(x, dtype=float)[None, :] - nu.points
    return diff, np.linalg.norm(diff, axis=1)


def _kernel_terms(k: KernelSpec, diff, mask):
    out = np.zeros(diff.shape[0], dtype=complex)
    if mask.any():
        out[mask] = k(diff[mask])
    return out


def truncated(k: KernelSpec, nu: DiscreteMeasure, x, eps: float) -> complex:
    """``sum over atoms with |x - p| > eps`` of ``K(x - p) w_p``."""
    if not eps > 0:
        raise DomainError("truncation scale must be positive")
    diff, r = _offsets(x, nu)
    mask = r > eps
    return complex(np.sum(_kernel_terms(k, diff, mask) * nu.weights))


def truncated_window(k: KernelSpec, nu: DiscreteMeasure, x, eps: float, delta: float) -> complex:
    """Sum over the half-open shell ``eps < |x - p| <= delta``."""
    if not 0 < eps <= delta:
        raise DomainError(f"window needs 0 < eps <= delta, got eps={eps}, delta={delta}")
    diff, r = _offsets(x, nu)
    mask = (r > eps) & (r <= delta)
    return complex(np.sum(_kernel_terms(k, diff, mask) * nu.weights))


def smooth_truncated(k: KernelSpec, nu: DiscreteMeasure, x, eps: float,
                     phi: SmoothCutoff = SMOOTHSTEP) -> complex:
    """``sum_p phi(|x - p| / eps) K(x - p) w_p`` over atoms ``p != x``."""
    if not eps > 0:
        raise DomainError("truncation scale must be positive")
    diff, r = _offsets(x, nu)
    mask = r > 0
    return complex(np.sum(phi(r / eps) * _kernel_terms(k, diff, mask) * nu.weights))


@dataclass
class FamilyValues:
    """Truncation values at each evaluation point (rows) and scale (columns)."""

    points: np.ndarray
    grid: TruncationGrid
    values: np.ndarray

    @property
    def maximal(self) -> np.ndarray:
        return np.abs(self.values).max(axis=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["point_index", "epsilon", "re", "im"])
        for i, row in enumerate(self.values):
            for eps, v in zip(self.grid.scales, row):
                wr.writerow([i, f"{eps:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"])
        return buf.getvalue()

    def maximal_to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["point_index", "maximal"])
        for i, v in enumerate(self.maximal):
            wr.writerow([i, f"{v:.17g}"])
        return buf.getvalue()


def resolution_ok(h, grid: TruncationGrid) -> bool:
    """``h <= eps_min / 10`` up to rounding."""
    return h is None or h <= grid.eps_min / 10 * (1 + 1e-9)


def _check_resolution(nu: DiscreteMeasure, grid: TruncationGrid, allow_floor: bool):
    if allow_floor or nu.h is None:
        return
    if not resolution_ok(nu.h, grid):
        warnings.warn(f"quadrature resolution h = {nu.h:.3g} exceeds eps_min / 10 = {grid.eps_min / 10:.3g}",
                      ResolutionWarning, stacklevel=3)


def family_eval(k: KernelSpec, nu: DiscreteMeasure, points, grid: TruncationGrid,
                mode: str = "rough", phi: SmoothCutoff = SMOOTHSTEP,
                allow_floor: bool = False) -> FamilyValues:
    """Evaluate ``T_eps nu`` at every point and every grid scale.

    Rough mode bins each atom by ``#{j : eps_j < |x - p|}`` (a
    ``searchsorted`` on the grid, O(log m) per atom) and takes cumulative
    sums over the bins.  Smooth mode applies the cutoff weights scale by
    scale.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if mode not in ("rough", "smooth"):
        raise DomainError(f"mode must be 'rough' or 'smooth', got {mode!r}")
    _check_resolution(nu, grid, allow_floor)
    m = len(grid)
    asc = grid.scales[::-1]
    values = np.zeros((pts.shape[0], m), dtype=complex)
    chunk = max(1, CHUNK_ELEMENTS // max(1, len(nu)))
    for start in range(0, pts.shape[0], chunk):
        block = pts[start:start + chunk]
        diff = block[:, None, :] - nu.points[None, :, :]
        r = np.linalg.norm(diff, axis=2)
        live = r > 0
        terms = np.zeros(r.shape, dtype=complex)
        terms[live] = k(diff[live])
        terms *= nu.weights[None, :]
        if mode == "rough":
            # atom contributes to column j (descending scales) iff eps_j < r,
            # i.e. to columns j >= m - count where count = #{eps < r}
            first = m - np.searchsorted(asc, r, side="left")
            rows = np.repeat(np.arange(block.shape[0]), r.shape[1])
            flat = rows * (m + 1) + first.ravel()
            size = block.shape[0] * (m + 1)
            re = np.bincount(flat, weights=terms.real.ravel(), minlength=size)
            im = np.bincount(flat, weights=terms.imag.ravel(), minlength=size)
            binned = (re + 1j * im).reshape(block.shape[0], m + 1)[:, :m]
            values[start:start + chunk] = np.cumsum(binned, axis=1)
        else:
            for j, eps in enumerate(grid.scales):
                values[start:start + chunk, j] = np.sum(phi(r / eps) * terms, axis=1)
    return FamilyValues(pts, grid, values)
