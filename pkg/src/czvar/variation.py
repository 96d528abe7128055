"""rho-variation and oscillation of finite families of values.

For values ``F_1, ..., F_m`` on a decreasing grid of scales the
rho-variation is the largest ``(sum_k |F_{i_(k+1)} - F_{i_k}|^rho)^(1/rho)``
over increasing index chains.  This is a maximum-weight path in a DAG
and is solved exactly by dynamic programming in O(m^2).  Because the
chains are restricted to grid scales, the result is a lower bound for
the supremum over all real scale sequences and grows under refinement.
"""
from __future__ import annotations

import functools
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .errors import DomainError
from .kernels import KernelSpec
from .measures import DiscreteMeasure
from .operators import SMOOTHSTEP, TruncationGrid, family_eval

# relative tolerance under which two chain sums count as tied
TIE_RTOL = 1e-12
BRUTEFORCE_MAX = 20


class VariationResult(NamedTuple):
    value: float
    chain: list


def _jumps(F, rho):
    F = np.asarray(F, dtype=complex).ravel()
    return np.abs(F[None, :] - F[:, None]) ** rho


def _chain_sum(F, chain, rho):
    F = np.asarray(F, dtype=complex).ravel()
    c = np.asarray(chain, dtype=int)
    return float(np.sum(np.abs(np.diff(F[c])) ** rho)) if c.size > 1 else 0.0


def _validate(F, rho):
    if rho < 1:
        raise DomainError(f"rho must be >= 1, got {rho}")
    F = np.asarray(F, dtype=complex).ravel()
    if F.size == 0:
        raise DomainError("empty family")
    return F


def _normalize(F):
    """Rescale ``F - F[0]`` to unit sup so ``|d|**rho`` neither under- nor overflows."""
    F = F - F[0]
    scale = float(np.max(np.abs(F)))
    return (F / scale if scale > 0 else F), scale


def rho_variation(F, rho: float) -> VariationResult:
    """Exact rho-variation of ``F`` over index chains, with an optimal chain.

    ``best[i]`` is the largest sum achievable by a chain starting at
    ``i``.  The chain is rebuilt front to back taking the smallest
    admissible index at each step, which yields the lexicographically
    smallest optimal chain (sums within ``TIE_RTOL`` count as tied).
    """
    F = _validate(F, rho)
    m = F.size
    if m == 1:
        return VariationResult(0.0, [0])
    F, scale = _normalize(F)
    W = _jumps(F, rho)
    best = np.zeros(m)
    for i in range(m - 2, -1, -1):
        best[i] = max(0.0, float(np.max(W[i, i + 1:] + best[i + 1:])))
    top = float(best.max())
    tol = TIE_RTOL * top
    if top == 0.0:
        chain = [0, 1]
    else:
        i = int(np.flatnonzero(best >= top - tol)[0])
        chain = [i]
        # stopping is preferred on ties: a prefix is lexicographically smaller
        while best[i] > tol:
            cand = W[i, i + 1:] + best[i + 1:]
            i = i + 1 + int(np.flatnonzero(cand >= best[i] - tol)[0])
            chain.append(i)
    total = _chain_sum(F, chain, rho)
    return VariationResult(scale * total ** (1.0 / rho), chain)


@functools.lru_cache(maxsize=None)
def _consecutive_pairs(m: int):
    """Sparse incidence (subsets x pairs) of consecutive selected indices."""
    masks = np.arange(1 << m, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(m)) & 1).astype(bool)
    nxt = np.full((masks.size, m), -1, dtype=np.int64)
    for i in range(m - 2, -1, -1):
        nxt[:, i] = np.where(bits[:, i + 1], i + 1, nxt[:, i + 1])
    rows, cols = [], []
    for i in range(m - 1):
        sel = bits[:, i] & (nxt[:, i] >= 0)
        rows.append(masks[sel])
        cols.append(i * m + nxt[sel, i])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    inc = sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(masks.size, m * m))
    size = bits.sum(axis=1)
    return inc, bits, size


def rho_variation_bruteforce(F, rho: float) -> VariationResult:
    """Exhaustive search over all index chains (test oracle, ``m <= 20``)."""
    F = _validate(F, rho)
    m = F.size
    if m > BRUTEFORCE_MAX:
        raise DomainError(f"brute force limited to {BRUTEFORCE_MAX} entries")
    if m == 1:
        return VariationResult(0.0, [0])
    F, scale = _normalize(F)
    inc, bits, size = _consecutive_pairs(m)
    sums = inc @ _jumps(F, rho).ravel()
    sums[size < 2] = -1.0
    top = float(sums.max())
    tied = np.flatnonzero(sums >= top - TIE_RTOL * top)
    chain = min(tuple(np.flatnonzero(bits[s]).tolist()) for s in tied)
    return VariationResult(scale * _chain_sum(F, chain, rho) ** (1.0 / rho), list(chain))


def rho_variation_rows(values, rho: float) -> np.ndarray:
    """Vectorized rho-variation of each row of a (P, m) array (values only)."""
    if rho < 1:
        raise DomainError(f"rho must be >= 1, got {rho}")
    V = np.asarray(values, dtype=complex)
    P, m = V.shape
    V = V - V[:, :1]
    scale = np.max(np.abs(V), axis=1) if m else np.zeros(P)
    V = V / np.where(scale > 0, scale, 1.0)[:, None]
    best = np.zeros((P, m))
    for i in range(m - 2, -1, -1):
        jump = np.abs(V[:, i + 1:] - V[:, i:i + 1]) ** rho
        best[:, i] = np.maximum(0.0, np.max(jump + best[:, i + 1:], axis=1))
    return scale * best.max(axis=1) ** (1.0 / rho)


def _windows(grid_scales, r):
    r = np.asarray(r, dtype=float).ravel()
    if r.size < 2 or np.any(r <= 0) or np.any(np.diff(r) >= 0):
        raise DomainError("oscillation sequence must be positive and strictly decreasing")
    s = np.asarray(grid_scales, dtype=float)
    return [np.flatnonzero((s >= r[k + 1]) & (s <= r[k])) for k in range(r.size - 1)]


def oscillation_windows(F, grid: TruncationGrid, r) -> np.ndarray:
    """Diameters ``D_k`` of ``{F_eps}`` over grid scales in ``[r_(k+1), r_k]``."""
    F = np.asarray(F, dtype=complex).ravel()
    if F.size != len(grid):
        raise DomainError("values and grid differ in length")
    out = []
    for idx in _windows(grid.scales, r):
        v = F[idx]
        out.append(float(np.max(np.abs(v[:, None] - v[None, :]))) if idx.size > 1 else 0.0)
    return np.array(out)


def oscillation(F, grid: TruncationGrid, r) -> float:
    """``sqrt(sum_k D_k^2)`` with ``D_k`` the diameter of ``{F_eps}`` over
    grid scales in the closed window ``[r_(k+1), r_k]``."""
    return float(np.sqrt(np.sum(oscillation_windows(F, grid, r) ** 2)))


def oscillation_rows(values, grid: TruncationGrid, r) -> np.ndarray:
    V = np.asarray(values, dtype=complex)
    total = np.zeros(V.shape[0])
    for idx in _windows(grid.scales, r):
        if idx.size > 1:
            v = V[:, idx]
            total += np.max(np.abs(v[:, :, None] - v[:, None, :]), axis=(1, 2)) ** 2
    return np.sqrt(total)


def variation_field(k: KernelSpec, nu: DiscreteMeasure, points, grid: TruncationGrid,
                    rho: float = 2.1, functional: str = "variation", r=None,
                    mode: str = "rough", phi=SMOOTHSTEP, allow_floor: bool = False) -> np.ndarray:
    """Pointwise ``V_rho`` (or oscillation) of the truncation family of ``nu``."""
    fam = family_eval(k, nu, points, grid, mode=mode, phi=phi, allow_floor=allow_floor)
    if functional == "variation":
        return rho_variation_rows(fam.values, rho)
    if functional == "oscillation":
        if r is None:
            raise DomainError("oscillation needs the window sequence r")
        return oscillation_rows(fam.values, grid, r)
    raise DomainError(f"unknown functional {functional!r}")
