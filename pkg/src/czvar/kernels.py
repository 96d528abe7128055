"""Odd Calderon-Zygmund kernels homogeneous of degree -n.

Kernels are complex-valued and vectorized: the evaluator maps an (N, d)
array of nonzero points to an (N,) complex array.  Vector-valued Riesz
transforms are exposed one scalar component at a time.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, SingularityError


@dataclass(frozen=True)
class KernelSpec:
    name: str
    n: int
    d: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray] | None = None
    C_K: float = 1.0

    def __call__(self, x) -> np.ndarray:
        return self.evaluator(np.asarray(x, dtype=float))


def _cauchy(x):
    return 1.0 / (x[..., 0] + 1j * x[..., 1])


def _cauchy_grad(x):
    z = x[..., 0] + 1j * x[..., 1]
    g = -1.0 / z ** 2
    return np.stack([g, 1j * g], axis=-1)


def cauchy() -> KernelSpec:
    """``K(z) = 1/z`` on the plane identified with C."""
    return KernelSpec("cauchy", n=1, d=2, evaluator=_cauchy, gradient=_cauchy_grad, C_K=1.0)


def riesz(n: int, component: int, d: int | None = None) -> KernelSpec:
    """Scalar Riesz component ``x_i / |x|^(n+1)`` in R^d (``component`` is 1-based)."""
    d = n + 1 if d is None else d
    if not (1 <= n < d):
        raise DomainError(f"riesz kernel needs 1 <= n < d, got n={n}, d={d}")
    if not (1 <= component <= d):
        raise DomainError(f"component must be in 1..{d}")
    i = component - 1

    def ev(x):
        r = np.linalg.norm(x, axis=-1)
        return (x[..., i] / r ** (n + 1)).astype(complex)

    def grad(x):
        r = np.linalg.norm(x, axis=-1)
        g = -(n + 1) * x[..., i, None] * x / (r ** (n + 3))[..., None]
        g[..., i] += r ** (-(n + 1))
        return g.astype(complex)

    return KernelSpec(f"riesz:{n}:{component}", n=n, d=d, evaluator=ev, gradient=grad, C_K=1.0)


def kernel_from_name(name: str, d: int | None = None) -> KernelSpec:
    """Parse ``cauchy`` or ``riesz:<n>:<component>``; ``d`` defaults to n + 1."""
    if name == "cauchy":
        if d not in (None, 2):
            raise DomainError("the Cauchy kernel lives in d = 2")
        return cauchy()
    parts = name.split(":")
    if parts[0] == "riesz" and len(parts) == 3:
        return riesz(int(parts[1]), int(parts[2]), d)
    raise DomainError(f"unknown kernel {name!r}")


def eval_kernel(k: KernelSpec, x) -> complex | np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(np.linalg.norm(np.atleast_2d(x), axis=-1) == 0):
        raise SingularityError("kernel evaluated at the origin")
    val = k.evaluator(x)
    return complex(val) if np.ndim(val) == 0 else val


# ---------------------------------------------------------------------
# sampling checks
# ---------------------------------------------------------------------

def sample_points(rng: np.random.Generator, count: int, d: int,
                  rmin: float = 1e-3, rmax: float = 1e3) -> np.ndarray:
    """Uniform directions with ``|x|`` log-uniform in ``[rmin, rmax]``.

    The first ``2d`` directions are the coordinate axes, where the
    growth constants of the built-in kernels are attained.
    """
    u = rng.standard_normal((count, d))
    axes = np.vstack([np.eye(d), -np.eye(d)])[:count]
    u[:axes.shape[0]] = axes
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    r = np.exp(rng.uniform(np.log(rmin), np.log(rmax), size=count))
    return u * r[:, None]


class OddReport(NamedTuple):
    max_defect: float
    passed: bool


def check_odd(k: KernelSpec, sample_count: int = 10000, seed=0, rtol: float = 1e-12) -> OddReport:
    """Max of ``|K(-x) + K(x)|`` over samples.

    ``passed`` compares the defect to ``rtol * |K(x)|`` pointwise.
    """
    rng = np.random.default_rng(seed)
    x = sample_points(rng, sample_count, k.d)
    kx = k(x)
    defect = np.abs(k(-x) + kx)
    return OddReport(float(defect.max()), bool(np.all(defect <= rtol * np.abs(kx))))


class BoundsReport(NamedTuple):
    c0: float
    c1: float
    c2: float
    nonfinite: list


def _fd_grad(f, x, rel=1e-5):
    h = rel * np.linalg.norm(x, axis=1)
    g = np.empty(x.shape, dtype=complex)
    for i in range(x.shape[1]):
        e = np.zeros_like(x)
        e[:, i] = h
        g[:, i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def check_bounds(k: KernelSpec, sample_count: int = 10000, seed=0,
                 use_analytic: bool = True) -> BoundsReport:
    """Sampled growth constants of K and of its first and second derivatives.

    ``c0 = sup |K||x|^n``, ``c1 = sup_i |d_i K||x|^(n+1)`` and
    ``c2 = sup_ij |d_i d_j K||x|^(n+2)``.  Derivatives are analytic when
    the kernel provides a gradient (and ``use_analytic``), otherwise
    central differences at relative step 1e-5; second derivatives
    difference the gradient.
    """
    rng = np.random.default_rng(seed)
    x = sample_points(rng, sample_count, k.d)
    r = np.linalg.norm(x, axis=1)
    grad = k.gradient if (use_analytic and k.gradient is not None) else (lambda z: _fd_grad(k, z))
    k0 = k(x)
    g1 = grad(x)
    g2 = np.empty((x.shape[0], k.d, k.d), dtype=complex)
    h = 1e-5 * r
    for j in range(k.d):
        e = np.zeros_like(x)
        e[:, j] = h
        g2[:, :, j] = (grad(x + e) - grad(x - e)) / (2 * h)[:, None]
    v0 = np.abs(k0) * r ** k.n
    v1 = np.abs(g1).max(axis=1) * r ** (k.n + 1)
    v2 = np.abs(g2).max(axis=(1, 2)) * r ** (k.n + 2)
    bad = ~(np.isfinite(v0) & np.isfinite(v1) & np.isfinite(v2))
    nonfinite = [x[i].tolist() for i in np.flatnonzero(bad)]
    ok = ~bad
    return BoundsReport(float(v0[ok].max()), float(v1[ok].max()), float(v2[ok].max()), nonfinite)
