"""Quantitative elliptic-degeneration asymptotics.

Central objects:

- S(q) = sum_{n=1}^{q-1} 1/(2 q sin(n pi/q)), which grows like (1/pi) log q;
- the Fermi-weighted moment kernels
  c_w(T) = (1/pi) int_{-R}^{R} (T - 1/4 - r^2)^w e^{-2 pi beta r}/(1 + e^{-2 pi r}) dr,
  R = sqrt(T - 1/4), with beta = n/q and beta = 0 the limiting kernel;
- the degenerating counting function G_{M,w}(T), a double sum of those
  kernels over the degenerating cones, which grows like c_w(T) log(prod q).

Slope fits against log(prod q) realize the growth laws empirically.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, FitError, QuadratureError
from .geometry import DegeneratingFamily, SurfaceData
from .special_fn import integrate_finite
from .traces import fermi_weight

__all__ = [
    "CwKernel",
    "SlopeFit",
    "ErrorTermReport",
    "elliptic_sum_s",
    "c_w_kernel",
    "g_degenerating_counting",
    "fit_slope_vs_logQ",
    "optimize_epsilon",
    "error_term_experiment",
    "family_sweep",
]

# order thresholds separating the three evaluation paths of the double sum
_ADAPTIVE_MAX_ORDER = 256
_INTERP_MIN_ORDER = 100_000
_BETA_GRID_POINTS = 256
_CHUNK = 1_000_000


@dataclass(frozen=True)
class CwKernel:
    """Parameters (T, w, beta) of one Fermi-weighted moment integral."""

    T: float
    w: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.w < 0:
            raise DomainError(f"weight must be >= 0, got {self.w}")
        if not 0.0 <= self.beta < 1.0:
            raise DomainError(f"beta must lie in [0, 1), got {self.beta}")


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares line through (log prod q, quantity) points."""

    abscissae: tuple
    ordinates: tuple
    slope: float
    intercept: float
    residual: float


def elliptic_sum_s(q: int) -> float:
    """S(q) = sum_{n=1}^{q-1} 1/(2 q sin(n pi/q)), exactly, pairwise-summed.

    Uses sin(x) = sin(pi - x) to halve the work; comfortable up to q ~ 1e7.
    """
    q = int(q)
    if q < 2:
        raise DomainError(f"order must be >= 2, got {q}")
    half = (q - 1) // 2
    partials = []
    for start in range(1, half + 1, _CHUNK):
        stop = min(start + _CHUNK, half + 1)
        n = np.arange(start, stop, dtype=float)
        partials.append(float(np.sum(1.0 / np.sin(n * math.pi / q))))
    total = 2.0 * math.fsum(partials)
    if q % 2 == 0:
        total += 1.0  # middle term n = q/2, sin = 1
    return total / (2.0 * q)


def _kernel_integral(beta: float, w: float, T: float, tol: float) -> float:
    """int_{-R}^{R} (T - 1/4 - r^2)^w fermi(beta, r) dr via r = R sin(theta),
    which turns the endpoint factor into cos^{2w+1}(theta)."""
    if T <= 0.25:
        return 0.0
    R = math.sqrt(T - 0.25)
    power = 2.0 * w + 1.0

    def integrand(theta: np.ndarray):
        r = R * np.sin(theta)
        return R ** power * np.cos(theta) ** power * fermi_weight(beta, r)

    res = integrate_finite(integrand, -0.5 * math.pi, 0.5 * math.pi, tol)
    return float(np.real(res.value))


def c_w_kernel(kernel: CwKernel, tol: float = 1e-12) -> float:
    """The moment integral divided by pi; returns 0 when T <= 1/4."""
    if kernel.T <= 0.25:
        return 0.0
    return _kernel_integral(kernel.beta, kernel.w, kernel.T, tol) / math.pi


def _gl_nodes(m: int, R: float, w: float):
    x, om = np.polynomial.legendre.leggauss(m)
    theta = 0.5 * math.pi * x
    r = R * np.sin(theta)
    base = (0.5 * math.pi) * om * R ** (2.0 * w + 1.0) * np.cos(theta) ** (2.0 * w + 1.0)
    return r, base


def _batched_kernel_integrals(betas: np.ndarray, w: float, T: float,
                              nodes: int = 96, tol: float = 1e-9) -> np.ndarray:
    """Kernel integrals for many beta at once on a fixed Gauss-Legendre grid,
    with a doubled-order consistency check."""
    R = math.sqrt(T - 0.25)

    def run(m: int) -> np.ndarray:
        r, base = _gl_nodes(m, R, w)
        weights = base / (1.0 + np.exp(-2.0 * math.pi * r))
        out = np.empty(betas.size)
        step = 16384  # keep the (beta x node) matrix under ~25 MB
        for i in range(0, betas.size, step):
            block = betas[i:i + step]
            out[i:i + step] = np.exp(-2.0 * math.pi * np.outer(block, r)) @ weights
        return out

    coarse = run(nodes)
    fine = run(2 * nodes)
    scale = np.maximum(np.abs(fine), 1.0)
    worst = float(np.max(np.abs(fine - coarse) / scale))
    if worst > max(tol, 1e-12):
        raise QuadratureError(
            f"batched kernel rule did not converge: discrepancy {worst:.3e}")
    return fine


@lru_cache(maxsize=32)
def _kernel_spline(w: float, T: float, tol: float) -> CubicSpline:
    grid = np.linspace(0.0, 1.0, _BETA_GRID_POINTS)
    vals = np.asarray([_kernel_integral(float(b), w, T, tol) for b in grid])
    return CubicSpline(grid, vals)


def _cone_counting_sum(q: int, w: float, T: float, tol: float,
                       method: str) -> float:
    """sum_{n=1}^{q-1} kernel(n/q) / (2 q sin(n pi/q)) for one cone."""
    if method == "auto":
        if q <= _ADAPTIVE_MAX_ORDER:
            method = "adaptive"
        elif q <= _INTERP_MIN_ORDER:
            method = "batched"
        else:
            method = "interpolated"
    if method == "adaptive":
        total = 0.0
        for n in range(1, q):
            total += (_kernel_integral(n / q, w, T, tol)
                      / (2.0 * q * math.sin(n * math.pi / q)))
        return total
    partials = []
    for start in range(1, q, _CHUNK):
        stop = min(start + _CHUNK, q)
        n = np.arange(start, stop, dtype=float)
        betas = n / q
        if method == "batched":
            kernels = _batched_kernel_integrals(betas, w, T, tol=max(tol, 1e-10))
        elif method == "interpolated":
            kernels = _kernel_spline(w, T, 1e-12)(betas)
        else:
            raise DomainError(f"unknown method '{method}'")
        weights = 1.0 / (2.0 * q * np.sin(n * math.pi / q))
        partials.append(float(np.sum(kernels * weights)))
    return math.fsum(partials)


def g_degenerating_counting(surface: SurfaceData, w: float, T: float,
                            tol: float = 1e-10, method: str = "auto") -> float:
    """Degenerating counting function: the kernel double sum over the
    degenerating cones.  Zero whenever T <= 1/4, independently of the orders.

    method: "adaptive" (per-n adaptive quadrature), "batched" (fixed-rule
    quadrature vectorized over n), "interpolated" (cubic spline of the kernel
    on a 256-point beta grid), or "auto" to pick by cone order.
    """
    if w < 0:
        raise DomainError(f"weight must be >= 0, got {w}")
    if T <= 0.25:
        return 0.0
    return math.fsum(
        _cone_counting_sum(int(q), w, T, tol, method)
        for q in surface.degenerating_orders)


def family_sweep(family: DegeneratingFamily, quantity: Callable) -> list:
    """Evaluate quantity(member) across the schedule, optionally in parallel
    (DEGENSPEC_THREADS caps the pool); results keep schedule order."""
    members = family.members()
    threads = int(os.environ.get("DEGENSPEC_THREADS", "1") or "1")
    if threads > 1 and len(members) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(quantity, members))
    return [quantity(m) for m in members]


def fit_slope_vs_logQ(family: DegeneratingFamily, quantity: Callable,
                      drop_smallest: bool = False) -> SlopeFit:
    """Unweighted least-squares fit of quantity(member) against
    log(prod q_gamma) over the schedule."""
    xs = family.log_products()
    ys = family_sweep(family, quantity)
    if drop_smallest:
        xs, ys = xs[1:], ys[1:]
    if len(xs) < 3:
        raise FitError(f"need at least 3 points for a slope fit, have {len(xs)}")
    if any(b <= a for a, b in zip(xs[:-1], xs[1:])):
        raise FitError("fit abscissae must be strictly increasing")
    x = np.asarray(xs)
    y = np.asarray(ys, dtype=float)
    if np.ptp(x) < 1e-9 * max(1.0, float(np.max(np.abs(x)))):
        raise FitError("abscissae nearly collinear with constants")
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return SlopeFit(abscissae=tuple(float(v) for v in x),
                    ordinates=tuple(float(v) for v in y),
                    slope=float(slope), intercept=float(intercept),
                    residual=residual)


def optimize_epsilon(f_decay: float, logQ: float) -> float:
    """Window width eps = sqrt(f/log Q) balancing the eps*logQ and f/eps
    error terms; the combined scale is O(sqrt(f * log Q))."""
    if not f_decay > 0:
        raise DomainError(f"decay term must be > 0, got {f_decay}")
    if not logQ > 0:
        raise DomainError(f"log Q must be > 0, got {logQ}")
    return math.sqrt(f_decay / logQ)


@dataclass(frozen=True)
class ErrorTermReport:
    """Rows (logQ, G, residual, normalizer, normalized) per schedule member,
    plus whether the normalized residual avoids monotone growth."""

    rows: tuple
    bounded: bool

    def normalized(self) -> list:
        return [row[4] for row in self.rows]


def error_term_experiment(family: DegeneratingFamily, T: float,
                          tol: float = 1e-10) -> ErrorTermReport:
    """Tabulate G_{M,0}(T) - c_0(T) log(prod q) across the schedule and
    normalize residuals by (log prod q)^{3/4}."""
    if T <= 0.25:
        rows = tuple((lq, 0.0, 0.0, lq ** 0.75, 0.0)
                     for lq in family.log_products())
        return ErrorTermReport(rows=rows, bounded=True)
    c0 = c_w_kernel(CwKernel(T=T, w=0.0, beta=0.0), tol=1e-12)
    values = family_sweep(
        family, lambda m: g_degenerating_counting(m, 0.0, T, tol))
    rows = []
    for lq, g in zip(family.log_products(), values):
        residual = g - c0 * lq
        normalizer = lq ** 0.75
        rows.append((lq, g, residual, normalizer, residual / normalizer))
    magnitudes = [abs(row[4]) for row in rows]
    monotone_growth = all(b > a for a, b in zip(magnitudes[:-1], magnitudes[1:]))
    return ErrorTermReport(rows=tuple(rows), bounded=not monotone_growth)
