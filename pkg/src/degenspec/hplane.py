"""Heat kernel on the hyperbolic upper half-plane, real and complex time.

For positive distance the kernel is

    K(t, d) = sqrt(2) e^{-t/4} / (4 pi t)^{3/2}
              * int_d^inf u e^{-u^2/4t} / sqrt(cosh u - cosh d) du,

and on the diagonal

    K(t, 0) = (1/2pi) int_0^inf e^{-(1/4 + r^2) t} tanh(pi r) r dr.

The u-integral carries an inverse-square-root singularity at u = d; the
substitution u = d + v^2 removes it.  Complex time z = t + i s with t > 0
uses the same u-integral with complex weight (principal branch of z^{3/2});
on the diagonal the r-integral extends analytically in t and is used instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .special_fn import integrate_semi_infinite

__all__ = ["ComplexTime", "heat_kernel_h", "heat_kernel_h_complex"]


@dataclass(frozen=True)
class ComplexTime:
    """Complex time z = t + i*s with positive real part t."""

    t: float
    s: float = 0.0

    def __post_init__(self):
        if not self.t > 0:
            raise DomainError(f"complex time requires Re(z) = t > 0, got {self.t}")

    @property
    def z(self) -> complex:
        return complex(self.t, self.s)

    @property
    def tau(self) -> float:
        """|z|^2 / t, the real time entering the modulus bound."""
        return (self.t * self.t + self.s * self.s) / self.t


def _diagonal_kernel(z: complex, tol: float) -> complex:
    # r = x / sqrt(t) puts the integral on an O(1) scale, so the absolute
    # quadrature tolerance acts as a relative one even as the kernel grows
    # like 1/(4 pi t) for small t.
    t = z.real
    rt = math.sqrt(t)

    def integrand(x: np.ndarray):
        return np.exp(-(x * x) * (z / t)) * np.tanh(np.pi * x / rt) * x

    res = integrate_semi_infinite(integrand, decay=1.0, tol=tol)
    return np.exp(-0.25 * z) * res.value / (2.0 * math.pi * t)


def _off_diagonal_kernel(z: complex, d: float, tol: float) -> complex:
    # u = d + v^2 turns the 1/sqrt(cosh u - cosh d) endpoint into a smooth
    # factor: cosh(d + v^2) - cosh d = 2 sinh(d + v^2/2) sinh(v^2/2), an
    # identity that is cancellation-free for small v.
    t = z.real

    def integrand(v: np.ndarray):
        vsq = v * v
        u = d + vsq
        core = 2.0 * np.sinh(d + 0.5 * vsq) * np.sinh(0.5 * vsq) / np.maximum(vsq, 1e-300)
        return 2.0 * u * np.exp(-u * u / (4.0 * z)) / np.sqrt(core)

    # v-scale: e^{-u^2/4t} dies once u - d ~ 13 sqrt(t); v ~ (13 sqrt t)^{1/2}
    rate = 1.0 / max(math.sqrt(13.0 * math.sqrt(t)), 1e-3)
    res = integrate_semi_infinite(integrand, decay=rate, tol=tol)
    prefac = math.sqrt(2.0) * np.exp(-z / 4.0) / (4.0 * math.pi * z) ** 1.5
    return prefac * res.value


def heat_kernel_h(t: float, d: float, tol: float = 1e-12) -> float:
    """Heat kernel K(t, d) on the hyperbolic plane at real time t > 0."""
    if not t > 0:
        raise DomainError(f"heat_kernel_h requires t > 0, got {t}")
    if d < 0:
        raise DomainError(f"heat_kernel_h requires d >= 0, got {d}")
    if d == 0:
        return float(np.real(_diagonal_kernel(complex(t), tol)))
    return float(np.real(_off_diagonal_kernel(complex(t), d, tol)))


def heat_kernel_h_complex(z: ComplexTime, d: float, tol: float = 1e-12) -> complex:
    """Heat kernel at complex time z = t + i*s, t > 0.

    Reduces to heat_kernel_h when s = 0.  For d = 0 the diagonal r-integral
    is used, which is the analytic extension in the time variable.
    """
    if d < 0:
        raise DomainError(f"heat_kernel_h_complex requires d >= 0, got {d}")
    if d == 0:
        return complex(_diagonal_kernel(z.z, tol))
    return complex(_off_diagonal_kernel(z.z, d, tol))


def complex_time_bound(z: ComplexTime, d: float, tol: float = 1e-12) -> float:
    """Right-hand side of the modulus bound
    |K(z, d)| <= e^{s^2/4t} t^{-3/2} (t^2 + s^2)^{3/4} K(tau, d), tau = |z|^2/t."""
    t, s = z.t, z.s
    return (math.exp(s * s / (4.0 * t)) * t ** -1.5
            * (t * t + s * s) ** 0.75 * heat_kernel_h(z.tau, d, tol))
