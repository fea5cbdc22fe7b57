"""Resolvent, Poisson, and wave kernels on finite spectral-expansion data.

A ModeSet stands in for a spectral expansion at a fixed point pair: each
mode carries an eigenvalue and the amplitude phi_n(x) phi_n(y).  The
resolvent is the rational sum -sum a/(w + lambda); the Poisson kernel comes
from the G-transform of the heat expansion, which evaluates mode-wise to
sum a e^{-w sqrt(lambda)}; the wave kernel is its rotation w -> -i w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError
from .special_fn import integrate_semi_infinite

__all__ = ["ModeSet", "resolvent", "resolvent_quadrature", "poisson",
           "poisson_quadrature", "wave"]


@dataclass(frozen=True)
class ModeSet:
    """Finite list of (eigenvalue, amplitude) pairs, eigenvalues ascending."""

    modes: tuple

    def __post_init__(self):
        pairs = sorted((float(lam), float(a)) for lam, a in self.modes)
        for lam, _ in pairs:
            if lam < 0:
                raise DomainError(f"eigenvalues must be >= 0, got {lam}")
        object.__setattr__(self, "modes", tuple(pairs))

    def truncated(self, alpha: float) -> "ModeSet":
        """Drop modes with eigenvalue below alpha."""
        return ModeSet(modes=tuple((lam, a) for lam, a in self.modes
                                   if lam >= alpha))

    def heat_sum(self, t: np.ndarray) -> np.ndarray:
        tt = np.asarray(t, dtype=float)
        out = np.zeros_like(tt)
        for lam, a in self.modes:
            out = out + a * np.exp(-lam * tt)
        return out


def resolvent(modes: ModeSet, w, alpha: float | None = None) -> complex:
    """-sum a/(w + lambda); alpha drops modes with lambda < alpha, removing
    the corresponding poles."""
    w = complex(w)
    active = modes.truncated(alpha).modes if alpha is not None else modes.modes
    total = 0.0 + 0.0j
    for lam, a in active:
        denom = w + lam
        if abs(denom) < 1e-14 * max(1.0, abs(w)):
            raise PoleError(f"resolvent pole at w = {-lam}")
        total -= a / denom
    return complex(total)


def resolvent_quadrature(modes: ModeSet, w, tol: float = 1e-12) -> complex:
    """Laplace-transform route -int_0^inf (sum a e^{-lambda t}) e^{-wt} dt,
    valid for Re(w) > 0 (and a dual-route check of the rational form)."""
    w = complex(w)
    if w.real <= 0:
        raise DomainError(f"quadrature route needs Re(w) > 0, got {w}")

    def integrand(t: np.ndarray):
        return modes.heat_sum(t) * np.exp(-w * t)

    lam_min = modes.modes[0][0] if modes.modes else 0.0
    res = integrate_semi_infinite(integrand, decay=max(w.real + lam_min, 1e-3),
                                  tol=tol)
    return complex(-res.value)


def poisson(modes: ModeSet, w: float) -> float:
    """Poisson kernel, mode-wise closed form sum a e^{-w sqrt(lambda)}."""
    if not w > 0:
        raise DomainError(f"Poisson kernel needs w > 0, got {w}")
    return float(sum(a * math.exp(-w * math.sqrt(lam))
                     for lam, a in modes.modes))


def poisson_quadrature(modes: ModeSet, w: float, tol: float = 1e-12) -> float:
    """G-transform route (w/sqrt(4 pi)) int_0^inf heat(t) e^{-w^2/4t} t^{-3/2} dt.

    Substituting t = x^2 regularizes the t^{-3/2} endpoint:
    = (w/sqrt(pi)) int_0^inf heat(x^2) e^{-w^2/4x^2} x^{-2} dx."""
    if not w > 0:
        raise DomainError(f"Poisson kernel needs w > 0, got {w}")

    def integrand(x: np.ndarray):
        xx = np.maximum(x * x, 1e-300)
        return modes.heat_sum(xx) * np.exp(-w * w / (4.0 * xx)) / xx

    res = integrate_semi_infinite(integrand, decay=1.0, tol=tol)
    return float(w / math.sqrt(math.pi) * np.real(res.value))


def wave(modes: ModeSet, w: float) -> complex:
    """Wave kernel by rotation of the Poisson mode formula:
    sum a e^{i w sqrt(lambda)}."""
    return complex(sum(a * np.exp(1j * w * math.sqrt(lam))
                       for lam, a in modes.modes))
