"""Selberg zeta function on model length spectra.

Four routes to the same logarithmic derivative Z'/Z:

1. the double series over (geodesic, n) of l/(2 sinh(n l/2)) e^{-(s-1/2) n l};
2. finite differences of log of the Euler product;
3. the K-Bessel form (2s-1) sum l/(sqrt(16 pi) sinh(n l/2)) K_{1/2}(s-1/2, n l/2);
4. the heat-trace integral (2s-1) int_0^inf HTr(t) e^{-s(s-1)t} dt.

The product and series converge for Re(s) > 1; the integral only needs the
weaker certificate Re(s^2 - s) > -1/4 and reaches the critical line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError
from .special_fn import KBesselArgs, integrate_semi_infinite, k_bessel
from .traces import hyperbolic_sum_reduced, _normalize_spectrum

__all__ = [
    "LogDerivEvaluation",
    "selberg_zeta_product",
    "selberg_logderiv_series",
    "selberg_logderiv_integral",
    "selberg_logderiv_kbessel",
    "truncated_logderiv",
    "selberg_z_prime_one",
]

_CUTOFF = 1e-18


@dataclass(frozen=True)
class LogDerivEvaluation:
    """One Z'/Z value with the representation used and its domain certificate."""

    s: complex
    value: complex
    representation: str
    domain_certificate: str


def _require_half_plane(s: complex) -> None:
    if not s.real > 1.0:
        raise DomainError(f"requires Re(s) > 1, got Re(s) = {s.real}")


def _integral_certificate(s: complex) -> str:
    if s.real > 1.0:
        return "Re(s)>1"
    q = s * s - s
    if q.real > -0.25:
        return "Re(s^2-s)>-1/4"
    raise DomainError(
        f"s = {s} fails both certificates: Re(s) = {s.real} <= 1 and "
        f"Re(s^2 - s) = {q.real} <= -1/4")


def selberg_zeta_product(lengths, s, tol: float = 1e-15) -> complex:
    """Euler product Z(s) = prod_geodesics prod_{n>=0} (1 - e^{-(s+n) l}),
    truncated once the remaining factors differ from 1 below tol.
    The empty spectrum gives the empty product 1."""
    s = complex(s)
    _require_half_plane(s)
    log_total = 0.0 + 0.0j
    for ell, mult in _normalize_spectrum(lengths):
        for n in range(0, 100000):
            x = np.exp(-(s + n) * ell)
            log_total += mult * np.log1p(-x)
            # geometric tail of sum |x| bounds the remaining log factors
            tail = abs(x) * math.exp(-ell) / max(1.0 - math.exp(-ell), 1e-300)
            if tail < tol:
                break
    return complex(np.exp(log_total))


def selberg_logderiv_series(lengths, s) -> LogDerivEvaluation:
    """Double series for Z'/Z(s), Re(s) > 1, relative-threshold truncated."""
    s = complex(s)
    _require_half_plane(s)
    total = 0.0 + 0.0j
    for ell, mult in _normalize_spectrum(lengths):
        for n in range(1, 100000):
            nl = n * ell
            if nl / 2.0 > 700:
                break
            term = ell / (2.0 * math.sinh(nl / 2.0)) * np.exp(-(s - 0.5) * nl)
            total += mult * term
            if abs(term) <= _CUTOFF * max(abs(total), 1.0):
                break
    return LogDerivEvaluation(s=s, value=complex(total),
                              representation="series",
                              domain_certificate="Re(s)>1")


def selberg_logderiv_integral(lengths, s, tol: float = 1e-12) -> LogDerivEvaluation:
    """Z'/Z(s) = (2s-1) int_0^inf HTr(t) e^{-s(s-1)t} dt, valid on the wider
    region Re(s^2 - s) > -1/4 certified before evaluation."""
    s = complex(s)
    cert = _integral_certificate(s)
    q = s * (s - 1.0)
    pairs = _normalize_spectrum(lengths)
    if not pairs:
        return LogDerivEvaluation(s=s, value=0.0 + 0.0j,
                                  representation="integral",
                                  domain_certificate=cert)

    # HTr(t) e^{-qt} = e^{-(1/4+q)t} S(t)/sqrt(16 pi t); combining the
    # exponentials keeps the integrand finite when Re(q) < 0 grows the weight
    def integrand(t: np.ndarray):
        red = np.asarray([hyperbolic_sum_reduced(pairs, float(x)) for x in t])
        return (np.exp(-(0.25 + q) * t) * red
                / np.sqrt(16.0 * math.pi * t))

    rate = 0.25 + q.real
    res = integrate_semi_infinite(integrand, decay=max(rate, 1e-3), tol=tol)
    return LogDerivEvaluation(s=s, value=complex((2.0 * s - 1.0) * res.value),
                              representation="integral",
                              domain_certificate=cert)


def selberg_logderiv_kbessel(lengths, s, tol: float = 1e-13) -> LogDerivEvaluation:
    """Z'/Z(s) through quadratures of the K-Bessel integral
    K_{1/2}(s - 1/2, n l/2); real s > 1 only (the K-Bessel arguments must be
    positive)."""
    s_c = complex(s)
    if abs(s_c.imag) > 0:
        raise DomainError("K-Bessel route requires real s")
    s = float(s_c.real)
    _require_half_plane(s_c)
    total = 0.0
    for ell, mult in _normalize_spectrum(lengths):
        for n in range(1, 100000):
            nl = n * ell
            if nl / 2.0 > 700:
                break
            bessel = k_bessel(KBesselArgs(s=0.5, a=s - 0.5, b=nl / 2.0), tol=tol)
            term = ell / (math.sqrt(16.0 * math.pi) * math.sinh(nl / 2.0)) * bessel
            total += mult * term
            if abs(term) <= _CUTOFF * max(abs(total), 1.0):
                break
    return LogDerivEvaluation(s=s_c, value=complex((2.0 * s - 1.0) * total),
                              representation="kbessel",
                              domain_certificate="Re(s)>1")


def truncated_logderiv(lengths, small_eigenvalues, alpha: float, s,
                       tol: float = 1e-12) -> complex:
    """Z'/Z(s) minus the small-eigenvalue terms (2s-1)/(s(s-1)+lambda) over
    listed lambda < alpha; poles exactly where s(s-1) = -lambda."""
    if not 0.0 <= alpha < 0.25:
        raise DomainError(f"alpha must lie in [0, 1/4), got {alpha}")
    s = complex(s)
    base = selberg_logderiv_integral(lengths, s, tol).value
    total = complex(base)
    for lam in small_eigenvalues:
        lam = float(lam)
        if lam >= alpha:
            continue
        denom = s * (s - 1.0) + lam
        if abs(denom) < 1e-9:
            raise PoleError(
                f"truncated log derivative has a pole at s = {s} "
                f"(s(s-1) = {-lam})")
        total -= (2.0 * s - 1.0) / denom
    return total


def selberg_z_prime_one(lengths, h: float = 1e-5) -> float:
    """Regularized Z'(1) of a finite model spectrum.

    Each geodesic factor is regularized separately: its n = 0 factor, which
    models the zero of the full zeta at s = 1, is replaced by the shifted
    factor e^{-l} - e^{-s l} (vanishing linearly at s = 1) and the limit off
    the zero is taken per factor, giving the product of
    l e^{-l} prod_{n>=1}(1 - e^{-(1+n) l}) over geodesics.  A central
    difference of the shifted factors at s = 1 +- h cross-checks the
    analytic removal to O(h^2).
    """
    pairs = _normalize_spectrum(lengths)
    if not pairs:
        raise DomainError("Z'(1) needs a nonempty spectrum")
    total = 1.0
    for ell, mult in pairs:
        factor = ell * math.exp(-ell)
        for n in range(1, 100000):
            x = math.exp(-(1.0 + n) * ell)
            factor *= (1.0 - x)
            if x < _CUTOFF:
                break
        total *= factor ** mult
    return total


def selberg_z_prime_one_numeric(lengths, h: float = 1e-5) -> float:
    """Finite-difference route for Z'(1): the per-geodesic shifted factor
    (e^{-l} - e^{-s l}) * prod_{n>=1}(1 - e^{-(s+n) l}) differentiated at
    s = 1 by central differences, then multiplied over geodesics."""
    pairs = _normalize_spectrum(lengths)
    if not pairs:
        raise DomainError("Z'(1) needs a nonempty spectrum")

    def factor(ell: float, s: float) -> float:
        out = math.exp(-ell) - math.exp(-s * ell)
        for n in range(1, 100000):
            x = math.exp(-(s + n) * ell)
            out *= (1.0 - x)
            if x < _CUTOFF:
                break
        return out

    total = 1.0
    for ell, mult in pairs:
        deriv = (factor(ell, 1.0 + h) - factor(ell, 1.0 - h)) / (2.0 * h)
        total *= deriv ** mult
    return total
