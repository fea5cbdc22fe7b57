"""Spectral/Hurwitz zeta machinery and the regularized determinant.

Oracles: Riemann zeta via scipy.special.zeta (the circle spectrum is
2 zeta_R(2s) with zeta_R'(0) = -log(2 pi)/... giving det = 4 pi^2), finite
Dirichlet sums, and cross-representation identities.
"""

import math

import numpy as np
import pytest
from scipy.special import zeta as riemann_zeta

from conftest import circle_theta, finite_model_trace, vectorize_scalar
from degenspec.errors import (AlphaCollisionError, DivergenceError,
                              DomainError, InsufficientSubtractionsError,
                              PoleError, StripViolationError)
from degenspec.geometry import DegeneratingFamily, SurfaceData
from degenspec.traces import standard_trace
from degenspec.zeta_det import (HeatCoefficients, ZetaEvaluation,
                                degeneration_subtraction_zeta, det_laplacian,
                                fit_trace_expansion, heat_coefficients,
                                hurwitz_zeta, log_det_truncated,
                                mellin_regularized_integral,
                                spectral_zeta_mellin, spectral_zeta_series,
                                truncated_zeta)

SQRT_PI = math.sqrt(math.pi)
CIRCLE_COEFFS = [(-0.5, SQRT_PI)]


def surface_trace(surface, tol=1e-12):
    from degenspec.traces import surface_trace_provider
    return vectorize_scalar(surface_trace_provider(surface, tol))


class TestSeries:
    def test_finite_sum(self):
        assert spectral_zeta_series([1, 2, 3], 1.0) == pytest.approx(11 / 6,
                                                                     rel=1e-15)

    def test_zero_mode_excluded(self):
        assert spectral_zeta_series([0, 1], 1.0) == pytest.approx(1.0,
                                                                  rel=1e-15)

    def test_circle_spectrum_riemann_oracle(self):
        # lambda = n^2 with multiplicity 2: zeta(s) = 2 zeta_R(2s)
        eigs = [n * n for n in range(1, 4000) for _ in (0, 1)]
        val = spectral_zeta_series(eigs, 2.0)
        assert val.real == pytest.approx(2 * riemann_zeta(4.0), abs=1e-9)

    def test_complex_argument(self):
        s = 1.5 + 2.0j
        val = spectral_zeta_series([1.0, 4.0], s)
        oracle = 1.0 + complex(np.exp(-s * math.log(4.0)))
        assert abs(val - oracle) <= 1e-14

    def test_generator_with_certificate(self):
        def gen():
            n = 0
            while True:
                n += 1
                yield float(n)

        val = spectral_zeta_series(gen(), 3.0, growth=1.0, tol=1e-12)
        assert val.real == pytest.approx(riemann_zeta(3.0), abs=1e-8)

    def test_generator_needs_halfplane(self):
        def gen():
            n = 0
            while True:
                n += 1
                yield float(n)

        with pytest.raises(DivergenceError):
            spectral_zeta_series(gen(), 0.9, growth=1.0)

    def test_generator_needs_certificate(self):
        with pytest.raises(DomainError):
            spectral_zeta_series(iter([1.0, 2.0]), 2.0)


class TestMellin:
    def test_matches_series_on_finite_model(self):
        trace = finite_model_trace([1.0, 2.0, 3.0])
        for s in (1.5, 2.0, 3.0, 2.0 + 1.0j, 1.5 - 0.7j):
            ev = spectral_zeta_mellin(trace, 0.0, s, 0,
                                      coefficients=[(-1.0, 0.0)],
                                      tail_decay=1.0)
            ser = spectral_zeta_series([1.0, 2.0, 3.0], s)
            assert abs(ev.value - ser) <= 1e-8 * (1 + abs(ser))

    def test_residue_flag_on_surface(self, compact_surface):
        trace = surface_trace(compact_surface)
        fit = heat_coefficients(trace, 1)
        ev = spectral_zeta_mellin(trace, 0.0, 2.0, 1, coefficients=fit)
        assert ev.pole_flag is not None
        location, residue = ev.pole_flag
        assert location == 1.0
        assert residue == pytest.approx(
            compact_surface.volume / (4 * math.pi), abs=1e-6)

    def test_pole_error_at_one(self, compact_surface):
        trace = surface_trace(compact_surface)
        with pytest.raises(PoleError):
            spectral_zeta_mellin(trace, 0.0, 1.0, 1)

    def test_circle_zeta_at_zero(self):
        # zeta(0) = 2 zeta_R(0) = -1
        ev = spectral_zeta_mellin(circle_theta, 1.0, 1e-13, 0,
                                  coefficients=CIRCLE_COEFFS, tail_decay=1.0)
        assert ev.value.real == pytest.approx(-1.0, abs=1e-9)

    def test_circle_zeta_at_two(self):
        ev = spectral_zeta_mellin(circle_theta, 1.0, 2.0, 0,
                                  coefficients=CIRCLE_COEFFS, tail_decay=1.0)
        assert ev.value.real == pytest.approx(2 * riemann_zeta(4.0), abs=1e-10)

    def test_insufficient_subtractions(self):
        trace = finite_model_trace([1.0])
        with pytest.raises(InsufficientSubtractionsError):
            spectral_zeta_mellin(trace, 0.0, -1.5, 1)

    def test_subtraction_depth_consistency(self, compact_surface):
        # values with n and n+1 subtractions agree where both are valid
        trace = surface_trace(compact_surface)
        coeffs = fit_trace_expansion(
            trace, (0.0, 1.0, 2.0),
            known=((-1.0, compact_surface.volume / (4 * math.pi)),))
        v2 = spectral_zeta_mellin(trace, 0.0, 1.6, 1,
                                  coefficients=coeffs[:3]).value
        v3 = spectral_zeta_mellin(trace, 0.0, 1.6, 2,
                                  coefficients=coeffs).value
        assert abs(v2 - v3) <= 1e-9 * (1 + abs(v2))


class TestHeatCoefficients:
    def test_identity_only_surface(self, bare_surface):
        trace = surface_trace(bare_surface)
        fit = heat_coefficients(trace, 1)
        assert fit.b[0] == pytest.approx(bare_surface.volume / (4 * math.pi),
                                         abs=1e-6)

    def test_synthetic_exact_recovery(self):
        trace = vectorize_scalar(lambda t: 2.5 / t + 0.75)
        fit = heat_coefficients(trace, 0)
        assert fit.b[0] == pytest.approx(2.5, abs=1e-10)
        assert fit.b[1] == pytest.approx(0.75, abs=1e-8)

    def test_elliptic_only_surface(self):
        s = SurfaceData(genus=0, num_cusps=1, elliptic_orders=(2, 3, 7))
        from degenspec.traces import elliptic_trace_u
        trace = vectorize_scalar(lambda t: elliptic_trace_u((2, 3, 7), t))
        fit = heat_coefficients(trace, 1)
        assert abs(fit.b[0]) <= 1e-8  # no 1/t term
        # b_0 = ETr(0+) = sum (q^2-1)/(12 q) over cones
        expected = sum((q * q - 1) / (12.0 * q) for q in (2, 3, 7))
        assert fit.b[1] == pytest.approx(expected, abs=1e-6)

    def test_full_surface_b_minus_one(self, compact_surface):
        trace = surface_trace(compact_surface)
        fit = heat_coefficients(trace, 2)
        assert fit.b[0] == pytest.approx(
            compact_surface.volume / (4 * math.pi), abs=1e-6)


class TestHurwitz:
    def test_reduces_to_spectral_zeta(self):
        eigs = [1.0, 2.0, 3.0]
        assert hurwitz_zeta(eigs, 2.0, 0.0) == pytest.approx(
            complex(spectral_zeta_series(eigs, 2.0)), rel=1e-14)

    def test_single_mode(self):
        assert hurwitz_zeta([1.0], 2.0, 1.0) == pytest.approx(0.25, rel=1e-14)

    def test_strip_shift_identity(self):
        # direct sum vs the shifted-tail transform route
        eigs = [0.4, 1.0, 2.0, 3.5]
        for z in (0.5, 1.0, -0.2):
            direct = hurwitz_zeta(eigs, 2.0, z)
            shifted = hurwitz_zeta(eigs, 2.0, z, stage=1)
            assert abs(direct - shifted) <= 1e-8 * (1 + abs(direct))

    def test_strip_violation(self):
        eigs = [0.4, 1.0]
        with pytest.raises(StripViolationError):
            hurwitz_zeta(eigs, 2.0, -0.5, stage=1)
        with pytest.raises(StripViolationError):
            hurwitz_zeta(finite_model_trace([1.0]), 2.0, -0.5)

    def test_trace_route_matches_series(self):
        eigs = [1.0, 2.0, 3.0]
        trace = finite_model_trace([0.0] + eigs)
        for z in (0.5, 1.5):
            val = hurwitz_zeta(trace, 2.0, z, c_M=1.0,
                               coefficients=[(-1.0, 0.0)], tail_decay=1.0)
            direct = hurwitz_zeta(eigs, 2.0, z)
            assert abs(val - direct) <= 1e-9 * (1 + abs(direct))

    def test_continuity_to_spectral(self):
        eigs = [1.0, 2.0]
        near = hurwitz_zeta(eigs, 1.8, 1e-6)
        at = complex(spectral_zeta_series(eigs, 1.8))
        assert abs(near - at) <= 1e-5


class TestTruncatedZeta:
    def test_finite_model(self):
        eigs = [0.0, 0.3, 1.0]
        val = truncated_zeta(eigs, 0.1, 2.0)
        assert val == pytest.approx(1.0 / 0.3 ** 2 + 1.0, rel=1e-14)

    def test_alpha_between_eigenvalues(self):
        eigs = [0.05, 0.2, 1.0]
        low = truncated_zeta(eigs, 0.1, 2.0)
        high = truncated_zeta(eigs, 0.21, 2.0)
        assert low - high == pytest.approx(1.0 / 0.2 ** 2, rel=1e-12)

    def test_collision(self):
        with pytest.raises(AlphaCollisionError):
            truncated_zeta([0.1, 1.0], 0.1, 2.0)

    def test_trace_route_matches_series(self):
        eigs = [0.0, 0.05, 1.0, 2.0]
        trace = finite_model_trace(eigs)
        val = truncated_zeta(trace, 0.1, 2.0,
                             small_eigenvalues=[0.0, 0.05], c_M=1.0,
                             coefficients=[(-1.0, 0.0)], tail_decay=1.0)
        direct = truncated_zeta(eigs, 0.1, 2.0)
        assert abs(val - direct) <= 1e-8 * (1 + abs(direct))


class TestDeterminant:
    def test_finite_product(self):
        det = det_laplacian([1.0, 2.0, 3.0])
        assert det == pytest.approx(6.0, rel=1e-9)

    def test_zero_mode_ignored(self):
        det = det_laplacian([0.0, 2.0, 5.0])
        assert det == pytest.approx(10.0, rel=1e-9)

    def test_circle_four_pi_squared(self):
        # zeta'(0) = 4 zeta_R'(0) = -2 log 2 pi; det = 4 pi^2
        det = det_laplacian(circle_theta, c_M=1.0, coefficients=CIRCLE_COEFFS,
                            tail_decay=1.0)
        assert det == pytest.approx(4 * math.pi ** 2, rel=1e-6)

    def test_log_det_integral_representation(self):
        # on a finite model with all modes above alpha the regularized
        # integral reproduces log prod lambda = log det
        eigs = [0.5, 1.5, 4.0]
        trace = finite_model_trace(eigs)
        val = log_det_truncated(trace, eigs, 0.2, c_M=0.0,
                                coefficients=[(-1.0, 0.0), (0.0, 0.0)],
                                tail_decay=0.5)
        assert val == pytest.approx(sum(math.log(x) for x in eigs), abs=1e-6)

    def test_regularized_integral_matches_literal(self):
        # for a trace vanishing at both ends the regularization equals the
        # literal integral: f = e^{-t} - e^{-2t}, int f dt/t = log 2
        trace = vectorize_scalar(lambda t: math.exp(-t) - math.exp(-2 * t))
        val = mellin_regularized_integral(trace, c_M=0.0,
                                          coefficients=[(0.0, 0.0)],
                                          tail_decay=1.0)
        assert val == pytest.approx(math.log(2.0), abs=1e-8)


class TestFitExpansion:
    def test_known_coefficient_passthrough(self):
        trace = vectorize_scalar(lambda t: 3.0 / t + 1.0 + 2.0 * t)
        terms = fit_trace_expansion(trace, (0.0, 1.0), known=((-1.0, 3.0),))
        d = dict(terms)
        assert d[-1.0] == 3.0
        assert d[0.0] == pytest.approx(1.0, abs=1e-9)
        assert d[1.0] == pytest.approx(2.0, abs=1e-6)

    def test_empty_powers(self):
        terms = fit_trace_expansion(vectorize_scalar(lambda t: 1.0 / t), (),
                                    known=((-1.0, 1.0),))
        assert terms == [(-1.0, 1.0)]


class TestDegenerationExperiments:
    def test_zeta_mode_cauchy(self, hecke_like_family):
        rows = degeneration_subtraction_zeta(hecke_like_family, 0.1, 2.0,
                                             mode="zeta", tol=1e-11)
        diffs = [abs(rows[i + 1][1] - rows[i][1]) for i in range(len(rows) - 1)]
        assert all(b < a for a, b in zip(diffs[:-1], diffs[1:]))

    def test_zeta_mode_uniform_on_vertical_segment(self, hecke_like_family):
        # uniformity over Im(s) on Re(s) = 3: the Cauchy differences shrink
        # at every height
        for im in (-5.0, 0.0, 5.0):
            rows = degeneration_subtraction_zeta(hecke_like_family, 0.1,
                                                 3.0 + 1j * im, mode="zeta",
                                                 tol=1e-10)
            diffs = [abs(rows[i + 1][1] - rows[i][1])
                     for i in range(len(rows) - 1)]
            assert all(b < a for a, b in zip(diffs[:-1], diffs[1:]))

    def test_hurwitz_mode_cauchy(self, hecke_like_family):
        rows = degeneration_subtraction_zeta(hecke_like_family, 0.1, 3.0,
                                             mode="hurwitz", z=1.0, tol=1e-10)
        diffs = [abs(rows[i + 1][1] - rows[i][1]) for i in range(len(rows) - 1)]
        assert all(b < a for a, b in zip(diffs[:-1], diffs[1:]))

    def test_logdet_mode_cauchy(self, hecke_like_family):
        rows = degeneration_subtraction_zeta(hecke_like_family, 0.1, 0.0,
                                             mode="logdet", tol=1e-12)
        diffs = [abs(rows[i + 1][1] - rows[i][1]) for i in range(len(rows) - 1)]
        assert all(b < a for a, b in zip(diffs[:-1], diffs[1:]))

    def test_direct_route_agrees(self):
        template = SurfaceData(genus=0, num_cusps=1,
                               elliptic_orders=(2, 3, 10), degenerating=(2,),
                               length_spectrum=((1.0, 1),),
                               small_eigenvalues=(0.0, 0.05))
        fam = DegeneratingFamily(template=template, schedule=((10,), (20,)))
        direct = degeneration_subtraction_zeta(fam, 0.1, 2.0, mode="zeta",
                                               route="direct", tol=1e-11)
        diff = degeneration_subtraction_zeta(fam, 0.1, 2.0, mode="zeta",
                                             tol=1e-11)
        for (q1, v1), (q2, v2) in zip(direct, diff):
            assert q1 == q2
            assert abs(v1 - v2) <= 1e-8 * (1 + abs(v2))

    def test_empty_degenerating_set_constant(self):
        template = SurfaceData(genus=0, num_cusps=1,
                               elliptic_orders=(2, 3, 10), degenerating=(2,),
                               small_eigenvalues=(0.0,))
        fam = DegeneratingFamily(template=template, schedule=((10,), (10,)))
        rows = degeneration_subtraction_zeta(fam, 0.1, 2.0, mode="zeta",
                                             tol=1e-11)
        assert abs(rows[0][1] - rows[1][1]) <= 1e-10

    def test_alpha_validation(self, hecke_like_family):
        with pytest.raises(AlphaCollisionError):
            degeneration_subtraction_zeta(hecke_like_family, 0.05, 2.0)
        with pytest.raises(DomainError):
            degeneration_subtraction_zeta(hecke_like_family, 0.3, 2.0)
