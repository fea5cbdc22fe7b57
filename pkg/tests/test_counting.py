"""Weighted counting functions: Riesz means, non-compact corrections,
weight lowering, Weyl diagnostics."""

import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad

from degenspec.counting import (ScatteringModel, counting_compact,
                                counting_noncompact, counting_noncompact_hat,
                                weight_lowering, weyl_ratio)
from degenspec.errors import DomainError, ModelValidationError


class TestCompact:
    def test_weighted_finite_sum(self):
        assert counting_compact([0.0, 0.1, 0.3], 1.0, 0.5) == \
            pytest.approx(0.5 + 0.4 + 0.2, rel=1e-15)

    def test_below_smallest(self):
        assert counting_compact([0.5, 1.0], 0.0, 0.4) == 0.0

    def test_zero_weight_counts(self):
        assert counting_compact([0.0, 0.1, 0.3], 0.0, 0.2) == 2.0

    def test_closed_threshold(self):
        # lambda = T included, per the closed-threshold convention
        assert counting_compact([0.2], 0.0, 0.2) == 1.0
        assert counting_compact([0.2], 1.0, 0.2) == 0.0  # (T - T)^1 = 0

    def test_nondecreasing_in_T(self):
        eigs = [0.0, 0.3, 0.3, 0.9, 2.0]
        for w in (0.0, 0.5, 2.0):
            vals = [counting_compact(eigs, w, T)
                    for T in np.linspace(0.0, 3.0, 40)]
            assert all(b >= a - 1e-15 for a, b in zip(vals[:-1], vals[1:]))

    def test_continuity_for_positive_weight(self):
        # (T - lambda)^w is Hoelder-w at the eigenvalue: the two-sided jump
        # is exactly h^w, vanishing with h for every w > 0
        eigs = [0.5]
        h = 1e-8
        for w in (0.5, 1.0):
            jump = counting_compact(eigs, w, 0.5 + h) \
                - counting_compact(eigs, w, 0.5 - h)
            assert abs(jump) <= 2.0 * h ** w

    def test_negative_weight_rejected(self):
        with pytest.raises(DomainError):
            counting_compact([1.0], -0.1, 2.0)


class TestScatteringModel:
    def test_trace_bound(self):
        model = ScatteringModel(phi_log_deriv=lambda r: -4.0,
                                trace_phi_half=2.0, q_M=1.5)
        with pytest.raises(ModelValidationError):
            model.validate(p=1)
        model.validate(p=2)

    def test_lower_bound_enforced_with_cusps(self):
        # phi'/phi = 0 cannot satisfy -phi'/phi >= 2 log q_M > 0
        model = ScatteringModel(phi_log_deriv=lambda r: 0.0, q_M=1.5)
        with pytest.raises(ModelValidationError):
            model.validate(p=1)
        model.validate(p=0)  # vacuous without cusps

    def test_resonance_range(self):
        with pytest.raises(ModelValidationError):
            ScatteringModel(phi_log_deriv=lambda r: -2.0, resonances=(0.4,))
        with pytest.raises(ModelValidationError):
            ScatteringModel(phi_log_deriv=lambda r: -2.0, resonances=(1.2,))

    def test_resonance_sum_in_bound(self):
        model = ScatteringModel(phi_log_deriv=lambda r: -3.0,
                                resonances=(0.9,), q_M=1.2)
        model.validate(p=1)


class TestNoncompact:
    def test_reduces_to_compact(self):
        # p = 0, trivial scattering: continuous terms all vanish
        eigs = [0.0, 0.2, 0.7]
        model = ScatteringModel.trivial()
        for w, T in ((0.0, 2.0), (1.0, 0.9)):
            assert counting_noncompact(eigs, 0, model, w, T) == \
                pytest.approx(counting_compact(eigs, w, T), rel=1e-12)

    def test_below_quarter_scattering_independent(self):
        eigs = [0.0, 0.2]
        m1 = ScatteringModel(phi_log_deriv=lambda r: -5.0, q_M=2.0)
        m2 = ScatteringModel(phi_log_deriv=lambda r: -9.0, q_M=3.0)
        for T in (0.1, 0.25):
            assert counting_noncompact(eigs, 1, m1, 0.0, T) == \
                counting_noncompact(eigs, 1, m2, 0.0, T)

    def test_constant_scattering_oracle(self):
        # phi'/phi = -2c, w = 0: scattering term is (c/2pi) 2 sqrt(T - 1/4)
        c, T = 0.8, 1.25
        model = ScatteringModel(phi_log_deriv=lambda r: -2.0 * c, q_M=1.2)
        val = counting_noncompact([], 0, model, 0.0, T)
        assert val == pytest.approx(c / (2 * math.pi) * 2 * math.sqrt(T - 0.25),
                                    abs=1e-10)

    def test_trace_term_vanishes_when_equal(self):
        # w=0, p=1, Tr Phi(1/2) = 1: fourth term = 0
        T = 1.25
        base = ScatteringModel(phi_log_deriv=lambda r: -2.0,
                               trace_phi_half=1.0, q_M=math.e)
        shifted = ScatteringModel(phi_log_deriv=lambda r: -2.0,
                                  trace_phi_half=0.0, q_M=math.e)
        v_eq = counting_noncompact([], 1, base, 0.0, T)
        v_zero = counting_noncompact([], 1, shifted, 0.0, T)
        assert v_eq - v_zero == pytest.approx(0.25 * (T - 0.25) ** 0.0,
                                              rel=1e-10)

    def test_five_term_assembly_oracle(self):
        # assemble the display by independent quadrature
        from degenspec.special_fn import digamma, log_gamma
        eigs = [0.0, 0.3]
        p, w, T, c = 2, 0.5, 2.0, 1.1
        model = ScatteringModel(phi_log_deriv=lambda r: -2.0 * c,
                                trace_phi_half=-1.0, q_M=1.4)
        R = math.sqrt(T - 0.25)
        scat, _ = quad(lambda r: (T - 0.25 - r * r) ** w * (-2.0 * c), -R, R,
                       epsabs=1e-13)
        psi_int, _ = quad(lambda r: (T - 0.25 - r * r) ** w
                          * complex(digamma(complex(1.0, r))).real, -R, R,
                          epsabs=1e-13)
        gamma_ratio = math.exp(log_gamma(w + 1.0) - log_gamma(w + 1.5))
        oracle = (counting_compact(eigs, w, T)
                  - scat / (4 * math.pi)
                  + p / (2 * math.pi) * psi_int
                  - 0.25 * (p - (-1.0)) * (T - 0.25) ** w
                  + p * math.log(2.0) * gamma_ratio / math.sqrt(4 * math.pi)
                  * (T - 0.25) ** (w + 0.5))
        val = counting_noncompact(eigs, p, model, w, T)
        assert val == pytest.approx(oracle, abs=1e-9)

    def test_hat_subset_monotone(self):
        # discrete + scattering integral is nondecreasing in T when the
        # model's lower bound holds
        eigs = [0.0, 0.3, 0.8]
        model = ScatteringModel(phi_log_deriv=lambda r: -3.0, q_M=1.3)
        vals = [counting_noncompact_hat(eigs, model, 0.0, T)
                for T in np.linspace(0.2, 3.0, 25)]
        assert all(b >= a - 1e-10 for a, b in zip(vals[:-1], vals[1:]))


class TestWeightLowering:
    def test_riesz_mean_derivative(self):
        # N_{w+1}(T) = (T - 0.1)^1 near T = 0.5: derivative 1, so the
        # w = 0 count is recovered
        N1 = lambda T: counting_compact([0.1], 1.0, T)
        val = weight_lowering(N1, 0.0, 0.5)
        assert val == pytest.approx(1.0, abs=1e-9)

    def test_constant_input(self):
        assert weight_lowering(lambda T: 3.0, 1.0, 1.0) == 0.0

    def test_kernel_recursion_recovery(self):
        from degenspec.degeneration import CwKernel, c_w_kernel
        w = 0.5
        higher = lambda T: c_w_kernel(CwKernel(T=T, w=w + 1.0))
        val = weight_lowering(higher, w, 1.25, h=1e-4)
        assert val == pytest.approx(c_w_kernel(CwKernel(T=1.25, w=w)),
                                    abs=1e-6)

    def test_richardson_improves(self):
        higher = lambda T: T ** 3
        plain = weight_lowering(higher, 0.0, 1.0, h=1e-2)
        refined = weight_lowering(higher, 0.0, 1.0, h=1e-2, richardson=True)
        assert abs(refined - 3.0) < abs(plain - 3.0)

    def test_step_warning_near_kink(self):
        N1 = lambda T: counting_compact([0.5], 1.0, T)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            weight_lowering(N1, 0.0, 0.5, h=0.2)
        assert any("step" in str(w.message) or "disagree" in str(w.message)
                   for w in caught)

    def test_convergence_rate_away_from_eigenvalues(self):
        # central differences of the exact Riesz mean converge at O(h^2)
        # toward the analytic lower-weight sum
        eigs = [0.1, 0.4]
        w = 1.0
        target = counting_compact(eigs, w, 1.0)
        ests = [weight_lowering(lambda T: counting_compact(eigs, w + 1, T),
                                w, 1.0, h=h) for h in (1e-2, 5e-3)]
        errs = [abs(e - target) for e in ests]
        assert errs[1] <= errs[0] * 0.3 + 1e-12


class TestWeylRatio:
    def test_synthetic_weyl_sequence(self):
        vol = 4 * math.pi  # lambda_n = 4 pi n / vol = n
        eigs = list(range(0, 10001))
        lam = 10000.0
        assert abs(weyl_ratio(eigs, vol, lam) - 1.0) <= 0.02

    def test_empty(self):
        assert weyl_ratio([], 1.0, 5.0) == 0.0

    def test_threshold(self):
        assert weyl_ratio([2.0], 1.0, 1.0) == 0.0
        assert weyl_ratio([0.5], 4 * math.pi, 1.0) == 1.0
