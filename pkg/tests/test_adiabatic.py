"""Static-noise limit: frozen references and closed-form limits.

Reference values were computed with mpmath (dps=40) by Gaussian quadrature
of the frozen-field average and, for sigma_z, of its exact eps-derivative.
"""

import math

import numpy as np
import pytest

from spinboson.adiabatic import (
    AdiabaticParams,
    log_partition_function,
    partition_function_adiabatic,
    sigma_z_adiabatic,
)
from spinboson.bath import correlation
from spinboson.model import BathParams, Frame, ModelParams, original_frame

MODEL = ModelParams(epsilon=1.0, delta=1.0, beta=1.0)

# eps=1 delta=1 beta=1, chi = 20/pi (gamma=10)
Z_REF = 55.69601422072862854355
SZ_REF = -0.4584665376904178051311
# same model, chi = 80/pi (gamma=40)
SZ_REF_40 = -0.4619372804576923664668
# chi=0: 2 cosh(sqrt(2)/2)
Z_DECOUPLED = 2.5211836730427122390
# chi=0 sigma_z: -(eps/eta) tanh(beta eta / 2), eta = sqrt(2)
SZ_DECOUPLED = -0.43052858579027382193
# delta=0, chi=20/pi: 2 exp(beta^2 chi / 2) cosh(beta eps / 2)
Z_DELTA0 = 54.39980391523964830942


def params(gamma, model=MODEL):
    return AdiabaticParams.from_bath(model, BathParams(gamma=gamma, omega_c=1.0))


class TestPartitionFunction:
    def test_from_bath_variance(self):
        p = params(10.0)
        assert p.chi == pytest.approx(20.0 / math.pi, rel=1e-15)

    def test_decoupled_closed_form(self):
        p = AdiabaticParams(chi=0.0, model=MODEL)
        assert partition_function_adiabatic(p) == pytest.approx(Z_DECOUPLED, rel=1e-14)

    def test_frozen_reference(self):
        assert partition_function_adiabatic(params(10.0)) == pytest.approx(Z_REF, rel=1e-11)

    def test_delta_zero_closed_form(self):
        model = ModelParams(epsilon=1.0, delta=0.0, beta=1.0)
        p = params(10.0, model=model)
        expected = 2.0 * math.exp(0.5 * p.chi) * math.cosh(0.5)
        assert expected == pytest.approx(Z_DELTA0, rel=1e-15)
        assert partition_function_adiabatic(p) == pytest.approx(expected, rel=1e-11)

    def test_monotone_in_chi(self):
        values = [partition_function_adiabatic(params(g)) for g in (0.5, 2.0, 10.0, 40.0)]
        assert all(b > a for a, b in zip(values, values[1:]))
        assert values[0] > Z_DECOUPLED

    def test_tiny_chi_approaches_decoupled(self):
        p = AdiabaticParams(chi=1e-8, model=MODEL)
        assert partition_function_adiabatic(p) == pytest.approx(Z_DECOUPLED, rel=1e-6)

    def test_log_consistency(self):
        p = params(40.0)
        assert math.exp(log_partition_function(p)) == pytest.approx(
            partition_function_adiabatic(p), rel=1e-14
        )

    def test_rejects_negative_variance(self):
        with pytest.raises(ValueError):
            AdiabaticParams(chi=-1.0, model=MODEL)


class TestSigmaZ:
    def test_decoupled_closed_form(self):
        p = AdiabaticParams(chi=0.0, model=MODEL)
        assert sigma_z_adiabatic(p) == pytest.approx(SZ_DECOUPLED, abs=1e-9)

    def test_frozen_reference(self):
        assert sigma_z_adiabatic(params(10.0)) == pytest.approx(SZ_REF, abs=1e-7)

    def test_frozen_reference_strong(self):
        assert sigma_z_adiabatic(params(40.0)) == pytest.approx(SZ_REF_40, abs=1e-7)

    def test_vanishes_at_zero_bias(self):
        model = ModelParams(epsilon=0.0, delta=1.0, beta=1.0)
        assert abs(sigma_z_adiabatic(params(10.0, model=model))) < 1e-9

    def test_odd_in_bias(self):
        flipped = ModelParams(epsilon=-1.0, delta=1.0, beta=1.0)
        assert sigma_z_adiabatic(params(10.0, model=flipped)) == pytest.approx(
            -sigma_z_adiabatic(params(10.0)), abs=1e-9
        )

    def test_bounded(self):
        for g in (0.0, 1.0, 10.0, 100.0):
            assert abs(sigma_z_adiabatic(params(g))) < 1.0

    def test_negative_susceptibility_at_zero_bias(self):
        # positive bias pushes the population down
        biased = ModelParams(epsilon=0.05, delta=1.0, beta=1.0)
        assert sigma_z_adiabatic(params(10.0, model=biased)) < 0.0

    def test_matches_fourth_order_stencil(self):
        p = params(10.0)
        h = 1e-4

        def lz(eps):
            shifted = ModelParams(epsilon=eps, delta=MODEL.delta, beta=MODEL.beta)
            return log_partition_function(AdiabaticParams(chi=p.chi, model=shifted))

        e = MODEL.epsilon
        stencil = (
            -lz(e + 2 * h) + 8 * lz(e + h) - 8 * lz(e - h) + lz(e - 2 * h)
        ) / (12 * h)
        assert sigma_z_adiabatic(p) == pytest.approx(-2.0 / MODEL.beta * stencil, abs=1e-8)


class TestBruteForce:
    def test_dense_trapezoid_agrees(self):
        p = params(10.0)
        s = math.sqrt(p.chi)
        width = MODEL.beta * s + 14.0
        y = np.linspace(-width, width, 1_000_001)
        r = np.hypot(0.5 * MODEL.delta, s * y + 0.5 * MODEL.epsilon)
        f = np.exp(-0.5 * y**2) * 2.0 * np.cosh(MODEL.beta * r)
        z = np.trapezoid(f, y) / math.sqrt(2.0 * math.pi)
        assert partition_function_adiabatic(p) == pytest.approx(z, rel=1e-9)


class TestSlowBathConsistency:
    def test_variance_matches_midpoint_correlation(self):
        # as omega_c -> 0 the bare zz correlator flattens to the constant
        # 2 gamma / (pi beta), the variance of the frozen field
        model = ModelParams(epsilon=1.0, delta=1.0, beta=1.0)
        bath = BathParams(gamma=2.0, omega_c=1e-3)
        frame = original_frame(model)
        chi = AdiabaticParams.from_bath(model, bath).chi
        mid = correlation("zz", 0.5 * model.beta, frame, model, bath)
        assert mid == pytest.approx(chi, rel=1e-4)
