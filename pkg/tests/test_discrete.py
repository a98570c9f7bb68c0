"""Few-mode discretization against quadrature, perturbative and sampling
oracles."""

import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad

import spinboson.discrete as discrete_mod
from spinboson import pimc
from spinboson.bath import correlation, spectral_density
from spinboson.discrete import (
    DiscreteBath,
    discrete_correlation_table,
    discrete_kernel,
    discretize_bath,
    exact_rdm,
)
from spinboson.model import BathParams, ModelParams, original_frame
from spinboson.perturbation import reduced_density_matrix

MODEL = ModelParams(epsilon=1.0, delta=3.0, beta=1.0)
BATH = BathParams(gamma=2.0, omega_c=5.0)

# -(eps/eta0) tanh(beta eta0 / 2), eta0 = sqrt(10)
SIGMA_Z_FREE = -0.29054360729485363333
# K=2, gamma=2, omega_c=1, n_max=12 (converged to ~1e-9)
SIGMA_Z_K2_REF = -0.325021539069930


def quiet_bath(K, bath, n_max):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return discretize_bath(K, bath, n_max=n_max)


class TestDiscretizeBath:
    def test_single_mode_at_mean_frequency(self):
        d = discretize_bath(1, BATH)
        hi = 20.0 * BATH.omega_c
        mean = quad(lambda w: w * spectral_density(w, BATH), 0, hi, limit=200)[0]
        norm = quad(lambda w: spectral_density(w, BATH), 0, hi, limit=200)[0]
        assert d.frequencies[0] == pytest.approx(mean / norm, rel=1e-10)
        assert d.frequencies[0] == pytest.approx(4.0 * BATH.omega_c, rel=1e-3)

    def test_total_weight_is_spectral_integral(self):
        hi = 20.0 * BATH.omega_c
        total = quad(
            lambda w: spectral_density(w, BATH) / math.pi, 0, hi, limit=200
        )[0]
        for K in (1, 3, 6):
            d = quiet_bath(K, BATH, n_max=2)
            assert float(np.sum(d.couplings**2)) == pytest.approx(total, rel=1e-11)

    def test_inverse_square_moment_converges(self):
        target = BATH.gamma / (2.0 * math.pi * BATH.omega_c)
        errs = []
        for K in (1, 2, 4, 8):
            d = quiet_bath(K, BATH, n_max=2)
            s = float(np.sum(d.couplings**2 / d.frequencies**2))
            errs.append(abs(s - target))
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert errs[-1] < errs[0] / 5.0

    def test_decoupled_has_zero_couplings(self):
        d = discretize_bath(2, BathParams(gamma=0.0, omega_c=5.0), n_max=4)
        assert np.all(d.couplings == 0.0)

    def test_couplings_scale_as_sqrt_gamma(self):
        weak = quiet_bath(3, BathParams(gamma=2.0, omega_c=5.0), n_max=2)
        strong = quiet_bath(3, BathParams(gamma=8.0, omega_c=5.0), n_max=2)
        np.testing.assert_allclose(strong.frequencies, weak.frequencies, rtol=1e-14)
        np.testing.assert_allclose(strong.couplings, 2.0 * weak.couplings, rtol=1e-13)

    def test_default_truncation_meets_heuristic(self):
        d = discretize_bath(1, BATH)
        g, w = d.couplings[0], d.frequencies[0]
        assert d.n_max >= 10 + 4.0 * (g / w) ** 2

    def test_low_truncation_warns(self):
        with pytest.warns(RuntimeWarning, match="heuristic"):
            discretize_bath(1, BATH, n_max=2)

    def test_mode_count_validation(self):
        with pytest.raises(ValueError):
            discretize_bath(0, BATH)

    def test_dimension_cap(self):
        with pytest.raises(ValueError, match="cap"):
            quiet_bath(12, BATH, n_max=4)
        with pytest.raises(ValueError):
            DiscreteBath(((1.0, 0.1),) * 10, n_max=10)

    def test_field_validation(self):
        with pytest.raises(ValueError):
            DiscreteBath(((1.0, 0.1),), n_max=1)
        with pytest.raises(ValueError):
            DiscreteBath(((-1.0, 0.1),), n_max=4)
        with pytest.raises(ValueError):
            DiscreteBath((), n_max=4)


class TestDiscreteKernel:
    def test_equal_time_value(self):
        d = quiet_bath(4, BATH, n_max=2)
        k = discrete_kernel(d, MODEL)
        w, g = d.frequencies, d.couplings
        manual = float(np.sum(g**2 / np.tanh(0.5 * MODEL.beta * w)))
        assert float(k(0.0)[0]) == pytest.approx(manual, rel=1e-13)

    def test_time_reversal_symmetry(self):
        d = quiet_bath(4, BATH, n_max=2)
        k = discrete_kernel(d, MODEL)
        taus = np.array([0.1, 0.3, 0.45])
        np.testing.assert_allclose(k(taus), k(MODEL.beta - taus), rtol=1e-13)

    def test_approaches_continuum_kernel(self):
        frame = original_frame(MODEL)
        taus = np.array([0.2, 0.5, 0.8])
        cont = correlation("zz", taus, frame, MODEL, BATH)
        errs = []
        for K in (4, 8, 12):
            k = discrete_kernel(quiet_bath(K, BATH, n_max=2), MODEL)
            errs.append(float(np.max(np.abs(k(taus) - cont))))
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert errs[-1] < 2e-3

    def test_table_carries_only_zz(self):
        d = quiet_bath(3, BATH, n_max=2)
        table = discrete_correlation_table(d, MODEL, grid_size=201)
        k = discrete_kernel(d, MODEL)
        np.testing.assert_allclose(table.values["zz"], k(table.tau_grid), rtol=1e-14)
        for name in ("xx", "yy", "zy"):
            assert table.max_abs(name) == 0.0
        assert table.phi0 == 0.0


class TestExactRdm:
    def test_decoupled_matches_isolated_system(self):
        d = discretize_bath(2, BathParams(gamma=0.0, omega_c=5.0), n_max=4)
        rho = exact_rdm(d, MODEL)
        assert rho.sigma_z == pytest.approx(SIGMA_Z_FREE, abs=1e-12)

    def test_density_matrix_is_valid(self):
        d = quiet_bath(2, BATH, n_max=6)
        rho = exact_rdm(d, MODEL)
        assert rho.order is None
        assert np.trace(rho.entries) == 1.0
        assert rho.min_eigenvalue >= -1e-12

    def test_frozen_regression(self):
        d = quiet_bath(2, BathParams(gamma=2.0, omega_c=1.0), n_max=12)
        rho = exact_rdm(d, MODEL, recheck=False)
        assert rho.sigma_z == pytest.approx(SIGMA_Z_K2_REF, abs=1e-8)

    def test_truncation_deltas_shrink_monotonically(self):
        d = quiet_bath(2, BathParams(gamma=2.0, omega_c=1.0), n_max=4)
        values = [
            exact_rdm(d.with_truncation(n), MODEL, recheck=False).sigma_z
            for n in (4, 6, 8, 10)
        ]
        deltas = [abs(b - a) for a, b in zip(values, values[1:])]
        assert all(b < a for a, b in zip(deltas, deltas[1:]))
        assert deltas[-1] < 1e-6

    def test_recheck_rejects_severe_truncation(self):
        strong = BathParams(gamma=30.0, omega_c=1.0)
        d = quiet_bath(2, strong, n_max=20).with_truncation(2)
        with pytest.raises(RuntimeError, match="truncation"):
            exact_rdm(d, MODEL)

    def test_sparse_route_matches_dense(self, monkeypatch):
        d = quiet_bath(2, BATH, n_max=8)
        dense = exact_rdm(d, MODEL, recheck=False)
        monkeypatch.setattr(discrete_mod, "DENSE_CUTOFF", 10)
        sparse = exact_rdm(d, MODEL, recheck=False)
        assert sparse.sigma_z == pytest.approx(dense.sigma_z, abs=1e-12)

    def test_weak_coupling_error_is_second_order(self):
        # exact and 2nd-order perturbation theory on the same single-mode
        # model differ at O(gamma^2)
        frame = original_frame(MODEL)
        diffs = []
        for g in (0.1, 0.2, 0.4):
            b = BathParams(gamma=g, omega_c=5.0)
            d = discretize_bath(1, b, n_max=20)
            table = discrete_correlation_table(d, MODEL)
            pt = reduced_density_matrix(frame, MODEL, b, order=2, correlations=table)
            ex = exact_rdm(d, MODEL, recheck=False)
            diffs.append(abs(ex.sigma_z - pt.sigma_z))
        assert diffs[0] < 1e-6
        for a, b in zip(diffs, diffs[1:]):
            assert 3.5 < b / a < 4.5

    def test_agrees_with_sampling_on_same_kernel(self):
        d = quiet_bath(3, BATH, n_max=8)
        ex = exact_rdm(d, MODEL)
        est = pimc.estimate(
            MODEL,
            BATH,
            n_steps=128,
            n_samples=200_000,
            seed=11,
            kernel=discrete_kernel(d, MODEL),
        )
        assert abs(est.sigma_z - ex.sigma_z) < 3.0 * est.sigma_z_stderr
