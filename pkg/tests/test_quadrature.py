import numpy as np
import pytest
from scipy.integrate import quad

from spinboson.quadrature import QuadratureError, integrate_semi_infinite


def test_matches_adaptive_quad_on_damped_polynomial():
    omega_c = 5.0
    f = lambda w: w**3 * np.exp(-w / omega_c) / (1.0 + w**2)
    ref, _ = quad(f, 0.0, np.inf, limit=400)
    got = integrate_semi_infinite(f, omega_c)
    assert abs(got - ref) < 1e-9 * abs(ref)


def test_matches_adaptive_quad_with_hyperbolic_kernel():
    omega_c, beta, tau = 1.5, 1.0, 0.3
    def f(w):
        w = np.asarray(w, dtype=float)
        kern = (np.exp(-tau * w) + np.exp(-(beta - tau) * w)) / -np.expm1(-beta * w)
        return w * np.exp(-w / omega_c) * kern
    ref, _ = quad(lambda w: float(f(np.array([w]))[0]), 0.0, np.inf, limit=400)
    got = integrate_semi_infinite(f, omega_c)
    assert abs(got - ref) < 1e-9 * abs(ref)


def test_gamma_function_values():
    # int_0^inf w^n e^{-w/wc} = n! wc^{n+1}
    for omega_c in (0.1, 1.0, 10.0):
        got = integrate_semi_infinite(lambda w: w**3 * np.exp(-w / omega_c), omega_c)
        assert got == pytest.approx(6.0 * omega_c**4, rel=1e-12)


def test_vectorized_over_leading_axis():
    omega_c = 2.0
    taus = np.linspace(0.0, 1.0, 7)
    f = lambda w: np.exp(-taus[:, None] * w) * w**2 * np.exp(-w / omega_c)
    got = integrate_semi_infinite(f, omega_c)
    assert got.shape == (7,)
    for i, t in enumerate(taus):
        ref, _ = quad(lambda w: np.exp(-t * w) * w**2 * np.exp(-w / omega_c), 0, np.inf)
        assert abs(got[i] - ref) < 1e-9 * abs(ref)


def test_non_convergent_integrand_raises():
    f = lambda w: np.cos(3.0e5 * w) * np.exp(-w)
    with pytest.raises(QuadratureError) as err:
        integrate_semi_infinite(f, 1.0, max_order=512)
    assert err.value.order == 512


def test_error_carries_diagnostics():
    f = lambda w: np.sin(1.0e6 * w) ** 2 * np.exp(-w)
    with pytest.raises(QuadratureError) as err:
        integrate_semi_infinite(f, 1.0, max_order=256)
    assert err.value.last_value is not None
    assert err.value.last_delta is not None
