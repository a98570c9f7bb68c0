"""Spectral density, displacement weight, renormalization integrals and
imaginary-time bath correlation functions.

Conventions:
  * the zy channel stores the real kernel G(tau) with C_zy = i * G(tau);
    the factor i is restored when the second-order integrand is contracted,
    so tables stay real.
  * hyperbolic kernels are evaluated in the form
    (e^{-tau w} + e^{-(beta-tau) w}) / (1 - e^{-beta w}),
    which never overflows and has a finite small-w limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .model import BathParams, Frame, FrameSolution, ModelParams
from .quadrature import integrate_log_interval, integrate_semi_infinite

CHANNELS = ("xx", "yy", "zz", "zy")

# sinh(phi/2)**2 overflows past ~1420; beyond that only the e^{phi} term of
# C_xx / C_yy survives at double precision.
_PHI_LARGE = 700.0


def spectral_density(omega, bath: BathParams):
    """Super-ohmic J(w) = (gamma/2) (w^3/w_c^3) e^{-w/w_c}."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0.0):
        raise ValueError("spectral density only defined for omega >= 0")
    out = 0.5 * bath.gamma * w**3 / bath.omega_c**3 * np.exp(-w / bath.omega_c)
    return out if out.ndim else float(out)


def _variational_weight(omega: np.ndarray, delta_r: float, eta: float, beta: float) -> np.ndarray:
    """F(w) = [1 + (delta_r^2/(w eta)) coth(beta w/2) tanh(beta eta/2)]^{-1}.

    Rearranged to w*eta*tanh(beta w/2) / (w*eta*tanh(beta w/2) + delta_r^2 tanh(beta eta/2)),
    finite for all w > 0 and -> 0 like w^2 at the origin."""
    if delta_r == 0.0:
        return np.ones_like(omega)
    num = omega * eta * np.tanh(0.5 * beta * omega)
    return num / (num + delta_r**2 * math.tanh(0.5 * beta * eta))


def displacement_weight(omega, frame: FrameSolution, model: ModelParams):
    """Displacement weight F(w) of a frame: 0 (original), 1 (full polaron) or
    the variational profile evaluated with the frame's delta_r and eta."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0.0):
        raise ValueError("omega must be >= 0")
    if frame.frame is Frame.ORIGINAL:
        out = np.zeros_like(w)
    elif frame.frame is Frame.FULL_POLARON:
        out = np.ones_like(w)
    else:
        out = _variational_weight(w, frame.delta_r, frame.eta, model.beta)
    return out if out.ndim else float(out)


def _weight_profile(frame: FrameSolution, model: ModelParams):
    if frame.frame is Frame.ORIGINAL:
        return lambda w: np.zeros_like(w)
    if frame.frame is Frame.FULL_POLARON:
        return lambda w: np.ones_like(w)
    return lambda w: _variational_weight(w, frame.delta_r, frame.eta, model.beta)


def _bose_denominator(omega: np.ndarray, beta: float) -> np.ndarray:
    # 1 - e^{-beta w}, written through expm1 so the small-w limit stays exact
    return -np.expm1(-beta * omega)


def renormalization_rhs_many(B_trial: np.ndarray, model: ModelParams, bath: BathParams) -> np.ndarray:
    """Vectorized rhs of the self-consistent equation, one value per trial B.

    The exponent is split as (full-displacement part) - (deficit): the deficit
    integrand turns on at omega ~ delta_r, which for small trial B sits many
    decades below omega_c, so it is integrated on a log grid where that
    feature has unit width regardless of B."""
    B = np.atleast_1d(np.asarray(B_trial, dtype=float))
    if np.any(B < 0.0) or np.any(B > 1.0):
        raise ValueError("B_trial must lie in [0, 1]")
    if bath.gamma == 0.0:
        return np.ones_like(B)
    delta_r = B * model.delta
    eta = np.hypot(model.epsilon, delta_r)
    beta = model.beta
    pref = bath.gamma / (math.pi * bath.omega_c**3)

    def full_integrand(w):
        # 2 (1/pi) (J/w^2) coth(beta w/2) at F == 1
        emb = np.exp(-beta * w)
        return pref * np.exp(-w / bath.omega_c) * w * (1.0 + emb) / _bose_denominator(w, beta)

    exponent = integrate_semi_infinite(full_integrand, bath.omega_c) * np.ones_like(B)

    if model.delta != 0.0 and np.any(delta_r > 0.0):
        d_coef = (delta_r**2 * np.tanh(0.5 * beta * eta))[:, None]
        eta_col = eta[:, None]

        def deficit_integrand(w):
            # 2 (1/pi) (J/w^2) coth * (1 - F^2); with N = w eta tanh(beta w/2)
            # and D = delta_r^2 tanh(beta eta/2):
            # 1 - F^2 = D (2N + D) / (N + D)^2, no cancellation anywhere
            emb = np.exp(-beta * w)
            base = pref * np.exp(-w / bath.omega_c) * w * (1.0 + emb) / _bose_denominator(w, beta)
            n = eta_col * (w * np.tanh(0.5 * beta * w))
            one_minus_f2 = d_coef * (2.0 * n + d_coef) / (n + d_coef) ** 2
            return base * one_minus_f2

        deficit = integrate_log_interval(
            deficit_integrand, 1e-16 * bath.omega_c, 50.0 * bath.omega_c
        )
        exponent = exponent - deficit
    return np.exp(-exponent)


def renormalization_rhs(B_trial: float, model: ModelParams, bath: BathParams) -> float:
    """exp[-2 int dw/pi (J/w^2) F(w; B_trial)^2 coth(beta w/2)], in (0, 1]."""
    return float(renormalization_rhs_many(np.array([B_trial]), model, bath)[0])


def full_polaron_B(model: ModelParams, bath: BathParams) -> float:
    """Renormalization constant for the full displacement, F == 1."""
    if bath.gamma == 0.0:
        return 1.0
    return float(renormalization_rhs_many(np.array([0.0]), model, bath)[0])


def frame_shift(frame: FrameSolution, model: ModelParams, bath: BathParams) -> float:
    """Continuum scalar shift of the transformed system Hamiltonian:
    int dw/pi (J/w) F (F - 2); zero in the original frame, <= 0 always."""
    if bath.gamma == 0.0 or frame.frame is Frame.ORIGINAL:
        return 0.0
    profile = _weight_profile(frame, model)
    pref = bath.gamma / (2.0 * math.pi * bath.omega_c**3)

    def integrand(w):
        f = profile(w)
        return pref * w**2 * np.exp(-w / bath.omega_c) * f * (f - 2.0)

    return float(integrate_semi_infinite(integrand, bath.omega_c))


def full_polaron_frame(model: ModelParams, bath: BathParams) -> FrameSolution:
    B = full_polaron_B(model, bath)
    sol = FrameSolution.build(Frame.FULL_POLARON, B, 0.0, model)
    shift = frame_shift(sol, model, bath)
    return FrameSolution.build(Frame.FULL_POLARON, B, shift, model)


def phi(tau, frame: FrameSolution, model: ModelParams, bath: BathParams):
    """phi(tau) = 4 int dw/pi (J/w^2) F^2 cosh((beta/2-tau) w)/sinh(beta w/2).

    Split as (F == 1 part) - (deficit with 1 - F^2), like the rhs exponent:
    the deficit turns on at omega ~ delta_r, many decades below omega_c when
    the solved B is small, and phi is the one frame integral that keeps O(1)
    weight there (the zz/zy integrands suppress the feature by w^2 or more)."""
    t = np.atleast_1d(np.asarray(tau, dtype=float))
    _check_tau(t, model.beta)
    if bath.gamma == 0.0 or frame.frame is Frame.ORIGINAL:
        out = np.zeros_like(t)
        return out if np.asarray(tau).ndim else float(out[0])
    beta = model.beta
    pref = 2.0 * bath.gamma / (math.pi * bath.omega_c**3)

    def full_integrand(w):
        base = pref * np.exp(-w / bath.omega_c) * w / _bose_denominator(w, beta)
        kern = np.exp(-t[:, None] * w) + np.exp(-(beta - t[:, None]) * w)
        return base * kern

    out = integrate_semi_infinite(full_integrand, bath.omega_c)

    if frame.frame is Frame.VARIATIONAL and frame.delta_r > 0.0:
        d_coef = frame.delta_r**2 * math.tanh(0.5 * beta * frame.eta)

        def deficit_integrand(w):
            # 1 - F^2 = D (2N + D) / (N + D)^2, no cancellation anywhere
            base = pref * np.exp(-w / bath.omega_c) * w / _bose_denominator(w, beta)
            kern = np.exp(-t[:, None] * w) + np.exp(-(beta - t[:, None]) * w)
            n = frame.eta * (w * np.tanh(0.5 * beta * w))
            one_minus_f2 = d_coef * (2.0 * n + d_coef) / (n + d_coef) ** 2
            return base * kern * one_minus_f2

        out = out - integrate_log_interval(
            deficit_integrand, 1e-16 * bath.omega_c, 50.0 * bath.omega_c
        )
    return out if np.asarray(tau).ndim else float(out[0])


def _czz(t: np.ndarray, profile, model: ModelParams, bath: BathParams) -> np.ndarray:
    beta = model.beta
    pref = bath.gamma / (2.0 * math.pi * bath.omega_c**3)

    def integrand(w):
        f = profile(w)
        base = pref * w**3 * np.exp(-w / bath.omega_c) * (1.0 - f) ** 2 / _bose_denominator(w, beta)
        kern = np.exp(-t[:, None] * w) + np.exp(-(beta - t[:, None]) * w)
        return base * kern

    return integrate_semi_infinite(integrand, bath.omega_c)


def _zy_kernel(t: np.ndarray, frame: FrameSolution, model: ModelParams, bath: BathParams) -> np.ndarray:
    """Real kernel G(tau), with C_zy = i G: G = delta_r int dw/pi (J/w) F (1-F)
    sinh((beta/2-tau) w)/sinh(beta w/2)."""
    beta = model.beta
    profile = _weight_profile(frame, model)
    pref = frame.delta_r * bath.gamma / (2.0 * math.pi * bath.omega_c**3)

    def integrand(w):
        f = profile(w)
        base = pref * w**2 * np.exp(-w / bath.omega_c) * f * (1.0 - f) / _bose_denominator(w, beta)
        kern = np.exp(-t[:, None] * w) - np.exp(-(beta - t[:, None]) * w)
        return base * kern

    return integrate_semi_infinite(integrand, bath.omega_c)


def _cxx_cyy_from_phi(phi_vals: np.ndarray, delta_r: float) -> tuple[np.ndarray, np.ndarray]:
    """C_xx = (dr^2/8)(e^phi + e^-phi - 2), C_yy = (dr^2/8)(e^phi - e^-phi),
    without cancellation (sinh forms) and without overflow (log form for
    phi beyond double range; there phi0 >= phi so the product stays bounded)."""
    p = np.asarray(phi_vals, dtype=float)
    if delta_r == 0.0:
        return np.zeros_like(p), np.zeros_like(p)
    cxx = np.empty_like(p)
    cyy = np.empty_like(p)
    small = p <= _PHI_LARGE
    ps = p[small]
    cxx[small] = 0.5 * delta_r**2 * np.sinh(0.5 * ps) ** 2
    cyy[small] = 0.25 * delta_r**2 * np.sinh(ps)
    if not np.all(small):
        pl = p[~small]
        lead = np.exp(2.0 * math.log(delta_r) + pl) / 8.0
        cxx[~small] = lead
        cyy[~small] = lead
    return cxx, cyy


def correlation(channel: str, tau, frame: FrameSolution, model: ModelParams, bath: BathParams):
    """Direct evaluation of one imaginary-time correlation channel.

    channel 'zy' returns the i-stripped real kernel G(tau) (C_zy = i G, C_yz = -i G)."""
    if channel not in CHANNELS:
        raise ValueError(f"unknown channel {channel!r}")
    t = np.atleast_1d(np.asarray(tau, dtype=float))
    _check_tau(t, model.beta)
    scalar = not np.asarray(tau).ndim
    if bath.gamma == 0.0:
        out = np.zeros_like(t)
        return float(out[0]) if scalar else out

    if channel == "zz":
        out = _czz(t, _weight_profile(frame, model), model, bath)
    elif channel == "zy":
        out = _zy_kernel(t, frame, model, bath)
    else:
        phi_t = np.atleast_1d(phi(t, frame, model, bath))
        cxx, cyy = _cxx_cyy_from_phi(phi_t, frame.delta_r)
        out = cxx if channel == "xx" else cyy
    return float(out[0]) if scalar else out


def _check_tau(t: np.ndarray, beta: float) -> None:
    if np.any(t < -1e-12) or np.any(t > beta * (1.0 + 1e-12)):
        raise ValueError("tau must lie in [0, beta]")


@dataclass
class CorrelationTable:
    """All correlation channels and phi tabulated on a uniform tau grid.

    Immutable after construction; `channel` evaluates by cubic interpolation."""

    tau_grid: np.ndarray
    values: dict[str, np.ndarray]
    phi_values: np.ndarray
    phi0: float
    _splines: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        g = self.tau_grid
        if g.size < 3 or np.any(np.diff(g) <= 0):
            raise ValueError("tau grid must be strictly increasing with >= 3 points")
        if abs(g[0]) > 1e-12 * g[-1]:
            raise ValueError("tau grid must start at 0")
        for name in CHANNELS:
            self._splines[name] = CubicSpline(g, self.values[name])

    @property
    def beta(self) -> float:
        return float(self.tau_grid[-1])

    def channel(self, name: str, tau) -> np.ndarray:
        if name not in CHANNELS:
            raise ValueError(f"unknown channel {name!r}")
        return self._splines[name](tau)

    def max_abs(self, name: str) -> float:
        return float(np.max(np.abs(self.values[name])))


def build_correlation_table(
    grid_size: int, frame: FrameSolution, model: ModelParams, bath: BathParams
) -> CorrelationTable:
    if grid_size < 3:
        raise ValueError("grid_size must be >= 3")
    grid = np.linspace(0.0, model.beta, grid_size)
    if bath.gamma == 0.0:
        zeros = np.zeros(grid_size)
        return CorrelationTable(
            tau_grid=grid,
            values={name: zeros.copy() for name in CHANNELS},
            phi_values=zeros.copy(),
            phi0=0.0,
        )
    phi_vals = np.atleast_1d(phi(grid, frame, model, bath))
    phi0 = float(phi_vals[0])
    cxx, cyy = _cxx_cyy_from_phi(phi_vals, frame.delta_r)
    czz = _czz(grid, _weight_profile(frame, model), model, bath)
    gzy = _zy_kernel(grid, frame, model, bath)
    return CorrelationTable(
        tau_grid=grid,
        values={"xx": cxx, "yy": cyy, "zz": czz, "zy": gzy},
        phi_values=phi_vals,
        phi0=phi0,
    )
