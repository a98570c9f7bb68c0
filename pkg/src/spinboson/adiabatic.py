"""Static-noise (adiabatic) limit of the slow bath.

When the bath frequencies are far below every system scale the partition
function reduces to a Gaussian average over a frozen field x with variance
chi = 2 gamma / (pi beta):

    Z = int dx N(x; 0, chi) 2 cosh(beta R(x)),  R = sqrt((delta/2)^2 + (x+eps/2)^2)

sigma_z follows by differentiating ln Z in eps (central difference plus one
Richardson step). The integral is evaluated in units of sqrt(chi) so the
Gaussian width is always 1, with the peak factored out of the exponentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import BathParams, ModelParams
from .quadrature import QuadratureError

CHI_POINT_MASS = 1e-12
_DIFF_STEP = 1e-5


@dataclass(frozen=True)
class AdiabaticParams:
    chi: float
    model: ModelParams

    def __post_init__(self):
        if not (np.isfinite(self.chi) and self.chi >= 0.0):
            raise ValueError("chi must be finite and >= 0")

    @classmethod
    def from_bath(cls, model: ModelParams, bath: BathParams) -> "AdiabaticParams":
        return cls(chi=2.0 * bath.gamma / (math.pi * model.beta), model=model)


def _log_2cosh(y: np.ndarray) -> np.ndarray:
    return y + np.log1p(np.exp(-2.0 * y))


def _log_z(chi: float, epsilon: float, delta: float, beta: float) -> float:
    if chi < CHI_POINT_MASS:
        return float(_log_2cosh(0.5 * beta * math.hypot(epsilon, delta)))
    s = math.sqrt(chi)

    def log_integrand(y: np.ndarray) -> np.ndarray:
        r = np.hypot(0.5 * delta, s * y + 0.5 * epsilon)
        return -0.5 * y**2 + _log_2cosh(beta * r)

    # the exponent peaks within |y| <= beta sqrt(chi) + O(1)
    half_width = beta * s + 12.0
    edges = [-half_width, half_width]
    if delta == 0.0:
        # R has a kink at the sign change of the shifted field
        kink = -0.5 * epsilon / s
        if abs(kink) < half_width:
            edges = [-half_width, kink, half_width]

    previous = None
    order = 64
    while order <= 4096:
        base_x, base_w = np.polynomial.legendre.leggauss(order)
        total_m = -np.inf
        chunks = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            half = 0.5 * (hi - lo)
            y = half * (base_x + 1.0) + lo
            g = log_integrand(y)
            chunks.append((g, half * base_w))
            total_m = max(total_m, float(g.max()))
        acc = 0.0
        for g, w in chunks:
            acc += float((np.exp(g - total_m) * w).sum())
        value = total_m + math.log(acc) - 0.5 * math.log(2.0 * math.pi)
        if previous is not None and abs(value - previous) <= 1e-13 + 1e-12 * abs(value):
            return value
        previous = value
        order *= 2
    raise QuadratureError(
        f"static-noise average did not converge (last delta {abs(value - previous):.3e})",
        last_value=value,
        order=2048,
    )


def log_partition_function(params: AdiabaticParams) -> float:
    m = params.model
    return _log_z(params.chi, m.epsilon, m.delta, m.beta)


def partition_function_adiabatic(params: AdiabaticParams) -> float:
    return math.exp(log_partition_function(params))


def sigma_z_adiabatic(params: AdiabaticParams) -> float:
    """-(2/beta) d ln Z / d eps, central difference with one Richardson step."""
    m = params.model

    def diff(h: float) -> float:
        up = _log_z(params.chi, m.epsilon + h, m.delta, m.beta)
        down = _log_z(params.chi, m.epsilon - h, m.delta, m.beta)
        return (up - down) / (2.0 * h)

    d1 = diff(_DIFF_STEP)
    d2 = diff(0.5 * _DIFF_STEP)
    return -(2.0 / m.beta) * (4.0 * d2 - d1) / 3.0
