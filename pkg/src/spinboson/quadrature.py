"""Semi-infinite quadrature for exponentially damped bath integrals.

All bath integrands here share the envelope exp(-omega/omega_c) from the
spectral density, so integration works in the scaled variable x = omega/omega_c:
Gauss-Legendre panels on [0, 1], [1, 10], [10, 50] with order doubling until
the whole output vector is converged, plus a fixed Gauss-Laguerre rule for the
x > 50 tail (relative weight ~ exp(-50), far below tolerance, but kept exact
for integrands with slowly varying prefactors).
"""

from __future__ import annotations

from typing import Callable

import numpy as np

PANEL_EDGES = (0.0, 1.0, 10.0, 50.0)
TAIL_START = 50.0
_TAIL_ORDER = 48


class QuadratureError(RuntimeError):
    """Raised when panel doubling does not reach the requested tolerance."""

    def __init__(self, message: str, last_value=None, last_delta=None, order=None):
        super().__init__(message)
        self.last_value = last_value
        self.last_delta = last_delta
        self.order = order


def _panel_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    base_x, base_w = np.polynomial.legendre.leggauss(order)
    xs = []
    ws = []
    for lo, hi in zip(PANEL_EDGES[:-1], PANEL_EDGES[1:]):
        half = 0.5 * (hi - lo)
        xs.append(half * (base_x + 1.0) + lo)
        ws.append(half * base_w)
    return np.concatenate(xs), np.concatenate(ws)


def _tail_rule() -> tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.laguerre.laggauss(_TAIL_ORDER)
    # int_{50}^inf g(x) dx = sum_i w_i e^{t_i} g(50 + t_i); e^{t} g stays finite
    # because every integrand decays at least like e^{-x}.
    return TAIL_START + t, w * np.exp(t)


_TAIL_X, _TAIL_W = _tail_rule()


def integrate_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    omega_c: float,
    abs_tol: float = 1e-10,
    rel_tol: float = 1e-8,
    start_order: int = 32,
    max_order: int = 2048,
) -> np.ndarray:
    """Integrate f(omega) over omega in (0, inf).

    f receives a 1-D array of strictly positive omega values and must return an
    array whose last axis matches it; leading axes are integrated independently,
    so a whole tau grid can be integrated in one call. Returns a scalar ndarray
    for scalar-valued f.
    """
    tail = (f(_TAIL_X * omega_c) * (_TAIL_W * omega_c)).sum(axis=-1)

    previous = None
    delta = None
    order = start_order
    while order <= max_order:
        x, w = _panel_rule(order)
        value = (f(x * omega_c) * (w * omega_c)).sum(axis=-1) + tail
        if previous is not None:
            delta = np.abs(value - previous)
            if np.all(delta <= abs_tol + rel_tol * np.abs(value)):
                return value
        previous = value
        order *= 2
    raise QuadratureError(
        f"panel doubling did not converge by order {max_order} "
        f"(max delta {np.max(delta) if delta is not None else 'n/a'})",
        last_value=value,
        last_delta=delta,
        order=max_order,
    )


def integrate_log_interval(
    f: Callable[[np.ndarray], np.ndarray],
    omega_lo: float,
    omega_hi: float,
    abs_tol: float = 1e-10,
    rel_tol: float = 1e-8,
    start_order: int = 16,
    max_order: int = 512,
    panel_width: float = 4.0,
) -> np.ndarray:
    """Integrate f(omega) over [omega_lo, omega_hi] on a logarithmic grid.

    Gauss-Legendre panels of ~panel_width in v = ln(omega), order-doubled per
    panel. Suits integrands whose internal scale varies per row over many
    decades (each row's feature spans O(1) in v wherever it sits)."""
    if not 0.0 < omega_lo < omega_hi:
        raise ValueError("need 0 < omega_lo < omega_hi")
    v_lo, v_hi = np.log(omega_lo), np.log(omega_hi)
    n_panels = max(1, int(np.ceil((v_hi - v_lo) / panel_width)))
    edges = np.linspace(v_lo, v_hi, n_panels + 1)

    previous = None
    delta = None
    order = start_order
    while order <= max_order:
        base_x, base_w = np.polynomial.legendre.leggauss(order)
        vs = []
        ws = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            half = 0.5 * (hi - lo)
            vs.append(half * (base_x + 1.0) + lo)
            ws.append(half * base_w)
        v = np.concatenate(vs)
        w = np.concatenate(ws)
        omega = np.exp(v)
        value = (f(omega) * (w * omega)).sum(axis=-1)
        if previous is not None:
            delta = np.abs(value - previous)
            if np.all(delta <= abs_tol + rel_tol * np.abs(value)):
                return value
        previous = value
        order *= 2
    raise QuadratureError(
        f"log-panel doubling did not converge by order {max_order} "
        f"(max delta {np.max(delta) if delta is not None else 'n/a'})",
        last_value=value,
        last_delta=delta,
        order=max_order,
    )
