"""Second-order imaginary-time perturbation theory for the reduced density
matrix of the two-level system in a given frame.

The double integral over the ordered triangle 0 <= b'' <= b' <= beta is
mapped to the unit square (b' = beta s, b'' = beta s u, Jacobian beta^2 s)
and evaluated with a tensor Gauss-Legendre rule. The zy channel table stores
the real kernel G with C_zy = i G and C_yz = -i G; the i is restored here,
and the assembled matrix must come out real again.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bath import CorrelationTable, build_correlation_table
from .model import BathParams, FrameSolution, ModelParams

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

# (channel, sigma_n, sigma_m, prefactor restoring the stored-real convention)
_CHANNEL_TERMS = (
    ("xx", SIGMA_X, SIGMA_X, 1.0),
    ("yy", SIGMA_Y, SIGMA_Y, 1.0),
    ("zz", SIGMA_Z, SIGMA_Z, 1.0),
    ("zy", SIGMA_Z, SIGMA_Y, 1.0j),
    ("zy", SIGMA_Y, SIGMA_Z, -1.0j),
)

IMAG_TOL = 1e-10


@dataclass(frozen=True)
class ReducedDensityMatrix:
    """2x2 real density matrix with unit trace.

    order is the perturbative order (None for sampled estimates);
    min_eigenvalue is diagnostic (the order-2 correction can push an
    eigenvalue slightly negative, which is reported, not clipped)."""

    entries: np.ndarray
    order: int | None

    def __post_init__(self):
        m = self.entries
        if m.shape != (2, 2) or not np.all(np.isfinite(m)):
            raise ValueError("entries must be a finite 2x2 matrix")
        if abs(m[0, 1] - m[1, 0]) > 1e-12:
            raise ValueError("density matrix must be symmetric")
        if abs(np.trace(m) - 1.0) > 1e-12:
            raise ValueError("density matrix must have unit trace")

    @property
    def sigma_z(self) -> float:
        return float((self.entries[0, 0] - self.entries[1, 1]).real)

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])


def system_hamiltonian(frame: FrameSolution, model: ModelParams) -> np.ndarray:
    """(eps/2) sigma_z + (delta_r/2) sigma_x; the frame's scalar shift is
    dropped (it cancels in every density-matrix ratio)."""
    return 0.5 * model.epsilon * SIGMA_Z + 0.5 * frame.delta_r * SIGMA_X


def _split_traceless(H: np.ndarray) -> tuple[complex, np.ndarray, float]:
    c = np.trace(H) / 2.0
    H0 = H - c * IDENTITY
    h = float(np.sqrt(abs(H0[0, 0]) ** 2 + abs(H0[0, 1]) ** 2).real)
    return c, H0, h


def imaginary_propagator(H: np.ndarray, tau) -> np.ndarray:
    """exp(-tau H) for Hermitian 2x2 H, in closed form: with H = c + H0,
    H0 traceless with eigenvalues +-h, exp(-tau H0) = cosh(tau h) - sinh(tau h) H0/h."""
    if not np.allclose(H, H.conj().T, atol=1e-12):
        raise ValueError("H must be Hermitian")
    c, H0, h = _split_traceless(H)
    t = np.asarray(tau, dtype=float)
    ch = np.cosh(t * h)
    if h == 0.0:
        shh = t  # sinh(t h)/h -> t
    else:
        shh = np.sinh(t * h) / h
    out = (
        ch[..., None, None] * IDENTITY
        - shh[..., None, None] * H0
    ) * np.exp(-t * c.real)[..., None, None]
    return out if t.ndim else out[()]


def _gl_unit(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def second_order_A(
    frame: FrameSolution,
    model: ModelParams,
    bath: BathParams,
    quad_order: int = 64,
    correlations: CorrelationTable | None = None,
) -> np.ndarray:
    """A = int_0^beta db' int_0^b' db'' sum_nm C_nm(b'-b'') e^{(b'-b)H} s_n
    e^{(b''-b')H} s_m e^{-b'' H}, the unnormalized second-order correction."""
    if quad_order < 2:
        raise ValueError("quad_order must be >= 2")
    beta = model.beta
    if correlations is None:
        correlations = build_correlation_table(401, frame, model, bath)
    H = system_hamiltonian(frame, model)

    s, ws = _gl_unit(quad_order)
    u, wu = _gl_unit(quad_order)
    sg, ug = np.meshgrid(s, u, indexing="ij")
    sg, ug = sg.ravel(), ug.ravel()
    weight = (np.outer(ws, wu).ravel() * beta**2 * sg).astype(complex)

    b1 = beta * sg          # b'
    b2 = beta * sg * ug     # b''
    left = imaginary_propagator(H, beta - b1)   # e^{(b'-b) H}
    mid = imaginary_propagator(H, b1 - b2)      # e^{(b''-b') H}
    right = imaginary_propagator(H, b2)         # e^{-b'' H}

    A = np.zeros((2, 2), dtype=complex)
    for name, sig_n, sig_m, pref in _CHANNEL_TERMS:
        if correlations.max_abs(name) == 0.0:
            continue
        c_vals = correlations.channel(name, b1 - b2)
        coeff = weight * pref * c_vals
        term = left @ sig_n @ mid @ sig_m @ right
        A += np.tensordot(coeff, term, axes=(0, 0))
    return A


def _exact_trace(m: np.ndarray, target: float) -> np.ndarray:
    # binary halving makes the enforced trace exact, not just close
    excess = (np.trace(m) - target) / 2.0
    return m - excess * np.eye(2)


def second_order_correction(
    frame: FrameSolution,
    model: ModelParams,
    bath: BathParams,
    quad_order: int = 64,
    correlations: CorrelationTable | None = None,
) -> np.ndarray:
    """rho^(2) = A/Z0 - (Z2/Z0^2) e^{-beta H}; real with exactly zero trace."""
    H = system_hamiltonian(frame, model)
    E = imaginary_propagator(H, model.beta)
    z0 = float(np.trace(E).real)
    A = second_order_A(frame, model, bath, quad_order, correlations)
    z2 = np.trace(A)
    rho2 = A / z0 - (z2 / z0**2) * E
    # roundoff is generated while contracting A, whose summands grow with the
    # bath correlation magnitude, so the residue bound scales with |A|
    tol = IMAG_TOL * max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(rho2.imag)) > tol:
        raise RuntimeError(
            f"second-order correction has imaginary residue {np.max(np.abs(rho2.imag)):.3e}"
        )
    asym = float(np.max(np.abs(rho2 - rho2.conj().T)))
    if asym > tol:
        raise RuntimeError(f"second-order correction asymmetry {asym:.3e}")
    # Hermitian analytically; the tensor quadrature breaks it at ~1e-11, so
    # project back before enforcing the exact zero trace
    m = rho2.real
    m = 0.5 * (m + m.T)
    return _exact_trace(m, 0.0)


def reduced_density_matrix(
    frame: FrameSolution,
    model: ModelParams,
    bath: BathParams,
    order: int,
    quad_order: int = 64,
    correlations: CorrelationTable | None = None,
) -> ReducedDensityMatrix:
    """Normalized reduced density matrix at perturbative order 0 or 2."""
    if order not in (0, 2):
        raise ValueError("order must be 0 or 2")
    H = system_hamiltonian(frame, model)
    E = imaginary_propagator(H, model.beta)
    rho0 = (E / np.trace(E).real).real
    m = rho0
    if order == 2:
        m = rho0 + second_order_correction(frame, model, bath, quad_order, correlations)
    return ReducedDensityMatrix(entries=_exact_trace(m, 1.0), order=order)


def expectation_sigma_z(rho: ReducedDensityMatrix) -> float:
    return rho.sigma_z
