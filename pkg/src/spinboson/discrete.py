"""Few-mode bath discretization and exact-diagonalization cross-check.

A Gauss quadrature rule for the weight J(omega)/pi on [0, 20 omega_c] turns
the continuum bath into K modes with couplings g_k = sqrt(weight_k). Small
instances are then solved exactly: build the full spin-oscillator
Hamiltonian with n_max levels per mode, diagonalize, Boltzmann-weight the
eigenvectors and trace out the bath. The same rule defines a discrete zz
kernel so the sampling and perturbative solvers can be run on the identical
few-mode model.

This is a test fixture for small K and moderate coupling, not a production
solver; the truncation heuristic refuses regimes where polaron displacement
would populate Fock states far beyond n_max.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal
from scipy.sparse import csr_matrix, diags, identity, kron
from scipy.sparse.linalg import eigsh

from .bath import CHANNELS, CorrelationTable
from .model import ModelParams, BathParams
from .perturbation import ReducedDensityMatrix

DIMENSION_CAP = 200_000
DENSE_CUTOFF = 3000
# eigenvalues are added until the smallest kept Boltzmann weight is this
# small relative to the kept sum
BOLTZMANN_CUTOFF = 1e-12
RECHECK_TOL = 1e-6
_WINDOW = 20.0
_STIELTJES_POINTS = 4000


@dataclass(frozen=True)
class DiscreteBath:
    """K bath modes (omega_k, g_k) with n_max oscillator levels each."""

    modes: tuple[tuple[float, float], ...]
    n_max: int
    dimension_cap: int = DIMENSION_CAP

    def __post_init__(self):
        if not self.modes:
            raise ValueError("need at least one mode")
        for omega, g in self.modes:
            if not (omega > 0 and np.isfinite(omega) and np.isfinite(g)):
                raise ValueError("mode frequencies must be positive and finite")
        if self.n_max < 2:
            raise ValueError("n_max must be >= 2")
        if self.dimension(self.n_max) > self.dimension_cap:
            raise ValueError(
                f"Hilbert dimension {self.dimension(self.n_max)} exceeds cap "
                f"{self.dimension_cap}"
            )

    def dimension(self, n_max: int | None = None) -> int:
        n = self.n_max if n_max is None else n_max
        return 2 * n ** len(self.modes)

    def with_truncation(self, n_max: int) -> "DiscreteBath":
        return DiscreteBath(self.modes, n_max, self.dimension_cap)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([m[0] for m in self.modes])

    @property
    def couplings(self) -> np.ndarray:
        return np.array([m[1] for m in self.modes])


def _gauss_rule(K: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss nodes/weights for the weight x^3 e^-x on [0, 20].

    Stieltjes recurrence on a dense Legendre discretization, then
    Golub-Welsch on the Jacobi matrix. Nodes are in units of omega_c and do
    not depend on the coupling.
    """
    t, q = np.polynomial.legendre.leggauss(_STIELTJES_POINTS)
    x = 0.5 * _WINDOW * (t + 1.0)
    w = 0.5 * _WINDOW * q * x**3 * np.exp(-x)
    mu0 = float(w.sum())

    alpha = np.empty(K)
    off = np.empty(max(K - 1, 0))
    pi_prev = np.zeros_like(x)
    pi_cur = np.ones_like(x)
    norm_cur = mu0
    beta_prev = 0.0
    for j in range(K):
        alpha[j] = float(w @ (x * pi_cur**2)) / norm_cur
        if j == K - 1:
            break
        pi_next = (x - alpha[j]) * pi_cur - beta_prev * pi_prev
        norm_next = float(w @ pi_next**2)
        beta_prev = norm_next / norm_cur
        off[j] = math.sqrt(beta_prev)
        pi_prev, pi_cur, norm_cur = pi_cur, pi_next, norm_next

    if K == 1:
        nodes, vecs = np.array([alpha[0]]), np.ones((1, 1))
    else:
        nodes, vecs = eigh_tridiagonal(alpha, off)
    return nodes, mu0 * vecs[0] ** 2


def discretize_bath(
    K: int,
    bath: BathParams,
    n_max: int | None = None,
    dimension_cap: int = DIMENSION_CAP,
) -> DiscreteBath:
    if K < 1:
        raise ValueError("K must be >= 1")
    x_nodes, x_weights = _gauss_rule(K)
    omegas = bath.omega_c * x_nodes
    # integral of J/pi picks up gamma/(2 pi) times omega_c from the rescaling
    weights = bath.gamma * bath.omega_c / (2.0 * math.pi) * x_weights
    g = np.sqrt(weights)

    heuristic = 10 + int(np.ceil(4.0 * np.max((g / omegas) ** 2)))
    if n_max is None:
        n_max = max(2, heuristic)
    elif n_max < heuristic:
        warnings.warn(
            f"n_max={n_max} below displacement heuristic {heuristic}; "
            "truncation may not converge",
            RuntimeWarning,
        )
    if 2 * n_max**K > dimension_cap:
        raise ValueError(
            f"K={K} with n_max={n_max} exceeds dimension cap {dimension_cap}"
        )
    return DiscreteBath(tuple(zip(omegas, g)), n_max, dimension_cap)


def discrete_kernel(
    discrete: DiscreteBath, model: ModelParams
) -> Callable[[np.ndarray], np.ndarray]:
    """zz influence kernel of the few-mode bath, sum of single-mode kernels."""
    beta = model.beta
    omegas = discrete.frequencies
    g2 = discrete.couplings ** 2
    scale = g2 / (-np.expm1(-beta * omegas))

    def kernel(taus: np.ndarray) -> np.ndarray:
        t = np.atleast_1d(np.asarray(taus, dtype=float))
        num = np.exp(-np.outer(t, omegas)) + np.exp(-np.outer(beta - t, omegas))
        return num @ scale

    return kernel


def discrete_correlation_table(
    discrete: DiscreteBath, model: ModelParams, grid_size: int = 401
) -> CorrelationTable:
    """Correlation table of the few-mode model in the uncoupled frame.

    Only the zz channel is nonzero there, so the perturbative solver can be
    pointed at the identical discrete model."""
    grid = np.linspace(0.0, model.beta, grid_size)
    zeros = np.zeros(grid_size)
    values = {name: zeros.copy() for name in CHANNELS}
    values["zz"] = discrete_kernel(discrete, model)(grid)
    return CorrelationTable(
        tau_grid=grid, values=values, phi_values=zeros.copy(), phi0=0.0
    )


def _hamiltonian(discrete: DiscreteBath, model: ModelParams, n_max: int) -> csr_matrix:
    # real symmetric: sigma_y never enters
    K = len(discrete.modes)
    sz = diags([1.0, -1.0])
    sx = csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
    bath_eye = identity(n_max**K, format="csr")
    h = kron(0.5 * model.epsilon * sz + 0.5 * model.delta * sx, bath_eye)

    ladder = np.sqrt(np.arange(1, n_max))
    number = diags(np.arange(n_max, dtype=float))
    position = diags([ladder, ladder], offsets=[1, -1])  # a + a^dag
    for k, (omega, g) in enumerate(discrete.modes):
        left = identity(n_max**k, format="csr")
        right = identity(n_max ** (K - 1 - k), format="csr")
        h = h + kron(identity(2), kron(left, kron(omega * number, right)))
        h = h + kron(sz, kron(left, kron(g * position, right)))
    return csr_matrix(h)


def _thermal_sigma_z(
    discrete: DiscreteBath, model: ModelParams, n_max: int
) -> tuple[np.ndarray, float]:
    """Boltzmann-weighted partial trace at one truncation level."""
    h = _hamiltonian(discrete, model, n_max)
    dim = h.shape[0]
    if dim <= DENSE_CUTOFF:
        energies, vectors = eigh(h.toarray())
    else:
        k = min(128, dim - 1)
        while True:
            energies, vectors = eigsh(h, k=k, which="SA")
            order = np.argsort(energies)
            energies, vectors = energies[order], vectors[:, order]
            weights = np.exp(-model.beta * (energies - energies[0]))
            if weights[-1] <= BOLTZMANN_CUTOFF * weights.sum() or k == dim - 1:
                break
            k = min(2 * k, dim - 1)

    weights = np.exp(-model.beta * (energies - energies[0]))
    keep = weights > BOLTZMANN_CUTOFF * weights.sum()
    v = vectors[:, keep].reshape(2, dim // 2, int(keep.sum()))
    rho = np.einsum("adk,bdk,k->ab", v, v, weights[keep])
    rho = 0.5 * (rho + rho.T)
    r00 = rho[0, 0] / np.trace(rho)
    off = rho[0, 1] / np.trace(rho)
    entries = np.array([[r00, off], [off, 1.0 - r00]])
    return entries, float(entries[0, 0] - entries[1, 1])


def exact_rdm(
    discrete: DiscreteBath,
    model: ModelParams,
    recheck: bool = True,
) -> ReducedDensityMatrix:
    """Exact reduced density matrix of the few-mode model.

    With recheck enabled the truncation is bumped by two levels; a shift of
    sigma_z beyond RECHECK_TOL raises, and the finer result is returned."""
    entries, sz = _thermal_sigma_z(discrete, model, discrete.n_max)
    if recheck:
        finer = discrete.n_max + 2
        if discrete.dimension(finer) > discrete.dimension_cap:
            warnings.warn(
                "dimension cap blocks the truncation recheck", RuntimeWarning
            )
        else:
            entries, sz_fine = _thermal_sigma_z(discrete, model, finer)
            if abs(sz_fine - sz) > RECHECK_TOL:
                raise RuntimeError(
                    f"truncation not converged: sigma_z moved by "
                    f"{abs(sz_fine - sz):.3e} when n_max -> n_max+2"
                )
    return ReducedDensityMatrix(entries=entries.astype(complex), order=None)
