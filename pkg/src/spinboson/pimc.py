"""Stochastic imaginary-time evaluation of the reduced density matrix.

The influence of the bath on the sigma_z channel is replaced by a Gaussian
noise field xi(tau) with covariance C_zz^(0) (original frame); each sample
propagates the two-level system through exp(-dtau H(tau_j)) factors at the
interval midpoints and the sample mean is normalized at the end.

Reproducibility contract: batch b draws from Philox keyed by (seed, b) and
batch results are reduced in index order with compensated summation, so the
estimate is bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import toeplitz

from .bath import correlation
from .model import BathParams, ModelParams, original_frame
from .perturbation import ReducedDensityMatrix, _exact_trace

MAX_REJECT_FRACTION = 1e-6
MIN_BATCHES = 50
_JITTERS = (1e-12, 1e-11, 1e-10, 1e-9, 1e-8)


@dataclass(frozen=True)
class NoisePath:
    """Noise values at the n_steps interval midpoints."""

    values: np.ndarray
    dtau: float


@dataclass(frozen=True)
class McEstimate:
    rho: ReducedDensityMatrix
    stderr: np.ndarray
    sigma_z: float
    sigma_z_stderr: float
    n_samples: int
    n_rejected: int
    n_steps: int
    seed: int


def default_kernel(model: ModelParams, bath: BathParams) -> Callable[[np.ndarray], np.ndarray]:
    """C_zz in the original frame, the exact influence kernel of this model."""
    frame = original_frame(model)

    def kernel(taus: np.ndarray) -> np.ndarray:
        return np.atleast_1d(correlation("zz", taus, frame, model, bath))

    return kernel


def covariance_matrix(
    n_steps: int,
    model: ModelParams,
    bath: BathParams,
    kernel: Callable[[np.ndarray], np.ndarray] | None = None,
) -> np.ndarray:
    """Toeplitz midpoint covariance: Sigma_ij = C_zz(|i-j| dtau)."""
    if n_steps < 2:
        raise ValueError("n_steps must be >= 2")
    if kernel is None:
        if bath.gamma == 0.0:
            return np.zeros((n_steps, n_steps))
        kernel = default_kernel(model, bath)
    dtau = model.beta / n_steps
    first_col = np.asarray(kernel(dtau * np.arange(n_steps)), dtype=float)
    return toeplitz(first_col)


def cholesky_factor(cov: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, with an escalating diagonal jitter for the
    near-singular covariances a smooth kernel produces."""
    if not np.any(cov):
        return np.zeros_like(cov)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        pass
    scale = float(cov[0, 0])
    eye = np.eye(cov.shape[0])
    for jitter in _JITTERS:
        try:
            return np.linalg.cholesky(cov + jitter * scale * eye)
        except np.linalg.LinAlgError:
            continue
    raise RuntimeError("covariance not positive definite even with 1e-8 jitter")


def sample_noise(chol: np.ndarray, dtau: float, rng: np.random.Generator) -> NoisePath:
    z = rng.standard_normal(chol.shape[0])
    return NoisePath(values=chol @ z, dtau=dtau)


def _propagate_block(xi: np.ndarray, model: ModelParams, dtau: float):
    """Propagate a block of noise paths; returns the four entry vectors of
    the (symmetrized) sample matrices."""
    n = xi.shape[0]
    b = 0.5 * model.delta
    p00 = np.ones(n)
    p01 = np.zeros(n)
    p10 = np.zeros(n)
    p11 = np.ones(n)
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(xi.shape[1]):
            a = 0.5 * model.epsilon + xi[:, j]
            h = np.hypot(a, b)
            t = dtau * h
            ch = np.cosh(t)
            s = np.where(h > 0.0, np.sinh(t) / np.where(h > 0.0, h, 1.0), dtau)
            e00 = ch - s * a
            e01 = -s * b
            e11 = ch + s * a
            q00 = e00 * p00 + e01 * p10
            q01 = e00 * p01 + e01 * p11
            q10 = e01 * p00 + e11 * p10
            q11 = e01 * p01 + e11 * p11
            p00, p01, p10, p11 = q00, q01, q10, q11
    off = 0.5 * (p01 + p10)
    return p00, off, p11


def propagate(path: NoisePath, model: ModelParams) -> np.ndarray:
    """Sample weight matrix prod_j exp(-dtau H(tau_j)) for one noise path,
    symmetrized with its time reverse (same measure)."""
    p00, off, p11 = _propagate_block(path.values[None, :], model, path.dtau)
    return np.array([[p00[0], off[0]], [off[0], p11[0]]])


def _batch_sums(args):
    seed, b_index, batch_size, chol, model, dtau = args
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, b_index], dtype=np.uint64)))
    z = rng.standard_normal((batch_size, chol.shape[0]))
    xi = z @ chol.T
    p00, off, p11 = _propagate_block(xi, model, dtau)
    good = np.isfinite(p00) & np.isfinite(off) & np.isfinite(p11)
    n_rejected = int(batch_size - good.sum())
    return (
        float(p00[good].sum()),
        float(off[good].sum()),
        float(p11[good].sum()),
        int(good.sum()),
        n_rejected,
    )


def _normalized(s00: float, s01: float, s11: float) -> np.ndarray:
    tr = s00 + s11
    if not tr > 0.0:
        raise RuntimeError("sample-mean trace is not positive")
    return np.array([[s00 / tr, s01 / tr], [s01 / tr, s11 / tr]])


def estimate(
    model: ModelParams,
    bath: BathParams,
    n_steps: int = 256,
    n_samples: int = 1_000_000,
    seed: int = 0,
    n_batches: int = 100,
    kernel: Callable[[np.ndarray], np.ndarray] | None = None,
    threads: int = 1,
) -> McEstimate:
    """Monte Carlo estimate of the reduced density matrix and its jackknife
    standard errors."""
    if n_batches < MIN_BATCHES:
        raise ValueError(f"n_batches must be >= {MIN_BATCHES}")
    if n_samples < n_batches:
        raise ValueError("n_samples must be >= n_batches")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in 64 bits")
    if threads < 1:
        raise ValueError("threads must be >= 1")

    cov = covariance_matrix(n_steps, model, bath, kernel)
    chol = cholesky_factor(cov)
    dtau = model.beta / n_steps
    base, extra = divmod(n_samples, n_batches)
    sizes = [base + (1 if b < extra else 0) for b in range(n_batches)]
    tasks = [(seed, b, sizes[b], chol, model, dtau) for b in range(n_batches)]

    if threads == 1:
        results = [_batch_sums(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_batch_sums, tasks, chunksize=4))

    # compensated reduction in fixed batch order keeps the estimate
    # independent of the worker count
    tot00 = math.fsum(r[0] for r in results)
    tot01 = math.fsum(r[1] for r in results)
    tot11 = math.fsum(r[2] for r in results)
    tot_n = sum(r[3] for r in results)
    n_rejected = sum(r[4] for r in results)
    if n_rejected > MAX_REJECT_FRACTION * n_samples:
        raise RuntimeError(
            f"{n_rejected} of {n_samples} samples were non-finite; "
            "the coupling is too strong for direct sampling at this n_steps"
        )

    mean = _normalized(tot00 / tot_n, tot01 / tot_n, tot11 / tot_n)
    sigma_z = float(mean[0, 0] - mean[1, 1])

    # delete-1 jackknife over batches, on the normalized estimator
    loo = []
    for r in results:
        c = tot_n - r[3]
        loo.append(_normalized((tot00 - r[0]) / c, (tot01 - r[1]) / c, (tot11 - r[2]) / c))
    loo = np.array(loo)
    nb = len(results)
    center = loo.mean(axis=0)
    var = (nb - 1) / nb * ((loo - center) ** 2).sum(axis=0)
    stderr = np.sqrt(var)
    sz = loo[:, 0, 0] - loo[:, 1, 1]
    sz_var = (nb - 1) / nb * ((sz - sz.mean()) ** 2).sum()

    rho = ReducedDensityMatrix(entries=_exact_trace(mean, 1.0), order=None)
    return McEstimate(
        rho=rho,
        stderr=stderr,
        sigma_z=sigma_z,
        sigma_z_stderr=float(math.sqrt(sz_var)),
        n_samples=n_samples,
        n_rejected=n_rejected,
        n_steps=n_steps,
        seed=seed,
    )
