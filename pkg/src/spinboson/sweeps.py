"""Experiment drivers: gamma/omega_c sweeps, psi scans, phase-diagram grids.

Each driver maps a validated config to a list of CSV rows with a fixed
column order. Rows echo the full parameter set so output files are
self-describing; per-row failures are recorded in the flags column and the
run continues. Grid points may execute in a worker pool; rows are emitted
in grid order regardless of completion order.
"""

from __future__ import annotations

import csv
import datetime
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import pimc
from .adiabatic import AdiabaticParams, sigma_z_adiabatic
from .bath import full_polaron_frame
from .model import BathParams, ModelParams, original_frame
from .perturbation import expectation_sigma_z, reduced_density_matrix
from .variational import psi, psi_curve, solve_variational

METHODS = ("orig0", "orig2", "pol0", "pol2", "var0", "var2", "pimc", "adiabatic")
SWEEP_COLUMNS = (
    "epsilon", "delta", "beta", "omega_c", "gamma",
    "method", "sigma_z", "stderr", "flags",
)
PSI_COLUMNS = (
    "epsilon", "delta", "beta", "omega_c", "gamma", "B", "psi", "flags",
)
PHASE_COLUMNS = (
    "epsilon", "delta", "beta", "omega_c", "gamma",
    "method", "rel_error", "ref_sigma_z", "ref_stderr", "flags",
)
# cells where the reference is consistent with zero at this many stderrs
# carry no relative error
UNRELIABLE_FACTOR = 5.0


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class PimcSettings:
    n_steps: int = 256
    n_samples: int = 100_000
    n_batches: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.n_steps < 2:
            raise ConfigError("pimc n_steps must be >= 2")
        if self.n_samples < self.n_batches:
            raise ConfigError("pimc n_samples must be >= n_batches")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("pimc seed must fit in 64 bits")


@dataclass(frozen=True)
class SweepConfig:
    model: ModelParams
    bath: BathParams
    variable: str
    grid: tuple[float, ...]
    methods: tuple[str, ...]
    pimc: PimcSettings

    def __post_init__(self):
        if self.variable not in ("gamma", "omega_c"):
            raise ConfigError("sweep variable must be 'gamma' or 'omega_c'")
        if not self.grid:
            raise ConfigError("sweep grid must be nonempty")
        if any(b < a for a, b in zip(self.grid, self.grid[1:])):
            raise ConfigError("sweep grid must be sorted ascending")
        if not self.methods:
            raise ConfigError("sweep methods must be nonempty")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r}")


@dataclass(frozen=True)
class PsiScanConfig:
    model: ModelParams
    bath: BathParams  # omega_c is shared; gamma is taken from `gammas`
    gammas: tuple[float, ...]
    b_points: int = 400

    def __post_init__(self):
        if not self.gammas:
            raise ConfigError("psi scan needs at least one gamma")
        if self.b_points < 10:
            raise ConfigError("psi scan needs at least 10 B points")


@dataclass(frozen=True)
class GridConfig:
    model: ModelParams
    gamma_grid: tuple[float, ...]
    omega_c_grid: tuple[float, ...]
    methods: tuple[str, ...]
    pimc: PimcSettings

    def __post_init__(self):
        if not self.gamma_grid or not self.omega_c_grid:
            raise ConfigError("phase grids must be nonempty")
        if not self.methods:
            raise ConfigError("phase methods must be nonempty")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r}")
            if m == "pimc":
                raise ConfigError("pimc is the phase-diagram reference, not a method")


def spread_seed(seed: int, index: int) -> int:
    """Distinct 64-bit stream per grid point, splitmix-style."""
    z = (seed + 0x9E3779B97F4A7C15 * (index + 1)) % 2**64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) % 2**64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) % 2**64
    return z ^ (z >> 31)


def _variational_sigma_z(model, bath, order):
    solution = solve_variational(model, bath)
    rho = reduced_density_matrix(solution.frame_solution, model, bath, order=order)
    flags = "incoherent" if solution.warning else ""
    return expectation_sigma_z(rho), flags


def method_sigma_z(
    method: str,
    model: ModelParams,
    bath: BathParams,
    settings: PimcSettings,
    seed: int,
) -> tuple[float, float | None, str]:
    """One (sigma_z, stderr, flags) evaluation; stderr only for pimc."""
    if method == "pimc":
        est = pimc.estimate(
            model,
            bath,
            n_steps=settings.n_steps,
            n_samples=settings.n_samples,
            n_batches=settings.n_batches,
            seed=seed,
        )
        return est.sigma_z, est.sigma_z_stderr, ""
    if method == "adiabatic":
        return sigma_z_adiabatic(AdiabaticParams.from_bath(model, bath)), None, ""
    order = 2 if method.endswith("2") else 0
    if method.startswith("var"):
        value, flags = _variational_sigma_z(model, bath, order)
        return value, None, flags
    if method.startswith("pol"):
        frame = full_polaron_frame(model, bath)
    else:
        frame = original_frame(model)
    rho = reduced_density_matrix(frame, model, bath, order=order)
    return expectation_sigma_z(rho), None, ""


def _sweep_point(args):
    index, config = args
    value = config.grid[index]
    if config.variable == "gamma":
        bath = BathParams(gamma=value, omega_c=config.bath.omega_c)
    else:
        bath = BathParams(gamma=config.bath.gamma, omega_c=value)
    m = config.model
    rows = []
    for method in config.methods:
        base = [m.epsilon, m.delta, m.beta, bath.omega_c, bath.gamma, method]
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                sigma_z, stderr, flags = method_sigma_z(
                    method, m, bath, config.pimc,
                    spread_seed(config.pimc.seed, index),
                )
            rows.append(base + [sigma_z, stderr, flags])
        except Exception as exc:  # recorded per row, run continues
            rows.append(base + [None, None, f"error:{type(exc).__name__}"])
    return index, rows


def _pool_map(fn, jobs, threads):
    if threads <= 1:
        results = [fn(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(fn, jobs))
    return [rows for _, rows in sorted(results, key=lambda r: r[0])]


def run_sweep(config: SweepConfig, threads: int = 1) -> list[list]:
    jobs = [(i, config) for i in range(len(config.grid))]
    chunks = _pool_map(_sweep_point, jobs, threads)
    return [row for chunk in chunks for row in chunk]


def run_psi_scan(config: PsiScanConfig) -> list[list]:
    """Psi(B) curves per gamma with root and selected-root marker rows."""
    m = config.model
    rows = []
    grid = [i / (config.b_points - 1) for i in range(config.b_points)]
    for gamma in config.gammas:
        bath = BathParams(gamma=gamma, omega_c=config.bath.omega_c)
        base = [m.epsilon, m.delta, m.beta, bath.omega_c, gamma]
        curve = psi_curve(m, bath, grid)
        for b, value in zip(curve.B_grid, curve.psi_values):
            rows.append(base + [float(b), float(value), ""])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            solution = solve_variational(m, bath)
            for i, root in enumerate(solution.roots):
                tokens = ["root"]
                if i == solution.selected:
                    tokens.append("selected")
                if solution.warning:
                    tokens.append("incoherent")
                rows.append(base + [float(root), psi(root, m, bath), ";".join(tokens)])
    return rows


def _phase_cell(args):
    index, config, gamma, omega_c = args
    m = config.model
    bath = BathParams(gamma=gamma, omega_c=omega_c)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            ref = pimc.estimate(
                m,
                bath,
                n_steps=config.pimc.n_steps,
                n_samples=config.pimc.n_samples,
                n_batches=config.pimc.n_batches,
                seed=spread_seed(config.pimc.seed, index),
            )
    except Exception as exc:
        rows = [
            [m.epsilon, m.delta, m.beta, omega_c, gamma, method,
             None, None, None, f"error:{type(exc).__name__}"]
            for method in config.methods
        ]
        return index, rows

    unreliable = abs(ref.sigma_z) < UNRELIABLE_FACTOR * ref.sigma_z_stderr
    rows = []
    for method in config.methods:
        base = [m.epsilon, m.delta, m.beta, omega_c, gamma, method]
        tail = [ref.sigma_z, ref.sigma_z_stderr]
        if unreliable:
            rows.append(base + [None] + tail + ["unreliable"])
            continue
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                value, _, flags = method_sigma_z(method, m, bath, config.pimc, 0)
            rel = abs((value - ref.sigma_z) / ref.sigma_z)
            rows.append(base + [rel] + tail + [flags])
        except Exception as exc:
            rows.append(base + [None] + tail + [f"error:{type(exc).__name__}"])
    return index, rows


def run_phase_diagram(config: GridConfig, threads: int = 1) -> list[list]:
    jobs = []
    index = 0
    for gamma in config.gamma_grid:
        for omega_c in config.omega_c_grid:
            jobs.append((index, config, gamma, omega_c))
            index += 1
    chunks = _pool_map(_phase_cell, jobs, threads)
    return [row for chunk in chunks for row in chunk]


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def write_csv(
    path: str,
    columns: Sequence[str],
    rows: Iterable[Sequence],
    timestamp_header: bool = True,
    seed: int | None = None,
) -> None:
    """Write rows with the fixed column order; floats at 17 significant
    digits. The generated-at comment line is the only non-reproducible
    content and can be suppressed."""
    with open(path, "w", newline="") as fh:
        if timestamp_header:
            stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
            note = f"# generated {stamp}"
            if seed is not None:
                note += f" seed={seed}"
            fh.write(note + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
