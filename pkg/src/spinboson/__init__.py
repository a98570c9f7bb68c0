"""Equilibrium solvers and oracles for the super-ohmic spin-boson model.

Submodules:
  model         parameter and frame types
  bath          spectral density, correlation channels, renormalization
  variational   self-consistent displacement solver and free-energy ranking
  perturbation  order-0/2 reduced density matrices in a chosen frame
  pimc          stochastic path-integral oracle with jackknife errors
  adiabatic     static-noise closed form for slow baths
  discrete      few-mode exact-diagonalization oracle
  sweeps, cli   experiment drivers and the command-line harness
"""

from .adiabatic import AdiabaticParams, sigma_z_adiabatic
from .bath import (
    CorrelationTable,
    build_correlation_table,
    correlation,
    full_polaron_frame,
    renormalization_rhs,
    spectral_density,
)
from .model import BathParams, Frame, FrameSolution, ModelParams, original_frame
from .perturbation import (
    ReducedDensityMatrix,
    expectation_sigma_z,
    reduced_density_matrix,
)
from .pimc import McEstimate, estimate
from .variational import (
    VariationalSolution,
    find_roots,
    free_energy_bound,
    locate_discontinuity,
    psi,
    solve_variational,
)

__version__ = "1.0.0"

__all__ = [
    "AdiabaticParams",
    "BathParams",
    "CorrelationTable",
    "Frame",
    "FrameSolution",
    "McEstimate",
    "ModelParams",
    "ReducedDensityMatrix",
    "VariationalSolution",
    "build_correlation_table",
    "correlation",
    "estimate",
    "expectation_sigma_z",
    "find_roots",
    "free_energy_bound",
    "full_polaron_frame",
    "locate_discontinuity",
    "original_frame",
    "psi",
    "reduced_density_matrix",
    "renormalization_rhs",
    "sigma_z_adiabatic",
    "solve_variational",
    "spectral_density",
]
